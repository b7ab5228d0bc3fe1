//! Bivariate polynomials with exact rational coefficients, plus a compiled
//! `f64` form for fast evaluation.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::{One, Signed, Zero};

use crate::linalg::{self, Rational};

/// `Σ c_ij x^i y^j`, keyed by `(i, j)`. Zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly2 {
    terms: BTreeMap<(u32, u32), Rational>,
}

impl Poly2 {
    pub fn zero() -> Self {
        Poly2::default()
    }

    pub fn constant(c: Rational) -> Self {
        Self::monomial(0, 0, c)
    }

    pub fn x() -> Self {
        Self::monomial(1, 0, Rational::one())
    }

    pub fn y() -> Self {
        Self::monomial(0, 1, Rational::one())
    }

    pub fn monomial(i: u32, j: u32, c: Rational) -> Self {
        let mut p = Poly2::zero();
        p.add_term(i, j, c);
        p
    }

    /// From `(i, j, coefficient)` triples; repeated exponents are summed.
    pub fn from_terms<I: IntoIterator<Item = (u32, u32, Rational)>>(terms: I) -> Self {
        let mut p = Poly2::zero();
        for (i, j, c) in terms {
            p.add_term(i, j, c);
        }
        p
    }

    /// From integer `(i, j, coefficient)` triples.
    pub fn from_ints(terms: &[(u32, u32, i64)]) -> Self {
        Self::from_terms(terms.iter().map(|&(i, j, c)| (i, j, linalg::int(c))))
    }

    pub fn add_term(&mut self, i: u32, j: u32, c: Rational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry((i, j)).or_insert_with(Rational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&(i, j));
        }
    }

    pub fn terms(&self) -> impl Iterator<Item = ((u32, u32), &Rational)> {
        self.terms.iter().map(|(k, v)| (*k, v))
    }

    pub fn coeff(&self, i: u32, j: u32) -> Rational {
        self.terms.get(&(i, j)).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|&k| k == (0, 0))
    }

    /// Total degree; the zero polynomial has degree 0.
    pub fn degree(&self) -> u32 {
        self.terms.keys().map(|(i, j)| i + j).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Poly2::zero();
        }
        Poly2 {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    pub fn dx(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((i, _), _)| *i > 0)
                .map(|(&(i, j), c)| (i - 1, j, c * linalg::int(i as i64))),
        )
    }

    pub fn dy(&self) -> Self {
        Self::from_terms(
            self.terms
                .iter()
                .filter(|((_, j), _)| *j > 0)
                .map(|(&(i, j), c)| (i, j - 1, c * linalg::int(j as i64))),
        )
    }

    pub fn pow(&self, n: u32) -> Self {
        let mut acc = Poly2::constant(Rational::one());
        for _ in 0..n {
            acc = &acc * self;
        }
        acc
    }

    /// Substitute `x -> fx`, `y -> fy`.
    pub fn compose(&self, fx: &Poly2, fy: &Poly2) -> Self {
        let mut out = Poly2::zero();
        for (&(i, j), c) in &self.terms {
            out = &out + &(&fx.pow(i) * &fy.pow(j)).scale(c);
        }
        out
    }

    /// Exact evaluation at a rational point.
    pub fn eval_exact(&self, x: &Rational, y: &Rational) -> Rational {
        let mut s = Rational::zero();
        for (&(i, j), c) in &self.terms {
            s += c * num::pow(x.clone(), i as usize) * num::pow(y.clone(), j as usize);
        }
        s
    }

    /// Exact quotient by `x² + y²`, or `None` if it does not divide.
    pub fn div_by_norm2(&self) -> Option<Poly2> {
        // Divisor is monic in x of x-degree 2, so long division by the
        // x-leading term leaves a unique remainder of x-degree < 2.
        let mut rem = self.clone();
        let mut quot = Poly2::zero();
        loop {
            let lead = rem
                .terms
                .iter()
                .filter(|((i, _), _)| *i >= 2)
                .max_by_key(|((i, j), _)| (*i, *j))
                .map(|(k, c)| (*k, c.clone()));
            let Some(((i, j), c)) = lead else { break };
            quot.add_term(i - 2, j, c.clone());
            rem.add_term(i, j, -c.clone());
            rem.add_term(i - 2, j + 2, -c);
        }
        rem.is_zero().then_some(quot)
    }

    pub fn compile(&self) -> CompiledPoly {
        CompiledPoly::new(self)
    }

    pub fn max_abs_coeff(&self) -> Rational {
        self.terms
            .values()
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Rational::zero)
    }
}

impl Add for &Poly2 {
    type Output = Poly2;
    fn add(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, c.clone());
        }
        out
    }
}

impl Sub for &Poly2 {
    type Output = Poly2;
    fn sub(self, rhs: &Poly2) -> Poly2 {
        let mut out = self.clone();
        for (&(i, j), c) in &rhs.terms {
            out.add_term(i, j, -c.clone());
        }
        out
    }
}

impl Mul for &Poly2 {
    type Output = Poly2;
    fn mul(self, rhs: &Poly2) -> Poly2 {
        let mut out = Poly2::zero();
        for (&(i1, j1), c1) in &self.terms {
            for (&(i2, j2), c2) in &rhs.terms {
                out.add_term(i1 + i2, j1 + j2, c1 * c2);
            }
        }
        out
    }
}

impl Neg for &Poly2 {
    type Output = Poly2;
    fn neg(self) -> Poly2 {
        self.scale(&-Rational::one())
    }
}

impl fmt::Display for Poly2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        for (n, (&(i, j), c)) in self.terms.iter().enumerate() {
            if n > 0 {
                write!(f, " + ")?;
            }
            write!(f, "{c}")?;
            match i {
                0 => {}
                1 => write!(f, "*x")?,
                _ => write!(f, "*x^{i}")?,
            }
            match j {
                0 => {}
                1 => write!(f, "*y")?,
                _ => write!(f, "*y^{j}")?,
            }
        }
        Ok(())
    }
}

/// Dense `f64` copy of a [`Poly2`] for repeated evaluation.
///
/// `rows[j][i]` is the coefficient of `x^i y^j`. Evaluation is Horner in `x`
/// within each row and Horner in `y` across rows, always in the same order.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledPoly {
    rows: Vec<Vec<f64>>,
}

impl CompiledPoly {
    fn new(p: &Poly2) -> Self {
        let ymax = p.terms.keys().map(|k| k.1).max();
        let Some(ymax) = ymax else {
            return CompiledPoly { rows: Vec::new() };
        };
        let mut rows = vec![Vec::new(); ymax as usize + 1];
        for (&(i, j), c) in &p.terms {
            let row = &mut rows[j as usize];
            if row.len() <= i as usize {
                row.resize(i as usize + 1, 0.0);
            }
            row[i as usize] = linalg::to_f64(c);
        }
        CompiledPoly { rows }
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn eval(&self, x: f64, y: f64) -> f64 {
        let mut acc = 0.0;
        for row in self.rows.iter().rev() {
            let mut r = 0.0;
            for &c in row.iter().rev() {
                r = r * x + c;
            }
            acc = acc * y + r;
        }
        acc
    }

    /// Coefficients of `p(cx + dx, cy + dy)` as a polynomial in `(dx, dy)`,
    /// returned as `(i, j, coefficient)`.
    pub fn taylor_shift(&self, cx: f64, cy: f64) -> Vec<(usize, usize, f64)> {
        // Shift in x inside each row, then in y across rows.
        let shifted_rows: Vec<Vec<f64>> = self.rows.iter().map(|r| shift1(r, cx)).collect();
        let xlen = shifted_rows.iter().map(Vec::len).max().unwrap_or(0);
        let mut out = Vec::new();
        for i in 0..xlen {
            let col: Vec<f64> = shifted_rows
                .iter()
                .map(|r| r.get(i).copied().unwrap_or(0.0))
                .collect();
            for (j, c) in shift1(&col, cy).into_iter().enumerate() {
                if c != 0.0 {
                    out.push((i, j, c));
                }
            }
        }
        out
    }

    /// Upper bound on `|p(c + d) - p(c)|` over `|dx|, |dy| <= h`.
    pub fn variation_bound(&self, cx: f64, cy: f64, h: f64) -> f64 {
        let mut b = 0.0;
        for (i, j, c) in self.taylor_shift(cx, cy) {
            if i + j > 0 {
                b += c.abs() * h.powi((i + j) as i32);
            }
        }
        b
    }
}

// Coefficients of q(t) = p(c + t) for a univariate p given lowest-first.
fn shift1(p: &[f64], c: f64) -> Vec<f64> {
    let mut a = p.to_vec();
    let n = a.len();
    if c == 0.0 {
        return a;
    }
    for k in 0..n {
        for j in (k..n - 1).rev() {
            a[j] += c * a[j + 1];
        }
    }
    a
}
