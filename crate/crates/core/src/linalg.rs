//! Exact linear algebra over `BigRational`.
//!
//! Everything here works on dense row-major matrices stored as
//! `Vec<Vec<Rational>>`. Row reduction is fraction-free in spirit only: the
//! entries are exact rationals, so no pivoting strategy is needed for
//! stability, and the first nonzero entry in a column is used as the pivot.

use num::{BigInt, BigRational, One, Signed, Zero};

pub type Rational = BigRational;

/// Shorthand for `n / d` as an exact rational. Panics if `d == 0`.
pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

/// Reduced row echelon form of the given rows.
///
/// Returns the nonzero rows of the RREF together with the pivot column of
/// each row. The result is canonical for the row space: two families of
/// vectors span the same subspace iff their reductions are equal.
pub fn rref(rows: &[Vec<Rational>], ncols: usize) -> (Vec<Vec<Rational>>, Vec<usize>) {
    let mut m: Vec<Vec<Rational>> = rows.to_vec();
    let mut pivots = Vec::new();
    let mut r = 0;
    for col in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][col].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][col].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        let pivot_row = m[r].clone();
        for (i, row) in m.iter_mut().enumerate() {
            if i != r && !row[col].is_zero() {
                let f = row[col].clone();
                for (x, y) in row[col..ncols].iter_mut().zip(&pivot_row[col..ncols]) {
                    *x -= &f * y;
                }
            }
        }
        pivots.push(col);
        r += 1;
    }
    m.truncate(r);
    (m, pivots)
}

pub fn rank(rows: &[Vec<Rational>], ncols: usize) -> usize {
    rref(rows, ncols).1.len()
}

/// Basis of `{ x : A x = 0 }` for an `nrows x ncols` matrix `A`.
///
/// One basis vector per free column, with a 1 in that column; the basis is
/// itself returned in reduced echelon form.
pub fn nullspace(a: &[Vec<Rational>], ncols: usize) -> Vec<Vec<Rational>> {
    let (red, pivots) = rref(a, ncols);
    let mut basis = Vec::new();
    for free in (0..ncols).filter(|c| !pivots.contains(c)) {
        let mut v = vec![Rational::zero(); ncols];
        v[free] = Rational::one();
        for (row, &pc) in red.iter().zip(&pivots) {
            v[pc] = -row[free].clone();
        }
        basis.push(v);
    }
    let (canon, _) = rref(&basis, ncols);
    canon
}

/// Reduce `v` modulo the row space of an RREF matrix with the given pivots.
/// The returned vector is zero in every pivot column.
pub fn reduce(v: &[Rational], red: &[Vec<Rational>], pivots: &[usize]) -> Vec<Rational> {
    let mut out = v.to_vec();
    for (row, &pc) in red.iter().zip(pivots) {
        if out[pc].is_zero() {
            continue;
        }
        let f = out[pc].clone();
        for (o, r) in out.iter_mut().zip(row) {
            if !r.is_zero() {
                *o -= &f * r;
            }
        }
    }
    out
}

pub fn is_zero_vec(v: &[Rational]) -> bool {
    v.iter().all(Zero::is_zero)
}

/// Best rational approximation of `x` with denominator at most `max_den`,
/// by continued fractions.
pub fn rationalize(x: f64, max_den: i64) -> Rational {
    if !x.is_finite() {
        return Rational::zero();
    }
    let neg = x < 0.0;
    let mut y = x.abs();
    // convergents h/k
    let (mut h0, mut h1) = (0i128, 1i128);
    let (mut k0, mut k1) = (1i128, 0i128);
    for _ in 0..64 {
        let a = y.floor();
        if a > 1e15 {
            break;
        }
        let a = a as i128;
        let h2 = a * h1 + h0;
        let k2 = a * k1 + k0;
        if k2 > max_den as i128 {
            break;
        }
        (h0, h1, k0, k1) = (h1, h2, k1, k2);
        let frac = y - a as f64;
        if frac < 1e-15 {
            break;
        }
        y = 1.0 / frac;
    }
    if k1 == 0 {
        return Rational::zero();
    }
    let r = Rational::new(BigInt::from(h1), BigInt::from(k1));
    if neg {
        -r
    } else {
        r
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or_else(|| if r.is_negative() { f64::MIN } else { f64::MAX })
}
