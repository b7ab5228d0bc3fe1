//! Finite-dimensional real Lie algebras given by rational structure constants.
//!
//! All computations are exact. Membership questions (is this subspace an
//! ideal, is this element in that subspace) are answered by rational row
//! reduction, never by tolerance.

use std::fmt;

use num::{One, Zero};
use thiserror::Error;

use crate::linalg::{self, Rational};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum LieError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("basis index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("antisymmetry violated: c[{i}][{j}][{k}] != -c[{j}][{i}][{k}]")]
    Antisymmetry { i: usize, j: usize, k: usize },
    #[error("Jacobi identity violated on basis triple ({i}, {j}, {l})")]
    Jacobi { i: usize, j: usize, l: usize },
    #[error("algebra must have at least one basis element")]
    Empty,
    #[error("subspace is not an ideal")]
    NotIdeal,
    #[error("algebra is not nilpotent")]
    NotNilpotent,
    #[error("operation needs dimension >= 2, algebra has dimension {0}")]
    TooSmall(usize),
}

/// A structure-constant table as read from input, before validation.
///
/// `c[i][j][k]` is the coefficient of `e_k` in `[e_i, e_j]`.
#[derive(Debug, Clone, PartialEq)]
pub struct StructureTable {
    names: Vec<String>,
    c: Vec<Vec<Vec<Rational>>>,
}

/// Outcome of checking a [`StructureTable`].
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TableCheck {
    pub antisymmetry_violations: Vec<(usize, usize, usize)>,
    pub jacobi_violations: Vec<(usize, usize, usize)>,
}

impl TableCheck {
    pub fn is_valid(&self) -> bool {
        self.antisymmetry_violations.is_empty() && self.jacobi_violations.is_empty()
    }
}

impl StructureTable {
    pub fn zero(names: Vec<String>) -> Self {
        let d = names.len();
        StructureTable {
            names,
            c: vec![vec![vec![Rational::zero(); d]; d]; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn get(&self, i: usize, j: usize, k: usize) -> &Rational {
        &self.c[i][j][k]
    }

    /// Set the single entry `c[i][j][k]`, leaving `c[j][i][k]` untouched.
    pub fn set(&mut self, i: usize, j: usize, k: usize, value: Rational) -> Result<(), LieError> {
        let d = self.dim();
        for index in [i, j, k] {
            if index >= d {
                return Err(LieError::IndexOutOfRange { index, dim: d });
            }
        }
        self.c[i][j][k] = value;
        Ok(())
    }

    pub fn check(&self) -> TableCheck {
        let d = self.dim();
        let mut out = TableCheck::default();
        for i in 0..d {
            for j in i..d {
                for k in 0..d {
                    if self.c[i][j][k] != -self.c[j][i][k].clone() {
                        out.antisymmetry_violations.push((i, j, k));
                    }
                }
            }
        }
        for i in 0..d {
            for j in i + 1..d {
                for l in j + 1..d {
                    if !self.jacobi_vanishes(i, j, l) {
                        out.jacobi_violations.push((i, j, l));
                    }
                }
            }
        }
        out
    }

    // [e_i,[e_j,e_l]] + [e_j,[e_l,e_i]] + [e_l,[e_i,e_j]]
    fn jacobi_vanishes(&self, i: usize, j: usize, l: usize) -> bool {
        let d = self.dim();
        let term = |a: usize, b: usize, c: usize, m: usize| -> Rational {
            let mut s = Rational::zero();
            for n in 0..d {
                let inner = &self.c[b][c][n];
                if !inner.is_zero() {
                    s += inner * &self.c[a][n][m];
                }
            }
            s
        };
        (0..d).all(|m| (term(i, j, l, m) + term(j, l, i, m) + term(l, i, j, m)).is_zero())
    }
}

/// A validated Lie algebra: antisymmetry and the Jacobi identity hold exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct LieAlgebra {
    table: StructureTable,
}

/// Coordinates of an element in the algebra basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct AlgebraElement(pub Vec<Rational>);

impl AlgebraElement {
    pub fn zero(dim: usize) -> Self {
        AlgebraElement(vec![Rational::zero(); dim])
    }

    pub fn basis(dim: usize, i: usize) -> Self {
        let mut v = Self::zero(dim);
        v.0[i] = Rational::one();
        v
    }

    pub fn from_ints(coords: &[i64]) -> Self {
        AlgebraElement(coords.iter().map(|&c| linalg::int(c)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[Rational] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        linalg::is_zero_vec(&self.0)
    }
}

impl fmt::Display for AlgebraElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

/// A linear subspace of a `parent_dim`-dimensional algebra, stored by its
/// canonical reduced-echelon basis.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    parent_dim: usize,
    basis: Vec<Vec<Rational>>,
    pivots: Vec<usize>,
}

impl Subspace {
    /// Span of arbitrary vectors; dependent vectors are dropped.
    pub fn span<I>(parent_dim: usize, vectors: I) -> Result<Self, LieError>
    where
        I: IntoIterator<Item = Vec<Rational>>,
    {
        let rows: Vec<_> = vectors.into_iter().collect();
        if let Some(bad) = rows.iter().find(|r| r.len() != parent_dim) {
            return Err(LieError::DimensionMismatch {
                expected: parent_dim,
                got: bad.len(),
            });
        }
        let (basis, pivots) = linalg::rref(&rows, parent_dim);
        Ok(Subspace {
            parent_dim,
            basis,
            pivots,
        })
    }

    pub fn span_elements<'a, I>(parent_dim: usize, elements: I) -> Result<Self, LieError>
    where
        I: IntoIterator<Item = &'a AlgebraElement>,
    {
        Self::span(parent_dim, elements.into_iter().map(|e| e.0.clone()))
    }

    pub fn zero(parent_dim: usize) -> Self {
        Subspace {
            parent_dim,
            basis: Vec::new(),
            pivots: Vec::new(),
        }
    }

    pub fn full(parent_dim: usize) -> Self {
        Self::span(
            parent_dim,
            (0..parent_dim).map(|i| AlgebraElement::basis(parent_dim, i).0),
        )
        .expect("standard basis has the right length")
    }

    pub fn parent_dim(&self) -> usize {
        self.parent_dim
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn codim(&self) -> usize {
        self.parent_dim - self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<Rational>] {
        &self.basis
    }

    pub fn basis_elements(&self) -> Vec<AlgebraElement> {
        self.basis.iter().cloned().map(AlgebraElement).collect()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn contains(&self, v: &[Rational]) -> bool {
        v.len() == self.parent_dim && linalg::is_zero_vec(&linalg::reduce(v, &self.basis, &self.pivots))
    }

    pub fn contains_subspace(&self, other: &Subspace) -> bool {
        other.basis.iter().all(|v| self.contains(v))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        Subspace::span(
            self.parent_dim,
            self.basis.iter().chain(&other.basis).cloned(),
        )
        .expect("both subspaces share a parent")
    }
}

impl LieAlgebra {
    pub fn from_table(table: StructureTable) -> Result<Self, LieError> {
        if table.dim() == 0 {
            return Err(LieError::Empty);
        }
        let check = table.check();
        if let Some(&(i, j, k)) = check.antisymmetry_violations.first() {
            return Err(LieError::Antisymmetry { i, j, k });
        }
        if let Some(&(i, j, l)) = check.jacobi_violations.first() {
            return Err(LieError::Jacobi { i, j, l });
        }
        Ok(LieAlgebra { table })
    }

    /// Build from the nonzero brackets `[e_i, e_j] = Σ v e_k`, listed once
    /// per unordered pair; the `(j, i)` entries are filled by antisymmetry.
    pub fn from_brackets<S: Into<String>>(
        names: impl IntoIterator<Item = S>,
        brackets: &[(usize, usize, usize, Rational)],
    ) -> Result<Self, LieError> {
        let mut t = StructureTable::zero(names.into_iter().map(Into::into).collect());
        for (i, j, k, v) in brackets {
            t.set(*i, *j, *k, v.clone())?;
            t.set(*j, *i, *k, -v.clone())?;
        }
        Self::from_table(t)
    }

    pub fn abelian(dim: usize) -> Self {
        let names: Vec<String> = (1..=dim).map(|i| format!("e{i}")).collect();
        Self::from_brackets(names, &[]).expect("abelian table is valid")
    }

    pub fn dim(&self) -> usize {
        self.table.dim()
    }

    pub fn names(&self) -> &[String] {
        self.table.names()
    }

    pub fn table(&self) -> &StructureTable {
        &self.table
    }

    pub fn structure_constant(&self, i: usize, j: usize, k: usize) -> &Rational {
        self.table.get(i, j, k)
    }

    fn check_dim(&self, v: &[Rational]) -> Result<(), LieError> {
        if v.len() != self.dim() {
            return Err(LieError::DimensionMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    fn check_subspace(&self, s: &Subspace) -> Result<(), LieError> {
        if s.parent_dim != self.dim() {
            return Err(LieError::DimensionMismatch {
                expected: self.dim(),
                got: s.parent_dim,
            });
        }
        Ok(())
    }

    fn bracket_raw(&self, a: &[Rational], b: &[Rational]) -> Vec<Rational> {
        let d = self.dim();
        let mut out = vec![Rational::zero(); d];
        for (i, ai) in a.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
            for (j, bj) in b.iter().enumerate().filter(|(_, x)| !x.is_zero()) {
                let w = ai * bj;
                for (k, o) in out.iter_mut().enumerate() {
                    let c = self.table.get(i, j, k);
                    if !c.is_zero() {
                        *o += &w * c;
                    }
                }
            }
        }
        out
    }

    pub fn bracket(&self, a: &AlgebraElement, b: &AlgebraElement) -> Result<AlgebraElement, LieError> {
        self.check_dim(&a.0)?;
        self.check_dim(&b.0)?;
        Ok(AlgebraElement(self.bracket_raw(&a.0, &b.0)))
    }

    /// `[a, s]`: span of brackets of basis vectors of `a` with basis vectors of `s`.
    fn bracket_spaces(&self, a: &Subspace, s: &Subspace) -> Subspace {
        let rows = a
            .basis
            .iter()
            .flat_map(|x| s.basis.iter().map(move |y| (x, y)))
            .map(|(x, y)| self.bracket_raw(x, y));
        Subspace::span(self.dim(), rows).expect("bracket preserves dimension")
    }

    /// Descending series g ⊇ [g,g] ⊇ [g,[g,g]] ⊇ …, truncated at the first
    /// repeated term (the repeat itself is not included).
    pub fn lower_central_series(&self) -> Vec<Subspace> {
        let full = Subspace::full(self.dim());
        let mut series = vec![full.clone()];
        loop {
            let last = series.last().expect("series is nonempty");
            if last.dim() == 0 {
                break;
            }
            let next = self.bracket_spaces(&full, last);
            if next.dim() == last.dim() {
                break;
            }
            series.push(next);
        }
        series
    }

    pub fn is_nilpotent(&self) -> bool {
        self.lower_central_series()
            .last()
            .is_some_and(|s| s.dim() == 0)
    }

    /// Kernel of `ad`: all `v` with `[v, e_j] = 0` for every `j`.
    pub fn center(&self) -> Subspace {
        let d = self.dim();
        // Row (j, k) of the system: Σ_i v_i c[i][j][k] = 0.
        let mut rows = Vec::with_capacity(d * d);
        for j in 0..d {
            for k in 0..d {
                rows.push((0..d).map(|i| self.table.get(i, j, k).clone()).collect());
            }
        }
        let ns = linalg::nullspace(&rows, d);
        Subspace::span(d, ns).expect("nullspace vectors have length d")
    }

    pub fn is_subalgebra(&self, s: &Subspace) -> bool {
        s.parent_dim == self.dim() && s.contains_subspace(&self.bracket_spaces(s, s))
    }

    pub fn is_ideal(&self, s: &Subspace) -> bool {
        s.parent_dim == self.dim()
            && s.contains_subspace(&self.bracket_spaces(&Subspace::full(self.dim()), s))
    }

    /// Smallest subalgebra containing `s`.
    pub fn subalgebra_closure(&self, s: &Subspace) -> Subspace {
        let mut cur = s.clone();
        loop {
            let next = cur.sum(&self.bracket_spaces(&cur, &cur));
            if next.dim() == cur.dim() {
                return cur;
            }
            cur = next;
        }
    }

    /// `u + w` spans the whole algebra.
    pub fn abh_check(&self, u: &Subspace, w: &Subspace) -> bool {
        u.parent_dim == self.dim() && w.parent_dim == self.dim() && u.sum(w).dim() == self.dim()
    }

    pub fn quotient(&self, ideal: &Subspace) -> Result<Quotient, LieError> {
        self.check_subspace(ideal)?;
        if !self.is_ideal(ideal) {
            return Err(LieError::NotIdeal);
        }
        let d = self.dim();
        let complement: Vec<usize> = (0..d).filter(|c| !ideal.pivots.contains(c)).collect();
        let project_raw = |v: &[Rational]| -> Vec<Rational> {
            let r = linalg::reduce(v, &ideal.basis, &ideal.pivots);
            complement.iter().map(|&c| r[c].clone()).collect()
        };
        let names = complement.iter().map(|&c| self.names()[c].clone()).collect();
        let mut table = StructureTable::zero(names);
        for (a, &ca) in complement.iter().enumerate() {
            for (b, &cb) in complement.iter().enumerate() {
                let br = project_raw(&self.bracket_raw(
                    &AlgebraElement::basis(d, ca).0,
                    &AlgebraElement::basis(d, cb).0,
                ));
                for (k, v) in br.into_iter().enumerate() {
                    table.set(a, b, k, v)?;
                }
            }
        }
        let algebra = if complement.is_empty() {
            // The zero algebra has no basis; represent it by a table check only.
            None
        } else {
            Some(LieAlgebra::from_table(table)?)
        };
        Ok(Quotient {
            algebra,
            parent_dim: d,
            ideal: ideal.clone(),
            complement,
        })
    }

    /// A codimension-one ideal containing `y`.
    ///
    /// Recursive construction: quotient by a one-dimensional central ideal,
    /// find an ideal in the quotient, pull it back. The central line is the
    /// first vector of the canonical basis of the center.
    pub fn codim1_ideal_containing(&self, y: &AlgebraElement) -> Result<Subspace, LieError> {
        self.check_dim(&y.0)?;
        if self.dim() < 2 {
            return Err(LieError::TooSmall(self.dim()));
        }
        if !self.is_nilpotent() {
            return Err(LieError::NotNilpotent);
        }
        Ok(self.codim1_ideal_nilpotent(y))
    }

    fn codim1_ideal_nilpotent(&self, y: &AlgebraElement) -> Subspace {
        let d = self.dim();
        if d == 2 {
            let v = if y.is_zero() {
                AlgebraElement::basis(2, 0).0
            } else {
                y.0.clone()
            };
            return Subspace::span(2, [v]).expect("length 2");
        }
        let center = self.center();
        let line = Subspace::span(d, [center.basis[0].clone()]).expect("center vector has length d");
        let q = self
            .quotient(&line)
            .expect("central line is an ideal");
        let qalg = q.algebra.as_ref().expect("quotient of dim >= 3 by a line is nonzero");
        let inner = qalg.codim1_ideal_nilpotent(&q.project(y));
        q.pullback(&inner)
    }
}

/// The quotient of an algebra by an ideal, with its projection and the
/// section used to lift elements back.
#[derive(Debug, Clone)]
pub struct Quotient {
    algebra: Option<LieAlgebra>,
    parent_dim: usize,
    ideal: Subspace,
    complement: Vec<usize>,
}

impl Quotient {
    /// `None` when the ideal is the whole algebra.
    pub fn algebra(&self) -> Option<&LieAlgebra> {
        self.algebra.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.complement.len()
    }

    /// Parent basis indices whose images form the quotient basis.
    pub fn complement(&self) -> &[usize] {
        &self.complement
    }

    pub fn project(&self, v: &AlgebraElement) -> AlgebraElement {
        let r = linalg::reduce(&v.0, &self.ideal.basis, &self.ideal.pivots);
        AlgebraElement(self.complement.iter().map(|&c| r[c].clone()).collect())
    }

    pub fn lift(&self, q: &AlgebraElement) -> AlgebraElement {
        let mut v = AlgebraElement::zero(self.parent_dim);
        for (x, &c) in q.0.iter().zip(&self.complement) {
            v.0[c] = x.clone();
        }
        v
    }

    /// Preimage of a subspace of the quotient.
    pub fn pullback(&self, s: &Subspace) -> Subspace {
        let lifted = s.basis.iter().map(|b| self.lift(&AlgebraElement(b.clone())).0);
        Subspace::span(self.parent_dim, lifted.chain(self.ideal.basis.iter().cloned()))
            .expect("lifted vectors have parent length")
    }
}

/// Small algebras used throughout the tests and the bundled scenarios.
pub mod fixtures {
    use super::*;
    use crate::linalg::int;

    /// h₃: [X, Y] = Z.
    pub fn heisenberg() -> LieAlgebra {
        LieAlgebra::from_brackets(["X", "Y", "Z"], &[(0, 1, 2, int(1))]).unwrap()
    }

    /// Filiform n₄: [e1, e2] = e3, [e1, e3] = e4.
    pub fn filiform4() -> LieAlgebra {
        LieAlgebra::from_brackets(
            ["e1", "e2", "e3", "e4"],
            &[(0, 1, 2, int(1)), (0, 2, 3, int(1))],
        )
        .unwrap()
    }

    /// Five-dimensional nilpotent algebra: [e1,e2]=e3, [e1,e3]=e4,
    /// [e1,e4]=e5, [e2,e3]=e5.
    pub fn nilpotent5() -> LieAlgebra {
        LieAlgebra::from_brackets(
            ["e1", "e2", "e3", "e4", "e5"],
            &[
                (0, 1, 2, int(1)),
                (0, 2, 3, int(1)),
                (0, 3, 4, int(1)),
                (1, 2, 4, int(1)),
            ],
        )
        .unwrap()
    }

    /// h₃ ⊕ ℝ: nilpotent with a two-dimensional center.
    pub fn heisenberg_plus_line() -> LieAlgebra {
        LieAlgebra::from_brackets(["X", "Y", "Z", "W"], &[(0, 1, 2, int(1))]).unwrap()
    }

    /// aff(ℝ): [A, B] = B.
    pub fn affine_line() -> LieAlgebra {
        LieAlgebra::from_brackets(["A", "B"], &[(0, 1, 1, int(1))]).unwrap()
    }

    /// e(2): [R, T1] = T2, [R, T2] = -T1.
    pub fn euclidean_plane() -> LieAlgebra {
        LieAlgebra::from_brackets(
            ["R", "T1", "T2"],
            &[(0, 1, 2, int(1)), (0, 2, 1, int(-1))],
        )
        .unwrap()
    }

    pub fn nilpotent_fixtures() -> Vec<LieAlgebra> {
        vec![
            LieAlgebra::abelian(2),
            LieAlgebra::abelian(3),
            heisenberg(),
            filiform4(),
            heisenberg_plus_line(),
            nilpotent5(),
        ]
    }
}
