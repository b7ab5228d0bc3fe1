//! Lie algebra actions on surfaces by polynomial vector fields.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Chart, CompiledField, FieldError, PolyVectorField, Surface};
use crate::flow::{Advance, FlowError, FlowMap, IntegratorOptions};
use crate::index::{block_index, IndexError, IndexResult, WindingOptions};
use crate::lie::{AlgebraElement, LieAlgebra, LieError, Subspace};
use crate::linalg::{int, rationalize, to_f64, Rational};
use crate::region::Region;
use crate::zeros::{find_common_zeros, gauss_newton, ZeroCluster, ZeroOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ActionError {
    #[error("algebra has dimension {algebra} but {fields} generator fields were given")]
    CountMismatch { algebra: usize, fields: usize },
    #[error("generator {0} lives on a different surface")]
    WrongSurface(usize),
    #[error("[X{i}, X{j}] differs from its prescribed value by {residual}")]
    NotHomomorphism { i: usize, j: usize, residual: String },
    #[error(transparent)]
    Lie(#[from] LieError),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Index(#[from] IndexError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

/// An algebra together with the fields representing its basis.
#[derive(Debug, Clone, PartialEq)]
pub struct ActionSpec {
    algebra: LieAlgebra,
    surface: Surface,
    generators: Vec<PolyVectorField>,
}

impl ActionSpec {
    /// Checks `[X̂_i, X̂_j] = Σ_k c[i][j][k] X̂_k` exactly for every `i < j`.
    pub fn build(
        algebra: LieAlgebra,
        surface: Surface,
        generators: Vec<PolyVectorField>,
    ) -> Result<Self, ActionError> {
        if generators.len() != algebra.dim() {
            return Err(ActionError::CountMismatch {
                algebra: algebra.dim(),
                fields: generators.len(),
            });
        }
        if let Some(i) = generators.iter().position(|g| g.surface() != surface) {
            return Err(ActionError::WrongSurface(i));
        }
        let d = algebra.dim();
        for i in 0..d {
            for j in i + 1..d {
                let lhs = generators[i].bracket(&generators[j])?;
                let mut rhs = PolyVectorField::zero(surface);
                for (k, g) in generators.iter().enumerate() {
                    let c = algebra.structure_constant(i, j, k);
                    if !num::Zero::is_zero(c) {
                        rhs = rhs.add(&g.scale(c))?;
                    }
                }
                let residual = lhs.sub(&rhs)?;
                if !residual.is_zero() {
                    let (p, q) = &residual.all_components()[0];
                    return Err(ActionError::NotHomomorphism {
                        i,
                        j,
                        residual: format!("({p}, {q})"),
                    });
                }
            }
        }
        Ok(ActionSpec {
            algebra,
            surface,
            generators,
        })
    }

    pub fn algebra(&self) -> &LieAlgebra {
        &self.algebra
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn generators(&self) -> &[PolyVectorField] {
        &self.generators
    }

    pub fn element_field(&self, a: &AlgebraElement) -> Result<PolyVectorField, ActionError> {
        if a.dim() != self.algebra.dim() {
            return Err(LieError::DimensionMismatch {
                expected: self.algebra.dim(),
                got: a.dim(),
            }
            .into());
        }
        let mut out = PolyVectorField::zero(self.surface);
        for (c, g) in a.coords().iter().zip(&self.generators) {
            if !num::Zero::is_zero(c) {
                out = out.add(&g.scale(c))?;
            }
        }
        Ok(out)
    }

    /// Sub-action spanned by the basis of `s`.
    fn restricted(&self, s: &Subspace) -> Result<Vec<PolyVectorField>, ActionError> {
        s.basis_elements().iter().map(|e| self.element_field(e)).collect()
    }

    fn compiled(&self, fields: &[PolyVectorField], chart: Chart) -> Result<Vec<CompiledField>, ActionError> {
        Ok(fields.iter().map(|f| f.compile(chart)).collect::<Result<_, _>>()?)
    }
}

/// A common zero of the generators with `|X̂_i|` at its location.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixedPoint {
    pub cluster: ZeroCluster,
    pub residuals: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FixSet {
    pub points: Vec<FixedPoint>,
    pub cells_visited: usize,
    pub unexplained_leaves: usize,
}

fn residuals(fields: &[CompiledField], p: [f64; 2]) -> Vec<f64> {
    fields
        .iter()
        .map(|f| {
            let v = f.eval(p);
            v[0].hypot(v[1])
        })
        .collect()
}

fn common_zeros(
    fields: &[CompiledField],
    region: &Region,
    opts: &ZeroOptions,
) -> Result<FixSet, ActionError> {
    let search = find_common_zeros(fields, region, opts)?;
    let points = search
        .clusters
        .into_iter()
        .map(|c| FixedPoint {
            residuals: residuals(fields, c.location),
            cluster: c,
        })
        .collect();
    Ok(FixSet {
        points,
        cells_visited: search.cells_visited,
        unexplained_leaves: search.unexplained_leaves,
    })
}

/// Common zeros of all generators inside `region`.
pub fn fix_set(action: &ActionSpec, region: &Region, opts: &ZeroOptions) -> Result<FixSet, ActionError> {
    let fields = action.compiled(&action.generators, region.chart())?;
    common_zeros(&fields, region, opts)
}

/// Relative singular-value cutoff for the evaluation map.
pub const RANK_CUTOFF: f64 = 1e-9;
/// Largest denominator used when rationalizing kernel vectors.
pub const MAX_DENOMINATOR: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq)]
pub struct Stabilizer {
    /// Numerical kernel of `a ↦ X̂_a(p)`.
    pub kernel: Subspace,
    /// Subalgebra generated by the kernel.
    pub closure: Subspace,
    /// The closure is strictly larger than the kernel.
    pub enlarged: bool,
    pub rank: usize,
}

/// Kernel of `a ↦ X̂_a(p)` restricted to `within`, closed under brackets.
pub fn stabilizer_within(
    action: &ActionSpec,
    chart: Chart,
    p: [f64; 2],
    within: &Subspace,
) -> Result<Stabilizer, ActionError> {
    let d = action.algebra.dim();
    let basis = within.basis_elements();
    let fields = action.compiled(&action.restricted(within)?, chart)?;
    // Columns are the evaluated generators of `within`.
    let cols: Vec<[f64; 2]> = fields.iter().map(|f| f.eval(p)).collect();
    let (rank, kernel) = float_kernel(&cols);
    let vectors = kernel.into_iter().map(|k| {
        let mut v = vec![int(0); d];
        for (c, b) in k.iter().zip(&basis) {
            for (vi, bi) in v.iter_mut().zip(b.coords()) {
                *vi += c * bi;
            }
        }
        v
    });
    let kernel = Subspace::span(d, vectors)?;
    let closure = action.algebra.subalgebra_closure(&kernel);
    Ok(Stabilizer {
        enlarged: closure.dim() > kernel.dim(),
        kernel,
        closure,
        rank,
    })
}

pub fn stabilizer_at(action: &ActionSpec, chart: Chart, p: [f64; 2]) -> Result<Stabilizer, ActionError> {
    stabilizer_within(action, chart, p, &Subspace::full(action.algebra.dim()))
}

/// Rank and rationalized kernel basis of the 2×n matrix with columns `cols`.
fn float_kernel(cols: &[[f64; 2]]) -> (usize, Vec<Vec<Rational>>) {
    let n = cols.len();
    // Singular values of a 2×n matrix from the 2×2 Gram matrix.
    let (a, b, c) = cols.iter().fold((0.0, 0.0, 0.0), |(a, b, c), v| {
        (a + v[0] * v[0], b + v[0] * v[1], c + v[1] * v[1])
    });
    let half = 0.5 * (a + c);
    let disc = (0.25 * (a - c) * (a - c) + b * b).sqrt();
    let s1 = (half + disc).max(0.0).sqrt();
    let s2 = (half - disc).max(0.0).sqrt();
    let rank = if s1 == 0.0 {
        0
    } else if s2 <= RANK_CUTOFF * s1 {
        1
    } else {
        2
    };
    let unit = |i: usize| -> Vec<Rational> {
        (0..n).map(|j| int((i == j) as i64)).collect()
    };
    match rank {
        0 => (0, (0..n).map(unit).collect()),
        1 => {
            // Project onto the dominant left singular direction.
            let (u0, u1) = if b == 0.0 && a < c {
                (0.0, 1.0)
            } else if b == 0.0 {
                (1.0, 0.0)
            } else {
                let l = half + disc;
                let v = [b, l - a];
                let nv = v[0].hypot(v[1]);
                (v[0] / nv, v[1] / nv)
            };
            let row: Vec<f64> = cols.iter().map(|v| u0 * v[0] + u1 * v[1]).collect();
            let piv = argmax_abs(&row);
            let kernel = (0..n)
                .filter(|&j| j != piv)
                .map(|j| {
                    let mut k = unit(j);
                    k[piv] = rationalize(-row[j] / row[piv], MAX_DENOMINATOR);
                    k
                })
                .collect();
            (1, kernel)
        }
        _ => {
            // Full pivoting elimination on the 2×n matrix.
            let mut m = [
                cols.iter().map(|v| v[0]).collect::<Vec<_>>(),
                cols.iter().map(|v| v[1]).collect::<Vec<_>>(),
            ];
            let (mut pr, mut pc, mut best) = (0, 0, -1.0);
            for (r, row) in m.iter().enumerate() {
                for (j, x) in row.iter().enumerate() {
                    if x.abs() > best {
                        (pr, pc, best) = (r, j, x.abs());
                    }
                }
            }
            m.swap(0, pr);
            let f = m[1][pc] / m[0][pc];
            let r0 = m[0].clone();
            for (x, y) in m[1].iter_mut().zip(&r0) {
                *x -= f * y;
            }
            m[1][pc] = 0.0;
            let pc2 = argmax_abs(&m[1]);
            // Back substitution to reduced form.
            let s = m[1][pc2];
            let r1: Vec<f64> = m[1].iter().map(|x| x / s).collect();
            let g = m[0][pc2];
            let r0: Vec<f64> = m[0]
                .iter()
                .zip(&r1)
                .map(|(x, y)| (x - g * y) / m[0][pc])
                .collect();
            let kernel = (0..n)
                .filter(|&j| j != pc && j != pc2)
                .map(|j| {
                    let mut k = unit(j);
                    k[pc] = rationalize(-r0[j], MAX_DENOMINATOR);
                    k[pc2] = rationalize(-r1[j], MAX_DENOMINATOR);
                    k
                })
                .collect();
            (2, kernel)
        }
    }
}

fn argmax_abs(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    best
}

/// When the stabilizers `u` and `w` at `p` together span the algebra, every
/// generator vanishes at `p`.
pub fn abh_fixed_point(action: &ActionSpec, u: &Stabilizer, w: &Stabilizer) -> bool {
    action.algebra.abh_check(&u.closure, &w.closure)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InvarianceReport {
    pub fixed_points: usize,
    pub trajectories: usize,
    pub escaped: usize,
    /// Largest ideal-generator modulus seen along generator trajectories.
    pub max_drift: f64,
}

/// Flows every generator from each common zero of the ideal's fields and
/// records how far the ideal's fields move away from zero.
pub fn invariance_probe(
    action: &ActionSpec,
    ideal: &Subspace,
    region: &Region,
    times: &[f64],
    zero_opts: &ZeroOptions,
    integrator: &IntegratorOptions,
) -> Result<InvarianceReport, ActionError> {
    if !action.algebra.is_ideal(ideal) {
        return Err(LieError::NotIdeal.into());
    }
    let chart = region.chart();
    let ideal_fields = action.compiled(&action.restricted(ideal)?, chart)?;
    let fix = common_zeros(&ideal_fields, region, zero_opts)?;
    let mut report = InvarianceReport {
        fixed_points: fix.points.len(),
        trajectories: 0,
        escaped: 0,
        max_drift: 0.0,
    };
    for g in &action.generators {
        for &t in times {
            let flow = FlowMap::new(g, t, integrator.clone())?;
            for fp in &fix.points {
                report.trajectories += 1;
                match flow.advance(chart, fp.cluster.location)? {
                    Advance::Arrived { chart: c, point } if c == chart => {
                        let drift = residuals(&ideal_fields, point).into_iter().fold(0.0, f64::max);
                        report.max_drift = report.max_drift.max(drift);
                    }
                    _ => report.escaped += 1,
                }
            }
        }
    }
    Ok(report)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum Status {
    Verified,
    Inconclusive,
    NotApplicable,
    NotEssential,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub witness_tol: f64,
    pub seed: u64,
    /// Side of the multi-start grid.
    pub grid: usize,
    pub winding: WindingOptions,
    pub zeros: ZeroOptions,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            witness_tol: 1e-9,
            seed: 0,
            grid: 16,
            winding: WindingOptions::default(),
            zeros: ZeroOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certification {
    pub nilpotent: bool,
    pub index_certified: bool,
    pub min_modulus_on_boundary: f64,
    pub boundary_samples: usize,
    pub block_zeros: usize,
    pub fix_set_clusters: Option<usize>,
    pub fix_set_error: Option<String>,
    pub seeds: usize,
    pub candidates: usize,
    pub witness_tol: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub status: Status,
    pub index: IndexResult,
    pub essential: bool,
    pub witness: Option<[f64; 2]>,
    pub residuals: Vec<f64>,
    pub certification: Certification,
}

/// Looks for a common fixed point inside an essential block of `x`.
///
/// A failed search yields `Inconclusive`, never a negative verdict.
pub fn verify_main(
    action: &ActionSpec,
    x: &AlgebraElement,
    region: &Region,
    opts: &VerifyOptions,
) -> Result<VerificationReport, ActionError> {
    let chart = region.chart();
    let xf = action.element_field(x)?;
    let index = block_index(&xf, region, &opts.winding)?;
    let nilpotent = action.algebra.is_nilpotent();
    let essential = index.certified && index.value != 0;
    let mut cert = Certification {
        nilpotent,
        index_certified: index.certified,
        min_modulus_on_boundary: index.min_modulus_on_boundary,
        boundary_samples: index.samples_used,
        block_zeros: 0,
        fix_set_clusters: None,
        fix_set_error: None,
        seeds: 0,
        candidates: 0,
        witness_tol: opts.witness_tol,
    };
    let report = |status, cert, witness, residuals| VerificationReport {
        status,
        index: index.clone(),
        essential,
        witness,
        residuals,
        certification: cert,
    };
    if !nilpotent {
        return Ok(report(Status::NotApplicable, cert, None, vec![]));
    }
    if !essential {
        return Ok(report(Status::NotEssential, cert, None, vec![]));
    }

    let gens = action.compiled(&action.generators, chart)?;
    let xc = xf.compile(chart)?;
    let mut seeds: Vec<[f64; 2]> = Vec::new();
    match find_common_zeros(std::slice::from_ref(&xc), region, &opts.zeros) {
        Ok(s) => {
            cert.block_zeros = s.clusters.len();
            seeds.extend(s.clusters.iter().map(|c| c.location));
        }
        Err(e) => cert.fix_set_error = Some(e.to_string()),
    }
    let mut candidates: Vec<[f64; 2]> = Vec::new();
    match common_zeros(&gens, region, &opts.zeros) {
        Ok(f) => {
            cert.fix_set_clusters = Some(f.points.len());
            candidates.extend(f.points.iter().map(|p| p.cluster.location));
        }
        Err(e) => cert.fix_set_error = Some(e.to_string()),
    }
    let [lo, hi] = region.bbox();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let g = opts.grid.max(1);
    for i in 0..g {
        for j in 0..g {
            let u = (i as f64 + rng.random::<f64>()) / g as f64;
            let v = (j as f64 + rng.random::<f64>()) / g as f64;
            seeds.push([lo[0] + u * (hi[0] - lo[0]), lo[1] + v * (hi[1] - lo[1])]);
        }
    }
    cert.seeds = seeds.len();
    let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];
    let limit = (hi[0] - lo[0]).max(hi[1] - lo[1]);
    let polished: Vec<Option<[f64; 2]>> = seeds
        .par_iter()
        .map(|&s| gauss_newton(&gens, s, &opts.zeros, center, limit).map(|(p, _)| p))
        .collect();
    candidates.extend(polished.into_iter().flatten());

    let mut accepted: Vec<([f64; 2], f64)> = candidates
        .into_iter()
        .filter(|&p| region.contains(p))
        .map(|p| (p, residuals(&gens, p).into_iter().fold(0.0, f64::max)))
        .filter(|&(_, r)| r < opts.witness_tol)
        .collect();
    cert.candidates = accepted.len();
    // Collapse near-duplicates onto their best representative, then take the
    // lexicographically smallest.
    accepted.sort_by(|a, b| a.1.total_cmp(&b.1).then(lex(&a.0, &b.0)));
    let mut reps: Vec<[f64; 2]> = Vec::new();
    for (p, _) in accepted {
        if reps
            .iter()
            .all(|q| (p[0] - q[0]).hypot(p[1] - q[1]) > opts.zeros.merge_dist)
        {
            reps.push(p);
        }
    }
    match reps.into_iter().min_by(lex) {
        Some(w) => {
            let res = residuals(&gens, w);
            Ok(report(Status::Verified, cert, Some(w), res))
        }
        None => Ok(report(Status::Inconclusive, cert, None, vec![])),
    }
}

fn lex(a: &[f64; 2], b: &[f64; 2]) -> std::cmp::Ordering {
    a[0].total_cmp(&b[0]).then(a[1].total_cmp(&b[1]))
}

/// Coefficients of a rational vector as floats.
pub fn coords_f64(a: &AlgebraElement) -> Vec<f64> {
    a.coords().iter().map(to_f64).collect()
}

/// Representations used across tests and the command line fixtures.
pub mod fixtures {
    use super::*;
    use crate::lie::fixtures as alg;
    use crate::poly::Poly2;

    fn plane(p: &[(u32, u32, i64)], q: &[(u32, u32, i64)]) -> PolyVectorField {
        PolyVectorField::plane(Poly2::from_ints(p), Poly2::from_ints(q))
    }

    pub fn rotation() -> PolyVectorField {
        plane(&[(0, 1, -1)], &[(1, 0, 1)])
    }

    pub fn radial() -> PolyVectorField {
        plane(&[(1, 0, 1)], &[(0, 1, 1)])
    }

    /// ℝ² acting by rotations and dilations; only the origin is fixed.
    pub fn abelian_rotation_dilation() -> ActionSpec {
        ActionSpec::build(LieAlgebra::abelian(2), Surface::PLANE, vec![rotation(), radial()])
            .expect("commuting fields")
    }

    /// h₃ acting through X̂ = (1, 0), Ŷ = (0, x), Ẑ = (0, 1).
    pub fn heisenberg_translations() -> ActionSpec {
        let gens = vec![plane(&[(0, 0, 1)], &[]), plane(&[], &[(1, 0, 1)]), plane(&[], &[(0, 0, 1)])];
        ActionSpec::build(alg::heisenberg(), Surface::PLANE, gens).expect("valid representation")
    }

    /// h₃ with Ẑ = 0 and commuting X̂, Ŷ.
    pub fn heisenberg_degenerate() -> ActionSpec {
        let gens = vec![rotation(), radial(), PolyVectorField::zero(Surface::PLANE)];
        ActionSpec::build(alg::heisenberg(), Surface::PLANE, gens).expect("valid representation")
    }

    /// aff(ℝ) acting by A = −(x, y), B = (1, 0).
    pub fn affine_line() -> ActionSpec {
        let gens = vec![plane(&[(1, 0, -1)], &[(0, 1, -1)]), plane(&[(0, 0, 1)], &[])];
        ActionSpec::build(alg::affine_line(), Surface::PLANE, gens).expect("valid representation")
    }

    /// e(2) acting by R = (y, −x), T1 = (1, 0), T2 = (0, 1).
    pub fn euclidean_plane() -> ActionSpec {
        let gens = vec![plane(&[(0, 1, 1)], &[(1, 0, -1)]), plane(&[(0, 0, 1)], &[]), plane(&[], &[(0, 0, 1)])];
        ActionSpec::build(alg::euclidean_plane(), Surface::PLANE, gens).expect("valid representation")
    }

    /// ℝ² acting by rotation and a radial field vanishing on the unit circle,
    /// so the unit circle is an orbit.
    pub fn circle_orbit() -> ActionSpec {
        let radial = plane(
            &[(1, 0, 1), (3, 0, -1), (1, 2, -1)],
            &[(0, 1, 1), (2, 1, -1), (0, 3, -1)],
        );
        ActionSpec::build(LieAlgebra::abelian(2), Surface::PLANE, vec![rotation(), radial])
            .expect("commuting fields")
    }
}

#[cfg(test)]
mod tests {
    use super::fixtures::*;
    use super::*;
    use crate::lie::fixtures as alg;
    use crate::linalg::rat;
    use crate::poly::Poly2;

    fn disk(r: f64) -> Region {
        Region::disk(Chart::Plane, [0.0, 0.0], r).unwrap()
    }

    fn plane(p: &[(u32, u32, i64)], q: &[(u32, u32, i64)]) -> PolyVectorField {
        PolyVectorField::plane(Poly2::from_ints(p), Poly2::from_ints(q))
    }

    #[test]
    fn build_examples() {
        heisenberg_translations();
        abelian_rotation_dilation();
        let bad = vec![plane(&[(0, 0, 1)], &[]), plane(&[], &[(1, 0, 1)]), plane(&[(0, 0, 1)], &[])];
        match ActionSpec::build(alg::heisenberg(), Surface::PLANE, bad) {
            Err(ActionError::NotHomomorphism { i: 0, j: 1, residual }) => {
                assert_eq!(residual, "(-1, 1)");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn build_rejects_count_and_surface() {
        assert!(matches!(
            ActionSpec::build(alg::heisenberg(), Surface::PLANE, vec![rotation()]),
            Err(ActionError::CountMismatch { .. })
        ));
        let torus = PolyVectorField::zero(Surface::TORUS);
        assert!(matches!(
            ActionSpec::build(LieAlgebra::abelian(2), Surface::PLANE, vec![rotation(), torus]),
            Err(ActionError::WrongSurface(1))
        ));
    }

    #[test]
    fn element_field_examples() {
        let a = heisenberg_translations();
        assert_eq!(a.element_field(&AlgebraElement::basis(3, 0)).unwrap(), a.generators()[0]);
        assert!(a.element_field(&AlgebraElement::zero(3)).unwrap().is_zero());
        let xz = a.element_field(&AlgebraElement::from_ints(&[1, 0, 1])).unwrap();
        assert_eq!(xz, plane(&[(0, 0, 1)], &[(0, 0, 1)]));
    }

    #[test]
    fn fix_set_examples() {
        let opts = ZeroOptions::default();
        let f = fix_set(&abelian_rotation_dilation(), &disk(1.0), &opts).unwrap();
        assert_eq!(f.points.len(), 1);
        let p = f.points[0].cluster.location;
        assert!(p[0].hypot(p[1]) < 1e-12);
        assert_eq!(f.points[0].residuals.len(), 2);

        assert!(fix_set(&heisenberg_translations(), &disk(1.0), &opts).unwrap().points.is_empty());

        let single = ActionSpec::build(LieAlgebra::abelian(1), Surface::PLANE, vec![radial()]).unwrap();
        let a = fix_set(&single, &disk(1.0), &opts).unwrap();
        let b = crate::zeros::find_zeros(&radial(), &disk(1.0), &opts).unwrap();
        assert_eq!(a.points.iter().map(|p| p.cluster.clone()).collect::<Vec<_>>(), b.clusters);
    }

    #[test]
    fn stabilizer_examples() {
        let ab = abelian_rotation_dilation();
        let s = stabilizer_at(&ab, Chart::Plane, [0.0, 0.0]).unwrap();
        assert_eq!(s.closure.dim(), 2);
        let s = stabilizer_at(&ab, Chart::Plane, [1.0, 0.0]).unwrap();
        assert_eq!(s.closure.dim(), 0);

        let h = heisenberg_translations();
        let s = stabilizer_at(&h, Chart::Plane, [0.3, -2.0]).unwrap();
        let expected = Subspace::span(3, vec![vec![int(0), int(-1), rat(3, 10)]]).unwrap();
        assert_eq!(s.kernel, expected);
        assert!(!s.enlarged);
    }

    #[test]
    fn heisenberg_stabilizer_on_axis() {
        // Ŷ = (0, x) vanishes on x = 0.
        let h = heisenberg_translations();
        let s = stabilizer_at(&h, Chart::Plane, [0.0, 0.0]).unwrap();
        assert_eq!(s.kernel.dim(), 1);
        assert!(s.kernel.contains(AlgebraElement::basis(3, 1).coords()));
        assert!(!s.enlarged);
    }

    #[test]
    fn circle_orbit_stabilizer_is_codim_one_ideal() {
        let a = circle_orbit();
        for k in 0..12 {
            let th = k as f64 * 0.5;
            let s = stabilizer_at(&a, Chart::Plane, [th.cos(), th.sin()]).unwrap();
            assert_eq!(s.closure.codim(), 1);
            assert!(a.algebra().is_ideal(&s.closure));
        }
    }

    #[test]
    fn abh_promotes_to_fixed_point() {
        let a = abelian_rotation_dilation();
        let origin = [0.0, 0.0];
        let e1 = Subspace::span_elements(2, [&AlgebraElement::basis(2, 0)]).unwrap();
        let e2 = Subspace::span_elements(2, [&AlgebraElement::basis(2, 1)]).unwrap();
        let u = stabilizer_within(&a, Chart::Plane, origin, &e1).unwrap();
        let w = stabilizer_within(&a, Chart::Plane, origin, &e2).unwrap();
        assert!(abh_fixed_point(&a, &u, &w));
        let fix = fix_set(&a, &disk(1.0), &ZeroOptions::default()).unwrap();
        assert!(fix
            .points
            .iter()
            .any(|p| p.cluster.location[0].hypot(p.cluster.location[1]) < 1e-9));

        let p = [0.5, 0.0];
        let u = stabilizer_within(&a, Chart::Plane, p, &e1).unwrap();
        let w = stabilizer_within(&a, Chart::Plane, p, &e2).unwrap();
        assert!(!abh_fixed_point(&a, &u, &w));
    }

    #[test]
    fn invariance_examples() {
        let a = abelian_rotation_dilation();
        let zo = ZeroOptions::default();
        let io = IntegratorOptions::default();
        let radial_ideal = Subspace::span_elements(2, [&AlgebraElement::basis(2, 1)]).unwrap();
        let r = invariance_probe(&a, &radial_ideal, &disk(1.0), &[0.1, 0.5, 1.0], &zo, &io).unwrap();
        assert_eq!(r.fixed_points, 1);
        assert_eq!(r.trajectories, 6);
        assert!(r.max_drift < 1e-12);

        let r = invariance_probe(&a, &Subspace::full(2), &disk(1.0), &[0.3], &zo, &io).unwrap();
        assert_eq!(r.fixed_points, 1);
        assert!(r.max_drift < 1e-12);

        let h = heisenberg_translations();
        let yz = Subspace::span(3, vec![vec![int(0), int(1), int(0)], vec![int(0), int(0), int(1)]]).unwrap();
        let r = invariance_probe(&h, &yz, &disk(1.0), &[0.1], &zo, &io).unwrap();
        assert_eq!(r.fixed_points, 0);
        assert_eq!(r.trajectories, 0);
    }

    #[test]
    fn fixed_points_persist_under_flows() {
        let a = circle_orbit();
        let fix = fix_set(&a, &disk(0.5), &ZeroOptions::default()).unwrap();
        assert_eq!(fix.points.len(), 1);
        let io = IntegratorOptions::default();
        for coeffs in [[1, 0], [0, 1], [2, -3]] {
            let f = a.element_field(&AlgebraElement::from_ints(&coeffs)).unwrap();
            for t in [0.1, 0.5, 2.0] {
                let flow = FlowMap::new(&f, t, io.clone()).unwrap();
                let p = fix.points[0].cluster.location;
                let q = flow.advance(Chart::Plane, p).unwrap().arrived().unwrap().1;
                assert!((q[0] - p[0]).hypot(q[1] - p[1]) < 10.0 * io.abs_tol);
            }
        }
    }

    #[test]
    fn verify_examples() {
        let opts = VerifyOptions::default();
        let r = verify_main(&abelian_rotation_dilation(), &AlgebraElement::basis(2, 0), &disk(1.0), &opts).unwrap();
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.index.value, 1);
        let w = r.witness.unwrap();
        assert!(w[0].hypot(w[1]) < 1e-9);

        let r = verify_main(&heisenberg_degenerate(), &AlgebraElement::basis(3, 0), &disk(1.0), &opts).unwrap();
        assert_eq!(r.status, Status::Verified);
        assert_eq!(r.residuals.len(), 3);

        let r = verify_main(&affine_line(), &AlgebraElement::basis(2, 0), &disk(1.0), &opts).unwrap();
        assert_eq!(r.status, Status::NotApplicable);
        let r = verify_main(&euclidean_plane(), &AlgebraElement::basis(3, 0), &disk(1.0), &opts).unwrap();
        assert_eq!(r.status, Status::NotApplicable);

        let r = verify_main(&heisenberg_translations(), &AlgebraElement::basis(3, 0), &disk(1.0), &opts).unwrap();
        assert_eq!(r.status, Status::NotEssential);
        assert_eq!(r.index.value, 0);
    }

    #[test]
    fn verify_rejects_boundary_zero() {
        let opts = VerifyOptions::default();
        let a = circle_orbit();
        let r = verify_main(&a, &AlgebraElement::basis(2, 1), &disk(1.0), &opts);
        assert!(matches!(r, Err(ActionError::Index(IndexError::BoundaryZero { .. }))));
    }

    #[test]
    fn verify_is_seed_stable_and_serializes() {
        let a = abelian_rotation_dilation();
        let x = AlgebraElement::basis(2, 0);
        let r0 = verify_main(&a, &x, &disk(1.0), &VerifyOptions::default()).unwrap();
        let r1 = verify_main(&a, &x, &disk(1.0), &VerifyOptions { seed: 7, ..Default::default() }).unwrap();
        assert_eq!(r0.status, r1.status);
        let json = serde_json::to_value(&r0).unwrap();
        assert_eq!(json["status"], "VERIFIED");
        for key in ["index", "witness", "residuals", "certification"] {
            assert!(json.get(key).is_some(), "{key}");
        }
    }
}
