//! Certified integer indices: boundary winding numbers, block indices,
//! Poincaré–Hopf indices at isolated zeros, the linearised index of a map
//! at a hyperbolic fixed point, and total indices on closed surfaces.

use std::f64::consts::{FRAC_PI_2, TAU};

use num::complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{Chart, CompiledField, FieldError, PolyVectorField, SurfaceKind};
use crate::linear2;
use crate::region::{Curve, Region};
use crate::zeros::{find_zeros, ZeroCluster, ZeroOptions};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IndexError {
    #[error("vector nearly vanishes on the boundary at ({x}, {y}): modulus {modulus:e}")]
    BoundaryZero { x: f64, y: f64, modulus: f64 },
    #[error("refinement budget of {0} samples exhausted")]
    BudgetExhausted(usize),
    #[error("zero cluster is degenerate; use the block index on its isolation circle")]
    Degenerate,
    #[error("Jacobian sign {sign} disagrees with winding number {winding}")]
    Inconsistent { sign: i64, winding: i64 },
    #[error("eigenvalue {0} is within tolerance of 1")]
    EigenvalueOne(Complex64),
    #[error("zero at ({x}, {y}) lies on the chart-assignment circle; perturb the assignment radius")]
    ChartBoundaryZero { x: f64, y: f64 },
    #[error("total index needs a closed surface, got {0}")]
    NotClosed(SurfaceKind),
    #[error(transparent)]
    Field(#[from] FieldError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WindingOptions {
    /// Samples per curve before adaptive refinement.
    pub initial_samples: usize,
    pub max_samples: usize,
    /// Boundary vectors shorter than this mean the curve is not isolating.
    pub modulus_floor: f64,
}

impl Default for WindingOptions {
    fn default() -> Self {
        WindingOptions {
            initial_samples: 64,
            max_samples: 1 << 20,
            modulus_floor: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndexResult {
    pub value: i64,
    pub min_modulus_on_boundary: f64,
    /// Largest absolute angle between consecutive boundary samples, radians.
    pub max_angle_step: f64,
    pub samples_used: usize,
    pub certified: bool,
}

impl IndexResult {
    fn empty() -> Self {
        IndexResult {
            value: 0,
            min_modulus_on_boundary: f64::INFINITY,
            max_angle_step: 0.0,
            samples_used: 0,
            certified: true,
        }
    }

    fn absorb(&mut self, other: &IndexResult) {
        self.value += other.value;
        self.min_modulus_on_boundary = self.min_modulus_on_boundary.min(other.min_modulus_on_boundary);
        self.max_angle_step = self.max_angle_step.max(other.max_angle_step);
        self.samples_used += other.samples_used;
        self.certified &= other.certified;
    }
}

fn oriented_angle(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] * b[1] - a[1] * b[0]).atan2(a[0] * b[0] + a[1] * b[1])
}

/// Winding number of an arbitrary planar vector function along a curve.
///
/// Consecutive samples are bisected until every oriented angle increment
/// is below π/2, which fixes the branch of each increment.
pub fn winding_along<F, E>(curve: &Curve, f: F, opts: &WindingOptions) -> Result<IndexResult, E>
where
    F: Fn([f64; 2]) -> Result<[f64; 2], E>,
    E: From<IndexError>,
{
    let corners = curve.corners().max(1);
    let n0 = opts.initial_samples.max(4).div_ceil(corners) * corners;
    let mut used = 0usize;
    let mut min_mod = f64::INFINITY;
    let mut sample = |s: f64| -> Result<[f64; 2], E> {
        used += 1;
        if used > opts.max_samples {
            return Err(IndexError::BudgetExhausted(opts.max_samples).into());
        }
        let p = curve.point_at(s);
        let v = f(p)?;
        let m = v[0].hypot(v[1]);
        if m.is_nan() || m < opts.modulus_floor {
            return Err(IndexError::BoundaryZero {
                x: p[0],
                y: p[1],
                modulus: m,
            }
            .into());
        }
        min_mod = min_mod.min(m);
        Ok(v)
    };

    let first = sample(0.0)?;
    let mut total = 0.0;
    let mut max_step: f64 = 0.0;
    let mut prev = (0.0, first);
    for i in 1..=n0 {
        let s1 = i as f64 / n0 as f64;
        let v1 = if i == n0 { first } else { sample(s1)? };
        // Depth-first bisection, left half first, keeps the summation order fixed.
        let mut stack = vec![(s1, v1)];
        while let Some(&(sb, vb)) = stack.last() {
            let (sa, va) = prev;
            let ang = oriented_angle(va, vb);
            if ang.abs() < FRAC_PI_2 {
                total += ang;
                max_step = max_step.max(ang.abs());
                prev = (sb, vb);
                stack.pop();
                continue;
            }
            let sm = 0.5 * (sa + sb);
            if sb - sa < 1e-14 {
                let p = curve.point_at(sm);
                return Err(IndexError::BoundaryZero {
                    x: p[0],
                    y: p[1],
                    modulus: min_mod,
                }
                .into());
            }
            let vm = sample(sm)?;
            stack.push((sm, vm));
        }
    }
    let turns = total / TAU;
    let value = turns.round();
    let certified = (turns - value).abs() < 0.25 && max_step < FRAC_PI_2 && min_mod > opts.modulus_floor;
    Ok(IndexResult {
        value: value as i64,
        min_modulus_on_boundary: min_mod,
        max_angle_step: max_step,
        samples_used: used,
        certified,
    })
}

/// Winding number of `field` (in `chart`) along `curve`.
pub fn winding_number(
    field: &PolyVectorField,
    chart: Chart,
    curve: &Curve,
    opts: &WindingOptions,
) -> Result<IndexResult, IndexError> {
    let f = field.compile(chart)?;
    winding_of_compiled(&f, curve, opts)
}

pub fn winding_of_compiled(
    f: &CompiledField,
    curve: &Curve,
    opts: &WindingOptions,
) -> Result<IndexResult, IndexError> {
    winding_along(curve, |p| Ok::<_, IndexError>(f.eval(p)), opts)
}

/// Sum of boundary winding numbers over the outer curve and every hole.
pub fn block_index_along<F, E>(region: &Region, f: F, opts: &WindingOptions) -> Result<IndexResult, E>
where
    F: Fn([f64; 2]) -> Result<[f64; 2], E>,
    E: From<IndexError>,
{
    let mut out = IndexResult::empty();
    for curve in region.boundary() {
        out.absorb(&winding_along(curve, &f, opts)?);
    }
    Ok(out)
}

pub fn block_index(
    field: &PolyVectorField,
    region: &Region,
    opts: &WindingOptions,
) -> Result<IndexResult, IndexError> {
    let f = field.compile(region.chart())?;
    block_index_along(region, |p| Ok::<_, IndexError>(f.eval(p)), opts)
}

/// Sign of the Jacobian determinant at a nondegenerate zero, cross-checked
/// against the winding number on the cluster's isolation circle.
pub fn ph_index_at_zero(
    field: &PolyVectorField,
    chart: Chart,
    cluster: &ZeroCluster,
    opts: &WindingOptions,
) -> Result<i64, IndexError> {
    if cluster.degenerate {
        return Err(IndexError::Degenerate);
    }
    let d = linear2::det(&cluster.jacobian);
    if d == 0.0 {
        return Err(IndexError::Degenerate);
    }
    let sign = if d > 0.0 { 1 } else { -1 };
    let circle = Curve::circle(cluster.location, cluster.radius);
    let w = winding_number(field, chart, &circle, opts)?;
    if w.value != sign {
        return Err(IndexError::Inconsistent { sign, winding: w.value });
    }
    Ok(sign)
}

/// Tolerance for treating an eigenvalue as equal to 1, or as real.
pub const EIGEN_TOL: f64 = 1e-9;

/// `(-1)^ν` with ν the number of real eigenvalues greater than 1, counted
/// with algebraic multiplicity.
pub fn d5_index(eigenvalues: [Complex64; 2]) -> Result<i64, IndexError> {
    for &l in &eigenvalues {
        if (l - Complex64::new(1.0, 0.0)).norm() < EIGEN_TOL {
            return Err(IndexError::EigenvalueOne(l));
        }
    }
    let nu = eigenvalues
        .iter()
        .filter(|l| l.im.abs() <= EIGEN_TOL * l.re.abs().max(1.0) && l.re > 1.0)
        .count();
    Ok(if nu % 2 == 0 { 1 } else { -1 })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChartZero {
    pub chart: Chart,
    pub cluster: ZeroCluster,
    pub index: i64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedSurfaceIndex {
    pub total: i64,
    pub euler_characteristic: i64,
    pub zeros: Vec<ChartZero>,
}

impl ClosedSurfaceIndex {
    pub fn matches_euler_characteristic(&self) -> bool {
        self.total == self.euler_characteristic
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosedSurfaceOptions {
    /// Sphere zeros with `|p| < r` belong to chart N, the rest to chart S.
    pub assignment_radius: f64,
    /// Zeros closer than this to the assignment circle are rejected.
    pub guard: f64,
    pub zeros: ZeroOptions,
    pub winding: WindingOptions,
}

impl Default for ClosedSurfaceOptions {
    fn default() -> Self {
        ClosedSurfaceOptions {
            assignment_radius: 1.0,
            guard: 1e-6,
            zeros: ZeroOptions::default(),
            winding: WindingOptions::default(),
        }
    }
}

/// Sum of the indices of all zeros of a field on the sphere or the torus.
pub fn total_index_closed_surface(
    field: &PolyVectorField,
    opts: &ClosedSurfaceOptions,
) -> Result<ClosedSurfaceIndex, IndexError> {
    let surface = field.surface();
    let chi = surface
        .closed_euler_characteristic()
        .ok_or(IndexError::NotClosed(surface.kind()))?;
    let mut zeros = Vec::new();
    match surface.kind() {
        SurfaceKind::Sphere => {
            let rho = opts.assignment_radius;
            for (chart, r) in [(Chart::North, rho), (Chart::South, 1.0 / rho)] {
                let search = Region::disk(chart, [0.0, 0.0], r * 1.25)?;
                for z in find_zeros(field, &search, &opts.zeros)?.clusters {
                    let m = z.location[0].hypot(z.location[1]);
                    if (m - r).abs() < opts.guard * r.max(1.0) {
                        return Err(IndexError::ChartBoundaryZero {
                            x: z.location[0],
                            y: z.location[1],
                        });
                    }
                    if m < r {
                        zeros.push((chart, z));
                    }
                }
            }
        }
        SurfaceKind::Torus => {
            let square = vec![[-0.25, -0.25], [1.25, -0.25], [1.25, 1.25], [-0.25, 1.25]];
            let search = Region::polygon(Chart::Torus, square)?;
            for z in find_zeros(field, &search, &opts.zeros)?.clusters {
                let [x, y] = z.location;
                if (0.0..1.0).contains(&x) && (0.0..1.0).contains(&y) {
                    zeros.push((Chart::Torus, z));
                }
            }
        }
        SurfaceKind::Plane => unreachable!("plane has no closed Euler characteristic"),
    }
    let mut out = Vec::with_capacity(zeros.len());
    let mut total = 0;
    for (chart, z) in zeros {
        let w = winding_number(field, chart, &Curve::circle(z.location, z.radius), &opts.winding)?;
        total += w.value;
        out.push(ChartZero {
            chart,
            cluster: z,
            index: w.value,
        });
    }
    Ok(ClosedSurfaceIndex {
        total,
        euler_characteristic: chi,
        zeros: out,
    })
}

/// Brute-force angle sum at `n` uniform samples, no refinement.
///
/// Exposed for cross-checking [`winding_along`]; it is only trustworthy
/// when the samples are dense relative to the field's turning.
pub fn angle_sum_oracle<F: Fn([f64; 2]) -> [f64; 2]>(curve: &Curve, f: F, n: usize) -> i64 {
    let vals: Vec<[f64; 2]> = (0..n).map(|i| f(curve.point_at(i as f64 / n as f64))).collect();
    let total: f64 = (0..n).map(|i| oriented_angle(vals[i], vals[(i + 1) % n])).sum();
    (total / TAU).round() as i64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::Surface;
    use crate::linalg::int;
    use crate::poly::Poly2;

    fn pf(p: &[(u32, u32, i64)], q: &[(u32, u32, i64)]) -> PolyVectorField {
        PolyVectorField::plane(Poly2::from_ints(p), Poly2::from_ints(q))
    }

    fn unit() -> Curve {
        Curve::circle([0.0, 0.0], 1.0)
    }

    fn w(f: &PolyVectorField) -> i64 {
        winding_number(f, Chart::Plane, &unit(), &WindingOptions::default()).unwrap().value
    }

    #[test]
    fn winding_examples() {
        assert_eq!(w(&pf(&[(1, 0, 1)], &[(0, 1, 1)])), 1);
        assert_eq!(w(&pf(&[(1, 0, 1)], &[(0, 1, -1)])), -1);
        assert_eq!(w(&pf(&[(2, 0, 1), (0, 2, -1)], &[(1, 1, 2)])), 2);
    }

    #[test]
    fn boundary_zero_is_an_error() {
        let f = pf(&[(2, 0, 1), (0, 0, -1)], &[(0, 1, 1)]);
        let r = winding_number(&f, Chart::Plane, &unit(), &WindingOptions::default());
        assert!(matches!(r, Err(IndexError::BoundaryZero { .. })), "{r:?}");
        // Zero strictly between initial samples.
        let g = pf(&[(1, 0, 1), (0, 0, -1)], &[(0, 1, 1), (0, 0, -1)]);
        let c = Curve::circle([0.0, 0.0], 2f64.sqrt());
        let r = winding_number(&g, Chart::Plane, &c, &WindingOptions::default());
        assert!(matches!(r, Err(IndexError::BoundaryZero { .. })), "{r:?}");
    }

    #[test]
    fn tiny_budget_is_reported() {
        let f = pf(&[(1, 0, 1)], &[(0, 1, 1)]);
        let opts = WindingOptions {
            max_samples: 10,
            ..Default::default()
        };
        assert_eq!(
            winding_number(&f, Chart::Plane, &unit(), &opts),
            Err(IndexError::BudgetExhausted(10))
        );
    }

    #[test]
    fn block_index_examples() {
        let opts = WindingOptions::default();
        let dipole = pf(&[(2, 0, 1), (0, 0, -1)], &[(0, 1, 1)]);
        let r2 = Region::disk(Chart::Plane, [0.0, 0.0], 2.0).unwrap();
        assert_eq!(block_index(&dipole, &r2, &opts).unwrap().value, 0);
        let rot = pf(&[(0, 1, -1)], &[(1, 0, 1)]);
        let r1 = Region::disk(Chart::Plane, [0.0, 0.0], 1.0).unwrap();
        let res = block_index(&rot, &r1, &opts).unwrap();
        assert_eq!(res.value, 1);
        assert!(res.certified);
        let constant = pf(&[(0, 0, 1)], &[]);
        assert_eq!(block_index(&constant, &r1, &opts).unwrap().value, 0);
    }

    #[test]
    fn annulus_around_a_zero_has_index_zero() {
        let rot = pf(&[(0, 1, -1)], &[(1, 0, 1)]);
        let annulus = Region::disk_with_holes(Chart::Plane, [0.0, 0.0], 2.0, &[([0.0, 0.0], 0.5)]).unwrap();
        assert_eq!(block_index(&rot, &annulus, &WindingOptions::default()).unwrap().value, 0);
        let two = Region::disk_with_holes(Chart::Plane, [0.0, 0.0], 3.0, &[([1.0, 0.0], 0.5)]).unwrap();
        let dipole = pf(&[(2, 0, 1), (0, 0, -1)], &[(0, 1, 1)]);
        // The hole removes the +1 zero at (1, 0), leaving the saddle at (-1, 0).
        assert_eq!(block_index(&dipole, &two, &WindingOptions::default()).unwrap().value, -1);
    }

    #[test]
    fn ph_index_examples() {
        let opts = WindingOptions::default();
        let zopts = ZeroOptions::default();
        let disk = Region::disk(Chart::Plane, [0.0, 0.0], 1.0).unwrap();
        for (f, want) in [
            (pf(&[(1, 0, 1)], &[(0, 1, -1)]), -1),
            (pf(&[(1, 0, 1)], &[(0, 1, 1)]), 1),
            (pf(&[(0, 1, -1)], &[(1, 0, 1)]), 1),
        ] {
            let z = &find_zeros(&f, &disk, &zopts).unwrap().clusters[0];
            assert_eq!(ph_index_at_zero(&f, Chart::Plane, z, &opts).unwrap(), want);
        }
        let deg = pf(&[(2, 0, 1)], &[(0, 1, 1)]);
        let z = &find_zeros(&deg, &disk, &zopts).unwrap().clusters[0];
        assert_eq!(ph_index_at_zero(&deg, Chart::Plane, z, &opts), Err(IndexError::Degenerate));
    }

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    #[test]
    fn d5_examples() {
        assert_eq!(d5_index([c(2.0), c(3.0)]).unwrap(), 1);
        assert_eq!(d5_index([c(2.0), c(0.5)]).unwrap(), -1);
        assert_eq!(d5_index([c(0.5), c(1.0 / 3.0)]).unwrap(), 1);
        assert_eq!(d5_index([Complex64::new(2.0, 1.0), Complex64::new(2.0, -1.0)]).unwrap(), 1);
        assert!(matches!(d5_index([c(1.0 + 1e-12), c(2.0)]), Err(IndexError::EigenvalueOne(_))));
    }

    #[test]
    fn repeated_eigenvalue_counts_with_multiplicity() {
        // The time-t map of the radial field is p ↦ e^t p with a double
        // eigenvalue e^t > 1. Its displacement (e^t - 1) p has winding +1.
        let t: f64 = 0.01;
        assert_eq!(d5_index([c(t.exp()), c(t.exp())]).unwrap(), 1);
        let k = t.exp() - 1.0;
        let disp = angle_sum_oracle(&unit(), |p| [k * p[0], k * p[1]], 4096);
        assert_eq!(disp, 1);
    }

    fn sphere(p: &[(u32, u32, i64)], q: &[(u32, u32, i64)]) -> PolyVectorField {
        PolyVectorField::sphere_from_north(Poly2::from_ints(p), Poly2::from_ints(q)).unwrap()
    }

    #[test]
    fn sphere_totals() {
        let opts = ClosedSurfaceOptions::default();
        let rot = sphere(&[(0, 1, -1)], &[(1, 0, 1)]);
        let t = total_index_closed_surface(&rot, &opts).unwrap();
        assert_eq!(t.total, 2);
        assert_eq!(t.zeros.iter().map(|z| z.index).collect::<Vec<_>>(), vec![1, 1]);

        // Source at N, sink at S.
        let radial = sphere(&[(1, 0, 1)], &[(0, 1, 1)]);
        assert_eq!(total_index_closed_surface(&radial, &opts).unwrap().total, 2);

        // Constant field: one double zero at the S pole.
        let constant = sphere(&[(0, 0, 1)], &[]);
        let t = total_index_closed_surface(&constant, &opts).unwrap();
        assert_eq!(t.zeros.len(), 1);
        assert_eq!(t.zeros[0].chart, Chart::South);
        assert_eq!(t.zeros[0].index, 2);
        assert!(t.matches_euler_characteristic());
    }

    #[test]
    fn sphere_zero_on_assignment_circle() {
        // z² - 1 vanishes at ±1, exactly on |p| = 1.
        let f = sphere(&[(2, 0, 1), (0, 2, -1), (0, 0, -1)], &[(1, 1, 2)]);
        let r = total_index_closed_surface(&f, &ClosedSurfaceOptions::default());
        assert!(matches!(r, Err(IndexError::ChartBoundaryZero { .. })), "{r:?}");
        let moved = ClosedSurfaceOptions {
            assignment_radius: 1.5,
            ..Default::default()
        };
        assert_eq!(total_index_closed_surface(&f, &moved).unwrap().total, 2);
    }

    #[test]
    fn torus_constant_field() {
        let f = PolyVectorField::torus(Poly2::constant(int(1)), Poly2::zero()).unwrap();
        let t = total_index_closed_surface(&f, &ClosedSurfaceOptions::default()).unwrap();
        assert_eq!((t.total, t.euler_characteristic), (0, 0));
        assert!(t.zeros.is_empty());
    }

    #[test]
    fn plane_is_not_closed() {
        let f = PolyVectorField::zero(Surface::PLANE);
        assert_eq!(
            total_index_closed_surface(&f, &ClosedSurfaceOptions::default()),
            Err(IndexError::NotClosed(SurfaceKind::Plane))
        );
    }
}
