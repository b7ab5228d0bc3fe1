//! Zero localisation by quadtree exclusion and Newton polishing.
//!
//! A cell is discarded only when the centred-form bound proves the field
//! nonzero on it. Leaves that survive to the finest level seed a damped
//! Gauss–Newton iteration; converged points inside the region are merged
//! into clusters, and each cluster gets a circle on which the field is
//! certified nonvanishing by the same exclusion test.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::field::{CompiledField, FieldError, PolyVectorField};
use crate::region::Region;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroOptions {
    /// Maximum number of quadtree cells examined.
    pub cell_budget: usize,
    /// Subdivision depth of the finest leaves.
    pub max_depth: u32,
    pub newton_tol: f64,
    pub newton_max_iter: usize,
    pub merge_dist: f64,
    /// Upper bound on isolation radii, as a fraction of the search box half-width.
    pub isolation_fraction: f64,
    /// Threshold on the row-scaled Jacobian determinant.
    pub degenerate_tol: f64,
}

impl Default for ZeroOptions {
    fn default() -> Self {
        ZeroOptions {
            cell_budget: 200_000,
            max_depth: 9,
            newton_tol: 1e-12,
            newton_max_iter: 200,
            merge_dist: 1e-6,
            isolation_fraction: 0.05,
            degenerate_tol: 1e-8,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZeroCluster {
    pub location: [f64; 2],
    /// The primary field has no zero on the circle of this radius.
    pub radius: f64,
    /// Jacobian of the primary field at `location`.
    pub jacobian: [[f64; 2]; 2],
    pub degenerate: bool,
    /// Euclidean norm of the stacked residual at `location`.
    pub residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ZeroSearch {
    pub clusters: Vec<ZeroCluster>,
    pub cells_visited: usize,
    pub leaves: usize,
    /// Leaves whose Newton run failed and that lie outside every isolation disk.
    pub unexplained_leaves: usize,
}

/// `|det J|` divided by the squared largest row norm; zero when `J = 0`.
pub fn scaled_determinant(j: &[[f64; 2]; 2]) -> f64 {
    let n = j[0][0].hypot(j[0][1]).max(j[1][0].hypot(j[1][1]));
    if n == 0.0 {
        return 0.0;
    }
    (j[0][0] * j[1][1] - j[0][1] * j[1][0]).abs() / (n * n)
}

pub fn find_zeros(field: &PolyVectorField, region: &Region, opts: &ZeroOptions) -> Result<ZeroSearch, FieldError> {
    let compiled = field.compile(region.chart())?;
    find_common_zeros(std::slice::from_ref(&compiled), region, opts)
}

fn excluded(fields: &[CompiledField], c: [f64; 2], h: f64) -> bool {
    fields.iter().any(|f| !f.is_zero() && f.excludes(c, h))
}

/// Common zeros of several fields in one chart. The first field is the
/// primary one whose Jacobian is reported.
pub fn find_common_zeros(
    fields: &[CompiledField],
    region: &Region,
    opts: &ZeroOptions,
) -> Result<ZeroSearch, FieldError> {
    let [lo, hi] = region.bbox();
    let half = 0.5 * (hi[0] - lo[0]).max(hi[1] - lo[1]) * (1.0 + 1e-9);
    let center = [0.5 * (lo[0] + hi[0]), 0.5 * (lo[1] + hi[1])];

    let mut level = vec![center];
    let mut h = half;
    let mut visited = 0usize;
    for depth in 0..=opts.max_depth {
        visited += level.len();
        if visited > opts.cell_budget {
            return Err(FieldError::BudgetExhausted {
                uncertified: level.len(),
            });
        }
        let keep: Vec<[f64; 2]> = level
            .par_iter()
            .filter(|&&c| !excluded(fields, c, h))
            .copied()
            .collect();
        if depth == opts.max_depth {
            level = keep;
            break;
        }
        let q = h / 2.0;
        level = keep
            .iter()
            .flat_map(|c| {
                [
                    [c[0] - q, c[1] - q],
                    [c[0] + q, c[1] - q],
                    [c[0] - q, c[1] + q],
                    [c[0] + q, c[1] + q],
                ]
            })
            .collect();
        h = q;
    }
    let leaves = level;
    let limit = 2.0 * half;
    let polished: Vec<Option<([f64; 2], f64)>> = leaves
        .par_iter()
        .map(|&c| gauss_newton(fields, c, opts, center, limit))
        .collect();

    let mut points: Vec<([f64; 2], f64)> = polished
        .iter()
        .flatten()
        .filter(|(p, r)| *r <= opts.newton_tol && region.contains(*p))
        .copied()
        .collect();
    points.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite points"));

    let mut reps: Vec<([f64; 2], f64)> = Vec::new();
    for (p, r) in points {
        match reps.iter_mut().find(|(q, _)| dist(*q, p) <= opts.merge_dist) {
            Some(rep) => {
                if r < rep.1 {
                    *rep = (p, r);
                }
            }
            None => reps.push((p, r)),
        }
    }

    let max_radius = opts.isolation_fraction * half;
    let mut clusters = Vec::with_capacity(reps.len());
    for (i, &(p, res)) in reps.iter().enumerate() {
        let nearest = reps
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != i)
            .map(|(_, (q, _))| dist(p, *q))
            .fold(f64::INFINITY, f64::min);
        let mut r = max_radius.min(0.45 * nearest);
        let mut certified = false;
        for _ in 0..12 {
            if certify_circle(fields, p, r) {
                certified = true;
                break;
            }
            r *= 0.5;
        }
        if !certified {
            return Err(FieldError::NotIsolated { x: p[0], y: p[1] });
        }
        let jacobian = fields[0].jacobian(p);
        clusters.push(ZeroCluster {
            location: p,
            radius: r,
            jacobian,
            degenerate: scaled_determinant(&jacobian) < opts.degenerate_tol,
            residual: res,
        });
    }

    let unexplained = leaves
        .iter()
        .zip(&polished)
        .filter(|(_, res)| !matches!(res, Some((_, r)) if *r <= opts.newton_tol))
        .filter(|(c, _)| clusters.iter().all(|z| dist(**c, z.location) > z.radius))
        .filter(|(c, _)| region.contains(**c))
        .count();

    Ok(ZeroSearch {
        clusters,
        cells_visited: visited,
        leaves: leaves.len(),
        unexplained_leaves: unexplained,
    })
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// `true` when the stacked field provably has no common zero on the circle.
///
/// The circle is covered by squares centred at arc midpoints; each must be
/// excluded by at least one field. Coverage is refined up to 4096 arcs.
pub fn certify_circle(fields: &[CompiledField], center: [f64; 2], radius: f64) -> bool {
    if radius.is_nan() || radius <= 0.0 {
        return false;
    }
    let mut n = 64usize;
    while n <= 4096 {
        let h = std::f64::consts::PI * radius / n as f64;
        let ok = (0..n).all(|i| {
            let th = std::f64::consts::TAU * (i as f64 + 0.5) / n as f64;
            let c = [center[0] + radius * th.cos(), center[1] + radius * th.sin()];
            excluded(fields, c, h)
        });
        if ok {
            return true;
        }
        n *= 4;
    }
    false
}

fn stacked(fields: &[CompiledField], p: [f64; 2]) -> (Vec<f64>, Vec<[f64; 2]>) {
    let mut r = Vec::with_capacity(2 * fields.len());
    let mut j = Vec::with_capacity(2 * fields.len());
    for f in fields {
        let v = f.eval(p);
        let jac = f.jacobian(p);
        r.extend_from_slice(&v);
        j.extend_from_slice(&jac);
    }
    (r, j)
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Damped Gauss–Newton on the stacked system. Returns the final point and
/// residual norm, or `None` if the iterate leaves the search area.
pub fn gauss_newton(
    fields: &[CompiledField],
    start: [f64; 2],
    opts: &ZeroOptions,
    center: [f64; 2],
    limit: f64,
) -> Option<([f64; 2], f64)> {
    let mut p = start;
    let (mut r, mut j) = stacked(fields, p);
    let mut rn = norm(&r);
    for _ in 0..opts.newton_max_iter {
        if rn == 0.0 {
            break;
        }
        // Normal equations (JᵀJ) δ = -Jᵀ r.
        let (mut a, mut b, mut c, mut g0, mut g1) = (0.0, 0.0, 0.0, 0.0, 0.0);
        for (row, ri) in j.iter().zip(&r) {
            a += row[0] * row[0];
            b += row[0] * row[1];
            c += row[1] * row[1];
            g0 += row[0] * ri;
            g1 += row[1] * ri;
        }
        let mut det = a * c - b * b;
        let scale = a + c;
        if scale == 0.0 {
            return Some((p, rn));
        }
        let mut mu = 0.0;
        if det.abs() <= 1e-30 * scale * scale {
            mu = 1e-10 * scale;
            det = (a + mu) * (c + mu) - b * b;
        }
        let d0 = -((c + mu) * g0 - b * g1) / det;
        let d1 = -(-b * g0 + (a + mu) * g1) / det;
        let mut t = 1.0;
        let mut accepted = false;
        for _ in 0..40 {
            let q = [p[0] + t * d0, p[1] + t * d1];
            let (rq, jq) = stacked(fields, q);
            let qn = norm(&rq);
            if qn < rn {
                p = q;
                r = rq;
                j = jq;
                rn = qn;
                accepted = true;
                break;
            }
            t *= 0.5;
        }
        if !accepted || (t * d0).hypot(t * d1) <= 1e-16 * (1.0 + p[0].hypot(p[1])) {
            break;
        }
        if (p[0] - center[0]).abs() > limit || (p[1] - center[1]).abs() > limit {
            return None;
        }
    }
    Some((p, rn))
}
