#![allow(dead_code)]

use nilfix_core::region::Curve;
use nilfix_core::{Chart, Poly2, PolyVectorField, Region};

pub fn plane(p: &[(u32, u32, i64)], q: &[(u32, u32, i64)]) -> PolyVectorField {
    PolyVectorField::plane(Poly2::from_ints(p), Poly2::from_ints(q))
}

pub fn disk(c: [f64; 2], r: f64) -> Region {
    Region::disk(Chart::Plane, c, r).unwrap()
}

/// A planar fixture with a region isolating its zeros and the index
/// worked out by hand.
pub struct Fixture {
    pub name: &'static str,
    pub field: PolyVectorField,
    pub center: [f64; 2],
    pub radius: f64,
    pub index: i64,
}

impl Fixture {
    pub fn region(&self) -> Region {
        disk(self.center, self.radius)
    }
}

pub fn fixtures() -> Vec<Fixture> {
    let f = |name, field, center, radius, index| Fixture {
        name,
        field,
        center,
        radius,
        index,
    };
    vec![
        f("source", plane(&[(1, 0, 1)], &[(0, 1, 1)]), [0.0, 0.0], 1.0, 1),
        f("sink", plane(&[(1, 0, -1)], &[(0, 1, -1)]), [0.0, 0.0], 1.0, 1),
        f("saddle", plane(&[(1, 0, 1)], &[(0, 1, -1)]), [0.0, 0.0], 1.0, -1),
        f("rotation", plane(&[(0, 1, -1)], &[(1, 0, 1)]), [0.0, 0.0], 1.0, 1),
        f("focus", plane(&[(1, 0, 1), (0, 1, -1)], &[(1, 0, 1), (0, 1, 1)]), [0.0, 0.0], 1.0, 1),
        f("z2", plane(&[(2, 0, 1), (0, 2, -1)], &[(1, 1, 2)]), [0.0, 0.0], 1.0, 2),
        f("z3", plane(&[(3, 0, 1), (1, 2, -3)], &[(2, 1, 3), (0, 3, -1)]), [0.0, 0.0], 1.0, 3),
        f("conj_z2", plane(&[(2, 0, 1), (0, 2, -1)], &[(1, 1, -2)]), [0.0, 0.0], 1.0, -2),
        f("dipole", plane(&[(2, 0, 1), (0, 0, -1)], &[(0, 1, 1)]), [0.0, 0.0], 2.0, 0),
        f("dipole_right", plane(&[(2, 0, 1), (0, 0, -1)], &[(0, 1, 1)]), [1.0, 0.0], 0.5, 1),
        f("dipole_left", plane(&[(2, 0, 1), (0, 0, -1)], &[(0, 1, 1)]), [-1.0, 0.0], 0.5, -1),
        f("constant", plane(&[(0, 0, 1)], &[]), [0.0, 0.0], 1.0, 0),
    ]
}

/// Brute-force winding number: sum of principal angle differences over
/// `n` equally spaced parameter samples.
pub fn angle_sum(curve: &Curve, f: impl Fn([f64; 2]) -> [f64; 2], n: usize) -> i64 {
    let mut total = 0.0;
    let mut prev = f(curve.point_at(0.0));
    for i in 1..=n {
        let v = f(curve.point_at(i as f64 / n as f64));
        let mut d = v[1].atan2(v[0]) - prev[1].atan2(prev[0]);
        while d > std::f64::consts::PI {
            d -= std::f64::consts::TAU;
        }
        while d < -std::f64::consts::PI {
            d += std::f64::consts::TAU;
        }
        total += d;
        prev = v;
    }
    (total / std::f64::consts::TAU).round() as i64
}
