//! Inputs shared by the criterion benchmarks in `benches/`.

use nilfix_core::linalg::{rat, Rational};
use nilfix_core::{Chart, Poly2, PolyVectorField, Region};

pub fn plane(p: &[(u32, u32, i64)], q: &[(u32, u32, i64)]) -> PolyVectorField {
    PolyVectorField::plane(Poly2::from_ints(p), Poly2::from_ints(q))
}

pub fn unit_disk() -> Region {
    Region::disk(Chart::Plane, [0.0, 0.0], 1.0).expect("valid disk")
}

/// `z³ - z/4`: three simple zeros inside the unit disk.
pub fn cubic() -> PolyVectorField {
    plane(
        &[(3, 0, 4), (1, 2, -12), (1, 0, -1)],
        &[(2, 1, 12), (0, 3, -4), (0, 1, -1)],
    )
}

pub fn rotation() -> PolyVectorField {
    plane(&[(0, 1, -1)], &[(1, 0, 1)])
}

/// A dense `n × n` rational matrix with a deterministic pattern.
pub fn rational_matrix(n: usize) -> Vec<Vec<Rational>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| rat(((i * 7 + j * 3) % 11) as i64 - 5, ((i + 2 * j) % 4 + 1) as i64))
                .collect()
        })
        .collect()
}
