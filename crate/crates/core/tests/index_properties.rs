mod common;

use common::{angle_sum, disk, fixtures, plane};
use nilfix_core::index::{block_index, d5_index, winding_number};
use nilfix_core::linalg::{rat, Rational};
use nilfix_core::linear2::{det, eigenvalues, expm};
use nilfix_core::region::Curve;
use nilfix_core::{Chart, Poly2, PolyVectorField, Region, WindingOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

#[test]
fn adaptive_winding_matches_angle_sum() {
    let opts = WindingOptions::default();
    for fx in fixtures() {
        let f = fx.field.compile(Chart::Plane).unwrap();
        let curve = Curve::circle(fx.center, fx.radius);
        let w = winding_number(&fx.field, Chart::Plane, &curve, &opts).unwrap();
        assert!(w.certified, "{}", fx.name);
        assert_eq!(w.value, angle_sum(&curve, |p| f.eval(p), 4096), "{}", fx.name);
        assert_eq!(w.value, fx.index, "{}", fx.name);
    }
}

#[test]
fn excision_under_random_shrinks() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let opts = WindingOptions::default();
    for fx in fixtures() {
        // Every fixture's zeros lie within a quarter of the radius of the
        // center except the dipole pair, which sits at distance one.
        let inner = if fx.name == "dipole" { 1.05 } else { 0.05 * fx.radius };
        for _ in 0..50 {
            let r = rng.random_range(inner..fx.radius);
            let i = block_index(&fx.field, &disk(fx.center, r), &opts).unwrap();
            assert_eq!(i.value, fx.index, "{} r={r}", fx.name);
        }
    }
}

#[test]
fn additivity_over_disjoint_disks() {
    let opts = WindingOptions::default();
    let dipole = plane(&[(2, 0, 1), (0, 0, -1)], &[(0, 1, 1)]);
    let whole = block_index(&dipole, &disk([0.0, 0.0], 2.0), &opts).unwrap().value;
    let left = block_index(&dipole, &disk([-1.0, 0.0], 0.5), &opts).unwrap().value;
    let right = block_index(&dipole, &disk([1.0, 0.0], 0.5), &opts).unwrap().value;
    assert_eq!((whole, left, right), (0, -1, 1));
    assert_eq!(whole, left + right);

    // The same statement with the two disks cut out of the big one.
    let holes = Region::disk_with_holes(Chart::Plane, [0.0, 0.0], 2.0, &[([-1.0, 0.0], 0.5), ([1.0, 0.0], 0.5)]).unwrap();
    assert_eq!(block_index(&dipole, &holes, &opts).unwrap().value, 0);

    let z3_minus_z = plane(&[(3, 0, 1), (1, 2, -3), (1, 0, -1)], &[(2, 1, 3), (0, 3, -1), (0, 1, -1)]);
    let total = block_index(&z3_minus_z, &disk([0.0, 0.0], 2.0), &opts).unwrap().value;
    let parts: i64 = [[-1.0, 0.0], [0.0, 0.0], [1.0, 0.0]]
        .iter()
        .map(|&c| block_index(&z3_minus_z, &disk(c, 0.4), &opts).unwrap().value)
        .sum();
    assert_eq!(total, 3);
    assert_eq!(parts, 3);
}

#[test]
fn homotopy_invariance() {
    // (1 - s)·rotation + s·source has modulus at least 1/√2 on the unit circle.
    let opts = WindingOptions::default();
    let rot = plane(&[(0, 1, -1)], &[(1, 0, 1)]);
    let src = plane(&[(1, 0, 1)], &[(0, 1, 1)]);
    for k in 0..=20 {
        let s = rat(k, 20);
        let f = rot.scale(&(rat(1, 1) - &s)).add(&src.scale(&s)).unwrap();
        assert_eq!(block_index(&f, &disk([0.0, 0.0], 1.0), &opts).unwrap().value, 1);
    }
    // z² + s deforms a double zero into two simple ones.
    let z2 = |s: i64| plane(&[(2, 0, 1), (0, 2, -1), (0, 0, s)], &[(1, 1, 2)]);
    for s in [-1, 0, 1] {
        let f = z2(s);
        let v = block_index(&f, &disk([0.0, 0.0], 3.0), &opts).unwrap().value;
        assert_eq!(v, 2);
    }
}

fn random_rational(rng: &mut ChaCha8Rng) -> Rational {
    rat(rng.random_range(-5..=5), rng.random_range(1..=4))
}

#[test]
fn d5_agrees_with_determinant_sign_and_block_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    let opts = WindingOptions::default();
    let mut done = 0;
    while done < 100 {
        let a: Vec<Rational> = (0..4).map(|_| random_rational(&mut rng)).collect();
        let af: Vec<f64> = a.iter().map(nilfix_core::linalg::to_f64).collect();
        let m = [[af[0], af[1]], [af[2], af[3]]];
        let tr = m[0][0] + m[1][1];
        let dt = det(&m);
        // Hyperbolic: no eigenvalue on the imaginary axis.
        let disc = tr * tr - 4.0 * dt;
        if dt == 0.0 || (disc < 0.0 && tr == 0.0) {
            continue;
        }
        done += 1;
        let sign = if dt > 0.0 { 1 } else { -1 };
        let t = 0.01;
        let e = expm(&[[t * m[0][0], t * m[0][1]], [t * m[1][0], t * m[1][1]]]);
        assert_eq!(d5_index(eigenvalues(&e)).unwrap(), sign, "{m:?}");
        let field = PolyVectorField::plane(
            Poly2::from_terms([(1, 0, a[0].clone()), (0, 1, a[1].clone())]),
            Poly2::from_terms([(1, 0, a[2].clone()), (0, 1, a[3].clone())]),
        );
        assert_eq!(block_index(&field, &disk([0.0, 0.0], 1.0), &opts).unwrap().value, sign, "{m:?}");
    }
}
