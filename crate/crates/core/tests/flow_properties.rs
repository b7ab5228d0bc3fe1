mod common;

use common::{fixtures, plane};
use nilfix_core::flow::{flow_displacement_index, tau_probe, FlowIndexOptions};
use nilfix_core::index::block_index;
use nilfix_core::linalg::rationalize;
use nilfix_core::{Chart, FlowMap, IntegratorOptions, Poly2, PolyVectorField, WindingOptions};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn at_tol(tol: f64) -> IntegratorOptions {
    IntegratorOptions {
        rel_tol: tol,
        abs_tol: tol,
        ..Default::default()
    }
}

fn end(field: &PolyVectorField, t: f64, opts: IntegratorOptions, p: [f64; 2]) -> [f64; 2] {
    FlowMap::new(field, t, opts)
        .unwrap()
        .advance(Chart::Plane, p)
        .unwrap()
        .arrived()
        .unwrap()
        .1
}

#[test]
fn tighter_tolerance_never_increases_error() {
    let rotation = plane(&[(0, 1, -1)], &[(1, 0, 1)]);
    let radial = plane(&[(1, 0, 1)], &[(0, 1, 1)]);
    let cases = [
        (&rotation, 3.0, [3.0f64.cos(), 3.0f64.sin()]),
        (&radial, 2f64.ln(), [2.0, 0.0]),
    ];
    for (field, t, exact) in cases {
        let mut last = f64::INFINITY;
        let mut tol = 1e-4;
        for _ in 0..12 {
            let q = end(field, t, at_tol(tol), [1.0, 0.0]);
            let err = (q[0] - exact[0]).hypot(q[1] - exact[1]);
            assert!(err <= last, "tol {tol}: {err} > {last}");
            last = err;
            tol /= 2.0;
        }
        assert!(last < 1e-7);
    }
}

#[test]
fn group_property_on_random_points() {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let opts = IntegratorOptions::default();
    let fields = [
        plane(&[(1, 0, 1), (0, 1, -1)], &[(1, 0, 1), (0, 1, 1)]),
        plane(&[(2, 0, 1), (0, 0, -1)], &[(0, 1, 1)]),
        plane(&[(2, 0, 1), (0, 2, -1)], &[(1, 1, 2)]),
    ];
    for _ in 0..100 {
        let f = &fields[rng.random_range(0..fields.len())];
        let p = [rng.random_range(-0.7..0.7), rng.random_range(-0.7..0.7)];
        let (t1, t2) = (rng.random_range(-0.3..0.3), rng.random_range(-0.3..0.3));
        let two = end(f, t1, opts.clone(), end(f, t2, opts.clone(), p));
        let one = end(f, t1 + t2, opts.clone(), p);
        let scale = 1.0 + one[0].hypot(one[1]);
        assert!((two[0] - one[0]).hypot(two[1] - one[1]) < 1e-8 * scale, "{p:?} {t1} {t2}");
    }
}

#[test]
fn rational_zeros_stay_fixed() {
    let dipole = plane(&[(2, 0, 1), (0, 0, -1)], &[(0, 1, 1)]);
    let opts = IntegratorOptions::default();
    for p in [[1.0, 0.0], [-1.0, 0.0]] {
        for t in [0.2, 0.1, 0.05, 0.01, -0.1] {
            let q = end(&dipole, t, opts.clone(), p);
            assert!((q[0] - p[0]).hypot(q[1] - p[1]) <= opts.abs_tol);
        }
    }
}

#[test]
fn displacement_index_equals_block_index() {
    let opts = FlowIndexOptions::default();
    for fx in fixtures() {
        let region = fx.region();
        let report = tau_probe(&fx.field, &region, &[0.2, 0.1, 0.05, 0.01], &opts).unwrap();
        assert_eq!(report.block_index, fx.index, "{}", fx.name);
        let certified: Vec<_> = report.entries.iter().filter(|e| e.certified).collect();
        assert!(certified.iter().any(|e| e.t == 0.01), "{}", fx.name);
        for e in certified {
            assert_eq!(e.index, Some(fx.index), "{} t={}", fx.name, e.t);
        }
        let direct = flow_displacement_index(&fx.field, &region, 0.01, &opts).unwrap();
        assert_eq!(direct.value, fx.index);
    }
}

/// Affine perturbation `c + B·(p - center)` scaled so its supremum over the
/// disk is below `bound`.
fn perturbation(rng: &mut ChaCha8Rng, center: [f64; 2], radius: f64, bound: f64) -> PolyVectorField {
    let raw: Vec<f64> = (0..6).map(|_| rng.random_range(-1.0..1.0)).collect();
    let sup = raw[0].abs() + raw[1].abs() + (raw[2].abs() + raw[3].abs() + raw[4].abs() + raw[5].abs()) * radius;
    let k = 0.99 * bound / sup;
    let q: Vec<_> = raw.iter().map(|x| rationalize(x * k, 1 << 20)).collect();
    let r = |x: f64| rationalize(x, 1 << 20);
    let (cx, cy) = (r(center[0]), r(center[1]));
    let lin = |c: &nilfix_core::Rational, a: &nilfix_core::Rational, b: &nilfix_core::Rational| {
        Poly2::from_terms([
            (0, 0, c - &(a * &cx) - &(b * &cy)),
            (1, 0, a.clone()),
            (0, 1, b.clone()),
        ])
    };
    PolyVectorField::plane(lin(&q[0], &q[2], &q[3]), lin(&q[1], &q[4], &q[5]))
}

#[test]
fn small_perturbations_keep_the_index() {
    let mut rng = ChaCha8Rng::seed_from_u64(51);
    let opts = WindingOptions::default();
    for fx in fixtures() {
        let region = fx.region();
        let base = block_index(&fx.field, &region, &opts).unwrap();
        let bound = 0.5 * base.min_modulus_on_boundary;
        for _ in 0..20 {
            let d = perturbation(&mut rng, fx.center, fx.radius, bound);
            let g = fx.field.add(&d).unwrap();
            let i = block_index(&g, &region, &opts).unwrap();
            assert!(i.certified);
            assert_eq!(i.value, base.value, "{}", fx.name);
        }
    }
}
