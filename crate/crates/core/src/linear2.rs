//! 2×2 real matrix helpers.

use num::complex::Complex64;

pub type Mat2 = [[f64; 2]; 2];

pub fn det(m: &Mat2) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

pub fn trace(m: &Mat2) -> f64 {
    m[0][0] + m[1][1]
}

/// Eigenvalues from the characteristic polynomial, larger real part first.
pub fn eigenvalues(m: &Mat2) -> [Complex64; 2] {
    let tr = trace(m);
    let half = tr / 2.0;
    let disc = half * half - det(m);
    if disc >= 0.0 {
        let s = disc.sqrt();
        // Avoid cancellation in the smaller root.
        let big = if half >= 0.0 { half + s } else { half - s };
        let small = if big != 0.0 { det(m) / big } else { half - s.copysign(half) };
        let (a, b) = if big >= small { (big, small) } else { (small, big) };
        [Complex64::new(a, 0.0), Complex64::new(b, 0.0)]
    } else {
        let s = (-disc).sqrt();
        [Complex64::new(half, s), Complex64::new(half, -s)]
    }
}

fn mul(a: &Mat2, b: &Mat2) -> Mat2 {
    [
        [a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]],
        [a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]],
    ]
}

/// `exp(m)` by scaling and squaring with a degree-16 Taylor polynomial.
pub fn expm(m: &Mat2) -> Mat2 {
    let norm = m.iter().flatten().map(|x| x.abs()).sum::<f64>();
    let mut s = 0;
    while norm * 0.5f64.powi(s) > 0.5 && s < 60 {
        s += 1;
    }
    let scale = 0.5f64.powi(s);
    let a = [[m[0][0] * scale, m[0][1] * scale], [m[1][0] * scale, m[1][1] * scale]];
    let mut sum: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    let mut term: Mat2 = [[1.0, 0.0], [0.0, 1.0]];
    for k in 1..=16 {
        term = mul(&term, &a);
        let inv = 1.0 / k as f64;
        term = [[term[0][0] * inv, term[0][1] * inv], [term[1][0] * inv, term[1][1] * inv]];
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}
