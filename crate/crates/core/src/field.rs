//! Polynomial vector fields on plane, sphere and torus charts.
//!
//! The sphere carries two stereographic charts `N` and `S` glued by the
//! involution `(u, v) ↦ (u, v) / (u² + v²)`. A field on the sphere stores one
//! polynomial component pair per chart and the pair in `S` must be the exact
//! pushforward of the pair in `N`. The torus is the unit square with
//! period-one wraparound; only periodic polynomials (constants) qualify.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::poly::{CompiledPoly, Poly2};
use crate::region::Region;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FieldError {
    #[error("chart {chart} does not belong to a {surface} surface")]
    ChartMismatch { chart: Chart, surface: SurfaceKind },
    #[error("expected {expected} component pairs, got {got}")]
    ComponentCount { expected: usize, got: usize },
    #[error("fields live on different surfaces")]
    SurfaceMismatch,
    #[error("point ({0}, {1}) is not finite")]
    NonFinitePoint(f64, f64),
    #[error("transported field is not polynomial in the opposite chart")]
    NotPolynomial,
    #[error("sphere chart representations disagree on the overlap")]
    ChartsDisagree,
    #[error("torus field is not periodic with period one")]
    NotPeriodic,
    #[error("operation needs a sphere, got {0}")]
    NotSphere(SurfaceKind),
    #[error("plane regions need an explicit region for the Euler characteristic")]
    MissingRegion,
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("cell budget exhausted with {uncertified} uncertified cells remaining")]
    BudgetExhausted { uncertified: usize },
    #[error("could not certify an isolating circle around zero at ({x}, {y})")]
    NotIsolated { x: f64, y: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SurfaceKind {
    Plane,
    Sphere,
    Torus,
}

impl fmt::Display for SurfaceKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SurfaceKind::Plane => "plane",
            SurfaceKind::Sphere => "sphere",
            SurfaceKind::Torus => "torus",
        })
    }
}

/// A coordinate chart. Plane and torus have one chart each, the sphere two.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Chart {
    #[serde(rename = "plane")]
    Plane,
    #[serde(rename = "N")]
    North,
    #[serde(rename = "S")]
    South,
    #[serde(rename = "T")]
    Torus,
}

impl fmt::Display for Chart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Chart::Plane => "plane",
            Chart::North => "N",
            Chart::South => "S",
            Chart::Torus => "T",
        })
    }
}

impl Chart {
    pub fn parse(s: &str) -> Option<Chart> {
        match s {
            "plane" => Some(Chart::Plane),
            "N" => Some(Chart::North),
            "S" => Some(Chart::South),
            "T" => Some(Chart::Torus),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Surface(pub SurfaceKind);

impl Surface {
    pub const PLANE: Surface = Surface(SurfaceKind::Plane);
    pub const SPHERE: Surface = Surface(SurfaceKind::Sphere);
    pub const TORUS: Surface = Surface(SurfaceKind::Torus);

    pub fn kind(&self) -> SurfaceKind {
        self.0
    }

    pub fn charts(&self) -> &'static [Chart] {
        match self.0 {
            SurfaceKind::Plane => &[Chart::Plane],
            SurfaceKind::Sphere => &[Chart::North, Chart::South],
            SurfaceKind::Torus => &[Chart::Torus],
        }
    }

    pub fn chart_index(&self, chart: Chart) -> Result<usize, FieldError> {
        self.charts()
            .iter()
            .position(|&c| c == chart)
            .ok_or(FieldError::ChartMismatch {
                chart,
                surface: self.0,
            })
    }

    /// Euler characteristic of the closed surface; `None` for the plane.
    pub fn closed_euler_characteristic(&self) -> Option<i64> {
        match self.0 {
            SurfaceKind::Plane => None,
            SurfaceKind::Sphere => Some(2),
            SurfaceKind::Torus => Some(0),
        }
    }

    /// Map a point into the representative domain of the chart: the torus
    /// wraps into `[0, 1)²`, other charts are unchanged.
    pub fn normalize(&self, chart: Chart, p: [f64; 2]) -> [f64; 2] {
        match chart {
            Chart::Torus => [p[0].rem_euclid(1.0), p[1].rem_euclid(1.0)],
            _ => p,
        }
    }
}

/// χ of a closed surface, or of a plane region (`1 - holes`).
pub fn euler_characteristic(surface: Surface, region: Option<&Region>) -> Result<i64, FieldError> {
    match (surface.closed_euler_characteristic(), region) {
        (Some(chi), _) => Ok(chi),
        (None, Some(r)) => Ok(1 - r.holes().len() as i64),
        (None, None) => Err(FieldError::MissingRegion),
    }
}

/// The stereographic transition `(u, v) ↦ (u, v) / (u² + v²)`.
pub fn sphere_transition(p: [f64; 2]) -> [f64; 2] {
    let s = p[0] * p[0] + p[1] * p[1];
    [p[0] / s, p[1] / s]
}

/// Jacobian of [`sphere_transition`] at `p`.
pub fn sphere_transition_jacobian(p: [f64; 2]) -> [[f64; 2]; 2] {
    let (u, v) = (p[0], p[1]);
    let s = u * u + v * v;
    let s2 = s * s;
    [[(v * v - u * u) / s2, -2.0 * u * v / s2], [-2.0 * u * v / s2, (u * u - v * v) / s2]]
}

/// A component pair pushed through the sphere transition, as a rational
/// function `(num_p, num_q) / (u² + v²)^denom_power`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransportedPair {
    pub num_p: Poly2,
    pub num_q: Poly2,
    pub denom_power: u32,
}

impl TransportedPair {
    /// Cancel the denominator, failing unless the result is polynomial.
    pub fn into_polynomial(self) -> Result<(Poly2, Poly2), FieldError> {
        let (mut p, mut q) = (self.num_p, self.num_q);
        for _ in 0..self.denom_power {
            p = p.div_by_norm2().ok_or(FieldError::NotPolynomial)?;
            q = q.div_by_norm2().ok_or(FieldError::NotPolynomial)?;
        }
        Ok((p, q))
    }
}

/// Pushforward of `P ∂x + Q ∂y` under the sphere transition.
///
/// With `q = (a, b)`, `r² = a² + b²` and `n` the total degree, the result
/// is `M(a, b) · (P̃, Q̃) / r^{2n}` where `P̃` is `P(a/r², b/r²)·r^{2n}` and
/// `M = [[b² - a², -2ab], [-2ab, a² - b²]]`.
pub fn transport(p: &Poly2, q: &Poly2) -> TransportedPair {
    let n = p.degree().max(q.degree());
    let r2 = Poly2::from_ints(&[(2, 0, 1), (0, 2, 1)]);
    let lift = |f: &Poly2| -> Poly2 {
        let mut out = Poly2::zero();
        for ((i, j), c) in f.terms() {
            let mono = Poly2::monomial(i, j, c.clone());
            out = &out + &(&mono * &r2.pow(n - i - j));
        }
        out
    };
    let (pt, qt) = (lift(p), lift(q));
    let m11 = Poly2::from_ints(&[(0, 2, 1), (2, 0, -1)]);
    let m12 = Poly2::from_ints(&[(1, 1, -2)]);
    let m22 = Poly2::from_ints(&[(2, 0, 1), (0, 2, -1)]);
    TransportedPair {
        num_p: &(&m11 * &pt) + &(&m12 * &qt),
        num_q: &(&m12 * &pt) + &(&m22 * &qt),
        denom_power: n,
    }
}

/// `X = P ∂/∂x + Q ∂/∂y` in every chart of its surface.
#[derive(Debug, Clone, PartialEq)]
pub struct PolyVectorField {
    surface: Surface,
    components: Vec<(Poly2, Poly2)>,
}

impl PolyVectorField {
    /// General constructor; validates the surface-specific invariants.
    pub fn new(surface: Surface, components: Vec<(Poly2, Poly2)>) -> Result<Self, FieldError> {
        let expected = surface.charts().len();
        if components.len() != expected {
            return Err(FieldError::ComponentCount {
                expected,
                got: components.len(),
            });
        }
        match surface.kind() {
            SurfaceKind::Plane => {}
            SurfaceKind::Sphere => {
                let (p, q) = &components[0];
                let south = transport(p, q).into_polynomial()?;
                if south != components[1] {
                    return Err(FieldError::ChartsDisagree);
                }
            }
            SurfaceKind::Torus => {
                let (p, q) = &components[0];
                if !is_periodic(p) || !is_periodic(q) {
                    return Err(FieldError::NotPeriodic);
                }
            }
        }
        Ok(PolyVectorField {
            surface,
            components,
        })
    }

    pub fn plane(p: Poly2, q: Poly2) -> Self {
        PolyVectorField {
            surface: Surface::PLANE,
            components: vec![(p, q)],
        }
    }

    /// Sphere field given in the `N` chart; the `S` chart is derived.
    pub fn sphere_from_north(p: Poly2, q: Poly2) -> Result<Self, FieldError> {
        let south = transport(&p, &q).into_polynomial()?;
        Ok(PolyVectorField {
            surface: Surface::SPHERE,
            components: vec![(p, q), south],
        })
    }

    pub fn torus(p: Poly2, q: Poly2) -> Result<Self, FieldError> {
        Self::new(Surface::TORUS, vec![(p, q)])
    }

    pub fn zero(surface: Surface) -> Self {
        PolyVectorField {
            surface,
            components: vec![(Poly2::zero(), Poly2::zero()); surface.charts().len()],
        }
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    pub fn components(&self, chart: Chart) -> Result<&(Poly2, Poly2), FieldError> {
        Ok(&self.components[self.surface.chart_index(chart)?])
    }

    pub fn all_components(&self) -> &[(Poly2, Poly2)] {
        &self.components
    }

    pub fn is_zero(&self) -> bool {
        self.components.iter().all(|(p, q)| p.is_zero() && q.is_zero())
    }

    pub fn compile(&self, chart: Chart) -> Result<CompiledField, FieldError> {
        let (p, q) = self.components(chart)?;
        Ok(CompiledField::new(p, q))
    }

    pub fn eval(&self, chart: Chart, pt: [f64; 2]) -> Result<[f64; 2], FieldError> {
        check_finite(pt)?;
        Ok(self.compile(chart)?.eval(pt))
    }

    pub fn jacobian(&self, chart: Chart, pt: [f64; 2]) -> Result<[[f64; 2]; 2], FieldError> {
        check_finite(pt)?;
        Ok(self.compile(chart)?.jacobian(pt))
    }

    fn zip_with(
        &self,
        other: &Self,
        f: impl Fn(&(Poly2, Poly2), &(Poly2, Poly2)) -> (Poly2, Poly2),
    ) -> Result<Self, FieldError> {
        if self.surface != other.surface {
            return Err(FieldError::SurfaceMismatch);
        }
        Ok(PolyVectorField {
            surface: self.surface,
            components: self
                .components
                .iter()
                .zip(&other.components)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self, FieldError> {
        self.zip_with(other, |a, b| (&a.0 + &b.0, &a.1 + &b.1))
    }

    pub fn sub(&self, other: &Self) -> Result<Self, FieldError> {
        self.zip_with(other, |a, b| (&a.0 - &b.0, &a.1 - &b.1))
    }

    pub fn scale(&self, c: &crate::linalg::Rational) -> Self {
        PolyVectorField {
            surface: self.surface,
            components: self
                .components
                .iter()
                .map(|(p, q)| (p.scale(c), q.scale(c)))
                .collect(),
        }
    }

    /// `[X, Y]^i = Σ_j (X^j ∂_j Y^i - Y^j ∂_j X^i)`, chart by chart.
    pub fn bracket(&self, other: &Self) -> Result<Self, FieldError> {
        self.zip_with(other, |(xp, xq), (yp, yq)| {
            let apply = |vp: &Poly2, vq: &Poly2, f: &Poly2| &(vp * &f.dx()) + &(vq * &f.dy());
            (
                &apply(xp, xq, yp) - &apply(yp, yq, xp),
                &apply(xp, xq, yq) - &apply(yp, yq, xq),
            )
        })
    }
}

fn check_finite(p: [f64; 2]) -> Result<(), FieldError> {
    if p[0].is_finite() && p[1].is_finite() {
        Ok(())
    } else {
        Err(FieldError::NonFinitePoint(p[0], p[1]))
    }
}

fn is_periodic(p: &Poly2) -> bool {
    let x1 = &Poly2::x() + &Poly2::constant(crate::linalg::int(1));
    let y1 = &Poly2::y() + &Poly2::constant(crate::linalg::int(1));
    p.compose(&x1, &Poly2::y()) == *p && p.compose(&Poly2::x(), &y1) == *p
}

/// One chart of a field, compiled to `f64` together with its partials.
#[derive(Debug, Clone, PartialEq)]
pub struct CompiledField {
    p: CompiledPoly,
    q: CompiledPoly,
    px: CompiledPoly,
    py: CompiledPoly,
    qx: CompiledPoly,
    qy: CompiledPoly,
}

impl CompiledField {
    pub fn new(p: &Poly2, q: &Poly2) -> Self {
        CompiledField {
            p: p.compile(),
            q: q.compile(),
            px: p.dx().compile(),
            py: p.dy().compile(),
            qx: q.dx().compile(),
            qy: q.dy().compile(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.p.is_zero() && self.q.is_zero()
    }

    pub fn eval(&self, pt: [f64; 2]) -> [f64; 2] {
        [self.p.eval(pt[0], pt[1]), self.q.eval(pt[0], pt[1])]
    }

    pub fn jacobian(&self, pt: [f64; 2]) -> [[f64; 2]; 2] {
        let (x, y) = (pt[0], pt[1]);
        [
            [self.px.eval(x, y), self.py.eval(x, y)],
            [self.qx.eval(x, y), self.qy.eval(x, y)],
        ]
    }

    /// Upper bound on `|X(c + d) - X(c)|` over the square `|d|_∞ <= h`.
    pub fn variation_bound(&self, c: [f64; 2], h: f64) -> f64 {
        self.p
            .variation_bound(c[0], c[1], h)
            .hypot(self.q.variation_bound(c[0], c[1], h))
    }

    /// `true` when the field provably has no zero on the square of
    /// half-width `h` centred at `c`.
    pub fn excludes(&self, c: [f64; 2], h: f64) -> bool {
        let v = self.eval(c);
        let m = v[0].hypot(v[1]);
        // Relative slack covers rounding in the shifted coefficients.
        m > self.variation_bound(c, h) * (1.0 + 1e-9) + 1e-300 && m > 0.0
    }
}
