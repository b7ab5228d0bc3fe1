//! Planar regions bounded by oriented closed curves.
//!
//! Outer boundaries run counterclockwise and holes clockwise, so the region
//! always lies to the left of its boundary. Constructors normalise polygon
//! orientation by signed area.

use std::f64::consts::TAU;

use crate::field::{Chart, FieldError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Orientation {
    Ccw,
    Cw,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Curve {
    Circle {
        center: [f64; 2],
        radius: f64,
        orientation: Orientation,
    },
    /// Closed polygon; the last vertex connects back to the first.
    Polygon(Vec<[f64; 2]>),
}

impl Curve {
    pub fn circle(center: [f64; 2], radius: f64) -> Self {
        Curve::Circle {
            center,
            radius,
            orientation: Orientation::Ccw,
        }
    }

    pub fn orientation(&self) -> Orientation {
        match self {
            Curve::Circle { orientation, .. } => *orientation,
            Curve::Polygon(v) => {
                if signed_area(v) >= 0.0 {
                    Orientation::Ccw
                } else {
                    Orientation::Cw
                }
            }
        }
    }

    pub fn oriented(self, want: Orientation) -> Self {
        match self {
            Curve::Circle { center, radius, .. } => Curve::Circle {
                center,
                radius,
                orientation: want,
            },
            Curve::Polygon(mut v) => {
                let cur = if signed_area(&v) >= 0.0 {
                    Orientation::Ccw
                } else {
                    Orientation::Cw
                };
                if cur != want {
                    v.reverse();
                }
                Curve::Polygon(v)
            }
        }
    }

    /// Point at parameter `s ∈ [0, 1]`, traversed in the curve's orientation.
    pub fn point_at(&self, s: f64) -> [f64; 2] {
        match self {
            Curve::Circle {
                center,
                radius,
                orientation,
            } => {
                let th = match orientation {
                    Orientation::Ccw => TAU * s,
                    Orientation::Cw => -TAU * s,
                };
                [center[0] + radius * th.cos(), center[1] + radius * th.sin()]
            }
            Curve::Polygon(v) => {
                let n = v.len();
                let u = s.clamp(0.0, 1.0) * n as f64;
                let k = (u.floor() as usize).min(n - 1);
                let t = u - k as f64;
                let (a, b) = (v[k], v[(k + 1) % n]);
                [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]
            }
        }
    }

    /// Number of straight pieces, used to align initial samples with corners.
    pub fn corners(&self) -> usize {
        match self {
            Curve::Circle { .. } => 1,
            Curve::Polygon(v) => v.len(),
        }
    }

    /// Strict interior test (orientation-independent).
    pub fn encloses(&self, p: [f64; 2]) -> bool {
        match self {
            Curve::Circle { center, radius, .. } => {
                (p[0] - center[0]).hypot(p[1] - center[1]) < *radius
            }
            Curve::Polygon(v) => {
                let mut inside = false;
                let n = v.len();
                let mut j = n - 1;
                for i in 0..n {
                    let (a, b) = (v[i], v[j]);
                    if (a[1] > p[1]) != (b[1] > p[1])
                        && p[0] < (b[0] - a[0]) * (p[1] - a[1]) / (b[1] - a[1]) + a[0]
                    {
                        inside = !inside;
                    }
                    j = i;
                }
                inside
            }
        }
    }

    pub fn bbox(&self) -> [[f64; 2]; 2] {
        match self {
            Curve::Circle { center, radius, .. } => [
                [center[0] - radius, center[1] - radius],
                [center[0] + radius, center[1] + radius],
            ],
            Curve::Polygon(v) => {
                let mut lo = [f64::INFINITY; 2];
                let mut hi = [f64::NEG_INFINITY; 2];
                for p in v {
                    for k in 0..2 {
                        lo[k] = lo[k].min(p[k]);
                        hi[k] = hi[k].max(p[k]);
                    }
                }
                [lo, hi]
            }
        }
    }

    pub fn samples(&self, n: usize) -> Vec<[f64; 2]> {
        (0..n).map(|i| self.point_at(i as f64 / n as f64)).collect()
    }

    fn validate(&self) -> Result<(), FieldError> {
        match self {
            Curve::Circle { center, radius, .. } => {
                if !(radius.is_finite() && *radius > 0.0 && center.iter().all(|c| c.is_finite())) {
                    return Err(FieldError::InvalidRegion(format!(
                        "circle needs a finite positive radius, got {radius}"
                    )));
                }
            }
            Curve::Polygon(v) => {
                if v.len() < 3 {
                    return Err(FieldError::InvalidRegion("polygon needs at least 3 vertices".into()));
                }
                if v.iter().flatten().any(|c| !c.is_finite()) {
                    return Err(FieldError::InvalidRegion("polygon vertex is not finite".into()));
                }
                if signed_area(v).abs() < 1e-14 {
                    return Err(FieldError::InvalidRegion("polygon has zero area".into()));
                }
                let n = v.len();
                for i in 0..n {
                    for j in i + 1..n {
                        let adjacent = j == i + 1 || (i == 0 && j == n - 1);
                        if !adjacent && segments_meet(v[i], v[(i + 1) % n], v[j], v[(j + 1) % n]) {
                            return Err(FieldError::InvalidRegion(format!(
                                "polygon edges {i} and {j} intersect"
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

fn signed_area(v: &[[f64; 2]]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| {
            let (a, b) = (v[i], v[(i + 1) % n]);
            a[0] * b[1] - b[0] * a[1]
        })
        .sum::<f64>()
        / 2.0
}

fn orient(a: [f64; 2], b: [f64; 2], c: [f64; 2]) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

fn on_segment(a: [f64; 2], b: [f64; 2], p: [f64; 2]) -> bool {
    p[0] >= a[0].min(b[0]) && p[0] <= a[0].max(b[0]) && p[1] >= a[1].min(b[1]) && p[1] <= a[1].max(b[1])
}

fn segments_meet(a: [f64; 2], b: [f64; 2], c: [f64; 2], d: [f64; 2]) -> bool {
    let (d1, d2) = (orient(c, d, a), orient(c, d, b));
    let (d3, d4) = (orient(a, b, c), orient(a, b, d));
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0)) && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0)) {
        return true;
    }
    (d1 == 0.0 && on_segment(c, d, a))
        || (d2 == 0.0 && on_segment(c, d, b))
        || (d3 == 0.0 && on_segment(a, b, c))
        || (d4 == 0.0 && on_segment(a, b, d))
}

/// Sampling resolution used when checking boundary curves for overlap.
pub const DEFAULT_VALIDATION_SAMPLES: usize = 512;

/// A region in one chart: an outer curve minus the interiors of its holes.
#[derive(Debug, Clone, PartialEq)]
pub struct Region {
    chart: Chart,
    outer: Curve,
    holes: Vec<Curve>,
}

impl Region {
    pub fn new(chart: Chart, outer: Curve, holes: Vec<Curve>) -> Result<Self, FieldError> {
        Self::with_resolution(chart, outer, holes, DEFAULT_VALIDATION_SAMPLES)
    }

    /// Build and validate, sampling each boundary curve at `samples` points
    /// to check that holes sit strictly inside the outer curve and apart
    /// from each other.
    pub fn with_resolution(
        chart: Chart,
        outer: Curve,
        holes: Vec<Curve>,
        samples: usize,
    ) -> Result<Self, FieldError> {
        let outer = outer.oriented(Orientation::Ccw);
        let holes: Vec<Curve> = holes.into_iter().map(|h| h.oriented(Orientation::Cw)).collect();
        outer.validate()?;
        for h in &holes {
            h.validate()?;
        }
        let samples = samples.max(8);
        for (i, h) in holes.iter().enumerate() {
            if !h.samples(samples).iter().all(|&p| outer.encloses(p)) {
                return Err(FieldError::InvalidRegion(format!("hole {i} is not strictly inside the outer boundary")));
            }
            for (j, g) in holes.iter().enumerate().skip(i + 1) {
                let separate = h.samples(samples).iter().all(|&p| !g.encloses(p))
                    && g.samples(samples).iter().all(|&p| !h.encloses(p));
                if !separate {
                    return Err(FieldError::InvalidRegion(format!("holes {i} and {j} overlap")));
                }
            }
        }
        Ok(Region { chart, outer, holes })
    }

    pub fn disk(chart: Chart, center: [f64; 2], radius: f64) -> Result<Self, FieldError> {
        Self::new(chart, Curve::circle(center, radius), Vec::new())
    }

    pub fn disk_with_holes(
        chart: Chart,
        center: [f64; 2],
        radius: f64,
        holes: &[([f64; 2], f64)],
    ) -> Result<Self, FieldError> {
        Self::new(
            chart,
            Curve::circle(center, radius),
            holes.iter().map(|&(c, r)| Curve::circle(c, r)).collect(),
        )
    }

    pub fn polygon(chart: Chart, vertices: Vec<[f64; 2]>) -> Result<Self, FieldError> {
        Self::new(chart, Curve::Polygon(vertices), Vec::new())
    }

    pub fn chart(&self) -> Chart {
        self.chart
    }

    pub fn outer(&self) -> &Curve {
        &self.outer
    }

    pub fn holes(&self) -> &[Curve] {
        &self.holes
    }

    /// All boundary curves, outer first.
    pub fn boundary(&self) -> impl Iterator<Item = &Curve> {
        std::iter::once(&self.outer).chain(&self.holes)
    }

    pub fn contains(&self, p: [f64; 2]) -> bool {
        self.outer.encloses(p) && !self.holes.iter().any(|h| h.encloses(p))
    }

    pub fn bbox(&self) -> [[f64; 2]; 2] {
        self.outer.bbox()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polygon_orientation_is_normalised() {
        let cw = vec![[0.0, 0.0], [0.0, 1.0], [1.0, 1.0], [1.0, 0.0]];
        let r = Region::new(
            Chart::Plane,
            Curve::Polygon(cw.clone()),
            vec![],
        )
        .unwrap();
        assert_eq!(r.outer().orientation(), Orientation::Ccw);
        let big = Curve::circle([0.5, 0.5], 5.0);
        let r = Region::new(Chart::Plane, big, vec![Curve::Polygon(cw).oriented(Orientation::Ccw)]).unwrap();
        assert_eq!(r.holes()[0].orientation(), Orientation::Cw);
    }

    #[test]
    fn containment() {
        let r = Region::disk_with_holes(Chart::Plane, [0.0, 0.0], 2.0, &[([1.0, 0.0], 0.5)]).unwrap();
        assert!(r.contains([0.0, 0.0]));
        assert!(!r.contains([1.0, 0.0]));
        assert!(!r.contains([3.0, 0.0]));
    }

    #[test]
    fn rejects_bad_regions() {
        assert!(Region::disk(Chart::Plane, [0.0, 0.0], 0.0).is_err());
        assert!(Region::disk_with_holes(Chart::Plane, [0.0, 0.0], 1.0, &[([0.9, 0.0], 0.5)]).is_err());
        assert!(Region::disk_with_holes(Chart::Plane, [0.0, 0.0], 3.0, &[([0.0, 0.0], 1.0), ([0.5, 0.0], 1.0)]).is_err());
        let bowtie = vec![[0.0, 0.0], [1.0, 1.0], [1.0, 0.0], [0.0, 1.0]];
        assert!(Region::polygon(Chart::Plane, bowtie).is_err());
        assert!(Region::polygon(Chart::Plane, vec![[0.0, 0.0], [1.0, 0.0]]).is_err());
    }

    #[test]
    fn circle_traversal_direction() {
        let c = Curve::circle([0.0, 0.0], 1.0);
        let p = c.point_at(0.25);
        assert!(p[0].abs() < 1e-15 && (p[1] - 1.0).abs() < 1e-15);
        let c = c.oriented(Orientation::Cw);
        let p = c.point_at(0.25);
        assert!((p[1] + 1.0).abs() < 1e-15);
    }
}
