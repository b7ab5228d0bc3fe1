//! Local flows of polynomial fields and indices of their time-t maps.
//!
//! Trajectories are integrated with an embedded Dormand–Prince 5(4) pair.
//! On the sphere the integrator hops to the opposite chart whenever the
//! position leaves the disk of radius 2; on the torus positions wrap into
//! the unit square; in the plane leaving the working box ends the
//! trajectory with [`Advance::Escaped`], which is how the partial domain of
//! a local flow shows up.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{sphere_transition, Chart, CompiledField, FieldError, PolyVectorField, SurfaceKind};
use crate::index::{block_index, block_index_along, IndexError, IndexResult, WindingOptions};
use crate::region::Region;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FlowError {
    #[error("step budget of {0} steps exhausted")]
    StepBudget(usize),
    #[error("trajectory from ({x}, {y}) left the working box before time {t}")]
    Escaped { x: f64, y: f64, t: f64 },
    #[error("integration produced a non-finite state")]
    NonFinite,
    #[error("point cannot be expressed in chart {0}")]
    ChartUnreachable(Chart),
    #[error("invalid integrator options: {0}")]
    BadOptions(&'static str),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Index(#[from] IndexError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntegratorOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub max_step: f64,
    pub max_steps: usize,
    /// Plane trajectories leaving `[-b, b]²` escape.
    pub working_box: f64,
}

impl Default for IntegratorOptions {
    fn default() -> Self {
        IntegratorOptions {
            rel_tol: 1e-10,
            abs_tol: 1e-10,
            max_step: 0.1,
            max_steps: 100_000,
            working_box: 100.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Advance {
    Arrived { chart: Chart, point: [f64; 2] },
    Escaped { chart: Chart, point: [f64; 2], time: f64 },
}

impl Advance {
    pub fn arrived(self) -> Option<(Chart, [f64; 2])> {
        match self {
            Advance::Arrived { chart, point } => Some((chart, point)),
            Advance::Escaped { .. } => None,
        }
    }
}

// Dormand–Prince 5(4) tableau.
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Time-`t` map of a field's local flow.
#[derive(Debug, Clone)]
pub struct FlowMap {
    kind: SurfaceKind,
    charts: Vec<(Chart, CompiledField)>,
    t: f64,
    opts: IntegratorOptions,
}

impl FlowMap {
    pub fn new(field: &PolyVectorField, t: f64, opts: IntegratorOptions) -> Result<Self, FlowError> {
        if !t.is_finite() {
            return Err(FlowError::BadOptions("time must be finite"));
        }
        if !(opts.rel_tol > 0.0 && opts.abs_tol > 0.0 && opts.max_step > 0.0) {
            return Err(FlowError::BadOptions("tolerances and max_step must be positive"));
        }
        let surface = field.surface();
        let charts = surface
            .charts()
            .iter()
            .map(|&c| Ok((c, field.compile(c)?)))
            .collect::<Result<_, FieldError>>()?;
        Ok(FlowMap {
            kind: surface.kind(),
            charts,
            t,
            opts,
        })
    }

    pub fn time(&self) -> f64 {
        self.t
    }

    fn compiled(&self, chart: Chart) -> Result<&CompiledField, FlowError> {
        self.charts
            .iter()
            .find(|(c, _)| *c == chart)
            .map(|(_, f)| f)
            .ok_or(FlowError::Field(FieldError::ChartMismatch {
                chart,
                surface: self.kind,
            }))
    }

    /// Flow `p` (given in `chart`) for the configured time.
    pub fn advance(&self, chart: Chart, p: [f64; 2]) -> Result<Advance, FlowError> {
        if !(p[0].is_finite() && p[1].is_finite()) {
            return Err(FieldError::NonFinitePoint(p[0], p[1]).into());
        }
        let mut f = self.compiled(chart)?;
        let mut chart = chart;
        let mut y = p;
        if self.t == 0.0 {
            return Ok(Advance::Arrived { chart, point: y });
        }
        let dir = self.t.signum();
        let total = self.t.abs();
        let mut done = 0.0;
        let mut h = self.opts.max_step.min(total).min(0.01);
        let mut steps = 0;
        let mut k = [[0.0; 2]; 7];
        k[0] = f.eval(y);
        while done < total {
            if steps >= self.opts.max_steps {
                return Err(FlowError::StepBudget(self.opts.max_steps));
            }
            steps += 1;
            let last = done + h >= total;
            if last {
                h = total - done;
            }
            let hs = dir * h;
            for s in 1..7 {
                let mut ys = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    ys[0] += hs * A[s][j] * kj[0];
                    ys[1] += hs * A[s][j] * kj[1];
                }
                k[s] = f.eval(ys);
            }
            let mut y5 = y;
            let mut err = [0.0; 2];
            for i in 0..7 {
                for d in 0..2 {
                    y5[d] += hs * B5[i] * k[i][d];
                    err[d] += hs * (B5[i] - B4[i]) * k[i][d];
                }
            }
            if !(y5[0].is_finite() && y5[1].is_finite()) {
                return Err(FlowError::NonFinite);
            }
            let e = ((0..2)
                .map(|d| {
                    let sc = self.opts.abs_tol + self.opts.rel_tol * y[d].abs().max(y5[d].abs());
                    (err[d] / sc).powi(2)
                })
                .sum::<f64>()
                / 2.0)
                .sqrt();
            if e <= 1.0 {
                done = if last { total } else { done + h };
                y = y5;
                // FSAL: the last stage is the derivative at the new point.
                k[0] = k[6];
                match self.kind {
                    SurfaceKind::Plane => {
                        let b = self.opts.working_box;
                        if y[0].abs() > b || y[1].abs() > b {
                            return Ok(Advance::Escaped {
                                chart,
                                point: y,
                                time: dir * done,
                            });
                        }
                    }
                    SurfaceKind::Sphere => {
                        if y[0].hypot(y[1]) > 2.0 {
                            y = sphere_transition(y);
                            chart = if chart == Chart::North { Chart::South } else { Chart::North };
                            f = self.compiled(chart)?;
                            k[0] = f.eval(y);
                        }
                    }
                    SurfaceKind::Torus => {
                        y = [y[0].rem_euclid(1.0), y[1].rem_euclid(1.0)];
                    }
                }
            }
            let fac = if e == 0.0 { 5.0 } else { (0.9 * e.powf(-0.2)).clamp(0.2, 5.0) };
            if e > 1.0 || !last {
                h = (h * fac).min(self.opts.max_step);
            }
            if h < 1e-14 * total.max(1.0) {
                return Err(FlowError::NonFinite);
            }
        }
        Ok(Advance::Arrived { chart, point: y })
    }

    /// Advance and express the result in `target` chart.
    pub fn advance_to_chart(&self, chart: Chart, p: [f64; 2], target: Chart) -> Result<[f64; 2], FlowError> {
        match self.advance(chart, p)? {
            Advance::Arrived { chart: c, point } => express_in(c, point, target),
            Advance::Escaped { .. } => Err(FlowError::Escaped {
                x: p[0],
                y: p[1],
                t: self.t,
            }),
        }
    }
}

fn express_in(from: Chart, p: [f64; 2], to: Chart) -> Result<[f64; 2], FlowError> {
    if from == to {
        return Ok(p);
    }
    match (from, to) {
        (Chart::North, Chart::South) | (Chart::South, Chart::North) => {
            if p[0] == 0.0 && p[1] == 0.0 {
                Err(FlowError::ChartUnreachable(to))
            } else {
                Ok(sphere_transition(p))
            }
        }
        _ => Err(FlowError::ChartUnreachable(to)),
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct FlowIndexOptions {
    pub integrator: IntegratorOptions,
    pub winding: WindingOptions,
}

/// Index of the time-`t` map over `region`: the boundary winding number of
/// the displacement `p ↦ φ_t(p) - p`.
pub fn flow_displacement_index(
    field: &PolyVectorField,
    region: &Region,
    t: f64,
    opts: &FlowIndexOptions,
) -> Result<IndexResult, FlowError> {
    let chart = region.chart();
    let flow = FlowMap::new(field, t, opts.integrator.clone())?;
    let torus = field.surface().kind() == SurfaceKind::Torus;
    block_index_along(
        region,
        |p| {
            let q = flow.advance_to_chart(chart, p, chart)?;
            let mut d = [q[0] - p[0], q[1] - p[1]];
            if torus {
                // Shortest representative of the displacement on the torus.
                d = [d[0] - d[0].round(), d[1] - d[1].round()];
            }
            Ok::<_, FlowError>(d)
        },
        &opts.winding,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauEntry {
    pub t: f64,
    pub index: Option<i64>,
    pub certified: bool,
    pub min_displacement: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TauReport {
    pub block_index: i64,
    pub entries: Vec<TauEntry>,
    /// Length of the longest prefix of `entries` whose certified index
    /// equals `block_index`.
    pub stable_prefix: usize,
}

/// Probe the time-`t` map index for each `t` in `times` (expected
/// decreasing) and compare against the field's block index.
pub fn tau_probe(
    field: &PolyVectorField,
    region: &Region,
    times: &[f64],
    opts: &FlowIndexOptions,
) -> Result<TauReport, FlowError> {
    let block = block_index(field, region, &opts.winding)?;
    let entries: Vec<TauEntry> = times
        .iter()
        .map(|&t| match flow_displacement_index(field, region, t, opts) {
            Ok(r) => TauEntry {
                t,
                index: Some(r.value),
                certified: r.certified,
                min_displacement: Some(r.min_modulus_on_boundary),
                error: None,
            },
            Err(e) => TauEntry {
                t,
                index: None,
                certified: false,
                min_displacement: None,
                error: Some(e.to_string()),
            },
        })
        .collect();
    let stable_prefix = entries
        .iter()
        .take_while(|e| e.certified && e.index == Some(block.value))
        .count();
    Ok(TauReport {
        block_index: block.value,
        entries,
        stable_prefix,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationEntry {
    pub k: usize,
    pub index: Option<i64>,
    pub certified: bool,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FundAReport {
    pub flow_index: Option<i64>,
    pub flow_error: Option<String>,
    pub entries: Vec<PerturbationEntry>,
    /// Position of the first perturbed field whose block index certified.
    pub first_certified: Option<usize>,
    /// Every entry from `first_certified` on matches `flow_index`.
    pub consistent: bool,
}

/// Compare the block indices of `X + δ_k` with the time-`t` map index of `X`.
pub fn fund_a_check(
    field: &PolyVectorField,
    perturbations: &[PolyVectorField],
    region: &Region,
    t: f64,
    opts: &FlowIndexOptions,
) -> Result<FundAReport, FlowError> {
    let (flow_index, flow_error) = match flow_displacement_index(field, region, t, opts) {
        Ok(r) if r.certified => (Some(r.value), None),
        Ok(_) => (None, Some("flow index not certified".to_string())),
        Err(e) => (None, Some(e.to_string())),
    };
    let mut entries = Vec::with_capacity(perturbations.len());
    for (k, delta) in perturbations.iter().enumerate() {
        let xk = field.add(delta)?;
        entries.push(match block_index(&xk, region, &opts.winding) {
            Ok(r) => PerturbationEntry {
                k,
                index: Some(r.value),
                certified: r.certified,
                error: None,
            },
            Err(e) => PerturbationEntry {
                k,
                index: None,
                certified: false,
                error: Some(e.to_string()),
            },
        });
    }
    let first_certified = entries.iter().position(|e| e.certified);
    let consistent = flow_index.is_some()
        && first_certified.is_some_and(|f| {
            entries[f..]
                .iter()
                .all(|e| e.certified && e.index == flow_index)
        });
    Ok(FundAReport {
        flow_index,
        flow_error,
        entries,
        first_certified,
        consistent,
    })
}
