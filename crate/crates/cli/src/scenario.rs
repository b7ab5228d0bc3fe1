//! Scenario files: raw JSON shape and the validated model built from it.

use std::collections::BTreeMap;
use std::path::Path;

use nilfix_core::action::ActionSpec;
use nilfix_core::lie::TableCheck;
use nilfix_core::linalg::Rational;
use nilfix_core::region::Curve;
use nilfix_core::{Chart, LieAlgebra, Poly2, PolyVectorField, Region, StructureTable, Surface, SurfaceKind};
use num::BigInt;
use serde::{Deserialize, Serialize};

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum ScenarioError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed scenario: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported schema_version {0}")]
    Schema(u32),
    #[error("{0}")]
    Invalid(String),
}

fn invalid<T>(msg: impl Into<String>) -> Result<T, ScenarioError> {
    Err(ScenarioError::Invalid(msg.into()))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema_version: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraBlock>,
    pub surface: SurfaceBlock,
    #[serde(default)]
    pub fields: BTreeMap<String, BTreeMap<String, Components>>,
    #[serde(default)]
    pub regions: BTreeMap<String, RegionBlock>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tasks: Vec<Task>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraBlock {
    pub dim: usize,
    pub names: Vec<String>,
    /// `[i, j, k, num, den]`: coefficient of `e_k` in `[e_i, e_j]`.
    #[serde(default)]
    pub structure: Vec<[i64; 5]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SurfaceBlock {
    pub kind: SurfaceKind,
}

/// Polynomial components as `[i, j, num, den]` terms for `x^i y^j`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Components {
    #[serde(rename = "P", default)]
    pub p: Vec<[i64; 4]>,
    #[serde(rename = "Q", default)]
    pub q: Vec<[i64; 4]>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegionBlock {
    pub chart: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub holes: Vec<HoleBlock>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HoleBlock {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub circle: Option<[f64; 3]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub polygon: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Task {
    pub command: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub field: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub region: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub flow_t: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output: Option<String>,
}

pub const COMMANDS: &[&str] = &["check-algebra", "check-action", "index", "verify-main", "plot"];

impl Scenario {
    pub fn parse(text: &str) -> Result<Self, ScenarioError> {
        let s: Scenario = serde_json::from_str(text)?;
        if s.schema_version != SCHEMA_VERSION {
            return Err(ScenarioError::Schema(s.schema_version));
        }
        Ok(s)
    }

    pub fn read(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&text)
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("scenario serializes");
        s.push('\n');
        s
    }
}

fn rational(num: i64, den: i64) -> Result<Rational, ScenarioError> {
    if den == 0 {
        return invalid("zero denominator");
    }
    Ok(Rational::new(BigInt::from(num), BigInt::from(den)))
}

fn poly(terms: &[[i64; 4]]) -> Result<Poly2, ScenarioError> {
    let mut p = Poly2::zero();
    for &[i, j, n, d] in terms {
        if !(0..=64).contains(&i) || !(0..=64).contains(&j) {
            return invalid(format!("exponent out of range in term [{i}, {j}, {n}, {d}]"));
        }
        p.add_term(i as u32, j as u32, rational(n, d)?);
    }
    Ok(p)
}

fn curve(circle: &Option<[f64; 3]>, polygon: &Option<Vec<[f64; 2]>>) -> Result<Curve, ScenarioError> {
    match (circle, polygon) {
        (Some([cx, cy, r]), None) => {
            if !(cx.is_finite() && cy.is_finite() && r.is_finite() && *r > 0.0) {
                return invalid("circle needs a finite center and positive radius");
            }
            Ok(Curve::circle([*cx, *cy], *r))
        }
        (None, Some(v)) => {
            if v.len() < 3 || v.iter().flatten().any(|x| !x.is_finite()) {
                return invalid("polygon needs at least three finite vertices");
            }
            Ok(Curve::Polygon(v.clone()))
        }
        _ => invalid("exactly one of circle or polygon is required"),
    }
}

/// Validated contents of a scenario.
#[derive(Debug, Clone)]
pub struct Model {
    pub surface: Surface,
    pub table: Option<StructureTable>,
    pub fields: BTreeMap<String, PolyVectorField>,
    pub regions: BTreeMap<String, Region>,
    pub tasks: Vec<Task>,
}

impl Model {
    pub fn from_scenario(s: &Scenario) -> Result<Self, ScenarioError> {
        let surface = Surface(s.surface.kind);
        let table = s.algebra.as_ref().map(structure_table).transpose()?;

        let mut fields = BTreeMap::new();
        for (name, charts) in &s.fields {
            let field = build_field(surface, charts).map_err(|e| ScenarioError::Invalid(format!("field {name}: {e}")))?;
            fields.insert(name.clone(), field);
        }

        let mut regions = BTreeMap::new();
        for (name, r) in &s.regions {
            let chart = Chart::parse(&r.chart)
                .ok_or_else(|| ScenarioError::Invalid(format!("region {name}: unknown chart {}", r.chart)))?;
            surface
                .chart_index(chart)
                .map_err(|e| ScenarioError::Invalid(format!("region {name}: {e}")))?;
            let outer = curve(&r.circle, &r.polygon).map_err(|e| ScenarioError::Invalid(format!("region {name}: {e}")))?;
            let holes = r
                .holes
                .iter()
                .map(|h| curve(&h.circle, &h.polygon))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| ScenarioError::Invalid(format!("region {name}: {e}")))?;
            let region = Region::new(chart, outer, holes).map_err(|e| ScenarioError::Invalid(format!("region {name}: {e}")))?;
            regions.insert(name.clone(), region);
        }

        for (k, t) in s.tasks.iter().enumerate() {
            if !COMMANDS.contains(&t.command.as_str()) {
                return invalid(format!("task {k}: unknown command {}", t.command));
            }
            if let Some(f) = &t.field {
                if !fields.contains_key(f) {
                    return invalid(format!("task {k}: unknown field {f}"));
                }
            }
            if let Some(r) = &t.region {
                if !regions.contains_key(r) {
                    return invalid(format!("task {k}: unknown region {r}"));
                }
            }
        }

        Ok(Model {
            surface,
            table,
            fields,
            regions,
            tasks: s.tasks.clone(),
        })
    }

    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        Self::from_scenario(&Scenario::read(path)?)
    }

    pub fn table(&self) -> Result<&StructureTable, ScenarioError> {
        self.table
            .as_ref()
            .ok_or_else(|| ScenarioError::Invalid("scenario has no algebra block".into()))
    }

    pub fn table_check(&self) -> Result<TableCheck, ScenarioError> {
        Ok(self.table()?.check())
    }

    pub fn algebra(&self) -> Result<LieAlgebra, ScenarioError> {
        LieAlgebra::from_table(self.table()?.clone()).map_err(|e| ScenarioError::Invalid(format!("algebra: {e}")))
    }

    /// Generator fields in basis order, looked up by basis name.
    pub fn generators(&self) -> Result<Vec<PolyVectorField>, ScenarioError> {
        self.table()?
            .names()
            .iter()
            .map(|n| {
                self.fields
                    .get(n)
                    .cloned()
                    .ok_or_else(|| ScenarioError::Invalid(format!("no field for generator {n}")))
            })
            .collect()
    }

    pub fn field(&self, name: &str) -> Result<&PolyVectorField, ScenarioError> {
        self.fields
            .get(name)
            .ok_or_else(|| ScenarioError::Invalid(format!("unknown field {name}")))
    }

    pub fn region(&self, name: &str) -> Result<&Region, ScenarioError> {
        self.regions
            .get(name)
            .ok_or_else(|| ScenarioError::Invalid(format!("unknown region {name}")))
    }

    pub fn generator_index(&self, name: &str) -> Result<usize, ScenarioError> {
        self.table()?
            .names()
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| ScenarioError::Invalid(format!("{name} is not a generator of the algebra")))
    }

    pub fn action(&self, algebra: LieAlgebra) -> Result<Result<ActionSpec, nilfix_core::ActionError>, ScenarioError> {
        Ok(ActionSpec::build(algebra, self.surface, self.generators()?))
    }
}

/// Entries are taken literally; an entry whose antisymmetric partner is
/// absent gets the partner filled in with the opposite sign.
fn structure_table(a: &AlgebraBlock) -> Result<StructureTable, ScenarioError> {
    if a.names.len() != a.dim {
        return invalid(format!("algebra: dim is {} but {} names given", a.dim, a.names.len()));
    }
    if a.dim == 0 {
        return invalid("algebra: dimension must be positive");
    }
    let mut explicit = BTreeMap::new();
    for &[i, j, k, n, d] in &a.structure {
        let idx = [i, j, k];
        if idx.iter().any(|&x| x < 0 || x as usize >= a.dim) {
            return invalid(format!("algebra: index out of range in [{i}, {j}, {k}, {n}, {d}]"));
        }
        let key = (i as usize, j as usize, k as usize);
        if explicit.insert(key, rational(n, d)?).is_some() {
            return invalid(format!("algebra: duplicate entry for ({i}, {j}, {k})"));
        }
    }
    let mut table = StructureTable::zero(a.names.clone());
    for (&(i, j, k), v) in &explicit {
        table.set(i, j, k, v.clone()).expect("indices checked");
        if !explicit.contains_key(&(j, i, k)) {
            table.set(j, i, k, -v.clone()).expect("indices checked");
        }
    }
    Ok(table)
}

fn build_field(surface: Surface, charts: &BTreeMap<String, Components>) -> Result<PolyVectorField, String> {
    let mut parsed = BTreeMap::new();
    for (c, comps) in charts {
        let chart = Chart::parse(c).ok_or_else(|| format!("unknown chart {c}"))?;
        surface.chart_index(chart).map_err(|e| e.to_string())?;
        let p = poly(&comps.p).map_err(|e| e.to_string())?;
        let q = poly(&comps.q).map_err(|e| e.to_string())?;
        parsed.insert(surface.chart_index(chart).expect("checked"), (p, q));
    }
    let result = match surface.kind() {
        SurfaceKind::Sphere => match (parsed.remove(&0), parsed.remove(&1)) {
            (Some(n), None) => PolyVectorField::sphere_from_north(n.0, n.1),
            (Some(n), Some(s)) => PolyVectorField::new(surface, vec![n, s]),
            _ => return Err("sphere fields need N components".into()),
        },
        _ => match parsed.remove(&0) {
            Some(pq) => PolyVectorField::new(surface, vec![pq]),
            None => return Err("missing components".into()),
        },
    };
    result.map_err(|e| e.to_string())
}

#[cfg(test)]
mod tests {
    use super::*;

    const H3: &str = r#"{
        "schema_version": 1,
        "algebra": {"dim": 3, "names": ["X", "Y", "Z"], "structure": [[0, 1, 2, 1, 1]]},
        "surface": {"kind": "plane"},
        "fields": {
            "X": {"plane": {"P": [[0, 0, 1, 1]]}},
            "Y": {"plane": {"Q": [[1, 0, 1, 1]]}},
            "Z": {"plane": {"Q": [[0, 0, 1, 1]]}}
        },
        "regions": {"disk": {"chart": "plane", "circle": [0, 0, 1]}},
        "tasks": [{"command": "verify-main", "field": "X", "region": "disk"}]
    }"#;

    #[test]
    fn loads_heisenberg() {
        let m = Model::from_scenario(&Scenario::parse(H3).unwrap()).unwrap();
        let alg = m.algebra().unwrap();
        assert!(alg.is_nilpotent());
        assert!(m.action(alg).unwrap().is_ok());
        assert_eq!(m.generator_index("Z").unwrap(), 2);
    }

    #[test]
    fn partner_entries_are_filled() {
        let m = Model::from_scenario(&Scenario::parse(H3).unwrap()).unwrap();
        let t = m.table().unwrap();
        assert_eq!(*t.get(1, 0, 2), rational(-1, 1).unwrap());
    }

    #[test]
    fn round_trip() {
        let s = Scenario::parse(H3).unwrap();
        let again = Scenario::parse(&s.to_json()).unwrap();
        assert_eq!(s, again);
    }

    #[test]
    fn rejects_bad_references() {
        let bad = H3.replace(r#""field": "X""#, r#""field": "W""#);
        assert!(matches!(
            Model::from_scenario(&Scenario::parse(&bad).unwrap()),
            Err(ScenarioError::Invalid(_))
        ));
        let bad = H3.replace(r#""chart": "plane""#, r#""chart": "N""#);
        assert!(Model::from_scenario(&Scenario::parse(&bad).unwrap()).is_err());
        let bad = H3.replace("[0, 1, 2, 1, 1]", "[0, 1, 3, 1, 1]");
        assert!(Model::from_scenario(&Scenario::parse(&bad).unwrap()).is_err());
        let bad = H3.replace("\"schema_version\": 1", "\"schema_version\": 9");
        assert!(matches!(Scenario::parse(&bad), Err(ScenarioError::Schema(9))));
    }

    #[test]
    fn sphere_south_is_derived() {
        let text = r#"{
            "schema_version": 1,
            "surface": {"kind": "sphere"},
            "fields": {"rot": {"N": {"P": [[0, 1, -1, 1]], "Q": [[1, 0, 1, 1]]}}}
        }"#;
        let m = Model::from_scenario(&Scenario::parse(text).unwrap()).unwrap();
        let f = m.field("rot").unwrap();
        assert_eq!(f.all_components().len(), 2);
    }

    #[test]
    fn non_periodic_torus_field_is_rejected() {
        let text = r#"{
            "schema_version": 1,
            "surface": {"kind": "torus"},
            "fields": {"x": {"T": {"P": [[1, 0, 1, 1]]}}}
        }"#;
        assert!(Model::from_scenario(&Scenario::parse(text).unwrap()).is_err());
    }
}
