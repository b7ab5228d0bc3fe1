//! Command implementations behind the `nilfix` binary.
//!
//! Every command produces an [`Outcome`]: an exit code, a JSON report and
//! optionally an SVG document. Nothing is written here; the binary writes
//! each artifact once, atomically.

pub mod scenario;
pub mod svg;

use std::io::Write;
use std::path::{Path, PathBuf};

use nilfix_core::action::{verify_main, ActionError, Status, VerifyOptions};
use nilfix_core::flow::{flow_displacement_index, FlowError, FlowIndexOptions};
use nilfix_core::index::block_index;
use nilfix_core::zeros::{find_zeros, ZeroOptions};
use nilfix_core::{AlgebraElement, IndexResult, WindingOptions};
use serde_json::{json, Map, Value};

pub use scenario::{Model, Scenario, ScenarioError, SCHEMA_VERSION};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_INVALID: i32 = 2;

#[derive(Debug, Clone, PartialEq)]
pub enum Command {
    CheckAlgebra,
    CheckAction,
    Index {
        field: String,
        region: String,
        flow_t: Option<f64>,
    },
    VerifyMain {
        field: String,
        region: String,
    },
    Plot {
        field: String,
        region: String,
        output: PathBuf,
    },
    Run,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::CheckAlgebra => "check-algebra",
            Command::CheckAction => "check-action",
            Command::Index { .. } => "index",
            Command::VerifyMain { .. } => "verify-main",
            Command::Plot { .. } => "plot",
            Command::Run => "run",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Settings {
    pub tol: Option<f64>,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub exit: i32,
    pub report: Value,
    pub svgs: Vec<(PathBuf, String)>,
}

impl Outcome {
    fn new(exit: i32, command: &str, body: Value) -> Self {
        let mut report = Map::new();
        report.insert("schema_version".into(), json!(SCHEMA_VERSION));
        report.insert("command".into(), json!(command));
        if let Value::Object(m) = body {
            report.extend(m);
        }
        Outcome {
            exit,
            report: Value::Object(report),
            svgs: Vec::new(),
        }
    }

    fn error(command: &str, msg: impl ToString) -> Self {
        Self::new(EXIT_INVALID, command, json!({ "error": msg.to_string() }))
    }

    pub fn report_text(&self) -> String {
        let mut s = serde_json::to_string_pretty(&self.report).expect("reports serialize");
        s.push('\n');
        s
    }
}

/// Load a scenario file and run one command on it.
pub fn run_file(path: &Path, cmd: &Command, settings: &Settings) -> Outcome {
    match Model::load(path) {
        Ok(model) => execute(&model, cmd, settings),
        Err(e) => Outcome::error(cmd.name(), e),
    }
}

pub fn execute(model: &Model, cmd: &Command, settings: &Settings) -> Outcome {
    match cmd {
        Command::CheckAlgebra => check_algebra(model),
        Command::CheckAction => check_action(model),
        Command::Index { field, region, flow_t } => index(model, field, region, *flow_t, settings),
        Command::VerifyMain { field, region } => verify(model, field, region, settings),
        Command::Plot { field, region, output } => plot(model, field, region, output),
        Command::Run => run_tasks(model, settings),
    }
}

fn rational_text(r: &nilfix_core::Rational) -> String {
    r.to_string()
}

fn check_algebra(model: &Model) -> Outcome {
    let name = "check-algebra";
    let check = match model.table_check() {
        Ok(c) => c,
        Err(e) => return Outcome::error(name, e),
    };
    let triples = |v: &[(usize, usize, usize)]| v.iter().map(|&(i, j, k)| json!([i, j, k])).collect::<Vec<_>>();
    let mut body = json!({
        "valid": check.is_valid(),
        "antisymmetry_violations": triples(&check.antisymmetry_violations),
        "jacobi_violations": triples(&check.jacobi_violations),
    });
    if !check.is_valid() {
        return Outcome::new(EXIT_FAIL, name, body);
    }
    let alg = match model.algebra() {
        Ok(a) => a,
        Err(e) => return Outcome::error(name, e),
    };
    let series: Vec<usize> = alg.lower_central_series().iter().map(|s| s.dim()).collect();
    let center: Vec<Vec<String>> = alg
        .center()
        .basis()
        .iter()
        .map(|v| v.iter().map(rational_text).collect())
        .collect();
    body["dim"] = json!(alg.dim());
    body["names"] = json!(alg.names());
    body["nilpotent"] = json!(alg.is_nilpotent());
    body["series"] = json!(series);
    body["center"] = json!(center);
    Outcome::new(EXIT_OK, name, body)
}

fn check_action(model: &Model) -> Outcome {
    let name = "check-action";
    let alg = match model.algebra() {
        Ok(a) => a,
        Err(e) => return Outcome::error(name, e),
    };
    let names = alg.names().to_vec();
    match model.action(alg) {
        Err(e) => Outcome::error(name, e),
        Ok(Ok(_)) => Outcome::new(EXIT_OK, name, json!({ "valid": true, "generators": names })),
        Ok(Err(ActionError::NotHomomorphism { i, j, residual })) => Outcome::new(
            EXIT_FAIL,
            name,
            json!({
                "valid": false,
                "generators": names,
                "pair": [names[i], names[j]],
                "residual": residual,
            }),
        ),
        Ok(Err(e)) => Outcome::error(name, e),
    }
}

fn winding_options(settings: &Settings) -> WindingOptions {
    let mut w = WindingOptions::default();
    if let Some(t) = settings.tol {
        w.modulus_floor = t;
    }
    w
}

fn index_body(r: &IndexResult) -> Value {
    serde_json::to_value(r).expect("index results serialize")
}

fn index(model: &Model, field: &str, region: &str, flow_t: Option<f64>, settings: &Settings) -> Outcome {
    let name = "index";
    let (f, reg) = match (model.field(field), model.region(region)) {
        (Ok(f), Ok(r)) => (f, r),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(name, e),
    };
    let winding = winding_options(settings);
    let result = match flow_t {
        None => block_index(f, reg, &winding).map_err(|e| e.to_string()),
        Some(t) => {
            let opts = FlowIndexOptions {
                winding,
                ..Default::default()
            };
            flow_displacement_index(f, reg, t, &opts).map_err(|e: FlowError| e.to_string())
        }
    };
    let mut body = json!({ "field": field, "region": region });
    if let Some(t) = flow_t {
        body["flow_t"] = json!(t);
    }
    match result {
        Ok(r) => {
            let exit = if r.certified { EXIT_OK } else { EXIT_FAIL };
            if let (Value::Object(b), Value::Object(m)) = (&mut body, index_body(&r)) {
                b.extend(m);
            }
            Outcome::new(exit, name, body)
        }
        Err(e) => {
            body["error"] = json!(e);
            Outcome::new(EXIT_INVALID, name, body)
        }
    }
}

fn verify(model: &Model, field: &str, region: &str, settings: &Settings) -> Outcome {
    let name = "verify-main";
    let prepared = (|| {
        let alg = model.algebra()?;
        let k = model.generator_index(field)?;
        let reg = model.region(region)?.clone();
        let dim = alg.dim();
        let action = model
            .action(alg)?
            .map_err(|e| ScenarioError::Invalid(e.to_string()))?;
        Ok::<_, ScenarioError>((action, AlgebraElement::basis(dim, k), reg))
    })();
    let (action, x, reg) = match prepared {
        Ok(p) => p,
        Err(e) => return Outcome::error(name, e),
    };
    let mut opts = VerifyOptions {
        seed: settings.seed,
        winding: winding_options(settings),
        ..Default::default()
    };
    if let Some(t) = settings.tol {
        opts.witness_tol = t;
    }
    match verify_main(&action, &x, &reg, &opts) {
        Ok(r) => {
            let exit = if r.status == Status::Inconclusive { EXIT_FAIL } else { EXIT_OK };
            let mut body = serde_json::to_value(&r).expect("reports serialize");
            body["field"] = json!(field);
            body["region"] = json!(region);
            Outcome::new(exit, name, body)
        }
        Err(e) => Outcome::error(name, e),
    }
}

fn plot(model: &Model, field: &str, region: &str, output: &Path) -> Outcome {
    let name = "plot";
    let (f, reg) = match (model.field(field), model.region(region)) {
        (Ok(f), Ok(r)) => (f, r),
        (Err(e), _) | (_, Err(e)) => return Outcome::error(name, e),
    };
    let compiled = match f.compile(reg.chart()) {
        Ok(c) => c,
        Err(e) => return Outcome::error(name, e),
    };
    let (zeros, zero_error) = match find_zeros(f, reg, &ZeroOptions::default()) {
        Ok(s) => (s.clusters.iter().map(|c| c.location).collect::<Vec<_>>(), None),
        Err(e) => (Vec::new(), Some(e.to_string())),
    };
    let idx = block_index(f, reg, &WindingOptions::default());
    let index = idx.as_ref().ok().filter(|r| r.certified).map(|r| r.value);
    let svg = svg::render(&svg::Portrait {
        field: &compiled,
        region: reg,
        zeros: &zeros,
        index,
        title: &format!("{field} on {region}"),
    });
    let mut body = json!({
        "field": field,
        "region": region,
        "output": output.display().to_string(),
        "zeros": zeros,
        "index": index,
    });
    if let Some(e) = zero_error {
        body["zero_search_error"] = json!(e);
    }
    if let Err(e) = idx {
        body["index_error"] = json!(e.to_string());
    }
    let mut out = Outcome::new(EXIT_OK, name, body);
    out.svgs.push((output.to_path_buf(), svg));
    out
}

fn run_tasks(model: &Model, settings: &Settings) -> Outcome {
    let mut exit = EXIT_OK;
    let mut results = Vec::new();
    let mut svgs = Vec::new();
    for task in &model.tasks {
        let field = task.field.clone().unwrap_or_default();
        let region = task.region.clone().unwrap_or_default();
        let cmd = match task.command.as_str() {
            "check-algebra" => Command::CheckAlgebra,
            "check-action" => Command::CheckAction,
            "index" => Command::Index {
                field,
                region,
                flow_t: task.flow_t,
            },
            "verify-main" => Command::VerifyMain { field, region },
            "plot" => match &task.output {
                Some(o) => Command::Plot {
                    field,
                    region,
                    output: PathBuf::from(o),
                },
                None => {
                    results.push(Outcome::error("plot", "plot task needs an output").report);
                    exit = exit.max(EXIT_INVALID);
                    continue;
                }
            },
            other => unreachable!("loader rejects command {other}"),
        };
        let s = Settings {
            tol: task.tol.or(settings.tol),
            seed: settings.seed,
        };
        let o = execute(model, &cmd, &s);
        exit = exit.max(o.exit);
        results.push(o.report);
        svgs.extend(o.svgs);
    }
    let mut out = Outcome::new(exit, "run", json!({ "results": results }));
    out.svgs = svgs;
    out
}

/// Write `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
pub fn write_atomic(path: &Path, contents: &str) -> std::io::Result<()> {
    let dir = match path.parent() {
        Some(d) if !d.as_os_str().is_empty() => d,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| e.error)?;
    Ok(())
}

/// Size the global rayon pool from `NILFIX_THREADS` when set.
pub fn configure_threads() -> Result<(), String> {
    match std::env::var("NILFIX_THREADS") {
        Ok(v) => {
            let n: usize = v
                .trim()
                .parse()
                .map_err(|_| format!("NILFIX_THREADS must be a positive integer, got {v:?}"))?;
            if n == 0 {
                return Err("NILFIX_THREADS must be positive".into());
            }
            rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build_global()
                .map_err(|e| e.to_string())
        }
        Err(_) => Ok(()),
    }
}
