//! Scenario runner behind `strip-poisson run`.
//!
//! A run writes three files into the output directory: `report.json`,
//! `slices.csv` (plot data along the vertical axis) and `solution.csv`
//! (the normalized solution in the table format read back by
//! [`StripField::read_table`]).

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::Serialize;
use serde_json::{json, Value};

use crate::config::{DiagnosticConfig, MethodConfig, ScenarioConfig, SignConvention};
use crate::diagnostics::{self, relative_error_modulo};
use crate::mft::horizontal_transform;
use crate::solver::{self, Growth, Method, Projection, SolveOptions, SolveReport};
use crate::stripfield::{DecayClass, StripField, StripGrid};
use crate::weightspaces::{PolyElement, WeightSpec};
use crate::{Error, Result};

/// Environment variable that overrides the output directory of a run.
pub const OUTPUT_ENV: &str = "STRIP_POISSON_OUTPUT";

pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

/// A failed run: the process exit status and the underlying error.
#[derive(Debug)]
pub struct RunFailure {
    pub exit_code: i32,
    pub error: Error,
}

impl RunFailure {
    fn config(error: Error) -> Self {
        let exit_code = match error {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_CONFIG,
        };
        RunFailure { exit_code, error }
    }

    fn compute(error: Error) -> Self {
        let exit_code = match error {
            Error::Io(_) => EXIT_IO,
            _ => EXIT_NUMERICAL,
        };
        RunFailure { exit_code, error }
    }

    /// Machine-readable description printed on standard error.
    pub fn to_json(&self) -> Value {
        let mut v = json!({
            "error": self.error.code(),
            "exit_code": self.exit_code,
            "message": self.error.to_string(),
        });
        let details = match &self.error {
            Error::MomentViolation { m0, m1, tol } => json!({"m0": m0, "m1": m1, "tol_moment": tol}),
            Error::CostBudget { points, budget } => json!({"points": points, "budget": budget}),
            Error::IllConditioned(c) => json!({"condition_number": c}),
            _ => Value::Null,
        };
        if !details.is_null() {
            v["details"] = details;
        }
        v
    }
}

/// Where the files of a run went, and the report that was written.
#[derive(Debug)]
pub struct RunOutcome {
    pub output_dir: PathBuf,
    pub report: Value,
}

/// Output directory precedence: explicit argument, then [`OUTPUT_ENV`],
/// then the `output` key of the config.
pub fn output_dir(cfg: &ScenarioConfig, explicit: Option<&Path>) -> PathBuf {
    if let Some(p) = explicit {
        return p.to_path_buf();
    }
    match std::env::var_os(OUTPUT_ENV) {
        Some(p) if !p.is_empty() => PathBuf::from(p),
        _ => cfg.output.clone(),
    }
}

/// Loads, validates and runs the scenario in `config_path`.
pub fn run_file(config_path: &Path, output: Option<&Path>) -> std::result::Result<RunOutcome, RunFailure> {
    let cfg = ScenarioConfig::load(config_path).map_err(RunFailure::config)?;
    run(&cfg, output)
}

pub fn run(cfg: &ScenarioConfig, output: Option<&Path>) -> std::result::Result<RunOutcome, RunFailure> {
    cfg.validate().map_err(RunFailure::config)?;
    let dir = output_dir(cfg, output);
    let source = cfg.load_source(&cfg.source).map_err(RunFailure::config)?;
    let exact = cfg
        .exact_solution
        .as_ref()
        .map(|s| cfg.load_source(s))
        .transpose()
        .map_err(RunFailure::config)?;

    let f = match cfg.sign_convention {
        SignConvention::MinusDelta => source,
        SignConvention::Delta => source.scale(-1.0),
    };
    let opts = SolveOptions {
        moment_policy: cfg.moment_policy,
        tol_moment: cfg.tol_moment,
        source_space: cfg.source_space.map(|s| (s.m, s.alpha)),
        cost_budget: cfg.cost_budget(),
    };
    let solved = match cfg.method {
        MethodConfig::PerMode => solver::solve_per_mode(&f, &opts),
        MethodConfig::GreenQuadrature => solver::solve_green_quadrature(&f, &opts),
        MethodConfig::Constructive { r } => solver::solve_constructive(&f, r, &opts),
    }
    .map_err(RunFailure::compute)?;

    let report = build_report(cfg, &f, &solved, exact.as_ref()).map_err(RunFailure::compute)?;
    write_outputs(&dir, &report, &solved.u, &f).map_err(RunFailure::compute)?;
    Ok(RunOutcome {
        output_dir: dir,
        report,
    })
}

#[derive(Serialize)]
struct SolveSummary<'a> {
    method: Method,
    moments: (f64, f64),
    tol_moment: f64,
    representative: &'a PolyElement,
    growth: Option<Growth>,
    projection: Option<Projection>,
    norm_ratio: Option<f64>,
    decay_class: DecayClass,
    max_abs: f64,
}

fn build_report(
    cfg: &ScenarioConfig,
    f: &StripField,
    s: &SolveReport,
    exact: Option<&StripField>,
) -> Result<Value> {
    let u = &s.u;
    let summary = SolveSummary {
        method: s.method,
        moments: s.moments,
        tol_moment: s.tol_moment,
        representative: &s.representative,
        growth: s.growth,
        projection: s.projection,
        norm_ratio: s.norm_ratio,
        decay_class: u.decay,
        max_abs: u.max_abs(),
    };

    let norms: Vec<Value> = cfg
        .weight_specs
        .iter()
        .map(|w| {
            let mut entry = serde_json::to_value(w).expect("plain struct");
            let result = match w.p {
                None => diagnostics::weighted_norm(u, &WeightSpec::new(w.m, w.alpha))
                    .map(|n| json!({"value": n.value, "tail_bound": n.tail_bound})),
                Some(p) => diagnostics::x_space_norm(u, w.m, w.alpha, p).map(|v| json!({"value": v})),
            };
            merge(&mut entry, outcome(result));
            entry
        })
        .collect();

    let checks: Vec<Value> = cfg
        .diagnostics
        .iter()
        .map(|d| {
            let mut entry = serde_json::to_value(d).expect("plain enum");
            entry = json!({ "check": entry });
            merge(&mut entry, outcome(run_diagnostic(d, u, f)));
            entry
        })
        .collect();

    let mut report = json!({
        "timestamp": timestamp(),
        "versions": {
            "strip_poisson": env!("CARGO_PKG_VERSION"),
            "report_format": 1,
        },
        "config": cfg,
        "grid": grid_summary(&cfg.grid),
        "solve": summary,
        "source_max_abs": f.max_abs(),
        "norms": norms,
        "diagnostics": checks,
    });
    if let Some(e) = exact {
        report["relative_error"] = json!(relative_error_modulo(u, e, 1));
    }
    Ok(report)
}

fn run_diagnostic(d: &DiagnosticConfig, u: &StripField, f: &StripField) -> Result<Value> {
    Ok(match *d {
        DiagnosticConfig::Moments => {
            let (m0, m1) = diagnostics::moments(f);
            json!({"m0": m0, "m1": m1})
        }
        DiagnosticConfig::Residual => json!({"value": diagnostics::residual(u, f)}),
        DiagnosticConfig::DecayFit { model, window } => {
            serde_json::to_value(diagnostics::decay_fit(u, model, window)?)?
        }
        DiagnosticConfig::FarField { window } => serde_json::to_value(diagnostics::far_field_fit(u, window)?)?,
        DiagnosticConfig::Poincare { alpha } => {
            let c = diagnostics::poincare_wirtinger_check(u, alpha)?;
            let mut v = serde_json::to_value(c)?;
            v["holds"] = json!(c.lhs <= c.rhs);
            v["holds_d1_only"] = json!(c.lhs <= c.d1_only);
            v
        }
        DiagnosticConfig::QuotientNorm { m, alpha, j } => {
            serde_json::to_value(diagnostics::quotient_norm(u, &WeightSpec::new(m, alpha), j)?)?
        }
    })
}

/// Norms and checks that cannot be evaluated for this solution (a growing
/// solution in a decaying weight, say) are reported, not fatal.
fn outcome(r: Result<Value>) -> Value {
    match r {
        Ok(v) => json!({ "result": v }),
        Err(e) => json!({ "error": e.code(), "message": e.to_string() }),
    }
}

fn merge(into: &mut Value, from: Value) {
    if let (Value::Object(a), Value::Object(b)) = (into, from) {
        a.extend(b);
    }
}

fn grid_summary(g: &StripGrid) -> Value {
    json!({"n1": g.n1, "L": g.half_width, "n2": g.n2, "h1": g.h1(), "h2": g.h2()})
}

fn timestamp() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

/// `y2`, `|û_k(y2)|` for `k = 0..n1/2`, `u(0.25, y2)`, `f(0.25, y2)`.
pub fn slices_csv(u: &StripField, f: &StripField) -> String {
    let g = u.grid;
    let modes = horizontal_transform(u);
    let quarter = g.n1 / 4;
    let top = (g.n1 / 2) as i64;
    let mut s = String::from("y2");
    for k in 0..=top {
        write!(s, ",mode_{k}").expect("string write");
    }
    s.push_str(",u_at_quarter,f_at_quarter\n");
    for j in 0..g.n2 {
        write!(s, "{:?}", g.y2(j)).expect("string write");
        for k in 0..=top {
            // the Nyquist mode is stored as −n1/2
            let stored = if k == top { -top } else { k };
            write!(s, ",{:?}", modes.mode(stored)[j].norm()).expect("string write");
        }
        writeln!(s, ",{:?},{:?}", u.values[[quarter, j]], f.values[[quarter, j]]).expect("string write");
    }
    s
}

fn write_outputs(dir: &Path, report: &Value, u: &StripField, f: &StripField) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    let mut text = serde_json::to_string_pretty(report)?;
    text.push('\n');
    std::fs::write(dir.join("report.json"), text)?;
    std::fs::write(dir.join("slices.csv"), slices_csv(u, f))?;
    u.write_table(&dir.join("solution.csv"))?;
    Ok(())
}
