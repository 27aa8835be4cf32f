//! JSON scenario files for the `run` command.
//!
//! Every key is checked: unknown keys are rejected by the parser and the
//! remaining values are validated against the preconditions of the
//! operations they feed before any solve starts.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::diagnostics::DecayModel;
use crate::presets::{self, Params};
use crate::solver::{MomentPolicy, DEFAULT_COST_BUDGET};
use crate::stripfield::{DecayClass, StripField, StripGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub grid: StripGrid,
    pub source: SourceConfig,
    #[serde(default)]
    pub sign_convention: SignConvention,
    #[serde(default)]
    pub method: MethodConfig,
    #[serde(default)]
    pub moment_policy: MomentPolicy,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tol_moment: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cost_budget: Option<usize>,
    /// `(m, α)` of the source space used for the solver's norm ratio.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub source_space: Option<SpaceConfig>,
    #[serde(default)]
    pub weight_specs: Vec<WeightSpecConfig>,
    #[serde(default)]
    pub diagnostics: Vec<DiagnosticConfig>,
    /// Reference solution; its relative error modulo `span{1, y₂}` is reported.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_solution: Option<SourceConfig>,
    #[serde(default = "default_output")]
    pub output: PathBuf,
}

fn default_output() -> PathBuf {
    PathBuf::from("output")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum SourceConfig {
    Preset {
        name: String,
        #[serde(default)]
        params: Params,
    },
    /// A `y1_index,y2_index,value` table on the scenario grid.
    Table {
        path: PathBuf,
        #[serde(default = "default_table_decay")]
        decay: DecayClass,
    },
}

fn default_table_decay() -> DecayClass {
    DecayClass::Schwartz
}

/// `minus_delta` reads the source as `−Δu = f`; `delta` as `Δu = f`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SignConvention {
    #[default]
    MinusDelta,
    Delta,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum MethodConfig {
    #[default]
    PerMode,
    GreenQuadrature,
    Constructive {
        #[serde(rename = "R")]
        r: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceConfig {
    pub m: u32,
    pub alpha: f64,
}

/// A norm of the solution to report: `H^m_α` when `p` is absent, the
/// X-space `X^{m+p}_{α+p}` with base exponent `α = ±1/2` otherwise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WeightSpecConfig {
    pub m: u32,
    pub alpha: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u32>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum DiagnosticConfig {
    /// Moments `⟨f,1⟩`, `⟨f,y₂⟩` of the source.
    Moments,
    /// Relative discrete residual of `−Δu = f`.
    Residual,
    DecayFit { model: DecayModel, window: (f64, f64) },
    FarField { window: (f64, f64) },
    Poincare { alpha: f64 },
    QuotientNorm { m: u32, alpha: f64, j: i64 },
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))
    }

    /// Reads and parses; relative paths inside the file are resolved
    /// against the directory that contains it.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let mut cfg = Self::from_json(&text)?;
        let base = path.parent().unwrap_or_else(|| Path::new(""));
        cfg.resolve_paths(base);
        Ok(cfg)
    }

    fn resolve_paths(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for src in [Some(&mut self.source), self.exact_solution.as_mut()].into_iter().flatten() {
            if let SourceConfig::Table { path, .. } = src {
                fix(path);
            }
        }
        fix(&mut self.output);
    }

    pub fn cost_budget(&self) -> usize {
        self.cost_budget.unwrap_or(DEFAULT_COST_BUDGET)
    }

    /// Checks every precondition that can be decided from the file alone.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        let grid = self.grid.validated().map_err(|e| Error::Config(e.to_string()))?;
        let l = grid.half_width;
        for src in [Some(&self.source), self.exact_solution.as_ref()].into_iter().flatten() {
            if let SourceConfig::Preset { name, params } = src {
                presets::lookup(name, params).map_err(|e| Error::Config(e.to_string()))?;
            }
        }
        if let Some(t) = self.tol_moment {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("tol_moment = {t} must be positive"));
            }
        }
        if let MethodConfig::Constructive { r } = self.method {
            if self.moment_policy == MomentPolicy::Project {
                return bad("the constructive method does not support moment_policy = project".into());
            }
            if !(r > 0.0 && grid.node_index(r).is_some()) {
                return bad(format!("constructive R = {r} must be a positive grid node"));
            }
        }
        if let Some(s) = self.source_space {
            if s.m > 0 {
                return bad(format!("source_space m = {} unsupported: solutions carry two more derivatives and at most two are available", s.m));
            }
        }
        for w in &self.weight_specs {
            match w.p {
                None if w.m > 2 => return bad(format!("weight spec m = {} exceeds 2", w.m)),
                Some(p) if w.m + p > 2 => {
                    return bad(format!("X-space order m + p = {} exceeds 2", w.m + p))
                }
                Some(_) if (w.alpha.abs() - 0.5).abs() > 1e-12 => {
                    return bad(format!("X-space base exponent {} must be ±1/2", w.alpha))
                }
                _ => {}
            }
        }
        let check_window = |(a, b): (f64, f64)| {
            if 0.0 <= a && a < b && b <= l {
                Ok(())
            } else {
                bad(format!("window ({a}, {b}) must satisfy 0 ≤ a < b ≤ L = {l}"))
            }
        };
        for d in &self.diagnostics {
            match *d {
                DiagnosticConfig::DecayFit { window, .. } | DiagnosticConfig::FarField { window } => {
                    check_window(window)?
                }
                DiagnosticConfig::QuotientNorm { m, .. } if m > 2 => {
                    return bad(format!("quotient norm m = {m} exceeds 2"))
                }
                _ => {}
            }
        }
        Ok(())
    }

    /// The source as written in the file, before the sign convention.
    pub fn load_source(&self, src: &SourceConfig) -> Result<StripField> {
        match src {
            SourceConfig::Preset { name, params } => presets::sample(name, params, &self.grid),
            SourceConfig::Table { path, decay } => StripField::read_table(&self.grid, path, *decay),
        }
    }
}
