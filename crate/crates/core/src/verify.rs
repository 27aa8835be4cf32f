//! Verification batteries behind `strip-poisson verify`.
//!
//! Each suite returns a list of [`Check`]s carrying the measured value, the
//! threshold and the verdict. Random samples come from seeded generators so
//! every run sees the same inputs.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;

use crate::diagnostics::{self, relative_error_modulo, DecayModel};
use crate::green::{self, GreenConvolution};
use crate::presets::{self, smooth_bump, Params};
use crate::solver::{
    constructive, solve_constructive, solve_green_quadrature, solve_per_mode, MomentPolicy,
    SolveOptions,
};
use crate::stripfield::{DecayClass, StripField, StripGrid};
use crate::weightspaces::{compute_q, monomial_in_space, WeightSpec};
use crate::{Error, Result};

/// Thresholds of the batteries.
pub mod tol {
    /// Series (20 terms) against the closed form of `G`.
    pub const SERIES_VS_CLOSED: f64 = 1e-12;
    /// `∫ G (−Δφ) = φ(0)` for smooth bumps.
    pub const DELTA_REPRODUCTION: f64 = 1e-4;
    /// Relative deviation of the fitted `∂²₂₂G` decay rate from `−2π`.
    pub const GREEN_DECAY_RATE: f64 = 0.01;
    pub const EVENNESS: f64 = 1e-14;
    /// Relative `L²` error of the manufactured solution on `(32, 8, 1025)`.
    pub const MANUFACTURED: f64 = 1e-6;
    /// Minimum error reduction when `n2` doubles.
    pub const MANUFACTURED_RATIO: f64 = 8.0;
    /// Errors below this level no longer count for the reduction ratio.
    pub const MANUFACTURED_FLOOR: f64 = 1e-10;
    /// Per-mode against Green quadrature, modulo `span{1, y₂}`.
    pub const METHOD_EQUIVALENCE: f64 = 1e-5;
    /// Relative deviation of the far-field slope from `−⟨f,1⟩/2`.
    pub const GROWTH_SLOPE: f64 = 0.02;
    /// Largest far-field slope accepted as constant.
    pub const FLAT_SLOPE: f64 = 1e-3;
    /// Allowed shortfall of the fitted decay rate relative to `−2π`.
    pub const DECAY_RATE_SLACK: f64 = 0.05;
    pub const JUMP_MEAN_CANCELLATION: f64 = 1e-6;
    /// Constructive pipeline against the per-mode solve, modulo constants.
    pub const CONSTRUCTIVE: f64 = 1e-4;
    /// Observed order of the one-sided jump extraction.
    pub const JUMP_ORDER: f64 = 3.5;
    /// Coefficients of a kernel element beyond `span{1, y₂}`.
    pub const KERNEL_RESIDUAL: f64 = 1e-10;
    /// Round-off allowance for exact discrete Laplacians of polynomials.
    pub const DISCRETE_POLY: f64 = 1e-9;
    pub const NORM_RATIO_SPREAD: f64 = 1e3;
    pub const NORM_RATIO_REFINEMENT: f64 = 0.05;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Relation {
    AtMost,
    AtLeast,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub measured: f64,
    pub threshold: f64,
    pub relation: Relation,
    pub passed: bool,
}

impl Check {
    pub fn at_most(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            threshold,
            relation: Relation::AtMost,
            passed: measured <= threshold,
        }
    }

    pub fn at_least(name: impl Into<String>, measured: f64, threshold: f64) -> Self {
        Check {
            name: name.into(),
            measured,
            threshold,
            relation: Relation::AtLeast,
            passed: measured >= threshold,
        }
    }

    fn failed(name: impl Into<String>, error: &Error) -> Self {
        Check {
            name: format!("{}: {error}", name.into()),
            measured: f64::NAN,
            threshold: f64::NAN,
            relation: Relation::AtMost,
            passed: false,
        }
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.passed { "PASS" } else { "FAIL" };
        let rel = match self.relation {
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        };
        write!(
            f,
            "{verdict} {}: measured {:.6e} (required {rel} {:.6e})",
            self.name, self.measured, self.threshold
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Table1,
    Green,
    Manufactured,
    SolverEquivalence,
    Dichotomy,
    Constructive,
    Inequalities,
    Kernel,
    NormRatio,
    All,
}

impl Suite {
    pub const EACH: [Suite; 9] = [
        Suite::Table1,
        Suite::Green,
        Suite::Manufactured,
        Suite::SolverEquivalence,
        Suite::Dichotomy,
        Suite::Constructive,
        Suite::Inequalities,
        Suite::Kernel,
        Suite::NormRatio,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Suite::Table1 => "table1",
            Suite::Green => "green",
            Suite::Manufactured => "manufactured",
            Suite::SolverEquivalence => "solver_equivalence",
            Suite::Dichotomy => "dichotomy",
            Suite::Constructive => "constructive",
            Suite::Inequalities => "inequalities",
            Suite::Kernel => "kernel",
            Suite::NormRatio => "norm_ratio",
            Suite::All => "all",
        }
    }
}

impl FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::EACH
            .into_iter()
            .chain([Suite::All])
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidArgument(format!("unknown suite `{s}`")))
    }
}

/// Runs one suite (or all of them), turning internal errors into failed
/// checks so that a summary is always produced.
pub fn run_suite(suite: Suite) -> Vec<Check> {
    let one = |s: Suite| -> Vec<Check> {
        let r = match s {
            Suite::Table1 => table1(),
            Suite::Green => green_identities(),
            Suite::Manufactured => manufactured(),
            Suite::SolverEquivalence => solver_equivalence(),
            Suite::Dichotomy => dichotomy(),
            Suite::Constructive => constructive_pipeline(),
            Suite::Inequalities => inequalities(),
            Suite::Kernel => kernel(),
            Suite::NormRatio => norm_ratio(),
            Suite::All => unreachable!("expanded below"),
        };
        r.unwrap_or_else(|e| vec![Check::failed(s.name(), &e)])
    };
    match suite {
        Suite::All => Suite::EACH.into_iter().flat_map(one).collect(),
        s => one(s),
    }
}

/// Polynomial classes of the reference table: rows `m = 0, 1, 2`, columns
/// `α ∈ [−5/2,−3/2), [−3/2,−1/2), [−1/2,1/2), [1/2,3/2)`; `−1` is `{0}`.
pub const POLY_CLASS_TABLE: [[i64; 4]; 3] = [[1, 0, -1, -1], [2, 1, 0, -1], [3, 2, 1, 0]];
pub const POLY_CLASS_LEFT_ENDS: [f64; 4] = [-2.5, -1.5, -0.5, 0.5];

/// Table cells against `compute_q` at interior points, and `compute_q`
/// against the integrability oracle at both ends and the middle.
pub fn table1() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for (m, row) in POLY_CLASS_TABLE.iter().enumerate() {
        for (&a, &expected) in POLY_CLASS_LEFT_ENDS.iter().zip(row) {
            let b = a + 1.0;
            let mut mismatches = 0usize;
            for alpha in [a + 0.125, a + 0.5, b - 0.125] {
                // every negative q denotes the zero space
                if compute_q(m as i64, alpha).max(-1) != expected {
                    mismatches += 1;
                }
            }
            for alpha in [a, a + 0.5, b] {
                let spec = WeightSpec::new(m as u32, alpha);
                let q = compute_q(m as i64, alpha);
                mismatches += (0..5u32)
                    .filter(|&d| monomial_in_space(&spec, d) != (d as i64 <= q))
                    .count();
            }
            checks.push(Check::at_most(
                format!("table1 m={m} alpha in [{a}, {b}): mismatches"),
                mismatches as f64,
                0.0,
            ));
        }
    }
    Ok(checks)
}

pub fn green_identities() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut series_err = 0.0f64;
    for _ in 0..1000 {
        let y1: f64 = rng.random();
        let y2: f64 = rng.random_range(0.25..4.0) * if rng.random::<bool>() { 1.0 } else { -1.0 };
        let s = green::green_series(y1, y2, 20)?;
        let c = green::green_closed(y1, y2)?.value;
        series_err = series_err.max((s - c).abs());
    }
    let mut checks = vec![Check::at_most(
        "green series (K=20) vs closed form, 1000 points",
        series_err,
        tol::SERIES_VS_CLOSED,
    )];

    let grid = StripGrid::new(256, 2.0, 1025)?;
    let conv = GreenConvolution::new(&grid);
    for radius in [0.2, 0.3, 0.4] {
        let mut p = Params::new();
        p.insert("radius".into(), radius);
        let f = presets::sample("bump_laplacian", &p, &grid)?;
        let v = conv.apply_at(&f, &[(0, grid.center())])[0];
        checks.push(Check::at_most(
            format!("green delta reproduction, bump radius {radius}"),
            (v - (-1.0f64).exp()).abs(),
            tol::DELTA_REPRODUCTION,
        ));
    }

    let grid = StripGrid::new(16, 8.0, 257)?;
    let d22 = StripField::from_fn(&grid, DecayClass::Schwartz, |y1, y2| {
        green::green_d22(y1, y2).unwrap_or(0.0)
    });
    let fit = diagnostics::decay_fit(&d22, DecayModel::Exp, (2.0, 6.0))?;
    checks.push(Check::at_most(
        "green d22 decay rate, relative deviation from -2pi",
        (fit.rate / (-2.0 * PI) - 1.0).abs(),
        tol::GREEN_DECAY_RATE,
    ));

    let mut even_err = 0.0f64;
    for _ in 0..1000 {
        let y1: f64 = rng.random();
        let y2: f64 = rng.random_range(-25.0..25.0);
        let g = green::green_closed(y1, y2)?.value;
        even_err = even_err
            .max((g - green::green_closed(-y1, y2)?.value).abs())
            .max((g - green::green_closed(y1, -y2)?.value).abs());
    }
    checks.push(Check::at_most("green evenness", even_err, tol::EVENNESS));
    Ok(checks)
}

pub fn manufactured() -> Result<Vec<Check>> {
    let mut errs = Vec::new();
    for n2 in [257, 513, 1025, 2049] {
        let grid = StripGrid::new(32, 8.0, n2)?;
        let f = presets::sample("manufactured", &Params::new(), &grid)?;
        let exact = presets::sample("gaussian_mode1", &Params::new(), &grid)?;
        let u = solve_per_mode(&f, &SolveOptions::default())?.u;
        errs.push((n2, relative_error_modulo(&u, &exact, 0)));
    }
    let at_1025 = errs.iter().find(|(n, _)| *n == 1025).expect("listed").1;
    let ratio = errs
        .windows(2)
        .filter(|w| w[1].1 > tol::MANUFACTURED_FLOOR)
        .map(|w| w[0].1 / w[1].1)
        .fold(f64::INFINITY, f64::min);
    Ok(vec![
        Check::at_most("manufactured relative L2 error at (32, 8, 1025)", at_1025, tol::MANUFACTURED),
        Check::at_least(
            "manufactured error reduction per n2 doubling (min)",
            ratio,
            tol::MANUFACTURED_RATIO,
        ),
    ])
}

pub fn solver_equivalence() -> Result<Vec<Check>> {
    let grid = StripGrid::new(16, 6.0, 385)?;
    let opts = SolveOptions::default();
    presets::ZERO_MOMENT
        .iter()
        .map(|name| {
            let f = presets::sample(name, &Params::new(), &grid)?;
            let a = solve_per_mode(&f, &opts)?;
            let b = solve_green_quadrature(&f, &opts)?;
            Ok(Check::at_most(
                format!("per-mode vs green quadrature, {name}"),
                relative_error_modulo(&b.u, &a.u, 1),
                tol::METHOD_EQUIVALENCE,
            ))
        })
        .collect()
}

pub fn dichotomy() -> Result<Vec<Check>> {
    let grid = StripGrid::new(16, 8.0, 1025)?;
    let opts = SolveOptions::with_policy(MomentPolicy::AllowGrowth);
    let solve = |name: &str| -> Result<_> {
        let f = presets::sample(name, &Params::new(), &grid)?;
        solve_per_mode(&f, &opts)
    };
    let window = (4.0, 7.0);

    let r = solve("moment_10")?;
    let fit = diagnostics::far_field_fit(&r.u, window)?;
    let target = -0.5 * r.moments.0;
    let dev = [fit.slope_above, fit.slope_below]
        .iter()
        .map(|s| ((s - target) / target).abs())
        .fold(0.0, f64::max);
    let mut checks = vec![Check::at_most(
        "dichotomy <f,1> != 0: slope deviation from -<f,1>/2",
        dev,
        tol::GROWTH_SLOPE,
    )];

    let r = solve("moment_01")?;
    let fit = diagnostics::far_field_fit(&r.u, window)?;
    checks.push(Check::at_most(
        "dichotomy <f,1> = 0 != <f,y2>: far-field slope",
        fit.slope_above.abs().max(fit.slope_below.abs()),
        tol::FLAT_SLOPE,
    ));

    let r = solve("moment_00")?;
    let fit = diagnostics::decay_fit(&r.raw(), DecayModel::Exp, (2.0, 4.0))?;
    checks.push(Check::at_most(
        "dichotomy zero moments: exponential decay rate",
        fit.rate,
        -2.0 * PI * (1.0 - tol::DECAY_RATE_SLACK),
    ));
    Ok(checks)
}

/// Largest error of `extract_jump ∘ jump_lift` against `−h` on one grid.
fn jump_roundtrip_error(n2: usize) -> Result<f64> {
    let grid = StripGrid::new(16, 6.0, n2)?;
    let r = 2.0;
    let y1s: Vec<f64> = (0..grid.n1).map(|i| grid.y1(i)).collect();
    let h_plus: Vec<f64> = y1s
        .iter()
        .map(|&y| 0.3 + (2.0 * PI * y).cos() - 0.5 * (4.0 * PI * y).sin())
        .collect();
    let h_minus: Vec<f64> = y1s.iter().map(|&y| -0.3 + 0.7 * (6.0 * PI * y).cos()).collect();
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    let jumps = constructive::JumpData {
        grid,
        r,
        hbar_plus: mean(&h_plus),
        hbar_minus: mean(&h_minus),
        h_plus: h_plus.clone(),
        h_minus: h_minus.clone(),
    };
    let w = constructive::jump_lift(&jumps);
    let back = constructive::extract_jump(&w, &w, r)?;
    let err = back
        .h_plus
        .iter()
        .zip(&h_plus)
        .chain(back.h_minus.iter().zip(&h_minus))
        .map(|(a, b)| (a + b).abs())
        .fold(0.0, f64::max);
    Ok(err)
}

pub fn constructive_pipeline() -> Result<Vec<Check>> {
    let grid = StripGrid::new(16, 10.0, 1281)?;
    let r = 2.0;
    let f = presets::sample("constructive_pair", &Params::new(), &grid)?;
    let opts = SolveOptions::with_policy(MomentPolicy::AllowGrowth);
    let parts = constructive::constructive_parts(&f, r)?;
    let a = solve_constructive(&f, r, &opts)?;
    let b = solve_per_mode(&f, &opts)?;
    let coarse = jump_roundtrip_error(769)?;
    let fine = jump_roundtrip_error(1537)?;
    Ok(vec![
        Check::at_most(
            "constructive mean jumps cancel: |hbar+ + hbar-|",
            (parts.jumps.hbar_plus + parts.jumps.hbar_minus).abs(),
            tol::JUMP_MEAN_CANCELLATION,
        ),
        Check::at_most(
            "constructive u0 + lift vs per-mode, modulo constants",
            relative_error_modulo(&a.u, &b.u, 0),
            tol::CONSTRUCTIVE,
        ),
        Check::at_least(
            "constructive jump recovery, observed order in h2",
            (coarse / fine).log2(),
            tol::JUMP_ORDER,
        ),
    ])
}

/// `n` samples of `ψ(t) Σ c_k cos(kπt)` for `t ∈ [0, 1]`, with a bump `ψ`
/// vanishing to all orders at both ends.
fn random_profile(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let coeffs: Vec<f64> = (0..6).map(|_| rng.sample(StandardNormal)).collect();
    (0..n)
        .map(|i| {
            let t = i as f64 / (n - 1) as f64;
            let series: f64 = coeffs
                .iter()
                .enumerate()
                .map(|(k, c)| c * (k as f64 * PI * t).cos())
                .sum();
            smooth_bump(2.0 * t - 1.0) * series
        })
        .collect()
}

/// Random band-limited fields: a few horizontal modes with Gaussian
/// profiles of random centre and width.
fn random_band_limited(rng: &mut ChaCha8Rng, grid: &StripGrid) -> StripField {
    let terms: Vec<(f64, f64, f64, f64, f64)> = (0..5)
        .map(|k| {
            (
                k as f64,
                rng.sample(StandardNormal),
                rng.sample(StandardNormal),
                rng.random_range(-2.0..2.0),
                rng.random_range(0.5..1.5),
            )
        })
        .collect();
    StripField::from_fn(grid, DecayClass::Schwartz, |y1, y2| {
        terms
            .iter()
            .map(|&(k, a, b, c, w)| {
                let phase = 2.0 * PI * k * y1;
                (a * phase.cos() + b * phase.sin()) * (-((y2 - c) / w).powi(2)).exp()
            })
            .sum()
    })
}

pub fn inequalities() -> Result<Vec<Check>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (r, span, n) = (2.0, 6.0, 1201);
    let step = span / (n - 1) as f64;
    let mut checks = Vec::new();
    for beta in [-2.0, 0.0, 1.0, -1.0] {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let f = random_profile(&mut rng, n);
            let h = diagnostics::hardy_check(&f, step, beta, r)?;
            worst = worst.max(h.lhs / h.rhs);
        }
        let label = if beta == -1.0 { "log form".to_string() } else { format!("beta={beta}") };
        checks.push(Check::at_most(
            format!("hardy {label}: max lhs/rhs over 100 samples"),
            worst,
            1.0,
        ));
    }
    let grid = StripGrid::new(16, 6.0, 385)?;
    for alpha in [-1.0, 0.0, 1.0] {
        let mut worst = 0.0f64;
        for _ in 0..100 {
            let u = random_band_limited(&mut rng, &grid);
            let c = diagnostics::poincare_wirtinger_check(&u, alpha)?;
            worst = worst.max(c.lhs / c.d1_only);
        }
        checks.push(Check::at_most(
            format!("poincare-wirtinger alpha={alpha}: max lhs/|d1 u| over 100 samples"),
            worst,
            1.0,
        ));
    }
    Ok(checks)
}

pub fn kernel() -> Result<Vec<Check>> {
    let grid = StripGrid::new(8, 6.0, 193)?;
    let opts = SolveOptions::with_policy(MomentPolicy::AllowGrowth);
    let raw = solve_per_mode(&StripField::zeros(&grid), &opts)?.raw();
    // least-squares affine fit of every column, then the largest misfit
    let ys = grid.y2_nodes();
    let misfit = (0..grid.n1)
        .map(|i| {
            let row: Vec<f64> = raw.values.row(i).to_vec();
            let (s, c, _) = diagnostics::line_fit(ys.as_slice().expect("contiguous"), &row);
            ys.iter()
                .zip(&row)
                .map(|(y, v)| (v - c - s * y).abs())
                .fold(0.0, f64::max)
        })
        .fold(0.0, f64::max);

    let interior = 2..grid.n2 - 2;
    let lap_err = |name: &str, target: f64| -> Result<f64> {
        let p = presets::sample(name, &Params::new(), &grid)?.laplacian();
        Ok(interior
            .clone()
            .flat_map(|j| p.values.column(j).to_vec())
            .map(|v| (v - target).abs())
            .fold(0.0, f64::max))
    };
    Ok(vec![
        Check::at_most("kernel: f=0 solution beyond span{1,y2}", misfit, tol::KERNEL_RESIDUAL),
        Check::at_most("kernel: discrete laplacian of y2 is 0", lap_err("linear", 0.0)?, tol::DISCRETE_POLY),
        Check::at_most(
            "kernel: discrete laplacian of y2^2 is 2 (not harmonic)",
            lap_err("quadratic", 2.0)?,
            tol::DISCRETE_POLY,
        ),
    ])
}

pub fn norm_ratio() -> Result<Vec<Check>> {
    let opts = SolveOptions {
        source_space: Some((0, 1.0)),
        ..SolveOptions::with_policy(MomentPolicy::AllowGrowth)
    };
    let ratios = |n2: usize| -> Result<Vec<f64>> {
        let grid = StripGrid::new(16, 8.0, n2)?;
        presets::SUITE
            .iter()
            .map(|name| {
                let f = presets::sample(name, &Params::new(), &grid)?;
                Ok(solve_per_mode(&f, &opts)?.norm_ratio.unwrap_or(f64::NAN))
            })
            .collect()
    };
    let coarse = ratios(513)?;
    let fine = ratios(1025)?;
    let max = fine.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let min = fine.iter().copied().fold(f64::INFINITY, f64::min);
    let spread = if fine.iter().all(|v| v.is_finite()) { max / min } else { f64::NAN };
    let change = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| ((b - a) / a).abs())
        .fold(0.0, |m: f64, v| if v.is_nan() { f64::NAN } else { m.max(v) });
    Ok(vec![
        Check::at_most("norm ratio spread max/min over the preset suite", spread, tol::NORM_RATIO_SPREAD),
        Check::at_most(
            "norm ratio change under n2 doubling (max relative)",
            change,
            tol::NORM_RATIO_REFINEMENT,
        ),
    ])
}
