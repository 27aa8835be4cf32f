//! Solvers for `−Δu = f` on the strip.
//!
//! [`solve_per_mode`] transforms horizontally and convolves every mode with
//! its vertical kernel; [`solve_green_quadrature`] convolves with the closed
//! form of `G` directly; [`constructive`] assembles a solution from two
//! half-strip Dirichlet problems and a jump lift. All three share the
//! treatment of the mean mode, whose compatibility conditions are the
//! moments `⟨f, 1⟩` and `⟨f, y₂⟩`.

pub mod constructive;
pub(crate) mod recursive;

pub use constructive::solve_constructive;

use std::f64::consts::PI;

use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::diagnostics;
use crate::green::GreenConvolution;
use crate::mft::{horizontal_inverse, horizontal_transform};
use crate::stripfield::{DecayClass, StripField};
use crate::weightspaces::{PolyElement, WeightFunction, WeightSpec};
use crate::{Error, Result};

/// Largest `n1·n2` accepted by the quadrature route unless overridden.
pub const DEFAULT_COST_BUDGET: usize = 50_000;

/// Relative factor of the default moment tolerance, applied to `‖f‖_{L²₁}`.
pub const DEFAULT_TOL_FACTOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MomentPolicy {
    /// Reject sources whose moments exceed the tolerance.
    #[default]
    RequireOrthogonal,
    /// Remove `(c₀ + c₁y₂)e^{−y₂²}` so that both moments vanish.
    Project,
    /// Keep the moments and report the resulting far-field growth.
    AllowGrowth,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    PerMode,
    GreenQuadrature,
    Constructive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolveOptions {
    pub moment_policy: MomentPolicy,
    /// Absolute moment tolerance; `None` selects `1e-8·‖f‖_{L²₁}`.
    pub tol_moment: Option<f64>,
    /// `(m, α)` of the source space used for the reported norm ratio.
    pub source_space: Option<(u32, f64)>,
    pub cost_budget: usize,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            moment_policy: MomentPolicy::RequireOrthogonal,
            tol_moment: None,
            source_space: Some((0, 1.0)),
            cost_budget: DEFAULT_COST_BUDGET,
        }
    }
}

impl SolveOptions {
    pub fn with_policy(policy: MomentPolicy) -> Self {
        SolveOptions {
            moment_policy: policy,
            ..Default::default()
        }
    }
}

/// Far-field behaviour `u ≈ slope·|y₂| + step·sgn(y₂)` of the mean mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Growth {
    pub slope: f64,
    pub step: f64,
}

/// Coefficients of the removed `(c₀ + c₁y₂)e^{−y₂²}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Projection {
    pub c0: f64,
    pub c1: f64,
}

#[derive(Debug, Clone)]
pub struct SolveReport {
    /// Normalized solution: its horizontal mean vanishes on `y₂ = 0`.
    pub u: StripField,
    pub method: Method,
    /// `(⟨f, 1⟩, ⟨f, y₂⟩)` of the input source.
    pub moments: (f64, f64),
    pub tol_moment: f64,
    /// Polynomial removed by the normalization.
    pub representative: PolyElement,
    pub growth: Option<Growth>,
    pub projection: Option<Projection>,
    pub norm_ratio: Option<f64>,
}

impl SolveReport {
    /// The solution before normalization.
    pub fn raw(&self) -> StripField {
        self.u
            .add(&self.representative.sample(&self.u.grid))
            .with_decay(self.u.decay)
    }
}

/// Source after the moment policy, with what the policy recorded.
pub(crate) struct Prepared {
    pub f: StripField,
    pub moments: (f64, f64),
    pub tol: f64,
    pub growth: Option<Growth>,
    pub projection: Option<Projection>,
}

pub(crate) fn check_decay(f: &StripField) -> Result<()> {
    match f.decay {
        DecayClass::Schwartz => Ok(()),
        DecayClass::Poly(a) if a < -2.0 => Ok(()),
        other => Err(Error::UndeclaredGrowth(format!(
            "source with decay {other:?} has no finite first moment"
        ))),
    }
}

/// `1e-8·‖f‖_{L²₁}`, falling back to the sup norm when the weighted norm
/// is not available for the declared decay.
pub fn default_tolerance(f: &StripField) -> f64 {
    let n = f
        .product(f)
        .integrate(&WeightFunction::power(2.0))
        .map(|i| i.value.max(0.0).sqrt())
        .unwrap_or_else(|_| f.max_abs());
    DEFAULT_TOL_FACTOR * n
}

pub(crate) fn prepare(f: &StripField, opts: &SolveOptions) -> Result<Prepared> {
    check_decay(f)?;
    let (m0, m1) = diagnostics::moments(f);
    let tol = opts.tol_moment.unwrap_or_else(|| default_tolerance(f));
    let mut out = Prepared {
        f: f.clone(),
        moments: (m0, m1),
        tol,
        growth: None,
        projection: None,
    };
    match opts.moment_policy {
        MomentPolicy::RequireOrthogonal => {
            if m0.abs() > tol || m1.abs() > tol {
                return Err(Error::MomentViolation { m0, m1, tol });
            }
        }
        MomentPolicy::Project => {
            let g = &f.grid;
            let h = g.h2();
            let ys = g.y2_nodes();
            let col = |p: &dyn Fn(f64) -> f64| -> Vec<f64> { ys.iter().map(|&y| p(y)).collect() };
            let g0 = |y: f64| (-y * y).exp();
            let a00 = recursive::total(&col(&g0), h);
            let a01 = recursive::total(&col(&|y| y * g0(y)), h);
            let a11 = recursive::total(&col(&|y| y * y * g0(y)), h);
            let det = a00 * a11 - a01 * a01;
            let c0 = (m0 * a11 - m1 * a01) / det;
            let c1 = (m1 * a00 - m0 * a01) / det;
            out.f = f
                .sub(&StripField::from_fn(g, DecayClass::Schwartz, |_, y| (c0 + c1 * y) * g0(y)))
                .with_decay(f.decay);
            out.projection = Some(Projection { c0, c1 });
        }
        MomentPolicy::AllowGrowth => {
            out.growth = Some(Growth {
                slope: -0.5 * m0,
                step: 0.5 * m1,
            });
        }
    }
    Ok(out)
}

/// `−(1/2)∫|t − s| f̄(s) ds` at every node.
fn mean_mode(fbar: &[f64], ys: &[f64], h: f64) -> Vec<f64> {
    let s = recursive::Sweeps::new(0.0, h);
    let a = s.forward(fbar);
    let b = s.backward(fbar);
    let yf: Vec<f64> = fbar.iter().zip(ys).map(|(v, y)| v * y).collect();
    let ma = s.forward(&yf);
    let mb = s.backward(&yf);
    (0..fbar.len())
        .map(|j| -0.5 * (ys[j] * (a[j] - b[j]) - ma[j] + mb[j]))
        .collect()
}

/// Subtracts the mean over the line `y₂ = 0` and records it.
pub(crate) fn normalize(mut u: StripField) -> (StripField, PolyElement) {
    let c = u.values.column(u.grid.center()).mean().expect("n1 >= 4");
    u.values.mapv_inplace(|v| v - c);
    (u, PolyElement::new(vec![c]))
}

fn solution_class(p: &Prepared) -> DecayClass {
    let (m0, m1) = if p.projection.is_some() { (0.0, 0.0) } else { p.moments };
    match p.growth {
        Some(_) if m0.abs() > p.tol => DecayClass::PolyPlusLinear,
        _ if m1.abs() > p.tol => DecayClass::Poly(0.0),
        _ => DecayClass::Schwartz,
    }
}

/// `‖u‖_{H^{m+2}_α / P′} / ‖f‖_{H^m_α}` for the configured source space.
fn norm_ratio(u: &StripField, f: &StripField, opts: &SolveOptions) -> Option<f64> {
    let (m, alpha) = opts.source_space?;
    let target = WeightSpec::new(m + 2, alpha);
    let num = diagnostics::quotient_norm(u, &target, target.q_poly.min(1)).ok()?;
    let den = diagnostics::weighted_norm(f, &WeightSpec::new(m, alpha)).ok()?;
    (den.value > 0.0).then(|| num.value / den.value)
}

pub(crate) fn finish(
    u: StripField,
    method: Method,
    f: &StripField,
    prepared: Prepared,
    opts: &SolveOptions,
) -> SolveReport {
    let class = solution_class(&prepared);
    let (u, representative) = normalize(u.with_decay(class));
    let norm_ratio = norm_ratio(&u, f, opts);
    SolveReport {
        u,
        method,
        moments: prepared.moments,
        tol_moment: prepared.tol,
        representative,
        growth: prepared.growth,
        projection: prepared.projection,
        norm_ratio,
    }
}

/// Horizontal transform, per-mode exponential convolution for `k ≠ 0`,
/// and `−|t|/2` for the mean mode.
pub fn solve_per_mode(f: &StripField, opts: &SolveOptions) -> Result<SolveReport> {
    let prepared = prepare(f, opts)?;
    let u = per_mode_field(&prepared.f)?;
    Ok(finish(u, Method::PerMode, f, prepared, opts))
}

pub(crate) fn per_mode_field(f: &StripField) -> Result<StripField> {
    let g = f.grid;
    let h = g.h2();
    let mut modes = horizontal_transform(f);
    let rows: Vec<(usize, Vec<Complex64>)> = (1..g.n1)
        .into_par_iter()
        .map(|r| {
            let k = modes.wavenumber(r);
            let a = 2.0 * PI * k.unsigned_abs() as f64;
            let data = modes.modes.row(r).to_vec();
            (r, recursive::exp_convolve(&data, a, h))
        })
        .collect();
    for (r, row) in rows {
        for (j, z) in row.into_iter().enumerate() {
            modes.modes[[r, j]] = z;
        }
    }
    let ys = g.y2_nodes().to_vec();
    let fbar: Vec<f64> = modes.modes.row(0).iter().map(|z| z.re).collect();
    for (j, v) in mean_mode(&fbar, &ys, h).into_iter().enumerate() {
        modes.modes[[0, j]] = Complex64::new(v, 0.0);
    }
    horizontal_inverse(&modes)
}

/// Direct corrected-trapezoid quadrature of `∫ G(x − y) f(y) dy`; cost is
/// quadratic in the number of grid points.
pub fn solve_green_quadrature(f: &StripField, opts: &SolveOptions) -> Result<SolveReport> {
    let points = f.grid.points();
    if points > opts.cost_budget {
        return Err(Error::CostBudget {
            points,
            budget: opts.cost_budget,
        });
    }
    let prepared = prepare(f, opts)?;
    let u = GreenConvolution::new(&f.grid).apply(&prepared.f);
    Ok(finish(u, Method::GreenQuadrature, f, prepared, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::relative_error_modulo;
    use crate::presets::{sample, Params};
    use crate::stripfield::StripGrid;
    use approx::assert_abs_diff_eq;

    fn solve(name: &str, grid: &StripGrid, policy: MomentPolicy) -> Result<SolveReport> {
        let f = sample(name, &Params::new(), grid).unwrap();
        solve_per_mode(&f, &SolveOptions::with_policy(policy))
    }

    #[test]
    fn manufactured_solution() {
        let grid = StripGrid::new(32, 8.0, 1025).unwrap();
        let r = solve("manufactured", &grid, MomentPolicy::RequireOrthogonal).unwrap();
        let exact = sample("gaussian_mode1", &Params::new(), &grid).unwrap();
        let e = relative_error_modulo(&r.u, &exact, 0);
        assert!(e <= 1e-6, "relative error {e}");
    }

    #[test]
    fn zero_source_gives_zero() {
        let grid = StripGrid::new(8, 4.0, 65).unwrap();
        let r = solve("zero", &grid, MomentPolicy::RequireOrthogonal).unwrap();
        assert_eq!(r.u.max_abs(), 0.0);
        assert_eq!(r.representative, PolyElement::new(vec![0.0]));
        let r = solve("zero", &grid, MomentPolicy::AllowGrowth).unwrap();
        assert_eq!(r.u.max_abs(), 0.0);
    }

    #[test]
    fn mean_mode_only_source() {
        let grid = StripGrid::new(8, 8.0, 1025).unwrap();
        let r = solve("hermite_mean", &grid, MomentPolicy::RequireOrthogonal).unwrap();
        let exact = StripField::from_fn(&grid, DecayClass::Schwartz, |_, y| (-y * y).exp());
        assert!(relative_error_modulo(&r.u, &exact, 1) <= 1e-6);
        assert_eq!(r.u.decay, DecayClass::Schwartz);
    }

    #[test]
    fn moment_policies() {
        let grid = StripGrid::new(8, 8.0, 513).unwrap();
        let e = solve("gaussian_mean", &grid, MomentPolicy::RequireOrthogonal).unwrap_err();
        match e {
            Error::MomentViolation { m0, .. } => assert_abs_diff_eq!(m0, 1.0, epsilon = 1e-10),
            other => panic!("unexpected {other:?}"),
        }
        let r = solve("moment_01", &grid, MomentPolicy::Project).unwrap();
        let p = r.projection.unwrap();
        assert_abs_diff_eq!(p.c0, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(p.c1, 2.0 / PI.sqrt(), epsilon = 1e-10);
        assert_eq!(r.u.decay, DecayClass::Schwartz);
        let r = solve("gaussian_mean", &grid, MomentPolicy::AllowGrowth).unwrap();
        let gr = r.growth.unwrap();
        assert_abs_diff_eq!(gr.slope, -0.5, epsilon = 1e-10);
        assert_eq!(r.u.decay, DecayClass::PolyPlusLinear);
        // exact far field of the mean mode: −|y|/2 up to a constant
        let fit = diagnostics::far_field_fit(&r.u, (4.0, 7.0)).unwrap();
        assert_abs_diff_eq!(fit.slope_above, -0.5, epsilon = 1e-8);
        assert_abs_diff_eq!(fit.slope_below, -0.5, epsilon = 1e-8);
    }

    #[test]
    fn undeclared_growth_is_rejected() {
        let grid = StripGrid::new(8, 4.0, 65).unwrap();
        let f = StripField::from_fn(&grid, DecayClass::Poly(-1.5), |_, y| (1.0 + y * y).powf(-0.75));
        assert!(matches!(
            solve_per_mode(&f, &SolveOptions::default()),
            Err(Error::UndeclaredGrowth(_))
        ));
    }

    #[test]
    fn normalization_and_raw() {
        let grid = StripGrid::new(16, 6.0, 385).unwrap();
        let r = solve("mixed_suite", &grid, MomentPolicy::AllowGrowth).unwrap();
        let c = grid.center();
        assert_abs_diff_eq!(r.u.values.column(c).mean().unwrap(), 0.0, epsilon = 1e-15);
        let raw = r.raw();
        assert_abs_diff_eq!(
            raw.values[[3, c]] - r.u.values[[3, c]],
            r.representative.coeffs[0],
            epsilon = 1e-15
        );
    }

    #[test]
    fn quadrature_matches_per_mode() {
        let grid = StripGrid::new(16, 6.0, 385).unwrap();
        let f = sample("manufactured", &Params::new(), &grid).unwrap();
        let opts = SolveOptions::default();
        let a = solve_per_mode(&f, &opts).unwrap();
        let b = solve_green_quadrature(&f, &opts).unwrap();
        let e = relative_error_modulo(&b.u, &a.u, 1);
        assert!(e <= 1e-5, "relative difference {e}");
    }

    #[test]
    fn quadrature_cost_guard() {
        let grid = StripGrid::new(64, 6.0, 1025).unwrap();
        let f = StripField::zeros(&grid);
        assert!(matches!(
            solve_green_quadrature(&f, &SolveOptions::default()),
            Err(Error::CostBudget { .. })
        ));
    }
}
