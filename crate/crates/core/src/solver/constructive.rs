//! Solution by pieces: Dirichlet problems on the two half-strips
//! `±y₂ > R`, zero in between, and a lift of the resulting jumps of `∂₂u`
//! across `y₂ = ±R`.

use std::f64::consts::PI;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;
use serde::{Deserialize, Serialize};

use super::{finish, prepare, recursive, Method, MomentPolicy, SolveOptions, SolveReport};
use crate::green::mode_kernel;
use crate::mft::{horizontal_inverse, horizontal_transform};
use crate::stripfield::{ModeField, StripField, StripGrid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Above,
    Below,
}

/// Nodes needed on each side of an interface by the one-sided stencils.
const STENCIL_REACH: usize = 4;

/// Node indices of `+R` and `−R`.
fn interface_nodes(grid: &StripGrid, r: f64) -> Result<(usize, usize)> {
    if r <= 0.0 {
        return Err(Error::InvalidArgument(format!("R = {r} must be positive")));
    }
    let (Some(jp), Some(jm)) = (grid.node_index(r), grid.node_index(-r)) else {
        return Err(Error::InvalidArgument(format!(
            "R = {r} is not a grid node (h2 = {})",
            grid.h2()
        )));
    };
    if jp + STENCIL_REACH >= grid.n2 || jm < STENCIL_REACH {
        return Err(Error::InvalidArgument(format!(
            "fewer than {STENCIL_REACH} nodes between R = {r} and the end of the grid"
        )));
    }
    Ok((jp, jm))
}

/// Mode `k ≠ 0` on the half-line `t ≥ 0` with `û(0) = 0` and decay:
/// kernel `(e^{−a|t−s|} − e^{−a(t+s)})/(2a)`.
fn half_line_mode(f: &[Complex64], a: f64, h: f64) -> Vec<Complex64> {
    let s = recursive::Sweeps::new(a, h);
    let p = s.forward(f);
    let q = s.backward(f);
    let q0 = q[0];
    (0..f.len())
        .map(|j| (p[j] + q[j] - q0 * (-a * j as f64 * h).exp()) / (2.0 * a))
        .collect()
}

/// Mean mode on `t ≥ 0` with `ū(0) = 0` and `ū′ → 0`: kernel `min(t, s)`.
fn half_line_mean(f: &[f64], h: f64) -> Vec<f64> {
    let s = recursive::Sweeps::new(0.0, h);
    let tf: Vec<f64> = f.iter().enumerate().map(|(j, v)| v * j as f64 * h).collect();
    let c = s.forward(&tf);
    let b = s.backward(f);
    (0..f.len()).map(|j| c[j] + j as f64 * h * b[j]).collect()
}

/// Solves `−Δu = f` for `±y₂ > R` with `u = 0` on `y₂ = ±R`, decaying
/// derivatives at infinity; zero on the rest of the grid.
pub fn solve_half_strip_dirichlet(f: &StripField, r: f64, side: Side) -> Result<StripField> {
    super::check_decay(f)?;
    let g = f.grid;
    let (jp, jm) = interface_nodes(&g, r)?;
    let h = g.h2();
    let nodes: Vec<usize> = match side {
        Side::Above => (jp..g.n2).collect(),
        Side::Below => (0..=jm).rev().collect(),
    };
    let fm = horizontal_transform(f);
    let mut out = ModeField::zeros(&g);
    for row in 0..g.n1 {
        let k = fm.wavenumber(row);
        if k == 0 {
            let data: Vec<f64> = nodes.iter().map(|&j| fm.modes[[0, j]].re).collect();
            for (&j, v) in nodes.iter().zip(half_line_mean(&data, h)) {
                out.modes[[0, j]] = Complex64::new(v, 0.0);
            }
        } else {
            let a = 2.0 * PI * k.unsigned_abs() as f64;
            let data: Vec<Complex64> = nodes.iter().map(|&j| fm.modes[[row, j]]).collect();
            for (&j, v) in nodes.iter().zip(half_line_mode(&data, a, h)) {
                out.modes[[row, j]] = v;
            }
        }
    }
    horizontal_inverse(&out)
}

/// Jumps `[∂₂u] = ∂₂u(R⁺) − ∂₂u(R⁻)` across `y₂ = ±R`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JumpData {
    #[serde(skip)]
    pub grid: StripGrid,
    #[serde(rename = "R")]
    pub r: f64,
    pub h_plus: Vec<f64>,
    pub h_minus: Vec<f64>,
    pub hbar_plus: f64,
    pub hbar_minus: f64,
}

fn forward_derivative(u: &StripField, i: usize, j: usize) -> f64 {
    let v = |o: usize| u.values[[i, j + o]];
    (-25.0 * v(0) + 48.0 * v(1) - 36.0 * v(2) + 16.0 * v(3) - 3.0 * v(4)) / (12.0 * u.grid.h2())
}

fn backward_derivative(u: &StripField, i: usize, j: usize) -> f64 {
    let v = |o: usize| u.values[[i, j - o]];
    (25.0 * v(0) - 48.0 * v(1) + 36.0 * v(2) - 16.0 * v(3) + 3.0 * v(4)) / (12.0 * u.grid.h2())
}

/// One-sided fourth-order derivatives: `u_above` supplies the limit from
/// above at each interface and `u_below` the limit from below.
pub fn extract_jump(u_above: &StripField, u_below: &StripField, r: f64) -> Result<JumpData> {
    let g = u_above.grid;
    if u_below.grid != g {
        return Err(Error::ShapeMismatch("fields live on different grids".into()));
    }
    let (jp, jm) = interface_nodes(&g, r)?;
    if jp < STENCIL_REACH || jm + STENCIL_REACH >= g.n2 {
        return Err(Error::InvalidArgument(
            "interfaces need four nodes on both sides".into(),
        ));
    }
    let jump = |j: usize| -> Vec<f64> {
        (0..g.n1)
            .map(|i| forward_derivative(u_above, i, j) - backward_derivative(u_below, i, j))
            .collect()
    };
    let h_plus = jump(jp);
    let h_minus = jump(jm);
    let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
    Ok(JumpData {
        grid: g,
        r,
        hbar_plus: mean(&h_plus),
        hbar_minus: mean(&h_minus),
        h_plus,
        h_minus,
    })
}

fn coefficients(h: &[f64]) -> Vec<Complex64> {
    let n = h.len();
    let mut buf: Vec<Complex64> = h.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::<f64>::new().plan_fft_forward(n).process(&mut buf);
    buf.iter().map(|z| z / n as f64).collect()
}

/// `w = G * (h₊ δ_{y₂=R} + h₋ δ_{y₂=−R})`, whose `∂₂w` jumps by `−h±`.
pub fn jump_lift(jumps: &JumpData) -> StripField {
    let g = jumps.grid;
    let r = jumps.r;
    let cp = coefficients(&jumps.h_plus);
    let cm = coefficients(&jumps.h_minus);
    let mut w = ModeField::zeros(&g);
    for row in 0..g.n1 {
        let k = w.wavenumber(row);
        for j in 0..g.n2 {
            let y = g.y2(j);
            w.modes[[row, j]] = if k == 0 {
                let v = -0.5 * (jumps.hbar_plus * (y - r).abs() + jumps.hbar_minus * (y + r).abs());
                Complex64::new(v, 0.0)
            } else {
                let kp = mode_kernel(k, y - r).expect("k != 0");
                let km = mode_kernel(k, y + r).expect("k != 0");
                cp[row] * kp + cm[row] * km
            };
        }
    }
    crate::mft::inverse_unchecked(&w)
}

/// Intermediate fields of the constructive solve.
#[derive(Debug, Clone)]
pub struct ConstructiveParts {
    /// Half-strip solutions joined by zero on `|y₂| < R`.
    pub u0: StripField,
    pub jumps: JumpData,
    pub w: StripField,
}

pub fn constructive_parts(f: &StripField, r: f64) -> Result<ConstructiveParts> {
    let g = f.grid;
    let (jp, jm) = interface_nodes(&g, r)?;
    let scale = f.max_abs();
    let inside = (jm + 1..jp)
        .flat_map(|j| f.values.column(j).to_vec())
        .fold(0.0f64, |m, v| m.max(v.abs()));
    if inside > 1e-12 * scale {
        return Err(Error::InvalidArgument(format!(
            "source must vanish for |y2| < R, found {inside:e}"
        )));
    }
    let above = solve_half_strip_dirichlet(f, r, Side::Above)?;
    let below = solve_half_strip_dirichlet(f, r, Side::Below)?;
    let u0 = above.add(&below).with_decay(f.decay);
    let jumps = extract_jump(&u0, &u0, r)?;
    let w = jump_lift(&jumps);
    Ok(ConstructiveParts { u0, jumps, w })
}

/// `u = u₀ + w`, normalized as in the other routes.
pub fn solve_constructive(f: &StripField, r: f64, opts: &SolveOptions) -> Result<SolveReport> {
    if opts.moment_policy == MomentPolicy::Project {
        return Err(Error::InvalidArgument(
            "projection adds mass inside |y2| < R; use require_orthogonal or allow_growth".into(),
        ));
    }
    let prepared = prepare(f, opts)?;
    let parts = constructive_parts(&prepared.f, r)?;
    let u = parts.u0.add(&parts.w);
    Ok(finish(u, Method::Constructive, f, prepared, opts))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::diagnostics::relative_error_modulo;
    use crate::presets::{sample, Params};
    use crate::solver::solve_per_mode;
    use crate::stripfield::DecayClass;
    use approx::assert_abs_diff_eq;

    #[test]
    fn half_strip_mean_mode_oracle() {
        let grid = StripGrid::new(8, 12.0, 1537).unwrap();
        let r = 2.0;
        let c = r + 2.0;
        let f = StripField::from_fn(&grid, DecayClass::Schwartz, |_, y| {
            let t = y - c;
            (2.0 - 4.0 * t * t) * (-t * t).exp()
        });
        let u = solve_half_strip_dirichlet(&f, r, Side::Above).unwrap();
        // e^{−(y−c)²} shifted to vanish at R; bounded at infinity
        let shift = (-(r - c) * (r - c)).exp();
        let mut err: f64 = 0.0;
        for j in grid.node_index(r).unwrap()..grid.n2 {
            let y = grid.y2(j);
            err = err.max((u.values[[0, j]] - ((-(y - c) * (y - c)).exp() - shift)).abs());
        }
        assert!(err <= 1e-6, "max error {err}");
        let jr = grid.node_index(r).unwrap();
        assert!(u.values.column(jr).iter().all(|v| v.abs() < 1e-15));
        assert!(u.values.column(jr - 3).iter().all(|&v| v == 0.0));
    }

    #[test]
    fn half_strip_vanishes_at_interface() {
        let grid = StripGrid::new(8, 6.0, 385).unwrap();
        let r = 1.0;
        let jr = grid.node_index(r).unwrap();
        let mut f = StripField::zeros(&grid);
        let js = grid.node_index(r + 1.0).unwrap();
        for i in 0..grid.n1 {
            f.values[[i, js]] = (2.0 * PI * grid.y1(i)).cos() / grid.h2();
        }
        let u = solve_half_strip_dirichlet(&f, r, Side::Above).unwrap();
        assert!(u.values.column(jr).iter().all(|v| v.abs() < 1e-14));
        assert!(u.values.column(js).iter().any(|v| v.abs() > 1e-3));
        let z = solve_half_strip_dirichlet(&StripField::zeros(&grid), r, Side::Below).unwrap();
        assert_eq!(z.max_abs(), 0.0);
        assert!(solve_half_strip_dirichlet(&f, 1.01, Side::Above).is_err());
    }

    #[test]
    fn jump_of_exponential_profile() {
        let grid = StripGrid::new(16, 6.0, 3073).unwrap();
        let r = 2.0;
        let above = StripField::from_fn(&grid, DecayClass::Schwartz, |y1, y| {
            (-2.0 * PI * (y - r)).exp() * (2.0 * PI * y1).cos()
        });
        let j = extract_jump(&above, &StripField::zeros(&grid), r).unwrap();
        for i in 0..grid.n1 {
            let expected = -2.0 * PI * (2.0 * PI * grid.y1(i)).cos();
            assert_abs_diff_eq!(j.h_plus[i], expected, epsilon = 1e-6);
        }
        let same = extract_jump(&above, &above, r).unwrap();
        assert!(same.h_plus.iter().all(|v| v.abs() < 2e-6));
    }

    #[test]
    fn lift_examples() {
        let grid = StripGrid::new(16, 6.0, 3073).unwrap();
        let r = 2.0;
        let h_plus: Vec<f64> = (0..grid.n1).map(|i| (2.0 * PI * grid.y1(i)).cos()).collect();
        let jumps = JumpData {
            grid,
            r,
            hbar_plus: 0.0,
            hbar_minus: 0.0,
            h_plus: h_plus.clone(),
            h_minus: vec![0.0; grid.n1],
        };
        let w = jump_lift(&jumps);
        let expected = StripField::from_fn(&grid, DecayClass::Schwartz, |y1, y| {
            (2.0 * PI * y1).cos() * (-2.0 * PI * (y - r).abs()).exp() / (4.0 * PI)
        });
        assert!(w.sub(&expected).max_abs() < 1e-14);
        let back = extract_jump(&w, &w, r).unwrap();
        for (a, b) in back.h_plus.iter().zip(&h_plus) {
            assert_abs_diff_eq!(*a, -b, epsilon = 1e-6);
        }

        let zero = JumpData {
            h_plus: vec![0.0; grid.n1],
            ..jumps.clone()
        };
        assert_eq!(jump_lift(&zero).max_abs(), 0.0);

        // opposite mean jumps: bounded, constant ±cR outside the slab
        let c = 0.7;
        let flat = JumpData {
            h_plus: vec![c; grid.n1],
            h_minus: vec![-c; grid.n1],
            hbar_plus: c,
            hbar_minus: -c,
            ..jumps
        };
        let w = jump_lift(&flat);
        for j in 0..grid.n2 {
            let y = grid.y2(j);
            if y > r {
                assert_abs_diff_eq!(w.values[[0, j]], c * r, epsilon = 1e-12);
            } else if y < -r {
                assert_abs_diff_eq!(w.values[[0, j]], -c * r, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn pipeline_reproduces_per_mode() {
        let grid = StripGrid::new(16, 10.0, 1281).unwrap();
        let f = sample("constructive_pair", &Params::new(), &grid).unwrap();
        let opts = SolveOptions::with_policy(MomentPolicy::AllowGrowth);
        let parts = constructive_parts(&f, 2.0).unwrap();
        assert!((parts.jumps.hbar_plus + parts.jumps.hbar_minus).abs() <= 1e-6);
        let a = solve_constructive(&f, 2.0, &opts).unwrap();
        let b = solve_per_mode(&f, &opts).unwrap();
        let e = relative_error_modulo(&a.u, &b.u, 0);
        assert!(e <= 1e-4, "relative difference {e}");
    }
}
