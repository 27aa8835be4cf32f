//! The periodic Green function of `−Δ` on the strip,
//! `G(y) = −(1/4π) ln(2(cosh 2πy₂ − cos 2πy₁))`, its split `G = G₁ + G₂`
//! with `G₂ = −|y₂|/2`, derivatives, per-mode kernels, and a corrected
//! lattice quadrature for convolutions against `G`.

use std::f64::consts::PI;

use ndarray::Array2;
use rayon::prelude::*;
use serde::Serialize;

use crate::mft::horizontal_refine;
use crate::stripfield::{Direction, StripField, StripGrid};
use crate::{Error, Result};

/// Beyond this `|y₂|` the closed form is evaluated through its
/// exponentially small correction to `−|y₂|/2`.
pub const FAR_FIELD_SWITCH: f64 = 20.0;

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GreenEval {
    pub value: f64,
    /// Distance to the nearest singular point `(j, 0)`, `j ∈ ℤ`.
    pub dist_to_singularity: f64,
}

fn dist_to_lattice(y1: f64, y2: f64) -> f64 {
    let d1 = y1 - y1.round();
    d1.hypot(y2)
}

fn check_regular(y1: f64, y2: f64) -> Result<f64> {
    let d = dist_to_lattice(y1, y2);
    if d == 0.0 {
        Err(Error::Singularity { y1, y2 })
    } else {
        Ok(d)
    }
}

pub fn green_closed(y1: f64, y2: f64) -> Result<GreenEval> {
    let dist = check_regular(y1, y2)?;
    let t = y2.abs();
    let value = if t > FAR_FIELD_SWITCH {
        let e = (-2.0 * PI * t).exp();
        -0.5 * t - (e * e - 2.0 * e * (2.0 * PI * y1).cos()).ln_1p() / (4.0 * PI)
    } else {
        // 2(cosh a − cos b) = 4(sinh²(a/2) + sin²(b/2)) avoids cancellation near 0
        let s = (PI * y2).sinh();
        let c = (PI * y1).sin();
        -(4.0 * (s * s + c * c)).ln() / (4.0 * PI)
    };
    Ok(GreenEval {
        value,
        dist_to_singularity: dist,
    })
}

/// Upper bound on the tail `Σ_{k>K}` dropped by [`green_series`].
pub fn series_truncation_bound(y2: f64, k_max: usize) -> f64 {
    let t = y2.abs();
    let k = k_max.max(1) as f64;
    (-2.0 * PI * k * t).exp() / (2.0 * PI * k * -(-2.0 * PI * t).exp_m1())
}

/// `G₂ + Σ_{1≤k≤K} e^{−2πk|y₂|} cos(2πky₁)/(2πk)`.
pub fn green_series(y1: f64, y2: f64, k_max: usize) -> Result<f64> {
    if y2 == 0.0 {
        return Err(Error::InvalidArgument(
            "the mode series is only used off the line y2 = 0".into(),
        ));
    }
    let t = y2.abs();
    let mut sum = 0.0;
    // accumulate from the smallest term for a stable sum
    for k in (1..=k_max).rev() {
        let kf = k as f64;
        sum += (-2.0 * PI * kf * t).exp() * (2.0 * PI * kf * y1).cos() / (2.0 * PI * kf);
    }
    Ok(-0.5 * t + sum)
}

/// `(G₁, G₂)` with `G₂ = −|y₂|/2`. Away from the singular line `G₁` is
/// evaluated as `−(1/4π) ln|1 − e^{−2π|y₂| + 2πiy₁}|²`, which keeps full
/// relative accuracy where `G₁` is exponentially small.
pub fn green_split(y1: f64, y2: f64) -> Result<(f64, f64)> {
    let g2 = -0.5 * y2.abs();
    if y2.abs() < 0.5 {
        return Ok((green_closed(y1, y2)?.value - g2, g2));
    }
    let e = (-2.0 * PI * y2.abs()).exp();
    let g1 = -(e * e - 2.0 * e * (2.0 * PI * y1).cos()).ln_1p() / (4.0 * PI);
    Ok((g1, g2))
}

/// Denominator helpers in the far field: with `e = e^{−|a|}`,
/// `2e^{|a|}(cosh a − cos b)` equals `q = (1 − e)² + 4e sin²(b/2)`.
fn far_q(abs_a: f64, b: f64) -> f64 {
    let e = (-abs_a).exp();
    let one_minus = -(-abs_a).exp_m1();
    let s = (0.5 * b).sin();
    one_minus * one_minus + 4.0 * e * s * s
}

pub fn green_gradient(y1: f64, y2: f64) -> Result<(f64, f64)> {
    check_regular(y1, y2)?;
    let a = 2.0 * PI * y2;
    let b = 2.0 * PI * y1;
    if y2.abs() > FAR_FIELD_SWITCH {
        let e = (-a.abs()).exp();
        let q = far_q(a.abs(), b);
        let g1 = -e * b.sin() / q;
        let g2 = -0.5 * a.signum() * (1.0 - e * e) / q;
        return Ok((g1, g2));
    }
    let sh = (0.5 * a).sinh();
    let sn = (0.5 * b).sin();
    let d = 2.0 * (sh * sh + sn * sn);
    Ok((-0.5 * b.sin() / d, -0.5 * a.sinh() / d))
}

/// `∂²G/∂y₂² = −π(1 − cosh a cos b)/(cosh a − cos b)²`.
pub fn green_d22(y1: f64, y2: f64) -> Result<f64> {
    check_regular(y1, y2)?;
    let a = 2.0 * PI * y2;
    let b = 2.0 * PI * y1;
    if y2.abs() > FAR_FIELD_SWITCH {
        let e = (-a.abs()).exp();
        let q = far_q(a.abs(), b);
        return Ok(-PI * (4.0 * e * e - 2.0 * e * (1.0 + e * e) * b.cos()) / (q * q));
    }
    let sh = (0.5 * a).sinh();
    let sn = (0.5 * b).sin();
    let d = 2.0 * (sh * sh + sn * sn);
    Ok(-PI * (1.0 - a.cosh() * b.cos()) / (d * d))
}

/// Vertical kernel of mode `k ≠ 0`: `e^{−2π|k||t|}/(4π|k|)`.
pub fn mode_kernel(k: i64, t: f64) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument(
            "mode 0 has the linear kernel -|t|/2, not an exponential one".into(),
        ));
    }
    let kt = 2.0 * PI * k.unsigned_abs() as f64;
    Ok((-kt * t.abs()).exp() / (2.0 * kt))
}

/// Trapezoid convolution `x ↦ ∫ G(x − y) f(y) dy` on a fixed grid.
///
/// The integrand is regularized by subtracting `f(x)·χ(x₂ − y₂)` with a
/// Gaussian `χ` whose convolution with `G` is known in closed form. The
/// remaining `ln r × (quadratic)` singularity leaves an `O(h⁴ ln h)`
/// lattice error, which is removed using the same lattice sum computed for
/// a model integrand with known integral.
///
/// Sources are first interpolated trigonometrically onto a horizontal grid
/// with spacing at most `h2/2`; the horizontal spacing otherwise dominates
/// the error for sources with several horizontal modes.
#[derive(Debug, Clone)]
pub struct GreenConvolution {
    grid: StripGrid,
    /// Quadrature grid: same vertical nodes, `factor` times more horizontal ones.
    fine: StripGrid,
    factor: usize,
    /// `table[[di, dj]] = G(di·h1, (dj − n2 + 1)·h2)` on the quadrature grid,
    /// zero at the singular entry.
    table: Array2<f64>,
    /// Discrete `Σ_{y'} G(x − y') χ(x₂ − y₂')` times the quadrature weight, per target row.
    chi_discrete: Vec<f64>,
    sigma: f64,
    /// Lattice error for `d₁² ln r` and `d₂² ln r`.
    lattice_error: (f64, f64),
}

impl GreenConvolution {
    pub fn new(grid: &StripGrid) -> Self {
        let mut factor = 1;
        while grid.h1() / factor as f64 > 0.5 * grid.h2() + 1e-15 {
            factor *= 2;
        }
        let g = StripGrid::new(grid.n1 * factor, grid.half_width, grid.n2)
            .expect("refining a valid grid keeps it valid");
        let (n1, n2) = (g.n1, g.n2);
        let (h1, h2) = (g.h1(), g.h2());
        let width = 2 * n2 - 1;
        let rows: Vec<Vec<f64>> = (0..n1)
            .into_par_iter()
            .map(|di| {
                (0..width)
                    .map(|dj| {
                        let y2 = (dj as f64 - (n2 - 1) as f64) * h2;
                        let y1 = di as f64 * h1;
                        if di == 0 && dj == n2 - 1 {
                            0.0
                        } else {
                            green_closed(y1, y2).map(|e| e.value).unwrap_or(0.0)
                        }
                    })
                    .collect()
            })
            .collect();
        let table = Array2::from_shape_fn((n1, width), |(i, j)| rows[i][j]);

        let sigma = 0.5;
        let column_sums: Vec<f64> = (0..width).map(|dj| table.column(dj).sum()).collect();
        let w2 = trapezoid_weights(n2, h2);
        let chi_discrete = (0..n2)
            .map(|j| {
                (0..n2)
                    .map(|jp| {
                        let t = g.y2(j) - g.y2(jp);
                        h1 * w2[jp] * column_sums[j + n2 - 1 - jp] * (-(t * t) / (sigma * sigma)).exp()
                    })
                    .sum()
            })
            .collect();
        GreenConvolution {
            grid: *grid,
            fine: g,
            factor,
            table,
            chi_discrete,
            sigma,
            lattice_error: lattice_log_error(h1, h2),
        }
    }

    pub fn grid(&self) -> &StripGrid {
        &self.grid
    }

    /// `∫ G(x − y) χ(x₂ − y₂) dy` over the truncated strip, exactly.
    fn chi_exact(&self, x2: f64) -> f64 {
        let s2 = self.sigma * self.sigma;
        let l = self.fine.half_width;
        let part = |d: f64| -0.25 * s2 * (-(-(d * d) / s2).exp_m1());
        part(l - x2) + part(l + x2)
    }

    /// Convolution at the quadrature node `(i, j)` given `f` (refined) and
    /// its second derivatives there.
    fn at(&self, fw: &Array2<f64>, f: &StripField, i: usize, j: usize, f11: f64, f22: f64) -> f64 {
        let g = &self.fine;
        let (n1, n2) = (g.n1, g.n2);
        let mut sum = 0.0;
        for ip in 0..n1 {
            let di = (i + n1 - ip) % n1;
            let trow = self.table.row(di);
            let trow = trow.as_slice().expect("standard layout");
            let frow = fw.row(ip);
            let frow = frow.as_slice().expect("standard layout");
            let off = j + n2 - 1;
            sum += frow
                .iter()
                .enumerate()
                .map(|(jp, v)| trow[off - jp] * v)
                .sum::<f64>();
        }
        let fx = f.values[[i, j]];
        let value = sum - fx * self.chi_discrete[j] + fx * self.chi_exact(g.y2(j));
        let a11 = f11;
        let a22 = f22 + 2.0 * fx / (self.sigma * self.sigma);
        let correction =
            -(0.5 / (2.0 * PI)) * (a11 * self.lattice_error.0 + a22 * self.lattice_error.1);
        value - correction
    }

    /// Refined source, its second derivatives, and the weighted samples.
    fn prepare(&self, f: &StripField) -> (StripField, StripField, StripField, Array2<f64>) {
        assert_eq!(f.grid, self.grid, "field and convolution grids differ");
        let f = horizontal_refine(f, self.fine.n1).expect("factor is a power of two");
        let f11 = f.differentiate(Direction::Y1, 2);
        let f22 = f.differentiate(Direction::Y2, 2);
        let g = &self.fine;
        let w2 = trapezoid_weights(g.n2, g.h2());
        let h1 = g.h1();
        let fw = Array2::from_shape_fn((g.n1, g.n2), |(i, j)| f.values[[i, j]] * h1 * w2[j]);
        (f, f11, f22, fw)
    }

    /// Convolution evaluated at the listed nodes of the field's grid.
    pub fn apply_at(&self, f: &StripField, nodes: &[(usize, usize)]) -> Vec<f64> {
        let (f, f11, f22, fw) = self.prepare(f);
        nodes
            .par_iter()
            .map(|&(i, j)| {
                let i = i * self.factor;
                self.at(&fw, &f, i, j, f11.values[[i, j]], f22.values[[i, j]])
            })
            .collect()
    }

    /// Convolution at every node.
    pub fn apply(&self, f: &StripField) -> StripField {
        let g = self.grid;
        let (ff, f11, f22, fw) = self.prepare(f);
        let values: Vec<f64> = (0..g.points())
            .into_par_iter()
            .map(|p| {
                let (i, j) = (p / g.n2 * self.factor, p % g.n2);
                self.at(&fw, &ff, i, j, f11.values[[i, j]], f22.values[[i, j]])
            })
            .collect();
        let values = Array2::from_shape_vec((g.n1, g.n2), values).expect("sizes agree");
        StripField {
            grid: g,
            values,
            decay: crate::DecayClass::PolyPlusLinear,
        }
    }
}

fn trapezoid_weights(n: usize, h: f64) -> Vec<f64> {
    let mut w = vec![h; n];
    w[0] *= 0.5;
    w[n - 1] *= 0.5;
    w
}

/// Punctured lattice sum minus the exact integral of `d_i² ln|d| e^{−|d|²/s²}`
/// over the plane, for `i = 1, 2`.
fn lattice_log_error(h1: f64, h2: f64) -> (f64, f64) {
    let s = 16.0 * h1.max(h2);
    let reach = 7.0 * s;
    let na = (reach / h1).ceil() as i64;
    let nb = (reach / h2).ceil() as i64;
    let (mut s1, mut s2) = (0.0, 0.0);
    for a in -na..=na {
        let d1 = a as f64 * h1;
        for b in -nb..=nb {
            if a == 0 && b == 0 {
                continue;
            }
            let d2 = b as f64 * h2;
            let r2 = d1 * d1 + d2 * d2;
            let base = 0.5 * r2.ln() * (-r2 / (s * s)).exp();
            s1 += d1 * d1 * base;
            s2 += d2 * d2 * base;
        }
    }
    let exact = 0.5 * PI * s.powi(4) * (s.ln() + 0.5 * (1.0 - EULER_GAMMA));
    (h1 * h2 * s1 - exact, h1 * h2 * s2 - exact)
}
