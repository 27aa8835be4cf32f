//! Weighted norms, quotient norms, functional-inequality checkers and
//! decay fits.
//!
//! The checkers return both sides of each inequality and leave the
//! comparison to the caller.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::quadrature::simpson_weights;
use crate::solver::recursive;
use crate::stripfield::{first_derivative_4th, Direction, StripField};
use crate::weightspaces::{poly_basis, PolyElement, WeightFunction, WeightSpec};
use crate::{Error, Result};

/// Gram matrices with a larger condition number are rejected.
pub const GRAM_CONDITION_LIMIT: f64 = 1e12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormEstimate {
    pub value: f64,
    /// Bound on the increase of `value` from the part of the strip beyond `±L`.
    pub tail_bound: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuotientNorm {
    pub value: f64,
    pub argmin: PolyElement,
    pub tail_bound: f64,
}

/// All derivatives `∂^λ u` with `|λ| ≤ m`, tagged with `|λ|`.
fn derivatives(u: &StripField, m: u32) -> Vec<(u32, StripField)> {
    let mut out = vec![(0, u.clone())];
    if m >= 1 {
        out.push((1, u.differentiate(Direction::Y1, 1)));
        out.push((1, u.differentiate(Direction::Y2, 1)));
    }
    if m >= 2 {
        out.push((2, u.differentiate(Direction::Y1, 2)));
        out.push((2, u.differentiate(Direction::Y1, 1).differentiate(Direction::Y2, 1)));
        out.push((2, u.differentiate(Direction::Y2, 2)));
    }
    out
}

fn check_order(m: u32) -> Result<()> {
    if m > 2 {
        return Err(Error::InvalidArgument(format!(
            "norms are available up to order 2, got {m}"
        )));
    }
    Ok(())
}

/// `Σ_λ ∫ w_λ² ∂^λa ∂^λb` with its tail bound.
fn inner(a: &[(u32, StripField)], b: &[(u32, StripField)], spec: &WeightSpec) -> Result<(f64, f64)> {
    let mut value = 0.0;
    let mut tail = 0.0;
    for ((order, da), (_, db)) in a.iter().zip(b) {
        let w = spec.derivative_weight(*order).squared();
        let i = da.product(db).integrate(&w)?;
        value += i.value;
        tail += i.tail_bound;
    }
    Ok((value, tail))
}

/// Same sum restricted to `|y₂| ≤ L`; used for polynomial Gram entries,
/// whose tails cancel in the minimization.
fn inner_truncated(a: &[(u32, StripField)], b: &[(u32, StripField)], spec: &WeightSpec) -> f64 {
    let l = a[0].1.grid.half_width;
    a.iter()
        .zip(b)
        .map(|((order, da), (_, db))| {
            let w = spec.derivative_weight(*order).squared();
            da.product(db).integrate_window(&w, -l, l)
        })
        .sum()
}

fn estimate(square: f64, tail: f64) -> NormEstimate {
    let value = square.max(0.0).sqrt();
    NormEstimate {
        value,
        tail_bound: (square.max(0.0) + tail).sqrt() - value,
    }
}

/// `‖u‖_{H^m_α}`, with the logarithmic factor on the orders `≤ k(m, α)`.
pub fn weighted_norm(u: &StripField, spec: &WeightSpec) -> Result<NormEstimate> {
    check_order(spec.m)?;
    let d = derivatives(u, spec.m);
    let (square, tail) = inner(&d, &d, spec)?;
    Ok(estimate(square, tail))
}

/// `inf_{p ∈ P′_j} ‖u + p‖_{H^m_α}` through the Gram normal equations.
pub fn quotient_norm(u: &StripField, spec: &WeightSpec, j: i64) -> Result<QuotientNorm> {
    check_order(spec.m)?;
    if j < 0 {
        let n = weighted_norm(u, spec)?;
        return Ok(QuotientNorm {
            value: n.value,
            argmin: PolyElement::zero(),
            tail_bound: n.tail_bound,
        });
    }
    let basis = poly_basis(j, false);
    let du = derivatives(u, spec.m);
    let db: Vec<Vec<(u32, StripField)>> = basis
        .iter()
        .map(|p| derivatives(&p.sample(&u.grid), spec.m))
        .collect();
    let n = basis.len();
    let mut gram = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for p in 0..n {
        for q in p..n {
            let v = inner_truncated(&db[p], &db[q], spec);
            gram[(p, q)] = v;
            gram[(q, p)] = v;
        }
        rhs[p] = -inner_truncated(&du, &db[p], spec);
    }
    let eig = gram.clone().symmetric_eigen();
    let (lo, hi) = eig
        .eigenvalues
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    let cond = if lo > 0.0 { hi / lo } else { f64::INFINITY };
    if cond > GRAM_CONDITION_LIMIT {
        return Err(Error::IllConditioned(cond));
    }
    let coeffs = gram
        .cholesky()
        .ok_or(Error::IllConditioned(cond))?
        .solve(&rhs);
    let argmin = PolyElement::new(coeffs.iter().copied().collect());
    let shifted = u.add(&argmin.sample(&u.grid)).with_decay(u.decay);
    let n = weighted_norm(&shifted, spec)?;
    Ok(QuotientNorm {
        value: n.value,
        argmin,
        tail_bound: n.tail_bound,
    })
}

/// Plain `H^k` norm on the window `(0, 1) × (−1, 1)`.
fn local_norm(u: &StripField, k: u32) -> f64 {
    derivatives(u, k)
        .iter()
        .map(|(_, d)| d.product(d).integrate_window(&WeightFunction::ONE, -1.0, 1.0))
        .sum::<f64>()
        .sqrt()
}

/// Norm of the space built from `y₂^λ u ∈ H^{m+λ}_α`, `λ = 0..p`, together
/// with the local `H^{m+p}` norm near `y₂ = 0`. Sums of squares are used
/// throughout.
pub fn x_space_norm(u: &StripField, m: u32, alpha_base: f64, p: u32) -> Result<f64> {
    if (alpha_base.abs() - 0.5).abs() > 1e-12 {
        return Err(Error::InvalidArgument(format!(
            "base weight must be +1/2 or -1/2, got {alpha_base}"
        )));
    }
    if m + p > 2 {
        return Err(Error::InvalidArgument(format!(
            "orders up to 2 are supported, got m + p = {}",
            m + p
        )));
    }
    let mut square = 0.0;
    for lambda in 0..=p {
        let moved = u.times_y2_fn(|y| y.powi(lambda as i32), u.decay.times_power(lambda));
        square += weighted_norm(&moved, &WeightSpec::new(m + lambda, alpha_base))?
            .value
            .powi(2);
    }
    if p > 0 {
        square += local_norm(u, m + p).powi(2);
    }
    Ok(square.sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HardyCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub constant: f64,
    pub log_branch: bool,
}

/// Both sides of the one-dimensional Hardy inequality on `[R, ∞)`.
///
/// `samples` holds `f` on the uniform grid `R + i·step` and is taken to
/// vanish beyond it. For `β = −1` the logarithmic variant with weight
/// `1/(r ln²r)` is used, which needs `R > 1`.
pub fn hardy_check(samples: &[f64], step: f64, beta: f64, r: f64) -> Result<HardyCheck> {
    let n = samples.len();
    if n < 5 || step <= 0.0 || r <= 0.0 {
        return Err(Error::InvalidArgument(
            "need at least five samples, a positive step and R > 0".into(),
        ));
    }
    let scale = samples.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if samples[0].abs() > 1e-12 * scale.max(1e-300) && samples[0] != 0.0 {
        return Err(Error::InvalidArgument(format!(
            "f(R) = {} must vanish",
            samples[0]
        )));
    }
    let log_branch = (beta + 1.0).abs() < 1e-12;
    if log_branch && r <= 1.0 {
        return Err(Error::InvalidArgument("the logarithmic branch needs R > 1".into()));
    }
    Ok(hardy_sides(samples, step, beta, r))
}

fn hardy_sides(samples: &[f64], step: f64, beta: f64, r: f64) -> HardyCheck {
    let n = samples.len();
    let log_branch = (beta + 1.0).abs() < 1e-12;
    let w = simpson_weights(n, step);
    let d = first_derivative_4th(samples, step);
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for i in 0..n {
        let x = r + i as f64 * step;
        let f2 = samples[i] * samples[i];
        let d2 = d[i] * d[i];
        if log_branch {
            lhs += w[i] * f2 / (x * x.ln().powi(2));
            rhs += w[i] * d2 * x;
        } else {
            lhs += w[i] * f2 * x.powf(beta);
            rhs += w[i] * d2 * x.powf(beta + 2.0);
        }
    }
    let constant = if log_branch {
        (4.0f64 / 3.0).powi(2)
    } else {
        (2.0 / (beta + 1.0)).powi(2)
    };
    HardyCheck {
        lhs,
        rhs: constant * rhs,
        constant,
        log_branch,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PoincareCheck {
    /// `‖u − ū‖_{L²_α}`.
    pub lhs: f64,
    /// `|u|_{H¹_α}`.
    pub rhs: f64,
    /// `‖∂₁u‖_{L²_α}`, the sharper bound.
    pub d1_only: f64,
}

pub fn poincare_wirtinger_check(u: &StripField, alpha: f64) -> Result<PoincareCheck> {
    let w = WeightFunction::power(2.0 * alpha);
    let mean = u.horizontal_mean();
    let mut fluct = u.clone();
    for (mut col, m) in fluct.values.columns_mut().into_iter().zip(mean.iter()) {
        col.mapv_inplace(|v| v - m);
    }
    let sq = |f: &StripField| -> Result<f64> { Ok(f.product(f).integrate(&w)?.value) };
    let d1 = u.differentiate(Direction::Y1, 1);
    let d2 = u.differentiate(Direction::Y2, 1);
    let (s1, s2) = (sq(&d1)?, sq(&d2)?);
    Ok(PoincareCheck {
        lhs: sq(&fluct)?.sqrt(),
        rhs: (s1 + s2).sqrt(),
        d1_only: s1.sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// `s(y₂) ≈ C e^{rate·|y₂|}`.
    Exp,
    /// `s(y₂) ≈ C ρ(y₂)^rate`.
    Poly,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DecayFit {
    pub rate: f64,
    pub r2: f64,
}

/// Least-squares line through `(x, y)`, returning slope, intercept and `R²`.
pub fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r2 = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    (slope, my - slope * mx, r2)
}

/// Fit of the horizontal slice norms on `a ≤ |y₂| ≤ b`, both sides.
pub fn decay_fit(u: &StripField, model: DecayModel, window: (f64, f64)) -> Result<DecayFit> {
    let (a, b) = window;
    if !(0.0 <= a && a < b && b <= u.grid.half_width + 1e-12) {
        return Err(Error::InvalidArgument(format!(
            "window ({a}, {b}) is not inside [0, L]"
        )));
    }
    let s = u.slice_norms();
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for j in 0..u.grid.n2 {
        let y = u.grid.y2(j);
        if y.abs() < a - 1e-12 || y.abs() > b + 1e-12 {
            continue;
        }
        if s[j] <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "slice at y2 = {y} vanishes; cannot fit a rate"
            )));
        }
        xs.push(match model {
            DecayModel::Exp => y.abs(),
            DecayModel::Poly => 0.5 * (1.0 + y * y).ln(),
        });
        ys.push(s[j].ln());
    }
    if xs.len() < 3 {
        return Err(Error::InvalidArgument("window holds fewer than three nodes".into()));
    }
    let (rate, _, r2) = line_fit(&xs, &ys);
    Ok(DecayFit { rate, r2 })
}

/// Affine fit `ū ≈ c + s·|y₂|` of the horizontal mean on each side.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FarFieldFit {
    pub slope_above: f64,
    pub intercept_above: f64,
    pub slope_below: f64,
    pub intercept_below: f64,
}

pub fn far_field_fit(u: &StripField, window: (f64, f64)) -> Result<FarFieldFit> {
    let mean = u.horizontal_mean();
    let side = |sign: f64| -> Result<(f64, f64)> {
        let (mut xs, mut ys) = (Vec::new(), Vec::new());
        for j in 0..u.grid.n2 {
            let y = u.grid.y2(j) * sign;
            if y >= window.0 - 1e-12 && y <= window.1 + 1e-12 {
                xs.push(y);
                ys.push(mean[j]);
            }
        }
        if xs.len() < 3 {
            return Err(Error::InvalidArgument("window holds fewer than three nodes".into()));
        }
        let (s, c, _) = line_fit(&xs, &ys);
        Ok((s, c))
    };
    let (slope_above, intercept_above) = side(1.0)?;
    let (slope_below, intercept_below) = side(-1.0)?;
    Ok(FarFieldFit {
        slope_above,
        intercept_above,
        slope_below,
        intercept_below,
    })
}

/// `(⟨f, 1⟩, ⟨f, y₂⟩)` with the fourth-order rule of the solvers.
pub fn moments(f: &StripField) -> (f64, f64) {
    let mean = f.horizontal_mean();
    let h = f.grid.h2();
    let m0 = recursive::total(mean.as_slice().expect("contiguous"), h);
    let weighted: Vec<f64> = mean
        .iter()
        .enumerate()
        .map(|(j, v)| v * f.grid.y2(j))
        .collect();
    (m0, recursive::total(&weighted, h))
}

fn discrete_l2(values: impl Iterator<Item = f64>) -> f64 {
    values.map(|v| v * v).sum::<f64>().sqrt()
}

/// `‖−Δu − f‖ / ‖f‖` in the discrete `L²` norm over all nodes.
pub fn residual(u: &StripField, f: &StripField) -> f64 {
    let r = u.laplacian().scale(-1.0).sub(f);
    let denom = discrete_l2(f.values.iter().copied());
    let num = discrete_l2(r.values.iter().copied());
    if denom == 0.0 {
        num
    } else {
        num / denom
    }
}

/// Relative discrete `L²` distance `min_{p ∈ P′_j} ‖u − v + p‖ / ‖v‖`.
pub fn relative_error_modulo(u: &StripField, v: &StripField, j: i64) -> f64 {
    let diff = u.sub(v);
    let denom = discrete_l2(v.values.iter().copied());
    let mut d = diff.values.clone();
    if j >= 0 {
        // only the horizontal mean can absorb polynomials in y₂
        let mean = diff.horizontal_mean();
        let ys = u.grid.y2_nodes();
        let cols = (j + 1) as usize;
        let scale = u.grid.half_width;
        let a = DMatrix::from_fn(ys.len(), cols, |r, c| (ys[r] / scale).powi(c as i32));
        let b = DVector::from_iterator(ys.len(), mean.iter().copied());
        let coef = a
            .clone()
            .svd(true, true)
            .solve(&b, 1e-14)
            .expect("SVD solve with both factors");
        let fit = a * coef;
        for (jj, mut col) in d.columns_mut().into_iter().enumerate() {
            col.mapv_inplace(|x| x - fit[jj]);
        }
    }
    let num = discrete_l2(d.iter().copied());
    if denom == 0.0 {
        num
    } else {
        num / denom
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::stripfield::{DecayClass, StripGrid};
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    fn g() -> StripGrid {
        StripGrid::new(16, 8.0, 641).unwrap()
    }

    #[test]
    fn norm_of_one_with_decaying_weight() {
        let grid = StripGrid::new(8, 2000.0, 400_001).unwrap();
        let one = StripField::from_fn(&grid, DecayClass::Poly(0.0), |_, _| 1.0);
        let n = weighted_norm(&one, &WeightSpec::new(0, -1.0)).unwrap();
        assert!((n.value - PI.sqrt()).abs() <= n.tail_bound + 1e-6);
        assert!(n.tail_bound < 1e-3);
    }

    #[test]
    fn zero_has_zero_norm() {
        let z = StripField::zeros(&g());
        for (m, a) in [(0, 0.0), (1, 0.5), (2, -1.0)] {
            assert_eq!(weighted_norm(&z, &WeightSpec::new(m, a)).unwrap().value, 0.0);
        }
        assert_eq!(x_space_norm(&z, 0, 0.5, 1).unwrap(), 0.0);
        assert!(weighted_norm(&z, &WeightSpec::new(3, 0.0)).is_err());
    }

    /// `∫ (ln(2+y²))^{−2} (1+y²)^{−1/2} dy` over `|y| < l`, by geometric
    /// Gauss panels.
    fn critical_oracle(l: f64) -> f64 {
        let f = |y: f64| 1.0 / ((2.0 + y * y).ln().powi(2) * (1.0 + y * y).sqrt());
        let mut total = crate::quadrature::gauss_panels(f, 0.0, 1.0, 8, 16);
        let mut a = 1.0;
        while a < l {
            let b = (2.0 * a).min(l);
            total += crate::quadrature::gauss_panels(f, a, b, 4, 16);
            a = b;
        }
        2.0 * total
    }

    #[test]
    fn critical_norm_of_one_is_finite() {
        // the oracle stabilizes as L grows
        let (a, b) = (critical_oracle(1e4), critical_oracle(1e6));
        assert!((a - b).abs() / b < 0.01);
        let grid = StripGrid::new(4, 100.0, 20_001).unwrap();
        let one = StripField::from_fn(&grid, DecayClass::Poly(0.0), |_, _| 1.0);
        let n = weighted_norm(&one, &WeightSpec::new(1, 0.5)).unwrap();
        assert_abs_diff_eq!(n.value * n.value, critical_oracle(100.0), epsilon = 1e-8);
        let upper = (n.value + n.tail_bound).powi(2);
        assert!(n.value * n.value < b && b < upper);
    }

    #[test]
    fn quotient_norm_examples() {
        let grid = g();
        // the declared class is that of the residual u + argmin
        let u = StripField::from_fn(&grid, DecayClass::Schwartz, |_, y| y + (-y * y).exp());
        let spec = WeightSpec::new(0, -1.0);
        let q = quotient_norm(&u, &spec, 1).unwrap();
        let gauss = StripField::from_fn(&grid, DecayClass::Schwartz, |_, y| (-y * y).exp());
        let bound = weighted_norm(&gauss, &spec).unwrap().value;
        assert!(q.value <= bound + 1e-12);
        assert_abs_diff_eq!(q.argmin.coeffs[1], -1.0, epsilon = 1e-10);

        let p = StripField::from_fn(&grid, DecayClass::Schwartz, |_, y| 3.0 - 0.5 * y);
        let q = quotient_norm(&p, &spec, 1).unwrap();
        assert!(q.value <= 1e-8 * weighted_norm(&p, &spec).unwrap().value);

        let q = quotient_norm(&gauss, &spec, -1).unwrap();
        assert_eq!(q.value, bound);
    }

    #[test]
    fn x_norm_assembly() {
        let grid = g();
        let u = StripField::from_fn(&grid, DecayClass::Schwartz, |_, y| (-y * y).exp());
        let direct = (weighted_norm(&u, &WeightSpec::new(0, 0.5)).unwrap().value.powi(2)
            + weighted_norm(
                &u.times_y2_fn(|y| y, DecayClass::Schwartz),
                &WeightSpec::new(1, 0.5),
            )
            .unwrap()
            .value
            .powi(2)
            + local_norm(&u, 1).powi(2))
        .sqrt();
        assert_abs_diff_eq!(x_space_norm(&u, 0, 0.5, 1).unwrap(), direct, epsilon = 1e-14);
        let one = StripField::from_fn(&grid, DecayClass::Schwartz, |_, _| 1.0);
        assert_eq!(
            x_space_norm(&one, 0, 0.5, 0).unwrap(),
            weighted_norm(&one, &WeightSpec::new(0, 0.5)).unwrap().value
        );
        assert!(x_space_norm(&u, 0, 1.0, 1).is_err());
        assert!(x_space_norm(&u, 1, 0.5, 2).is_err());
    }

    #[test]
    fn hardy_exponential_oracle() {
        let step = 1e-3;
        let n = 40_001;
        let e: Vec<f64> = (0..n).map(|i| (-(1.0 + i as f64 * step)).exp()).collect();
        let c = hardy_sides(&e, step, 0.0, 1.0);
        assert_abs_diff_eq!(c.lhs, 0.067668, epsilon = 1e-6);
        assert_abs_diff_eq!(c.rhs, 0.676676, epsilon = 1e-6);
        assert!(hardy_check(&e, step, 0.0, 1.0).is_err());

        // (r − 1)e^{−r} vanishes at R = 1
        let s: Vec<f64> = (0..n).map(|i| (i as f64 * step) * (-(1.0 + i as f64 * step)).exp()).collect();
        let c = hardy_check(&s, step, 0.0, 1.0).unwrap();
        // ∫_1^∞ (r−1)² e^{−2r} dr = e^{−2}/4 and ∫ (2−r)² e^{−2r} r² dr by Gauss panels
        assert_abs_diff_eq!(c.lhs, (-2.0f64).exp() / 4.0, epsilon = 1e-10);
        let rhs = 4.0
            * crate::quadrature::gauss_panels(
                |r| ((2.0 - r) * (-r).exp()).powi(2) * r * r,
                1.0,
                41.0,
                400,
                16,
            );
        assert_abs_diff_eq!(c.rhs, rhs, epsilon = 1e-9);
        assert!(c.lhs <= c.rhs);

        let z = hardy_check(&[0.0; 9], 0.1, 1.0, 1.0).unwrap();
        assert_eq!((z.lhs, z.rhs), (0.0, 0.0));
        assert!(hardy_check(&[1.0; 9], 0.1, 1.0, 1.0).is_err());
        let log = hardy_check(&s, step, -1.0, 2.0).unwrap();
        assert!(log.log_branch && log.lhs <= log.rhs);
        assert!(hardy_check(&s, step, -1.0, 1.0).is_err());
    }

    #[test]
    fn poincare_examples() {
        let grid = g();
        let u = StripField::from_fn(&grid, DecayClass::Schwartz, |y1, y| {
            (2.0 * PI * y1).cos() * (-y * y).exp()
        });
        let c = poincare_wirtinger_check(&u, 0.0).unwrap();
        let l2 = u.product(&u).integrate(&WeightFunction::ONE).unwrap().value.sqrt();
        assert_abs_diff_eq!(c.lhs, l2, epsilon = 1e-12);
        assert!(c.rhs >= 2.0 * PI * c.lhs * (1.0 - 1e-9));
        assert_abs_diff_eq!(c.d1_only, 2.0 * PI * c.lhs, epsilon = 1e-9);
        let flat = StripField::from_fn(&grid, DecayClass::Schwartz, |_, y| (-y * y).exp());
        assert!(poincare_wirtinger_check(&flat, 1.0).unwrap().lhs < 1e-14);
    }

    #[test]
    fn decay_fit_examples() {
        let grid = g();
        let u = StripField::from_fn(&grid, DecayClass::Schwartz, |y1, y| {
            (-2.0 * PI * y.abs()).exp() * (2.0 * PI * y1).cos()
        });
        let f = decay_fit(&u, DecayModel::Exp, (2.0, 6.0)).unwrap();
        assert_abs_diff_eq!(f.rate, -2.0 * PI, epsilon = 1e-6);
        let g1 = StripField::from_fn(&grid, DecayClass::Schwartz, |y1, y| {
            crate::green::green_split(y1, y).map(|s| s.0).unwrap_or(0.0)
        });
        let f = decay_fit(&g1, DecayModel::Exp, (2.0, 6.0)).unwrap();
        assert!((f.rate / (-2.0 * PI) - 1.0).abs() < 0.01);
        let r = StripField::from_fn(&grid, DecayClass::Poly(-3.0), |_, y| (1.0 + y * y).powf(-1.5));
        let f = decay_fit(&r, DecayModel::Poly, (2.0, 8.0)).unwrap();
        assert_abs_diff_eq!(f.rate, -3.0, epsilon = 1e-10);
        assert!(decay_fit(&StripField::zeros(&grid), DecayModel::Exp, (2.0, 6.0)).is_err());
    }

    #[test]
    fn moments_of_reference_densities() {
        let grid = g();
        let gm = crate::presets::sample("gaussian_mean", &Default::default(), &grid).unwrap();
        let (m0, m1) = moments(&gm);
        assert_abs_diff_eq!(m0, 1.0, epsilon = 1e-12);
        assert_abs_diff_eq!(m1, 0.0, epsilon = 1e-14);
        let dm = crate::presets::sample("dipole_mean", &Default::default(), &grid).unwrap();
        let (m0, m1) = moments(&dm);
        assert_abs_diff_eq!(m0, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(m1, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn relative_error_ignores_polynomials() {
        let grid = g();
        let v = StripField::from_fn(&grid, DecayClass::Schwartz, |y1, y| {
            (2.0 * PI * y1).cos() * (-y * y).exp() + (-y * y).exp()
        });
        let u = v.add(&StripField::from_fn(&grid, DecayClass::Poly(1.0), |_, y| 2.0 - 3.0 * y));
        assert!(relative_error_modulo(&u, &v, 1) < 1e-12);
        assert!(relative_error_modulo(&u, &v, 0) > 0.1);
    }
}
