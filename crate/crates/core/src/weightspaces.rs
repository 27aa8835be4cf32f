//! Weights, the index calculus `k(m, α)` / `q(m, α)`, and the one-variable
//! polynomial classes that act as uniqueness classes and compatibility
//! conditions.

use serde::{Deserialize, Serialize};

use crate::quadrature::gauss_panels;
use crate::stripfield::{DecayClass, StripField, StripGrid};

const HALF_INT_TOL: f64 = 1e-12;

/// Returns `Some(n)` when `x` is the integer `n` up to round-off.
fn as_integer(x: f64) -> Option<i64> {
    let r = x.round();
    ((x - r).abs() <= HALF_INT_TOL).then_some(r as i64)
}

/// Largest degree `q` with `y₂^q ∈ H^m_{α,#}(Z)`; negative means only `{0}`.
pub fn compute_q(m: i64, alpha: f64) -> i64 {
    match as_integer(alpha + 0.5) {
        Some(i) if i <= 0 => m - 1 - i,
        _ => (m as f64 - 0.5 - alpha + HALF_INT_TOL).floor() as i64,
    }
}

/// Order up to which the logarithmic factor enters the `H^m_α` norm, or `-1`
/// when `α ∉ {1/2, …, m − 1/2}`.
pub fn compute_k(m: u32, alpha: f64) -> i64 {
    match as_integer(alpha - 0.5) {
        Some(i) if i >= 0 && i < m as i64 => m as i64 - 1 - i,
        _ => -1,
    }
}

/// Basis of `P′_j` (monomials `1, …, y₂^j`) or of its harmonic subspace.
pub fn poly_basis(j: i64, harmonic_only: bool) -> Vec<PolyElement> {
    if j < 0 {
        return Vec::new();
    }
    let top = if harmonic_only { j.min(1) } else { j };
    (0..=top as usize).map(PolyElement::monomial).collect()
}

/// Truncations at which [`monomial_in_space`] samples the norm of `y₂^d`.
pub const MEMBERSHIP_TRUNCATIONS: [f64; 4] = [1e1, 1e2, 1e3, 1e4];

/// `‖y₂^degree‖²` in `H^m_{α,#}` over one period and `|y₂| < l`, for each
/// `l` in [`MEMBERSHIP_TRUNCATIONS`]. Only the `∂₂` derivatives are nonzero.
pub fn monomial_norm_squared(spec: &WeightSpec, degree: u32) -> [f64; 4] {
    let integrand = |y: f64| -> f64 {
        (0..=spec.m.min(degree))
            .map(|order| {
                let c: f64 = (degree - order + 1..=degree).map(f64::from).product();
                let w = spec.derivative_weight(order).eval(y);
                let v = c * w * y.powi((degree - order) as i32);
                v * v
            })
            .sum()
    };
    // [0, 1] directly, then each decade in the variable s = ln y
    let mut acc = 2.0 * gauss_panels(integrand, 0.0, 1.0, 8, 16);
    let mut lower = 1.0f64;
    let mut out = [0.0; 4];
    for (slot, &l) in out.iter_mut().zip(&MEMBERSHIP_TRUNCATIONS) {
        acc += 2.0 * gauss_panels(|s| {
            let y = s.exp();
            y * integrand(y)
        }, lower.ln(), l.ln(), 12, 16);
        lower = l;
        *slot = acc;
    }
    out
}

/// Numerical membership test for `y₂^degree ∈ H^m_{α,#}(Z)`.
///
/// The integrands are power laws up to logarithms, so a convergent norm has
/// decade increments that shrink geometrically (or like `1/ln² L` in the
/// logarithmic cases) while a divergent one has increments that stay level
/// or grow. The last two decades decide.
pub fn monomial_in_space(spec: &WeightSpec, degree: u32) -> bool {
    let n = monomial_norm_squared(spec, degree);
    let (d1, d2) = (n[2] - n[1], n[3] - n[2]);
    d2 <= 0.75 * d1
}

/// The space identity `(m, α)` with its derived indices.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSpec {
    pub m: u32,
    pub alpha: f64,
    pub k_crit: i64,
    pub q_poly: i64,
    pub is_critical: bool,
    pub is_half_integer_critical: bool,
}

impl WeightSpec {
    pub fn new(m: u32, alpha: f64) -> Self {
        let k_crit = compute_k(m, alpha);
        let is_half_integer_critical = matches!(as_integer(alpha + 0.5), Some(i) if i <= 0);
        WeightSpec {
            m,
            alpha,
            k_crit,
            q_poly: compute_q(m as i64, alpha),
            is_critical: k_crit >= 0,
            is_half_integer_critical,
        }
    }

    /// Weight applied to `∂^λ u` (before squaring) for a multi-index of order
    /// `order`: `ρ^{α − m + |λ|}`, times `ln(1+ρ²)^{-1}` when `|λ| ≤ k`.
    pub fn derivative_weight(&self, order: u32) -> WeightFunction {
        let log_power = if (order as i64) <= self.k_crit { -1 } else { 0 };
        WeightFunction {
            alpha: self.alpha - self.m as f64 + order as f64,
            log_power,
        }
    }

    /// Polynomial class of the space (possibly empty).
    pub fn polynomials(&self, harmonic_only: bool) -> Vec<PolyElement> {
        poly_basis(self.q_poly, harmonic_only)
    }
}

/// `ρ(y₂)^alpha · ln(1 + ρ²)^log_power` with `ρ = (1 + y₂²)^{1/2}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightFunction {
    pub alpha: f64,
    pub log_power: i32,
}

impl WeightFunction {
    pub const ONE: WeightFunction = WeightFunction {
        alpha: 0.0,
        log_power: 0,
    };

    pub fn power(alpha: f64) -> Self {
        WeightFunction {
            alpha,
            log_power: 0,
        }
    }

    pub fn eval(&self, y2: f64) -> f64 {
        let rho2 = 1.0 + y2 * y2;
        let mut w = rho2.powf(0.5 * self.alpha);
        if self.log_power != 0 {
            w *= (1.0 + rho2).ln().powi(self.log_power);
        }
        w
    }

    /// Pointwise square, as used inside an `L²` norm.
    pub fn squared(&self) -> Self {
        WeightFunction {
            alpha: 2.0 * self.alpha,
            log_power: 2 * self.log_power,
        }
    }

    pub fn times(&self, other: &WeightFunction) -> Self {
        WeightFunction {
            alpha: self.alpha + other.alpha,
            log_power: self.log_power + other.log_power,
        }
    }
}

/// Polynomial in `y₂` only; `coeffs[i]` multiplies `y₂^i`.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PolyElement {
    pub coeffs: Vec<f64>,
}

impl PolyElement {
    pub fn new(coeffs: Vec<f64>) -> Self {
        PolyElement { coeffs }
    }

    pub fn zero() -> Self {
        PolyElement { coeffs: Vec::new() }
    }

    pub fn monomial(degree: usize) -> Self {
        let mut coeffs = vec![0.0; degree + 1];
        coeffs[degree] = 1.0;
        PolyElement { coeffs }
    }

    /// Degree ignoring trailing zero coefficients; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.iter().rposition(|&c| c != 0.0)
    }

    pub fn eval(&self, y2: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, &c| acc * y2 + c)
    }

    pub fn derivative(&self) -> Self {
        PolyElement {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, &c)| i as f64 * c)
                .collect(),
        }
    }

    /// Polynomials depend on `y₂` only, so `Δp = p″`.
    pub fn laplacian(&self) -> Self {
        self.derivative().derivative()
    }

    pub fn is_harmonic(&self) -> bool {
        self.coeffs.iter().skip(2).all(|&c| c == 0.0)
    }

    pub fn in_space(&self, j: i64) -> bool {
        match self.degree() {
            None => true,
            Some(d) => (d as i64) <= j,
        }
    }

    pub fn add(&self, other: &PolyElement) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| {
                self.coeffs.get(i).copied().unwrap_or(0.0)
                    + other.coeffs.get(i).copied().unwrap_or(0.0)
            })
            .collect();
        PolyElement { coeffs }
    }

    pub fn scale(&self, s: f64) -> Self {
        PolyElement {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn sample(&self, grid: &StripGrid) -> StripField {
        let degree = self.degree().unwrap_or(0) as f64;
        let decay = if self.degree().is_none() {
            DecayClass::Schwartz
        } else {
            DecayClass::Poly(degree)
        };
        StripField::from_fn(grid, decay, |_, y2| self.eval(y2))
    }
}
