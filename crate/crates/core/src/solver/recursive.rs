//! One-dimensional convolution with `e^{−a|t−s|}` on a uniform grid in O(n).
//!
//! Data are interpolated by local cubics (four nodes per cell, shifted
//! inward at the two ends) and the kernel is integrated exactly against each
//! interpolant, so the scheme is fourth-order accurate and has no
//! periodization error. `a = 0` gives plain cumulative integrals.

use std::ops::{Add, Mul};

use crate::quadrature::gauss_legendre;

/// Scalar types the sweeps run on (`f64` and `Complex64`).
pub(crate) trait Sample: Copy + Default + Add<Output = Self> + Mul<f64, Output = Self> {}
impl<T: Copy + Default + Add<Output = T> + Mul<f64, Output = T>> Sample for T {}

/// Node offsets, relative to the left end of the cell, of the three
/// interpolation stencils: first cell, interior cells, last cell.
const STENCILS: [[f64; 4]; 3] = [[0.0, 1.0, 2.0, 3.0], [-1.0, 0.0, 1.0, 2.0], [-2.0, -1.0, 0.0, 1.0]];

/// Monomial coefficients (in `σ = x/h`) of the Lagrange basis of a stencil.
fn lagrange_coefficients(nodes: &[f64; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0; 4]; 4];
    for m in 0..4 {
        let mut poly = vec![1.0];
        let mut denom = 1.0;
        for (n, &xn) in nodes.iter().enumerate() {
            if n == m {
                continue;
            }
            let mut next = vec![0.0; poly.len() + 1];
            for (c, &p) in poly.iter().enumerate() {
                next[c + 1] += p;
                next[c] -= xn * p;
            }
            poly = next;
            denom *= nodes[m] - xn;
        }
        for c in 0..4 {
            out[m][c] = poly[c] / denom;
        }
    }
    out
}

/// `∫₀ʰ e^{−a(h−x)} (x/h)^c dx` and `∫₀ʰ e^{−ax} (x/h)^c dx` for `c = 0..3`.
fn moments(a: f64, h: f64) -> ([f64; 4], [f64; 4]) {
    if a == 0.0 {
        let m = [h, h / 2.0, h / 3.0, h / 4.0];
        (m, m)
    } else if a * h <= 8.0 {
        moments_gauss(a, h)
    } else {
        moments_by_parts(a, h)
    }
}

fn moments_gauss(a: f64, h: f64) -> ([f64; 4], [f64; 4]) {
    let mut fwd = [0.0; 4];
    let mut bwd = [0.0; 4];
    let (x, w) = gauss_legendre(16);
    for (xi, wi) in x.iter().zip(&w) {
        let s = 0.5 * (xi + 1.0);
        let wf = 0.5 * h * wi * (-a * h * (1.0 - s)).exp();
        let wb = 0.5 * h * wi * (-a * h * s).exp();
        let mut p = 1.0;
        for c in 0..4 {
            fwd[c] += wf * p;
            bwd[c] += wb * p;
            p *= s;
        }
    }
    (fwd, bwd)
}

/// Upward recurrences from integration by parts; stable once `a·h > 3`.
fn moments_by_parts(a: f64, h: f64) -> ([f64; 4], [f64; 4]) {
    let mut fwd = [0.0; 4];
    let mut bwd = [0.0; 4];
    let e = (-a * h).exp();
    fwd[0] = -(-a * h).exp_m1() / a;
    bwd[0] = fwd[0];
    for c in 1..4 {
        let r = c as f64 / (a * h);
        fwd[c] = 1.0 / a - r * fwd[c - 1];
        bwd[c] = -e / a + r * bwd[c - 1];
    }
    (fwd, bwd)
}

/// Cell weights of the forward and backward sweeps for one decay rate.
#[derive(Debug, Clone)]
pub(crate) struct Sweeps {
    decay: f64,
    fwd: [[f64; 4]; 3],
    bwd: [[f64; 4]; 3],
}

impl Sweeps {
    pub(crate) fn new(a: f64, h: f64) -> Self {
        let (mf, mb) = moments(a, h);
        let mut fwd = [[0.0; 4]; 3];
        let mut bwd = [[0.0; 4]; 3];
        for (p, nodes) in STENCILS.iter().enumerate() {
            let l = lagrange_coefficients(nodes);
            for m in 0..4 {
                fwd[p][m] = (0..4).map(|c| l[m][c] * mf[c]).sum();
                bwd[p][m] = (0..4).map(|c| l[m][c] * mb[c]).sum();
            }
        }
        Sweeps {
            decay: (-a * h).exp(),
            fwd,
            bwd,
        }
    }

    fn stencil(j: usize, n: usize) -> (usize, usize) {
        if j == 0 {
            (0, 0)
        } else if j == n - 2 {
            (2, n - 4)
        } else {
            (1, j - 1)
        }
    }

    /// `P[j] = ∫_{t₀}^{t_j} e^{−a(t_j−s)} f(s) ds`.
    pub(crate) fn forward<T: Sample>(&self, f: &[T]) -> Vec<T> {
        let n = f.len();
        assert!(n >= 4, "at least four nodes are needed");
        let mut p = vec![T::default(); n];
        for j in 0..n - 1 {
            let (pat, start) = Self::stencil(j, n);
            let mut cell = T::default();
            for m in 0..4 {
                cell = cell + f[start + m] * self.fwd[pat][m];
            }
            p[j + 1] = p[j] * self.decay + cell;
        }
        p
    }

    /// `Q[j] = ∫_{t_j}^{t_{n−1}} e^{−a(s−t_j)} f(s) ds`.
    pub(crate) fn backward<T: Sample>(&self, f: &[T]) -> Vec<T> {
        let n = f.len();
        assert!(n >= 4, "at least four nodes are needed");
        let mut q = vec![T::default(); n];
        for j in (0..n - 1).rev() {
            let (pat, start) = Self::stencil(j, n);
            let mut cell = T::default();
            for m in 0..4 {
                cell = cell + f[start + m] * self.bwd[pat][m];
            }
            q[j] = q[j + 1] * self.decay + cell;
        }
        q
    }
}

/// `∫ e^{−a|t−s|} f(s) ds / (2a)` at every node, `a > 0`.
pub(crate) fn exp_convolve<T: Sample>(f: &[T], a: f64, h: f64) -> Vec<T> {
    let s = Sweeps::new(a, h);
    let p = s.forward(f);
    let q = s.backward(f);
    let scale = 0.5 / a;
    p.iter().zip(&q).map(|(&x, &y)| (x + y) * scale).collect()
}

/// Integral of the cubic interpolant over the whole grid.
pub(crate) fn total<T: Sample>(f: &[T], h: f64) -> T {
    let p = Sweeps::new(0.0, h).forward(f);
    p[p.len() - 1]
}
