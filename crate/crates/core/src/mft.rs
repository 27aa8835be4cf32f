//! Horizontal Fourier transform on the strip.
//!
//! Only the periodic direction is transformed; everything that would go
//! through the continuous vertical transform is done mode by mode in physical
//! `y₂` space. Row `k` of a [`ModeField`] approximates
//! `F_k(f)(y₂) = ∫₀¹ f(y₁, y₂) e^{−2πiky₁} dy₁`.

use ndarray::Array2;
use rayon::prelude::*;
use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::stripfield::{DecayClass, Integral, ModeField, StripField, StripGrid};
use crate::weightspaces::WeightFunction;
use crate::{Error, Result};

/// Imaginary residue tolerated by [`horizontal_inverse`].
pub const IMAGINARY_TOL: f64 = 1e-8;

pub fn horizontal_transform(f: &StripField) -> ModeField {
    let g = f.grid;
    let fft = FftPlanner::<f64>::new().plan_fft_forward(g.n1);
    let scale = 1.0 / g.n1 as f64;
    let columns: Vec<Vec<Complex64>> = (0..g.n2)
        .into_par_iter()
        .map(|j| {
            let mut buf: Vec<Complex64> = f
                .values
                .column(j)
                .iter()
                .map(|&v| Complex64::new(v, 0.0))
                .collect();
            fft.process(&mut buf);
            buf.iter_mut().for_each(|z| *z *= scale);
            buf
        })
        .collect();
    let modes = Array2::from_shape_fn((g.n1, g.n2), |(r, j)| columns[j][r]);
    ModeField { grid: g, modes }
}

/// Inverse transform; fails when the result carries an imaginary part,
/// i.e. when the input was not the transform of a real field.
pub fn horizontal_inverse(modes: &ModeField) -> Result<StripField> {
    let (field, residue) = inverse_with_residue(modes);
    if residue > IMAGINARY_TOL {
        return Err(Error::NotConjugateSymmetric(residue));
    }
    Ok(field)
}

pub(crate) fn inverse_unchecked(modes: &ModeField) -> StripField {
    inverse_with_residue(modes).0
}

fn inverse_with_residue(modes: &ModeField) -> (StripField, f64) {
    let g = modes.grid;
    let fft = FftPlanner::<f64>::new().plan_fft_inverse(g.n1);
    let columns: Vec<(Vec<f64>, f64)> = (0..g.n2)
        .into_par_iter()
        .map(|j| {
            let mut buf: Vec<Complex64> = modes.modes.column(j).to_vec();
            fft.process(&mut buf);
            let residue = buf.iter().fold(0.0f64, |m, z| m.max(z.im.abs()));
            (buf.iter().map(|z| z.re).collect(), residue)
        })
        .collect();
    let residue = columns.iter().fold(0.0f64, |m, c| m.max(c.1));
    let values = Array2::from_shape_fn((g.n1, g.n2), |(i, j)| columns[j].0[i]);
    (
        StripField {
            grid: g,
            values,
            decay: DecayClass::Schwartz,
        },
        residue,
    )
}

/// Trigonometric interpolation of `f` onto `n1_fine` horizontal nodes
/// (a multiple of `n1`): the modes are zero-padded, with the unpaired
/// Nyquist mode split evenly between `±n1/2`. Nodes of the original grid
/// keep their values up to round-off.
pub fn horizontal_refine(f: &StripField, n1_fine: usize) -> Result<StripField> {
    let g = f.grid;
    if n1_fine < g.n1 || n1_fine % g.n1 != 0 {
        return Err(Error::InvalidArgument(format!(
            "refined size {n1_fine} is not a multiple of n1 = {}",
            g.n1
        )));
    }
    let fine = StripGrid::new(n1_fine, g.half_width, g.n2)?;
    let coarse = horizontal_transform(f);
    let mut out = ModeField::zeros(&fine);
    let half = (g.n1 / 2) as i64;
    for r in 0..g.n1 {
        let k = coarse.wavenumber(r);
        if k == -half && n1_fine > g.n1 {
            for target in [out.row_of(-half), out.row_of(half)] {
                let row = coarse.modes.row(r).mapv(|z| 0.5 * z);
                out.modes.row_mut(target).assign(&row);
            }
        } else {
            let target = out.row_of(k);
            out.modes.row_mut(target).assign(&coarse.modes.row(r));
        }
    }
    Ok(inverse_unchecked(&out).with_decay(f.decay))
}

/// Both sides of the partial Parseval identity
/// `‖f‖²_{L²_β(Z)} = Σ_k ‖F_k f‖²_{L²_β(ℝ)}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParsevalCheck {
    pub lhs: Integral,
    pub rhs: f64,
}

pub fn parseval_check(f: &StripField, beta: f64) -> Result<ParsevalCheck> {
    let w = WeightFunction::power(2.0 * beta);
    let lhs = f.product(f).integrate(&w)?;
    let modes = horizontal_transform(f);
    // Σ_k |F_k|² as a field constant in y₁, integrated with the same rule
    let power = modes.modes.mapv(|z| z.norm_sqr()).sum_axis(ndarray::Axis(0));
    let spectral = StripField {
        grid: f.grid,
        values: Array2::from_shape_fn((f.grid.n1, f.grid.n2), |(_, j)| power[j]),
        decay: f.decay.squared(),
    };
    let rhs = spectral.integrate(&w)?.value;
    Ok(ParsevalCheck { lhs, rhs })
}
