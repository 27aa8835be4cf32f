//! Registry of analytic source and test fields.
//!
//! Every preset is a closed-form function of `(y₁, y₂)`, periodic in `y₁`,
//! with a declared [`DecayClass`].

use std::collections::BTreeMap;
use std::f64::consts::PI;

use crate::stripfield::{DecayClass, StripField, StripGrid};
use crate::{Error, Result};

pub type Params = BTreeMap<String, f64>;

/// Fixed suite of Schwartz sources with vanishing mean `⟨f, 1⟩ = 0`.
pub const SUITE: [&str; 12] = [
    "manufactured",
    "hermite_mean",
    "dipole_mean",
    "mode2_shifted",
    "sine_mode1_shifted",
    "odd_mode1",
    "hermite_shifted",
    "hermite_wide",
    "mode3_narrow",
    "sin_mode2",
    "cubic_dipole",
    "mixed_suite",
];

/// Members of [`SUITE`] with both `⟨f, 1⟩ = 0` and `⟨f, y₂⟩ = 0`.
pub const ZERO_MOMENT: [&str; 5] = [
    "manufactured",
    "hermite_mean",
    "mode2_shifted",
    "hermite_shifted",
    "mode3_narrow",
];

pub const NAMES: [&str; 27] = [
    "zero",
    "gaussian_mode1",
    "manufactured",
    "hermite_mean",
    "gaussian_mean",
    "dipole_mean",
    "moment_10",
    "moment_01",
    "moment_00",
    "mode2_shifted",
    "sine_mode1_shifted",
    "odd_mode1",
    "hermite_shifted",
    "hermite_wide",
    "mode3_narrow",
    "sin_mode2",
    "cubic_dipole",
    "mixed_suite",
    "bump",
    "bump_laplacian",
    "dipole_bumps",
    "constructive_pair",
    "rho_power",
    "decaying_mode1",
    "one",
    "linear",
    "quadratic",
];

/// Analytic field with its declared decay.
pub struct Preset {
    pub name: String,
    pub decay: DecayClass,
    eval: Box<dyn Fn(f64, f64) -> f64 + Send + Sync>,
}

impl std::fmt::Debug for Preset {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Preset")
            .field("name", &self.name)
            .field("decay", &self.decay)
            .finish()
    }
}

impl Preset {
    pub fn eval(&self, y1: f64, y2: f64) -> f64 {
        (self.eval)(y1, y2)
    }

    pub fn sample(&self, grid: &StripGrid) -> StripField {
        StripField::from_fn(grid, self.decay, |y1, y2| self.eval(y1, y2))
    }
}

fn gauss(y: f64) -> f64 {
    (-y * y).exp()
}

/// `C^∞` bump `exp(−1/(1−t²))` supported in `|t| < 1`.
pub fn smooth_bump(t: f64) -> f64 {
    if t.abs() >= 1.0 {
        0.0
    } else {
        (-1.0 / (1.0 - t * t)).exp()
    }
}

/// Signed periodic offset of `y₁` from `c`, in `[-1/2, 1/2)`.
fn periodic_offset(y1: f64, c: f64) -> f64 {
    let d = y1 - c;
    d - d.round()
}

fn take(params: &Params, allowed: &[(&str, f64)], name: &str) -> Result<Vec<f64>> {
    for key in params.keys() {
        if !allowed.iter().any(|(k, _)| k == key) {
            return Err(Error::InvalidArgument(format!(
                "preset `{name}` has no parameter `{key}`"
            )));
        }
    }
    Ok(allowed
        .iter()
        .map(|(k, d)| params.get(*k).copied().unwrap_or(*d))
        .collect())
}

pub fn lookup(name: &str, params: &Params) -> Result<Preset> {
    let two_pi = 2.0 * PI;
    let sqrt_pi = PI.sqrt();
    let none = |p: &Params| take(p, &[], name);
    let (decay, eval): (DecayClass, Box<dyn Fn(f64, f64) -> f64 + Send + Sync>) = match name {
        "zero" => {
            none(params)?;
            (DecayClass::Schwartz, Box::new(|_, _| 0.0))
        }
        "one" => {
            none(params)?;
            (DecayClass::Poly(0.0), Box::new(|_, _| 1.0))
        }
        "linear" => {
            none(params)?;
            (DecayClass::Poly(1.0), Box::new(|_, y2| y2))
        }
        "quadratic" => {
            none(params)?;
            (DecayClass::Poly(2.0), Box::new(|_, y2| y2 * y2))
        }
        "gaussian_mode1" => {
            none(params)?;
            (DecayClass::Schwartz, Box::new(move |y1, y2| (two_pi * y1).cos() * gauss(y2)))
        }
        "manufactured" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| {
                    (4.0 * PI * PI + 2.0 - 4.0 * y2 * y2) * (two_pi * y1).cos() * gauss(y2)
                }),
            )
        }
        "hermite_mean" => {
            none(params)?;
            (DecayClass::Schwartz, Box::new(|_, y2| (2.0 - 4.0 * y2 * y2) * gauss(y2)))
        }
        "gaussian_mean" => {
            none(params)?;
            (DecayClass::Schwartz, Box::new(move |_, y2| gauss(y2) / sqrt_pi))
        }
        "dipole_mean" => {
            none(params)?;
            (DecayClass::Schwartz, Box::new(move |_, y2| 2.0 * y2 * gauss(y2) / sqrt_pi))
        }
        "moment_10" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| gauss(y2) / sqrt_pi + (two_pi * y1).cos() * gauss(y2)),
            )
        }
        "moment_01" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| {
                    2.0 * y2 * gauss(y2) / sqrt_pi + (two_pi * y1).cos() * gauss(y2)
                }),
            )
        }
        "moment_00" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| {
                    (2.0 - 4.0 * y2 * y2) * gauss(y2) + (two_pi * y1).cos() * gauss(y2)
                }),
            )
        }
        "mode2_shifted" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| (2.0 * two_pi * y1).cos() * gauss(y2 - 0.5)),
            )
        }
        "sine_mode1_shifted" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| (two_pi * y1).sin() * gauss(y2 - 1.0)),
            )
        }
        "odd_mode1" => {
            none(params)?;
            (DecayClass::Schwartz, Box::new(move |y1, y2| (two_pi * y1).cos() * y2 * gauss(y2)))
        }
        "hermite_shifted" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(|_, y2| {
                    let t = y2 - 1.0;
                    (2.0 - 4.0 * t * t) * gauss(t)
                }),
            )
        }
        "hermite_wide" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(|_, y2| (1.0 - y2 * y2) * (-0.5 * y2 * y2).exp()),
            )
        }
        "mode3_narrow" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| (3.0 * two_pi * y1).cos() * (-2.0 * y2 * y2).exp()),
            )
        }
        "sin_mode2" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| (2.0 * two_pi * y1).sin() * gauss(y2)),
            )
        }
        "cubic_dipole" => {
            none(params)?;
            (DecayClass::Schwartz, Box::new(|_, y2| y2 * y2 * y2 * gauss(y2)))
        }
        "mixed_suite" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| {
                    (2.0 - 4.0 * y2 * y2) * gauss(y2) + (two_pi * y1).cos() * gauss(y2 + 0.5)
                }),
            )
        }
        "decaying_mode1" => {
            none(params)?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| (two_pi * y1).cos() * (-two_pi * y2.abs()).exp()),
            )
        }
        "rho_power" => {
            let p = take(params, &[("exponent", -3.0)], name)?;
            let e = p[0];
            (
                DecayClass::Poly(e),
                Box::new(move |_, y2| (1.0 + y2 * y2).powf(0.5 * e)),
            )
        }
        "bump" => {
            let p = take(params, &[("radius", 0.3)], name)?;
            let a = check_radius(p[0])?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| {
                    let d = periodic_offset(y1, 0.0);
                    let s = (d * d + y2 * y2) / (a * a);
                    if s >= 1.0 {
                        0.0
                    } else {
                        (-1.0 / (1.0 - s)).exp()
                    }
                }),
            )
        }
        "bump_laplacian" => {
            let p = take(params, &[("radius", 0.3)], name)?;
            let a = check_radius(p[0])?;
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| {
                    let d = periodic_offset(y1, 0.0);
                    let s = (d * d + y2 * y2) / (a * a);
                    if s >= 1.0 {
                        return 0.0;
                    }
                    let om = 1.0 - s;
                    let psi = (-1.0 / om).exp();
                    -4.0 / (a * a) * psi * (s * s + s - 1.0) / (om * om * om * om)
                }),
            )
        }
        "dipole_bumps" => {
            let p = take(params, &[("width", 0.08)], name)?;
            let w = p[0];
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| {
                    let a = periodic_offset(y1, 0.25);
                    let b = periodic_offset(y1, 0.75);
                    let g = |d: f64| (-(d * d + y2 * y2) / (w * w)).exp();
                    (g(a) - g(b)) / (PI * w * w)
                }),
            )
        }
        "constructive_pair" => {
            let p = take(params, &[("R", 2.0), ("offset", 2.5)], name)?;
            let c = p[0] + p[1];
            (
                DecayClass::Schwartz,
                Box::new(move |y1, y2| {
                    smooth_bump(y2 - c) * (1.0 + (two_pi * y1).cos())
                        - smooth_bump(y2 + c) * (1.0 + (2.0 * two_pi * y1).sin())
                }),
            )
        }
        other => return Err(Error::UnknownPreset(other.to_string())),
    };
    Ok(Preset {
        name: name.to_string(),
        decay,
        eval,
    })
}

fn check_radius(a: f64) -> Result<f64> {
    if a > 0.0 && a < 0.5 {
        Ok(a)
    } else {
        Err(Error::InvalidArgument(format!(
            "bump radius {a} must lie in (0, 1/2)"
        )))
    }
}

pub fn sample(name: &str, params: &Params, grid: &StripGrid) -> Result<StripField> {
    Ok(lookup(name, params)?.sample(grid))
}

pub fn eval(name: &str, params: &Params, y1: f64, y2: f64) -> Result<f64> {
    Ok(lookup(name, params)?.eval(y1, y2))
}
