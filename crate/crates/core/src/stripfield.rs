//! Discretization of the strip: a periodic horizontal grid on `[0, 1)`, a
//! truncated uniform vertical grid on `[-L, L]`, sampled fields, quadrature
//! with tail estimates, and differentiation.

use std::fmt::Write as _;
use std::path::Path;

use ndarray::{Array1, Array2};
use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::mft;
use crate::quadrature::simpson_weights;
use crate::weightspaces::WeightFunction;
use crate::{Error, Result};

/// Header of the tabulated field format.
pub const TABLE_HEADER: &str = "y1_index,y2_index,value";

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StripGrid {
    pub n1: usize,
    #[serde(rename = "L")]
    pub half_width: f64,
    pub n2: usize,
}

impl StripGrid {
    pub fn new(n1: usize, half_width: f64, n2: usize) -> Result<Self> {
        if n1 < 4 || !n1.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "n1 = {n1} must be a power of two >= 4"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!("L = {half_width} must be positive")));
        }
        if n2 < 9 || n2 % 2 == 0 {
            return Err(Error::InvalidGrid(format!("n2 = {n2} must be odd and >= 9")));
        }
        Ok(StripGrid { n1, half_width, n2 })
    }

    /// Re-validates a grid obtained through deserialization.
    pub fn validated(self) -> Result<Self> {
        StripGrid::new(self.n1, self.half_width, self.n2)
    }

    pub fn h1(&self) -> f64 {
        1.0 / self.n1 as f64
    }

    pub fn h2(&self) -> f64 {
        2.0 * self.half_width / (self.n2 - 1) as f64
    }

    pub fn y1(&self, i: usize) -> f64 {
        i as f64 / self.n1 as f64
    }

    pub fn y2(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.h2()
    }

    pub fn y2_nodes(&self) -> Array1<f64> {
        Array1::from_iter((0..self.n2).map(|j| self.y2(j)))
    }

    /// Index of the node `y₂ = 0`.
    pub fn center(&self) -> usize {
        (self.n2 - 1) / 2
    }

    /// Index of the vertical node at height `y2`, if `y2` is a node.
    pub fn node_index(&self, y2: f64) -> Option<usize> {
        let t = (y2 + self.half_width) / self.h2();
        let r = t.round();
        if (t - r).abs() < 1e-9 && r >= 0.0 && (r as usize) < self.n2 {
            Some(r as usize)
        } else {
            None
        }
    }

    pub fn points(&self) -> usize {
        self.n1 * self.n2
    }

    /// Same strip with the vertical resolution doubled (`n2 → 2·n2 − 1`).
    pub fn refined(&self) -> StripGrid {
        StripGrid {
            n2: 2 * self.n2 - 1,
            ..*self
        }
    }
}

/// Declared tail behaviour of a field, used to bound truncated integrals.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayClass {
    /// Faster than any power of `ρ`.
    Schwartz,
    /// `|f| ≲ ρ^exponent`.
    Poly(f64),
    /// Polynomial of degree one modulo a decaying part.
    PolyPlusLinear,
}

impl DecayClass {
    /// Power of `ρ` bounding the field, `None` for Schwartz.
    pub fn exponent(&self) -> Option<f64> {
        match *self {
            DecayClass::Schwartz => None,
            DecayClass::Poly(a) => Some(a),
            DecayClass::PolyPlusLinear => Some(1.0),
        }
    }

    /// Class of the pointwise square.
    pub fn squared(&self) -> DecayClass {
        match self.exponent() {
            None => DecayClass::Schwartz,
            Some(a) => DecayClass::Poly(2.0 * a),
        }
    }

    /// Class of the pointwise product with another field.
    pub fn product(&self, other: &DecayClass) -> DecayClass {
        match (self.exponent(), other.exponent()) {
            (None, _) | (_, None) => DecayClass::Schwartz,
            (Some(a), Some(b)) => DecayClass::Poly(a + b),
        }
    }

    /// Class of a derivative of order `order`. Fields are taken to be of
    /// symbol type: each derivative gains one power of decay.
    pub fn differentiated(&self, order: u32) -> DecayClass {
        match self.exponent() {
            _ if order == 0 => *self,
            None => DecayClass::Schwartz,
            Some(a) => DecayClass::Poly(a - order as f64),
        }
    }

    /// Class after multiplication by `y₂^degree`.
    pub fn times_power(&self, degree: u32) -> DecayClass {
        match self.exponent() {
            None => DecayClass::Schwartz,
            Some(a) => DecayClass::Poly(a + degree as f64),
        }
    }
}

/// Value of a truncated integral with the estimated contribution of
/// `|y₂| > L`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Integral {
    pub value: f64,
    pub tail_bound: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Y1,
    Y2,
}

/// Real samples on a [`StripGrid`], stored as `values[[i, j]]` with `i` the
/// horizontal and `j` the vertical node index.
#[derive(Debug, Clone, PartialEq)]
pub struct StripField {
    pub grid: StripGrid,
    pub values: Array2<f64>,
    pub decay: DecayClass,
}

impl StripField {
    pub fn zeros(grid: &StripGrid) -> Self {
        StripField {
            grid: *grid,
            values: Array2::zeros((grid.n1, grid.n2)),
            decay: DecayClass::Schwartz,
        }
    }

    pub fn from_fn<F: Fn(f64, f64) -> f64>(grid: &StripGrid, decay: DecayClass, f: F) -> Self {
        let values = Array2::from_shape_fn((grid.n1, grid.n2), |(i, j)| f(grid.y1(i), grid.y2(j)));
        StripField {
            grid: *grid,
            values,
            decay,
        }
    }

    pub fn from_values(grid: &StripGrid, values: Array2<f64>, decay: DecayClass) -> Result<Self> {
        if values.dim() != (grid.n1, grid.n2) {
            return Err(Error::ShapeMismatch(format!(
                "values have shape {:?}, grid needs ({}, {})",
                values.dim(),
                grid.n1,
                grid.n2
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("field values must be finite".into()));
        }
        Ok(StripField {
            grid: *grid,
            values,
            decay,
        })
    }

    pub fn with_decay(mut self, decay: DecayClass) -> Self {
        self.decay = decay;
        self
    }

    pub fn map<F: Fn(f64) -> f64>(&self, f: F) -> StripField {
        StripField {
            grid: self.grid,
            values: self.values.mapv(f),
            decay: self.decay,
        }
    }

    /// Multiplies every row by `g(y₂)`.
    pub fn times_y2_fn<F: Fn(f64) -> f64>(&self, g: F, decay: DecayClass) -> StripField {
        let mut values = self.values.clone();
        for j in 0..self.grid.n2 {
            let s = g(self.grid.y2(j));
            values.column_mut(j).mapv_inplace(|v| v * s);
        }
        StripField {
            grid: self.grid,
            values,
            decay,
        }
    }

    pub fn add(&self, other: &StripField) -> StripField {
        debug_assert_eq!(self.grid, other.grid);
        StripField {
            grid: self.grid,
            values: &self.values + &other.values,
            decay: wider(self.decay, other.decay),
        }
    }

    pub fn sub(&self, other: &StripField) -> StripField {
        debug_assert_eq!(self.grid, other.grid);
        StripField {
            grid: self.grid,
            values: &self.values - &other.values,
            decay: wider(self.decay, other.decay),
        }
    }

    pub fn scale(&self, s: f64) -> StripField {
        self.map(|v| v * s)
    }

    pub fn product(&self, other: &StripField) -> StripField {
        StripField {
            grid: self.grid,
            values: &self.values * &other.values,
            decay: self.decay.product(&other.decay),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Horizontal average `ū(y₂)` at every vertical node.
    pub fn horizontal_mean(&self) -> Array1<f64> {
        self.values.mean_axis(ndarray::Axis(0)).expect("n1 >= 4")
    }

    /// `‖u(·, y₂)‖_{L²(0,1)}` at every vertical node.
    pub fn slice_norms(&self) -> Array1<f64> {
        let n1 = self.grid.n1 as f64;
        Array1::from_iter(
            self.values
                .columns()
                .into_iter()
                .map(|c| (c.iter().map(|v| v * v).sum::<f64>() / n1).sqrt()),
        )
    }

    /// Periodic trapezoid in `y₁` times composite Simpson in `y₂` of `f · w`,
    /// with a tail estimate derived from the declared decay class.
    pub fn integrate(&self, w: &WeightFunction) -> Result<Integral> {
        let g = &self.grid;
        let sw = simpson_weights(g.n2, g.h2());
        let n1 = g.n1 as f64;
        let mut value = 0.0;
        for j in 0..g.n2 {
            let col: f64 = self.values.column(j).sum();
            value += sw[j] * w.eval(g.y2(j)) * col / n1;
        }
        let tail_bound = self.tail_bound(w)?;
        Ok(Integral { value, tail_bound })
    }

    /// Integral of `f · w` over the sub-window `[a, b]` in `y₂`; partial
    /// cells at the ends are closed with linear interpolation.
    pub fn integrate_window(&self, w: &WeightFunction, a: f64, b: f64) -> f64 {
        let g = &self.grid;
        let h = g.h2();
        let col = |j: usize| self.values.column(j).sum() / g.n1 as f64 * w.eval(g.y2(j));
        let ja = ((a + g.half_width) / h - 1e-9).ceil().max(0.0) as usize;
        let jb = (((b + g.half_width) / h + 1e-9).floor() as usize).min(g.n2 - 1);
        if jb <= ja + 2 {
            // too narrow for Simpson; plain trapezoid
            return (ja..jb).map(|j| 0.5 * h * (col(j) + col(j + 1))).sum();
        }
        let vals: Vec<f64> = (ja..=jb).map(col).collect();
        let sw = simpson_weights(vals.len(), h);
        let mut total: f64 = vals.iter().zip(&sw).map(|(v, s)| v * s).sum();
        let ya = g.y2(ja);
        if ya - a > 1e-12 && ja > 0 {
            let t = (ya - a) / h;
            let va = col(ja) * (1.0 - t) + col(ja - 1) * t;
            total += 0.5 * (ya - a) * (va + col(ja));
        }
        let yb = g.y2(jb);
        if b - yb > 1e-12 && jb + 1 < g.n2 {
            let t = (b - yb) / h;
            let vb = col(jb) * (1.0 - t) + col(jb + 1) * t;
            total += 0.5 * (b - yb) * (vb + col(jb));
        }
        total
    }

    fn tail_bound(&self, w: &WeightFunction) -> Result<f64> {
        let g = &self.grid;
        let n1 = g.n1 as f64;
        let edge = |j: usize| {
            self.values.column(j).iter().map(|v| v.abs()).sum::<f64>() / n1 * w.eval(g.y2(j))
        };
        let boundary = edge(0) + edge(g.n2 - 1);
        let l = g.half_width;
        match self.decay.exponent() {
            None => Ok(boundary),
            Some(a) => {
                let gamma = a + w.alpha;
                let p = w.log_power;
                if gamma < -1.0 - 1e-12 {
                    Ok(boundary * l / (-gamma - 1.0))
                } else if (gamma + 1.0).abs() <= 1e-12 && p < -1 {
                    Ok(boundary * l * (2.0 + l * l).ln() / (2.0 * (-p - 1) as f64))
                } else if boundary == 0.0 {
                    Ok(0.0)
                } else {
                    Err(Error::NonIntegrable(format!(
                        "decay exponent {a} against weight rho^{} ln^{}",
                        w.alpha, p
                    )))
                }
            }
        }
    }

    pub fn differentiate(&self, direction: Direction, order: u32) -> StripField {
        match direction {
            Direction::Y1 => self.differentiate_y1(order),
            Direction::Y2 => self.differentiate_y2(order),
        }
    }

    /// Spectral derivative in the periodic direction.
    fn differentiate_y1(&self, order: u32) -> StripField {
        if order == 0 {
            return self.clone();
        }
        let mut modes = mft::horizontal_transform(self);
        let n1 = self.grid.n1;
        for r in 0..n1 {
            let k = modes.wavenumber(r);
            let mut factor = Complex64::new(0.0, 2.0 * std::f64::consts::PI * k as f64).powu(order);
            // odd derivatives of the unpaired Nyquist mode are not real
            if order % 2 == 1 && k == -(n1 as i64) / 2 {
                factor = Complex64::new(0.0, 0.0);
            }
            modes.modes.row_mut(r).mapv_inplace(|z| z * factor);
        }
        let mut out = mft::inverse_unchecked(&modes);
        out.decay = self.decay.differentiated(order);
        out
    }

    /// Fourth-order finite differences in the vertical direction, one-sided
    /// on the two boundary layers.
    fn differentiate_y2(&self, order: u32) -> StripField {
        let mut out = self.clone();
        let h = self.grid.h2();
        for _ in 0..(order / 2) {
            let prev = out.values.clone();
            for (mut dst, src) in out.values.rows_mut().into_iter().zip(prev.rows()) {
                let s = src.as_slice().expect("standard layout");
                let d = second_derivative_4th(s, h);
                dst.assign(&Array1::from(d));
            }
        }
        if order % 2 == 1 {
            let prev = out.values.clone();
            for (mut dst, src) in out.values.rows_mut().into_iter().zip(prev.rows()) {
                let s = src.as_slice().expect("standard layout");
                dst.assign(&Array1::from(first_derivative_4th(s, h)));
            }
        }
        out.decay = self.decay.differentiated(order);
        out
    }

    /// `∂²₁u + ∂²₂u` with the discretization of [`StripField::differentiate`].
    pub fn laplacian(&self) -> StripField {
        self.differentiate(Direction::Y1, 2)
            .add(&self.differentiate(Direction::Y2, 2))
            .with_decay(self.decay.differentiated(2))
    }

    /// Writes the tabulated format: header then `i,j,value` rows, `i` outer.
    /// Values use the shortest representation that round-trips.
    pub fn to_table(&self) -> String {
        let mut s = String::with_capacity(self.grid.points() * 24);
        s.push_str(TABLE_HEADER);
        s.push('\n');
        for i in 0..self.grid.n1 {
            for j in 0..self.grid.n2 {
                writeln!(s, "{},{},{:?}", i, j, self.values[[i, j]]).expect("string write");
            }
        }
        s
    }

    pub fn write_table(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_table())?;
        Ok(())
    }

    pub fn from_table(grid: &StripGrid, text: &str, decay: DecayClass) -> Result<Self> {
        let mut lines = text.lines();
        match lines.next() {
            Some(h) if h.trim() == TABLE_HEADER => {}
            other => {
                return Err(Error::ShapeMismatch(format!(
                    "expected header `{TABLE_HEADER}`, found {other:?}"
                )))
            }
        }
        let mut values = Array2::zeros((grid.n1, grid.n2));
        let mut count = 0usize;
        for (row, line) in lines.filter(|l| !l.trim().is_empty()).enumerate() {
            let mut parts = line.split(',');
            let mut field = |name: &str| {
                parts
                    .next()
                    .map(str::trim)
                    .ok_or_else(|| Error::ShapeMismatch(format!("row {row}: missing {name}")))
            };
            let i: usize = parse(field("y1_index")?, row)?;
            let j: usize = parse(field("y2_index")?, row)?;
            let v: f64 = parse(field("value")?, row)?;
            if (i, j) != (row / grid.n2, row % grid.n2) || i >= grid.n1 {
                return Err(Error::ShapeMismatch(format!(
                    "row {row}: index ({i}, {j}) out of row-major order for grid {}x{}",
                    grid.n1, grid.n2
                )));
            }
            values[[i, j]] = v;
            count += 1;
        }
        if count != grid.points() {
            return Err(Error::ShapeMismatch(format!(
                "table has {count} rows, grid needs {}",
                grid.points()
            )));
        }
        StripField::from_values(grid, values, decay)
    }

    pub fn read_table(grid: &StripGrid, path: &Path, decay: DecayClass) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        StripField::from_table(grid, &text, decay)
    }
}

fn parse<T: std::str::FromStr>(s: &str, row: usize) -> Result<T> {
    s.parse()
        .map_err(|_| Error::ShapeMismatch(format!("row {row}: cannot parse `{s}`")))
}

fn wider(a: DecayClass, b: DecayClass) -> DecayClass {
    match (a.exponent(), b.exponent()) {
        (None, None) => DecayClass::Schwartz,
        (Some(_), None) => a,
        (None, Some(_)) => b,
        (Some(x), Some(y)) => {
            if x >= y {
                a
            } else {
                b
            }
        }
    }
}

pub(crate) fn first_derivative_4th(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    let c = 1.0 / (12.0 * h);
    d[0] = c * (-25.0 * f[0] + 48.0 * f[1] - 36.0 * f[2] + 16.0 * f[3] - 3.0 * f[4]);
    d[1] = c * (-3.0 * f[0] - 10.0 * f[1] + 18.0 * f[2] - 6.0 * f[3] + f[4]);
    for j in 2..n - 2 {
        d[j] = c * (f[j - 2] - 8.0 * f[j - 1] + 8.0 * f[j + 1] - f[j + 2]);
    }
    d[n - 2] = -c * (-3.0 * f[n - 1] - 10.0 * f[n - 2] + 18.0 * f[n - 3] - 6.0 * f[n - 4] + f[n - 5]);
    d[n - 1] =
        -c * (-25.0 * f[n - 1] + 48.0 * f[n - 2] - 36.0 * f[n - 3] + 16.0 * f[n - 4] - 3.0 * f[n - 5]);
    d
}

pub(crate) fn second_derivative_4th(f: &[f64], h: f64) -> Vec<f64> {
    let n = f.len();
    let mut d = vec![0.0; n];
    let c = 1.0 / (12.0 * h * h);
    let edge0 = |g: &dyn Fn(usize) -> f64| {
        c * (45.0 * g(0) - 154.0 * g(1) + 214.0 * g(2) - 156.0 * g(3) + 61.0 * g(4) - 10.0 * g(5))
    };
    let edge1 = |g: &dyn Fn(usize) -> f64| {
        c * (10.0 * g(0) - 15.0 * g(1) - 4.0 * g(2) + 14.0 * g(3) - 6.0 * g(4) + g(5))
    };
    d[0] = edge0(&|k| f[k]);
    d[1] = edge1(&|k| f[k]);
    d[n - 1] = edge0(&|k| f[n - 1 - k]);
    d[n - 2] = edge1(&|k| f[n - 1 - k]);
    for j in 2..n - 2 {
        d[j] = c * (-f[j - 2] + 16.0 * f[j - 1] - 30.0 * f[j] + 16.0 * f[j + 1] - f[j + 2]);
    }
    d
}

/// Horizontal Fourier representation: row `r` (FFT order) holds the mode of
/// wavenumber [`ModeField::wavenumber`]`(r)` on the vertical grid.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeField {
    pub grid: StripGrid,
    pub modes: Array2<Complex64>,
}

impl ModeField {
    pub fn zeros(grid: &StripGrid) -> Self {
        ModeField {
            grid: *grid,
            modes: Array2::zeros((grid.n1, grid.n2)),
        }
    }

    /// Wavenumber `k ∈ {−n1/2, …, n1/2 − 1}` stored in row `r`.
    pub fn wavenumber(&self, r: usize) -> i64 {
        let n1 = self.grid.n1;
        if r < n1 / 2 {
            r as i64
        } else {
            r as i64 - n1 as i64
        }
    }

    /// Row holding wavenumber `k`.
    pub fn row_of(&self, k: i64) -> usize {
        let n1 = self.grid.n1 as i64;
        assert!(k >= -n1 / 2 && k < n1 / 2, "wavenumber {k} not resolved");
        k.rem_euclid(n1) as usize
    }

    pub fn mode(&self, k: i64) -> ndarray::ArrayView1<'_, Complex64> {
        self.modes.row(self.row_of(k))
    }

    /// Largest `|F_{-k} − conj(F_k)|` over resolved pairs.
    pub fn conjugate_asymmetry(&self) -> f64 {
        let n1 = self.grid.n1 as i64;
        let mut worst: f64 = 0.0;
        for k in 1..n1 / 2 {
            let a = self.mode(k);
            let b = self.mode(-k);
            for (x, y) in a.iter().zip(b.iter()) {
                worst = worst.max((x.conj() - y).norm());
            }
        }
        let nyq = self.mode(-n1 / 2);
        let zero = self.mode(0);
        for z in nyq.iter().chain(zero.iter()) {
            worst = worst.max(z.im.abs());
        }
        worst
    }
}
