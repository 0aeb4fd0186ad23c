use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use crate::{fft, Grid, SpectralError, C64};

/// Complex samples of a function on a [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    grid: Grid,
    values: Vec<C64>,
}

impl Field {
    /// Checked constructor: length must match and every sample must be finite.
    pub fn new(grid: Grid, values: Vec<C64>) -> Result<Self, SpectralError> {
        if values.len() != grid.n() {
            return Err(SpectralError::LengthMismatch {
                expected: grid.n(),
                got: values.len(),
            });
        }
        if let Some(j) = values.iter().position(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(SpectralError::NonFinite(j));
        }
        Ok(Self { grid, values })
    }

    /// Unchecked constructor for internal arithmetic; panics on length mismatch.
    pub fn from_values(grid: Grid, values: Vec<C64>) -> Self {
        assert_eq!(values.len(), grid.n(), "sample count does not match grid");
        Self { grid, values }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, values: vec![C64::new(0.0, 0.0); grid.n()] }
    }

    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> C64) -> Self {
        let values = (0..grid.n()).map(|j| f(grid.x(j))).collect();
        Self { grid, values }
    }

    pub fn from_real_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Self {
        Self::from_fn(grid, |x| C64::new(f(x), 0.0))
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }

    pub fn values(&self) -> &[C64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [C64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<C64> {
        self.values
    }

    pub fn is_finite(&self) -> bool {
        self.values.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    /// Unnormalized DFT coefficients in the grid's mode order.
    pub fn spectrum(&self) -> Vec<C64> {
        let mut s = self.values.clone();
        fft::forward(&mut s);
        s
    }

    pub fn from_spectrum(grid: Grid, mut spectrum: Vec<C64>) -> Self {
        assert_eq!(spectrum.len(), grid.n());
        fft::inverse(&mut spectrum);
        Self { grid, values: spectrum }
    }

    /// Applies the Fourier multiplier `m(k)`.
    pub fn apply_multiplier(&self, m: impl Fn(f64) -> C64) -> Field {
        let mut s = self.spectrum();
        for (idx, c) in s.iter_mut().enumerate() {
            *c *= m(self.grid.wavenumber(idx));
        }
        Field::from_spectrum(self.grid, s)
    }

    pub fn derivative(&self) -> Field {
        self.apply_multiplier(|k| C64::new(0.0, k))
    }

    pub fn second_derivative(&self) -> Field {
        self.apply_multiplier(|k| C64::new(-k * k, 0.0))
    }

    pub fn map(&self, f: impl Fn(C64) -> C64) -> Field {
        Field { grid: self.grid, values: self.values.iter().map(|&c| f(c)).collect() }
    }

    /// Pointwise `f(x_j, u_j)`.
    pub fn map_with_x(&self, f: impl Fn(f64, C64) -> C64) -> Field {
        let g = self.grid;
        Field {
            grid: g,
            values: self.values.iter().enumerate().map(|(j, &c)| f(g.x(j), c)).collect(),
        }
    }

    pub fn conj(&self) -> Field {
        self.map(|c| c.conj())
    }

    /// Pointwise product.
    pub fn pointwise(&self, other: &Field) -> Field {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn zip_with(&self, other: &Field, f: impl Fn(C64, C64) -> C64) -> Field {
        assert!(self.grid.same_as(&other.grid), "fields live on different grids");
        Field {
            grid: self.grid,
            values: self.values.iter().zip(&other.values).map(|(&a, &b)| f(a, b)).collect(),
        }
    }

    /// `self += c * other`.
    pub fn axpy(&mut self, c: C64, other: &Field) {
        assert!(self.grid.same_as(&other.grid), "fields live on different grids");
        for (a, &b) in self.values.iter_mut().zip(&other.values) {
            *a += c * b;
        }
    }

    pub fn scale(&self, c: C64) -> Field {
        self.map(|u| c * u)
    }

    pub fn scale_real(&self, c: f64) -> Field {
        self.map(|u| u * c)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Evaluates the band-limited interpolant at arbitrary points. Points
    /// outside the periodic cell `[-L/2, L/2]` get zero, so decaying fields are
    /// extended to the line rather than periodically.
    pub fn interpolate(&self, points: &[f64]) -> Vec<C64> {
        let spec = self.spectrum();
        let g = self.grid;
        let n = g.n();
        let half = n / 2;
        let dk = 2.0 * std::f64::consts::PI / g.length();
        let inv_n = 1.0 / n as f64;
        let lo = g.x0();
        let hi = -g.x0();
        points
            .iter()
            .map(|&y| {
                if !(lo..=hi).contains(&y) {
                    return C64::new(0.0, 0.0);
                }
                let s = y - lo;
                let step = C64::from_polar(1.0, dk * s);
                let mut acc = spec[0];
                let mut up = C64::new(1.0, 0.0);
                let mut down = C64::new(1.0, 0.0);
                let step_conj = step.conj();
                for m in 1..half {
                    up *= step;
                    down *= step_conj;
                    acc += spec[m] * up + spec[n - m] * down;
                }
                // Nyquist term split evenly between ±k_N keeps the interpolant real for real data.
                acc += spec[half] * (dk * half as f64 * s).cos();
                acc * inv_n
            })
            .collect()
    }
}

macro_rules! binop {
    ($tr:ident, $f:ident, $op:tt) => {
        impl $tr<&Field> for &Field {
            type Output = Field;
            fn $f(self, rhs: &Field) -> Field {
                self.zip_with(rhs, |a, b| a $op b)
            }
        }
        impl $tr<Field> for Field {
            type Output = Field;
            fn $f(self, rhs: Field) -> Field {
                (&self).$f(&rhs)
            }
        }
        impl $tr<&Field> for Field {
            type Output = Field;
            fn $f(self, rhs: &Field) -> Field {
                (&self).$f(rhs)
            }
        }
        impl $tr<Field> for &Field {
            type Output = Field;
            fn $f(self, rhs: Field) -> Field {
                self.$f(&rhs)
            }
        }
    };
}

binop!(Add, add, +);
binop!(Sub, sub, -);

impl AddAssign<&Field> for Field {
    fn add_assign(&mut self, rhs: &Field) {
        self.axpy(C64::new(1.0, 0.0), rhs);
    }
}

impl SubAssign<&Field> for Field {
    fn sub_assign(&mut self, rhs: &Field) {
        self.axpy(C64::new(-1.0, 0.0), rhs);
    }
}

impl Mul<C64> for &Field {
    type Output = Field;
    fn mul(self, c: C64) -> Field {
        self.scale(c)
    }
}

impl Mul<C64> for Field {
    type Output = Field;
    fn mul(self, c: C64) -> Field {
        self.scale(c)
    }
}

impl Mul<f64> for &Field {
    type Output = Field;
    fn mul(self, c: f64) -> Field {
        self.scale_real(c)
    }
}

impl Mul<f64> for Field {
    type Output = Field;
    fn mul(self, c: f64) -> Field {
        self.scale_real(c)
    }
}

impl Neg for &Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale_real(-1.0)
    }
}

impl Neg for Field {
    type Output = Field;
    fn neg(self) -> Field {
        self.scale_real(-1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::I;

    #[test]
    fn rejects_non_finite() {
        let g = Grid::new(8, 1.0).unwrap();
        let mut v = vec![C64::new(0.0, 0.0); 8];
        v[3] = C64::new(f64::NAN, 0.0);
        assert!(matches!(Field::new(g, v), Err(SpectralError::NonFinite(3))));
        assert!(Field::new(g, vec![C64::new(0.0, 0.0); 7]).is_err());
    }

    #[test]
    fn spectrum_round_trip() {
        let g = Grid::new(64, 10.0).unwrap();
        let u = Field::from_fn(g, |x| C64::new((-x * x).exp(), x.sin()));
        let back = Field::from_spectrum(g, u.spectrum());
        for (a, b) in u.values().iter().zip(back.values()) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    #[test]
    fn interpolation_is_exact_at_nodes_and_between_for_band_limited_data() {
        let g = Grid::new(64, 2.0 * std::f64::consts::PI).unwrap();
        let f = |x: f64| (3.0 * x).cos() * I + (5.0 * x).sin() + 0.5;
        let u = Field::from_fn(g, f);
        let pts: Vec<f64> = (0..50).map(|j| -3.1 + 0.123 * j as f64).collect();
        for (p, v) in pts.iter().zip(u.interpolate(&pts)) {
            assert!((v - f(*p)).norm() < 1e-12, "at {p}");
        }
        let nodes = g.nodes();
        for (a, b) in u.values().iter().zip(u.interpolate(&nodes)) {
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn interpolation_zero_outside_cell() {
        let g = Grid::new(64, 10.0).unwrap();
        let u = Field::from_real_fn(g, |x| (-x * x).exp());
        let v = u.interpolate(&[-5.5, 6.0, 0.3]);
        assert_eq!(v[0], C64::new(0.0, 0.0));
        assert_eq!(v[1], C64::new(0.0, 0.0));
        assert!((v[2].re - (-0.09f64).exp()).abs() < 1e-12);
    }
}
