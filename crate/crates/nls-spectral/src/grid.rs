use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use crate::SpectralError;

/// Periodic grid on `[-L/2, L/2)` with `n` nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    n: usize,
    length: f64,
}

impl Grid {
    pub fn new(n: usize, length: f64) -> Result<Self, SpectralError> {
        if n < 8 || !n.is_power_of_two() {
            return Err(SpectralError::BadPointCount(n));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(SpectralError::BadLength(length));
        }
        Ok(Self { n, length })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n as f64
    }

    pub fn x0(&self) -> f64 {
        -0.5 * self.length
    }

    pub fn x(&self, j: usize) -> f64 {
        self.x0() + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Signed index of Fourier mode `m`: `0, 1, .., n/2-1, -n/2, .., -1`.
    pub fn signed_index(&self, m: usize) -> i64 {
        if m < self.n / 2 {
            m as i64
        } else {
            m as i64 - self.n as i64
        }
    }

    pub fn wavenumber(&self, m: usize) -> f64 {
        2.0 * PI * self.signed_index(m) as f64 / self.length
    }

    pub fn wavenumbers(&self) -> Vec<f64> {
        (0..self.n).map(|m| self.wavenumber(m)).collect()
    }

    /// Largest resolved wavenumber, `π / dx`.
    pub fn k_max(&self) -> f64 {
        PI / self.dx()
    }

    /// Same spacing and length up to round-off.
    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n && (self.length - other.length).abs() <= 1e-12 * self.length
    }
}
