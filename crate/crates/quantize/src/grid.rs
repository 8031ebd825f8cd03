use std::f64::consts::PI;

use crate::QuantizeError;

/// Periodic grid `x_i = -L + i dx`, `dx = 2L/M`, with dual frequencies
/// `xi_k = h pi k / L`, `k in [-M/2, M/2)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridSpec {
    pub l: f64,
    pub m: usize,
    pub h: f64,
}

impl GridSpec {
    pub fn new(l: f64, m: usize, h: f64) -> Result<Self, QuantizeError> {
        if !(l > 0.0 && l.is_finite()) {
            return Err(QuantizeError::Grid(format!("L must be positive, got {l}")));
        }
        if m < 64 || !m.is_power_of_two() {
            return Err(QuantizeError::Grid(format!("M must be a power of two >= 64, got {m}")));
        }
        if !(h > 0.0 && h <= 1.0) {
            return Err(QuantizeError::Grid(format!("h must lie in (0, 1], got {h}")));
        }
        Ok(Self { l, m, h })
    }

    pub fn with_h(&self, h: f64) -> Result<Self, QuantizeError> {
        Self::new(self.l, self.m, h)
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.l / self.m as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        -self.l + i as f64 * self.dx()
    }

    pub fn xs(&self) -> Vec<f64> {
        (0..self.m).map(|i| self.x(i)).collect()
    }

    /// Signed frequency index of FFT bin `j`.
    pub fn freq(&self, j: usize) -> i64 {
        let m = self.m as i64;
        let j = j as i64;
        if j < m / 2 {
            j
        } else {
            j - m
        }
    }

    /// `xi` of FFT bin `j`.
    pub fn xi_bin(&self, j: usize) -> f64 {
        self.h * PI * self.freq(j) as f64 / self.l
    }

    /// Dual grid in natural order `k = -M/2 .. M/2 - 1`.
    pub fn xis(&self) -> Vec<f64> {
        let m = self.m as i64;
        (-m / 2..m / 2).map(|k| self.h * PI * k as f64 / self.l).collect()
    }

    pub fn xi_max(&self) -> f64 {
        self.h * PI * (self.m / 2) as f64 / self.l
    }
}
