//! Equidistant discretization of a continuum interval.

use std::f64::consts::TAU;

use crate::error::{Error, Result};

/// An equidistant grid of continuum modes over `[min, max]`.
///
/// Modes sit at interval midpoints, `min + spacing * (j + 1/2)`. The midpoint
/// convention avoids a zero-frequency mode when the interval starts at zero
/// and keeps the grid symmetric about the interval center.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    min: f64,
    max: f64,
    values: Vec<f64>,
}

/// Build an equidistant midpoint grid of `n_modes` modes over `[min, max]`.
pub fn build_mode_grid(min: f64, max: f64, n_modes: usize) -> Result<ModeGrid> {
    ModeGrid::new(min, max, n_modes)
}

impl ModeGrid {
    pub fn new(min: f64, max: f64, n_modes: usize) -> Result<Self> {
        if !(min.is_finite() && max.is_finite()) {
            return Err(Error::invalid("mode grid bounds must be finite"));
        }
        if min < 0.0 {
            return Err(Error::invalid(format!(
                "mode grid lower bound must be nonnegative, got {min}"
            )));
        }
        if max <= min {
            return Err(Error::invalid(format!(
                "mode grid needs max > min, got [{min}, {max}]"
            )));
        }
        if n_modes == 0 {
            return Err(Error::invalid("mode grid needs at least one mode"));
        }
        let spacing = (max - min) / n_modes as f64;
        let values = (0..n_modes)
            .map(|j| min + spacing * (j as f64 + 0.5))
            .collect();
        Ok(ModeGrid { min, max, values })
    }

    pub fn min(&self) -> f64 {
        self.min
    }

    pub fn max(&self) -> f64 {
        self.max
    }

    pub fn n_modes(&self) -> usize {
        self.values.len()
    }

    /// Constant spacing between neighboring modes.
    pub fn spacing(&self) -> f64 {
        (self.max - self.min) / self.values.len() as f64
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Revival time `2π / spacing` of the discretized continuum. Simulations
    /// must end well before it; by then the finite grid re-concentrates the
    /// emitted amplitude.
    pub fn recurrence_time(&self) -> f64 {
        TAU / self.spacing()
    }

    /// Discrete-Fourier conjugate spatial grid: `n_modes` points with spacing
    /// `2π / (spacing * n_modes)`, covering one spatial period.
    pub fn conjugate_grid(&self) -> Vec<f64> {
        let n = self.n_modes();
        let dx = self.recurrence_time() / n as f64;
        (0..n).map(|m| m as f64 * dx).collect()
    }

    /// Index of the mode closest to `freq`.
    pub fn nearest(&self, freq: f64) -> usize {
        let s = self.spacing();
        let j = ((freq - self.min) / s - 0.5).round();
        (j.max(0.0) as usize).min(self.n_modes() - 1)
    }
}
