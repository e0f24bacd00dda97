//! Equispaced quadrature on the circle ℝ ∪ {∞} ≅ 𝕊¹.
//!
//! With x = tan(θ/2) the measure dP(x) = 2⟨x⟩⁻²dx is dθ, so the midpoint
//! rule in θ is spectrally accurate for smooth functions on the circle. The
//! half-cell offset keeps ∞ (θ = π) off the grid.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct CircleGrid {
    n: usize,
    theta: Vec<f64>,
    x: Vec<f64>,
}

impl CircleGrid {
    pub fn new(n: usize) -> Result<Self> {
        if n < 8 {
            return Err(Error::param("n", "the circle grid needs at least 8 points"));
        }
        let theta: Vec<f64> = (0..n)
            .map(|j| -PI + 2.0 * PI * (j as f64 + 0.5) / n as f64)
            .collect();
        let x = theta.iter().map(|t| (t / 2.0).tan()).collect();
        Ok(CircleGrid { n, theta, x })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Quadrature weight of every node, 2π/N.
    pub fn weight(&self) -> f64 {
        2.0 * PI / self.n as f64
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    /// Extended-real coordinates; always finite on this grid.
    pub fn x(&self) -> &[f64] {
        &self.x
    }

    /// ∫ f dP for f given in the x coordinate.
    pub fn integrate<F: Fn(f64) -> f64>(&self, f: F) -> f64 {
        self.weight() * self.x.iter().map(|&x| f(x)).sum::<f64>()
    }
}

/// Smallest power of two that is at least 40/h, so the phase 2 log|y−y′|/h
/// gets several points per oscillation at unit separation.
pub fn grid_size_for(h: f64) -> usize {
    (40.0 / h).ceil().max(8.0) as usize
}

pub(crate) fn pow2_grid_size(h: f64) -> usize {
    grid_size_for(h).next_power_of_two()
}
