//! F_h f(ξ) = ∫ f(x) e^{−ixξ/h} dx for f sampled on a uniform window.

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};

/// Values at a + k(b − a)/(n − 1), k = 0..n.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledFunction {
    pub a: f64,
    pub b: f64,
    pub values: Vec<Complex64>,
}

impl SampledFunction {
    pub fn from_fn<F: Fn(f64) -> Complex64>(a: f64, b: f64, n: usize, f: F) -> Result<Self> {
        if n < 2 || !(b > a) {
            return Err(Error::param(
                "window",
                "need b > a and at least two samples",
            ));
        }
        let dx = (b - a) / (n - 1) as f64;
        Ok(SampledFunction {
            a,
            b,
            values: (0..n).map(|k| f(a + k as f64 * dx)).collect(),
        })
    }

    pub fn step(&self) -> f64 {
        (self.b - self.a) / (self.values.len() - 1) as f64
    }

    pub fn point(&self, k: usize) -> f64 {
        self.a + k as f64 * self.step()
    }

    /// ∫|f|² dx by the trapezoid rule.
    pub fn l2_norm_sqr(&self) -> f64 {
        let n = self.values.len();
        let inner: f64 = self.values.iter().map(|v| v.norm_sqr()).sum();
        self.step() * (inner - 0.5 * (self.values[0].norm_sqr() + self.values[n - 1].norm_sqr()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FourierTransform {
    pub xi: Vec<f64>,
    pub values: Vec<Complex64>,
    /// f exceeds 1e−12 at an end of the window, so the transform sees a
    /// truncated function.
    pub clipped: bool,
}

const CLIP_LEVEL: f64 = 1e-12;

/// Trapezoid rule, which is spectrally accurate for smooth f vanishing at
/// the window ends. The phase e^{−ix_kξ/h} is advanced by multiplication
/// along the samples and re-anchored every 256 steps.
pub fn semiclassical_fourier(f: &SampledFunction, h: f64, xi: &[f64]) -> Result<FourierTransform> {
    if !(h > 0.0) {
        return Err(Error::param("h", "must be positive"));
    }
    let n = f.values.len();
    let dx = f.step();
    let clipped = f.values[0].norm() > CLIP_LEVEL || f.values[n - 1].norm() > CLIP_LEVEL;
    let values = xi
        .par_iter()
        .map(|&q| {
            let rate = -q / h;
            let rot = Complex64::from_polar(1.0, rate * dx);
            let mut acc = Complex64::new(0.0, 0.0);
            let mut ph = Complex64::new(0.0, 0.0);
            for (k, v) in f.values.iter().enumerate() {
                if k % 256 == 0 {
                    ph = Complex64::from_polar(1.0, rate * f.point(k));
                }
                let wgt = if k == 0 || k == n - 1 { 0.5 } else { 1.0 };
                acc += v * ph * wgt;
                ph *= rot;
            }
            acc * dx
        })
        .collect();
    Ok(FourierTransform {
        xi: xi.to_vec(),
        values,
        clipped,
    })
}
