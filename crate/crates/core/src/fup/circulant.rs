//! Radial kernels on the equispaced circle grid are circulant, so they act
//! by FFT in O(N log N).

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::Result;
use crate::linalg::{lanczos_top, LanczosResult};

#[derive(Clone)]
pub struct Circulant {
    n: usize,
    /// FFT of the first column.
    spectrum: Vec<Complex64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Circulant {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Circulant").field("n", &self.n).finish()
    }
}

impl Circulant {
    /// The matrix C[j, k] = column[(j − k) mod N].
    pub fn new(column: Vec<Complex64>) -> Self {
        let n = column.len();
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(n);
        let inverse = planner.plan_fft_inverse(n);
        let mut spectrum = column;
        forward.process(&mut spectrum);
        Circulant {
            n,
            spectrum,
            forward,
            inverse,
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Operator norm on the whole circle: the largest |eigenvalue|.
    pub fn norm(&self) -> f64 {
        self.spectrum.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    fn multiply(&self, v: &mut [Complex64], adjoint: bool) {
        self.forward.process(v);
        let scale = 1.0 / self.n as f64;
        for (x, s) in v.iter_mut().zip(&self.spectrum) {
            *x *= if adjoint { s.conj() } else { *s } * scale;
        }
        self.inverse.process(v);
    }

    pub fn apply(&self, v: &mut [Complex64]) {
        self.multiply(v, false)
    }

    pub fn apply_adjoint(&self, v: &mut [Complex64]) {
        self.multiply(v, true)
    }

    /// Largest singular value of diag(left)·C·diag(right). The Lanczos
    /// vectors live on the support of `right` only.
    pub fn weighted_norm(
        &self,
        left: &[f64],
        right: &[f64],
        seed: u64,
        tol: f64,
    ) -> Result<LanczosResult> {
        let support: Vec<usize> = (0..self.n).filter(|&k| right[k] != 0.0).collect();
        let m = support.len();
        let r = lanczos_top(
            m,
            |v, out| {
                let mut full = vec![Complex64::new(0.0, 0.0); self.n];
                for (&k, x) in support.iter().zip(v) {
                    full[k] = x * right[k];
                }
                self.apply(&mut full);
                for (f, l) in full.iter_mut().zip(left) {
                    *f *= l * l;
                }
                self.apply_adjoint(&mut full);
                for (&k, o) in support.iter().zip(out.iter_mut()) {
                    *o = full[k] * right[k];
                }
            },
            seed,
            tol,
            500,
        )?;
        Ok(LanczosResult {
            value: r.value.max(0.0).sqrt(),
            ..r
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::{DMatrix, DVector};

    fn column(n: usize) -> Vec<Complex64> {
        (0..n)
            .map(|k| {
                Complex64::new(
                    (k as f64 * 0.7).sin(),
                    (k as f64 * 0.3).cos() / (1.0 + k as f64),
                )
            })
            .collect()
    }

    #[test]
    fn matches_dense_product() {
        let n = 32;
        let col = column(n);
        let c = Circulant::new(col.clone());
        let dense = DMatrix::from_fn(n, n, |j, k| col[(j + n - k) % n]);
        let v: Vec<Complex64> = (0..n).map(|k| Complex64::new(k as f64, 1.0)).collect();
        let want = &dense * DVector::from_column_slice(&v);
        let want_adj = dense.adjoint() * DVector::from_column_slice(&v);
        let mut got = v.clone();
        c.apply(&mut got);
        let mut got_adj = v.clone();
        c.apply_adjoint(&mut got_adj);
        for k in 0..n {
            assert!((got[k] - want[k]).norm() < 1e-11);
            assert!((got_adj[k] - want_adj[k]).norm() < 1e-11);
        }
    }

    #[test]
    fn weighted_norm_matches_svd() {
        let n = 64;
        let col = column(n);
        let c = Circulant::new(col.clone());
        let left: Vec<f64> = (0..n).map(|k| if k % 3 == 0 { 0.0 } else { 1.0 }).collect();
        let right: Vec<f64> = (0..n).map(|k| if k < 40 { 1.0 } else { 0.0 }).collect();
        let dense = DMatrix::from_fn(n, n, |j, k| col[(j + n - k) % n] * left[j] * right[k]);
        let want = dense.singular_values().max();
        let got = c.weighted_norm(&left, &right, 3, 1e-13).unwrap();
        assert!((got.value - want).abs() < 1e-10 * want);
        let whole = DMatrix::from_fn(n, n, |j, k| col[(j + n - k) % n])
            .singular_values()
            .max();
        assert!((c.norm() - whole).abs() < 1e-10 * whole);
    }
}
