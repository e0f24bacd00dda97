//! Small numerical kernels: least-squares lines, Lanczos for the top of a
//! Hermitian spectrum, and power iteration for Perron eigenvalues.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    /// Root mean square of the residuals y − (slope·x + intercept).
    pub rms_residual: f64,
}

/// Ordinary least-squares line through (x, y).
pub fn fit_line(x: &[f64], y: &[f64]) -> Result<LineFit> {
    if x.len() != y.len() {
        return Err(Error::param("samples", "x and y differ in length"));
    }
    if x.len() < 2 {
        return Err(Error::TooFewSamples {
            needed: 2,
            got: x.len(),
        });
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx) * (v - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    if !(sxx > 0.0) {
        return Err(Error::param("samples", "x values are all equal"));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| (b - slope * a - intercept).powi(2))
        .sum();
    Ok(LineFit {
        slope,
        intercept,
        rms_residual: (ss / n).sqrt(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LanczosResult {
    /// Largest eigenvalue of the operator.
    pub value: f64,
    /// Residual bound |β_k·y_k| of the top Ritz pair.
    pub residual: f64,
    pub steps: usize,
}

/// Largest eigenvalue of a Hermitian positive semidefinite operator by
/// Lanczos with full reorthogonalisation, started from a seeded random
/// vector. Stops when the Ritz residual drops below `tol`·value.
pub fn lanczos_top<F>(
    n: usize,
    apply: F,
    seed: u64,
    tol: f64,
    max_steps: usize,
) -> Result<LanczosResult>
where
    F: Fn(&[Complex64], &mut [Complex64]),
{
    if n == 0 {
        return Ok(LanczosResult {
            value: 0.0,
            residual: 0.0,
            steps: 0,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut q: Vec<Complex64> = (0..n)
        .map(|_| Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    normalize(&mut q);
    let max_steps = max_steps.min(n);
    let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(max_steps);
    let mut alphas: Vec<f64> = Vec::new();
    let mut betas: Vec<f64> = Vec::new();
    let mut w = vec![Complex64::new(0.0, 0.0); n];
    let mut last = (0.0, f64::INFINITY);
    for k in 0..max_steps {
        apply(&q, &mut w);
        let alpha = dot(&q, &w).re;
        basis.push(q.clone());
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for v in &basis {
                let c = dot(v, &w);
                for (wi, vi) in w.iter_mut().zip(v) {
                    *wi -= c * vi;
                }
            }
        }
        let beta = norm(&w);
        alphas.push(alpha);
        let (value, weight) = top_ritz(&alphas, &betas);
        let residual = beta * weight.abs();
        last = (value, residual);
        if residual <= tol * value.abs().max(f64::MIN_POSITIVE) || beta <= 1e-300 || k + 1 == n {
            return Ok(LanczosResult {
                value,
                residual,
                steps: k + 1,
            });
        }
        betas.push(beta);
        q = w.iter().map(|x| x / beta).collect();
    }
    Err(Error::NotConverged {
        what: "Lanczos iteration",
        last_change: last.1 / last.0.abs().max(f64::MIN_POSITIVE),
    })
}

/// Top eigenvalue of the tridiagonal matrix and the last component of its
/// eigenvector.
fn top_ritz(alphas: &[f64], betas: &[f64]) -> (f64, f64) {
    let k = alphas.len();
    let mut t = DMatrix::<f64>::zeros(k, k);
    for i in 0..k {
        t[(i, i)] = alphas[i];
        if i + 1 < k {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let eig = t.symmetric_eigen();
    let (imax, value) =
        eig.eigenvalues
            .iter()
            .enumerate()
            .fold(
                (0, f64::NEG_INFINITY),
                |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc },
            );
    (value, eig.eigenvectors[(k - 1, imax)])
}

pub(crate) fn dot(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub(crate) fn norm(a: &[Complex64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

fn normalize(a: &mut [Complex64]) {
    let n = norm(a);
    for x in a {
        *x /= n;
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerronResult {
    pub value: f64,
    pub vector: DVector<f64>,
    pub residual: f64,
    pub iterations: usize,
}

/// Dominant eigenvalue of a real matrix with a positive dominant eigenvector,
/// by power iteration from the all-ones vector.
pub fn power_iteration(a: &DMatrix<f64>, tol: f64, max_iter: usize) -> Result<PerronResult> {
    let n = a.nrows();
    let mut v = DVector::<f64>::from_element(n, 1.0 / (n as f64).sqrt());
    let mut residual = f64::INFINITY;
    for it in 1..=max_iter {
        let w = a * &v;
        let value = v.dot(&w);
        residual = (&w - &v * value).norm();
        let wn = w.norm();
        if wn == 0.0 {
            return Ok(PerronResult {
                value: 0.0,
                vector: v,
                residual: 0.0,
                iterations: it,
            });
        }
        if residual <= tol * value.abs() {
            return Ok(PerronResult {
                value,
                vector: v,
                residual,
                iterations: it,
            });
        }
        v = w / wn;
    }
    Err(Error::NotConverged {
        what: "power iteration",
        last_change: residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_line() {
        let x: Vec<f64> = (0..6).map(|i| i as f64).collect();
        let y: Vec<f64> = x.iter().map(|v| 0.5 * v - 2.0).collect();
        let f = fit_line(&x, &y).unwrap();
        assert!((f.slope - 0.5).abs() < 1e-14);
        assert!((f.intercept + 2.0).abs() < 1e-14);
        assert!(f.rms_residual < 1e-14);
        assert!(fit_line(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn lanczos_matches_dense_eigenvalue() {
        let n = 60;
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let b = DMatrix::<Complex64>::from_fn(n, n, |_, _| {
            Complex64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
        });
        let h = b.adjoint() * &b;
        let want = h.clone().symmetric_eigen().eigenvalues.max();
        let apply = |x: &[Complex64], y: &mut [Complex64]| {
            let v = &h * DVector::from_column_slice(x);
            y.copy_from_slice(v.as_slice());
        };
        for seed in [1, 2] {
            let got = lanczos_top(n, apply, seed, 1e-12, 200).unwrap();
            assert!(
                (got.value - want).abs() < 1e-9 * want,
                "{} {}",
                got.value,
                want
            );
        }
    }

    #[test]
    fn power_iteration_on_positive_matrix() {
        let a = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        let p = power_iteration(&a, 1e-13, 1000).unwrap();
        assert!((p.value - 3.0).abs() < 1e-12);
    }
}
