//! Norms of B_χ(h) restricted to neighbourhoods of the limit set, and the
//! decay exponent fitted across a ladder of h.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fup::circulant::Circulant;
use crate::fup::cutoff::{Bump, RadialCutoff};
use crate::fup::grid::{pow2_grid_size, CircleGrid};
use crate::linalg::fit_line;
use crate::partition::limit_set_cover;
use crate::schottky::SchottkyData;

/// Relative tolerance on the top eigenvalue of the normal operator.
const NORM_TOL: f64 = 1e-10;
/// Two seeded restarts must agree to this relative accuracy.
const RESTART_AGREEMENT: f64 = 1e-8;
/// N·h below this leaves the kernel phase unresolved.
const MIN_POINTS_PER_H: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormMeasurement {
    pub h: f64,
    pub rho: f64,
    pub c0: f64,
    pub n_grid: usize,
    pub restricted_norm: f64,
    /// ‖B_χ(h)‖ on the whole circle at the same N.
    pub whole_norm: f64,
    /// Fraction of grid points inside the mask.
    pub mask_fraction: f64,
    /// Relative disagreement of the two restarts.
    pub restart_delta: f64,
    /// |norm(2N) − norm(N)|, when measured.
    pub doubling_delta: Option<f64>,
}

/// Circulant B_χ(h) on N points: kernel (2πh)^{−1/2}|y−y′|^{−2i/h}χ times 2π/N.
pub fn circulant_b_chi(h: f64, chi: &RadialCutoff, n: usize) -> Result<Circulant> {
    if !(h > 0.0) {
        return Err(Error::param("h", "must be positive"));
    }
    if (n as f64) * h < MIN_POINTS_PER_H {
        return Err(Error::GridTooCoarse {
            n,
            h,
            product: n as f64 * h,
        });
    }
    let pref = (2.0 * PI * h).powf(-0.5) * 2.0 * PI / n as f64;
    let column = (0..n)
        .into_par_iter()
        .map(|d| {
            let chord = 2.0 * (PI * d as f64 / n as f64).sin().abs();
            let c = if d == 0 { 0.0 } else { chi.profile(chord) };
            if c == 0.0 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::from_polar(pref * c, -2.0 / h * chord.ln())
            }
        })
        .collect();
    Ok(Circulant::new(column))
}

/// 1 on grid points inside Λ(C₀h^ρ), the τ = h^ρ cover inflated by C₀h^ρ.
pub fn limit_set_mask(
    data: &SchottkyData,
    grid: &CircleGrid,
    h: f64,
    rho: f64,
    c0: f64,
) -> Result<Vec<f64>> {
    let tau = h.powf(rho);
    let cover = limit_set_cover(data, tau, c0 * tau)?;
    let merged = cover.merged();
    Ok(grid
        .x()
        .iter()
        .map(|&x| {
            let i = merged.partition_point(|iv| iv.left <= x);
            if i > 0 && merged[i - 1].right >= x {
                1.0
            } else {
                0.0
            }
        })
        .collect())
}

fn check_params(h: f64, rho: f64, c0: f64) -> Result<()> {
    if !(h > 0.0 && h < 1.0) {
        return Err(Error::param("h", "must lie in (0, 1)"));
    }
    if !(rho > 0.0 && rho < 1.0) {
        return Err(Error::param("rho", "must lie in (0, 1)"));
    }
    if !(c0 > 0.0) {
        return Err(Error::param("C0", "must be positive"));
    }
    Ok(())
}

/// ‖1_Λ B_χ(h) 1_Λ‖ with Λ = Λ(C₀h^ρ), on the power-of-two grid N ≥ 40/h.
pub fn restricted_norm(
    data: &SchottkyData,
    h: f64,
    rho: f64,
    c0: f64,
    chi: &RadialCutoff,
    seed: u64,
) -> Result<NormMeasurement> {
    restricted_norm_on(data, h, rho, c0, chi, pow2_grid_size(h), seed)
}

/// [`restricted_norm`] on an explicit grid size.
pub fn restricted_norm_on(
    data: &SchottkyData,
    h: f64,
    rho: f64,
    c0: f64,
    chi: &RadialCutoff,
    n: usize,
    seed: u64,
) -> Result<NormMeasurement> {
    check_params(h, rho, c0)?;
    let op = circulant_b_chi(h, chi, n)?;
    let grid = CircleGrid::new(n)?;
    let mask = limit_set_mask(data, &grid, h, rho, c0)?;
    let (a, b) = rayon::join(
        || op.weighted_norm(&mask, &mask, seed, NORM_TOL),
        || op.weighted_norm(&mask, &mask, seed.wrapping_add(1), NORM_TOL),
    );
    let (a, b) = (a?, b?);
    let restart_delta = (a.value - b.value).abs() / a.value.max(f64::MIN_POSITIVE);
    if restart_delta > RESTART_AGREEMENT {
        return Err(Error::NotConverged {
            what: "restricted norm restarts",
            last_change: restart_delta,
        });
    }
    Ok(NormMeasurement {
        h,
        rho,
        c0,
        n_grid: n,
        restricted_norm: a.value.max(b.value),
        whole_norm: op.norm(),
        mask_fraction: mask.iter().sum::<f64>() / n as f64,
        restart_delta,
        doubling_delta: None,
    })
}

/// [`restricted_norm`] together with the change under N → 2N.
pub fn restricted_norm_certified(
    data: &SchottkyData,
    h: f64,
    rho: f64,
    c0: f64,
    chi: &RadialCutoff,
    seed: u64,
) -> Result<NormMeasurement> {
    let n = pow2_grid_size(h);
    let (a, b) = rayon::join(
        || restricted_norm_on(data, h, rho, c0, chi, n, seed),
        || restricted_norm_on(data, h, rho, c0, chi, 2 * n, seed),
    );
    let (mut a, b) = (a?, b?);
    a.doubling_delta = Some((a.restricted_norm - b.restricted_norm).abs());
    Ok(a)
}

/// Restricted norms over a ladder of h, in parallel, optionally with the
/// N-doubling certificate.
pub fn norm_scan(
    data: &SchottkyData,
    hs: &[f64],
    rho: f64,
    c0: f64,
    chi: &RadialCutoff,
    seed: u64,
    certify: bool,
) -> Result<Vec<NormMeasurement>> {
    hs.par_iter()
        .map(|&h| {
            if certify {
                restricted_norm_certified(data, h, rho, c0, chi, seed)
            } else {
                restricted_norm(data, h, rho, c0, chi, seed)
            }
        })
        .collect()
}

/// Circulant B(s) on N points: |Im s/2π|^{1/2}|x−x′|_S^{−2s} times 2π/N,
/// with the diagonal entry set to zero. Only meaningful between weights
/// with separated supports.
pub fn circulant_b_s(s: Complex64, n: usize) -> Result<Circulant> {
    if n < 8 {
        return Err(Error::param("n", "the circle grid needs at least 8 points"));
    }
    let pref = (s.im / (2.0 * PI)).abs().sqrt() * 2.0 * PI / n as f64;
    let column = (0..n)
        .into_par_iter()
        .map(|d| {
            if d == 0 {
                return Complex64::new(0.0, 0.0);
            }
            let l = (2.0 * (PI * d as f64 / n as f64).sin().abs()).ln();
            pref * Complex64::new(-2.0 * s.re * l, -2.0 * s.im * l).exp()
        })
        .collect();
    Ok(Circulant::new(column))
}

/// ‖χ₁B(s)χ₂‖ for bumps with disjoint supports, on the power-of-two grid
/// N ≥ 40/|Im s|.
pub fn separated_norm(s: Complex64, chi1: &Bump, chi2: &Bump, seed: u64) -> Result<f64> {
    if s.im == 0.0 {
        return Err(Error::param("s", "Im s must be nonzero"));
    }
    if chi1.support.right > chi2.support.left && chi2.support.right > chi1.support.left {
        return Err(Error::UnguardedDiagonal {
            reason: "the two cutoffs overlap".into(),
        });
    }
    let n = pow2_grid_size(1.0 / s.im.abs());
    let grid = CircleGrid::new(n)?;
    let op = circulant_b_s(s, n)?;
    let left: Vec<f64> = grid.x().iter().map(|&x| chi1.eval(x)).collect();
    let right: Vec<f64> = grid.x().iter().map(|&x| chi2.eval(x)).collect();
    Ok(op.weighted_norm(&left, &right, seed, NORM_TOL)?.value)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentFit {
    /// All samples supplied, as (h, norm).
    pub samples: Vec<(f64, f64)>,
    /// Slope of log(norm) against log(h).
    pub beta_fit: f64,
    pub intercept: f64,
    /// RMS residual of the line on log–log axes.
    pub residual: f64,
    pub points_used: usize,
    /// Samples left out of the fit (largest h first).
    pub dropped: Vec<(f64, f64)>,
}

const MIN_FIT_SAMPLES: usize = 5;
const DROP_THRESHOLD: f64 = 0.05;

fn fit_samples(samples: &[(f64, f64)]) -> Result<(f64, f64, f64)> {
    let x: Vec<f64> = samples.iter().map(|p| p.0.ln()).collect();
    let y: Vec<f64> = samples.iter().map(|p| p.1.ln()).collect();
    let f = fit_line(&x, &y)?;
    Ok((f.slope, f.intercept, f.rms_residual))
}

/// Least-squares exponent of norm ~ h^β. When the residual exceeds 0.05
/// the one or two largest h are dropped, as long as five samples remain.
pub fn fit_beta(samples: &[(f64, f64)]) -> Result<ExponentFit> {
    if samples.len() < MIN_FIT_SAMPLES {
        return Err(Error::TooFewSamples {
            needed: MIN_FIT_SAMPLES,
            got: samples.len(),
        });
    }
    if samples.windows(2).any(|w| !(w[1].0 < w[0].0)) {
        return Err(Error::param("samples", "h must be strictly decreasing"));
    }
    if samples.iter().any(|&(h, v)| !(h > 0.0 && v > 0.0)) {
        return Err(Error::param("samples", "h and norms must be positive"));
    }
    let mut start = 0;
    let (mut slope, mut intercept, mut residual) = fit_samples(samples)?;
    while residual > DROP_THRESHOLD && start < 2 && samples.len() - start > MIN_FIT_SAMPLES {
        start += 1;
        (slope, intercept, residual) = fit_samples(&samples[start..])?;
    }
    Ok(ExponentFit {
        samples: samples.to_vec(),
        beta_fit: slope,
        intercept,
        residual,
        points_used: samples.len() - start,
        dropped: samples[..start].to_vec(),
    })
}
