//! Frequency localisation of the pieces u_a = ⟨x⟩^{2s}χ_a u of a zero's
//! eigenfunction, with χ_a a bump on I_ā.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fup::cutoff::Bump;
use crate::fup::fourier::{semiclassical_fourier, SampledFunction};
use crate::mobius::japanese_bracket;
use crate::schottky::SchottkyData;
use crate::transfer::eigenfunction_at_zero;

/// Points of the displayed |F_h u_a| curve.
const DISPLAY_POINTS: usize = 401;
const NEGLIGIBLE_MASS: f64 = 1e-20;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LetterProfile {
    pub letter: usize,
    /// Share of ∫|F_h u_a|² dξ carried by |ξ| > K.
    pub outside_fraction: f64,
    /// |F_h u_a| on a uniform grid over [−2K, 2K].
    pub xi: Vec<f64>,
    pub magnitude: Vec<f64>,
    /// (t, share of the mass with |ξ| > t) for t from 0 to K.
    pub tail: Vec<(f64, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LocalizationProfile {
    pub s0: Complex64,
    pub h: f64,
    pub m: usize,
    pub k_threshold: f64,
    pub letters: Vec<LetterProfile>,
    /// Letters whose piece carries no mass relative to the largest one.
    pub negligible: Vec<usize>,
    pub max_outside_fraction: f64,
}

/// Mass of F_h f outside |ξ| ≤ K together with the display curves.
///
/// The total mass comes from Plancherel, ∫|F_h f|² dξ = 2πh∫|f|² dx, and the
/// inner mass from the trapezoid rule on a ξ grid fine enough to resolve
/// the window width.
pub fn fourier_localization(
    f: &SampledFunction,
    h: f64,
    k: f64,
) -> Result<(f64, Vec<f64>, Vec<f64>, Vec<(f64, f64)>)> {
    if !(k > 0.0) {
        return Err(Error::param("k_threshold", "must be positive"));
    }
    let total = 2.0 * PI * h * f.l2_norm_sqr();
    if !(total > 0.0) {
        return Err(Error::param("f", "has zero mass"));
    }
    // re-centre so the transform oscillates at the half width only
    let c = 0.5 * (f.a + f.b);
    let half = 0.5 * (f.b - f.a);
    let dxi = h / (8.0 * half);
    let nk = (k / dxi).ceil() as usize;
    let dxi = k / nk as f64;
    let grid: Vec<f64> = (0..=2 * nk).map(|i| -k + i as f64 * dxi).collect();
    let centred = SampledFunction {
        a: f.a - c,
        b: f.b - c,
        values: f.values.clone(),
    };
    let t = semiclassical_fourier(&centred, h, &grid)?;
    let dens: Vec<f64> = t.values.iter().map(|v| v.norm_sqr()).collect();
    // inner mass on [−t, t] for t = i·dxi, by the trapezoid rule
    let mut tail = Vec::with_capacity(nk + 1);
    let mut inner = 0.0;
    tail.push((0.0, 1.0));
    for i in 1..=nk {
        let (l0, l1) = (nk - i + 1, nk - i);
        let (r0, r1) = (nk + i - 1, nk + i);
        inner += 0.5 * dxi * (dens[l0] + dens[l1] + dens[r0] + dens[r1]);
        tail.push((i as f64 * dxi, (1.0 - inner / total).max(0.0)));
    }
    let outside = tail.last().map(|p| p.1).unwrap_or(1.0);
    let shown: Vec<f64> = (0..DISPLAY_POINTS)
        .map(|i| -2.0 * k + 4.0 * k * i as f64 / (DISPLAY_POINTS - 1) as f64)
        .collect();
    let mag = semiclassical_fourier(&centred, h, &shown)?
        .values
        .iter()
        .map(|v| v.norm())
        .collect();
    Ok((outside, shown, mag, tail))
}

/// For each letter a, samples u_a = ⟨x⟩^{2s₀}χ_a u on I_ā, where u is the
/// null vector of I − L_{s₀}, and measures its frequency spread at scale h.
pub fn eigenfunction_localization(
    data: &SchottkyData,
    s0: Complex64,
    m: usize,
    h: f64,
    k_threshold: f64,
) -> Result<LocalizationProfile> {
    if !(h > 0.0) {
        return Err(Error::param("h", "must be positive"));
    }
    if (s0.im.abs() * h - 1.0).abs() > 0.5 {
        return Err(Error::param(
            "h",
            format!("Im s0 = {} is far from the scale 1/h = {}", s0.im, 1.0 / h),
        ));
    }
    let u = eigenfunction_at_zero(data, s0, m)?;
    let mut pieces = Vec::with_capacity(data.letters());
    for a in 0..data.letters() {
        let b = data.bar(a);
        let bump = Bump::for_letter(data, b);
        let win = bump.support;
        // resolve frequencies up to 8K/h
        let n = ((win.length() * 8.0 * k_threshold / (PI * h)).ceil() as usize).max(64) + 1;
        let f = SampledFunction::from_fn(win.left, win.right, n, |x| {
            let chi = bump.eval(x);
            if chi == 0.0 {
                return Complex64::new(0.0, 0.0);
            }
            let weight = (2.0 * s0 * japanese_bracket(x).ln()).exp();
            weight * chi * u.eval(data, b, x)
        })?;
        pieces.push((a, f.l2_norm_sqr(), f));
    }
    // a multiple zero can have a null vector living on some intervals only
    let largest = pieces.iter().map(|p| p.1).fold(0.0, f64::max);
    let mut letters = Vec::new();
    let mut negligible = Vec::new();
    for (a, mass, f) in pieces {
        if !(mass > NEGLIGIBLE_MASS * largest) {
            negligible.push(a);
            continue;
        }
        let (outside_fraction, xi, magnitude, tail) = fourier_localization(&f, h, k_threshold)?;
        letters.push(LetterProfile {
            letter: a,
            outside_fraction,
            xi,
            magnitude,
            tail,
        });
    }
    let max_outside_fraction = letters
        .iter()
        .map(|l| l.outside_fraction)
        .fold(0.0, f64::max);
    Ok(LocalizationProfile {
        s0,
        h,
        m,
        k_threshold,
        letters,
        negligible,
        max_outside_fraction,
    })
}
