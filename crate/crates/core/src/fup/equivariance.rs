//! Discrete check of T_{γ,s} B(s) = B(s) T_{γ,1−s}, where
//! T_{γ,s} f(x) = |γ′(x)|_S^s f(γ(x)).
//!
//! Both sides act on the test space spanned by χ₂·e^{imθ}, |m| ≤ modes, and
//! are read off through χ₁ at the grid points. The supports are chosen so
//! that neither side meets the diagonal singularity of the kernel. The
//! integrals run over supp χ₂ and over its preimage under γ, each with its
//! own midpoint rule in θ, so both converge spectrally even when the
//! preimage is short.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fup::cutoff::Bump;
use crate::fup::grid::CircleGrid;
use crate::linalg::lanczos_top;
use crate::mobius::{sphere_distance_real, MobiusMap};
use crate::schottky::SchottkyData;
use crate::words::Word;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivarianceResult {
    /// ‖χ₁(T_{γ,s}B(s) − B(s)T_{γ,1−s})χ₂‖ / ‖χ₁B(s)χ₂‖.
    pub residual: f64,
    pub reference_norm: f64,
    pub n: usize,
    pub modes: usize,
    /// Letter carrying χ₁.
    pub row_letter: usize,
    /// Letter carrying χ₂.
    pub column_letter: usize,
}

fn kernel(s: Complex64, pref: f64, x: f64, y: f64) -> Complex64 {
    let l = sphere_distance_real(x, y).ln();
    pref * Complex64::new(-2.0 * s.re * l, -2.0 * s.im * l).exp()
}

fn power(base: f64, s: Complex64) -> Complex64 {
    let l = base.ln();
    Complex64::new(s.re * l, s.im * l).exp()
}

/// Rows × columns matrix, filled in parallel by row.
fn fill<F>(rows: usize, cols: usize, f: F) -> DMatrix<Complex64>
where
    F: Fn(usize, usize) -> Complex64 + Sync,
{
    let data: Vec<Vec<Complex64>> = (0..rows)
        .into_par_iter()
        .map(|j| (0..cols).map(|k| f(j, k)).collect())
        .collect();
    DMatrix::from_fn(rows, cols, |j, k| data[j][k])
}

fn top_singular(
    a: &dyn Fn(&DVector<Complex64>) -> DVector<Complex64>,
    adj: &dyn Fn(&DVector<Complex64>) -> DVector<Complex64>,
    dim: usize,
) -> Result<f64> {
    let r = lanczos_top(
        dim,
        |v, out| {
            let y = adj(&a(&DVector::from_column_slice(v)));
            out.copy_from_slice(y.as_slice());
        },
        7,
        1e-12,
        400,
    )?;
    Ok(r.value.max(0.0).sqrt())
}

/// Relative residual of the equivariance identity for one map γ, with
/// χ₁, χ₂ given. Returns (residual, ‖χ₁B(s)χ₂‖).
pub fn equivariance_residual(
    gamma: &MobiusMap,
    s: Complex64,
    grid: &CircleGrid,
    chi1: &Bump,
    chi2: &Bump,
    modes: usize,
) -> Result<(f64, f64)> {
    if s.im == 0.0 {
        return Err(Error::param(
            "s",
            "the normalisation |Im s/2π|^{1/2} needs Im s ≠ 0",
        ));
    }
    let pref = (s.im / (2.0 * PI)).abs().sqrt();
    let x = grid.x();
    let rows: Vec<usize> = (0..grid.len()).filter(|&j| chi1.eval(x[j]) > 0.0).collect();
    let one = Complex64::new(1.0, 0.0);
    // the columns integrate over supp χ₂ and over its preimage under γ,
    // each by the midpoint rule in θ with the same number of cells
    let image_support = chi2.support;
    let pre_support = chi2.support.image(&gamma.inverse());
    let span = |iv: &crate::schottky::Interval| 2.0 * (iv.right.atan() - iv.left.atan());
    let count = ((grid.len() as f64 * span(&image_support) / (2.0 * PI)).round() as usize).max(16);
    let nodes = |iv: &crate::schottky::Interval| -> (Vec<f64>, f64) {
        let (ta, dt) = (2.0 * iv.left.atan(), span(iv) / count as f64);
        (
            (0..count)
                .map(|k| ((ta + (k as f64 + 0.5) * dt) / 2.0).tan())
                .collect(),
            dt,
        )
    };
    let (y1, w1) = nodes(&image_support);
    let (y2, w2) = nodes(&pre_support);
    let gx: Vec<f64> = rows.iter().map(|&j| gamma.apply_real(x[j])).collect();
    let gy2: Vec<f64> = y2.iter().map(|&y| gamma.apply_real(y)).collect();

    // left factors absorbed into the kernels
    let m0 = fill(rows.len(), count, |j, k| {
        let xj = x[rows[j]];
        kernel(s, pref, xj, y1[k]) * (chi1.eval(xj) * chi2.eval(y1[k]) * w1)
    });
    let m1 = fill(rows.len(), count, |j, k| {
        let xj = x[rows[j]];
        power(gamma.sphere_derivative_real(xj), s)
            * kernel(s, pref, gx[j], y1[k])
            * (chi1.eval(xj) * chi2.eval(y1[k]) * w1)
    });
    let m2 = fill(rows.len(), count, |j, k| {
        let xj = x[rows[j]];
        kernel(s, pref, xj, y2[k])
            * power(gamma.sphere_derivative_real(y2[k]), one - s)
            * (chi1.eval(xj) * chi2.eval(gy2[k]) * w2)
    });
    let dim = 2 * modes + 1;
    let mode = |i: usize| i as f64 - modes as f64;
    let e1 = DMatrix::from_fn(count, dim, |k, i| {
        Complex64::from_polar(1.0, mode(i) * 2.0 * y1[k].atan())
    });
    let e2 = DMatrix::from_fn(count, dim, |k, i| {
        Complex64::from_polar(1.0, mode(i) * 2.0 * gy2[k].atan())
    });

    let resid = |c: &DVector<Complex64>| &m1 * (&e1 * c) - &m2 * (&e2 * c);
    let resid_adj = |r: &DVector<Complex64>| {
        e1.adjoint() * (m1.adjoint() * r) - e2.adjoint() * (m2.adjoint() * r)
    };
    let base = |c: &DVector<Complex64>| &m0 * (&e1 * c);
    let base_adj = |r: &DVector<Complex64>| e1.adjoint() * (m0.adjoint() * r);
    let (num, den) = rayon::join(
        || top_singular(&resid, &resid_adj, dim),
        || top_singular(&base, &base_adj, dim),
    );
    let (num, den) = (num?, den?);
    // rows carry the grid weight so the reference is an L² operator norm
    Ok((num / den, den * grid.weight().sqrt()))
}

/// The residual for γ_𝐚 of a word, with χ₁ on a letter c ≠ ā_n and χ₂ on
/// a letter e ∉ {a₁, c} so that both sides stay off the diagonal.
/// The empty word gives γ = identity.
pub fn equivariance_residual_for_word(
    data: &SchottkyData,
    word: &Word,
    s: Complex64,
    n: usize,
    modes: usize,
) -> Result<EquivarianceResult> {
    word.check(data)?;
    let gamma = word.map(data);
    let c = (0..data.letters())
        .find(|&c| word.last().is_none_or(|l| c != data.bar(l)))
        .expect("at least two letters");
    let e = (0..data.letters())
        .find(|&e| e != c && word.first().is_none_or(|f| e != f))
        .expect("at least three candidate letters");
    let grid = CircleGrid::new(n)?;
    let (residual, reference_norm) = equivariance_residual(
        &gamma,
        s,
        &grid,
        &Bump::for_letter(data, c),
        &Bump::for_letter(data, e),
        modes,
    )?;
    Ok(EquivarianceResult {
        residual,
        reference_norm,
        n,
        modes,
        row_letter: c,
        column_letter: e,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::{elementary_schottky, symmetric_schottky};

    #[test]
    fn identity_is_exact() {
        let d = symmetric_schottky(2, 0.8).unwrap();
        let r =
            equivariance_residual_for_word(&d, &Word::empty(), Complex64::new(0.5, 40.0), 1024, 8)
                .unwrap();
        assert!(r.residual <= 1e-12);
        assert_ne!(r.row_letter, r.column_letter);
    }

    #[test]
    fn converges_under_refinement() {
        let e = elementary_schottky(2.0).unwrap();
        let s = Complex64::new(0.5, 32.0);
        let coarse = equivariance_residual_for_word(&e, &Word::letter(0), s, 512, 8).unwrap();
        let fine = equivariance_residual_for_word(&e, &Word::letter(0), s, 1024, 8).unwrap();
        assert!(
            fine.residual * 4.0 <= coarse.residual,
            "{} {}",
            coarse.residual,
            fine.residual
        );
        assert!(fine.residual < 1e-6);
    }

    #[test]
    fn words_of_the_symmetric_family() {
        let d = symmetric_schottky(2, 0.8).unwrap();
        let s = Complex64::new(0.3, 24.0);
        for w in ["1", "2.1", "4.4.3"] {
            let w: Word = w.parse().unwrap();
            let r = equivariance_residual_for_word(&d, &w, s, 2048, 8).unwrap();
            assert!(r.residual < 1e-8, "{w}: {}", r.residual);
        }
    }

    #[test]
    fn real_s_rejected() {
        let e = elementary_schottky(2.0).unwrap();
        assert!(equivariance_residual_for_word(
            &e,
            &Word::letter(0),
            Complex64::new(0.5, 0.0),
            256,
            4
        )
        .is_err());
    }
}
