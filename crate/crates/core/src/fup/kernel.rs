//! Dense discretisations of B_χ(h) and B(s) on a circle grid.
//!
//!   B_χ(h) v(y) = (2πh)^{−1/2} ∫ |y − y′|^{−2i/h} χ(y, y′) v(y′) dy′,
//!   B(s) f(x)   = |Im s/2π|^{1/2} ∫ |x − x′|_S^{−2s} f(x′) dP(x′).
//!
//! Both kernels are evaluated at the grid nodes and multiplied by the
//! quadrature weight. Storage is N², so these are for moderate N; the norm
//! scans use the circulant form in [`super::circulant`].

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fup::cutoff::KernelCutoff;
use crate::fup::grid::CircleGrid;
use crate::linalg::{lanczos_top, LanczosResult};
use crate::mobius::chord_of_angles;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FupKind {
    BChi { h: f64 },
    BS { s: Complex64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct FupOperator {
    pub kind: FupKind,
    pub grid: CircleGrid,
    pub entries: DMatrix<Complex64>,
    /// 0/1 weights applied on both sides when measuring norms.
    pub mask: Vec<f64>,
}

/// (2πh)^{−1/2} |y−y′|^{−2i/h} without the cutoff.
fn chi_kernel(h: f64, chord: f64) -> Complex64 {
    Complex64::from_polar((2.0 * PI * h).powf(-0.5), -2.0 / h * chord.ln())
}

/// |Im s/2π|^{1/2} |x−x′|_S^{−2s}.
fn s_kernel(s: Complex64, chord: f64) -> Complex64 {
    let l = chord.ln();
    (s.im / (2.0 * PI)).abs().sqrt() * Complex64::new(-2.0 * s.re * l, -2.0 * s.im * l).exp()
}

fn assemble<F>(grid: &CircleGrid, entry: F) -> DMatrix<Complex64>
where
    F: Fn(usize, usize) -> Complex64 + Sync,
{
    let n = grid.len();
    let mut m = DMatrix::<Complex64>::zeros(n, n);
    // column-major storage: chunk k is column k
    m.as_mut_slice()
        .par_chunks_mut(n)
        .enumerate()
        .for_each(|(k, col)| {
            for (j, c) in col.iter_mut().enumerate() {
                *c = entry(j, k);
            }
        });
    m
}

fn guard_diagonal(grid: &CircleGrid, chi: &dyn KernelCutoff) -> Result<()> {
    if let Some(t) = grid.theta().iter().find(|&&t| chi.eval(t, t) != 0.0) {
        return Err(Error::UnguardedDiagonal {
            reason: format!("cutoff is nonzero on the diagonal at angle {t}"),
        });
    }
    Ok(())
}

/// B_χ(h) on the grid; χ must vanish on the diagonal.
pub fn build_b_chi(h: f64, chi: &dyn KernelCutoff, grid: &CircleGrid) -> Result<FupOperator> {
    if !(h > 0.0) {
        return Err(Error::param("h", "must be positive"));
    }
    guard_diagonal(grid, chi)?;
    let th = grid.theta();
    let w = grid.weight();
    let entries = assemble(grid, |j, k| {
        if j == k {
            return Complex64::new(0.0, 0.0);
        }
        let c = chi.eval(th[j], th[k]);
        if c == 0.0 {
            Complex64::new(0.0, 0.0)
        } else {
            chi_kernel(h, chord_of_angles(th[j], th[k])) * (c * w)
        }
    });
    Ok(FupOperator {
        kind: FupKind::BChi { h },
        grid: grid.clone(),
        entries,
        mask: vec![1.0; grid.len()],
    })
}

/// B(s) on the grid. With a cutoff χ₀ vanishing on the diagonal the kernel is
/// multiplied by χ₀. Without one, Re s < ½ is required and the diagonal and
/// first off-diagonal bands use the exact cell integrals of |t|^{−2s}.
pub fn build_b_s(
    s: Complex64,
    grid: &CircleGrid,
    chi0: Option<&dyn KernelCutoff>,
) -> Result<FupOperator> {
    let th = grid.theta();
    let w = grid.weight();
    let n = grid.len();
    let entries = match chi0 {
        Some(chi) => {
            guard_diagonal(grid, chi)?;
            assemble(grid, |j, k| {
                let c = if j == k { 0.0 } else { chi.eval(th[j], th[k]) };
                if c == 0.0 {
                    Complex64::new(0.0, 0.0)
                } else {
                    s_kernel(s, chord_of_angles(th[j], th[k])) * (c * w)
                }
            })
        }
        None => {
            if !(s.re < 0.5) {
                return Err(Error::UnguardedDiagonal {
                    reason: format!(
                        "Re s = {} ≥ 1/2 needs a cutoff vanishing near the diagonal",
                        s.re
                    ),
                });
            }
            let pref = (s.im / (2.0 * PI)).abs().sqrt();
            let e = Complex64::new(1.0, 0.0) - 2.0 * s;
            // ∫ t^{−2s} dt = t^{1−2s}/(1−2s)
            let prim = |t: f64| (e * t.ln()).exp() / e;
            let diag = pref * 2.0 * prim(0.5 * w);
            let band = pref * (prim(1.5 * w) - prim(0.5 * w));
            assemble(grid, |j, k| {
                let d = (j as isize - k as isize).rem_euclid(n as isize) as usize;
                match d.min(n - d) {
                    0 => diag,
                    1 => band,
                    _ => s_kernel(s, chord_of_angles(th[j], th[k])) * w,
                }
            })
        }
    };
    Ok(FupOperator {
        kind: FupKind::BS { s },
        grid: grid.clone(),
        entries,
        mask: vec![1.0; n],
    })
}

impl FupOperator {
    pub fn with_mask(mut self, mask: Vec<f64>) -> Result<Self> {
        if mask.len() != self.grid.len() || mask.iter().any(|&m| m != 0.0 && m != 1.0) {
            return Err(Error::param("mask", "must be 0/1 valued on the grid"));
        }
        self.mask = mask;
        Ok(self)
    }

    pub fn max_entry(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest singular value of mask·entries·mask, via Lanczos on the
    /// normal operator.
    pub fn norm(&self, seed: u64, tol: f64) -> Result<LanczosResult> {
        let n = self.grid.len();
        let masked = DMatrix::from_fn(n, n, |j, k| {
            self.entries[(j, k)] * (self.mask[j] * self.mask[k])
        });
        let adj = masked.adjoint();
        let r = lanczos_top(
            n,
            |v, out| {
                let x = nalgebra::DVector::from_column_slice(v);
                let y = &adj * (&masked * x);
                out.copy_from_slice(y.as_slice());
            },
            seed,
            tol,
            400,
        )?;
        Ok(LanczosResult {
            value: r.value.max(0.0).sqrt(),
            ..r
        })
    }
}
