//! The Fredholm determinant det(I − L_s) on the collocation grid.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::Result;
use crate::schottky::SchottkyData;
use crate::transfer::operator::TransferOperator;

/// Evaluates det(I − L_s) for many s with a fixed grid.
#[derive(Debug, Clone)]
pub struct ZetaEvaluator {
    op: TransferOperator,
}

impl ZetaEvaluator {
    pub fn new(data: &SchottkyData, m: usize) -> Result<Self> {
        Ok(ZetaEvaluator {
            op: TransferOperator::standard(data, m)?,
        })
    }

    pub fn m(&self) -> usize {
        self.op.grid().m
    }

    pub fn operator(&self) -> &TransferOperator {
        &self.op
    }

    fn resolvent_input(&self, s: Complex64) -> DMatrix<Complex64> {
        let n = self.op.size();
        DMatrix::identity(n, n) - self.op.matrix(s)
    }

    pub fn det(&self, s: Complex64) -> Complex64 {
        self.resolvent_input(s).lu().determinant()
    }

    /// det(I − L_s) and its logarithmic derivative −tr((I − L_s)⁻¹ ∂_s L_s).
    pub fn det_and_log_derivative(&self, s: Complex64) -> (Complex64, Complex64) {
        let lu = self.resolvent_input(s).lu();
        let det = lu.determinant();
        let dl = self.op.derivative_matrix(s);
        let logd = match lu.solve(&dl) {
            Some(x) => -x.trace(),
            None => Complex64::new(f64::INFINITY, 0.0),
        };
        (det, logd)
    }
}

/// det(I − L_s) with M nodes per interval.
pub fn zeta_det(data: &SchottkyData, s: Complex64, m: usize) -> Result<Complex64> {
    Ok(ZetaEvaluator::new(data, m)?.det(s))
}

/// A determinant value with its M-doubling certificate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CertifiedDet {
    pub s: Complex64,
    pub m: usize,
    pub value: Complex64,
    pub value_2m: Complex64,
    /// |value − value_2m|.
    pub delta: f64,
}

pub fn certified_zeta_det(data: &SchottkyData, s: Complex64, m: usize) -> Result<CertifiedDet> {
    let value = zeta_det(data, s, m)?;
    let value_2m = zeta_det(data, s, 2 * m)?;
    Ok(CertifiedDet {
        s,
        m,
        value,
        value_2m,
        delta: (value - value_2m).norm(),
    })
}

/// det(I − L_s) on a rectangular grid of s, row by row in Im s, with the
/// M-doubling difference at every point.
pub fn zeta_grid(
    data: &SchottkyData,
    re: (f64, f64),
    im: (f64, f64),
    n_re: usize,
    n_im: usize,
    m: usize,
) -> Result<Vec<CertifiedDet>> {
    let coarse = ZetaEvaluator::new(data, m)?;
    let fine = ZetaEvaluator::new(data, 2 * m)?;
    let axis = |(a, b): (f64, f64), n: usize, k: usize| {
        if n <= 1 {
            a
        } else {
            a + (b - a) * k as f64 / (n - 1) as f64
        }
    };
    let points: Vec<Complex64> = (0..n_im)
        .flat_map(|j| (0..n_re).map(move |i| Complex64::new(axis(re, n_re, i), axis(im, n_im, j))))
        .collect();
    Ok(points
        .par_iter()
        .map(|&s| {
            let value = coarse.det(s);
            let value_2m = fine.det(s);
            CertifiedDet {
                s,
                m,
                value,
                value_2m,
                delta: (value - value_2m).norm(),
            }
        })
        .collect())
}
