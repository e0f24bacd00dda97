//! Null vectors of I − L_s at zeros of the determinant.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::schottky::SchottkyData;
use crate::transfer::operator::TransferOperator;
use crate::words::Word;

/// Largest smallest-singular-value accepted as a zero.
pub const NULL_TOL: f64 = 1e-6;

/// A solution of u = L_s u given by its values at the collocation nodes.
#[derive(Debug, Clone)]
pub struct Eigenfunction {
    pub s: Complex64,
    pub m: usize,
    /// Node values, letter blocks of length M, unit Euclidean norm.
    pub values: DVector<Complex64>,
    pub sigma_min: f64,
    pub sigma_second: f64,
    /// ‖(I − L_s)u‖/‖u‖.
    pub residual: f64,
    /// Set when the second singular value is also below the tolerance, so
    /// the null space is at least two-dimensional.
    pub multiple: bool,
    op: TransferOperator,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenSummary {
    pub s: Complex64,
    pub m: usize,
    pub sigma_min: f64,
    pub sigma_second: f64,
    pub residual: f64,
    pub multiple: bool,
}

fn svd_tail(a: DMatrix<Complex64>) -> (f64, f64, DVector<Complex64>) {
    let svd = a.svd(false, true);
    let sv = &svd.singular_values;
    let mut idx: Vec<usize> = (0..sv.len()).collect();
    idx.sort_by(|&i, &j| sv[i].total_cmp(&sv[j]));
    let v_t = svd.v_t.expect("requested");
    let v = v_t.row(idx[0]).adjoint();
    (sv[idx[0]], sv[idx.get(1).copied().unwrap_or(idx[0])], v)
}

/// The two smallest singular values of I − L_s.
pub fn smallest_singular_values(data: &SchottkyData, s: Complex64, m: usize) -> Result<(f64, f64)> {
    let op = TransferOperator::standard(data, m)?;
    let n = op.size();
    let (a, b, _) = svd_tail(DMatrix::identity(n, n) - op.matrix(s));
    Ok((a, b))
}

/// Unit null vector of I − L_{s0} from the smallest singular value.
pub fn eigenfunction_at_zero(
    data: &SchottkyData,
    s0: Complex64,
    m: usize,
) -> Result<Eigenfunction> {
    let op = TransferOperator::standard(data, m)?;
    let n = op.size();
    let l = op.matrix(s0);
    let a = DMatrix::identity(n, n) - &l;
    let (sigma_min, sigma_second, u) = svd_tail(a.clone());
    if sigma_min > NULL_TOL {
        return Err(Error::NotAZero { s: s0, sigma_min });
    }
    let residual = (&a * &u).norm() / u.norm();
    Ok(Eigenfunction {
        s: s0,
        m,
        values: u,
        sigma_min,
        sigma_second,
        residual,
        multiple: sigma_second <= NULL_TOL,
        op,
    })
}

impl Eigenfunction {
    pub fn summary(&self) -> EigenSummary {
        EigenSummary {
            s: self.s,
            m: self.m,
            sigma_min: self.sigma_min,
            sigma_second: self.sigma_second,
            residual: self.residual,
            multiple: self.multiple,
        }
    }

    /// Interpolated value on the collocation interval of letter `a`.
    pub fn eval_on_domain(&self, a: usize, x: f64) -> Complex64 {
        let grid = self.op.grid();
        let mut row = vec![0.0; grid.m];
        grid.interpolation_row(a, x, &mut row);
        row.iter()
            .zip(self.values.rows(a * grid.m, grid.m).iter())
            .map(|(r, v)| v * *r)
            .sum()
    }

    /// u(x) for x in the base interval I_b, through u = L_s u: every term
    /// reads u on a collocation interval where the interpolant is accurate.
    pub fn eval(&self, data: &SchottkyData, b: usize, x: f64) -> Complex64 {
        (0..data.letters())
            .filter(|&a| a != data.bar(b))
            .map(|a| {
                let g = data.generator(a);
                let w = (self.s * g.derivative_real(x).ln()).exp();
                w * self.eval_on_domain(a, g.apply_real(x))
            })
            .sum()
    }

    /// ‖L_{W,s}u − u‖/‖u‖ on the grid for an arbitrary word set W.
    pub fn refined_residual(&self, data: &SchottkyData, words: &[Word]) -> Result<f64> {
        let op = TransferOperator::new(data, words, self.m)?;
        let lu = op.matrix(self.s) * &self.values;
        Ok((lu - &self.values).norm() / self.values.norm())
    }
}
