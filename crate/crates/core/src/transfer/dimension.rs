//! δ as the root of λ(s) = 1, where λ(s) is the leading eigenvalue of the
//! transfer operator with weights |γ′|^s.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::power_iteration;
use crate::schottky::SchottkyData;
use crate::transfer::operator::TransferOperator;

/// Nodes per interval used by [`bowen_dimension`].
pub const DIMENSION_NODES: usize = 32;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DimensionEstimate {
    pub delta: f64,
    /// λ(δ) − 1.
    pub eigenvalue_residual: f64,
    /// Residual of the power iteration at the returned s.
    pub power_residual: f64,
    pub bisection_steps: usize,
    pub m: usize,
}

/// Leading eigenvalue of L_s for real s.
pub fn leading_eigenvalue(op: &TransferOperator, s: f64) -> Result<(f64, f64)> {
    let p = power_iteration(&op.matrix_real(s), 1e-14, 20_000)?;
    Ok((p.value, p.residual))
}

pub fn bowen_dimension(data: &SchottkyData, tol: f64) -> Result<DimensionEstimate> {
    bowen_dimension_with(data, tol, DIMENSION_NODES)
}

/// Bisection on [0, 1] for λ(s) = 1; λ is strictly decreasing.
pub fn bowen_dimension_with(data: &SchottkyData, tol: f64, m: usize) -> Result<DimensionEstimate> {
    if !(tol >= 1e-10) {
        return Err(Error::param("tol", format!("need tol >= 1e-10, got {tol}")));
    }
    let op = TransferOperator::standard(data, m)?;
    let (l0, r0) = leading_eigenvalue(&op, 0.0)?;
    if (l0 - 1.0).abs() <= tol {
        return Ok(DimensionEstimate {
            delta: 0.0,
            eigenvalue_residual: l0 - 1.0,
            power_residual: r0,
            bisection_steps: 0,
            m,
        });
    }
    let (l1, _) = leading_eigenvalue(&op, 1.0)?;
    if !(l0 > 1.0 && l1 < 1.0) {
        return Err(Error::NotBracketed {
            at_zero: l0,
            at_one: l1,
        });
    }
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut best = (0.5, f64::INFINITY, f64::INFINITY);
    for step in 1..=80 {
        let mid = 0.5 * (lo + hi);
        let (l, res) = leading_eigenvalue(&op, mid)?;
        if (l - 1.0).abs() < best.1.abs() {
            best = (mid, l - 1.0, res);
        }
        if l > 1.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if (l - 1.0).abs() <= tol && hi - lo <= 1e-14 || hi - lo <= f64::EPSILON {
            return Ok(DimensionEstimate {
                delta: best.0,
                eigenvalue_residual: best.1,
                power_residual: best.2,
                bisection_steps: step,
                m,
            });
        }
    }
    if best.1.abs() <= tol {
        return Ok(DimensionEstimate {
            delta: best.0,
            eigenvalue_residual: best.1,
            power_residual: best.2,
            bisection_steps: 80,
            m,
        });
    }
    Err(Error::NotConverged {
        what: "dimension bisection",
        last_change: best.1,
    })
}
