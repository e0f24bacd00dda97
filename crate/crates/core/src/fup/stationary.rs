//! Critical point of the composed phase
//!
//!   Ψ(x′, x″; x, ξ) = Φ(x, x′) − Φ(x′, x″) + (x″ − x)ξ,
//!   Φ(x, x′) = −2 log|x − x′|_S,
//!
//! at x″ = x, x′ = x + 2⟨x⟩²/(⟨x⟩²ξ − 2x).

use serde::Serialize;

use crate::error::{Error, Result};
use crate::mobius::japanese_bracket;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StationaryCheck {
    pub x: f64,
    pub xi: f64,
    pub x_prime: f64,
    /// ∂_{x′}Ψ at the critical point.
    pub d_x_prime: f64,
    /// ∂_{x″}Ψ at the critical point.
    pub d_x_second: f64,
    /// Hessian determinant in (x′, x″) by differences of the gradient.
    pub hessian_det: f64,
    /// 4(x − x′)^{−4}.
    pub expected_abs_det: f64,
    /// | |det| − 4(x−x′)^{−4} | / 4(x−x′)^{−4}.
    pub hessian_rel_err: f64,
    /// Number of positive minus negative Hessian eigenvalues.
    pub signature: i32,
}

impl StationaryCheck {
    /// Largest of the two gradient residuals.
    pub fn residual(&self) -> f64 {
        self.d_x_prime.abs().max(self.d_x_second.abs())
    }
}

/// Φ(x, x′) = −2 log|x − x′| + 2 log⟨x⟩ + 2 log⟨x′⟩.
pub fn phase(x: f64, y: f64) -> f64 {
    -2.0 * (x - y).abs().ln() + 2.0 * japanese_bracket(x).ln() + 2.0 * japanese_bracket(y).ln()
}

/// x′(x, ξ).
pub fn critical_x_prime(x: f64, xi: f64) -> Result<f64> {
    let b2 = 1.0 + x * x;
    let den = b2 * xi - 2.0 * x;
    if den.abs() <= 1e-8 * (1.0 + b2 * xi.abs()) {
        return Err(Error::param(
            "xi",
            format!("⟨x⟩²ξ = 2x at x = {x}, ξ = {xi}"),
        ));
    }
    Ok(x + 2.0 * b2 / den)
}

/// ∇Ψ in (x′, x″).
fn gradient(x: f64, xi: f64, xp: f64, xpp: f64) -> [f64; 2] {
    [
        2.0 / (x - xp) + 2.0 / (xp - xpp),
        xi + 2.0 / (xpp - xp) - 2.0 * xpp / (1.0 + xpp * xpp),
    ]
}

pub fn stationary_point_check(x: f64, xi: f64) -> Result<StationaryCheck> {
    let xp = critical_x_prime(x, xi)?;
    let [d1, d2] = gradient(x, xi, xp, x);
    // central differences of the exact gradient, step scaled to |x − x′|
    let eps = 1e-5 * (x - xp).abs().min(1.0);
    let col = |dp: f64, dpp: f64| {
        let a = gradient(x, xi, xp + dp, x + dpp);
        let b = gradient(x, xi, xp - dp, x - dpp);
        [(a[0] - b[0]) / (2.0 * eps), (a[1] - b[1]) / (2.0 * eps)]
    };
    let c1 = col(eps, 0.0);
    let c2 = col(0.0, eps);
    let (h11, h22) = (c1[0], c2[1]);
    let h12 = 0.5 * (c1[1] + c2[0]);
    let det = h11 * h22 - h12 * h12;
    let tr = h11 + h22;
    let disc = (0.25 * (h11 - h22).powi(2) + h12 * h12).sqrt();
    let signature = [0.5 * tr + disc, 0.5 * tr - disc]
        .iter()
        .map(|&l| (l > 0.0) as i32 - (l < 0.0) as i32)
        .sum();
    let expected = 4.0 / (x - xp).powi(4);
    Ok(StationaryCheck {
        x,
        xi,
        x_prime: xp,
        d_x_prime: d1,
        d_x_second: d2,
        hessian_det: det,
        expected_abs_det: expected,
        hessian_rel_err: (det.abs() - expected).abs() / expected,
        signature,
    })
}
