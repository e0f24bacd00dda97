//! Real Möbius maps acting on the extended complex plane, and the round
//! metric on the extended real line seen as a circle.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the Riemann sphere.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedPoint {
    Finite(Complex64),
    Infinity,
}

impl ExtendedPoint {
    pub fn real(x: f64) -> Self {
        ExtendedPoint::Finite(Complex64::new(x, 0.0))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ExtendedPoint::Infinity)
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            ExtendedPoint::Finite(z) => Some(z),
            ExtendedPoint::Infinity => None,
        }
    }

    /// Real part of a finite point, `None` at infinity.
    pub fn re(&self) -> Option<f64> {
        self.finite().map(|z| z.re)
    }

    /// 1/z with 1/0 = ∞ and 1/∞ = 0.
    pub fn recip(&self) -> Self {
        match *self {
            ExtendedPoint::Infinity => ExtendedPoint::real(0.0),
            ExtendedPoint::Finite(z) if z == Complex64::new(0.0, 0.0) => ExtendedPoint::Infinity,
            ExtendedPoint::Finite(z) => ExtendedPoint::Finite(z.inv()),
        }
    }
}

impl From<f64> for ExtendedPoint {
    fn from(x: f64) -> Self {
        ExtendedPoint::real(x)
    }
}

impl From<Complex64> for ExtendedPoint {
    fn from(z: Complex64) -> Self {
        ExtendedPoint::Finite(z)
    }
}

impl fmt::Display for ExtendedPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedPoint::Finite(z) => write!(f, "{z}"),
            ExtendedPoint::Infinity => write!(f, "∞"),
        }
    }
}

/// z ↦ (az+b)/(cz+d) with real entries and ad − bc = 1.
///
/// Every constructor rescales to unit determinant and picks the sign with
/// nonnegative trace, so ±A (the same map) have one representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MobiusMap {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl MobiusMap {
    pub const IDENTITY: MobiusMap = MobiusMap {
        a: 1.0,
        b: 0.0,
        c: 0.0,
        d: 1.0,
    };

    /// Builds the map from any real matrix with positive determinant.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !(det.is_finite() && det > 0.0) {
            return Err(Error::param(
                "matrix",
                format!("determinant must be positive and finite, got {det}"),
            ));
        }
        Ok(Self::normalized(a, b, c, d, det))
    }

    fn normalized(a: f64, b: f64, c: f64, d: f64, det: f64) -> Self {
        let k = det.sqrt().recip();
        let tr = a + d;
        let flip = tr < 0.0 || (tr == 0.0 && (c < 0.0 || (c == 0.0 && b < 0.0)));
        let k = if flip { -k } else { k };
        MobiusMap {
            a: a * k,
            b: b * k,
            c: c * k,
            d: d * k,
        }
    }

    /// x ↦ kx, derivative k everywhere.
    pub fn scaling(k: f64) -> Result<Self> {
        if !(k > 0.0) {
            return Err(Error::param("k", "scaling factor must be positive"));
        }
        Self::new(k.sqrt(), 0.0, 0.0, k.sqrt().recip())
    }

    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn inverse(&self) -> Self {
        MobiusMap {
            a: self.d,
            b: -self.b,
            c: -self.c,
            d: self.a,
        }
    }

    /// Entries already satisfy ad − bc = 1 up to rounding; only the sign
    /// convention is applied.
    pub(crate) fn from_unimodular(a: f64, b: f64, c: f64, d: f64) -> Self {
        Self::normalized(a, b, c, d, 1.0)
    }

    pub fn compose(&self, other: &MobiusMap) -> Self {
        let a = self.a * other.a + self.b * other.c;
        let b = self.a * other.b + self.b * other.d;
        let c = self.c * other.a + self.d * other.c;
        let d = self.c * other.b + self.d * other.d;
        // Rescale only for drift above the rounding noise of ad − bc, which
        // for long words exceeds the drift itself.
        let det = a * d - b * c;
        let noise = 64.0 * f64::EPSILON * ((a * d).abs() + (b * c).abs());
        let det = if (det - 1.0).abs() > noise { det } else { 1.0 };
        Self::normalized(a, b, c, d, det)
    }

    /// Largest entrywise difference between the two maps, minimised over
    /// the sign of the representative.
    pub fn distance(&self, other: &MobiusMap) -> f64 {
        let p = self.entries();
        let q = other.entries();
        let plus = (0..4).map(|i| (p[i] - q[i]).abs()).fold(0.0, f64::max);
        let minus = (0..4).map(|i| (p[i] + q[i]).abs()).fold(0.0, f64::max);
        plus.min(minus)
    }

    pub fn apply(&self, z: ExtendedPoint) -> ExtendedPoint {
        match z {
            ExtendedPoint::Infinity => {
                if self.c == 0.0 {
                    ExtendedPoint::Infinity
                } else {
                    ExtendedPoint::real(self.a / self.c)
                }
            }
            ExtendedPoint::Finite(z) => {
                let den = z * self.c + self.d;
                if den == Complex64::new(0.0, 0.0) {
                    ExtendedPoint::Infinity
                } else {
                    ExtendedPoint::Finite((z * self.a + self.b) / den)
                }
            }
        }
    }

    /// Image of a finite real point; infinite at the pole.
    #[inline]
    pub fn apply_real(&self, x: f64) -> f64 {
        (self.a * x + self.b) / (self.c * x + self.d)
    }

    /// (cz+d)^{-2}.
    pub fn derivative(&self, z: ExtendedPoint) -> Result<Complex64> {
        let z = z
            .finite()
            .ok_or_else(|| Error::param("z", "derivative is only defined at finite points"))?;
        let den = z * self.c + self.d;
        if den == Complex64::new(0.0, 0.0) {
            return Err(Error::PoleOfMap { z });
        }
        Ok((den * den).inv())
    }

    #[inline]
    pub fn derivative_real(&self, x: f64) -> f64 {
        let den = self.c * x + self.d;
        (den * den).recip()
    }

    /// Stretch factor of the induced map of the circle,
    /// (1+x²)/((ax+b)²+(cx+d)²), extended continuously to ∞ and to the pole.
    pub fn sphere_derivative(&self, x: ExtendedPoint) -> f64 {
        match x.re() {
            None => (self.a * self.a + self.c * self.c).recip(),
            Some(x) => self.sphere_derivative_real(x),
        }
    }

    #[inline]
    pub fn sphere_derivative_real(&self, x: f64) -> f64 {
        let p = self.a * x + self.b;
        let q = self.c * x + self.d;
        (1.0 + x * x) / (p * p + q * q)
    }

    /// Real fixed points (attracting first for hyperbolic maps).
    pub fn fixed_points(&self) -> Vec<ExtendedPoint> {
        // cx² + (d − a)x − b = 0
        let (a, b, c, d) = (self.a, self.b, self.c, self.d);
        if c == 0.0 {
            if a == d {
                return vec![ExtendedPoint::Infinity];
            }
            let x = b / (d - a);
            let mut pts = vec![ExtendedPoint::real(x), ExtendedPoint::Infinity];
            if self.derivative_real(x) > 1.0 {
                pts.reverse();
            }
            return pts;
        }
        let disc = (d - a) * (d - a) + 4.0 * b * c;
        if disc < 0.0 {
            return Vec::new();
        }
        let sq = disc.sqrt();
        let mut pts = vec![(a - d + sq) / (2.0 * c), (a - d - sq) / (2.0 * c)];
        pts.sort_by(|x, y| {
            self.derivative_real(*x)
                .partial_cmp(&self.derivative_real(*y))
                .unwrap()
        });
        pts.dedup();
        pts.into_iter().map(ExtendedPoint::real).collect()
    }

    /// Displacement 2 arccosh(|tr|/2) of a hyperbolic element, 0 otherwise.
    pub fn translation_length(&self) -> f64 {
        let t = self.trace().abs() / 2.0;
        if t <= 1.0 {
            0.0
        } else {
            2.0 * t.acosh()
        }
    }
}

impl Mul for MobiusMap {
    type Output = MobiusMap;
    fn mul(self, rhs: MobiusMap) -> MobiusMap {
        self.compose(&rhs)
    }
}

/// ⟨x⟩ = (1+x²)^{1/2}.
#[inline]
pub fn japanese_bracket(x: f64) -> f64 {
    x.hypot(1.0)
}

/// Chord length 2|x−y|/(⟨x⟩⟨y⟩) between the circle images of two points
/// of the extended real line. Imaginary parts are ignored.
pub fn sphere_distance(x: ExtendedPoint, y: ExtendedPoint) -> f64 {
    match (x.re(), y.re()) {
        (None, None) => 0.0,
        (Some(x), None) | (None, Some(x)) => 2.0 / japanese_bracket(x),
        (Some(x), Some(y)) => sphere_distance_real(x, y),
    }
}

#[inline]
pub fn sphere_distance_real(x: f64, y: f64) -> f64 {
    2.0 * (x - y).abs() / (japanese_bracket(x) * japanese_bracket(y))
}

/// Angle θ ∈ (−π, π] of the circle point (i−x)/(i+x) = e^{iθ}; ∞ ↦ π.
pub fn angle_of(x: ExtendedPoint) -> f64 {
    match x.re() {
        None => PI,
        Some(x) => 2.0 * x.atan(),
    }
}

/// Inverse of [`angle_of`]: x = tan(θ/2), with θ ≡ π giving ∞.
pub fn point_of_angle(theta: f64) -> ExtendedPoint {
    let t = (theta + PI).rem_euclid(2.0 * PI) - PI;
    if t == -PI {
        ExtendedPoint::Infinity
    } else {
        ExtendedPoint::real((t / 2.0).tan())
    }
}

/// Chord between two circle points given by angle.
#[inline]
pub fn chord_of_angles(t1: f64, t2: f64) -> f64 {
    2.0 * ((t1 - t2) / 2.0).sin().abs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(x: f64) -> ExtendedPoint {
        ExtendedPoint::real(x)
    }

    fn gamma_alpha(alpha: f64) -> MobiusMap {
        let e = (alpha / 2.0).exp();
        MobiusMap::new(e, 0.0, e - e.recip(), e.recip()).unwrap()
    }

    #[test]
    fn identity_and_pole() {
        assert_eq!(MobiusMap::IDENTITY.apply(c(5.0)), c(5.0));
        let m = MobiusMap::new(0.0, 1.0, -1.0, 0.0).unwrap();
        assert!(m.apply(c(0.0)).is_infinite());
        assert_eq!(m.apply(ExtendedPoint::Infinity).re(), Some(0.0));
        assert!(matches!(m.derivative(c(0.0)), Err(Error::PoleOfMap { .. })));
    }

    #[test]
    fn recip_conventions() {
        assert!(c(0.0).recip().is_infinite());
        assert_eq!(ExtendedPoint::Infinity.recip(), c(0.0));
    }

    #[test]
    fn gamma_alpha_fixes_zero_and_one() {
        for alpha in [0.1, 1.0, 3.5, -2.0] {
            let g = gamma_alpha(alpha);
            assert!(g.apply_real(0.0).abs() < 1e-14);
            assert!((g.apply_real(1.0) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn gamma_alpha_derivative() {
        let alpha = 1.3;
        let g = gamma_alpha(alpha);
        let ea = alpha.exp();
        for w in [Complex64::new(0.3, 0.2), Complex64::new(-0.1, 1.5)] {
            let want = ea / ((ea - 1.0) * w + 1.0).norm_sqr();
            let got = g.derivative(w.into()).unwrap().norm();
            assert!((got - want).abs() < 1e-13 * want);
        }
    }

    #[test]
    fn scaling_derivative_is_constant() {
        let m = MobiusMap::scaling(3.0).unwrap();
        for x in [-4.0, 0.0, 2.5] {
            assert!((m.derivative_real(x) - 3.0).abs() < 1e-14);
        }
        assert!((MobiusMap::IDENTITY.derivative_real(7.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_matrices() {
        assert!(MobiusMap::new(1.0, 2.0, 2.0, 1.0).is_err());
        assert!(MobiusMap::new(f64::NAN, 0.0, 0.0, 1.0).is_err());
        assert!(MobiusMap::scaling(-1.0).is_err());
    }

    #[test]
    fn sign_convention() {
        let m = MobiusMap::new(-2.0, 0.0, 0.0, -0.5).unwrap();
        assert!(m.trace() > 0.0);
        assert!((m.det() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sphere_distance_examples() {
        assert_eq!(sphere_distance(c(0.3), c(0.3)), 0.0);
        assert!((sphere_distance(c(0.0), ExtendedPoint::Infinity) - 2.0).abs() < 1e-15);
        assert!((sphere_distance(c(1.0), c(-1.0)) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn angles_round_trip() {
        for x in [-3.0, -0.2, 0.0, 0.7, 12.0] {
            let t = angle_of(c(x));
            assert!((point_of_angle(t).re().unwrap() - x).abs() < 1e-12 * (1.0 + x.abs()));
        }
        assert!(point_of_angle(PI).is_infinite());
        assert!(point_of_angle(-PI).is_infinite());
        assert_eq!(angle_of(ExtendedPoint::Infinity), PI);
    }

    #[test]
    fn fixed_points_of_hyperbolic_map() {
        let l: f64 = 2.0;
        let g = MobiusMap::new(
            (l / 2.0).cosh(),
            (l / 2.0).sinh(),
            (l / 2.0).sinh(),
            (l / 2.0).cosh(),
        )
        .unwrap();
        let fp = g.fixed_points();
        assert_eq!(fp.len(), 2);
        // +1 attracts with derivative e^{-ℓ}
        assert!((fp[0].re().unwrap() - 1.0).abs() < 1e-14);
        assert!((g.derivative_real(1.0) - (-l).exp()).abs() < 1e-14);
        assert!((g.translation_length() - l).abs() < 1e-13);
    }

    fn arb_map() -> impl Strategy<Value = MobiusMap> {
        (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64).prop_filter_map(
            "det",
            |(a, b, c, d)| {
                if a * d - b * c > 0.1 {
                    MobiusMap::new(a, b, c, d).ok()
                } else {
                    None
                }
            },
        )
    }

    proptest! {
        #[test]
        fn group_laws(m in arb_map(), n in arb_map()) {
            let p = m * n;
            prop_assert!((p.det() - 1.0).abs() <= 1e-12);
            prop_assert!((m.inverse() * m).distance(&MobiusMap::IDENTITY) <= 1e-12);
            prop_assert!((m * m.inverse()).distance(&MobiusMap::IDENTITY) <= 1e-12);
        }

        #[test]
        fn derivative_matches_difference(m in arb_map(), x in -5.0..5.0f64) {
            let den = m.entries()[2] * x + m.entries()[3];
            prop_assume!(den.abs() > 0.05);
            let h = 1e-5 * (1.0 + x.abs());
            let fd = (m.apply_real(x + h) - m.apply_real(x - h)) / (2.0 * h);
            let d = m.derivative_real(x);
            prop_assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-300) + 1e-9);
        }

        #[test]
        fn chord_distance_matches_circle(x in -50.0..50.0f64, y in -50.0..50.0f64) {
            let z = |x: f64| {
                let q = Complex64::new(-x, 1.0) / Complex64::new(x, 1.0);
                q
            };
            let chord = (z(x) - z(y)).norm();
            prop_assert!((sphere_distance_real(x, y) - chord).abs() <= 1e-12);
            prop_assert!((chord_of_angles(2.0 * x.atan(), 2.0 * y.atan()) - chord).abs() <= 1e-12);
        }

        #[test]
        fn metric_conformality(m in arb_map(), x in -20.0..20.0f64, y in -20.0..20.0f64) {
            let lhs = sphere_distance(m.apply(c(x)), m.apply(c(y))).powi(2);
            let rhs = sphere_distance_real(x, y).powi(2)
                * m.sphere_derivative_real(x) * m.sphere_derivative_real(y);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }

        #[test]
        fn sphere_derivative_chain_rule(m in arb_map(), n in arb_map(), x in -20.0..20.0f64) {
            let lhs = (m * n).sphere_derivative(c(x));
            let rhs = m.sphere_derivative(n.apply(c(x))) * n.sphere_derivative(c(x));
            prop_assert!((lhs - rhs).abs() <= 1e-10 * lhs);
        }
    }
}
