//! Schottky data: 2r disjoint disks centred on the real line and generators
//! pairing each disk with its partner.
//!
//! Letters are `0..2r` internally, and the partner of `a` is `(a + r) mod 2r`.
//! They print as `1..=2r`.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mobius::{ExtendedPoint, MobiusMap};

/// Closed-disk gaps below this count as touching.
pub const DISJOINT_TOL: f64 = 1e-12;
const PAIRING_TOL: f64 = 1e-10;
const BOUNDARY_TOL: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Disk {
    pub center: f64,
    pub radius: f64,
}

impl Disk {
    pub fn new(center: f64, radius: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite() && center.is_finite()) {
            return Err(Error::param(
                "radius",
                format!("must be positive, got {radius}"),
            ));
        }
        Ok(Disk { center, radius })
    }

    /// The diameter D ∩ ℝ.
    pub fn interval(&self) -> Interval {
        Interval::new(self.center - self.radius, self.center + self.radius)
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

/// A closed real interval.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub left: f64,
    pub right: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Self {
        if a <= b {
            Interval { left: a, right: b }
        } else {
            Interval { left: b, right: a }
        }
    }

    pub fn length(&self) -> f64 {
        self.right - self.left
    }

    pub fn center(&self) -> f64 {
        0.5 * (self.left + self.right)
    }

    pub fn half_width(&self) -> f64 {
        0.5 * (self.right - self.left)
    }

    pub fn contains(&self, x: f64) -> bool {
        self.left <= x && x <= self.right
    }

    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.left <= other.left && other.right <= self.right
    }

    /// Strict containment at both endpoints.
    pub fn contains_interior(&self, other: &Interval) -> bool {
        self.left < other.left && other.right < self.right
    }

    pub fn inflate(&self, margin: f64) -> Interval {
        Interval::new(self.left - margin, self.right + margin)
    }

    pub fn hull(&self, other: &Interval) -> Interval {
        Interval::new(self.left.min(other.left), self.right.max(other.right))
    }

    /// Image under a map without a pole on the interval.
    pub fn image(&self, m: &MobiusMap) -> Interval {
        Interval::new(m.apply_real(self.left), m.apply_real(self.right))
    }

    /// Length of the image, computed as |x−y|/|(cx+d)(cy+d)| which does not
    /// cancel for tiny images.
    pub fn image_length(&self, m: &MobiusMap) -> f64 {
        let [_, _, c, d] = m.entries();
        self.length() / ((c * self.left + d) * (c * self.right + d)).abs()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchottkyData {
    r: usize,
    disks: Vec<Disk>,
    generators: Vec<MobiusMap>,
}

/// Outcome of [`SchottkyData::validate`]; never aborts, lists every failure.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub passed: bool,
    pub min_gap: f64,
    pub max_pairing_residual: f64,
    pub max_boundary_residual: f64,
    pub failures: Vec<String>,
}

impl SchottkyData {
    /// Unchecked assembly; call [`SchottkyData::validate`] before use, or use
    /// [`SchottkyData::validated`].
    pub fn new(disks: Vec<Disk>, generators: Vec<MobiusMap>) -> Result<Self> {
        if disks.is_empty() || disks.len() % 2 != 0 {
            return Err(Error::param(
                "disks",
                format!("need a positive even number of disks, got {}", disks.len()),
            ));
        }
        if generators.len() != disks.len() {
            return Err(Error::param(
                "generators",
                format!("{} generators for {} disks", generators.len(), disks.len()),
            ));
        }
        Ok(SchottkyData {
            r: disks.len() / 2,
            disks,
            generators,
        })
    }

    pub fn validated(disks: Vec<Disk>, generators: Vec<MobiusMap>) -> Result<Self> {
        let data = Self::new(disks, generators)?;
        data.ensure_valid()?;
        Ok(data)
    }

    /// Generators determined by the disks: γ_a(z) = c_a − R_a R_ā/(z − c_ā),
    /// which maps the outside of D_ā onto D_a and satisfies γ_ā = γ_a⁻¹.
    pub fn from_disks(disks: Vec<Disk>) -> Result<Self> {
        if disks.is_empty() || disks.len() % 2 != 0 {
            return Err(Error::param(
                "disks",
                format!("need a positive even number of disks, got {}", disks.len()),
            ));
        }
        let r = disks.len() / 2;
        let generators = (0..2 * r)
            .map(|a| {
                let p = disks[a];
                let q = disks[(a + r) % (2 * r)];
                let rr = p.radius * q.radius;
                MobiusMap::new(p.center, -rr - p.center * q.center, 1.0, -q.center)
            })
            .collect::<Result<Vec<_>>>()?;
        Self::validated(disks, generators)
    }

    pub fn ensure_valid(&self) -> Result<()> {
        let report = self.validate();
        if report.passed {
            Ok(())
        } else {
            Err(Error::InvalidSchottky {
                failures: report.failures,
            })
        }
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// Alphabet size 2r.
    pub fn letters(&self) -> usize {
        2 * self.r
    }

    pub fn bar(&self, a: usize) -> usize {
        (a + self.r) % (2 * self.r)
    }

    pub fn disks(&self) -> &[Disk] {
        &self.disks
    }

    pub fn disk(&self, a: usize) -> Disk {
        self.disks[a]
    }

    pub fn generators(&self) -> &[MobiusMap] {
        &self.generators
    }

    pub fn generator(&self, a: usize) -> MobiusMap {
        self.generators[a]
    }

    pub fn base_interval(&self, a: usize) -> Interval {
        self.disks[a].interval()
    }

    /// Convex hull of the images γ_a(I_b), b ≠ ā: the smallest interval
    /// containing every child interval of the letter `a`.
    pub fn hull_interval(&self, a: usize) -> Interval {
        let g = self.generators[a];
        (0..self.letters())
            .filter(|&b| b != self.bar(a))
            .map(|b| self.base_interval(b).image(&g))
            .reduce(|x, y| x.hull(&y))
            .expect("every letter has a child")
    }

    pub fn validate(&self) -> ValidationReport {
        let mut failures = Vec::new();
        let n = self.letters();

        let mut min_gap = f64::INFINITY;
        for a in 0..n {
            for b in a + 1..n {
                let (p, q) = (self.disks[a], self.disks[b]);
                let gap = (p.center - q.center).abs() - p.radius - q.radius;
                min_gap = min_gap.min(gap);
                if !(gap >= DISJOINT_TOL) {
                    failures.push(format!(
                        "disks not disjoint: D{} and D{} have gap {gap:.3e}",
                        a + 1,
                        b + 1
                    ));
                }
            }
        }
        if n < 2 {
            min_gap = f64::NAN;
        }

        let mut max_pairing: f64 = 0.0;
        for a in 0..n {
            let res =
                (self.generators[self.bar(a)] * self.generators[a]).distance(&MobiusMap::IDENTITY);
            max_pairing = max_pairing.max(res);
            if !(res <= PAIRING_TOL) {
                failures.push(format!(
                    "pairing violated: gamma_{} is not the inverse of gamma_{} (residual {res:.3e})",
                    self.bar(a) + 1,
                    a + 1
                ));
            }
        }

        let mut max_boundary: f64 = 0.0;
        let mut boundary_ok = true;
        for a in 0..n {
            let g = self.generators[a];
            let src = self.disks[self.bar(a)];
            let dst = self.disks[a];
            // rounding of the sample points alone moves images by about
            // eps·|centre|/radius relative to the target radius
            let allowed = BOUNDARY_TOL
                + 1e5 * f64::EPSILON * (1.0 + src.center.abs() + dst.center.abs())
                    / src.radius.min(dst.radius);
            for k in 0..16 {
                let t = 2.0 * PI * (k as f64 + 0.25) / 16.0;
                let z = Complex64::new(src.center, 0.0) + Complex64::from_polar(src.radius, t);
                let res = match g.apply(ExtendedPoint::Finite(z)).finite() {
                    Some(w) => ((w - dst.center).norm() - dst.radius).abs() / dst.radius,
                    None => f64::INFINITY,
                };
                max_boundary = max_boundary.max(res);
                boundary_ok &= res <= allowed;
            }
            // ∞ lies outside every disk, so it must land inside D_a.
            let probe = g.apply(ExtendedPoint::Infinity);
            let inside = probe
                .finite()
                .is_some_and(|w| (w - dst.center).norm() < dst.radius);
            if !inside {
                failures.push(format!(
                    "exterior probe not mapped into D{}: gamma_{}(inf) = {probe}",
                    a + 1,
                    a + 1
                ));
            }
        }
        if !boundary_ok {
            failures.push(format!(
                "boundary circles not paired (relative residual {max_boundary:.3e})"
            ));
        }

        ValidationReport {
            passed: failures.is_empty(),
            min_gap,
            max_pairing_residual: max_pairing,
            max_boundary_residual: max_boundary,
            failures,
        }
    }
}

/// The cyclic group generated by (cosh(ℓ/2), sinh(ℓ/2); sinh(ℓ/2), cosh(ℓ/2)),
/// with its isometric circles as disks. Letter 1 contains the attracting
/// fixed point +1, letter 2 the point −1.
pub fn elementary_schottky(ell: f64) -> Result<SchottkyData> {
    if !(ell > 0.0 && ell.is_finite()) {
        return Err(Error::param("ell", format!("must be positive, got {ell}")));
    }
    let (ch, sh) = ((ell / 2.0).cosh(), (ell / 2.0).sinh());
    let center = ch / sh;
    let radius = sh.recip();
    // cosh² − sinh² cancels for large ℓ, so skip the determinant check
    let g = MobiusMap::from_unimodular(ch, sh, sh, ch);
    SchottkyData::validated(
        vec![Disk::new(center, radius)?, Disk::new(-center, radius)?],
        vec![g, g.inverse()],
    )
}

/// 2r disks whose boundary circles cut the unit circle (under the Cayley
/// identification) in equal arcs separated by `gap_angle`, with opposite
/// disks paired. One gap is centred at ∞, so no disk contains it.
pub fn symmetric_schottky(r: usize, gap_angle: f64) -> Result<SchottkyData> {
    if r < 2 {
        return Err(Error::param("r", format!("need r >= 2, got {r}")));
    }
    let width = PI / r as f64 - gap_angle;
    if !(width > 0.0) || !gap_angle.is_finite() {
        return Err(Error::param(
            "gap_angle",
            format!("must be below pi/r = {}, got {gap_angle}", PI / r as f64),
        ));
    }
    let disks = (0..2 * r)
        .map(|j| {
            let theta = -PI + (2 * j + 1) as f64 * PI / (2 * r) as f64;
            let xa = ((theta - width / 2.0) / 2.0).tan();
            let xb = ((theta + width / 2.0) / 2.0).tan();
            Disk::new(0.5 * (xa + xb), 0.5 * (xb - xa).abs())
        })
        .collect::<Result<Vec<_>>>()?;
    SchottkyData::from_disks(disks)
}
