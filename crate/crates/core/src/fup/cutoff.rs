//! Smooth cutoffs on the circle and on pairs of circle points.

use crate::mobius::chord_of_angles;
use crate::schottky::{Interval, SchottkyData};

/// C^∞ step: 0 for t ≤ 0, 1 for t ≥ 1, built from e^{−1/t}.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        return 0.0;
    }
    if t >= 1.0 {
        return 1.0;
    }
    let f = |u: f64| (-1.0 / u).exp();
    let (a, b) = (f(t), f(1.0 - t));
    a / (a + b)
}

/// A cutoff χ(y, y′) on 𝕊¹ × 𝕊¹, with points given by angle.
pub trait KernelCutoff: Sync {
    fn eval(&self, t1: f64, t2: f64) -> f64;
}

impl<F: Fn(f64, f64) -> f64 + Sync> KernelCutoff for F {
    fn eval(&self, t1: f64, t2: f64) -> f64 {
        self(t1, t2)
    }
}

/// χ depending only on the chord |y − y′|: 0 below `inner`, 1 above `outer`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RadialCutoff {
    pub inner: f64,
    pub outer: f64,
}

impl RadialCutoff {
    pub fn new(inner: f64, outer: f64) -> crate::Result<Self> {
        if !(inner > 0.0 && outer > inner) {
            return Err(crate::Error::param("chi", "need 0 < inner < outer"));
        }
        Ok(RadialCutoff { inner, outer })
    }

    /// Equal to 1 on every I_a × I_b with a ≠ b and vanishing within half
    /// the smallest chord between distinct intervals.
    pub fn for_data(data: &SchottkyData) -> Self {
        let g = min_interval_chord(data);
        RadialCutoff {
            inner: 0.5 * g,
            outer: g,
        }
    }

    pub fn profile(&self, chord: f64) -> f64 {
        smooth_step((chord - self.inner) / (self.outer - self.inner))
    }
}

impl KernelCutoff for RadialCutoff {
    fn eval(&self, t1: f64, t2: f64) -> f64 {
        self.profile(chord_of_angles(t1, t2))
    }
}

/// |y − y′|^{2ν−1}·χ₀(y, y′): the cutoff under which B(½ − ν + i/h)
/// becomes B_χ(h).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerCutoff {
    pub nu: f64,
    pub base: RadialCutoff,
}

impl KernelCutoff for PowerCutoff {
    fn eval(&self, t1: f64, t2: f64) -> f64 {
        let c = chord_of_angles(t1, t2);
        let b = self.base.profile(c);
        if b == 0.0 {
            0.0
        } else {
            c.powf(2.0 * self.nu - 1.0) * b
        }
    }
}

/// Smallest chord between endpoints of distinct base intervals.
pub fn min_interval_chord(data: &SchottkyData) -> f64 {
    let ends: Vec<(usize, f64)> = (0..data.letters())
        .flat_map(|a| {
            let iv = data.base_interval(a);
            [(a, iv.left), (a, iv.right)]
        })
        .collect();
    let mut g = f64::INFINITY;
    for &(a, x) in &ends {
        for &(b, y) in &ends {
            if a != b {
                g = g.min(crate::mobius::sphere_distance_real(x, y));
            }
        }
    }
    g
}

/// Smooth function of x: 0 outside `support`, 1 on `plateau`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub support: Interval,
    pub plateau: Interval,
}

impl Bump {
    pub fn new(support: Interval, plateau: Interval) -> crate::Result<Self> {
        if !support.contains_interior(&plateau) {
            return Err(crate::Error::param(
                "bump",
                "plateau must lie inside the support",
            ));
        }
        Ok(Bump { support, plateau })
    }

    /// 0 outside I_a and 1 on the hull of the limit set inside it.
    pub fn for_letter(data: &SchottkyData, a: usize) -> Self {
        Bump {
            support: data.base_interval(a),
            plateau: data.hull_interval(a),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let (s, p) = (self.support, self.plateau);
        if x <= s.left || x >= s.right {
            return 0.0;
        }
        smooth_step((x - s.left) / (p.left - s.left))
            * smooth_step((s.right - x) / (s.right - p.right))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::{elementary_schottky, symmetric_schottky};

    #[test]
    fn step_shape() {
        assert_eq!(smooth_step(-1.0), 0.0);
        assert_eq!(smooth_step(2.0), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        for k in 1..100 {
            let t = k as f64 / 100.0;
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-14);
            assert!(smooth_step(t) >= smooth_step(t - 0.01));
        }
    }

    #[test]
    fn default_cutoff_is_one_across_intervals() {
        let d = symmetric_schottky(2, 0.8).unwrap();
        let chi = RadialCutoff::for_data(&d);
        let pts = |a: usize| {
            let iv = d.base_interval(a);
            (0..=10).map(move |k| 2.0 * (iv.left + iv.length() * k as f64 / 10.0).atan())
        };
        for a in 0..4 {
            for b in 0..4 {
                if a == b {
                    continue;
                }
                for t1 in pts(a) {
                    for t2 in pts(b) {
                        assert_eq!(chi.eval(t1, t2), 1.0);
                    }
                }
            }
        }
        assert_eq!(chi.eval(0.3, 0.3), 0.0);
        assert_eq!(chi.eval(0.3, 0.3 + 0.4 * chi.inner), 0.0);
    }

    #[test]
    fn bump_support() {
        let d = elementary_schottky(2.0).unwrap();
        let b = Bump::for_letter(&d, 0);
        assert_eq!(b.eval(b.support.left), 0.0);
        assert_eq!(b.eval(b.plateau.center()), 1.0);
        assert_eq!(b.eval(b.plateau.left), 1.0);
        assert!(b.eval(0.5 * (b.support.left + b.plateau.left)) > 0.0);
    }
}
