//! Zeros of det(I − L_s) in a rectangle by the argument principle.
//!
//! A box is split until Newton's method, started at its centre, lands on a
//! point whose small surrounding box carries the whole winding number of
//! the parent. Zeros of higher multiplicity (the elementary group has only
//! double zeros) are refined with the modified step s ← s − W·f/f′.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schottky::SchottkyData;
use crate::transfer::zeta::ZetaEvaluator;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Rect {
    pub re_min: f64,
    pub re_max: f64,
    pub im_min: f64,
    pub im_max: f64,
}

impl Rect {
    pub fn new(re_min: f64, re_max: f64, im_min: f64, im_max: f64) -> Result<Self> {
        let ok = [re_min, re_max, im_min, im_max]
            .iter()
            .all(|x| x.is_finite())
            && re_min < re_max
            && im_min < im_max;
        if !ok {
            return Err(Error::param("rect", "need finite bounds with min < max"));
        }
        Ok(Rect {
            re_min,
            re_max,
            im_min,
            im_max,
        })
    }

    pub fn center(&self) -> Complex64 {
        Complex64::new(
            0.5 * (self.re_min + self.re_max),
            0.5 * (self.im_min + self.im_max),
        )
    }

    pub fn width(&self) -> f64 {
        self.re_max - self.re_min
    }

    pub fn height(&self) -> f64 {
        self.im_max - self.im_min
    }

    pub fn contains(&self, s: Complex64) -> bool {
        self.re_min <= s.re && s.re <= self.re_max && self.im_min <= s.im && s.im <= self.im_max
    }

    fn corners(&self) -> [Complex64; 4] {
        [
            Complex64::new(self.re_min, self.im_min),
            Complex64::new(self.re_max, self.im_min),
            Complex64::new(self.re_max, self.im_max),
            Complex64::new(self.re_min, self.im_max),
        ]
    }

    fn around(s: Complex64, half: f64) -> Rect {
        Rect {
            re_min: s.re - half,
            re_max: s.re + half,
            im_min: s.im - half,
            im_max: s.im + half,
        }
    }

    /// Splits the longer side at the given fraction.
    fn split(&self, frac: f64) -> (Rect, Rect) {
        if self.width() >= self.height() {
            let x = self.re_min + frac * self.width();
            (Rect { re_max: x, ..*self }, Rect { re_min: x, ..*self })
        } else {
            let y = self.im_min + frac * self.height();
            (Rect { im_max: y, ..*self }, Rect { im_min: y, ..*self })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZeroSearchOptions {
    pub min_samples_per_edge: usize,
    pub max_samples_per_edge: usize,
    pub newton_tol: f64,
    pub max_newton_iters: usize,
    /// Largest accepted |s(M) − s(2M)|.
    pub verify_tol: f64,
    /// Boxes smaller than this are reported unresolved.
    pub min_box: f64,
}

impl Default for ZeroSearchOptions {
    fn default() -> Self {
        ZeroSearchOptions {
            min_samples_per_edge: 64,
            max_samples_per_edge: 1 << 14,
            newton_tol: 1e-13,
            max_newton_iters: 60,
            verify_tol: 1e-8,
            min_box: 1e-9,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Zero {
    pub s: Complex64,
    /// |det(I − L_s)| at the reported point.
    pub abs_det: f64,
    pub m: usize,
    pub newton_iters: usize,
    /// Winding number carried by the zero (its multiplicity, or the size of
    /// an unresolved cluster).
    pub multiplicity: usize,
    /// The same zero refined on the grid with 2M nodes.
    pub s_2m: Complex64,
    pub delta_2m: f64,
    pub verified: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ZeroList {
    pub rect: Rect,
    pub m: usize,
    /// Winding number of the search rectangle.
    pub total_winding: usize,
    /// Sorted by imaginary part, then real part.
    pub zeros: Vec<Zero>,
    /// Boxes where no zero could be isolated, with their winding numbers.
    pub unresolved: Vec<(Rect, usize)>,
}

impl ZeroList {
    pub fn all_verified(&self) -> bool {
        self.unresolved.is_empty() && self.zeros.iter().all(|z| z.verified)
    }

    pub fn count_with_multiplicity(&self) -> usize {
        self.zeros.iter().map(|z| z.multiplicity).sum()
    }
}

struct Search<'a> {
    eval: &'a ZetaEvaluator,
    opts: ZeroSearchOptions,
}

/// Split fractions, deliberately off the midpoint so that lattice-like zero
/// sets do not land on box edges.
const SPLITS: [f64; 3] = [0.5617, 0.4371, 0.6229];

impl<'a> Search<'a> {
    fn f(&self, s: Complex64) -> Complex64 {
        self.eval.det(s)
    }

    /// Total change of arg f along the segment, sampled until two successive
    /// doublings agree and no step exceeds π/3.
    fn edge_arg(&self, p: Complex64, q: Complex64) -> Result<f64> {
        let mut n = self.opts.min_samples_per_edge;
        let at = |k: usize, n: usize| p + (q - p) * (k as f64 / n as f64);
        let mut vals: Vec<Complex64> = (0..=n).map(|k| self.f(at(k, n))).collect();
        let mut prev: Option<f64> = None;
        loop {
            if vals
                .iter()
                .any(|v| !(v.norm() > 0.0) || !v.re.is_finite() || !v.im.is_finite())
            {
                return Err(Error::WindingUnstable {
                    detail: format!("determinant vanishes on the edge {p} -> {q}"),
                });
            }
            let mut total = 0.0;
            let mut max_step: f64 = 0.0;
            for w in vals.windows(2) {
                let d = (w[1] / w[0]).arg();
                total += d;
                max_step = max_step.max(d.abs());
            }
            if let Some(t) = prev {
                if (t - total).abs() < 1e-6 && max_step < std::f64::consts::FRAC_PI_3 {
                    return Ok(total);
                }
            }
            if 2 * n > self.opts.max_samples_per_edge {
                return Err(Error::WindingUnstable {
                    detail: format!("edge {p} -> {q} unresolved with {n} samples"),
                });
            }
            prev = Some(total);
            let mut refined = Vec::with_capacity(2 * n + 1);
            for k in 0..n {
                refined.push(vals[k]);
                refined.push(self.f(at(2 * k + 1, 2 * n)));
            }
            refined.push(vals[n]);
            vals = refined;
            n *= 2;
        }
    }

    fn winding(&self, rect: &Rect) -> Result<usize> {
        let c = rect.corners();
        let mut total = 0.0;
        for k in 0..4 {
            total += self.edge_arg(c[k], c[(k + 1) % 4])?;
        }
        let w = total / (2.0 * std::f64::consts::PI);
        let rounded = w.round();
        if (w - rounded).abs() > 0.05 || rounded < 0.0 {
            return Err(Error::WindingUnstable {
                detail: format!("non-integral winding {w:.4}"),
            });
        }
        Ok(rounded as usize)
    }

    /// Modified Newton for a zero of multiplicity `mult`.
    fn newton(
        &self,
        eval: &ZetaEvaluator,
        start: Complex64,
        mult: usize,
        keep_in: Option<&Rect>,
    ) -> Result<(Complex64, usize)> {
        let mut s = start;
        for it in 1..=self.opts.max_newton_iters {
            let (f, logd) = eval.det_and_log_derivative(s);
            if f.norm() == 0.0 {
                return Ok((s, it));
            }
            if !(logd.re.is_finite() && logd.im.is_finite()) || logd.norm() == 0.0 {
                break;
            }
            let step = mult as f64 / logd;
            s -= step;
            if let Some(r) = keep_in {
                // allow a little room outside for zeros close to an edge
                let pad = 0.25 * r.width().max(r.height());
                let grown = Rect {
                    re_min: r.re_min - pad,
                    re_max: r.re_max + pad,
                    im_min: r.im_min - pad,
                    im_max: r.im_max + pad,
                };
                if !grown.contains(s) {
                    break;
                }
            }
            if step.norm() <= self.opts.newton_tol * (1.0 + s.norm()) {
                return Ok((s, it));
            }
        }
        Err(Error::NewtonDiverged {
            start,
            iterations: self.opts.max_newton_iters,
        })
    }

    fn isolate(
        &self,
        rect: Rect,
        w: usize,
        depth: usize,
    ) -> (Vec<(Complex64, usize, usize)>, Vec<(Rect, usize)>) {
        if w == 0 {
            return (Vec::new(), Vec::new());
        }
        if let Ok((s, iters)) = self.newton(self.eval, rect.center(), w, Some(&rect)) {
            if rect.contains(s) {
                let half = (0.1 * rect.width().min(rect.height())).min(1e-3);
                if self.winding(&Rect::around(s, half)).ok() == Some(w) {
                    return (vec![(s, iters, w)], Vec::new());
                }
            }
        }
        if rect.width().max(rect.height()) < self.opts.min_box {
            return (Vec::new(), vec![(rect, w)]);
        }
        for (k, &frac) in SPLITS.iter().enumerate() {
            let frac = if depth % 2 == 0 { frac } else { 1.0 - frac };
            let (a, b) = rect.split(frac);
            let (wa, wb) = rayon::join(|| self.winding(&a), || self.winding(&b));
            match (wa, wb) {
                (Ok(wa), Ok(wb)) if wa + wb == w => {
                    let (ra, rb) = rayon::join(
                        || self.isolate(a, wa, depth + 1),
                        || self.isolate(b, wb, depth + 1),
                    );
                    let mut zeros = ra.0;
                    zeros.extend(rb.0);
                    let mut bad = ra.1;
                    bad.extend(rb.1);
                    return (zeros, bad);
                }
                _ if k + 1 < SPLITS.len() => continue,
                _ => break,
            }
        }
        (Vec::new(), vec![(rect, w)])
    }
}

/// All zeros of det(I − L_s) in `rect`, each refined by Newton's method and
/// re-located on the grid with 2M nodes.
pub fn find_zeros(
    data: &SchottkyData,
    rect: Rect,
    m: usize,
    opts: &ZeroSearchOptions,
) -> Result<ZeroList> {
    let eval = ZetaEvaluator::new(data, m)?;
    let fine = ZetaEvaluator::new(data, 2 * m)?;
    let search = Search {
        eval: &eval,
        opts: *opts,
    };

    // nudge the rectangle outwards if a zero sits on its boundary
    let mut rect = rect;
    let mut total = search.winding(&rect);
    for k in 1..=4 {
        if total.is_ok() {
            break;
        }
        let pad = 1e-3 * k as f64 * rect.width().min(rect.height());
        rect = Rect {
            re_min: rect.re_min - pad,
            re_max: rect.re_max + 0.7 * pad,
            im_min: rect.im_min - 0.9 * pad,
            im_max: rect.im_max + 1.1 * pad,
        };
        total = search.winding(&rect);
    }
    let total = total?;

    let (found, unresolved) = search.isolate(rect, total, 0);
    let mut zeros: Vec<Zero> = found
        .into_iter()
        .map(|(s, iters, mult)| {
            let (s_2m, delta) = match search.newton(&fine, s, mult, None) {
                Ok((s2, _)) => (s2, (s2 - s).norm()),
                Err(_) => (s, f64::INFINITY),
            };
            Zero {
                s,
                abs_det: eval.det(s).norm(),
                m,
                newton_iters: iters,
                multiplicity: mult,
                s_2m,
                delta_2m: delta,
                verified: delta <= opts.verify_tol,
            }
        })
        .collect();
    zeros.sort_by(|a, b| a.s.im.total_cmp(&b.s.im).then(a.s.re.total_cmp(&b.s.re)));
    Ok(ZeroList {
        rect,
        m,
        total_winding: total,
        zeros,
        unresolved,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::elementary_schottky;

    #[test]
    fn empty_rectangle() {
        let e = elementary_schottky(2.0).unwrap();
        let r = Rect::new(1.5, 2.0, -3.0, 3.0).unwrap();
        let z = find_zeros(&e, r, 16, &ZeroSearchOptions::default()).unwrap();
        assert_eq!(z.total_winding, 0);
        assert!(z.zeros.is_empty());
    }

    #[test]
    fn finds_double_zero_at_origin() {
        let e = elementary_schottky(2.0).unwrap();
        let r = Rect::new(-0.5, 0.7, -1.0, 1.3).unwrap();
        let z = find_zeros(&e, r, 16, &ZeroSearchOptions::default()).unwrap();
        assert_eq!(z.zeros.len(), 1);
        let zero = z.zeros[0];
        assert_eq!(zero.multiplicity, 2);
        assert!(zero.s.norm() < 1e-8, "{}", zero.s);
        assert!(zero.verified);
    }

    #[test]
    fn bad_rect_rejected() {
        assert!(Rect::new(1.0, 0.0, 0.0, 1.0).is_err());
    }
}
