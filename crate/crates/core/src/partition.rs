//! Partitions of the word tree, limit-set covers and the combinatorial
//! checks on interval sizes.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::fit_line;
use crate::mobius::MobiusMap;
use crate::schottky::{Interval, SchottkyData};
use crate::words::{children, words_of_length, Word};

/// A finite set of nonempty words. Use [`Partition::check`] to confirm that
/// it is prefix-complete.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Partition {
    pub words: Vec<Word>,
    pub resolution: Option<f64>,
}

impl Partition {
    pub fn alphabet(data: &SchottkyData) -> Self {
        Partition {
            words: words_of_length(data, 1),
            resolution: None,
        }
    }

    pub fn words_of_length(data: &SchottkyData, n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("n", "partitions consist of nonempty words"));
        }
        Ok(Partition {
            words: words_of_length(data, n),
            resolution: None,
        })
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    /// The set of reversed-and-barred words. In general not a partition.
    pub fn bar(&self, data: &SchottkyData) -> Vec<Word> {
        self.words.iter().map(|w| w.bar(data)).collect()
    }

    /// Verifies that every admissible word of length N = max |𝐚| has exactly
    /// one element of the set as a prefix.
    pub fn check(&self, data: &SchottkyData) -> Result<()> {
        let fail = |reason: String| Err(Error::NotAPartition { reason });
        if self.words.is_empty() {
            return fail("empty word set".into());
        }
        let mut set = HashSet::with_capacity(self.words.len());
        let mut strict_prefixes = HashSet::new();
        for w in &self.words {
            if w.is_empty() {
                return fail("contains the empty word".into());
            }
            w.check(data)?;
            if !set.insert(w) {
                return fail(format!("word {w} appears twice"));
            }
            for k in 1..w.len() {
                strict_prefixes.insert(&w.letters()[..k]);
            }
        }
        if let Some(w) = self
            .words
            .iter()
            .find(|w| strict_prefixes.contains(w.letters()))
        {
            return fail(format!("word {w} is a prefix of another element"));
        }
        let depth = self.words.iter().map(Word::len).max().unwrap_or(0);
        let mut stack: Vec<Word> = children(data, &Word::empty());
        while let Some(w) = stack.pop() {
            if set.contains(&w) {
                continue;
            }
            if w.len() >= depth {
                return fail(format!("word {w} has no prefix in the set"));
            }
            stack.extend(children(data, &w));
        }
        Ok(())
    }
}

/// Intervals of Z(τ), possibly inflated by a margin, sorted by left endpoint.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalCover {
    pub entries: Vec<(Word, Interval)>,
    pub resolution: f64,
    pub margin: f64,
}

impl IntervalCover {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn contains(&self, x: f64) -> bool {
        let i = self.entries.partition_point(|(_, iv)| iv.left <= x);
        // the inflated intervals can overlap, so look back over all
        // candidates whose left end is ≤ x
        self.entries[..i].iter().rev().any(|(_, iv)| iv.right >= x)
    }

    /// Union of the intervals as disjoint sorted intervals.
    pub fn merged(&self) -> Vec<Interval> {
        let mut out: Vec<Interval> = Vec::new();
        for (_, iv) in &self.entries {
            match out.last_mut() {
                Some(last) if iv.left <= last.right => last.right = last.right.max(iv.right),
                _ => out.push(*iv),
            }
        }
        out
    }

    pub fn total_length(&self) -> f64 {
        self.entries.iter().map(|(_, iv)| iv.length()).sum()
    }
}

/// Depth-first walk of the word tree below `w`, carrying γ_{𝐚} so that each
/// node costs one matrix product. `visit(word, interval, length)` returns
/// whether to descend.
fn walk<F>(data: &SchottkyData, w: Word, parent_map: MobiusMap, visit: &mut F)
where
    F: FnMut(&Word, &Interval, f64) -> bool,
{
    let last = w.last().expect("nonempty");
    let base = data.base_interval(last);
    let interval = base.image(&parent_map);
    let length = base.image_length(&parent_map);
    if visit(&w, &interval, length) {
        let map = parent_map * data.generator(last);
        for c in children(data, &w) {
            walk(data, c, map, visit);
        }
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::param("tau", format!("must be positive, got {tau}")))
    }
}

/// Z(τ) = {𝐚 : |I_𝐚| ≤ τ < |I_{𝐚′}|} with intervals, in depth-first order.
pub fn enumerate_partition_intervals(
    data: &SchottkyData,
    tau: f64,
) -> Result<Vec<(Word, Interval)>> {
    check_tau(tau)?;
    let per_letter: Vec<Vec<(Word, Interval)>> = (0..data.letters())
        .into_par_iter()
        .map(|a| {
            let mut out = Vec::new();
            walk(
                data,
                Word::letter(a),
                MobiusMap::IDENTITY,
                &mut |w, iv, len| {
                    if len <= tau {
                        out.push((w.clone(), *iv));
                        false
                    } else {
                        true
                    }
                },
            );
            out
        })
        .collect();
    Ok(per_letter.into_iter().flatten().collect())
}

pub fn enumerate_partition(data: &SchottkyData, tau: f64) -> Result<Partition> {
    let words = enumerate_partition_intervals(data, tau)?
        .into_iter()
        .map(|(w, _)| w)
        .collect();
    Ok(Partition {
        words,
        resolution: Some(tau),
    })
}

/// Intervals of Z(τ) inflated by `margin` on each side.
pub fn limit_set_cover(data: &SchottkyData, tau: f64, margin: f64) -> Result<IntervalCover> {
    if !(margin >= 0.0) {
        return Err(Error::param("margin", "must be nonnegative"));
    }
    let mut entries: Vec<(Word, Interval)> = enumerate_partition_intervals(data, tau)?
        .into_iter()
        .map(|(w, iv)| (w, iv.inflate(margin)))
        .collect();
    entries.sort_by(|a, b| a.1.left.total_cmp(&b.1.left));
    Ok(IntervalCover {
        entries,
        resolution: tau,
        margin,
    })
}

/// #Z(τ) for each τ in one walk of the tree. A word belongs to Z(τ) for
/// the τ in [|I_𝐚|, |I_{𝐚′}|).
pub fn partition_counts(data: &SchottkyData, taus: &[f64]) -> Result<Vec<usize>> {
    for &t in taus {
        check_tau(t)?;
    }
    let Some(tau_min) = taus.iter().copied().reduce(f64::min) else {
        return Ok(Vec::new());
    };
    let per_letter: Vec<Vec<usize>> = (0..data.letters())
        .into_par_iter()
        .map(|a| {
            let mut counts = vec![0usize; taus.len()];
            let root = Word::letter(a);
            walk_with_parent(
                data,
                root,
                MobiusMap::IDENTITY,
                f64::INFINITY,
                &mut |len, plen| {
                    for (k, &t) in taus.iter().enumerate() {
                        if len <= t && t < plen {
                            counts[k] += 1;
                        }
                    }
                    len > tau_min
                },
            );
            counts
        })
        .collect();
    Ok((0..taus.len())
        .map(|k| per_letter.iter().map(|c| c[k]).sum())
        .collect())
}

fn walk_with_parent<F>(
    data: &SchottkyData,
    w: Word,
    parent_map: MobiusMap,
    parent_len: f64,
    visit: &mut F,
) where
    F: FnMut(f64, f64) -> bool,
{
    let last = w.last().expect("nonempty");
    let len = data.base_interval(last).image_length(&parent_map);
    if visit(len, parent_len) {
        let map = parent_map * data.generator(last);
        for c in children(data, &w) {
            walk_with_parent(data, c, map, len, visit);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoxCountEstimate {
    pub dimension: f64,
    pub fit_residual: f64,
    /// (τ, #Z(τ)) at every dyadic scale visited.
    pub scales: Vec<(f64, usize)>,
}

/// Slope of log #Z(τ) against log(1/τ) over the last five dyadic scales,
/// refining until #Z(τ) reaches `min_count`.
pub fn box_counting_dimension(data: &SchottkyData, min_count: usize) -> Result<BoxCountEstimate> {
    const BATCH: usize = 4;
    const MAX_K: i32 = 60;
    let mut scales: Vec<(f64, usize)> = Vec::new();
    let mut k = 1;
    loop {
        let taus: Vec<f64> = (k..k + BATCH as i32).map(|j| 2f64.powi(-j)).collect();
        let counts = partition_counts(data, &taus)?;
        scales.extend(taus.into_iter().zip(counts));
        k += BATCH as i32;
        let done = scales.last().is_some_and(|&(_, c)| c >= min_count) && scales.len() >= 5;
        if done || k > MAX_K {
            break;
        }
    }
    // trim scales past the first one that reached the target
    if let Some(first) = scales.iter().position(|&(_, c)| c >= min_count) {
        scales.truncate((first + 1).max(5));
    }
    let tail = &scales[scales.len() - 5..];
    let x: Vec<f64> = tail.iter().map(|&(t, _)| -t.ln()).collect();
    let y: Vec<f64> = tail.iter().map(|&(_, c)| (c as f64).ln()).collect();
    let fit = fit_line(&x, &y)?;
    Ok(BoxCountEstimate {
        dimension: fit.slope,
        fit_residual: fit.rms_residual,
        scales,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MultiplicityReport {
    pub tau: f64,
    pub c1: f64,
    pub intervals: usize,
    pub max_count: usize,
}

/// Largest number of intervals with τ ≤ |I_𝐚| ≤ C₁τ containing a common
/// point. The count is piecewise constant between endpoints, so endpoints
/// and midpoints of consecutive endpoints are enough.
pub fn multiplicity_check(data: &SchottkyData, tau: f64, c1: f64) -> Result<MultiplicityReport> {
    check_tau(tau)?;
    if !(c1 >= 2.0) {
        return Err(Error::param("c1", format!("need C1 >= 2, got {c1}")));
    }
    let mut found: Vec<Interval> = Vec::new();
    for a in 0..data.letters() {
        walk(
            data,
            Word::letter(a),
            MobiusMap::IDENTITY,
            &mut |_, iv, len| {
                if len >= tau && len <= c1 * tau {
                    found.push(*iv);
                }
                len >= tau
            },
        );
    }
    let mut lefts: Vec<f64> = found.iter().map(|i| i.left).collect();
    let mut rights: Vec<f64> = found.iter().map(|i| i.right).collect();
    lefts.sort_by(f64::total_cmp);
    rights.sort_by(f64::total_cmp);
    let mut points: Vec<f64> = lefts.iter().chain(rights.iter()).copied().collect();
    points.sort_by(f64::total_cmp);
    let mids: Vec<f64> = points.windows(2).map(|p| 0.5 * (p[0] + p[1])).collect();
    let count_at = |x: f64| lefts.partition_point(|&l| l <= x) - rights.partition_point(|&r| r < x);
    let max_count = points
        .iter()
        .chain(mids.iter())
        .map(|&x| count_at(x))
        .max()
        .unwrap_or(0);
    Ok(MultiplicityReport {
        tau,
        c1,
        intervals: found.len(),
        max_count,
    })
}

/// Smallest C with count ≤ C·log C₁ over the given reports.
pub fn fit_multiplicity_constant(reports: &[MultiplicityReport]) -> f64 {
    reports
        .iter()
        .map(|r| r.max_count as f64 / r.c1.ln())
        .fold(0.0, f64::max)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DerivativeBoundStats {
    /// (n, min ratio, max ratio) per word length.
    pub per_depth: Vec<(usize, f64, f64)>,
    pub min_ratio: f64,
    pub max_ratio: f64,
    /// max/min over all depths.
    pub spread: f64,
}

/// Ratios |γ′_{𝐚′}(z)|/|I_𝐚| for z in the closed disk D_{aₙ}, sampled on
/// Chebyshev points of the diameter and on the boundary circle.
pub fn derivative_bound_check(data: &SchottkyData, depth: usize) -> Result<DerivativeBoundStats> {
    use num_complex::Complex64;
    use std::f64::consts::PI;
    if depth < 2 {
        return Err(Error::param("depth", "need depth >= 2"));
    }
    let samples: Vec<Vec<Complex64>> = (0..data.letters())
        .map(|a| {
            let d = data.disk(a);
            let m = 9;
            let diameter = (0..m).map(|j| {
                let t = ((2 * j + 1) as f64 * PI / (2 * m) as f64).cos();
                Complex64::new(d.center + d.radius * t, 0.0)
            });
            let boundary = (0..16).map(|j| {
                Complex64::new(d.center, 0.0)
                    + Complex64::from_polar(d.radius, 2.0 * PI * j as f64 / 16.0)
            });
            diameter.chain(boundary).collect()
        })
        .collect();
    let mut per_depth = Vec::with_capacity(depth);
    for n in 1..=depth {
        let stats = words_of_length(data, n)
            .par_iter()
            .map(|w| {
                let last = w.last().unwrap();
                let g = w.parent().map(data);
                let len = data.base_interval(last).image_length(&g);
                let [_, _, c, d] = g.entries();
                samples[last]
                    .iter()
                    .map(|&z| (z * c + d).norm_sqr().recip() / len)
                    .fold((f64::INFINITY, 0.0f64), |(lo, hi), q| {
                        (lo.min(q), hi.max(q))
                    })
            })
            .reduce(|| (f64::INFINITY, 0.0), |a, b| (a.0.min(b.0), a.1.max(b.1)));
        per_depth.push((n, stats.0, stats.1));
    }
    let min_ratio = per_depth.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
    let max_ratio = per_depth.iter().map(|p| p.2).fold(0.0, f64::max);
    Ok(DerivativeBoundStats {
        per_depth,
        min_ratio,
        max_ratio,
        spread: max_ratio / min_ratio,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionFit {
    /// max_{|𝐚|=n} |I_𝐚| for n = 1, 2, …
    pub max_lengths: Vec<f64>,
    /// Geometric rate fitted to the maxima.
    pub rate: f64,
    /// Smallest prefactor with max_n ≤ prefactor·rateⁿ.
    pub prefactor: f64,
}

pub fn contraction_fit(data: &SchottkyData, max_depth: usize) -> Result<ContractionFit> {
    if max_depth < 2 {
        return Err(Error::param("max_depth", "need at least two depths"));
    }
    let mut max_lengths = vec![0.0f64; max_depth];
    for a in 0..data.letters() {
        walk(
            data,
            Word::letter(a),
            MobiusMap::IDENTITY,
            &mut |w, _, len| {
                let n = w.len();
                max_lengths[n - 1] = max_lengths[n - 1].max(len);
                n < max_depth
            },
        );
    }
    let x: Vec<f64> = (1..=max_depth).map(|n| n as f64).collect();
    let y: Vec<f64> = max_lengths.iter().map(|l| l.ln()).collect();
    let fit = fit_line(&x, &y)?;
    let rate = fit.slope.exp();
    let prefactor = max_lengths
        .iter()
        .enumerate()
        .map(|(i, l)| l / rate.powi(i as i32 + 1))
        .fold(0.0, f64::max);
    Ok(ContractionFit {
        max_lengths,
        rate,
        prefactor,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::{elementary_schottky, symmetric_schottky};
    use crate::words::word_interval;

    fn sym() -> SchottkyData {
        symmetric_schottky(2, 0.8).unwrap()
    }

    #[test]
    fn large_tau_gives_alphabet() {
        let d = sym();
        let p = enumerate_partition(&d, 10.0).unwrap();
        assert_eq!(p.words, Partition::alphabet(&d).words);
        assert!(enumerate_partition(&d, 0.0).is_err());
    }

    #[test]
    fn elementary_partition_has_two_words() {
        let e = elementary_schottky(2.0).unwrap();
        for tau in [0.5, 0.1, 1e-3, 1e-7] {
            let p = enumerate_partition(&e, tau).unwrap();
            assert_eq!(p.len(), 2);
            p.check(&e).unwrap();
        }
    }

    #[test]
    fn partition_lengths_bracket_tau() {
        let d = sym();
        let tau = 0.01;
        for (w, iv) in enumerate_partition_intervals(&d, tau).unwrap() {
            assert!(iv.length() <= tau * (1.0 + 1e-12));
            if w.len() > 1 {
                assert!(word_interval(&d, &w.parent()).unwrap().length() > tau);
            }
        }
    }

    #[test]
    fn check_detects_bad_sets() {
        let d = sym();
        assert!(Partition::words_of_length(&d, 3).unwrap().check(&d).is_ok());
        let mut p = Partition::words_of_length(&d, 2).unwrap();
        p.words.pop();
        assert!(p.check(&d).is_err());
        let mut q = Partition::alphabet(&d);
        q.words.push(Word::new(vec![0, 0]));
        assert!(q.check(&d).is_err());
    }

    #[test]
    fn counts_match_enumeration() {
        let d = sym();
        let taus = [0.3, 0.05, 0.004];
        let counts = partition_counts(&d, &taus).unwrap();
        for (t, c) in taus.iter().zip(counts) {
            assert_eq!(enumerate_partition(&d, *t).unwrap().len(), c);
        }
    }

    #[test]
    fn cover_contains_fixed_points() {
        let e = elementary_schottky(2.0).unwrap();
        let c = limit_set_cover(&e, 1e-3, 0.0).unwrap();
        assert_eq!(c.len(), 2);
        assert!(c.contains(1.0) && c.contains(-1.0));
        assert!(!c.contains(0.0));
    }

    #[test]
    fn cover_nesting() {
        let d = sym();
        let tau = 0.02;
        let coarse = limit_set_cover(&d, tau, tau).unwrap();
        let fine = limit_set_cover(&d, tau / 2.0, 0.0).unwrap();
        for (_, iv) in &fine.entries {
            assert!(coarse.contains(iv.left) && coarse.contains(iv.right));
        }
        let m = 1e-3;
        let inflated = limit_set_cover(&d, tau, m).unwrap();
        assert!(inflated.total_length() <= inflated.len() as f64 * (tau + 2.0 * m) + 1e-12);
        let merged = inflated.merged();
        assert!(merged.windows(2).all(|p| p[0].right < p[1].left));
    }

    #[test]
    fn elementary_multiplicity() {
        let e = elementary_schottky(2.0).unwrap();
        for k in 3..12 {
            let rep = multiplicity_check(&e, 2f64.powi(-k), 2.0).unwrap();
            assert!(rep.max_count <= 2);
        }
    }

    #[test]
    fn same_scale_words_are_disjoint() {
        let d = sym();
        let tau = 0.01;
        let mut ivs: Vec<Interval> = enumerate_partition_intervals(&d, tau)
            .unwrap()
            .into_iter()
            .map(|x| x.1)
            .collect();
        ivs.sort_by(|a, b| a.left.total_cmp(&b.left));
        assert!(ivs.windows(2).all(|p| p[0].right < p[1].left));
    }

    #[test]
    fn derivative_ratios_at_fixed_point() {
        // for 1ⁿ the map γ_{1^{n-1}} has derivative e^{-(n-1)ℓ} at +1
        let e = elementary_schottky(2.0).unwrap();
        for n in 2..8 {
            let w = Word::new(vec![0; n]);
            let g = w.parent().map(&e);
            let want = (-2.0 * (n as f64 - 1.0)).exp();
            assert!((g.derivative_real(1.0) - want).abs() < 1e-12 * want);
        }
        let s = derivative_bound_check(&e, 8).unwrap();
        assert!(s.spread < 20.0, "{s:?}");
    }

    #[test]
    fn contraction_is_geometric() {
        let f = contraction_fit(&sym(), 10).unwrap();
        assert!(f.rate < 1.0);
        assert!(f.max_lengths.windows(2).all(|p| p[1] <= p[0]));
    }

    #[test]
    fn box_count_brute_force_agrees() {
        // oracle: count Z(τ) by filtering all words of bounded length
        let d = sym();
        let tau = 0.05;
        let mut brute = 0;
        for n in 1..=8 {
            for w in words_of_length(&d, n) {
                let l = word_interval(&d, &w).unwrap().length();
                let pl = if n == 1 {
                    f64::INFINITY
                } else {
                    word_interval(&d, &w.parent()).unwrap().length()
                };
                if l <= tau && tau < pl {
                    brute += 1;
                }
            }
        }
        assert_eq!(partition_counts(&d, &[tau]).unwrap()[0], brute);
    }
}
