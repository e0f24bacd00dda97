//! Reduced words in the generators and their disks/intervals.

use std::fmt;
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::{Error, Result};
use crate::mobius::MobiusMap;
use crate::schottky::{Interval, SchottkyData};

/// A sequence of letters (0-based internally). Admissibility depends on the
/// alphabet, so it is checked against a [`SchottkyData`] where needed.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Word(Vec<usize>);

impl Word {
    pub fn new(letters: Vec<usize>) -> Self {
        Word(letters)
    }

    pub fn empty() -> Self {
        Word(Vec::new())
    }

    pub fn letter(a: usize) -> Self {
        Word(vec![a])
    }

    pub fn letters(&self) -> &[usize] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn first(&self) -> Option<usize> {
        self.0.first().copied()
    }

    pub fn last(&self) -> Option<usize> {
        self.0.last().copied()
    }

    /// The word with its last letter removed (the parent in the word tree).
    pub fn parent(&self) -> Word {
        let n = self.0.len().saturating_sub(1);
        Word(self.0[..n].to_vec())
    }

    pub fn push(&self, a: usize) -> Word {
        let mut v = self.0.clone();
        v.push(a);
        Word(v)
    }

    pub fn is_prefix_of(&self, other: &Word) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn is_admissible(&self, data: &SchottkyData) -> bool {
        let n = data.letters();
        self.0.iter().all(|&a| a < n) && self.0.windows(2).all(|w| w[1] != data.bar(w[0]))
    }

    pub fn check(&self, data: &SchottkyData) -> Result<()> {
        if self.is_admissible(data) {
            Ok(())
        } else {
            Err(Error::InadmissibleWord {
                word: self.to_string(),
            })
        }
    }

    /// Reversed word with every letter replaced by its partner; its map is
    /// the inverse.
    pub fn bar(&self, data: &SchottkyData) -> Word {
        Word(self.0.iter().rev().map(|&a| data.bar(a)).collect())
    }

    /// γ_{a₁}⋯γ_{aₙ}, the identity for the empty word.
    pub fn map(&self, data: &SchottkyData) -> MobiusMap {
        self.0
            .iter()
            .fold(MobiusMap::IDENTITY, |m, &a| m * data.generator(a))
    }

    /// Parses the display form: 1-based digits, optionally separated by
    /// dots (required once the alphabet has more than 9 letters).
    pub fn parse(s: &str) -> Result<Word> {
        let bad = || Error::param("word", format!("cannot parse {s:?}"));
        let s = s.trim();
        let letters: Vec<usize> = if s.contains('.') {
            s.split('.')
                .map(|p| p.parse::<usize>().ok().filter(|&x| x >= 1).map(|x| x - 1))
                .collect::<Option<_>>()
                .ok_or_else(bad)?
        } else {
            s.chars()
                .map(|c| c.to_digit(10).filter(|&x| x >= 1).map(|x| x as usize - 1))
                .collect::<Option<_>>()
                .ok_or_else(bad)?
        };
        Ok(Word(letters))
    }
}

impl FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Word> {
        Word::parse(s)
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "()");
        }
        let sep = if self.0.iter().any(|&a| a >= 9) {
            "."
        } else {
            ""
        };
        let parts: Vec<String> = self.0.iter().map(|a| (a + 1).to_string()).collect();
        write!(f, "{}", parts.join(sep))
    }
}

impl Serialize for Word {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// All admissible words of length n ≥ 1, in lexicographic order.
pub fn words_of_length(data: &SchottkyData, n: usize) -> Vec<Word> {
    if n == 0 {
        return vec![Word::empty()];
    }
    let mut out: Vec<Word> = (0..data.letters()).map(Word::letter).collect();
    for _ in 1..n {
        out = out.iter().flat_map(|w| children(data, w)).collect();
    }
    out
}

/// Admissible one-letter extensions of a nonempty word.
pub fn children(data: &SchottkyData, w: &Word) -> Vec<Word> {
    match w.last() {
        None => (0..data.letters()).map(Word::letter).collect(),
        Some(a) => (0..data.letters())
            .filter(|&b| b != data.bar(a))
            .map(|b| w.push(b))
            .collect(),
    }
}

/// I_𝐚 = γ_{𝐚′}(I_{aₙ}).
pub fn word_interval(data: &SchottkyData, w: &Word) -> Result<Interval> {
    let last = nonempty_admissible(data, w)?;
    Ok(data.base_interval(last).image(&w.parent().map(data)))
}

/// I′_𝐚 = γ_{𝐚′}(I′_{aₙ}), the hull of the intervals of all children of 𝐚.
pub fn word_interval_prime(data: &SchottkyData, w: &Word) -> Result<Interval> {
    let last = nonempty_admissible(data, w)?;
    Ok(data.hull_interval(last).image(&w.parent().map(data)))
}

/// |I_𝐚| computed without cancellation.
pub fn word_interval_length(data: &SchottkyData, w: &Word) -> Result<f64> {
    let last = nonempty_admissible(data, w)?;
    Ok(data.base_interval(last).image_length(&w.parent().map(data)))
}

fn nonempty_admissible(data: &SchottkyData, w: &Word) -> Result<usize> {
    w.check(data)?;
    w.last()
        .ok_or_else(|| Error::param("word", "the empty word has no interval"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::{elementary_schottky, symmetric_schottky};
    use proptest::prelude::*;

    #[test]
    fn counts() {
        let d = symmetric_schottky(2, 0.8).unwrap();
        assert_eq!(words_of_length(&d, 1).len(), 4);
        assert_eq!(words_of_length(&d, 2).len(), 12);
        assert_eq!(words_of_length(&d, 4).len(), 4 * 27);
        let e = elementary_schottky(2.0).unwrap();
        assert_eq!(words_of_length(&e, 7).len(), 2);
    }

    #[test]
    fn display_and_parse() {
        let w = Word::new(vec![0, 1, 3]);
        assert_eq!(w.to_string(), "124");
        assert_eq!(Word::parse("124").unwrap(), w);
        let long = Word::new(vec![9, 0]);
        assert_eq!(long.to_string(), "10.1");
        assert_eq!(Word::parse("10.1").unwrap(), long);
        assert!(Word::parse("1x").is_err());
        assert!(Word::parse("0").is_err());
    }

    #[test]
    fn inadmissible_rejected() {
        let d = symmetric_schottky(2, 0.8).unwrap();
        let w = Word::new(vec![0, 2]);
        assert!(matches!(
            word_interval(&d, &w),
            Err(Error::InadmissibleWord { .. })
        ));
    }

    #[test]
    fn single_letter_gives_base_interval() {
        let d = symmetric_schottky(2, 0.8).unwrap();
        for a in 0..4 {
            let i = word_interval(&d, &Word::letter(a)).unwrap();
            assert_eq!(i, d.base_interval(a));
        }
    }

    #[test]
    fn elementary_chain_shrinks_to_fixed_point() {
        let e = elementary_schottky(2.0).unwrap();
        let mut w = Word::letter(0);
        for n in 1..15 {
            let i = word_interval(&e, &w).unwrap();
            assert!(i.contains(1.0));
            if n > 3 {
                // |I_{1^n}| ≍ e^{-nℓ}
                let ratio = i.length() * (2.0 * n as f64).exp();
                assert!(ratio > 0.1 && ratio < 100.0, "{ratio}");
            }
            w = w.push(0);
        }
    }

    #[test]
    fn elementary_prime_is_single_child() {
        let e = elementary_schottky(2.0).unwrap();
        let w = Word::new(vec![1, 1]);
        let p = word_interval_prime(&e, &w).unwrap();
        let child = word_interval(&e, &w.push(1)).unwrap();
        assert!((p.left - child.left).abs() < 1e-15 && (p.right - child.right).abs() < 1e-15);
    }

    #[test]
    fn prime_intervals_nest_strictly() {
        let d = symmetric_schottky(2, 0.8).unwrap();
        for n in 1..=6 {
            for w in words_of_length(&d, n) {
                let i = word_interval(&d, &w).unwrap();
                let p = word_interval_prime(&d, &w).unwrap();
                assert!(i.contains_interior(&p), "{w}");
                for c in children(&d, &w) {
                    // hull endpoints are child endpoints, so allow rounding
                    let slack = 1e-14 * (1.0 + p.left.abs().max(p.right.abs()));
                    let ci = word_interval(&d, &c).unwrap();
                    assert!(
                        p.inflate(slack).contains_interval(&ci),
                        "{w} {c} {p:?} {ci:?}"
                    );
                    if n == 1 {
                        let cp = word_interval_prime(&d, &c).unwrap();
                        assert!(p.inflate(slack).contains_interval(&cp));
                    }
                }
            }
        }
    }

    fn arb_word(r: usize, max_len: usize) -> impl Strategy<Value = Word> {
        (
            0..2 * r,
            proptest::collection::vec(0..2 * r - 1, 0..max_len),
        )
            .prop_map(move |(first, steps)| {
                // each step picks one of the 2r−1 admissible successors
                let mut letters = vec![first];
                for s in steps {
                    let bar = (letters.last().unwrap() + r) % (2 * r);
                    letters.push(if s >= bar { s + 1 } else { s });
                }
                Word::new(letters)
            })
    }

    proptest! {
        #[test]
        fn bar_involution(w in arb_word(2, 8)) {
            let d = symmetric_schottky(2, 0.8).unwrap();
            prop_assert!(w.is_admissible(&d));
            let b = w.bar(&d);
            prop_assert!(b.is_admissible(&d));
            prop_assert_eq!(b.bar(&d), w.clone());
            let m = w.map(&d);
            let scale = m.entries().iter().fold(1.0f64, |a, x| a.max(x.abs()));
            prop_assert!(b.map(&d).distance(&m.inverse()) <= 1e-10 * scale);
        }

        #[test]
        fn nesting_and_disjointness(u in arb_word(2, 6), v in arb_word(2, 6)) {
            let d = symmetric_schottky(2, 0.8).unwrap();
            let iu = word_interval(&d, &u).unwrap();
            let iv = word_interval(&d, &v).unwrap();
            if u.is_prefix_of(&v) {
                prop_assert!(iu.contains_interval(&iv));
            } else if !v.is_prefix_of(&u) {
                prop_assert!(iu.right < iv.left || iv.right < iu.left);
            }
        }

        #[test]
        fn stable_length_agrees(w in arb_word(2, 6)) {
            let d = symmetric_schottky(2, 0.8).unwrap();
            let i = word_interval(&d, &w).unwrap();
            let l = word_interval_length(&d, &w).unwrap();
            prop_assert!((i.length() - l).abs() <= 1e-12 * (1.0 + l));
        }
    }
}
