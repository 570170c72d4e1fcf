//! Labelling binary strings by a poset, and the colorings and consistency
//! checks induced by a backward functional on strings.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::orders::{Order, Word};
use crate::stream::Stream;
use crate::transducer::{Run, Transducer};

/// What is left of a string after its complete blocks `0^i 1 b` are read.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Remainder {
    Zeros(usize),
    ZerosOne(usize),
}

/// A monotone map from binary strings to a poset given by an enumeration
/// `x_i` of its elements. Finite enumerations repeat cyclically.
pub struct Labelling<'a> {
    order: &'a dyn Order,
    enumeration: Vec<u64>,
}

impl<'a> Labelling<'a> {
    pub fn new(order: &'a dyn Order, enumeration: Vec<u64>) -> Self {
        assert!(!enumeration.is_empty(), "empty enumeration");
        Labelling { order, enumeration }
    }

    pub fn element(&self, i: usize) -> u64 {
        self.enumeration[i % self.enumeration.len()]
    }

    /// Read `sigma` block by block starting from label `x`: a block `0^i 1 1`
    /// moves the label up to `x_i` when that is above it.
    pub fn label_from(&self, x: u64, sigma: &[u64]) -> (u64, Remainder) {
        let mut x = x;
        let mut pos = 0;
        loop {
            let zeros = sigma[pos..].iter().take_while(|&&b| b == 0).count();
            pos += zeros;
            if pos == sigma.len() {
                return (x, Remainder::Zeros(zeros));
            }
            pos += 1;
            let Some(&b) = sigma.get(pos) else {
                return (x, Remainder::ZerosOne(zeros));
            };
            pos += 1;
            let target = self.element(zeros);
            if b == 1 && self.order.leq(x, target) {
                x = target;
            }
        }
    }

    pub fn label(&self, sigma: &[u64]) -> u64 {
        self.label_from(self.element(0), sigma).0
    }

    /// An extension of `sigma` that closes its pending block without moving the
    /// label, so that every later block starts afresh.
    pub fn reset(&self, sigma: &[u64]) -> Word {
        let mut tau = sigma.to_vec();
        if let (_, Remainder::Zeros(_)) = self.label_from(self.element(0), sigma) {
            tau.push(1);
        }
        tau.push(0);
        tau
    }

    /// `reset(sigma) ⌢ 0^i 1 1`, labelled `x_i` whenever `x_i` lies above the label of `sigma`.
    pub fn jump(&self, sigma: &[u64], i: usize) -> Word {
        let mut tau = self.reset(sigma);
        tau.extend(std::iter::repeat_n(0, i));
        tau.extend([1, 1]);
        tau
    }

    /// The least string in shortlex order whose label satisfies `target`.
    pub fn search(&self, target: impl Fn(u64) -> bool, max_len: usize) -> Option<Word> {
        strings_to_depth(max_len).into_iter().find(|s| target(self.label(s)))
    }
}

/// All binary strings of length at most `depth`, in shortlex order.
pub fn strings_to_depth(depth: usize) -> Vec<Word> {
    let mut out = vec![Vec::new()];
    let mut level = vec![Vec::new()];
    for _ in 0..depth {
        level = level
            .iter()
            .flat_map(|s: &Word| {
                [0, 1].map(|b| {
                    let mut c = s.clone();
                    c.push(b);
                    c
                })
            })
            .collect();
        out.extend(level.iter().cloned());
    }
    out
}

fn psi_input_head(sigma: &[u64]) -> Vec<u64> {
    let mut head = vec![sigma.len() as u64];
    head.extend_from_slice(sigma);
    head
}

/// Run `psi` on `[|σ|] ⌢ σ ⌢ x` for every σ of length at most `depth`, one
/// symbol per live run per round, in shortlex order. A run halting with
/// `v < k` colors every still uncolored prefix of σ with `v`. Strings left
/// uncolored after `rounds` rounds map to `None`.
pub fn coloring_from_backward(
    psi: &dyn Transducer,
    x: &Stream,
    k: u64,
    depth: usize,
    rounds: u64,
) -> BTreeMap<Word, Option<u64>> {
    let strings = strings_to_depth(depth);
    let mut color: BTreeMap<Word, Option<u64>> = strings.iter().map(|s| (s.clone(), None)).collect();
    type Pending = Option<(Box<dyn Run>, Vec<u64>)>;
    let mut runs: Vec<Pending> = strings.iter().map(|s| Some((psi.start(), psi_input_head(s)))).collect();
    let mut out = Vec::new();
    for round in 0..rounds {
        for (idx, slot) in runs.iter_mut().enumerate() {
            let Some((run, head)) = slot else { continue };
            let r = round as usize;
            let symbol = head.get(r).copied().unwrap_or_else(|| x.at((r - head.len()) as u64));
            out.clear();
            run.feed(symbol, &mut out);
            if let Some(&v) = out.first() {
                *slot = None;
                if v < k {
                    let sigma = &strings[idx];
                    for len in 0..=sigma.len() {
                        color.entry(sigma[..len].to_vec()).and_modify(|c| *c = c.or(Some(v)));
                    }
                }
            }
        }
    }
    color
}

/// The least σ (shortlex) and then least color `i` such that every τ ⊒ σ of
/// length at most `depth` has an extension of color `i` within `depth`.
/// Strings at full depth count as their own extensions, so a dense pair
/// always exists on a total coloring.
pub fn dense_color_finder(color: &BTreeMap<Word, Option<u64>>, k: u64, depth: usize) -> Option<(Word, u64)> {
    let strings = strings_to_depth(depth);
    let mut reach: BTreeMap<Word, Vec<bool>> = BTreeMap::new();
    let mut dense: BTreeMap<Word, Vec<bool>> = BTreeMap::new();
    for s in strings.iter().rev() {
        let own = color.get(s).copied().flatten();
        let mut r: Vec<bool> = (0..k).map(|i| own == Some(i)).collect();
        let mut d = vec![true; k as usize];
        if s.len() < depth {
            for b in [0, 1] {
                let mut c = s.clone();
                c.push(b);
                for i in 0..k as usize {
                    r[i] |= reach[&c][i];
                    d[i] &= dense[&c][i];
                }
            }
        }
        for i in 0..k as usize {
            d[i] &= r[i];
        }
        reach.insert(s.clone(), r);
        dense.insert(s.clone(), d);
    }
    strings
        .iter()
        .find_map(|s| dense[s].iter().position(|&d| d).map(|i| (s.clone(), i as u64)))
}

/// Outputs of `psi` on `[|τ|] ⌢ τ ⌢ x` for τ of length at most `depth`, and
/// the strings σ having two extensions whose outputs disagree somewhere, in shortlex order.
pub fn consistency_filter(psi: &dyn Transducer, x: &Stream, depth: usize, steps: u64) -> Vec<Word> {
    let strings = strings_to_depth(depth);
    let output = |tau: &Word| -> Vec<u64> {
        let mut run = psi.start();
        let mut out = Vec::new();
        for s in psi_input_head(tau) {
            run.feed(s, &mut out);
        }
        for i in 0..steps {
            run.feed(x.at(i), &mut out);
        }
        out
    };
    // the longest common output of a subtree, `None` once two outputs conflict
    fn merge(a: Option<Vec<u64>>, b: &Option<Vec<u64>>) -> Option<Vec<u64>> {
        let (a, b) = (a?, b.as_ref()?);
        let n = a.len().min(b.len());
        if a[..n] != b[..n] {
            return None;
        }
        Some(if a.len() >= b.len() { a } else { b.clone() })
    }
    let mut consensus: BTreeMap<Word, Option<Vec<u64>>> = BTreeMap::new();
    for s in strings.iter().rev() {
        let mut c = Some(output(s));
        if s.len() < depth {
            for b in [0, 1] {
                let mut child = s.clone();
                child.push(b);
                c = merge(c, &consensus[&child]);
            }
        }
        consensus.insert(s.clone(), c);
    }
    strings.into_iter().filter(|s| consensus[s].is_none()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::FinPoset;
    use crate::transducer::FnTransducer;

    /// Literal recursion on the block structure, independent of the parser.
    fn oracle(order: &dyn Order, xs: &[u64], x: u64, sigma: &[u64]) -> u64 {
        let i = sigma.iter().take_while(|&&b| b == 0).count();
        if sigma.len() <= i + 1 {
            return x;
        }
        let (b, rest) = (sigma[i + 1], &sigma[i + 2..]);
        let xi = xs[i % xs.len()];
        if b == 1 && order.leq(x, xi) {
            oracle(order, xs, xi, rest)
        } else {
            oracle(order, xs, x, rest)
        }
    }

    fn two_chain() -> FinPoset {
        FinPoset::from_pairs(2, &[(0, 1)]).unwrap()
    }

    #[test]
    fn hand_evaluated_label() {
        let p = two_chain();
        let lab = Labelling::new(&p, vec![0, 1]);
        assert_eq!(lab.label(&[]), 0);
        assert_eq!(lab.label(&[0, 1, 1, 0]), 1);
        assert_eq!(lab.label(&[0, 1, 0, 0]), 0);
    }

    #[test]
    fn parser_matches_recursion_and_is_monotone() {
        let p = FinPoset::from_pairs(4, &[(0, 1), (0, 2), (1, 3)]).unwrap();
        let xs = vec![0, 2, 1, 3];
        let lab = Labelling::new(&p, xs.clone());
        for s in strings_to_depth(8) {
            let l = lab.label(&s);
            assert_eq!(l, oracle(&p, &xs, 0, &s), "{s:?}");
            if let Some((_, parent)) = s.split_last() {
                assert!(p.leq(lab.label(parent), l));
            }
        }
    }

    #[test]
    fn reset_then_jump() {
        let p = two_chain();
        let lab = Labelling::new(&p, vec![0, 1]);
        for s in strings_to_depth(6) {
            let base = lab.label(&s);
            for i in 0..2 {
                if p.leq(base, lab.element(i)) {
                    assert_eq!(lab.label(&lab.jump(&s, i)), lab.element(i));
                }
            }
        }
    }

    fn halting(f: impl Fn(&[u64]) -> Option<u64> + Send + Sync + 'static) -> FnTransducer<(Vec<u64>, bool)> {
        FnTransducer::new((Vec::new(), false), move |(seen, done), s| {
            let mut seen = seen.clone();
            seen.push(s);
            if *done {
                return ((seen, true), vec![]);
            }
            match f(&seen) {
                Some(v) => ((seen, true), vec![v]),
                None => ((seen, false), vec![]),
            }
        })
    }

    #[test]
    fn colorings() {
        let one = halting(|_| Some(1));
        let c = coloring_from_backward(&one, &Stream::zeros(), 2, 4, 3);
        assert!(c.values().all(|&v| v == Some(1)));

        let never = halting(|_| None);
        let c = coloring_from_backward(&never, &Stream::zeros(), 2, 3, 20);
        assert!(c.values().all(|v| v.is_none()));

        // halts once the whole string has been read, with its length mod 2, from length 2 on
        let by_len = halting(|seen| {
            let len = seen[0] as usize;
            (len >= 2 && seen.len() == len + 1).then_some(len as u64 % 2)
        });
        let c = coloring_from_backward(&by_len, &Stream::zeros(), 2, 3, 10);
        assert_eq!(c[&vec![]], Some(0));
        assert_eq!(c[&vec![1]], Some(0));
        assert_eq!(c[&vec![0, 1, 1]], Some(1));
    }

    #[test]
    fn dense_colors() {
        let total = |f: fn(&Word) -> u64| -> BTreeMap<Word, Option<u64>> {
            strings_to_depth(6)
                .into_iter()
                .map(|s| {
                    let v = f(&s);
                    (s, Some(v))
                })
                .collect()
        };
        assert_eq!(dense_color_finder(&total(|_| 0), 2, 6), Some((vec![], 0)));
        assert_eq!(
            dense_color_finder(&total(|s| s.first().copied().unwrap_or(0)), 2, 6),
            Some((vec![0], 0))
        );
        assert_eq!(
            dense_color_finder(&total(|s| s.len() as u64 % 2), 2, 6),
            Some((vec![], 0))
        );
    }

    #[test]
    fn consistency() {
        let ignore = halting(|seen| (seen.len() > seen[0] as usize + 1).then_some(7));
        assert!(consistency_filter(&ignore, &Stream::zeros(), 3, 2).is_empty());

        let first_bit = halting(|seen| {
            (seen.len() > seen[0] as usize + 1).then(|| seen.get(1).copied().filter(|_| seen[0] > 0).unwrap_or(0))
        });
        let out = consistency_filter(&first_bit, &Stream::zeros(), 3, 2);
        assert_eq!(out.first(), Some(&vec![]));
        assert!(!out.contains(&vec![0]));

        // constant above 01, but reading the second bit elsewhere
        let quirky = halting(|seen| {
            let len = seen[0] as usize;
            (seen.len() > len + 1).then(|| {
                let s = &seen[1..=len];
                if s.starts_with(&[0, 1]) {
                    5
                } else {
                    s.get(1).copied().unwrap_or(0)
                }
            })
        });
        let out = consistency_filter(&quirky, &Stream::zeros(), 4, 2);
        assert!(!out.contains(&vec![0, 1]));
        assert!(out.contains(&vec![1]));
    }
}
