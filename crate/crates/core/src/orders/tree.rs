//! Binary trees given by a finite realized part plus a declared continuation
//! above each leaf.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::presentation::Order;
use crate::error::{LabError, Result};
use crate::stream::Stream;

/// A vertex: a finite binary string.
pub type Word = Vec<u64>;

pub fn is_prefix(a: &[u64], b: &[u64]) -> bool {
    b.starts_with(a)
}

pub fn comparable(a: &[u64], b: &[u64]) -> bool {
    is_prefix(a, b) || is_prefix(b, a)
}

/// Shortlex index of a binary word: `2^|w| - 1 + bits(w)`. `None` for
/// non-binary words or words of length ≥ 63.
pub fn word_code(w: &[u64]) -> Option<u64> {
    if w.len() >= 63 || w.iter().any(|&b| b > 1) {
        return None;
    }
    let bits = w.iter().fold(0u64, |acc, &b| (acc << 1) | b);
    Some((1u64 << w.len()) - 1 + bits)
}

pub fn word_from_code(code: u64) -> Word {
    let len = 63 - (code + 1).leading_zeros() as usize;
    let bits = code + 1 - (1u64 << len);
    (0..len).rev().map(|i| (bits >> i) & 1).collect()
}

/// What the tree looks like above a realized leaf `ℓ`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Continuation {
    /// Nothing above `ℓ`.
    Dead,
    /// The path `ℓ0^ω`.
    Chain,
    /// The spine `ℓ0^n` with a tooth `ℓ0^n1 0^m` at every `n`.
    Comb,
    /// The full binary tree above `ℓ`.
    Full,
}

/// Ground-truth questions about a (possibly infinite) tree.
pub trait TreeOracle {
    fn contains(&self, v: &[u64]) -> bool;
    fn infinite_width(&self) -> bool;
    /// Whether `v` is incomparable with infinitely many vertices that form an antichain.
    fn extendible(&self, v: &[u64]) -> Result<bool>;
}

/// A prefix-closed finite set of binary words with a continuation for each leaf.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDesc {
    pub vertices: BTreeSet<Word>,
    #[serde(with = "word_map")]
    pub continuations: BTreeMap<Word, Continuation>,
}

impl TreeDesc {
    pub fn new(
        vertices: impl IntoIterator<Item = Word>,
        continuations: impl IntoIterator<Item = (Word, Continuation)>,
    ) -> Result<Self> {
        let tree = TreeDesc {
            vertices: vertices.into_iter().collect(),
            continuations: continuations.into_iter().collect(),
        };
        tree.validate()?;
        Ok(tree)
    }

    /// The full binary tree.
    pub fn full() -> Self {
        TreeDesc {
            vertices: [vec![]].into(),
            continuations: [(vec![], Continuation::Full)].into(),
        }
    }

    /// The realized part must be a nonempty prefix-closed set of binary words
    /// and every continuation must sit on a realized leaf.
    pub fn validate(&self) -> Result<()> {
        if !self.vertices.contains(&Vec::new()) {
            return Err(LabError::invalid("tree lacks a root"));
        }
        for v in &self.vertices {
            if v.iter().any(|&b| b > 1) {
                return Err(LabError::invalid(format!("non-binary vertex {v:?}")));
            }
            if let Some((_, parent)) = v.split_last() {
                if !self.vertices.contains(parent) {
                    return Err(LabError::invalid(format!("parent of {v:?} missing")));
                }
            }
        }
        for leaf in self.continuations.keys() {
            if !self.is_leaf(leaf) {
                return Err(LabError::invalid(format!("continuation on non-leaf {leaf:?}")));
            }
        }
        Ok(())
    }

    pub fn is_leaf(&self, v: &[u64]) -> bool {
        self.vertices.contains(v) && [0, 1].iter().all(|&b| !self.vertices.contains(&child(v, b)))
    }

    pub fn leaves(&self) -> Vec<Word> {
        self.vertices.iter().filter(|v| self.is_leaf(v)).cloned().collect()
    }

    pub fn continuation(&self, leaf: &[u64]) -> Continuation {
        self.continuations.get(leaf).copied().unwrap_or(Continuation::Dead)
    }

    /// Width of the completed tree, `None` if infinite.
    pub fn width(&self) -> Option<usize> {
        (!self.infinite_width()).then(|| self.leaves().len())
    }

    /// All vertices of the completed tree of length at most `depth`.
    pub fn vertices_to_depth(&self, depth: usize) -> Vec<Word> {
        let mut out = Vec::new();
        let mut frontier = vec![Vec::new()];
        while let Some(v) = frontier.pop() {
            if v.len() < depth {
                for b in [1, 0] {
                    let c = child(&v, b);
                    if self.contains(&c) {
                        frontier.push(c);
                    }
                }
            }
            out.push(v);
        }
        out.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        out
    }

    /// Number of vertices of length exactly `depth` in the completed tree.
    pub fn level_size(&self, depth: usize) -> usize {
        self.vertices_to_depth(depth)
            .iter()
            .filter(|v| v.len() == depth)
            .count()
    }

    /// A canonical infinite antichain when the width is infinite.
    pub fn canonical_antichain(&self) -> Option<Stream> {
        let leaf = self
            .continuations
            .iter()
            .find(|(_, &c)| matches!(c, Continuation::Comb | Continuation::Full))?
            .0
            .clone();
        // The teeth ℓ0^n1, present in both comb and full continuations.
        Some(Stream::from_fn(move |n| {
            let mut w = leaf.clone();
            w.extend(std::iter::repeat_n(0, n as usize));
            w.push(1);
            word_code(&w).expect("antichain word fits in a code")
        }))
    }
}

/// JSON object keys must be strings, so word-keyed maps travel as `[word, value]` pairs.
pub(crate) mod word_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::Word;

    pub fn serialize<V: Serialize, S: Serializer>(map: &BTreeMap<Word, V>, s: S) -> Result<S::Ok, S::Error> {
        s.collect_seq(map.iter())
    }

    pub fn deserialize<'de, V: Deserialize<'de>, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<Word, V>, D::Error> {
        Ok(Vec::<(Word, V)>::deserialize(d)?.into_iter().collect())
    }
}

pub(crate) fn child(v: &[u64], b: u64) -> Word {
    let mut c = v.to_vec();
    c.push(b);
    c
}

impl TreeOracle for TreeDesc {
    fn contains(&self, v: &[u64]) -> bool {
        if self.vertices.contains(v) {
            return true;
        }
        for (leaf, &kind) in &self.continuations {
            if !is_prefix(leaf, v) {
                continue;
            }
            let rest = &v[leaf.len()..];
            let hit = match kind {
                Continuation::Dead => false,
                Continuation::Chain => rest.iter().all(|&b| b == 0),
                Continuation::Comb => rest.iter().filter(|&&b| b == 1).count() <= 1,
                Continuation::Full => true,
            };
            if hit {
                return true;
            }
        }
        false
    }

    fn infinite_width(&self) -> bool {
        self.continuations
            .values()
            .any(|c| matches!(c, Continuation::Comb | Continuation::Full))
    }

    fn extendible(&self, v: &[u64]) -> Result<bool> {
        if !self.contains(v) {
            return Err(LabError::invalid(format!("{v:?} is not a vertex")));
        }
        Ok(self.continuations.iter().any(|(leaf, &kind)| match kind {
            // Every tooth beyond |v| is lost iff v lies on ℓ0^ω.
            Continuation::Comb => {
                let on_spine = v.len() >= leaf.len() && is_prefix(leaf, v) && v[leaf.len()..].iter().all(|&b| b == 0);
                !is_prefix(v, leaf) && !on_spine
            }
            Continuation::Full => !is_prefix(v, leaf),
            _ => false,
        }))
    }
}

/// Vertices coded by [`word_code`] under the prefix order.
impl Order for TreeDesc {
    fn leq(&self, a: u64, b: u64) -> bool {
        let (wa, wb) = (word_from_code(a), word_from_code(b));
        self.contains(&wa) && self.contains(&wb) && is_prefix(&wa, &wb)
    }
}

/// Greedily keep each element of a bad sequence of coded vertices that is
/// prefix-incomparable with everything kept so far, until `count` are kept.
pub fn thin_to_antichain(seq: &Stream, count: usize, budget: u64) -> Result<Vec<u64>> {
    let mut kept: Vec<Word> = Vec::new();
    let mut codes = Vec::new();
    for i in 0..budget {
        if kept.len() == count {
            break;
        }
        let code = seq.get(i)?;
        let w = word_from_code(code);
        if kept.iter().all(|k| !comparable(k, &w)) {
            kept.push(w);
            codes.push(code);
        }
    }
    if codes.len() < count {
        return Err(LabError::exhausted(
            budget,
            format!("only {} of {count} antichain elements", codes.len()),
        ));
    }
    Ok(codes)
}
