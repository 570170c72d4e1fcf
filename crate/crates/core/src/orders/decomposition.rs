use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use super::comb::{Comb, CombPoset};
use super::poset::FinPoset;
use super::tree::{child, is_prefix, word_map, Continuation, TreeDesc, TreeOracle, Word};
use crate::error::{LabError, Result};

/// A finite binary tree mapped into a finite poset, with the interval vertex
/// `⌈v⌉` of every poset element and optionally a continuation for each leaf.
/// Poset elements are addressed by index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TreeDecomposition {
    pub tree: BTreeSet<Word>,
    pub poset: FinPoset,
    #[serde(with = "word_map")]
    pub iota: BTreeMap<Word, usize>,
    /// `ceil[v]` is the vertex whose interval contains element `v`.
    pub ceil: Vec<Word>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_word_map")]
    pub completion: Option<BTreeMap<Word, Continuation>>,
}

mod opt_word_map {
    use std::collections::BTreeMap;

    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    use super::{Continuation, Word};

    pub fn serialize<S: Serializer>(map: &Option<BTreeMap<Word, Continuation>>, s: S) -> Result<S::Ok, S::Error> {
        map.as_ref().map(|m| m.iter().collect::<Vec<_>>()).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BTreeMap<Word, Continuation>>, D::Error> {
        Ok(Option::<Vec<(Word, Continuation)>>::deserialize(d)?.map(|v| v.into_iter().collect()))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "clause", rename_all = "kebab-case")]
pub enum TdViolation {
    /// Not a prefix-closed binary tree, partial iota, or malformed `ceil`.
    Structure { detail: String },
    /// `shorter ⊏ longer` but `iota(shorter) ≮ iota(longer)`.
    Prefix { shorter: Word, longer: Word },
    /// The element lies in the intervals of `found` instead of exactly `declared`.
    Interval {
        element: usize,
        declared: Word,
        found: Vec<Word>,
    },
    /// Incompatible vertices whose images share an upper bound.
    Incompatible { left: Word, right: Word, bound: usize },
}

impl TreeDecomposition {
    /// The one-vertex decomposition of a one-element poset.
    pub fn trivial() -> Self {
        TreeDecomposition {
            tree: [vec![]].into(),
            poset: FinPoset::antichain(1),
            iota: [(vec![], 0)].into(),
            ceil: vec![vec![]],
            completion: None,
        }
    }

    pub fn leaves(&self) -> Vec<Word> {
        self.tree
            .iter()
            .filter(|v| !self.tree.contains(&child(v, 0)) && !self.tree.contains(&child(v, 1)))
            .cloned()
            .collect()
    }

    fn completion(&self) -> Result<&BTreeMap<Word, Continuation>> {
        self.completion
            .as_ref()
            .ok_or_else(|| LabError::invalid("tree decomposition has no declared completion"))
    }

    /// The tree with its declared completion.
    pub fn tree_desc(&self) -> Result<TreeDesc> {
        TreeDesc::new(
            self.tree.iter().cloned(),
            self.completion()?.iter().map(|(w, &c)| (w.clone(), c)),
        )
    }

    /// The completed poset: every comb or full continuation becomes an
    /// infinite comb above the leaf image, every chain a path above it.
    pub fn comb_poset(&self) -> Result<CombPoset> {
        let relabelled = self.poset.labels().iter().enumerate().all(|(i, &l)| l == i as u64);
        if !relabelled {
            return Err(LabError::invalid("tree decomposition poset must be labelled 0..n"));
        }
        let mut combs = Vec::new();
        let mut paths = Vec::new();
        for (leaf, &kind) in self.completion()? {
            let base = *self
                .iota
                .get(leaf)
                .ok_or_else(|| LabError::invalid(format!("completion on unknown vertex {leaf:?}")))?;
            match kind {
                Continuation::Comb | Continuation::Full => combs.push(Comb::infinite(Some(base))),
                Continuation::Chain => paths.push(Some(base)),
                Continuation::Dead => {}
            }
        }
        CombPoset::new(self.poset.clone(), combs, paths)
    }

    /// Extendibility of a finite bad sequence of element indices in the completed poset.
    pub fn extendible(&self, seq: &[u64]) -> Result<bool> {
        Ok(self.comb_poset()?.extendible(seq))
    }

    /// Unfold the completion up to `depth`: each new vertex `wb` gets a fresh
    /// element above `iota(w)` as its whole interval.
    pub fn realize(&self, depth: usize) -> Result<TreeDecomposition> {
        let desc = self.tree_desc()?;
        let mut out = self.clone();
        out.completion = None;
        for v in desc.vertices_to_depth(depth) {
            if out.tree.contains(&v) {
                continue;
            }
            let parent = out.iota[&v[..v.len() - 1]];
            let e = out.poset.add_above(&[parent]);
            out.tree.insert(v.clone());
            out.iota.insert(v.clone(), e);
            out.ceil.push(v);
        }
        Ok(out)
    }
}

pub fn validate_tree_decomposition(td: &TreeDecomposition) -> std::result::Result<(), TdViolation> {
    let structure = |detail: String| Err(TdViolation::Structure { detail });
    if !td.tree.contains(&Vec::new()) {
        return structure("missing root".into());
    }
    for w in &td.tree {
        if w.iter().any(|&b| b > 1) {
            return structure(format!("non-binary vertex {w:?}"));
        }
        if let Some((_, parent)) = w.split_last() {
            if !td.tree.contains(parent) {
                return structure(format!("parent of {w:?} missing"));
            }
        }
        match td.iota.get(w) {
            Some(&e) if e < td.poset.len() => {}
            _ => return structure(format!("iota undefined or out of range at {w:?}")),
        }
    }
    if td.iota.len() != td.tree.len() {
        return structure("iota defined outside the tree".into());
    }
    if td.ceil.len() != td.poset.len() {
        return structure(format!(
            "{} interval labels for {} elements",
            td.ceil.len(),
            td.poset.len()
        ));
    }
    let leq = |a: usize, b: usize| td.poset.leq_idx(a, b);
    let lt = |a: usize, b: usize| a != b && leq(a, b);

    for long in &td.tree {
        for k in 0..long.len() {
            let short = &long[..k];
            if !lt(td.iota[short], td.iota[long]) {
                return Err(TdViolation::Prefix {
                    shorter: short.to_vec(),
                    longer: long.clone(),
                });
            }
        }
    }

    // (parent image, image) per vertex; the root's interval is its image alone
    let spans: Vec<(&Word, Option<usize>, usize)> = td
        .tree
        .iter()
        .map(|w| (w, w.split_last().map(|(_, p)| td.iota[p]), td.iota[w]))
        .collect();
    for (e, declared) in td.ceil.iter().enumerate() {
        let inside = |&&(_, parent, image): &&(&Word, Option<usize>, usize)| match parent {
            None => e == image,
            Some(p) => lt(p, e) && leq(e, image),
        };
        let mut hits = spans.iter().filter(inside);
        let first = hits.next();
        if first.is_none_or(|h| h.0 != declared) || hits.next().is_some() {
            let found = spans.iter().filter(inside).map(|h| h.0.clone()).collect();
            return Err(TdViolation::Interval {
                element: e,
                declared: declared.clone(),
                found,
            });
        }
    }

    // With the prefix clause in place, images of incompatible vertices share an
    // upper bound only if those of the two children of their meet do.
    let up = |x: usize| (0..td.poset.len()).filter(move |&u| leq(x, u));
    for w in &td.tree {
        let (a, b) = (child(w, 0), child(w, 1));
        let (Some(&x), Some(&y)) = (td.iota.get(&a), td.iota.get(&b)) else {
            continue;
        };
        if let Some(bound) = up(x).find(|&u| leq(y, u)) {
            return Err(TdViolation::Incompatible {
                left: a,
                right: b,
                bound,
            });
        }
    }

    if let Some(completion) = &td.completion {
        for leaf in completion.keys() {
            if !td.tree.contains(leaf) || td.tree.contains(&child(leaf, 0)) || td.tree.contains(&child(leaf, 1)) {
                return structure(format!("completion on non-leaf {leaf:?}"));
            }
        }
    }
    Ok(())
}

/// Tree-side and poset-side wqo status of a decomposition with declared completion.
pub fn wqo_status(td: &TreeDecomposition) -> Result<(bool, bool)> {
    Ok((!td.tree_desc()?.infinite_width(), td.comb_poset()?.is_wqo()))
}

/// Whether `w` lies on `path`, given as an infinite word `stem⌢0^ω`.
pub fn on_zero_path(w: &[u64], stem: &[u64]) -> bool {
    if w.len() <= stem.len() {
        is_prefix(w, stem)
    } else {
        is_prefix(stem, w) && w[stem.len()..].iter().all(|&b| b == 0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::{width, Order};

    /// Root with children 0 and 1, each interval a single element.
    fn vee() -> TreeDecomposition {
        let poset = FinPoset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        TreeDecomposition {
            tree: [vec![], vec![0], vec![1]].into(),
            poset,
            iota: [(vec![], 0), (vec![0], 1), (vec![1], 2)].into(),
            ceil: vec![vec![], vec![0], vec![1]],
            completion: Some([(vec![0], Continuation::Chain), (vec![1], Continuation::Comb)].into()),
        }
    }

    #[test]
    fn trivial_passes() {
        assert_eq!(validate_tree_decomposition(&TreeDecomposition::trivial()), Ok(()));
        assert_eq!(validate_tree_decomposition(&vee()), Ok(()));
    }

    #[test]
    fn clause_violations() {
        let mut td = vee();
        td.iota.insert(vec![0], 0);
        assert!(matches!(
            validate_tree_decomposition(&td),
            Err(TdViolation::Prefix { .. })
        ));

        let mut td = vee();
        td.ceil[2] = vec![0];
        assert!(matches!(
            validate_tree_decomposition(&td),
            Err(TdViolation::Interval { element: 2, .. })
        ));

        let mut td = vee();
        td.poset = FinPoset::from_pairs(4, &[(0, 1), (0, 2), (1, 3), (2, 3)]).unwrap();
        td.ceil.push(vec![0]);
        assert!(matches!(
            validate_tree_decomposition(&td),
            Err(TdViolation::Interval { .. }) | Err(TdViolation::Incompatible { .. })
        ));
    }

    #[test]
    fn realization_grows_on_combs_only() {
        let td = vee();
        let small = td.realize(4).unwrap();
        let large = td.realize(8).unwrap();
        assert_eq!(validate_tree_decomposition(&large), Ok(()));
        let w = |t: &TreeDecomposition| width(&t.poset, t.poset.labels());
        assert!(w(&small) < w(&large));
        assert_eq!(wqo_status(&td).unwrap(), (false, false));
        let cp = td.comb_poset().unwrap();
        assert!(!cp.extendible(&[0]) && cp.extendible(&[1]) && !cp.extendible(&[2]));
        assert!(cp.leq(0, cp.tooth(0, 5)));
    }

    #[test]
    fn json_round_trip() {
        let td = vee();
        let text = serde_json::to_string(&td).unwrap();
        assert_eq!(serde_json::from_str::<TreeDecomposition>(&text).unwrap(), td);
    }
}
