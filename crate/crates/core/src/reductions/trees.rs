//! Reductions around antichains in binary trees: the parallel limit-avoidance
//! selector, the tree built from a Π⁰₂-ACC_ℕ instance, the LPO answer rule
//! for vertex guessers, and the transfer along a tree decomposition.

use std::collections::BTreeSet;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::choice::{acc_limitavoid, RowFamily};
use crate::error::{LabError, Result};
use crate::orders::{is_prefix, word_code, Continuation, TreeDecomposition, TreeDesc, TreeOracle, Word};
use crate::problems::{verify_bs, verify_pitacc, Domain, Verdict};
use crate::stream::{Stream, StreamSpec};

fn minimal(excluded: &[Word]) -> Vec<Word> {
    let mut out: Vec<Word> = Vec::new();
    let mut sorted = excluded.to_vec();
    sorted.sort_by_key(|w| w.len());
    for w in sorted {
        if !out.iter().any(|u| is_prefix(u, &w)) {
            out.push(w);
        }
    }
    out
}

/// Vertices of the continuation above `leaf` at `d` levels further up that extend `u` (which extends `leaf`).
fn continuation_count(kind: Continuation, d: usize, u: &[u64]) -> u128 {
    let ones = u.iter().filter(|&&b| b == 1).count();
    if u.len() > d {
        return 0;
    }
    match kind {
        Continuation::Dead => u128::from(d == 0),
        Continuation::Chain => u128::from(ones == 0),
        Continuation::Comb => match ones {
            0 => (d - u.len()) as u128 + 1,
            1 => 1,
            _ => 0,
        },
        Continuation::Full => 1u128.checked_shl((d - u.len()) as u32).unwrap_or(u128::MAX),
    }
}

/// Number of vertices of length `depth` in the completed tree that extend no excluded vertex.
pub fn level_count_excluding(tree: &TreeDesc, depth: usize, excluded: &[Word]) -> u128 {
    let excluded = minimal(excluded);
    let outside = |v: &[u64]| !excluded.iter().any(|u| is_prefix(u, v));
    let mut total: u128 = tree.vertices.iter().filter(|v| v.len() == depth && outside(v)).count() as u128;
    for leaf in tree.leaves() {
        if leaf.len() >= depth || !outside(&leaf) {
            continue;
        }
        let kind = tree.continuation(&leaf);
        let d = depth - leaf.len();
        let mut count = continuation_count(kind, d, &[]);
        for u in excluded.iter().filter(|u| is_prefix(&leaf, u)) {
            count = count.saturating_sub(continuation_count(kind, d, &u[leaf.len()..]));
        }
        total = total.saturating_add(count);
    }
    total
}

/// Whether the completed tree minus the cones above `excluded` has infinite width.
pub fn infinite_width_excluding(tree: &TreeDesc, excluded: &[Word]) -> bool {
    tree.continuations.iter().any(|(leaf, &kind)| {
        let covers_leaf = excluded.iter().any(|u| is_prefix(u, leaf));
        match kind {
            Continuation::Full => !covers_leaf,
            // the teeth survive unless a cone contains the whole spine from some point on
            Continuation::Comb => {
                !covers_leaf
                    && !excluded
                        .iter()
                        .any(|u| is_prefix(leaf, u) && u[leaf.len()..].iter().all(|&b| b == 0))
            }
            _ => false,
        }
    })
}

/// One round of the greedy selector: `k` candidates on one level, the
/// Π⁰₂-ACC_k instance built from their growth rows, and the chosen index.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SelectionRound {
    pub candidates: Vec<Word>,
    pub instance: Vec<u64>,
    /// Every answer the Π⁰₂-ACC_k verifier accepts at the budget.
    pub accepted: Vec<u64>,
    pub choice: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Selection {
    pub rounds: Vec<SelectionRound>,
    pub antichain: Vec<Word>,
}

/// The first `k` vertices (shortlex) of the shallowest level below `depth`
/// holding `k` vertices incomparable with everything in `chosen`.
fn candidates(tree: &TreeDesc, chosen: &[Word], k: usize, depth: usize) -> Option<Vec<Word>> {
    let all = tree.vertices_to_depth(depth);
    (0..=depth).find_map(|level| {
        let free: Vec<Word> = all
            .iter()
            .filter(|v| v.len() == level && chosen.iter().all(|c| !is_prefix(c, v) && !is_prefix(v, c)))
            .take(k)
            .cloned()
            .collect();
        (free.len() == k).then_some(free)
    })
}

/// Growth rows for the candidates and the limit-avoidance stream over them.
pub fn selection_instance(tree: &TreeDesc, chosen: &[Word], cands: &[Word], budget: u64) -> Stream {
    let rows: Vec<Vec<u64>> = cands
        .iter()
        .map(|c| {
            let mut ex = chosen.to_vec();
            ex.push(c.clone());
            let counts: Vec<u128> = (0..=budget as usize + 1)
                .map(|j| level_count_excluding(tree, j, &ex))
                .collect();
            counts.windows(2).map(|w| u64::from(w[1] > w[0])).collect()
        })
        .collect();
    let rows = Arc::new(rows);
    let q: RowFamily = Arc::new(move |n, j| {
        rows.get(n as usize)
            .and_then(|r| r.get(j as usize))
            .copied()
            .unwrap_or(0)
    });
    acc_limitavoid(Domain::Finite(cands.len() as u64), q)
}

/// Build an antichain of `count` vertices, each round asking a Π⁰₂-ACC_k
/// solver (the least answer accepted at `budget`) which candidate to keep.
pub fn bstree_to_pitacc(tree: &TreeDesc, k: usize, count: usize, depth: usize, budget: u64) -> Result<Selection> {
    let mut chosen: Vec<Word> = Vec::new();
    let mut rounds = Vec::new();
    while chosen.len() < count {
        let cands = candidates(tree, &chosen, k, depth).ok_or_else(|| {
            LabError::exhausted(
                depth as u64,
                format!("fewer than {k} free vertices up to depth {depth}"),
            )
        })?;
        let p = selection_instance(tree, &chosen, &cands, budget);
        let instance = p.prefix(budget).0;
        let p = Stream::with_prefix(instance.clone(), Stream::zeros());
        let accepted: Vec<u64> = (0..k as u64)
            .filter(|&n| verify_pitacc(Domain::Finite(k as u64), &p, n, budget).accepts())
            .collect();
        let choice = *accepted
            .first()
            .ok_or_else(|| LabError::contract("every candidate looks like the limit"))?;
        chosen.push(cands[choice as usize].clone());
        rounds.push(SelectionRound {
            candidates: cands,
            instance,
            accepted,
            choice,
        });
    }
    Ok(Selection {
        rounds,
        antichain: chosen,
    })
}

/// The tree built level by level from `p`: at level `s + 1` the leftmost leaf
/// above the vertex labelled `min(p_s, s)` splits and every other leaf grows
/// a left child. Labels follow breadth-first order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExtVerTree {
    pub p: StreamSpec,
    /// Vertices in label order.
    pub vertices: Vec<Word>,
    pub levels: usize,
}

impl ExtVerTree {
    pub fn build(p: &StreamSpec, levels: usize) -> Self {
        let stream = p.build();
        let mut vertices: Vec<Word> = vec![vec![]];
        let mut leaves: Vec<Word> = vec![vec![]];
        for s in 0..levels.saturating_sub(1) as u64 {
            let target = &vertices[stream.at(s).min(s) as usize];
            let split = leaves
                .iter()
                .position(|l| is_prefix(target, l))
                .expect("every vertex has a leaf above it");
            let mut next = Vec::new();
            for (i, l) in leaves.iter().enumerate() {
                for b in if i == split { vec![0, 1] } else { vec![0] } {
                    let mut c = l.clone();
                    c.push(b);
                    next.push(c);
                }
            }
            vertices.extend(next.iter().cloned());
            leaves = next;
        }
        ExtVerTree {
            p: p.clone(),
            vertices,
            levels,
        }
    }

    pub fn label(&self, v: &[u64]) -> Option<u64> {
        self.vertices.iter().position(|w| w == v).map(|i| i as u64)
    }

    pub fn vertex(&self, label: u64) -> Option<&Word> {
        self.vertices.get(label as usize)
    }

    /// Values recurring forever in `p`.
    fn recurring(&self) -> BTreeSet<u64> {
        let cycle = if self.p.cycle.is_empty() {
            vec![0]
        } else {
            self.p.cycle.clone()
        };
        cycle.into_iter().collect()
    }

    /// The least extendible vertex in label order.
    pub fn least_extendible(&self) -> Result<Word> {
        for v in &self.vertices {
            if self.extendible(v)? {
                return Ok(v.clone());
            }
        }
        Err(LabError::exhausted(
            self.vertices.len() as u64,
            "no extendible vertex realized",
        ))
    }
}

impl TreeOracle for ExtVerTree {
    fn contains(&self, v: &[u64]) -> bool {
        self.vertices.iter().any(|w| w == v)
    }

    fn infinite_width(&self) -> bool {
        true
    }

    /// Splits for the value `n` eventually all lie on `vertex(n)⌢0^ω`, so `v`
    /// is extendible iff it is off that path for some recurring value.
    fn extendible(&self, v: &[u64]) -> Result<bool> {
        if !self.contains(v) {
            return Err(LabError::invalid(format!("{v:?} not realized")));
        }
        let mut any = false;
        for n in self.recurring() {
            let base = self
                .vertex(n)
                .ok_or_else(|| LabError::exhausted(self.levels as u64, format!("vertex {n} not realized")))?;
            let on_path = if v.len() <= base.len() {
                is_prefix(v, base)
            } else {
                is_prefix(base, v) && v[base.len()..].iter().all(|&b| b == 0)
            };
            any |= !on_path;
        }
        Ok(any)
    }
}

/// Answer an LPO query about a vertex sequence with at most one
/// non-extendible entry: does some entry properly extend an earlier one?
pub fn extver_lpo_query(vs: &Stream) -> Stream {
    let vs = vs.clone();
    Stream::from_fn(move |s| u64::from(first_comparable(&vs, s + 1).is_some()))
}

/// The first `(j, k)` with `j < k < bound` and `v_j` a proper prefix of `v_k`,
/// scanning `k` in the outer loop.
pub fn first_comparable(vs: &Stream, bound: u64) -> Option<(u64, u64)> {
    let words: Vec<Word> = (0..bound).map(|i| crate::orders::word_from_code(vs.at(i))).collect();
    (0..bound as usize).find_map(|k| {
        (0..k)
            .find(|&j| words[j].len() < words[k].len() && is_prefix(&words[j], &words[k]))
            .map(|j| (j as u64, k as u64))
    })
}

/// With answer 1 the later entry of the first comparable pair is extendible,
/// with answer 0 the sequence is an antichain and its first entry is.
pub fn extver_lpo_backward(vs: &Stream, answer: u64, budget: u64) -> Result<Word> {
    let code = if answer == 0 {
        vs.at(0)
    } else {
        let (_, k) =
            first_comparable(vs, budget).ok_or_else(|| LabError::exhausted(budget, "no comparable pair found"))?;
        vs.at(k)
    };
    Ok(crate::orders::word_from_code(code))
}

impl TreeDecomposition {
    /// Unfold the completion along every prefix of `words`.
    pub fn realize_along(&self, words: &[Word]) -> Result<TreeDecomposition> {
        let desc = self.tree_desc()?;
        let mut needed: Vec<Word> = words
            .iter()
            .flat_map(|w| (0..=w.len()).map(move |i| w[..i].to_vec()))
            .collect();
        needed.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
        needed.dedup();
        let mut out = self.clone();
        out.completion = None;
        for v in needed {
            if out.tree.contains(&v) {
                continue;
            }
            if !desc.contains(&v) {
                return Err(LabError::invalid(format!("{v:?} is not in the completed tree")));
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

/// A bad sequence of `len` poset indices: the canonical tree antichain
/// mapped through `ι`. Returns the realized decomposition and the sequence.
pub fn td_transfer(td: &TreeDecomposition, len: u64) -> Result<(TreeDecomposition, Vec<u64>)> {
    let desc = td.tree_desc()?;
    let anti = desc
        .canonical_antichain()
        .ok_or_else(|| LabError::contract("tree has finite width"))?;
    let words: Vec<Word> = (0..len).map(|i| crate::orders::word_from_code(anti.at(i))).collect();
    let realized = td.realize_along(&words)?;
    let seq = words.iter().map(|w| realized.iota[w] as u64).collect();
    Ok((realized, seq))
}

pub fn verify_td_transfer(realized: &TreeDecomposition, seq: &[u64]) -> Verdict {
    let labelled: Vec<u64> = seq.iter().map(|&i| realized.poset.label(i as usize)).collect();
    verify_bs(
        &realized.poset,
        &Stream::with_prefix(labelled, Stream::zeros()),
        seq.len() as u64,
    )
}

/// Coded vertices of a binary tree as a stream, zero-padded.
pub fn code_stream(words: &[Word]) -> Result<Stream> {
    let codes = words
        .iter()
        .map(|w| word_code(w).ok_or_else(|| LabError::invalid(format!("{w:?} has no code"))))
        .collect::<Result<Vec<u64>>>()?;
    Ok(Stream::with_prefix(codes, Stream::zeros()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::{validate_tree_decomposition, word_from_code, FinPoset};
    use crate::problems::{verify_bstree, verify_extver};

    fn comb() -> TreeDesc {
        TreeDesc::new([vec![]], [(vec![], Continuation::Comb)]).unwrap()
    }

    /// Direct count over the enumerated completed tree.
    fn brute(tree: &TreeDesc, depth: usize, excluded: &[Word]) -> u128 {
        tree.vertices_to_depth(depth)
            .iter()
            .filter(|v| v.len() == depth && !excluded.iter().any(|u| is_prefix(u, v)))
            .count() as u128
    }

    #[test]
    fn level_counts_match_enumeration() {
        let mixed = TreeDesc::new(
            [vec![], vec![0], vec![1], vec![1, 0]],
            [(vec![0], Continuation::Comb), (vec![1, 0], Continuation::Full)],
        )
        .unwrap();
        let exclusions: Vec<Vec<Word>> = vec![
            vec![],
            vec![vec![0, 0]],
            vec![vec![0, 1], vec![1, 0, 1]],
            vec![vec![0], vec![0, 0, 0]],
            vec![vec![1]],
        ];
        for ex in &exclusions {
            for d in 0..9 {
                assert_eq!(
                    level_count_excluding(&mixed, d, ex),
                    brute(&mixed, d, ex),
                    "{ex:?} at {d}"
                );
            }
        }
    }

    #[test]
    fn ground_truth_width() {
        let t = comb();
        assert!(infinite_width_excluding(&t, &[vec![1]]));
        assert!(!infinite_width_excluding(&t, &[vec![0, 0]]));
        assert!(infinite_width_excluding(&t, &[vec![0, 1]]));
    }

    #[test]
    fn selector_on_full_tree() {
        let full = TreeDesc::full();
        let sel = bstree_to_pitacc(&full, 2, 4, 6, 64).unwrap();
        let codes = code_stream(&sel.antichain).unwrap();
        assert!(verify_bstree(&full, &codes, 4).accepts());
    }

    #[test]
    fn selector_avoids_the_spine() {
        let t = comb();
        let sel = bstree_to_pitacc(&t, 3, 5, 8, 96).unwrap();
        for (i, w) in sel.antichain.iter().enumerate() {
            assert!(infinite_width_excluding(&t, &sel.antichain[..=i]), "{w:?}");
        }
        assert!(verify_bstree(&t, &code_stream(&sel.antichain).unwrap(), 5).accepts());
    }

    #[test]
    fn selector_shortfall() {
        assert!(bstree_to_pitacc(&comb(), 3, 5, 1, 32).unwrap_err().is_budget());
    }

    #[test]
    fn extver_tree_levels() {
        let zero = ExtVerTree::build(&StreamSpec::constant(0), 15);
        for s in 1..15 {
            let level = zero.vertices.iter().filter(|v| v.len() == s).count();
            assert_eq!(level, s + 1);
        }
        assert!(!zero.extendible(&[]).unwrap());
        assert!(!zero.extendible(&[0, 0, 0]).unwrap());
        assert!(zero.extendible(&[1]).unwrap());
        assert_eq!(zero.least_extendible().unwrap(), vec![1]);

        let alt = ExtVerTree::build(&StreamSpec::new(vec![], vec![1, 2]), 15);
        let v = alt.least_extendible().unwrap();
        let n = alt.label(&v).unwrap();
        assert!(verify_pitacc(Domain::Naturals, &alt.p.build(), n, 64).accepts());
        assert!(verify_extver(&alt, &v).unwrap().accepts());
    }

    #[test]
    fn lpo_answer_rule() {
        let code = |w: &[u64]| word_code(w).unwrap();
        let chain = Stream::with_prefix(vec![code(&[]), code(&[0]), code(&[1])], Stream::from_fn(|i| i + 10));
        assert_eq!(extver_lpo_query(&chain).at(1), 1);
        assert_eq!(extver_lpo_backward(&chain, 1, 10).unwrap(), vec![0]);
        let teeth = Stream::from_fn(move |n| {
            let mut w = vec![0; n as usize];
            w.push(1);
            word_code(&w).unwrap()
        });
        assert!((0..20).all(|s| extver_lpo_query(&teeth).at(s) == 0));
        assert_eq!(extver_lpo_backward(&teeth, 0, 10).unwrap(), vec![1]);
        let mixed = Stream::with_prefix(
            vec![code(&[1]), code(&[0, 1]), code(&[0, 1, 1]), code(&[1, 0])],
            teeth.clone(),
        );
        assert_eq!(first_comparable(&mixed, 4), Some((1, 2)));
        assert_eq!(word_from_code(mixed.at(2)), vec![0, 1, 1]);
    }

    #[test]
    fn transfer_along_a_comb() {
        let td = TreeDecomposition {
            tree: [vec![], vec![0], vec![1]].into(),
            poset: FinPoset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap(),
            iota: [(vec![], 0), (vec![0], 1), (vec![1], 2)].into(),
            ceil: vec![vec![], vec![0], vec![1]],
            completion: Some([(vec![0], Continuation::Chain), (vec![1], Continuation::Comb)].into()),
        };
        let (realized, seq) = td_transfer(&td, 8).unwrap();
        assert_eq!(validate_tree_decomposition(&realized), Ok(()));
        assert!(verify_td_transfer(&realized, &seq).accepts());
        let mut td = td;
        td.completion = Some([(vec![0], Continuation::Chain)].into());
        assert!(td_transfer(&td, 4).is_err());
    }
}
