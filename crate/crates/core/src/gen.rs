//! Seeded instance generators. Every generator returns the instance together
//! with the ground truth it was built to have.

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::games::LabelTree;
use crate::orders::{Comb, CombPoset, Continuation, FinPoset, ShapeOrder, Term, TreeDecomposition, TreeDesc, Word};
use crate::reductions::phases::{EnumeratedTree, TailKind};
use crate::stream::StreamSpec;

pub type GenRng = ChaCha8Rng;

pub fn rng(seed: u64) -> GenRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Independent stream of randomness for `(seed, salt)`.
pub fn rng_for(seed: u64, salt: &str) -> GenRng {
    let h = salt.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ u64::from(b)).wrapping_mul(0x100_0000_01b3)
    });
    ChaCha8Rng::seed_from_u64(seed ^ h)
}

fn term(rng: &mut GenRng) -> Term {
    match rng.gen_range(0..3) {
        0 => Term::Omega,
        1 => Term::OmegaStar,
        _ => Term::Fin(rng.gen_range(1..4)),
    }
}

pub fn shape_order(rng: &mut GenRng) -> ShapeOrder {
    let n = rng.gen_range(1..=3);
    ShapeOrder::new((0..n).map(|_| term(rng)).collect())
}

/// A shape with at least one copy of ω*.
pub fn ill_founded_shape(rng: &mut GenRng) -> ShapeOrder {
    let mut s = shape_order(rng);
    if !s.is_ill_founded() {
        let at = rng.gen_range(0..=s.terms.len());
        s.terms.insert(at, Term::OmegaStar);
    }
    s
}

/// A random partial order on `0..n` generated by edges `i < j`.
pub fn poset(rng: &mut GenRng, n: usize, density: f64) -> FinPoset {
    let mut pairs = Vec::new();
    for j in 0..n as u64 {
        for i in 0..j {
            if rng.gen_bool(density) {
                pairs.push((i, j));
            }
        }
    }
    FinPoset::from_pairs(n, &pairs).expect("upward edges form a partial order")
}

pub fn comb_poset(rng: &mut GenRng) -> CombPoset {
    let n = rng.gen_range(1..=3);
    let core = poset(rng, n, 0.4);
    let base = |rng: &mut GenRng| {
        if rng.gen_bool(0.8) {
            Some(rng.gen_range(0..n))
        } else {
            None
        }
    };
    let combs = (0..rng.gen_range(0..=2))
        .map(|_| {
            let b = base(rng);
            if rng.gen_bool(0.6) {
                Comb::infinite(b)
            } else {
                Comb::finite(b, rng.gen_range(1..4))
            }
        })
        .collect();
    let paths = (0..rng.gen_range(0..=1)).map(|_| base(rng)).collect();
    CombPoset::new(core, combs, paths).expect("generated comb poset is valid")
}

/// An eventually periodic stream over `0..k` whose cycle uses at least two colors with probability `mixed`.
pub fn coloring(rng: &mut GenRng, k: u64, mixed: f64) -> StreamSpec {
    let prefix = (0..rng.gen_range(0..6)).map(|_| rng.gen_range(0..k)).collect();
    let cycle = if k > 1 && rng.gen_bool(mixed) {
        let mut c: Vec<u64> = (0..rng.gen_range(2..5)).map(|_| rng.gen_range(0..k)).collect();
        let (a, b) = (rng.gen_range(0..k), rng.gen_range(1..k));
        c[0] = a;
        c[1] = (a + b) % k;
        c
    } else {
        vec![rng.gen_range(0..k)]
    };
    StreamSpec::new(prefix, cycle)
}

/// An ACC instance over `0..k` (`k = None` for ℕ, drawing below 8): the
/// stream announces `m` as `m + 1` at one stage, or nothing.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AccInstance {
    pub stream: StreamSpec,
    pub forbidden: Option<u64>,
}

pub fn acc_instance(rng: &mut GenRng, k: Option<u64>) -> AccInstance {
    let bound = k.unwrap_or(8);
    if rng.gen_bool(0.3) {
        return AccInstance {
            stream: StreamSpec::constant(0),
            forbidden: None,
        };
    }
    let m = rng.gen_range(0..bound);
    let mut prefix = vec![0; rng.gen_range(0..10)];
    prefix.push(m + 1);
    prefix.extend(std::iter::repeat_n(0, rng.gen_range(0..3)));
    if rng.gen_bool(0.3) {
        prefix.push(m + 1);
    }
    AccInstance {
        stream: StreamSpec::new(prefix, vec![0]),
        forbidden: Some(m),
    }
}

/// A Π⁰₂-ACC instance over `0..k` with its limit, if any.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PiTaccInstance {
    pub stream: StreamSpec,
    pub limit: Option<u64>,
}

pub fn pitacc_instance(rng: &mut GenRng, k: u64) -> PiTaccInstance {
    let stream = coloring(rng, k, 0.4);
    PiTaccInstance {
        limit: stream.limit(),
        stream,
    }
}

/// A Π⁰₂-ACC_ℕ instance with `p_i ≤ i`.
pub fn bounded_pitacc_instance(rng: &mut GenRng) -> PiTaccInstance {
    let len = rng.gen_range(2..8);
    let prefix: Vec<u64> = (0..len as u64).map(|i| rng.gen_range(0..=i)).collect();
    let cycle: Vec<u64> = if rng.gen_bool(0.5) {
        vec![rng.gen_range(0..len as u64)]
    } else {
        let mut c: Vec<u64> = (0..rng.gen_range(2..4)).map(|_| rng.gen_range(0..len as u64)).collect();
        c[1] = (c[0] + 1) % len as u64;
        c
    };
    let stream = StreamSpec::new(prefix, cycle);
    PiTaccInstance {
        limit: stream.limit(),
        stream,
    }
}

/// A row presenting membership in a Π⁰₂ set: infinitely many 1s unless
/// `finite`, in which case at most `max_ones` 1s.
pub fn pi02_row(rng: &mut GenRng, finite: bool, max_prefix: usize, max_ones: usize) -> StreamSpec {
    let mut ones = 0;
    let prefix = (0..rng.gen_range(0..=max_prefix))
        .map(|_| {
            let b = u64::from(rng.gen_bool(0.5) && (!finite || ones < max_ones));
            ones += b as usize;
            b
        })
        .collect();
    let cycle = if finite {
        vec![0]
    } else {
        let mut c: Vec<u64> = (0..rng.gen_range(1..=2)).map(|_| rng.gen_range(0..2)).collect();
        let at = rng.gen_range(0..c.len());
        c[at] = 1;
        c
    };
    StreamSpec::new(prefix, cycle)
}

fn binary_tree(rng: &mut GenRng, max_depth: usize, grow: f64) -> BTreeSet<Word> {
    let mut tree: BTreeSet<Word> = [vec![]].into();
    let mut frontier = vec![Vec::<u64>::new()];
    while let Some(v) = frontier.pop() {
        if v.len() >= max_depth {
            continue;
        }
        for b in [0, 1] {
            if rng.gen_bool(grow) {
                let mut c = v.clone();
                c.push(b);
                tree.insert(c.clone());
                frontier.push(c);
            }
        }
    }
    tree
}

fn leaves(tree: &BTreeSet<Word>) -> Vec<Word> {
    tree.iter()
        .filter(|v| {
            [0, 1].iter().all(|&b| {
                let mut c = (*v).clone();
                c.push(b);
                !tree.contains(&c)
            })
        })
        .cloned()
        .collect()
}

fn continuations(rng: &mut GenRng, leaves: &[Word], infinite: Option<bool>) -> BTreeMap<Word, Continuation> {
    let mut out: BTreeMap<Word, Continuation> = leaves
        .iter()
        .map(|l| {
            let c = match rng.gen_range(0..6) {
                0 => Continuation::Dead,
                1 | 2 => Continuation::Chain,
                3 | 4 => Continuation::Comb,
                _ => Continuation::Full,
            };
            (l.clone(), c)
        })
        .collect();
    match infinite {
        Some(true)
            if !out
                .values()
                .any(|c| matches!(c, Continuation::Comb | Continuation::Full)) =>
        {
            let l = leaves.choose(rng).expect("a tree has a leaf").clone();
            out.insert(l, Continuation::Comb);
        }
        Some(false) => {
            for c in out.values_mut() {
                if matches!(c, Continuation::Comb | Continuation::Full) {
                    *c = Continuation::Chain;
                }
            }
        }
        _ => {}
    }
    out.retain(|_, c| *c != Continuation::Dead);
    out
}

/// A finite binary tree with random continuations; `infinite` forces the width.
pub fn tree_desc(rng: &mut GenRng, infinite: Option<bool>) -> TreeDesc {
    let tree = binary_tree(rng, 3, 0.55);
    let conts = continuations(rng, &leaves(&tree), infinite);
    TreeDesc::new(tree, conts).expect("generated tree is valid")
}

/// A decomposition of a random binary tree: one element per vertex ordered
/// by prefix, plus spacer elements strictly inside some intervals, with a
/// random completion.
pub fn tree_decomposition(rng: &mut GenRng, infinite: Option<bool>) -> TreeDecomposition {
    let tree = binary_tree(rng, 3, 0.6);
    let mut words: Vec<Word> = tree.iter().cloned().collect();
    words.sort_by(|a, b| a.len().cmp(&b.len()).then(a.cmp(b)));
    let iota: BTreeMap<Word, usize> = words.iter().enumerate().map(|(i, w)| (w.clone(), i)).collect();
    let mut ceil = words.clone();
    let mut pairs: Vec<(u64, u64)> = Vec::new();
    for w in &words {
        for k in 0..w.len() {
            pairs.push((iota[&w[..k]] as u64, iota[w] as u64));
        }
    }
    for w in words.iter().filter(|w| !w.is_empty()) {
        if rng.gen_bool(0.3) {
            let e = ceil.len() as u64;
            let parent = &w[..w.len() - 1];
            for k in 0..=parent.len() {
                pairs.push((iota[&parent[..k]] as u64, e));
            }
            pairs.push((e, iota[w] as u64));
            ceil.push(w.clone());
        }
    }
    let poset = FinPoset::from_pairs(ceil.len(), &pairs).expect("spacers keep the order acyclic");
    let completion = continuations(rng, &leaves(&tree), infinite);
    TreeDecomposition {
        tree,
        poset,
        iota,
        ceil,
        completion: Some(completion),
    }
}

/// A countable tree over ℕ whose tail has infinite width.
pub fn enumerated_tree(rng: &mut GenRng) -> EnumeratedTree {
    let mut base: Vec<Word> = vec![vec![]];
    for _ in 0..rng.gen_range(0..5) {
        let parent = base.choose(rng).expect("nonempty").clone();
        let mut c = parent;
        c.push(rng.gen_range(0..4));
        if !base.contains(&c) {
            base.push(c);
        }
    }
    let attach = base.choose(rng).expect("nonempty").clone();
    let kind = *[TailKind::Fan, TailKind::Comb, TailKind::Broom]
        .choose(rng)
        .expect("nonempty");
    EnumeratedTree::new(base, attach, kind).expect("parents are listed first")
}

/// A well-founded labelled tree over `0..k`: every inner node has `k + 1`
/// children, exactly one of which is marked invalid (its runs are not legal).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PigeonholeInstance {
    pub k: u64,
    pub tree: LabelTree,
    /// `(path to an inner node, index of its invalid child)`.
    pub invalid: Vec<(Vec<usize>, usize)>,
}

pub fn pigeonhole_instance(rng: &mut GenRng, k: u64, max_depth: usize) -> PigeonholeInstance {
    fn grow(
        rng: &mut GenRng,
        k: u64,
        depth: usize,
        path: &mut Vec<usize>,
        invalid: &mut Vec<(Vec<usize>, usize)>,
    ) -> LabelTree {
        if depth == 0 || rng.gen_bool(0.3) {
            return LabelTree::Leaf(rng.gen_range(0..k));
        }
        invalid.push((path.clone(), rng.gen_range(0..=k as usize)));
        let children = (0..=k as usize)
            .map(|i| {
                path.push(i);
                let c = grow(rng, k, depth - 1, path, invalid);
                path.pop();
                c
            })
            .collect();
        LabelTree::Node(children)
    }
    let mut invalid = Vec::new();
    let tree = grow(rng, k, max_depth, &mut Vec::new(), &mut invalid);
    PigeonholeInstance { k, tree, invalid }
}
