//! Phase constructions over countable trees: a pruned binary tree labelled
//! by the vertices of an ℕ-branching tree, and the tree whose vertices are
//! labelled by large antichains of a binary tree.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::orders::{comparable, is_prefix, TreeDesc, Word};
use crate::problems::{Verdict, Witness};

/// The infinite part of an [`EnumeratedTree`], attached at one vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TailKind {
    /// Children `a⌢i` for every `i`.
    Fan,
    /// Spine `a⌢0^n` with teeth `a⌢0^n⌢1`.
    Comb,
    /// The single path `a⌢0^n`: finite width.
    Path,
    /// Paths `a⌢i⌢0^n` for every `i`.
    Broom,
}

/// A countable ℕ-branching tree listed in an order that agrees with `⊑`:
/// first `base`, then the tail above `attach`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct EnumeratedTree {
    pub base: Vec<Word>,
    pub attach: Word,
    pub kind: TailKind,
}

impl EnumeratedTree {
    pub fn new(base: Vec<Word>, attach: Word, kind: TailKind) -> Result<Self> {
        if base.first().is_none_or(|r| !r.is_empty()) {
            return Err(LabError::invalid("enumeration must start at the root"));
        }
        for (i, w) in base.iter().enumerate() {
            if i > 0 && !base[..i].contains(&w[..w.len() - 1].to_vec()) {
                return Err(LabError::invalid(format!("{w:?} listed before its parent")));
            }
        }
        if !base.contains(&attach) {
            return Err(LabError::invalid("tail attached outside the base"));
        }
        Ok(EnumeratedTree { base, attach, kind })
    }

    fn tail(&self, i: u64) -> Word {
        let mut w = self.attach.clone();
        match self.kind {
            TailKind::Fan => w.push(i),
            TailKind::Path => w.extend(std::iter::repeat_n(0, i as usize + 1)),
            TailKind::Comb => {
                w.extend(std::iter::repeat_n(0, (i / 2) as usize));
                w.push(if i.is_multiple_of(2) { 0 } else { 1 });
            }
            TailKind::Broom => {
                let (b, n) = crate::pairing::unpair(i);
                w.push(b);
                w.extend(std::iter::repeat_n(0, n as usize));
            }
        }
        w
    }

    /// The `i`-th vertex, skipping tail vertices already in the base.
    pub fn vertex(&self, i: u64) -> Word {
        if (i as usize) < self.base.len() {
            return self.base[i as usize].clone();
        }
        let mut left = i - self.base.len() as u64;
        let mut j = 0;
        loop {
            let w = self.tail(j);
            j += 1;
            if self.base.contains(&w) {
                continue;
            }
            if left == 0 {
                return w;
            }
            left -= 1;
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        if self.base.iter().any(|w| w == v) {
            return true;
        }
        if !is_prefix(&self.attach, v) || v.len() == self.attach.len() {
            return false;
        }
        let rest = &v[self.attach.len()..];
        match self.kind {
            TailKind::Fan => rest.len() == 1,
            TailKind::Path => rest.iter().all(|&b| b == 0),
            TailKind::Comb => {
                let (last, spine) = rest.split_last().expect("nonempty");
                spine.iter().all(|&b| b == 0) && *last <= 1
            }
            TailKind::Broom => rest[1..].iter().all(|&b| b == 0),
        }
    }
}

/// The pruned binary tree `S` with its labelling into `T`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AgnosticRun {
    #[serde(with = "crate::orders::word_map")]
    pub label: BTreeMap<Word, Word>,
    pub phases: u64,
}

impl AgnosticRun {
    pub fn tree(&self) -> BTreeSet<Word> {
        self.label.keys().cloned().collect()
    }

    pub fn leaves(&self) -> Vec<Word> {
        let mut leaves: Vec<Word> = self
            .label
            .keys()
            .filter(|v| !self.label.contains_key(&child(v, 0)) && !self.label.contains_key(&child(v, 1)))
            .cloned()
            .collect();
        leaves.sort_by(shortlex);
        leaves
    }
}

fn child(v: &[u64], b: u64) -> Word {
    let mut c = v.to_vec();
    c.push(b);
    c
}

fn shortlex(a: &Word, b: &Word) -> std::cmp::Ordering {
    a.len().cmp(&b.len()).then_with(|| a.cmp(b))
}

/// Run `phases` phases. Each phase labels new vertices with the first
/// unlabelled vertices of `T` until some vertex gets its second child, then
/// pads the vertices that were leaves at the phase start. At most
/// `phase_budget` vertices of `T` are placed per phase.
pub fn treeagnostic_convert(t: &EnumeratedTree, phases: u64, phase_budget: u64) -> Result<AgnosticRun> {
    let mut label: BTreeMap<Word, Word> = BTreeMap::new();
    label.insert(vec![], t.vertex(0));
    let mut used: BTreeSet<Word> = [t.vertex(0)].into();
    let mut cursor = 1;
    for n in 1..=phases {
        let start: Vec<Word> = label.keys().cloned().collect();
        let mut placed = 0;
        loop {
            if placed == phase_budget {
                return Err(LabError::exhausted(
                    phase_budget,
                    format!("width did not grow in phase {n}"),
                ));
            }
            while used.contains(&t.vertex(cursor)) {
                cursor += 1;
            }
            let u = t.vertex(cursor);
            placed += 1;
            let anchor = label
                .iter()
                .filter(|(_, l)| is_prefix(l, &u))
                .map(|(v, _)| v)
                .max_by_key(|v| v.len())
                .expect("the root label is a prefix of every vertex")
                .clone();
            let mut open: Vec<&Word> = label
                .keys()
                .filter(|v| {
                    v.len() + 1 >= n as usize
                        && is_prefix(&anchor, v)
                        && (!label.contains_key(&child(v, 0)) || !label.contains_key(&child(v, 1)))
                })
                .collect();
            open.sort_by(|a, b| shortlex(a, b));
            let v = open
                .first()
                .expect("some vertex above the anchor has a free child")
                .to_vec();
            let c = if label.contains_key(&child(&v, 0)) {
                child(&v, 1)
            } else {
                child(&v, 0)
            };
            let split = c.last() == Some(&1);
            label.insert(c, u.clone());
            used.insert(u);
            if split {
                break;
            }
        }
        for v in start {
            if !label.contains_key(&child(&v, 0)) && !label.contains_key(&child(&v, 1)) {
                let l = label[&v].clone();
                label.insert(child(&v, 0), l);
            }
        }
    }
    Ok(AgnosticRun { label, phases })
}

/// The images of an antichain of `S` must form an antichain of `T`.
pub fn verify_agnostic_backward(t: &EnumeratedTree, run: &AgnosticRun, antichain: &[Word]) -> Verdict {
    let mut images = Vec::new();
    for (i, v) in antichain.iter().enumerate() {
        match run.label.get(v) {
            Some(l) if t.contains(l) => images.push(l.clone()),
            _ => return Verdict::fail(Witness::Position { at: i as u64 }),
        }
    }
    for j in 0..images.len() {
        for i in 0..j {
            if comparable(&images[i], &images[j]) {
                return Verdict::fail(Witness::Pair {
                    i: i as u64,
                    j: j as u64,
                });
            }
        }
    }
    Verdict::pass_at(images.len() as u64)
}

/// How large an antichain must be to label a vertex.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Sufficiency {
    AtLeast(usize),
}

impl Sufficiency {
    fn size(self) -> usize {
        match self {
            Sufficiency::AtLeast(s) => s,
        }
    }
}

/// A tree over `ℕ^{<ℕ}` whose vertices carry antichains of a binary tree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct AntichainTree {
    #[serde(with = "crate::orders::word_map")]
    pub labels: BTreeMap<Word, Vec<Word>>,
}

/// Label vertices at depth `t` by antichains on level `(t + 1) · spacing`
/// of `tree`. The children of `v` are found greedily: groups of `s`
/// unused vertices above one element of `v`'s label, the first two groups
/// together or not at all.
pub fn fop_antichain_tree(
    tree: &TreeDesc,
    sufficiency: Sufficiency,
    spacing: usize,
    max_depth: usize,
    max_children: usize,
) -> AntichainTree {
    let s = sufficiency.size().max(1);
    let mut labels: BTreeMap<Word, Vec<Word>> = BTreeMap::new();
    labels.insert(vec![], vec![vec![]]);
    let mut frontier: Vec<Word> = vec![vec![]];
    for t in 0..max_depth {
        let level = (t + 1) * spacing;
        let row: Vec<Word> = tree
            .vertices_to_depth(level)
            .into_iter()
            .filter(|w| w.len() == level)
            .collect();
        let mut next = Vec::new();
        for v in frontier {
            let mut groups: Vec<Vec<Word>> = Vec::new();
            for sigma in &labels[&v] {
                let above: Vec<&Word> = row.iter().filter(|w| is_prefix(sigma, w)).collect();
                groups.extend(above.chunks_exact(s).map(|c| c.iter().map(|w| (*w).clone()).collect()));
            }
            if groups.len() < 2 {
                continue;
            }
            for (i, g) in groups.into_iter().take(max_children).enumerate() {
                let c = child(&v, i as u64);
                labels.insert(c.clone(), g);
                next.push(c);
            }
        }
        frontier = next;
    }
    AntichainTree { labels }
}

impl AntichainTree {
    /// Every pair of incomparable vertices carries disjoint labels whose union is an antichain.
    pub fn check_invariant(&self) -> std::result::Result<(), String> {
        let verts: Vec<&Word> = self.labels.keys().collect();
        for (i, a) in verts.iter().enumerate() {
            for b in &verts[i + 1..] {
                if comparable(a, b) {
                    continue;
                }
                for x in &self.labels[*a] {
                    for y in &self.labels[*b] {
                        if comparable(x, y) {
                            return Err(format!("{a:?} and {b:?} carry comparable {x:?}, {y:?}"));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Children of `v` lie above a single element of its label.
    pub fn check_refinement(&self) -> std::result::Result<(), String> {
        for (v, label) in &self.labels {
            let Some((_, parent)) = v.split_last() else { continue };
            let above = &self.labels[parent];
            if !above.iter().any(|sigma| label.iter().all(|tau| is_prefix(sigma, tau))) {
                return Err(format!("{v:?} does not refine its parent"));
            }
        }
        Ok(())
    }

    pub fn children(&self, v: &[u64]) -> usize {
        (0..).take_while(|&i| self.labels.contains_key(&child(v, i))).count()
    }
}
