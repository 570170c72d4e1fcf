//! A binary pruned tree of growing width on which a procedure producing
//! linear extensions of the prefix order is steered towards a well-order.
//!
//! Stage `n` waits for the procedure to name the greatest element `w_n` of
//! the current leaves `A_n`, extending every leaf by `0` while it waits, then
//! splits above the leaf `w_n0^k` and extends every other leaf by `0`.

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use super::{DefeatCertificate, DefeatEvent, ValidityReport};
use crate::error::{LabError, Result};
use crate::orders::{is_prefix, Word};

pub const DEFAULT_WAIT: u64 = 16;

/// A procedure that orders the vertices of a tree linearly, extending the
/// prefix order, and announces comparisons only after some padding.
pub trait Linearizer {
    /// The linear order it commits to.
    fn compare(&self, u: &[u64], v: &[u64]) -> Ordering;

    /// The greatest element of `antichain`, if decided after `waited` rounds.
    fn decide(&self, antichain: &[Word], waited: u64) -> Option<Word>;

    fn name(&self) -> String {
        "custom".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum BuiltinLinearizer {
    /// By length, then left to right.
    Shortlex,
    /// Prefixes first, otherwise right before left.
    Mirror,
    /// Shortlex, announced only after `wait` rounds.
    Delayed { wait: u64 },
}

impl BuiltinLinearizer {
    pub fn all() -> Vec<BuiltinLinearizer> {
        vec![
            BuiltinLinearizer::Shortlex,
            BuiltinLinearizer::Mirror,
            BuiltinLinearizer::Delayed { wait: 3 },
        ]
    }

    pub fn name(&self) -> String {
        Linearizer::name(self)
    }

    pub fn from_name(name: &str) -> Option<BuiltinLinearizer> {
        BuiltinLinearizer::all().into_iter().find(|l| l.name() == name)
    }
}

fn shortlex(u: &[u64], v: &[u64]) -> Ordering {
    u.len().cmp(&v.len()).then_with(|| u.cmp(v))
}

impl Linearizer for BuiltinLinearizer {
    fn compare(&self, u: &[u64], v: &[u64]) -> Ordering {
        match self {
            BuiltinLinearizer::Shortlex | BuiltinLinearizer::Delayed { .. } => shortlex(u, v),
            BuiltinLinearizer::Mirror => {
                if is_prefix(u, v) || is_prefix(v, u) {
                    u.len().cmp(&v.len())
                } else {
                    v.cmp(u)
                }
            }
        }
    }

    fn decide(&self, antichain: &[Word], waited: u64) -> Option<Word> {
        if let BuiltinLinearizer::Delayed { wait } = self {
            if waited < *wait {
                return None;
            }
        }
        antichain.iter().max_by(|a, b| self.compare(a, b)).cloned()
    }

    fn name(&self) -> String {
        match self {
            BuiltinLinearizer::Shortlex => "shortlex".into(),
            BuiltinLinearizer::Mirror => "mirror".into(),
            BuiltinLinearizer::Delayed { .. } => "delayed-shortlex".into(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LinearizerStage {
    pub stage: u64,
    pub antichain: Vec<Word>,
    /// `w_n`; `None` for the initial split at the root and on stalls.
    pub decided: Option<Word>,
    pub waited: u64,
    /// The vertex that received two children.
    pub split: Option<Word>,
    pub width: usize,
}

#[derive(Debug, Clone)]
pub struct LinearizerRun {
    /// All vertices, in shortlex order.
    pub tree: Vec<Word>,
    pub leaves: Vec<Word>,
    pub cert: DefeatCertificate<LinearizerStage>,
}

fn pad(leaves: &mut [Word], tree: &mut Vec<Word>, skip: Option<usize>) {
    for (i, l) in leaves.iter_mut().enumerate() {
        if Some(i) != skip {
            l.push(0);
            tree.push(l.clone());
        }
    }
}

/// Runs `stages` stages, the first being the split at the root; after `n`
/// completed stages the tree has `n` splits and width `n + 1`.
pub fn defeat_linearizer(proc: &dyn Linearizer, stages: u64, max_wait: u64) -> Result<LinearizerRun> {
    if stages == 0 {
        return Err(LabError::invalid("at least one stage is needed"));
    }
    let mut tree: Vec<Word> = vec![vec![], vec![0], vec![1]];
    let mut leaves: Vec<Word> = vec![vec![0], vec![1]];
    let mut transcript = vec![LinearizerStage {
        stage: 0,
        antichain: vec![vec![]],
        decided: None,
        waited: 0,
        split: Some(vec![]),
        width: 2,
    }];
    let mut events = Vec::new();
    let mut stalls = Vec::new();
    for stage in 1..stages {
        let antichain = leaves.clone();
        let mut waited = 0;
        let decided = loop {
            if let Some(w) = proc.decide(&antichain, waited) {
                break Some(w);
            }
            if waited == max_wait {
                break None;
            }
            pad(&mut leaves, &mut tree, None);
            waited += 1;
        };
        let mut split = None;
        match &decided {
            Some(w) => {
                let at = antichain.iter().position(|a| a == w).ok_or_else(|| {
                    LabError::contract(format!("linearizer named {w:?}, which is not a current leaf"))
                })?;
                let top = leaves[at].clone();
                pad(&mut leaves, &mut tree, Some(at));
                let (l, mut r) = (top.clone(), top.clone());
                r.push(1);
                leaves[at].push(0);
                tree.push(leaves[at].clone());
                tree.push(r.clone());
                leaves.insert(at + 1, r);
                split = Some(l);
                events.push(DefeatEvent {
                    stage,
                    target: w.clone(),
                    reason: format!(
                        "named the greatest of {} leaves; split placed above it",
                        antichain.len()
                    ),
                });
            }
            None => {
                stalls.push(stage);
                pad(&mut leaves, &mut tree, None);
            }
        }
        transcript.push(LinearizerStage {
            stage,
            antichain,
            decided,
            waited,
            split,
            width: leaves.len(),
        });
    }
    tree.sort_by(|a, b| shortlex(a, b));
    let mut cert = DefeatCertificate {
        adversary: "defeat-linearizer".into(),
        strategy: proc.name(),
        transcript,
        events,
        stalls,
        report: ValidityReport::default(),
    };
    let run = LinearizerRun {
        tree,
        leaves,
        cert: cert.clone(),
    };
    cert.report.record("binary pruned tree", check_pruned(&run));
    cert.report.record("one split per completed stage", check_splits(&run));
    cert.report
        .record("decided maxima increase and are cofinal", check_maxima(proc, &run));
    Ok(LinearizerRun { cert, ..run })
}

fn check_pruned(run: &LinearizerRun) -> std::result::Result<(), String> {
    let depth = run.leaves.first().map_or(0, Vec::len);
    if let Some(l) = run.leaves.iter().find(|l| l.len() != depth) {
        return Err(format!("leaf {l:?} is not at depth {depth}"));
    }
    let set: std::collections::BTreeSet<&Word> = run.tree.iter().collect();
    for v in &run.tree {
        if v.iter().any(|&b| b > 1) || v.split_last().is_some_and(|(_, p)| !set.contains(&p.to_vec())) {
            return Err(format!("{v:?} is not in a binary prefix-closed tree"));
        }
    }
    Ok(())
}

fn check_splits(run: &LinearizerRun) -> std::result::Result<(), String> {
    let set: std::collections::BTreeSet<&Word> = run.tree.iter().collect();
    let branching = run
        .tree
        .iter()
        .filter(|v| {
            let mut r = (*v).clone();
            r.push(1);
            set.contains(&r)
        })
        .count();
    let completed = run.cert.transcript.iter().filter(|t| t.split.is_some()).count();
    if branching != completed || run.leaves.len() != completed + 1 {
        return Err(format!(
            "{completed} completed stages, {branching} splits, width {}",
            run.leaves.len()
        ));
    }
    Ok(())
}

/// Each decided `w_n` is the greatest of `A_n`, `w_n ≺ w_{n+1}`, the split sits
/// on `w_n0^k`, and every vertex shallower than the last `w_n` precedes it.
fn check_maxima(proc: &dyn Linearizer, run: &LinearizerRun) -> std::result::Result<(), String> {
    let mut last: Option<&Word> = None;
    for t in &run.cert.transcript {
        let Some(w) = &t.decided else { continue };
        if let Some(a) = t.antichain.iter().find(|a| proc.compare(a, w) == Ordering::Greater) {
            return Err(format!("stage {}: {a:?} exceeds the decided {w:?}", t.stage));
        }
        let split = t
            .split
            .as_ref()
            .ok_or(format!("stage {}: decision without a split", t.stage))?;
        if !is_prefix(w, split) || split[w.len()..].iter().any(|&b| b != 0) {
            return Err(format!(
                "stage {}: split {split:?} is not above {w:?} by zeroes",
                t.stage
            ));
        }
        if let Some(prev) = last {
            if proc.compare(prev, w) != Ordering::Less {
                return Err(format!("stage {}: {w:?} does not exceed {prev:?}", t.stage));
            }
        }
        last = Some(w);
    }
    if let Some(w) = last {
        if let Some(v) = run
            .tree
            .iter()
            .find(|v| v.len() < w.len() && proc.compare(v, w) != Ordering::Less)
        {
            return Err(format!("{v:?} does not precede the last maximum {w:?}"));
        }
    }
    Ok(())
}
