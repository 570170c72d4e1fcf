//! A non-wqo poset with a tree decomposition on which a guessing procedure
//! infinitely often guesses an element below the unique non-isolated path.
//!
//! Stage `s`: probe the guesser with combs of length `1..=L` above each leaf
//! image, take the left-most leaf `σ` comparable with a guess, keep the
//! witnessing probe, give every leaf `τ` a child `τ0` whose image sits above
//! the probe elements over `ι(τ)`, and split `σ0` into `σ00, σ01`.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{DefeatCertificate, DefeatEvent, ValidityReport};
use crate::error::{LabError, Result};
use crate::orders::{
    is_prefix, validate_tree_decomposition, Comb, CombPoset, Continuation, FinPoset, TreeDecomposition, Word,
};

pub const DEFAULT_PROBE: u64 = 4;

/// A guessing procedure restricted to finite presentations: the element it
/// has guessed after reading `q`, if any.
pub trait Guesser {
    fn guess(&self, q: &FinPoset) -> Option<usize>;

    fn name(&self) -> String {
        "custom".into()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum BuiltinGuesser {
    /// Element 0.
    Root,
    /// The most recently added element.
    Latest,
    /// The maximal element of least index.
    LeastMaximal,
    /// The latest element, once at least `wait` elements lie strictly below it.
    Delayed { wait: usize },
    /// The element halfway through the presentation.
    Midpoint,
}

impl BuiltinGuesser {
    pub fn all() -> Vec<BuiltinGuesser> {
        use BuiltinGuesser::*;
        vec![Root, Latest, LeastMaximal, Delayed { wait: 4 }, Midpoint]
    }

    pub fn name(&self) -> String {
        Guesser::name(self)
    }

    pub fn from_name(name: &str) -> Option<BuiltinGuesser> {
        BuiltinGuesser::all().into_iter().find(|g| g.name() == name)
    }
}

impl Guesser for BuiltinGuesser {
    fn name(&self) -> String {
        match self {
            BuiltinGuesser::Root => "root-guesser".into(),
            BuiltinGuesser::Latest => "latest-guesser".into(),
            BuiltinGuesser::LeastMaximal => "least-maximal-guesser".into(),
            BuiltinGuesser::Delayed { .. } => "delayed-guesser".into(),
            BuiltinGuesser::Midpoint => "midpoint-guesser".into(),
        }
    }

    fn guess(&self, q: &FinPoset) -> Option<usize> {
        let n = q.len();
        if n == 0 {
            return None;
        }
        match *self {
            BuiltinGuesser::Root => Some(0),
            BuiltinGuesser::Latest => Some(n - 1),
            BuiltinGuesser::LeastMaximal => (0..n).find(|&i| (0..n).all(|j| j == i || !q.leq_idx(i, j))),
            BuiltinGuesser::Delayed { wait } => {
                let below = (0..n - 1).filter(|&i| q.leq_idx(i, n - 1)).count();
                (below >= wait).then_some(n - 1)
            }
            BuiltinGuesser::Midpoint => Some(n / 2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GuesserStage {
    pub stage: u64,
    /// The leaf that received the bifurcation; `None` on a stall.
    pub sigma: Option<Word>,
    /// The leaf and comb length of the witnessing probe.
    pub probe: Option<(Word, u64)>,
    pub guess: Option<usize>,
    pub elements: usize,
    pub td_valid: bool,
}

#[derive(Debug, Clone)]
pub struct GuesserRun {
    /// The stage-`S` decomposition with the declared completion: a comb above
    /// `σ_{S-1}00` and a chain above every other leaf.
    pub td: TreeDecomposition,
    pub poset: CombPoset,
    /// `σ_{S-1}00`, whose zero-extension is the declared distinguished path.
    pub path_stem: Word,
    pub cert: DefeatCertificate<GuesserStage>,
}

/// Add a comb of `len` spine elements, each with a tooth, above `base`.
fn add_probe(q: &mut FinPoset, base: usize, len: u64) -> Vec<usize> {
    let mut added = Vec::new();
    let mut spine = base;
    for _ in 0..len {
        spine = q.add_above(&[spine]);
        let tooth = q.add_above(&[spine]);
        added.extend([spine, tooth]);
    }
    added
}

/// The left-most leaf comparable with the guess on some probe, with that probe.
fn choose(
    g: &dyn Guesser,
    td: &mut TreeDecomposition,
    leaves: &[Word],
    max_probe: u64,
) -> Option<(usize, Word, u64, usize)> {
    let base_len = td.poset.len();
    let images: Vec<usize> = leaves.iter().map(|l| td.iota[l]).collect();
    let mut best: Option<(usize, Word, u64, usize)> = None;
    'search: for len in 1..=max_probe {
        for leaf in leaves {
            add_probe(&mut td.poset, td.iota[leaf], len);
            let guess = g.guess(&td.poset);
            if let Some(v) = guess {
                let hit = images
                    .iter()
                    .position(|&x| td.poset.leq_idx(v, x) || td.poset.leq_idx(x, v));
                if let Some(i) = hit {
                    if best.as_ref().is_none_or(|b| i < b.0) {
                        best = Some((i, leaf.clone(), len, v));
                    }
                }
            }
            td.poset.shrink(base_len);
            if best.as_ref().is_some_and(|b| b.0 == 0) {
                break 'search;
            }
        }
    }
    best
}

fn child(w: &[u64], b: u64) -> Word {
    let mut c = w.to_vec();
    c.push(b);
    c
}

pub fn defeat_guesser(g: &dyn Guesser, stages: u64, max_probe: u64) -> Result<GuesserRun> {
    if max_probe == 0 {
        return Err(LabError::invalid("probe length must be positive"));
    }
    let strategy = g.name();
    let mut td = TreeDecomposition::trivial();
    let mut transcript = Vec::new();
    let mut stalls = Vec::new();
    let mut report = ValidityReport::default();
    let mut invalid_at = None;
    for stage in 0..stages {
        let leaves = td.leaves();
        let chosen = choose(g, &mut td, &leaves, max_probe);
        let mut probe_elems = Vec::new();
        if let Some((_, leaf, len, _)) = &chosen {
            probe_elems = add_probe(&mut td.poset, td.iota[leaf], *len);
            td.ceil.extend(probe_elems.iter().map(|_| child(leaf, 0)));
        } else {
            stalls.push(stage);
        }
        for tau in &leaves {
            let base = td.iota[tau];
            let mut below = vec![base];
            let over_tau = chosen.as_ref().is_some_and(|c| &c.1 == tau);
            if over_tau {
                below.extend(&probe_elems);
            }
            let v = td.poset.add_above(&below);
            let t0 = child(tau, 0);
            td.tree.insert(t0.clone());
            td.iota.insert(t0.clone(), v);
            td.ceil.push(t0);
        }
        let sigma = chosen.as_ref().map(|c| leaves[c.0].clone());
        if let Some(s) = &sigma {
            let s0 = child(s, 0);
            for b in 0..2 {
                let v = td.poset.add_above(&[td.iota[&s0]]);
                let w = child(&s0, b);
                td.tree.insert(w.clone());
                td.iota.insert(w.clone(), v);
                td.ceil.push(w);
            }
        }
        let td_valid = validate_tree_decomposition(&td)
            .map_err(|v| invalid_at.get_or_insert((stage, v)).clone())
            .is_ok();
        transcript.push(GuesserStage {
            stage,
            sigma,
            probe: chosen.as_ref().map(|c| (c.1.clone(), c.2)),
            guess: chosen.map(|c| c.3),
            elements: td.poset.len(),
            td_valid,
        });
    }
    report.record(
        "tree decomposition valid at every stage",
        invalid_at.map_or(Ok(()), |(s, v)| Err(format!("stage {s}: {v:?}"))),
    );

    let leaves = td.leaves();
    let path_stem = transcript
        .iter()
        .rev()
        .find_map(|t| t.sigma.as_ref())
        .map(|s| child(&child(s, 0), 0))
        .unwrap_or_else(|| leaves[0].clone());
    let completion: BTreeMap<Word, Continuation> = leaves
        .iter()
        .map(|l| {
            (
                l.clone(),
                if *l == path_stem {
                    Continuation::Comb
                } else {
                    Continuation::Chain
                },
            )
        })
        .collect();
    td.completion = Some(completion);
    // the poset is built by adding elements above down-closed sets, so it is
    // a partial order by construction; skip the cubic law check
    let poset = CombPoset {
        core: td.poset.clone(),
        combs: vec![Comb::infinite(Some(td.iota[&path_stem]))],
        paths: leaves
            .iter()
            .filter(|l| **l != path_stem)
            .map(|l| Some(td.iota[l]))
            .collect(),
    };

    let mut events = Vec::new();
    for t in &transcript {
        let (Some(sigma), Some(v)) = (&t.sigma, t.guess) else {
            continue;
        };
        let s0 = child(sigma, 0);
        if is_prefix(&s0, &path_stem) && td.poset.leq_idx(v, td.iota[&s0]) && !poset.extendible(&[v as u64]) {
            events.push(DefeatEvent {
                stage: t.stage,
                target: vec![v as u64],
                reason: format!("guess {v} lies below the image of {s0:?} on the distinguished path"),
            });
        }
    }
    let mut cert = DefeatCertificate {
        adversary: "defeat-guesser".into(),
        strategy,
        transcript,
        events,
        stalls,
        report,
    };
    let recheck = recheck_guesser(&td, &poset, &path_stem, &cert);
    cert.report.record("defeat events re-check", recheck);
    Ok(GuesserRun {
        td,
        poset,
        path_stem,
        cert,
    })
}

/// Every event's guess lies below `ι(σ_s0)`, `σ_s0` lies on the declared path,
/// and the guess is non-extendible in the completed poset.
pub(super) fn recheck_guesser(
    td: &TreeDecomposition,
    poset: &CombPoset,
    stem: &[u64],
    cert: &DefeatCertificate<GuesserStage>,
) -> std::result::Result<(), String> {
    for e in &cert.events {
        let stage = cert
            .transcript
            .get(e.stage as usize)
            .ok_or(format!("event at unknown stage {}", e.stage))?;
        let sigma = stage
            .sigma
            .as_ref()
            .ok_or(format!("event at stalled stage {}", e.stage))?;
        let s0 = child(sigma, 0);
        let v = *e.target.first().ok_or("event without a guess")? as usize;
        if stage.guess != Some(v) {
            return Err(format!("stage {}: event guess {v} is not the recorded guess", e.stage));
        }
        if !is_prefix(&s0, stem) {
            return Err(format!("stage {}: {s0:?} is off the path", e.stage));
        }
        if !td.poset.leq_idx(v, td.iota[&s0]) {
            return Err(format!("stage {}: {v} is not below the image of {s0:?}", e.stage));
        }
        if poset.extendible(&[v as u64]) {
            return Err(format!("stage {}: {v} is extendible", e.stage));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn root_guesser_branches_left_most() {
        let run = defeat_guesser(&BuiltinGuesser::Root, 10, 3).unwrap();
        let cert = &run.cert;
        assert_eq!(cert.strategy, "root-guesser");
        for (s, t) in cert.transcript.iter().enumerate() {
            let sigma = t.sigma.as_ref().unwrap();
            assert_eq!(*sigma, vec![0; 2 * s], "stage {s}");
            assert_eq!(t.guess, Some(0));
        }
        assert_eq!(cert.events.len(), 10);
        assert!(cert.report.passed(), "{:?}", cert.report);
        assert_eq!(run.path_stem, vec![0; 20]);
    }

    #[test]
    fn td_valid_after_twenty_stages() {
        for g in BuiltinGuesser::all() {
            let run = defeat_guesser(&g, 20, DEFAULT_PROBE).unwrap();
            assert!(run.cert.transcript.iter().all(|t| t.td_valid), "{}", g.name());
            assert_eq!(validate_tree_decomposition(&run.td), Ok(()));
            assert!(!run.poset.is_wqo());
        }
    }

    #[test]
    fn guesses_are_comparable_with_sigma() {
        let run = defeat_guesser(&BuiltinGuesser::LeastMaximal, 12, DEFAULT_PROBE).unwrap();
        for t in &run.cert.transcript {
            let (Some(s), Some(v)) = (&t.sigma, t.guess) else {
                continue;
            };
            assert!(run.td.poset.leq_idx(v, run.td.iota[&child(s, 0)]));
        }
    }

    #[test]
    fn silent_guesser_stalls() {
        struct Never;
        impl Guesser for Never {
            fn guess(&self, _: &FinPoset) -> Option<usize> {
                None
            }
        }
        let run = defeat_guesser(&Never, 4, 2).unwrap();
        assert_eq!(run.cert.stalls, vec![0, 1, 2, 3]);
        assert!(run.cert.events.is_empty());
        assert_eq!(run.cert.strategy, "custom");
        assert!(run.cert.report.passed());
    }

    #[test]
    fn delayed_guesser_needs_long_probes() {
        let short = defeat_guesser(&BuiltinGuesser::Delayed { wait: 4 }, 3, 1).unwrap();
        assert_eq!(short.cert.stalls, vec![0, 1]);
        let run = defeat_guesser(&BuiltinGuesser::Delayed { wait: 4 }, 3, 4).unwrap();
        assert!(run.cert.stalls.is_empty());
        assert_eq!(run.cert.transcript[0].probe, Some((vec![], 3)));
    }

    #[test]
    fn deterministic() {
        let a = defeat_guesser(&BuiltinGuesser::Midpoint, 15, DEFAULT_PROBE).unwrap();
        let b = defeat_guesser(&BuiltinGuesser::Midpoint, 15, DEFAULT_PROBE).unwrap();
        assert_eq!(a.cert, b.cert);
        assert_eq!(a.td, b.td);
    }
}
