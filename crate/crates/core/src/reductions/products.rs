//! Monitoring a backward functional on bad sequences to enumerate
//! non-extendible sequences, and the greedy bad sequence avoiding them.
//!
//! The functionals are scripted: `Φ` builds a comb poset and shortens a comb
//! whenever an ACC coordinate loses an answer that its teeth would otherwise
//! let `Ψ` use; `Ψ` answers `m` on every bad sequence holding a core element
//! below the base of the protected comb.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::orders::{bad_sequences, is_bad, Comb, CombElement, CombPoset, FinPoset, Order};
use crate::stream::Stream;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductScript {
    pub name: String,
    pub core: FinPoset,
    /// Bases of the combs above the core, all infinite at the start.
    pub bases: Vec<Option<usize>>,
    /// The comb `Φ` never shortens.
    pub protected: usize,
    /// The ACC answer `Ψ` gives; `None` for a `Ψ` that never answers.
    pub answer: Option<u64>,
    pub teeth_per_stage: u64,
    pub stages: u64,
}

/// `σ` entered `W` at `stage` because `Ψ` answered `m` on `τ ⊵ σ`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct WEvent {
    pub stage: u64,
    pub sigma: Vec<u64>,
    pub tau: Vec<u64>,
    pub removed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProductRun {
    pub events: Vec<WEvent>,
    /// The comb poset with the truncations made so far: the declared completion.
    pub completion: CombPoset,
    pub teeth: u64,
}

impl ProductRun {
    pub fn w(&self) -> BTreeSet<Vec<u64>> {
        self.events.iter().map(|e| e.sigma.clone()).collect()
    }

    /// The ACC_ℕ instance indexed by `sigma`: it forbids the removed answer
    /// from the stage of its event on.
    pub fn q(&self, sigma: &[u64]) -> Stream {
        match self.events.iter().find(|e| e.sigma == sigma) {
            Some(e) => {
                let (at, v) = (e.stage, e.removed + 1);
                Stream::from_fn(move |t| if t == at { v } else { 0 })
            }
            None => Stream::zeros(),
        }
    }

    /// Whether some subsequence of `rho` of length at most 3 lies in `W`.
    pub fn w_char(&self) -> impl Fn(&[u64]) -> bool {
        let w = self.w();
        move |rho: &[u64]| {
            let n = rho.len();
            (0..n).any(|i| {
                w.contains(&vec![rho[i]])
                    || (i + 1..n).any(|j| {
                        w.contains(&vec![rho[i], rho[j]])
                            || (j + 1..n).any(|k| w.contains(&vec![rho[i], rho[j], rho[k]]))
                    })
            })
        }
    }
}

fn core_of(p: &CombPoset, seq: &[u64]) -> Vec<usize> {
    seq.iter()
        .filter_map(|&e| match p.decode(e) {
            Some(CombElement::Core(i)) => Some(i),
            _ => None,
        })
        .collect()
}

pub fn dsproducts_machine(script: &ProductScript) -> Result<ProductRun> {
    let combs = script.bases.iter().map(|&b| Comb::infinite(b)).collect();
    let mut poset = CombPoset::new(script.core.clone(), combs, vec![])?;
    let protected_base = *script
        .bases
        .get(script.protected)
        .ok_or_else(|| LabError::invalid("protected comb out of range"))?;
    let mut events = Vec::new();
    let mut w: BTreeSet<Vec<u64>> = BTreeSet::new();
    let mut teeth = 0;
    for stage in 0..script.stages {
        teeth += script.teeth_per_stage;
        let (Some(m), Some(r)) = (script.answer, protected_base) else {
            continue;
        };
        let elems = poset.elements(teeth, 0);
        // τ of length ≤ 2 on which Ψ answers
        let answered: Vec<Vec<u64>> = bad_sequences(&poset, &elems, 2)
            .into_iter()
            .filter(|t| core_of(&poset, t).iter().any(|&e| poset.core.leq_idx(e, r)))
            .collect();
        // for each core element below all of some answered τ, the least such τ
        let mut below_all: BTreeMap<usize, usize> = BTreeMap::new();
        for (ti, t) in answered.iter().enumerate() {
            for c in 0..poset.core.len() {
                if t.iter().all(|&b| poset.leq(c as u64, b)) {
                    below_all.entry(c).or_insert(ti);
                }
            }
        }
        for sigma in bad_sequences(&poset, &elems, 3) {
            if w.contains(&sigma) {
                continue;
            }
            let witness = answered.iter().position(|t| *t == sigma).or_else(|| {
                core_of(&poset, &sigma)
                    .iter()
                    .filter_map(|c| below_all.get(c).copied())
                    .min()
            });
            let Some(ti) = witness else { continue };
            let tau = answered[ti].clone();
            // make τ non-extendible: shorten every comb a core entry of τ below r does not reach
            let e = core_of(&poset, &tau)
                .into_iter()
                .filter(|&e| poset.core.leq_idx(e, r))
                .min()
                .expect("answered τ has such an entry");
            for (k, comb) in poset.combs.iter_mut().enumerate() {
                let reached = comb.base.is_some_and(|b| poset.core.leq_idx(e, b));
                if k != script.protected && comb.len.is_none() && !reached {
                    comb.len = Some(teeth);
                }
            }
            w.insert(sigma.clone());
            events.push(WEvent {
                stage,
                sigma,
                tau,
                removed: m,
            });
        }
    }
    Ok(ProductRun {
        events,
        completion: poset,
        teeth,
    })
}

/// Soundness of `W` against the extendibility oracle on the declared
/// completion: sequences in `W` are non-extendible, and so every extendible
/// short bad sequence stays out of `W`.
pub fn check_w(run: &ProductRun) -> std::result::Result<(), String> {
    for e in &run.events {
        if run.completion.extendible(&e.sigma) {
            return Err(format!(
                "{:?} entered W at stage {} but is extendible",
                e.sigma, e.stage
            ));
        }
    }
    let w = run.w();
    let elems = run.completion.elements(run.teeth, 0);
    for s in bad_sequences(&run.completion, &elems, 3) {
        if run.completion.extendible(&s) && w.contains(&s) {
            return Err(format!("extendible {s:?} lies in W"));
        }
    }
    Ok(())
}

/// Extend a bad sequence greedily by the least element below `search_bound`
/// that keeps it bad and outside `W`.
pub fn greedy_bad_from_w(
    order: &dyn Order,
    w_char: &dyn Fn(&[u64]) -> bool,
    count: usize,
    search_bound: u64,
) -> Result<Vec<u64>> {
    let mut seq: Vec<u64> = Vec::new();
    while seq.len() < count {
        let next = (0..search_bound).find(|&e| {
            if !order.in_support(e) || seq.iter().any(|&a| order.leq(a, e)) {
                return false;
            }
            seq.push(e);
            let ok = !w_char(&seq);
            seq.pop();
            ok
        });
        match next {
            Some(e) => seq.push(e),
            None => {
                return Err(LabError::DeadEnd(format!(
                    "no element below {search_bound} extends {seq:?} outside W"
                )))
            }
        }
    }
    debug_assert!(is_bad(order, &seq));
    Ok(seq)
}

/// Ten scripted pairs, the last one silent.
pub fn builtin_scripts() -> Vec<ProductScript> {
    let s =
        |name: &str, n: usize, pairs: &[(u64, u64)], bases: &[Option<usize>], protected: usize, answer: Option<u64>| {
            ProductScript {
                name: name.into(),
                core: FinPoset::from_pairs(n, pairs).expect("scripted core is a partial order"),
                bases: bases.to_vec(),
                protected,
                answer,
                teeth_per_stage: 2,
                stages: 3,
            }
        };
    vec![
        s("single-root", 1, &[], &[Some(0), None], 0, Some(7)),
        s("vee", 3, &[(0, 1), (0, 2)], &[Some(1), Some(2)], 0, Some(7)),
        s("chain", 3, &[(0, 1), (1, 2)], &[Some(2), Some(0), None], 0, Some(3)),
        s("antichain", 3, &[], &[Some(0), Some(1), Some(2)], 1, Some(0)),
        s(
            "diamond",
            4,
            &[(0, 1), (0, 2), (1, 3), (2, 3), (0, 3)],
            &[Some(3), Some(1)],
            0,
            Some(11),
        ),
        s(
            "wedge",
            4,
            &[(0, 2), (1, 2), (1, 3)],
            &[Some(2), Some(3), Some(0)],
            2,
            Some(1),
        ),
        s("protected-unbased", 2, &[(0, 1)], &[None, Some(1)], 0, Some(5)),
        s(
            "two-roots",
            5,
            &[(0, 2), (1, 3), (1, 4)],
            &[Some(4), Some(2)],
            0,
            Some(2),
        ),
        s(
            "tall",
            5,
            &[(0, 1), (1, 2), (2, 3), (3, 4)],
            &[Some(4), Some(1), Some(3)],
            1,
            Some(9),
        ),
        s("silent", 2, &[], &[None, Some(0)], 0, None),
    ]
}
