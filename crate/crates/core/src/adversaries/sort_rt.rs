//! An instance `(p, c)` of Sort₂ × RT¹₂ on which a scripted strong reduction
//! to BS answers Sort₂ wrongly on bad sequences of its own order.
//!
//! The scripted forward functional outputs a fan: a bottom element `0` and,
//! for every position `t` of the coloring read so far (and at most one per
//! step), a tip above it whose code records `t`, the number of zeroes in
//! `p[..=t]` and `c(t)`. Its `⊴`-maximal bad sequences are exactly the tip
//! singletons, so the backward functionals only ever read one tip.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::{DefeatCertificate, DefeatEvent, ValidityReport};
use crate::error::{LabError, Result};
use crate::pairing::{pair, unpair};
use crate::problems::{verify_sort2, Sort2Instance};
use crate::stream::Stream;

pub const DEFAULT_SEARCH: u64 = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FanTip {
    pub position: u64,
    pub zeros: u64,
    pub colour: u64,
}

impl FanTip {
    pub fn code(&self) -> u64 {
        1 + pair(self.position, pair(self.zeros, self.colour))
    }
}

/// Decode a fan element; `None` for the bottom element `0`.
pub fn fan_tip(code: u64) -> Option<FanTip> {
    let (position, rest) = unpair(code.checked_sub(1)?);
    let (zeros, colour) = unpair(rest);
    Some(FanTip {
        position,
        zeros,
        colour,
    })
}

/// When `Ψ₀` commits to `0^i 1` for a tip at position `t`, `i` being the
/// zero count recorded in the tip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum CommitRule {
    Immediate,
    /// After `t + delay` steps.
    After {
        delay: u64,
    },
    /// After `t + (t mod modulus)` steps.
    ByPosition {
        modulus: u64,
    },
}

/// The colour `Ψ₁` answers on a tip.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case")]
pub enum ColourRule {
    /// The colour recorded in the tip.
    Recorded,
    Constant {
        colour: u64,
    },
    /// `t mod 2`.
    Parity,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortRtScript {
    pub name: String,
    pub commit: CommitRule,
    pub colour: ColourRule,
}

impl SortRtScript {
    pub fn builtin() -> Vec<SortRtScript> {
        let s = |name: &str, commit, colour| SortRtScript {
            name: name.into(),
            commit,
            colour,
        };
        vec![
            s("eager", CommitRule::Immediate, ColourRule::Recorded),
            s(
                "late",
                CommitRule::After { delay: 12 },
                ColourRule::Constant { colour: 0 },
            ),
            s("parity", CommitRule::ByPosition { modulus: 4 }, ColourRule::Parity),
        ]
    }

    /// `Ψ₀` on the singleton of `tip` after `steps` steps.
    pub fn committed(&self, tip: &FanTip, steps: u64) -> Option<u64> {
        let t = tip.position;
        let ready = match self.commit {
            CommitRule::Immediate => true,
            CommitRule::After { delay } => steps >= t + delay,
            CommitRule::ByPosition { modulus } => steps >= t + t % modulus.max(1),
        };
        ready.then_some(tip.zeros)
    }

    /// `Ψ₁(β)(0)` on the singleton of `tip`.
    pub fn colour(&self, tip: &FanTip) -> u64 {
        match self.colour {
            ColourRule::Recorded => tip.colour,
            ColourRule::Constant { colour } => colour,
            ColourRule::Parity => tip.position % 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Attended {
    pub tip: u64,
    /// Length `m` of the forcing extension `(1^m, (1-k)^m)`; 0 on even stages.
    pub forced: u64,
    pub committed: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SortRtStage {
    /// The stage number `s + 1`, odd stages forcing and even ones padding.
    pub stage: u64,
    pub attended: Vec<Attended>,
    /// The zero run `j` appended on even stages.
    pub j: Option<u64>,
    pub rho_len: usize,
    pub gamma_len: usize,
}

#[derive(Debug, Clone)]
pub struct SortRtRun {
    pub rho: Vec<u64>,
    pub gamma: Vec<u64>,
    pub cert: DefeatCertificate<SortRtStage>,
}

impl SortRtRun {
    /// The Sort₂ input as read so far, continued by ones.
    pub fn p(&self) -> Stream {
        Stream::with_prefix(self.rho.clone(), Stream::constant(1))
    }

    /// The coloring as read so far, continued by zeroes.
    pub fn c(&self) -> Stream {
        Stream::with_prefix(self.gamma.clone(), Stream::zeros())
    }
}

/// The tips of the fan after `steps` steps on `(rho, gamma)`.
fn tips(rho: &[u64], gamma: &[u64], steps: u64) -> Vec<FanTip> {
    let mut zeros = 0;
    let n = (steps as usize).min(gamma.len());
    (0..n)
        .map(|t| {
            zeros += u64::from(rho[t] == 0);
            FanTip {
                position: t as u64,
                zeros,
                colour: gamma[t],
            }
        })
        .collect()
}

pub fn defeat_sort_rt(script: &SortRtScript, stages: u64, search: u64) -> Result<SortRtRun> {
    if search == 0 {
        return Err(LabError::invalid("forcing search budget must be positive"));
    }
    let (mut rho, mut gamma) = (Vec::new(), Vec::new());
    let mut done: BTreeSet<u64> = BTreeSet::new();
    let mut transcript = Vec::new();
    let mut events = Vec::new();
    let mut stalls = Vec::new();
    for s in 0..stages {
        let stage = s + 1;
        let mut attended = Vec::new();
        let mut j = None;
        if stage % 2 == 1 {
            let mut steps = stage;
            let open: Vec<FanTip> = tips(&rho, &gamma, steps)
                .into_iter()
                .filter(|tip| !done.contains(&tip.position) && script.committed(tip, steps).is_none())
                .collect();
            for tip in open {
                let k = script.colour(&tip);
                let Some(m) = (1..=search).find(|m| script.committed(&tip, steps + m).is_some()) else {
                    stalls.push(stage);
                    continue;
                };
                steps += m;
                rho.extend(std::iter::repeat_n(1, m as usize));
                gamma.extend(std::iter::repeat_n(1 - k.min(1), m as usize));
                let i = tip.zeros;
                rho.extend(std::iter::repeat_n(0, i as usize + 1));
                done.insert(tip.position);
                attended.push(Attended {
                    tip: tip.code(),
                    forced: m,
                    committed: i,
                });
                events.push(DefeatEvent {
                    stage,
                    target: vec![tip.code()],
                    reason: format!(
                        "forced to commit to {i} zeroes with RT answer {k}, then {} zeroes appended",
                        i + 1
                    ),
                });
            }
        } else {
            let committed: Vec<(FanTip, u64)> = tips(&rho, &gamma, stage)
                .into_iter()
                .filter(|tip| !done.contains(&tip.position))
                .filter_map(|tip| script.committed(&tip, stage).map(|i| (tip, i)))
                .collect();
            let run = committed.iter().map(|&(_, i)| i + 1).max().unwrap_or(0);
            rho.extend(std::iter::repeat_n(0, run as usize));
            rho.push(1);
            gamma.push(0);
            j = Some(run);
            for (tip, i) in committed {
                done.insert(tip.position);
                attended.push(Attended {
                    tip: tip.code(),
                    forced: 0,
                    committed: i,
                });
                events.push(DefeatEvent {
                    stage,
                    target: vec![tip.code()],
                    reason: format!("committed to {i} zeroes, then {run} zeroes appended"),
                });
            }
        }
        transcript.push(SortRtStage {
            stage,
            attended,
            j,
            rho_len: rho.len(),
            gamma_len: gamma.len(),
        });
    }
    let mut cert = DefeatCertificate {
        adversary: "defeat-sort-rt".into(),
        strategy: script.name.clone(),
        transcript,
        events,
        stalls,
        report: ValidityReport::default(),
    };
    let run = SortRtRun {
        rho,
        gamma,
        cert: cert.clone(),
    };
    cert.report
        .record("instance extended on every even stage", check_extension(&run.cert));
    cert.report
        .record("defeat events re-check", recheck_sort_rt(script, &run));
    Ok(SortRtRun { cert, ..run })
}

fn check_extension(cert: &DefeatCertificate<SortRtStage>) -> std::result::Result<(), String> {
    let mut last = (0, 0);
    for t in &cert.transcript {
        if t.stage % 2 == 0 && (t.rho_len <= last.0 || t.gamma_len <= last.1) {
            return Err(format!("stage {} did not extend both coordinates", t.stage));
        }
        last = (t.rho_len, t.gamma_len);
    }
    Ok(())
}

/// Every defeated tip is a tip of the final fan, the script commits to its
/// zero count, and the Sort₂ verifier rejects that commitment on `p`.
fn recheck_sort_rt(script: &SortRtScript, run: &SortRtRun) -> std::result::Result<(), String> {
    let zeros = run.rho.iter().filter(|&&b| b == 0).count() as u64;
    let instance = Sort2Instance {
        bits: run.p(),
        zeros: Some(zeros),
    };
    for e in &run.cert.events {
        let code = *e.target.first().ok_or("event without a tip")?;
        let tip = fan_tip(code).ok_or(format!("stage {}: {code} is the bottom element", e.stage))?;
        let actual = tips(&run.rho, &run.gamma, u64::MAX).get(tip.position as usize).copied();
        if actual != Some(tip) {
            return Err(format!("stage {}: {tip:?} disagrees with the instance", e.stage));
        }
        let i = script
            .committed(&tip, u64::MAX)
            .ok_or(format!("stage {}: the script never commits on {code}", e.stage))?;
        let answer = Stream::from_fn(move |n| u64::from(n >= i));
        if verify_sort2(&instance, &answer, run.rho.len() as u64).accepts() {
            return Err(format!("stage {}: 0^{i}1 is a correct Sort2 answer", e.stage));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::{bad_sequences, trianglelefteq, FinPoset};

    fn script(name: &str) -> SortRtScript {
        SortRtScript::builtin().into_iter().find(|s| s.name == name).unwrap()
    }

    #[test]
    fn fan_maximal_bad_sequences_are_tip_singletons() {
        let fan = FinPoset::from_pairs(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let all = bad_sequences(&fan, fan.labels(), 4);
        let maximal: Vec<Vec<u64>> = all
            .iter()
            .filter(|b| !all.iter().any(|a| a != *b && trianglelefteq(&fan, b, a)))
            .cloned()
            .collect();
        assert_eq!(maximal, vec![vec![1], vec![2], vec![3], vec![4]]);
    }

    #[test]
    fn tip_codes_round_trip() {
        let tip = FanTip {
            position: 17,
            zeros: 9,
            colour: 1,
        };
        assert_eq!(fan_tip(tip.code()), Some(tip));
        assert_eq!(fan_tip(0), None);
    }

    #[test]
    fn eager_script_is_defeated_on_even_stages() {
        let run = defeat_sort_rt(&script("eager"), 20, DEFAULT_SEARCH).unwrap();
        let cert = &run.cert;
        assert!(cert.report.passed(), "{:?}", cert.report);
        assert!(cert.events.iter().all(|e| e.stage % 2 == 0));
        assert!(cert
            .transcript
            .iter()
            .filter(|t| t.stage % 2 == 0 && t.stage > 2)
            .all(|t| !t.attended.is_empty()));
    }

    #[test]
    fn constant_colour_is_forced_with_flipped_colours() {
        let run = defeat_sort_rt(&script("late"), 30, DEFAULT_SEARCH).unwrap();
        let cert = &run.cert;
        assert!(cert.report.passed(), "{:?}", cert.report);
        let forced: Vec<&Attended> = cert
            .transcript
            .iter()
            .flat_map(|t| &t.attended)
            .filter(|a| a.forced > 0)
            .collect();
        assert!(!forced.is_empty());
        assert!(run.gamma.contains(&1));
    }

    #[test]
    fn instance_grows_every_even_stage() {
        for s in SortRtScript::builtin() {
            let run = defeat_sort_rt(&s, 200, DEFAULT_SEARCH).unwrap();
            assert!(run.cert.report.passed(), "{}: {:?}", s.name, run.cert.report);
            assert!(run.cert.events.len() >= 3, "{}", s.name);
            assert!(run.gamma.len() >= 100 && run.rho.len() >= run.gamma.len());
        }
    }

    #[test]
    fn exhausted_search_is_recorded() {
        let slow = SortRtScript {
            name: "slow".into(),
            commit: CommitRule::After { delay: 100 },
            colour: ColourRule::Parity,
        };
        let run = defeat_sort_rt(&slow, 5, 2).unwrap();
        assert!(!run.cert.stalls.is_empty());
        assert!(run.cert.report.passed());
    }
}
