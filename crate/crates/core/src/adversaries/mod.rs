//! Bounded-stage diagonalization machines. Each runs against a strategy for
//! a fixed number of stages and returns the object it built together with a
//! [`DefeatCertificate`] whose events re-check against that object.

mod guesser;
mod linearizer;
mod sort_rt;

pub use guesser::{defeat_guesser, BuiltinGuesser, Guesser, GuesserRun, GuesserStage, DEFAULT_PROBE};
pub use linearizer::{defeat_linearizer, BuiltinLinearizer, Linearizer, LinearizerRun, LinearizerStage, DEFAULT_WAIT};
pub use sort_rt::{
    defeat_sort_rt, fan_tip, ColourRule, CommitRule, FanTip, SortRtRun, SortRtScript, SortRtStage, DEFAULT_SEARCH,
};

use serde::{Deserialize, Serialize};

/// One output of the strategy that the construction made wrong.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefeatEvent {
    pub stage: u64,
    /// The guessed element, the attacked bad sequence, or the decided vertex.
    pub target: Vec<u64>,
    pub reason: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidityReport {
    pub checks: Vec<Check>,
}

impl ValidityReport {
    pub fn record(&mut self, name: &str, outcome: std::result::Result<(), String>) {
        let (passed, detail) = match outcome {
            Ok(()) => (true, String::new()),
            Err(d) => (false, d),
        };
        self.checks.push(Check {
            name: name.into(),
            passed,
            detail,
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DefeatCertificate<S> {
    pub adversary: String,
    pub strategy: String,
    pub transcript: Vec<S>,
    pub events: Vec<DefeatEvent>,
    /// Stages in which the strategy produced nothing within the per-stage budget.
    pub stalls: Vec<u64>,
    pub report: ValidityReport,
}

/// Adversary names, as CLI targets.
pub const ADVERSARIES: &[&str] = &["defeat-guesser", "defeat-sort-rt", "defeat-linearizer"];

/// Strategy names available to `adversary`.
pub fn strategies(adversary: &str) -> Option<Vec<String>> {
    match adversary {
        "defeat-guesser" => Some(BuiltinGuesser::all().iter().map(|g| g.name()).collect()),
        "defeat-sort-rt" => Some(SortRtScript::builtin().into_iter().map(|s| s.name).collect()),
        "defeat-linearizer" => Some(BuiltinLinearizer::all().iter().map(|l| l.name()).collect()),
        _ => None,
    }
}
