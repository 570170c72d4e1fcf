use std::fmt;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum Witness {
    Position { at: u64 },
    Pair { i: u64, j: u64 },
    Value { value: u64 },
    Note { detail: String },
}

impl Witness {
    pub fn note(detail: impl Into<String>) -> Self {
        Witness::Note { detail: detail.into() }
    }
}

/// Which way an inconclusive verdict points at the budget where it was reached.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Lean {
    Pass,
    Fail,
}

/// Outcome of checking a candidate solution with a finite budget. `Pass`
/// and `Fail` are final: more budget never changes them.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "verdict", rename_all = "kebab-case")]
pub enum Verdict {
    Pass,
    Fail { witness: Witness },
    Inconclusive { budget: u64, lean: Lean },
}

impl Verdict {
    pub fn fail(witness: Witness) -> Self {
        Verdict::Fail { witness }
    }

    pub fn pass_at(budget: u64) -> Self {
        Verdict::Inconclusive {
            budget,
            lean: Lean::Pass,
        }
    }

    pub fn fail_at(budget: u64) -> Self {
        Verdict::Inconclusive {
            budget,
            lean: Lean::Fail,
        }
    }

    /// A definite pass, or a pass at the budget.
    pub fn accepts(&self) -> bool {
        matches!(self, Verdict::Pass | Verdict::Inconclusive { lean: Lean::Pass, .. })
    }

    pub fn is_final(&self) -> bool {
        !matches!(self, Verdict::Inconclusive { .. })
    }

    /// Whether `later` (computed with at least as much budget) is consistent with `self`.
    pub fn refined_by(&self, later: &Verdict) -> bool {
        match self {
            Verdict::Pass => matches!(later, Verdict::Pass),
            Verdict::Fail { .. } => matches!(later, Verdict::Fail { .. }),
            Verdict::Inconclusive { .. } => true,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => write!(f, "pass"),
            Verdict::Fail { witness } => write!(f, "fail ({witness:?})"),
            Verdict::Inconclusive {
                budget,
                lean: Lean::Pass,
            } => write!(f, "pass at budget {budget}"),
            Verdict::Inconclusive {
                budget,
                lean: Lean::Fail,
            } => write!(f, "fail at budget {budget}"),
        }
    }
}
