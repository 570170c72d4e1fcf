use serde::{Deserialize, Serialize};

use super::verdict::Verdict;
use super::verifiers::{verify_acc, verify_cn, verify_lpo, verify_pitacc, Domain};
use crate::error::Result;
use crate::stream::Stream;

/// Problems whose instances are single streams and whose answers are naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "problem", content = "domain", rename_all = "kebab-case")]
pub enum FirstOrder {
    Cn,
    Acc(Domain),
    PiTacc(Domain),
    Lpo,
}

impl FirstOrder {
    /// Errors are contract violations: the instance lies outside the domain.
    pub fn verify(&self, instance: &Stream, answer: u64, budget: u64) -> Result<Verdict> {
        Ok(match *self {
            FirstOrder::Cn => verify_cn(instance, answer, budget),
            FirstOrder::Acc(d) => verify_acc(d, instance, answer, budget)?,
            FirstOrder::PiTacc(d) => verify_pitacc(d, instance, answer, budget),
            FirstOrder::Lpo => verify_lpo(instance, answer, budget),
        })
    }

    /// Answers below `bound` that the verifier accepts at `budget`.
    pub fn accepted_answers(&self, instance: &Stream, bound: u64, budget: u64) -> Result<Vec<u64>> {
        let mut out = Vec::new();
        for a in 0..bound {
            if self.verify(instance, a, budget)?.accepts() {
                out.push(a);
            }
        }
        Ok(out)
    }
}
