//! Choice problems: limit avoidance for Π⁰₂ sets, the embedding of ACC_k,
//! and the round trip through names of ℕ_⊥.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::pairing::pair;
use crate::problems::{Domain, NBot};
use crate::stream::{Stream, StreamSpec};

/// `q(n, j)`: row `n` has infinitely many 1s iff `n` belongs to the set.
pub type RowFamily = Arc<dyn Fn(u64, u64) -> u64 + Send + Sync>;

pub fn rows_from_specs(rows: &[StreamSpec]) -> RowFamily {
    let streams: Vec<Stream> = rows.iter().map(StreamSpec::build).collect();
    Arc::new(move |n, j| streams.get(n as usize).map_or(1, |s| s.at(j)))
}

fn zero_count(q: &RowFamily, n: u64, upto: u64) -> u64 {
    (0..upto).filter(|&j| q(n, j) == 0).count() as u64
}

/// A stream converging to the excluded element whenever the set presented by
/// `q` omits exactly one element. Ties go to the least index.
///
/// Over ℕ, row `n` only counts the entries `j` with `⟨n, j⟩ ≤ i`.
pub fn acc_limitavoid(domain: Domain, q: RowFamily) -> Stream {
    Stream::from_fn(move |i| {
        let rows: Vec<(u64, u64)> = match domain {
            Domain::Finite(k) => (0..k).map(|n| (n, zero_count(&q, n, i + 1))).collect(),
            Domain::Naturals => (0..=i)
                .map(|n| {
                    let seen = (0..).find(|&j| pair(n, j) > i).unwrap_or(0);
                    (n, zero_count(&q, n, seen))
                })
                .collect(),
        };
        let best = rows.iter().map(|&(_, m)| m).max().unwrap_or(0);
        rows.iter().find(|&&(_, m)| m == best).map_or(0, |&(n, _)| n)
    })
}

/// A position from which the finite-domain stream is constantly `excluded`,
/// for rows given as eventually periodic specs where row `excluded` has an
/// all-zero cycle and every other cycle contains a 1.
pub fn stabilization_bound(rows: &[StreamSpec], excluded: usize) -> Result<u64> {
    let own = rows
        .get(excluded)
        .ok_or_else(|| LabError::invalid("excluded row out of range"))?;
    if own.cycle.iter().any(|&b| b != 0) {
        return Err(LabError::contract("excluded row has infinitely many 1s"));
    }
    let ones = own.prefix.iter().filter(|&&b| b != 0).count() as u64;
    let mut bound = 0;
    for (n, row) in rows.iter().enumerate() {
        if n == excluded {
            continue;
        }
        if !row.cycle.iter().any(|&b| b != 0) {
            return Err(LabError::contract(format!("row {n} has finitely many 1s")));
        }
        // every full cycle contributes at least one 1
        bound = bound.max(row.prefix.len() as u64 + (ones + 1) * row.cycle.len() as u64);
    }
    Ok(bound.saturating_sub(1))
}

/// Forward map from ACC_k to Π⁰₂-ACC_{k+1}: `r(s) = i` once `i` has been
/// enumerated as forbidden by stage `s`, and `k` before that.
pub fn acck_forward(k: u64, p: &Stream) -> Stream {
    let p = p.clone();
    Stream::from_fn(move |s| (0..=s).map(|t| p.at(t)).find(|&v| v != 0).map_or(k, |v| v - 1))
}

/// Backward map: answers below `k` are kept. The answer `k` is only correct
/// when something was forbidden; search for it and return the least other element.
pub fn acck_backward(k: u64, p: &Stream, answer: u64, budget: u64) -> Result<u64> {
    if answer < k {
        return Ok(answer);
    }
    let forbidden = (0..budget)
        .map(|t| p.at(t))
        .find(|&v| v != 0)
        .map(|v| v - 1)
        .ok_or_else(|| LabError::exhausted(budget, "no forbidden element enumerated"))?;
    (0..k)
        .find(|&i| i != forbidden)
        .ok_or_else(|| LabError::contract("ACC_1 has no second element"))
}

/// A Π⁰₂-ACC_k instance paired with a name of ℕ_⊥ naming an allowed element,
/// or ⊥ when nothing is forbidden.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NBotInstance {
    pub k: u64,
    pub p: StreamSpec,
    pub n: NBot,
    /// Position at which the name of `n` shows its value.
    #[serde(default)]
    pub delay: u64,
}

impl NBotInstance {
    pub fn new(k: u64, p: StreamSpec, n: NBot, delay: u64) -> Result<Self> {
        if p.prefix.iter().chain(&p.cycle).any(|&v| v >= k) {
            return Err(LabError::invalid(format!("stream leaves {k}")));
        }
        match (n.0, p.limit()) {
            (Some(v), Some(lim)) if v == lim => return Err(LabError::contract("named element is the forbidden limit")),
            (Some(v), _) if v >= k => return Err(LabError::contract("named element outside k")),
            (Some(_), None) => return Err(LabError::contract("named element given although nothing is forbidden")),
            (None, Some(_)) => return Err(LabError::contract("⊥ given although an element is forbidden")),
            _ => {}
        }
        Ok(NBotInstance { k, p, n, delay })
    }

    pub fn name(&self) -> Stream {
        self.n.name(self.delay)
    }

    /// `k` while the name shows nothing, then the tail of `p`.
    pub fn forward(&self) -> Stream {
        let (k, p, q) = (self.k, self.p.build(), self.name());
        Stream::from_fn(move |i| if (0..=i).any(|j| q.at(j) != 0) { p.at(i) } else { k })
    }

    pub fn backward(&self, answer: u64, budget: u64) -> Result<u64> {
        if answer < self.k {
            return Ok(answer);
        }
        NBot::expect_value(&self.name(), budget)
    }
}
