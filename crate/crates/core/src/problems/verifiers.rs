//! Budgeted solution checkers. Streams that enumerate a finite set use the
//! convention that the value `v + 1` announces `v` and `0` announces nothing.

use serde::{Deserialize, Serialize};

use super::verdict::{Verdict, Witness};
use crate::error::{LabError, Result};
use crate::orders::{bad_violation, descending_violation, is_prefix, word_from_code, Order, TreeOracle};
use crate::stream::Stream;

/// The answer space of a choice problem: `{0, ..., k-1}` or all naturals.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Domain {
    Finite(u64),
    Naturals,
}

impl Domain {
    pub fn contains(&self, n: u64) -> bool {
        match *self {
            Domain::Finite(k) => n < k,
            Domain::Naturals => true,
        }
    }
}

fn outside(domain: Domain, n: u64) -> Option<Verdict> {
    (!domain.contains(n)).then(|| Verdict::fail(Witness::note(format!("{n} outside {domain:?}"))))
}

/// `n` solves `p` for C_ℕ iff `n + 1` never occurs in `p`.
pub fn verify_cn(p: &Stream, n: u64, budget: u64) -> Verdict {
    match (0..budget).find(|&i| p.at(i) == n + 1) {
        Some(at) => Verdict::fail(Witness::Position { at }),
        None => Verdict::pass_at(budget),
    }
}

/// ACC: `p` enumerates at most one forbidden element; `n` must avoid it.
/// Once a different element has appeared, `n` is definitely correct.
pub fn verify_acc(domain: Domain, p: &Stream, n: u64, budget: u64) -> Result<Verdict> {
    if let Some(v) = outside(domain, n) {
        return Ok(v);
    }
    let mut seen: Option<u64> = None;
    for i in 0..budget {
        let v = p.at(i);
        if v == 0 {
            continue;
        }
        match seen {
            Some(s) if s != v - 1 => {
                return Err(LabError::contract(format!(
                    "two forbidden elements {s} and {} enumerated",
                    v - 1
                )))
            }
            _ => seen = Some(v - 1),
        }
    }
    Ok(match seen {
        Some(m) if m == n => Verdict::fail(Witness::Value { value: m }),
        Some(_) => Verdict::Pass,
        None => Verdict::pass_at(budget),
    })
}

/// C₂ checked bitwise: the set of refuted answers among `{0, 1}`.
pub fn verify_c2(p: &Stream, n: u64, budget: u64) -> Result<Verdict> {
    if n > 1 {
        return Ok(Verdict::fail(Witness::note("C2 answers are bits")));
    }
    let mut refuted = 0u8;
    for i in 0..budget {
        match p.at(i) {
            0 => {}
            v @ 1..=2 => refuted |= 1 << (v - 1),
            v => return Err(LabError::contract(format!("C2 instance enumerates {}", v - 1))),
        }
        if refuted == 0b11 {
            return Err(LabError::contract("C2 instance refutes both bits"));
        }
    }
    Ok(if refuted & (1 << n) != 0 {
        Verdict::fail(Witness::Value { value: n })
    } else if refuted != 0 {
        Verdict::Pass
    } else {
        Verdict::pass_at(budget)
    })
}

/// The tail window `[budget/2, budget)` used by limit verdicts.
pub fn tail_window(budget: u64) -> std::ops::Range<u64> {
    budget / 2..budget.max(1)
}

/// Π⁰₂-ACC: the forbidden element is `lim p` if it exists. At a budget `n`
/// looks wrong iff `p` is constantly `n` on the tail window.
pub fn verify_pitacc(domain: Domain, p: &Stream, n: u64, budget: u64) -> Verdict {
    if let Some(v) = outside(domain, n) {
        return v;
    }
    if tail_window(budget).all(|i| p.at(i) == n) {
        Verdict::fail_at(budget)
    } else {
        Verdict::pass_at(budget)
    }
}

/// RT¹ₖ with a color `color` and a finite homogeneous witness set `h`: every
/// `h` must have the color and the color must recur past `max h` inside the tail window.
pub fn verify_rt1k(c: &Stream, k: u64, color: u64, h: &[u64], budget: u64) -> Verdict {
    if color >= k {
        return Verdict::fail(Witness::note(format!("color {color} not below {k}")));
    }
    if let Some(&at) = h.iter().find(|&&i| c.at(i) != color) {
        return Verdict::fail(Witness::Position { at });
    }
    let from = h.iter().max().map_or(0, |m| m + 1).max(budget / 2);
    if (from..budget).any(|i| c.at(i) == color) {
        Verdict::pass_at(budget)
    } else {
        Verdict::fail_at(budget)
    }
}

fn realized(seq: &Stream, budget: u64) -> Vec<u64> {
    seq.prefix(budget).0
}

fn pair_witness((i, j): (usize, usize)) -> Verdict {
    Verdict::fail(Witness::Pair {
        i: i as u64,
        j: j as u64,
    })
}

/// DS: strictly descending on the first `budget` positions.
pub fn verify_ds(order: &dyn Order, seq: &Stream, budget: u64) -> Verdict {
    descending_violation(order, &realized(seq, budget)).map_or(Verdict::pass_at(budget), pair_witness)
}

/// BS: bad on the first `budget` positions.
pub fn verify_bs(order: &dyn Order, seq: &Stream, budget: u64) -> Verdict {
    bad_violation(order, &realized(seq, budget)).map_or(Verdict::pass_at(budget), pair_witness)
}

/// BS on a tree: an antichain of coded vertices.
pub fn verify_bstree(tree: &dyn TreeOracle, seq: &Stream, budget: u64) -> Verdict {
    let words: Vec<Vec<u64>> = realized(seq, budget).into_iter().map(word_from_code).collect();
    for (j, w) in words.iter().enumerate() {
        if !tree.contains(w) {
            return pair_witness((j, j));
        }
        if let Some(i) = words[..j].iter().position(|v| is_prefix(v, w) || is_prefix(w, v)) {
            return pair_witness((i, j));
        }
    }
    Verdict::pass_at(budget)
}

/// Least `s` such that positions `[s, budget)` pass the descending (or bad) check.
pub fn fe_start(order: &dyn Order, seq: &Stream, budget: u64, descending: bool) -> u64 {
    let xs = realized(seq, budget);
    let mut start = 0;
    for (j, &b) in xs.iter().enumerate() {
        if !order.in_support(b) {
            start = start.max(j as u64 + 1);
            continue;
        }
        for (i, &a) in xs[..j].iter().enumerate().skip(start as usize) {
            let violated = if descending { !order.lt(b, a) } else { order.leq(a, b) };
            if violated {
                start = start.max(i as u64 + 1);
            }
        }
    }
    start
}

fn verify_fe(order: &dyn Order, seq: &Stream, budget: u64, descending: bool) -> Verdict {
    if fe_start(order, seq, budget, descending) <= budget / 2 {
        Verdict::pass_at(budget)
    } else {
        Verdict::fail_at(budget)
    }
}

/// DSfe: cofinitely descending, with the garbage prefix ending by `budget/2`.
pub fn verify_dsfe(order: &dyn Order, seq: &Stream, budget: u64) -> Verdict {
    verify_fe(order, seq, budget, true)
}

pub fn verify_bsfe(order: &dyn Order, seq: &Stream, budget: u64) -> Verdict {
    verify_fe(order, seq, budget, false)
}

/// ExtVer: `v` must stay incomparable with an infinite antichain.
pub fn verify_extver(tree: &dyn TreeOracle, v: &[u64]) -> Result<Verdict> {
    if !tree.infinite_width() {
        return Err(LabError::contract("ExtVer needs a tree of infinite width"));
    }
    Ok(if tree.extendible(v)? {
        Verdict::Pass
    } else {
        Verdict::fail(Witness::note(format!("{v:?} is not extendible")))
    })
}

/// LPO answers 1 iff `p` has a nonzero entry.
pub fn verify_lpo(p: &Stream, answer: u64, budget: u64) -> Verdict {
    match ((0..budget).find(|&i| p.at(i) != 0), answer) {
        (Some(_), 1) => Verdict::Pass,
        (Some(at), _) => Verdict::fail(Witness::Position { at }),
        (None, 0) => Verdict::pass_at(budget),
        (None, _) => Verdict::fail_at(budget),
    }
}

/// A binary stream with its declared number of zeroes (`None`: infinitely many).
#[derive(Debug, Clone)]
pub struct Sort2Instance {
    pub bits: Stream,
    pub zeros: Option<u64>,
}

/// `0^n 1^ω` for `n` declared zeroes, `0^ω` if infinitely many. Position `i`
/// is 0 iff the input shows at least `i + 1` zeroes or the declaration
/// guarantees them.
pub fn sort2(instance: &Sort2Instance) -> Stream {
    let zeros = instance.zeros;
    Stream::from_fn(move |i| match zeros {
        Some(n) if i >= n => 1,
        _ => 0,
    })
}

pub fn verify_sort2(instance: &Sort2Instance, out: &Stream, budget: u64) -> Verdict {
    let seen = (0..budget).filter(|&i| instance.bits.at(i) == 0).count() as u64;
    if let Some(n) = instance.zeros {
        if seen > n {
            return Verdict::fail(Witness::note(format!("declared {n} zeroes, saw {seen}")));
        }
    }
    let expected = sort2(instance);
    match (0..budget).find(|&i| out.at(i) != expected.at(i)) {
        Some(at) => Verdict::fail(Witness::Position { at }),
        None => Verdict::pass_at(budget),
    }
}
