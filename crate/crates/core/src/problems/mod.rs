//! The benchmark problems: instance conventions and budgeted verifiers.

mod first_order;
mod nbot;
mod verdict;
mod verifiers;

use serde::Serialize;

pub use first_order::FirstOrder;
pub use nbot::NBot;
pub use verdict::{Lean, Verdict, Witness};
pub use verifiers::{
    fe_start, sort2, tail_window, verify_acc, verify_bs, verify_bsfe, verify_bstree, verify_c2, verify_cn, verify_ds,
    verify_dsfe, verify_extver, verify_lpo, verify_pitacc, verify_rt1k, verify_sort2, Domain, Sort2Instance,
};

#[derive(Debug, Clone, Serialize)]
pub struct ProblemEntry {
    pub name: &'static str,
    pub instance: &'static str,
    pub solution: &'static str,
}

const fn entry(name: &'static str, instance: &'static str, solution: &'static str) -> ProblemEntry {
    ProblemEntry {
        name,
        instance,
        solution,
    }
}

/// Problems addressable by name. `_k` names take the parameter as a suffix, e.g. `ACC_3`.
pub const PROBLEMS: &[ProblemEntry] = &[
    entry(
        "CN",
        "stream enumerating a non-cofinite set of refuted naturals",
        "an unrefuted natural",
    ),
    entry("C2", "stream refuting at most one of the bits 0, 1", "an unrefuted bit"),
    entry(
        "ACC_N",
        "stream enumerating at most one forbidden natural",
        "a natural that is not forbidden",
    ),
    entry(
        "ACC_k",
        "stream enumerating at most one forbidden element of k",
        "an element of k that is not forbidden",
    ),
    entry(
        "PiTACC_N",
        "stream whose limit, if any, is forbidden",
        "a natural other than the limit",
    ),
    entry(
        "PiTACC_k",
        "stream over k whose limit, if any, is forbidden",
        "an element of k other than the limit",
    ),
    entry("RT1_k", "k-coloring of the naturals", "a color used infinitely often"),
    entry("DS", "ill-founded linear order", "an infinite descending sequence"),
    entry("BS", "non-wqo partial order", "an infinite bad sequence"),
    entry("BStree", "binary tree of infinite width", "an infinite antichain"),
    entry(
        "ExtVer",
        "binary tree of infinite width",
        "a vertex extendible to an infinite antichain",
    ),
    entry(
        "DSfe",
        "ill-founded linear order",
        "a sequence that is cofinitely descending",
    ),
    entry("BSfe", "non-wqo partial order", "a sequence that is cofinitely bad"),
    entry("Sort2", "binary stream", "its sorted rearrangement"),
    entry("LPO", "stream of naturals", "1 iff some entry is nonzero"),
];

/// Resolve `ACC_3` to the `ACC_k` entry and its parameter.
pub fn lookup(name: &str) -> Option<(&'static ProblemEntry, Option<u64>)> {
    if let Some(e) = PROBLEMS.iter().find(|e| e.name == name) {
        return Some((e, None));
    }
    let (stem, k) = name.rsplit_once('_')?;
    let k: u64 = k.parse().ok()?;
    let template = format!("{stem}_k");
    PROBLEMS.iter().find(|e| e.name == template).map(|e| (e, Some(k)))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lookup_parameterized() {
        assert_eq!(lookup("ACC_3").map(|(e, k)| (e.name, k)), Some(("ACC_k", Some(3))));
        assert_eq!(lookup("DS").map(|(e, k)| (e.name, k)), Some(("DS", None)));
        assert!(lookup("XYZ").is_none());
    }
}
