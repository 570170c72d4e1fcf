//! Finitely described partial orders: a finite core with infinite combs
//! (antichains of teeth) and infinite chains attached above core elements.
//! Extendibility of bad sequences is decidable from the description.

use serde::{Deserialize, Serialize};

use super::poset::FinPoset;
use super::presentation::{Order, OrderKind};
use super::sequences::is_bad;
use crate::error::{LabError, Result};
use crate::pairing::{pair, unpair};
use crate::stream::Stream;

/// Teeth sitting above `base` (a core index, or nothing), pairwise incomparable.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Comb {
    pub base: Option<usize>,
    /// Number of teeth; `None` for infinitely many.
    pub len: Option<u64>,
}

impl Comb {
    pub fn infinite(base: Option<usize>) -> Self {
        Comb { base, len: None }
    }

    pub fn finite(base: Option<usize>, len: u64) -> Self {
        Comb { base, len: Some(len) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CombElement {
    Core(usize),
    Tooth { comb: usize, index: u64 },
    Path { path: usize, index: u64 },
}

/// Core elements are `0..core.len()`. An element `n + ⟨k, j⟩` is tooth `j`
/// of comb `k`, or element `j` of path `k - combs.len()`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CombPoset {
    pub core: FinPoset,
    pub combs: Vec<Comb>,
    /// Bases of infinite ascending chains.
    #[serde(default)]
    pub paths: Vec<Option<usize>>,
}

impl CombPoset {
    pub fn new(core: FinPoset, combs: Vec<Comb>, paths: Vec<Option<usize>>) -> Result<Self> {
        let p = CombPoset { core, combs, paths };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if self.core.labels().iter().enumerate().any(|(i, &l)| l != i as u64) {
            return Err(LabError::invalid("comb poset core must be labelled 0..n"));
        }
        self.core
            .validate(OrderKind::Partial)
            .map_err(|v| LabError::invalid(format!("{v:?}")))?;
        let n = self.core.len();
        let bases = self.combs.iter().map(|c| c.base).chain(self.paths.iter().copied());
        for b in bases.flatten() {
            if b >= n {
                return Err(LabError::invalid(format!("base {b} outside the core")));
            }
        }
        Ok(())
    }

    pub fn tooth(&self, comb: usize, index: u64) -> u64 {
        self.core.len() as u64 + pair(comb as u64, index)
    }

    pub fn path_element(&self, path: usize, index: u64) -> u64 {
        self.core.len() as u64 + pair((self.combs.len() + path) as u64, index)
    }

    pub fn decode(&self, e: u64) -> Option<CombElement> {
        let n = self.core.len() as u64;
        if e < n {
            return Some(CombElement::Core(e as usize));
        }
        let (k, j) = unpair(e - n);
        let k = k as usize;
        if let Some(c) = self.combs.get(k) {
            return c
                .len
                .is_none_or(|len| j < len)
                .then_some(CombElement::Tooth { comb: k, index: j });
        }
        (k - self.combs.len() < self.paths.len()).then_some(CombElement::Path {
            path: k - self.combs.len(),
            index: j,
        })
    }

    fn core_below(&self, core: usize, base: Option<usize>) -> bool {
        base.is_some_and(|b| self.core.leq_idx(core, b))
    }

    pub fn is_wqo(&self) -> bool {
        self.combs.iter().all(|c| c.len.is_some())
    }

    /// Whether the finite sequence `seq` can be extended to an infinite bad
    /// sequence. Apart from the teeth of infinite combs every realized part is
    /// finite or a chain, so an infinite extension must use infinitely many
    /// teeth of one infinite comb; that works iff no core entry lies below its base.
    pub fn extendible(&self, seq: &[u64]) -> bool {
        is_bad(self, seq)
            && self.combs.iter().any(|c| {
                c.len.is_none()
                    && !seq
                        .iter()
                        .any(|&e| matches!(self.decode(e), Some(CombElement::Core(i)) if self.core_below(i, c.base)))
            })
    }

    /// The teeth of the first infinite comb.
    pub fn canonical_bad(&self) -> Option<Stream> {
        let k = self.combs.iter().position(|c| c.len.is_none())?;
        let n = self.core.len() as u64;
        Some(Stream::from_fn(move |j| n + pair(k as u64, j)))
    }

    /// The core plus the first `teeth` teeth of each comb and the first
    /// `path_len` elements of each path.
    pub fn elements(&self, teeth: u64, path_len: u64) -> Vec<u64> {
        let mut out: Vec<u64> = (0..self.core.len() as u64).collect();
        for (k, c) in self.combs.iter().enumerate() {
            let m = c.len.map_or(teeth, |l| l.min(teeth));
            out.extend((0..m).map(|j| self.tooth(k, j)));
        }
        for p in 0..self.paths.len() {
            out.extend((0..path_len).map(|j| self.path_element(p, j)));
        }
        out
    }
}

impl Order for CombPoset {
    fn leq(&self, a: u64, b: u64) -> bool {
        use CombElement::*;
        let (Some(x), Some(y)) = (self.decode(a), self.decode(b)) else {
            return false;
        };
        match (x, y) {
            (Core(i), Core(j)) => self.core.leq_idx(i, j),
            (Core(i), Tooth { comb, .. }) => self.core_below(i, self.combs[comb].base),
            (Core(i), Path { path, .. }) => self.core_below(i, self.paths[path]),
            (Tooth { .. }, Tooth { .. }) => a == b,
            (Path { path: p, index: i }, Path { path: q, index: j }) => p == q && i <= j,
            _ => false,
        }
    }
}
