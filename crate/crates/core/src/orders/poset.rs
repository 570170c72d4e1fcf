use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::presentation::{validate_laws, LawViolation, Order, OrderKind};
use crate::error::{LabError, Result};

/// A finite (quasi-)order stored as a boolean matrix. Elements are the
/// naturals listed in `support`; internally they are addressed by index.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FinPoset {
    labels: Vec<u64>,
    index: Option<BTreeMap<u64, usize>>,
    matrix: Vec<Vec<bool>>,
}

#[derive(Serialize, Deserialize)]
struct FinPosetJson {
    support: Vec<u64>,
    /// Pairs `[a, b]` meaning `a ≤ b`; closed reflexively and transitively on load.
    relation: Vec<(u64, u64)>,
}

impl Serialize for FinPoset {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut relation = Vec::new();
        for i in 0..self.len() {
            for j in 0..self.len() {
                if i != j && self.matrix[i][j] {
                    relation.push((self.labels[i], self.labels[j]));
                }
            }
        }
        FinPosetJson {
            support: self.labels.clone(),
            relation,
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for FinPoset {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FinPosetJson::deserialize(d)?;
        FinPoset::from_labelled(raw.support, &raw.relation, OrderKind::Quasi).map_err(serde::de::Error::custom)
    }
}

impl FinPoset {
    /// The `n`-element antichain on `0..n`.
    pub fn antichain(n: usize) -> Self {
        let matrix = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        FinPoset {
            labels: (0..n as u64).collect(),
            index: None,
            matrix,
        }
    }

    /// The partial order on `0..n` generated by `pairs` (each `(a, b)` is `a ≤ b`).
    pub fn from_pairs(n: usize, pairs: &[(u64, u64)]) -> Result<Self> {
        FinPoset::from_labelled((0..n as u64).collect(), pairs, OrderKind::Partial)
    }

    /// Like [`FinPoset::from_pairs`] but without the antisymmetry requirement.
    pub fn quasi_from_pairs(n: usize, pairs: &[(u64, u64)]) -> Self {
        FinPoset::from_labelled((0..n as u64).collect(), pairs, OrderKind::Quasi).expect("quasi-orders always close")
    }

    pub fn from_labelled(labels: Vec<u64>, pairs: &[(u64, u64)], kind: OrderKind) -> Result<Self> {
        let identity = labels.iter().enumerate().all(|(i, &l)| l == i as u64);
        let map: BTreeMap<u64, usize> = labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        if map.len() != labels.len() {
            return Err(LabError::invalid("repeated support element"));
        }
        let n = labels.len();
        let mut matrix: Vec<Vec<bool>> = (0..n).map(|i| (0..n).map(|j| i == j).collect()).collect();
        for &(a, b) in pairs {
            let (Some(&i), Some(&j)) = (map.get(&a), map.get(&b)) else {
                return Err(LabError::invalid(format!(
                    "relation pair ({a},{b}) outside the support"
                )));
            };
            matrix[i][j] = true;
        }
        // Warshall closure
        #[allow(clippy::needless_range_loop)]
        for k in 0..n {
            for i in 0..n {
                if matrix[i][k] {
                    for j in 0..n {
                        if matrix[k][j] {
                            matrix[i][j] = true;
                        }
                    }
                }
            }
        }
        let poset = FinPoset {
            labels,
            index: if identity { None } else { Some(map) },
            matrix,
        };
        if kind != OrderKind::Quasi {
            poset.validate(kind).map_err(|v| LabError::invalid(format!("{v:?}")))?;
        }
        Ok(poset)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> u64 {
        self.labels[i]
    }

    pub fn index_of(&self, label: u64) -> Option<usize> {
        match &self.index {
            None => ((label as usize) < self.len()).then_some(label as usize),
            Some(map) => map.get(&label).copied(),
        }
    }

    /// Order between internal indices.
    pub fn leq_idx(&self, i: usize, j: usize) -> bool {
        self.matrix[i][j]
    }

    /// Add a new element above the downward closure of `below` and below
    /// nothing. Returns its index; its label is the next unused natural.
    pub fn add_above(&mut self, below: &[usize]) -> usize {
        let n = self.len();
        let label = self.labels.iter().max().map_or(0, |m| m + 1).max(n as u64);
        for row in &mut self.matrix {
            row.push(false);
        }
        let mut row = vec![false; n + 1];
        row[n] = true;
        self.matrix.push(row);
        for &b in below {
            for i in 0..n {
                if self.matrix[i][b] {
                    self.matrix[i][n] = true;
                }
            }
        }
        if let Some(map) = &mut self.index {
            map.insert(label, n);
        } else if label != n as u64 {
            let mut map: BTreeMap<u64, usize> = self.labels.iter().enumerate().map(|(i, &l)| (l, i)).collect();
            map.insert(label, n);
            self.index = Some(map);
        }
        self.labels.push(label);
        n
    }

    /// The sub-order on the first `len` elements.
    pub fn truncate(&self, len: usize) -> FinPoset {
        let labels = self.labels[..len].to_vec();
        let matrix = self.matrix[..len].iter().map(|r| r[..len].to_vec()).collect();
        let index = self
            .index
            .as_ref()
            .map(|_| labels.iter().enumerate().map(|(i, &l)| (l, i)).collect());
        FinPoset { labels, index, matrix }
    }

    /// Drop every element from index `len` on, in place.
    pub fn shrink(&mut self, len: usize) {
        for l in self.labels.drain(len..) {
            if let Some(map) = &mut self.index {
                map.remove(&l);
            }
        }
        self.matrix.truncate(len);
        for row in &mut self.matrix {
            row.truncate(len);
        }
    }

    pub fn validate(&self, kind: OrderKind) -> std::result::Result<(), LawViolation> {
        validate_laws(self, kind, &self.labels)
    }

    /// Indices of maximal elements.
    pub fn maximal(&self) -> Vec<usize> {
        (0..self.len())
            .filter(|&i| (0..self.len()).all(|j| j == i || !self.matrix[i][j]))
            .collect()
    }
}

impl Order for FinPoset {
    fn leq(&self, a: u64, b: u64) -> bool {
        match (self.index_of(a), self.index_of(b)) {
            (Some(i), Some(j)) => self.matrix[i][j],
            _ => false,
        }
    }
}
