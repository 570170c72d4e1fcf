//! Finite prefixes and lazily queried infinite sequences of naturals.

use std::fmt;
use std::ops::Deref;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::pairing::{pair, unpair};

/// A finite sequence of naturals, serialized as a JSON array.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Prefix(pub Vec<u64>);

impl Prefix {
    pub fn new() -> Self {
        Prefix(Vec::new())
    }

    /// `self ⊑ other`.
    pub fn is_prefix_of(&self, other: &Prefix) -> bool {
        other.0.starts_with(&self.0)
    }

    pub fn push(&mut self, symbol: u64) {
        self.0.push(symbol);
    }
}

impl Deref for Prefix {
    type Target = [u64];

    fn deref(&self) -> &[u64] {
        &self.0
    }
}

impl From<Vec<u64>> for Prefix {
    fn from(v: Vec<u64>) -> Self {
        Prefix(v)
    }
}

impl From<&[u64]> for Prefix {
    fn from(v: &[u64]) -> Self {
        Prefix(v.to_vec())
    }
}

impl FromIterator<u64> for Prefix {
    fn from_iter<I: IntoIterator<Item = u64>>(iter: I) -> Self {
        Prefix(iter.into_iter().collect())
    }
}

type Query = Arc<dyn Fn(u64) -> u64 + Send + Sync>;

/// An infinite sequence evaluated on demand. The query must be a pure
/// function of the position.
#[derive(Clone)]
pub struct Stream {
    query: Query,
    budget: Option<u64>,
}

impl fmt::Debug for Stream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shown: Vec<u64> = (0..8).map(|i| (self.query)(i)).collect();
        f.debug_struct("Stream")
            .field("head", &shown)
            .field("budget", &self.budget)
            .finish()
    }
}

impl Stream {
    pub fn from_fn(f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Self {
        Stream {
            query: Arc::new(f),
            budget: None,
        }
    }

    pub fn constant(value: u64) -> Self {
        Stream::from_fn(move |_| value)
    }

    pub fn zeros() -> Self {
        Stream::constant(0)
    }

    /// The given prefix followed by `tail(i)` at every later position `i`.
    pub fn with_prefix(prefix: Vec<u64>, tail: Stream) -> Self {
        Stream::from_fn(move |i| match prefix.get(i as usize) {
            Some(&v) => v,
            None => tail.at(i),
        })
    }

    /// The prefix followed by the repetition of `cycle` (which must be non-empty).
    pub fn eventually_periodic(prefix: Vec<u64>, cycle: Vec<u64>) -> Self {
        assert!(!cycle.is_empty(), "empty cycle");
        let len = prefix.len() as u64;
        Stream::from_fn(move |i| {
            if i < len {
                prefix[i as usize]
            } else {
                cycle[((i - len) % cycle.len() as u64) as usize]
            }
        })
    }

    pub fn with_budget(mut self, budget: u64) -> Self {
        self.budget = Some(budget);
        self
    }

    pub fn budget(&self) -> Option<u64> {
        self.budget
    }

    /// Unbudgeted evaluation.
    pub fn at(&self, position: u64) -> u64 {
        (self.query)(position)
    }

    /// Evaluation respecting the stream's budget, if any.
    pub fn get(&self, position: u64) -> Result<u64> {
        match self.budget {
            Some(b) if position >= b => Err(LabError::exhausted(b, format!("stream queried at {position}"))),
            _ => Ok((self.query)(position)),
        }
    }

    pub fn prefix(&self, len: u64) -> Prefix {
        (0..len).map(|i| self.at(i)).collect()
    }

    pub fn map(&self, f: impl Fn(u64) -> u64 + Send + Sync + 'static) -> Stream {
        let inner = self.clone();
        Stream::from_fn(move |i| f(inner.at(i)))
    }

    /// Position `i` of the `index`-th component of an interleaved stream.
    pub fn project(&self, index: u64) -> Stream {
        let inner = self.clone();
        Stream::from_fn(move |j| inner.at(pair(index, j)))
    }

    /// Prepend a single symbol.
    pub fn cons(head: u64, tail: &Stream) -> Stream {
        let tail = tail.clone();
        Stream::from_fn(move |i| if i == 0 { head } else { tail.at(i - 1) })
    }
}

/// A serializable eventually periodic stream: `prefix` then `cycle` forever
/// (an empty cycle reads as zeros).
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StreamSpec {
    #[serde(default)]
    pub prefix: Vec<u64>,
    #[serde(default)]
    pub cycle: Vec<u64>,
}

impl StreamSpec {
    pub fn constant(value: u64) -> Self {
        StreamSpec {
            prefix: vec![],
            cycle: vec![value],
        }
    }

    pub fn new(prefix: Vec<u64>, cycle: Vec<u64>) -> Self {
        StreamSpec { prefix, cycle }
    }

    pub fn build(&self) -> Stream {
        let cycle = if self.cycle.is_empty() {
            vec![0]
        } else {
            self.cycle.clone()
        };
        Stream::eventually_periodic(self.prefix.clone(), cycle)
    }

    /// The eventual value, if the cycle is constant.
    pub fn limit(&self) -> Option<u64> {
        match self.cycle.as_slice() {
            [] => Some(0),
            [first, rest @ ..] => rest.iter().all(|v| v == first).then_some(*first),
        }
    }
}

/// `result(⟨i,j⟩) = streams(i)(j)` for a countable family given by index.
pub fn interleave_with(family: impl Fn(u64) -> Stream + Send + Sync + 'static) -> Stream {
    Stream::from_fn(move |code| {
        let (i, j) = unpair(code);
        family(i).at(j)
    })
}

/// Interleave a finite family; indices past its end read as the all-zero stream.
pub fn interleave(streams: Vec<Stream>) -> Stream {
    Stream::from_fn(move |code| {
        let (i, j) = unpair(code);
        streams.get(i as usize).map_or(0, |s| s.at(j))
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interleave_examples() {
        let s = interleave(vec![Stream::constant(0), Stream::constant(1)]);
        assert_eq!(s.at(pair(1, 0)), 1);
        let s = interleave(vec![Stream::constant(5)]);
        assert_eq!(s.at(pair(0, 7)), 5);
        let s = interleave_with(|i| Stream::from_fn(move |j| i + j));
        assert_eq!(s.at(pair(2, 3)), 5);
    }

    #[test]
    fn budget_is_enforced() {
        let s = Stream::constant(3).with_budget(4);
        assert_eq!(s.get(3), Ok(3));
        assert!(s.get(4).unwrap_err().is_budget());
    }

    #[test]
    fn periodic_tail() {
        let s = Stream::eventually_periodic(vec![9, 9], vec![0, 1]);
        assert_eq!(s.prefix(6).0, vec![9, 9, 0, 1, 0, 1]);
    }
}
