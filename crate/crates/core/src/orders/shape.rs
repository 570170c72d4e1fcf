use serde::{Deserialize, Serialize};

use super::presentation::Order;
use crate::error::{LabError, Result};
use crate::pairing::{pair, unpair};
use crate::stream::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Term {
    Omega,
    OmegaStar,
    Fin(u64),
}

/// An ordered sum of copies of ω, ω* and finite chains. The element at
/// position `j` of term `t` is coded as `⟨t, j⟩`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeOrder {
    pub terms: Vec<Term>,
}

impl ShapeOrder {
    pub fn new(terms: Vec<Term>) -> Self {
        ShapeOrder { terms }
    }

    pub fn is_ill_founded(&self) -> bool {
        self.terms.contains(&Term::OmegaStar)
    }

    pub fn element(&self, term: usize, position: u64) -> u64 {
        pair(term as u64, position)
    }

    fn locate(&self, code: u64) -> Option<(usize, u64, Term)> {
        let (t, j) = unpair(code);
        let term = *self.terms.get(t as usize)?;
        match term {
            Term::Fin(k) if j >= k => None,
            _ => Some((t as usize, j, term)),
        }
    }

    pub fn contains(&self, code: u64) -> bool {
        self.locate(code).is_some()
    }

    /// Number of elements, `None` if infinite.
    pub fn size(&self) -> Option<u64> {
        self.terms
            .iter()
            .map(|t| if let Term::Fin(k) = t { Some(*k) } else { None })
            .sum()
    }

    /// Elements with code below `bound`.
    pub fn elements_below(&self, bound: u64) -> Vec<u64> {
        (0..bound).filter(|&c| self.locate(c).is_some()).collect()
    }
}

impl Order for ShapeOrder {
    fn leq(&self, a: u64, b: u64) -> bool {
        let (Some((ta, ja, term)), Some((tb, jb, _))) = (self.locate(a), self.locate(b)) else {
            return false;
        };
        if ta != tb {
            return ta < tb;
        }
        match term {
            Term::OmegaStar => ja >= jb,
            _ => ja <= jb,
        }
    }
}

/// Walks the elements of a shape in increasing code order.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ShapeCursor {
    next_code: u64,
    produced: u64,
}

impl ShapeCursor {
    pub fn next(&mut self, shape: &ShapeOrder) -> Option<u64> {
        if shape.size().is_some_and(|n| self.produced >= n) {
            return None;
        }
        let code = (self.next_code..).find(|&c| shape.contains(c))?;
        self.next_code = code + 1;
        self.produced += 1;
        Some(code)
    }
}

/// The canonical descending sequence `⟨t,0⟩ > ⟨t,1⟩ > ...` inside the leftmost ω* term.
pub fn shape_ds_solver(shape: &ShapeOrder) -> Result<Stream> {
    let t = shape
        .terms
        .iter()
        .position(|&t| t == Term::OmegaStar)
        .ok_or_else(|| LabError::invalid("shape is well-ordered"))? as u64;
    Ok(Stream::from_fn(move |j| pair(t, j)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::{descending_violation, validate_laws, OrderKind};

    #[test]
    fn solver_descends_inside_second_term() {
        let shape = ShapeOrder::new(vec![Term::Fin(3), Term::OmegaStar]);
        let s = shape_ds_solver(&shape).unwrap();
        let prefix = s.prefix(10);
        assert!(prefix.iter().all(|&c| unpair(c).0 == 1));
        assert_eq!(descending_violation(&shape, &prefix), None);
        assert!(shape_ds_solver(&ShapeOrder::new(vec![Term::Omega])).is_err());
    }

    #[test]
    fn sums_are_linear() {
        let shape = ShapeOrder::new(vec![Term::Omega, Term::Fin(2), Term::OmegaStar]);
        let elems = shape.elements_below(60);
        assert!(validate_laws(&shape, OrderKind::Linear, &elems).is_ok());
    }

    #[test]
    fn cursor_stops_on_finite_shapes() {
        let shape = ShapeOrder::new(vec![Term::Fin(2), Term::Fin(1)]);
        let mut cur = ShapeCursor::default();
        let codes: Vec<u64> = std::iter::from_fn(|| cur.next(&shape)).collect();
        assert_eq!(codes, vec![pair(0, 0), pair(0, 1), pair(1, 0)]);
        assert_eq!(shape.size(), Some(3));
    }

    #[test]
    fn json_terms() {
        let shape: ShapeOrder = serde_json::from_str(r#"{"terms":["omega",{"fin":3},"omega-star"]}"#).unwrap();
        assert_eq!(shape.terms, vec![Term::Omega, Term::Fin(3), Term::OmegaStar]);
    }
}
