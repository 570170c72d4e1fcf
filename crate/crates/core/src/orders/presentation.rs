use serde::{Deserialize, Serialize};

use crate::pairing::pair;
use crate::stream::Stream;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OrderKind {
    Quasi,
    Partial,
    Linear,
}

/// A relation on naturals queried pairwise. The support is `{n : leq(n, n)}`.
pub trait Order: Send + Sync {
    fn leq(&self, a: u64, b: u64) -> bool;

    fn in_support(&self, a: u64) -> bool {
        self.leq(a, a)
    }

    fn lt(&self, a: u64, b: u64) -> bool {
        self.leq(a, b) && !self.leq(b, a)
    }

    fn comparable(&self, a: u64, b: u64) -> bool {
        self.leq(a, b) || self.leq(b, a)
    }
}

impl<O: Order + ?Sized> Order for &O {
    fn leq(&self, a: u64, b: u64) -> bool {
        (**self).leq(a, b)
    }
}

impl<O: Order + ?Sized> Order for Box<O> {
    fn leq(&self, a: u64, b: u64) -> bool {
        (**self).leq(a, b)
    }
}

/// An order given by the characteristic function of `{⟨n,m⟩ : n ≤ m}`.
#[derive(Debug, Clone)]
pub struct OrderPresentation {
    pub chi: Stream,
    pub kind: OrderKind,
}

impl OrderPresentation {
    pub fn new(chi: Stream, kind: OrderKind) -> Self {
        OrderPresentation { chi, kind }
    }

    /// Present any order through its characteristic stream.
    pub fn of(order: impl Order + 'static, kind: OrderKind) -> Self {
        let chi = Stream::from_fn(move |code| {
            let (a, b) = crate::pairing::unpair(code);
            order.leq(a, b) as u64
        });
        OrderPresentation { chi, kind }
    }
}

impl Order for OrderPresentation {
    fn leq(&self, a: u64, b: u64) -> bool {
        self.chi.at(pair(a, b)) != 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "kebab-case")]
pub enum LawViolation {
    Reflexivity { a: u64 },
    Transitivity { a: u64, b: u64, c: u64 },
    Antisymmetry { a: u64, b: u64 },
    Totality { a: u64, b: u64 },
}

/// Check the laws of `kind` exhaustively on the probed elements that lie in
/// the support. Reflexivity is checked on every probed support element
/// (elements outside the support must not relate to anything).
pub fn validate_laws(order: &dyn Order, kind: OrderKind, probe: &[u64]) -> Result<(), LawViolation> {
    let support: Vec<u64> = probe.iter().copied().filter(|&a| order.in_support(a)).collect();
    for &a in probe {
        if !order.in_support(a) && support.iter().any(|&b| order.leq(a, b) || order.leq(b, a)) {
            return Err(LawViolation::Reflexivity { a });
        }
    }
    for &a in &support {
        for &b in &support {
            if !order.leq(a, b) {
                if kind == OrderKind::Linear && !order.leq(b, a) {
                    return Err(LawViolation::Totality { a, b });
                }
                continue;
            }
            if a != b && kind != OrderKind::Quasi && order.leq(b, a) {
                return Err(LawViolation::Antisymmetry { a, b });
            }
            for &c in &support {
                if order.leq(b, c) && !order.leq(a, c) {
                    return Err(LawViolation::Transitivity { a, b, c });
                }
            }
        }
    }
    Ok(())
}

/// The restriction of a quasi-order to `S = {a : ∀b < a, ¬(a ⪯ b ∧ b ⪯ a)}`,
/// one representative per equivalence class.
pub struct QuotientRestriction<O> {
    inner: O,
}

impl<O: Order> QuotientRestriction<O> {
    pub fn keeps(&self, a: u64) -> bool {
        self.inner.in_support(a) && (0..a).all(|b| !(self.inner.leq(a, b) && self.inner.leq(b, a)))
    }

    pub fn inner(&self) -> &O {
        &self.inner
    }
}

impl<O: Order> Order for QuotientRestriction<O> {
    fn leq(&self, a: u64, b: u64) -> bool {
        self.inner.leq(a, b) && self.keeps(a) && self.keeps(b)
    }
}

pub fn qo_to_po<O: Order>(quasi: O) -> QuotientRestriction<O> {
    QuotientRestriction { inner: quasi }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::FinPoset;

    #[test]
    fn quotient_examples() {
        let q = FinPoset::quasi_from_pairs(2, &[(0, 1), (1, 0)]);
        let s = qo_to_po(&q);
        assert!(s.keeps(0) && !s.keeps(1));
        let q = FinPoset::quasi_from_pairs(3, &[(0, 2), (2, 0)]);
        let s = qo_to_po(&q);
        assert_eq!((0..3).filter(|&a| s.keeps(a)).collect::<Vec<_>>(), vec![0, 1]);
        assert!(validate_laws(&s, OrderKind::Partial, &[0, 1, 2]).is_ok());
    }

    #[test]
    fn presentation_round_trip() {
        let p = FinPoset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        let pres = OrderPresentation::of(p.clone(), OrderKind::Partial);
        for a in 0..4 {
            for b in 0..4 {
                assert_eq!(pres.leq(a, b), p.leq(a, b));
            }
        }
    }
}
