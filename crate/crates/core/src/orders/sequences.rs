//! Bad sequences, descending sequences, antichains and the relation ⊴.

use super::presentation::Order;

/// First pair `i < j` with `seq[i] ≤ seq[j]`, or an element outside the support
/// (reported as `(i, i)`).
pub fn bad_violation(order: &dyn Order, seq: &[u64]) -> Option<(usize, usize)> {
    for (j, &b) in seq.iter().enumerate() {
        if !order.in_support(b) {
            return Some((j, j));
        }
        for (i, &a) in seq[..j].iter().enumerate() {
            if order.leq(a, b) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn is_bad(order: &dyn Order, seq: &[u64]) -> bool {
    bad_violation(order, seq).is_none()
}

/// First pair `i < j` with `seq[j] ≮ seq[i]`, or an element outside the support.
pub fn descending_violation(order: &dyn Order, seq: &[u64]) -> Option<(usize, usize)> {
    for (j, &b) in seq.iter().enumerate() {
        if !order.in_support(b) {
            return Some((j, j));
        }
        for (i, &a) in seq[..j].iter().enumerate() {
            if !order.lt(b, a) {
                return Some((i, j));
            }
        }
    }
    None
}

pub fn is_antichain(order: &dyn Order, elems: &[u64]) -> bool {
    elems
        .iter()
        .enumerate()
        .all(|(i, &a)| order.in_support(a) && elems[i + 1..].iter().all(|&b| a != b && !order.comparable(a, b)))
}

/// `α ⊴ β` iff `α = β` or some `α(i)` lies below every `β(j)`.
pub fn trianglelefteq(order: &dyn Order, alpha: &[u64], beta: &[u64]) -> bool {
    alpha == beta || alpha.iter().any(|&a| beta.iter().all(|&b| order.leq(a, b)))
}

/// All bad sequences of length `1..=max_len` over `elems`, in length-then-lexicographic
/// order of positions in `elems`.
pub fn bad_sequences(order: &dyn Order, elems: &[u64], max_len: usize) -> Vec<Vec<u64>> {
    let mut out = Vec::new();
    let mut frontier: Vec<Vec<u64>> = vec![Vec::new()];
    for _ in 0..max_len {
        let mut next = Vec::new();
        for seq in &frontier {
            for &e in elems {
                if order.in_support(e) && seq.iter().all(|&a| !order.leq(a, e)) {
                    let mut s = seq.clone();
                    s.push(e);
                    next.push(s);
                }
            }
        }
        out.extend(next.iter().cloned());
        frontier = next;
    }
    out
}

/// Size of a largest antichain among `elems` (support elements only), by
/// Dilworth's theorem: `n - maximum matching` in the strict comparability graph.
pub fn width(order: &dyn Order, elems: &[u64]) -> usize {
    let elems: Vec<u64> = elems.iter().copied().filter(|&e| order.in_support(e)).collect();
    let n = elems.len();
    let adj: Vec<Vec<usize>> = (0..n)
        .map(|i| (0..n).filter(|&j| i != j && order.lt(elems[i], elems[j])).collect())
        .collect();
    let mut matched_right: Vec<Option<usize>> = vec![None; n];
    fn augment(u: usize, adj: &[Vec<usize>], seen: &mut [bool], matched: &mut [Option<usize>]) -> bool {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                if matched[v].is_none() || augment(matched[v].unwrap(), adj, seen, matched) {
                    matched[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }
    let mut matching = 0;
    for u in 0..n {
        let mut seen = vec![false; n];
        if augment(u, &adj, &mut seen, &mut matched_right) {
            matching += 1;
        }
    }
    n - matching
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::FinPoset;

    #[test]
    fn triangle_examples() {
        let anti = FinPoset::antichain(3);
        assert!(trianglelefteq(&anti, &[0], &[0]));
        assert!(!trianglelefteq(&anti, &[0], &[1]));
        let vee = FinPoset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        assert!(trianglelefteq(&vee, &[0], &[1]));
        assert!(trianglelefteq(&vee, &[0], &[2]));
    }

    #[test]
    fn width_of_small_orders() {
        let vee = FinPoset::from_pairs(3, &[(0, 1), (0, 2)]).unwrap();
        assert_eq!(width(&vee, &[0, 1, 2]), 2);
        let chain = FinPoset::from_pairs(3, &[(0, 1), (1, 2)]).unwrap();
        assert_eq!(width(&chain, &[0, 1, 2]), 1);
        assert_eq!(width(&FinPoset::antichain(4), &[0, 1, 2, 3]), 4);
    }
}
