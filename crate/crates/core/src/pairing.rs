//! Cantor pairing and the induced coding of finite sequences.

/// `⟨n,m⟩ = (n+m)(n+m+1)/2 + n`.
pub fn pair(n: u64, m: u64) -> u64 {
    let s = n + m;
    s * (s + 1) / 2 + n
}

pub fn checked_pair(n: u64, m: u64) -> Option<u64> {
    let s = n.checked_add(m)?;
    let tri = if s % 2 == 0 {
        (s / 2).checked_mul(s + 1)?
    } else {
        s.checked_mul(s.div_ceil(2))?
    };
    tri.checked_add(n)
}

pub fn unpair(code: u64) -> (u64, u64) {
    let s = (((8 * code as u128 + 1).isqrt() - 1) / 2) as u64;
    let n = code - s * (s + 1) / 2;
    (n, s - n)
}

/// Bijective code of a finite sequence: `code(ε) = 0`, `code(w a) = ⟨code(w), a⟩ + 1`.
/// Codes grow doubly exponentially in the length; `None` once past `u64`.
pub fn code_seq(seq: &[u64]) -> Option<u64> {
    seq.iter()
        .try_fold(0u64, |acc, &a| checked_pair(acc, a)?.checked_add(1))
}

pub fn decode_seq(mut code: u64) -> Vec<u64> {
    let mut out = Vec::new();
    while code > 0 {
        let (rest, a) = unpair(code - 1);
        out.push(a);
        code = rest;
    }
    out.reverse();
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_codes() {
        assert_eq!(pair(0, 0), 0);
        assert_eq!(pair(1, 0), 2);
        assert_eq!(pair(0, 1), 1);
        assert_eq!(unpair(pair(3, 5)), (3, 5));
    }

    #[test]
    fn sequence_codes_round_trip() {
        for code in 0..2000 {
            assert_eq!(code_seq(&decode_seq(code)), Some(code));
        }
        assert_eq!(decode_seq(code_seq(&[4, 0, 7]).unwrap()), vec![4, 0, 7]);
        assert_eq!(code_seq(&[9; 12]), None);
        assert_eq!(checked_pair(u64::MAX, 1), None);
    }
}
