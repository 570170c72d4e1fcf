use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::stream::Stream;

/// A natural number or ⊥. A name of ⊥ is the all-zero stream; a name of `n`
/// is any stream whose first nonzero entry is `n + 1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct NBot(pub Option<u64>);

impl NBot {
    pub const BOTTOM: NBot = NBot(None);

    /// The name announcing the value after `delay` zeroes.
    pub fn name(&self, delay: u64) -> Stream {
        match self.0 {
            None => Stream::zeros(),
            Some(n) => Stream::from_fn(move |i| if i == delay { n + 1 } else { 0 }),
        }
    }

    /// Read a name up to `budget` positions: `Ok(Some(n))` once decoded,
    /// `Ok(None)` if only zeroes were seen (⊥ so far).
    pub fn decode(name: &Stream, budget: u64) -> Option<u64> {
        (0..budget).map(|i| name.at(i)).find(|&v| v != 0).map(|v| v - 1)
    }

    /// Like [`NBot::decode`] but budget-checked against the stream's own budget.
    pub fn try_decode(name: &Stream, budget: u64) -> Result<Option<u64>> {
        for i in 0..budget {
            let v = name.get(i)?;
            if v != 0 {
                return Ok(Some(v - 1));
            }
        }
        Ok(None)
    }

    pub fn expect_value(name: &Stream, budget: u64) -> Result<u64> {
        NBot::decode(name, budget).ok_or_else(|| LabError::exhausted(budget, "name of ⊥ so far"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decoding_is_stable() {
        let name = NBot(Some(3)).name(4);
        assert_eq!(NBot::decode(&name, 4), None);
        for b in 5..20 {
            assert_eq!(NBot::decode(&name, b), Some(3));
        }
        assert_eq!(NBot::decode(&NBot::BOTTOM.name(0), 100), None);
    }
}
