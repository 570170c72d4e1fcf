//! Threshold bits for single-valued problems, composed realizers, and
//! parallel quotient instances.

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::pairing::{pair, unpair};
use crate::problems::{FirstOrder, Verdict, Witness};
use crate::stream::{Prefix, Stream, StreamSpec};
use crate::transducer::{run_transducer, Catalogue, Transducer};

/// `[g(x)(n) ≥ m]`.
pub fn det_bits(gx: &Stream, n: u64, m: u64) -> u64 {
    u64::from(gx.at(n) >= m)
}

/// All threshold bits of `g(x)`, the query `(n, m)` at position `⟨n, m⟩`.
pub fn det_family(gx: &Stream) -> Stream {
    let gx = gx.clone();
    Stream::from_fn(move |code| {
        let (n, m) = unpair(code);
        det_bits(&gx, n, m)
    })
}

/// `g(x)(n)` as the last threshold `m` answered 1, scanning `m = 1, 2, ...`.
pub fn det_reconstruct(bits: &Stream, n: u64, max_value: u64) -> Result<u64> {
    (1..=max_value + 1)
        .find(|&m| bits.at(pair(n, m)) == 0)
        .map(|m| m - 1)
        .ok_or_else(|| LabError::exhausted(max_value, format!("value at {n} exceeds the threshold bound")))
}

fn alternate(a: &[u64], b: &[u64]) -> Vec<u64> {
    a.iter().zip(b).flat_map(|(&x, &y)| [x, y]).collect()
}

/// `r(x) = Ψ(x, h(Φ(x)))` on a finite prefix of `x`: `Ψ` reads `x` and the
/// solution interleaved, so only as much as both provide is consumed.
pub fn realizer_compose(
    forward: &dyn Transducer,
    backward: &dyn Transducer,
    solver: &dyn Fn(&[u64]) -> Vec<u64>,
    x: &[u64],
) -> Prefix {
    let instance = run_transducer(forward, x);
    let solution = solver(&instance);
    run_transducer(backward, &alternate(x, &solution))
}

/// The running maximum, a single-valued problem used as the solver.
pub fn prefix_max(x: &[u64]) -> Vec<u64> {
    x.iter()
        .scan(0, |m, &v| {
            *m = (*m).max(v);
            Some(*m)
        })
        .collect()
}

/// An instance `(e, i, p)` of the parallel quotient `f/g`: `Φ_e` maps the
/// alternation of `p` with a `g`-instance `q` to an `f`-instance, and `Φ_i`,
/// fed an `f`-answer `r` and then the same alternation, answers `g(q)` with
/// its first output.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct QuotientInstance {
    pub f: FirstOrder,
    pub g: FirstOrder,
    pub e: Catalogue,
    pub i: Catalogue,
    pub p: StreamSpec,
}

impl QuotientInstance {
    fn alternation(&self, q: &Stream, len: u64) -> Vec<u64> {
        let p = self.p.build();
        (0..len).flat_map(|j| [p.at(j), q.at(j)]).collect()
    }

    /// `Φ_e(p, q)` on `len` positions of each input, padded with zeros.
    pub fn f_instance(&self, q: &Stream, len: u64) -> Stream {
        let out = run_transducer(self.e.build().as_ref(), &self.alternation(q, len)).0;
        Stream::with_prefix(out, Stream::zeros())
    }

    /// The first output of `Φ_i(p, q, r)`.
    pub fn g_answer(&self, q: &Stream, r: u64, len: u64) -> Option<u64> {
        let mut input = vec![r];
        input.extend(self.alternation(q, len));
        run_transducer(self.i.build().as_ref(), &input).first().copied()
    }

    /// A solution `⟨q, r⟩`: `r` must solve `f(Φ_e(p, q))`.
    pub fn verify_solution(&self, q: &Stream, r: u64, budget: u64) -> Result<Verdict> {
        self.f.verify(&self.f_instance(q, budget), r, budget)
    }
}

/// Check the quotient condition on a corpus of `g`-instances: for each `q`
/// every `f`-answer below `answers` accepted at `budget` must be turned by
/// `Φ_i` into an accepted `g`-answer.
pub fn check_quotient_instance(
    inst: &QuotientInstance,
    corpus: &[Stream],
    answers: u64,
    budget: u64,
) -> Result<Verdict> {
    let mut verdict = Verdict::Pass;
    for (index, q) in corpus.iter().enumerate() {
        let fi = inst.f_instance(q, budget);
        let accepted = inst
            .f
            .accepted_answers(&fi, answers, budget)
            .map_err(|e| LabError::contract(format!("f-instance for corpus entry {index} leaves the domain: {e}")))?;
        for r in accepted {
            let back = match inst.g_answer(q, r, budget) {
                Some(a) => inst.g.verify(q, a, budget)?,
                None => Verdict::fail_at(budget),
            };
            if !back.accepts() {
                return Ok(Verdict::fail(Witness::note(format!(
                    "Φ_i fails on corpus entry {index} (q) with r = {r}"
                ))));
            }
            if !back.is_final() {
                verdict = Verdict::pass_at(budget);
            }
        }
    }
    Ok(verdict)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::Domain;

    #[test]
    fn threshold_bits() {
        let gx = Stream::with_prefix(vec![5, 0, 2], Stream::zeros());
        assert_eq!(det_bits(&gx, 0, 5), 1);
        assert_eq!(det_bits(&gx, 0, 6), 0);
        let fam = det_family(&gx);
        assert_eq!(det_reconstruct(&fam, 0, 8).unwrap(), 5);
        assert_eq!(det_reconstruct(&fam, 1, 8).unwrap(), 0);
        assert!(det_reconstruct(&Stream::constant(1), 0, 8).unwrap_err().is_budget());
    }

    #[test]
    fn composed_realizers() {
        let id = Catalogue::Identity.build();
        let second = Catalogue::Project { index: 1, arity: 2 }.build();
        let x = [3, 1, 4, 1, 5];
        let r = realizer_compose(id.as_ref(), second.as_ref(), &|y| y.to_vec(), &x);
        assert_eq!(r.0, x.to_vec());
        let r = realizer_compose(id.as_ref(), second.as_ref(), &|y| vec![7; y.len()], &x);
        assert_eq!(r.0, vec![7; 5]);
        let r = realizer_compose(id.as_ref(), second.as_ref(), &prefix_max, &x);
        assert_eq!(r.0, vec![3, 3, 4, 4, 5]);
        let shorter = realizer_compose(id.as_ref(), second.as_ref(), &prefix_max, &x[..3]);
        assert!(shorter.is_prefix_of(&r));
    }

    fn acc_quotient(i: Catalogue) -> QuotientInstance {
        QuotientInstance {
            f: FirstOrder::Acc(Domain::Naturals),
            g: FirstOrder::Acc(Domain::Naturals),
            e: Catalogue::Project { index: 1, arity: 2 },
            i,
            p: StreamSpec::constant(0),
        }
    }

    fn corpus() -> Vec<Stream> {
        vec![Stream::zeros(), Stream::with_prefix(vec![0, 0, 3], Stream::zeros())]
    }

    #[test]
    fn quotient_projection_instance() {
        let inst = acc_quotient(Catalogue::DelayEcho { after: 1 });
        assert!(check_quotient_instance(&inst, &corpus(), 6, 32).unwrap().accepts());
        assert!(inst.verify_solution(&corpus()[1], 0, 32).unwrap().accepts());
        assert!(!inst.verify_solution(&corpus()[1], 2, 32).unwrap().accepts());
    }

    #[test]
    fn broken_backward_functional() {
        let inst = acc_quotient(Catalogue::Constant { value: 2 });
        let v = check_quotient_instance(&inst, &corpus(), 6, 32).unwrap();
        assert!(matches!(v, Verdict::Fail { witness: Witness::Note { ref detail } } if detail.contains("entry 1")));
    }

    #[test]
    fn instance_outside_the_domain() {
        let mut inst = acc_quotient(Catalogue::DelayEcho { after: 1 });
        inst.e = Catalogue::Identity;
        inst.p = StreamSpec::new(vec![4], vec![0]);
        let q = Stream::with_prefix(vec![2], Stream::zeros());
        assert!(check_quotient_instance(&inst, &[q], 6, 32).is_err());
    }
}
