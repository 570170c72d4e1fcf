//! The witness pairs as uniform runs: generate an instance from a seed, map
//! it forward, solve the target problem, decode the target answers backward
//! and check each decoded answer against the source problem. When the target
//! has finitely many candidate answers, every candidate its verifier accepts
//! is decoded.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;
use serde_json::json;

use super::choice::{acc_limitavoid, acck_backward, acck_forward, rows_from_specs, stabilization_bound, NBotInstance};
use super::functionals::{det_family, det_reconstruct, prefix_max, realizer_compose, QuotientInstance};
use super::labelling::Labelling;
use super::linear::{
    compose_backward, compose_solver, ds_compose_cn, rt_dsfe, rt_dsfe_backward, rt_dsfe_solver, shape_family_transducer,
};
use super::phases::{treeagnostic_convert, verify_agnostic_backward};
use super::trees::{
    bstree_to_pitacc, code_stream, extver_lpo_backward, extver_lpo_query, first_comparable, infinite_width_excluding,
    td_transfer, verify_td_transfer, ExtVerTree,
};
use crate::error::{LabError, Result};
use crate::gen::{self, GenRng};
use crate::orders::{
    comparable, is_prefix, validate_tree_decomposition, word_code, Continuation, Order, ShapeOrder, TreeDesc,
    TreeOracle, Word,
};
use crate::problems::{
    verify_acc, verify_bstree, verify_cn, verify_ds, verify_dsfe, verify_extver, verify_lpo, verify_pitacc,
    verify_rt1k, Domain, FirstOrder, NBot, Verdict, Witness,
};
use crate::stream::{Stream, StreamSpec};
use crate::trace::Trace;
use crate::transducer::Catalogue;

#[derive(Debug, Clone, Copy, Serialize)]
pub struct PairEntry {
    pub name: &'static str,
    pub source: &'static str,
    pub target: &'static str,
}

const fn entry(name: &'static str, source: &'static str, target: &'static str) -> PairEntry {
    PairEntry { name, source, target }
}

pub const PAIRS: &[PairEntry] = &[
    entry("limitavoid-k", "Π⁰₂ choice on k (cofinite)", "PiTACC_k"),
    entry("limitavoid-N", "Π⁰₂ choice on ℕ (cofinite)", "PiTACC_N"),
    entry("acck-embed", "ACC_k", "PiTACC_k+1"),
    entry("nbot-F", "PiTACC_k with a name of ℕ_⊥", "PiTACC_k+1"),
    entry("ds-compose-cn", "DS after C_N", "DS"),
    entry("rt-dsfe", "RT1_2 × DSfe", "DS"),
    entry("sddcc-lambda", "reach an element above a string", "string labelling"),
    entry("det-bits", "Det(prefix max)", "parallel threshold bits"),
    entry("realizer-compose", "a single-valued problem", "its composed realizer"),
    entry(
        "treeagnostic",
        "BStree on ℕ-branching trees",
        "BStree on pruned binary trees",
    ),
    entry("bstree-pitacc", "BStree", "parallel PiTACC_k"),
    entry("pitaccN-extver", "PiTACC_N", "ExtVer"),
    entry("extver-lpo", "ExtVer on sequences with one bad vertex", "LPO"),
    entry("quotient", "parallel quotient f/g", "f"),
    entry("td-transfer", "BS on a decomposed poset", "BStree"),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PairOutcome {
    pub name: String,
    pub seed: u64,
    pub verdict: Verdict,
    /// Target answers decoded and checked.
    pub answers: usize,
}

struct Tally {
    verdict: Verdict,
    answers: usize,
}

impl Tally {
    fn new() -> Self {
        Tally {
            verdict: Verdict::Pass,
            answers: 0,
        }
    }

    fn check(&mut self, v: Verdict) {
        self.answers += 1;
        if !self.verdict.accepts() {
            return;
        }
        if !v.accepts() || self.verdict.is_final() {
            self.verdict = v;
        }
    }

    fn finish(self) -> (Verdict, usize) {
        if self.answers == 0 {
            return (Verdict::fail(Witness::note("the target solver produced no answer")), 0);
        }
        (self.verdict, self.answers)
    }
}

fn both(a: Verdict, b: Verdict) -> Verdict {
    if !a.accepts() || (a.accepts() && !a.is_final() && b.accepts()) {
        a
    } else {
        b
    }
}

fn materialize(s: &Stream, len: u64) -> Stream {
    Stream::with_prefix(s.prefix(len).0, Stream::zeros())
}

fn member(rows: &[StreamSpec], n: u64) -> Verdict {
    match rows.get(n as usize) {
        Some(r) if !r.cycle.iter().any(|&b| b != 0) => Verdict::fail(Witness::Value { value: n }),
        _ => Verdict::Pass,
    }
}

fn limitavoid_k(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let k = rng.gen_range(2..=4u64);
    let bad = rng.gen_bool(0.85).then(|| rng.gen_range(0..k));
    let rows: Vec<StreamSpec> = (0..k).map(|n| gen::pi02_row(rng, Some(n) == bad, 6, 6)).collect();
    let budget = match bad {
        Some(m) => 2 * (stabilization_bound(&rows, m as usize)? + 1) + 16,
        None => 64,
    };
    tr.push(
        "instance",
        json!({ "k": k, "rows": rows, "excluded": bad, "budget": budget }),
    );
    let p = materialize(&acc_limitavoid(Domain::Finite(k), rows_from_specs(&rows)), budget);
    tr.push("forward", p.prefix(budget).0);
    let mut tally = Tally::new();
    for n in (0..k).filter(|&n| verify_pitacc(Domain::Finite(k), &p, n, budget).accepts()) {
        let v = member(&rows, n);
        tr.push("answer", json!({ "target": n, "source": n, "verdict": v }));
        tally.check(v);
    }
    Ok(tally.finish())
}

fn limitavoid_n(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let listed = rng.gen_range(1..=4u64);
    let bad = rng.gen_bool(0.85).then(|| rng.gen_range(0..listed.min(3)));
    let rows: Vec<StreamSpec> = (0..listed).map(|n| gen::pi02_row(rng, Some(n) == bad, 3, 2)).collect();
    let budget = 512;
    tr.push("instance", json!({ "rows": rows, "excluded": bad, "budget": budget }));
    let p = materialize(&acc_limitavoid(Domain::Naturals, rows_from_specs(&rows)), budget);
    tr.push("forward", p.prefix(64).0);
    let mut tally = Tally::new();
    for n in (0..listed + 2).filter(|&n| verify_pitacc(Domain::Naturals, &p, n, budget).accepts()) {
        let v = member(&rows, n);
        tr.push("answer", json!({ "target": n, "source": n, "verdict": v }));
        tally.check(v);
    }
    Ok(tally.finish())
}

fn acck_embed(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let k = rng.gen_range(2..=4u64);
    let inst = gen::acc_instance(rng, Some(k));
    let budget = 64;
    tr.push("instance", json!({ "k": k, "acc": inst }));
    let p = inst.stream.build();
    let r = materialize(&acck_forward(k, &p), budget);
    tr.push("forward", r.prefix(32).0);
    let mut tally = Tally::new();
    for a in (0..=k).filter(|&a| verify_pitacc(Domain::Finite(k + 1), &r, a, budget).accepts()) {
        let back = acck_backward(k, &p, a, budget)?;
        let v = verify_acc(Domain::Finite(k), &p, back, budget)?;
        tr.push("answer", json!({ "target": a, "source": back, "verdict": v }));
        tally.check(v);
    }
    Ok(tally.finish())
}

fn nbot_f(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let k = rng.gen_range(2..=4u64);
    let pit = gen::pitacc_instance(rng, k);
    let n = match pit.limit {
        Some(l) => NBot(Some((l + rng.gen_range(1..k)) % k)),
        None => NBot::BOTTOM,
    };
    let inst = NBotInstance::new(k, pit.stream.clone(), n, rng.gen_range(0..6))?;
    let budget = 64;
    tr.push("instance", &inst);
    let r = materialize(&inst.forward(), budget);
    tr.push("forward", r.prefix(32).0);
    let p = pit.stream.build();
    let mut tally = Tally::new();
    for a in (0..=k).filter(|&a| verify_pitacc(Domain::Finite(k + 1), &r, a, budget).accepts()) {
        let back = inst.backward(a, budget)?;
        let v = verify_pitacc(Domain::Finite(k), &p, back, budget);
        tr.push("answer", json!({ "target": a, "source": back, "verdict": v }));
        tally.check(v);
    }
    Ok(tally.finish())
}

fn ds_compose(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let shapes: Vec<ShapeOrder> = (0..rng.gen_range(1..=3)).map(|_| gen::ill_founded_shape(rng)).collect();
    let excluded = rng.gen_range(0..=3u64);
    let mut prefix = vec![0; 30];
    let mut values: Vec<u64> = (0..excluded).collect();
    values.shuffle(rng);
    for v in values {
        let at = rng.gen_range(0..30);
        if prefix[at] == 0 {
            prefix[at] = v + 1;
        } else {
            prefix.push(v + 1);
        }
    }
    let p = StreamSpec::new(prefix, vec![0]);
    let (stages, len) = (200, 5);
    tr.push("instance", json!({ "shapes": shapes, "cn": p }));
    let w = shape_family_transducer(shapes.clone());
    let p = p.build();
    let order = ds_compose_cn(&w, &p, stages, 8);
    tr.push(
        "forward",
        json!({ "elements": order.len(), "top": order.elements.last() }),
    );
    let seq = compose_solver(&order, excluded, len)?;
    let target = verify_ds(&order, &Stream::with_prefix(seq.clone(), Stream::zeros()), len);
    let (n, xs) = compose_backward(&order, &seq)?;
    let shape = &shapes[(n as usize).min(shapes.len() - 1)];
    let v = both(
        verify_cn(&p, n, stages),
        verify_ds(shape, &Stream::with_prefix(xs.clone(), Stream::zeros()), len),
    );
    tr.push(
        "answer",
        json!({ "target": seq, "target_verdict": target, "source": [json!(n), json!(xs)], "verdict": v }),
    );
    let mut tally = Tally::new();
    tally.check(both(target, v));
    Ok(tally.finish())
}

fn rt_dsfe_pair(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let c = gen::coloring(rng, 2, 0.5);
    let shape = gen::ill_founded_shape(rng);
    let (stages, len) = (300, 6);
    tr.push("instance", json!({ "coloring": c, "shape": shape }));
    let cs = c.build();
    let order = rt_dsfe(&cs, &shape, stages)?;
    tr.push(
        "forward",
        json!({ "elements": order.len(), "bottom": order.elements.iter().filter(|e| e.block == 0).count() }),
    );
    let seq = rt_dsfe_solver(&order, c.limit().is_some(), len)?;
    let target = verify_ds(&order, &Stream::with_prefix(seq.clone(), Stream::zeros()), len);
    let (color, ys) = rt_dsfe_backward(&order, &seq)?;
    let v = both(
        verify_rt1k(&cs, 2, color, &[], 128),
        verify_dsfe(&shape, &Stream::with_prefix(ys.clone(), Stream::zeros()), len),
    );
    tr.push(
        "answer",
        json!({ "target": seq, "color": color, "source": ys, "verdict": v }),
    );
    let mut tally = Tally::new();
    tally.check(both(target, v));
    Ok(tally.finish())
}

fn sddcc_lambda(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let n = rng.gen_range(1..=5usize);
    let poset = gen::poset(rng, n, 0.4);
    let sigma: Word = (0..rng.gen_range(0..8)).map(|_| rng.gen_range(0..2)).collect();
    let lab = Labelling::new(&poset, (0..n as u64).collect());
    let base = lab.label(&sigma);
    tr.push("instance", json!({ "poset": poset, "sigma": sigma, "label": base }));
    let mut tally = Tally::new();
    for i in (0..n).filter(|&i| poset.leq(lab.label(&lab.reset(&sigma)), lab.element(i))) {
        let tau = lab.jump(&sigma, i);
        let got = lab.label(&tau);
        let v = if !is_prefix(&sigma, &tau) {
            Verdict::fail(Witness::note("jump does not extend σ"))
        } else if got != lab.element(i) || !poset.leq(base, got) {
            Verdict::fail(Witness::Value { value: got })
        } else {
            Verdict::Pass
        };
        tr.push(
            "answer",
            json!({ "target": i, "string": tau, "source": got, "verdict": v }),
        );
        tally.check(v);
    }
    Ok(tally.finish())
}

fn det_bits_pair(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let x: Vec<u64> = (0..12).map(|_| rng.gen_range(0..20)).collect();
    tr.push("instance", &x);
    let gx = prefix_max(&x);
    let bits = det_family(&Stream::with_prefix(gx.clone(), Stream::zeros()));
    let decoded = (0..x.len() as u64)
        .map(|n| det_reconstruct(&bits, n, 64))
        .collect::<Result<Vec<u64>>>()?;
    let v = match (0..x.len()).find(|&i| decoded[i] != gx[i]) {
        Some(at) => Verdict::fail(Witness::Position { at: at as u64 }),
        None => Verdict::Pass,
    };
    tr.push("answer", json!({ "source": decoded, "verdict": v }));
    let mut tally = Tally::new();
    tally.check(v);
    Ok(tally.finish())
}

fn realizer_pair(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let x: Vec<u64> = (0..10).map(|_| rng.gen_range(0..30)).collect();
    let forward = if rng.gen_bool(0.5) {
        Catalogue::Identity
    } else {
        Catalogue::Modulo {
            modulus: rng.gen_range(2..7),
        }
    };
    let use_max = rng.gen_bool(0.5);
    tr.push(
        "instance",
        json!({ "x": x, "forward": forward, "solver": if use_max { "prefix-max" } else { "identity" } }),
    );
    let solver = |y: &[u64]| if use_max { prefix_max(y) } else { y.to_vec() };
    let backward = Catalogue::Project { index: 1, arity: 2 };
    let r = realizer_compose(forward.build().as_ref(), backward.build().as_ref(), &solver, &x);
    let f = forward.clone();
    let expected = solver(
        &x.iter()
            .map(|&v| {
                if let Catalogue::Modulo { modulus } = f {
                    v % modulus
                } else {
                    v
                }
            })
            .collect::<Vec<_>>(),
    );
    let v = if r.0 == expected {
        Verdict::Pass
    } else {
        Verdict::fail(Witness::note(format!("{:?} vs {expected:?}", r.0)))
    };
    tr.push("answer", json!({ "source": r.0, "verdict": v }));
    let mut tally = Tally::new();
    tally.check(v);
    Ok(tally.finish())
}

fn treeagnostic(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let t = gen::enumerated_tree(rng);
    let phases = rng.gen_range(3..=6);
    tr.push("instance", json!({ "tree": t, "phases": phases }));
    let run = treeagnostic_convert(&t, phases, 400)?;
    let leaves = run.leaves();
    let pruned = run.tree().iter().all(|v| v.iter().all(|&b| b <= 1));
    let anti = (0..leaves.len()).all(|j| (0..j).all(|i| !comparable(&leaves[i], &leaves[j])));
    let target = if pruned && anti {
        Verdict::Pass
    } else {
        Verdict::fail(Witness::note("leaves of S are not an antichain"))
    };
    let v = verify_agnostic_backward(&t, &run, &leaves);
    let images: Vec<&Word> = leaves.iter().map(|l| &run.label[l]).collect();
    tr.push(
        "forward",
        json!({ "vertices": run.label.len(), "leaves": leaves.len() }),
    );
    tr.push("answer", json!({ "target": leaves, "source": images, "verdict": v }));
    let mut tally = Tally::new();
    tally.check(both(target, v));
    Ok(tally.finish())
}

fn bstree_pitacc(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let tree = gen::tree_desc(rng, Some(true));
    let (k, count) = (rng.gen_range(2..=3usize), 4usize);
    tr.push("instance", json!({ "tree": tree, "k": k }));
    let sel = bstree_to_pitacc(&tree, k, count, 8, 96)?;
    let mut tally = Tally::new();
    for (r, round) in sel.rounds.iter().enumerate() {
        for &a in &round.accepted {
            let mut ex = sel.antichain[..r].to_vec();
            ex.push(round.candidates[a as usize].clone());
            let v = if infinite_width_excluding(&tree, &ex) {
                Verdict::Pass
            } else {
                Verdict::fail(Witness::note(format!("round {r}: {:?} is not extendible", ex.last())))
            };
            tally.check(v);
        }
        tr.push("round", round);
    }
    let v = verify_bstree(&tree, &code_stream(&sel.antichain)?, count as u64);
    tr.push("answer", json!({ "source": sel.antichain, "verdict": v }));
    tally.check(v);
    Ok(tally.finish())
}

fn pitacc_extver(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let pit = gen::bounded_pitacc_instance(rng);
    tr.push("instance", &pit);
    let tree = ExtVerTree::build(&pit.stream, 12);
    let p = pit.stream.build();
    let mut tally = Tally::new();
    for v in tree.vertices.iter().take(40) {
        if !verify_extver(&tree, v)?.accepts() {
            continue;
        }
        let label = tree.label(v).expect("realized vertex");
        let verdict = verify_pitacc(Domain::Naturals, &p, label, 64);
        tr.push("answer", json!({ "target": v, "source": label, "verdict": verdict }));
        tally.check(verdict);
    }
    Ok(tally.finish())
}

fn extver_lpo(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let stem: Word = (0..rng.gen_range(0..3)).map(|_| rng.gen_range(0..2)).collect();
    let tree = TreeDesc::new(
        (0..=stem.len()).map(|i| stem[..i].to_vec()),
        [(stem.clone(), Continuation::Comb)],
    )?;
    let pool = tree.vertices_to_depth(6);
    let mut prefix: Vec<Word> = Vec::new();
    let mut bad = 0;
    for _ in 0..rng.gen_range(1..=5) {
        let v = pool.choose(rng).expect("nonempty").clone();
        let ext = tree.extendible(&v)?;
        if !ext && bad == 1 {
            continue;
        }
        bad += usize::from(!ext);
        prefix.push(v);
    }
    let tail_from = 7;
    let codes = prefix
        .iter()
        .map(|w| word_code(w).expect("short word"))
        .collect::<Vec<_>>();
    let stem2 = stem.clone();
    let teeth = Stream::from_fn(move |n| {
        let mut w = stem2.clone();
        w.extend(std::iter::repeat_n(0, (n + tail_from) as usize));
        w.push(1);
        word_code(&w).expect("short word")
    });
    let vs = Stream::with_prefix(codes, teeth);
    tr.push("instance", json!({ "tree": tree, "prefix": prefix }));
    let budget = 32;
    let query = materialize(&extver_lpo_query(&vs), budget);
    let answer = u64::from(first_comparable(&vs, prefix.len() as u64).is_some() || bad == 1);
    let target = verify_lpo(&query, answer, budget);
    let v = extver_lpo_backward(&vs, answer, budget)?;
    let verdict = verify_extver(&tree, &v)?;
    tr.push("answer", json!({ "target": answer, "source": v, "verdict": verdict }));
    let mut tally = Tally::new();
    tally.check(both(target, verdict));
    Ok(tally.finish())
}

fn quotient(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let k = rng.gen_bool(0.5).then(|| rng.gen_range(2..=4u64));
    let domain = k.map_or(Domain::Naturals, Domain::Finite);
    let inst = QuotientInstance {
        f: FirstOrder::Acc(domain),
        g: FirstOrder::Acc(domain),
        e: Catalogue::Project { index: 1, arity: 2 },
        i: Catalogue::DelayEcho { after: 1 },
        p: gen::coloring(rng, 5, 0.5),
    };
    let corpus: Vec<gen::AccInstance> = (0..3).map(|_| gen::acc_instance(rng, k)).collect();
    tr.push("instance", json!({ "quotient": inst, "corpus": corpus }));
    let streams: Vec<Stream> = corpus.iter().map(|c| c.stream.build()).collect();
    let v = super::functionals::check_quotient_instance(&inst, &streams, k.unwrap_or(10), 48)?;
    tr.push("answer", json!({ "verdict": v }));
    let mut tally = Tally::new();
    tally.check(v);
    Ok(tally.finish())
}

fn td_transfer_pair(rng: &mut GenRng, tr: &mut Trace) -> Result<(Verdict, usize)> {
    let td = gen::tree_decomposition(rng, Some(true));
    tr.push("instance", &td);
    let (realized, seq) = td_transfer(&td, 6)?;
    let valid = match validate_tree_decomposition(&realized) {
        Ok(()) => Verdict::Pass,
        Err(e) => Verdict::fail(Witness::note(format!("{e:?}"))),
    };
    let v = verify_td_transfer(&realized, &seq);
    tr.push("answer", json!({ "source": seq, "verdict": v }));
    let mut tally = Tally::new();
    tally.check(both(valid, v));
    Ok(tally.finish())
}

type PairFn = fn(&mut GenRng, &mut Trace) -> Result<(Verdict, usize)>;

fn pair_fn(name: &str) -> Option<PairFn> {
    Some(match name {
        "limitavoid-k" => limitavoid_k,
        "limitavoid-N" => limitavoid_n,
        "acck-embed" => acck_embed,
        "nbot-F" => nbot_f,
        "ds-compose-cn" => ds_compose,
        "rt-dsfe" => rt_dsfe_pair,
        "sddcc-lambda" => sddcc_lambda,
        "det-bits" => det_bits_pair,
        "realizer-compose" => realizer_pair,
        "treeagnostic" => treeagnostic,
        "bstree-pitacc" => bstree_pitacc,
        "pitaccN-extver" => pitacc_extver,
        "extver-lpo" => extver_lpo,
        "quotient" => quotient,
        "td-transfer" => td_transfer_pair,
        _ => return None,
    })
}

/// Run the named pair on the instance generated from `seed`.
pub fn run_pair(name: &str, seed: u64, trace: &mut Trace) -> Result<PairOutcome> {
    let f = pair_fn(name).ok_or_else(|| LabError::invalid(format!("unknown reduction {name}")))?;
    let mut rng = gen::rng_for(seed, name);
    let (verdict, answers) = f(&mut rng, trace)?;
    let outcome = PairOutcome {
        name: name.to_string(),
        seed,
        verdict,
        answers,
    };
    trace.push("outcome", &outcome);
    Ok(outcome)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_pair_runs_on_a_few_seeds() {
        for e in PAIRS {
            for seed in 0..5 {
                let mut tr = Trace::new();
                let out = run_pair(e.name, seed, &mut tr).unwrap_or_else(|err| panic!("{} seed {seed}: {err}", e.name));
                assert!(
                    out.verdict.accepts(),
                    "{} seed {seed}: {:?}\n{}",
                    e.name,
                    out.verdict,
                    tr.lines().join("\n")
                );
            }
        }
    }

    #[test]
    fn unknown_pair() {
        assert!(run_pair("nope", 0, &mut Trace::new()).is_err());
    }

    #[test]
    fn runs_are_deterministic() {
        let (mut a, mut b) = (Trace::new(), Trace::new());
        run_pair("rt-dsfe", 3, &mut a).unwrap();
        run_pair("rt-dsfe", 3, &mut b).unwrap();
        assert_eq!(a, b);
    }
}
