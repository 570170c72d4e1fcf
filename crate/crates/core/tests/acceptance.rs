//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails. Golden traces live in `tests/golden/`; set
//! `WLAB_BLESS=1` to rewrite them.

use std::collections::BTreeSet;
use std::path::PathBuf;
use std::time::{Duration, Instant};

use wlab::adversaries::{
    defeat_guesser, defeat_linearizer, defeat_sort_rt, BuiltinGuesser, BuiltinLinearizer, DefeatCertificate,
    SortRtScript, DEFAULT_PROBE, DEFAULT_SEARCH, DEFAULT_WAIT,
};
use wlab::games::{pigeonhole_label, LabelTree};
use wlab::gen;
use wlab::orders::{
    bad_sequences, is_bad, trianglelefteq, width, wqo_status, Comb, CombElement, CombPoset, FinPoset, Order,
};
use wlab::problems::Domain;
use wlab::reductions::choice::{acc_limitavoid, rows_from_specs, stabilization_bound};
use wlab::reductions::labelling::{strings_to_depth, Labelling};
use wlab::reductions::pairs::{run_pair, PAIRS};
use wlab::reductions::products::{builtin_scripts, check_w, dsproducts_machine, greedy_bad_from_w};
use wlab::stream::StreamSpec;
use wlab::trace::Trace;

type Outcome = Result<String, String>;

fn within(limit: Duration, elapsed: Duration, detail: String) -> Outcome {
    if elapsed <= limit {
        Ok(format!("{detail}; {:.1}s", elapsed.as_secs_f64()))
    } else {
        Err(format!(
            "{detail}; took {:.1}s, limit {}s",
            elapsed.as_secs_f64(),
            limit.as_secs()
        ))
    }
}

fn reduction_contracts() -> Outcome {
    let start = Instant::now();
    let mut trace = Trace::new();
    let mut failures = Vec::new();
    for p in PAIRS {
        let mut passed = 0;
        for seed in 0..100 {
            match run_pair(p.name, seed, &mut trace) {
                Ok(o) if o.verdict.accepts() => passed += 1,
                Ok(o) => failures.push(format!("{} seed {seed}: {}", p.name, o.verdict)),
                Err(e) => failures.push(format!("{} seed {seed}: {e}", p.name)),
            }
        }
        if passed != 100 {
            failures.push(format!("{}: {passed}/100", p.name));
        }
    }
    if !failures.is_empty() {
        return Err(failures.join("; "));
    }
    within(
        Duration::from_secs(60),
        start.elapsed(),
        format!("{} pairs x 100 seeds, 100/100 each", PAIRS.len()),
    )
}

/// All partial orders on `0..n`, as strict relations.
fn partial_orders(n: usize) -> Vec<FinPoset> {
    let cells: Vec<(u64, u64)> = (0..n as u64)
        .flat_map(|a| (0..n as u64).filter(move |&b| b != a).map(move |b| (a, b)))
        .collect();
    let mut out = Vec::new();
    for mask in 0u32..1 << cells.len() {
        let rel: Vec<(u64, u64)> = cells
            .iter()
            .enumerate()
            .filter(|(i, _)| mask >> i & 1 == 1)
            .map(|(_, &c)| c)
            .collect();
        let has = |a, b| rel.contains(&(a, b));
        let antisymmetric = rel.iter().all(|&(a, b)| !has(b, a));
        let transitive = rel.iter().all(|&(a, b)| rel.iter().all(|&(c, d)| c != b || has(a, d)));
        if antisymmetric && transitive {
            out.push(FinPoset::from_pairs(n, &rel).expect("checked partial order"));
        }
    }
    out
}

/// Comb posets with at most 6 declared elements: a core of at most 3, at
/// most two combs (one tooth or infinitely many) and at most one path.
fn small_comb_posets() -> Vec<CombPoset> {
    let mut out = Vec::new();
    for n in 0..=3usize {
        let bases: Vec<Option<usize>> = std::iter::once(None).chain((0..n).map(Some)).collect();
        let combs: Vec<Comb> = bases
            .iter()
            .flat_map(|&b| [Comb::finite(b, 1), Comb::infinite(b)])
            .collect();
        let mut comb_sets: Vec<Vec<Comb>> = vec![vec![]];
        for i in 0..combs.len() {
            comb_sets.push(vec![combs[i]]);
            for j in i..combs.len() {
                comb_sets.push(vec![combs[i], combs[j]]);
            }
        }
        let path_sets: Vec<Vec<Option<usize>>> =
            std::iter::once(vec![]).chain(bases.iter().map(|&b| vec![b])).collect();
        for core in partial_orders(n) {
            for cs in &comb_sets {
                for ps in &path_sets {
                    if n + cs.len() + ps.len() <= 6 {
                        out.push(CombPoset::new(core.clone(), cs.clone(), ps.clone()).expect("valid comb poset"));
                    }
                }
            }
        }
    }
    out
}

/// Extendibility witnessed directly: the sequence stays bad after appending
/// fresh teeth of some infinite comb.
fn fresh_teeth_extension(p: &CombPoset, seq: &[u64]) -> bool {
    let top = seq.iter().filter_map(|&e| match p.decode(e) {
        Some(CombElement::Tooth { index, .. }) => Some(index),
        _ => None,
    });
    let fresh = top.max().map_or(0, |m| m + 1) + 8;
    p.combs
        .iter()
        .enumerate()
        .filter(|(_, c)| c.len.is_none())
        .any(|(k, _)| {
            let mut s = seq.to_vec();
            s.extend((0..6).map(|j| p.tooth(k, fresh + j)));
            is_bad(p, &s)
        })
}

fn extension_lemma() -> Outcome {
    let start = Instant::now();
    let posets = small_comb_posets();
    let (mut pairs, mut sequences) = (0u64, 0u64);
    for p in &posets {
        let elems = p.elements(2, 2);
        let seqs = bad_sequences(p, &elems, 4);
        sequences += seqs.len() as u64;
        let ext: Vec<bool> = seqs.iter().map(|s| p.extendible(s)).collect();
        for (s, &e) in seqs.iter().zip(&ext) {
            if e != fresh_teeth_extension(p, s) {
                return Err(format!(
                    "extendibility of {s:?} disagrees with the direct witness in {p:?}"
                ));
            }
        }
        // every pair (α, β); α ⊴ β only needs some α(i) below all of β, so
        // group by that element instead of scanning all pairs
        let below_all: Vec<Vec<bool>> = seqs
            .iter()
            .map(|b| elems.iter().map(|&a| b.iter().all(|&y| p.leq(a, y))).collect())
            .collect();
        let ext_with: Vec<u64> = elems
            .iter()
            .map(|&a| seqs.iter().zip(&ext).filter(|(s, &e)| e && s.contains(&a)).count() as u64)
            .collect();
        for (bi, beta) in seqs.iter().enumerate() {
            let lower = (0..elems.len()).filter(|&a| below_all[bi][a] && ext_with[a] > 0);
            let mut related = 0;
            for a in lower {
                related += ext_with[a];
                if !ext[bi] {
                    let alpha = seqs
                        .iter()
                        .zip(&ext)
                        .find(|(s, &e)| e && s.contains(&elems[a]))
                        .unwrap()
                        .0;
                    debug_assert!(trianglelefteq(p, alpha, beta));
                    return Err(format!(
                        "{alpha:?} ⊴ {beta:?}, the first extendible and the second not, in {p:?}"
                    ));
                }
            }
            pairs += related;
        }
    }
    // the literal double loop on the smaller half of the family
    for p in posets
        .iter()
        .filter(|p| p.core.len() + p.combs.len() + p.paths.len() <= 3)
    {
        let seqs = bad_sequences(p, &p.elements(2, 2), 4);
        for a in &seqs {
            if !p.extendible(a) {
                continue;
            }
            if let Some(b) = seqs.iter().find(|b| trianglelefteq(p, a, b) && !p.extendible(b)) {
                return Err(format!("{a:?} ⊴ {b:?} breaks the lemma in {p:?}"));
            }
        }
    }
    within(
        Duration::from_secs(10),
        start.elapsed(),
        format!(
            "{} comb posets, {sequences} bad sequences, {pairs} related extendible pairs, 100%",
            posets.len()
        ),
    )
}

fn leaves_of(tree: &BTreeSet<Vec<u64>>) -> usize {
    tree.iter()
        .filter(|v| {
            let c = |b| {
                let mut w = (*v).clone();
                w.push(b);
                tree.contains(&w)
            };
            !c(0) && !c(1)
        })
        .count()
}

fn decomposition_transfer() -> Outcome {
    let mut rng = gen::rng_for(2024, "acceptance-td");
    let mut counts = [0usize; 2];
    for i in 0..50 {
        let td = gen::tree_decomposition(&mut rng, Some(i % 2 == 0));
        let (tree_wqo, poset_wqo) = wqo_status(&td).map_err(|e| e.to_string())?;
        let (small, large) = (
            td.realize(5).map_err(|e| e.to_string())?,
            td.realize(8).map_err(|e| e.to_string())?,
        );
        let tree_grows = leaves_of(&large.tree) > leaves_of(&small.tree);
        let poset_grows = width(&large.poset, large.poset.labels()) > width(&small.poset, small.poset.labels());
        if tree_wqo != poset_wqo || tree_wqo == tree_grows || poset_wqo == poset_grows {
            return Err(format!(
                "instance {i}: status ({tree_wqo}, {poset_wqo}), width growth (tree {tree_grows}, poset {poset_grows})"
            ));
        }
        counts[usize::from(tree_wqo)] += 1;
    }
    Ok(format!(
        "50/50 agree ({} non-wqo, {} wqo), matching realized width growth",
        counts[0], counts[1]
    ))
}

fn limit_avoidance() -> Outcome {
    let mut rng = gen::rng_for(7, "acceptance-acc");
    let mut cases = 0;
    for k in 1..=4u64 {
        for m in 0..k {
            for _ in 0..25 {
                let rows: Vec<StreamSpec> = (0..k).map(|n| gen::pi02_row(&mut rng, n == m, 6, 3)).collect();
                let bound = stabilization_bound(&rows, m as usize).map_err(|e| e.to_string())?;
                let out = acc_limitavoid(Domain::Finite(k), rows_from_specs(&rows));
                if let Some(t) = (bound..bound + 300).find(|&t| out.at(t) != m) {
                    return Err(format!(
                        "k={k}, m={m}, rows {rows:?}: position {t} is {} past bound {bound}",
                        out.at(t)
                    ));
                }
                cases += 1;
            }
        }
    }
    Ok(format!(
        "{cases} instances over k<=4 and every excluded m, all stable from the bound"
    ))
}

/// Root-to-leaf paths with their labels, enumerated explicitly.
fn leaf_paths(t: &LabelTree, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, u64)>) {
    match t {
        LabelTree::Leaf(a) => out.push((path.clone(), *a)),
        LabelTree::Node(cs) => {
            for (i, c) in cs.iter().enumerate() {
                path.push(i);
                leaf_paths(c, path, out);
                path.pop();
            }
        }
    }
}

fn pigeonhole_labelling() -> Outcome {
    let mut rng = gen::rng_for(11, "acceptance-pigeonhole");
    for i in 0..200 {
        let k = 1 + i % 3;
        let inst = gen::pigeonhole_instance(&mut rng, k, 5);
        let label = pigeonhole_label(&inst.tree, k).map_err(|e| format!("instance {i}: {e}"))?;
        let mut paths = Vec::new();
        leaf_paths(&inst.tree, &mut Vec::new(), &mut paths);
        let answers: BTreeSet<u64> = paths
            .iter()
            .filter(|(p, _)| (0..p.len()).all(|d| !inst.invalid.iter().any(|(q, c)| q[..] == p[..d] && *c == p[d])))
            .map(|&(_, a)| a)
            .collect();
        if !answers.contains(&label) {
            return Err(format!(
                "instance {i}: label {label} outside the valid-run answers {answers:?}"
            ));
        }
    }
    Ok("200/200 root labels among brute-force valid-run answers".into())
}

/// The labelling evaluated by recursion on `0^i 1 b` blocks.
fn label_oracle(order: &dyn Order, xs: &[u64], x: u64, sigma: &[u64]) -> u64 {
    let i = sigma.iter().take_while(|&&b| b == 0).count();
    if sigma.len() <= i + 1 {
        return x;
    }
    let xi = xs[i % xs.len()];
    let next = if sigma[i + 1] == 1 && order.leq(x, xi) { xi } else { x };
    label_oracle(order, xs, next, &sigma[i + 2..])
}

fn labelling() -> Outcome {
    let strings = strings_to_depth(10);
    let mut checked = 0u64;
    for n in 1..=5usize {
        for p in partial_orders(n) {
            let ids: Vec<u64> = (0..n as u64).collect();
            let rev: Vec<u64> = ids.iter().rev().copied().collect();
            for xs in [ids, rev] {
                let lab = Labelling::new(&p, xs.clone());
                let labels: std::collections::HashMap<&[u64], u64> =
                    strings.iter().map(|s| (s.as_slice(), lab.label(s))).collect();
                for s in &strings {
                    let l = labels[s.as_slice()];
                    if n <= 3 && l != label_oracle(&p, &xs, xs[0], s) {
                        return Err(format!(
                            "{s:?} labelled {l}, recursion gives {}",
                            label_oracle(&p, &xs, xs[0], s)
                        ));
                    }
                    if let Some((_, parent)) = s.split_last() {
                        if !p.leq(labels[parent], l) {
                            return Err(format!("not monotone at {s:?} in {p:?}"));
                        }
                    }
                    if s.len() <= 4 {
                        for (i, &x) in xs.iter().enumerate() {
                            if p.leq(l, x) {
                                let tau = lab.jump(s, i);
                                if !tau.starts_with(s) || label_oracle(&p, &xs, xs[0], &tau) != x {
                                    return Err(format!("no extension of {s:?} reaching {x} via {tau:?}"));
                                }
                            }
                        }
                    }
                    checked += 1;
                }
            }
        }
    }
    let chain = FinPoset::from_pairs(2, &[(0, 1)]).map_err(|e| e.to_string())?;
    let fixture = Labelling::new(&chain, vec![0, 1]).label(&[0, 1, 1, 0]);
    if fixture != 1 || label_oracle(&chain, &[0, 1], 0, &[0, 1, 1, 0]) != 1 {
        return Err(format!(
            "the two-chain labels 0110 as {fixture}, expected the top element"
        ));
    }
    Ok(format!(
        "{checked} strings of length <=10 monotone and dense; 0110 labelled b on the two-chain"
    ))
}

fn counted<S>(cert: &DefeatCertificate<S>, at_least: usize, elapsed: Duration) -> Result<(), String> {
    if cert.events.len() < at_least || !cert.report.passed() || elapsed > Duration::from_secs(30) {
        return Err(format!(
            "{}: {} events, validators {}, {:.1}s",
            cert.strategy,
            cert.events.len(),
            if cert.report.passed() { "pass" } else { "fail" },
            elapsed.as_secs_f64()
        ));
    }
    Ok(())
}

fn adversaries() -> Outcome {
    let mut summary = Vec::new();
    for g in BuiltinGuesser::all() {
        let start = Instant::now();
        let run = defeat_guesser(&g, 50, DEFAULT_PROBE).map_err(|e| e.to_string())?;
        counted(&run.cert, 5, start.elapsed())?;
        summary.push(format!("{}={}", run.cert.strategy, run.cert.events.len()));
    }
    for s in SortRtScript::builtin() {
        let start = Instant::now();
        let run = defeat_sort_rt(&s, 200, DEFAULT_SEARCH).map_err(|e| e.to_string())?;
        counted(&run.cert, 3, start.elapsed())?;
        summary.push(format!("{}={}", run.cert.strategy, run.cert.events.len()));
    }
    for l in BuiltinLinearizer::all() {
        for n in 1..=20u64 {
            let start = Instant::now();
            let run = defeat_linearizer(&l, n, DEFAULT_WAIT).map_err(|e| e.to_string())?;
            counted(&run.cert, 0, start.elapsed())?;
            if run.leaves.len() as u64 != n + 1 {
                return Err(format!("{}: width {} after {n} stages", l.name(), run.leaves.len()));
            }
        }
        summary.push(format!("{}: width n+1 for n<=20", l.name()));
    }
    Ok(summary.join(", "))
}

fn products() -> Outcome {
    let scripts = builtin_scripts();
    let mut events = 0;
    for script in &scripts {
        let run = dsproducts_machine(script).map_err(|e| e.to_string())?;
        check_w(&run).map_err(|e| format!("{}: {e}", script.name))?;
        let w = run.w();
        events += w.len();
        let p = &run.completion;
        for sigma in &w {
            if fresh_teeth_extension(p, sigma) {
                return Err(format!("{}: {sigma:?} is in W but extends by fresh teeth", script.name));
            }
        }
        for s in bad_sequences(p, &p.elements(run.teeth, 0), 3) {
            if fresh_teeth_extension(p, &s) && w.contains(&s) {
                return Err(format!("{}: extendible {s:?} in W", script.name));
            }
        }
        let w_char = run.w_char();
        let seq = greedy_bad_from_w(p, &w_char, 20, 5000).map_err(|e| format!("{}: {e}", script.name))?;
        let prefixes_clear = (1..=seq.len()).all(|n| !w_char(&seq[..n]));
        if seq.len() != 20 || !is_bad(p, &seq) || !prefixes_clear || !fresh_teeth_extension(p, &seq) {
            return Err(format!(
                "{}: greedy sequence {seq:?} is not a verified bad sequence",
                script.name
            ));
        }
    }
    Ok(format!(
        "{} scripts, {events} W events sound, 20 greedy elements each",
        scripts.len()
    ))
}

fn push_certificate<S: serde::Serialize>(trace: &mut Trace, cert: &DefeatCertificate<S>) {
    for s in &cert.transcript {
        trace.push("stage", s);
    }
    for e in &cert.events {
        trace.push("defeat", e);
    }
    for c in &cert.report.checks {
        trace.push("check", c);
    }
}

/// A fixed-seed sample of every component, as one trace.
fn suite_trace() -> Result<Trace, String> {
    let mut trace = Trace::new();
    for p in PAIRS {
        for seed in 0..5 {
            run_pair(p.name, seed, &mut trace).map_err(|e| e.to_string())?;
        }
    }
    for g in BuiltinGuesser::all() {
        push_certificate(
            &mut trace,
            &defeat_guesser(&g, 12, DEFAULT_PROBE).map_err(|e| e.to_string())?.cert,
        );
    }
    for s in SortRtScript::builtin() {
        push_certificate(
            &mut trace,
            &defeat_sort_rt(&s, 40, DEFAULT_SEARCH).map_err(|e| e.to_string())?.cert,
        );
    }
    for l in BuiltinLinearizer::all() {
        push_certificate(
            &mut trace,
            &defeat_linearizer(&l, 10, DEFAULT_WAIT).map_err(|e| e.to_string())?.cert,
        );
    }
    for script in builtin_scripts() {
        trace.push("w-run", dsproducts_machine(&script).map_err(|e| e.to_string())?);
    }
    let mut rng = gen::rng_for(3, "golden-pigeonhole");
    for _ in 0..10 {
        let inst = gen::pigeonhole_instance(&mut rng, 2, 4);
        let label = pigeonhole_label(&inst.tree, 2).map_err(|e| e.to_string())?;
        trace.push("label", serde_json::json!({ "instance": inst, "label": label }));
    }
    Ok(trace)
}

fn determinism() -> Outcome {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden/suite.jsonl");
    let first = suite_trace()?;
    let second = suite_trace()?;
    if first.lines() != second.lines() {
        return Err("two runs with the same seeds differ".into());
    }
    if std::env::var_os("WLAB_BLESS").is_some() {
        first.write_to(&golden).map_err(|e| e.to_string())?;
    }
    let stored = Trace::read_from(&golden).map_err(|e| format!("{}: {e}; run with WLAB_BLESS=1", golden.display()))?;
    let current = first.lines().join("\n") + "\n";
    let on_disk = std::fs::read_to_string(&golden).map_err(|e| e.to_string())?;
    if current != on_disk {
        let at = first.lines().iter().zip(stored.lines()).position(|(a, b)| a != b);
        return Err(format!(
            "trace differs from the golden file (first differing line {at:?})"
        ));
    }
    Ok(format!(
        "{} lines byte-identical across runs and with the golden trace",
        first.len()
    ))
}

fn main() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 9] = [
        ("reduction contracts", reduction_contracts),
        ("extension lemma for bad sequences", extension_lemma),
        ("tree-decomposition transfer", decomposition_transfer),
        ("limit avoidance", limit_avoidance),
        ("pigeonhole labelling", pigeonhole_labelling),
        ("string labelling", labelling),
        ("adversaries", adversaries),
        ("W enumeration and greedy bad sequences", products),
        ("determinism", determinism),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(check).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}. {name}: {detail} [{secs:.1}s]", i + 1),
            Err(detail) => {
                failed += 1;
                println!("FAIL {}. {name}: {detail} [{secs:.1}s]", i + 1);
            }
        }
    }
    println!(
        "acceptance: {}/{} criteria pass",
        criteria.len() - failed,
        criteria.len()
    );
    if failed > 0 {
        std::process::exit(1);
    }
}
