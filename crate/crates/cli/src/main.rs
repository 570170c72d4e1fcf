//! `wlab`: list the catalogue, run targets into JSON-lines traces, generate
//! instance corpora, and re-validate corpora and traces.
//!
//! Exit codes: 0 success, 1 a verifier or validator failed, 2 usage or
//! configuration error, 3 budget exhausted.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use wlab::adversaries::{
    self, defeat_guesser, defeat_linearizer, defeat_sort_rt, BuiltinGuesser, BuiltinLinearizer, DefeatCertificate,
    SortRtScript,
};
use wlab::games::{pigeonhole_label, valid_leaf_labels};
use wlab::gen::{self, PigeonholeInstance};
use wlab::orders::{validate_tree_decomposition, wqo_status, CombPoset, ShapeOrder, TreeDecomposition};
use wlab::problems::PROBLEMS;
use wlab::reductions::pairs::{run_pair, PAIRS};
use wlab::stream::StreamSpec;
use wlab::trace::Trace;
use wlab::LabError;

const GAMES: &[(&str, &str)] = &[(
    "diamond-label",
    "pigeonhole labelling of a well-founded run tree against brute-force runs through valid answers",
)];

const GEN_KINDS: &[&str] = &[
    "shape-order",
    "comb-poset",
    "coloring",
    "acc",
    "pitacc-k",
    "tree-decomposition",
    "pigeonhole",
];

#[derive(Parser)]
#[command(
    name = "wlab",
    version,
    about = "Run reductions, games and adversaries on generated instances"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone, Default)]
struct Common {
    /// Experiment configuration: one JSON object or an array of them.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Per-stage search budget for adversaries.
    #[arg(long, global = true)]
    budget: Option<u64>,
    #[arg(long, global = true)]
    depth: Option<u64>,
    #[arg(long, global = true)]
    stages: Option<u64>,
    /// Machine-readable output.
    #[arg(long, global = true)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Problems, reductions, games and adversaries.
    List,
    /// Run a target and write its trace.
    Run {
        target: Option<String>,
        /// Built-in strategy for adversary targets.
        strategy: Option<String>,
        /// Inline instance JSON: a strategy description for adversaries, a
        /// pigeonhole instance for diamond-label.
        #[arg(long)]
        instance: Option<String>,
        /// Number of consecutive seeds.
        #[arg(long)]
        count: Option<u64>,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate an instance corpus with declared ground truth.
    Gen {
        kind: String,
        #[arg(long, default_value_t = 1)]
        count: u64,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a corpus or a trace file.
    Validate { path: PathBuf },
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Verifier(String),
    Budget(String),
}

impl Failure {
    fn code(&self) -> u8 {
        match self {
            Failure::Verifier(_) => 1,
            Failure::Usage(_) => 2,
            Failure::Budget(_) => 3,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Usage(m) | Failure::Verifier(m) | Failure::Budget(m) => m,
        }
    }
}

impl From<LabError> for Failure {
    fn from(e: LabError) -> Self {
        match e {
            LabError::BudgetExhausted { .. } => Failure::Budget(e.to_string()),
            LabError::Invalid(_) => Failure::Usage(e.to_string()),
            LabError::Contract(_) | LabError::DeadEnd(_) => Failure::Verifier(e.to_string()),
        }
    }
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Usage(format!("{e:#}"))
    }
}

type Outcome<T> = Result<T, Failure>;

fn usage<T>(msg: impl Into<String>) -> Outcome<T> {
    Err(Failure::Usage(msg.into()))
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ExperimentConfig {
    target: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    strategy: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    instance: Option<Value>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    count: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    k: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    budget: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    depth: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    stages: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    output: Option<PathBuf>,
}

fn is_target(name: &str) -> bool {
    PAIRS.iter().any(|p| p.name == name)
        || adversaries::ADVERSARIES.contains(&name)
        || GAMES.iter().any(|g| g.0 == name)
}

impl ExperimentConfig {
    fn check(&self) -> Outcome<()> {
        if !is_target(&self.target) {
            return usage(format!("unknown target {:?}; see `wlab list`", self.target));
        }
        let budgets = [
            ("count", self.count),
            ("k", self.k),
            ("budget", self.budget),
            ("depth", self.depth),
            ("stages", self.stages),
        ];
        if let Some((name, _)) = budgets.iter().find(|(_, v)| *v == Some(0)) {
            return usage(format!("{name} must be positive"));
        }
        Ok(())
    }

    fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    fn output_path(&self) -> PathBuf {
        if let Some(p) = &self.output {
            return p.clone();
        }
        let mut name = self.target.clone();
        if let Some(s) = &self.strategy {
            name.push('-');
            name.push_str(s);
        }
        trace_root().join(format!("{name}-seed{}.jsonl", self.seed()))
    }
}

fn trace_root() -> PathBuf {
    std::env::var_os("WLAB_TRACE_DIR").map_or_else(|| PathBuf::from("traces"), PathBuf::from)
}

/// The result of one run: its trace, a one-line summary, and the failure if any.
struct RunReport {
    trace: Trace,
    summary: Value,
    failure: Option<Failure>,
}

fn run_config(cfg: &ExperimentConfig) -> Outcome<RunReport> {
    cfg.check()?;
    let mut trace = Trace::new();
    trace.push("config", cfg);
    let (summary, failure) = if PAIRS.iter().any(|p| p.name == cfg.target) {
        run_pairs(cfg, &mut trace)?
    } else if cfg.target == "diamond-label" {
        run_diamond(cfg, &mut trace)?
    } else {
        run_adversary(cfg, &mut trace)?
    };
    Ok(RunReport {
        trace,
        summary,
        failure,
    })
}

fn run_pairs(cfg: &ExperimentConfig, trace: &mut Trace) -> Outcome<(Value, Option<Failure>)> {
    if cfg.instance.is_some() {
        return usage(format!("{} runs on generated instances only; use --seed", cfg.target));
    }
    let (mut passed, mut failed) = (0, Vec::new());
    for seed in cfg.seed()..cfg.seed() + cfg.count.unwrap_or(1) {
        let out = run_pair(&cfg.target, seed, trace)?;
        if out.verdict.accepts() {
            passed += 1;
        } else {
            failed.push(json!({ "seed": seed, "verdict": out.verdict.to_string() }));
        }
    }
    let failure = (!failed.is_empty()).then(|| Failure::Verifier(format!("{} source verdicts rejected", failed.len())));
    Ok((
        json!({ "target": cfg.target, "passed": passed, "failed": failed }),
        failure,
    ))
}

fn run_diamond(cfg: &ExperimentConfig, trace: &mut Trace) -> Outcome<(Value, Option<Failure>)> {
    let instances: Vec<PigeonholeInstance> = match &cfg.instance {
        Some(v) => vec![serde_json::from_value(v.clone())
            .map_err(|e| Failure::Usage(format!("malformed pigeonhole instance: {e}")))?],
        None => {
            let (k, depth) = (cfg.k.unwrap_or(2), cfg.depth.unwrap_or(5) as usize);
            (cfg.seed()..cfg.seed() + cfg.count.unwrap_or(1))
                .map(|seed| gen::pigeonhole_instance(&mut gen::rng_for(seed, "diamond-label"), k, depth))
                .collect()
        }
    };
    let mut failed = 0;
    for inst in &instances {
        trace.push("instance", inst);
        let label = pigeonhole_label(&inst.tree, inst.k)?;
        let invalid = |path: &[usize]| inst.invalid.iter().find(|(p, _)| p == path).map(|&(_, i)| i);
        let valid = valid_leaf_labels(&inst.tree, &invalid);
        let ok = valid.contains(&label);
        failed += usize::from(!ok);
        trace.push("label", json!({ "label": label, "valid_labels": valid, "pass": ok }));
    }
    let failure = (failed > 0).then(|| Failure::Verifier(format!("{failed} labels not reachable through valid runs")));
    Ok((
        json!({ "target": cfg.target, "instances": instances.len(), "failed": failed }),
        failure,
    ))
}

fn parse_strategy<T: serde::de::DeserializeOwned>(
    cfg: &ExperimentConfig,
    by_name: impl Fn(&str) -> Option<T>,
    default: &str,
) -> Outcome<T> {
    if let Some(v) = &cfg.instance {
        return serde_json::from_value(v.clone())
            .map_err(|e| Failure::Usage(format!("malformed strategy description: {e}")));
    }
    let name = cfg.strategy.as_deref().unwrap_or(default);
    by_name(name).ok_or_else(|| {
        let known = adversaries::strategies(&cfg.target).unwrap_or_default().join(", ");
        Failure::Usage(format!("unknown strategy {name:?} for {}; known: {known}", cfg.target))
    })
}

fn certificate_lines<S: Serialize>(cert: &DefeatCertificate<S>, trace: &mut Trace) -> (Value, Option<Failure>) {
    for s in &cert.transcript {
        trace.push("stage", s);
    }
    for e in &cert.events {
        trace.push("defeat", e);
    }
    for c in &cert.report.checks {
        trace.push("check", c);
    }
    let summary = json!({
        "target": cert.adversary,
        "strategy": cert.strategy,
        "stages": cert.transcript.len(),
        "events": cert.events.len(),
        "stalls": cert.stalls.len(),
        "valid": cert.report.passed(),
    });
    trace.push("summary", &summary);
    let failure = (!cert.report.passed()).then(|| {
        let names: Vec<&str> = cert.report.failures().map(|c| c.name.as_str()).collect();
        Failure::Verifier(format!("validator failed: {}", names.join("; ")))
    });
    (summary, failure)
}

fn run_adversary(cfg: &ExperimentConfig, trace: &mut Trace) -> Outcome<(Value, Option<Failure>)> {
    Ok(match cfg.target.as_str() {
        "defeat-guesser" => {
            let g = parse_strategy(cfg, BuiltinGuesser::from_name, "root-guesser")?;
            let run = defeat_guesser(
                &g,
                cfg.stages.unwrap_or(50),
                cfg.budget.unwrap_or(adversaries::DEFAULT_PROBE),
            )?;
            certificate_lines(&run.cert, trace)
        }
        "defeat-sort-rt" => {
            let s = parse_strategy(
                cfg,
                |n| SortRtScript::builtin().into_iter().find(|s| s.name == n),
                "eager",
            )?;
            let run = defeat_sort_rt(
                &s,
                cfg.stages.unwrap_or(200),
                cfg.budget.unwrap_or(adversaries::DEFAULT_SEARCH),
            )?;
            certificate_lines(&run.cert, trace)
        }
        "defeat-linearizer" => {
            let l = parse_strategy(cfg, BuiltinLinearizer::from_name, "shortlex")?;
            let run = defeat_linearizer(
                &l,
                cfg.stages.unwrap_or(20),
                cfg.budget.unwrap_or(adversaries::DEFAULT_WAIT),
            )?;
            certificate_lines(&run.cert, trace)
        }
        other => return usage(format!("unknown target {other:?}")),
    })
}

fn load_configs(common: &Common, cli_cfg: ExperimentConfig, has_target: bool) -> Outcome<Vec<ExperimentConfig>> {
    let Some(path) = &common.config else {
        if !has_target {
            return usage("run needs a target or --config");
        }
        return Ok(vec![cli_cfg]);
    };
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let bad = |e: serde_json::Error| Failure::Usage(format!("malformed config {}: {e}", path.display()));
    let mut configs = match serde_json::from_str::<Value>(&text).map_err(bad)? {
        Value::Array(items) => items
            .into_iter()
            .map(serde_json::from_value)
            .collect::<Result<Vec<ExperimentConfig>, _>>(),
        one => serde_json::from_value(one).map(|c| vec![c]),
    }
    .map_err(bad)?;
    // command-line values override the file
    for c in &mut configs {
        if has_target {
            c.target = cli_cfg.target.clone();
        }
        macro_rules! over {
            ($($f:ident),*) => { $( if cli_cfg.$f.is_some() { c.$f = cli_cfg.$f.clone(); } )* };
        }
        over!(strategy, instance, seed, count, k, budget, depth, stages, output);
    }
    Ok(configs)
}

fn cmd_run(common: &Common, cli_cfg: ExperimentConfig, has_target: bool) -> Outcome<()> {
    let configs = load_configs(common, cli_cfg, has_target)?;
    for c in &configs {
        c.check()?;
    }
    let reports: Vec<Outcome<RunReport>> = std::thread::scope(|s| {
        let handles: Vec<_> = configs.iter().map(|c| s.spawn(move || run_config(c))).collect();
        handles
            .into_iter()
            .map(|h| {
                h.join()
                    .unwrap_or_else(|_| Err(Failure::Verifier("run panicked".into())))
            })
            .collect()
    });
    let mut worst: Option<Failure> = None;
    for (cfg, report) in configs.iter().zip(reports) {
        let report = match report {
            Ok(r) => r,
            Err(f) => {
                eprintln!("{}: {}", cfg.target, f.message());
                worst = Some(more_severe(worst, f));
                continue;
            }
        };
        let path = cfg.output_path();
        report
            .trace
            .write_to(&path)
            .with_context(|| format!("writing {}", path.display()))?;
        let status = report
            .failure
            .as_ref()
            .map_or("pass", |f| if f.code() == 3 { "budget" } else { "fail" });
        if common.json {
            println!(
                "{}",
                json!({ "status": status, "trace": path, "lines": report.trace.len(), "summary": report.summary })
            );
        } else {
            println!(
                "{status}: {} -> {} ({} lines)",
                report.summary,
                path.display(),
                report.trace.len()
            );
        }
        if let Some(f) = report.failure {
            eprintln!("{}: {}", cfg.target, f.message());
            worst = Some(more_severe(worst, f));
        }
    }
    worst.map_or(Ok(()), Err)
}

/// Usage errors dominate, then budget exhaustion, then verifier failures.
fn more_severe(a: Option<Failure>, b: Failure) -> Failure {
    let rank = |f: &Failure| match f {
        Failure::Usage(_) => 3,
        Failure::Budget(_) => 2,
        Failure::Verifier(_) => 1,
    };
    match a {
        Some(a) if rank(&a) >= rank(&b) => a,
        _ => b,
    }
}

fn cmd_list(common: &Common) -> Outcome<()> {
    let problems: Vec<Value> = PROBLEMS
        .iter()
        .map(|p| json!({ "name": p.name, "instance": p.instance, "solution": p.solution }))
        .collect();
    let reductions: Vec<Value> = PAIRS
        .iter()
        .map(|p| json!({ "name": p.name, "source": p.source, "target": p.target }))
        .collect();
    let games: Vec<Value> = GAMES
        .iter()
        .map(|(n, d)| json!({ "name": n, "description": d }))
        .collect();
    let advs: Vec<Value> = adversaries::ADVERSARIES
        .iter()
        .map(|a| json!({ "name": a, "strategies": adversaries::strategies(a).unwrap_or_default() }))
        .collect();
    if common.json {
        println!(
            "{}",
            json!({ "problems": problems, "reductions": reductions, "games": games, "adversaries": advs, "generators": GEN_KINDS })
        );
        return Ok(());
    }
    println!("problems:");
    for p in PROBLEMS {
        println!("  {:<10} {} -> {}", p.name, p.instance, p.solution);
    }
    println!("reductions:");
    for p in PAIRS {
        println!("  {:<18} {} reduces to {}", p.name, p.source, p.target);
    }
    println!("games:");
    for (n, d) in GAMES {
        println!("  {n:<18} {d}");
    }
    println!("adversaries:");
    for a in adversaries::ADVERSARIES {
        println!(
            "  {a:<18} strategies: {}",
            adversaries::strategies(a).unwrap_or_default().join(", ")
        );
    }
    println!("generators: {}", GEN_KINDS.join(", "));
    Ok(())
}

/// One generated instance and the ground truth it was built with.
fn generate(kind: &str, rng: &mut gen::GenRng, index: u64, k: Option<u64>, depth: usize) -> Outcome<(Value, Value)> {
    let v = |x: &dyn erased::Ser| x.to_value();
    Ok(match kind {
        "shape-order" => {
            // the first instance of every corpus is ill-founded
            let s = if index == 0 {
                gen::ill_founded_shape(rng)
            } else {
                gen::shape_order(rng)
            };
            (v(&s), json!({ "ill_founded": s.is_ill_founded() }))
        }
        "comb-poset" => {
            let p = gen::comb_poset(rng);
            (v(&p), json!({ "wqo": p.is_wqo() }))
        }
        "coloring" => {
            let c = gen::coloring(rng, k.unwrap_or(2), 0.5);
            (v(&c), coloring_truth(&c))
        }
        "acc" => {
            let a = gen::acc_instance(rng, k);
            (v(&a.stream), json!({ "forbidden": a.forbidden, "k": k }))
        }
        "pitacc-k" => {
            let p = gen::pitacc_instance(rng, k.unwrap_or(3));
            (v(&p.stream), json!({ "limit": p.limit, "k": k.unwrap_or(3) }))
        }
        "tree-decomposition" => {
            let td = gen::tree_decomposition(rng, None);
            let (tree_wqo, poset_wqo) = wqo_status(&td)?;
            (v(&td), json!({ "tree_wqo": tree_wqo, "poset_wqo": poset_wqo }))
        }
        "pigeonhole" => {
            let inst = gen::pigeonhole_instance(rng, k.unwrap_or(2), depth);
            let label = pigeonhole_label(&inst.tree, inst.k)?;
            (v(&inst), json!({ "label": label }))
        }
        other => {
            return usage(format!(
                "unknown generator kind {other:?}; known: {}",
                GEN_KINDS.join(", ")
            ))
        }
    })
}

/// Object-safe serialization to JSON values.
mod erased {
    pub trait Ser {
        fn to_value(&self) -> serde_json::Value;
    }

    impl<T: serde::Serialize> Ser for T {
        fn to_value(&self) -> serde_json::Value {
            serde_json::to_value(self).expect("library types serialize")
        }
    }
}

fn coloring_truth(c: &StreamSpec) -> Value {
    let mut recurring: Vec<u64> = if c.cycle.is_empty() { vec![0] } else { c.cycle.clone() };
    recurring.sort_unstable();
    recurring.dedup();
    json!({ "limit": c.limit(), "recurring": recurring })
}

fn cmd_gen(common: &Common, kind: &str, count: u64, k: Option<u64>, out: Option<PathBuf>) -> Outcome<()> {
    if !GEN_KINDS.contains(&kind) {
        return usage(format!(
            "unknown generator kind {kind:?}; known: {}",
            GEN_KINDS.join(", ")
        ));
    }
    if count == 0 || k == Some(0) {
        return usage("count and k must be positive");
    }
    let seed = common.seed.unwrap_or(0);
    let depth = common.depth.unwrap_or(5) as usize;
    let mut rng = gen::rng_for(seed, kind);
    let mut trace = Trace::new();
    trace.push(
        "corpus",
        json!({ "kind": kind, "seed": seed, "count": count, "k": k, "depth": depth }),
    );
    for index in 0..count {
        let (instance, truth) = generate(kind, &mut rng, index, k, depth)?;
        trace.push(kind, json!({ "index": index, "instance": instance, "truth": truth }));
    }
    let path = out.unwrap_or_else(|| trace_root().join(format!("gen-{kind}-seed{seed}.jsonl")));
    trace
        .write_to(&path)
        .with_context(|| format!("writing {}", path.display()))?;
    if common.json {
        println!("{}", json!({ "kind": kind, "count": count, "corpus": path }));
    } else {
        println!("{count} {kind} instances -> {}", path.display());
    }
    Ok(())
}

/// Re-derive the declared truth of one corpus entry.
fn recheck_entry(kind: &str, instance: &Value, truth: &Value) -> Result<(), String> {
    fn parse<T: serde::de::DeserializeOwned>(v: &Value) -> Result<T, String> {
        serde_json::from_value(v.clone()).map_err(|e| format!("does not load: {e}"))
    }
    let found = match kind {
        "shape-order" => json!({ "ill_founded": parse::<ShapeOrder>(instance)?.is_ill_founded() }),
        "comb-poset" => {
            let p: CombPoset = parse(instance)?;
            p.validate().map_err(|e| e.to_string())?;
            json!({ "wqo": p.is_wqo() })
        }
        "coloring" => coloring_truth(&parse::<StreamSpec>(instance)?),
        "acc" => {
            let s: StreamSpec = parse(instance)?;
            let announced: std::collections::BTreeSet<u64> = s
                .prefix
                .iter()
                .chain(&s.cycle)
                .filter(|&&x| x > 0)
                .map(|x| x - 1)
                .collect();
            if announced.len() > 1 {
                return Err(format!("announces {} forbidden values", announced.len()));
            }
            json!({ "forbidden": announced.first(), "k": truth["k"] })
        }
        "pitacc-k" => json!({ "limit": parse::<StreamSpec>(instance)?.limit(), "k": truth["k"] }),
        "tree-decomposition" => {
            let td: TreeDecomposition = parse(instance)?;
            validate_tree_decomposition(&td).map_err(|v| format!("{v:?}"))?;
            let (tree_wqo, poset_wqo) = wqo_status(&td).map_err(|e| e.to_string())?;
            json!({ "tree_wqo": tree_wqo, "poset_wqo": poset_wqo })
        }
        "pigeonhole" => {
            let inst: PigeonholeInstance = parse(instance)?;
            json!({ "label": pigeonhole_label(&inst.tree, inst.k).map_err(|e| e.to_string())? })
        }
        other => return Err(format!("unknown kind {other}")),
    };
    if &found != truth {
        return Err(format!("declared {truth}, recomputed {found}"));
    }
    Ok(())
}

fn cmd_validate(common: &Common, path: &Path) -> Outcome<()> {
    let trace = Trace::read_from(path).with_context(|| format!("reading {}", path.display()))?;
    let mut events = trace.events();
    let Some((head, data)) = events.next() else {
        return usage(format!("{} is empty or not JSON-lines", path.display()));
    };
    let (checked, problems) = match head.as_str() {
        "corpus" => {
            let mut problems = Vec::new();
            let mut n = 0;
            for (kind, entry) in events {
                n += 1;
                if let Err(e) = recheck_entry(&kind, &entry["instance"], &entry["truth"]) {
                    problems.push(format!("entry {}: {e}", entry["index"]));
                }
            }
            (n, problems)
        }
        "config" => {
            let cfg: ExperimentConfig =
                serde_json::from_value(data).map_err(|e| Failure::Usage(format!("bad config line: {e}")))?;
            let report = run_config(&cfg)?;
            let mut problems = Vec::new();
            if report.trace.lines() != trace.lines() {
                let at = report.trace.lines().iter().zip(trace.lines()).position(|(a, b)| a != b);
                problems.push(format!(
                    "trace differs from a fresh run (first difference at line {at:?})"
                ));
            }
            if let Some(f) = report.failure {
                problems.push(f.message().to_string());
            }
            (trace.len(), problems)
        }
        other => return usage(format!("{}: unrecognized header {other:?}", path.display())),
    };
    if common.json {
        println!(
            "{}",
            json!({ "file": path, "kind": head, "checked": checked, "problems": problems })
        );
    } else if problems.is_empty() {
        println!("ok: {} ({head}, {checked} lines checked)", path.display());
    } else {
        for p in &problems {
            println!("invalid: {p}");
        }
    }
    if problems.is_empty() {
        Ok(())
    } else {
        Err(Failure::Verifier(format!(
            "{} problems in {}",
            problems.len(),
            path.display()
        )))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = cli.common;
    let result = match cli.command {
        Command::List => cmd_list(&common),
        Command::Run {
            target,
            strategy,
            instance,
            count,
            k,
            out,
        } => {
            let instance = match instance.map(|s| serde_json::from_str::<Value>(&s)) {
                Some(Err(e)) => {
                    eprintln!("malformed instance JSON: {e}");
                    return ExitCode::from(2);
                }
                other => other.map(|r| r.expect("checked above")),
            };
            let has_target = target.is_some();
            let cfg = ExperimentConfig {
                target: target.unwrap_or_default(),
                strategy,
                instance,
                seed: common.seed,
                count,
                k,
                budget: common.budget,
                depth: common.depth,
                stages: common.stages,
                output: out,
            };
            cmd_run(&common, cfg, has_target)
        }
        Command::Gen { kind, count, k, out } => cmd_gen(&common, &kind, count, k, out),
        Command::Validate { path } => cmd_validate(&common, &path),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message());
            ExitCode::from(f.code())
        }
    }
}
