//! Monotone prefix transducers and the dovetailing guesser.
//!
//! A transducer consumes one input symbol per step and appends a finite
//! block of output symbols, so the output on a longer input always extends
//! the output on a shorter one.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::stream::{Prefix, Stream};

/// One running copy of a transducer.
pub trait Run: Send {
    fn feed(&mut self, symbol: u64, out: &mut Vec<u64>);
}

pub trait Transducer: Send + Sync {
    fn start(&self) -> Box<dyn Run>;
}

/// The output of `t` after consuming `input`.
pub fn run_transducer(t: &dyn Transducer, input: &[u64]) -> Prefix {
    let mut run = t.start();
    let mut out = Vec::new();
    for &s in input {
        run.feed(s, &mut out);
    }
    Prefix(out)
}

type StepFn<S> = Arc<dyn Fn(&S, u64) -> (S, Vec<u64>) + Send + Sync>;

/// A transducer given by an initial state and a step map.
pub struct FnTransducer<S> {
    init: S,
    step: StepFn<S>,
}

impl<S: Clone + Send + Sync + 'static> FnTransducer<S> {
    pub fn new(init: S, step: impl Fn(&S, u64) -> (S, Vec<u64>) + Send + Sync + 'static) -> Self {
        FnTransducer {
            init,
            step: Arc::new(step),
        }
    }
}

struct FnRun<S> {
    state: S,
    step: StepFn<S>,
}

impl<S: Send + Sync> Run for FnRun<S> {
    fn feed(&mut self, symbol: u64, out: &mut Vec<u64>) {
        let (next, emitted) = (self.step)(&self.state, symbol);
        self.state = next;
        out.extend(emitted);
    }
}

impl<S: Clone + Send + Sync + 'static> Transducer for FnTransducer<S> {
    fn start(&self) -> Box<dyn Run> {
        Box::new(FnRun {
            state: self.init.clone(),
            step: Arc::clone(&self.step),
        })
    }
}

/// Named transducers that can be selected from configuration files.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "name", content = "params", rename_all = "kebab-case")]
pub enum Catalogue {
    Identity,
    /// Echo the input with a lag: after `n >= after` symbols the output is the
    /// first `n - after + 1` input symbols.
    DelayEcho {
        after: u64,
    },
    /// Emit `value` on the first symbol, then nothing.
    Constant {
        value: u64,
    },
    /// Treat the first symbol as an index `m`; if `m >= threshold`, emit `m`
    /// after `delay` further symbols, otherwise never emit.
    HaltFrom {
        threshold: u64,
        delay: u64,
    },
    /// Never emits.
    Silent,
    /// Emit each symbol reduced modulo `modulus`.
    Modulo {
        modulus: u64,
    },
    /// Emits the symbols at positions `≡ index (mod arity)`.
    Project {
        index: u64,
        arity: u64,
    },
}

impl Catalogue {
    pub fn names() -> &'static [&'static str] {
        &[
            "identity",
            "delay-echo",
            "constant",
            "halt-from",
            "silent",
            "modulo",
            "project",
        ]
    }

    pub fn build(&self) -> Box<dyn Transducer> {
        match *self {
            Catalogue::Identity => Box::new(FnTransducer::new((), |_, s| ((), vec![s]))),
            Catalogue::DelayEcho { after } => Box::new(FnTransducer::new(Vec::<u64>::new(), move |seen, s| {
                let mut seen = seen.clone();
                seen.push(s);
                let n = seen.len() as u64;
                let out = if n >= after.max(1) {
                    vec![seen[(n - after.max(1)) as usize]]
                } else {
                    Vec::new()
                };
                (seen, out)
            })),
            Catalogue::Constant { value } => Box::new(FnTransducer::new(false, move |&done, _| {
                (true, if done { vec![] } else { vec![value] })
            })),
            Catalogue::HaltFrom { threshold, delay } => {
                // state: (index m, symbols seen after m, halted)
                Box::new(FnTransducer::new(
                    (None::<u64>, 0u64, false),
                    move |&(m, seen, halted), s| match m {
                        None => {
                            let ok = s >= threshold && delay == 0;
                            ((Some(s), 0, ok), if ok { vec![s] } else { vec![] })
                        }
                        Some(m) if !halted && m >= threshold && seen + 1 >= delay => {
                            ((Some(m), seen + 1, true), vec![m])
                        }
                        Some(m) => ((Some(m), seen + 1, halted), vec![]),
                    },
                ))
            }
            Catalogue::Silent => Box::new(FnTransducer::new((), |_, _| ((), vec![]))),
            Catalogue::Modulo { modulus } => {
                let modulus = modulus.max(1);
                Box::new(FnTransducer::new((), move |_, s| ((), vec![s % modulus])))
            }
            Catalogue::Project { index, arity } => {
                let arity = arity.max(1);
                Box::new(FnTransducer::new(0u64, move |&pos, s| {
                    (pos + 1, if pos % arity == index { vec![s] } else { vec![] })
                }))
            }
        }
    }
}

/// A value emitted by the dovetailing guesser.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Guess {
    /// The index `m` whose computation halted.
    pub index: u64,
    pub value: u64,
    /// Global step count at which it halted.
    pub step: u64,
}

/// Runs `backward` on `(m, x)` for every `m` in parallel, round-robin with
/// one input symbol per computation per round. Each halting computation
/// (the first emitted symbol) is reported and cancels all smaller indices.
///
/// The input fed to the copy for `m` is `m, x(0), x(1), ...`.
pub fn dovetail_guesser(backward: &dyn Transducer, x: &Stream, budget: u64) -> Result<Vec<Guess>> {
    struct Slot {
        run: Box<dyn Run>,
        fed: u64,
        done: bool,
    }
    let mut slots: Vec<Slot> = Vec::new();
    let mut floor = 0usize;
    let mut guesses = Vec::new();
    let mut steps = 0u64;
    let mut out = Vec::new();
    'rounds: for round in 0.. {
        slots.push(Slot {
            run: backward.start(),
            fed: 0,
            done: false,
        });
        // a halt raises the floor for the next round only
        #[allow(clippy::needless_range_loop, clippy::mut_range_bound)]
        for m in floor..=round {
            if steps >= budget {
                break 'rounds;
            }
            let slot = &mut slots[m];
            if slot.done {
                continue;
            }
            let symbol = if slot.fed == 0 { m as u64 } else { x.at(slot.fed - 1) };
            slot.fed += 1;
            steps += 1;
            out.clear();
            slot.run.feed(symbol, &mut out);
            if let Some(&value) = out.first() {
                slot.done = true;
                guesses.push(Guess {
                    index: m as u64,
                    value,
                    step: steps,
                });
                floor = m + 1;
            }
        }
    }
    if guesses.is_empty() {
        return Err(LabError::exhausted(
            budget,
            "no computation of the backward functional halted",
        ));
    }
    Ok(guesses)
}
