//! The reduction game `G(f → g)`, run trees of a Player 2 strategy against
//! a (k+2)-valued oracle, and the pigeonhole labelling of well-founded parts.
//!
//! Player 1 opens with a `g`-instance. Each round Player 2 either declares
//! victory with a `g`-answer or asks an `f`-instance, which Player 1 must
//! answer with an `f`-solution.

use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::problems::{FirstOrder, Verdict};
use crate::stream::{Stream, StreamSpec};
use crate::transducer::{run_transducer, Transducer};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Move2 {
    Declare(u64),
    Ask(StreamSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Player {
    One,
    Two,
}

/// Everything Player 2 has seen: the opening instance and the answers so far.
#[derive(Debug, Clone)]
pub struct History<'a> {
    pub instance: &'a Stream,
    pub answers: &'a [u64],
    /// The round in which each answer arrived.
    pub arrived: &'a [u64],
    pub round: u64,
}

pub trait Strategy2 {
    /// `None` while undecided in this round.
    fn respond(&self, history: &History<'_>) -> Option<Move2>;
}

pub trait Strategy1 {
    fn answer(&self, ask: &Stream, round: u64) -> u64;
}

/// A transducer read as a Player 2 strategy. Its input grows by `2x(r)` in
/// round `r` and by `2y + 1` for each answer `y`; the `j`-th nonzero output
/// is move `j`: `2a + 1` declares `a`, `2z + 2` asks the constant stream `z`.
pub struct TransducerStrategy {
    pub transducer: Box<dyn Transducer>,
}

impl TransducerStrategy {
    pub fn new(transducer: Box<dyn Transducer>) -> Self {
        TransducerStrategy { transducer }
    }

    /// The history as the strategy reads it: instance data up to the current
    /// round, each answer right after the round it arrived in. Later rounds
    /// only extend this word.
    fn encode(history: &History<'_>) -> Vec<u64> {
        let mut input = Vec::new();
        for r in 0..=history.round {
            input.push(2 * history.instance.at(r));
            for (y, _) in history.answers.iter().zip(history.arrived).filter(|(_, &a)| a == r) {
                input.push(2 * y + 1);
            }
        }
        input
    }
}

pub fn decode_move(symbol: u64) -> Option<Move2> {
    match symbol {
        0 => None,
        s if s % 2 == 1 => Some(Move2::Declare(s / 2)),
        s => Some(Move2::Ask(StreamSpec::constant(s / 2 - 1))),
    }
}

impl Strategy2 for TransducerStrategy {
    fn respond(&self, history: &History<'_>) -> Option<Move2> {
        let out = run_transducer(self.transducer.as_ref(), &Self::encode(history));
        out.0
            .into_iter()
            .filter(|&s| s != 0)
            .nth(history.answers.len())
            .and_then(decode_move)
    }
}

/// A Player 2 strategy given as a closure.
pub struct FnStrategy<F>(pub F);

impl<F: Fn(&History<'_>) -> Option<Move2>> Strategy2 for FnStrategy<F> {
    fn respond(&self, history: &History<'_>) -> Option<Move2> {
        (self.0)(history)
    }
}

/// Player 1 answering with the least solution its verifier accepts.
pub struct LeastSolution {
    pub problem: FirstOrder,
    pub bound: u64,
    pub budget: u64,
}

impl Strategy1 for LeastSolution {
    fn answer(&self, ask: &Stream, _round: u64) -> u64 {
        (0..self.bound)
            .find(|&a| self.problem.verify(ask, a, self.budget).is_ok_and(|v| v.accepts()))
            .unwrap_or(self.bound)
    }
}

/// Player 1 answering from a fixed script, repeating the last entry.
pub struct ScriptedAnswers(pub Vec<u64>);

impl Strategy1 for ScriptedAnswers {
    fn answer(&self, _ask: &Stream, round: u64) -> u64 {
        self.0.get(round as usize).or(self.0.last()).copied().unwrap_or(0)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "move", rename_all = "kebab-case")]
pub enum GameMove {
    Instance { instance: Vec<u64> },
    Ask { round: u64, instance: StreamSpec },
    Answer { round: u64, value: u64 },
    Declare { round: u64, value: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GameStatus {
    Ongoing,
    P2Victory,
    P1Victory,
    Budget,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GameRun {
    pub moves: Vec<GameMove>,
    pub status: GameStatus,
    /// The player who lost by an illegal move, with the reason.
    pub illegal: Option<(Player, String)>,
}

/// Play up to `max_rounds` rounds. Declarations and answers are checked by
/// the problems' verifiers at `budget`.
pub fn play_game(
    f: &FirstOrder,
    g: &FirstOrder,
    instance: &Stream,
    strat1: &dyn Strategy1,
    strat2: &dyn Strategy2,
    max_rounds: u64,
    budget: u64,
) -> GameRun {
    let mut moves = vec![GameMove::Instance {
        instance: instance.prefix(budget.min(16)).0,
    }];
    let mut answers: Vec<u64> = Vec::new();
    let mut arrived: Vec<u64> = Vec::new();
    let lose = |moves, who: Player, reason: String| GameRun {
        moves,
        status: if who == Player::One {
            GameStatus::P2Victory
        } else {
            GameStatus::P1Victory
        },
        illegal: Some((who, reason)),
    };
    for round in 0..max_rounds {
        let history = History {
            instance,
            answers: &answers,
            arrived: &arrived,
            round,
        };
        match strat2.respond(&history) {
            None => continue,
            Some(Move2::Declare(a)) => {
                moves.push(GameMove::Declare { round, value: a });
                let status = match g.verify(instance, a, budget) {
                    Ok(v) if v.accepts() => GameStatus::P2Victory,
                    _ => GameStatus::P1Victory,
                };
                return GameRun {
                    moves,
                    status,
                    illegal: None,
                };
            }
            Some(Move2::Ask(spec)) => {
                moves.push(GameMove::Ask {
                    round,
                    instance: spec.clone(),
                });
                let ask = spec.build();
                // an ask outside the domain of f is illegal
                if let Err(e) = f.verify(&ask, 0, budget) {
                    return lose(moves, Player::Two, e.to_string());
                }
                let y = strat1.answer(&ask, round);
                moves.push(GameMove::Answer { round, value: y });
                match f.verify(&ask, y, budget) {
                    Ok(v) if v.accepts() => {
                        answers.push(y);
                        arrived.push(round);
                    }
                    Ok(v) => return lose(moves, Player::One, format!("{y} is not a solution: {v:?}")),
                    Err(e) => return lose(moves, Player::One, e.to_string()),
                }
            }
        }
    }
    let status = if max_rounds == 0 {
        GameStatus::Ongoing
    } else {
        GameStatus::Budget
    };
    GameRun {
        moves,
        status,
        illegal: None,
    }
}

/// A node of the run tree: the oracle answers leading to it and what Player 2 does there.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunNode {
    pub history: Vec<u64>,
    #[serde(flatten)]
    pub kind: RunKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "node", rename_all = "kebab-case")]
pub enum RunKind {
    /// Player 2 asked: one child per oracle answer `0..k+2`.
    Ask { children: Vec<RunNode> },
    /// Player 2 declared: `k + 2` leaf children carry the marker `⟨k+2, answer⟩`.
    Declared { answer: u64, markers: Vec<(u64, u64)> },
    /// Undecided within the round budget or below the depth cap.
    Open,
}

impl RunNode {
    pub fn depth(&self) -> usize {
        match &self.kind {
            RunKind::Ask { children } => 1 + children.iter().map(RunNode::depth).max().unwrap_or(0),
            RunKind::Declared { .. } => 1,
            RunKind::Open => 0,
        }
    }

    pub fn open_leaves(&self) -> usize {
        match &self.kind {
            RunKind::Ask { children } => children.iter().map(RunNode::open_leaves).sum(),
            RunKind::Declared { .. } => 0,
            RunKind::Open => 1,
        }
    }
}

/// All runs of `strat2` on `instance` against oracle answers in `0..k+2`.
/// Each node gives Player 2 up to `rounds` rounds to move.
pub fn build_run_tree(strat2: &dyn Strategy2, instance: &Stream, k: u64, depth: usize, rounds: u64) -> RunNode {
    struct Ctx<'a> {
        s: &'a dyn Strategy2,
        x: &'a Stream,
        k: u64,
        depth: usize,
        rounds: u64,
    }
    fn go(c: &Ctx<'_>, history: Vec<u64>, arrived: Vec<u64>, from: u64) -> RunNode {
        let decided = (from..from + c.rounds).find_map(|round| {
            c.s.respond(&History {
                instance: c.x,
                answers: &history,
                arrived: &arrived,
                round,
            })
            .map(|m| (round, m))
        });
        let kind = match decided {
            Some((_, Move2::Declare(a))) => RunKind::Declared {
                answer: a,
                markers: vec![(c.k + 2, a); (c.k + 2) as usize],
            },
            Some((round, Move2::Ask(_))) if history.len() < c.depth => {
                let children = (0..c.k + 2)
                    .map(|y| {
                        let (mut h, mut a) = (history.clone(), arrived.clone());
                        h.push(y);
                        a.push(round);
                        go(c, h, a, round + 1)
                    })
                    .collect();
                RunKind::Ask { children }
            }
            _ => RunKind::Open,
        };
        RunNode { history, kind }
    }
    go(
        &Ctx {
            s: strat2,
            x: instance,
            k,
            depth,
            rounds,
        },
        Vec::new(),
        Vec::new(),
        0,
    )
}

/// A finite tree with labelled leaves.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum LabelTree {
    Leaf(u64),
    Node(Vec<LabelTree>),
}

impl LabelTree {
    pub fn depth(&self) -> usize {
        match self {
            LabelTree::Leaf(_) => 0,
            LabelTree::Node(cs) => 1 + cs.iter().map(LabelTree::depth).max().unwrap_or(0),
        }
    }
}

/// The well-founded part used for labelling: at every ask node the first
/// `k + 1` children whose own parts exist. `None` if some node has fewer.
pub fn extract_wellfounded(node: &RunNode, k: u64) -> Option<LabelTree> {
    match &node.kind {
        RunKind::Declared { answer, .. } => Some(LabelTree::Leaf(*answer)),
        RunKind::Open => None,
        RunKind::Ask { children } => {
            let parts: Vec<LabelTree> = children
                .iter()
                .filter_map(|c| extract_wellfounded(c, k))
                .take((k + 1) as usize)
                .collect();
            (parts.len() == (k + 1) as usize).then_some(LabelTree::Node(parts))
        }
    }
}

/// Leaves keep their label; an inner node takes the least color shared by
/// two of its `k + 1` children.
pub fn pigeonhole_label(tree: &LabelTree, k: u64) -> Result<u64> {
    match tree {
        LabelTree::Leaf(a) if *a < k => Ok(*a),
        LabelTree::Leaf(a) => Err(LabError::contract(format!("leaf label {a} not below {k}"))),
        LabelTree::Node(children) => {
            if children.len() as u64 != k + 1 {
                return Err(LabError::contract(format!(
                    "node with {} children, expected {}",
                    children.len(),
                    k + 1
                )));
            }
            let mut counts = vec![0u32; k as usize];
            for c in children {
                counts[pigeonhole_label(c, k)? as usize] += 1;
            }
            counts
                .iter()
                .position(|&n| n >= 2)
                .map(|i| i as u64)
                .ok_or_else(|| LabError::contract("no color shared by two children"))
        }
    }
}

/// Labels of the leaves reachable from the root without passing through an
/// invalid child; `invalid(path)` names the invalid child of the node at `path`.
pub fn valid_leaf_labels(tree: &LabelTree, invalid: &dyn Fn(&[usize]) -> Option<usize>) -> BTreeSet<u64> {
    fn go(t: &LabelTree, path: &mut Vec<usize>, invalid: &dyn Fn(&[usize]) -> Option<usize>, out: &mut BTreeSet<u64>) {
        match t {
            LabelTree::Leaf(a) => {
                out.insert(*a);
            }
            LabelTree::Node(cs) => {
                let bad = invalid(path);
                for (i, c) in cs.iter().enumerate().filter(|(i, _)| Some(*i) != bad) {
                    path.push(i);
                    go(c, path, invalid, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = BTreeSet::new();
    go(tree, &mut Vec::new(), invalid, &mut out);
    out
}

/// Verdict of a declared answer against `g`, for reporting.
pub fn check_declared(g: &FirstOrder, instance: &Stream, answer: u64, budget: u64) -> Result<Verdict> {
    g.verify(instance, answer, budget)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::Domain;
    use crate::transducer::{Catalogue, FnTransducer};

    fn acc(k: u64) -> FirstOrder {
        FirstOrder::Acc(Domain::Finite(k))
    }

    #[test]
    fn immediate_declaration_wins() {
        let s2 = TransducerStrategy::new(Catalogue::Constant { value: 3 }.build());
        let run = play_game(
            &acc(3),
            &acc(3),
            &Stream::zeros(),
            &ScriptedAnswers(vec![0]),
            &s2,
            5,
            32,
        );
        assert_eq!(run.status, GameStatus::P2Victory);
        assert_eq!(run.moves.last(), Some(&GameMove::Declare { round: 0, value: 1 }));
    }

    #[test]
    fn silent_strategy_exhausts_rounds() {
        let s2 = TransducerStrategy::new(Catalogue::Silent.build());
        let run = play_game(
            &acc(3),
            &acc(3),
            &Stream::zeros(),
            &ScriptedAnswers(vec![0]),
            &s2,
            5,
            32,
        );
        assert_eq!(run.status, GameStatus::Budget);
    }

    #[test]
    fn invalid_solution_loses_for_player_one() {
        // ask the instance forbidding 0 (constant 1), then echo the answer
        let ask_then_echo = FnStrategy(|h: &History<'_>| match h.answers.first() {
            None => Some(Move2::Ask(StreamSpec::constant(1))),
            Some(&y) => Some(Move2::Declare(y)),
        });
        let bad = play_game(
            &acc(3),
            &acc(3),
            &Stream::zeros(),
            &ScriptedAnswers(vec![0]),
            &ask_then_echo,
            5,
            32,
        );
        assert_eq!(bad.status, GameStatus::P2Victory);
        assert_eq!(bad.illegal.as_ref().map(|(p, _)| *p), Some(Player::One));
        let least = LeastSolution {
            problem: acc(3),
            bound: 3,
            budget: 32,
        };
        let good = play_game(&acc(3), &acc(3), &Stream::zeros(), &least, &ask_then_echo, 5, 32);
        assert_eq!((good.status, good.illegal.clone()), (GameStatus::P2Victory, None));
        assert_eq!(
            good,
            play_game(&acc(3), &acc(3), &Stream::zeros(), &least, &ask_then_echo, 5, 32)
        );
    }

    #[test]
    fn transducer_strategy_reads_answers() {
        let ask_then_echo = FnTransducer::new(false, |&asked, s| match (asked, s % 2) {
            (false, _) => (true, vec![4]),
            (true, 1) => (true, vec![s]),
            _ => (true, vec![]),
        });
        let s2 = TransducerStrategy::new(Box::new(ask_then_echo));
        let least = LeastSolution {
            problem: acc(3),
            bound: 3,
            budget: 32,
        };
        let run = play_game(&acc(3), &acc(3), &Stream::zeros(), &least, &s2, 6, 32);
        assert_eq!(run.status, GameStatus::P2Victory);
        assert_eq!(run.moves.last(), Some(&GameMove::Declare { round: 1, value: 1 }));
    }

    #[test]
    fn run_tree_shapes() {
        let k = 2;
        let declare = TransducerStrategy::new(Catalogue::Constant { value: 3 }.build());
        let t = build_run_tree(&declare, &Stream::zeros(), k, 4, 2);
        assert_eq!(t.depth(), 1);
        assert!(
            matches!(&t.kind, RunKind::Declared { answer: 1, markers } if markers.iter().all(|&m| m == (4, 1)) && markers.len() == 4)
        );

        let ask_mod = FnStrategy(move |h: &History<'_>| match h.answers.first() {
            None => Some(Move2::Ask(StreamSpec::constant(0))),
            Some(&y) => Some(Move2::Declare(y % k)),
        });
        let t = build_run_tree(&ask_mod, &Stream::zeros(), k, 4, 2);
        assert_eq!(t.depth(), 2);
        let RunKind::Ask { children } = &t.kind else {
            panic!("root asks")
        };
        for (y, c) in children.iter().enumerate() {
            assert!(matches!(c.kind, RunKind::Declared { answer, .. } if answer == y as u64 % k));
        }
        assert_eq!(pigeonhole_label(&extract_wellfounded(&t, k).unwrap(), k).unwrap(), 0);

        let never = TransducerStrategy::new(Box::new(FnTransducer::new((), |_, _| ((), vec![]))));
        assert_eq!(build_run_tree(&never, &Stream::zeros(), k, 3, 4).open_leaves(), 1);
    }

    #[test]
    fn pigeonhole_examples() {
        use LabelTree::{Leaf, Node};
        assert_eq!(pigeonhole_label(&Leaf(2), 3).unwrap(), 2);
        assert_eq!(pigeonhole_label(&Node(vec![Leaf(0), Leaf(0), Leaf(1)]), 2).unwrap(), 0);
        let ones = Node(vec![Node(vec![Leaf(1); 3]), Leaf(1), Node(vec![Leaf(1); 3])]);
        assert_eq!(pigeonhole_label(&ones, 2).unwrap(), 1);
        assert!(pigeonhole_label(&Node(vec![Leaf(0), Leaf(1)]), 2).is_err());
        assert!(pigeonhole_label(&Leaf(5), 2).is_err());
    }
}
