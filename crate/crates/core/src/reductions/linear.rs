//! Linear orders assembled from blocks: the composition of DS with C_ℕ and
//! the product of RT¹₂ with DSfe.

use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::orders::{shape_ds_solver, Order, ShapeCursor, ShapeOrder, Term};
use crate::stream::Stream;
use crate::transducer::{FnTransducer, Transducer};

/// An element `(block, x, tag, stage)`; only `block` and then `x` matter for the order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockElement {
    pub block: u64,
    pub x: u64,
    pub tag: u64,
    pub stage: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BlockShapes {
    /// Block `n` is ordered by `shapes[n]`, the last shape repeating.
    PerBlock(Vec<ShapeOrder>),
    Uniform(ShapeOrder),
}

impl BlockShapes {
    pub fn shape(&self, block: u64) -> &ShapeOrder {
        match self {
            BlockShapes::PerBlock(v) => &v[(block as usize).min(v.len() - 1)],
            BlockShapes::Uniform(s) => s,
        }
    }
}

/// A realized block order; element codes are creation indices.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockOrder {
    pub elements: Vec<BlockElement>,
    pub shapes: BlockShapes,
    #[serde(skip)]
    index: HashMap<(u64, u64), usize>,
}

impl BlockOrder {
    fn new(shapes: BlockShapes) -> Self {
        BlockOrder {
            elements: Vec::new(),
            shapes,
            index: HashMap::new(),
        }
    }

    fn add(&mut self, block: u64, x: u64, tag: u64, stage: u64) {
        self.index.insert((block, x), self.elements.len());
        self.elements.push(BlockElement { block, x, tag, stage });
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn find(&self, block: u64, x: u64) -> Option<u64> {
        match self.index.get(&(block, x)) {
            Some(&i) => Some(i as u64),
            // a deserialized order has no index
            None if self.index.is_empty() => self
                .elements
                .iter()
                .position(|e| (e.block, e.x) == (block, x))
                .map(|i| i as u64),
            None => None,
        }
    }

    pub fn codes(&self) -> Vec<u64> {
        (0..self.len() as u64).collect()
    }

    /// Indices of the first `len` entries of the canonical descending sequence inside `block`.
    fn descending_in(&self, block: u64, len: u64) -> Result<Vec<u64>> {
        let xs = shape_ds_solver(self.shapes.shape(block))?;
        (0..len)
            .map(|i| {
                let x = xs.at(i);
                self.find(block, x).ok_or_else(|| {
                    LabError::exhausted(self.len() as u64, format!("element {x} of block {block} not yet added"))
                })
            })
            .collect()
    }

    /// First coordinate data of the first entry and the projection onto `x`.
    pub fn project(&self, seq: &[u64]) -> Result<(BlockElement, Vec<u64>)> {
        let elems: Vec<BlockElement> = seq
            .iter()
            .map(|&c| {
                self.elements
                    .get(c as usize)
                    .copied()
                    .ok_or_else(|| LabError::invalid(format!("unknown element {c}")))
            })
            .collect::<Result<_>>()?;
        let first = *elems.first().ok_or_else(|| LabError::invalid("empty sequence"))?;
        Ok((first, elems.iter().map(|e| e.x).collect()))
    }
}

impl Order for BlockOrder {
    fn leq(&self, a: u64, b: u64) -> bool {
        let (Some(x), Some(y)) = (self.elements.get(a as usize), self.elements.get(b as usize)) else {
            return false;
        };
        x.block < y.block || (x.block == y.block && self.shapes.shape(x.block).leq(x.x, y.x))
    }

    fn in_support(&self, a: u64) -> bool {
        (a as usize) < self.elements.len()
    }
}

fn term_symbol(t: Term) -> u64 {
    match t {
        Term::Omega => 0,
        Term::OmegaStar => 1,
        Term::Fin(k) => k + 2,
    }
}

fn symbol_term(s: u64) -> Term {
    match s {
        0 => Term::Omega,
        1 => Term::OmegaStar,
        k => Term::Fin(k - 2),
    }
}

/// Fed `n` and then arbitrary symbols, emits the terms of `L_n` one per symbol.
pub fn shape_family_transducer(shapes: Vec<ShapeOrder>) -> FnTransducer<(Option<u64>, usize)> {
    FnTransducer::new((None, 0), move |&(n, done), symbol| match n {
        None => ((Some(symbol), 0), vec![]),
        Some(n) => {
            let shape = &shapes[(n as usize).min(shapes.len() - 1)];
            let out = shape.terms.get(done).map(|&t| vec![term_symbol(t)]).unwrap_or_default();
            ((Some(n), done + 1), out)
        }
    })
}

/// The shape described by `w` on input `n`, reading at most `max_terms` terms.
pub fn decode_shape(w: &dyn Transducer, n: u64, max_terms: usize) -> ShapeOrder {
    let mut run = w.start();
    let mut out = Vec::new();
    run.feed(n, &mut out);
    for _ in 0..max_terms {
        run.feed(0, &mut out);
    }
    ShapeOrder::new(out.into_iter().map(symbol_term).collect())
}

/// Copy `L_n` to the top of the order until `p` enumerates `n`, then move on
/// to `n + 1`. One element per stage, tagged 0.
pub fn ds_compose_cn(w: &dyn Transducer, p: &Stream, stages: u64, max_terms: usize) -> BlockOrder {
    let mut shapes = vec![decode_shape(w, 0, max_terms)];
    let mut out = BlockOrder::new(BlockShapes::PerBlock(Vec::new()));
    let mut excluded = BTreeSet::new();
    let mut n = 0u64;
    let mut cursor = ShapeCursor::default();
    for s in 0..stages {
        if let Some(v) = p.at(s).checked_sub(1) {
            excluded.insert(v);
        }
        while excluded.contains(&n) {
            n += 1;
            shapes.push(decode_shape(w, n, max_terms));
            cursor = ShapeCursor::default();
        }
        if let Some(x) = cursor.next(&shapes[n as usize]) {
            out.add(n, x, 0, s);
        }
    }
    out.shapes = BlockShapes::PerBlock(shapes);
    out
}

/// A descending sequence of `len` elements through the copy of `L_n`.
pub fn compose_solver(order: &BlockOrder, n: u64, len: u64) -> Result<Vec<u64>> {
    order.descending_in(n, len)
}

pub fn compose_backward(order: &BlockOrder, seq: &[u64]) -> Result<(u64, Vec<u64>)> {
    let (first, xs) = order.project(seq)?;
    Ok((first.block, xs))
}

/// The product construction: a fresh top copy of `L` at every color change
/// and a bottom copy (block 0, tag 2) growing at every change from 1 to 0.
pub fn rt_dsfe(c: &Stream, shape: &ShapeOrder, stages: u64) -> Result<BlockOrder> {
    let mut cursor = ShapeCursor::default();
    let mut xs: Vec<u64> = Vec::new();
    let mut x = |i: usize, xs: &mut Vec<u64>| -> Option<u64> {
        while xs.len() <= i {
            xs.push(cursor.next(shape)?);
        }
        Some(xs[i])
    };
    let color = |s: u64| -> Result<u64> {
        match c.at(s) {
            b @ 0..=1 => Ok(b),
            b => Err(LabError::invalid(format!("color {b} at {s} in a 2-coloring"))),
        }
    };
    let mut out = BlockOrder::new(BlockShapes::Uniform(shape.clone()));
    if stages == 0 {
        return Ok(out);
    }
    let first = x(0, &mut xs).ok_or_else(|| LabError::invalid("empty linear order"))?;
    out.add(1, first, color(0)?, 0);
    let (mut bottom, mut top, mut height): (Option<usize>, usize, u64) = (None, 0, 1);
    for s in 0..stages - 1 {
        let (from, to) = (color(s)?, color(s + 1)?);
        if from == to {
            if let Some(v) = x(top + 1, &mut xs) {
                out.add(height, v, to, s + 1);
                top += 1;
            }
            continue;
        }
        out.add(height + 1, first, to, s + 1);
        if to == 0 {
            let next = bottom.map_or(0, |p| p + 1);
            if let Some(v) = x(next, &mut xs) {
                out.add(0, v, 2, s + 1);
                bottom = Some(next);
            }
        }
        top = 0;
        height += 1;
    }
    Ok(out)
}

/// Descend through the top block if the coloring settles, else through the bottom copy.
pub fn rt_dsfe_solver(order: &BlockOrder, settles: bool, len: u64) -> Result<Vec<u64>> {
    let block = if settles {
        order.elements.iter().map(|e| e.block).max().unwrap_or(0)
    } else {
        0
    };
    order.descending_in(block, len)
}

/// The color of the first entry (the bottom copy's tag 2 reads as 0) and the projection to `L`.
pub fn rt_dsfe_backward(order: &BlockOrder, seq: &[u64]) -> Result<(u64, Vec<u64>)> {
    let (first, xs) = order.project(seq)?;
    Ok((if first.tag == 2 { 0 } else { first.tag }, xs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::orders::{validate_laws, OrderKind};
    use crate::problems::{verify_cn, verify_ds, verify_dsfe, verify_rt1k};
    use crate::stream::StreamSpec;

    fn star() -> ShapeOrder {
        ShapeOrder::new(vec![Term::OmegaStar])
    }

    #[test]
    fn family_transducer_round_trips() {
        let shapes = vec![
            star(),
            ShapeOrder::new(vec![Term::Fin(2), Term::Omega, Term::OmegaStar]),
        ];
        let w = shape_family_transducer(shapes.clone());
        assert_eq!(decode_shape(&w, 1, 8), shapes[1]);
        assert_eq!(decode_shape(&w, 7, 8), shapes[1]);
    }

    #[test]
    fn composition_restarts_after_exclusion() {
        let w = shape_family_transducer(vec![ShapeOrder::new(vec![Term::Omega]), star()]);
        let p = StreamSpec::new(vec![0, 0, 0, 0, 0, 1], vec![0]).build();
        let order = ds_compose_cn(&w, &p, 200, 4);
        assert!(order.elements[..5].iter().all(|e| e.block == 0));
        assert!(order.elements[5..].iter().all(|e| e.block == 1));
        assert!(validate_laws(&order, OrderKind::Linear, &order.codes()).is_ok());

        let seq = compose_solver(&order, 1, 12).unwrap();
        let (n, xs) = compose_backward(&order, &seq).unwrap();
        assert_eq!(n, 1);
        let seq_stream = Stream::with_prefix(xs, Stream::zeros());
        assert!(verify_cn(&p, n, 64).accepts());
        assert!(verify_ds(&star(), &seq_stream, 12).accepts());
    }

    #[test]
    fn rt_dsfe_first_stage() {
        let c = Stream::constant(1);
        let order = rt_dsfe(&c, &star(), 1).unwrap();
        assert_eq!(
            order.elements,
            vec![BlockElement {
                block: 1,
                x: 0,
                tag: 1,
                stage: 0
            }]
        );
    }

    #[test]
    fn rt_dsfe_settling_coloring() {
        let c = StreamSpec::new(vec![0, 1, 0], vec![1]).build();
        let order = rt_dsfe(&c, &star(), 300).unwrap();
        assert!(validate_laws(&order, OrderKind::Linear, &order.codes()).is_ok());
        let seq = rt_dsfe_solver(&order, true, 16).unwrap();
        let (color, ys) = rt_dsfe_backward(&order, &seq).unwrap();
        assert_eq!(color, 1);
        assert!(verify_rt1k(&c, 2, color, &[], 64).accepts());
        assert!(verify_dsfe(&star(), &Stream::with_prefix(ys, Stream::zeros()), 16).accepts());
    }

    #[test]
    fn rt_dsfe_alternating_grows_bottom() {
        let c = StreamSpec::new(vec![], vec![0, 1]).build();
        let order = rt_dsfe(&c, &star(), 41).unwrap();
        let bottom = order.elements.iter().filter(|e| e.block == 0).count();
        assert_eq!(bottom, 20);
        let seq = rt_dsfe_solver(&order, false, 4).unwrap();
        let (color, _) = rt_dsfe_backward(&order, &seq).unwrap();
        assert_eq!(color, 0);
    }
}
