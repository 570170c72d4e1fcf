//! Countable orders, trees and tree decompositions.

mod comb;
mod decomposition;
mod poset;
mod presentation;
mod sequences;
mod shape;
mod tree;

pub use comb::{Comb, CombElement, CombPoset};
pub use decomposition::{on_zero_path, validate_tree_decomposition, wqo_status, TdViolation, TreeDecomposition};
pub use poset::FinPoset;
pub use presentation::{
    qo_to_po, validate_laws, LawViolation, Order, OrderKind, OrderPresentation, QuotientRestriction,
};
pub use sequences::{bad_sequences, bad_violation, descending_violation, is_antichain, is_bad, trianglelefteq, width};
pub use shape::{shape_ds_solver, ShapeCursor, ShapeOrder, Term};
pub(crate) use tree::word_map;
pub use tree::{
    comparable, is_prefix, thin_to_antichain, word_code, word_from_code, Continuation, TreeDesc, TreeOracle, Word,
};
