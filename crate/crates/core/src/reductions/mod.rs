//! Executable witnesses for reductions between problems.

pub mod choice;
pub mod functionals;
pub mod labelling;
pub mod linear;
pub mod pairs;
pub mod phases;
pub mod products;
pub mod trees;
