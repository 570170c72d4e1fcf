//! Executable constructions around Weihrauch reductions between problems on
//! countable orders: streams and monotone transducers as names and
//! functionals, order presentations, problem verifiers, reduction witnesses,
//! reduction games and diagonalization adversaries.

pub mod adversaries;
pub mod error;
pub mod games;
pub mod gen;
pub mod orders;
pub mod pairing;
pub mod problems;
pub mod reductions;
pub mod stream;
pub mod trace;
pub mod transducer;

pub use error::{LabError, Result};
pub use pairing::{pair, unpair};
pub use stream::{Prefix, Stream, StreamSpec};
pub use transducer::{run_transducer, Transducer};
