//! Incremental bounded model checking and k-induction for a small reactive
//! imperative language.
//!
//! The crate is `no_std` and only needs `alloc`. The pipeline is:
//!
//! * [`frontend`] parses and type-checks `.rsl` source into a
//!   [`frontend::TypedProgram`] and fully unrolls bounded `for` loops;
//! * [`symex`] unwinds one iteration of an unbounded loop at a time into
//!   guarded SSA equations with constant propagation and branch pruning;
//! * [`slicer`] keeps the monotone cone of influence of the property atoms;
//! * [`cnf`] bit-blasts equations into clauses, including approximate
//!   encodings for bitvector refinement and lazy array consistency;
//! * [`sat`] is an incremental CDCL solver with solving under assumptions;
//! * [`engine`] drives incremental and non-incremental BMC, split-case
//!   k-induction, refinement loops and multi-loop schedules.

#![no_std]

extern crate alloc;
#[cfg(any(test, feature = "std"))]
extern crate std;

pub mod bv;
pub mod cnf;
pub mod engine;
pub mod frontend;
pub mod interp;
pub mod sat;
pub mod slicer;
pub mod symex;

pub use engine::{Checker, Hooks, Options, RunStats, Trace, Verdict};
pub use frontend::{compile, TypedProgram};
