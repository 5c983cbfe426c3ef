//! Command-line front end for `ibmc-core`: the `check` driver, DIMACS and
//! trace file formats, synthetic benchmark families, an explicit-state
//! reference checker and the benchmark runner.

pub mod bench;
pub mod dimacs;
pub mod driver;
pub mod families;
pub mod memory;
pub mod oracle;
pub mod randprog;
pub mod tracejson;
