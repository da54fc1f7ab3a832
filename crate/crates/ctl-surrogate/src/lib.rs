//! Exact CTL model checking on finite Kripke structures, surrogate
//! classifiers that predict checking verdicts from encoded
//! (structure, formula) pairs, and a benchmark harness comparing the two.

pub mod bench;
pub mod bitset;
pub mod checker;
pub mod ctl;
pub mod features;
pub mod kripke;
pub mod ml;
pub mod naive;
pub mod rng;

pub use bitset::StateSet;
pub use checker::{check, label_states, SatResult};
pub use ctl::CtlFormula;
pub use kripke::KripkeStructure;
