//! Constant-inclusive query-cost accounting for Grover-type quantum subroutines.
//!
//! The crate is organised bottom-up:
//!
//! * [`bounds`] evaluates closed-form expected and worst-case query counts for
//!   bounded-error Grover search with an unknown number of marked items and for
//!   quantum maximum finding.
//! * [`sampling`] turns a single geometric draw into a one-sided (upper)
//!   estimate of those expected costs when the number of marked items is
//!   unknown.
//! * [`emulator`] replays the quantum routines as stochastic query-count
//!   processes, which is the independent check on [`bounds`].
//! * [`maxsat`] and [`hillclimb`] apply the machinery to classical and
//!   emulated-quantum hill climbers for weighted MAX-k-SAT.
//! * [`bench`] is the experiment harness behind the `grover-cost` binary.

pub mod bench;
pub mod bounds;
pub mod emulator;
mod error;
pub mod hillclimb;
pub mod maxsat;
pub mod rng;
pub mod sampling;
pub mod special;

pub use error::{Error, Result};
