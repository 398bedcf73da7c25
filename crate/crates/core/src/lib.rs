//! Feedback loop discovery for stock-and-flow models.
//!
//! The crate is `no_std` (it needs `alloc`) and contains only pure computation:
//!
//! * [`dsl`] parses the textual model language into a [`dsl::Model`] and derives
//!   the causal [`dsl::Digraph`].
//! * [`sim`] runs fixed-step Euler simulations and records IF branch decisions.
//! * [`scoring`] turns a run into per-timestep link scores and composite weights.
//! * [`discovery`] finds feedback loops, exhaustively (elementary circuits) or
//!   with the strongest-path search executed per timestep.
//! * [`analysis`] scores, normalizes, ranks and compares discovered loops.
//!
//! File formats, the command line and fixtures live in the `feedscope` crate.

#![cfg_attr(not(test), no_std)]

extern crate alloc;

pub mod analysis;
pub mod discovery;
pub mod dsl;
pub mod scoring;
pub mod sim;

pub use analysis::{LoopProfile, Polarity};
pub use discovery::{LoopCatalog, LoopRecord, WeightedDigraph};
pub use dsl::{parse_model, Diagnostic, Digraph, Model};
pub use scoring::LinkScoreSeries;
pub use sim::{simulate, RunResult, RunSpec};
