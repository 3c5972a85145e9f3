//! Memory-augmented instructable household agent.
//!
//! The crate is organised around the agent loop:
//!
//! * [`memory`] stores language-keyed plan examples and prompt templates and
//!   retrieves the nearest ones for a new instruction.
//! * [`prompt`] assembles planner prompts and the two question-asking prompts.
//! * [`planner`] turns an assembled prompt into plan source text.
//! * [`dsl`] parses and statically validates plan programs.
//! * [`executor`] runs a plan against a world, expanding macro actions,
//!   checking preconditions, replanning on failure and asking questions.
//! * [`spatial`] keeps the agent's occupancy map and object memory.
//! * [`simworld`] is a deterministic household simulator with metrics.
//! * [`harness`] runs episode suites, replays logs and compares modes.

pub mod assets;
pub mod catalog;
pub mod domain;
pub mod dsl;
pub mod executor;
pub mod harness;
pub mod memory;
pub mod planner;
pub mod prompt;
pub mod simworld;
pub mod spatial;

pub use catalog::{Affordances, Capability, Catalog};
pub use domain::Domain;
