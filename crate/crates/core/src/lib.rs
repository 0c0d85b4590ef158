//! Job shop scheduling: a shared environment for JSP, FSP, FJSP, FJSP with
//! sequence-dependent setups and FJSP with assembly constraints, instance
//! parsers, dispatching rules, load-balancing heuristics, a genetic algorithm
//! and a discrete-event simulator for online job arrivals.

pub mod cli;
pub mod ga;
pub mod heuristics;
pub mod model;
pub mod parsers;
pub mod sim;

pub use model::{Instance, Schedule, Time, Variant};
