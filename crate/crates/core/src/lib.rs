//! Scheduling and simulation toolkit for a crossbar-shared SpMV datapath.
//!
//! A length-`l` datapath has `l` multipliers feeding `l` adders through a
//! crossbar. Rows are processed in windows of `l`; columns share multipliers
//! by lane. Nonzeros are scheduled into timesteps by bipartite edge coloring
//! so that no two products reach the same adder in one cycle.
//!
//! - [`matio`]: matrices, Matrix Market files, generators, reference SpMV
//! - [`scheduler`]: windowing, edge coloring, load balancing, storage format
//! - [`simgust`]: cycle-accurate functional model of the datapath
//! - [`baselines`]: closed-form cycle models of comparison accelerators
//! - [`analysis`]: statistical bounds, bandwidth and energy models
//! - [`cli`]: the `gust` command-line tool

pub mod analysis;
pub mod baselines;
pub mod cli;
pub mod matio;
pub mod scheduler;
pub mod simgust;
