//! Command-line front end for `fqhyper-core`.
//!
//! A run is described by a [`RunConfig`], assembled from flags and an
//! optional key-value file, and executed by [`run`]. Output is JSON lines or
//! CSV; the exit status is 0 when every check passes, 1 when a check with
//! satisfied hypotheses fails and 2 for invalid input or exceeded budgets.

pub mod config;
pub mod run;

pub use config::{load, parse_kv, Flags, RunConfig};
pub use run::{run, Outcome, Status};

/// Sizes the global worker pool. Only the first call has an effect.
pub fn init_workers(n: usize) {
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
}
