//! File formats, wall-clock budgets, experiment sweeps and the command line
//! for `typed-exchange-core`.

pub mod budget;
pub mod cli;
pub mod formats;
pub mod sweep;

pub use typed_exchange_core as core;
