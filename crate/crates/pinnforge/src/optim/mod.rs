//! Full-batch optimizers for the two-phase training schedule.

mod adam;
mod lbfgs;

pub use adam::{Adam, AdamConfig};
pub use lbfgs::{Lbfgs, LbfgsConfig, LbfgsOutcome};
