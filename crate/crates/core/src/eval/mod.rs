//! Cross-validated sign prediction and the descriptive layer analyses.

mod correlation;
mod experiment;
mod histogram;
mod kfold;
mod metrics;

pub use correlation::*;
pub use experiment::*;
pub use histogram::*;
pub use kfold::*;
pub use metrics::*;
