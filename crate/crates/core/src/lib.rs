//! Predicting the response (accept / reject) to link initiations in a
//! three-layer directed network from node-based and cluster-based
//! meta-path features.
//!
//! The numeric parts are generic over [`Scalar`]; the aliases at the crate
//! root fix them to `f64`, which is what the CLI uses.

pub mod community;
pub mod error;
pub mod eval;
pub mod metapath;
pub mod net;
pub mod predictors;
pub mod scalar;
pub mod synthgen;

pub use error::{Error, Result};
pub use net::{LayerKind, MultilayerNetwork, NodeId, Sign};
pub use scalar::Scalar;

pub type VisitRates64 = community::VisitRates<f64>;
pub type LinearModel64 = predictors::LinearModel<f64>;
pub type MfModel64 = predictors::MfModel<f64>;
pub type Standardizer64 = predictors::Standardizer<f64>;

pub type VisitRates32 = community::VisitRates<f32>;
pub type LinearModel32 = predictors::LinearModel<f32>;
pub type MfModel32 = predictors::MfModel<f32>;
pub type Standardizer32 = predictors::Standardizer<f32>;
