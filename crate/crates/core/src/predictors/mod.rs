//! Learned and baseline sign predictors: a cost-sensitive linear SVM over
//! path-count features, a squared-hinge low-rank factorization of the F
//! layer, F-only degree/triad features, and a fair coin.

mod mf;
mod model_file;
mod nbsp;
mod random;
mod standardize;
mod svm;

pub use mf::{mf_objective, train_mf, MfModel, MfParams};
pub use model_file::{FeatureSet, ModelFile, SvmModelFile};
pub use nbsp::{nbsp_column_names, nbsp_features, triad_index, NBSP_WIDTH};
pub use random::RandomPredictor;
pub use standardize::{fit_standardizer, Standardizer};
pub use svm::{svm_objective, train_svm, ClassWeighting, ClassWeights, LinearModel, SvmParams};
