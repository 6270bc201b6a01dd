use serde::{Deserialize, Serialize};

use super::{nbsp_column_names, nbsp_features, ClassWeights, LinearModel, MfModel, Standardizer, SvmParams};
use crate::community::ClusterIndex;
use crate::error::Result;
use crate::metapath::{column_names, feature_row, FeatureMode, FeatureRow};
use crate::net::{NetworkView, NodeId, Sign};

/// Feature columns an SVM model was trained on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureSet {
    Nb,
    Cb,
    Both,
    Nbsp,
}

impl FeatureSet {
    pub fn metapath_mode(self) -> Option<FeatureMode> {
        match self {
            FeatureSet::Nb => Some(FeatureMode::Nb),
            FeatureSet::Cb => Some(FeatureMode::Cb),
            FeatureSet::Both => Some(FeatureMode::Both),
            FeatureSet::Nbsp => None,
        }
    }

    pub fn parse(s: &str) -> Option<FeatureSet> {
        match s.to_ascii_lowercase().as_str() {
            "nbsp" => Some(FeatureSet::Nbsp),
            other => FeatureMode::parse(other).map(FeatureSet::from),
        }
    }

    pub fn needs_clusters(self) -> bool {
        self.metapath_mode().is_some_and(FeatureMode::needs_clusters)
    }

    pub fn columns(self) -> Vec<String> {
        match self.metapath_mode() {
            Some(mode) => column_names(mode),
            None => nbsp_column_names(),
        }
    }

    /// Feature row of (u, v) with the target edge excluded.
    pub fn row<V: NetworkView + ?Sized>(
        self,
        view: &V,
        clusters: Option<&ClusterIndex>,
        u: NodeId,
        v: NodeId,
        label: Option<Sign>,
    ) -> Result<FeatureRow> {
        match self.metapath_mode() {
            Some(mode) => feature_row(view, clusters, u, v, mode, label),
            None => nbsp_features(view, u, v, label),
        }
    }
}

impl From<FeatureMode> for FeatureSet {
    fn from(m: FeatureMode) -> Self {
        match m {
            FeatureMode::Nb => FeatureSet::Nb,
            FeatureMode::Cb => FeatureSet::Cb,
            FeatureMode::Both => FeatureSet::Both,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SvmModelFile {
    pub features: FeatureSet,
    pub columns: Vec<String>,
    pub weights: Vec<f64>,
    pub bias: f64,
    pub standardizer: Standardizer<f64>,
    pub class_weights: ClassWeights<f64>,
    pub params: SvmParams,
}

impl SvmModelFile {
    pub fn new(
        features: FeatureSet,
        columns: Vec<String>,
        model: LinearModel<f64>,
        standardizer: Standardizer<f64>,
    ) -> Self {
        SvmModelFile {
            features,
            columns,
            weights: model.weights,
            bias: model.bias,
            standardizer,
            class_weights: model.class_weights,
            params: model.params,
        }
    }

    pub fn linear_model(&self) -> LinearModel<f64> {
        LinearModel {
            weights: self.weights.clone(),
            bias: self.bias,
            class_weights: self.class_weights,
            params: self.params.clone(),
        }
    }
}

/// On-disk model, tagged by `"type"`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum ModelFile {
    Svm(SvmModelFile),
    Mf(MfModel<f64>),
}
