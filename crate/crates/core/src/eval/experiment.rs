use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::community::ClusterIndex;
use crate::error::{Error, Result};
use crate::net::{mask_f_edges, MaskedView, MultilayerNetwork, NetworkView, Sign};
use crate::predictors::{
    fit_standardizer, train_mf, train_svm, ClassWeighting, ClassWeights, FeatureSet, LinearModel, MfParams,
    RandomPredictor, SvmParams,
};

use super::{balanced_accuracy, Confusion, FoldPlan, LabeledEdge};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PredictorKind {
    CbMp,
    NbMp,
    NbSp,
    Mf,
    Random,
}

impl PredictorKind {
    pub const ALL: [PredictorKind; 5] =
        [PredictorKind::CbMp, PredictorKind::NbMp, PredictorKind::NbSp, PredictorKind::Mf, PredictorKind::Random];

    /// Command-line token: `cbmp`, `nbmp`, `nbsp`, `mf`, `random`.
    pub fn token(self) -> &'static str {
        match self {
            PredictorKind::CbMp => "cbmp",
            PredictorKind::NbMp => "nbmp",
            PredictorKind::NbSp => "nbsp",
            PredictorKind::Mf => "mf",
            PredictorKind::Random => "random",
        }
    }

    pub fn display_name(self) -> &'static str {
        match self {
            PredictorKind::CbMp => "CB-MP",
            PredictorKind::NbMp => "NB-MP",
            PredictorKind::NbSp => "NB-SP",
            PredictorKind::Mf => "MF",
            PredictorKind::Random => "Random",
        }
    }

    pub fn parse(s: &str) -> Option<PredictorKind> {
        let norm: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        PredictorKind::ALL.into_iter().find(|k| k.token() == norm)
    }

    pub fn needs_clusters(self) -> bool {
        self == PredictorKind::CbMp
    }

    /// Feature columns of the SVM-based predictors.
    pub fn feature_set(self) -> Option<FeatureSet> {
        match self {
            PredictorKind::CbMp => Some(FeatureSet::Cb),
            PredictorKind::NbMp => Some(FeatureSet::Nb),
            PredictorKind::NbSp => Some(FeatureSet::Nbsp),
            PredictorKind::Mf | PredictorKind::Random => None,
        }
    }
}

impl std::fmt::Display for PredictorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.display_name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub svm: SvmParams,
    pub weighting: ClassWeighting,
    pub mf: MfParams,
    /// Base seed for models and the random predictor; fold `i` uses a
    /// seed derived from this and `i`.
    pub model_seed: u64,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            svm: SvmParams::default(),
            weighting: ClassWeighting::Balanced,
            mf: MfParams::default(),
            model_seed: 0,
        }
    }
}

/// SplitMix64 finalizer; spreads `(base, fold)` into independent seeds.
pub fn derive_seed(base: u64, stream: u64) -> u64 {
    let mut z = base ^ stream.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldResult {
    pub fold: usize,
    pub test_size: usize,
    pub confusion: Confusion,
    pub balanced_accuracy: Option<f64>,
    pub warnings: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub predictor: String,
    pub k: usize,
    pub fold_seed: u64,
    pub config: ExperimentConfig,
    pub folds: Vec<FoldResult>,
    /// Mean over folds whose balanced accuracy is defined.
    pub mean_balanced_accuracy: Option<f64>,
    pub warnings: Vec<String>,
}

/// The view every feature of a fold is computed on: `net` with all of the
/// fold's test edges hidden.
pub fn fold_view<'a>(net: &'a MultilayerNetwork, plan: &FoldPlan, fold: usize) -> Result<MaskedView<'a>> {
    mask_f_edges(net, plan.folds[fold].iter().map(|&(u, v, _)| (u, v)))
}

/// Feature values of labeled edges, each with its own edge excluded.
pub fn featurize_edges<V: NetworkView>(
    view: &V,
    clusters: Option<&ClusterIndex>,
    features: FeatureSet,
    edges: &[LabeledEdge],
) -> Result<Vec<Vec<f64>>> {
    edges.iter().map(|&(u, v, s)| Ok(features.row(view, clusters, u, v, Some(s))?.values())).collect()
}

/// A model that always answers `sign`, for single-class training folds.
fn constant_model(width: usize, sign: Sign, params: &SvmParams) -> LinearModel<f64> {
    LinearModel {
        weights: vec![0.0; width],
        bias: sign.value() as f64,
        class_weights: ClassWeights { positive: 1.0, negative: 1.0 },
        params: params.clone(),
    }
}

fn run_fold(
    net: &MultilayerNetwork,
    clusters: Option<&ClusterIndex>,
    kind: PredictorKind,
    plan: &FoldPlan,
    fold: usize,
    cfg: &ExperimentConfig,
) -> Result<FoldResult> {
    let test = &plan.folds[fold];
    let train = plan.training(fold);
    let seed = derive_seed(cfg.model_seed, fold as u64);
    let mut warnings = Vec::new();

    let predictions: Vec<Sign> = match kind {
        PredictorKind::Random => {
            let mut r = RandomPredictor::new(seed);
            test.iter().map(|_| r.next_sign()).collect()
        }
        PredictorKind::Mf => {
            let params = MfParams { seed, ..cfg.mf.clone() };
            let model = train_mf::<f64>(&train, net.node_count(), &params)?;
            test.iter().map(|&(u, v, _)| model.predict(u, v)).collect::<Result<_>>()?
        }
        _ => {
            let features = kind.feature_set().expect("feature-based predictor");
            let view = fold_view(net, plan, fold)?;
            let train_x = featurize_edges(&view, clusters, features, &train)?;
            let test_x = featurize_edges(&view, clusters, features, test)?;
            let labels: Vec<Sign> = train.iter().map(|e| e.2).collect();
            let standardizer = fit_standardizer(&train_x)?;
            let train_z = standardizer.transform_all(&train_x)?;
            let params = SvmParams { seed, ..cfg.svm.clone() };
            let model = match train_svm(&train_z, &labels, &params, cfg.weighting) {
                Err(Error::DegenerateTraining(msg)) if labels.iter().all(|&s| s == labels[0]) => {
                    warnings.push(format!("fold {fold}: {msg}; predicting the only training class"));
                    constant_model(standardizer.width(), labels[0], &params)
                }
                other => other?,
            };
            let test_z = standardizer.transform_all(&test_x)?;
            test_z.iter().map(|x| model.predict(x)).collect::<Result<_>>()?
        }
    };

    let confusion = Confusion::from_pairs(test.iter().map(|e| e.2).zip(predictions));
    let balanced_accuracy = match balanced_accuracy::<f64>(&confusion) {
        Ok(b) => Some(b),
        Err(e) => {
            warnings.push(format!("fold {fold}: {e}; excluded from the mean"));
            None
        }
    };
    Ok(FoldResult { fold, test_size: test.len(), confusion, balanced_accuracy, warnings })
}

/// Runs every fold (in parallel) and merges results by fold index.
pub fn run_experiment(
    net: &MultilayerNetwork,
    clusters: Option<&ClusterIndex>,
    kind: PredictorKind,
    plan: &FoldPlan,
    cfg: &ExperimentConfig,
) -> Result<EvalReport> {
    if kind.needs_clusters() && clusters.is_none() {
        return Err(Error::InvalidConfig(format!("{kind} needs source-layer partitions")));
    }
    let folds: Vec<FoldResult> =
        (0..plan.k).into_par_iter().map(|i| run_fold(net, clusters, kind, plan, i, cfg)).collect::<Result<_>>()?;
    let defined: Vec<f64> = folds.iter().filter_map(|f| f.balanced_accuracy).collect();
    let mean_balanced_accuracy =
        if defined.is_empty() { None } else { Some(defined.iter().sum::<f64>() / defined.len() as f64) };
    let warnings = folds.iter().flat_map(|f| f.warnings.iter().cloned()).collect();
    Ok(EvalReport {
        predictor: kind.display_name().to_string(),
        k: plan.k,
        fold_seed: plan.seed,
        config: cfg.clone(),
        folds,
        mean_balanced_accuracy,
        warnings,
    })
}
