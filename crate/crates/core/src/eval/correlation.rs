use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Direction, LayerKind, MultilayerNetwork};
use crate::scalar::Scalar;

use super::kendall_tau_b;

/// τ_b between the degree sequences of two layers, over nodes with nonzero
/// degree (in `direction`) in both. `Forward` compares out-degrees,
/// `Inverse` in-degrees.
pub fn layer_degree_correlation<T: Scalar>(
    net: &MultilayerNetwork,
    pair: (LayerKind, LayerKind),
    direction: Direction,
) -> Result<T> {
    let (xs, ys): (Vec<usize>, Vec<usize>) = net
        .nodes()
        .map(|n| (net.degree(pair.0, n, direction), net.degree(pair.1, n, direction)))
        .filter(|&(a, b)| a > 0 && b > 0)
        .unzip();
    if xs.len() < 2 {
        return Err(Error::TooFew { needed: 2, got: xs.len() });
    }
    kendall_tau_b(&xs, &ys)
}

/// Fraction of nodes active in exactly one of the two layers, where active
/// means nonzero degree in `direction`.
pub fn activity_hamming<T: Scalar>(net: &MultilayerNetwork, pair: (LayerKind, LayerKind), direction: Direction) -> T {
    if net.node_count() == 0 {
        return T::zero();
    }
    let differing = net
        .nodes()
        .filter(|&n| (net.degree(pair.0, n, direction) > 0) != (net.degree(pair.1, n, direction) > 0))
        .count();
    T::from_count(differing) / T::from_count(net.node_count())
}

/// Directed (src, dst) pairs present in both layers; F signs are ignored.
pub fn common_edges(net: &MultilayerNetwork, pair: (LayerKind, LayerKind)) -> usize {
    net.edges(pair.0).iter().filter(|e| net.has_edge(pair.1, e.src, e.dst)).count()
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FOverlap {
    pub f_edges: usize,
    pub in_m: usize,
    pub in_r: usize,
    pub in_either: usize,
    pub in_all: usize,
    pub in_neither: usize,
}

pub fn f_overlap_summary(net: &MultilayerNetwork) -> FOverlap {
    let mut s = FOverlap::default();
    for (src, dst, _) in net.f_edges() {
        let m = net.has_edge(LayerKind::M, src, dst);
        let r = net.has_edge(LayerKind::R, src, dst);
        s.f_edges += 1;
        s.in_m += usize::from(m);
        s.in_r += usize::from(r);
        s.in_either += usize::from(m || r);
        s.in_all += usize::from(m && r);
        s.in_neither += usize::from(!(m || r));
    }
    s
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerPairCorrelation {
    pub layers: (LayerKind, LayerKind),
    /// `None` when τ_b is undefined (constant or too-short sequences).
    pub tau_in_degree: Option<f64>,
    pub tau_out_degree: Option<f64>,
    pub hamming_in_activity: f64,
    pub hamming_out_activity: f64,
    pub common_edges: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationReport {
    pub node_count: usize,
    pub pairs: Vec<LayerPairCorrelation>,
    pub f_overlap: FOverlap,
}

pub const LAYER_PAIRS: [(LayerKind, LayerKind); 3] =
    [(LayerKind::M, LayerKind::R), (LayerKind::M, LayerKind::F), (LayerKind::R, LayerKind::F)];

pub fn correlation_report(net: &MultilayerNetwork) -> CorrelationReport {
    let pairs = LAYER_PAIRS
        .iter()
        .map(|&pair| LayerPairCorrelation {
            layers: pair,
            tau_in_degree: layer_degree_correlation::<f64>(net, pair, Direction::Inverse).ok(),
            tau_out_degree: layer_degree_correlation::<f64>(net, pair, Direction::Forward).ok(),
            hamming_in_activity: activity_hamming(net, pair, Direction::Inverse),
            hamming_out_activity: activity_hamming(net, pair, Direction::Forward),
            common_edges: common_edges(net, pair),
        })
        .collect();
    CorrelationReport { node_count: net.node_count(), pairs, f_overlap: f_overlap_summary(net) }
}
