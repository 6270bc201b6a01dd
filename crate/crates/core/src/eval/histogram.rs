use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{positive_neighborhood, MultilayerNetwork, NodeId};

/// One embeddedness value's share of each response class.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EmbeddednessBin {
    pub bin: usize,
    pub n: usize,
    pub positives: usize,
    pub negatives: usize,
    /// Percent of all positive responses that fall in this bin.
    pub pct_of_positives: f64,
    pub pct_of_negatives: f64,
    pub positive_rate: f64,
}

fn common(a: &[NodeId], b: &[NodeId], u: NodeId, v: NodeId) -> usize {
    let (mut i, mut j, mut c) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                c += usize::from(a[i] != u && a[i] != v);
                i += 1;
                j += 1;
            }
        }
    }
    c
}

/// Embeddedness of every F edge, in `net.f_edges()` order. Hiding the edge
/// itself cannot change the count, since both endpoints are excluded.
pub fn f_edge_embeddedness(net: &MultilayerNetwork) -> Vec<usize> {
    let hoods: Vec<Vec<NodeId>> = net.nodes().map(|x| positive_neighborhood(net, x)).collect();
    net.f_edges().iter().map(|&(u, v, _)| common(&hoods[u.index()], &hoods[v.index()], u, v)).collect()
}

/// Bins are the distinct embeddedness values that occur, ascending.
pub fn embeddedness_histogram(net: &MultilayerNetwork) -> Result<Vec<EmbeddednessBin>> {
    let edges = net.f_edges();
    if edges.is_empty() {
        return Err(Error::Domain("the F layer is empty".into()));
    }
    let mut bins: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
    for (&(_, _, sign), e) in edges.iter().zip(f_edge_embeddedness(net)) {
        let slot = bins.entry(e).or_default();
        if sign.is_positive() {
            slot.0 += 1;
        } else {
            slot.1 += 1;
        }
    }
    let total_pos: usize = bins.values().map(|b| b.0).sum();
    let total_neg: usize = bins.values().map(|b| b.1).sum();
    let pct = |k: usize, total: usize| if total == 0 { 0.0 } else { 100.0 * k as f64 / total as f64 };
    Ok(bins
        .into_iter()
        .map(|(bin, (p, n))| EmbeddednessBin {
            bin,
            n: p + n,
            positives: p,
            negatives: n,
            pct_of_positives: pct(p, total_pos),
            pct_of_negatives: pct(n, total_neg),
            positive_rate: p as f64 / (p + n) as f64,
        })
        .collect())
}

/// Whether the positive rate never drops between consecutive bins holding at
/// least `min_samples` initiations.
pub fn positive_rate_non_decreasing(bins: &[EmbeddednessBin], min_samples: usize) -> bool {
    let rates: Vec<f64> = bins.iter().filter(|b| b.n >= min_samples).map(|b| b.positive_rate).collect();
    rates.windows(2).all(|w| w[0] <= w[1])
}
