use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{NodeId, Sign};

pub type LabeledEdge = (NodeId, NodeId, Sign);

/// Disjoint test folds covering every labeled edge.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FoldPlan {
    pub k: usize,
    pub seed: u64,
    pub folds: Vec<Vec<LabeledEdge>>,
}

impl FoldPlan {
    pub fn edge_count(&self) -> usize {
        self.folds.iter().map(Vec::len).sum()
    }

    /// Every edge outside fold `i`.
    pub fn training(&self, i: usize) -> Vec<LabeledEdge> {
        self.folds.iter().enumerate().filter(|&(j, _)| j != i).flat_map(|(_, f)| f.iter().copied()).collect()
    }
}

/// Seeded shuffle, then contiguous slices; the first `n mod k` folds get
/// one extra edge.
pub fn kfold_split(edges: &[LabeledEdge], k: usize, seed: u64) -> Result<FoldPlan> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("need k ≥ 2 folds, got {k}")));
    }
    if edges.len() < k {
        return Err(Error::TooFew { needed: k, got: edges.len() });
    }
    let mut shuffled = edges.to_vec();
    shuffled.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let (base, extra) = (edges.len() / k, edges.len() % k);
    let mut folds = Vec::with_capacity(k);
    let mut rest = shuffled.as_slice();
    for i in 0..k {
        let (head, tail) = rest.split_at(base + usize::from(i < extra));
        folds.push(head.to_vec());
        rest = tail;
    }
    Ok(FoldPlan { k, seed, folds })
}
