use std::collections::HashMap;

use super::{pair_key, Direction, LayerKind, NodeId, RelationStep, Sign, SignedEdge};
use crate::error::{Error, Result};

/// Compressed adjacency for one direction of one edge set.
#[derive(Clone, Debug, Default)]
struct Csr {
    offsets: Vec<usize>,
    targets: Vec<NodeId>,
    weights: Vec<u32>,
}

impl Csr {
    /// `pairs` are (owner, neighbor, weight); neighbor lists come out sorted.
    fn build(node_count: usize, mut pairs: Vec<(NodeId, NodeId, u32)>) -> Self {
        pairs.sort_unstable_by_key(|&(a, b, _)| (a, b));
        let mut offsets = vec![0usize; node_count + 1];
        for &(a, _, _) in &pairs {
            offsets[a.index() + 1] += 1;
        }
        for i in 0..node_count {
            offsets[i + 1] += offsets[i];
        }
        let targets = pairs.iter().map(|&(_, b, _)| b).collect();
        let weights = pairs.iter().map(|&(_, _, w)| w).collect();
        Csr { offsets, targets, weights }
    }

    #[inline]
    fn row(&self, node: NodeId) -> &[NodeId] {
        let i = node.index();
        &self.targets[self.offsets[i]..self.offsets[i + 1]]
    }

    #[inline]
    fn weights(&self, node: NodeId) -> &[u32] {
        let i = node.index();
        &self.weights[self.offsets[i]..self.offsets[i + 1]]
    }
}

#[derive(Clone, Debug, Default)]
struct Layer {
    out: Csr,
    inc: Csr,
    edges: usize,
}

impl Layer {
    fn build(node_count: usize, edges: &[(NodeId, NodeId, u32)]) -> Self {
        let out = Csr::build(node_count, edges.to_vec());
        let inc = Csr::build(node_count, edges.iter().map(|&(s, d, w)| (d, s, w)).collect());
        Layer { out, inc, edges: edges.len() }
    }

    fn row(&self, node: NodeId, direction: Direction) -> &[NodeId] {
        match direction {
            Direction::Forward => self.out.row(node),
            Direction::Inverse => self.inc.row(node),
        }
    }

    fn contains(&self, src: NodeId, dst: NodeId) -> bool {
        self.out.row(src).binary_search(&dst).is_ok()
    }
}

/// Immutable three-layer network with forward/reverse adjacency per layer;
/// the F layer is additionally split by sign.
#[derive(Clone, Debug)]
pub struct MultilayerNetwork {
    node_count: usize,
    m: Layer,
    r: Layer,
    f_pos: Layer,
    f_neg: Layer,
}

/// Merges parallel duplicates by summing weights, rejecting self-loops and
/// conflicting F signs. Output is sorted by (layer, src, dst).
pub(crate) fn merge_edges(edges: impl IntoIterator<Item = SignedEdge>) -> Result<Vec<SignedEdge>> {
    let mut merged: HashMap<(LayerKind, u64), SignedEdge> = HashMap::new();
    for e in edges {
        validate_shape(&e)?;
        let key = (e.layer, pair_key(e.src, e.dst));
        match merged.get_mut(&key) {
            Some(existing) => {
                if existing.sign != e.sign {
                    return Err(Error::SignConflict { src: e.src.0, dst: e.dst.0 });
                }
                existing.weight = existing.weight.saturating_add(e.weight);
            }
            None => {
                merged.insert(key, e);
            }
        }
    }
    let mut out: Vec<SignedEdge> = merged.into_values().collect();
    out.sort_unstable_by_key(|e| (e.layer, e.src, e.dst));
    Ok(out)
}

fn validate_shape(e: &SignedEdge) -> Result<()> {
    if e.src == e.dst {
        return Err(Error::InvalidEdge(format!("self-loop on node {} in layer {}", e.src, e.layer)));
    }
    if e.layer.is_signed() != e.sign.is_some() {
        return Err(Error::InvalidEdge(format!(
            "edge ({}, {}) in layer {} {} a sign",
            e.src,
            e.dst,
            e.layer,
            if e.sign.is_some() { "must not carry" } else { "requires" }
        )));
    }
    if e.weight == 0 {
        return Err(Error::InvalidEdge(format!("edge ({}, {}) has zero weight", e.src, e.dst)));
    }
    Ok(())
}

/// Builds a network from edges of any layer. Duplicates are merged.
pub fn build_network(node_count: usize, edges: impl IntoIterator<Item = SignedEdge>) -> Result<MultilayerNetwork> {
    MultilayerNetwork::build(node_count, edges)
}

impl MultilayerNetwork {
    pub fn build(node_count: usize, edges: impl IntoIterator<Item = SignedEdge>) -> Result<Self> {
        if node_count > u32::MAX as usize {
            return Err(Error::Domain(format!("node_count {node_count} exceeds the u32 id space")));
        }
        let merged = merge_edges(edges)?;
        let mut m = Vec::new();
        let mut r = Vec::new();
        let mut f_pos = Vec::new();
        let mut f_neg = Vec::new();
        let mut f_seen: HashMap<u64, Sign> = HashMap::new();
        for e in merged {
            for node in [e.src, e.dst] {
                if node.index() >= node_count {
                    return Err(Error::NodeOutOfRange { node: node.0 as u64, node_count });
                }
            }
            let triple = (e.src, e.dst, e.weight);
            match (e.layer, e.sign) {
                (LayerKind::M, _) => m.push(triple),
                (LayerKind::R, _) => r.push(triple),
                (LayerKind::F, Some(sign)) => {
                    if let Some(prev) = f_seen.insert(pair_key(e.src, e.dst), sign) {
                        if prev != sign {
                            return Err(Error::SignConflict { src: e.src.0, dst: e.dst.0 });
                        }
                    }
                    match sign {
                        Sign::Positive => f_pos.push(triple),
                        Sign::Negative => f_neg.push(triple),
                    }
                }
                (LayerKind::F, None) => unreachable!("validated by merge_edges"),
            }
        }
        Ok(MultilayerNetwork {
            node_count,
            m: Layer::build(node_count, &m),
            r: Layer::build(node_count, &r),
            f_pos: Layer::build(node_count, &f_pos),
            f_neg: Layer::build(node_count, &f_neg),
        })
    }

    pub fn empty(node_count: usize) -> Self {
        Self::build(node_count, std::iter::empty()).expect("empty network is valid")
    }

    pub fn node_count(&self) -> usize {
        self.node_count
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count as u32).map(NodeId)
    }

    pub fn edge_count(&self, layer: LayerKind) -> usize {
        match layer {
            LayerKind::F => self.f_pos.edges + self.f_neg.edges,
            LayerKind::M => self.m.edges,
            LayerKind::R => self.r.edges,
        }
    }

    pub fn f_edge_count(&self, sign: Sign) -> usize {
        self.f_layer(sign).edges
    }

    fn f_layer(&self, sign: Sign) -> &Layer {
        match sign {
            Sign::Positive => &self.f_pos,
            Sign::Negative => &self.f_neg,
        }
    }

    fn source_layer(&self, layer: LayerKind) -> &Layer {
        match layer {
            LayerKind::M => &self.m,
            LayerKind::R => &self.r,
            LayerKind::F => panic!("F is not a source layer"),
        }
    }

    /// Neighbor slice for an unsigned layer, or one sign class of F.
    pub(crate) fn row(&self, node: NodeId, layer: LayerKind, direction: Direction, sign: Option<Sign>) -> &[NodeId] {
        match (layer, sign) {
            (LayerKind::F, Some(s)) => self.f_layer(s).row(node, direction),
            (LayerKind::F, None) => panic!("F rows are stored per sign"),
            (l, _) => self.source_layer(l).row(node, direction),
        }
    }

    /// Neighbors along `step`, in ascending id order within each sign class.
    pub fn neighbors(&self, node: NodeId, step: RelationStep) -> Vec<NodeId> {
        match (step.layer, step.sign) {
            (LayerKind::F, None) => {
                let mut v: Vec<NodeId> = Sign::BOTH
                    .iter()
                    .flat_map(|&s| self.row(node, LayerKind::F, step.direction, Some(s)).iter().copied())
                    .collect();
                v.sort_unstable();
                v
            }
            (layer, sign) => self.row(node, layer, step.direction, sign).to_vec(),
        }
    }

    /// Out-neighbors in an unsigned layer with their merged multiplicities.
    pub fn weighted_out(&self, layer: LayerKind, node: NodeId) -> impl Iterator<Item = (NodeId, u32)> + '_ {
        let l = self.source_layer(layer);
        l.out.row(node).iter().copied().zip(l.out.weights(node).iter().copied())
    }

    pub fn degree(&self, layer: LayerKind, node: NodeId, direction: Direction) -> usize {
        match layer {
            LayerKind::F => Sign::BOTH.iter().map(|&s| self.f_layer(s).row(node, direction).len()).sum(),
            l => self.source_layer(l).row(node, direction).len(),
        }
    }

    pub fn has_edge(&self, layer: LayerKind, src: NodeId, dst: NodeId) -> bool {
        match layer {
            LayerKind::F => self.f_sign(src, dst).is_some(),
            l => self.source_layer(l).contains(src, dst),
        }
    }

    pub fn f_sign(&self, src: NodeId, dst: NodeId) -> Option<Sign> {
        if src.index() >= self.node_count {
            return None;
        }
        Sign::BOTH.into_iter().find(|&s| self.f_layer(s).contains(src, dst))
    }

    /// All merged edges of a layer, sorted by (src, dst).
    pub fn edges(&self, layer: LayerKind) -> Vec<SignedEdge> {
        let mut out = Vec::with_capacity(self.edge_count(layer));
        let parts: Vec<(&Layer, Option<Sign>)> = match layer {
            LayerKind::F => vec![(&self.f_pos, Some(Sign::Positive)), (&self.f_neg, Some(Sign::Negative))],
            l => vec![(self.source_layer(l), None)],
        };
        for (l, sign) in parts {
            for src in self.nodes() {
                for (&dst, &weight) in l.out.row(src).iter().zip(l.out.weights(src)) {
                    out.push(SignedEdge { src, dst, layer, sign, weight });
                }
            }
        }
        out.sort_unstable_by_key(|e| (e.src, e.dst));
        out
    }

    /// (src, dst, sign) for every F edge, sorted by pair.
    pub fn f_edges(&self) -> Vec<(NodeId, NodeId, Sign)> {
        self.edges(LayerKind::F).into_iter().map(|e| (e.src, e.dst, e.sign.expect("F edges are signed"))).collect()
    }
}
