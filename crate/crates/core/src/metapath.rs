//! Node-based (`U -X-> U -F-> U`) and cluster-based
//! (`U -X-> U -B-> C -B⁻¹-> U -F-> U`) meta-paths and their path counts.
//!
//! Canonical column order: first steps R, R⁻¹, M, M⁻¹, each followed by
//! F(+), F(−), F⁻¹(+), F⁻¹(−); node-based block before cluster-based.

use std::collections::HashMap;

use crate::community::{ClusterId, ClusterIndex};
use crate::error::{Error, Result};
use crate::net::{pair_key, Direction, LayerKind, MultilayerNetwork, NetworkView, NodeId, RelationStep, Sign};
use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum FeatureMode {
    Nb,
    Cb,
    Both,
}

impl FeatureMode {
    pub fn width(self) -> usize {
        match self {
            FeatureMode::Nb | FeatureMode::Cb => 16,
            FeatureMode::Both => 32,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            FeatureMode::Nb => "nb",
            FeatureMode::Cb => "cb",
            FeatureMode::Both => "both",
        }
    }

    pub fn parse(s: &str) -> Option<FeatureMode> {
        match s {
            "nb" => Some(FeatureMode::Nb),
            "cb" => Some(FeatureMode::Cb),
            "both" => Some(FeatureMode::Both),
            _ => None,
        }
    }

    pub fn needs_clusters(self) -> bool {
        self != FeatureMode::Nb
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct MetaPathSpec {
    pub first: RelationStep,
    /// Cluster type routed through, always the first step's own layer.
    pub bridge: Option<LayerKind>,
    pub last: RelationStep,
}

const FIRST_STEPS: [(LayerKind, Direction); 4] = [
    (LayerKind::R, Direction::Forward),
    (LayerKind::R, Direction::Inverse),
    (LayerKind::M, Direction::Forward),
    (LayerKind::M, Direction::Inverse),
];

const LAST_STEPS: [(Direction, Sign); 4] = [
    (Direction::Forward, Sign::Positive),
    (Direction::Forward, Sign::Negative),
    (Direction::Inverse, Sign::Positive),
    (Direction::Inverse, Sign::Negative),
];

impl MetaPathSpec {
    pub fn is_cluster_based(&self) -> bool {
        self.bridge.is_some()
    }

    /// Canonical column name such as `R.F+(fwd)` or `M-1.B.B-1.F-(inv)`.
    pub fn name(&self) -> String {
        let sign = self.last.sign.map_or('?', Sign::symbol);
        let dir = match self.last.direction {
            Direction::Forward => "fwd",
            Direction::Inverse => "inv",
        };
        let bridge = if self.bridge.is_some() { ".B.B-1" } else { "" };
        format!("{}{bridge}.F{sign}({dir})", self.first.label())
    }

    /// Schema notation, e.g. `U -R-> U -B-> C_R -B^-1-> U -F^-1(+)-> U`.
    pub fn schema(&self) -> String {
        let first = match self.first.direction {
            Direction::Forward => self.first.layer.name().to_string(),
            Direction::Inverse => format!("{}^-1", self.first.layer),
        };
        let last = match self.last.direction {
            Direction::Forward => "F",
            Direction::Inverse => "F^-1",
        };
        let sign = self.last.sign.map_or('?', Sign::symbol);
        match self.bridge {
            None => format!("U -{first}-> U -{last}({sign})-> U"),
            Some(l) => format!("U -{first}-> U -B-> C_{l} -B^-1-> U -{last}({sign})-> U"),
        }
    }
}

fn enumerate(cluster_based: bool) -> Vec<MetaPathSpec> {
    let mut out = Vec::with_capacity(16);
    for (layer, dir) in FIRST_STEPS {
        for (last_dir, sign) in LAST_STEPS {
            out.push(MetaPathSpec {
                first: RelationStep::source(layer, dir),
                bridge: cluster_based.then_some(layer),
                last: RelationStep::signed(last_dir, sign),
            });
        }
    }
    out
}

pub fn enumerate_node_based() -> Vec<MetaPathSpec> {
    enumerate(false)
}

pub fn enumerate_cluster_based() -> Vec<MetaPathSpec> {
    enumerate(true)
}

pub fn specs(mode: FeatureMode) -> Vec<MetaPathSpec> {
    match mode {
        FeatureMode::Nb => enumerate_node_based(),
        FeatureMode::Cb => enumerate_cluster_based(),
        FeatureMode::Both => enumerate_node_based().into_iter().chain(enumerate_cluster_based()).collect(),
    }
}

pub fn column_names(mode: FeatureMode) -> Vec<String> {
    specs(mode).iter().map(MetaPathSpec::name).collect()
}

/// Path counts for one (initiator, recipient) pair.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FeatureRow {
    pub initiator: NodeId,
    pub recipient: NodeId,
    pub counts: Vec<u64>,
    pub label: Option<Sign>,
}

impl FeatureRow {
    pub fn values<T: Scalar>(&self) -> Vec<T> {
        self.counts.iter().map(|&c| T::from(c).unwrap()).collect()
    }
}

/// A view with one extra F pair hidden.
pub(crate) struct Excluding<'v, V: ?Sized> {
    pub inner: &'v V,
    pub key: u64,
}

impl<'v, V: NetworkView + ?Sized> Excluding<'v, V> {
    pub fn new(inner: &'v V, src: NodeId, dst: NodeId) -> Self {
        Excluding { inner, key: pair_key(src, dst) }
    }
}

impl<V: NetworkView + ?Sized> NetworkView for Excluding<'_, V> {
    fn network(&self) -> &MultilayerNetwork {
        self.inner.network()
    }

    fn is_hidden(&self, src: NodeId, dst: NodeId) -> bool {
        pair_key(src, dst) == self.key || self.inner.is_hidden(src, dst)
    }
}

fn last_holds<V: NetworkView + ?Sized>(view: &V, w: NodeId, v: NodeId, dir: Direction, sign: Sign) -> bool {
    match dir {
        Direction::Forward => view.f_sign(w, v) == Some(sign),
        Direction::Inverse => view.f_sign(v, w) == Some(sign),
    }
}

fn check_pair(view: &(impl NetworkView + ?Sized), u: NodeId, v: NodeId) -> Result<()> {
    let n = view.node_count();
    for x in [u, v] {
        if x.index() >= n {
            return Err(Error::NodeOutOfRange { node: x.0 as u64, node_count: n });
        }
    }
    if u == v {
        return Err(Error::Domain(format!("meta-path counts need distinct endpoints, got {u} twice")));
    }
    Ok(())
}

/// Number of instances of `spec` from `u` to `v` on `view` as given; the
/// caller is responsible for hiding the target edge.
pub fn count_paths<V: NetworkView + ?Sized>(
    view: &V,
    clusters: Option<&ClusterIndex>,
    spec: &MetaPathSpec,
    u: NodeId,
    v: NodeId,
) -> Result<u64> {
    check_pair(view, u, v)?;
    let dir = spec.last.direction;
    let sign = spec.last.sign.ok_or_else(|| Error::Domain("meta-path final step needs a sign".into()))?;
    match spec.bridge {
        None => {
            let mut count = 0;
            view.for_each_neighbor(u, spec.first, |w| {
                if last_holds(view, w, v, dir, sign) {
                    count += 1;
                }
            });
            Ok(count)
        }
        Some(layer) => {
            let clusters =
                clusters.ok_or_else(|| Error::Domain("cluster-based meta-path without partitions".into()))?;
            let bucket = recipient_bucket(view, clusters, layer, v, dir, sign);
            let mut count = 0;
            view.for_each_neighbor(u, spec.first, |w| {
                count += bucket.get(&clusters.belong(layer, w)).copied().unwrap_or(0);
            });
            Ok(count)
        }
    }
}

/// Per cluster of `layer`: how many members w' satisfy the final F step
/// towards `v`.
fn recipient_bucket<V: NetworkView + ?Sized>(
    view: &V,
    clusters: &ClusterIndex,
    layer: LayerKind,
    v: NodeId,
    dir: Direction,
    sign: Sign,
) -> HashMap<ClusterId, u64> {
    let mut bucket = HashMap::new();
    // F(s) from w' to v means w' is an in-neighbor of v, and vice versa.
    view.for_each_neighbor(v, RelationStep::signed(dir.reversed(), sign), |w2| {
        *bucket.entry(clusters.belong(layer, w2)).or_insert(0) += 1;
    });
    bucket
}

fn node_based_block<V: NetworkView + ?Sized>(view: &V, u: NodeId, v: NodeId, out: &mut Vec<u64>) {
    for (layer, dir) in FIRST_STEPS {
        let mut cells = [0u64; 4];
        view.for_each_neighbor(u, RelationStep::source(layer, dir), |w| {
            for (k, (last_dir, sign)) in LAST_STEPS.iter().enumerate() {
                if last_holds(view, w, v, *last_dir, *sign) {
                    cells[k] += 1;
                }
            }
        });
        out.extend_from_slice(&cells);
    }
}

fn cluster_based_block<V: NetworkView + ?Sized>(
    view: &V,
    clusters: &ClusterIndex,
    u: NodeId,
    v: NodeId,
    out: &mut Vec<u64>,
) {
    let mut buckets: HashMap<LayerKind, Vec<HashMap<ClusterId, u64>>> = HashMap::new();
    for layer in [LayerKind::R, LayerKind::M] {
        let per_last = LAST_STEPS.iter().map(|&(d, s)| recipient_bucket(view, clusters, layer, v, d, s)).collect();
        buckets.insert(layer, per_last);
    }
    for (layer, dir) in FIRST_STEPS {
        let b = &buckets[&layer];
        let mut cells = [0u64; 4];
        view.for_each_neighbor(u, RelationStep::source(layer, dir), |w| {
            let c = clusters.belong(layer, w);
            for (k, cell) in cells.iter_mut().enumerate() {
                *cell += b[k].get(&c).copied().unwrap_or(0);
            }
        });
        out.extend_from_slice(&cells);
    }
}

/// All counts for `mode` in canonical order, with the target edge (u, v)
/// excluded from every count.
pub fn feature_row<V: NetworkView + ?Sized>(
    view: &V,
    clusters: Option<&ClusterIndex>,
    u: NodeId,
    v: NodeId,
    mode: FeatureMode,
    label: Option<Sign>,
) -> Result<FeatureRow> {
    check_pair(view, u, v)?;
    let view = Excluding::new(view, u, v);
    let mut counts = Vec::with_capacity(mode.width());
    if mode != FeatureMode::Cb {
        node_based_block(&view, u, v, &mut counts);
    }
    if mode != FeatureMode::Nb {
        let clusters = clusters.ok_or_else(|| Error::Domain("cluster-based features need partitions".into()))?;
        cluster_based_block(&view, clusters, u, v, &mut counts);
    }
    Ok(FeatureRow { initiator: u, recipient: v, counts, label })
}
