//! Directed community detection on the source layers and augmentation of
//! the network with cluster nodes reachable through Belong edges.

mod flow;
mod infomap;

use std::path::Path;

use serde::{Deserialize, Serialize};

pub use flow::{map_equation, visit_rates, FlowEdge, VisitRates};
pub use infomap::{cluster_layer, cluster_layer_traced, ClusterOutcome, DEFAULT_TELEPORT};

use crate::error::{Error, Result};
use crate::net::{LayerKind, MaskedView, MultilayerNetwork, NetworkView, NodeId};
use crate::Scalar;

pub type ClusterId = u32;

/// Node → cluster assignment for one source layer. Cluster ids are dense
/// and every cluster is non-empty.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "PartitionFile")]
pub struct Partition {
    layer: LayerKind,
    cluster_count: usize,
    assignment: Vec<ClusterId>,
}

#[derive(Deserialize)]
struct PartitionFile {
    layer: LayerKind,
    cluster_count: usize,
    assignment: Vec<ClusterId>,
}

impl TryFrom<PartitionFile> for Partition {
    type Error = Error;

    fn try_from(f: PartitionFile) -> Result<Self> {
        let p = Partition::new(f.layer, f.assignment)?;
        if p.cluster_count != f.cluster_count {
            return Err(Error::InvalidPartition(format!(
                "cluster_count {} does not match {} distinct clusters",
                f.cluster_count, p.cluster_count
            )));
        }
        Ok(p)
    }
}

impl Partition {
    /// Validates an already dense assignment.
    pub fn new(layer: LayerKind, assignment: Vec<ClusterId>) -> Result<Self> {
        if layer == LayerKind::F {
            return Err(Error::InvalidPartition("only the M and R layers are clustered".into()));
        }
        let cluster_count = assignment.iter().map(|&c| c as usize + 1).max().unwrap_or(0);
        let mut seen = vec![false; cluster_count];
        for &c in &assignment {
            seen[c as usize] = true;
        }
        if let Some(empty) = seen.iter().position(|s| !s) {
            return Err(Error::InvalidPartition(format!("cluster {empty} has no members")));
        }
        Ok(Partition { layer, cluster_count, assignment })
    }

    /// Relabels arbitrary labels to dense ids ordered by smallest member.
    pub fn from_labels<L: Copy + Eq + std::hash::Hash>(layer: LayerKind, labels: &[L]) -> Result<Self> {
        let mut remap = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = remap.len() as ClusterId;
                *remap.entry(*l).or_insert(next)
            })
            .collect();
        Partition::new(layer, assignment)
    }

    pub fn singletons(layer: LayerKind, node_count: usize) -> Self {
        Partition::new(layer, (0..node_count as ClusterId).collect()).expect("singletons are dense")
    }

    pub fn single_module(layer: LayerKind, node_count: usize) -> Self {
        Partition::new(layer, vec![0; node_count]).expect("one module is dense")
    }

    /// Weakly connected components of `layer`.
    pub fn components(net: &MultilayerNetwork, layer: LayerKind) -> Result<Self> {
        let n = net.node_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for e in net.edges(layer) {
            let a = find(&mut parent, e.src.index());
            let b = find(&mut parent, e.dst.index());
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        let roots: Vec<usize> = (0..n).map(|x| find(&mut parent, x)).collect();
        Partition::from_labels(layer, &roots)
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path).map_err(|e| Error::io(format!("opening {}", path.display()), e))?;
        serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| Error::json(format!("partition {}", path.display()), e))
    }

    pub fn layer(&self) -> LayerKind {
        self.layer
    }

    pub fn cluster_count(&self) -> usize {
        self.cluster_count
    }

    pub fn assignment(&self) -> &[ClusterId] {
        &self.assignment
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    #[inline]
    pub fn cluster_of(&self, node: NodeId) -> ClusterId {
        self.assignment[node.index()]
    }

    pub fn members(&self) -> Vec<Vec<NodeId>> {
        let mut out = vec![Vec::new(); self.cluster_count];
        for (i, &c) in self.assignment.iter().enumerate() {
            out[c as usize].push(NodeId(i as u32));
        }
        out
    }
}

/// Anything that can produce a partition of a source layer.
pub trait Clusterer {
    fn cluster(&self, net: &MultilayerNetwork, layer: LayerKind) -> Result<Partition>;
}

#[derive(Clone, Copy, Debug)]
pub struct Infomap {
    pub teleport: f64,
    pub seed: u64,
}

impl Default for Infomap {
    fn default() -> Self {
        Infomap { teleport: DEFAULT_TELEPORT, seed: 0 }
    }
}

impl Clusterer for Infomap {
    fn cluster(&self, net: &MultilayerNetwork, layer: LayerKind) -> Result<Partition> {
        cluster_layer::<f64>(net, layer, self.teleport, self.seed)
    }
}

pub struct Components;

impl Clusterer for Components {
    fn cluster(&self, net: &MultilayerNetwork, layer: LayerKind) -> Result<Partition> {
        Partition::components(net, layer)
    }
}

/// Cluster membership for both source layers, in both lookup directions.
#[derive(Clone, Debug)]
pub struct ClusterIndex {
    r: Partition,
    m: Partition,
    members_r: Vec<Vec<NodeId>>,
    members_m: Vec<Vec<NodeId>>,
}

impl ClusterIndex {
    pub fn new(node_count: usize, part_r: Partition, part_m: Partition) -> Result<Self> {
        for (p, expected) in [(&part_r, LayerKind::R), (&part_m, LayerKind::M)] {
            if p.layer() != expected {
                return Err(Error::InvalidPartition(format!(
                    "expected a partition of layer {expected}, got {}",
                    p.layer()
                )));
            }
            if p.len() != node_count {
                return Err(Error::Coverage { expected: node_count, got: p.len() });
            }
        }
        Ok(ClusterIndex { members_r: part_r.members(), members_m: part_m.members(), r: part_r, m: part_m })
    }

    pub fn partition(&self, layer: LayerKind) -> &Partition {
        match layer {
            LayerKind::R => &self.r,
            LayerKind::M => &self.m,
            LayerKind::F => panic!("the F layer is not clustered"),
        }
    }

    /// Belong: the cluster of `node` in `layer`'s partition.
    #[inline]
    pub fn belong(&self, layer: LayerKind, node: NodeId) -> ClusterId {
        self.partition(layer).cluster_of(node)
    }

    /// Inverse Belong: members of a cluster, ascending.
    pub fn members(&self, layer: LayerKind, cluster: ClusterId) -> &[NodeId] {
        match layer {
            LayerKind::R => &self.members_r[cluster as usize],
            LayerKind::M => &self.members_m[cluster as usize],
            LayerKind::F => panic!("the F layer is not clustered"),
        }
    }
}

/// A view that also knows the cluster nodes of both source layers.
pub trait ClusteredView: NetworkView {
    fn clusters(&self) -> &ClusterIndex;
}

/// A view paired with a cluster index.
#[derive(Clone, Debug)]
pub struct Augmented<'c, V> {
    pub view: V,
    pub clusters: &'c ClusterIndex,
}

impl<V: NetworkView> NetworkView for Augmented<'_, V> {
    fn network(&self) -> &MultilayerNetwork {
        self.view.network()
    }

    fn is_hidden(&self, src: NodeId, dst: NodeId) -> bool {
        self.view.is_hidden(src, dst)
    }
}

impl<V: NetworkView> ClusteredView for Augmented<'_, V> {
    fn clusters(&self) -> &ClusterIndex {
        self.clusters
    }
}

/// The base network plus cluster nodes of types C_R and C_M.
#[derive(Clone, Debug)]
pub struct AugmentedNetwork<'a> {
    base: &'a MultilayerNetwork,
    clusters: ClusterIndex,
}

pub fn augment(net: &MultilayerNetwork, part_r: Partition, part_m: Partition) -> Result<AugmentedNetwork<'_>> {
    Ok(AugmentedNetwork { base: net, clusters: ClusterIndex::new(net.node_count(), part_r, part_m)? })
}

impl<'a> AugmentedNetwork<'a> {
    pub fn base(&self) -> &'a MultilayerNetwork {
        self.base
    }

    pub fn cluster_index(&self) -> &ClusterIndex {
        &self.clusters
    }

    /// The augmented network with `hidden` F edges masked.
    pub fn masked<I>(&self, hidden: I) -> Result<Augmented<'_, MaskedView<'a>>>
    where
        I: IntoIterator<Item = (NodeId, NodeId)>,
    {
        Ok(Augmented { view: crate::net::mask_f_edges(self.base, hidden)?, clusters: &self.clusters })
    }
}

impl NetworkView for AugmentedNetwork<'_> {
    fn network(&self) -> &MultilayerNetwork {
        self.base
    }
}

impl ClusteredView for AugmentedNetwork<'_> {
    fn clusters(&self) -> &ClusterIndex {
        &self.clusters
    }
}

/// Clusters both source layers with the same clusterer.
pub fn cluster_sources<C: Clusterer + ?Sized>(
    net: &MultilayerNetwork,
    clusterer: &C,
) -> Result<(Partition, Partition)> {
    Ok((clusterer.cluster(net, LayerKind::R)?, clusterer.cluster(net, LayerKind::M)?))
}

/// Fraction of nodes on which `found` agrees with `truth` under the best
/// one-to-one matching of labels, found greedily on the contingency table.
pub fn matched_agreement<T: Scalar>(truth: &[u32], found: &[u32]) -> T {
    assert_eq!(truth.len(), found.len());
    if truth.is_empty() {
        return T::one();
    }
    let mut table: std::collections::HashMap<(u32, u32), usize> = std::collections::HashMap::new();
    for (&a, &b) in truth.iter().zip(found) {
        *table.entry((a, b)).or_default() += 1;
    }
    let mut cells: Vec<((u32, u32), usize)> = table.into_iter().collect();
    cells.sort_by(|x, y| y.1.cmp(&x.1).then(x.0.cmp(&y.0)));
    let mut used_a = std::collections::HashSet::new();
    let mut used_b = std::collections::HashSet::new();
    let mut agree = 0;
    for ((a, b), count) in cells {
        if used_a.contains(&a) || used_b.contains(&b) {
            continue;
        }
        used_a.insert(a);
        used_b.insert(b);
        agree += count;
    }
    T::from_count(agree) / T::from_count(truth.len())
}
