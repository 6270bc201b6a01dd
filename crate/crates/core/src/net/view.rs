use std::collections::HashSet;

use super::{pair_key, Direction, LayerKind, MultilayerNetwork, NodeId, RelationStep, Sign};
use crate::error::{Error, Result};

/// Read access to a network, possibly with some F edges hidden.
///
/// Implementors only decide which F pairs are hidden; all queries are
/// answered from the underlying [`MultilayerNetwork`].
pub trait NetworkView: Sync {
    fn network(&self) -> &MultilayerNetwork;

    fn is_hidden(&self, _src: NodeId, _dst: NodeId) -> bool {
        false
    }

    fn node_count(&self) -> usize {
        self.network().node_count()
    }

    /// Calls `f` for every neighbor along `step`. An F step without a sign
    /// filter visits both sign classes.
    fn for_each_neighbor<F: FnMut(NodeId)>(&self, node: NodeId, step: RelationStep, mut f: F) {
        let net = self.network();
        if step.layer != LayerKind::F {
            net.row(node, step.layer, step.direction, None).iter().copied().for_each(f);
            return;
        }
        let signs: &[Sign] = match step.sign {
            Some(Sign::Positive) => &[Sign::Positive],
            Some(Sign::Negative) => &[Sign::Negative],
            None => &Sign::BOTH,
        };
        for &sign in signs {
            for &nb in net.row(node, LayerKind::F, step.direction, Some(sign)) {
                let (src, dst) = match step.direction {
                    Direction::Forward => (node, nb),
                    Direction::Inverse => (nb, node),
                };
                if !self.is_hidden(src, dst) {
                    f(nb);
                }
            }
        }
    }

    /// Neighbors along `step` in ascending id order.
    fn neighbors(&self, node: NodeId, step: RelationStep) -> Vec<NodeId> {
        let mut out = Vec::new();
        self.for_each_neighbor(node, step, |n| out.push(n));
        if step.layer == LayerKind::F && step.sign.is_none() {
            out.sort_unstable();
        }
        out
    }

    fn f_sign(&self, src: NodeId, dst: NodeId) -> Option<Sign> {
        if self.is_hidden(src, dst) {
            return None;
        }
        self.network().f_sign(src, dst)
    }

    /// Visible F edges as (src, dst, sign), sorted by pair.
    fn visible_f_edges(&self) -> Vec<(NodeId, NodeId, Sign)> {
        self.network().f_edges().into_iter().filter(|&(s, d, _)| !self.is_hidden(s, d)).collect()
    }
}

impl NetworkView for MultilayerNetwork {
    fn network(&self) -> &MultilayerNetwork {
        self
    }
}

impl<V: NetworkView + ?Sized> NetworkView for &V {
    fn network(&self) -> &MultilayerNetwork {
        (**self).network()
    }

    fn is_hidden(&self, src: NodeId, dst: NodeId) -> bool {
        (**self).is_hidden(src, dst)
    }
}

/// A network with a set of F edges hidden in both directions of lookup.
#[derive(Clone, Debug)]
pub struct MaskedView<'a> {
    base: &'a MultilayerNetwork,
    hidden: HashSet<u64>,
}

/// Hides `hidden` F pairs. Every pair must be an existing F edge.
pub fn mask_f_edges<'a, I>(net: &'a MultilayerNetwork, hidden: I) -> Result<MaskedView<'a>>
where
    I: IntoIterator<Item = (NodeId, NodeId)>,
{
    let mut set = HashSet::new();
    for (src, dst) in hidden {
        if net.f_sign(src, dst).is_none() {
            return Err(Error::NotAnFEdge { src: src.0, dst: dst.0 });
        }
        set.insert(pair_key(src, dst));
    }
    Ok(MaskedView { base: net, hidden: set })
}

impl<'a> MaskedView<'a> {
    pub fn base(&self) -> &'a MultilayerNetwork {
        self.base
    }

    pub fn hidden_count(&self) -> usize {
        self.hidden.len()
    }
}

impl NetworkView for MaskedView<'_> {
    fn network(&self) -> &MultilayerNetwork {
        self.base
    }

    fn is_hidden(&self, src: NodeId, dst: NodeId) -> bool {
        self.hidden.contains(&pair_key(src, dst))
    }
}

/// Nodes joined to `x` by a visible positive F edge in either direction,
/// sorted and deduplicated.
pub fn positive_neighborhood<V: NetworkView + ?Sized>(view: &V, x: NodeId) -> Vec<NodeId> {
    let mut out = Vec::new();
    for dir in [Direction::Forward, Direction::Inverse] {
        view.for_each_neighbor(x, RelationStep::signed(dir, Sign::Positive), |n| out.push(n));
    }
    out.sort_unstable();
    out.dedup();
    out
}

/// Number of common positive F neighbors of `u` and `v`, direction ignored.
pub fn embeddedness<V: NetworkView + ?Sized>(view: &V, u: NodeId, v: NodeId) -> Result<usize> {
    if u == v {
        return Err(Error::Domain(format!("embeddedness of node {u} with itself")));
    }
    let a = positive_neighborhood(view, u);
    let b = positive_neighborhood(view, v);
    let (mut i, mut j, mut count) = (0, 0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                if a[i] != u && a[i] != v {
                    count += 1;
                }
                i += 1;
                j += 1;
            }
        }
    }
    Ok(count)
}
