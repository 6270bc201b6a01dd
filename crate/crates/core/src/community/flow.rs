use super::Partition;
use crate::error::{Error, Result};
use crate::net::{LayerKind, MultilayerNetwork, NodeId};
use crate::scalar::{plogp, Scalar};

const MAX_ITERATIONS: usize = 10_000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FlowEdge<T> {
    pub src: NodeId,
    pub dst: NodeId,
    pub flow: T,
}

/// Stationary visit rates of a weight-proportional random walk with uniform
/// teleportation, plus the per-edge flows the map equation needs.
#[derive(Clone, Debug)]
pub struct VisitRates<T> {
    pub teleport: T,
    pub node_rate: Vec<T>,
    /// Rate at which each node teleports: `p (τ + (1 − τ)·[dangling])`.
    pub teleport_rate: Vec<T>,
    /// `(1 − τ) p_src w / w_src` for every merged edge of the layer.
    pub edges: Vec<FlowEdge<T>>,
    pub iterations: usize,
}

impl<T: Scalar> VisitRates<T> {
    pub fn node_count(&self) -> usize {
        self.node_rate.len()
    }
}

/// Power iteration to L1 residual below `max(1e-13, 8ε)` or 10⁴ iterations.
/// An empty layer yields uniform rates.
pub fn visit_rates<T: Scalar>(net: &MultilayerNetwork, layer: LayerKind, teleport: T) -> Result<VisitRates<T>> {
    if layer == LayerKind::F {
        return Err(Error::Domain("visit rates are defined on the M and R layers".into()));
    }
    if !(teleport > T::zero() && teleport < T::one()) {
        return Err(Error::Domain(format!("teleport {teleport} outside (0, 1)")));
    }
    let n = net.node_count();
    if n == 0 {
        return Ok(VisitRates { teleport, node_rate: vec![], teleport_rate: vec![], edges: vec![], iterations: 0 });
    }
    let nf = T::from_count(n);
    let stay = T::one() - teleport;

    let out_weight: Vec<T> =
        net.nodes().map(|a| net.weighted_out(layer, a).map(|(_, w)| T::from(w).unwrap()).sum()).collect();
    let tol = T::lit(1e-13).max(T::epsilon() * T::lit(8.0));

    let mut rate = vec![T::one() / nf; n];
    let mut next = vec![T::zero(); n];
    let mut iterations = 0;
    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut jump = T::zero();
        for a in net.nodes() {
            let p = rate[a.index()];
            if out_weight[a.index()] > T::zero() {
                jump = jump + teleport * p;
            } else {
                jump = jump + p;
            }
        }
        let base = jump / nf;
        next.iter_mut().for_each(|x| *x = base);
        for a in net.nodes() {
            let w = out_weight[a.index()];
            if w > T::zero() {
                let scale = stay * rate[a.index()] / w;
                for (b, wb) in net.weighted_out(layer, a) {
                    next[b.index()] = next[b.index()] + scale * T::from(wb).unwrap();
                }
            }
        }
        let total: T = next.iter().copied().sum();
        next.iter_mut().for_each(|x| *x = *x / total);
        let residual: T = rate.iter().zip(&next).map(|(&a, &b)| (a - b).abs()).sum();
        std::mem::swap(&mut rate, &mut next);
        if residual < tol {
            break;
        }
    }

    let mut teleport_rate = Vec::with_capacity(n);
    let mut edges = Vec::with_capacity(net.edge_count(layer));
    for a in net.nodes() {
        let p = rate[a.index()];
        let w = out_weight[a.index()];
        if w > T::zero() {
            teleport_rate.push(teleport * p);
            for (b, wb) in net.weighted_out(layer, a) {
                edges.push(FlowEdge { src: a, dst: b, flow: stay * p * T::from(wb).unwrap() / w });
            }
        } else {
            teleport_rate.push(p);
        }
    }
    Ok(VisitRates { teleport, node_rate: rate, teleport_rate, edges, iterations })
}

/// Per-module aggregates from which the two-level codelength follows.
#[derive(Clone, Copy, Debug, Default)]
pub(crate) struct ModuleFlow<T> {
    pub flow: T,
    pub teleport: T,
    pub size: T,
    pub outflow: T,
    pub internal: T,
}

impl<T: Scalar> ModuleFlow<T> {
    /// Exit flow: teleports landing outside the module plus link flow
    /// leaving it.
    #[inline]
    pub fn exit(&self, total_nodes: T) -> T {
        let e = self.teleport * (total_nodes - self.size) / total_nodes + self.outflow - self.internal;
        e.max(T::zero())
    }
}

/// `Σ_α plogp(p_α)`, the partition-independent part of the codelength.
pub(crate) fn node_entropy_term<T: Scalar>(rates: &[T]) -> T {
    rates.iter().map(|&p| plogp(p)).sum()
}

pub(crate) fn codelength_from_modules<T: Scalar>(modules: &[ModuleFlow<T>], total_nodes: T, node_term: T) -> T {
    let mut sum_exit = T::zero();
    let mut exit_terms = T::zero();
    let mut module_terms = T::zero();
    for m in modules {
        if m.size == T::zero() {
            continue;
        }
        let q = m.exit(total_nodes);
        sum_exit = sum_exit + q;
        exit_terms = exit_terms + plogp(q);
        module_terms = module_terms + plogp(q + m.flow);
    }
    plogp(sum_exit) - (exit_terms + exit_terms) - node_term + module_terms
}

/// Two-level map equation `q↷ H(Q) + Σ p_i⟳ H(P_i)` in bits.
pub fn map_equation<T: Scalar>(rates: &VisitRates<T>, partition: &Partition) -> Result<T> {
    let n = rates.node_count();
    if partition.len() != n {
        return Err(Error::Coverage { expected: n, got: partition.len() });
    }
    let mut modules = vec![ModuleFlow::<T>::default(); partition.cluster_count()];
    for (i, &c) in partition.assignment().iter().enumerate() {
        let m = &mut modules[c as usize];
        m.flow = m.flow + rates.node_rate[i];
        m.teleport = m.teleport + rates.teleport_rate[i];
        m.size = m.size + T::one();
    }
    for e in &rates.edges {
        let a = partition.cluster_of(e.src) as usize;
        modules[a].outflow = modules[a].outflow + e.flow;
        if partition.cluster_of(e.dst) as usize == a {
            modules[a].internal = modules[a].internal + e.flow;
        }
    }
    Ok(codelength_from_modules(&modules, T::from_count(n), node_entropy_term(&rates.node_rate)))
}
