//! Greedy two-level map-equation optimizer: local moves from singletons,
//! contraction into super-nodes, repeated until no level merges anything,
//! then one refinement round of single-node moves.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::flow::{codelength_from_modules, node_entropy_term, ModuleFlow};
use super::{visit_rates, Partition, VisitRates};
use crate::error::Result;
use crate::net::{LayerKind, MultilayerNetwork};
use crate::scalar::{plogp, Scalar};

pub const DEFAULT_TELEPORT: f64 = 0.15;

const MIN_IMPROVEMENT: f64 = 1e-12;
const MAX_SWEEPS: usize = 200;

#[derive(Clone, Debug)]
pub struct ClusterOutcome<T> {
    pub partition: Partition,
    /// Codelength of the singleton start followed by the value after every sweep.
    pub codelength_trace: Vec<T>,
}

impl<T: Scalar> ClusterOutcome<T> {
    pub fn initial_codelength(&self) -> T {
        self.codelength_trace[0]
    }

    pub fn final_codelength(&self) -> T {
        *self.codelength_trace.last().expect("trace is never empty")
    }
}

pub fn cluster_layer<T: Scalar>(
    net: &MultilayerNetwork,
    layer: LayerKind,
    teleport: f64,
    seed: u64,
) -> Result<Partition> {
    Ok(cluster_layer_traced::<T>(net, layer, teleport, seed)?.partition)
}

pub fn cluster_layer_traced<T: Scalar>(
    net: &MultilayerNetwork,
    layer: LayerKind,
    teleport: f64,
    seed: u64,
) -> Result<ClusterOutcome<T>> {
    let rates = visit_rates::<T>(net, layer, T::lit(teleport))?;
    let n = rates.node_count();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = FlowGraph::from_rates(&rates);
    let total_nodes = T::from_count(n);
    let node_term = node_entropy_term(&rates.node_rate);

    // original node -> current module label
    let mut labels: Vec<usize> = (0..n).collect();
    let mut trace = Vec::new();
    let mut graph = base.clone();
    loop {
        let mut state = ModuleState::new(&graph, (0..graph.len()).collect(), total_nodes, node_term);
        if trace.is_empty() {
            trace.push(state.codelength());
        }
        state.sweep_until_stable(&graph, &mut rng, &mut trace);
        let (dense, count) = densify(&state.module_of);
        for l in labels.iter_mut() {
            *l = dense[*l];
        }
        if count == graph.len() {
            break;
        }
        graph = graph.contract(&dense, count);
    }

    if n > 0 {
        let mut state = ModuleState::new(&base, labels.clone(), total_nodes, node_term);
        state.sweep_until_stable(&base, &mut rng, &mut trace);
        labels = state.module_of;
    }

    let partition = Partition::from_labels(layer, &labels)?;
    Ok(ClusterOutcome { partition, codelength_trace: trace })
}

/// Maps the used labels onto `0..count` in ascending label order.
fn densify(labels: &[usize]) -> (Vec<usize>, usize) {
    let mut used: Vec<usize> = labels.to_vec();
    used.sort_unstable();
    used.dedup();
    let mut lookup = vec![usize::MAX; labels.len().max(used.last().map_or(0, |&m| m + 1))];
    for (new, &old) in used.iter().enumerate() {
        lookup[old] = new;
    }
    (labels.iter().map(|&l| lookup[l]).collect(), used.len())
}

#[derive(Clone, Debug)]
struct FlowGraph<T> {
    node: Vec<ModuleFlow<T>>,
    out: Vec<Vec<(usize, T)>>,
    inc: Vec<Vec<(usize, T)>>,
}

impl<T: Scalar> FlowGraph<T> {
    fn from_rates(rates: &VisitRates<T>) -> Self {
        let n = rates.node_count();
        let mut node: Vec<ModuleFlow<T>> = (0..n)
            .map(|i| ModuleFlow {
                flow: rates.node_rate[i],
                teleport: rates.teleport_rate[i],
                size: T::one(),
                outflow: T::zero(),
                internal: T::zero(),
            })
            .collect();
        let mut out = vec![Vec::new(); n];
        let mut inc = vec![Vec::new(); n];
        for e in &rates.edges {
            let (a, b) = (e.src.index(), e.dst.index());
            node[a].outflow = node[a].outflow + e.flow;
            out[a].push((b, e.flow));
            inc[b].push((a, e.flow));
        }
        FlowGraph { node, out, inc }
    }

    fn len(&self) -> usize {
        self.node.len()
    }

    fn contract(&self, module_of: &[usize], count: usize) -> Self {
        let mut node = vec![ModuleFlow::<T>::default(); count];
        for (a, s) in self.node.iter().enumerate() {
            let m = &mut node[module_of[a]];
            m.flow = m.flow + s.flow;
            m.teleport = m.teleport + s.teleport;
            m.size = m.size + s.size;
            m.outflow = m.outflow + s.outflow;
            m.internal = m.internal + s.internal;
        }
        let mut links: Vec<(usize, usize, T)> = Vec::new();
        for (a, row) in self.out.iter().enumerate() {
            let ma = module_of[a];
            for &(b, f) in row {
                let mb = module_of[b];
                if ma == mb {
                    node[ma].internal = node[ma].internal + f;
                } else {
                    links.push((ma, mb, f));
                }
            }
        }
        links.sort_by_key(|&(a, b, _)| (a, b));
        let mut out = vec![Vec::new(); count];
        let mut inc = vec![Vec::new(); count];
        let mut i = 0;
        while i < links.len() {
            let (a, b, mut f) = links[i];
            let mut j = i + 1;
            while j < links.len() && links[j].0 == a && links[j].1 == b {
                f = f + links[j].2;
                j += 1;
            }
            out[a].push((b, f));
            inc[b].push((a, f));
            i = j;
        }
        FlowGraph { node, out, inc }
    }
}

struct ModuleState<T> {
    module_of: Vec<usize>,
    modules: Vec<ModuleFlow<T>>,
    total_nodes: T,
    node_term: T,
    sum_exit: T,
    // scratch for flows between the moving node and each module
    to_module: Vec<T>,
    from_module: Vec<T>,
    touched: Vec<usize>,
}

impl<T: Scalar> ModuleState<T> {
    fn new(graph: &FlowGraph<T>, module_of: Vec<usize>, total_nodes: T, node_term: T) -> Self {
        let k = module_of.iter().copied().max().map_or(0, |m| m + 1).max(graph.len());
        let mut modules = vec![ModuleFlow::<T>::default(); k];
        for (a, s) in graph.node.iter().enumerate() {
            let m = &mut modules[module_of[a]];
            m.flow = m.flow + s.flow;
            m.teleport = m.teleport + s.teleport;
            m.size = m.size + s.size;
            m.outflow = m.outflow + s.outflow;
            m.internal = m.internal + s.internal;
        }
        for (a, row) in graph.out.iter().enumerate() {
            for &(b, f) in row {
                if module_of[a] == module_of[b] {
                    modules[module_of[a]].internal = modules[module_of[a]].internal + f;
                }
            }
        }
        let mut state = ModuleState {
            module_of,
            modules,
            total_nodes,
            node_term,
            sum_exit: T::zero(),
            to_module: vec![T::zero(); k],
            from_module: vec![T::zero(); k],
            touched: Vec::new(),
        };
        state.sum_exit = state.modules.iter().map(|m| m.exit(total_nodes)).sum();
        state
    }

    fn codelength(&self) -> T {
        codelength_from_modules(&self.modules, self.total_nodes, self.node_term)
    }

    fn sweep_until_stable(&mut self, graph: &FlowGraph<T>, rng: &mut ChaCha8Rng, trace: &mut Vec<T>) {
        let mut order: Vec<usize> = (0..graph.len()).collect();
        let min_gain = T::lit(MIN_IMPROVEMENT);
        for _ in 0..MAX_SWEEPS {
            let before = *trace.last().expect("trace starts with the initial codelength");
            order.shuffle(rng);
            let mut moved = 0;
            for &a in &order {
                if self.try_move(graph, a) {
                    moved += 1;
                }
            }
            if moved == 0 {
                break;
            }
            self.sum_exit = self.modules.iter().map(|m| m.exit(self.total_nodes)).sum();
            let after = self.codelength();
            trace.push(after);
            if before - after < min_gain {
                break;
            }
        }
    }

    fn with_node(&self, m: &ModuleFlow<T>, s: &ModuleFlow<T>, link: T, sign: T) -> ModuleFlow<T> {
        ModuleFlow {
            flow: m.flow + sign * s.flow,
            teleport: m.teleport + sign * s.teleport,
            size: m.size + sign * s.size,
            outflow: m.outflow + sign * s.outflow,
            internal: m.internal + sign * (s.internal + link),
        }
    }

    /// Moves `a` to the neighboring module with the largest codelength
    /// decrease, ties going to the smallest module id.
    fn try_move(&mut self, graph: &FlowGraph<T>, a: usize) -> bool {
        let current = self.module_of[a];
        self.touched.clear();
        for &(b, f) in &graph.out[a] {
            let m = self.module_of[b];
            if self.to_module[m] == T::zero() && self.from_module[m] == T::zero() {
                self.touched.push(m);
            }
            self.to_module[m] = self.to_module[m] + f;
        }
        for &(b, f) in &graph.inc[a] {
            let m = self.module_of[b];
            if self.to_module[m] == T::zero() && self.from_module[m] == T::zero() {
                self.touched.push(m);
            }
            self.from_module[m] = self.from_module[m] + f;
        }
        self.touched.sort_unstable();
        self.touched.dedup();

        let s = graph.node[a];
        let tn = self.total_nodes;
        let old_cur = self.modules[current];
        let link_cur = self.to_module[current] + self.from_module[current];
        let new_cur = self.with_node(&old_cur, &s, link_cur, -T::one());
        let old_cur_exit = old_cur.exit(tn);
        let new_cur_exit = new_cur.exit(tn);

        let mut best: Option<(usize, T, ModuleFlow<T>)> = None;
        for &m in &self.touched {
            if m == current {
                continue;
            }
            let old_t = self.modules[m];
            let new_t = self.with_node(&old_t, &s, self.to_module[m] + self.from_module[m], T::one());
            let old_t_exit = old_t.exit(tn);
            let new_t_exit = new_t.exit(tn);
            let sum_exit = self.sum_exit - old_cur_exit - old_t_exit + new_cur_exit + new_t_exit;
            let two = T::lit(2.0);
            let delta = plogp(sum_exit)
                - plogp(self.sum_exit)
                - two * (plogp(new_cur_exit) + plogp(new_t_exit) - plogp(old_cur_exit) - plogp(old_t_exit))
                + plogp(new_cur_exit + new_cur.flow)
                + plogp(new_t_exit + new_t.flow)
                - plogp(old_cur_exit + old_cur.flow)
                - plogp(old_t_exit + old_t.flow);
            if best.as_ref().is_none_or(|(_, d, _)| delta < *d) {
                best = Some((m, delta, new_t));
            }
        }
        for &m in &self.touched {
            self.to_module[m] = T::zero();
            self.from_module[m] = T::zero();
        }

        match best {
            Some((target, delta, new_t)) if delta < -T::lit(MIN_IMPROVEMENT) => {
                let old_t_exit = self.modules[target].exit(tn);
                self.sum_exit = self.sum_exit - old_cur_exit - old_t_exit + new_cur_exit + new_t.exit(tn);
                self.modules[current] = new_cur;
                self.modules[target] = new_t;
                self.module_of[a] = target;
                true
            }
            _ => false,
        }
    }
}
