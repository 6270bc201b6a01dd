//! Seeded three-layer network generator: planted-partition M and R layers
//! with correlated memberships, and an F layer whose signs follow a
//! logistic model of same-R-cluster membership and embeddedness.
//!
//! All randomness comes from one ChaCha8 stream, drawn in this order:
//! R memberships, M memberships, R edges, M edges, then F initiations one at
//! a time (initiator, locality coin, closure coin, local picks or uniform
//! recipient, sign).

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{Direction, LayerKind, MultilayerNetwork, NodeId, RelationStep, Sign, SignedEdge};
use crate::scalar::sigmoid;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LayerDensity {
    pub p_in: f64,
    pub p_out: f64,
}

impl LayerDensity {
    /// Densities whose expected directed edge count is `target` for
    /// `clusters` near-equal blocks with `p_in = ratio · p_out`.
    pub fn for_target(node_count: usize, clusters: usize, target: f64, ratio: f64) -> Self {
        let sizes = block_sizes(node_count, clusters);
        let within: f64 = sizes.iter().map(|&s| (s * s.saturating_sub(1)) as f64).sum();
        let n = node_count as f64;
        let between = n * n - sizes.iter().map(|&s| (s * s) as f64).sum::<f64>();
        let p_out = target / (ratio * within + between);
        LayerDensity { p_in: (ratio * p_out).min(1.0), p_out }
    }

    pub fn expected_edges(&self, node_count: usize, clusters: usize) -> f64 {
        let sizes = block_sizes(node_count, clusters);
        let within: f64 = sizes.iter().map(|&s| (s * s.saturating_sub(1)) as f64).sum();
        let n = node_count as f64;
        let between = n * n - sizes.iter().map(|&s| (s * s) as f64).sum::<f64>();
        self.p_in * within + self.p_out * between
    }
}

fn block_sizes(n: usize, k: usize) -> Vec<usize> {
    (0..k).map(|b| n / k + usize::from(b < n % k)).collect()
}

/// Log-odds of a positive response: `α + β_cluster·[same R cluster] + β_embed·embeddedness`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignModel {
    pub alpha: f64,
    pub beta_cluster: f64,
    pub beta_embed: f64,
}

impl SignModel {
    pub fn p_positive(&self, same_cluster: bool, embeddedness: usize) -> f64 {
        let same = if same_cluster { 1.0 } else { 0.0 };
        sigmoid(self.alpha + self.beta_cluster * same + self.beta_embed * embeddedness as f64)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GenConfig {
    pub node_count: usize,
    pub clusters_r: usize,
    pub clusters_m: usize,
    pub r: LayerDensity,
    pub m: LayerDensity,
    /// Probability that a node's M cluster index equals its R cluster index.
    pub membership_correlation: f64,
    pub f_edge_count: usize,
    /// Probability that an initiation targets an F-neighbor of one of the
    /// initiator's M/R neighbors instead of a uniform recipient.
    #[serde(default)]
    pub local_initiation: f64,
    /// Within a local initiation, probability that the intermediate user is
    /// an F-neighbor of the initiator rather than an M/R neighbor.
    #[serde(default)]
    pub triadic_closure: f64,
    pub sign_model: SignModel,
    pub seed: u64,
}

impl GenConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.node_count < 2 {
            return bad(format!("need at least 2 nodes, got {}", self.node_count));
        }
        if self.node_count > u32::MAX as usize {
            return bad("node_count exceeds the u32 id space".into());
        }
        for (name, k) in [("clusters_r", self.clusters_r), ("clusters_m", self.clusters_m)] {
            if k == 0 || k > self.node_count {
                return bad(format!("{name} = {k} must be in 1..={}", self.node_count));
            }
        }
        for (name, d) in [("r", &self.r), ("m", &self.m)] {
            if !(0.0 <= d.p_out && d.p_out <= d.p_in && d.p_in <= 1.0) {
                return bad(format!("layer {name}: need 0 ≤ p_out ≤ p_in ≤ 1, got {d:?}"));
            }
        }
        for (name, p) in [
            ("membership_correlation", self.membership_correlation),
            ("local_initiation", self.local_initiation),
            ("triadic_closure", self.triadic_closure),
        ] {
            if !(0.0..=1.0).contains(&p) {
                return bad(format!("{name} = {p} outside [0, 1]"));
            }
        }
        let s = &self.sign_model;
        if !(s.alpha.is_finite() && s.beta_cluster.is_finite() && s.beta_embed.is_finite()) {
            return bad("sign model coefficients must be finite".into());
        }
        let n = self.node_count as u64;
        let available = n * (n - 1);
        if self.f_edge_count as u64 > available {
            return Err(Error::Capacity { requested: self.f_edge_count as u64, available });
        }
        Ok(())
    }
}

/// Presets: `desk` (2000 users) and `paper-scale` (44124 users, about
/// 1.4M R, 1.35M M and 183k F edges).
pub fn preset(name: &str) -> Result<GenConfig> {
    match name {
        "desk" => {
            let (n, k) = (2000, 4);
            Ok(GenConfig {
                node_count: n,
                clusters_r: k,
                clusters_m: k,
                r: LayerDensity::for_target(n, k, 65_000.0, 25.0),
                m: LayerDensity::for_target(n, k, 60_000.0, 25.0),
                membership_correlation: 0.8,
                f_edge_count: 8_000,
                local_initiation: 0.8,
                triadic_closure: 0.3,
                sign_model: SignModel { alpha: -1.0, beta_cluster: 3.0, beta_embed: 0.4 },
                seed: 7,
            })
        }
        "paper-scale" => {
            let (n, k) = (44_124, 40);
            Ok(GenConfig {
                node_count: n,
                clusters_r: k,
                clusters_m: k,
                r: LayerDensity::for_target(n, k, 1_448_620.0, 25.0),
                m: LayerDensity::for_target(n, k, 1_354_606.0, 25.0),
                membership_correlation: 0.8,
                f_edge_count: 182_598,
                local_initiation: 0.8,
                triadic_closure: 0.3,
                sign_model: SignModel { alpha: -1.0, beta_cluster: 3.0, beta_embed: 0.4 },
                seed: 7,
            })
        }
        other => Err(Error::UnknownPreset(other.to_string())),
    }
}

pub const PRESETS: [&str; 2] = ["desk", "paper-scale"];

/// Target edge counts (F, M, R) a preset is calibrated to.
pub fn preset_targets(name: &str) -> Option<(usize, usize, usize)> {
    match name {
        "desk" => Some((8_000, 60_000, 65_000)),
        "paper-scale" => Some((182_598, 1_354_606, 1_448_620)),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SignRecord {
    pub src: NodeId,
    pub dst: NodeId,
    pub same_cluster: bool,
    /// Embeddedness at the moment the initiation was drawn.
    pub embeddedness: usize,
    pub p_positive: f64,
    pub sign: Sign,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GroundTruth {
    pub membership_r: Vec<u32>,
    pub membership_m: Vec<u32>,
    pub sign_model: SignModel,
    /// F initiations in generation order.
    pub f_edges: Vec<SignRecord>,
}

#[derive(Clone, Debug)]
pub struct Generated {
    pub network: MultilayerNetwork,
    pub truth: GroundTruth,
}

fn planted_edges(
    rng: &mut ChaCha8Rng,
    layer: LayerKind,
    membership: &[u32],
    clusters: usize,
    density: &LayerDensity,
    out: &mut Vec<SignedEdge>,
) {
    let mut blocks: Vec<Vec<u32>> = vec![Vec::new(); clusters];
    for (i, &c) in membership.iter().enumerate() {
        blocks[c as usize].push(i as u32);
    }
    for (u, &cu) in membership.iter().enumerate() {
        for (b, members) in blocks.iter().enumerate() {
            let p = if b as u32 == cu { density.p_in } else { density.p_out };
            sample_positions(rng, members.len(), p, |pos| {
                let v = members[pos];
                if v as usize != u {
                    out.push(SignedEdge::unsigned(layer, u as u32, v));
                }
            });
        }
    }
}

/// Bernoulli(p) selection of positions `0..len` by geometric skipping.
fn sample_positions(rng: &mut ChaCha8Rng, len: usize, p: f64, mut take: impl FnMut(usize)) {
    if p <= 0.0 || len == 0 {
        return;
    }
    if p >= 1.0 {
        (0..len).for_each(take);
        return;
    }
    let log_q = (1.0 - p).ln();
    let mut pos: i64 = -1;
    loop {
        let r: f64 = rng.gen();
        let skip = ((1.0 - r).ln() / log_q).floor();
        if !skip.is_finite() || skip >= len as f64 {
            return;
        }
        pos += skip as i64 + 1;
        if pos >= len as i64 {
            return;
        }
        take(pos as usize);
    }
}

fn common_count(a: &HashSet<u32>, b: &HashSet<u32>, u: u32, v: u32) -> usize {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small.iter().filter(|&&x| x != u && x != v && large.contains(&x)).count()
}

pub fn generate(cfg: &GenConfig) -> Result<Generated> {
    cfg.validate()?;
    let n = cfg.node_count;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);

    let mut perm: Vec<u32> = (0..n as u32).collect();
    perm.shuffle(&mut rng);
    let mut membership_r = vec![0u32; n];
    for (slot, &node) in perm.iter().enumerate() {
        membership_r[node as usize] = (slot % cfg.clusters_r) as u32;
    }
    let km = cfg.clusters_m as u32;
    let membership_m: Vec<u32> = membership_r
        .iter()
        .map(|&cr| {
            let aligned = cr % km;
            if km == 1 || rng.gen::<f64>() < cfg.membership_correlation {
                aligned
            } else {
                let other = rng.gen_range(0..km - 1);
                if other >= aligned {
                    other + 1
                } else {
                    other
                }
            }
        })
        .collect();

    let mut source = Vec::new();
    planted_edges(&mut rng, LayerKind::R, &membership_r, cfg.clusters_r, &cfg.r, &mut source);
    planted_edges(&mut rng, LayerKind::M, &membership_m, cfg.clusters_m, &cfg.m, &mut source);
    let source_net = MultilayerNetwork::build(n, source.iter().copied())?;

    let relations = [
        RelationStep::source(LayerKind::R, Direction::Forward),
        RelationStep::source(LayerKind::R, Direction::Inverse),
        RelationStep::source(LayerKind::M, Direction::Forward),
        RelationStep::source(LayerKind::M, Direction::Inverse),
    ];
    let source_neighbors: Vec<Vec<NodeId>> =
        source_net.nodes().map(|u| relations.iter().flat_map(|&s| source_net.neighbors(u, s)).collect()).collect();

    let mut f_any: Vec<Vec<u32>> = vec![Vec::new(); n];
    let mut f_pos: Vec<HashSet<u32>> = vec![HashSet::new(); n];
    let mut existing: HashSet<u64> = HashSet::with_capacity(cfg.f_edge_count);
    let mut records = Vec::with_capacity(cfg.f_edge_count);
    let mut attempts: u64 = 0;
    let attempt_budget = 1_000 * cfg.f_edge_count as u64 + 1_000_000;
    while records.len() < cfg.f_edge_count {
        attempts += 1;
        if attempts > attempt_budget {
            return Err(Error::Capacity { requested: cfg.f_edge_count as u64, available: records.len() as u64 });
        }
        let u = rng.gen_range(0..n as u32);
        let mut v = None;
        if rng.gen::<f64>() < cfg.local_initiation {
            let closing = rng.gen::<f64>() < cfg.triadic_closure;
            let w = if closing {
                let nbrs = &f_any[u as usize];
                (!nbrs.is_empty()).then(|| nbrs[rng.gen_range(0..nbrs.len())] as usize)
            } else {
                let nbrs = &source_neighbors[u as usize];
                (!nbrs.is_empty()).then(|| nbrs[rng.gen_range(0..nbrs.len())].index())
            };
            if let Some(w) = w {
                let fl = &f_any[w];
                if !fl.is_empty() {
                    let cand = fl[rng.gen_range(0..fl.len())];
                    if cand != u {
                        v = Some(cand);
                    }
                }
            }
        }
        let v = v.unwrap_or_else(|| {
            let r = rng.gen_range(0..n as u32 - 1);
            if r >= u {
                r + 1
            } else {
                r
            }
        });
        let key = ((u as u64) << 32) | v as u64;
        if existing.contains(&key) {
            continue;
        }
        let embeddedness = common_count(&f_pos[u as usize], &f_pos[v as usize], u, v);
        let same_cluster = membership_r[u as usize] == membership_r[v as usize];
        let p_positive = cfg.sign_model.p_positive(same_cluster, embeddedness);
        let sign = if rng.gen::<f64>() < p_positive { Sign::Positive } else { Sign::Negative };
        existing.insert(key);
        f_any[u as usize].push(v);
        f_any[v as usize].push(u);
        if sign.is_positive() {
            f_pos[u as usize].insert(v);
            f_pos[v as usize].insert(u);
        }
        records.push(SignRecord { src: NodeId(u), dst: NodeId(v), same_cluster, embeddedness, p_positive, sign });
    }

    let f_edges = records.iter().map(|r| SignedEdge::f(r.src.0, r.dst.0, r.sign));
    let network = MultilayerNetwork::build(n, source.into_iter().chain(f_edges))?;
    Ok(Generated {
        network,
        truth: GroundTruth { membership_r, membership_m, sign_model: cfg.sign_model.clone(), f_edges: records },
    })
}
