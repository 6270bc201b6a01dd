#![allow(dead_code)]

pub mod flow;
pub mod metrics;
pub mod paths;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signpath::community::Partition;
use signpath::net::{LayerKind, MultilayerNetwork, NodeId, Sign, SignedEdge};

/// Random three-layer network with about `deg` out-edges per node and layer.
pub fn random_network(seed: u64, n: u32, deg: f64) -> MultilayerNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let p = (deg / n as f64).min(1.0);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in 0..n {
            if u == v {
                continue;
            }
            if rng.gen::<f64>() < p {
                edges.push(SignedEdge::unsigned(LayerKind::M, u, v));
            }
            if rng.gen::<f64>() < p {
                edges.push(SignedEdge::unsigned(LayerKind::R, u, v));
            }
            if rng.gen::<f64>() < p {
                let s = if rng.gen::<f64>() < 0.6 { Sign::Positive } else { Sign::Negative };
                edges.push(SignedEdge::f(u, v, s));
            }
        }
    }
    MultilayerNetwork::build(n as usize, edges).unwrap()
}

pub fn random_labels(seed: u64, n: usize, k: u32) -> Vec<u32> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| rng.gen_range(0..k)).collect()
}

pub fn random_partition(seed: u64, n: usize, k: u32, layer: LayerKind) -> Partition {
    Partition::from_labels(layer, &random_labels(seed, n, k)).unwrap()
}

/// Half existing F edges, half uniform ordered pairs.
pub fn sample_pairs(seed: u64, net: &MultilayerNetwork, count: usize) -> Vec<(NodeId, NodeId)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let f = net.f_edges();
    let n = net.node_count() as u32;
    (0..count)
        .map(|i| {
            if i % 2 == 0 && !f.is_empty() {
                let (u, v, _) = f[rng.gen_range(0..f.len())];
                (u, v)
            } else {
                let u = rng.gen_range(0..n);
                let mut v = rng.gen_range(0..n - 1);
                if v >= u {
                    v += 1;
                }
                (NodeId(u), NodeId(v))
            }
        })
        .collect()
}
