use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signpath::net::{LayerKind, MultilayerNetwork, SignedEdge};

pub fn h(x: f64) -> f64 {
    if x > 0.0 {
        x * x.log2()
    } else {
        0.0
    }
}

/// Row-stochastic step matrix including teleportation.
pub fn step_matrix(net: &MultilayerNetwork, layer: LayerKind, tau: f64) -> Vec<Vec<f64>> {
    let n = net.node_count();
    let mut w = vec![vec![0.0; n]; n];
    for e in net.edges(layer) {
        w[e.src.index()][e.dst.index()] += e.weight as f64;
    }
    (0..n)
        .map(|a| {
            let total: f64 = w[a].iter().sum();
            let t = if total > 0.0 { tau } else { 1.0 };
            (0..n).map(|b| t / n as f64 + if total > 0.0 { (1.0 - t) * w[a][b] / total } else { 0.0 }).collect()
        })
        .collect()
}

pub fn dense_rates(step: &[Vec<f64>]) -> Vec<f64> {
    let n = step.len();
    let mut p = vec![1.0 / n as f64; n];
    for _ in 0..20_000 {
        let mut next = vec![0.0; n];
        for a in 0..n {
            for b in 0..n {
                next[b] += p[a] * step[a][b];
            }
        }
        let diff: f64 = next.iter().zip(&p).map(|(x, y)| (x - y).abs()).sum();
        p = next;
        if diff < 1e-16 {
            break;
        }
    }
    p
}

/// Two-level map equation straight from per-step module exit probabilities.
pub fn definition_codelength(step: &[Vec<f64>], p: &[f64], labels: &[u32]) -> f64 {
    let k = *labels.iter().max().unwrap() as usize + 1;
    let mut exit = vec![0.0; k];
    let mut mass = vec![0.0; k];
    for a in 0..p.len() {
        mass[labels[a] as usize] += p[a];
        for b in 0..p.len() {
            if labels[a] != labels[b] {
                exit[labels[a] as usize] += p[a] * step[a][b];
            }
        }
    }
    let q: f64 = exit.iter().sum();
    h(q) - 2.0 * exit.iter().map(|&x| h(x)).sum::<f64>() - p.iter().map(|&x| h(x)).sum::<f64>()
        + exit.iter().zip(&mass).map(|(&e, &m)| h(e + m)).sum::<f64>()
}

pub fn weighted_random(seed: u64, n: u32) -> MultilayerNetwork {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    let p = rng.gen_range(0.02..0.2);
    for u in 0..n {
        for v in 0..n {
            if u != v && rng.gen::<f64>() < p {
                for _ in 0..rng.gen_range(1..4) {
                    edges.push(SignedEdge::unsigned(LayerKind::M, u, v));
                }
            }
        }
    }
    MultilayerNetwork::build(n as usize, edges).unwrap()
}
