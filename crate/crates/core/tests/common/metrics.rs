use std::collections::{BTreeSet, HashSet};

use signpath::net::{Direction, LayerKind, NodeId};
use signpath::MultilayerNetwork;

/// τ_b from its pairwise definition.
pub fn tau_b_quadratic(xs: &[u32], ys: &[u32]) -> f64 {
    let n = xs.len();
    let (mut concordant, mut discordant, mut tie_x, mut tie_y) = (0i64, 0i64, 0i64, 0i64);
    for i in 0..n {
        for j in i + 1..n {
            let dx = (xs[i] as i64 - xs[j] as i64).signum();
            let dy = (ys[i] as i64 - ys[j] as i64).signum();
            tie_x += i64::from(dx == 0);
            tie_y += i64::from(dy == 0);
            match dx * dy {
                1 => concordant += 1,
                -1 => discordant += 1,
                _ => {}
            }
        }
    }
    let n0 = (n * (n - 1) / 2) as i64;
    (concordant - discordant) as f64 / (((n0 - tie_x) as f64) * ((n0 - tie_y) as f64)).sqrt()
}

pub fn active(net: &MultilayerNetwork, layer: LayerKind, direction: Direction) -> HashSet<NodeId> {
    net.edges(layer).iter().map(|e| if direction == Direction::Forward { e.src } else { e.dst }).collect()
}

pub fn pair_set(net: &MultilayerNetwork, layer: LayerKind) -> BTreeSet<(NodeId, NodeId)> {
    net.edges(layer).iter().map(|e| (e.src, e.dst)).collect()
}
