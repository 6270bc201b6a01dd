use std::collections::HashMap;

use signpath::community::Partition;
use signpath::metapath::MetaPathSpec;
use signpath::net::{Direction, LayerKind, MultilayerNetwork, Sign};

/// Node of the explicitly augmented network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Vertex {
    User(u32),
    Cluster(LayerKind, u32),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Rel {
    R,
    M,
    FPos,
    FNeg,
    BelongR,
    BelongM,
}

/// Typed adjacency of the augmented graph with the target F pair removed.
pub struct Augmented {
    out: HashMap<(Rel, Vertex), Vec<Vertex>>,
    inc: HashMap<(Rel, Vertex), Vec<Vertex>>,
}

impl Augmented {
    pub fn build(net: &MultilayerNetwork, parts: Option<(&Partition, &Partition)>, hidden: (u32, u32)) -> Self {
        let mut aug = Augmented { out: HashMap::new(), inc: HashMap::new() };
        for e in net.edges(LayerKind::R) {
            aug.add(Rel::R, Vertex::User(e.src.0), Vertex::User(e.dst.0));
        }
        for e in net.edges(LayerKind::M) {
            aug.add(Rel::M, Vertex::User(e.src.0), Vertex::User(e.dst.0));
        }
        for e in net.edges(LayerKind::F) {
            if (e.src.0, e.dst.0) == hidden {
                continue;
            }
            let rel = if e.sign == Some(Sign::Positive) { Rel::FPos } else { Rel::FNeg };
            aug.add(rel, Vertex::User(e.src.0), Vertex::User(e.dst.0));
        }
        if let Some((pr, pm)) = parts {
            for (i, (&cr, &cm)) in pr.assignment().iter().zip(pm.assignment()).enumerate() {
                aug.add(Rel::BelongR, Vertex::User(i as u32), Vertex::Cluster(LayerKind::R, cr));
                aug.add(Rel::BelongM, Vertex::User(i as u32), Vertex::Cluster(LayerKind::M, cm));
            }
        }
        aug
    }

    fn add(&mut self, rel: Rel, a: Vertex, b: Vertex) {
        self.out.entry((rel, a)).or_default().push(b);
        self.inc.entry((rel, b)).or_default().push(a);
    }

    fn step(&self, rel: Rel, forward: bool, x: Vertex) -> &[Vertex] {
        let map = if forward { &self.out } else { &self.inc };
        map.get(&(rel, x)).map_or(&[], Vec::as_slice)
    }

    /// Exhaustive depth-first enumeration of walks matching `schema`.
    pub fn count(&self, schema: &[(Rel, bool)], from: Vertex, to: Vertex) -> u64 {
        match schema.split_first() {
            None => u64::from(from == to),
            Some((&(rel, fwd), rest)) => self.step(rel, fwd, from).iter().map(|&x| self.count(rest, x, to)).sum(),
        }
    }
}

pub fn schema_of(spec: &MetaPathSpec) -> Vec<(Rel, bool)> {
    let first = match spec.first.layer {
        LayerKind::R => Rel::R,
        LayerKind::M => Rel::M,
        LayerKind::F => unreachable!(),
    };
    let mut s = vec![(first, spec.first.direction == Direction::Forward)];
    if let Some(layer) = spec.bridge {
        let b = if layer == LayerKind::R { Rel::BelongR } else { Rel::BelongM };
        s.push((b, true));
        s.push((b, false));
    }
    let f = if spec.last.sign == Some(Sign::Positive) { Rel::FPos } else { Rel::FNeg };
    s.push((f, spec.last.direction == Direction::Forward));
    s
}
