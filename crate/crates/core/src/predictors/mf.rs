use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::net::{NodeId, Sign};
use crate::scalar::{dot, Scalar};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MfParams {
    pub rank: usize,
    pub lambda: f64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub seed: u64,
}

impl Default for MfParams {
    fn default() -> Self {
        MfParams { rank: 20, lambda: 0.05, epochs: 50, learning_rate: 0.05, seed: 0 }
    }
}

/// Low-rank sign model: the margin of (i, j) is `U_i · V_j`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(bound = "")]
pub struct MfModel<T: Scalar> {
    pub node_count: usize,
    pub rank: usize,
    /// Row-major `node_count × rank`.
    pub u: Vec<T>,
    pub v: Vec<T>,
    pub params: MfParams,
}

impl<T: Scalar> MfModel<T> {
    fn row(m: &[T], i: NodeId, k: usize) -> &[T] {
        &m[i.index() * k..(i.index() + 1) * k]
    }

    pub fn margin(&self, src: NodeId, dst: NodeId) -> Result<T> {
        for x in [src, dst] {
            if x.index() >= self.node_count {
                return Err(Error::NodeOutOfRange { node: x.0 as u64, node_count: self.node_count });
            }
        }
        Ok(dot(Self::row(&self.u, src, self.rank), Self::row(&self.v, dst, self.rank)))
    }

    /// Sign of the margin; exactly zero goes to +1.
    pub fn predict(&self, src: NodeId, dst: NodeId) -> Result<Sign> {
        Ok(if self.margin(src, dst)? >= T::zero() { Sign::Positive } else { Sign::Negative })
    }
}

/// `Σ (1 − s U_i·V_j)₊² + λ(‖U‖² + ‖V‖²)`
pub fn mf_objective<T: Scalar>(model: &MfModel<T>, edges: &[(NodeId, NodeId, Sign)]) -> T {
    let k = model.rank;
    let loss: T = edges
        .iter()
        .map(|&(i, j, s)| {
            let m = dot(MfModel::row(&model.u, i, k), MfModel::row(&model.v, j, k));
            let h = (T::one() - T::lit(s.value() as f64) * m).max(T::zero());
            h * h
        })
        .sum();
    let norm: T = model.u.iter().chain(&model.v).map(|&x| x * x).sum();
    loss + T::lit(model.params.lambda) * norm
}

/// Seeded SGD on the squared-hinge objective. Factors start uniform in
/// (−0.1, 0.1); each edge visit applies its loss gradient and a proximal
/// shrink carrying the node's share (1/degree) of the L2 penalty. Rows with
/// no training edges are shrunk once per epoch.
pub fn train_mf<T: Scalar>(
    edges: &[(NodeId, NodeId, Sign)],
    node_count: usize,
    params: &MfParams,
) -> Result<MfModel<T>> {
    if edges.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    if params.rank == 0 || params.lambda < 0.0 || params.learning_rate.is_nan() || params.learning_rate <= 0.0 {
        return Err(Error::DegenerateTraining(format!(
            "need rank ≥ 1, λ ≥ 0 and a positive learning rate, got {params:?}"
        )));
    }
    for &(i, j, _) in edges {
        for x in [i, j] {
            if x.index() >= node_count {
                return Err(Error::NodeOutOfRange { node: x.0 as u64, node_count });
            }
        }
    }
    let k = params.rank;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let mut init = |len: usize| -> Vec<T> { (0..len).map(|_| T::lit(rng.gen_range(-0.1..0.1))).collect() };
    let mut u = init(node_count * k);
    let mut v = init(node_count * k);

    let mut out_deg = vec![0usize; node_count];
    let mut in_deg = vec![0usize; node_count];
    for &(i, j, _) in edges {
        out_deg[i.index()] += 1;
        in_deg[j.index()] += 1;
    }
    let lambda = T::lit(params.lambda);
    let two = T::lit(2.0);
    let mut order: Vec<usize> = (0..edges.len()).collect();
    let mut ui_old = vec![T::zero(); k];
    for epoch in 0..params.epochs {
        let eta = T::lit(params.learning_rate / (1.0 + epoch as f64).sqrt());
        order.shuffle(&mut rng);
        for &e in &order {
            let (i, j, s) = edges[e];
            let sv = T::lit(s.value() as f64);
            let (ui, vj) = (i.index() * k, j.index() * k);
            let m = dot(&u[ui..ui + k], &v[vj..vj + k]);
            let g = two * (T::one() - sv * m).max(T::zero());
            let shrink_u = T::one() + two * eta * lambda / T::from_count(out_deg[i.index()]);
            let shrink_v = T::one() + two * eta * lambda / T::from_count(in_deg[j.index()]);
            ui_old.copy_from_slice(&u[ui..ui + k]);
            for c in 0..k {
                u[ui + c] = (u[ui + c] + eta * g * sv * v[vj + c]) / shrink_u;
            }
            for c in 0..k {
                v[vj + c] = (v[vj + c] + eta * g * sv * ui_old[c]) / shrink_v;
            }
        }
        let idle = T::one() + two * eta * lambda;
        for node in 0..node_count {
            if out_deg[node] == 0 {
                u[node * k..(node + 1) * k].iter_mut().for_each(|x| *x = *x / idle);
            }
            if in_deg[node] == 0 {
                v[node * k..(node + 1) * k].iter_mut().for_each(|x| *x = *x / idle);
            }
        }
    }
    Ok(MfModel { node_count, rank: k, u, v, params: params.clone() })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn all_positive() -> Vec<(NodeId, NodeId, Sign)> {
        vec![(0, 1), (1, 2), (2, 3), (3, 0), (0, 2)]
            .into_iter()
            .map(|(a, b)| (NodeId(a), NodeId(b), Sign::Positive))
            .collect()
    }

    #[test]
    fn realizable_all_positive() {
        let edges = all_positive();
        let p = MfParams { rank: 2, epochs: 200, ..MfParams::default() };
        let m = train_mf::<f64>(&edges, 4, &p).unwrap();
        for &(i, j, s) in &edges {
            assert_eq!(m.predict(i, j).unwrap(), s);
        }
    }

    #[test]
    fn huge_lambda_collapses_to_tie() {
        let mut edges = all_positive();
        edges.push((NodeId(1), NodeId(3), Sign::Negative));
        let p = MfParams { rank: 2, lambda: 1e6, ..MfParams::default() };
        let m = train_mf::<f64>(&edges, 4, &p).unwrap();
        for i in 0..4 {
            for j in 0..4 {
                assert_eq!(m.predict(NodeId(i), NodeId(j)).unwrap(), Sign::Positive);
            }
        }
    }

    #[test]
    fn empty_training_set_is_an_error() {
        assert!(matches!(train_mf::<f64>(&[], 3, &MfParams::default()), Err(Error::EmptyTrainingSet)));
    }
}
