mod common;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use signpath::eval::{balanced_accuracy, Confusion};
use signpath::net::{LayerKind, NodeId, Sign};
use signpath::predictors::{
    mf_objective, nbsp_features, svm_objective, train_mf, train_svm, triad_index, ClassWeighting, ClassWeights,
    MfParams, SvmParams, NBSP_WIDTH,
};

use common::{random_network, sample_pairs};

fn noisy_1d(seed: u64, n: usize, positive_share: f64, noise: f64) -> (Vec<Vec<f64>>, Vec<Sign>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = Vec::new();
    let mut labels = Vec::new();
    for _ in 0..n {
        let y = if rng.gen::<f64>() < positive_share { Sign::Positive } else { Sign::Negative };
        let center = if y.is_positive() { 1.0 } else { -1.0 };
        rows.push(vec![center + noise * (rng.gen::<f64>() * 2.0 - 1.0)]);
        labels.push(y);
    }
    (rows, labels)
}

fn ternary(lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> (f64, f64) {
    let (mut a, mut b) = (lo, hi);
    for _ in 0..200 {
        let m1 = a + (b - a) / 3.0;
        let m2 = b - (b - a) / 3.0;
        if f(m1) <= f(m2) {
            b = m2;
        } else {
            a = m1;
        }
    }
    let x = (a + b) / 2.0;
    (x, f(x))
}

#[test]
fn pegasos_reaches_the_reference_optimum() {
    let (rows, labels) = noisy_1d(4, 60, 0.5, 1.6);
    let lambda = 0.01;
    let weights = ClassWeights { positive: 1.0, negative: 1.0 };
    let objective = |w: f64, b: f64| svm_objective(&[w], b, &rows, &labels, lambda, &weights);
    // the objective is jointly convex, so min over b is convex in w
    let (_, best) = ternary(-20.0, 20.0, |w| ternary(-20.0, 20.0, |b| objective(w, b)).1);
    let params = SvmParams { lambda, epochs: 3000, seed: 2 };
    let model = train_svm(&rows, &labels, &params, ClassWeighting::Uniform).unwrap();
    let got = objective(model.weights[0], model.bias);
    assert!(got >= best - 1e-9);
    assert!(got - best < 2e-3, "pegasos {got} vs optimum {best}");
}

#[test]
fn suboptimality_shrinks_as_budgets_double() {
    let (rows, labels) = noisy_1d(9, 80, 0.5, 1.4);
    let lambda = 0.01;
    let weights = ClassWeights { positive: 1.0, negative: 1.0 };
    let objective = |w: f64, b: f64| svm_objective(&[w], b, &rows, &labels, lambda, &weights);
    let (_, best) = ternary(-20.0, 20.0, |w| ternary(-20.0, 20.0, |b| objective(w, b)).1);
    let mut gaps = Vec::new();
    for epochs in [1, 2, 4, 8, 16, 32, 64, 128, 256, 512] {
        let m = train_svm(&rows, &labels, &SvmParams { lambda, epochs, seed: 5 }, ClassWeighting::Uniform).unwrap();
        let gap = objective(m.weights[0], m.bias) - best;
        assert!(gap > -1e-9);
        gaps.push((epochs, gap));
    }
    // single budgets wobble, but the gap stays under a 1/T envelope
    for &(epochs, gap) in &gaps {
        assert!(gap * epochs as f64 <= 0.1, "{gaps:?}");
    }
    assert!(gaps[gaps.len() - 1].1 < gaps[0].1 / 100.0, "{gaps:?}");
}

#[test]
fn scaling_features_and_lambda_keeps_decisions() {
    let (rows, labels) = noisy_1d(12, 40, 0.5, 0.5);
    let base =
        train_svm(&rows, &labels, &SvmParams { lambda: 1e-2, epochs: 200, seed: 3 }, ClassWeighting::Balanced).unwrap();
    for c in [0.1, 10.0] {
        let scaled: Vec<Vec<f64>> = rows.iter().map(|r| r.iter().map(|x| x * c).collect()).collect();
        let params = SvmParams { lambda: 1e-2 * c * c, epochs: 200, seed: 3 };
        let m = train_svm(&scaled, &labels, &params, ClassWeighting::Balanced).unwrap();
        for (x, xs) in rows.iter().zip(&scaled) {
            assert_eq!(base.predict(x).unwrap(), m.predict(xs).unwrap());
        }
    }
}

fn training_ba(rows: &[Vec<f64>], labels: &[Sign], weighting: ClassWeighting, seed: u64) -> f64 {
    let m = train_svm(rows, labels, &SvmParams { lambda: 1e-3, epochs: 100, seed }, weighting).unwrap();
    let c = Confusion::from_pairs(labels.iter().zip(rows).map(|(&y, x)| (y, m.predict(x).unwrap())));
    balanced_accuracy(&c).unwrap()
}

#[test]
fn class_weighting_helps_on_imbalanced_separable_toy() {
    for seed in 0..5 {
        let (rows, labels) = noisy_1d(seed, 200, 0.9, 0.9);
        let weighted = training_ba(&rows, &labels, ClassWeighting::Balanced, seed);
        let plain = training_ba(&rows, &labels, ClassWeighting::Uniform, seed);
        assert!(weighted >= plain, "seed {seed}: {weighted} < {plain}");
    }
}

#[test]
fn mf_training_lowers_its_objective() {
    let net = random_network(21, 60, 4.0);
    let edges = net.f_edges();
    for seed in 0..3 {
        let start = MfParams { epochs: 0, seed, ..MfParams::default() };
        let end = MfParams { epochs: 50, seed, ..MfParams::default() };
        let before = mf_objective(&train_mf::<f64>(&edges, 60, &start).unwrap(), &edges);
        let after = mf_objective(&train_mf::<f64>(&edges, 60, &end).unwrap(), &edges);
        assert!(after < before, "seed {seed}: {after} ≥ {before}");
    }
}

#[test]
fn mf_is_generic_over_precision() {
    let net = random_network(2, 30, 3.0);
    let edges = net.f_edges();
    let p = MfParams { epochs: 10, ..MfParams::default() };
    let a = train_mf::<f64>(&edges, 30, &p).unwrap();
    let b = train_mf::<f32>(&edges, 30, &p).unwrap();
    for &(i, j, _) in edges.iter().take(20) {
        assert!((a.margin(i, j).unwrap() - b.margin(i, j).unwrap() as f64).abs() < 1e-3);
    }
}

/// Degree and triad features recomputed by scanning every edge and node.
fn nbsp_oracle(net: &signpath::MultilayerNetwork, u: NodeId, v: NodeId) -> Vec<u64> {
    let f: Vec<(NodeId, NodeId, Sign)> = net.f_edges().into_iter().filter(|&(a, b, _)| (a, b) != (u, v)).collect();
    let sign_of = |a: NodeId, b: NodeId| f.iter().find(|e| e.0 == a && e.1 == b).map(|e| e.2);
    let count = |pred: &dyn Fn(&(NodeId, NodeId, Sign)) -> bool| f.iter().filter(|e| pred(e)).count() as u64;
    let in_pos = count(&|e| e.1 == v && e.2 == Sign::Positive);
    let in_neg = count(&|e| e.1 == v && e.2 == Sign::Negative);
    let out_pos = count(&|e| e.0 == u && e.2 == Sign::Positive);
    let out_neg = count(&|e| e.0 == u && e.2 == Sign::Negative);
    let positive_nbr =
        |x: NodeId, w: NodeId| sign_of(x, w) == Some(Sign::Positive) || sign_of(w, x) == Some(Sign::Positive);
    let mut emb = 0;
    let mut triads = vec![0u64; 16];
    for w in net.nodes().filter(|&w| w != u && w != v) {
        emb += u64::from(positive_nbr(u, w) && positive_nbr(v, w));
        for (uw, s1) in [(true, sign_of(u, w)), (false, sign_of(w, u))] {
            for (wv, s2) in [(true, sign_of(w, v)), (false, sign_of(v, w))] {
                if let (Some(s1), Some(s2)) = (s1, s2) {
                    triads[triad_index(uw, s1, wv, s2)] += 1;
                }
            }
        }
    }
    let mut out = vec![in_pos, in_neg, out_pos, out_neg, in_pos + in_neg, out_pos + out_neg, emb];
    out.extend(triads);
    out
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn nbsp_matches_triple_loop(seed in 0u64..100_000) {
        let net = random_network(seed, 30, 5.0);
        for (u, v) in sample_pairs(seed, &net, 30) {
            let row = nbsp_features(&net, u, v, None).unwrap();
            prop_assert_eq!(row.counts.len(), NBSP_WIDTH);
            prop_assert_eq!(row.counts, nbsp_oracle(&net, u, v));
        }
    }

    #[test]
    fn triad_cells_sum_to_connecting_edge_pairs(seed in 0u64..100_000) {
        let net = random_network(seed, 25, 6.0);
        for (u, v) in sample_pairs(seed, &net, 20) {
            let row = nbsp_features(&net, u, v, None).unwrap();
            let mut expected = 0u64;
            for w in net.nodes().filter(|&w| w != u && w != v) {
                let uw = u64::from(net.f_sign(u, w).is_some()) + u64::from(net.f_sign(w, u).is_some());
                let wv = u64::from(net.f_sign(w, v).is_some()) + u64::from(net.f_sign(v, w).is_some());
                expected += uw * wv;
            }
            prop_assert_eq!(row.counts[7..].iter().sum::<u64>(), expected);
        }
    }
}

#[test]
fn nbsp_ignores_source_layers() {
    let net = random_network(8, 20, 3.0);
    let f_only = signpath::MultilayerNetwork::build(20, net.edges(LayerKind::F)).unwrap();
    for (u, v) in sample_pairs(1, &net, 30) {
        assert_eq!(nbsp_features(&net, u, v, None).unwrap(), nbsp_features(&f_only, u, v, None).unwrap());
    }
}
