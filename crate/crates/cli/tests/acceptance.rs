//! End-to-end acceptance checks. Runs without the libtest harness so that
//! every criterion prints exactly one PASS/FAIL line; exits nonzero if any
//! criterion fails.

#[path = "../../core/tests/common/mod.rs"]
mod common;

use std::collections::{BTreeMap, HashSet};
use std::panic::{self, AssertUnwindSafe};
use std::path::Path;
use std::process::Command;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::Value;
use signpath::community::{
    cluster_layer, cluster_layer_traced, cluster_sources, map_equation, visit_rates, ClusterIndex, Infomap, Partition,
};
use signpath::eval::{
    activity_hamming, embeddedness_histogram, f_overlap_summary, featurize_edges, fold_view, kendall_tau_b,
    kfold_split, positive_rate_non_decreasing, run_experiment, Confusion, ExperimentConfig, PredictorKind,
};
use signpath::metapath::{column_names, feature_row, specs, FeatureMode};
use signpath::net::{mask_f_edges, Direction, LayerKind, NodeId, Sign, SignedEdge};
use signpath::predictors::{fit_standardizer, train_svm, ClassWeighting, FeatureSet, SvmParams};
use signpath::synthgen::{generate, preset, GenConfig, SignModel};
use signpath::MultilayerNetwork;

use common::flow::{definition_codelength, dense_rates, step_matrix, weighted_random};
use common::metrics::{active, pair_set, tau_b_quadratic};
use common::paths::{schema_of, Augmented, Vertex};
use common::{random_labels, random_network, random_partition, sample_pairs};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn path_oracle() -> Outcome {
    let start = Instant::now();
    let all = specs(FeatureMode::Both);
    let mut checked = 0usize;
    for seed in 0..20u64 {
        let n = 40 + seed as u32 * 8;
        let net = random_network(seed, n, 3.0);
        let pr = random_partition(seed ^ 1, n as usize, 1 + (seed % 7) as u32, LayerKind::R);
        let pm = random_partition(seed ^ 2, n as usize, 1 + (seed % 5) as u32 * 2, LayerKind::M);
        let index = ClusterIndex::new(n as usize, pr.clone(), pm.clone()).map_err(|e| e.to_string())?;
        for (u, v) in sample_pairs(seed ^ 3, &net, 500) {
            let row = feature_row(&net, Some(&index), u, v, FeatureMode::Both, None).map_err(|e| e.to_string())?;
            let aug = Augmented::build(&net, Some((&pr, &pm)), (u.0, v.0));
            for (spec, &got) in all.iter().zip(&row.counts) {
                let want = aug.count(&schema_of(spec), Vertex::User(u.0), Vertex::User(v.0));
                ensure(got == want, || format!("seed {seed} ({u}, {v}) {}: {got} vs {want}", spec.name()))?;
                checked += 1;
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 60.0, || format!("took {secs:.1} s"))?;
    Ok(format!("20 networks, {checked} counts over 32 meta-paths equal, {secs:.1} s"))
}

fn singleton_cb_equals_nb() -> Outcome {
    let names = column_names(FeatureMode::Both);
    let mut checked = 0usize;
    for seed in 0..10u64 {
        let net = random_network(100 + seed, 80, 4.0);
        let n = net.node_count();
        let index =
            ClusterIndex::new(n, Partition::singletons(LayerKind::R, n), Partition::singletons(LayerKind::M, n))
                .map_err(|e| e.to_string())?;
        for (u, v) in sample_pairs(seed, &net, 300) {
            let row = feature_row(&net, Some(&index), u, v, FeatureMode::Both, None).map_err(|e| e.to_string())?;
            for i in 0..16 {
                ensure(row.counts[i] == row.counts[16 + i], || {
                    format!(
                        "({u}, {v}): {} = {} but {} = {}",
                        names[i],
                        row.counts[i],
                        names[16 + i],
                        row.counts[16 + i]
                    )
                })?;
                checked += 1;
            }
        }
    }
    Ok(format!("{checked} CB/NB feature pairs equal"))
}

fn two_cliques() -> MultilayerNetwork {
    let mut edges = Vec::new();
    for block in [0u32, 10] {
        for a in block..block + 10 {
            for b in block..block + 10 {
                if a != b {
                    edges.push(SignedEdge::unsigned(LayerKind::M, a, b));
                }
            }
        }
    }
    edges.push(SignedEdge::unsigned(LayerKind::M, 9, 10));
    edges.push(SignedEdge::unsigned(LayerKind::M, 10, 9));
    MultilayerNetwork::build(20, edges).expect("valid fixture")
}

fn community_checks() -> Outcome {
    let net = two_cliques();
    let part = cluster_layer::<f64>(&net, LayerKind::M, 0.15, 0).map_err(|e| e.to_string())?;
    let a = part.assignment();
    let planted = a[..10].iter().all(|&c| c == a[0]) && a[10..].iter().all(|&c| c == a[10]) && a[0] != a[10];
    ensure(planted, || format!("cliques split as {a:?}"))?;

    let mut worst = 0.0f64;
    for seed in 0..40u64 {
        let n = 3 + (seed % 48) as u32;
        let g = weighted_random(seed, n);
        let step = step_matrix(&g, LayerKind::M, 0.15);
        let p = dense_rates(&step);
        let rates = visit_rates::<f64>(&g, LayerKind::M, 0.15).map_err(|e| e.to_string())?;
        for k in [1, 2, 3, n] {
            let labels = random_labels(seed * 31 + k as u64, n as usize, k);
            let part = Partition::from_labels(LayerKind::M, &labels).map_err(|e| e.to_string())?;
            let want = definition_codelength(&step, &p, part.assignment());
            let got = map_equation(&rates, &part).map_err(|e| e.to_string())?;
            worst = worst.max((got - want).abs());
        }
    }
    ensure(worst < 1e-9, || format!("map equation off by {worst:e} bits"))?;

    for seed in 0..20u64 {
        let g = random_network(seed, 40, 2.5);
        let run = || cluster_layer_traced::<f64>(&g, LayerKind::R, 0.15, seed).map_err(|e| e.to_string());
        let first = run()?;
        ensure(first.codelength_trace.windows(2).all(|w| w[1] <= w[0] + 1e-12), || {
            format!("seed {seed}: trace {:?}", first.codelength_trace)
        })?;
        ensure(run()?.partition == first.partition, || format!("seed {seed}: partitions differ between runs"))?;
    }
    Ok(format!("cliques recovered, map equation within {worst:.1e} bits, traces non-increasing, seeded runs identical"))
}

fn metric_oracles() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    let mut fixtures = 0;
    let mut worst = 0.0f64;
    while fixtures < 120 {
        let n = rng.gen_range(2..=500);
        let range = [2u32, 5, 20, 1000][fixtures % 4];
        let xs: Vec<u32> = (0..n).map(|_| rng.gen_range(0..range)).collect();
        let ys: Vec<u32> =
            xs.iter().map(|&x| if rng.gen_bool(0.5) { x / 2 } else { rng.gen_range(0..range) }).collect();
        if xs.iter().all(|&x| x == xs[0]) || ys.iter().all(|&y| y == ys[0]) {
            continue;
        }
        let got: f64 = kendall_tau_b(&xs, &ys).map_err(|e| e.to_string())?;
        worst = worst.max((got - tau_b_quadratic(&xs, &ys)).abs());
        fixtures += 1;
    }
    ensure(worst < 1e-12, || format!("τ_b off by {worst:e}"))?;

    for seed in 0..120u64 {
        let n = 2 + (seed % 120) as u32;
        let net = random_network(seed, n, 0.2 + (seed % 7) as f64 * 0.5);
        for (a, b) in [(LayerKind::M, LayerKind::R), (LayerKind::M, LayerKind::F), (LayerKind::R, LayerKind::F)] {
            for dir in [Direction::Forward, Direction::Inverse] {
                let want = active(&net, a, dir).symmetric_difference(&active(&net, b, dir)).count() as f64 / n as f64;
                let got: f64 = activity_hamming(&net, (a, b), dir);
                ensure((got - want).abs() < 1e-12, || format!("seed {seed} {a}-{b}: hamming {got} vs {want}"))?;
            }
        }
        let s = f_overlap_summary(&net);
        ensure(s.in_m + s.in_r - s.in_all == s.in_either, || format!("seed {seed}: identity fails on {s:?}"))?;
        let f = pair_set(&net, LayerKind::F);
        let m = pair_set(&net, LayerKind::M);
        let r = pair_set(&net, LayerKind::R);
        let union = f.iter().filter(|e| m.contains(e) || r.contains(e)).count();
        ensure(union == s.in_either, || format!("seed {seed}: |F∩(M∪R)| {union} vs {}", s.in_either))?;
    }

    // |F∩M| = 2712, |F∩R| = 9358, |F∩M∩R| = 1250
    let mut edges = Vec::new();
    let pair = |i: u32| (i / 1000, 1000 + i % 1000);
    for i in 0..12_000u32 {
        let (a, b) = pair(i);
        edges.push(SignedEdge::f(a, b, if i % 3 == 0 { Sign::Negative } else { Sign::Positive }));
        if i < 2712 {
            edges.push(SignedEdge::unsigned(LayerKind::M, a, b));
        }
        if (2712 - 1250..2712 - 1250 + 9358).contains(&i) {
            edges.push(SignedEdge::unsigned(LayerKind::R, a, b));
        }
    }
    let net = MultilayerNetwork::build(2000, edges).map_err(|e| e.to_string())?;
    let s = f_overlap_summary(&net);
    ensure((s.in_m, s.in_r, s.in_all, s.in_either) == (2712, 9358, 1250, 10820), || format!("{s:?}"))?;
    Ok(format!(
        "{fixtures} τ_b fixtures within {worst:.1e}, 120 networks for Hamming and overlap, 2712 + 9358 − 1250 = {}",
        s.in_either
    ))
}

fn signpath(dir: &Path, args: &[&str]) -> Result<String, String> {
    let out = Command::new(env!("CARGO_BIN_EXE_signpath"))
        .current_dir(dir)
        .args(args)
        .output()
        .map_err(|e| format!("spawning signpath: {e}"))?;
    if !out.status.success() {
        return Err(format!("signpath {}: {}", args.join(" "), String::from_utf8_lossy(&out.stderr).trim()));
    }
    Ok(String::from_utf8_lossy(&out.stdout).into_owned())
}

fn tempdir() -> Result<tempfile::TempDir, String> {
    tempfile::tempdir().map_err(|e| e.to_string())
}

fn means(report: &Value) -> Result<BTreeMap<String, f64>, String> {
    let arr = report.as_array().ok_or("report.json is not an array")?;
    arr.iter()
        .map(|r| {
            let name = r["predictor"].as_str().ok_or("missing predictor")?.to_string();
            let mean = r["mean_balanced_accuracy"].as_f64().ok_or_else(|| format!("{name}: undefined mean"))?;
            Ok((name, mean))
        })
        .collect()
}

fn predictor_ordering() -> Outcome {
    let start = Instant::now();
    let mut lines = Vec::new();
    for seed in ["7", "11", "13"] {
        let dir = tempdir()?;
        signpath(dir.path(), &["gen", "--preset", "desk", "--seed", seed, "--out", "data"])?;
        signpath(
            dir.path(),
            &[
                "--threads",
                "4",
                "evaluate",
                "--manifest",
                "data/manifest.json",
                "--seed",
                seed,
                "--k",
                "10",
                "--out",
                "eval",
            ],
        )?;
        let text = std::fs::read_to_string(dir.path().join("eval/report.json")).map_err(|e| e.to_string())?;
        let report: Value = serde_json::from_str(&text).map_err(|e| e.to_string())?;
        let m = means(&report)?;
        let get = |k: &str| m.get(k).copied().ok_or_else(|| format!("no {k} in report"));
        let (cb, nb, sp, mf, rnd) = (get("CB-MP")?, get("NB-MP")?, get("NB-SP")?, get("MF")?, get("Random")?);
        let summary = format!("seed {seed}: CB-MP {cb:.3}, NB-MP {nb:.3}, NB-SP {sp:.3}, MF {mf:.3}, Random {rnd:.3}");
        ensure(cb >= nb + 0.02, || format!("{summary}: CB-MP < NB-MP + 0.02"))?;
        ensure(nb >= 0.55, || format!("{summary}: NB-MP < 0.55"))?;
        ensure(cb >= sp && cb >= mf, || format!("{summary}: CB-MP below NB-SP or MF"))?;
        ensure((0.47..=0.53).contains(&rnd), || format!("{summary}: Random outside [0.47, 0.53]"))?;
        lines.push(summary);
    }
    let secs = start.elapsed().as_secs_f64();
    ensure(secs < 300.0, || format!("took {secs:.0} s"))?;
    Ok(format!("{} ({secs:.0} s)", lines.join("; ")))
}

fn imbalanced_config(seed: u64) -> GenConfig {
    GenConfig {
        node_count: 1500,
        f_edge_count: 6000,
        sign_model: SignModel { alpha: -3.8, beta_cluster: 3.0, beta_embed: 0.4 },
        seed,
        ..preset("desk").expect("desk preset")
    }
}

fn cost_sensitivity() -> Outcome {
    let mut lines = Vec::new();
    for seed in [7u64, 11, 13] {
        let g = generate(&imbalanced_config(seed)).map_err(|e| e.to_string())?;
        let net = &g.network;
        let share = net.f_edge_count(Sign::Positive) as f64 / net.edge_count(LayerKind::F) as f64;
        let minority = share.min(1.0 - share);
        ensure((0.08..=0.12).contains(&minority), || format!("seed {seed}: positive share {share:.3} is not 9:1"))?;
        let (pr, pm) = cluster_sources(net, &Infomap { teleport: 0.15, seed }).map_err(|e| e.to_string())?;
        let idx = ClusterIndex::new(net.node_count(), pr, pm).map_err(|e| e.to_string())?;
        let plan = kfold_split(&net.f_edges(), 10, seed).map_err(|e| e.to_string())?;
        let run = |weighting| {
            let cfg = ExperimentConfig { weighting, model_seed: seed, ..ExperimentConfig::default() };
            run_experiment(net, Some(&idx), PredictorKind::CbMp, &plan, &cfg)
                .map_err(|e| e.to_string())?
                .mean_balanced_accuracy
                .ok_or_else(|| "undefined mean".to_string())
        };
        let (weighted, plain) = (run(ClassWeighting::Balanced)?, run(ClassWeighting::Uniform)?);
        let summary =
            format!("seed {seed} ({:.0}% positive): weighted {weighted:.3}, unweighted {plain:.3}", share * 100.0);
        ensure(weighted >= plain, || summary.clone())?;
        lines.push(summary);
    }
    Ok(lines.join("; "))
}

fn embeddedness_trend() -> Outcome {
    let mut lines = Vec::new();
    for seed in [7u64, 11, 13] {
        let cfg = GenConfig { seed, ..preset("desk").expect("desk preset") };
        ensure(cfg.sign_model.beta_embed > 0.0, || "β_embed must be positive".into())?;
        let net = generate(&cfg).map_err(|e| e.to_string())?.network;
        // independent recount: embeddedness from positive neighbor sets of the final network
        let mut positive: Vec<HashSet<NodeId>> = vec![HashSet::new(); net.node_count()];
        for (u, v, s) in net.f_edges() {
            if s == Sign::Positive {
                positive[u.index()].insert(v);
                positive[v.index()].insert(u);
            }
        }
        let mut bins: BTreeMap<usize, (usize, usize)> = BTreeMap::new();
        for (u, v, s) in net.f_edges() {
            let e =
                positive[u.index()].iter().filter(|&&w| w != v && w != u && positive[v.index()].contains(&w)).count();
            let b = bins.entry(e).or_default();
            b.0 += 1;
            b.1 += usize::from(s == Sign::Positive);
        }
        let rates: Vec<(usize, f64)> =
            bins.iter().filter(|(_, &(n, _))| n >= 200).map(|(&e, &(n, p))| (e, p as f64 / n as f64)).collect();
        ensure(rates.len() >= 2, || format!("seed {seed}: only {} bins with ≥200 samples", rates.len()))?;
        ensure(rates.windows(2).all(|w| w[0].1 <= w[1].1), || format!("seed {seed}: rates {rates:?}"))?;
        let hist = embeddedness_histogram(&net).map_err(|e| e.to_string())?;
        for b in &hist {
            let (n, p) = bins.get(&b.bin).copied().unwrap_or_default();
            ensure(b.n == n && b.positives == p, || format!("seed {seed}: histogram bin {} disagrees", b.bin))?;
        }
        ensure(positive_rate_non_decreasing(&hist, 200), || format!("seed {seed}: library check disagrees"))?;
        let shown: Vec<String> = rates.iter().map(|(e, r)| format!("{e}:{r:.2}")).collect();
        lines.push(format!("seed {seed} [{}]", shown.join(" ")));
    }
    Ok(lines.join("; "))
}

fn leak_freedom() -> Outcome {
    // 0 -R-> 2 -F+-> 1 completes R.F+(fwd) for the pair (0, 1)
    let net = MultilayerNetwork::build(
        3,
        [
            SignedEdge::unsigned(LayerKind::R, 0, 2),
            SignedEdge::f(2, 1, Sign::Positive),
            SignedEdge::f(0, 1, Sign::Negative),
        ],
    )
    .map_err(|e| e.to_string())?;
    let col = column_names(FeatureMode::Nb).iter().position(|n| n == "R.F+(fwd)").ok_or("no R.F+(fwd) column")?;
    let open = feature_row(&net, None, NodeId(0), NodeId(1), FeatureMode::Nb, None).map_err(|e| e.to_string())?;
    let masked_view = mask_f_edges(&net, [(NodeId(2), NodeId(1))]).map_err(|e| e.to_string())?;
    let masked =
        feature_row(&masked_view, None, NodeId(0), NodeId(1), FeatureMode::Nb, None).map_err(|e| e.to_string())?;
    ensure(open.counts[col] == 1 && masked.counts[col] == 0, || {
        format!("R.F+(fwd) unmasked {} masked {}", open.counts[col], masked.counts[col])
    })?;

    // the harness must equal a pipeline run on networks with test edges physically removed
    let mut folds_checked = 0;
    for seed in 0..3u64 {
        let net = random_network(seed, 70, 4.0);
        let idx = ClusterIndex::new(
            70,
            random_partition(seed, 70, 4, LayerKind::R),
            random_partition(seed + 1, 70, 4, LayerKind::M),
        )
        .map_err(|e| e.to_string())?;
        let plan = kfold_split(&net.f_edges(), 5, seed).map_err(|e| e.to_string())?;
        let cfg = ExperimentConfig { model_seed: seed, ..ExperimentConfig::default() };
        for kind in [PredictorKind::CbMp, PredictorKind::NbMp, PredictorKind::NbSp] {
            let report = run_experiment(&net, Some(&idx), kind, &plan, &cfg).map_err(|e| e.to_string())?;
            let features = kind.feature_set().ok_or("feature predictor")?;
            for fold in 0..plan.k {
                let hidden: HashSet<(NodeId, NodeId)> = plan.folds[fold].iter().map(|&(u, v, _)| (u, v)).collect();
                let view = fold_view(&net, &plan, fold).map_err(|e| e.to_string())?;
                ensure(hidden.iter().all(|&(u, v)| signpath::net::NetworkView::f_sign(&view, u, v).is_none()), || {
                    format!("fold {fold}: a test edge is visible")
                })?;
                let mut edges = net.edges(LayerKind::M);
                edges.extend(net.edges(LayerKind::R));
                edges.extend(net.edges(LayerKind::F).into_iter().filter(|e| !hidden.contains(&(e.src, e.dst))));
                let rebuilt = MultilayerNetwork::build(70, edges).map_err(|e| e.to_string())?;
                let want = manual_fold(&rebuilt, &idx, features, &plan, fold, &cfg)?;
                ensure(report.folds[fold].confusion == want, || {
                    format!("{kind} fold {fold}: harness {:?} vs rebuilt {want:?}", report.folds[fold].confusion)
                })?;
                folds_checked += 1;
            }
        }
    }
    Ok(format!(
        "fixture row changes under masking; {folds_checked} harness folds equal runs on physically pruned networks"
    ))
}

fn manual_fold(
    net: &MultilayerNetwork,
    idx: &ClusterIndex,
    features: FeatureSet,
    plan: &signpath::eval::FoldPlan,
    fold: usize,
    cfg: &ExperimentConfig,
) -> Result<Confusion, String> {
    let err = |e: signpath::Error| e.to_string();
    let train = plan.training(fold);
    let test = &plan.folds[fold];
    let train_x = featurize_edges(net, Some(idx), features, &train).map_err(err)?;
    let test_x = featurize_edges(net, Some(idx), features, test).map_err(err)?;
    let labels: Vec<Sign> = train.iter().map(|e| e.2).collect();
    let st = fit_standardizer(&train_x).map_err(err)?;
    let params = SvmParams { seed: signpath::eval::derive_seed(cfg.model_seed, fold as u64), ..cfg.svm.clone() };
    let model = train_svm(&st.transform_all(&train_x).map_err(err)?, &labels, &params, cfg.weighting).map_err(err)?;
    let mut c = Confusion::default();
    for (x, e) in st.transform_all(&test_x).map_err(err)?.iter().zip(test) {
        c.record(e.2, model.predict(x).map_err(err)?);
    }
    Ok(c)
}

fn end_to_end_determinism() -> Outcome {
    let mut reports = Vec::new();
    for _ in 0..2 {
        let dir = tempdir()?;
        signpath(dir.path(), &["gen", "--preset", "desk", "--seed", "7", "--out", "data"])?;
        signpath(dir.path(), &["cluster", "--manifest", "data/manifest.json", "--seed", "7", "--out", "parts"])?;
        signpath(
            dir.path(),
            &["evaluate", "--manifest", "data/manifest.json", "--partitions", "parts", "--seed", "7", "--out", "eval"],
        )?;
        reports.push(std::fs::read(dir.path().join("eval/report.json")).map_err(|e| e.to_string())?);
    }
    ensure(reports[0] == reports[1], || "report.json differs between runs".into())?;
    Ok(format!("report.json identical across runs ({} bytes)", reports[0].len()))
}

fn main() {
    let criteria: [Criterion; 9] = [
        ("path-count oracle equivalence", path_oracle),
        ("CB with singleton clusters equals NB", singleton_cb_equals_nb),
        ("community detection", community_checks),
        ("metric oracles", metric_oracles),
        ("predictor ordering on the desk preset", predictor_ordering),
        ("cost sensitivity", cost_sensitivity),
        ("embeddedness trend", embeddedness_trend),
        ("leak freedom", leak_freedom),
        ("end-to-end determinism", end_to_end_determinism),
    ];
    panic::set_hook(Box::new(|_| {}));
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = panic::catch_unwind(AssertUnwindSafe(check)).unwrap_or_else(|p| {
            let msg = p.downcast_ref::<String>().cloned().or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()));
            Err(format!("panicked: {}", msg.unwrap_or_default()))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS {}: {name} [{secs:.1} s] {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL {}: {name} [{secs:.1} s] {why}", i + 1)
            }
        }
    }
    if failed > 0 {
        println!("{failed} of {} criteria failed", criteria.len());
        std::process::exit(1);
    }
    println!("all {} criteria passed", criteria.len());
}
