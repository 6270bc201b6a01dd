use std::io::{BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{ArgGroup, Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::json;

use signpath::community::{cluster_layer_traced, map_equation, visit_rates, ClusterIndex, Partition, DEFAULT_TELEPORT};
use signpath::eval::{
    correlation_report, embeddedness_histogram, featurize_edges, kfold_split, run_experiment, ExperimentConfig,
    PredictorKind,
};
use signpath::net::{load_manifest, parse_pairs, write_layer_file, LayerKind, LayerPaths, Manifest, PairLine};
use signpath::predictors::{
    fit_standardizer, train_mf, train_svm, ClassWeighting, FeatureSet, MfParams, ModelFile, SvmModelFile, SvmParams,
};
use signpath::synthgen::{generate, preset, GenConfig};
use signpath::MultilayerNetwork;

mod output;

use output::{create_dir, csv_writer, run_config, write_json, write_value};

const VERSION: &str =
    concat!(env!("CARGO_PKG_VERSION"), " (manifest format 1, partition format 1, model format 1, report format 1)");

#[derive(Parser)]
#[command(name = "signpath", version = VERSION, about = "Sign prediction for link initiations in multilayer networks")]
struct Cli {
    /// Cap on worker threads (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic three-layer network.
    Gen(GenArgs),
    /// Layer correlations and the embeddedness histogram.
    Analyze(AnalyzeArgs),
    /// Partition the M and R layers.
    Cluster(ClusterArgs),
    /// Meta-path or NB-SP features for a list of pairs.
    Featurize(FeaturizeArgs),
    /// Fit an SVM or MF model on every F edge of a network.
    Train(TrainArgs),
    /// Cross-validated comparison of predictors.
    Evaluate(EvaluateArgs),
    /// Score pairs with a trained model.
    Predict(PredictArgs),
}

#[derive(Args, Serialize)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
struct GenArgs {
    /// `desk` or `paper-scale`.
    #[arg(long)]
    preset: Option<String>,
    /// GenConfig JSON file.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Overrides the seed of the preset or config.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct AnalyzeArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Clone, Debug, Serialize)]
#[serde(rename_all = "lowercase")]
enum ClustererChoice {
    Infomap,
    Components,
    File(PathBuf),
}

fn parse_clusterer(s: &str) -> Result<ClustererChoice, String> {
    match s {
        "infomap" => Ok(ClustererChoice::Infomap),
        "components" => Ok(ClustererChoice::Components),
        _ => match s.strip_prefix("file:") {
            Some(p) if !p.is_empty() => Ok(ClustererChoice::File(PathBuf::from(p))),
            _ => Err(format!("expected infomap, components or file:DIR, got {s:?}")),
        },
    }
}

#[derive(Args, Serialize)]
struct ClusterArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// `infomap`, `components`, or `file:DIR` (a directory holding
    /// partition_R.json and partition_M.json).
    #[arg(long, default_value = "infomap", value_parser = parse_clusterer)]
    clusterer: ClustererChoice,
    #[arg(long, default_value_t = DEFAULT_TELEPORT)]
    teleport: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

fn parse_features(s: &str) -> Result<FeatureSet, String> {
    FeatureSet::parse(s).ok_or_else(|| format!("expected nb, cb, both or nbsp, got {s:?}"))
}

fn parse_predictor(s: &str) -> Result<PredictorKind, String> {
    PredictorKind::parse(s).ok_or_else(|| format!("expected one of cbmp, nbmp, nbsp, mf, random, got {s:?}"))
}

fn parse_weighting(s: &str) -> Result<ClassWeighting, String> {
    match s {
        "balanced" => Ok(ClassWeighting::Balanced),
        "uniform" => Ok(ClassWeighting::Uniform),
        _ => Err(format!("expected balanced or uniform, got {s:?}")),
    }
}

#[derive(Args, Serialize)]
struct FeaturizeArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Directory with partition_R.json and partition_M.json.
    #[arg(long)]
    partitions: Option<PathBuf>,
    /// `src dst [sign]` per line.
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long, default_value = "both", value_parser = parse_features)]
    mode: FeatureSet,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize, Clone)]
struct SvmOpts {
    #[arg(long, default_value_t = SvmParams::default().lambda)]
    svm_lambda: f64,
    #[arg(long, default_value_t = SvmParams::default().epochs)]
    svm_epochs: usize,
    #[arg(long, default_value = "balanced", value_parser = parse_weighting)]
    weighting: ClassWeighting,
}

#[derive(Args, Serialize, Clone)]
struct MfOpts {
    #[arg(long, default_value_t = MfParams::default().rank)]
    mf_rank: usize,
    #[arg(long, default_value_t = MfParams::default().lambda)]
    mf_lambda: f64,
    #[arg(long, default_value_t = MfParams::default().epochs)]
    mf_epochs: usize,
    #[arg(long, default_value_t = MfParams::default().learning_rate)]
    mf_learning_rate: f64,
}

impl SvmOpts {
    fn params(&self, seed: u64) -> SvmParams {
        SvmParams { lambda: self.svm_lambda, epochs: self.svm_epochs, seed }
    }
}

impl MfOpts {
    fn params(&self, seed: u64) -> MfParams {
        MfParams {
            rank: self.mf_rank,
            lambda: self.mf_lambda,
            epochs: self.mf_epochs,
            learning_rate: self.mf_learning_rate,
            seed,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
enum ModelKind {
    Svm,
    Mf,
}

#[derive(Args, Serialize)]
struct TrainArgs {
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    partitions: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "svm")]
    model: ModelKind,
    /// Feature set of an SVM model.
    #[arg(long, default_value = "cb", value_parser = parse_features)]
    features: FeatureSet,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    svm: SvmOpts,
    #[command(flatten)]
    #[serde(flatten)]
    mf: MfOpts,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct EvaluateArgs {
    #[arg(long)]
    manifest: PathBuf,
    /// Precomputed partitions; without it CB-MP clusters with Infomap.
    #[arg(long)]
    partitions: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = parse_predictor,
          default_value = "cbmp,nbmp,nbsp,mf,random")]
    predictors: Vec<PredictorKind>,
    #[arg(long, default_value_t = 10)]
    k: usize,
    /// Fold seed; also the default for the model and cluster seeds.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    model_seed: Option<u64>,
    #[arg(long)]
    cluster_seed: Option<u64>,
    #[arg(long, default_value_t = DEFAULT_TELEPORT)]
    teleport: f64,
    #[command(flatten)]
    #[serde(flatten)]
    svm: SvmOpts,
    #[command(flatten)]
    #[serde(flatten)]
    mf: MfOpts,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

#[derive(Args, Serialize)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    manifest: PathBuf,
    #[arg(long)]
    partitions: Option<PathBuf>,
    #[arg(long)]
    pairs: PathBuf,
    #[arg(long)]
    #[serde(skip)]
    out: PathBuf,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error[cli]: {e}");
            return ExitCode::FAILURE;
        }
    }
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let module = err.chain().find_map(|e| e.downcast_ref::<signpath::Error>()).map_or("cli", |e| e.module());
            eprintln!("error[{module}]: {}", describe(&err));
            ExitCode::FAILURE
        }
    }
}

/// The error chain joined by `: `, skipping causes a message already quotes.
fn describe(err: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if msg.ends_with(&text) {
            continue;
        }
        if !msg.is_empty() {
            msg.push_str(": ");
        }
        msg.push_str(&text);
    }
    msg
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(a) => cmd_gen(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Cluster(a) => cmd_cluster(a),
        Command::Featurize(a) => cmd_featurize(a),
        Command::Train(a) => cmd_train(a),
        Command::Evaluate(a) => cmd_evaluate(a),
        Command::Predict(a) => cmd_predict(a),
    }
}

fn load(path: &Path) -> Result<MultilayerNetwork> {
    Ok(load_manifest(path).with_context(|| format!("loading manifest {}", path.display()))?.network)
}

fn read_partitions(dir: &Path, node_count: usize) -> Result<ClusterIndex> {
    let read = |layer: LayerKind| -> Result<Partition> {
        let path = dir.join(format!("partition_{layer}.json"));
        let p = Partition::read_json(&path).with_context(|| format!("reading {}", path.display()))?;
        if p.layer() != layer {
            bail!("{} holds a partition of layer {}, expected {layer}", path.display(), p.layer());
        }
        Ok(p)
    };
    Ok(ClusterIndex::new(node_count, read(LayerKind::R)?, read(LayerKind::M)?)?)
}

fn require_partitions(dir: &Option<PathBuf>, features: FeatureSet, node_count: usize) -> Result<Option<ClusterIndex>> {
    match dir {
        Some(d) => Ok(Some(read_partitions(d, node_count)?)),
        None if features.needs_clusters() => bail!("feature set {features:?} needs --partitions"),
        None => Ok(None),
    }
}

fn read_pairs(path: &Path) -> Result<Vec<PairLine>> {
    let f = std::fs::File::open(path).with_context(|| format!("opening pairs file {}", path.display()))?;
    parse_pairs(BufReader::new(f)).with_context(|| format!("parsing pairs file {}", path.display()))
}

fn cmd_gen(a: GenArgs) -> Result<()> {
    let mut cfg: GenConfig = match (&a.preset, &a.config) {
        (Some(name), _) => preset(name)?,
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
            serde_json::from_str(&text).with_context(|| format!("parsing GenConfig {}", path.display()))?
        }
        (None, None) => unreachable!("clap requires --preset or --config"),
    };
    if let Some(seed) = a.seed {
        cfg.seed = seed;
    }
    let rc = run_config("gen", &json!({ "args": &a, "gen_config": &cfg }))?;
    let generated = generate(&cfg)?;
    create_dir(&a.out)?;

    let header = format!("run_config: {}", serde_json::to_string(&rc)?);
    let names = [(LayerKind::F, "f.txt"), (LayerKind::M, "m.txt"), (LayerKind::R, "r.txt")];
    for (layer, name) in names {
        let path = a.out.join(name);
        let mut out = output::create(&path)?;
        write_layer_file(&mut out, &generated.network, layer, Some(&header))
            .and_then(|_| out.flush())
            .with_context(|| format!("writing {}", path.display()))?;
    }
    let manifest = Manifest {
        node_count: cfg.node_count,
        layers: LayerPaths { f: "f.txt".into(), m: "m.txt".into(), r: "r.txt".into() },
        id_map: None,
    };
    write_json(&a.out.join("manifest.json"), &manifest, &rc)?;
    write_json(&a.out.join("ground_truth.json"), &json!({ "gen_config": &cfg, "truth": &generated.truth }), &rc)?;
    println!(
        "generated {} nodes: F {} M {} R {} edges",
        cfg.node_count,
        generated.network.edge_count(LayerKind::F),
        generated.network.edge_count(LayerKind::M),
        generated.network.edge_count(LayerKind::R)
    );
    Ok(())
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<()> {
    let net = load(&a.manifest)?;
    let rc = run_config("analyze", &a)?;
    create_dir(&a.out)?;
    write_json(&a.out.join("correlations.json"), &correlation_report(&net), &rc)?;
    let bins = embeddedness_histogram(&net)?;
    let header: Vec<String> =
        ["bin", "n", "pct_of_positives", "pct_of_negatives", "positive_rate"].map(String::from).to_vec();
    let mut out = csv_writer(&a.out.join("embeddedness.csv"), &rc, &header)?;
    for b in &bins {
        writeln!(out, "{},{},{},{},{}", b.bin, b.n, b.pct_of_positives, b.pct_of_negatives, b.positive_rate)?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_cluster(a: ClusterArgs) -> Result<()> {
    let net = load(&a.manifest)?;
    let rc = run_config("cluster", &a)?;
    create_dir(&a.out)?;
    let preloaded = match &a.clusterer {
        ClustererChoice::File(dir) => Some(read_partitions(dir, net.node_count())?),
        _ => None,
    };
    for layer in [LayerKind::R, LayerKind::M] {
        let (partition, before, after) = match (&a.clusterer, &preloaded) {
            (ClustererChoice::Infomap, _) => {
                let outcome = cluster_layer_traced::<f64>(&net, layer, a.teleport, a.seed)?;
                let (b, f) = (outcome.initial_codelength(), outcome.final_codelength());
                (outcome.partition, b, f)
            }
            (choice, pre) => {
                let partition = match (choice, pre) {
                    (ClustererChoice::Components, _) => Partition::components(&net, layer)?,
                    (_, Some(index)) => index.partition(layer).clone(),
                    _ => unreachable!("file partitions are loaded above"),
                };
                let rates = visit_rates::<f64>(&net, layer, a.teleport)?;
                let before = map_equation(&rates, &Partition::singletons(layer, net.node_count()))?;
                (partition.clone(), before, map_equation(&rates, &partition)?)
            }
        };
        println!("layer {layer}: {} clusters, codelength {before:.6} -> {after:.6} bits", partition.cluster_count());
        write_json(&a.out.join(format!("partition_{layer}.json")), &partition, &rc)?;
    }
    Ok(())
}

fn cmd_featurize(a: FeaturizeArgs) -> Result<()> {
    let net = load(&a.manifest)?;
    let clusters = require_partitions(&a.partitions, a.mode, net.node_count())?;
    let pairs = read_pairs(&a.pairs)?;
    let rc = run_config("featurize", &a)?;
    let mut header: Vec<String> = ["src", "dst", "label"].map(String::from).to_vec();
    header.extend(a.mode.columns());
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let mut out = csv_writer(&a.out, &rc, &header)?;
    for &(u, v, label) in &pairs {
        let row = a.mode.row(&net, clusters.as_ref(), u, v, label)?;
        let label = label.map(|s| s.to_string()).unwrap_or_default();
        let counts: Vec<String> = row.counts.iter().map(u64::to_string).collect();
        writeln!(out, "{u},{v},{label},{}", counts.join(","))?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_train(a: TrainArgs) -> Result<()> {
    let net = load(&a.manifest)?;
    let edges = net.f_edges();
    let model = match a.model {
        ModelKind::Mf => ModelFile::Mf(train_mf::<f64>(&edges, net.node_count(), &a.mf.params(a.seed))?),
        ModelKind::Svm => {
            let clusters = require_partitions(&a.partitions, a.features, net.node_count())?;
            let rows = featurize_edges(&net, clusters.as_ref(), a.features, &edges)?;
            let labels: Vec<_> = edges.iter().map(|e| e.2).collect();
            let standardizer = fit_standardizer(&rows)?;
            let z = standardizer.transform_all(&rows)?;
            let model = train_svm(&z, &labels, &a.svm.params(a.seed), a.svm.weighting)?;
            ModelFile::Svm(SvmModelFile::new(a.features, a.features.columns(), model, standardizer))
        }
    };
    let rc = run_config("train", &a)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    write_json(&a.out, &model, &rc)?;
    println!("trained {:?} model on {} F edges", a.model, edges.len());
    Ok(())
}

fn cmd_predict(a: PredictArgs) -> Result<()> {
    let text = std::fs::read_to_string(&a.model).with_context(|| format!("reading model {}", a.model.display()))?;
    let model: ModelFile =
        serde_json::from_str(&text).with_context(|| format!("parsing model {}", a.model.display()))?;
    let net = load(&a.manifest)?;
    let pairs = read_pairs(&a.pairs)?;
    let rc = run_config("predict", &a)?;
    let header: Vec<String> = ["src", "dst", "margin", "predicted_sign"].map(String::from).to_vec();
    let margins: Vec<f64> = match &model {
        ModelFile::Mf(mf) => pairs.iter().map(|&(u, v, _)| mf.margin(u, v)).collect::<signpath::Result<_>>()?,
        ModelFile::Svm(file) => {
            if file.columns != file.features.columns() {
                bail!("model columns do not match feature set {:?}", file.features);
            }
            let clusters = require_partitions(&a.partitions, file.features, net.node_count())?;
            let linear = file.linear_model();
            pairs
                .iter()
                .map(|&(u, v, _)| {
                    let row = file.features.row(&net, clusters.as_ref(), u, v, None)?;
                    linear.margin(&file.standardizer.transform(&row.values())?)
                })
                .collect::<signpath::Result<_>>()?
        }
    };
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        create_dir(parent)?;
    }
    let mut out = csv_writer(&a.out, &rc, &header)?;
    for (&(u, v, _), m) in pairs.iter().zip(margins) {
        let sign = if m >= 0.0 { "+1" } else { "-1" };
        writeln!(out, "{u},{v},{m},{sign}")?;
    }
    out.flush()?;
    Ok(())
}

fn cmd_evaluate(a: EvaluateArgs) -> Result<()> {
    if a.predictors.is_empty() {
        bail!("no predictors selected");
    }
    let net = load(&a.manifest)?;
    let model_seed = a.model_seed.unwrap_or(a.seed);
    let cluster_seed = a.cluster_seed.unwrap_or(a.seed);
    let clusters = if a.predictors.iter().any(|p| p.needs_clusters()) {
        Some(match &a.partitions {
            Some(dir) => read_partitions(dir, net.node_count())?,
            None => {
                let part = |layer| cluster_layer_traced::<f64>(&net, layer, a.teleport, cluster_seed);
                ClusterIndex::new(net.node_count(), part(LayerKind::R)?.partition, part(LayerKind::M)?.partition)?
            }
        })
    } else {
        None
    };
    let plan = kfold_split(&net.f_edges(), a.k, a.seed)?;
    let cfg = ExperimentConfig {
        svm: a.svm.params(model_seed),
        weighting: a.svm.weighting,
        mf: a.mf.params(model_seed),
        model_seed,
    };
    let rc = run_config("evaluate", &json!({ "args": &a, "model_seed": model_seed, "cluster_seed": cluster_seed }))?;

    let mut reports = Vec::new();
    for &kind in &a.predictors {
        let report = run_experiment(&net, clusters.as_ref(), kind, &plan, &cfg)?;
        for w in &report.warnings {
            eprintln!("warning[evalharness]: {}: {w}", report.predictor);
        }
        match report.mean_balanced_accuracy {
            Some(m) => println!("{:7} mean balanced accuracy {m:.4}", report.predictor),
            None => println!("{:7} mean balanced accuracy undefined", report.predictor),
        }
        reports.push(report);
    }

    create_dir(&a.out)?;
    let array: Vec<serde_json::Value> = reports
        .iter()
        .map(|r| {
            let mut v = serde_json::to_value(r)?;
            v["run_config"] = rc.clone();
            Ok(v)
        })
        .collect::<Result<_>>()?;
    write_value(&a.out.join("report.json"), &serde_json::Value::Array(array))?;

    let header: Vec<String> =
        ["predictor", "fold", "test_size", "tp", "fn", "tn", "fp", "balanced_accuracy"].map(String::from).to_vec();
    let mut out = csv_writer(&a.out.join("report.csv"), &rc, &header)?;
    let fmt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for r in &reports {
        for f in &r.folds {
            let c = f.confusion;
            writeln!(
                out,
                "{},{},{},{},{},{},{},{}",
                r.predictor,
                f.fold,
                f.test_size,
                c.tp,
                c.fn_,
                c.tn,
                c.fp,
                fmt(f.balanced_accuracy)
            )?;
        }
        writeln!(out, "{},mean,{},,,,,{}", r.predictor, plan.edge_count(), fmt(r.mean_balanced_accuracy))?;
    }
    out.flush()?;
    Ok(())
}
