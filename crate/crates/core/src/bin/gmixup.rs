use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::Rng as _;
use serde::Serialize;

use gmixup::analysis::{
    check_lemma1, check_theorem1, check_theorem2, collision_probability, degree_function,
    hom_density_graph, hom_density_graphon, random_graphon, Motif,
};
use gmixup::augment::{corrupt, CorruptionKind, CorruptionSpec};
use gmixup::estimation::{estimate, KChoice};
use gmixup::pipeline::{self, Mode, PipelineConfig};
use gmixup::mixup::mix_graphons;
use gmixup::tudataset::{load_tu_dataset, save_tu_dataset};
use gmixup::{rng, Error, EstimatorConfig, LabeledGraphon, Method, Result, StepGraphon};

#[derive(Parser)]
#[command(name = "gmixup", version, about = "Graphon-based mixup for graph datasets")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Augment a dataset with mixed-graphon samples.
    Mixup(MixupArgs),
    /// Estimate one graphon per class.
    Estimate(EstimateArgs),
    /// Densities, degree functions and collision probabilities.
    #[command(subcommand)]
    Analyze(Analyze),
    /// Randomized checks of the graphon bounds.
    #[command(subcommand)]
    Verify(Verify),
    /// Apply a label or edge corruption protocol.
    Corrupt(CorruptArgs),
}

#[derive(Args)]
struct DatasetArgs {
    /// Directory holding the TUDataset files.
    #[arg(long)]
    dataset: PathBuf,
    /// Dataset name (file prefix).
    #[arg(long)]
    name: String,
}

#[derive(Args)]
struct MixupArgs {
    /// JSON pipeline config; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    dataset: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
    #[arg(long)]
    method: Option<Method>,
    /// Graphon resolution: a count or "auto".
    #[arg(long)]
    k: Option<KChoice>,
    /// Generated node counts: "auto" or a comma-separated sweep.
    #[arg(long, value_delimiter = ',')]
    sample_k: Vec<KChoice>,
    #[arg(long)]
    lambda_low: Option<f64>,
    #[arg(long)]
    lambda_high: Option<f64>,
    #[arg(long)]
    aug_ratio: Option<f64>,
    #[arg(long)]
    mode: Option<Mode>,
    #[arg(long)]
    batch_size: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct EstimateArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long, default_value = "lg")]
    method: Method,
    #[arg(long, default_value = "auto")]
    k: KChoice,
    #[arg(long, default_value_t = 2.02)]
    usvt_eta: f64,
    #[arg(long, default_value_t = 5)]
    sas_window: usize,
    #[arg(long)]
    lg_blocks: Option<usize>,
    /// Output path; class `c` goes to `<stem>_class<c>.json`.
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct GraphSource {
    /// Graphon JSON file.
    #[arg(long, conflicts_with = "dataset")]
    graphon: Option<PathBuf>,
    #[arg(long, requires = "name")]
    dataset: Option<PathBuf>,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Subcommand)]
enum Analyze {
    /// Homomorphism density of a motif.
    Density {
        /// Motif name or "v=N; a-b ...".
        #[arg(long)]
        motif: Motif,
        #[command(flatten)]
        source: GraphSource,
    },
    /// Degree function of a graphon.
    Degree {
        #[arg(long)]
        graphon: PathBuf,
    },
    /// Probability that two samples of the graphon coincide.
    Collision {
        #[arg(long)]
        graphon: PathBuf,
    },
}

#[derive(Subcommand)]
enum Verify {
    /// Mixed-graphon density bound on random graphon pairs.
    Theorem1 {
        #[arg(long, default_value_t = 100)]
        trials: usize,
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "edge,triangle,path3")]
        motifs: Vec<Motif>,
        #[arg(long, value_delimiter = ',', default_value = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9")]
        lambdas: Vec<f64>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Sampling concentration of a mixed graphon.
    Theorem2 {
        #[arg(long, default_value_t = 8)]
        k: usize,
        #[arg(long, default_value = "triangle")]
        motif: Motif,
        #[arg(long, default_value_t = 2000)]
        n: usize,
        #[arg(long, default_value_t = 0.3)]
        epsilon: f64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 0.5)]
        lambda: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Counting lemma on random graphon pairs.
    Lemma1 {
        #[arg(long, default_value_t = 200)]
        trials: usize,
        /// Largest K; each pair draws K uniformly from 1..=k.
        #[arg(long, default_value_t = 10)]
        k: usize,
        #[arg(long, value_delimiter = ',', default_value = "edge,triangle,path3")]
        motifs: Vec<Motif>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Label,
    EdgeRemove,
    EdgeAdd,
}

#[derive(Args)]
struct CorruptArgs {
    #[command(flatten)]
    data: DatasetArgs,
    #[arg(long, value_enum)]
    kind: Kind,
    #[arg(long)]
    ratio: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Name of the written dataset; defaults to `<name>_<kind>`.
    #[arg(long)]
    out_name: Option<String>,
}

fn print_json(value: &impl Serialize) -> Result<()> {
    println!("{}", serde_json::to_string_pretty(value)?);
    Ok(())
}

fn pipeline_config(args: &MixupArgs) -> Result<PipelineConfig> {
    let mut c = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(|e| Error::Io {
                path: path.clone(),
                source: e,
            })?;
            serde_json::from_str(&text)?
        }
        None => PipelineConfig::default(),
    };
    macro_rules! set {
        ($($field:ident <- $value:expr),*) => {$(
            if let Some(v) = $value.clone() { c.$field = v.into(); }
        )*};
    }
    set!(name <- args.name, lambda_low <- args.lambda_low, lambda_high <- args.lambda_high,
        aug_ratio <- args.aug_ratio, k <- args.k, mode <- args.mode,
        batch_size <- args.batch_size, seed <- args.seed);
    if args.dataset.is_some() {
        c.dataset = args.dataset.clone();
    }
    if args.out.is_some() {
        c.output = args.out.clone();
    }
    if let Some(m) = args.method {
        c.estimator.method = m;
    }
    if c.name.is_empty() {
        return Err(Error::InvalidArgument("a dataset name is required".into()));
    }
    Ok(c)
}

fn cmd_mixup(args: MixupArgs) -> Result<()> {
    let base = pipeline_config(&args)?;
    if args.sample_k.len() <= 1 {
        let mut c = base;
        if let Some(&k) = args.sample_k.first() {
            c.sample_k = k;
        }
        let out = pipeline::run(&c)?;
        log::info!("{} graphs after augmentation", out.len());
        return Ok(());
    }
    // node-count sweep: one output set per value, suffixed `_k<value>`
    let root = base
        .dataset
        .clone()
        .ok_or_else(|| Error::InvalidArgument("a dataset directory is required".into()))?;
    let ds = load_tu_dataset(root, &base.name)?;
    for &sample_k in &args.sample_k {
        let c = PipelineConfig { sample_k, ..base.clone() };
        let out = match c.mode {
            Mode::Whole => pipeline::gmixup(&ds, &c)?,
            Mode::Batch => pipeline::augment_batched(&ds, &c, c.batch_size)?,
        };
        if let Some(dir) = &c.output {
            save_tu_dataset(&out, dir, &format!("{}_k{sample_k}", c.output_name()))?;
        }
        log::info!("sample_k={sample_k}: {} graphs after augmentation", out.len());
    }
    Ok(())
}

fn cmd_estimate(args: EstimateArgs) -> Result<()> {
    let ds = load_tu_dataset(&args.data.dataset, &args.data.name)?;
    let config = EstimatorConfig {
        method: args.method,
        k: KChoice::Fixed(args.k.resolve(&ds.graphs)),
        usvt_eta: args.usvt_eta,
        sas_window: args.sas_window,
        lg_blocks: args.lg_blocks,
    };
    let stem = args
        .out
        .file_stem()
        .and_then(|s| s.to_str())
        .unwrap_or("graphon")
        .to_string();
    let dir = args.out.parent().unwrap_or(Path::new(""));
    for c in 0..ds.num_classes {
        let members = ds.class_graphs(c);
        if members.is_empty() {
            return Err(Error::EmptyClass(format!("class {c} has no graphs")));
        }
        let mut w = estimate(&members, &config)?;
        w.meta.source_class = Some(c);
        for warning in &w.meta.warnings {
            log::warn!("class {c}: {warning}");
        }
        let path = dir.join(format!("{stem}_class{c}.json"));
        LabeledGraphon::one_hot(w, c, ds.num_classes)?.write_json(&path)?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

#[derive(Serialize)]
struct DatasetDensity {
    motif: String,
    mean: f64,
    densities: Vec<f64>,
}

fn cmd_analyze(cmd: Analyze) -> Result<()> {
    match cmd {
        Analyze::Density { motif, source } => match (source.graphon, source.dataset) {
            (Some(path), _) => {
                let g = LabeledGraphon::read_json(path)?;
                println!("{}", hom_density_graphon(&motif, &g.graphon)?);
                Ok(())
            }
            (None, Some(dir)) => {
                let ds = load_tu_dataset(dir, source.name.as_deref().unwrap_or_default())?;
                let densities: Vec<f64> = ds.graphs.iter().map(|g| hom_density_graph(&motif, g)).collect();
                let mean = densities.iter().sum::<f64>() / densities.len().max(1) as f64;
                print_json(&DatasetDensity {
                    motif: motif.to_string(),
                    mean,
                    densities,
                })
            }
            (None, None) => Err(Error::InvalidArgument("give --graphon or --dataset".into())),
        },
        Analyze::Degree { graphon } => {
            print_json(&degree_function(&LabeledGraphon::read_json(graphon)?.graphon))
        }
        Analyze::Collision { graphon } => {
            print_json(&collision_probability(&LabeledGraphon::read_json(graphon)?.graphon))
        }
    }
}

#[derive(Serialize)]
struct VerifySummary {
    check: &'static str,
    cases: usize,
    violations: usize,
    worst_slack: f64,
    failed_digests: Vec<String>,
}

/// Returns whether every case held.
fn cmd_verify(cmd: Verify) -> Result<bool> {
    match cmd {
        Verify::Theorem1 { trials, k, motifs, lambdas, seed } => {
            let mut s = VerifySummary {
                check: "theorem1",
                cases: 0,
                violations: 0,
                worst_slack: f64::INFINITY,
                failed_digests: Vec::new(),
            };
            for t in 0..trials {
                let mut r = rng::child(seed, t as u64);
                let wg = random_graphon(k, &mut r);
                let wh = random_graphon(k, &mut r);
                for f in &motifs {
                    for &lambda in &lambdas {
                        let rep = check_theorem1(&wg, &wh, f, lambda)?;
                        s.cases += 1;
                        for side in [&rep.g_side, &rep.h_side] {
                            s.worst_slack = s.worst_slack.min(side.rhs - side.lhs);
                        }
                        if !rep.satisfied() {
                            s.violations += 1;
                            s.failed_digests.push(rep.g_side.digest.clone());
                        }
                    }
                }
            }
            print_json(&s)?;
            Ok(s.violations == 0)
        }
        Verify::Theorem2 { k, motif, n, epsilon, trials, lambda, seed } => {
            let mut r = rng::from_seed(seed);
            let wg = random_graphon(k, &mut r);
            let wh = random_graphon(k, &mut r);
            let mixed = mix_pair(&wg, &wh, lambda)?;
            let rep = check_theorem2(&mixed, &motif, n, epsilon, trials, rng::next_seed(&mut r))?;
            print_json(&rep)?;
            Ok(rep.bound.satisfied)
        }
        Verify::Lemma1 { trials, k, motifs, seed } => {
            if k == 0 {
                return Err(Error::InvalidArgument("k must be at least 1".into()));
            }
            let mut s = VerifySummary {
                check: "lemma1",
                cases: 0,
                violations: 0,
                worst_slack: f64::INFINITY,
                failed_digests: Vec::new(),
            };
            for t in 0..trials {
                let mut r = rng::child(seed, t as u64);
                let kk = r.random_range(1..=k);
                let w = random_graphon(kk, &mut r);
                let w2 = random_graphon(kk, &mut r);
                for f in &motifs {
                    let rep = check_lemma1(f, &w, &w2)?;
                    s.cases += 1;
                    s.worst_slack = s.worst_slack.min(rep.rhs - rep.lhs);
                    if !rep.satisfied {
                        s.violations += 1;
                        s.failed_digests.push(rep.digest);
                    }
                }
            }
            print_json(&s)?;
            Ok(s.violations == 0)
        }
    }
}

fn mix_pair(a: &StepGraphon, b: &StepGraphon, lambda: f64) -> Result<StepGraphon> {
    let la = LabeledGraphon::one_hot(a.clone(), 0, 2)?;
    let lb = LabeledGraphon::one_hot(b.clone(), 1, 2)?;
    Ok(mix_graphons(&la, &lb, lambda)?.graphon)
}

fn cmd_corrupt(args: CorruptArgs) -> Result<()> {
    let ds = load_tu_dataset(&args.data.dataset, &args.data.name)?;
    let (kind, tag) = match args.kind {
        Kind::Label => (CorruptionKind::Label, "label"),
        Kind::EdgeRemove => (CorruptionKind::EdgeRemove, "edge_remove"),
        Kind::EdgeAdd => (CorruptionKind::EdgeAdd, "edge_add"),
    };
    let out = corrupt(&ds, &CorruptionSpec { kind, ratio: args.ratio, seed: args.seed })?;
    let name = args
        .out_name
        .unwrap_or_else(|| format!("{}_{tag}", args.data.name));
    save_tu_dataset(&out, &args.out, &name)?;
    log::info!("wrote {name} to {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Mixup(a) => cmd_mixup(a).map(|_| true),
        Command::Estimate(a) => cmd_estimate(a).map(|_| true),
        Command::Analyze(a) => cmd_analyze(a).map(|_| true),
        Command::Verify(v) => cmd_verify(v),
        Command::Corrupt(a) => cmd_corrupt(a).map(|_| true),
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => {
            log::error!("bound check failed");
            ExitCode::from(1)
        }
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(if e.is_validation() { 2 } else { 1 })
        }
    }
}
