use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use verbclust::cli::{run_cluster, run_evaluate, run_featurize, run_train, run_type, FeatureMode, PipelineConfig};
use verbclust::synth::{classification_corpus, ClassificationConfig};

#[derive(Parser)]
#[command(name = "verbclust", version, about = "Typed-verb predicate clustering pipeline")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Type the triples corpus (typed_triples.tsv, signatures.tsv, associations.tsv).
    Type(StageArgs),
    /// Train typed-verb embeddings (embeddings.txt, loss_trace.tsv).
    Train(StageArgs),
    /// Build verb senses and global predicate clusters (clusters.tsv, centroids.txt).
    Cluster(StageArgs),
    /// Map message kernels to feature vectors.
    Featurize {
        #[command(flatten)]
        stage: StageArgs,
        #[arg(long, value_enum, default_value = "cluster")]
        mode: Mode,
    },
    /// Cross-validate logistic regression on a feature file.
    Evaluate {
        #[command(flatten)]
        stage: StageArgs,
        #[arg(long, value_enum, default_value = "cluster")]
        mode: Mode,
    },
    /// Run type, train, cluster, featurize and evaluate in order.
    Run {
        #[command(flatten)]
        stage: StageArgs,
        #[arg(long, value_enum, default_value = "cluster")]
        mode: Mode,
    },
    /// Write a synthetic labeled corpus and a pipeline.toml that uses it.
    Synth {
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 1000)]
        messages: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Probability of flipping each label.
        #[arg(long, default_value_t = 0.02)]
        noise: f64,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Cluster,
    Svo,
    Verb,
}

impl From<Mode> for FeatureMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Cluster => FeatureMode::Cluster,
            Mode::Svo => FeatureMode::Svo,
            Mode::Verb => FeatureMode::Verb,
        }
    }
}

/// Config file plus overrides for individual keys.
#[derive(Args)]
struct StageArgs {
    #[arg(long, short)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    output: Option<PathBuf>,
    /// Single-worker training (bit-reproducible).
    #[arg(long)]
    deterministic: bool,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    dim: Option<usize>,
    #[arg(long)]
    epochs: Option<usize>,
    /// Number of global predicate clusters.
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    beta: Option<f64>,
    #[arg(long)]
    folds: Option<usize>,
    #[arg(long)]
    lambda: Option<f64>,
}

/// Bad invocation or configuration; exits with status 1.
#[derive(Debug)]
struct Usage(String);

impl fmt::Display for Usage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(msg: impl Into<String>) -> anyhow::Error {
    Usage(msg.into()).into()
}

fn load_config(args: &StageArgs) -> Result<PipelineConfig> {
    let text = std::fs::read_to_string(&args.config)
        .map_err(|e| verbclust::Error::Data(format!("{}: {e}", args.config.display())))?;
    let mut config = PipelineConfig::from_toml(&text)
        .map_err(|e| usage(format!("{}: {e}", args.config.display())))?;
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(output) = &args.output {
        config.paths.output = output.clone();
    }
    if let Some(w) = args.workers {
        config.train.workers = w;
    }
    if args.deterministic {
        config.train.workers = 1;
    }
    if let Some(d) = args.dim {
        config.train.dimension = d;
    }
    if let Some(e) = args.epochs {
        config.train.epochs = e;
    }
    if let Some(k) = args.k {
        config.cluster.k = k;
    }
    if let Some(b) = args.beta {
        config.cluster.beta = b;
    }
    if let Some(f) = args.folds {
        config.evaluate.folds = f;
    }
    if let Some(l) = args.lambda {
        config.evaluate.lambda = l;
    }
    if config.paths.output.as_os_str().is_empty() {
        return Err(usage("paths.output must be set"));
    }
    let base = args.config.parent().unwrap_or(Path::new(""));
    config.resolve_paths(base);

    config.train_config().validate().map_err(|e| usage(e.to_string()))?;
    let c = &config;
    if c.cluster.k == 0 || !(c.cluster.beta >= 0.0) {
        return Err(usage("cluster.k must be >= 1 and cluster.beta >= 0"));
    }
    if c.evaluate.folds < 2 || !(c.evaluate.lambda >= 0.0) || c.featurize.svo_k == 0 {
        return Err(usage("evaluate.folds must be >= 2, evaluate.lambda >= 0, featurize.svo_k >= 1"));
    }
    config.validate_paths()?;

    let out = &config.paths.output;
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    std::fs::write(out.join("config.toml"), &text).with_context(|| format!("writing into {}", out.display()))?;
    std::fs::write(out.join("effective_config.toml"), config.to_toml())
        .with_context(|| format!("writing into {}", out.display()))?;
    Ok(config)
}

fn evaluate(config: &PipelineConfig, mode: FeatureMode) -> Result<()> {
    let r = run_evaluate(config, mode)?;
    println!(
        "{} features: mean F1 {:.4} (precision {:.4}, recall {:.4}) over {} folds",
        mode.name(),
        r.mean_f1,
        r.mean_precision,
        r.mean_recall,
        r.folds.len()
    );
    Ok(())
}

fn synth(out: &Path, messages: usize, seed: u64, noise: f64) -> Result<()> {
    if !(0.0..0.5).contains(&noise) {
        return Err(usage("--noise must lie in [0, 0.5)"));
    }
    let corpus = classification_corpus(&ClassificationConfig {
        messages,
        noise,
        seed,
        ..ClassificationConfig::default()
    });
    corpus.write(out)?;
    corpus.word_vectors(20, seed).save(out.join("word_vectors.txt"))?;

    let mut config = PipelineConfig {
        seed,
        ..PipelineConfig::default()
    };
    let p = &mut config.paths;
    p.triples = Some("triples.tsv".into());
    p.categories = Some("categories.tsv".into());
    p.senses = Some("senses.tsv".into());
    p.thesaurus = Some("thesaurus.tsv".into());
    p.kernels = Some("kernels.tsv".into());
    p.labels = Some("labels.tsv".into());
    p.word_vectors = Some("word_vectors.txt".into());
    p.output = "out".into();
    config.train.dimension = 20;
    config.train.epochs = 200;
    config.cluster.k = 4;
    config.featurize.svo_k = 8;
    let path = out.join("pipeline.toml");
    std::fs::write(&path, config.to_toml()).with_context(|| format!("writing {}", path.display()))?;
    println!("wrote {} messages to {}; run with --config {}", messages, out.display(), path.display());
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Type(a) => run_type(&load_config(&a)?)?,
        Command::Train(a) => run_train(&load_config(&a)?)?,
        Command::Cluster(a) => run_cluster(&load_config(&a)?)?,
        Command::Featurize { stage, mode } => run_featurize(&load_config(&stage)?, mode.into())?,
        Command::Evaluate { stage, mode } => evaluate(&load_config(&stage)?, mode.into())?,
        Command::Run { stage, mode } => {
            let config = load_config(&stage)?;
            run_type(&config)?;
            run_train(&config)?;
            run_cluster(&config)?;
            run_featurize(&config, mode.into())?;
            evaluate(&config, mode.into())?;
        }
        Command::Synth {
            out,
            messages,
            seed,
            noise,
        } => synth(&out, messages, seed, noise)?,
    }
    Ok(())
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.downcast_ref::<Usage>().is_some() {
        return 1;
    }
    match e.downcast_ref::<verbclust::Error>() {
        Some(verbclust::Error::Numeric(_)) => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
