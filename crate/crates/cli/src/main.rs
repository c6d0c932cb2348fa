use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use log::{info, warn};

use muckpile::corpus::{BlastParams, Feature};
use muckpile::ingest::serialize_detections;
use muckpile::report::{self, io::write_atomic, AnalyzeConfig, CorpusConfig, Plot};
use muckpile::spatial::{Bandwidth, KdeConfig};
use muckpile::synth::{generate, SceneSpec};
use muckpile::Error;

const EXIT_USAGE: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_INTERNAL: u8 = 3;

#[derive(Parser)]
#[command(
    name = "muckpile",
    version,
    about = "Spatial statistics for rock fragment detections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Analyze a detection file and write features, tables and plots.
    Analyze(AnalyzeArgs),
    /// Compare feature files across images.
    Corpus(CorpusArgs),
    /// Generate a synthetic detection file from a scene spec.
    Synth(SynthArgs),
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long)]
    out_dir: PathBuf,
    /// Metres per pixel.
    #[arg(long)]
    scale: Option<f64>,
    /// KDE bandwidth in normalized units, or `auto` for Scott's rule.
    #[arg(long, default_value = "auto", value_parser = parse_bandwidth)]
    bandwidth: Bandwidth,
    #[arg(long, default_value_t = 3)]
    top_k: usize,
    #[arg(long, default_value_t = muckpile::coords::DEFAULT_EPSILON)]
    epsilon: f64,
    /// Comma-separated Ripley radii.
    #[arg(long, value_delimiter = ',')]
    radii: Option<Vec<f64>>,
    /// `all`, `none` or a comma-separated list of plot names.
    #[arg(long, default_value = "all", value_parser = parse_plots)]
    plots: PlotList,
    /// Skip the geometric and DBSCAN filters.
    #[arg(long)]
    no_filter: bool,
}

#[derive(Args)]
struct CorpusArgs {
    /// Glob matching feature files.
    #[arg(long)]
    features: String,
    /// CSV sidecar of blast parameters keyed by image_id.
    #[arg(long)]
    params: Option<PathBuf>,
    #[arg(long, default_value_t = muckpile::corpus::DEFAULT_K)]
    k: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = muckpile::corpus::DEFAULT_OUTLIER_T)]
    outlier_t: f64,
    #[arg(long, default_value = ".")]
    out_dir: PathBuf,
    /// Comma-separated features used for clustering and regression.
    #[arg(long, value_delimiter = ',')]
    cluster_features: Option<Vec<Feature>>,
    /// Order the summary table by ascending β.
    #[arg(long)]
    sort_by_beta: bool,
    #[arg(long)]
    no_plots: bool,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long)]
    spec: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Overrides the seed in the spec.
    #[arg(long)]
    seed: Option<u64>,
}

#[derive(Clone)]
struct PlotList(Vec<Plot>);

fn parse_plots(s: &str) -> Result<PlotList, String> {
    report::parse_plot_list(s).map(PlotList)
}

fn parse_bandwidth(s: &str) -> Result<Bandwidth, String> {
    if s == "auto" {
        return Ok(Bandwidth::Auto);
    }
    match s.parse::<f64>() {
        Ok(h) if h.is_finite() && h > 0.0 => Ok(Bandwidth::Fixed(h)),
        _ => Err(format!("expected `auto` or a positive number, got `{s}`")),
    }
}

/// A failure with the exit code it maps to.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Io(_) => EXIT_INTERNAL,
            _ => EXIT_INPUT,
        };
        Self {
            code,
            message: e.to_string(),
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, Failure> {
    std::fs::read(path).map_err(|e| Failure {
        code: EXIT_INPUT,
        message: format!("cannot read {}: {e}", path.display()),
    })
}

fn run_analyze(args: AnalyzeArgs) -> Result<(), Failure> {
    let config = AnalyzeConfig {
        epsilon: args.epsilon,
        kde: KdeConfig {
            bandwidth: args.bandwidth,
            top_k: args.top_k,
            ..KdeConfig::default()
        },
        scale: args.scale,
        radii: args.radii,
        filter: !args.no_filter,
        plots: args.plots.0,
    };
    config
        .validate()
        .map_err(|e| Failure::usage(e.to_string()))?;
    let bytes = read_input(&args.input)?;
    let reports = report::analyze_document(&bytes, &config)?;
    for r in &reports {
        for w in &r.warnings {
            warn!("{w}");
        }
    }
    report::write_outputs(&reports, &args.out_dir)?;
    info!(
        "analyzed {} image(s) into {}",
        reports.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn run_corpus(args: CorpusArgs) -> Result<(), Failure> {
    let paths: Vec<PathBuf> = glob::glob(&args.features)
        .map_err(|e| Failure::usage(format!("invalid glob `{}`: {e}", args.features)))?
        .collect::<Result<_, _>>()
        .map_err(|e| Failure {
            code: EXIT_INPUT,
            message: e.to_string(),
        })?;
    let rows = report::load_feature_files(&paths)?;
    let params = match &args.params {
        Some(p) => {
            let text = String::from_utf8(read_input(p)?).map_err(|_| Failure {
                code: EXIT_INPUT,
                message: format!("{} is not UTF-8", p.display()),
            })?;
            Some(BlastParams::parse(&text)?)
        }
        None => None,
    };
    let config = CorpusConfig {
        k: args.k,
        seed: args.seed,
        outlier_t: args.outlier_t,
        features: args
            .cluster_features
            .unwrap_or_else(|| Feature::CLUSTERING_DEFAULT.to_vec()),
        sort_by_beta: args.sort_by_beta,
        plots: !args.no_plots,
    };
    let corpus = report::corpus_run(&rows, params.as_ref(), &config)?;
    for w in &corpus.warnings {
        warn!("{w}");
    }
    report::write_corpus(&corpus, &args.out_dir, config.plots)?;
    info!(
        "clustered {} image(s) into {}",
        corpus.matrix.rows.len(),
        args.out_dir.display()
    );
    Ok(())
}

fn run_synth(args: SynthArgs) -> Result<(), Failure> {
    let bytes = read_input(&args.spec)?;
    let mut spec: SceneSpec = serde_json::from_slice(&bytes).map_err(Error::from)?;
    if let Some(seed) = args.seed {
        spec.seed = seed;
    }
    let ds = generate(&spec)?;
    let mut text = serialize_detections(&[ds]);
    text.push('\n');
    write_atomic(&args.out, text.as_bytes())?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(EXIT_USAGE)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Analyze(a) => run_analyze(a),
        Command::Corpus(a) => run_corpus(a),
        Command::Synth(a) => run_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
