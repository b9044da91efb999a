use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use curvelrr::bench::{self, ConfigFile, DatasetKind, GenerateParams, Method, PipelineConfig};
use curvelrr::baselines::DtwConfig;
use curvelrr::clustering::sca;
use curvelrr::io;
use curvelrr::{Error, Result};

/// Clustering of functional data with curve low-rank representation.
#[derive(Parser)]
#[command(name = "curvelrr", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic dataset directory.
    Generate {
        #[arg(value_parser = parse_kind)]
        kind: DatasetKind,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
    },
    /// Cluster a dataset with one method and score it against its labels.
    Cluster {
        /// Dataset directory or manifest file.
        dataset: PathBuf,
        #[arg(long, value_parser = parse_method)]
        method: Method,
        /// Number of clusters (defaults to the number of true labels).
        #[arg(long)]
        clusters: Option<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Where to write the predicted labels as a JSON array.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        method_args: MethodArgs,
    },
    /// Repeat generation and clustering, and tabulate SCA statistics.
    Benchmark {
        #[arg(value_parser = parse_kind)]
        kind: DatasetKind,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, default_value_t = 50)]
        repeats: usize,
        /// Comma-separated list from kmeans, dtw, lrr, clrr, or `all`.
        #[arg(long, default_value = "all")]
        methods: String,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Directory for table.txt, runs.csv, summary.csv and timings.csv.
        #[arg(long)]
        out: Option<PathBuf>,
        #[command(flatten)]
        method_args: MethodArgs,
    },
}

#[derive(Args)]
struct DataArgs {
    #[arg(long, default_value_t = 3)]
    clusters: usize,
    #[arg(long, default_value_t = 20)]
    per_cluster: usize,
    #[arg(long, default_value_t = 100)]
    length: usize,
    /// Ambient dimension of warped-basis curves.
    #[arg(long, default_value_t = 1)]
    dim: usize,
}

impl DataArgs {
    fn params(&self, kind: DatasetKind, seed: u64) -> GenerateParams {
        GenerateParams {
            kind,
            clusters: self.clusters,
            per_cluster: self.per_cluster,
            length: self.length,
            dim: self.dim,
            seed,
        }
    }
}

#[derive(Args)]
struct MethodArgs {
    /// Nuclear-norm weight (default 0.1).
    #[arg(long)]
    lambda: Option<f64>,
    /// DTW band half-width as a fraction of the length (default 0.10).
    #[arg(long)]
    dtw_window: Option<f64>,
    /// JSON settings file; flags take precedence.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Zero the coefficient matrix diagonal before spectral clustering.
    #[arg(long)]
    zero_diagonal: bool,
}

impl MethodArgs {
    fn pipeline(&self) -> Result<PipelineConfig> {
        let mut cfg = PipelineConfig::default();
        if let Some(path) = &self.config {
            cfg = ConfigFile::load(path)?.apply(cfg)?;
        }
        if let Some(l) = self.lambda {
            cfg = cfg.with_lambda(l);
        }
        if let Some(w) = self.dtw_window {
            cfg.dtw = DtwConfig::new(w)?;
        }
        cfg.zero_diagonal |= self.zero_diagonal;
        cfg.solver.validate()?;
        cfg.lrr.validate()?;
        Ok(cfg)
    }
}

fn parse_kind(s: &str) -> std::result::Result<DatasetKind, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_method(s: &str) -> std::result::Result<Method, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn generate(kind: DatasetKind, data: &DataArgs, seed: u64, out: &Path) -> Result<()> {
    let ds = bench::generate(&data.params(kind, seed))?;
    io::save_dataset(&ds, out)?;
    println!("wrote {} curves ({}) to {}", ds.len(), ds.name, out.display());
    Ok(())
}

fn cluster(
    dataset: &Path,
    method: Method,
    clusters: Option<usize>,
    seed: u64,
    out: Option<&Path>,
    args: &MethodArgs,
) -> Result<()> {
    let cfg = args.pipeline()?;
    let ds = io::load_dataset(dataset)?;
    let c = clusters.unwrap_or_else(|| ds.num_clusters());
    let start = Instant::now();
    let result = bench::run_method(method, &ds.curves, c, &cfg, seed)?;
    let runtime = start.elapsed().as_secs_f64();
    let score = sca(&result.labels, &ds.truth)?;
    match out {
        Some(path) => io::write_labels(&result.labels, path)?,
        None => println!("{}", serde_json::to_string(&result.labels.to_one_based()).expect("labels serialize")),
    }
    let mut line = format!("method={method} sca={score:.6} runtime={runtime:.3}s");
    if let (Some(iters), Some(conv)) = (result.iters, result.converged) {
        line.push_str(&format!(" iters={iters} converged={conv}"));
    }
    println!("{line}");
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Generate { kind, data, seed, out } => generate(kind, &data, seed, &out),
        Command::Cluster {
            dataset,
            method,
            clusters,
            seed,
            out,
            method_args,
        } => cluster(&dataset, method, clusters, seed, out.as_deref(), &method_args),
        Command::Benchmark {
            kind,
            data,
            repeats,
            methods,
            seed,
            out,
            method_args,
        } => {
            let cfg = method_args.pipeline()?;
            let methods = bench::parse_methods(&methods)?;
            let results = bench::run_benchmark(&data.params(kind, seed), &methods, repeats, &cfg)?;
            print!("{}", bench::format_table(&results));
            if let Some(dir) = out {
                bench::write_benchmark(&results, &dir)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
