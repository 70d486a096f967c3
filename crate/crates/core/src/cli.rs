//! Command-line front end.
//!
//! Options come from three layers, later ones winning: built-in defaults,
//! an optional TOML config file (`--config`), and flags. Config keys are
//! the flag names with underscores, e.g. `dataset_dir = "data"` or
//! `max_threshold = 0.6`.
//!
//! Exit codes: 0 success, 1 configuration or validation failure, 2 input
//! data error.

use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Deserialize;

use crate::diagram_distance::Order;
use crate::error::{Error, Result};
use crate::pipeline::{self, parse_dims, PipelineConfig};
use crate::stability::stability_audit;
use crate::vectorize::BettiWeight;

/// Environment variable capping the worker thread count.
pub const THREADS_ENV: &str = "GRAPH_PH_THREADS";

#[derive(Debug, Parser)]
#[command(
    name = "graph-ph",
    version,
    about = "Persistent homology features for graph datasets"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write one feature row per graph (graph features or TDA vectors).
    Featurize(PipelineArgs),
    /// Featurize after randomly deleting a fraction of every graph's edges.
    Perturb {
        #[command(flatten)]
        args: PipelineArgs,
        /// Run the 0%..45% sweep in 5% steps; --output names a directory.
        #[arg(long)]
        sweep: bool,
    },
    /// Write persistence diagrams of every graph.
    Pd(PipelineArgs),
    /// Write the pairwise diagram distance matrix for one dimension.
    Distance {
        #[command(flatten)]
        args: PipelineArgs,
        /// Wasserstein order q >= 1.
        #[arg(long, conflicts_with = "bottleneck")]
        q: Option<f64>,
        /// Use the bottleneck distance instead of Wasserstein.
        #[arg(long)]
        bottleneck: bool,
    },
    /// Audit the Betti-function stability bound on random diagram pairs.
    Stability(StabilityArgs),
}

#[derive(Debug, Default, Args)]
pub struct PipelineArgs {
    /// TOML file supplying defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Directory holding the TUDataset files.
    #[arg(long)]
    pub dataset_dir: Option<PathBuf>,
    /// Dataset name, the prefix of its `_A.txt` file.
    #[arg(long)]
    pub dataset: Option<String>,
    /// spd or resistance.
    #[arg(long)]
    pub metric: Option<String>,
    /// Number of grid points on [0, 1] (default 100).
    #[arg(long)]
    pub steps: Option<usize>,
    /// Filtration cap as a fraction of the largest finite distance, in (0, 1].
    #[arg(long)]
    pub max_threshold: Option<f64>,
    /// betti, landscape or silhouette; omit for the nine graph features.
    #[arg(long)]
    pub vectorizer: Option<String>,
    /// Landscape layer, starting at 1.
    #[arg(long)]
    pub landscape_k: Option<usize>,
    /// Persistence exponent of the silhouette weights.
    #[arg(long)]
    pub silhouette_power: Option<f64>,
    /// Weight Betti functions by persistence instead of counting points.
    #[arg(long)]
    pub persistence_weight: bool,
    /// Comma-separated homology dimensions, e.g. 0,1.
    #[arg(long)]
    pub dims: Option<String>,
    /// Seed for edge deletion.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Fraction of each graph's edges to delete before featurizing.
    #[arg(long)]
    pub delete_fraction: Option<f64>,
    /// Accept deletion fractions above 0.45.
    #[arg(long)]
    pub allow_large_deletion: bool,
    /// Skip normalization of distances to [0, 1].
    #[arg(long)]
    pub no_normalize: bool,
    /// Output path; standard output when omitted.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// csv or json.
    #[arg(long)]
    pub format: Option<String>,
}

#[derive(Debug, Args)]
pub struct StabilityArgs {
    #[arg(long, default_value_t = 10_000)]
    pub trials: usize,
    #[arg(long, default_value_t = 30)]
    pub max_points: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Include the worst-ratio diagram pair in the report.
    #[arg(long)]
    pub witness: bool,
}

/// Contents of a `--config` TOML file. Keys are the flag names with
/// underscores; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub dataset_dir: Option<PathBuf>,
    pub dataset: Option<String>,
    pub metric: Option<String>,
    pub steps: Option<usize>,
    pub max_threshold: Option<f64>,
    pub vectorizer: Option<String>,
    pub landscape_k: Option<usize>,
    pub silhouette_power: Option<f64>,
    #[serde(default)]
    pub persistence_weight: bool,
    /// Either `"0,1"` or `[0, 1]`.
    pub dims: Option<Dims>,
    pub seed: Option<u64>,
    pub delete_fraction: Option<f64>,
    #[serde(default)]
    pub allow_large_deletion: bool,
    #[serde(default)]
    pub no_normalize: bool,
    pub output: Option<PathBuf>,
    pub format: Option<String>,
}

#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum Dims {
    List(Vec<usize>),
    Text(String),
}

pub fn parse_config_file(text: &str) -> Result<ConfigFile> {
    toml::from_str(text).map_err(|e| Error::validation(format!("config file: {e}")))
}

impl PipelineArgs {
    /// Merges defaults, the config file and flags into a validated
    /// configuration, plus the output path if any.
    pub fn resolve(&self) -> Result<(PipelineConfig, Option<PathBuf>)> {
        let file = match &self.config {
            Some(path) => {
                let text = fs::read_to_string(path).map_err(|e| {
                    Error::validation(format!("cannot read config file {}: {e}", path.display()))
                })?;
                parse_config_file(&text)?
            }
            None => ConfigFile::default(),
        };

        let mut c = PipelineConfig::default();
        if let Some(v) = self.dataset_dir.clone().or(file.dataset_dir) {
            c.dataset_dir = v;
        }
        if let Some(v) = self.dataset.clone().or(file.dataset) {
            c.dataset = v;
        }
        if let Some(v) = self.metric.as_deref().or(file.metric.as_deref()) {
            c.metric = v.parse()?;
        }
        c.steps = self.steps.or(file.steps).unwrap_or(c.steps);
        c.max_threshold = self
            .max_threshold
            .or(file.max_threshold)
            .unwrap_or(c.max_threshold);
        if let Some(v) = self.vectorizer.as_deref().or(file.vectorizer.as_deref()) {
            c.vectorizer = Some(v.parse()?);
        }
        c.landscape_k = self
            .landscape_k
            .or(file.landscape_k)
            .unwrap_or(c.landscape_k);
        c.silhouette_power = self
            .silhouette_power
            .or(file.silhouette_power)
            .unwrap_or(c.silhouette_power);
        if self.persistence_weight || file.persistence_weight {
            c.betti_weight = BettiWeight::Persistence;
        }
        let dims_text = match (&self.dims, file.dims) {
            (Some(v), _) => Some(v.clone()),
            (None, Some(Dims::Text(v))) => Some(v),
            (None, Some(Dims::List(v))) => {
                Some(v.iter().map(usize::to_string).collect::<Vec<_>>().join(","))
            }
            (None, None) => None,
        };
        if let Some(v) = dims_text {
            c.dims = parse_dims(&v)?;
        }
        c.seed = self.seed.or(file.seed).unwrap_or(c.seed);
        c.delete_fraction = self
            .delete_fraction
            .or(file.delete_fraction)
            .unwrap_or(c.delete_fraction);
        c.allow_large_deletion = self.allow_large_deletion || file.allow_large_deletion;
        c.normalize = !(self.no_normalize || file.no_normalize);
        if let Some(v) = self.format.as_deref().or(file.format.as_deref()) {
            c.format = v.parse()?;
        }
        if c.dataset.is_empty() {
            return Err(Error::validation("--dataset is required"));
        }
        c.validate()?;
        Ok((c, self.output.clone().or(file.output)))
    }
}

fn emit(output: Option<&Path>, contents: &str) -> Result<()> {
    match output {
        Some(path) => {
            if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
            }
            fs::write(path, contents).map_err(|e| Error::io(path, e))
        }
        None => {
            let mut out = std::io::stdout().lock();
            match out
                .write_all(contents.as_bytes())
                .and_then(|()| out.flush())
            {
                // the reader went away, e.g. `| head`
                Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
                r => r.map_err(|e| Error::io("<stdout>", e)),
            }
        }
    }
}

fn exit_code_for(err: &Error) -> u8 {
    match err {
        Error::Io { .. } | Error::Format { .. } | Error::Computation { .. } => 2,
        Error::Validation(_) | Error::Precondition(_) => 1,
    }
}

fn run_pipeline(
    args: &PipelineArgs,
    body: impl FnOnce(&PipelineConfig, Option<&Path>) -> Result<()>,
) -> u8 {
    let (config, output) = match args.resolve() {
        Ok(v) => v,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match body(&config, output.as_deref()) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code_for(&e)
        }
    }
}

/// Runs a parsed command and returns its exit code.
pub fn run(cli: Cli) -> u8 {
    match cli.command {
        Command::Featurize(args) => run_pipeline(&args, |config, output| {
            let ds = pipeline::load_dataset(config)?;
            emit(output, &pipeline::featurize(&ds, config)?)
        }),
        Command::Perturb { args, sweep } => run_pipeline(&args, |config, output| {
            let ds = pipeline::load_dataset(config)?;
            if sweep {
                let dir = output
                    .ok_or_else(|| Error::validation("--sweep needs --output <directory>"))?;
                fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
                for (name, contents) in pipeline::perturb_sweep(&ds, config)? {
                    emit(Some(&dir.join(name)), &contents)?;
                }
                Ok(())
            } else {
                emit(output, &pipeline::perturb(&ds, config)?)
            }
        }),
        Command::Pd(args) => run_pipeline(&args, |config, output| {
            let ds = pipeline::load_dataset(config)?;
            emit(output, &pipeline::diagrams(&ds, config)?)
        }),
        Command::Distance {
            args,
            q,
            bottleneck,
        } => run_pipeline(&args, |config, output| {
            let order = if bottleneck {
                Order::Infinity
            } else {
                let q = q.unwrap_or(1.0);
                if !(q >= 1.0) || !q.is_finite() {
                    return Err(Error::validation(format!(
                        "q must be a finite value >= 1, got {q}"
                    )));
                }
                Order::Finite(q)
            };
            if config.dims.len() != 1 {
                return Err(Error::validation(
                    "distance needs exactly one dimension in --dims",
                ));
            }
            let ds = pipeline::load_dataset(config)?;
            emit(output, &pipeline::distances(&ds, config, order)?)
        }),
        Command::Stability(args) => {
            if args.trials == 0 {
                eprintln!("error: --trials must be at least 1");
                return 1;
            }
            match stability_audit(args.trials, args.max_points, args.seed) {
                Ok(mut report) => {
                    if !args.witness {
                        report.witness = None;
                    }
                    let json = serde_json::to_string_pretty(&report).expect("report serializes");
                    if let Err(e) = emit(None, &(json + "\n")) {
                        eprintln!("error: {e}");
                        return exit_code_for(&e);
                    }
                    if report.violations == 0 {
                        0
                    } else {
                        1
                    }
                }
                Err(e) => {
                    eprintln!("error: {e}");
                    exit_code_for(&e)
                }
            }
        }
    }
}

/// Applies `GRAPH_PH_THREADS`, parses arguments and runs.
pub fn main_entry() -> ExitCode {
    if let Ok(value) = std::env::var(THREADS_ENV) {
        match value.trim().parse::<usize>() {
            Ok(n) if n > 0 => {
                let _ = rayon::ThreadPoolBuilder::new()
                    .num_threads(n)
                    .build_global();
            }
            _ => {
                eprintln!("error: {THREADS_ENV} must be a positive integer, got {value:?}");
                return ExitCode::from(1);
            }
        }
    }
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    ExitCode::from(run(cli))
}
