//! Command-line interface.
//!
//! Exit codes: 0 on success, 1 for runtime and data errors, 2 for usage and
//! configuration errors.

use std::f64::consts::FRAC_PI_2;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::checkpoint::Checkpoint;
use crate::config::{DataSource, ExtractorMode, RunConfig};
use crate::data::{
    load_labeled_root, resize_bilinear, write_features, RandomProjection, Sample, IMAGE_SIDE,
};
use crate::error::Error;
use crate::gradcheck::{gradcheck, Block};
use crate::io::write_atomic;
use crate::metrics::{mcnemar, mcnemar_document, metrics, metrics_document, DEFAULT_ALPHA};
use crate::model::{evaluate, train, Model, ModelKind};
use crate::qasm::export_qasm;
use crate::rng::DEFAULT_SEED;

#[derive(Debug, Parser)]
#[command(
    name = "qcnn",
    version,
    about = "Hybrid quantum-classical binary classifier"
)]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelArg {
    Hybrid,
    Classical,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Hybrid => ModelKind::Hybrid,
            ModelArg::Classical => ModelKind::Classical,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Subset {
    All,
    Train,
    Validation,
    Test,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration; flags override its values.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Seed for every random draw (default 42).
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Number of variational layers.
    #[arg(long, global = true)]
    pub depth: Option<usize>,
    #[arg(long, global = true)]
    pub epochs: Option<usize>,
    /// Adam learning rate.
    #[arg(long, global = true)]
    pub lr: Option<f64>,
    /// Mini-batch size.
    #[arg(long, global = true)]
    pub batch: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum)]
    pub model: Option<ModelArg>,
}

#[derive(Debug, Args, Default)]
pub struct DataArgs {
    /// Precomputed feature file (.csv, otherwise binary).
    #[arg(long, conflicts_with_all = ["images", "synthetic"])]
    pub features: Option<PathBuf>,
    /// Image root holding `normal/` and `demented/` folders.
    #[arg(long, conflicts_with = "synthetic")]
    pub images: Option<PathBuf>,
    /// Generate a synthetic dataset instead of reading one.
    #[arg(long)]
    pub synthetic: bool,
    #[arg(long, default_value_t = 100)]
    pub n_per_class: usize,
    #[arg(long, default_value_t = 4.0)]
    pub separation: f64,
    #[arg(long, default_value_t = 0.5)]
    pub noise: f64,
    /// Seed for the synthetic generator (defaults to --seed).
    #[arg(long)]
    pub data_seed: Option<u64>,
    /// Seed of the random projection applied to images.
    #[arg(long)]
    pub projection_seed: Option<u64>,
}

impl DataArgs {
    fn source(&self) -> Option<DataSource> {
        if let Some(path) = &self.features {
            Some(DataSource::Features { path: path.clone() })
        } else if let Some(root) = &self.images {
            Some(DataSource::Images { root: root.clone() })
        } else if self.synthetic {
            Some(DataSource::Synthetic {
                n_per_class: self.n_per_class,
                separation: self.separation,
                noise_sigma: self.noise,
                seed: self.data_seed,
            })
        } else {
            None
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model; writes checkpoint.json and history.csv.
    Train {
        #[command(flatten)]
        data: DataArgs,
    },
    /// Evaluate a checkpoint; writes metrics.txt and predictions.csv.
    Eval {
        #[arg(long)]
        checkpoint: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        /// Part of the seeded split to evaluate on.
        #[arg(long, value_enum, default_value_t = Subset::All)]
        subset: Subset,
    },
    /// McNemar's test between two checkpoints on the same data.
    Compare {
        #[arg(long)]
        checkpoint_a: PathBuf,
        #[arg(long)]
        checkpoint_b: PathBuf,
        #[command(flatten)]
        data: DataArgs,
        #[arg(long, value_enum, default_value_t = Subset::All)]
        subset: Subset,
        /// Significance threshold.
        #[arg(long, default_value_t = DEFAULT_ALPHA)]
        alpha: f64,
    },
    /// Finite-difference check of all analytic gradients.
    Gradcheck {
        #[arg(long, hide = true)]
        corrupt: Option<String>,
    },
    /// Print the circuit as OpenQASM 2.0 with every rotation at one angle.
    ExportQasm {
        /// Rotation angle in radians (default pi/2).
        #[arg(long, allow_hyphen_values = true)]
        angle: Option<f64>,
        /// Write to this file instead of stdout.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write a synthetic feature file.
    GenSynthetic {
        #[arg(long, default_value_t = 100)]
        n_per_class: usize,
        #[arg(long, default_value_t = 4.0)]
        separation: f64,
        #[arg(long, default_value_t = 0.5)]
        noise: f64,
        #[arg(long)]
        output: PathBuf,
    },
    /// Resize images to 250x250 and project them to 512 features.
    ExtractFeatures {
        #[arg(long)]
        images: PathBuf,
        #[arg(long)]
        projection_seed: Option<u64>,
        #[arg(long)]
        output: PathBuf,
    },
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Runtime(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Runtime(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Runtime(_) => 1,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Runtime(e) => write!(f, "error: {e}"),
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

fn apply_overrides(cfg: &mut RunConfig, g: &GlobalArgs) {
    if let Some(v) = g.seed {
        cfg.train.seed = v;
    }
    if let Some(v) = g.depth {
        cfg.train.depth = v;
    }
    if let Some(v) = g.epochs {
        cfg.train.epochs = v;
    }
    if let Some(v) = g.lr {
        cfg.train.learning_rate = v;
    }
    if let Some(v) = g.batch {
        cfg.train.batch_size = v;
    }
    if let Some(v) = &g.out {
        cfg.out_dir = v.clone();
    }
    if let Some(v) = g.model {
        cfg.model = v.into();
    }
}

fn apply_data(cfg: &mut RunConfig, data: &DataArgs) {
    if let Some(source) = data.source() {
        cfg.extractor = match source {
            DataSource::Images { .. } => ExtractorMode::RandomProjection,
            _ => ExtractorMode::Precomputed,
        };
        cfg.data = Some(source);
    }
    if let Some(s) = data.projection_seed {
        cfg.projection_seed = s;
    }
}

/// Config file, then flags, then validation.
fn resolve(
    base: Option<RunConfig>,
    g: &GlobalArgs,
    data: &DataArgs,
) -> Result<RunConfig, CliError> {
    let mut cfg = match (&g.config, base) {
        (Some(path), _) => RunConfig::from_json_file(path).map_err(usage)?,
        (None, Some(base)) => base,
        (None, None) => RunConfig::default(),
    };
    apply_overrides(&mut cfg, g);
    apply_data(&mut cfg, data);
    cfg.validate().map_err(usage)?;
    if cfg.data.is_none() {
        return Err(usage(
            "no data source: pass --features, --images or --synthetic",
        ));
    }
    Ok(cfg)
}

fn ensure_dir(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::Runtime(Error::io(dir, e)))
}

fn select(cfg: &RunConfig, samples: Vec<Sample>, subset: Subset) -> Result<Vec<Sample>, CliError> {
    let part = match subset {
        Subset::All => samples,
        other => {
            let s = cfg.split(&samples)?;
            match other {
                Subset::Train => s.train,
                Subset::Validation => s.validation,
                _ => s.test,
            }
        }
    };
    if part.is_empty() {
        return Err(CliError::Runtime(Error::invalid(
            "selected dataset is empty",
        )));
    }
    Ok(part)
}

fn cmd_train(g: &GlobalArgs, data: &DataArgs) -> Result<(), CliError> {
    let cfg = resolve(None, g, data)?;
    let samples = cfg.load_samples()?;
    let parts = cfg.split(&samples)?;
    let mut model = Model::init(cfg.model, cfg.train.depth, cfg.train.seed);
    let history = train(
        &mut model,
        &parts.train,
        Some(&parts.validation),
        &cfg.train,
    )?;

    ensure_dir(&cfg.out_dir)?;
    write_atomic(
        &cfg.out_dir.join("history.csv"),
        history.to_csv().as_bytes(),
    )?;
    Checkpoint::new(model, cfg.clone()).save(&cfg.out_dir.join("checkpoint.json"))?;
    if let Some(last) = history.epochs.last() {
        println!(
            "trained {:?} model for {} epochs: train_loss={:.6} train_acc={:.4}",
            cfg.model, last.epoch, last.train_loss, last.train_acc
        );
    }
    println!("wrote {}", cfg.out_dir.display());
    Ok(())
}

fn cmd_eval(
    g: &GlobalArgs,
    checkpoint: &Path,
    data: &DataArgs,
    subset: Subset,
) -> Result<(), CliError> {
    let ck = Checkpoint::load(checkpoint)?;
    let cfg = resolve(Some(ck.config.clone()), g, data)?;
    let samples = select(&cfg, cfg.load_samples()?, subset)?;
    let eval = evaluate(&ck.model, &samples)?;
    let report = metrics(&eval.confusion)?;
    let labels: Vec<u8> = samples.iter().map(Sample::label).collect();

    ensure_dir(&cfg.out_dir)?;
    let doc = metrics_document(&eval.confusion, &report);
    write_atomic(&cfg.out_dir.join("metrics.txt"), doc.as_bytes())?;
    write_atomic(
        &cfg.out_dir.join("predictions.csv"),
        eval.predictions_csv(&labels).as_bytes(),
    )?;
    print!("{doc}");
    Ok(())
}

fn cmd_compare(
    g: &GlobalArgs,
    a: &Path,
    b: &Path,
    data: &DataArgs,
    subset: Subset,
    alpha: f64,
) -> Result<(), CliError> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(usage(format!("alpha {alpha} must lie in (0, 1)")));
    }
    let ck_a = Checkpoint::load(a)?;
    let ck_b = Checkpoint::load(b)?;
    let cfg = resolve(Some(ck_a.config.clone()), g, data)?;
    let samples = select(&cfg, cfg.load_samples()?, subset)?;
    let labels: Vec<u8> = samples.iter().map(Sample::label).collect();
    let pa = evaluate(&ck_a.model, &samples)?.predictions;
    let pb = evaluate(&ck_b.model, &samples)?.predictions;
    let result = mcnemar(&pa, &pb, &labels)?;

    ensure_dir(&cfg.out_dir)?;
    let doc = mcnemar_document(&result, alpha);
    write_atomic(&cfg.out_dir.join("mcnemar.txt"), doc.as_bytes())?;
    print!("{doc}");
    Ok(())
}

fn cmd_gradcheck(g: &GlobalArgs, corrupt: Option<&str>) -> Result<bool, CliError> {
    let block = match corrupt {
        None => None,
        Some(name) => {
            Some(Block::from_name(name).ok_or_else(|| usage(format!("unknown block {name}")))?)
        }
    };
    let report = gradcheck(g.seed.unwrap_or(DEFAULT_SEED), block)?;
    println!("{report}");
    Ok(report.passed())
}

/// Runs a parsed command. `Ok(false)` means the command ran but reported a
/// failed check.
pub fn run(cli: &Cli) -> Result<bool, CliError> {
    let g = &cli.global;
    match &cli.command {
        Command::Train { data } => cmd_train(g, data)?,
        Command::Eval {
            checkpoint,
            data,
            subset,
        } => cmd_eval(g, checkpoint, data, *subset)?,
        Command::Compare {
            checkpoint_a,
            checkpoint_b,
            data,
            subset,
            alpha,
        } => cmd_compare(g, checkpoint_a, checkpoint_b, data, *subset, *alpha)?,
        Command::Gradcheck { corrupt } => return cmd_gradcheck(g, corrupt.as_deref()),
        Command::ExportQasm { angle, output } => {
            let depth = g
                .depth
                .unwrap_or(crate::model::TrainConfig::default().depth);
            let text = export_qasm(depth, angle.unwrap_or(FRAC_PI_2)).map_err(usage)?;
            match output {
                Some(path) => write_atomic(path, text.as_bytes())?,
                None => print!("{text}"),
            }
        }
        Command::GenSynthetic {
            n_per_class,
            separation,
            noise,
            output,
        } => {
            let seed = g.seed.unwrap_or(DEFAULT_SEED);
            let samples = crate::data::gen_synthetic(*n_per_class, *separation, *noise, seed)
                .map_err(usage)?;
            write_features(output, &samples)?;
            println!("wrote {} samples to {}", samples.len(), output.display());
        }
        Command::ExtractFeatures {
            images,
            projection_seed,
            output,
        } => {
            let seed = projection_seed.or(g.seed).unwrap_or(DEFAULT_SEED);
            let resized = load_labeled_root(images)?
                .iter()
                .map(|img| resize_bilinear(img, IMAGE_SIDE, IMAGE_SIDE))
                .collect::<crate::Result<Vec<_>>>()?;
            let samples = RandomProjection::new(seed).project(&resized)?;
            write_features(output, &samples)?;
            println!("wrote {} samples to {}", samples.len(), output.display());
        }
    }
    Ok(true)
}

/// Parses `std::env::args`, runs the command and maps the outcome to an exit code.
pub fn main_entry() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code())
        }
    }
}
