//! Command-line front end: `smeval eval|rank|meta|perturb|pairs`.
//!
//! Exit codes: 0 success, 1 configuration or manifest error, 2 when some
//! images failed but the rest of the batch was written.

pub mod commands;
pub mod manifest;
pub mod measures;

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use commands::{
    cmd_eval, cmd_meta, cmd_pairs, cmd_perturb, cmd_rank, EvalOptions, EvalReport, ImageFailure, MetaInputs, MetaKind, MetaOptions, MetaOutput,
    PairsOptions, PerturbOptions, RankBy,
};
pub use manifest::DatasetManifest;
pub use measures::{Measure, MeasureConfig};

use crate::baselines::FbwParams;
use crate::error::{Error, Result};
use crate::meta::{GoodSelection, GtSwitchParams, PerturbMode, PerturbParams, ScoreMatrix, TiePolicy};
use crate::smeasure::{BlockWeighting, SMeasureParams};

#[derive(Debug, Parser)]
#[command(name = "smeval", version, about = "Structure-measure evaluation of foreground maps")]
pub struct Cli {
    /// Worker threads (0 = one per core).
    #[arg(long, env = "SMEVAL_JOBS", global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Score every map in a manifest; one CSV per measure plus a summary.
    Eval(EvalArgs),
    /// Rank models per image or overall from a score CSV.
    Rank(RankArgs),
    /// Run a meta-measure (1-5) or the MM1-MM3 comparison table.
    Meta(MetaArgs),
    /// Write slightly perturbed ground truths with provenance.
    Perturb(PerturbArgs),
    /// Export human-study pairs where two measures disagree on the best map.
    Pairs(PairsArgs),
}

#[derive(Debug, Args)]
pub struct MeasureArgs {
    /// Weight of the object-aware term.
    #[arg(long, default_value_t = 0.5)]
    pub alpha: f64,
    /// Dispersion penalty of the object-aware term.
    #[arg(long, default_value_t = 0.5)]
    pub lambda: f64,
    /// Number of region blocks (a power of 4).
    #[arg(long, default_value_t = 4)]
    pub k_blocks: usize,
    #[arg(long, default_value = "foreground")]
    pub weighting: BlockWeighting,
    /// Threshold count for the ROC / PR sweeps.
    #[arg(long, default_value_t = 256)]
    pub thresholds: usize,
    /// Binarization threshold for Fβ.
    #[arg(long, default_value_t = 0.5)]
    pub fbeta_threshold: f64,
    /// β² for Fβ.
    #[arg(long, default_value_t = 1.0)]
    pub beta_sq: f64,
}

impl MeasureArgs {
    pub fn config(&self) -> MeasureConfig {
        MeasureConfig {
            s: SMeasureParams {
                alpha: self.alpha,
                lambda: self.lambda,
                k_blocks: self.k_blocks,
                weighting: self.weighting,
            },
            fbw: FbwParams::default(),
            fbeta_threshold: self.fbeta_threshold,
            beta_sq: self.beta_sq,
            thresholds: self.thresholds,
            ..MeasureConfig::default()
        }
    }
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Comma-separated subset of s, fbeta, fbw, ap, auc.
    #[arg(long, default_value = "s,fbeta,fbw,ap,auc")]
    pub measures: String,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum RankByArg {
    Image,
    Model,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    /// Score CSV written by `eval`.
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long, value_enum, default_value = "image")]
    pub by: RankByArg,
    /// Output CSV; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum MetaKindArg {
    #[value(name = "1")]
    Mm1,
    #[value(name = "2")]
    Mm2,
    #[value(name = "3")]
    Mm3,
    #[value(name = "4")]
    Mm4,
    #[value(name = "5")]
    Mm5,
    Table,
}

#[derive(Debug, Args)]
pub struct PerturbFlags {
    /// Disk radius of the morphological edit.
    #[arg(long, default_value_t = 2)]
    pub radius: usize,
    #[arg(long, default_value = "mixed")]
    pub mode: PerturbMode,
    /// Erosion radius of the difference map when sizing structural change.
    #[arg(long, default_value_t = 1)]
    pub change_radius: usize,
}

impl PerturbFlags {
    fn params(&self) -> PerturbParams {
        PerturbParams {
            radius: self.radius,
            mode: self.mode,
            change_radius: self.change_radius,
        }
    }
}

#[derive(Debug, Args)]
pub struct MetaArgs {
    #[arg(long, value_enum)]
    pub mm: MetaKindArg,
    /// Dataset manifest; repeat for several datasets in `--mm table`.
    #[arg(long)]
    pub manifest: Vec<PathBuf>,
    /// Measures to assess (ignored by MM5 and the table).
    #[arg(long, default_value = "s")]
    pub measures: String,
    /// Precomputed score CSV (MM1, or measure A for MM5).
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Measure B score CSV for MM5.
    #[arg(long)]
    pub scores_b: Option<PathBuf>,
    /// Application score CSV for MM1 when the manifest has no app_scores.
    #[arg(long)]
    pub app_scores: Option<PathBuf>,
    #[command(flatten)]
    pub measure: MeasureArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Wrong ground truths tried per good map (MM3).
    #[arg(long, default_value_t = 100)]
    pub switches: usize,
    /// Fraction of maps treated as good (MM3).
    #[arg(long, default_value_t = 0.418)]
    pub good_fraction: f64,
    /// Absolute own-score cutoff for good maps; overrides --good-fraction.
    #[arg(long)]
    pub good_cutoff: Option<f64>,
    /// Count only strictly higher wrong-GT scores as MM3 errors.
    #[arg(long)]
    pub strict_ties: bool,
    /// Gaussian baseline σ as a fraction of the shorter side (MM2).
    #[arg(long, default_value_t = 0.25)]
    pub sigma_frac: f64,
    #[command(flatten)]
    pub perturb: PerturbFlags,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PerturbArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    #[command(flatten)]
    pub perturb: PerturbFlags,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    /// Measure A score CSV.
    #[arg(long)]
    pub scores: PathBuf,
    /// Measure B score CSV.
    #[arg(long)]
    pub scores_b: PathBuf,
    /// Manifest supplying map and ground-truth paths.
    #[arg(long)]
    pub manifest: PathBuf,
    #[arg(long, default_value_t = 100)]
    pub max_pairs: usize,
    #[arg(long, default_value_t = 1)]
    pub min_distance: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Outcome of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Ok,
    Partial,
}

fn report_failures(failures: &[ImageFailure]) -> Status {
    for f in failures {
        match f.measure {
            Some(m) => log::warn!("{} [{m}]: {}", f.image_id, f.error),
            None => log::warn!("{}: {}", f.image_id, f.error),
        }
    }
    if failures.is_empty() {
        Status::Ok
    } else {
        Status::Partial
    }
}

/// Executes a parsed command line.
pub fn run(cli: Cli) -> Result<Status> {
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(j) = cli.jobs {
        pool = pool.num_threads(j);
    }
    let pool = pool.build().map_err(|e| Error::InvalidParameter(format!("thread pool: {e}")))?;
    pool.install(|| dispatch(cli.command))
}

fn dispatch(command: Command) -> Result<Status> {
    match command {
        Command::Eval(a) => {
            let manifest = DatasetManifest::load(&a.manifest)?;
            let opts = EvalOptions {
                measures: Measure::parse_list(&a.measures)?,
                config: a.measure.config(),
                seed: a.seed,
                out: a.out,
            };
            let report = cmd_eval(&manifest, &opts)?;
            Ok(report_failures(&report.failures))
        }
        Command::Rank(a) => {
            let scores = ScoreMatrix::read_csv_path(&a.scores)?;
            let by = match a.by {
                RankByArg::Image => RankBy::Image,
                RankByArg::Model => RankBy::Model,
            };
            let text = cmd_rank(&scores, by);
            match a.out {
                Some(p) => std::fs::write(&p, text).map_err(|source| Error::Io { path: p, source })?,
                None => print!("{text}"),
            }
            Ok(Status::Ok)
        }
        Command::Meta(a) => {
            let inputs = MetaInputs {
                manifests: a.manifest.iter().map(DatasetManifest::load).collect::<Result<_>>()?,
                scores: a.scores.as_ref().map(ScoreMatrix::read_csv_path).transpose()?,
                scores_b: a.scores_b.as_ref().map(ScoreMatrix::read_csv_path).transpose()?,
                app_scores: a.app_scores.as_ref().map(ScoreMatrix::read_csv_path).transpose()?,
            };
            let good = match a.good_cutoff {
                Some(t) => GoodSelection::AbsoluteCutoff(t),
                None => GoodSelection::TopFraction(a.good_fraction),
            };
            let opts = MetaOptions {
                kind: match a.mm {
                    MetaKindArg::Mm1 => MetaKind::Mm1,
                    MetaKindArg::Mm2 => MetaKind::Mm2,
                    MetaKindArg::Mm3 => MetaKind::Mm3,
                    MetaKindArg::Mm4 => MetaKind::Mm4,
                    MetaKindArg::Mm5 => MetaKind::Mm5,
                    MetaKindArg::Table => MetaKind::Table,
                },
                measures: Measure::parse_list(&a.measures)?,
                config: a.measure.config(),
                switch: GtSwitchParams {
                    switches_per_image: a.switches,
                    good,
                    ties: if a.strict_ties { TiePolicy::Strict } else { TiePolicy::CountTies },
                    seed: a.seed,
                },
                sigma_frac: a.sigma_frac,
                perturb: a.perturb.params(),
                seed: a.seed,
                out: a.out,
            };
            if let MetaOutput::Results(reports) = cmd_meta(&inputs, &opts)? {
                for r in &reports {
                    for w in &r.result.warnings {
                        log::warn!("{w}");
                    }
                }
            }
            Ok(Status::Ok)
        }
        Command::Perturb(a) => {
            let manifest = DatasetManifest::load(&a.manifest)?;
            let opts = PerturbOptions {
                params: a.perturb.params(),
                seed: a.seed,
                out: a.out,
            };
            let report = commands::cmd_perturb(&manifest, &opts)?;
            Ok(report_failures(&report.failures))
        }
        Command::Pairs(a) => {
            let manifest = DatasetManifest::load(&a.manifest)?;
            let sa = ScoreMatrix::read_csv_path(&a.scores)?;
            let sb = ScoreMatrix::read_csv_path(&a.scores_b)?;
            let opts = PairsOptions {
                max_pairs: a.max_pairs,
                min_distance: a.min_distance,
                seed: a.seed,
                out: a.out,
            };
            cmd_pairs(&sa, &sb, &manifest, &opts)?;
            Ok(Status::Ok)
        }
    }
}

/// Entry point of the `smeval` binary; returns the process exit code.
pub fn main() -> i32 {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(Status::Ok) => 0,
        Ok(Status::Partial) => {
            log::warn!("some images failed; details are in the written report");
            2
        }
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    }
}
