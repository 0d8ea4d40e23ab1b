//! The `qdg` command line: generate, augment, compare, stats, rescale.
//! Generation commands demand an explicit seed and write byte-reproducible
//! outputs through atomic renames.

use crate::config::{run_config_digest, ConfigError, FileConfig};
use crate::dataset::{
    compute_stats_with, read_dataset, rescale_to_reference, verify_mesh_digest, write_dataset,
    DatasetError, DatasetRecord, DatasetStats, SourceTag, StatsOptions,
};
use crate::grasp::{DomainRandomizedEvaluator, EvalOutcome, FailureReason};
use crate::mesh::{io as mesh_io, MeshError, TriMesh};
use crate::qd::{self, GenerationStats, RunConfig};
use crate::transfer::{
    augment_and_generate, compare_bootstrap_vs_scratch, sampled_specs, BootstrapArchive,
    ComparisonRecord, TransferError, TransferMode,
};
use clap::{Args, Parser, Subcommand, ValueEnum};
use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

/// Exit codes: 1 usage, 2 IO, 3 configuration, 4 internal.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Io(String),
    Config(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 2,
            CliError::Config(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Io(m) | CliError::Config(m) | CliError::Internal(m) => {
                write!(f, "{m}")
            }
        }
    }
}

impl From<MeshError> for CliError {
    fn from(e: MeshError) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<DatasetError> for CliError {
    fn from(e: DatasetError) -> Self {
        match e {
            DatasetError::DigestMismatch { .. } => CliError::Config(e.to_string()),
            other => CliError::Io(other.to_string()),
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io { .. } => CliError::Io(e.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

impl From<qd::QdError> for CliError {
    fn from(e: qd::QdError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<TransferError> for CliError {
    fn from(e: TransferError) -> Self {
        match e {
            TransferError::Mesh(m) => CliError::Io(m.to_string()),
            other => CliError::Config(other.to_string()),
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "qdg",
    about = "Quality-diversity grasp dataset generation on triangle meshes",
    version
)]
pub struct Cli {
    /// Worker thread cap for parallel evaluation (output is identical for
    /// any value).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Print per-generation progress.
    #[arg(long, short, global = true)]
    pub verbose: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a grasp dataset for one mesh from scratch.
    Generate(GenerateArgs),
    /// Augment a reference object and transfer its grasps onto each variant.
    Augment(AugmentArgs),
    /// Paired bootstrap-vs-scratch comparison on augmented objects.
    Compare(CompareArgs),
    /// Dataset statistics as CSV tables.
    Stats(StatsArgs),
    /// Scale factors matching a size population to a reference distribution.
    Rescale(RescaleArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RunMode {
    StopAfterBootstrap,
    Continue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TransferFlag {
    Raw,
    ScaledPosition,
}

impl From<TransferFlag> for TransferMode {
    fn from(f: TransferFlag) -> TransferMode {
        match f {
            TransferFlag::Raw => TransferMode::Raw,
            TransferFlag::ScaledPosition => TransferMode::ScaledPosition,
        }
    }
}

#[derive(Debug, Args)]
pub struct GenerateArgs {
    /// Input mesh (.obj, .stl, or .qdgm).
    #[arg(long)]
    pub mesh: PathBuf,
    /// Run-configuration TOML; defaults apply when omitted.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Root seed (required: generation is never implicitly random).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Evaluation budget override.
    #[arg(long)]
    pub budget: Option<usize>,
    /// Object identifier; defaults to the mesh file stem.
    #[arg(long)]
    pub object_id: Option<String>,
}

#[derive(Debug, Args)]
pub struct AugmentArgs {
    /// Reference mesh the bootstrap dataset was generated on.
    #[arg(long)]
    pub mesh: PathBuf,
    /// Bootstrap dataset (one record) with the reference grasps.
    #[arg(long)]
    pub dataset: PathBuf,
    /// Number of augmentations.
    #[arg(long = "n-aug", default_value_t = 10)]
    pub n_aug: usize,
    #[arg(long, default_value_t = 0.5)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 1.5)]
    pub alpha_max: f64,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub budget: Option<usize>,
    /// Whether optimization continues past the bootstrap evaluations.
    #[arg(long, value_enum, default_value = "stop-after-bootstrap")]
    pub mode: RunMode,
    /// How seed grasp coordinates map onto the deformed object.
    #[arg(long, value_enum, default_value = "scaled-position")]
    pub transfer: TransferFlag,
    /// Fail on mesh/gripper digest mismatches against the bootstrap dataset.
    #[arg(long)]
    pub strict_digests: bool,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    #[arg(long)]
    pub mesh: PathBuf,
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long = "n-aug", default_value_t = 10)]
    pub n_aug: usize,
    #[arg(long, default_value_t = 0.8)]
    pub alpha_min: f64,
    #[arg(long, default_value_t = 1.2)]
    pub alpha_max: f64,
    #[arg(long)]
    pub budget: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "scaled-position")]
    pub transfer: TransferFlag,
    #[arg(long)]
    pub strict_digests: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    /// Dataset files (repeatable; statistics cover the concatenation).
    #[arg(long, required = true)]
    pub dataset: Vec<PathBuf>,
    /// Meshes supplying object sizes (repeatable; matched by file stem).
    #[arg(long)]
    pub mesh: Vec<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RescaleArgs {
    /// Object sizes, one value per line.
    #[arg(long)]
    pub sizes: PathBuf,
    /// Reference sizes, one value per line.
    #[arg(long)]
    pub reference: PathBuf,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Pair sizes to reference entries by index instead of drawing.
    #[arg(long)]
    pub paired: bool,
}

/// Parse and run. Returns the message and exit code through `CliError`.
pub fn main_with_args<I, T>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e)
            if e.kind() == clap::error::ErrorKind::DisplayHelp
                || e.kind() == clap::error::ErrorKind::DisplayVersion =>
        {
            print!("{e}");
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::Usage("--jobs must be at least 1".into()));
        }
        // First caller wins for the process; determinism never depends on it.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global();
    }
    match cli.command {
        Command::Generate(args) => cmd_generate(args, cli.verbose),
        Command::Augment(args) => cmd_augment(args, cli.verbose),
        Command::Compare(args) => cmd_compare(args, cli.verbose),
        Command::Stats(args) => cmd_stats(args),
        Command::Rescale(args) => cmd_rescale(args),
    }
}

fn require_seed(seed: Option<u64>) -> Result<u64, CliError> {
    seed.ok_or_else(|| {
        CliError::Usage("--seed is required: generation commands are never implicitly random".into())
    })
}

fn load_mesh(path: &Path) -> Result<TriMesh, CliError> {
    Ok(mesh_io::load_mesh_auto(path)?)
}

fn load_file_config(path: &Option<PathBuf>) -> Result<FileConfig, CliError> {
    match path {
        Some(p) => Ok(FileConfig::load(p)?),
        None => Ok(FileConfig::default()),
    }
}

fn effective_config(
    file: &FileConfig,
    seed: u64,
    budget: Option<usize>,
    stop_after_bootstrap: bool,
) -> Result<RunConfig, CliError> {
    let mut config = file.to_run_config(seed, stop_after_bootstrap);
    if let Some(b) = budget {
        config.eval_budget = b;
    }
    config.validate()?;
    Ok(config)
}

fn object_id_from(path: &Path, explicit: &Option<String>) -> String {
    explicit.clone().unwrap_or_else(|| {
        path.file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "object".into())
    })
}

fn ensure_out_dir(out: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(out)
        .map_err(|e| CliError::Io(format!("cannot create output directory {out:?}: {e}")))
}

fn write_out(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    crate::util::write_atomic(path, bytes)
        .map_err(|e| CliError::Io(format!("cannot write {path:?}: {e}")))
}

fn metrics_csv(history: &[GenerationStats]) -> String {
    let mut out = String::from("generation,evaluations,success_count,robust_count,coverage\n");
    for g in history {
        let _ = writeln!(
            out,
            "{},{},{},{},{}",
            g.generation, g.evaluations_used, g.success_count, g.robust_count, g.coverage
        );
    }
    out
}

/// Load the single bootstrap record of a dataset file.
fn load_bootstrap(
    path: &Path,
    mesh: &TriMesh,
    config: &RunConfig,
    strict: bool,
) -> Result<BootstrapArchive, CliError> {
    let records = read_dataset(path)?;
    let record = match records.len() {
        0 => {
            return Err(CliError::Config(format!(
                "bootstrap dataset {path:?} is empty: no grasps to transfer"
            )))
        }
        1 => records.into_iter().next().expect("one record"),
        n => {
            return Err(CliError::Config(format!(
                "bootstrap dataset {path:?} holds {n} records; expected exactly one reference object"
            )))
        }
    };
    if strict {
        verify_mesh_digest(&record, mesh)?;
        let gripper_digest = config.gripper.digest_hex();
        if record.gripper_digest != gripper_digest {
            return Err(CliError::Config(format!(
                "gripper digest mismatch: dataset was generated with {}, configuration is {}",
                record.gripper_digest, gripper_digest
            )));
        }
    }
    let elites: Vec<qd::Elite> = record
        .grasps
        .iter()
        .filter(|g| g.success())
        .map(|g| qd::Elite {
            genome: g.genome(),
            outcome: EvalOutcome {
                success: true,
                failure_reason: FailureReason::None,
                contacts: None,
                closing_width: 0.0,
                quality: Some(g.quality),
                robust: g.robust,
                trials_run: 1,
                rng_seed: g.eval_seed,
            },
        })
        .collect();
    BootstrapArchive::from_elites(
        elites,
        record.object_id.clone(),
        record.gripper_digest.clone(),
        record.config_digest.clone(),
    )
    .map_err(|_| {
        CliError::Config(format!(
            "bootstrap dataset {path:?} has no successful grasps: the bootstrap archive would be empty"
        ))
    })
}

fn cmd_generate(args: GenerateArgs, verbose: bool) -> Result<(), CliError> {
    let seed = require_seed(args.seed)?;
    let mesh = load_mesh(&args.mesh)?;
    let file = load_file_config(&args.config)?;
    let config = effective_config(&file, seed, args.budget, false)?;
    ensure_out_dir(&args.out)?;

    let evaluator = DomainRandomizedEvaluator {
        gripper: config.gripper.clone(),
        dr: config.dr.clone(),
    };
    let result = qd::run(&mesh, &config, None, &evaluator)?;
    let object_id = object_id_from(&args.mesh, &args.object_id);
    let record = DatasetRecord::from_archive(
        &result.archive,
        &object_id,
        &mesh,
        SourceTag::Core,
        None,
        config.gripper.digest_hex(),
        run_config_digest(&config),
    );
    let dataset_path = args.out.join(format!("{object_id}.qdg.jsonl"));
    write_dataset(&[record], &dataset_path)?;
    write_out(
        &args.out.join(format!("{object_id}.metrics.csv")),
        metrics_csv(&result.metrics.history).as_bytes(),
    )?;
    if verbose {
        for g in &result.metrics.history {
            println!(
                "generation {} evaluations {} successes {} robust {}",
                g.generation, g.evaluations_used, g.success_count, g.robust_count
            );
        }
    }
    println!(
        "generated {}: {} evaluations, {} elites, {} successful, {} robust",
        dataset_path.display(),
        result.metrics.evaluations_used,
        result.archive.len(),
        result.metrics.success_count,
        result.metrics.robust_grasp_count
    );
    Ok(())
}

fn cmd_augment(args: AugmentArgs, verbose: bool) -> Result<(), CliError> {
    let seed = require_seed(args.seed)?;
    if !args.alpha_min.is_finite() || args.alpha_min <= 0.0 || args.alpha_min > args.alpha_max {
        return Err(CliError::Config(format!(
            "alpha bounds [{}, {}] must be positive and ordered",
            args.alpha_min, args.alpha_max
        )));
    }
    let mesh = load_mesh(&args.mesh)?;
    let file = load_file_config(&args.config)?;
    let config = effective_config(&file, seed, args.budget, false)?;
    let seeds = load_bootstrap(&args.dataset, &mesh, &config, args.strict_digests)?;
    ensure_out_dir(&args.out)?;

    let evaluator = DomainRandomizedEvaluator {
        gripper: config.gripper.clone(),
        dr: config.dr.clone(),
    };
    let stop = args.mode == RunMode::StopAfterBootstrap;
    let runs = augment_and_generate(
        &mesh,
        &seeds,
        args.n_aug,
        args.alpha_min,
        args.alpha_max,
        &config,
        seed,
        stop,
        args.transfer.into(),
        &evaluator,
    )?;

    let base = object_id_from(&args.mesh, &None);
    let mut summary =
        String::from("augmentation,alpha1,alpha2,alpha3,n_seeds,n_transferred,transfer_rate,robust_count,evaluations_used\n");
    for (k, run) in runs.iter().enumerate() {
        let object_id = format!("{base}.aug{k}");
        let record = DatasetRecord::from_archive(
            &run.archive,
            &object_id,
            &run.mesh,
            SourceTag::Augmented,
            Some(run.spec.clone()),
            config.gripper.digest_hex(),
            run_config_digest(&config),
        );
        write_dataset(&[record], &args.out.join(format!("{object_id}.qdg.jsonl")))?;
        let _ = writeln!(
            summary,
            "{},{},{},{},{},{},{},{},{}",
            k,
            run.spec.alpha[0],
            run.spec.alpha[1],
            run.spec.alpha[2],
            run.report.n_seeds,
            run.report.n_transferred,
            run.report.transfer_rate,
            run.report.robust_count,
            run.report.evaluations_used
        );
        if verbose {
            println!(
                "augmentation {k}: alpha {:?} transfer rate {:.3} robust {}",
                run.spec.alpha, run.report.transfer_rate, run.report.robust_count
            );
        }
    }
    write_out(&args.out.join("transfer_summary.csv"), summary.as_bytes())?;
    println!(
        "augmented {} into {} objects under {}",
        seeds.source_object_id,
        runs.len(),
        args.out.display()
    );
    Ok(())
}

/// Evaluations spent per robust grasp found.
pub fn evals_per_grasp(evaluations: usize, robust: usize) -> Option<f64> {
    (robust > 0).then(|| evaluations as f64 / robust as f64)
}

fn ratio_display(r: Option<f64>) -> String {
    r.map_or_else(|| "n/a".into(), |v| format!("{v:.1}"))
}

fn comparison_csv(record: &ComparisonRecord) -> String {
    let mut out = String::from("generation,evaluations,robust_count,coverage,arm\n");
    for (arm, curve) in [
        ("bootstrap", &record.bootstrap_curve),
        ("scratch", &record.scratch_curve),
    ] {
        for g in curve {
            let _ = writeln!(
                out,
                "{},{},{},{},{arm}",
                g.generation, g.evaluations_used, g.robust_count, g.coverage
            );
        }
    }
    out
}

fn cmd_compare(args: CompareArgs, verbose: bool) -> Result<(), CliError> {
    let seed = require_seed(args.seed)?;
    let mesh = load_mesh(&args.mesh)?;
    let file = load_file_config(&args.config)?;
    let config = effective_config(&file, seed, args.budget, false)?;
    let seeds = load_bootstrap(&args.dataset, &mesh, &config, args.strict_digests)?;
    if config.eval_budget < seeds.len() {
        return Err(CliError::Config(format!(
            "budget {} is below the bootstrap archive size {}; truncation is refused",
            config.eval_budget,
            seeds.len()
        )));
    }
    ensure_out_dir(&args.out)?;

    let specs = sampled_specs(
        args.n_aug,
        args.alpha_min,
        args.alpha_max,
        &seeds.source_object_id,
        seed,
    )?;
    let evaluator = DomainRandomizedEvaluator {
        gripper: config.gripper.clone(),
        dr: config.dr.clone(),
    };
    let records = compare_bootstrap_vs_scratch(&mesh, &seeds, &specs, &config, args.transfer.into(), &evaluator)?;

    let mut summary = String::from(
        "augmentation,alpha1,alpha2,alpha3,bootstrap_end_evaluations,robust_bootstrap_at_init_end,robust_scratch_at_same_evals,robust_bootstrap_full,robust_scratch_full,evals_per_grasp_bootstrap,evals_per_grasp_scratch\n",
    );
    let mut better = 0usize;
    let mut boot_total = (0usize, 0usize);
    let mut scratch_total = (0usize, 0usize);
    for (k, r) in records.iter().enumerate() {
        write_out(
            &args.out.join(format!("comparison.aug{k}.csv")),
            comparison_csv(r).as_bytes(),
        )?;
        if r.robust_bootstrap_at_init_end >= r.robust_scratch_at_same_evals {
            better += 1;
        }
        boot_total.0 += r.bootstrap_end_evaluations;
        boot_total.1 += r.robust_bootstrap_at_init_end;
        scratch_total.0 += r.bootstrap_end_evaluations;
        scratch_total.1 += r.robust_scratch_at_same_evals;
        let _ = writeln!(
            summary,
            "{k},{},{},{},{},{},{},{},{},{},{}",
            r.spec.alpha[0],
            r.spec.alpha[1],
            r.spec.alpha[2],
            r.bootstrap_end_evaluations,
            r.robust_bootstrap_at_init_end,
            r.robust_scratch_at_same_evals,
            r.robust_bootstrap_full,
            r.robust_scratch_full,
            ratio_display(evals_per_grasp(r.bootstrap_end_evaluations, r.robust_bootstrap_at_init_end)),
            ratio_display(evals_per_grasp(r.bootstrap_end_evaluations, r.robust_scratch_at_same_evals)),
        );
        if verbose {
            println!(
                "augmentation {k}: bootstrap {} vs scratch {} robust at {} evaluations",
                r.robust_bootstrap_at_init_end, r.robust_scratch_at_same_evals, r.bootstrap_end_evaluations
            );
        }
    }
    let fraction_better = better as f64 / records.len() as f64;
    let boot_ratio = evals_per_grasp(boot_total.0, boot_total.1);
    let scratch_ratio = evals_per_grasp(scratch_total.0, scratch_total.1);
    let _ = writeln!(summary, "# fraction_better,{fraction_better}");
    let _ = writeln!(
        summary,
        "# aggregate_evals_per_grasp,bootstrap,{},scratch,{}",
        ratio_display(boot_ratio),
        ratio_display(scratch_ratio)
    );
    write_out(&args.out.join("comparison_summary.csv"), summary.as_bytes())?;
    println!(
        "compared {} augmentations: fraction_better {fraction_better}, evals per robust grasp {} vs {}",
        records.len(),
        ratio_display(boot_ratio),
        ratio_display(scratch_ratio)
    );
    Ok(())
}

fn stats_csv(stats: &DatasetStats) -> String {
    let mut out = String::from("metric,value\n");
    if stats.records == 0 {
        return out;
    }
    let _ = writeln!(out, "records,{}", stats.records);
    let _ = writeln!(out, "total_grasps,{}", stats.total_grasps);
    let _ = writeln!(out, "successful_grasps,{}", stats.successful_grasps);
    let _ = writeln!(out, "robust_grasps,{}", stats.robust_grasps);
    let _ = writeln!(out, "robust_fraction,{}", stats.robust_fraction);
    for (tag, b) in &stats.per_source {
        let _ = writeln!(out, "records[{tag}],{}", b.records);
        let _ = writeln!(out, "grasps[{tag}],{}", b.grasps);
        let _ = writeln!(out, "successful[{tag}],{}", b.successful);
        let _ = writeln!(out, "robust[{tag}],{}", b.robust);
    }
    out
}

fn stats_long_csv(stats: &DatasetStats) -> String {
    let mut out = String::from("metric,bin_lo,bin_hi,count\n");
    if stats.records == 0 {
        return out;
    }
    let mut emit = |name: &str, h: &crate::stats::Histogram| {
        for (i, c) in h.counts.iter().enumerate() {
            let _ = writeln!(out, "{name},{},{},{c}", h.edges[i], h.edges[i + 1]);
        }
    };
    emit("grasps_per_object", &stats.grasps_per_object);
    emit("quality", &stats.quality);
    if let Some(sizes) = &stats.object_sizes {
        emit("object_size", sizes);
    }
    out
}

fn cmd_stats(args: StatsArgs) -> Result<(), CliError> {
    let mut records = Vec::new();
    for path in &args.dataset {
        records.extend(read_dataset(path)?);
    }
    let sizes: Option<BTreeMap<String, f64>> = if args.mesh.is_empty() {
        None
    } else {
        let mut m = BTreeMap::new();
        for path in &args.mesh {
            let mesh = load_mesh(path)?;
            m.insert(object_id_from(path, &None), mesh.aabb().diagonal());
        }
        Some(m)
    };
    let stats = compute_stats_with(&records, sizes.as_ref(), &StatsOptions::default());
    ensure_out_dir(&args.out)?;
    write_out(&args.out.join("stats.csv"), stats_csv(&stats).as_bytes())?;
    write_out(&args.out.join("stats_long.csv"), stats_long_csv(&stats).as_bytes())?;
    println!(
        "stats over {} records: {} grasps, {} successful, robust fraction {}",
        stats.records, stats.total_grasps, stats.successful_grasps, stats.robust_fraction
    );
    Ok(())
}

fn read_sizes(path: &Path) -> Result<Vec<f64>, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", path.display())))?;
    let mut out = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let value: f64 = line
            .split(',')
            .next()
            .unwrap_or(line)
            .trim()
            .parse()
            .map_err(|e| {
                CliError::Io(format!("{}:{}: bad size value {line:?}: {e}", path.display(), i + 1))
            })?;
        out.push(value);
    }
    Ok(out)
}

fn cmd_rescale(args: RescaleArgs) -> Result<(), CliError> {
    let seed = require_seed(args.seed)?;
    let sizes = read_sizes(&args.sizes)?;
    let reference = read_sizes(&args.reference)?;
    let factors = rescale_to_reference(&sizes, &reference, seed, args.paired)
        .map_err(|e| CliError::Config(e.to_string()))?;
    ensure_out_dir(&args.out)?;
    let mut csv = String::from("index,size,target_size,factor\n");
    for (i, (s, f)) in sizes.iter().zip(&factors).enumerate() {
        let _ = writeln!(csv, "{i},{s},{},{f}", s * f);
    }
    write_out(&args.out.join("factors.csv"), csv.as_bytes())?;
    println!("rescaled {} sizes against {} reference entries", sizes.len(), reference.len());
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn ratio_formats_to_one_decimal() {
        assert_eq!(ratio_display(evals_per_grasp(5059, 309)), "16.4");
        assert_eq!(ratio_display(evals_per_grasp(5059, 244)), "20.7");
        assert_eq!(ratio_display(evals_per_grasp(100, 0)), "n/a");
    }

    #[test]
    fn exit_codes_follow_the_taxonomy() {
        assert_eq!(CliError::Usage("x".into()).exit_code(), 1);
        assert_eq!(CliError::Io("x".into()).exit_code(), 2);
        assert_eq!(CliError::Config("x".into()).exit_code(), 3);
        assert_eq!(CliError::Internal("x".into()).exit_code(), 4);
    }

    #[test]
    fn seed_is_mandatory_for_generation() {
        let err = main_with_args(["qdg", "generate", "--mesh", "m.obj", "--out", "o"]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
        assert!(err.to_string().contains("--seed"), "{err}");
    }

    #[test]
    fn unknown_flags_are_usage_errors() {
        let err = main_with_args(["qdg", "generate", "--nope"]).unwrap_err();
        assert_eq!(err.exit_code(), 1);
    }

    #[test]
    fn missing_mesh_is_an_io_error_naming_the_path() {
        let dir = tempfile::tempdir().unwrap();
        let err = main_with_args([
            "qdg",
            "generate",
            "--mesh",
            "/nonexistent/thing.obj",
            "--seed",
            "1",
            "--out",
            dir.path().to_str().unwrap(),
        ])
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
        assert!(err.to_string().contains("/nonexistent/thing.obj"), "{err}");
    }
}
