//! Grasp transfer onto augmented objects: seed a new optimization with the
//! successful grasps of a reference object, optionally stopping right after
//! the bootstrap evaluations, and the paired bootstrap-vs-scratch experiment.

use crate::grasp::GraspEvaluator;
use crate::grasp::GraspGenome;
use crate::mesh::{augment, sample_augmentation, AugmentationSpec, MeshError, TriMesh};
use crate::qd::{self, Archive, Elite, QdError, RunConfig, RunMetrics, SeedGenome};
use crate::rng::{derive_seed, stream};
use glam::DVec3;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum TransferError {
    #[error("bootstrap archive has no successful grasps")]
    EmptyBootstrap,
    #[error("need at least one augmentation, got {0}")]
    NoAugmentations(usize),
    #[error(transparent)]
    Qd(#[from] QdError),
    #[error(transparent)]
    Mesh(#[from] MeshError),
}

/// The successful grasps of a reference object, used to initialize runs on
/// similar objects.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BootstrapArchive {
    pub source_object_id: String,
    pub gripper_digest: String,
    pub config_digest: String,
    elites: Vec<Elite>,
}

impl BootstrapArchive {
    /// Extract the successful elites of an archive. Fails when there are none.
    pub fn from_archive(
        archive: &Archive,
        source_object_id: impl Into<String>,
        gripper_digest: impl Into<String>,
        config_digest: impl Into<String>,
    ) -> Result<Self, TransferError> {
        let elites: Vec<Elite> = archive.successful_elites().cloned().collect();
        Self::from_elites(elites, source_object_id, gripper_digest, config_digest)
    }

    /// Build from an explicit elite list; every entry must be a success.
    pub fn from_elites(
        elites: Vec<Elite>,
        source_object_id: impl Into<String>,
        gripper_digest: impl Into<String>,
        config_digest: impl Into<String>,
    ) -> Result<Self, TransferError> {
        let elites: Vec<Elite> = elites.into_iter().filter(|e| e.outcome.success).collect();
        if elites.is_empty() {
            return Err(TransferError::EmptyBootstrap);
        }
        Ok(BootstrapArchive {
            source_object_id: source_object_id.into(),
            gripper_digest: gripper_digest.into(),
            config_digest: config_digest.into(),
            elites,
        })
    }

    pub fn elites(&self) -> &[Elite] {
        &self.elites
    }

    pub fn len(&self) -> usize {
        self.elites.len()
    }

    pub fn is_empty(&self) -> bool {
        false // construction guarantees at least one elite
    }
}

/// How seed grasp coordinates map onto the deformed object.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransferMode {
    /// Copy poses verbatim.
    Raw,
    /// Scale positions by the deformation (meshes are bounding-box centered,
    /// so the scaling center is the origin); orientations are kept, since a
    /// non-uniform scale has no canonical action on rotations.
    #[default]
    ScaledPosition,
}

/// Map the bootstrap genomes onto an object deformed by `spec`.
pub fn transfer_genomes(
    seeds: &BootstrapArchive,
    spec: &AugmentationSpec,
    mode: TransferMode,
) -> Vec<GraspGenome> {
    seeds
        .elites
        .iter()
        .map(|e| match mode {
            TransferMode::Raw => e.genome,
            TransferMode::ScaledPosition => {
                if spec.is_identity() {
                    e.genome
                } else {
                    let p = e.genome.position() * DVec3::from_array(spec.alpha);
                    GraspGenome::new(p, e.genome.orientation()).expect("orientation unchanged")
                }
            }
        })
        .collect()
}

/// Outcome of re-evaluating a bootstrap archive on a target object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransferReport {
    pub n_seeds: usize,
    /// Seeds that succeed on the target.
    pub n_transferred: usize,
    pub transfer_rate: f64,
    /// Seeds whose re-evaluation carries the robust flag.
    pub robust_count: usize,
    pub evaluations_used: usize,
    /// Quality values of the transferred (successful) grasps.
    pub qualities: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct BootstrapRunOutcome {
    pub archive: Archive,
    pub metrics: RunMetrics,
    pub report: TransferReport,
}

/// Seed a run on `target_mesh` with the transferred bootstrap genomes. Each
/// seed re-evaluates with its stored evaluation seed, so an identity transfer
/// reproduces the source outcomes exactly. With `stop_after_bootstrap` the
/// run ends after the seed evaluations (`evaluations_used == n_seeds`).
pub fn bootstrap_run(
    target_mesh: &TriMesh,
    seeds: &BootstrapArchive,
    spec: &AugmentationSpec,
    config: &RunConfig,
    stop_after_bootstrap: bool,
    mode: TransferMode,
    evaluator: &(impl GraspEvaluator + ?Sized),
) -> Result<BootstrapRunOutcome, TransferError> {
    let genomes = transfer_genomes(seeds, spec, mode);
    let seed_population: Vec<SeedGenome> = genomes
        .into_iter()
        .zip(&seeds.elites)
        .map(|(genome, elite)| SeedGenome {
            genome,
            eval_seed: Some(elite.outcome.rng_seed),
        })
        .collect();
    let run_config = RunConfig {
        stop_after_bootstrap,
        ..config.clone()
    };
    let result = qd::run(target_mesh, &run_config, Some(&seed_population), evaluator)?;

    let n_seeds = seed_population.len();
    let transferred: Vec<&crate::grasp::EvalOutcome> =
        result.seed_outcomes.iter().filter(|o| o.success).collect();
    let report = TransferReport {
        n_seeds,
        n_transferred: transferred.len(),
        transfer_rate: transferred.len() as f64 / n_seeds as f64,
        robust_count: result.seed_outcomes.iter().filter(|o| o.robust).count(),
        evaluations_used: result.metrics.evaluations_used,
        qualities: transferred.iter().map(|o| o.quality_or_zero()).collect(),
    };
    Ok(BootstrapRunOutcome {
        archive: result.archive,
        metrics: result.metrics,
        report,
    })
}

/// One augmentation produced by [`augment_and_generate`].
#[derive(Debug, Clone)]
pub struct AugmentationRun {
    pub spec: AugmentationSpec,
    pub mesh: TriMesh,
    pub archive: Archive,
    pub metrics: RunMetrics,
    pub report: TransferReport,
}

/// Draw `n` augmentation specs with per-index derived seeds.
pub fn sampled_specs(
    n: usize,
    alpha_min: f64,
    alpha_max: f64,
    reference_id: &str,
    rng_seed: u64,
) -> Result<Vec<AugmentationSpec>, TransferError> {
    if n < 1 {
        return Err(TransferError::NoAugmentations(n));
    }
    (0..n)
        .map(|a| {
            sample_augmentation(
                derive_seed(rng_seed, stream::AUGMENT, a as u64),
                alpha_min,
                alpha_max,
                reference_id,
            )
            .map_err(TransferError::from)
        })
        .collect()
}

/// The dataset-generation protocol: draw `a_max` augmentations of the
/// reference object and bootstrap each one. The protocol default stops right
/// after the bootstrap evaluations; continuing is available for experiments.
/// Deterministic in `rng_seed`.
#[allow(clippy::too_many_arguments)]
pub fn augment_and_generate(
    reference_mesh: &TriMesh,
    seeds: &BootstrapArchive,
    a_max: usize,
    alpha_min: f64,
    alpha_max: f64,
    config: &RunConfig,
    rng_seed: u64,
    stop_after_bootstrap: bool,
    mode: TransferMode,
    evaluator: &(impl GraspEvaluator + ?Sized),
) -> Result<Vec<AugmentationRun>, TransferError> {
    let specs = sampled_specs(a_max, alpha_min, alpha_max, &seeds.source_object_id, rng_seed)?;
    let mut out = Vec::with_capacity(a_max);
    for (a, spec) in specs.into_iter().enumerate() {
        let mesh = augment(reference_mesh, &spec)?;
        let run_config = RunConfig {
            rng_seed: derive_seed(rng_seed, stream::AUGMENT_RUN, a as u64),
            ..config.clone()
        };
        let outcome = bootstrap_run(&mesh, seeds, &spec, &run_config, stop_after_bootstrap, mode, evaluator)?;
        out.push(AugmentationRun {
            spec,
            mesh,
            archive: outcome.archive,
            metrics: outcome.metrics,
            report: outcome.report,
        });
    }
    Ok(out)
}

/// Paired bootstrap-vs-scratch comparison on one augmented object.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ComparisonRecord {
    pub object_id: String,
    pub spec: AugmentationSpec,
    /// Evaluations spent by the bootstrap seed phase (= seed count).
    pub bootstrap_end_evaluations: usize,
    pub robust_bootstrap_at_init_end: usize,
    pub robust_scratch_at_same_evals: usize,
    pub robust_bootstrap_full: usize,
    pub robust_scratch_full: usize,
    /// Seed-phase outcome summary of the bootstrap arm.
    pub transfer: TransferReport,
    /// Qualities of the bootstrap arm's final archive (successful elites):
    /// the augmented object's grasp set produced by this corpus.
    pub bootstrap_final_qualities: Vec<f64>,
    pub bootstrap_curve: Vec<qd::GenerationStats>,
    pub scratch_curve: Vec<qd::GenerationStats>,
}

/// Run both arms to the full budget with paired evaluation seeds and record
/// robust counts at the bootstrap-end evaluation count and at the full
/// budget. Scratch counts at the matched evaluation level read the first
/// snapshot at or past that level, which can only favor the scratch arm.
pub fn compare_bootstrap_vs_scratch(
    reference_mesh: &TriMesh,
    seeds: &BootstrapArchive,
    specs: &[AugmentationSpec],
    config: &RunConfig,
    mode: TransferMode,
    evaluator: &(impl GraspEvaluator + ?Sized),
) -> Result<Vec<ComparisonRecord>, TransferError> {
    if specs.is_empty() {
        return Err(TransferError::NoAugmentations(0));
    }
    let mut out = Vec::with_capacity(specs.len());
    for spec in specs {
        let mesh = augment(reference_mesh, spec)?;
        let boot = bootstrap_run(&mesh, seeds, spec, config, false, mode, evaluator)?;
        let scratch = qd::run(&mesh, &RunConfig { stop_after_bootstrap: false, ..config.clone() }, None, evaluator)?;
        let n_seeds = seeds.len();
        out.push(ComparisonRecord {
            object_id: seeds.source_object_id.clone(),
            spec: spec.clone(),
            bootstrap_end_evaluations: n_seeds,
            robust_bootstrap_at_init_end: boot.metrics.robust_count_at(n_seeds),
            robust_scratch_at_same_evals: robust_count_at_least(&scratch.metrics, n_seeds),
            robust_bootstrap_full: boot.metrics.robust_grasp_count,
            robust_scratch_full: scratch.metrics.robust_grasp_count,
            transfer: boot.report,
            bootstrap_final_qualities: boot
                .archive
                .successful_elites()
                .map(|e| e.outcome.quality_or_zero())
                .collect(),
            bootstrap_curve: boot.metrics.history.clone(),
            scratch_curve: scratch.metrics.history,
        });
    }
    Ok(out)
}

/// Robust count at the first snapshot with at least `evaluations` spent
/// (falls back to the final snapshot).
fn robust_count_at_least(metrics: &RunMetrics, evaluations: usize) -> usize {
    metrics
        .history
        .iter()
        .find(|g| g.evaluations_used >= evaluations)
        .or(metrics.history.last())
        .map_or(0, |g| g.robust_count)
}
