//! The optimizer loop: prior-based initialization, mutation-selection over
//! the archive, and deterministic batched evaluation.

use super::archive::Archive;
use crate::grasp::{DomainRandomizationSpec, EvalOutcome, GraspEvaluator, GraspGenome, GripperSpec};
use crate::mesh::TriMesh;
use crate::rng::{derive_seed, rng_from, stream};
use glam::{DQuat, DVec3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal, UnitSphere};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum QdError {
    #[error("invalid run config: {0}")]
    InvalidConfig(String),
    #[error("evaluation budget {budget} is below the seed population size {seeds}; refusing to truncate")]
    BudgetBelowSeeds { budget: usize, seeds: usize },
}

/// Everything a run needs beyond the mesh: budget, batching, operator
/// parameters, the gripper, and the domain-randomization spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RunConfig {
    /// Total evaluation budget.
    pub eval_budget: usize,
    /// Evaluations per generation.
    pub batch_size: usize,
    /// Fraction of the budget spent on prior sampling at initialization.
    pub init_fraction: f64,
    /// Mutation position noise per axis (m).
    pub mutation_sigma_pos: f64,
    /// Mutation rotation angle noise (rad).
    pub mutation_sigma_rot: f64,
    /// Surface-prior standoff interval along the outward normal (m); negative
    /// values sink the pose past the surface.
    pub standoff: [f64; 2],
    /// Surface-prior approach tilt cone half-angle (rad).
    pub tilt_cone: f64,
    /// Archive resolution per behavior axis.
    pub bins_per_axis: u32,
    /// Root seed; every stream in the run derives from it.
    pub rng_seed: u64,
    /// Stop right after the seed-evaluation phase (dataset-generation mode).
    pub stop_after_bootstrap: bool,
    pub gripper: GripperSpec,
    pub dr: DomainRandomizationSpec,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            eval_budget: 100_000,
            batch_size: 64,
            init_fraction: 0.1,
            mutation_sigma_pos: 0.01,
            mutation_sigma_rot: 0.15,
            standoff: [-0.015, 0.015],
            tilt_cone: 0.35,
            bins_per_axis: 25,
            rng_seed: 0,
            stop_after_bootstrap: false,
            gripper: GripperSpec::default(),
            dr: DomainRandomizationSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn validate(&self) -> Result<(), QdError> {
        let err = |m: String| Err(QdError::InvalidConfig(m));
        if self.batch_size < 1 || self.eval_budget < self.batch_size {
            return err(format!(
                "need eval_budget >= batch_size >= 1, got {} / {}",
                self.eval_budget, self.batch_size
            ));
        }
        if !self.init_fraction.is_finite() || self.init_fraction <= 0.0 || self.init_fraction >= 1.0 {
            return err(format!("init_fraction must be in (0, 1), got {}", self.init_fraction));
        }
        if !self.standoff[0].is_finite() || self.standoff[0] > self.standoff[1] {
            return err(format!("standoff interval {:?} must be ordered", self.standoff));
        }
        if !(0.0..=std::f64::consts::PI).contains(&self.tilt_cone) {
            return err(format!("tilt_cone {} must be in [0, pi]", self.tilt_cone));
        }
        if !self.mutation_sigma_pos.is_finite()
            || !self.mutation_sigma_rot.is_finite()
            || self.mutation_sigma_pos < 0.0
            || self.mutation_sigma_rot < 0.0
        {
            return err("mutation sigmas must be non-negative".into());
        }
        if self.bins_per_axis < 1 {
            return err("bins_per_axis must be at least 1".into());
        }
        self.gripper.validate().map_err(|e| QdError::InvalidConfig(e.to_string()))?;
        self.dr.validate().map_err(|e| QdError::InvalidConfig(e.to_string()))?;
        Ok(())
    }
}

/// Per-generation metrics snapshot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenerationStats {
    pub generation: u32,
    pub evaluations_used: usize,
    pub success_count: usize,
    pub robust_count: usize,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetrics {
    pub evaluations_used: usize,
    pub robust_grasp_count: usize,
    pub success_count: usize,
    pub coverage: f64,
    pub history: Vec<GenerationStats>,
}

impl RunMetrics {
    /// Evaluations per robust grasp; `None` when no robust grasp was found.
    pub fn evals_per_robust_grasp(&self) -> Option<f64> {
        if self.robust_grasp_count > 0 {
            Some(self.evaluations_used as f64 / self.robust_grasp_count as f64)
        } else {
            None
        }
    }

    /// Robust count once `evaluations` had been spent (step function over the
    /// recorded history; zero before the first snapshot).
    pub fn robust_count_at(&self, evaluations: usize) -> usize {
        self.history
            .iter()
            .take_while(|g| g.evaluations_used <= evaluations)
            .last()
            .map_or(0, |g| g.robust_count)
    }
}

/// A seed genome for the initialization phase, optionally pinned to the
/// evaluation seed it was originally labeled with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeedGenome {
    pub genome: GraspGenome,
    pub eval_seed: Option<u64>,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub archive: Archive,
    pub metrics: RunMetrics,
    /// Outcomes of the seed-evaluation phase, in seed order.
    pub seed_outcomes: Vec<EvalOutcome>,
}

/// Draw a grasp from the surface prior: a standoff point along the outward
/// normal, approach axis pointing back at the surface within a tilt cone,
/// and uniform roll about the approach.
pub fn sample_prior_genome(mesh: &TriMesh, config: &RunConfig, rng: &mut ChaCha8Rng) -> GraspGenome {
    let sample = mesh.sample_surface_one(rng);
    let [lo, hi] = config.standoff;
    let standoff = if lo == hi { lo } else { rng.random_range(lo..hi) };
    let position = sample.point + standoff * sample.normal;

    let inward = -sample.normal;
    let approach = if config.tilt_cone == 0.0 {
        inward
    } else {
        // Uniform over the spherical cap of half-angle tilt_cone.
        let cos_cap = config.tilt_cone.cos();
        let u: f64 = rng.random_range(0.0..1.0);
        let cos_tilt = 1.0 - u * (1.0 - cos_cap);
        let sin_tilt = (1.0 - cos_tilt * cos_tilt).max(0.0).sqrt();
        let psi: f64 = rng.random_range(0.0..std::f64::consts::TAU);
        let (e1, e2) = crate::geom::orthonormal_basis(inward);
        (inward * cos_tilt + (e1 * psi.cos() + e2 * psi.sin()) * sin_tilt).normalize()
    };
    let roll: f64 = rng.random_range(0.0..std::f64::consts::TAU);
    let orientation = DQuat::from_rotation_arc(DVec3::Z, approach) * DQuat::from_axis_angle(DVec3::Z, roll);
    GraspGenome::new(position, orientation).expect("constructed orientation is unit")
}

/// Gaussian position noise per axis plus a small rotation of Gaussian
/// magnitude about a uniform random axis.
pub fn mutate(parent: &GraspGenome, config: &RunConfig, rng: &mut ChaCha8Rng) -> GraspGenome {
    let pos_noise = Normal::new(0.0, config.mutation_sigma_pos).expect("validated sigma");
    let rot_noise = Normal::new(0.0, config.mutation_sigma_rot).expect("validated sigma");
    let position = parent.position()
        + DVec3::new(
            pos_noise.sample(rng),
            pos_noise.sample(rng),
            pos_noise.sample(rng),
        );
    let axis: [f64; 3] = UnitSphere.sample(rng);
    let angle = rot_noise.sample(rng);
    let orientation = parent.orientation() * DQuat::from_axis_angle(DVec3::from_array(axis), angle);
    GraspGenome::new(position, orientation).expect("mutation keeps unit norm")
}

/// Run the optimizer. Phase 1 evaluates the seed population (if any), then
/// fills the rest of the initialization budget with prior samples; phase 2
/// iterates mutation-selection until the budget is spent. In
/// stop-after-bootstrap mode the run ends right after the seed evaluations.
/// Fully deterministic in the config and seeds, independent of thread count.
pub fn run(
    mesh: &TriMesh,
    config: &RunConfig,
    seed_population: Option<&[SeedGenome]>,
    evaluator: &(impl GraspEvaluator + ?Sized),
) -> Result<RunResult, QdError> {
    config.validate()?;
    let seeds = seed_population.unwrap_or(&[]);
    if seeds.len() > config.eval_budget {
        return Err(QdError::BudgetBelowSeeds {
            budget: config.eval_budget,
            seeds: seeds.len(),
        });
    }

    let mut archive = Archive::for_object(&mesh.aabb(), &config.gripper, config.bins_per_axis);
    let mut master = rng_from(derive_seed(config.rng_seed, stream::MASTER, 0));
    let mut evaluations_used = 0usize;
    let mut history: Vec<GenerationStats> = Vec::new();
    let mut seed_outcomes = Vec::with_capacity(seeds.len());

    let eval_seed_for = |index: usize| derive_seed(config.rng_seed, stream::EVAL, index as u64);

    // Phase 1a: the seed population, in batches, with stored seeds honored.
    for chunk in seeds.chunks(config.batch_size) {
        let batch: Vec<(GraspGenome, u64)> = chunk
            .iter()
            .enumerate()
            .map(|(k, s)| {
                let seed = s.eval_seed.unwrap_or_else(|| eval_seed_for(evaluations_used + k));
                (s.genome, seed)
            })
            .collect();
        let outcomes = evaluate_batch(mesh, evaluator, &batch, &mut archive);
        evaluations_used += batch.len();
        seed_outcomes.extend(outcomes);
        push_stats(&mut history, &archive, evaluations_used);
    }

    if !config.stop_after_bootstrap {
        // Phase 1b: prior sampling until the initialization budget is spent
        // (skipped when the seeds already covered it).
        let init_target = ((config.init_fraction * config.eval_budget as f64).floor() as usize)
            .min(config.eval_budget);
        while evaluations_used < init_target {
            let n = config
                .batch_size
                .min(init_target - evaluations_used)
                .min(config.eval_budget - evaluations_used);
            let batch: Vec<(GraspGenome, u64)> = (0..n)
                .map(|k| {
                    (
                        sample_prior_genome(mesh, config, &mut master),
                        eval_seed_for(evaluations_used + k),
                    )
                })
                .collect();
            evaluate_batch(mesh, evaluator, &batch, &mut archive);
            evaluations_used += n;
            push_stats(&mut history, &archive, evaluations_used);
        }

        // Phase 2: mutation-selection. Parents are uniform over successful
        // elites, falling back to all elites, falling back to fresh priors.
        while evaluations_used < config.eval_budget {
            let n = config.batch_size.min(config.eval_budget - evaluations_used);
            let batch: Vec<(GraspGenome, u64)> = {
                let successful: Vec<&GraspGenome> =
                    archive.successful_elites().map(|e| &e.genome).collect();
                let pool: Vec<&GraspGenome> = if !successful.is_empty() {
                    successful
                } else {
                    archive.elites().map(|e| &e.genome).collect()
                };
                (0..n)
                    .map(|k| {
                        let genome = if pool.is_empty() {
                            sample_prior_genome(mesh, config, &mut master)
                        } else {
                            let parent = pool[master.random_range(0..pool.len())];
                            mutate(parent, config, &mut master)
                        };
                        (genome, eval_seed_for(evaluations_used + k))
                    })
                    .collect()
            };
            evaluate_batch(mesh, evaluator, &batch, &mut archive);
            evaluations_used += n;
            push_stats(&mut history, &archive, evaluations_used);
        }
    }

    let metrics = RunMetrics {
        evaluations_used,
        robust_grasp_count: archive.robust_count(),
        success_count: archive.success_count(),
        coverage: archive.coverage(),
        history,
    };
    Ok(RunResult {
        archive,
        metrics,
        seed_outcomes,
    })
}

/// Evaluate a prepared batch in parallel and insert in batch order, so the
/// archive state never depends on scheduling.
fn evaluate_batch(
    mesh: &TriMesh,
    evaluator: &(impl GraspEvaluator + ?Sized),
    batch: &[(GraspGenome, u64)],
    archive: &mut Archive,
) -> Vec<EvalOutcome> {
    let outcomes: Vec<EvalOutcome> = batch
        .par_iter()
        .map(|(genome, seed)| evaluator.evaluate(mesh, genome, *seed))
        .collect();
    for ((genome, _), outcome) in batch.iter().zip(&outcomes) {
        archive.try_insert(evaluator.descriptor(genome), *genome, outcome.clone());
    }
    outcomes
}

fn push_stats(history: &mut Vec<GenerationStats>, archive: &Archive, evaluations_used: usize) {
    history.push(GenerationStats {
        generation: history.len() as u32,
        evaluations_used,
        success_count: archive.success_count(),
        robust_count: archive.robust_count(),
        coverage: archive.coverage(),
    });
}
