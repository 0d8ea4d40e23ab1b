//! Quasi-static grasp evaluation: place the gripper wide open, check the body
//! for collisions, close the jaws via ray-cast contact detection, and test
//! the contact pair against the friction cones. Robustness labels come from
//! re-evaluating under seeded pose and friction perturbations.

use super::{
    Contact, DomainRandomizationSpec, EvalOutcome, FailureReason, GraspGenome, GripperSpec,
};
use crate::mesh::TriMesh;
use crate::rng::{derive_seed, rng_from, stream};
use glam::{DQuat, DVec3};
use rand::Rng;
use rand_distr::{Distribution, Normal, UnitSphere};

/// The behavior descriptor of a grasp: the tool-center-point position in the
/// object frame. Deterministic in the genome.
pub fn behavior_descriptor(genome: &GraspGenome, gripper: &GripperSpec) -> DVec3 {
    genome.position() + genome.orientation().mul_vec3(DVec3::new(0.0, 0.0, gripper.tcp_offset))
}

/// Ray-fan origins on a finger pad's inner face, as (transverse, approach)
/// offsets from the pad face center: the center plus an ellipse of points at
/// 70% of the pad half extents.
fn fan_offsets(gripper: &GripperSpec) -> Vec<(f64, f64)> {
    let n = gripper.contact_rays.max(1) as usize;
    let mut out = Vec::with_capacity(n);
    out.push((0.0, 0.0));
    let ring = n - 1;
    for k in 0..ring {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / ring as f64;
        out.push((
            0.7 * gripper.finger_pad.y * theta.cos(),
            0.7 * gripper.finger_pad.z * theta.sin(),
        ));
    }
    out
}

fn failure(reason: FailureReason) -> EvalOutcome {
    EvalOutcome {
        success: false,
        failure_reason: reason,
        contacts: None,
        closing_width: 0.0,
        quality: None,
        robust: false,
        trials_run: 1,
        rng_seed: 0,
    }
}

/// Evaluate a grasp pose with the gripper at the given friction coefficient.
/// Quality is left unset; see [`evaluate_with_quality`].
pub fn evaluate_nominal(mesh: &TriMesh, gripper: &GripperSpec, genome: &GraspGenome) -> EvalOutcome {
    let rot = genome.orientation();
    let p = genome.position();
    let closing = genome.closing_axis();
    let w = gripper.max_opening;
    let pad = gripper.finger_pad;

    // Stage 1: body collision with the jaws wide open. Pads are centered on
    // the TCP plane; the palm body sits a finger length behind it.
    let finger_center_z = gripper.tcp_offset;
    let palm_center = p + rot.mul_vec3(DVec3::new(
        0.0,
        0.0,
        finger_center_z - gripper.finger_length - gripper.palm_box.z,
    ));
    if mesh
        .intersects_oriented_box(palm_center, gripper.palm_box, rot)
        .expect("validated palm extents")
    {
        return failure(FailureReason::BodyCollision);
    }
    for side in [1.0, -1.0] {
        let center = p + rot.mul_vec3(DVec3::new(side * (w / 2.0 + pad.x), 0.0, finger_center_z));
        if mesh
            .intersects_oriented_box(center, pad, rot)
            .expect("validated pad extents")
        {
            return failure(FailureReason::BodyCollision);
        }
    }

    // Stage 2: close symmetrically. Each finger travels at most half the
    // opening; the nearest hit over its ray fan is its contact.
    let max_travel = w / 2.0;
    let mut contacts = [None, None];
    for (slot, side) in [1.0f64, -1.0].iter().enumerate() {
        let dir = (-side * closing).normalize();
        let mut nearest: Option<(f64, Contact)> = None;
        for (oy, oz) in fan_offsets(gripper) {
            let origin =
                p + rot.mul_vec3(DVec3::new(side * max_travel, oy, finger_center_z + oz));
            if let Ok(Some(hit)) = mesh.raycast(origin, dir, max_travel) {
                let better = nearest.as_ref().is_none_or(|(t, _)| hit.distance < *t);
                if better {
                    nearest = Some((
                        hit.distance,
                        Contact {
                            point: hit.point,
                            normal: hit.normal,
                        },
                    ));
                }
            }
        }
        match nearest {
            None => return failure(FailureReason::MissedContact),
            Some(found) => contacts[slot] = Some(found),
        }
    }
    let (travel_plus, contact_plus) = contacts[0].expect("set above");
    let (travel_minus, contact_minus) = contacts[1].expect("set above");
    let closing_width = w - travel_plus - travel_minus;

    // Stage 3: antipodal friction-cone test. The closing line must lie inside
    // both contact cones: angle(n+, +closing) and angle(n-, -closing) within
    // atan(mu).
    let cos_cone = 1.0 / (1.0 + gripper.friction_coefficient.powi(2)).sqrt();
    let cos_plus = contact_plus.normal.dot(closing);
    let cos_minus = contact_minus.normal.dot(-closing);
    if cos_plus < cos_cone || cos_minus < cos_cone {
        return EvalOutcome {
            contacts: Some((contact_plus, contact_minus)),
            closing_width,
            ..failure(FailureReason::FrictionConeViolation)
        };
    }

    EvalOutcome {
        success: true,
        failure_reason: FailureReason::None,
        contacts: Some((contact_plus, contact_minus)),
        closing_width,
        quality: None,
        robust: false,
        trials_run: 1,
        rng_seed: 0,
    }
}

/// One perturbed replica of a genome and friction draw. The pose noise is
/// applied in the gripper's local frame so evaluation stays invariant under
/// rigid transforms of the object frame.
fn perturbed(
    genome: &GraspGenome,
    gripper: &GripperSpec,
    dr: &DomainRandomizationSpec,
    seed: u64,
) -> (GraspGenome, GripperSpec) {
    let mut rng = rng_from(seed);
    let pos_noise = Normal::new(0.0, dr.sigma_pos).expect("validated sigma");
    let rot_noise = Normal::new(0.0, dr.sigma_rot).expect("validated sigma");
    let dp_local = DVec3::new(
        pos_noise.sample(&mut rng),
        pos_noise.sample(&mut rng),
        pos_noise.sample(&mut rng),
    );
    let axis: [f64; 3] = UnitSphere.sample(&mut rng);
    let angle = rot_noise.sample(&mut rng);
    let delta = DQuat::from_axis_angle(DVec3::from_array(axis), angle);
    let position = genome.position() + genome.orientation().mul_vec3(dp_local);
    let orientation = genome.orientation() * delta;
    let [lo, hi] = dr.friction_range;
    let mu = if lo == hi { lo } else { rng.random_range(lo..hi) };
    let genome = GraspGenome::new(position, orientation).expect("perturbation keeps unit norm");
    let gripper = GripperSpec {
        friction_coefficient: mu,
        ..gripper.clone()
    };
    (genome, gripper)
}

/// Nominal evaluation plus `n_label_trials` domain-randomized re-evaluations.
/// Quality is the perturbed success fraction; the robust flag requires the
/// first `n_robust_trials` to all succeed. Nominal failure short-circuits
/// with quality zero.
pub fn evaluate_with_quality(
    mesh: &TriMesh,
    gripper: &GripperSpec,
    genome: &GraspGenome,
    dr: &DomainRandomizationSpec,
    rng_seed: u64,
) -> EvalOutcome {
    let nominal = evaluate_nominal(mesh, gripper, genome);
    if !nominal.success {
        return EvalOutcome {
            quality: Some(0.0),
            trials_run: 1,
            rng_seed,
            ..nominal
        };
    }
    let mut successes = 0u32;
    let mut robust = true;
    for trial in 0..dr.n_label_trials {
        let seed = derive_seed(rng_seed, stream::DR_TRIAL, trial as u64);
        let (perturbed_genome, perturbed_gripper) = perturbed(genome, gripper, dr, seed);
        let outcome = evaluate_nominal(mesh, &perturbed_gripper, &perturbed_genome);
        if outcome.success {
            successes += 1;
        } else if trial < dr.n_robust_trials {
            robust = false;
        }
    }
    EvalOutcome {
        quality: Some(successes as f64 / dr.n_label_trials as f64),
        robust,
        trials_run: 1 + dr.n_label_trials,
        rng_seed,
        ..nominal
    }
}

/// The evaluation interface the optimizer runs against. Implementations must
/// be pure given the seed.
pub trait GraspEvaluator: Sync {
    fn evaluate(&self, mesh: &TriMesh, genome: &GraspGenome, seed: u64) -> EvalOutcome;
    fn descriptor(&self, genome: &GraspGenome) -> DVec3;
}

/// The production evaluator: nominal pipeline plus domain-randomized quality.
#[derive(Debug, Clone)]
pub struct DomainRandomizedEvaluator {
    pub gripper: GripperSpec,
    pub dr: DomainRandomizationSpec,
}

impl GraspEvaluator for DomainRandomizedEvaluator {
    fn evaluate(&self, mesh: &TriMesh, genome: &GraspGenome, seed: u64) -> EvalOutcome {
        evaluate_with_quality(mesh, &self.gripper, genome, &self.dr, seed)
    }

    fn descriptor(&self, genome: &GraspGenome) -> DVec3 {
        behavior_descriptor(genome, &self.gripper)
    }
}
