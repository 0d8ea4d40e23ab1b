//! Grasp domain types: the gripper description, the 6-DoF grasp genome, the
//! evaluation outcome, and the domain-randomization settings.

pub mod eval;

pub use eval::{
    behavior_descriptor, evaluate_nominal, evaluate_with_quality, DomainRandomizedEvaluator,
    GraspEvaluator,
};

use crate::geom::canonical_quat;
use glam::{DQuat, DVec3};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraspError {
    #[error("invalid gripper: {0}")]
    InvalidGripper(String),
    #[error("invalid domain randomization spec: {0}")]
    InvalidDomainRandomization(String),
    #[error("orientation quaternion is degenerate (norm {norm})")]
    DegenerateQuaternion { norm: f64 },
}

/// Parallel-jaw gripper geometry and friction. The defaults approximate a
/// Franka-style two-finger gripper. The gripper frame has +z as the approach
/// axis and +x as the closing axis. The finger pads are centered on the
/// tool-center-point plane at z = `tcp_offset` (zero by default, so a grasp
/// pose is a TCP pose) and the palm body sits a finger length behind it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GripperSpec {
    /// Jaw travel: inner pad faces start this far apart (m).
    pub max_opening: f64,
    /// Finger extent along the approach axis (m).
    pub finger_length: f64,
    /// Half extents of each finger box: (closing, transverse, approach) (m).
    pub finger_pad: DVec3,
    /// Half extents of the palm body (m).
    pub palm_box: DVec3,
    /// Coulomb friction coefficient at the contacts.
    pub friction_coefficient: f64,
    /// Palm frame to tool-center-point distance along the approach axis (m).
    pub tcp_offset: f64,
    /// Rays per finger pad used for contact detection.
    pub contact_rays: u32,
}

impl Default for GripperSpec {
    fn default() -> Self {
        GripperSpec {
            max_opening: 0.08,
            finger_length: 0.05,
            finger_pad: DVec3::new(0.01, 0.005, 0.025),
            palm_box: DVec3::new(0.04, 0.02, 0.01),
            friction_coefficient: 0.5,
            tcp_offset: 0.0,
            contact_rays: 5,
        }
    }
}

impl GripperSpec {
    pub fn validate(&self) -> Result<(), GraspError> {
        let err = |m: String| Err(GraspError::InvalidGripper(m));
        for (name, v) in [
            ("max_opening", self.max_opening),
            ("finger_length", self.finger_length),
            ("friction_coefficient", self.friction_coefficient),
        ] {
            if !v.is_finite() || v <= 0.0 {
                return err(format!("{name} must be positive, got {v}"));
            }
        }
        if !self.tcp_offset.is_finite() || self.tcp_offset < 0.0 {
            return err(format!("tcp_offset must be non-negative, got {}", self.tcp_offset));
        }
        for (name, v) in [("finger_pad", self.finger_pad), ("palm_box", self.palm_box)] {
            if !v.is_finite() || v.x <= 0.0 || v.y <= 0.0 || v.z <= 0.0 {
                return err(format!("{name} half extents must be positive, got {v}"));
            }
        }
        if self.max_opening <= 2.0 * (2.0 * self.finger_pad.x) {
            return err(format!(
                "max_opening {} must exceed twice the finger pad thickness {}",
                self.max_opening,
                2.0 * self.finger_pad.x
            ));
        }
        if self.contact_rays < 1 {
            return err("contact_rays must be at least 1".into());
        }
        Ok(())
    }

    /// Friction cone half-angle, `atan(mu)`.
    pub fn cone_half_angle(&self) -> f64 {
        self.friction_coefficient.atan()
    }

    /// Stable digest of the gripper parameters.
    pub fn digest(&self) -> [u8; 32] {
        let mut h = Sha256::new();
        for v in [
            self.max_opening,
            self.finger_length,
            self.finger_pad.x,
            self.finger_pad.y,
            self.finger_pad.z,
            self.palm_box.x,
            self.palm_box.y,
            self.palm_box.z,
            self.friction_coefficient,
            self.tcp_offset,
        ] {
            h.update(v.to_le_bytes());
        }
        h.update(self.contact_rays.to_le_bytes());
        h.finalize().into()
    }

    pub fn digest_hex(&self) -> String {
        hex::encode(self.digest())
    }
}

/// A 6-DoF gripper pose in the object frame. The orientation is kept unit
/// norm with canonical sign (scalar part non-negative).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GraspGenome {
    position: DVec3,
    orientation: DQuat,
}

impl GraspGenome {
    pub fn new(position: DVec3, orientation: DQuat) -> Result<Self, GraspError> {
        let norm = orientation.length();
        if !norm.is_finite() || norm <= 1e-9 {
            return Err(GraspError::DegenerateQuaternion { norm });
        }
        Ok(GraspGenome {
            position,
            orientation: canonical_quat(orientation),
        })
    }

    pub fn position(&self) -> DVec3 {
        self.position
    }

    pub fn orientation(&self) -> DQuat {
        self.orientation
    }

    /// Approach axis (+z of the gripper frame) in the object frame.
    pub fn approach_axis(&self) -> DVec3 {
        self.orientation.mul_vec3(DVec3::Z)
    }

    /// Closing axis (+x of the gripper frame) in the object frame.
    pub fn closing_axis(&self) -> DVec3 {
        self.orientation.mul_vec3(DVec3::X)
    }

    /// The genome under a rigid transform of the object frame.
    pub fn transformed(&self, rotation: DQuat, translation: DVec3) -> GraspGenome {
        GraspGenome {
            position: rotation.mul_vec3(self.position) + translation,
            orientation: canonical_quat(rotation * self.orientation),
        }
    }
}

/// Why an evaluation failed, ordered by pipeline stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureReason {
    None,
    BodyCollision,
    MissedContact,
    FrictionConeViolation,
}

/// One finger/object contact.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Contact {
    pub point: DVec3,
    pub normal: DVec3,
}

/// Result of evaluating one grasp.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalOutcome {
    pub success: bool,
    pub failure_reason: FailureReason,
    /// Contacts on the (+closing, -closing) fingers when both were found.
    pub contacts: Option<(Contact, Contact)>,
    /// Jaw separation at contact (m); zero when closing never contacted.
    pub closing_width: f64,
    /// Domain-randomized success fraction in [0, 1]; `None` for a bare
    /// nominal evaluation.
    pub quality: Option<f64>,
    /// True iff the first `n_robust_trials` perturbed trials all succeeded.
    pub robust: bool,
    /// Evaluator invocations behind this outcome (nominal plus any trials).
    pub trials_run: u32,
    /// Seed the quality trials were derived from.
    pub rng_seed: u64,
}

impl EvalOutcome {
    pub fn quality_or_zero(&self) -> f64 {
        self.quality.unwrap_or(0.0)
    }
}

/// Perturbation model for robustness labeling.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DomainRandomizationSpec {
    /// Position noise per axis (m).
    pub sigma_pos: f64,
    /// Rotation angle noise (rad).
    pub sigma_rot: f64,
    /// Friction coefficient drawn uniformly from this interval.
    pub friction_range: [f64; 2],
    /// Perturbed trials behind the quality label.
    pub n_label_trials: u32,
    /// Leading trials that must all succeed for the robust flag.
    pub n_robust_trials: u32,
}

impl Default for DomainRandomizationSpec {
    fn default() -> Self {
        DomainRandomizationSpec {
            sigma_pos: 0.003,
            sigma_rot: 0.05,
            friction_range: [0.3, 0.7],
            n_label_trials: 10,
            n_robust_trials: 3,
        }
    }
}

impl DomainRandomizationSpec {
    pub fn validate(&self) -> Result<(), GraspError> {
        let err = |m: String| Err(GraspError::InvalidDomainRandomization(m));
        if !self.sigma_pos.is_finite()
            || !self.sigma_rot.is_finite()
            || self.sigma_pos < 0.0
            || self.sigma_rot < 0.0
        {
            return err(format!(
                "sigmas must be non-negative, got {} / {}",
                self.sigma_pos, self.sigma_rot
            ));
        }
        if !self.friction_range[0].is_finite()
            || self.friction_range[0] <= 0.0
            || self.friction_range[0] > self.friction_range[1]
        {
            return err(format!("friction range {:?} must be positive and ordered", self.friction_range));
        }
        if self.n_label_trials < 1 {
            return err("n_label_trials must be at least 1".into());
        }
        if self.n_robust_trials > self.n_label_trials {
            return err(format!(
                "n_robust_trials {} exceeds n_label_trials {}",
                self.n_robust_trials, self.n_label_trials
            ));
        }
        Ok(())
    }
}
