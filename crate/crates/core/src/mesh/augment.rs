//! Anisotropic mesh augmentation: diagonal scaling about the bounding-box
//! center, the deformation used to mint new-but-similar objects.

use super::{MeshError, TriMesh};
use glam::DVec3;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// A diagonal deformation plus the provenance of the reference object.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AugmentationSpec {
    /// Per-axis scale factors (dimensionless).
    pub alpha: [f64; 3],
    /// Identifier of the source object.
    pub reference_id: String,
    /// Seed these factors were drawn with.
    pub rng_seed: u64,
}

impl AugmentationSpec {
    pub fn new(alpha: [f64; 3], reference_id: impl Into<String>, rng_seed: u64) -> Result<Self, MeshError> {
        for &a in &alpha {
            if !a.is_finite() || a <= 0.0 {
                return Err(MeshError::InvalidAlpha { alpha: a });
            }
        }
        Ok(Self {
            alpha,
            reference_id: reference_id.into(),
            rng_seed,
        })
    }

    pub fn identity(reference_id: impl Into<String>) -> Self {
        Self {
            alpha: [1.0; 3],
            reference_id: reference_id.into(),
            rng_seed: 0,
        }
    }

    /// All factors exactly 1.
    pub fn is_identity(&self) -> bool {
        self.alpha == [1.0; 3]
    }

    pub fn within_bounds(&self, alpha_min: f64, alpha_max: f64) -> bool {
        self.alpha.iter().all(|&a| a >= alpha_min && a <= alpha_max)
    }
}

/// Draw a spec with each factor independent and uniform in
/// `[alpha_min, alpha_max]`. Deterministic for a given seed.
pub fn sample_augmentation(
    rng_seed: u64,
    alpha_min: f64,
    alpha_max: f64,
    reference_id: impl Into<String>,
) -> Result<AugmentationSpec, MeshError> {
    if !alpha_min.is_finite() || !alpha_max.is_finite() || alpha_min <= 0.0 || alpha_min > alpha_max {
        return Err(MeshError::InvertedBounds {
            min: alpha_min,
            max: alpha_max,
        });
    }
    let mut rng = crate::rng::rng_from(rng_seed);
    let mut alpha = [0.0; 3];
    for a in &mut alpha {
        *a = if alpha_min == alpha_max {
            alpha_min
        } else {
            rng.random_range(alpha_min..alpha_max)
        };
    }
    AugmentationSpec::new(alpha, reference_id, rng_seed)
}

/// Scale every vertex about the input's AABB center: `v' = c + D_a (v - c)`.
/// Topology is unchanged; normals, bounds, digest, and the acceleration
/// structure are recomputed. The exact-identity spec returns an unchanged
/// copy so identity augmentation preserves the digest bit for bit.
pub fn augment(mesh: &TriMesh, spec: &AugmentationSpec) -> Result<TriMesh, MeshError> {
    for &a in &spec.alpha {
        if !a.is_finite() || a <= 0.0 {
            return Err(MeshError::InvalidAlpha { alpha: a });
        }
    }
    if spec.is_identity() {
        return Ok(mesh.clone());
    }
    let c = mesh.aabb().center();
    let alpha = DVec3::from_array(spec.alpha);
    let vertices = mesh
        .vertices()
        .iter()
        .map(|&v| c + alpha * (v - c))
        .collect();
    TriMesh::new(vertices, mesh.triangles().to_vec())
}
