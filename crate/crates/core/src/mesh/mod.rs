//! Triangle meshes and the geometric queries the evaluator and sampler need.
//!
//! A [`TriMesh`] is immutable after construction and canonical: vertices are
//! welded and sorted, triangle index triples are rotated and sorted, so two
//! meshes with the same surface content have the same digest no matter which
//! file format or code path produced them.

mod bvh;
mod sat;

pub mod augment;
pub mod decimate;
pub mod io;
pub mod primitives;
pub mod sample;

pub use augment::{augment, sample_augmentation, AugmentationSpec};
pub use decimate::{decimate, DecimationOutcome};
pub use io::{load_mesh, save_internal_binary, save_obj, save_stl, MeshFormat};
pub use sample::SurfaceSample;

use crate::geom::Aabb;
use glam::{DQuat, DVec3};
use sha2::{Digest, Sha256};
use std::path::PathBuf;
use thiserror::Error;

/// Triangles with area at or below this are dropped as degenerate.
pub const DEGENERATE_AREA: f64 = 1e-14;

/// Magic bytes of the internal binary mesh format.
pub const INTERNAL_MAGIC: &[u8; 4] = b"QDGM";
/// Version of the internal binary mesh format.
pub const INTERNAL_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum MeshError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },
    #[error("mesh has no triangles after degenerate removal")]
    EmptyMesh,
    #[error("triangle {triangle} references vertex {index} but mesh has {vertex_count} vertices")]
    IndexOutOfBounds {
        triangle: usize,
        index: u32,
        vertex_count: usize,
    },
    #[error("vertex {index} has a non-finite coordinate")]
    NonFiniteVertex { index: usize },
    #[error("scale factor {alpha} is not positive")]
    InvalidAlpha { alpha: f64 },
    #[error("inverted or non-positive bounds [{min}, {max}]")]
    InvertedBounds { min: f64, max: f64 },
    #[error("ray direction has length {length}, expected a unit vector")]
    NonUnitDirection { length: f64 },
    #[error("box half extents must all be positive")]
    InvalidHalfExtents,
    #[error("decimation target {target} is below the minimum of 4 triangles")]
    DecimationTarget { target: usize },
    #[error("sample count must be at least 1")]
    InvalidSampleCount,
}

/// A ray/mesh intersection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RayHit {
    pub distance: f64,
    pub point: DVec3,
    pub normal: DVec3,
    pub triangle_index: usize,
}

/// Indexed triangle surface with precomputed areas, normals, bounds, a
/// content digest, and a bounding-volume hierarchy for ray and proximity
/// queries.
#[derive(Debug, Clone)]
pub struct TriMesh {
    vertices: Vec<DVec3>,
    triangles: Vec<[u32; 3]>,
    areas: Vec<f64>,
    cumulative_areas: Vec<f64>,
    normals: Vec<DVec3>,
    aabb: Aabb,
    digest: [u8; 32],
    degenerate_dropped: usize,
    bvh: bvh::Bvh,
}

impl TriMesh {
    /// Build a mesh from raw vertex and triangle lists. Welds bit-identical
    /// vertices, drops zero-area triangles (counting them), sorts everything
    /// into canonical order, and computes derived data.
    pub fn new(vertices: Vec<DVec3>, triangles: Vec<[u32; 3]>) -> Result<Self, MeshError> {
        for (i, v) in vertices.iter().enumerate() {
            if !v.is_finite() {
                return Err(MeshError::NonFiniteVertex { index: i });
            }
        }
        let vertex_count = vertices.len();
        for (t, tri) in triangles.iter().enumerate() {
            for &idx in tri {
                if idx as usize >= vertex_count {
                    return Err(MeshError::IndexOutOfBounds {
                        triangle: t,
                        index: idx,
                        vertex_count,
                    });
                }
            }
        }

        // Normalize -0.0 so welding and ordering agree with numeric equality.
        let vertices: Vec<DVec3> = vertices
            .into_iter()
            .map(|v| DVec3::new(scrub_zero(v.x), scrub_zero(v.y), scrub_zero(v.z)))
            .collect();

        // Weld exact-duplicate vertices.
        let mut key_to_index: std::collections::BTreeMap<[u64; 3], u32> =
            std::collections::BTreeMap::new();
        let mut welded: Vec<DVec3> = Vec::with_capacity(vertices.len());
        let mut remap: Vec<u32> = Vec::with_capacity(vertices.len());
        for v in &vertices {
            let key = [v.x.to_bits(), v.y.to_bits(), v.z.to_bits()];
            let idx = *key_to_index.entry(key).or_insert_with(|| {
                welded.push(*v);
                (welded.len() - 1) as u32
            });
            remap.push(idx);
        }

        // Drop degenerate triangles.
        let mut kept: Vec<[u32; 3]> = Vec::with_capacity(triangles.len());
        let mut degenerate_dropped = 0usize;
        for tri in &triangles {
            let t = [remap[tri[0] as usize], remap[tri[1] as usize], remap[tri[2] as usize]];
            if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] || triangle_area(&welded, t) <= DEGENERATE_AREA {
                degenerate_dropped += 1;
                continue;
            }
            kept.push(t);
        }
        if kept.is_empty() {
            return Err(MeshError::EmptyMesh);
        }

        // Compact to referenced vertices and sort them lexicographically.
        let mut referenced = vec![false; welded.len()];
        for t in &kept {
            for &i in t {
                referenced[i as usize] = true;
            }
        }
        let mut order: Vec<u32> = (0..welded.len() as u32).filter(|&i| referenced[i as usize]).collect();
        order.sort_unstable_by(|&a, &b| {
            let (va, vb) = (welded[a as usize], welded[b as usize]);
            va.x.total_cmp(&vb.x)
                .then(va.y.total_cmp(&vb.y))
                .then(va.z.total_cmp(&vb.z))
        });
        let mut final_index = vec![u32::MAX; welded.len()];
        let mut final_vertices = Vec::with_capacity(order.len());
        for (new_idx, &old_idx) in order.iter().enumerate() {
            final_index[old_idx as usize] = new_idx as u32;
            final_vertices.push(welded[old_idx as usize]);
        }

        // Canonical triangle order: smallest index first (winding preserved),
        // then lexicographic over triples.
        let mut final_triangles: Vec<[u32; 3]> = kept
            .into_iter()
            .map(|t| {
                let t = [
                    final_index[t[0] as usize],
                    final_index[t[1] as usize],
                    final_index[t[2] as usize],
                ];
                rotate_min_first(t)
            })
            .collect();
        final_triangles.sort_unstable();

        let areas: Vec<f64> = final_triangles
            .iter()
            .map(|&t| triangle_area(&final_vertices, t))
            .collect();
        let normals: Vec<DVec3> = final_triangles
            .iter()
            .map(|&t| {
                let [a, b, c] = triangle_points_of(&final_vertices, t);
                (b - a).cross(c - a).normalize()
            })
            .collect();
        let aabb = Aabb::from_points(final_vertices.iter().copied()).expect("non-empty");
        let digest = content_digest(&final_vertices, &final_triangles);
        let bvh = bvh::Bvh::build(&final_vertices, &final_triangles);
        let mut cumulative_areas = Vec::with_capacity(areas.len());
        let mut running = 0.0;
        for &a in &areas {
            running += a;
            cumulative_areas.push(running);
        }

        Ok(TriMesh {
            vertices: final_vertices,
            triangles: final_triangles,
            areas,
            cumulative_areas,
            normals,
            aabb,
            digest,
            degenerate_dropped,
            bvh,
        })
    }

    pub fn vertices(&self) -> &[DVec3] {
        &self.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.triangles
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn triangle_count(&self) -> usize {
        self.triangles.len()
    }

    pub fn triangle_points(&self, index: usize) -> [DVec3; 3] {
        triangle_points_of(&self.vertices, self.triangles[index])
    }

    pub fn triangle_area(&self, index: usize) -> f64 {
        self.areas[index]
    }

    pub fn triangle_normal(&self, index: usize) -> DVec3 {
        self.normals[index]
    }

    pub fn total_area(&self) -> f64 {
        *self.cumulative_areas.last().expect("non-empty mesh")
    }

    pub(crate) fn cumulative_areas(&self) -> &[f64] {
        &self.cumulative_areas
    }

    pub fn aabb(&self) -> Aabb {
        self.aabb
    }

    /// Number of degenerate triangles dropped at construction.
    pub fn degenerate_dropped(&self) -> usize {
        self.degenerate_dropped
    }

    /// 32-byte content digest over the canonical internal-binary serialization.
    pub fn digest(&self) -> [u8; 32] {
        self.digest
    }

    pub fn digest_hex(&self) -> String {
        hex::encode(self.digest)
    }

    /// Nearest ray intersection within `max_dist`, if any. Rays lying exactly
    /// in a triangle's plane miss; distance ties go to the lowest triangle
    /// index.
    pub fn raycast(
        &self,
        origin: DVec3,
        direction: DVec3,
        max_dist: f64,
    ) -> Result<Option<RayHit>, MeshError> {
        let length = direction.length();
        if (length - 1.0).abs() > 1e-9 {
            return Err(MeshError::NonUnitDirection { length });
        }
        Ok(self.bvh.raycast(self, origin, direction, max_dist))
    }

    /// True iff any triangle intersects the oriented box (touching counts).
    pub fn intersects_oriented_box(
        &self,
        center: DVec3,
        half_extents: DVec3,
        orientation: DQuat,
    ) -> Result<bool, MeshError> {
        if !half_extents.is_finite()
            || half_extents.x <= 0.0
            || half_extents.y <= 0.0
            || half_extents.z <= 0.0
        {
            return Err(MeshError::InvalidHalfExtents);
        }
        let orientation = orientation.normalize();
        Ok(self.bvh.intersects_box(self, center, half_extents, orientation))
    }

    /// Distance from a point to the closest point on the surface.
    pub fn distance_to_surface(&self, point: DVec3) -> f64 {
        self.bvh.closest_point(self, point).1
    }

    /// Closest surface point to `point`.
    pub fn closest_point(&self, point: DVec3) -> DVec3 {
        self.bvh.closest_point(self, point).0
    }

    /// A copy moved by `offset`.
    pub fn translated(&self, offset: DVec3) -> TriMesh {
        let vertices = self.vertices.iter().map(|&v| v + offset).collect();
        TriMesh::new(vertices, self.triangles.clone()).expect("translation preserves validity")
    }

    /// A copy under a rigid transform (rotation then translation).
    pub fn transformed(&self, rotation: DQuat, translation: DVec3) -> TriMesh {
        let rotation = rotation.normalize();
        let vertices = self
            .vertices
            .iter()
            .map(|&v| rotation.mul_vec3(v) + translation)
            .collect();
        TriMesh::new(vertices, self.triangles.clone()).expect("rigid transform preserves validity")
    }

}

fn scrub_zero(x: f64) -> f64 {
    if x == 0.0 {
        0.0
    } else {
        x
    }
}

fn rotate_min_first(t: [u32; 3]) -> [u32; 3] {
    if t[0] <= t[1] && t[0] <= t[2] {
        t
    } else if t[1] <= t[2] {
        [t[1], t[2], t[0]]
    } else {
        [t[2], t[0], t[1]]
    }
}

fn triangle_points_of(vertices: &[DVec3], t: [u32; 3]) -> [DVec3; 3] {
    [
        vertices[t[0] as usize],
        vertices[t[1] as usize],
        vertices[t[2] as usize],
    ]
}

fn triangle_area(vertices: &[DVec3], t: [u32; 3]) -> f64 {
    let [a, b, c] = triangle_points_of(vertices, t);
    0.5 * (b - a).cross(c - a).length()
}

/// Serialize vertices and triangles in the internal-binary layout
/// (little-endian: magic, u32 version, u64 vertex count, f64 triples,
/// u64 triangle count, u32 triples).
pub fn internal_binary_bytes(vertices: &[DVec3], triangles: &[[u32; 3]]) -> Vec<u8> {
    let mut out = Vec::with_capacity(16 + vertices.len() * 24 + triangles.len() * 12);
    out.extend_from_slice(INTERNAL_MAGIC);
    out.extend_from_slice(&INTERNAL_VERSION.to_le_bytes());
    out.extend_from_slice(&(vertices.len() as u64).to_le_bytes());
    for v in vertices {
        out.extend_from_slice(&v.x.to_le_bytes());
        out.extend_from_slice(&v.y.to_le_bytes());
        out.extend_from_slice(&v.z.to_le_bytes());
    }
    out.extend_from_slice(&(triangles.len() as u64).to_le_bytes());
    for t in triangles {
        out.extend_from_slice(&t[0].to_le_bytes());
        out.extend_from_slice(&t[1].to_le_bytes());
        out.extend_from_slice(&t[2].to_le_bytes());
    }
    out
}

fn content_digest(vertices: &[DVec3], triangles: &[[u32; 3]]) -> [u8; 32] {
    let mut hasher = Sha256::new();
    hasher.update(internal_binary_bytes(vertices, triangles));
    hasher.finalize().into()
}
