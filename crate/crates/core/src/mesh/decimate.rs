//! Mesh decimation by uniform vertex clustering. Deterministic: the grid
//! resolution is found by bisection against the triangle budget and cluster
//! representatives are vertex means in canonical order.

use super::{MeshError, TriMesh};
use glam::DVec3;

#[derive(Debug, Clone)]
pub struct DecimationOutcome {
    pub mesh: TriMesh,
    /// Vertex-sampled symmetric Hausdorff distance to the input (meters).
    pub hausdorff: f64,
    pub input_triangles: usize,
    pub output_triangles: usize,
    /// Clustering grid resolution used; 0 when the input was already under
    /// budget and returned unchanged.
    pub grid_resolution: u32,
}

/// Reduce the triangle count to at most `target_triangles` when possible.
/// A mesh already at or under budget is returned unchanged.
pub fn decimate(mesh: &TriMesh, target_triangles: usize) -> Result<DecimationOutcome, MeshError> {
    if target_triangles < 4 {
        return Err(MeshError::DecimationTarget {
            target: target_triangles,
        });
    }
    let input_triangles = mesh.triangle_count();
    if input_triangles <= target_triangles {
        return Ok(DecimationOutcome {
            mesh: mesh.clone(),
            hausdorff: 0.0,
            input_triangles,
            output_triangles: input_triangles,
            grid_resolution: 0,
        });
    }

    // Resolution raises the surviving-triangle count; find the largest grid
    // that stays within budget, then back off upward if the result collapses
    // to an invalid mesh.
    let mut hi = 2u32;
    while cluster_triangles(mesh, hi).len() <= target_triangles {
        hi *= 2;
        if hi >= 4096 {
            break;
        }
    }
    let mut lo = 1u32;
    while lo + 1 < hi {
        let mid = lo + (hi - lo) / 2;
        if cluster_triangles(mesh, mid).len() <= target_triangles {
            lo = mid;
        } else {
            hi = mid;
        }
    }

    let mut resolution = lo;
    let decimated = loop {
        match build_clustered(mesh, resolution) {
            Ok(m) => break m,
            Err(_) => {
                // Everything collapsed; raise the resolution until the mesh
                // survives, even if that overshoots the budget.
                resolution += 1;
                if resolution > 4096 {
                    return Err(MeshError::EmptyMesh);
                }
            }
        }
    };

    let hausdorff = vertex_hausdorff(mesh, &decimated);
    Ok(DecimationOutcome {
        output_triangles: decimated.triangle_count(),
        mesh: decimated,
        hausdorff,
        input_triangles,
        grid_resolution: resolution,
    })
}

fn cell_of(v: DVec3, min: DVec3, cell: DVec3, resolution: u32) -> [u32; 3] {
    let mut out = [0u32; 3];
    for axis in 0..3 {
        let idx = if cell[axis] > 0.0 {
            ((v[axis] - min[axis]) / cell[axis]).floor() as i64
        } else {
            0
        };
        out[axis] = idx.clamp(0, resolution as i64 - 1) as u32;
    }
    out
}

/// Surviving canonical triangles (as cluster-index triples) at a resolution.
fn cluster_triangles(mesh: &TriMesh, resolution: u32) -> Vec<[u64; 3]> {
    let aabb = mesh.aabb();
    let min = aabb.min;
    let cell = aabb.extents() / resolution as f64;
    let key = |v: DVec3| {
        let c = cell_of(v, min, cell, resolution);
        (c[0] as u64) << 42 | (c[1] as u64) << 21 | c[2] as u64
    };
    let mut seen = std::collections::BTreeSet::new();
    let mut out = Vec::new();
    for i in 0..mesh.triangle_count() {
        let [a, b, c] = mesh.triangle_points(i);
        let t = [key(a), key(b), key(c)];
        if t[0] == t[1] || t[1] == t[2] || t[0] == t[2] {
            continue;
        }
        let canon = rotate_min_first_u64(t);
        if seen.insert(canon) {
            out.push(canon);
        }
    }
    out
}

fn rotate_min_first_u64(t: [u64; 3]) -> [u64; 3] {
    if t[0] <= t[1] && t[0] <= t[2] {
        t
    } else if t[1] <= t[2] {
        [t[1], t[2], t[0]]
    } else {
        [t[2], t[0], t[1]]
    }
}

fn build_clustered(mesh: &TriMesh, resolution: u32) -> Result<TriMesh, MeshError> {
    let aabb = mesh.aabb();
    let min = aabb.min;
    let cell = aabb.extents() / resolution as f64;

    // Cluster id -> (sum, count) accumulated in canonical vertex order.
    let mut clusters: std::collections::BTreeMap<[u32; 3], (DVec3, usize)> =
        std::collections::BTreeMap::new();
    let mut vertex_cluster = Vec::with_capacity(mesh.vertex_count());
    for &v in mesh.vertices() {
        let c = cell_of(v, min, cell, resolution);
        let entry = clusters.entry(c).or_insert((DVec3::ZERO, 0));
        entry.0 += v;
        entry.1 += 1;
        vertex_cluster.push(c);
    }
    let mut cluster_index = std::collections::BTreeMap::new();
    let mut vertices = Vec::with_capacity(clusters.len());
    for (cell_id, (sum, count)) in &clusters {
        cluster_index.insert(*cell_id, vertices.len() as u32);
        vertices.push(*sum / *count as f64);
    }

    let mut seen = std::collections::BTreeSet::new();
    let mut triangles = Vec::new();
    for t in mesh.triangles() {
        let mapped = [
            cluster_index[&vertex_cluster[t[0] as usize]],
            cluster_index[&vertex_cluster[t[1] as usize]],
            cluster_index[&vertex_cluster[t[2] as usize]],
        ];
        if mapped[0] == mapped[1] || mapped[1] == mapped[2] || mapped[0] == mapped[2] {
            continue;
        }
        let canon = super::rotate_min_first(mapped);
        if seen.insert(canon) {
            triangles.push(canon);
        }
    }
    TriMesh::new(vertices, triangles)
}

fn vertex_hausdorff(a: &TriMesh, b: &TriMesh) -> f64 {
    let d_ab = a
        .vertices()
        .iter()
        .map(|&v| b.distance_to_surface(v))
        .fold(0.0, f64::max);
    let d_ba = b
        .vertices()
        .iter()
        .map(|&v| a.distance_to_surface(v))
        .fold(0.0, f64::max);
    d_ab.max(d_ba)
}
