//! Procedural test meshes. These ship so fixtures and smoke tests never
//! depend on external mesh assets.

use super::TriMesh;
use glam::DVec3;

/// Axis-aligned box centered at the origin.
pub fn box_mesh(half_extents: DVec3) -> TriMesh {
    let h = half_extents;
    let v = [
        DVec3::new(-h.x, -h.y, -h.z),
        DVec3::new(h.x, -h.y, -h.z),
        DVec3::new(h.x, h.y, -h.z),
        DVec3::new(-h.x, h.y, -h.z),
        DVec3::new(-h.x, -h.y, h.z),
        DVec3::new(h.x, -h.y, h.z),
        DVec3::new(h.x, h.y, h.z),
        DVec3::new(-h.x, h.y, h.z),
    ];
    let t: Vec<[u32; 3]> = vec![
        // -z
        [0, 2, 1],
        [0, 3, 2],
        // +z
        [4, 5, 6],
        [4, 6, 7],
        // -y
        [0, 1, 5],
        [0, 5, 4],
        // +y
        [2, 3, 7],
        [2, 7, 6],
        // -x
        [0, 4, 7],
        [0, 7, 3],
        // +x
        [1, 2, 6],
        [1, 6, 5],
    ];
    TriMesh::new(v.to_vec(), t).expect("box mesh is valid")
}

/// The canonical 1 m cube centered at the origin.
pub fn unit_cube() -> TriMesh {
    box_mesh(DVec3::splat(0.5))
}

/// Icosphere of the given radius; `subdivisions` quadruples the triangle
/// count each step (20 * 4^n triangles).
pub fn icosphere(radius: f64, subdivisions: u32) -> TriMesh {
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    let mut vertices: Vec<DVec3> = vec![
        DVec3::new(-1.0, phi, 0.0),
        DVec3::new(1.0, phi, 0.0),
        DVec3::new(-1.0, -phi, 0.0),
        DVec3::new(1.0, -phi, 0.0),
        DVec3::new(0.0, -1.0, phi),
        DVec3::new(0.0, 1.0, phi),
        DVec3::new(0.0, -1.0, -phi),
        DVec3::new(0.0, 1.0, -phi),
        DVec3::new(phi, 0.0, -1.0),
        DVec3::new(phi, 0.0, 1.0),
        DVec3::new(-phi, 0.0, -1.0),
        DVec3::new(-phi, 0.0, 1.0),
    ]
    .into_iter()
    .map(|v| v.normalize() * radius)
    .collect();
    let mut triangles: Vec<[u32; 3]> = vec![
        [0, 11, 5],
        [0, 5, 1],
        [0, 1, 7],
        [0, 7, 10],
        [0, 10, 11],
        [1, 5, 9],
        [5, 11, 4],
        [11, 10, 2],
        [10, 7, 6],
        [7, 1, 8],
        [3, 9, 4],
        [3, 4, 2],
        [3, 2, 6],
        [3, 6, 8],
        [3, 8, 9],
        [4, 9, 5],
        [2, 4, 11],
        [6, 2, 10],
        [8, 6, 7],
        [9, 8, 1],
    ];

    for _ in 0..subdivisions {
        let mut midpoint: std::collections::BTreeMap<(u32, u32), u32> =
            std::collections::BTreeMap::new();
        let mut next = Vec::with_capacity(triangles.len() * 4);
        for tri in &triangles {
            let mut mids = [0u32; 3];
            for k in 0..3 {
                let (a, b) = (tri[k], tri[(k + 1) % 3]);
                let key = (a.min(b), a.max(b));
                mids[k] = *midpoint.entry(key).or_insert_with(|| {
                    let m = ((vertices[a as usize] + vertices[b as usize]) / 2.0)
                        .normalize()
                        * radius;
                    vertices.push(m);
                    (vertices.len() - 1) as u32
                });
            }
            next.push([tri[0], mids[0], mids[2]]);
            next.push([tri[1], mids[1], mids[0]]);
            next.push([tri[2], mids[2], mids[1]]);
            next.push([mids[0], mids[1], mids[2]]);
        }
        triangles = next;
    }
    TriMesh::new(vertices, triangles).expect("icosphere mesh is valid")
}

/// Closed cylinder along z, centered at the origin.
pub fn cylinder(radius: f64, half_height: f64, segments: u32) -> TriMesh {
    assert!(segments >= 3);
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for ring in [-half_height, half_height] {
        for s in 0..segments {
            let theta = 2.0 * std::f64::consts::PI * s as f64 / segments as f64;
            vertices.push(DVec3::new(radius * theta.cos(), radius * theta.sin(), ring));
        }
    }
    let bottom_center = vertices.len() as u32;
    vertices.push(DVec3::new(0.0, 0.0, -half_height));
    let top_center = vertices.len() as u32;
    vertices.push(DVec3::new(0.0, 0.0, half_height));
    for s in 0..segments {
        let s1 = (s + 1) % segments;
        let (b0, b1) = (s, s1);
        let (t0, t1) = (segments + s, segments + s1);
        // Side (outward winding).
        triangles.push([b0, b1, t1]);
        triangles.push([b0, t1, t0]);
        // Caps.
        triangles.push([bottom_center, b1, b0]);
        triangles.push([top_center, t0, t1]);
    }
    TriMesh::new(vertices, triangles).expect("cylinder mesh is valid")
}

/// Torus around the z axis: `major_radius` to the tube center,
/// `minor_radius` of the tube.
pub fn torus(major_radius: f64, minor_radius: f64, major_segments: u32, minor_segments: u32) -> TriMesh {
    assert!(major_segments >= 3 && minor_segments >= 3);
    let mut vertices = Vec::new();
    for i in 0..major_segments {
        let u = 2.0 * std::f64::consts::PI * i as f64 / major_segments as f64;
        for j in 0..minor_segments {
            let v = 2.0 * std::f64::consts::PI * j as f64 / minor_segments as f64;
            let r = major_radius + minor_radius * v.cos();
            vertices.push(DVec3::new(
                r * u.cos(),
                r * u.sin(),
                minor_radius * v.sin(),
            ));
        }
    }
    let mut triangles = Vec::new();
    for i in 0..major_segments {
        let i1 = (i + 1) % major_segments;
        for j in 0..minor_segments {
            let j1 = (j + 1) % minor_segments;
            let a = i * minor_segments + j;
            let b = i1 * minor_segments + j;
            let c = i1 * minor_segments + j1;
            let d = i * minor_segments + j1;
            triangles.push([a, b, c]);
            triangles.push([a, c, d]);
        }
    }
    TriMesh::new(vertices, triangles).expect("torus mesh is valid")
}

/// Closed wedge (triangular prism): apex edge along y at the top, base in the
/// z = 0 plane. Each slanted face's outward normal makes `half_angle` radians
/// with the x axis, so a grasp closing along x across the apex meets contact
/// normals at exactly `half_angle` from the closing line.
pub fn wedge(half_angle: f64, half_depth: f64, height: f64) -> TriMesh {
    let w = height * half_angle.tan();
    let apex_front = DVec3::new(0.0, -half_depth, height);
    let apex_back = DVec3::new(0.0, half_depth, height);
    let base = [
        DVec3::new(-w, -half_depth, 0.0),
        DVec3::new(w, -half_depth, 0.0),
        DVec3::new(w, half_depth, 0.0),
        DVec3::new(-w, half_depth, 0.0),
    ];
    let vertices = vec![apex_front, apex_back, base[0], base[1], base[2], base[3]];
    let triangles: Vec<[u32; 3]> = vec![
        // +x slanted face (normal (cos, 0, sin) of half_angle).
        [0, 3, 4],
        [0, 4, 1],
        // -x slanted face.
        [0, 1, 5],
        [0, 5, 2],
        // Base (normal -z).
        [2, 5, 4],
        [2, 4, 3],
        // Front (y = -half_depth) and back (y = +half_depth) triangles.
        [0, 2, 3],
        [1, 4, 5],
    ];
    TriMesh::new(vertices, triangles).expect("wedge mesh is valid")
}
