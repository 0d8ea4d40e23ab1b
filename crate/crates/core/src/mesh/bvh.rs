//! Bounding-volume hierarchy over the mesh triangles. Built once per mesh;
//! serves ray casts, oriented-box overlap queries, and closest-point queries.

use super::sat;
use super::{RayHit, TriMesh};
use crate::geom::Aabb;
use glam::{DMat3, DQuat, DVec3};
use std::cmp::Reverse;
use std::collections::BinaryHeap;

const LEAF_SIZE: usize = 4;
const PARALLEL_EPS: f64 = 1e-12;

#[derive(Debug, Clone)]
struct Node {
    aabb: Aabb,
    /// Leaf: range `start..start + count` into `order`. Inner: `count == 0`,
    /// the left child is the next node in preorder, and `start` holds the
    /// right child's index.
    start: u32,
    count: u32,
}

#[derive(Debug, Clone)]
pub(crate) struct Bvh {
    nodes: Vec<Node>,
    order: Vec<u32>,
}

struct BuildRef {
    aabb: Aabb,
    centroid: DVec3,
    index: u32,
}

impl Bvh {
    pub fn build(vertices: &[DVec3], triangles: &[[u32; 3]]) -> Bvh {
        let mut refs: Vec<BuildRef> = triangles
            .iter()
            .enumerate()
            .map(|(i, t)| {
                let a = vertices[t[0] as usize];
                let b = vertices[t[1] as usize];
                let c = vertices[t[2] as usize];
                let aabb = Aabb::from_points([a, b, c]).expect("triangle");
                BuildRef {
                    aabb,
                    centroid: (a + b + c) / 3.0,
                    index: i as u32,
                }
            })
            .collect();
        let mut bvh = Bvh {
            nodes: Vec::with_capacity(2 * triangles.len()),
            order: Vec::with_capacity(triangles.len()),
        };
        let n = refs.len();
        bvh.build_range(&mut refs, 0, n);
        bvh
    }

    fn build_range(&mut self, refs: &mut [BuildRef], lo: usize, hi: usize) -> u32 {
        let aabb = refs[lo..hi]
            .iter()
            .map(|r| r.aabb)
            .reduce(|a, b| a.union(&b))
            .expect("non-empty range");
        let node_index = self.nodes.len() as u32;
        self.nodes.push(Node { aabb, start: 0, count: 0 });

        if hi - lo <= LEAF_SIZE {
            let start = self.order.len() as u32;
            for r in &refs[lo..hi] {
                self.order.push(r.index);
            }
            self.nodes[node_index as usize].start = start;
            self.nodes[node_index as usize].count = (hi - lo) as u32;
            return node_index;
        }

        let centroid_bounds = Aabb::from_points(refs[lo..hi].iter().map(|r| r.centroid))
            .expect("non-empty range");
        let ext = centroid_bounds.extents();
        let axis = if ext.x >= ext.y && ext.x >= ext.z {
            0
        } else if ext.y >= ext.z {
            1
        } else {
            2
        };
        refs[lo..hi].sort_unstable_by(|a, b| {
            a.centroid[axis]
                .total_cmp(&b.centroid[axis])
                .then(a.index.cmp(&b.index))
        });
        let mid = lo + (hi - lo) / 2;
        self.build_range(refs, lo, mid);
        let right = self.build_range(refs, mid, hi);
        self.nodes[node_index as usize].start = right;
        node_index
    }

    pub fn raycast(
        &self,
        mesh: &TriMesh,
        origin: DVec3,
        direction: DVec3,
        max_dist: f64,
    ) -> Option<RayHit> {
        let inv_dir = DVec3::new(1.0 / direction.x, 1.0 / direction.y, 1.0 / direction.z);
        let mut best: Option<(f64, usize)> = None;
        let mut stack = vec![0u32];
        while let Some(node_index) = stack.pop() {
            let node = &self.nodes[node_index as usize];
            let limit = best.map_or(max_dist, |(t, _)| t);
            if node.aabb.ray_range(origin, inv_dir, limit).is_none() {
                continue;
            }
            if node.count > 0 {
                for &tri in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    let [a, b, c] = mesh.triangle_points(tri as usize);
                    if let Some(t) = ray_triangle(origin, direction, a, b, c) {
                        if t <= max_dist {
                            let better = match best {
                                None => true,
                                Some((bt, bi)) => t < bt || (t == bt && (tri as usize) < bi),
                            };
                            if better {
                                best = Some((t, tri as usize));
                            }
                        }
                    }
                }
            } else {
                stack.push(node_index + 1);
                stack.push(node.start);
            }
        }
        best.map(|(t, tri)| RayHit {
            distance: t,
            point: origin + direction * t,
            normal: mesh.triangle_normal(tri),
            triangle_index: tri,
        })
    }

    pub fn intersects_box(
        &self,
        mesh: &TriMesh,
        center: DVec3,
        half_extents: DVec3,
        orientation: DQuat,
    ) -> bool {
        // Conservative world-space bounds of the oriented box for pruning.
        let rot = DMat3::from_quat(orientation);
        let world_half = rot.x_axis.abs() * half_extents.x
            + rot.y_axis.abs() * half_extents.y
            + rot.z_axis.abs() * half_extents.z;
        let world_box = Aabb::new(center - world_half, center + world_half);
        let inv = orientation.conjugate();

        let mut stack = vec![0u32];
        while let Some(node_index) = stack.pop() {
            let node = &self.nodes[node_index as usize];
            if !aabb_overlap(&node.aabb, &world_box) {
                continue;
            }
            if node.count > 0 {
                for &tri in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    let pts = mesh.triangle_points(tri as usize);
                    let local = pts.map(|p| inv.mul_vec3(p - center));
                    if sat::tri_box_overlap(half_extents, local) {
                        return true;
                    }
                }
            } else {
                stack.push(node_index + 1);
                stack.push(node.start);
            }
        }
        false
    }

    /// Best-first closest-point query: returns the closest surface point and
    /// its distance.
    pub fn closest_point(&self, mesh: &TriMesh, p: DVec3) -> (DVec3, f64) {
        let mut heap: BinaryHeap<(Reverse<OrderedF64>, u32)> = BinaryHeap::new();
        heap.push((Reverse(OrderedF64(self.nodes[0].aabb.distance_sq(p))), 0));
        let mut best_sq = f64::INFINITY;
        let mut best_point = DVec3::ZERO;
        while let Some((Reverse(OrderedF64(lower)), node_index)) = heap.pop() {
            if lower >= best_sq {
                break;
            }
            let node = &self.nodes[node_index as usize];
            if node.count > 0 {
                for &tri in &self.order[node.start as usize..(node.start + node.count) as usize] {
                    let [a, b, c] = mesh.triangle_points(tri as usize);
                    let q = closest_point_on_triangle(p, a, b, c);
                    let d = p.distance_squared(q);
                    if d < best_sq {
                        best_sq = d;
                        best_point = q;
                    }
                }
            } else {
                for child in [node_index + 1, node.start] {
                    let d = self.nodes[child as usize].aabb.distance_sq(p);
                    if d < best_sq {
                        heap.push((Reverse(OrderedF64(d)), child));
                    }
                }
            }
        }
        (best_point, best_sq.sqrt())
    }
}

#[derive(PartialEq)]
struct OrderedF64(f64);

impl Eq for OrderedF64 {}

impl PartialOrd for OrderedF64 {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for OrderedF64 {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

fn aabb_overlap(a: &Aabb, b: &Aabb) -> bool {
    a.min.x <= b.max.x
        && a.max.x >= b.min.x
        && a.min.y <= b.max.y
        && a.max.y >= b.min.y
        && a.min.z <= b.max.z
        && a.max.z >= b.min.z
}

/// Möller–Trumbore with closed edge boundaries. Rays parallel to (including
/// lying in) the triangle plane miss.
fn ray_triangle(origin: DVec3, dir: DVec3, a: DVec3, b: DVec3, c: DVec3) -> Option<f64> {
    let e1 = b - a;
    let e2 = c - a;
    let pvec = dir.cross(e2);
    let det = e1.dot(pvec);
    if det.abs() < PARALLEL_EPS {
        return None;
    }
    let inv_det = 1.0 / det;
    let s = origin - a;
    let u = s.dot(pvec) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let qvec = s.cross(e1);
    let v = dir.dot(qvec) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(qvec) * inv_det;
    if t < 0.0 {
        return None;
    }
    Some(t)
}

/// Closest point on a triangle to `p` (Voronoi-region walk).
pub(crate) fn closest_point_on_triangle(p: DVec3, a: DVec3, b: DVec3, c: DVec3) -> DVec3 {
    let ab = b - a;
    let ac = c - a;
    let ap = p - a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= 0.0 && d2 <= 0.0 {
        return a;
    }
    let bp = p - b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= 0.0 && d4 <= d3 {
        return b;
    }
    let vc = d1 * d4 - d3 * d2;
    if vc <= 0.0 && d1 >= 0.0 && d3 <= 0.0 {
        let v = d1 / (d1 - d3);
        return a + ab * v;
    }
    let cp = p - c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= 0.0 && d5 <= d6 {
        return c;
    }
    let vb = d5 * d2 - d1 * d6;
    if vb <= 0.0 && d2 >= 0.0 && d6 <= 0.0 {
        let w = d2 / (d2 - d6);
        return a + ac * w;
    }
    let va = d3 * d6 - d5 * d4;
    if va <= 0.0 && (d4 - d3) >= 0.0 && (d5 - d6) >= 0.0 {
        let w = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return b + (c - b) * w;
    }
    let denom = 1.0 / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    a + ab * v + ac * w
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::primitives;
    use approx::assert_relative_eq;
    use rand::Rng;

    #[test]
    fn raycast_hits_cube_face() {
        let cube = primitives::unit_cube();
        let hit = cube
            .raycast(DVec3::new(-2.0, 0.0, 0.0), DVec3::X, 10.0)
            .unwrap()
            .expect("hit");
        assert_relative_eq!(hit.distance, 1.5, epsilon = 1e-12);
        assert_relative_eq!(hit.normal.x, -1.0, epsilon = 1e-12);
        assert_relative_eq!(hit.point.x, -0.5, epsilon = 1e-12);
    }

    #[test]
    fn raycast_respects_max_dist() {
        let cube = primitives::unit_cube();
        let miss = cube.raycast(DVec3::new(-2.0, 0.0, 0.0), DVec3::X, 1.0).unwrap();
        assert!(miss.is_none());
    }

    #[test]
    fn raycast_rejects_non_unit_direction() {
        let cube = primitives::unit_cube();
        let err = cube.raycast(DVec3::ZERO, DVec3::new(0.0, 0.0, 2.0), 1.0).unwrap_err();
        assert!(matches!(err, super::super::MeshError::NonUnitDirection { .. }));
    }

    #[test]
    fn in_plane_ray_misses() {
        // Convention check on an isolated face: a ray lying exactly in the
        // triangle's plane never registers, whatever its in-plane direction.
        // Oracle: the plane equation itself — dir ⊥ normal and origin on the
        // plane leave no transversal crossing to report.
        let tri = TriMesh::new(
            vec![
                DVec3::new(-0.5, -0.5, 0.25),
                DVec3::new(0.5, -0.5, 0.25),
                DVec3::new(0.0, 0.5, 0.25),
            ],
            vec![[0, 1, 2]],
        )
        .unwrap();
        for k in 0..72 {
            let theta = 2.0 * std::f64::consts::PI * k as f64 / 72.0;
            let dir = DVec3::new(theta.cos(), theta.sin(), 0.0).normalize();
            let origin = DVec3::new(-2.0 * dir.x, -2.0 * dir.y, 0.25);
            let n = tri.triangle_normal(0);
            assert_eq!(dir.dot(n), 0.0, "construction: in-plane direction");
            let hit = tri.raycast(origin, dir, 10.0).unwrap();
            assert!(hit.is_none(), "in-plane ray should miss, got {hit:?}");
        }
    }

    #[test]
    fn grazing_ray_touches_perpendicular_edge_only() {
        // A ray running along the +x face plane of the cube never reports the
        // coplanar face, but it does touch the boundary edge of the
        // perpendicular -y face (closed edge convention).
        let cube = primitives::unit_cube();
        let hit = cube
            .raycast(DVec3::new(0.5, -2.0, 0.0), DVec3::Y, 10.0)
            .unwrap()
            .expect("edge touch");
        assert_relative_eq!(hit.distance, 1.5, epsilon = 1e-12);
        assert_relative_eq!(hit.normal.y, -1.0, epsilon = 1e-12);
    }

    #[test]
    fn bvh_raycast_matches_brute_force() {
        // Oracle: loop over all triangles with an independent intersection
        // routine (plane + barycentric instead of Möller–Trumbore).
        fn brute(mesh: &TriMesh, origin: DVec3, dir: DVec3, max: f64) -> Option<(f64, usize)> {
            let mut best: Option<(f64, usize)> = None;
            for i in 0..mesh.triangle_count() {
                let [a, b, c] = mesh.triangle_points(i);
                let n = (b - a).cross(c - a);
                let denom = n.dot(dir);
                if denom.abs() < 1e-12 {
                    continue;
                }
                let t = n.dot(a - origin) / denom;
                if t < 0.0 || t > max {
                    continue;
                }
                let p = origin + dir * t;
                // Barycentric containment.
                let v0 = b - a;
                let v1 = c - a;
                let v2 = p - a;
                let d00 = v0.dot(v0);
                let d01 = v0.dot(v1);
                let d11 = v1.dot(v1);
                let d20 = v2.dot(v0);
                let d21 = v2.dot(v1);
                let inv = 1.0 / (d00 * d11 - d01 * d01);
                let bv = (d11 * d20 - d01 * d21) * inv;
                let bw = (d00 * d21 - d01 * d20) * inv;
                if bv < -1e-12 || bw < -1e-12 || bv + bw > 1.0 + 1e-12 {
                    continue;
                }
                let better = match best {
                    None => true,
                    Some((bt, bi)) => t < bt - 1e-12 || ((t - bt).abs() <= 1e-12 && i < bi),
                };
                if better {
                    best = Some((t, i));
                }
            }
            best
        }

        let sphere = primitives::icosphere(0.05, 2);
        let mut rng = crate::rng::rng_from(99);
        for _ in 0..500 {
            let origin = DVec3::new(
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
            );
            let dir = DVec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .normalize();
            let got = sphere.raycast(origin, dir, 1.0).unwrap();
            let want = brute(&sphere, origin, dir, 1.0);
            match (got, want) {
                (None, None) => {}
                (Some(h), Some((t, _))) => assert_relative_eq!(h.distance, t, epsilon = 1e-9),
                (g, w) => panic!("bvh {g:?} vs brute {w:?}"),
            }
        }
    }

    #[test]
    fn closest_point_matches_brute_force() {
        let torus = primitives::torus(0.05, 0.02, 24, 12);
        let mut rng = crate::rng::rng_from(5);
        for _ in 0..200 {
            let p = DVec3::new(
                rng.random_range(-0.12..0.12),
                rng.random_range(-0.12..0.12),
                rng.random_range(-0.12..0.12),
            );
            let got = torus.distance_to_surface(p);
            let want = (0..torus.triangle_count())
                .map(|i| {
                    let [a, b, c] = torus.triangle_points(i);
                    p.distance(closest_point_on_triangle(p, a, b, c))
                })
                .fold(f64::INFINITY, f64::min);
            assert_relative_eq!(got, want, epsilon = 1e-9);
        }
    }

    #[test]
    fn raycast_rigid_invariance() {
        let sphere = primitives::icosphere(0.04, 3);
        let rot = DQuat::from_axis_angle(DVec3::new(0.2, 1.0, -0.3).normalize(), 1.1);
        let shift = DVec3::new(0.3, -0.2, 0.15);
        let moved = sphere.transformed(rot, shift);
        let mut rng = crate::rng::rng_from(12);
        for _ in 0..200 {
            let origin = DVec3::new(
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
                rng.random_range(-0.2..0.2),
            );
            let dir = DVec3::new(
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
                rng.random_range(-1.0..1.0),
            )
            .normalize();
            let base = sphere.raycast(origin, dir, 1.0).unwrap();
            let txd = moved
                .raycast(rot.mul_vec3(origin) + shift, rot.mul_vec3(dir).normalize(), 1.0)
                .unwrap();
            match (base, txd) {
                (None, None) => {}
                (Some(a), Some(b)) => assert_relative_eq!(a.distance, b.distance, epsilon = 1e-9),
                (a, b) => panic!("rigid invariance broken: {a:?} vs {b:?}"),
            }
        }
    }
}
