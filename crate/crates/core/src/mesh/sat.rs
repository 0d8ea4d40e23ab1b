//! Separating-axis overlap test between a triangle and a box, both expressed
//! in the box's local frame. Boundary contact counts as intersection.

use glam::DVec3;

/// True iff the triangle (vertices in box-local coordinates) overlaps the
/// origin-centered box with the given half extents. Tests the 13 axes: the 3
/// box axes, the triangle normal, and the 9 edge cross products.
pub(crate) fn tri_box_overlap(half: DVec3, tri: [DVec3; 3]) -> bool {
    let [v0, v1, v2] = tri;
    let e0 = v1 - v0;
    let e1 = v2 - v1;
    let e2 = v0 - v2;

    // Box axes: compare the triangle's extent per component.
    for axis in 0..3 {
        let (lo, hi) = min_max3(v0[axis], v1[axis], v2[axis]);
        if lo > half[axis] || hi < -half[axis] {
            return false;
        }
    }

    // Edge cross products with the box axes.
    for e in [e0, e1, e2] {
        for axis in 0..3 {
            let (u, w) = ((axis + 1) % 3, (axis + 2) % 3);
            // axis_vec × e has components only in u and w.
            let au = -e[w];
            let aw = e[u];
            let p0 = au * v0[u] + aw * v0[w];
            let p1 = au * v1[u] + aw * v1[w];
            let p2 = au * v2[u] + aw * v2[w];
            let (lo, hi) = min_max3(p0, p1, p2);
            let rad = half[u] * au.abs() + half[w] * aw.abs();
            if lo > rad || hi < -rad {
                return false;
            }
        }
    }

    // Triangle plane.
    let normal = e0.cross(e1);
    let rad = half.x * normal.x.abs() + half.y * normal.y.abs() + half.z * normal.z.abs();
    let dist = normal.dot(v0);
    if dist > rad || dist < -rad {
        return false;
    }

    true
}

fn min_max3(a: f64, b: f64, c: f64) -> (f64, f64) {
    (a.min(b).min(c), a.max(b).max(c))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::primitives;
    use glam::DQuat;
    use rand::Rng;

    #[test]
    fn disjoint_and_containing_boxes() {
        let cube = primitives::unit_cube();
        // Far away.
        assert!(!cube
            .intersects_oriented_box(DVec3::new(5.0, 0.0, 0.0), DVec3::splat(0.1), DQuat::IDENTITY)
            .unwrap());
        // Box containing the whole cube.
        assert!(cube
            .intersects_oriented_box(DVec3::ZERO, DVec3::splat(2.0), DQuat::IDENTITY)
            .unwrap());
        // Box strictly inside the cube volume touches no triangle.
        assert!(!cube
            .intersects_oriented_box(DVec3::ZERO, DVec3::splat(0.2), DQuat::IDENTITY)
            .unwrap());
    }

    #[test]
    fn touching_at_zero_distance_counts() {
        let cube = primitives::unit_cube();
        // Box face exactly on the +x cube face plane.
        let touching = cube
            .intersects_oriented_box(DVec3::new(0.6, 0.0, 0.0), DVec3::splat(0.1), DQuat::IDENTITY)
            .unwrap();
        assert!(touching);
        // Separated by 1e-9.
        let apart = cube
            .intersects_oriented_box(
                DVec3::new(0.6 + 1e-9, 0.0, 0.0),
                DVec3::splat(0.1),
                DQuat::IDENTITY,
            )
            .unwrap();
        assert!(!apart);
    }

    #[test]
    fn rejects_non_positive_half_extents() {
        let cube = primitives::unit_cube();
        assert!(cube
            .intersects_oriented_box(DVec3::ZERO, DVec3::new(0.1, 0.0, 0.1), DQuat::IDENTITY)
            .is_err());
    }

    /// Independent oracle: explicit projection-interval overlap over all 13
    /// axes, written directly from the axis list.
    fn sat_oracle(half: DVec3, tri: [DVec3; 3]) -> bool {
        let e = [tri[1] - tri[0], tri[2] - tri[1], tri[0] - tri[2]];
        let box_axes = [DVec3::X, DVec3::Y, DVec3::Z];
        let mut axes: Vec<DVec3> = box_axes.to_vec();
        axes.push(e[0].cross(e[1]));
        for be in box_axes {
            for te in e {
                axes.push(be.cross(te));
            }
        }
        for axis in axes {
            if axis.length_squared() < 1e-24 {
                continue;
            }
            let tp: Vec<f64> = tri.iter().map(|v| v.dot(axis)).collect();
            let (tlo, thi) = (
                tp.iter().cloned().fold(f64::INFINITY, f64::min),
                tp.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            );
            let r = half.x * axis.x.abs() + half.y * axis.y.abs() + half.z * axis.z.abs();
            if tlo > r || thi < -r {
                return false;
            }
        }
        true
    }

    #[test]
    fn matches_oracle_on_random_configurations() {
        let mut rng = crate::rng::rng_from(7);
        for _ in 0..2000 {
            let half = DVec3::new(
                rng.random_range(0.05..0.5),
                rng.random_range(0.05..0.5),
                rng.random_range(0.05..0.5),
            );
            let tri = [
                DVec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ),
                DVec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ),
                DVec3::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                ),
            ];
            assert_eq!(
                tri_box_overlap(half, tri),
                sat_oracle(half, tri),
                "half {half:?} tri {tri:?}"
            );
        }
    }

    #[test]
    fn exact_touch_against_oracle() {
        // Triangle in the x = half.x plane: touching contact on the box axis.
        let half = DVec3::new(0.3, 0.3, 0.3);
        let tri = [
            DVec3::new(0.3, -0.1, -0.1),
            DVec3::new(0.3, 0.2, -0.1),
            DVec3::new(0.3, -0.1, 0.2),
        ];
        assert!(tri_box_overlap(half, tri));
        assert!(sat_oracle(half, tri));
        // Shifted off by one ulp-scale step: both must report separation.
        let tri_off = tri.map(|v| v + DVec3::new(1e-12, 0.0, 0.0));
        assert!(!tri_box_overlap(half, tri_off));
        assert!(!sat_oracle(half, tri_off));
    }
}
