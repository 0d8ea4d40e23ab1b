//! Area-weighted surface sampling.

use super::{MeshError, TriMesh};
use glam::DVec3;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A point on the mesh surface with its outward normal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceSample {
    pub point: DVec3,
    pub normal: DVec3,
    pub triangle_index: usize,
}

impl TriMesh {
    /// Draw `count` surface points: triangles chosen with probability
    /// proportional to area, position uniform within the triangle.
    /// Deterministic for a given seed.
    pub fn sample_surface(&self, rng_seed: u64, count: usize) -> Result<Vec<SurfaceSample>, MeshError> {
        if count < 1 {
            return Err(MeshError::InvalidSampleCount);
        }
        let mut rng = crate::rng::rng_from(rng_seed);
        Ok((0..count).map(|_| self.sample_surface_one(&mut rng)).collect())
    }

    /// Draw a single surface point from an existing stream.
    pub fn sample_surface_one(&self, rng: &mut ChaCha8Rng) -> SurfaceSample {
        let cumulative = self.cumulative_areas();
        let total = *cumulative.last().expect("non-empty mesh");
        let r = rng.random_range(0.0..total);
        let triangle_index = cumulative.partition_point(|&c| c <= r).min(cumulative.len() - 1);
        let [a, b, c] = self.triangle_points(triangle_index);
        // Uniform barycentric point via the square-root trick.
        let r1: f64 = rng.random_range(0.0..1.0);
        let r2: f64 = rng.random_range(0.0..1.0);
        let s = r1.sqrt();
        let point = a * (1.0 - s) + b * (s * (1.0 - r2)) + c * (s * r2);
        SurfaceSample {
            point,
            normal: self.triangle_normal(triangle_index),
            triangle_index,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::primitives;

    #[test]
    fn samples_land_on_their_triangle() {
        let sphere = primitives::icosphere(0.05, 1);
        for s in sphere.sample_surface(3, 500).unwrap() {
            let [a, b, c] = sphere.triangle_points(s.triangle_index);
            let q = super::super::bvh::closest_point_on_triangle(s.point, a, b, c);
            assert!(
                s.point.distance(q) < 1e-9,
                "sample off its triangle by {}",
                s.point.distance(q)
            );
            assert!((s.normal.length() - 1.0).abs() < 1e-9);
        }
    }

    #[test]
    fn cube_face_frequencies_match_area() {
        // Unit cube: each of the 6 faces (2 triangles) carries 1/6 of the
        // area. With n = 60000 the binomial three-sigma band is about
        // sqrt(p(1-p)/n) * 3 = 0.0046, well inside the 0.01 tolerance.
        let cube = primitives::unit_cube();
        let n = 60_000;
        let samples = cube.sample_surface(42, n).unwrap();
        let mut face_counts = [0usize; 6];
        for s in &samples {
            let nrm = s.normal;
            let face = if nrm.x < -0.5 {
                0
            } else if nrm.x > 0.5 {
                1
            } else if nrm.y < -0.5 {
                2
            } else if nrm.y > 0.5 {
                3
            } else if nrm.z < -0.5 {
                4
            } else {
                5
            };
            face_counts[face] += 1;
        }
        for (face, &count) in face_counts.iter().enumerate() {
            let fraction = count as f64 / n as f64;
            assert!(
                (fraction - 1.0 / 6.0).abs() < 0.01,
                "face {face}: fraction {fraction}"
            );
        }
    }

    #[test]
    fn single_triangle_mesh_always_indexes_zero() {
        let tri = TriMesh::new(
            vec![DVec3::ZERO, DVec3::X, DVec3::Y],
            vec![[0, 1, 2]],
        )
        .unwrap();
        assert!(tri
            .sample_surface(9, 64)
            .unwrap()
            .iter()
            .all(|s| s.triangle_index == 0));
    }

    #[test]
    fn sampling_is_deterministic() {
        let cube = primitives::unit_cube();
        let a = cube.sample_surface(7, 1).unwrap();
        let b = cube.sample_surface(7, 1).unwrap();
        assert_eq!(a[0].point, b[0].point);
        assert_eq!(a[0].triangle_index, b[0].triangle_index);
        assert!(matches!(
            cube.sample_surface(7, 0),
            Err(MeshError::InvalidSampleCount)
        ));
    }

    #[test]
    fn chi_square_on_cube_triangles() {
        // 1e5 samples over the 12 equal-area cube triangles. Chi-square with
        // 11 dof: reject only below p = 0.001, i.e. statistic > 31.26.
        let cube = primitives::unit_cube();
        let n = 100_000usize;
        let samples = cube.sample_surface(1234, n).unwrap();
        let mut counts = vec![0usize; cube.triangle_count()];
        for s in &samples {
            counts[s.triangle_index] += 1;
        }
        let expected = n as f64 / cube.triangle_count() as f64;
        let chi2: f64 = counts
            .iter()
            .map(|&c| {
                let d = c as f64 - expected;
                d * d / expected
            })
            .sum();
        assert!(chi2 < 31.26, "chi-square statistic {chi2} too large");
    }
}
