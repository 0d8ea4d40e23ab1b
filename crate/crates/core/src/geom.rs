//! Shared geometric primitives: axis-aligned boxes and frame helpers.

use glam::{DQuat, DVec3};
use serde::{Deserialize, Serialize};

/// Axis-aligned bounding box in meters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: DVec3,
    pub max: DVec3,
}

impl Aabb {
    pub fn new(min: DVec3, max: DVec3) -> Self {
        Self { min, max }
    }

    /// Tight box around a non-empty point set, `None` for an empty one.
    pub fn from_points<I: IntoIterator<Item = DVec3>>(points: I) -> Option<Self> {
        let mut iter = points.into_iter();
        let first = iter.next()?;
        let mut b = Aabb { min: first, max: first };
        for p in iter {
            b.min = b.min.min(p);
            b.max = b.max.max(p);
        }
        Some(b)
    }

    pub fn center(&self) -> DVec3 {
        0.5 * (self.min + self.max)
    }

    pub fn extents(&self) -> DVec3 {
        self.max - self.min
    }

    pub fn half_extents(&self) -> DVec3 {
        0.5 * (self.max - self.min)
    }

    pub fn diagonal(&self) -> f64 {
        self.extents().length()
    }

    /// Closed containment test.
    pub fn contains(&self, p: DVec3) -> bool {
        p.x >= self.min.x
            && p.y >= self.min.y
            && p.z >= self.min.z
            && p.x <= self.max.x
            && p.y <= self.max.y
            && p.z <= self.max.z
    }

    pub fn union(&self, other: &Aabb) -> Aabb {
        Aabb {
            min: self.min.min(other.min),
            max: self.max.max(other.max),
        }
    }

    pub fn grown(&self, p: DVec3) -> Aabb {
        Aabb {
            min: self.min.min(p),
            max: self.max.max(p),
        }
    }

    pub fn inflated(&self, margin: f64) -> Aabb {
        Aabb {
            min: self.min - DVec3::splat(margin),
            max: self.max + DVec3::splat(margin),
        }
    }

    /// Slab test. Returns the parametric entry/exit range of the ray against
    /// the box, clipped to `[0, t_max]`, or `None` when the ray misses.
    pub fn ray_range(&self, origin: DVec3, inv_dir: DVec3, t_max: f64) -> Option<(f64, f64)> {
        let t0 = (self.min - origin) * inv_dir;
        let t1 = (self.max - origin) * inv_dir;
        let lo = t0.min(t1);
        let hi = t0.max(t1);
        let enter = lo.x.max(lo.y).max(lo.z).max(0.0);
        let exit = hi.x.min(hi.y).min(hi.z).min(t_max);
        if enter <= exit {
            Some((enter, exit))
        } else {
            None
        }
    }

    /// Squared distance from a point to the box (zero inside).
    pub fn distance_sq(&self, p: DVec3) -> f64 {
        let d = (self.min - p).max(DVec3::ZERO).max(p - self.max);
        d.length_squared()
    }
}

/// Canonicalize a quaternion: unit norm with non-negative scalar part. When
/// the scalar part is zero the first non-zero vector component is made
/// positive, so `q` and `-q` always map to the same representative.
/// Quaternions already unit to within 1e-12 are left bit-identical, which
/// keeps re-canonicalization stable.
pub fn canonical_quat(q: DQuat) -> DQuat {
    let q = if (q.length_squared() - 1.0).abs() <= 1e-12 {
        q
    } else {
        q.normalize()
    };
    let flip = if q.w != 0.0 {
        q.w < 0.0
    } else if q.x != 0.0 {
        q.x < 0.0
    } else if q.y != 0.0 {
        q.y < 0.0
    } else {
        q.z < 0.0
    };
    if flip {
        DQuat::from_xyzw(-q.x, -q.y, -q.z, -q.w)
    } else {
        q
    }
}

/// Deterministic orthonormal basis completion: returns two unit vectors that
/// form a right-handed frame with the given unit `n`.
pub fn orthonormal_basis(n: DVec3) -> (DVec3, DVec3) {
    let helper = if n.x.abs() < 0.9 { DVec3::X } else { DVec3::Y };
    let u = n.cross(helper).normalize();
    let v = n.cross(u);
    (u, v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn aabb_from_points_and_queries() {
        let b = Aabb::from_points([
            DVec3::new(-1.0, 0.0, 2.0),
            DVec3::new(3.0, -2.0, 0.0),
        ])
        .unwrap();
        assert_eq!(b.min, DVec3::new(-1.0, -2.0, 0.0));
        assert_eq!(b.max, DVec3::new(3.0, 0.0, 2.0));
        assert!(b.contains(b.center()));
        assert!(b.contains(b.min));
        assert!(!b.contains(DVec3::new(3.1, 0.0, 0.0)));
        assert_eq!(Aabb::from_points([]), None);
    }

    #[test]
    fn aabb_ray_range_hits_and_misses() {
        let b = Aabb::new(DVec3::splat(-0.5), DVec3::splat(0.5));
        let dir = DVec3::X;
        let inv = dir.recip();
        let (enter, exit) = b.ray_range(DVec3::new(-2.0, 0.0, 0.0), inv, 10.0).unwrap();
        assert_relative_eq!(enter, 1.5);
        assert_relative_eq!(exit, 2.5);
        assert!(b.ray_range(DVec3::new(-2.0, 0.0, 0.0), inv, 1.0).is_none());
        assert!(b.ray_range(DVec3::new(-2.0, 1.0, 0.0), inv, 10.0).is_none());
    }

    #[test]
    fn aabb_distance_sq() {
        let b = Aabb::new(DVec3::splat(-1.0), DVec3::splat(1.0));
        assert_eq!(b.distance_sq(DVec3::ZERO), 0.0);
        assert_relative_eq!(b.distance_sq(DVec3::new(2.0, 0.0, 0.0)), 1.0);
        assert_relative_eq!(b.distance_sq(DVec3::new(2.0, 2.0, 0.0)), 2.0);
    }

    #[test]
    fn canonical_quat_fixes_sign() {
        let q = DQuat::from_axis_angle(DVec3::Y, 1.0);
        let c1 = canonical_quat(q);
        let c2 = canonical_quat(DQuat::from_xyzw(-q.x, -q.y, -q.z, -q.w));
        assert_eq!(c1, c2);
        assert!(c1.w >= 0.0);
        // 180-degree rotation has w == 0; canonical form still unique.
        let h = DQuat::from_axis_angle(DVec3::X, std::f64::consts::PI);
        assert_eq!(canonical_quat(h), canonical_quat(DQuat::from_xyzw(-h.x, -h.y, -h.z, -h.w)));
    }

    #[test]
    fn basis_is_orthonormal() {
        for n in [DVec3::X, DVec3::Y, DVec3::Z, DVec3::new(0.3, -0.5, 0.8).normalize()] {
            let (u, v) = orthonormal_basis(n);
            assert_relative_eq!(u.length(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(v.length(), 1.0, epsilon = 1e-12);
            assert_relative_eq!(u.dot(n), 0.0, epsilon = 1e-12);
            assert_relative_eq!(v.dot(n), 0.0, epsilon = 1e-12);
            assert_relative_eq!(u.cross(v).dot(n), 1.0, epsilon = 1e-12);
        }
    }
}
