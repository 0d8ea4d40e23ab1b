//! Analytic grasp oracles for test use: closed-form primitives (sphere, box,
//! wedge) plus an independent re-statement of the evaluation pipeline. None
//! of this touches the mesh, BVH, or production intersection code.

#![allow(dead_code)]

use glam::{DMat3, DQuat, DVec3};
use qdg_core::grasp::{FailureReason, GraspGenome, GripperSpec};

/// Closed-form geometry queries an analytic shape must answer.
pub trait AnalyticShape {
    /// Nearest entry of the ray into the shape within `max_dist`, with the
    /// outward surface normal at the hit.
    fn ray(&self, origin: DVec3, dir: DVec3, max_dist: f64) -> Option<(f64, DVec3)>;
    /// Whether an oriented box touches or overlaps the shape.
    fn obb_overlap(&self, center: DVec3, half: DVec3, rot: DQuat) -> bool;
}

pub struct Sphere {
    pub radius: f64,
}

impl AnalyticShape for Sphere {
    fn ray(&self, origin: DVec3, dir: DVec3, max_dist: f64) -> Option<(f64, DVec3)> {
        let b = origin.dot(dir);
        let c = origin.length_squared() - self.radius * self.radius;
        let disc = b * b - c;
        if disc < 0.0 {
            return None;
        }
        let sqrt = disc.sqrt();
        let t = if -b - sqrt >= 0.0 {
            -b - sqrt
        } else if -b + sqrt >= 0.0 {
            -b + sqrt
        } else {
            return None;
        };
        if t > max_dist {
            return None;
        }
        let p = origin + dir * t;
        Some((t, p.normalize()))
    }

    fn obb_overlap(&self, center: DVec3, half: DVec3, rot: DQuat) -> bool {
        // Clamp the sphere center into the box in its local frame.
        let local = rot.conjugate().mul_vec3(-center);
        let clamped = local.clamp(-half, half);
        (local - clamped).length() <= self.radius
    }
}

pub struct BoxShape {
    pub half: DVec3,
}

impl AnalyticShape for BoxShape {
    fn ray(&self, origin: DVec3, dir: DVec3, max_dist: f64) -> Option<(f64, DVec3)> {
        let mut t_enter = f64::NEG_INFINITY;
        let mut t_exit = f64::INFINITY;
        let mut normal = DVec3::ZERO;
        for axis in 0..3 {
            if dir[axis].abs() < 1e-15 {
                if origin[axis].abs() > self.half[axis] {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / dir[axis];
            let mut t0 = (-self.half[axis] - origin[axis]) * inv;
            let mut t1 = (self.half[axis] - origin[axis]) * inv;
            let mut n = DVec3::ZERO;
            n[axis] = -dir[axis].signum();
            if t0 > t1 {
                std::mem::swap(&mut t0, &mut t1);
            }
            if t0 > t_enter {
                t_enter = t0;
                normal = n;
            }
            t_exit = t_exit.min(t1);
        }
        if t_enter > t_exit || t_exit < 0.0 {
            return None;
        }
        if t_enter < 0.0 || t_enter > max_dist {
            return None;
        }
        Some((t_enter, normal))
    }

    fn obb_overlap(&self, center: DVec3, half: DVec3, rot: DQuat) -> bool {
        // 15-axis OBB/AABB separating-axis test, closed boundaries.
        let r = DMat3::from_quat(rot);
        let axes_b = [r.x_axis, r.y_axis, r.z_axis];
        let mut axes: Vec<DVec3> = vec![DVec3::X, DVec3::Y, DVec3::Z];
        axes.extend(axes_b);
        for a in [DVec3::X, DVec3::Y, DVec3::Z] {
            for b in axes_b {
                axes.push(a.cross(b));
            }
        }
        for axis in axes {
            if axis.length_squared() < 1e-24 {
                continue;
            }
            let ra = self.half.x * axis.x.abs()
                + self.half.y * axis.y.abs()
                + self.half.z * axis.z.abs();
            let rb = half.x * axes_b[0].dot(axis).abs()
                + half.y * axes_b[1].dot(axis).abs()
                + half.z * axes_b[2].dot(axis).abs();
            if center.dot(axis).abs() > ra + rb {
                return false;
            }
        }
        true
    }
}

/// Convex polytope with explicit faces, vertices, and edge directions; used
/// for the wedge.
pub struct Polytope {
    /// (outward unit normal, offset) with the face plane n.x = offset.
    pub faces: Vec<(DVec3, f64)>,
    pub vertices: Vec<DVec3>,
    pub edge_dirs: Vec<DVec3>,
}

impl Polytope {
    /// The closed wedge produced by `primitives::wedge`: apex edge along y at
    /// z = height, base in the z = 0 plane, slant normals at `half_angle`
    /// from the x axis.
    pub fn wedge(half_angle: f64, half_depth: f64, height: f64) -> Polytope {
        let w = height * half_angle.tan();
        let slant_plus = DVec3::new(half_angle.cos(), 0.0, half_angle.sin());
        let slant_minus = DVec3::new(-half_angle.cos(), 0.0, half_angle.sin());
        let apex = DVec3::new(0.0, 0.0, height);
        let faces = vec![
            (slant_plus, slant_plus.dot(apex)),
            (slant_minus, slant_minus.dot(apex)),
            (DVec3::NEG_Z, 0.0),
            (DVec3::Y, half_depth),
            (DVec3::NEG_Y, half_depth),
        ];
        let vertices = vec![
            DVec3::new(0.0, -half_depth, height),
            DVec3::new(0.0, half_depth, height),
            DVec3::new(-w, -half_depth, 0.0),
            DVec3::new(w, -half_depth, 0.0),
            DVec3::new(w, half_depth, 0.0),
            DVec3::new(-w, half_depth, 0.0),
        ];
        let edge_dirs = vec![
            DVec3::Y,
            DVec3::X,
            DVec3::new(w, 0.0, -height).normalize(),
            DVec3::new(-w, 0.0, -height).normalize(),
        ];
        Polytope {
            faces,
            vertices,
            edge_dirs,
        }
    }
}

impl AnalyticShape for Polytope {
    fn ray(&self, origin: DVec3, dir: DVec3, max_dist: f64) -> Option<(f64, DVec3)> {
        // Clip the ray against every face half-space.
        let mut t_enter = f64::NEG_INFINITY;
        let mut t_exit = f64::INFINITY;
        let mut normal = DVec3::ZERO;
        for &(n, offset) in &self.faces {
            let denom = n.dot(dir);
            let dist = offset - n.dot(origin);
            if denom.abs() < 1e-15 {
                if dist < 0.0 {
                    return None; // parallel and outside this half-space
                }
                continue;
            }
            let t = dist / denom;
            if denom < 0.0 {
                // Entering through this face.
                if t > t_enter {
                    t_enter = t;
                    normal = n;
                }
            } else {
                t_exit = t_exit.min(t);
            }
        }
        if t_enter > t_exit || t_exit < 0.0 || t_enter < 0.0 || t_enter > max_dist {
            return None;
        }
        Some((t_enter, normal))
    }

    fn obb_overlap(&self, center: DVec3, half: DVec3, rot: DQuat) -> bool {
        let r = DMat3::from_quat(rot);
        let box_axes = [r.x_axis, r.y_axis, r.z_axis];
        let mut axes: Vec<DVec3> = self.faces.iter().map(|&(n, _)| n).collect();
        axes.extend(box_axes);
        for e in &self.edge_dirs {
            for b in box_axes {
                axes.push(e.cross(b));
            }
        }
        for axis in axes {
            if axis.length_squared() < 1e-24 {
                continue;
            }
            let proj: Vec<f64> = self.vertices.iter().map(|v| v.dot(axis)).collect();
            let lo = proj.iter().cloned().fold(f64::INFINITY, f64::min);
            let hi = proj.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let rb = half.x * box_axes[0].dot(axis).abs()
                + half.y * box_axes[1].dot(axis).abs()
                + half.z * box_axes[2].dot(axis).abs();
            let c = center.dot(axis);
            if lo > c + rb || hi < c - rb {
                return false;
            }
        }
        true
    }
}

/// Independent restatement of the evaluation pipeline on an analytic shape:
/// collide wide open, close each finger over its ray fan, then apply the
/// friction-cone test to the contact normals.
pub fn analytic_evaluate(
    shape: &dyn AnalyticShape,
    gripper: &GripperSpec,
    genome: &GraspGenome,
    mu: f64,
) -> (bool, FailureReason) {
    let rot = genome.orientation();
    let p = genome.position();
    let closing = rot.mul_vec3(DVec3::X);
    let w = gripper.max_opening;
    let pad = gripper.finger_pad;
    let tcp = gripper.tcp_offset;

    let palm_center = p + rot.mul_vec3(DVec3::new(
        0.0,
        0.0,
        tcp - gripper.finger_length - gripper.palm_box.z,
    ));
    if shape.obb_overlap(palm_center, gripper.palm_box, rot) {
        return (false, FailureReason::BodyCollision);
    }
    for side in [1.0, -1.0] {
        let center = p + rot.mul_vec3(DVec3::new(side * (w / 2.0 + pad.x), 0.0, tcp));
        if shape.obb_overlap(center, pad, rot) {
            return (false, FailureReason::BodyCollision);
        }
    }

    let mut offsets = vec![(0.0, 0.0)];
    let ring = gripper.contact_rays.max(1) as usize - 1;
    for k in 0..ring {
        let theta = 2.0 * std::f64::consts::PI * k as f64 / ring as f64;
        offsets.push((0.7 * pad.y * theta.cos(), 0.7 * pad.z * theta.sin()));
    }

    let mut normals = [DVec3::ZERO; 2];
    for (slot, side) in [1.0f64, -1.0].iter().enumerate() {
        let dir = -side * closing;
        let mut nearest: Option<(f64, DVec3)> = None;
        for &(oy, oz) in &offsets {
            let origin = p + rot.mul_vec3(DVec3::new(side * w / 2.0, oy, tcp + oz));
            if let Some((t, n)) = shape.ray(origin, dir, w / 2.0) {
                if nearest.map_or(true, |(bt, _)| t < bt) {
                    nearest = Some((t, n));
                }
            }
        }
        match nearest {
            None => return (false, FailureReason::MissedContact),
            Some((_, n)) => normals[slot] = n,
        }
    }

    let cos_cone = 1.0 / (1.0 + mu * mu).sqrt();
    if normals[0].dot(closing) < cos_cone || normals[1].dot(-closing) < cos_cone {
        return (false, FailureReason::FrictionConeViolation);
    }
    (true, FailureReason::None)
}

/// Uniform random orientation from four normal draws.
pub fn random_orientation(rng: &mut impl rand::Rng) -> DQuat {
    use rand_distr::{Distribution, StandardNormal};
    loop {
        let q = DQuat::from_xyzw(
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
            StandardNormal.sample(rng),
        );
        if q.length() > 1e-6 {
            return q.normalize();
        }
    }
}
