use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::scene::{wall_axes, Primitive, Scene};

/// Euclidean distance from `p` to the primitive's closed point set.
/// Zero when `p` is inside a solid.
pub fn primitive_distance(prim: &Primitive, p: &Vector3<f64>) -> f64 {
    match prim {
        Primitive::Box { min, max } => {
            let q = Vector3::new(
                p.x.clamp(min[0], max[0]),
                p.y.clamp(min[1], max[1]),
                p.z.clamp(min[2], max[2]),
            );
            (p - q).norm()
        }
        Primitive::Sphere { center, radius } => ((p - Vector3::from(*center)).norm() - radius).max(0.0),
        Primitive::Wall {
            point,
            normal,
            half_extents,
        } => {
            let n = Vector3::from(*normal).normalize();
            let (u, v) = wall_axes(&n);
            let c = Vector3::from(*point);
            let d = p - c;
            let a = d.dot(&u).clamp(-half_extents[0], half_extents[0]);
            let b = d.dot(&v).clamp(-half_extents[1], half_extents[1]);
            (p - (c + a * u + b * v)).norm()
        }
    }
}

/// Distance from the robot sphere surface to the nearest obstacle;
/// `f64::MAX` in an empty scene, negative when overlapping.
pub fn clearance(scene: &Scene, p: &Vector3<f64>, rho: f64) -> f64 {
    scene
        .primitives()
        .iter()
        .map(|prim| primitive_distance(prim, p) - rho)
        .fold(f64::MAX, f64::min)
}

/// True iff the closed sphere of radius `rho` at `p` touches any primitive.
pub fn brute_force_collision(scene: &Scene, p: &Vector3<f64>, rho: f64) -> bool {
    scene
        .primitives()
        .iter()
        .any(|prim| primitive_distance(prim, p) <= rho)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    /// One flag per executed sample, set when the sample or the segment
    /// arriving at it intersects an obstacle.
    pub flags: Vec<bool>,
    pub min_clearance: f64,
    pub violations: usize,
}

/// Sub-steps per executed segment when sweeping the sphere.
pub const SWEEP_SUBSTEPS: usize = 10;

/// Sweeps the robot sphere along the executed positions, linearly
/// interpolated between samples.
pub fn verify_mission(positions: &[Vector3<f64>], scene: &Scene, rho: f64) -> OracleReport {
    let mut flags = Vec::with_capacity(positions.len());
    let mut min_clearance = f64::MAX;
    for (i, p) in positions.iter().enumerate() {
        let mut hit = false;
        let mut visit = |q: &Vector3<f64>| {
            let c = clearance(scene, q, rho);
            min_clearance = min_clearance.min(c);
            hit |= c <= 0.0;
        };
        if i > 0 {
            let prev = positions[i - 1];
            for k in 1..SWEEP_SUBSTEPS {
                let s = k as f64 / SWEEP_SUBSTEPS as f64;
                visit(&(prev + (p - prev) * s));
            }
        }
        visit(p);
        flags.push(hit);
    }
    let violations = flags.iter().filter(|f| **f).count();
    OracleReport {
        flags,
        min_clearance,
        violations,
    }
}
