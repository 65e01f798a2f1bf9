//! Seeded soundness trials and escape fixtures.

use depthnav::collision::{CollisionChecker, CollisionVerdict};
use depthnav::frames::{CameraIntrinsics, CameraPose, Configuration};
use depthnav::harness::brute_force_collision;
use depthnav::scene::{render_robot_footprint, render_scene_depth, Primitive, RobotModel, Scene};
use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{big_bounds, random_frustum_point, random_primitive, wall_with_window};

pub struct SoundnessTally {
    pub pairs: usize,
    pub free: usize,
    pub violations: usize,
    /// Largest ratio of oracle penetration depth to the pixel pitch at the
    /// robot's depth, over all violations.
    pub worst_penetration_px: f64,
}

/// Minimum projected size, in pixels, for an obstacle to register in a
/// depth image sampled at pixel centers.
const MIN_RESOLVED_PX: f64 = 2.0;

/// Zero-thickness walls seen close to edge-on shrink below the pixel pitch
/// and can slip between pixel centers; such scenes are outside what a
/// sampled depth image can certify.
pub fn resolved_by_sensor(prim: &Primitive, pose: &CameraPose, intr: &CameraIntrinsics) -> bool {
    let Primitive::Wall {
        point,
        normal,
        half_extents,
    } = prim
    else {
        return true;
    };
    let to_wall = Vector3::from(*point) - pose.center();
    let dist = to_wall.norm();
    let facing = Vector3::from(*normal).normalize().dot(&(to_wall / dist)).abs();
    let f = intr.fsx.min(intr.fsy);
    facing * 2.0 * half_extents[0].min(half_extents[1]) * f / dist >= MIN_RESOLVED_PX
}

/// Random scenes clustered around an in-view robot position whose center
/// ray is unobstructed.
pub fn soundness_trial(seed: u64, pairs: usize, intr: &CameraIntrinsics) -> SoundnessTally {
    let robot = RobotModel::default();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut tally = SoundnessTally {
        pairs: 0,
        free: 0,
        violations: 0,
        worst_penetration_px: 0.0,
    };
    let q = Configuration::new(0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    let pose = CameraPose::new(&q);
    while tally.pairs < pairs {
        let p = random_frustum_point(&mut rng, intr, 1.5, 8.0);
        if !render_robot_footprint(&p, &pose, &robot, intr).fully_in_view {
            continue;
        }
        let n = rng.gen_range(1..5);
        let prims: Vec<_> = (0..n).map(|_| random_primitive(&mut rng, &p, 1.0)).collect();
        if !prims.iter().all(|pr| resolved_by_sensor(pr, &pose, intr)) {
            continue;
        }
        let scene = Scene::new(big_bounds(), prims).unwrap();
        let to_p = p - pose.center();
        let dist = to_p.norm();
        if let Some(t) = scene.ray_cast(&pose.center(), &(to_p / dist), 0.0) {
            if t < dist - robot.rho {
                continue;
            }
        }
        let depth = render_scene_depth(&scene, &pose, intr);
        let checker = CollisionChecker::new(&depth, &pose, &robot, intr);
        let verdict = checker.check_configuration(&p);
        tally.pairs += 1;
        if verdict == CollisionVerdict::Free {
            tally.free += 1;
            if brute_force_collision(&scene, &p, robot.rho) {
                let pitch = pose.world_to_camera(&p).zs / intr.fsx.min(intr.fsy);
                let pen = -depthnav::harness::clearance(&scene, &p, robot.rho);
                tally.worst_penetration_px = tally.worst_penetration_px.max(pen / pitch);
                tally.violations += 1;
            }
        }
    }
    tally
}

/// Window of half-size 0.6 m centred 1.5 m to the left of the blocked
/// point, in a wall 4 m ahead.
pub fn gap_fixture() -> (Scene, Vector3<f64>) {
    let prims = wall_with_window(4.0, 1.5, 1.5, 0.6, 20.0);
    (Scene::new(big_bounds(), prims).unwrap(), Vector3::new(4.0, 0.0, 1.5))
}

