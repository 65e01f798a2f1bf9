//! Independent reference implementations and fixtures shared by the
//! integration tests. Nothing here calls into the code under test except
//! for plain data types.
#![allow(dead_code)]

mod fixtures;

#[allow(unused_imports)]
pub use fixtures::*;

use std::path::PathBuf;

use depthnav::frames::CameraIntrinsics;
use depthnav::scene::{wall_axes, Aabb, Primitive, Scene};
use nalgebra::{DMatrix, DVector, Matrix2, SMatrix, Vector2, Vector3};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub fn scenario_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("scenarios").join(name)
}

pub const SHIPPED: [&str; 3] = ["empty.json", "corridor.json", "sealed.json"];

pub fn big_bounds() -> Aabb {
    Aabb {
        min: Vector3::new(-30.0, -30.0, -30.0),
        max: Vector3::new(30.0, 30.0, 30.0),
    }
}

/// Camera at the origin looking down +x (level, yaw 0).
pub fn camera_to_world_axes() -> (Vector3<f64>, Vector3<f64>, Vector3<f64>) {
    // image right, image down, optical axis
    (-Vector3::y(), -Vector3::z(), Vector3::x())
}

// ---------------------------------------------------------------- ray march

fn inside_solid(prim: &Primitive, p: &Vector3<f64>) -> bool {
    match prim {
        Primitive::Box { min, max } => (0..3).all(|k| p[k] >= min[k] && p[k] <= max[k]),
        Primitive::Sphere { center, radius } => (p - Vector3::from(*center)).norm() <= *radius,
        Primitive::Wall { .. } => false,
    }
}

fn wall_crossed(prim: &Primitive, a: &Vector3<f64>, b: &Vector3<f64>) -> bool {
    let Primitive::Wall {
        point,
        normal,
        half_extents,
    } = prim
    else {
        return false;
    };
    let n = Vector3::from(*normal).normalize();
    let c = Vector3::from(*point);
    let sa = (a - c).dot(&n);
    let sb = (b - c).dot(&n);
    if sa * sb > 0.0 {
        return false;
    }
    let (u, v) = wall_axes(&n);
    let x = if sa == sb { *a } else { a + (b - a) * (sa / (sa - sb)) };
    let d = x - c;
    d.dot(&u).abs() <= half_extents[0] && d.dot(&v).abs() <= half_extents[1]
}

/// Depth along a camera ray `origin + t * dir` by fixed-step marching.
/// `dir` has unit optical-axis component, so `t` is depth.
pub fn march_depth(
    prims: &[Primitive],
    origin: &Vector3<f64>,
    dir: &Vector3<f64>,
    t_min: f64,
    t_max: f64,
    step: f64,
) -> f64 {
    let mut prev = origin + dir * t_min;
    if prims.iter().any(|p| inside_solid(p, &prev)) {
        return t_min;
    }
    let mut t = t_min;
    while t < t_max {
        t += step;
        let q = origin + dir * t;
        if prims
            .iter()
            .any(|p| inside_solid(p, &q) || wall_crossed(p, &prev, &q))
        {
            return t.min(t_max);
        }
        prev = q;
    }
    t_max
}

// ---------------------------------------------------------------- Riccati

/// Stacked state `(px, vx, py, vy, pz, vz)` with three acceleration inputs.
pub fn double_integrator_3d() -> (SMatrix<f64, 6, 6>, SMatrix<f64, 6, 3>) {
    let mut a = SMatrix::<f64, 6, 6>::zeros();
    let mut b = SMatrix::<f64, 6, 3>::zeros();
    for k in 0..3 {
        a[(2 * k, 2 * k + 1)] = 1.0;
        b[(2 * k + 1, k)] = 1.0;
    }
    (a, b)
}

/// Solves `Acl' P + P Acl + M = 0` through the Kronecker form.
fn lyapunov(acl: &SMatrix<f64, 6, 6>, m: &SMatrix<f64, 6, 6>) -> SMatrix<f64, 6, 6> {
    let n = 6;
    let at = acl.transpose();
    let mut big = DMatrix::<f64>::zeros(n * n, n * n);
    // vec(A'P + PA) = (I (x) A' + A' (x) I) vec(P), column-major vec
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                // (I (x) A')
                big[(j * n + i, j * n + k)] += at[(i, k)];
                // (A' (x) I): P A contributes A[k, j] P[i, k]
                big[(j * n + i, k * n + i)] += acl[(k, j)];
            }
        }
    }
    let rhs = DVector::from_iterator(n * n, m.iter().map(|x| -x));
    let sol = big.lu().solve(&rhs).expect("closed loop must be stable");
    SMatrix::<f64, 6, 6>::from_iterator(sol.iter().copied())
}

/// Kleinman's Newton iteration on the full six-state ARE. Returns the
/// stabilizing solution and the gain `R^-1 B' P`.
pub fn kleinman_are(qp: f64, qv: f64, r: f64) -> (SMatrix<f64, 6, 6>, SMatrix<f64, 3, 6>) {
    let (a, b) = double_integrator_3d();
    let mut q = SMatrix::<f64, 6, 6>::zeros();
    for k in 0..3 {
        q[(2 * k, 2 * k)] = qp;
        q[(2 * k + 1, 2 * k + 1)] = qv;
    }
    let rm = SMatrix::<f64, 3, 3>::identity() * r;
    let rinv = SMatrix::<f64, 3, 3>::identity() / r;
    // stabilizing start: u = -(e + 2 v) per axis
    let mut k = SMatrix::<f64, 3, 6>::zeros();
    for ax in 0..3 {
        k[(ax, 2 * ax)] = 1.0;
        k[(ax, 2 * ax + 1)] = 2.0;
    }
    let mut p = SMatrix::<f64, 6, 6>::zeros();
    for _ in 0..60 {
        let acl = a - b * k;
        let m = q + k.transpose() * rm * k;
        let p_next = lyapunov(&acl, &m);
        let k_next = rinv * b.transpose() * p_next;
        let done = (p_next - p).amax() < 1e-14 * p_next.amax().max(1.0);
        p = p_next;
        k = k_next;
        if done {
            break;
        }
    }
    (p, k)
}

// ---------------------------------------------------------------- dynamics

/// Closed-loop per-axis error dynamics propagated with the matrix
/// exponential, `e(t) = expm(Acl t) e(0)`.
pub fn closed_loop_exact(kp: f64, kv: f64, e0: Vector2<f64>, t: f64) -> Vector2<f64> {
    let acl = Matrix2::new(0.0, 1.0, -kp, -kv);
    (acl * t).exp() * e0
}

// ---------------------------------------------------------------- fixtures

pub fn wall(point: [f64; 3], normal: [f64; 3], half: [f64; 2]) -> Primitive {
    Primitive::Wall {
        point,
        normal,
        half_extents: half,
    }
}

/// Vertical wall in the plane `x = x_wall` facing the origin, pierced by a
/// square window centred at `(y_c, z_c)` with half-size `h`. Built from four
/// rectangles that tile the plane outside the window.
pub fn wall_with_window(x_wall: f64, y_c: f64, z_c: f64, h: f64, extent: f64) -> Vec<Primitive> {
    let n = [-1.0, 0.0, 0.0];
    // wall_axes for this normal: u = world -y, v = world +z (up to sign)
    let big = extent;
    let strip = (big - h) / 2.0;
    vec![
        // above and below the window, full width
        wall([x_wall, y_c, z_c + h + strip], n, [big, strip]),
        wall([x_wall, y_c, z_c - h - strip], n, [big, strip]),
        // left and right of the window, window height
        wall([x_wall, y_c + h + strip, z_c], n, [strip, h]),
        wall([x_wall, y_c - h - strip, z_c], n, [strip, h]),
    ]
}

pub fn sealed_scene() -> Scene {
    Scene::new(big_bounds(), vec![wall([2.5, 0.0, 0.0], [-1.0, 0.0, 0.0], [29.0, 29.0])]).unwrap()
}

pub fn small_camera() -> CameraIntrinsics {
    CameraIntrinsics::scaled_default(160, 120)
}

// ---------------------------------------------------------------- random

pub fn random_primitive(rng: &mut ChaCha8Rng, near: &Vector3<f64>, spread: f64) -> Primitive {
    let c = near
        + Vector3::new(
            rng.gen_range(-spread..spread),
            rng.gen_range(-spread..spread),
            rng.gen_range(-spread..spread),
        );
    match rng.gen_range(0..3) {
        0 => {
            let h = Vector3::new(
                rng.gen_range(0.1..0.8),
                rng.gen_range(0.1..0.8),
                rng.gen_range(0.1..0.8),
            );
            Primitive::Box {
                min: (c - h).into(),
                max: (c + h).into(),
            }
        }
        1 => Primitive::Sphere {
            center: c.into(),
            radius: rng.gen_range(0.1..0.8),
        },
        _ => {
            let n = Vector3::new(
                rng.gen_range(-1.0..-0.2),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            )
            .normalize();
            Primitive::Wall {
                point: c.into(),
                normal: n.into(),
                half_extents: [rng.gen_range(0.1..1.0), rng.gen_range(0.1..1.0)],
            }
        }
    }
}

/// Uniform point in the camera frustum between depths `z0` and `z1`,
/// returned in world coordinates for a level camera at the origin facing +x.
pub fn random_frustum_point(rng: &mut ChaCha8Rng, intr: &CameraIntrinsics, z0: f64, z1: f64) -> Vector3<f64> {
    let z = rng.gen_range(z0..z1);
    let u = rng.gen_range(0.0..intr.width as f64);
    let v = rng.gen_range(0.0..intr.height as f64);
    let xs = (u - intr.cx) / intr.fsx * z;
    let ys = (v - intr.cy) / intr.fsy * z;
    let (r, d, f) = camera_to_world_axes();
    r * xs + d * ys + f * z
}

// ---------------------------------------------------------------- missions

use depthnav::harness::{load_scenario, verify_mission, ScenarioConfig};
use depthnav::lqr::{Mode, ModeGains};
use depthnav::planner::{EventKind, MissionOutcome, Planner};

pub fn fly(name: &str) -> (ScenarioConfig, Scene, MissionOutcome) {
    let (cfg, scene) = load_scenario(scenario_path(name)).unwrap();
    let planner = Planner::new(&scene, cfg.camera, cfg.robot, cfg.planner.clone(), cfg.goal).unwrap();
    let out = planner.run(&cfg.start.state()).unwrap();
    (cfg, scene, out)
}

/// Largest position or velocity jump where a look-ahead meets the
/// trajectory it was appended to.
pub fn junction_mismatch(out: &MissionOutcome) -> f64 {
    let mut worst = 0.0f64;
    let mut appended = out.events.iter().filter_map(|e| match e.kind {
        EventKind::Appended { first_index, .. } => Some(first_index),
        _ => None,
    });
    for look in &out.lookaheads {
        let first = appended.next().expect("one append event per look-ahead");
        let prev = out.feasible[first - 1].state;
        let head = look.samples[0].state;
        worst = worst.max((prev.p - head.p).amax()).max((prev.v - head.v).amax());
        for (k, s) in look.samples.iter().enumerate().skip(1) {
            let f = out.feasible[first + k - 1].state;
            worst = worst.max((f.p - s.state.p).amax()).max((f.v - s.state.v).amax());
        }
    }
    worst
}

/// Samples where the mode's quadratic cost-to-go rose along a look-ahead.
pub fn lyapunov_increases(out: &MissionOutcome, cfg: &ScenarioConfig) -> usize {
    let mut count = 0;
    for look in &out.lookaheads {
        let w = match look.mode {
            Mode::GoToGoal => cfg.planner.go_to_goal,
            Mode::Escape => cfg.planner.escape,
        };
        let g = ModeGains::solve(look.mode, w);
        let v: Vec<f64> = look.samples.iter().map(|s| g.lyapunov(&s.state, &look.reference)).collect();
        count += v.windows(2).filter(|p| p[1] > p[0] * (1.0 + 1e-12) + 1e-12).count();
    }
    count
}

/// Transitions that break the two-mode automaton.
pub fn mode_sequence_errors(out: &MissionOutcome, eps_reach: f64) -> Vec<String> {
    let mut errs = Vec::new();
    for (i, e) in out.events.iter().enumerate() {
        let EventKind::ModeSwitch { from, to, distance } = e.kind else {
            continue;
        };
        match (from, to) {
            (Mode::GoToGoal, Mode::Escape) => {
                let predicted = out.events[..i]
                    .iter()
                    .rev()
                    .take_while(|p| p.tick == e.tick)
                    .any(|p| matches!(p.kind, EventKind::CollisionPredicted { .. }));
                if !predicted {
                    errs.push(format!("tick {}: l0 -> l1 without a predicted collision", e.tick));
                }
            }
            (Mode::Escape, Mode::GoToGoal) => {
                if !distance.is_some_and(|d| d <= eps_reach) {
                    errs.push(format!("tick {}: l1 -> l0 at distance {distance:?}", e.tick));
                }
            }
            _ => errs.push(format!("tick {}: self transition", e.tick)),
        }
    }
    errs
}

/// Every append must directly follow a free verdict in the same tick.
pub fn unchecked_appends(out: &MissionOutcome) -> usize {
    out.events
        .windows(2)
        .filter(|w| {
            matches!(w[1].kind, EventKind::Appended { .. })
                && !(w[0].tick == w[1].tick
                    && matches!(
                        w[0].kind,
                        EventKind::Checked {
                            verdict: depthnav::collision::CollisionVerdict::Free,
                            ..
                        }
                    ))
        })
        .count()
}

pub fn oracle_violations(out: &MissionOutcome, scene: &Scene, rho: f64) -> usize {
    let positions: Vec<_> = out.executed.iter().map(|s| s.state.p).collect();
    verify_mission(&positions, scene, rho).violations
}
