//! Infinite-horizon LQR for the decoupled double integrator and closed-loop
//! look-ahead rollouts.
//!
//! Each world axis is the 2-state system `A = [[0, 1], [0, 0]]`,
//! `B = [0, 1]^T` with state weights `diag(qp, qv)` and input weight `r`.
//! Its stabilizing Riccati solution has the closed form
//!
//! ```text
//! s12 = sqrt(qp r),  s22 = sqrt(r (qv + 2 s12)),  s11 = s12 s22 / r
//! ```
//!
//! and the gain `K = R^-1 B^T S = [s12 / r, s22 / r]`.

use std::fmt;

use nalgebra::{Matrix2, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Flat-output state: position and velocity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StateVec {
    pub p: Vector3<f64>,
    pub v: Vector3<f64>,
}

impl StateVec {
    pub fn new(p: Vector3<f64>, v: Vector3<f64>) -> Self {
        Self { p, v }
    }

    /// At rest at `p`.
    pub fn at_rest(p: Vector3<f64>) -> Self {
        Self::new(p, Vector3::zeros())
    }

    pub fn is_finite(&self) -> bool {
        self.p.iter().chain(self.v.iter()).all(|x| x.is_finite())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    /// `l0`: energy-saving regulation toward the goal.
    GoToGoal,
    /// `l1`: aggressive regulation toward an escape position.
    Escape,
}

impl Mode {
    pub fn label(self) -> &'static str {
        match self {
            Mode::GoToGoal => "l0",
            Mode::Escape => "l1",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

/// Per-axis LQR weights.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModeWeights {
    pub qp: f64,
    pub qv: f64,
    pub r: f64,
}

impl ModeWeights {
    /// Go-to-goal weights: `Q = diag(1, 0.1)` per axis, `R = 3`.
    pub const GO_TO_GOAL: ModeWeights = ModeWeights {
        qp: 1.0,
        qv: 0.1,
        r: 3.0,
    };
    /// Escape weights: `Q = diag(1, 0.1)` per axis, `R = 0.1`.
    pub const ESCAPE: ModeWeights = ModeWeights {
        qp: 1.0,
        qv: 0.1,
        r: 0.1,
    };

    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        if !(self.qp > 0.0 && self.qp.is_finite()) {
            v.push(("qp", format!("must be > 0, got {}", self.qp)));
        }
        if !(self.qv >= 0.0 && self.qv.is_finite()) {
            v.push(("qv", format!("must be >= 0, got {}", self.qv)));
        }
        if !(self.r > 0.0 && self.r.is_finite()) {
            v.push(("r", format!("must be > 0, got {}", self.r)));
        }
        v
    }
}

/// Riccati solution and feedback gains of one axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AxisGain {
    pub s11: f64,
    pub s12: f64,
    pub s22: f64,
    pub kp: f64,
    pub kv: f64,
}

impl AxisGain {
    pub fn riccati_matrix(&self) -> Matrix2<f64> {
        Matrix2::new(self.s11, self.s12, self.s12, self.s22)
    }

    /// `e^T S e` for a position/velocity error pair.
    pub fn cost_to_go(&self, ep: f64, ev: f64) -> f64 {
        self.s11 * ep * ep + 2.0 * self.s12 * ep * ev + self.s22 * ev * ev
    }
}

/// Closed-form stabilizing solution of the per-axis ARE.
pub fn solve_are_axis(w: &ModeWeights) -> AxisGain {
    let s12 = (w.qp * w.r).sqrt();
    let s22 = (w.r * (w.qv + 2.0 * s12)).sqrt();
    let s11 = s12 * s22 / w.r;
    AxisGain {
        s11,
        s12,
        s22,
        kp: s12 / w.r,
        kv: s22 / w.r,
    }
}

/// Max-abs entry of `S A + A^T S + Q - S B R^-1 B^T S`.
pub fn are_residual(g: &AxisGain, w: &ModeWeights) -> f64 {
    let s = g.riccati_matrix();
    let a = Matrix2::new(0.0, 1.0, 0.0, 0.0);
    let q = Matrix2::new(w.qp, 0.0, 0.0, w.qv);
    // B R^-1 B^T = [[0, 0], [0, 1/r]]
    let brb = Matrix2::new(0.0, 0.0, 0.0, 1.0 / w.r);
    (s * a + a.transpose() * s + q - s * brb * s).abs().max()
}

/// Gains of one mode, one entry per world axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModeGains {
    pub mode: Mode,
    pub weights: ModeWeights,
    pub axes: [AxisGain; 3],
}

impl ModeGains {
    pub fn solve(mode: Mode, weights: ModeWeights) -> Self {
        let g = solve_are_axis(&weights);
        Self {
            mode,
            weights,
            axes: [g; 3],
        }
    }

    pub fn residual(&self) -> f64 {
        self.axes
            .iter()
            .map(|g| are_residual(g, &self.weights))
            .fold(0.0, f64::max)
    }

    /// `V = sum over axes of e^T S e` with `e = x - x_ref`.
    pub fn lyapunov(&self, x: &StateVec, x_ref: &StateVec) -> f64 {
        let ep = x.p - x_ref.p;
        let ev = x.v - x_ref.v;
        (0..3).map(|k| self.axes[k].cost_to_go(ep[k], ev[k])).sum()
    }
}

/// `u = -kp (p - p_ref) - kv (v - v_ref)` per axis.
pub fn control(x: &StateVec, x_ref: &StateVec, gains: &[AxisGain; 3]) -> Vector3<f64> {
    Vector3::from_fn(|k, _| {
        -gains[k].kp * (x.p[k] - x_ref.p[k]) - gains[k].kv * (x.v[k] - x_ref.v[k])
    })
}

/// One sample of a look-ahead trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t: f64,
    pub state: StateVec,
    pub input: Vector3<f64>,
}

/// A closed-loop rollout over one horizon.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LookAheadTrajectory {
    pub start_time: f64,
    pub mode: Mode,
    pub reference: StateVec,
    pub samples: Vec<TrajectorySample>,
}

impl LookAheadTrajectory {
    pub fn positions(&self) -> impl Iterator<Item = Vector3<f64>> + '_ {
        self.samples.iter().map(|s| s.state.p)
    }
}

/// Horizon settings for [`rollout`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RolloutSpec {
    pub tau: f64,
    pub ts: f64,
    /// Per-axis clamp on `|u|`; `None` leaves the input unbounded.
    pub input_limit: Option<f64>,
}

/// Fixed substeps per sample interval.
pub const SUBSTEPS: usize = 10;

/// Number of sample intervals in a horizon, if `tau / ts` is integral.
pub fn horizon_steps(tau: f64, ts: f64) -> Option<usize> {
    if !(tau > 0.0 && ts > 0.0 && tau.is_finite() && ts.is_finite()) {
        return None;
    }
    let n = (tau / ts).round();
    ((n >= 1.0) && ((n * ts - tau).abs() <= 1e-9 * tau.max(1.0))).then_some(n as usize)
}

fn clamped_control(x: &StateVec, x_ref: &StateVec, g: &[AxisGain; 3], limit: Option<f64>) -> Vector3<f64> {
    let u = control(x, x_ref, g);
    match limit {
        Some(l) => u.map(|c| c.clamp(-l, l)),
        None => u,
    }
}

fn derivative(x: &StateVec, u: Vector3<f64>) -> StateVec {
    StateVec::new(x.v, u)
}

fn axpy(x: &StateVec, h: f64, d: &StateVec) -> StateVec {
    StateVec::new(x.p + d.p * h, x.v + d.v * h)
}

/// Integrates the closed loop from `x0` toward `x_ref` for one horizon with
/// classical RK4 at `ts / 10`, recording a sample every `ts`. The first
/// sample is `x0` itself.
pub fn rollout(
    x0: &StateVec,
    x_ref: &StateVec,
    gains: &ModeGains,
    spec: &RolloutSpec,
    start_time: f64,
) -> Result<LookAheadTrajectory> {
    let n = horizon_steps(spec.tau, spec.ts)
        .ok_or(Error::DegenerateTrajectory("tau / ts must be a positive integer"))?;
    if !x0.is_finite() || !x_ref.is_finite() {
        return Err(Error::DegenerateTrajectory("non-finite state"));
    }
    let g = &gains.axes;
    let f = |x: &StateVec| derivative(x, clamped_control(x, x_ref, g, spec.input_limit));
    let h = spec.ts / SUBSTEPS as f64;
    let mut x = *x0;
    let mut samples = Vec::with_capacity(n + 1);
    samples.push(TrajectorySample {
        t: start_time,
        state: x,
        input: clamped_control(&x, x_ref, g, spec.input_limit),
    });
    for k in 1..=n {
        for _ in 0..SUBSTEPS {
            let k1 = f(&x);
            let k2 = f(&axpy(&x, h / 2.0, &k1));
            let k3 = f(&axpy(&x, h / 2.0, &k2));
            let k4 = f(&axpy(&x, h, &k3));
            x = StateVec::new(
                x.p + (k1.p + k2.p * 2.0 + k3.p * 2.0 + k4.p) * (h / 6.0),
                x.v + (k1.v + k2.v * 2.0 + k3.v * 2.0 + k4.v) * (h / 6.0),
            );
        }
        samples.push(TrajectorySample {
            t: start_time + k as f64 * spec.ts,
            state: x,
            input: clamped_control(&x, x_ref, g, spec.input_limit),
        });
    }
    Ok(LookAheadTrajectory {
        start_time,
        mode: gains.mode,
        reference: *x_ref,
        samples,
    })
}
