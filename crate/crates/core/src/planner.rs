//! Two-mode hybrid automaton driving a receding-horizon generate / check /
//! append loop, played back by a deterministic executor.
//!
//! Timeline: tick `k` happens at `t = k * ts`. At every tick the executor's
//! current sample is the robot state. The planner may render one depth
//! image from that state, generate (or re-check) one look-ahead, and append
//! it to the feasible trajectory. The executor then advances one sample, or
//! holds when nothing is appended ahead of it.

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::collision::{first_non_free, CollisionChecker, CollisionVerdict, EscapeDirection, EscapeResult};
use crate::error::{Error, Result};
use crate::frames::{CameraIntrinsics, CameraPose, Configuration};
use crate::lqr::{
    horizon_steps, rollout, LookAheadTrajectory, Mode, ModeGains, ModeWeights, RolloutSpec, StateVec,
};
use crate::scene::{render_scene_depth, RobotModel, Scene};

/// Residual above which gains are rejected before a mission starts.
pub const MAX_RICCATI_RESIDUAL: f64 = 1e-9;

/// Goal region `{ p : p.x >= x_goal }`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GoalRegion {
    pub x_goal: f64,
}

impl GoalRegion {
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        p.x >= self.x_goal
    }
}

fn default_tau() -> f64 {
    0.8
}
fn default_ts() -> f64 {
    0.2
}
fn default_d_l() -> f64 {
    0.5
}
fn default_eps_reach() -> f64 {
    0.15
}
fn default_max_rings() -> usize {
    20
}
fn default_timeout() -> f64 {
    60.0
}
fn default_goal_margin() -> f64 {
    1.0
}
fn default_l0() -> ModeWeights {
    ModeWeights::GO_TO_GOAL
}
fn default_l1() -> ModeWeights {
    ModeWeights::ESCAPE
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PlannerConfig {
    /// Look-ahead horizon, seconds.
    #[serde(default = "default_tau")]
    pub tau: f64,
    /// Sample time of checks and playback, seconds.
    #[serde(default = "default_ts")]
    pub ts: f64,
    /// Escape ring spacing, meters.
    #[serde(default = "default_d_l")]
    pub d_l: f64,
    /// Distance at which the escape position counts as reached, meters.
    #[serde(default = "default_eps_reach")]
    pub eps_reach: f64,
    #[serde(default = "default_max_rings")]
    pub max_rings: usize,
    /// Simulated seconds before the mission gives up.
    #[serde(default = "default_timeout")]
    pub mission_timeout: f64,
    #[serde(default = "default_l0")]
    pub go_to_goal: ModeWeights,
    #[serde(default = "default_l1")]
    pub escape: ModeWeights,
    /// The go-to-goal reference sits this far past the goal plane, meters.
    #[serde(default = "default_goal_margin")]
    pub goal_margin: f64,
    /// Samples closer than this to the camera use the exact per-pixel
    /// sphere test. `None` derives the smallest distance at which an
    /// on-axis footprint fits the image.
    #[serde(default)]
    pub near_field_radius: Option<f64>,
    /// Optional per-axis acceleration bound in go-to-goal mode, m/s^2.
    /// Escape mode is never limited.
    #[serde(default)]
    pub cruise_accel_limit: Option<f64>,
    /// Fixed camera heading (yaw), radians.
    #[serde(default)]
    pub heading: f64,
    /// Camera position in the body frame, meters.
    #[serde(default)]
    pub camera_offset: [f64; 3],
}

impl Default for PlannerConfig {
    fn default() -> Self {
        Self {
            tau: default_tau(),
            ts: default_ts(),
            d_l: default_d_l(),
            eps_reach: default_eps_reach(),
            max_rings: default_max_rings(),
            mission_timeout: default_timeout(),
            go_to_goal: default_l0(),
            escape: default_l1(),
            goal_margin: default_goal_margin(),
            near_field_radius: None,
            cruise_accel_limit: None,
            heading: 0.0,
            camera_offset: [0.0; 3],
        }
    }
}

impl PlannerConfig {
    /// Violated invariants as `(field, message)` pairs, fields relative to
    /// the planner section.
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut v = Vec::new();
        let mut positive = |name: &str, x: f64| {
            if !(x > 0.0 && x.is_finite()) {
                v.push((name.to_string(), format!("must be > 0, got {x}")));
            }
        };
        positive("tau", self.tau);
        positive("ts", self.ts);
        positive("d_l", self.d_l);
        positive("eps_reach", self.eps_reach);
        positive("mission_timeout", self.mission_timeout);
        if !(self.goal_margin >= 0.0 && self.goal_margin.is_finite()) {
            v.push(("goal_margin".into(), format!("must be >= 0, got {}", self.goal_margin)));
        }
        if self.tau > 0.0 && self.ts > 0.0 && horizon_steps(self.tau, self.ts).is_none() {
            v.push((
                "tau".into(),
                format!("tau / ts must be integral, got {} / {}", self.tau, self.ts),
            ));
        }
        if self.max_rings == 0 {
            v.push(("max_rings".into(), "must be >= 1".into()));
        }
        if let Some(r) = self.near_field_radius {
            if !(r >= 0.0 && r.is_finite()) {
                v.push(("near_field_radius".into(), format!("must be >= 0, got {r}")));
            }
        }
        if let Some(l) = self.cruise_accel_limit {
            if !(l > 0.0) {
                v.push(("cruise_accel_limit".into(), format!("must be > 0, got {l}")));
            }
        }
        if !self.heading.is_finite() || !self.camera_offset.iter().all(|c| c.is_finite()) {
            v.push(("heading".into(), "heading and camera_offset must be finite".into()));
        }
        for (mode, w) in [("go_to_goal", &self.go_to_goal), ("escape", &self.escape)] {
            for (f, m) in w.violations() {
                v.push((format!("{mode}.{f}"), m));
            }
        }
        v
    }

    pub fn steps_per_horizon(&self) -> Option<usize> {
        horizon_steps(self.tau, self.ts)
    }
}

/// Smallest camera distance at which an on-axis robot footprint is imaged
/// whole.
pub fn default_near_field_radius(intr: &CameraIntrinsics, robot: &RobotModel) -> f64 {
    let half = intr
        .cx
        .min(intr.cy)
        .min(intr.width as f64 - intr.cx)
        .min(intr.height as f64 - intr.cy);
    let f = intr.fsx.max(intr.fsy);
    robot.rho + intr.z_near.max(f * robot.rho / half)
}

/// Fires when any sample of the look-ahead is under collision.
pub fn guard_l0_to_l1(check: &(CollisionVerdict, Option<usize>)) -> bool {
    check.0 == CollisionVerdict::Collision
}

/// Fires when the robot is within `eps_reach` of the escape position.
pub fn guard_l1_to_l0(x: &StateVec, x_esc: &StateVec, eps_reach: f64) -> bool {
    (x.p - x_esc.p).norm() <= eps_reach
}

/// One sample of the appended (feasible) trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeasibleSample {
    pub t: f64,
    pub state: StateVec,
    pub input: Vector3<f64>,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EventKind {
    /// A look-ahead was classified; `sample` indexes the look-ahead.
    Checked {
        verdict: CollisionVerdict,
        sample: Option<usize>,
    },
    Appended {
        first_index: usize,
        samples: usize,
    },
    CollisionPredicted {
        sample: usize,
        position: [f64; 3],
    },
    Deferred {
        sample: usize,
    },
    /// A deferred look-ahead was still unseen with nothing left to execute;
    /// it is handled as a collision.
    DeferralExpired {
        sample: usize,
    },
    EscapeFound {
        position: [f64; 3],
        ring: usize,
        direction: Option<EscapeDirection>,
        probes: usize,
    },
    ModeSwitch {
        from: Mode,
        to: Mode,
        /// Distance to the escape position for escape-to-goal switches.
        distance: Option<f64>,
    },
    EscapeReached {
        distance: f64,
    },
    WaitingForEscape,
    Starvation,
    Stuck,
    Goal,
    TimedOut,
}

impl EventKind {
    pub fn name(&self) -> &'static str {
        match self {
            EventKind::Checked { .. } => "checked",
            EventKind::Appended { .. } => "appended",
            EventKind::CollisionPredicted { .. } => "collision_predicted",
            EventKind::Deferred { .. } => "deferred",
            EventKind::DeferralExpired { .. } => "deferral_expired",
            EventKind::EscapeFound { .. } => "escape_found",
            EventKind::ModeSwitch { .. } => "mode_switch",
            EventKind::EscapeReached { .. } => "escape_reached",
            EventKind::WaitingForEscape => "waiting_for_escape",
            EventKind::Starvation => "starvation",
            EventKind::Stuck => "stuck",
            EventKind::Goal => "goal",
            EventKind::TimedOut => "timed_out",
        }
    }

    /// Precedence when one trajectory row must summarize several events.
    /// Events absent from the row vocabulary rank `None`.
    pub fn row_rank(&self) -> Option<u8> {
        Some(match self {
            EventKind::Stuck => 7,
            EventKind::Goal => 6,
            EventKind::EscapeFound { .. } => 5,
            EventKind::CollisionPredicted { .. } => 4,
            EventKind::EscapeReached { .. } => 3,
            EventKind::Deferred { .. } => 2,
            EventKind::Starvation => 1,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub tick: u64,
    pub t: f64,
    pub mode: Mode,
    #[serde(flatten)]
    pub kind: EventKind,
}

/// One executor step as logged in `trajectory.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExecutedSample {
    pub tick: u64,
    pub t: f64,
    pub mode: Mode,
    pub state: StateVec,
    pub input: Vector3<f64>,
    /// Summary event name, `none` when nothing notable happened.
    pub event: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum MissionStatus {
    ReachedGoal { time: f64 },
    Stuck { time: f64 },
    TimedOut { time: f64 },
}

impl MissionStatus {
    pub fn name(&self) -> &'static str {
        match self {
            MissionStatus::ReachedGoal { .. } => "reached_goal",
            MissionStatus::Stuck { .. } => "stuck",
            MissionStatus::TimedOut { .. } => "timed_out",
        }
    }

    pub fn time(&self) -> f64 {
        match *self {
            MissionStatus::ReachedGoal { time }
            | MissionStatus::Stuck { time }
            | MissionStatus::TimedOut { time } => time,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MissionOutcome {
    pub status: MissionStatus,
    pub executed: Vec<ExecutedSample>,
    pub feasible: Vec<FeasibleSample>,
    /// Every appended look-ahead, in order.
    pub lookaheads: Vec<LookAheadTrajectory>,
    pub events: Vec<Event>,
}

/// Mutable mission state threaded through [`Planner::step`].
#[derive(Debug, Clone, PartialEq)]
pub struct PlannerState {
    pub tick: u64,
    pub mode: Mode,
    pub feasible: Vec<FeasibleSample>,
    /// Index of the executor's current sample in `feasible`.
    pub executed: usize,
    pub escape: Option<StateVec>,
    /// Position the go-to-goal mode regulates toward.
    pub goal_reference: Vector3<f64>,
    pub deferred: Option<LookAheadTrajectory>,
    /// Generation waits for the robot to reach the escape position.
    pub paused: bool,
    pub lookaheads: Vec<LookAheadTrajectory>,
    pub events: Vec<Event>,
    pub stuck: bool,
}

impl PlannerState {
    pub fn robot(&self) -> &StateVec {
        &self.feasible[self.executed].state
    }

    /// Appended samples not yet executed.
    pub fn pending(&self) -> usize {
        self.feasible.len() - 1 - self.executed
    }
}

/// What a single tick did, for profiling.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct TickReport {
    /// A depth image was rendered and a look-ahead checked.
    pub checked: bool,
}

/// Planner bound to one scene and sensor. Gains are solved once at
/// construction.
#[derive(Debug, Clone)]
pub struct Planner<'a> {
    scene: &'a Scene,
    intr: CameraIntrinsics,
    robot: RobotModel,
    cfg: PlannerConfig,
    goal: GoalRegion,
    gains_l0: ModeGains,
    gains_l1: ModeGains,
    steps: usize,
    near_field: f64,
}

impl<'a> Planner<'a> {
    pub fn new(
        scene: &'a Scene,
        intr: CameraIntrinsics,
        robot: RobotModel,
        cfg: PlannerConfig,
        goal: GoalRegion,
    ) -> Result<Self> {
        let mut errs: Vec<(String, String)> = cfg
            .violations()
            .into_iter()
            .map(|(f, m)| (format!("planner.{f}"), m))
            .collect();
        errs.extend(intr.violations().into_iter().map(|(f, m)| (format!("camera.{f}"), m)));
        if !(robot.rho > 0.0 && robot.rho.is_finite()) {
            errs.push(("robot.rho".into(), format!("must be > 0, got {}", robot.rho)));
        }
        if !goal.x_goal.is_finite() {
            errs.push(("goal.x_goal".into(), "must be finite".into()));
        }
        if !errs.is_empty() {
            return Err(Error::invalid(errs));
        }
        let gains_l0 = ModeGains::solve(Mode::GoToGoal, cfg.go_to_goal);
        let gains_l1 = ModeGains::solve(Mode::Escape, cfg.escape);
        for g in [&gains_l0, &gains_l1] {
            let residual = g.residual();
            if !(residual < MAX_RICCATI_RESIDUAL) {
                return Err(Error::RiccatiResidual {
                    mode: g.mode.label(),
                    residual,
                    limit: MAX_RICCATI_RESIDUAL,
                });
            }
        }
        let steps = cfg.steps_per_horizon().expect("validated above");
        let near_field = cfg
            .near_field_radius
            .unwrap_or_else(|| default_near_field_radius(&intr, &robot));
        Ok(Self {
            scene,
            intr,
            robot,
            cfg,
            goal,
            gains_l0,
            gains_l1,
            steps,
            near_field,
        })
    }

    pub fn config(&self) -> &PlannerConfig {
        &self.cfg
    }

    pub fn gains(&self, mode: Mode) -> &ModeGains {
        match mode {
            Mode::GoToGoal => &self.gains_l0,
            Mode::Escape => &self.gains_l1,
        }
    }

    pub fn near_field_radius(&self) -> f64 {
        self.near_field
    }

    /// `tick / rate` rounds once, so `3 * 0.2` logs as `0.6`.
    fn time(&self, tick: u64) -> f64 {
        tick as f64 / self.cfg.ts.recip()
    }

    fn goal_reference(&self, from: &Vector3<f64>) -> Vector3<f64> {
        Vector3::new(self.goal.x_goal + self.cfg.goal_margin, from.y, from.z)
    }

    /// Camera pose of the robot at position `p`.
    pub fn camera_pose(&self, p: &Vector3<f64>) -> CameraPose {
        CameraPose::with_offset(
            &Configuration::level(p, self.cfg.heading),
            &Vector3::from(self.cfg.camera_offset),
        )
    }

    pub fn initial_state(&self, x0: &StateVec) -> PlannerState {
        PlannerState {
            tick: 0,
            mode: Mode::GoToGoal,
            feasible: vec![FeasibleSample {
                t: 0.0,
                state: *x0,
                input: Vector3::zeros(),
                mode: Mode::GoToGoal,
            }],
            executed: 0,
            escape: None,
            goal_reference: self.goal_reference(&x0.p),
            deferred: None,
            paused: false,
            lookaheads: Vec::new(),
            events: Vec::new(),
            stuck: false,
        }
    }

    fn log(&self, state: &mut PlannerState, kind: EventKind) {
        state.events.push(Event {
            tick: state.tick,
            t: self.time(state.tick),
            mode: state.mode,
            kind,
        });
    }

    /// Classifies look-ahead samples, routing samples inside the near field
    /// to the exact per-pixel test.
    pub fn classify(
        &self,
        checker: &CollisionChecker<'_>,
        samples: &[Vector3<f64>],
    ) -> Result<(CollisionVerdict, Option<usize>)> {
        if samples.is_empty() {
            return Err(Error::DegenerateTrajectory("no samples to check"));
        }
        let cam = checker.pose.center();
        Ok(first_non_free(samples.iter().map(|p| {
            if (p - cam).norm() < self.near_field {
                checker.check_near_field(p)
            } else {
                checker.check_configuration(p)
            }
        })))
    }

    fn generate(&self, state: &PlannerState) -> Result<LookAheadTrajectory> {
        let last = state.feasible.last().expect("feasible trajectory is never empty");
        let (gains, reference) = match state.mode {
            Mode::GoToGoal => (&self.gains_l0, StateVec::at_rest(state.goal_reference)),
            Mode::Escape => (
                &self.gains_l1,
                state.escape.expect("escape mode always carries an escape state"),
            ),
        };
        let spec = RolloutSpec {
            tau: self.cfg.tau,
            ts: self.cfg.ts,
            input_limit: match state.mode {
                Mode::GoToGoal => self.cfg.cruise_accel_limit,
                Mode::Escape => None,
            },
        };
        let start = (state.feasible.len() - 1) as f64 * self.cfg.ts;
        rollout(&last.state, &reference, gains, &spec, start)
    }

    /// One planning tick at the executor's current sample.
    pub fn step(&self, state: &mut PlannerState) -> Result<TickReport> {
        let robot = *state.robot();

        if let (Mode::Escape, Some(esc)) = (state.mode, state.escape) {
            if guard_l1_to_l0(&robot, &esc, self.cfg.eps_reach) {
                let distance = (robot.p - esc.p).norm();
                self.log(state, EventKind::EscapeReached { distance });
                self.log(
                    state,
                    EventKind::ModeSwitch {
                        from: Mode::Escape,
                        to: Mode::GoToGoal,
                        distance: Some(distance),
                    },
                );
                state.mode = Mode::GoToGoal;
                state.escape = None;
                state.paused = false;
                state.deferred = None;
                state.goal_reference = self.goal_reference(&robot.p);
            }
        }

        if state.paused || (state.deferred.is_none() && state.pending() > self.steps) {
            return Ok(TickReport::default());
        }

        let pose = self.camera_pose(&robot.p);
        let depth = render_scene_depth(self.scene, &pose, &self.intr);
        let checker = CollisionChecker::new(&depth, &pose, &self.robot, &self.intr);

        let (look, was_deferred) = match state.deferred.take() {
            Some(l) => (l, true),
            None => (self.generate(state)?, false),
        };
        // Sample 0 is the junction with the already-accepted trajectory.
        let ahead: Vec<Vector3<f64>> = look.positions().skip(1).collect();
        let (mut verdict, idx) = self.classify(&checker, &ahead)?;
        let idx = idx.map(|i| i + 1);
        self.log(
            state,
            EventKind::Checked {
                verdict,
                sample: idx,
            },
        );
        // The robot cannot get any closer, so the unseen part stays unknown.
        if verdict == CollisionVerdict::OutOfView && was_deferred && state.pending() == 0 {
            self.log(
                state,
                EventKind::DeferralExpired {
                    sample: idx.expect("non-free verdict carries an index"),
                },
            );
            verdict = CollisionVerdict::Collision;
        }

        match verdict {
            CollisionVerdict::Free => {
                let first_index = state.feasible.len();
                state
                    .feasible
                    .extend(look.samples.iter().skip(1).map(|s| FeasibleSample {
                        t: s.t,
                        state: s.state,
                        input: s.input,
                        mode: look.mode,
                    }));
                self.log(
                    state,
                    EventKind::Appended {
                        first_index,
                        samples: look.samples.len() - 1,
                    },
                );
                state.lookaheads.push(look);
                if let (Mode::Escape, Some(esc)) = (state.mode, state.escape) {
                    let end = state.feasible.last().expect("just appended").state;
                    if (end.p - esc.p).norm() <= self.cfg.eps_reach {
                        state.paused = true;
                        self.log(state, EventKind::WaitingForEscape);
                    }
                }
            }
            CollisionVerdict::Collision => {
                let k = idx.expect("non-free verdict carries an index");
                let p_hit = look.samples[k].state.p;
                self.log(
                    state,
                    EventKind::CollisionPredicted {
                        sample: k,
                        position: p_hit.into(),
                    },
                );
                let search = checker.search_escape(&p_hit, self.cfg.d_l, self.cfg.max_rings);
                match search.result {
                    EscapeResult::Found {
                        position,
                        ring,
                        direction,
                    } => {
                        self.log(
                            state,
                            EventKind::EscapeFound {
                                position: position.into(),
                                ring,
                                direction,
                                probes: search.probes.len(),
                            },
                        );
                        if state.mode == Mode::GoToGoal {
                            self.log(
                                state,
                                EventKind::ModeSwitch {
                                    from: Mode::GoToGoal,
                                    to: Mode::Escape,
                                    distance: None,
                                },
                            );
                            state.mode = Mode::Escape;
                        }
                        state.escape = Some(StateVec::at_rest(position));
                    }
                    EscapeResult::Stuck => {
                        self.log(state, EventKind::Stuck);
                        state.stuck = true;
                    }
                }
            }
            CollisionVerdict::OutOfView => {
                let k = idx.expect("non-free verdict carries an index");
                self.log(state, EventKind::Deferred { sample: k });
                state.deferred = Some(look);
            }
        }
        Ok(TickReport { checked: true })
    }

    /// Runs ticks until the robot enters the goal region, gets stuck, or the
    /// mission times out.
    pub fn run(&self, x0: &StateVec) -> Result<MissionOutcome> {
        self.run_with(x0, |_, _| {})
    }

    /// [`run`](Self::run) with a callback after every planning tick.
    pub fn run_with<F>(&self, x0: &StateVec, mut on_tick: F) -> Result<MissionOutcome>
    where
        F: FnMut(&PlannerState, &TickReport),
    {
        let mut state = self.initial_state(x0);
        let mut executed = Vec::new();
        let status = loop {
            let t = self.time(state.tick);
            let robot = *state.robot();
            if self.goal.contains(&robot.p) {
                self.log(&mut state, EventKind::Goal);
                executed.push(self.row(&state));
                break MissionStatus::ReachedGoal { time: t };
            }
            if t >= self.cfg.mission_timeout - 1e-9 {
                self.log(&mut state, EventKind::TimedOut);
                executed.push(self.row(&state));
                break MissionStatus::TimedOut { time: t };
            }
            let report = self.step(&mut state)?;
            on_tick(&state, &report);
            executed.push(self.row(&state));
            if state.stuck {
                break MissionStatus::Stuck { time: t };
            }
            state.tick += 1;
            if state.pending() > 0 {
                state.executed += 1;
            } else {
                self.log(&mut state, EventKind::Starvation);
            }
        };
        label_rows(&mut executed, &state.events);
        Ok(MissionOutcome {
            status,
            executed,
            feasible: state.feasible,
            lookaheads: state.lookaheads,
            events: state.events,
        })
    }

    fn row(&self, state: &PlannerState) -> ExecutedSample {
        let s = &state.feasible[state.executed];
        ExecutedSample {
            tick: state.tick,
            t: self.time(state.tick),
            mode: state.mode,
            state: s.state,
            input: s.input,
            event: "none".to_string(),
        }
    }
}

fn label_rows(rows: &mut [ExecutedSample], events: &[Event]) {
    let mut e = 0;
    for row in rows.iter_mut() {
        while e < events.len() && events[e].tick < row.tick {
            e += 1;
        }
        let best = events[e..]
            .iter()
            .take_while(|ev| ev.tick == row.tick)
            .filter_map(|ev| ev.kind.row_rank().map(|r| (r, ev.kind.name())))
            .max_by_key(|(r, _)| *r);
        if let Some((_, name)) = best {
            row.event = name.to_string();
        }
    }
}

/// Convenience wrapper: build a planner and fly one mission.
pub fn run_mission(
    scene: &Scene,
    intr: CameraIntrinsics,
    robot: RobotModel,
    x0: &StateVec,
    goal: GoalRegion,
    cfg: PlannerConfig,
) -> Result<MissionOutcome> {
    Planner::new(scene, intr, robot, cfg, goal)?.run(x0)
}
