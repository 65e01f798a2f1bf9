//! Depth-image collision checking and two-mode LQR planning for a
//! point-mass robot flying through static scenes.

// NaN must fail the positive form of these comparisons.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod collision;
pub mod error;
pub mod frames;
pub mod harness;
pub mod lqr;
pub mod planner;
pub mod scene;

pub use collision::{CollisionChecker, CollisionVerdict, EscapeDirection, EscapeResult};
pub use error::{Error, FieldError, Result};
pub use frames::{CameraIntrinsics, CameraPose, Configuration, PixelCoord};
pub use lqr::{LookAheadTrajectory, Mode, ModeGains, ModeWeights, StateVec};
pub use planner::{GoalRegion, MissionOutcome, MissionStatus, Planner, PlannerConfig};
pub use scene::{DepthImage, Primitive, RobotModel, Scene};
