use std::fs;
use std::path::Path;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use super::oracle::brute_force_collision;
use crate::error::{Error, Result};
use crate::frames::CameraIntrinsics;
use crate::lqr::StateVec;
use crate::planner::{GoalRegion, PlannerConfig};
use crate::scene::{Aabb, Primitive, RobotModel, Scene};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StartState {
    pub position: [f64; 3],
    #[serde(default)]
    pub velocity: [f64; 3],
}

impl StartState {
    pub fn state(&self) -> StateVec {
        StateVec::new(Vector3::from(self.position), Vector3::from(self.velocity))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WorldConfig {
    pub bounds: Aabb,
    #[serde(default)]
    pub obstacles: Vec<Primitive>,
}

/// Everything needed to fly one mission.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    #[serde(default)]
    pub name: String,
    /// Seed recorded for generated scenes; unused by the planner.
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub camera: CameraIntrinsics,
    #[serde(default)]
    pub robot: RobotModel,
    #[serde(default)]
    pub planner: PlannerConfig,
    pub start: StartState,
    pub goal: GoalRegion,
    pub world: WorldConfig,
}

impl ScenarioConfig {
    /// Builds the scene, reporting every violated invariant with its field
    /// path.
    pub fn validate(&self) -> Result<Scene> {
        let mut errs: Vec<(String, String)> = Vec::new();
        errs.extend(self.camera.violations().into_iter().map(|(f, m)| (format!("camera.{f}"), m)));
        if !(self.robot.rho > 0.0 && self.robot.rho.is_finite()) {
            errs.push(("robot.rho".into(), format!("must be > 0, got {}", self.robot.rho)));
        }
        errs.extend(self.planner.violations().into_iter().map(|(f, m)| (format!("planner.{f}"), m)));
        if !self.goal.x_goal.is_finite() {
            errs.push(("goal.x_goal".into(), "must be finite".into()));
        }
        let x0 = self.start.state();
        if !x0.is_finite() {
            errs.push(("start".into(), "must be finite".into()));
        } else if !self.world.bounds.contains(&x0.p) {
            errs.push(("start.position".into(), "must lie inside world bounds".into()));
        }
        let scene = match Scene::new(self.world.bounds, self.world.obstacles.clone()) {
            Ok(s) => Some(s),
            Err(Error::Validation(v)) => {
                errs.extend(v.into_iter().map(|e| (e.path, e.message)));
                None
            }
            Err(e) => return Err(e),
        };
        if let Some(scene) = &scene {
            if x0.is_finite() && brute_force_collision(scene, &x0.p, self.robot.rho) {
                errs.push(("start.position".into(), "robot starts in collision".into()));
            }
        }
        if !errs.is_empty() {
            return Err(Error::invalid(errs));
        }
        Ok(scene.expect("no errors implies a scene"))
    }
}

pub fn parse_scenario(text: &str) -> Result<ScenarioConfig> {
    serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
}

/// Reads, parses and validates a scenario file.
pub fn load_scenario(path: impl AsRef<Path>) -> Result<(ScenarioConfig, Scene)> {
    let text = fs::read_to_string(path)?;
    let cfg = parse_scenario(&text)?;
    let scene = cfg.validate()?;
    Ok((cfg, scene))
}
