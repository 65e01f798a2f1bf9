//! Classifying hallucinated robot positions against a depth image, and the
//! ring search for escape positions parallel to the image plane.

use std::fmt;

use nalgebra::Vector3;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{CameraIntrinsics, CameraPose};
use crate::scene::{render_robot_footprint, DepthImage, RobotModel};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CollisionVerdict {
    Free,
    Collision,
    OutOfView,
}

impl fmt::Display for CollisionVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollisionVerdict::Free => "free",
            CollisionVerdict::Collision => "collision",
            CollisionVerdict::OutOfView => "out_of_view",
        })
    }
}

/// Image-plane search directions, in probe order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EscapeDirection {
    Up,
    Down,
    Left,
    Right,
}

impl EscapeDirection {
    pub const ORDER: [EscapeDirection; 4] = [Self::Up, Self::Down, Self::Left, Self::Right];

    /// Unit direction in the camera frame (x right, y down).
    pub fn camera_axis(self) -> Vector3<f64> {
        match self {
            Self::Up => Vector3::new(0.0, -1.0, 0.0),
            Self::Down => Vector3::new(0.0, 1.0, 0.0),
            Self::Left => Vector3::new(-1.0, 0.0, 0.0),
            Self::Right => Vector3::new(1.0, 0.0, 0.0),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Self::Up => "up",
            Self::Down => "down",
            Self::Left => "left",
            Self::Right => "right",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum EscapeResult {
    /// `ring` is 0 when the queried position was already free, in which case
    /// `direction` is `None`.
    Found {
        position: Vector3<f64>,
        ring: usize,
        direction: Option<EscapeDirection>,
    },
    Stuck,
}

impl EscapeResult {
    pub fn position(&self) -> Option<Vector3<f64>> {
        match self {
            EscapeResult::Found { position, .. } => Some(*position),
            EscapeResult::Stuck => None,
        }
    }
}

/// One candidate evaluated by the escape search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EscapeProbe {
    pub ring: usize,
    pub direction: EscapeDirection,
    pub position: Vector3<f64>,
    pub verdict: CollisionVerdict,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EscapeSearch {
    pub result: EscapeResult,
    pub probes: Vec<EscapeProbe>,
}

/// Everything needed to classify positions against one depth image: the
/// image itself, the camera that captured it, and the robot bound.
#[derive(Debug, Clone, Copy)]
pub struct CollisionChecker<'a> {
    pub depth: &'a DepthImage,
    pub pose: &'a CameraPose,
    pub robot: &'a RobotModel,
    pub intr: &'a CameraIntrinsics,
}

impl<'a> CollisionChecker<'a> {
    pub fn new(
        depth: &'a DepthImage,
        pose: &'a CameraPose,
        robot: &'a RobotModel,
        intr: &'a CameraIntrinsics,
    ) -> Self {
        debug_assert_eq!(depth.width(), intr.width);
        debug_assert_eq!(depth.height(), intr.height);
        Self {
            depth,
            pose,
            robot,
            intr,
        }
    }

    /// Free only if the robot's farthest depth lies strictly in front of the
    /// scene at every pixel its footprint covers.
    pub fn check_configuration(&self, p: &Vector3<f64>) -> CollisionVerdict {
        let fp = render_robot_footprint(p, self.pose, self.robot, self.intr);
        if !fp.fully_in_view {
            return CollisionVerdict::OutOfView;
        }
        let data = self.depth.data();
        let w = self.depth.width();
        let far = fp.far_depth;
        let blocked = fp.spans().any(|(j, i0, i1)| {
            data[j * w + i0..=j * w + i1]
                .iter()
                .any(|&d| !(far < d as f64))
        });
        if blocked {
            CollisionVerdict::Collision
        } else {
            CollisionVerdict::Free
        }
    }

    /// Checks time-ordered samples and reports the first non-free one.
    pub fn waypoints_to_collision(
        &self,
        samples: &[Vector3<f64>],
    ) -> Result<(CollisionVerdict, Option<usize>)> {
        if samples.is_empty() {
            return Err(Error::DegenerateTrajectory("no samples to check"));
        }
        Ok(first_non_free(samples.iter().map(|p| self.check_configuration(p))))
    }

    /// Exact farthest-point test for a sphere too close to the camera to be
    /// imaged whole.
    ///
    /// Every pixel whose center ray pierces the sphere compares the depth of
    /// the ray's exit point against the scene. Only `Free` or `Collision` is
    /// returned; parts of the sphere outside the field of view are not
    /// observable and are not checked.
    pub fn check_near_field(&self, p: &Vector3<f64>) -> CollisionVerdict {
        let c = self.pose.world_to_camera(p).to_vector();
        let rho = self.robot.rho;
        let c2 = c.norm_squared() - rho * rho;
        let intr = self.intr;
        let w = intr.width;
        for j in 0..intr.height {
            for i in 0..w {
                let d = intr.pixel_ray(i, j);
                let a = d.norm_squared();
                let half_b = d.dot(&c);
                let disc = half_b * half_b - a * c2;
                if disc < 0.0 {
                    continue;
                }
                let t_far = (half_b + disc.sqrt()) / a;
                if t_far <= 0.0 {
                    continue;
                }
                if !(t_far < self.depth.get(i, j) as f64) {
                    return CollisionVerdict::Collision;
                }
            }
        }
        CollisionVerdict::Free
    }

    /// Ring search around an under-collision position.
    pub fn find_escape(&self, p_hit: &Vector3<f64>, d_l: f64, max_rings: usize) -> EscapeResult {
        self.search_escape(p_hit, d_l, max_rings).result
    }

    /// [`find_escape`](Self::find_escape) plus every probe it evaluated.
    ///
    /// Rings grow by `d_l`. Within a ring the directions are probed up,
    /// down, left, right; a direction is dropped once its candidate leaves
    /// the field of view. The search is stuck when all four are dropped or
    /// `max_rings` is exhausted.
    pub fn search_escape(&self, p_hit: &Vector3<f64>, d_l: f64, max_rings: usize) -> EscapeSearch {
        let mut probes = Vec::new();
        if self.check_configuration(p_hit) == CollisionVerdict::Free {
            return EscapeSearch {
                result: EscapeResult::Found {
                    position: *p_hit,
                    ring: 0,
                    direction: None,
                },
                probes,
            };
        }
        let axes = EscapeDirection::ORDER.map(|d| (d, self.pose.direction_to_world(&d.camera_axis())));
        let mut active = [true; 4];
        for ring in 1..=max_rings {
            for (k, (dir, axis)) in axes.iter().enumerate() {
                if !active[k] {
                    continue;
                }
                let position = p_hit + axis * (ring as f64 * d_l);
                let verdict = self.check_configuration(&position);
                probes.push(EscapeProbe {
                    ring,
                    direction: *dir,
                    position,
                    verdict,
                });
                match verdict {
                    CollisionVerdict::Free => {
                        return EscapeSearch {
                            result: EscapeResult::Found {
                                position,
                                ring,
                                direction: Some(*dir),
                            },
                            probes,
                        }
                    }
                    CollisionVerdict::OutOfView => active[k] = false,
                    CollisionVerdict::Collision => {}
                }
            }
            if !active.iter().any(|&a| a) {
                break;
            }
        }
        EscapeSearch {
            result: EscapeResult::Stuck,
            probes,
        }
    }
}

/// `(Free, None)` when every verdict is free, else the first other verdict
/// and its index.
pub fn first_non_free<I>(verdicts: I) -> (CollisionVerdict, Option<usize>)
where
    I: IntoIterator<Item = CollisionVerdict>,
{
    verdicts
        .into_iter()
        .enumerate()
        .find(|(_, v)| *v != CollisionVerdict::Free)
        .map_or((CollisionVerdict::Free, None), |(i, v)| (v, Some(i)))
}
