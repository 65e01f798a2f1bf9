//! Coordinate frames and the pinhole projection pipeline.
//!
//! Frame conventions:
//!
//! - World `W`: z up. The planner flies toward +x by default.
//! - Body `B`: x forward, y left, z up.
//! - Camera `S`: x right, y down, z along the optical axis.
//!
//! A world point reaches the image through `P_S = R_W^S (P_W - c)` followed
//! by the pinhole map `r = (fsx xs / zs + cx, fsy ys / zs + cy)`.

use std::f64::consts::PI;

use nalgebra::{Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Wraps an angle into `(-pi, pi]`.
pub fn normalize_angle(a: f64) -> f64 {
    let wrapped = (a + PI).rem_euclid(2.0 * PI) - PI;
    // rem_euclid lands on [-pi, pi); fold the lower endpoint over.
    if wrapped <= -PI {
        wrapped + 2.0 * PI
    } else {
        wrapped
    }
}

/// Robot pose: position in the world frame and Z-X-Y Euler angles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Configuration {
    pub x: f64,
    pub y: f64,
    pub z: f64,
    /// Roll about body x.
    pub phi: f64,
    /// Pitch about body y.
    pub theta: f64,
    /// Yaw about world z.
    pub psi: f64,
}

impl Configuration {
    pub fn new(x: f64, y: f64, z: f64, phi: f64, theta: f64, psi: f64) -> Self {
        Self {
            x,
            y,
            z,
            phi: normalize_angle(phi),
            theta: normalize_angle(theta),
            psi: normalize_angle(psi),
        }
    }

    /// Level pose at `p` with heading `psi`.
    pub fn level(p: &Vector3<f64>, psi: f64) -> Self {
        Self::new(p.x, p.y, p.z, 0.0, 0.0, psi)
    }

    pub fn position(&self) -> Vector3<f64> {
        Vector3::new(self.x, self.y, self.z)
    }

    /// Body orientation in the world frame.
    pub fn rotation(&self) -> RotationMatrix {
        rotation_zxy(self.phi, self.theta, self.psi)
    }
}

/// A proper rotation (orthonormal, det = +1).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RotationMatrix(Matrix3<f64>);

impl RotationMatrix {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Accepts `m` when `m^T m = I` and `det m = 1` within `tol`.
    pub fn try_from_matrix(m: Matrix3<f64>, tol: f64) -> Option<Self> {
        let ortho = (m.transpose() * m - Matrix3::identity()).abs().max();
        if ortho <= tol && (m.determinant() - 1.0).abs() <= tol {
            Some(Self(m))
        } else {
            None
        }
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn transpose(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.0 * v
    }

    pub fn compose(&self, rhs: &RotationMatrix) -> Self {
        Self(self.0 * rhs.0)
    }
}

fn rot_x(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c)
}

fn rot_y(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c)
}

fn rot_z(a: f64) -> Matrix3<f64> {
    let (s, c) = a.sin_cos();
    Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0)
}

/// Z-X-Y Euler rotation `Rz(psi) Rx(phi) Ry(theta)`.
///
/// The result maps body-frame vectors into the world frame, so its columns
/// are the body axes expressed in world coordinates.
pub fn rotation_zxy(phi: f64, theta: f64, psi: f64) -> RotationMatrix {
    RotationMatrix(rot_z(psi) * rot_x(phi) * rot_y(theta))
}

/// Fixed body-to-camera rotation `Ry(-pi/2) Rx(pi/2)`.
///
/// Sends body forward (+x) to the optical axis (+z), body left to camera
/// -x and body up to camera -y. The product is evaluated exactly.
pub fn body_to_camera_rotation() -> RotationMatrix {
    RotationMatrix(Matrix3::new(
        0.0, -1.0, 0.0, //
        0.0, 0.0, -1.0, //
        1.0, 0.0, 0.0,
    ))
}

/// A point expressed in the camera frame, meters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPoint {
    pub xs: f64,
    pub ys: f64,
    pub zs: f64,
}

impl CameraPoint {
    pub fn new(xs: f64, ys: f64, zs: f64) -> Self {
        Self { xs, ys, zs }
    }

    pub fn to_vector(self) -> Vector3<f64> {
        Vector3::new(self.xs, self.ys, self.zs)
    }

    pub fn from_vector(v: &Vector3<f64>) -> Self {
        Self::new(v.x, v.y, v.z)
    }

    pub fn scaled(self, lambda: f64) -> Self {
        Self::new(self.xs * lambda, self.ys * lambda, self.zs * lambda)
    }
}

/// Continuous pixel coordinates. Pixel `(i, j)` covers `[i, i+1) x [j, j+1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PixelCoord {
    pub rx: f64,
    pub ry: f64,
}

impl PixelCoord {
    pub fn is_valid(&self, intr: &CameraIntrinsics) -> bool {
        self.rx >= 0.0
            && self.rx < intr.width as f64
            && self.ry >= 0.0
            && self.ry < intr.height as f64
    }
}

/// The point lies in front of the camera by less than `z_near` (or behind it).
#[derive(Debug, Clone, Copy, PartialEq, Eq, thiserror::Error)]
#[error("point cannot be imaged: depth below the near plane")]
pub struct BehindCamera;

/// Pinhole intrinsics plus the depth range of the sensor.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CameraIntrinsics {
    /// Focal length times horizontal pixel density, pixels.
    pub fsx: f64,
    /// Focal length times vertical pixel density, pixels.
    pub fsy: f64,
    pub cx: f64,
    pub cy: f64,
    pub width: usize,
    pub height: usize,
    pub z_near: f64,
    pub max_depth: f64,
}

impl Default for CameraIntrinsics {
    /// 640x480 with a 90 degree horizontal field of view and a 10 m range.
    fn default() -> Self {
        Self {
            fsx: 320.0,
            fsy: 320.0,
            cx: 320.0,
            cy: 240.0,
            width: 640,
            height: 480,
            z_near: 0.3,
            max_depth: 10.0,
        }
    }
}

impl CameraIntrinsics {
    /// Same field of view as the default at a different resolution.
    pub fn scaled_default(width: usize, height: usize) -> Self {
        let s = width as f64 / 640.0;
        Self {
            fsx: 320.0 * s,
            fsy: 320.0 * height as f64 / 480.0,
            cx: width as f64 / 2.0,
            cy: height as f64 / 2.0,
            width,
            height,
            ..Self::default()
        }
    }

    /// Returns every violated invariant as `(field, message)`.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        if !(self.fsx > 0.0 && self.fsx.is_finite()) {
            v.push(("fsx", format!("must be > 0, got {}", self.fsx)));
        }
        if !(self.fsy > 0.0 && self.fsy.is_finite()) {
            v.push(("fsy", format!("must be > 0, got {}", self.fsy)));
        }
        if self.width == 0 {
            v.push(("width", "must be > 0".to_string()));
        }
        if self.height == 0 {
            v.push(("height", "must be > 0".to_string()));
        }
        if !(self.cx >= 0.0 && self.cx < self.width as f64) {
            v.push(("cx", format!("must lie in [0, width), got {}", self.cx)));
        }
        if !(self.cy >= 0.0 && self.cy < self.height as f64) {
            v.push(("cy", format!("must lie in [0, height), got {}", self.cy)));
        }
        if !(self.z_near > 0.0) {
            v.push(("z_near", format!("must be > 0, got {}", self.z_near)));
        }
        if !(self.max_depth > self.z_near && self.max_depth.is_finite()) {
            v.push((
                "max_depth",
                format!("must exceed z_near, got {}", self.max_depth),
            ));
        }
        v
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::invalid(
                v.into_iter().map(|(f, m)| (format!("camera.{f}"), m)),
            ))
        }
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    /// Camera-frame ray through the center of pixel `(i, j)`, normalized to
    /// unit z so the ray parameter equals depth.
    pub fn pixel_ray(&self, i: usize, j: usize) -> Vector3<f64> {
        Vector3::new(
            (i as f64 + 0.5 - self.cx) / self.fsx,
            (j as f64 + 0.5 - self.cy) / self.fsy,
            1.0,
        )
    }
}

/// Pinhole projection of a camera-frame point.
pub fn project(
    p_s: &CameraPoint,
    intr: &CameraIntrinsics,
) -> std::result::Result<PixelCoord, BehindCamera> {
    if !(p_s.zs >= intr.z_near) {
        return Err(BehindCamera);
    }
    Ok(PixelCoord {
        rx: intr.fsx * p_s.xs / p_s.zs + intr.cx,
        ry: intr.fsy * p_s.ys / p_s.zs + intr.cy,
    })
}

/// World-to-camera rigid transform for one robot configuration.
///
/// Built once per configuration; every pixel ray and hallucinated point of a
/// planning tick reuses it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CameraPose {
    /// `R_W^S`: rotates world-frame vectors into the camera frame.
    world_to_cam: RotationMatrix,
    center: Vector3<f64>,
}

impl CameraPose {
    /// Camera at the body origin of `q`.
    pub fn new(q: &Configuration) -> Self {
        Self::with_offset(q, &Vector3::zeros())
    }

    /// Camera displaced from the body origin by `offset` (body frame).
    pub fn with_offset(q: &Configuration, offset: &Vector3<f64>) -> Self {
        let body_to_world = q.rotation();
        let world_to_cam = body_to_camera_rotation().compose(&body_to_world.transpose());
        Self {
            world_to_cam,
            center: q.position() + body_to_world.apply(offset),
        }
    }

    pub fn center(&self) -> Vector3<f64> {
        self.center
    }

    pub fn rotation(&self) -> &RotationMatrix {
        &self.world_to_cam
    }

    pub fn world_to_camera(&self, p_w: &Vector3<f64>) -> CameraPoint {
        CameraPoint::from_vector(&self.world_to_cam.apply(&(p_w - self.center)))
    }

    pub fn camera_to_world(&self, p_s: &CameraPoint) -> Vector3<f64> {
        self.world_to_cam.matrix().tr_mul(&p_s.to_vector()) + self.center
    }

    /// Rotates a camera-frame direction into the world frame.
    pub fn direction_to_world(&self, d_s: &Vector3<f64>) -> Vector3<f64> {
        self.world_to_cam.matrix().tr_mul(d_s)
    }
}

/// `P_S = R_W^S (P_W - c(q))` with the camera at the body origin.
pub fn world_to_camera(p_w: &Vector3<f64>, q: &Configuration) -> CameraPoint {
    CameraPose::new(q).world_to_camera(p_w)
}

pub fn camera_to_world(p_s: &CameraPoint, q: &Configuration) -> Vector3<f64> {
    CameraPose::new(q).camera_to_world(p_s)
}
