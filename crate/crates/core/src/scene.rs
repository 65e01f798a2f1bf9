//! Synthetic depth sensor: analytic obstacle primitives, a ray-cast depth
//! renderer, and the hallucinated robot's farthest-point footprint.

use std::io::{self, BufRead, Write};

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::frames::{project, CameraIntrinsics, CameraPose, PixelCoord};

/// Obstacle geometry as written in scenario files.
///
/// Walls are zero-thickness rectangles. Their in-plane axes are derived from
/// the normal: the first half-extent runs along `normal x world_z`
/// (horizontal for vertical walls), the second along `normal x first_axis`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Primitive {
    Box {
        min: [f64; 3],
        max: [f64; 3],
    },
    Sphere {
        center: [f64; 3],
        radius: f64,
    },
    Wall {
        point: [f64; 3],
        normal: [f64; 3],
        half_extents: [f64; 2],
    },
}

impl Primitive {
    /// Violated invariants as `(field, message)` pairs.
    pub fn violations(&self) -> Vec<(&'static str, String)> {
        let mut v = Vec::new();
        let finite = |a: &[f64]| a.iter().all(|x| x.is_finite());
        match self {
            Primitive::Box { min, max } => {
                if !finite(min) || !finite(max) || (0..3).any(|k| min[k] >= max[k]) {
                    v.push(("min", "box min must be < max componentwise".to_string()));
                }
            }
            Primitive::Sphere { center, radius } => {
                if !finite(center) {
                    v.push(("center", "must be finite".to_string()));
                }
                if !(*radius > 0.0 && radius.is_finite()) {
                    v.push(("radius", format!("must be > 0, got {radius}")));
                }
            }
            Primitive::Wall {
                point,
                normal,
                half_extents,
            } => {
                if !finite(point) {
                    v.push(("point", "must be finite".to_string()));
                }
                let n = Vector3::from(*normal).norm();
                if !((n - 1.0).abs() <= 1e-9) {
                    v.push(("normal", format!("must be unit length, got norm {n}")));
                }
                if !half_extents.iter().all(|h| *h > 0.0 && h.is_finite()) {
                    v.push(("half_extents", "must be > 0".to_string()));
                }
            }
        }
        v
    }

    fn prepare(&self) -> Shape {
        match *self {
            Primitive::Box { min, max } => Shape::Aabb(Aabb {
                min: min.into(),
                max: max.into(),
            }),
            Primitive::Sphere { center, radius } => Shape::Ball {
                center: center.into(),
                radius,
            },
            Primitive::Wall {
                point,
                normal,
                half_extents,
            } => {
                let n = Vector3::from(normal);
                let (u, v) = wall_axes(&n);
                Shape::Rect(Rect {
                    point: point.into(),
                    normal: n,
                    u,
                    v,
                    half: half_extents,
                })
            }
        }
    }
}

/// In-plane unit axes of a wall with unit normal `n`.
pub fn wall_axes(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let mut u = n.cross(&Vector3::z());
    if u.norm() < 1e-6 {
        u = n.cross(&Vector3::x());
    }
    let u = u.normalize();
    let v = n.cross(&u).normalize();
    (u, v)
}

/// Axis-aligned box.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|k| p[k] >= self.min[k] && p[k] <= self.max[k])
    }

    /// Parameter interval `[t_enter, t_exit]` of the ray inside the box.
    fn ray_interval(&self, o: &Vector3<f64>, d: &Vector3<f64>) -> Option<(f64, f64)> {
        let mut t0 = f64::NEG_INFINITY;
        let mut t1 = f64::INFINITY;
        for k in 0..3 {
            if d[k] == 0.0 {
                if o[k] < self.min[k] || o[k] > self.max[k] {
                    return None;
                }
                continue;
            }
            let inv = 1.0 / d[k];
            let (mut a, mut b) = ((self.min[k] - o[k]) * inv, (self.max[k] - o[k]) * inv);
            if a > b {
                std::mem::swap(&mut a, &mut b);
            }
            t0 = t0.max(a);
            t1 = t1.min(b);
            if t0 > t1 {
                return None;
            }
        }
        Some((t0, t1))
    }
}

#[derive(Debug, Clone, Copy)]
struct Rect {
    point: Vector3<f64>,
    normal: Vector3<f64>,
    u: Vector3<f64>,
    v: Vector3<f64>,
    half: [f64; 2],
}

#[derive(Debug, Clone, Copy)]
enum Shape {
    Aabb(Aabb),
    Ball { center: Vector3<f64>, radius: f64 },
    Rect(Rect),
}

impl Shape {
    /// Smallest ray parameter `t >= t_min` at which the ray is on or inside
    /// the primitive. A ray starting inside a solid reports `t_min`.
    fn ray_hit(&self, o: &Vector3<f64>, d: &Vector3<f64>, t_min: f64) -> Option<f64> {
        match self {
            Shape::Aabb(b) => {
                let (t0, t1) = b.ray_interval(o, d)?;
                (t1 >= t_min).then(|| t0.max(t_min))
            }
            Shape::Ball { center, radius } => {
                let oc = o - center;
                let a = d.norm_squared();
                let half_b = d.dot(&oc);
                let c = oc.norm_squared() - radius * radius;
                let disc = half_b * half_b - a * c;
                if disc < 0.0 {
                    return None;
                }
                let sq = disc.sqrt();
                let t1 = (-half_b + sq) / a;
                if t1 < t_min {
                    return None;
                }
                let t0 = (-half_b - sq) / a;
                Some(t0.max(t_min))
            }
            Shape::Rect(r) => {
                let denom = r.normal.dot(d);
                if denom.abs() < 1e-15 {
                    return None;
                }
                let t = r.normal.dot(&(r.point - o)) / denom;
                if t < t_min {
                    return None;
                }
                let local = o + d * t - r.point;
                (local.dot(&r.u).abs() <= r.half[0] && local.dot(&r.v).abs() <= r.half[1])
                    .then_some(t)
            }
        }
    }
}

/// Obstacles plus the compact workspace that contains them.
#[derive(Debug, Clone)]
pub struct Scene {
    bounds: Aabb,
    primitives: Vec<Primitive>,
    shapes: Vec<Shape>,
}

impl Scene {
    pub fn new(bounds: Aabb, primitives: Vec<Primitive>) -> Result<Self> {
        let mut errs = Vec::new();
        if (0..3).any(|k| bounds.min[k] >= bounds.max[k]) {
            errs.push(("world.bounds".to_string(), "min must be < max".to_string()));
        }
        for (i, p) in primitives.iter().enumerate() {
            for (f, m) in p.violations() {
                errs.push((format!("world.obstacles[{i}].{f}"), m));
            }
            if !primitive_inside(p, &bounds) {
                errs.push((
                    format!("world.obstacles[{i}]"),
                    "must lie inside world bounds".to_string(),
                ));
            }
        }
        if !errs.is_empty() {
            return Err(Error::invalid(errs));
        }
        let shapes = primitives.iter().map(Primitive::prepare).collect();
        Ok(Self {
            bounds,
            primitives,
            shapes,
        })
    }

    pub fn empty(bounds: Aabb) -> Self {
        Self {
            bounds,
            primitives: Vec::new(),
            shapes: Vec::new(),
        }
    }

    pub fn bounds(&self) -> &Aabb {
        &self.bounds
    }

    pub fn primitives(&self) -> &[Primitive] {
        &self.primitives
    }

    pub fn with_primitive(&self, p: Primitive) -> Result<Self> {
        let mut prims = self.primitives.clone();
        prims.push(p);
        Self::new(self.bounds, prims)
    }

    /// Nearest hit parameter along a world-frame ray, at or beyond `t_min`.
    pub fn ray_cast(&self, origin: &Vector3<f64>, dir: &Vector3<f64>, t_min: f64) -> Option<f64> {
        self.shapes
            .iter()
            .filter_map(|s| s.ray_hit(origin, dir, t_min))
            .min_by(f64::total_cmp)
    }
}

fn primitive_inside(p: &Primitive, b: &Aabb) -> bool {
    const SLACK: f64 = 1e-9;
    let inside = |q: Vector3<f64>| (0..3).all(|k| q[k] >= b.min[k] - SLACK && q[k] <= b.max[k] + SLACK);
    match *p {
        Primitive::Box { min, max } => inside(min.into()) && inside(max.into()),
        Primitive::Sphere { center, radius } => {
            let c = Vector3::from(center);
            let r = Vector3::repeat(radius);
            inside(c - r) && inside(c + r)
        }
        Primitive::Wall {
            point,
            normal,
            half_extents,
        } => {
            let n = Vector3::from(normal);
            if (n.norm() - 1.0).abs() > 1e-9 {
                return true; // reported by the normal check
            }
            let (u, v) = wall_axes(&n);
            let c = Vector3::from(point);
            [(-1.0, -1.0), (-1.0, 1.0), (1.0, -1.0), (1.0, 1.0)]
                .iter()
                .all(|(a, bb)| inside(c + u * (a * half_extents[0]) + v * (bb * half_extents[1])))
        }
    }
}

/// Largest `f32` not above `v`, so stored depths never overstate free space.
fn f32_floor(v: f64) -> f32 {
    let f = v as f32;
    if f as f64 > v {
        f.next_down()
    } else {
        f
    }
}

/// Row-major z-depth image, row 0 at the top.
#[derive(Debug, Clone, PartialEq)]
pub struct DepthImage {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl DepthImage {
    pub fn filled(width: usize, height: usize, value: f32) -> Self {
        Self {
            width,
            height,
            data: vec![value; width * height],
        }
    }

    pub fn from_raw(width: usize, height: usize, data: Vec<f32>) -> Result<Self> {
        if data.len() != width * height {
            return Err(Error::Parse(format!(
                "depth buffer has {} values, expected {}x{}",
                data.len(),
                width,
                height
            )));
        }
        Ok(Self {
            width,
            height,
            data,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn get(&self, i: usize, j: usize) -> f32 {
        self.data[j * self.width + i]
    }

    pub fn min_depth(&self) -> f32 {
        self.data.iter().copied().fold(f32::INFINITY, f32::min)
    }

    /// Writes a little-endian PFM (`Pf`, scale `-1.0`, rows bottom to top).
    pub fn write_pfm<W: Write>(&self, mut w: W) -> io::Result<()> {
        write!(w, "Pf\n{} {}\n-1.0\n", self.width, self.height)?;
        let mut row = Vec::with_capacity(self.width * 4);
        for j in (0..self.height).rev() {
            row.clear();
            for v in &self.data[j * self.width..(j + 1) * self.width] {
                row.extend_from_slice(&v.to_le_bytes());
            }
            w.write_all(&row)?;
        }
        Ok(())
    }

    /// Reads a single-channel PFM written by [`DepthImage::write_pfm`] or any
    /// other conforming writer (either endianness).
    pub fn read_pfm<R: BufRead>(mut r: R) -> Result<Self> {
        let mut tokens = Vec::new();
        while tokens.len() < 4 {
            let mut line = String::new();
            if r.read_line(&mut line)? == 0 {
                return Err(Error::Parse("truncated PFM header".into()));
            }
            tokens.extend(line.split_whitespace().map(str::to_owned));
        }
        if tokens.len() != 4 || tokens[0] != "Pf" {
            return Err(Error::Parse("expected a single-channel 'Pf' header".into()));
        }
        let parse_dim = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| Error::Parse(format!("bad PFM dimension '{s}'")))
        };
        let width = parse_dim(&tokens[1])?;
        let height = parse_dim(&tokens[2])?;
        let scale: f64 = tokens[3]
            .parse()
            .map_err(|_| Error::Parse(format!("bad PFM scale '{}'", tokens[3])))?;
        let little = scale < 0.0;
        let mut bytes = vec![0u8; width * height * 4];
        r.read_exact(&mut bytes)?;
        let mut data = vec![0f32; width * height];
        for (k, chunk) in bytes.chunks_exact(4).enumerate() {
            let b = [chunk[0], chunk[1], chunk[2], chunk[3]];
            let v = if little {
                f32::from_le_bytes(b)
            } else {
                f32::from_be_bytes(b)
            };
            let (row_from_bottom, i) = (k / width, k % width);
            data[(height - 1 - row_from_bottom) * width + i] = v;
        }
        Self::from_raw(width, height, data)
    }
}

/// Renders the scene's z-depth from the camera at `pose`.
///
/// Each pixel-center ray reports the depth of its nearest hit at or beyond
/// the near plane, clamped to `max_depth`. Rows render in parallel; every
/// pixel is an independent pure computation, so the output does not depend
/// on scheduling.
pub fn render_scene_depth(scene: &Scene, pose: &CameraPose, intr: &CameraIntrinsics) -> DepthImage {
    let origin = pose.center();
    let max_depth = intr.max_depth;
    let mut data = vec![0f32; intr.pixel_count()];
    data.par_chunks_mut(intr.width)
        .enumerate()
        .for_each(|(j, row)| {
            for (i, px) in row.iter_mut().enumerate() {
                let dir = pose.direction_to_world(&intr.pixel_ray(i, j));
                let depth = scene
                    .ray_cast(&origin, &dir, intr.z_near)
                    .map_or(max_depth, |t| t.min(max_depth));
                *px = f32_floor(depth);
            }
        });
    DepthImage {
        width: intr.width,
        height: intr.height,
        data,
    }
}

/// Hallucinated robot volume: a sphere that bounds the airframe at any
/// admissible roll and pitch.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RobotModel {
    pub rho: f64,
}

impl Default for RobotModel {
    fn default() -> Self {
        Self { rho: 0.35 }
    }
}

/// Conservative image footprint of the hallucinated robot sphere. Every
/// covered pixel carries the sphere's farthest camera-frame depth.
#[derive(Debug, Clone, PartialEq)]
pub struct RobotFootprint {
    pub center: Option<PixelCoord>,
    pub radius_px: f64,
    pub far_depth: f64,
    pub fully_in_view: bool,
    width: usize,
    height: usize,
}

impl RobotFootprint {
    /// Covered pixel spans `(row, first_col, last_col)`, clipped to the image.
    pub fn spans(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        let (cx, cy, r) = match self.center {
            Some(c) if self.radius_px.is_finite() => (c.rx, c.ry, self.radius_px),
            _ => (0.0, 0.0, -1.0),
        };
        let (w, h) = (self.width as f64, self.height as f64);
        let (j0, j1) = if r < 0.0 || cy + r < 0.0 || cy - r >= h {
            (1, 0)
        } else {
            (
                (cy - r).floor().max(0.0) as usize,
                (cy + r).floor().min(h - 1.0) as usize,
            )
        };
        (j0..=j1).filter_map(move |j| {
            let (top, bottom) = (j as f64, j as f64 + 1.0);
            let dy = if cy < top {
                top - cy
            } else if cy > bottom {
                cy - bottom
            } else {
                0.0
            };
            if dy > r {
                return None;
            }
            let half = (r * r - dy * dy).sqrt();
            let (lo, hi) = ((cx - half).floor(), (cx + half).floor());
            if hi < 0.0 || lo >= w {
                return None;
            }
            Some((j, lo.max(0.0) as usize, hi.min(w - 1.0) as usize))
        })
    }

    /// `(row-major pixel index, farthest depth)` for every covered pixel.
    pub fn pixels(&self) -> impl Iterator<Item = (usize, f64)> + '_ {
        let w = self.width;
        let d = self.far_depth;
        self.spans()
            .flat_map(move |(j, i0, i1)| (i0..=i1).map(move |i| (j * w + i, d)))
    }

    pub fn pixel_count(&self) -> usize {
        self.spans().map(|(_, a, b)| b - a + 1).sum()
    }
}

/// Projects the robot sphere centered at world position `p` into the image
/// of the camera at `pose`.
///
/// The disc radius bounds the projection of every sphere point:
/// `f_max * rho * |C| / (zs * (zs - rho))`, where `C` is the camera-frame
/// center. On the optical axis this reduces to `f_max * rho / (zs - rho)`.
pub fn render_robot_footprint(
    p: &Vector3<f64>,
    pose: &CameraPose,
    robot: &RobotModel,
    intr: &CameraIntrinsics,
) -> RobotFootprint {
    let c = pose.world_to_camera(p);
    let rho = robot.rho;
    let mut fp = RobotFootprint {
        center: None,
        radius_px: f64::INFINITY,
        far_depth: c.zs + rho,
        fully_in_view: false,
        width: intr.width,
        height: intr.height,
    };
    if !(c.zs - rho >= intr.z_near) {
        return fp;
    }
    let center = match project(&c, intr) {
        Ok(px) => px,
        Err(_) => return fp,
    };
    let f_max = intr.fsx.max(intr.fsy);
    let r = f_max * rho * c.to_vector().norm() / (c.zs * (c.zs - rho));
    fp.center = Some(center);
    fp.radius_px = r;
    fp.fully_in_view = center.rx - r >= 0.0
        && center.rx + r < intr.width as f64
        && center.ry - r >= 0.0
        && center.ry + r < intr.height as f64;
    fp
}
