//! Sensed scene representations: emulated depth-camera point clouds and
//! octree occupancy maps.

mod io;
mod octree;

pub use io::{load_cameras, load_cloud_ply, load_octree, save_cloud_ply, save_octree};
pub use octree::{build_octree, octree_collision, OcTree};

use thiserror::Error;

use crate::geom::{ray_cast, Ray};
use crate::math::{Pose, Vec3};
use crate::scalar::Scalar;
use crate::scene::Scene;

#[derive(Debug, Error)]
pub enum SenseError {
    #[error("invalid octree resolution {0}")]
    InvalidResolution(f64),
    #[error("point cloud contains a non-finite point")]
    NonFinitePoint,
    #[error("octree cannot grow past {max_leaves_per_axis} leaves per axis")]
    GrowthOverflow { max_leaves_per_axis: u64 },
    #[error("invalid camera: {0}")]
    InvalidCamera(String),
    #[error("sensing needs at least one camera")]
    NoCameras,
    #[error("parse error at {path}:{line}: {reason}")]
    ParseError {
        path: String,
        line: usize,
        reason: String,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Pinhole depth camera. The camera looks along the +z axis of `pose`.
#[derive(Clone, Debug)]
pub struct CameraModel<S> {
    pub pose: Pose<S>,
    pub width: u32,
    pub height: u32,
    pub fx: S,
    pub fy: S,
    pub cx: S,
    pub cy: S,
    /// Depth clip range along the optical axis, meters.
    pub min_range: S,
    pub max_range: S,
}

impl<S: Scalar> CameraModel<S> {
    /// RGB-D-class defaults: VGA at fx = fy = 570, range 0.1–10 m.
    pub fn default_intrinsics(pose: Pose<S>) -> Self {
        Self {
            pose,
            width: 640,
            height: 480,
            fx: S::of(570.0),
            fy: S::of(570.0),
            cx: S::of(319.5),
            cy: S::of(239.5),
            min_range: S::of(0.1),
            max_range: S::of(10.0),
        }
    }

    /// Camera at `eye` looking at `target` with +z forward and `up` hint.
    pub fn look_at(mut self, eye: Vec3<S>, target: Vec3<S>, up: Vec3<S>) -> Self {
        let forward = (target - eye).normalized();
        let right = forward.cross(up).try_normalized().unwrap_or_else(|| {
            forward
                .cross(Vec3::unit_x())
                .try_normalized()
                .unwrap_or_else(Vec3::unit_y)
        });
        let down = forward.cross(right);
        // Columns: x = right, y = down (image convention), z = forward.
        let m = [right, down, forward];
        // Rotation matrix -> quaternion via the pose of basis vectors.
        let trace = m[0].x + m[1].y + m[2].z;
        let q = if trace > S::zero() {
            let s = (trace + S::one()).sqrt() * S::of(2.0);
            crate::math::Quat::from_wxyz(
                s * S::of(0.25),
                (m[1].z - m[2].y) / s,
                (m[2].x - m[0].z) / s,
                (m[0].y - m[1].x) / s,
            )
        } else if m[0].x > m[1].y && m[0].x > m[2].z {
            let s = (S::one() + m[0].x - m[1].y - m[2].z).sqrt() * S::of(2.0);
            crate::math::Quat::from_wxyz(
                (m[1].z - m[2].y) / s,
                s * S::of(0.25),
                (m[1].x + m[0].y) / s,
                (m[2].x + m[0].z) / s,
            )
        } else if m[1].y > m[2].z {
            let s = (S::one() + m[1].y - m[0].x - m[2].z).sqrt() * S::of(2.0);
            crate::math::Quat::from_wxyz(
                (m[2].x - m[0].z) / s,
                (m[1].x + m[0].y) / s,
                s * S::of(0.25),
                (m[2].y + m[1].z) / s,
            )
        } else {
            let s = (S::one() + m[2].z - m[0].x - m[1].y).sqrt() * S::of(2.0);
            crate::math::Quat::from_wxyz(
                (m[0].y - m[1].x) / s,
                (m[2].x + m[0].z) / s,
                (m[2].y + m[1].z) / s,
                s * S::of(0.25),
            )
        };
        self.pose = Pose::new(eye, q);
        self
    }

    pub fn validate(&self) -> Result<(), SenseError> {
        if self.width == 0 || self.height == 0 {
            return Err(SenseError::InvalidCamera("zero image dimensions".into()));
        }
        if self.fx <= S::zero() || self.fy <= S::zero() {
            return Err(SenseError::InvalidCamera("non-positive focal length".into()));
        }
        if self.min_range < S::zero() || self.min_range >= self.max_range {
            return Err(SenseError::InvalidCamera(
                "need 0 <= min_range < max_range".into(),
            ));
        }
        Ok(())
    }
}

/// Unordered world-frame point set.
#[derive(Clone, Debug, Default)]
pub struct PointCloud<S> {
    pub points: Vec<Vec3<S>>,
}

impl<S: Scalar> PointCloud<S> {
    pub fn merge(clouds: &[PointCloud<S>]) -> PointCloud<S> {
        PointCloud {
            points: clouds.iter().flat_map(|c| c.points.iter().copied()).collect(),
        }
    }
}

/// Casts one ray per pixel through the pinhole model and back-projects the
/// nearest surface hit within the camera's depth range into a world point.
pub fn render_depth<S: Scalar>(scene: &Scene<S>, camera: &CameraModel<S>) -> PointCloud<S> {
    let obstacles = scene.obstacles();
    let origin = camera.pose.translation;
    let mut points = Vec::new();
    for v in 0..camera.height {
        for u in 0..camera.width {
            // dir has z = 1 in the camera frame so the ray parameter equals
            // depth along the optical axis.
            let dir_cam = Vec3::new(
                (S::of(u as f64) - camera.cx) / camera.fx,
                (S::of(v as f64) - camera.cy) / camera.fy,
                S::one(),
            );
            let dir_world = camera.pose.transform_vector(dir_cam);
            let ray = Ray {
                origin,
                dir: dir_world,
            };
            let mut depth: Option<S> = None;
            for (shape, pose) in &obstacles {
                if let Some(t) = ray_cast(shape, pose, &ray) {
                    if depth.map_or(true, |d| t < d) {
                        depth = Some(t);
                    }
                }
            }
            if let Some(t) = depth {
                if t >= camera.min_range && t <= camera.max_range {
                    points.push(origin + dir_world * t);
                }
            }
        }
    }
    PointCloud { points }
}

/// Renders every camera, merges the clouds in camera order, and builds the
/// octree of the union.
pub fn sense_scene<S: Scalar>(
    scene: &Scene<S>,
    cameras: &[CameraModel<S>],
    resolution: S,
) -> Result<(PointCloud<S>, OcTree<S>), SenseError> {
    if cameras.is_empty() {
        return Err(SenseError::NoCameras);
    }
    for cam in cameras {
        cam.validate()?;
    }
    let clouds: Vec<PointCloud<S>> = cameras.iter().map(|c| render_depth(scene, c)).collect();
    let merged = PointCloud::merge(&clouds);
    let tree = build_octree(&clouds, resolution)?;
    Ok((merged, tree))
}
