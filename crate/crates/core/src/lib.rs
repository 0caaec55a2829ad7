//! planforge: procedural generation and benchmarking of motion-planning
//! datasets for articulated robots.
//!
//! The library covers the full pipeline: scene modeling and sampling, URDF
//! kinematics, depth-camera emulation with octree occupancy maps,
//! collision-aware inverse kinematics for request generation, sampling-based
//! planners, and a benchmark harness with dataset I/O.
//!
//! Core math and geometry are generic over the [`scalar::Scalar`] type
//! (`f32` or `f64`); the file formats, benchmark harness and CLI pipeline use
//! the [`Real`] (= `f64`) aliases below.

pub mod geom;
pub mod math;
pub mod rng;
pub mod scalar;

pub use scalar::Scalar;

/// Scalar type used by the shipped pipeline and all file formats.
pub type Real = f64;

pub type Vec3d = math::Vec3<f64>;
pub type Vec3f = math::Vec3<f32>;
pub type Quatd = math::Quat<f64>;
pub type Quatf = math::Quat<f32>;
pub type Posed = math::Pose<f64>;
pub type Posef = math::Pose<f32>;
pub type Shaped = geom::Shape<f64>;
pub type Shapef = geom::Shape<f32>;
