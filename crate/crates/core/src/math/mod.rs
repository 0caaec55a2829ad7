//! Minimal SE(3) math: vectors, unit quaternions, rigid poses and a small
//! dense solver. Generic over the crate's [`Scalar`](crate::scalar::Scalar).

mod linsolve;
mod pose;
mod quat;
mod vec3;

pub use linsolve::solve_in_place;
pub use pose::Pose;
pub use quat::Quat;
pub use vec3::Vec3;
