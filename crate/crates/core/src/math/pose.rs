use crate::math::{Quat, Vec3};
use crate::scalar::Scalar;

/// Rigid transform in SE(3): rotation followed by translation.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Pose<S> {
    pub translation: Vec3<S>,
    pub rotation: Quat<S>,
}

impl<S: Scalar> Pose<S> {
    pub fn identity() -> Self {
        Self {
            translation: Vec3::zero(),
            rotation: Quat::identity(),
        }
    }

    pub fn new(translation: Vec3<S>, rotation: Quat<S>) -> Self {
        Self {
            translation,
            rotation: rotation.normalized(),
        }
    }

    pub fn from_translation(translation: Vec3<S>) -> Self {
        Self {
            translation,
            rotation: Quat::identity(),
        }
    }

    pub fn from_rotation(rotation: Quat<S>) -> Self {
        Self {
            translation: Vec3::zero(),
            rotation,
        }
    }

    pub fn from_xyz_rpy(xyz: Vec3<S>, rpy: Vec3<S>) -> Self {
        Self {
            translation: xyz,
            rotation: Quat::from_rpy(rpy.x, rpy.y, rpy.z),
        }
    }

    /// `self ∘ other`: apply `other` first, then `self`.
    pub fn compose(&self, other: &Self) -> Self {
        Self {
            translation: self.translation + self.rotation.rotate(other.translation),
            rotation: self.rotation * other.rotation,
        }
    }

    pub fn inverse(&self) -> Self {
        let inv_rot = self.rotation.inverse();
        Self {
            translation: -inv_rot.rotate(self.translation),
            rotation: inv_rot,
        }
    }

    pub fn transform_point(&self, p: Vec3<S>) -> Vec3<S> {
        self.rotation.rotate(p) + self.translation
    }

    pub fn transform_vector(&self, v: Vec3<S>) -> Vec3<S> {
        self.rotation.rotate(v)
    }

    /// Largest of translation distance and rotation angle to another pose.
    pub fn error_to(&self, other: &Self) -> S {
        let t = self.translation.distance(other.translation);
        let r = self.rotation.angle_to(other.rotation);
        t.max(r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    fn sample() -> Pose<f64> {
        Pose::from_xyz_rpy(Vec3::new(0.4, -1.2, 2.0), Vec3::new(0.3, 0.6, -0.9))
    }

    #[test]
    fn identity_is_neutral() {
        let p = sample();
        assert!(Pose::identity().compose(&p).error_to(&p) < TOL);
        assert!(p.compose(&Pose::identity()).error_to(&p) < TOL);
    }

    #[test]
    fn inverse_cancels() {
        let p = sample();
        assert!(p.compose(&p.inverse()).error_to(&Pose::identity()) < TOL);
        assert!(p.inverse().compose(&p).error_to(&Pose::identity()) < TOL);
    }

    #[test]
    fn compose_matches_point_application() {
        let a = sample();
        let b = Pose::from_xyz_rpy(Vec3::new(-0.2, 0.1, 0.7), Vec3::new(1.1, -0.4, 0.2));
        let p = Vec3::new(0.3, 0.9, -0.5);
        let via_compose = a.compose(&b).transform_point(p);
        let via_sequential = a.transform_point(b.transform_point(p));
        assert!(via_compose.distance(via_sequential) < TOL);
    }
}
