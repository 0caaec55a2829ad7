use std::ops::Mul;

use crate::math::Vec3;
use crate::scalar::Scalar;

/// Unit quaternion representing a rotation, stored as (w, x, y, z).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Quat<S> {
    pub w: S,
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Scalar> Quat<S> {
    pub fn identity() -> Self {
        Self {
            w: S::one(),
            x: S::zero(),
            y: S::zero(),
            z: S::zero(),
        }
    }

    /// Builds a quaternion from raw components and normalizes it.
    pub fn from_wxyz(w: S, x: S, y: S, z: S) -> Self {
        Self { w, x, y, z }.normalized()
    }

    pub fn from_axis_angle(axis: Vec3<S>, angle: S) -> Self {
        let axis = axis.normalized();
        let half = angle * S::of(0.5);
        let (s, c) = (half.sin(), half.cos());
        Self {
            w: c,
            x: axis.x * s,
            y: axis.y * s,
            z: axis.z * s,
        }
    }

    /// Roll-pitch-yaw (x-y-z extrinsic) composed as Rz(yaw)·Ry(pitch)·Rx(roll).
    pub fn from_rpy(roll: S, pitch: S, yaw: S) -> Self {
        let qz = Self::from_axis_angle(Vec3::unit_z(), yaw);
        let qy = Self::from_axis_angle(Vec3::unit_y(), pitch);
        let qx = Self::from_axis_angle(Vec3::unit_x(), roll);
        qz * qy * qx
    }

    pub fn norm(self) -> S {
        (self.w * self.w + self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn normalized(self) -> Self {
        let n = self.norm();
        assert!(n > S::zero() && n.is_finite(), "degenerate quaternion");
        Self {
            w: self.w / n,
            x: self.x / n,
            y: self.y / n,
            z: self.z / n,
        }
    }

    /// Inverse rotation; equals the conjugate for unit quaternions.
    pub fn inverse(self) -> Self {
        Self {
            w: self.w,
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn dot(self, rhs: Self) -> S {
        self.w * rhs.w + self.x * rhs.x + self.y * rhs.y + self.z * rhs.z
    }

    pub fn rotate(self, v: Vec3<S>) -> Vec3<S> {
        // v' = v + 2 q_v × (q_v × v + w v)
        let qv = Vec3::new(self.x, self.y, self.z);
        let t = qv.cross(v) * S::of(2.0);
        v + t * self.w + qv.cross(t)
    }

    /// Row-major rotation matrix.
    pub fn to_matrix(self) -> [[S; 3]; 3] {
        let (w, x, y, z) = (self.w, self.x, self.y, self.z);
        let two = S::of(2.0);
        let one = S::one();
        [
            [
                one - two * (y * y + z * z),
                two * (x * y - w * z),
                two * (x * z + w * y),
            ],
            [
                two * (x * y + w * z),
                one - two * (x * x + z * z),
                two * (y * z - w * x),
            ],
            [
                two * (x * z - w * y),
                two * (y * z + w * x),
                one - two * (x * x + y * y),
            ],
        ]
    }

    /// Geodesic angle between two rotations, in [0, π].
    pub fn angle_to(self, rhs: Self) -> S {
        let d = self.dot(rhs).abs().min(S::one());
        S::of(2.0) * d.acos()
    }

    /// Rotation vector (axis * angle) carrying this rotation, with angle in [0, π].
    pub fn to_rotation_vector(self) -> Vec3<S> {
        // Flip to the hemisphere with w >= 0 so the angle stays minimal.
        let q = if self.w < S::zero() {
            Self {
                w: -self.w,
                x: -self.x,
                y: -self.y,
                z: -self.z,
            }
        } else {
            self
        };
        let qv = Vec3::new(q.x, q.y, q.z);
        let sin_half = qv.norm();
        if sin_half < S::of(1e-12) {
            return qv * S::of(2.0);
        }
        let angle = S::of(2.0) * sin_half.min(S::one()).asin();
        qv * (angle / sin_half)
    }
}

impl<S: Scalar> Mul for Quat<S> {
    type Output = Self;
    /// Hamilton product; the result is renormalized to bound drift.
    fn mul(self, r: Self) -> Self {
        Self {
            w: self.w * r.w - self.x * r.x - self.y * r.y - self.z * r.z,
            x: self.w * r.x + self.x * r.w + self.y * r.z - self.z * r.y,
            y: self.w * r.y - self.x * r.z + self.y * r.w + self.z * r.x,
            z: self.w * r.z + self.x * r.y - self.y * r.x + self.z * r.w,
        }
        .normalized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const TOL: f64 = 1e-9;

    #[test]
    fn rotation_preserves_norm() {
        let q: Quat<f64> = Quat::from_rpy(0.3, -0.7, 1.9);
        let v = Vec3::new(1.0, -2.0, 0.5);
        assert!((q.rotate(v).norm() - v.norm()).abs() < TOL);
    }

    #[test]
    fn double_z_quarter_turn_is_half_turn() {
        let quarter = Quat::from_axis_angle(Vec3::<f64>::unit_z(), std::f64::consts::FRAC_PI_2);
        let half = quarter * quarter;
        let v = half.rotate(Vec3::new(1.0, 0.0, 0.0));
        assert!((v.x + 1.0).abs() < TOL && v.y.abs() < TOL && v.z.abs() < TOL);
    }

    #[test]
    fn inverse_composes_to_identity() {
        let q: Quat<f64> = Quat::from_rpy(0.1, 0.2, 0.3);
        let e = q * q.inverse();
        assert!((e.w.abs() - 1.0).abs() < TOL);
        assert!(e.x.abs() < TOL && e.y.abs() < TOL && e.z.abs() < TOL);
    }

    #[test]
    fn matrix_matches_rotate() {
        let q: Quat<f64> = Quat::from_rpy(0.4, -1.1, 2.2);
        let m = q.to_matrix();
        let v = Vec3::new(0.3, 0.7, -0.2);
        let mv = Vec3::new(
            m[0][0] * v.x + m[0][1] * v.y + m[0][2] * v.z,
            m[1][0] * v.x + m[1][1] * v.y + m[1][2] * v.z,
            m[2][0] * v.x + m[2][1] * v.y + m[2][2] * v.z,
        );
        assert!(mv.distance(q.rotate(v)) < TOL);
    }

    #[test]
    fn rotation_vector_round_trips() {
        let q: Quat<f64> = Quat::from_axis_angle(Vec3::new(1.0, 2.0, -0.5), 0.8);
        let rv = q.to_rotation_vector();
        let back = Quat::from_axis_angle(rv, rv.norm());
        assert!(q.angle_to(back) < TOL);
    }
}
