use crate::math::{Pose, Vec3};
use crate::scalar::Scalar;

use super::hull::{convex_hull, Hull};
use super::{Aabb, ShapeError};

/// Convex polytope described by its hull vertices and triangles.
///
/// Construction runs a convex-hull pass, so the stored vertex set is always
/// convex; non-convex input is over-approximated.
#[derive(Clone, Debug, PartialEq)]
pub struct ConvexMesh<S> {
    hull: Hull<S>,
}

impl<S: Scalar> ConvexMesh<S> {
    pub fn from_points(points: &[Vec3<S>]) -> Result<Self, ShapeError> {
        if points.iter().any(|p| !p.is_finite()) {
            return Err(ShapeError::DegenerateMesh(
                "mesh contains non-finite vertices".into(),
            ));
        }
        let hull = convex_hull(points)?;
        if hull.vertices.len() < points.len() {
            log::warn!(
                "convexified mesh: kept {} of {} vertices (input was not convex)",
                hull.vertices.len(),
                points.len()
            );
        }
        Ok(Self { hull })
    }

    pub fn vertices(&self) -> &[Vec3<S>] {
        &self.hull.vertices
    }

    pub fn triangles(&self) -> &[[u32; 3]] {
        &self.hull.triangles
    }
}

/// Collision geometry primitive. Dimensions are in meters.
#[derive(Clone, Debug, PartialEq)]
pub enum Shape<S> {
    /// Axis-aligned box in its local frame; `extents` are full edge lengths.
    Box { extents: Vec3<S> },
    Sphere { radius: S },
    /// Cylinder with its axis along local z.
    Cylinder { radius: S, length: S },
    ConvexMesh(ConvexMesh<S>),
}

impl<S: Scalar> Shape<S> {
    pub fn cuboid(x: S, y: S, z: S) -> Result<Self, ShapeError> {
        if x <= S::zero() || y <= S::zero() || z <= S::zero() {
            return Err(ShapeError::NonPositiveDimension("box extents".into()));
        }
        Ok(Self::Box {
            extents: Vec3::new(x, y, z),
        })
    }

    pub fn sphere(radius: S) -> Result<Self, ShapeError> {
        if radius <= S::zero() {
            return Err(ShapeError::NonPositiveDimension("sphere radius".into()));
        }
        Ok(Self::Sphere { radius })
    }

    pub fn cylinder(radius: S, length: S) -> Result<Self, ShapeError> {
        if radius <= S::zero() || length <= S::zero() {
            return Err(ShapeError::NonPositiveDimension(
                "cylinder dimensions".into(),
            ));
        }
        Ok(Self::Cylinder { radius, length })
    }

    pub fn convex_mesh(points: &[Vec3<S>]) -> Result<Self, ShapeError> {
        Ok(Self::ConvexMesh(ConvexMesh::from_points(points)?))
    }

    /// Support point in the local frame: farthest point along `dir`.
    pub fn local_support(&self, dir: Vec3<S>) -> Vec3<S> {
        match self {
            Shape::Box { extents } => {
                let h = *extents * S::of(0.5);
                let sign = |d: S, h: S| if d >= S::zero() { h } else { -h };
                Vec3::new(sign(dir.x, h.x), sign(dir.y, h.y), sign(dir.z, h.z))
            }
            Shape::Sphere { radius } => match dir.try_normalized() {
                Some(u) => u * *radius,
                None => Vec3::new(*radius, S::zero(), S::zero()),
            },
            Shape::Cylinder { radius, length } => {
                let half = *length * S::of(0.5);
                let z = if dir.z >= S::zero() { half } else { -half };
                let xy = Vec3::new(dir.x, dir.y, S::zero());
                match xy.try_normalized() {
                    Some(u) => Vec3::new(u.x * *radius, u.y * *radius, z),
                    None => Vec3::new(S::zero(), S::zero(), z),
                }
            }
            Shape::ConvexMesh(mesh) => {
                let mut best = mesh.vertices()[0];
                let mut best_dot = best.dot(dir);
                for &v in &mesh.vertices()[1..] {
                    let d = v.dot(dir);
                    if d > best_dot {
                        best_dot = d;
                        best = v;
                    }
                }
                best
            }
        }
    }

    /// Support point in the world frame for the shape posed at `pose`.
    pub fn support(&self, pose: &Pose<S>, dir_world: Vec3<S>) -> Vec3<S> {
        let local_dir = pose.rotation.inverse().rotate(dir_world);
        pose.transform_point(self.local_support(local_dir))
    }

    /// Radius of the smallest local-origin-centered sphere containing the shape.
    pub fn bounding_radius(&self) -> S {
        match self {
            Shape::Box { extents } => (*extents * S::of(0.5)).norm(),
            Shape::Sphere { radius } => *radius,
            Shape::Cylinder { radius, length } => {
                let half = *length * S::of(0.5);
                (*radius * *radius + half * half).sqrt()
            }
            Shape::ConvexMesh(mesh) => mesh
                .vertices()
                .iter()
                .map(|v| v.norm())
                .fold(S::zero(), S::max),
        }
    }
}

/// Tight axis-aligned bounding box of a posed shape.
///
/// Uses the support function along the six axis directions, which is exact
/// for every convex shape shipped here.
pub fn aabb_of<S: Scalar>(shape: &Shape<S>, pose: &Pose<S>) -> Aabb<S> {
    let axes = [Vec3::unit_x(), Vec3::unit_y(), Vec3::unit_z()];
    let mut min = Vec3::zero();
    let mut max = Vec3::zero();
    for (i, axis) in axes.iter().enumerate() {
        let hi = shape.support(pose, *axis);
        let lo = shape.support(pose, -*axis);
        match i {
            0 => {
                min.x = lo.x;
                max.x = hi.x;
            }
            1 => {
                min.y = lo.y;
                max.y = hi.y;
            }
            _ => {
                min.z = lo.z;
                max.z = hi.z;
            }
        }
    }
    Aabb::new(min, max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Quat;

    #[test]
    fn unit_box_aabb_at_identity() {
        let shape = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let aabb = aabb_of(&shape, &Pose::identity());
        assert_eq!(aabb.min, Vec3::new(-0.5, -0.5, -0.5));
        assert_eq!(aabb.max, Vec3::new(0.5, 0.5, 0.5));
    }

    #[test]
    fn translated_sphere_aabb() {
        let shape = Shape::sphere(1.0).unwrap();
        let pose = Pose::from_translation(Vec3::new(2.0, 0.0, 0.0));
        let aabb = aabb_of(&shape, &pose);
        assert!(aabb.min.distance(Vec3::new(1.0, -1.0, -1.0)) < 1e-12);
        assert!(aabb.max.distance(Vec3::new(3.0, 1.0, 1.0)) < 1e-12);
    }

    #[test]
    fn rotated_box_support_stays_on_corner() {
        let shape = Shape::cuboid(2.0, 1.0, 1.0).unwrap();
        let pose = Pose::from_rotation(Quat::from_axis_angle(
            Vec3::unit_z(),
            std::f64::consts::FRAC_PI_4,
        ));
        let s = shape.support(&pose, Vec3::unit_x());
        // Corner (1, -0.5, ±0.5) rotated by 45° has the largest x.
        let expected_x = (1.0f64 + 0.5) / 2.0f64.sqrt();
        assert!((s.x - expected_x).abs() < 1e-12);
    }

    #[test]
    fn zero_dimension_rejected() {
        assert!(Shape::<f64>::sphere(0.0).is_err());
        assert!(Shape::<f64>::cuboid(1.0, -1.0, 1.0).is_err());
        assert!(Shape::<f64>::cylinder(0.1, 0.0).is_err());
    }
}
