//! Shape primitives, bounding boxes and pairwise collision/distance queries.
//!
//! Sphere-sphere and sphere-box pairs use closed-form routines; every other
//! pair goes through one support-function-based GJK path, so all convex
//! shapes compose freely.

mod aabb;
mod gjk;
mod hull;
mod ray;
mod shape;

pub use aabb::Aabb;
pub use hull::{convex_hull, Hull};
pub use ray::{ray_cast, Ray};
pub use shape::{aabb_of, ConvexMesh, Shape};

use thiserror::Error;

use crate::math::{Pose, Vec3};
use crate::scalar::Scalar;

#[derive(Debug, Error)]
pub enum ShapeError {
    #[error("non-positive dimension: {0}")]
    NonPositiveDimension(String),
    #[error("degenerate mesh: {0}")]
    DegenerateMesh(String),
}

/// Outcome of a pairwise collision query.
///
/// `distance` is the separation (≥ 0) for disjoint shapes. For intersecting
/// shapes it is a negative penetration estimate; only its sign is exact.
#[derive(Clone, Copy, Debug)]
pub struct CollisionResult<S> {
    pub in_collision: bool,
    pub distance: S,
}

/// Collision/distance query between two posed shapes.
pub fn collide<S: Scalar>(
    sa: &Shape<S>,
    pa: &Pose<S>,
    sb: &Shape<S>,
    pb: &Pose<S>,
) -> CollisionResult<S> {
    match (sa, sb) {
        (Shape::Sphere { radius: ra }, Shape::Sphere { radius: rb }) => {
            let d = pa.translation.distance(pb.translation) - *ra - *rb;
            CollisionResult {
                in_collision: d < S::zero(),
                distance: d,
            }
        }
        (Shape::Sphere { radius }, Shape::Box { extents }) => sphere_box(*radius, pa, *extents, pb),
        (Shape::Box { extents }, Shape::Sphere { radius }) => sphere_box(*radius, pb, *extents, pa),
        _ => {
            let res = gjk::gjk_query(sa, pa, sb, pb);
            if res.intersecting {
                CollisionResult {
                    in_collision: true,
                    distance: -penetration_estimate(sa, pa, sb, pb),
                }
            } else {
                CollisionResult {
                    in_collision: false,
                    distance: res.distance,
                }
            }
        }
    }
}

fn sphere_box<S: Scalar>(
    radius: S,
    sphere_pose: &Pose<S>,
    extents: Vec3<S>,
    box_pose: &Pose<S>,
) -> CollisionResult<S> {
    let h = extents * S::of(0.5);
    let center = box_pose.inverse().transform_point(sphere_pose.translation);
    let clamped = Vec3::new(
        center.x.max(-h.x).min(h.x),
        center.y.max(-h.y).min(h.y),
        center.z.max(-h.z).min(h.z),
    );
    let offset = center - clamped;
    let d2 = offset.norm_squared();
    if d2 > S::zero() {
        let d = d2.sqrt() - radius;
        CollisionResult {
            in_collision: d < S::zero(),
            distance: d,
        }
    } else {
        // Center inside the box: penetration is the gap to the nearest face
        // plus the radius.
        let gap = (h.x - center.x.abs())
            .min(h.y - center.y.abs())
            .min(h.z - center.z.abs());
        CollisionResult {
            in_collision: true,
            distance: -(gap + radius),
        }
    }
}

/// Lower-bound penetration estimate for intersecting convex shapes from
/// sampled-direction interval overlaps.
fn penetration_estimate<S: Scalar>(
    sa: &Shape<S>,
    pa: &Pose<S>,
    sb: &Shape<S>,
    pb: &Pose<S>,
) -> S {
    let mut dirs: Vec<Vec3<S>> = Vec::with_capacity(14);
    let one = S::one();
    dirs.extend_from_slice(&[Vec3::unit_x(), Vec3::unit_y(), Vec3::unit_z()]);
    for &x in &[-one, one] {
        for &y in &[-one, one] {
            dirs.push(Vec3::new(x, y, S::zero()).normalized());
            dirs.push(Vec3::new(x, S::zero(), y).normalized());
            dirs.push(Vec3::new(S::zero(), x, y).normalized());
            dirs.push(Vec3::new(x, y, one).normalized());
        }
    }
    if let Some(d) = (pb.translation - pa.translation).try_normalized() {
        dirs.push(d);
    }

    let mut penetration = S::infinity();
    for d in dirs {
        let ha_pos = sa.support(pa, d).dot(d);
        let ha_neg = -sa.support(pa, -d).dot(d);
        let hb_pos = sb.support(pb, d).dot(d);
        let hb_neg = -sb.support(pb, -d).dot(d);
        let overlap = ha_pos.min(hb_pos) - ha_neg.max(hb_neg);
        penetration = penetration.min(overlap);
    }
    penetration.max(S::of(1e-12))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_spheres_three_meters_apart() {
        let s: Shape<f64> = Shape::sphere(1.0).unwrap();
        let pb = Pose::from_translation(Vec3::new(3.0, 0.0, 0.0));
        let res = collide(&s, &Pose::identity(), &s, &pb);
        assert!(!res.in_collision);
        assert!((res.distance - 1.0).abs() < 1e-12);
    }

    #[test]
    fn coincident_spheres_collide() {
        let s: Shape<f64> = Shape::sphere(1.0).unwrap();
        let res = collide(&s, &Pose::identity(), &s, &Pose::identity());
        assert!(res.in_collision);
        assert!(res.distance < 0.0);
    }

    #[test]
    fn touching_box_and_sphere_report_zero_distance() {
        // Unit box at origin, r=0.5 sphere at (1, 0, 0): exactly touching.
        let b: Shape<f64> = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let s = Shape::sphere(0.5).unwrap();
        let ps = Pose::from_translation(Vec3::new(1.0, 0.0, 0.0));
        let res = collide(&b, &Pose::identity(), &s, &ps);
        assert!(!res.in_collision);
        assert!(res.distance.abs() < 1e-6);
    }

    #[test]
    fn sphere_center_inside_box_has_negative_distance() {
        let b: Shape<f64> = Shape::cuboid(2.0, 2.0, 2.0).unwrap();
        let s = Shape::sphere(0.1).unwrap();
        let ps = Pose::from_translation(Vec3::new(0.2, 0.0, 0.0));
        let res = collide(&b, &Pose::identity(), &s, &ps);
        assert!(res.in_collision);
        assert!((res.distance + 0.9).abs() < 1e-12);
    }

    #[test]
    fn intersecting_boxes_have_negative_distance() {
        let b: Shape<f64> = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let pb = Pose::from_translation(Vec3::new(0.6, 0.0, 0.0));
        let res = collide(&b, &Pose::identity(), &b, &pb);
        assert!(res.in_collision);
        assert!(res.distance < 0.0);
        // True penetration is 0.4; the estimate may not be exact but must not
        // exceed it.
        assert!(res.distance >= -0.4 - 1e-9);
    }

    #[test]
    fn symmetric_in_collision_flag() {
        let b: Shape<f64> = Shape::cuboid(1.0, 0.4, 0.7).unwrap();
        let c = Shape::cylinder(0.3, 1.2).unwrap();
        let pb = Pose::from_translation(Vec3::new(0.5, 0.1, 0.2));
        let ab = collide(&b, &Pose::identity(), &c, &pb);
        let ba = collide(&c, &pb, &b, &Pose::identity());
        assert_eq!(ab.in_collision, ba.in_collision);
    }
}
