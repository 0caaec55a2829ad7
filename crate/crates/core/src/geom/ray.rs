use crate::math::{Pose, Vec3};
use crate::scalar::Scalar;

use super::shape::Shape;

/// Ray starting at `origin` toward `dir`. `dir` need not be normalized; hit
/// parameters are expressed in units of `dir`'s length.
#[derive(Clone, Copy, Debug)]
pub struct Ray<S> {
    pub origin: Vec3<S>,
    pub dir: Vec3<S>,
}

/// Smallest `t >= 0` at which the ray crosses the posed shape's surface, or
/// `None` on a miss. A ray starting inside reports its exit crossing.
pub fn ray_cast<S: Scalar>(shape: &Shape<S>, pose: &Pose<S>, ray: &Ray<S>) -> Option<S> {
    let inv = pose.inverse();
    let o = inv.transform_point(ray.origin);
    let d = inv.transform_vector(ray.dir);
    match shape {
        Shape::Box { extents } => ray_box(o, d, *extents * S::of(0.5)),
        Shape::Sphere { radius } => ray_sphere(o, d, *radius),
        Shape::Cylinder { radius, length } => ray_cylinder(o, d, *radius, *length * S::of(0.5)),
        Shape::ConvexMesh(mesh) => {
            let mut best: Option<S> = None;
            for tri in mesh.triangles() {
                let a = mesh.vertices()[tri[0] as usize];
                let b = mesh.vertices()[tri[1] as usize];
                let c = mesh.vertices()[tri[2] as usize];
                if let Some(t) = ray_triangle(o, d, a, b, c) {
                    if best.map_or(true, |b0| t < b0) {
                        best = Some(t);
                    }
                }
            }
            best
        }
    }
}

fn pick_entry_or_exit<S: Scalar>(t_enter: S, t_exit: S) -> Option<S> {
    if t_exit < t_enter.max(S::zero()) {
        None
    } else if t_enter >= S::zero() {
        Some(t_enter)
    } else {
        Some(t_exit)
    }
}

fn ray_box<S: Scalar>(o: Vec3<S>, d: Vec3<S>, h: Vec3<S>) -> Option<S> {
    let mut t_enter = S::neg_infinity();
    let mut t_exit = S::infinity();
    for axis in 0..3 {
        let (oi, di, hi) = (o[axis], d[axis], h[axis]);
        if di.abs() < S::epsilon() {
            if oi.abs() > hi {
                return None;
            }
            continue;
        }
        let t1 = (-hi - oi) / di;
        let t2 = (hi - oi) / di;
        let (lo, hi_t) = if t1 <= t2 { (t1, t2) } else { (t2, t1) };
        t_enter = t_enter.max(lo);
        t_exit = t_exit.min(hi_t);
        if t_enter > t_exit {
            return None;
        }
    }
    pick_entry_or_exit(t_enter, t_exit)
}

fn ray_sphere<S: Scalar>(o: Vec3<S>, d: Vec3<S>, r: S) -> Option<S> {
    let a = d.norm_squared();
    if a <= S::zero() {
        return None;
    }
    let b = o.dot(d) * S::of(2.0);
    let c = o.norm_squared() - r * r;
    let disc = b * b - S::of(4.0) * a * c;
    if disc < S::zero() {
        return None;
    }
    let sq = disc.sqrt();
    let t0 = (-b - sq) / (S::of(2.0) * a);
    let t1 = (-b + sq) / (S::of(2.0) * a);
    pick_entry_or_exit(t0, t1)
}

fn ray_cylinder<S: Scalar>(o: Vec3<S>, d: Vec3<S>, r: S, half: S) -> Option<S> {
    let mut hits: Vec<S> = Vec::with_capacity(4);

    // Lateral surface.
    let a = d.x * d.x + d.y * d.y;
    if a > S::epsilon() * S::epsilon() {
        let b = (o.x * d.x + o.y * d.y) * S::of(2.0);
        let c = o.x * o.x + o.y * o.y - r * r;
        let disc = b * b - S::of(4.0) * a * c;
        if disc >= S::zero() {
            let sq = disc.sqrt();
            for t in [(-b - sq) / (S::of(2.0) * a), (-b + sq) / (S::of(2.0) * a)] {
                let z = o.z + d.z * t;
                if t >= S::zero() && z.abs() <= half {
                    hits.push(t);
                }
            }
        }
    }

    // Caps.
    if d.z.abs() > S::epsilon() {
        for cap_z in [half, -half] {
            let t = (cap_z - o.z) / d.z;
            if t >= S::zero() {
                let x = o.x + d.x * t;
                let y = o.y + d.y * t;
                if x * x + y * y <= r * r {
                    hits.push(t);
                }
            }
        }
    }

    hits.into_iter().fold(None, |best, t| match best {
        Some(b) if b <= t => Some(b),
        _ => Some(t),
    })
}

/// Möller–Trumbore, culling nothing; hits on either triangle side count.
fn ray_triangle<S: Scalar>(
    o: Vec3<S>,
    d: Vec3<S>,
    a: Vec3<S>,
    b: Vec3<S>,
    c: Vec3<S>,
) -> Option<S> {
    let e1 = b - a;
    let e2 = c - a;
    let p = d.cross(e2);
    let det = e1.dot(p);
    if det.abs() < S::epsilon() * S::of(16.0) {
        return None;
    }
    let inv_det = S::one() / det;
    let s = o - a;
    let u = s.dot(p) * inv_det;
    if u < S::zero() || u > S::one() {
        return None;
    }
    let q = s.cross(e1);
    let v = d.dot(q) * inv_det;
    if v < S::zero() || u + v > S::one() {
        return None;
    }
    let t = e2.dot(q) * inv_det;
    if t >= S::zero() {
        Some(t)
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Quat;

    fn ray_x() -> Ray<f64> {
        Ray {
            origin: Vec3::new(-5.0, 0.0, 0.0),
            dir: Vec3::unit_x(),
        }
    }

    #[test]
    fn hits_box_face() {
        let shape = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let t = ray_cast(&shape, &Pose::identity(), &ray_x()).unwrap();
        assert!((t - 4.5).abs() < 1e-12);
    }

    #[test]
    fn hits_sphere_front() {
        let shape: Shape<f64> = Shape::sphere(1.0).unwrap();
        let t = ray_cast(&shape, &Pose::identity(), &ray_x()).unwrap();
        assert!((t - 4.0).abs() < 1e-12);
    }

    #[test]
    fn hits_cylinder_side_and_cap() {
        let shape: Shape<f64> = Shape::cylinder(0.5, 2.0).unwrap();
        let t = ray_cast(&shape, &Pose::identity(), &ray_x()).unwrap();
        assert!((t - 4.5).abs() < 1e-12);

        // Straight down onto the top cap.
        let down = Ray {
            origin: Vec3::new(0.1, 0.0, 5.0),
            dir: -Vec3::unit_z(),
        };
        let t = ray_cast(&shape, &Pose::identity(), &down).unwrap();
        assert!((t - 4.0).abs() < 1e-12);
    }

    #[test]
    fn inside_ray_reports_exit() {
        let shape: Shape<f64> = Shape::sphere(1.0).unwrap();
        let ray = Ray {
            origin: Vec3::zero(),
            dir: Vec3::unit_x(),
        };
        let t = ray_cast(&shape, &Pose::identity(), &ray).unwrap();
        assert!((t - 1.0).abs() < 1e-12);
    }

    #[test]
    fn mesh_tetra_hit_matches_plane() {
        let pts = [
            Vec3::new(0.0, -1.0, -1.0),
            Vec3::new(0.0, 1.0, -1.0),
            Vec3::new(0.0, 0.0, 1.0),
            Vec3::new(2.0, 0.0, 0.0),
        ];
        let shape = Shape::convex_mesh(&pts).unwrap();
        let t = ray_cast(&shape, &Pose::identity(), &ray_x()).unwrap();
        assert!((t - 5.0).abs() < 1e-9);
    }

    #[test]
    fn rotated_shape_hit_respects_pose() {
        let shape = Shape::cuboid(4.0, 0.2, 4.0).unwrap();
        let pose = Pose::new(
            Vec3::new(0.0, 0.0, 0.0),
            Quat::from_axis_angle(Vec3::unit_z(), std::f64::consts::FRAC_PI_2),
        );
        // After rotation the slab blocks x; thickness 0.2 along x now.
        let t = ray_cast(&shape, &pose, &ray_x()).unwrap();
        assert!((t - 4.9).abs() < 1e-12);
    }
}
