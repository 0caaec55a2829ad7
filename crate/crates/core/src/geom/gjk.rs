//! GJK distance query on the Minkowski difference of two posed convex shapes.

use crate::math::{Pose, Vec3};
use crate::scalar::Scalar;

use super::shape::Shape;

const MAX_ITERATIONS: usize = 128;

#[derive(Clone, Copy, Debug)]
pub struct GjkResult<S> {
    pub intersecting: bool,
    /// Separation distance; only meaningful when `intersecting` is false.
    pub distance: S,
}

/// Distance between two convex shapes, or intersection when the origin lies
/// inside their Minkowski difference.
pub fn gjk_query<S: Scalar>(
    sa: &Shape<S>,
    pa: &Pose<S>,
    sb: &Shape<S>,
    pb: &Pose<S>,
) -> GjkResult<S> {
    let support = |d: Vec3<S>| sa.support(pa, d) - sb.support(pb, -d);

    let scale = sa.bounding_radius()
        + sb.bounding_radius()
        + pa.translation.norm()
        + pb.translation.norm()
        + S::one();
    let abs_tol = scale * S::epsilon().sqrt();
    let rel_tol = S::of(1e-10).max(S::epsilon() * S::of(16.0));

    let init_dir = (pb.translation - pa.translation)
        .try_normalized()
        .unwrap_or_else(Vec3::unit_x);
    let mut simplex = [support(init_dir); 4];
    let mut len = 1usize;
    let mut closest = simplex[0];

    for _ in 0..MAX_ITERATIONS {
        if closest.norm_squared() <= abs_tol * abs_tol {
            return GjkResult {
                intersecting: true,
                distance: S::zero(),
            };
        }
        let w = support(-closest);
        // No more progress possible toward the origin.
        let vv = closest.norm_squared();
        if vv - closest.dot(w) <= rel_tol * vv {
            return GjkResult {
                intersecting: false,
                distance: closest.norm(),
            };
        }
        if simplex[..len]
            .iter()
            .any(|p| p.distance(w) <= abs_tol * S::of(1e-3))
        {
            return GjkResult {
                intersecting: false,
                distance: closest.norm(),
            };
        }
        simplex[len] = w;
        len += 1;

        match reduce_simplex(&mut simplex, len) {
            Reduction::ContainsOrigin => {
                return GjkResult {
                    intersecting: true,
                    distance: S::zero(),
                }
            }
            Reduction::Closest { point, new_len } => {
                closest = point;
                len = new_len;
            }
        }
    }

    GjkResult {
        intersecting: false,
        distance: closest.norm(),
    }
}

enum Reduction<S> {
    ContainsOrigin,
    Closest { point: Vec3<S>, new_len: usize },
}

fn reduce_simplex<S: Scalar>(pts: &mut [Vec3<S>; 4], len: usize) -> Reduction<S> {
    match len {
        1 => Reduction::Closest {
            point: pts[0],
            new_len: 1,
        },
        2 => {
            let (point, mask) = closest_on_segment(pts[0], pts[1]);
            apply_mask(pts, &[0, 1], mask, point)
        }
        3 => {
            let (point, mask) = closest_on_triangle(pts[0], pts[1], pts[2]);
            apply_mask(pts, &[0, 1, 2], mask, point)
        }
        4 => match closest_on_tetrahedron(pts[0], pts[1], pts[2], pts[3]) {
            None => Reduction::ContainsOrigin,
            Some((point, mask)) => apply_mask(pts, &[0, 1, 2, 3], mask, point),
        },
        _ => unreachable!("simplex has at most 4 points"),
    }
}

fn apply_mask<S: Scalar>(
    pts: &mut [Vec3<S>; 4],
    indices: &[usize],
    mask: u8,
    point: Vec3<S>,
) -> Reduction<S> {
    let mut kept = [Vec3::zero(); 4];
    let mut n = 0;
    for (bit, &idx) in indices.iter().enumerate() {
        if mask & (1 << bit) != 0 {
            kept[n] = pts[idx];
            n += 1;
        }
    }
    pts[..n].copy_from_slice(&kept[..n]);
    Reduction::Closest {
        point,
        new_len: n,
    }
}

/// Closest point to the origin on segment ab; mask bits mark kept vertices.
fn closest_on_segment<S: Scalar>(a: Vec3<S>, b: Vec3<S>) -> (Vec3<S>, u8) {
    let ab = b - a;
    let denom = ab.norm_squared();
    if denom <= S::zero() {
        return (a, 0b01);
    }
    let t = -a.dot(ab) / denom;
    if t <= S::zero() {
        (a, 0b01)
    } else if t >= S::one() {
        (b, 0b10)
    } else {
        (a + ab * t, 0b11)
    }
}

/// Closest point to the origin on triangle abc (Ericson's region tests).
fn closest_on_triangle<S: Scalar>(a: Vec3<S>, b: Vec3<S>, c: Vec3<S>) -> (Vec3<S>, u8) {
    let ab = b - a;
    let ac = c - a;
    let ap = -a;
    let d1 = ab.dot(ap);
    let d2 = ac.dot(ap);
    if d1 <= S::zero() && d2 <= S::zero() {
        return (a, 0b001);
    }

    let bp = -b;
    let d3 = ab.dot(bp);
    let d4 = ac.dot(bp);
    if d3 >= S::zero() && d4 <= d3 {
        return (b, 0b010);
    }

    let vc = d1 * d4 - d3 * d2;
    if vc <= S::zero() && d1 >= S::zero() && d3 <= S::zero() {
        let t = d1 / (d1 - d3);
        return (a + ab * t, 0b011);
    }

    let cp = -c;
    let d5 = ab.dot(cp);
    let d6 = ac.dot(cp);
    if d6 >= S::zero() && d5 <= d6 {
        return (c, 0b100);
    }

    let vb = d5 * d2 - d1 * d6;
    if vb <= S::zero() && d2 >= S::zero() && d6 <= S::zero() {
        let t = d2 / (d2 - d6);
        return (a + ac * t, 0b101);
    }

    let va = d3 * d6 - d5 * d4;
    if va <= S::zero() && (d4 - d3) >= S::zero() && (d5 - d6) >= S::zero() {
        let t = (d4 - d3) / ((d4 - d3) + (d5 - d6));
        return (b + (c - b) * t, 0b110);
    }

    let denom = S::one() / (va + vb + vc);
    let v = vb * denom;
    let w = vc * denom;
    (a + ab * v + ac * w, 0b111)
}

/// Closest point to the origin on tetrahedron abcd, or `None` when the origin
/// is inside.
fn closest_on_tetrahedron<S: Scalar>(
    a: Vec3<S>,
    b: Vec3<S>,
    c: Vec3<S>,
    d: Vec3<S>,
) -> Option<(Vec3<S>, u8)> {
    // A face separates the origin when the origin lies on the opposite side
    // from the remaining vertex. A flat tetrahedron cannot contain the
    // origin, so a degenerate face also counts as separating.
    let outside = |p: Vec3<S>, q: Vec3<S>, r: Vec3<S>, other: Vec3<S>| {
        let n = (q - p).cross(r - p);
        let sign_other = n.dot(other - p);
        let sign_origin = n.dot(-p);
        let flat = sign_other.abs()
            <= n.norm() * S::epsilon() * S::of(16.0) * (p.norm() + q.norm() + r.norm() + S::one());
        sign_origin * sign_other < S::zero() || flat
    };

    let mut best: Option<(Vec3<S>, u8, S)> = None;
    let faces: [( Vec3<S>, Vec3<S>, Vec3<S>, Vec3<S>, [u8; 3]); 4] = [
        (a, b, c, d, [0, 1, 2]),
        (a, b, d, c, [0, 1, 3]),
        (a, c, d, b, [0, 2, 3]),
        (b, c, d, a, [1, 2, 3]),
    ];
    let mut any_outside = false;
    for (p, q, r, other, idx) in faces {
        if !outside(p, q, r, other) {
            continue;
        }
        any_outside = true;
        let (point, tri_mask) = closest_on_triangle(p, q, r);
        let mut mask = 0u8;
        for (bit, &orig) in idx.iter().enumerate() {
            if tri_mask & (1 << bit) != 0 {
                mask |= 1 << orig;
            }
        }
        let dist = point.norm_squared();
        if best.as_ref().map_or(true, |(_, _, d0)| dist < *d0) {
            best = Some((point, mask, dist));
        }
    }

    if !any_outside {
        return None;
    }
    best.map(|(p, m, _)| (p, m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Quat;

    #[test]
    fn separated_boxes_report_gap() {
        let a: Shape<f64> = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let b = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let pb = Pose::from_translation(Vec3::new(3.0, 0.0, 0.0));
        let res = gjk_query(&a, &Pose::identity(), &b, &pb);
        assert!(!res.intersecting);
        assert!((res.distance - 2.0).abs() < 1e-9, "{}", res.distance);
    }

    #[test]
    fn overlapping_boxes_intersect() {
        let a: Shape<f64> = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let b = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let pb = Pose::from_translation(Vec3::new(0.5, 0.2, -0.1));
        assert!(gjk_query(&a, &Pose::identity(), &b, &pb).intersecting);
    }

    #[test]
    fn rotated_box_distance_matches_analytic() {
        // 45°-rotated unit box: corner at x = √2/2 toward a unit box 3 m away.
        let a: Shape<f64> = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let pa = Pose::from_rotation(Quat::from_axis_angle(
            Vec3::unit_z(),
            std::f64::consts::FRAC_PI_4,
        ));
        let b = Shape::cuboid(1.0, 1.0, 1.0).unwrap();
        let pb = Pose::from_translation(Vec3::new(3.0, 0.0, 0.0));
        let res = gjk_query(&a, &pa, &b, &pb);
        let expected = 3.0 - 0.5 - std::f64::consts::SQRT_2 / 2.0;
        assert!(!res.intersecting);
        assert!((res.distance - expected).abs() < 1e-8, "{}", res.distance);
    }

    #[test]
    fn cylinder_sphere_distance() {
        let cyl: Shape<f64> = Shape::cylinder(0.5, 2.0).unwrap();
        let sph = Shape::sphere(0.25).unwrap();
        let pb = Pose::from_translation(Vec3::new(2.0, 0.0, 0.0));
        let res = gjk_query(&cyl, &Pose::identity(), &sph, &pb);
        assert!(!res.intersecting);
        assert!((res.distance - 1.25).abs() < 1e-7, "{}", res.distance);
    }
}
