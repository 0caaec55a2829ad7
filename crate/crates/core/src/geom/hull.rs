//! 3D convex hull (quickhull) used to convexify mesh input and to provide
//! triangle faces for ray casting.

use crate::math::Vec3;
use crate::scalar::Scalar;

use super::ShapeError;

#[derive(Clone, Debug)]
struct Face<S> {
    verts: [usize; 3],
    normal: Vec3<S>,
    offset: S,
    outside: Vec<usize>,
    alive: bool,
}

impl<S: Scalar> Face<S> {
    fn new(verts: [usize; 3], points: &[Vec3<S>], interior: Vec3<S>) -> Self {
        let [a, b, c] = verts;
        let mut normal = (points[b] - points[a]).cross(points[c] - points[a]);
        let mut v = verts;
        if normal.dot(interior - points[a]) > S::zero() {
            v.swap(1, 2);
            normal = -normal;
        }
        let normal = normal.try_normalized().unwrap_or_else(Vec3::unit_x);
        Self {
            verts: v,
            normal,
            offset: normal.dot(points[v[0]]),
            outside: Vec::new(),
            alive: true,
        }
    }

    fn distance(&self, p: Vec3<S>) -> S {
        self.normal.dot(p) - self.offset
    }
}

/// Convex hull as compacted vertices plus outward-oriented triangles indexing
/// into them.
#[derive(Clone, Debug, PartialEq)]
pub struct Hull<S> {
    pub vertices: Vec<Vec3<S>>,
    pub triangles: Vec<[u32; 3]>,
}

/// Computes the convex hull of `points`. Fails when the input has fewer than
/// four non-coplanar points.
pub fn convex_hull<S: Scalar>(points: &[Vec3<S>]) -> Result<Hull<S>, ShapeError> {
    if points.len() < 4 {
        return Err(ShapeError::DegenerateMesh(
            "mesh needs at least 4 vertices".into(),
        ));
    }
    let bb_min = points
        .iter()
        .copied()
        .reduce(|a, b| a.min_componentwise(b))
        .unwrap();
    let bb_max = points
        .iter()
        .copied()
        .reduce(|a, b| a.max_componentwise(b))
        .unwrap();
    let diag = (bb_max - bb_min).norm();
    let eps = (diag * S::of(1e-10)).max(diag * S::epsilon() * S::of(64.0));

    let (i0, i1, i2, i3) = initial_tetrahedron(points, eps)?;
    let interior = (points[i0] + points[i1] + points[i2] + points[i3]) * S::of(0.25);

    let mut faces = vec![
        Face::new([i0, i1, i2], points, interior),
        Face::new([i0, i1, i3], points, interior),
        Face::new([i0, i2, i3], points, interior),
        Face::new([i1, i2, i3], points, interior),
    ];

    for (idx, &p) in points.iter().enumerate() {
        if idx == i0 || idx == i1 || idx == i2 || idx == i3 {
            continue;
        }
        if let Some(f) = faces.iter_mut().find(|f| f.distance(p) > eps) {
            f.outside.push(idx);
        }
    }

    loop {
        let Some(face_idx) = faces.iter().position(|f| f.alive && !f.outside.is_empty()) else {
            break;
        };
        let apex = *faces[face_idx]
            .outside
            .iter()
            .max_by(|&&a, &&b| {
                faces[face_idx]
                    .distance(points[a])
                    .partial_cmp(&faces[face_idx].distance(points[b]))
                    .unwrap()
            })
            .unwrap();
        let apex_point = points[apex];

        let visible: Vec<usize> = (0..faces.len())
            .filter(|&i| faces[i].alive && faces[i].distance(apex_point) > eps)
            .collect();

        // Horizon: directed edges of visible faces whose reverse edge is not
        // shared with another visible face.
        let mut edges: Vec<(usize, usize)> = Vec::new();
        for &fi in &visible {
            let [a, b, c] = faces[fi].verts;
            edges.extend_from_slice(&[(a, b), (b, c), (c, a)]);
        }
        let horizon: Vec<(usize, usize)> = edges
            .iter()
            .copied()
            .filter(|&(a, b)| !edges.contains(&(b, a)))
            .collect();

        let mut orphans: Vec<usize> = Vec::new();
        for &fi in &visible {
            faces[fi].alive = false;
            orphans.append(&mut faces[fi].outside);
        }
        orphans.retain(|&i| i != apex);
        orphans.sort_unstable();
        orphans.dedup();

        let new_start = faces.len();
        for (a, b) in horizon {
            faces.push(Face::new([a, b, apex], points, interior));
        }
        // Orphans need only be re-tested against the cone of new faces; points
        // inside all of them are interior to the grown hull.
        for orphan in orphans {
            let p = points[orphan];
            if let Some(f) = faces[new_start..]
                .iter_mut()
                .find(|f| f.alive && f.distance(p) > eps)
            {
                f.outside.push(orphan);
            }
        }
    }

    // Compact vertices to the ones referenced by live faces.
    let mut remap = vec![u32::MAX; points.len()];
    let mut vertices = Vec::new();
    let mut triangles = Vec::new();
    for face in faces.iter().filter(|f| f.alive) {
        let mut tri = [0u32; 3];
        for (slot, &vi) in tri.iter_mut().zip(face.verts.iter()) {
            if remap[vi] == u32::MAX {
                remap[vi] = vertices.len() as u32;
                vertices.push(points[vi]);
            }
            *slot = remap[vi];
        }
        triangles.push(tri);
    }
    Ok(Hull {
        vertices,
        triangles,
    })
}

fn initial_tetrahedron<S: Scalar>(
    points: &[Vec3<S>],
    eps: S,
) -> Result<(usize, usize, usize, usize), ShapeError> {
    // Farthest pair among the six axis extremes.
    let mut extremes = [0usize; 6];
    for (i, p) in points.iter().enumerate() {
        if p.x < points[extremes[0]].x {
            extremes[0] = i;
        }
        if p.x > points[extremes[1]].x {
            extremes[1] = i;
        }
        if p.y < points[extremes[2]].y {
            extremes[2] = i;
        }
        if p.y > points[extremes[3]].y {
            extremes[3] = i;
        }
        if p.z < points[extremes[4]].z {
            extremes[4] = i;
        }
        if p.z > points[extremes[5]].z {
            extremes[5] = i;
        }
    }
    let (mut i0, mut i1, mut best) = (0, 0, S::zero());
    for &a in &extremes {
        for &b in &extremes {
            let d = points[a].distance(points[b]);
            if d > best {
                best = d;
                i0 = a;
                i1 = b;
            }
        }
    }
    if best <= eps {
        return Err(ShapeError::DegenerateMesh("all vertices coincide".into()));
    }

    let dir = (points[i1] - points[i0]).normalized();
    let line_dist = |p: Vec3<S>| {
        let d = p - points[i0];
        (d - dir * d.dot(dir)).norm()
    };
    let i2 = (0..points.len())
        .max_by(|&a, &b| line_dist(points[a]).partial_cmp(&line_dist(points[b])).unwrap())
        .unwrap();
    if line_dist(points[i2]) <= eps {
        return Err(ShapeError::DegenerateMesh("vertices are collinear".into()));
    }

    let normal = (points[i1] - points[i0])
        .cross(points[i2] - points[i0])
        .normalized();
    let plane_dist = |p: Vec3<S>| (p - points[i0]).dot(normal).abs();
    let i3 = (0..points.len())
        .max_by(|&a, &b| {
            plane_dist(points[a])
                .partial_cmp(&plane_dist(points[b]))
                .unwrap()
        })
        .unwrap();
    if plane_dist(points[i3]) <= eps {
        return Err(ShapeError::DegenerateMesh("vertices are coplanar".into()));
    }
    Ok((i0, i1, i2, i3))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cube_corners() -> Vec<Vec3<f64>> {
        let mut v = Vec::new();
        for &x in &[-1.0, 1.0] {
            for &y in &[-1.0, 1.0] {
                for &z in &[-1.0, 1.0] {
                    v.push(Vec3::new(x, y, z));
                }
            }
        }
        v
    }

    #[test]
    fn cube_hull_has_eight_vertices_twelve_faces() {
        let hull = convex_hull(&cube_corners()).unwrap();
        assert_eq!(hull.vertices.len(), 8);
        assert_eq!(hull.triangles.len(), 12);
    }

    #[test]
    fn interior_points_are_dropped() {
        let mut pts = cube_corners();
        pts.push(Vec3::new(0.0, 0.0, 0.0));
        pts.push(Vec3::new(0.2, 0.1, -0.3));
        let hull = convex_hull(&pts).unwrap();
        assert_eq!(hull.vertices.len(), 8);
    }

    #[test]
    fn coplanar_input_is_rejected() {
        let pts = vec![
            Vec3::new(0.0, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 0.0),
            Vec3::new(0.0, 1.0, 0.0),
            Vec3::new(1.0, 1.0, 0.0),
        ];
        assert!(matches!(
            convex_hull(&pts),
            Err(ShapeError::DegenerateMesh(_))
        ));
    }

    #[test]
    fn hull_faces_enclose_all_input_points() {
        // Deterministic pseudo-random blob.
        let mut pts = Vec::new();
        let mut rng = crate::rng::CounterRng::new(5);
        for _ in 0..200 {
            pts.push(Vec3::new(
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            ));
        }
        let hull = convex_hull(&pts).unwrap();
        for p in &pts {
            for tri in &hull.triangles {
                let a = hull.vertices[tri[0] as usize];
                let b = hull.vertices[tri[1] as usize];
                let c = hull.vertices[tri[2] as usize];
                let n = (b - a).cross(c - a).normalized();
                assert!(n.dot(*p - a) < 1e-8, "point outside hull face");
            }
        }
    }
}
