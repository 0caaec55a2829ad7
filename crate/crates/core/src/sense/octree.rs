//! Binary-occupancy octree over a cubic root region aligned to a global grid
//! of `resolution`-sized voxels. A leaf is occupied iff at least one inserted
//! point fell inside it; insertion is idempotent and the root grows on demand.

use crate::geom::{aabb_of, collide, Aabb, Shape};
use crate::math::{Pose, Vec3};
use crate::scalar::Scalar;

use super::SenseError;

/// Leaves per axis may not exceed 2^16; growth past that is an error.
const MAX_DEPTH: u32 = 16;
const INITIAL_DEPTH: u32 = 6;

#[derive(Clone, Debug)]
enum Node {
    Leaf,
    Internal(Box<[Option<Node>; 8]>),
}

impl Node {
    fn empty_internal() -> Self {
        Node::Internal(Box::new([const { None }; 8]))
    }
}

/// Sparse occupancy octree.
#[derive(Clone, Debug)]
pub struct OcTree<S> {
    resolution: S,
    /// Tree height; the root cube spans 2^depth leaves per axis.
    depth: u32,
    /// Voxel index of the root cube's minimum corner (global grid).
    origin: [i64; 3],
    root: Option<Node>,
    occupied: usize,
}

impl<S: Scalar> OcTree<S> {
    pub fn new(resolution: S) -> Result<Self, SenseError> {
        if resolution <= S::zero() || !resolution.is_finite() {
            return Err(SenseError::InvalidResolution(resolution.as_f64()));
        }
        Ok(Self {
            resolution,
            depth: INITIAL_DEPTH,
            origin: [0; 3],
            root: None,
            occupied: 0,
        })
    }

    pub fn resolution(&self) -> S {
        self.resolution
    }

    pub fn occupied_leaf_count(&self) -> usize {
        self.occupied
    }

    pub fn is_empty(&self) -> bool {
        self.occupied == 0
    }

    /// Root region covered by the tree.
    pub fn root_region(&self) -> Aabb<S> {
        let side = 1i64 << self.depth;
        let min = Vec3::new(
            S::of(self.origin[0] as f64) * self.resolution,
            S::of(self.origin[1] as f64) * self.resolution,
            S::of(self.origin[2] as f64) * self.resolution,
        );
        let extent = self.resolution * S::of(side as f64);
        Aabb::new(min, min + Vec3::splat(extent))
    }

    fn voxel_of(&self, p: Vec3<S>) -> [i64; 3] {
        [
            (p.x / self.resolution).floor().as_f64() as i64,
            (p.y / self.resolution).floor().as_f64() as i64,
            (p.z / self.resolution).floor().as_f64() as i64,
        ]
    }

    pub fn insert_point(&mut self, p: Vec3<S>) -> Result<(), SenseError> {
        if !p.is_finite() {
            return Err(SenseError::NonFinitePoint);
        }
        let idx = self.voxel_of(p);
        if self.root.is_none() {
            // Center the initial root region on the first point.
            let half = 1i64 << (INITIAL_DEPTH - 1);
            self.depth = INITIAL_DEPTH;
            self.origin = [idx[0] - half, idx[1] - half, idx[2] - half];
            self.root = Some(Node::empty_internal());
        }
        while !self.contains_voxel(idx) {
            self.grow_towards(idx)?;
        }
        self.insert_voxel(idx);
        Ok(())
    }

    fn contains_voxel(&self, idx: [i64; 3]) -> bool {
        let side = 1i64 << self.depth;
        (0..3).all(|a| idx[a] >= self.origin[a] && idx[a] < self.origin[a] + side)
    }

    /// Doubles the root cube so that it extends toward `idx`, keeping the old
    /// root as one octant. Grid alignment is preserved.
    fn grow_towards(&mut self, idx: [i64; 3]) -> Result<(), SenseError> {
        if self.depth >= MAX_DEPTH {
            return Err(SenseError::GrowthOverflow {
                max_leaves_per_axis: 1u64 << MAX_DEPTH,
            });
        }
        let side = 1i64 << self.depth;
        let mut child_octant = 0usize;
        let mut new_origin = self.origin;
        for axis in 0..3 {
            if idx[axis] < self.origin[axis] {
                new_origin[axis] -= side;
                child_octant |= 1 << axis;
            }
        }
        let old_root = self.root.take();
        let mut children: [Option<Node>; 8] = [const { None }; 8];
        children[child_octant] = old_root;
        self.root = Some(Node::Internal(Box::new(children)));
        self.origin = new_origin;
        self.depth += 1;
        Ok(())
    }

    fn insert_voxel(&mut self, idx: [i64; 3]) {
        let rel = [
            (idx[0] - self.origin[0]) as u64,
            (idx[1] - self.origin[1]) as u64,
            (idx[2] - self.origin[2]) as u64,
        ];
        let mut node = self.root.as_mut().expect("root exists");
        let mut level = self.depth;
        loop {
            level -= 1;
            let octant = (((rel[0] >> level) & 1)
                | (((rel[1] >> level) & 1) << 1)
                | (((rel[2] >> level) & 1) << 2)) as usize;
            let Node::Internal(children) = node else {
                unreachable!("leaves only occur at level 0");
            };
            if level == 0 {
                if children[octant].is_none() {
                    children[octant] = Some(Node::Leaf);
                    self.occupied += 1;
                }
                return;
            }
            node = children[octant].get_or_insert_with(Node::empty_internal);
        }
    }

    /// True iff the voxel containing `p` is occupied.
    pub fn contains_point(&self, p: Vec3<S>) -> bool {
        let idx = self.voxel_of(p);
        if self.root.is_none() || !self.contains_voxel(idx) {
            return false;
        }
        let rel = [
            (idx[0] - self.origin[0]) as u64,
            (idx[1] - self.origin[1]) as u64,
            (idx[2] - self.origin[2]) as u64,
        ];
        let mut node = self.root.as_ref().unwrap();
        let mut level = self.depth;
        loop {
            level -= 1;
            let octant = (((rel[0] >> level) & 1)
                | (((rel[1] >> level) & 1) << 1)
                | (((rel[2] >> level) & 1) << 2)) as usize;
            match node {
                Node::Internal(children) => match &children[octant] {
                    None => return false,
                    Some(child) => {
                        if level == 0 {
                            return matches!(child, Node::Leaf);
                        }
                        node = child;
                    }
                },
                Node::Leaf => unreachable!(),
            }
        }
    }

    /// Occupied leaves in depth-first order as (key, center).
    ///
    /// The key packs the 3-bit octant choices from root to leaf, prefixed by
    /// a leading 1 bit so that keys of different depths never collide.
    pub fn occupied_leaves(&self) -> Vec<(u64, Vec3<S>)> {
        let mut out = Vec::with_capacity(self.occupied);
        if let Some(root) = &self.root {
            self.walk(root, self.depth, [0; 3], 1, &mut out);
        }
        out
    }

    fn walk(
        &self,
        node: &Node,
        level: u32,
        rel: [u64; 3],
        key: u64,
        out: &mut Vec<(u64, Vec3<S>)>,
    ) {
        match node {
            Node::Leaf => {
                let half = S::of(0.5);
                let center = Vec3::new(
                    (S::of((self.origin[0] + rel[0] as i64) as f64) + half) * self.resolution,
                    (S::of((self.origin[1] + rel[1] as i64) as f64) + half) * self.resolution,
                    (S::of((self.origin[2] + rel[2] as i64) as f64) + half) * self.resolution,
                );
                out.push((key, center));
            }
            Node::Internal(children) => {
                for (octant, child) in children.iter().enumerate() {
                    let Some(child) = child else { continue };
                    let bit = level - 1;
                    let next = [
                        rel[0] | (((octant as u64) & 1) << bit),
                        rel[1] | ((((octant as u64) >> 1) & 1) << bit),
                        rel[2] | ((((octant as u64) >> 2) & 1) << bit),
                    ];
                    self.walk(child, level - 1, next, (key << 3) | octant as u64, out);
                }
            }
        }
    }

    /// AABB of the leaf cube centered at `center`.
    pub fn leaf_aabb(&self, center: Vec3<S>) -> Aabb<S> {
        let h = Vec3::splat(self.resolution * S::of(0.5));
        Aabb::new(center - h, center + h)
    }
}

/// Builds an occupancy tree from the union of several clouds.
pub fn build_octree<S: Scalar>(
    clouds: &[super::PointCloud<S>],
    resolution: S,
) -> Result<OcTree<S>, SenseError> {
    let mut tree = OcTree::new(resolution)?;
    for cloud in clouds {
        for &p in &cloud.points {
            tree.insert_point(p)?;
        }
    }
    Ok(tree)
}

/// True iff the posed shape intersects any occupied leaf cube.
pub fn octree_collision<S: Scalar>(shape: &Shape<S>, pose: &Pose<S>, tree: &OcTree<S>) -> bool {
    let Some(root) = &tree.root else {
        return false;
    };
    let shape_aabb = aabb_of(shape, pose);
    let leaf_box = Shape::Box {
        extents: Vec3::splat(tree.resolution),
    };
    descend(tree, root, tree.depth, [0; 3], shape, pose, &shape_aabb, &leaf_box)
}

#[allow(clippy::too_many_arguments)]
fn descend<S: Scalar>(
    tree: &OcTree<S>,
    node: &Node,
    level: u32,
    rel: [u64; 3],
    shape: &Shape<S>,
    pose: &Pose<S>,
    shape_aabb: &Aabb<S>,
    leaf_box: &Shape<S>,
) -> bool {
    // Cube spanned by this node on the voxel grid.
    let side = 1u64 << level;
    let min = Vec3::new(
        S::of((tree.origin[0] + rel[0] as i64) as f64) * tree.resolution,
        S::of((tree.origin[1] + rel[1] as i64) as f64) * tree.resolution,
        S::of((tree.origin[2] + rel[2] as i64) as f64) * tree.resolution,
    );
    let extent = tree.resolution * S::of(side as f64);
    let cube = Aabb::new(min, min + Vec3::splat(extent));
    if !cube.overlaps(shape_aabb) {
        return false;
    }
    match node {
        Node::Leaf => {
            let center_pose = Pose::from_translation(cube.center());
            collide(shape, pose, leaf_box, &center_pose).in_collision
        }
        Node::Internal(children) => children.iter().enumerate().any(|(octant, child)| {
            child.as_ref().is_some_and(|child| {
                let bit = level - 1;
                let next = [
                    rel[0] | (((octant as u64) & 1) << bit),
                    rel[1] | ((((octant as u64) >> 1) & 1) << bit),
                    rel[2] | ((((octant as u64) >> 2) & 1) << bit),
                ];
                descend(tree, child, level - 1, next, shape, pose, shape_aabb, leaf_box)
            })
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_single_leaf() {
        let mut tree = OcTree::new(0.1).unwrap();
        let p = Vec3::new(0.01, 0.01, 0.01);
        tree.insert_point(p).unwrap();
        assert_eq!(tree.occupied_leaf_count(), 1);
        assert!(tree.contains_point(p));
        let (_, center) = tree.occupied_leaves()[0];
        assert!(center.distance(Vec3::new(0.05, 0.05, 0.05)) < 1e-12);
    }

    #[test]
    fn insertion_is_idempotent() {
        let mut tree = OcTree::new(0.1).unwrap();
        for _ in 0..3 {
            tree.insert_point(Vec3::new(0.25, -0.13, 0.99)).unwrap();
        }
        assert_eq!(tree.occupied_leaf_count(), 1);
    }

    #[test]
    fn grows_to_cover_distant_points() {
        let mut tree = OcTree::new(0.1).unwrap();
        tree.insert_point(Vec3::new(0.0, 0.0, 0.0)).unwrap();
        tree.insert_point(Vec3::new(50.0, -42.0, 13.0)).unwrap();
        assert_eq!(tree.occupied_leaf_count(), 2);
        assert!(tree.contains_point(Vec3::new(50.0, -42.0, 13.0)));
        let region = tree.root_region();
        assert!(region.contains_point(Vec3::new(50.0, -42.0, 13.0)));
    }

    #[test]
    fn leaf_count_matches_voxel_hash_oracle() {
        use std::collections::HashSet;
        let mut tree = OcTree::new(0.05).unwrap();
        let mut oracle: HashSet<(i64, i64, i64)> = HashSet::new();
        let mut rng = crate::rng::CounterRng::new(17);
        for _ in 0..10_000 {
            let p = Vec3::new(
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
                rng.uniform(-1.0, 1.0),
            );
            tree.insert_point(p).unwrap();
            oracle.insert((
                (p.x / 0.05).floor() as i64,
                (p.y / 0.05).floor() as i64,
                (p.z / 0.05).floor() as i64,
            ));
        }
        assert_eq!(tree.occupied_leaf_count(), oracle.len());
    }

    #[test]
    fn collision_against_empty_tree_is_false() {
        let tree = OcTree::new(0.05).unwrap();
        let s: Shape<f64> = Shape::sphere(1.0).unwrap();
        assert!(!octree_collision(&s, &Pose::identity(), &tree));
    }

    #[test]
    fn sphere_centered_in_occupied_leaf_collides() {
        let mut tree = OcTree::new(0.05).unwrap();
        tree.insert_point(Vec3::new(0.51, 0.22, -0.13)).unwrap();
        let (_, center) = tree.occupied_leaves()[0];
        let s: Shape<f64> = Shape::sphere(0.01).unwrap();
        assert!(octree_collision(
            &s,
            &Pose::from_translation(center),
            &tree
        ));
        // Far away: no collision.
        assert!(!octree_collision(
            &s,
            &Pose::from_translation(center + Vec3::new(1.0, 0.0, 0.0)),
            &tree
        ));
    }

    #[test]
    fn growth_overflow_is_reported() {
        let mut tree = OcTree::new(0.001).unwrap();
        tree.insert_point(Vec3::new(0.0, 0.0, 0.0)).unwrap();
        // 2^16 leaves at 1 mm is ~65 m; 1 km is far outside.
        let err = tree.insert_point(Vec3::new(1000.0, 0.0, 0.0)).unwrap_err();
        assert!(matches!(err, SenseError::GrowthOverflow { .. }));
    }
}
