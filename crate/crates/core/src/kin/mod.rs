//! URDF-style kinematic models: forward kinematics, Jacobians, joint limits
//! and link collision geometry.

mod collision;
mod urdf;

pub use collision::{robot_scene_collision, self_collision, Attachment};
pub use urdf::{load_urdf, parse_urdf};

use std::collections::HashMap;

use thiserror::Error;

use crate::geom::{Shape, ShapeError};
use crate::math::{Pose, Vec3};
use crate::scalar::Scalar;

/// Joint values for the non-fixed joints of a model, in topological order.
pub type JointConfig<S> = Vec<S>;

#[derive(Debug, Error)]
pub enum KinError {
    #[error("xml error: {0}")]
    Xml(String),
    #[error("kinematic loop involving link '{0}'")]
    KinematicLoop(String),
    #[error("revolute/prismatic joint '{0}' has no limit element")]
    MissingLimit(String),
    #[error("unknown link '{0}'")]
    UnknownLink(String),
    #[error("joint config has {got} values, model has {expected} non-fixed joints")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum JointKind {
    Revolute,
    Prismatic,
    Fixed,
}

/// Collision shape attached to a link, in the link's frame.
#[derive(Clone, Debug)]
pub struct LinkShape<S> {
    pub shape: Shape<S>,
    pub local_pose: Pose<S>,
}

#[derive(Clone, Debug)]
pub struct Link<S> {
    pub name: String,
    pub collisions: Vec<LinkShape<S>>,
}

#[derive(Clone, Debug)]
pub struct Joint<S> {
    pub name: String,
    pub kind: JointKind,
    pub parent_link: usize,
    pub child_link: usize,
    /// Transform from the parent link frame to the joint (= child pre-motion) frame.
    pub origin: Pose<S>,
    /// Motion axis in the joint frame; unit length for non-fixed joints.
    pub axis: Vec3<S>,
    /// [lower, upper]; zero for fixed joints.
    pub limits: [S; 2],
}

/// Articulated rigid-body tree with collision geometry.
#[derive(Clone, Debug)]
pub struct KinematicModel<S> {
    name: String,
    links: Vec<Link<S>>,
    /// Topologically sorted: a joint's parent link always precedes its child.
    joints: Vec<Joint<S>>,
    base_link: usize,
    tips: Vec<usize>,
    base_offset: Pose<S>,
    /// Indices into `joints` of the non-fixed joints, in topological order.
    movable: Vec<usize>,
    link_index: HashMap<String, usize>,
    /// Joint (index) whose child is the given link; `None` for the base.
    parent_joint: Vec<Option<usize>>,
}

impl<S: Scalar> KinematicModel<S> {
    /// Validates and assembles a model from links and joints.
    pub fn new(name: String, links: Vec<Link<S>>, joints: Vec<Joint<S>>) -> Result<Self, KinError> {
        if links.is_empty() {
            return Err(KinError::InvalidModel("model has no links".into()));
        }
        let mut parent_joint: Vec<Option<usize>> = vec![None; links.len()];
        for (ji, joint) in joints.iter().enumerate() {
            if joint.parent_link >= links.len() || joint.child_link >= links.len() {
                return Err(KinError::InvalidModel(format!(
                    "joint '{}' references missing link",
                    joint.name
                )));
            }
            if parent_joint[joint.child_link].is_some() {
                return Err(KinError::KinematicLoop(
                    links[joint.child_link].name.clone(),
                ));
            }
            parent_joint[joint.child_link] = Some(ji);
            if joint.kind != JointKind::Fixed {
                if (joint.axis.norm() - S::one()).abs() > S::of(1e-9) {
                    return Err(KinError::InvalidModel(format!(
                        "joint '{}' axis is not unit length",
                        joint.name
                    )));
                }
                if joint.limits[0] > joint.limits[1] {
                    return Err(KinError::InvalidModel(format!(
                        "joint '{}' has lower > upper limit",
                        joint.name
                    )));
                }
            }
        }

        let roots: Vec<usize> = (0..links.len())
            .filter(|&i| parent_joint[i].is_none())
            .collect();
        let base_link = match roots.as_slice() {
            [root] => *root,
            [] => return Err(KinError::KinematicLoop(links[0].name.clone())),
            _ => {
                return Err(KinError::InvalidModel(format!(
                    "multiple root links: {}",
                    roots
                        .iter()
                        .map(|&i| links[i].name.as_str())
                        .collect::<Vec<_>>()
                        .join(", ")
                )))
            }
        };

        // Cycle check: every link must reach the base through parent joints.
        for start in 0..links.len() {
            let mut cur = start;
            let mut steps = 0;
            while let Some(ji) = parent_joint[cur] {
                cur = joints[ji].parent_link;
                steps += 1;
                if steps > links.len() {
                    return Err(KinError::KinematicLoop(links[start].name.clone()));
                }
            }
        }

        // Topological joint order via BFS from the base.
        let mut children: Vec<Vec<usize>> = vec![Vec::new(); links.len()];
        for (ji, joint) in joints.iter().enumerate() {
            children[joint.parent_link].push(ji);
        }
        let mut order = Vec::with_capacity(joints.len());
        let mut queue = vec![base_link];
        while let Some(link) = queue.pop() {
            for &ji in &children[link] {
                order.push(ji);
                queue.push(joints[ji].child_link);
            }
        }
        if order.len() != joints.len() {
            return Err(KinError::KinematicLoop(links[base_link].name.clone()));
        }
        let joints: Vec<Joint<S>> = order.into_iter().map(|ji| joints[ji].clone()).collect();

        let mut parent_joint: Vec<Option<usize>> = vec![None; links.len()];
        for (ji, joint) in joints.iter().enumerate() {
            parent_joint[joint.child_link] = Some(ji);
        }
        let movable: Vec<usize> = joints
            .iter()
            .enumerate()
            .filter(|(_, j)| j.kind != JointKind::Fixed)
            .map(|(i, _)| i)
            .collect();

        let mut has_child = vec![false; links.len()];
        for joint in &joints {
            has_child[joint.parent_link] = true;
        }
        let tips: Vec<usize> = (0..links.len()).filter(|&i| !has_child[i]).collect();

        let mut link_index = HashMap::new();
        for (i, link) in links.iter().enumerate() {
            if link_index.insert(link.name.clone(), i).is_some() {
                return Err(KinError::InvalidModel(format!(
                    "duplicate link name '{}'",
                    link.name
                )));
            }
        }

        Ok(Self {
            name,
            links,
            joints,
            base_link,
            tips,
            base_offset: Pose::identity(),
            movable,
            link_index,
            parent_joint,
        })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn links(&self) -> &[Link<S>] {
        &self.links
    }

    pub fn joints(&self) -> &[Joint<S>] {
        &self.joints
    }

    pub fn base_link(&self) -> usize {
        self.base_link
    }

    /// Leaf links, the default end effectors.
    pub fn tip_names(&self) -> Vec<&str> {
        self.tips.iter().map(|&i| self.links[i].name.as_str()).collect()
    }

    pub fn base_offset(&self) -> &Pose<S> {
        &self.base_offset
    }

    pub fn set_base_offset(&mut self, pose: Pose<S>) {
        self.base_offset = pose;
    }

    /// Number of non-fixed joints.
    pub fn dof(&self) -> usize {
        self.movable.len()
    }

    pub fn link_index(&self, name: &str) -> Result<usize, KinError> {
        self.link_index
            .get(name)
            .copied()
            .ok_or_else(|| KinError::UnknownLink(name.to_string()))
    }

    pub fn link_name(&self, index: usize) -> &str {
        &self.links[index].name
    }

    /// Names of the non-fixed joints in configuration order.
    pub fn joint_names(&self) -> Vec<&str> {
        self.movable
            .iter()
            .map(|&ji| self.joints[ji].name.as_str())
            .collect()
    }

    /// [lower, upper] per non-fixed joint, in configuration order.
    pub fn joint_limits(&self) -> Vec<[S; 2]> {
        self.movable.iter().map(|&ji| self.joints[ji].limits).collect()
    }

    pub fn within_limits(&self, q: &[S]) -> bool {
        q.len() == self.dof()
            && self
                .joint_limits()
                .iter()
                .zip(q)
                .all(|(lim, &v)| v >= lim[0] && v <= lim[1])
    }

    /// Configuration with every joint at the midpoint of its limits.
    pub fn neutral_config(&self) -> JointConfig<S> {
        self.joint_limits()
            .iter()
            .map(|lim| (lim[0] + lim[1]) * S::of(0.5))
            .collect()
    }

    /// World pose of every link at configuration `q`, indexed by link.
    pub fn forward_kinematics(&self, q: &[S]) -> Result<Vec<Pose<S>>, KinError> {
        if q.len() != self.dof() {
            return Err(KinError::DimensionMismatch {
                expected: self.dof(),
                got: q.len(),
            });
        }
        let mut poses = vec![Pose::identity(); self.links.len()];
        poses[self.base_link] = self.base_offset;
        let mut qi = 0usize;
        for joint in &self.joints {
            let motion = match joint.kind {
                JointKind::Fixed => Pose::identity(),
                JointKind::Revolute => {
                    let p = Pose::from_rotation(crate::math::Quat::from_axis_angle(
                        joint.axis,
                        q[qi],
                    ));
                    qi += 1;
                    p
                }
                JointKind::Prismatic => {
                    let p = Pose::from_translation(joint.axis * q[qi]);
                    qi += 1;
                    p
                }
            };
            poses[joint.child_link] = poses[joint.parent_link]
                .compose(&joint.origin)
                .compose(&motion);
        }
        Ok(poses)
    }

    /// World pose of one named link.
    pub fn link_pose(&self, q: &[S], link: &str) -> Result<Pose<S>, KinError> {
        let idx = self.link_index(link)?;
        Ok(self.forward_kinematics(q)?[idx])
    }

    /// Geometric Jacobian of the tip link origin: 6×dof, rows are
    /// (linear x,y,z, angular x,y,z), returned row-major.
    pub fn jacobian(&self, q: &[S], tip_link: &str) -> Result<Vec<S>, KinError> {
        let tip = self.link_index(tip_link)?;
        let poses = self.forward_kinematics(q)?;
        let tip_pos = poses[tip].translation;
        let n = self.dof();
        let mut jac = vec![S::zero(); 6 * n];

        // Joints on the base→tip chain.
        let mut on_path = vec![false; self.joints.len()];
        let mut cur = tip;
        while let Some(ji) = self.parent_joint[cur] {
            on_path[ji] = true;
            cur = self.joints[ji].parent_link;
        }

        for (col, &ji) in self.movable.iter().enumerate() {
            if !on_path[ji] {
                continue;
            }
            let joint = &self.joints[ji];
            let joint_frame = poses[joint.parent_link].compose(&joint.origin);
            let axis_world = joint_frame.rotation.rotate(joint.axis);
            match joint.kind {
                JointKind::Revolute => {
                    let lever = tip_pos - joint_frame.translation;
                    let lin = axis_world.cross(lever);
                    for r in 0..3 {
                        jac[r * n + col] = lin[r];
                        jac[(r + 3) * n + col] = axis_world[r];
                    }
                }
                JointKind::Prismatic => {
                    for r in 0..3 {
                        jac[r * n + col] = axis_world[r];
                    }
                }
                JointKind::Fixed => unreachable!(),
            }
        }
        Ok(jac)
    }

    /// Pairs of link indices exempt from self-collision (joined by a joint).
    pub fn adjacent_pairs(&self) -> Vec<(usize, usize)> {
        self.joints
            .iter()
            .map(|j| {
                let (a, b) = (j.parent_link, j.child_link);
                if a < b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::math::Quat;

    pub(crate) fn planar_two_link() -> KinematicModel<f64> {
        let links = vec![
            Link {
                name: "base".into(),
                collisions: vec![],
            },
            Link {
                name: "link1".into(),
                collisions: vec![],
            },
            Link {
                name: "link2".into(),
                collisions: vec![],
            },
            Link {
                name: "tip".into(),
                collisions: vec![],
            },
        ];
        let joints = vec![
            Joint {
                name: "j1".into(),
                kind: JointKind::Revolute,
                parent_link: 0,
                child_link: 1,
                origin: Pose::identity(),
                axis: Vec3::unit_z(),
                limits: [-std::f64::consts::PI, std::f64::consts::PI],
            },
            Joint {
                name: "j2".into(),
                kind: JointKind::Revolute,
                parent_link: 1,
                child_link: 2,
                origin: Pose::from_translation(Vec3::new(1.0, 0.0, 0.0)),
                axis: Vec3::unit_z(),
                limits: [-std::f64::consts::PI, std::f64::consts::PI],
            },
            Joint {
                name: "fixed_tip".into(),
                kind: JointKind::Fixed,
                parent_link: 2,
                child_link: 3,
                origin: Pose::from_translation(Vec3::new(1.0, 0.0, 0.0)),
                axis: Vec3::unit_x(),
                limits: [0.0, 0.0],
            },
        ];
        KinematicModel::new("planar2".into(), links, joints).unwrap()
    }

    #[test]
    fn fk_straight_and_bent() {
        let model = planar_two_link();
        let tip = model.link_pose(&[0.0, 0.0], "tip").unwrap();
        assert!(tip.translation.distance(Vec3::new(2.0, 0.0, 0.0)) < 1e-9);

        let tip = model
            .link_pose(&[std::f64::consts::FRAC_PI_2, 0.0], "tip")
            .unwrap();
        assert!(tip.translation.distance(Vec3::new(0.0, 2.0, 0.0)) < 1e-9);
    }

    #[test]
    fn jacobian_analytic_columns() {
        let model = planar_two_link();
        let n = model.dof();
        let jac = model.jacobian(&[0.0, 0.0], "tip").unwrap();
        // ∂y/∂q1 = 2 (row 1, col 0), ∂y/∂q2 = 1 (row 1, col 1)
        assert!((jac[n + 0] - 2.0).abs() < 1e-12);
        assert!((jac[n + 1] - 1.0).abs() < 1e-12);
        // ∂x/∂q at the straight config is 0.
        assert!(jac[0].abs() < 1e-12 && jac[1].abs() < 1e-12);
    }

    #[test]
    fn dimension_mismatch_rejected() {
        let model = planar_two_link();
        assert!(matches!(
            model.forward_kinematics(&[0.0]),
            Err(KinError::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn base_offset_shifts_everything() {
        let mut model = planar_two_link();
        model.set_base_offset(Pose::new(
            Vec3::new(0.0, 0.0, 1.0),
            Quat::from_axis_angle(Vec3::unit_z(), std::f64::consts::PI),
        ));
        let tip = model.link_pose(&[0.0, 0.0], "tip").unwrap();
        assert!(tip.translation.distance(Vec3::new(-2.0, 0.0, 1.0)) < 1e-9);
    }

    #[test]
    fn duplicate_child_means_loop() {
        let links = vec![
            Link {
                name: "a".into(),
                collisions: vec![],
            },
            Link {
                name: "b".into(),
                collisions: vec![],
            },
        ];
        let mk_joint = |name: &str| Joint::<f64> {
            name: name.into(),
            kind: JointKind::Fixed,
            parent_link: 0,
            child_link: 1,
            origin: Pose::identity(),
            axis: Vec3::unit_x(),
            limits: [0.0, 0.0],
        };
        let err = KinematicModel::new(
            "loop".into(),
            links,
            vec![mk_joint("j1"), mk_joint("j2")],
        )
        .unwrap_err();
        assert!(matches!(err, KinError::KinematicLoop(_)));
    }
}
