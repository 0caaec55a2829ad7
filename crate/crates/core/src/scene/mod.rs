//! Scene model: named collision objects in a parent-frame forest, optional
//! articulated (URDF) sub-scenes, and an optional sensed octree.

mod io;

pub use io::{load_scene, save_scene};

use std::collections::HashMap;
use std::path::PathBuf;
use std::sync::Arc;

use thiserror::Error;

use crate::geom::{Shape, ShapeError};
use crate::kin::{JointConfig, KinError, KinematicModel};
use crate::math::Pose;
use crate::scalar::Scalar;
use crate::sense::OcTree;

/// Name of the root frame every parent chain must reach.
pub const WORLD_FRAME: &str = "world";

#[derive(Debug, Error)]
pub enum SceneError {
    #[error("unknown object '{0}'")]
    UnknownObject(String),
    #[error("duplicate object name '{0}'")]
    DuplicateName(String),
    #[error("parent cycle involving '{0}'")]
    CycleError(String),
    #[error("object '{object}' references unknown parent '{parent}'")]
    UnknownParent { object: String, parent: String },
    #[error("cannot remove '{0}': other objects are parented to it")]
    RemoveWithChildren(String),
    #[error("articulation joint '{joint}' value {value} outside limits")]
    ConfigOutOfLimits { joint: String, value: f64 },
    #[error("parse error at {path}:{location}: {reason}")]
    ParseError {
        path: String,
        location: String,
        reason: String,
    },
    #[error("schema error in {path}: {reason}")]
    SchemaError { path: String, reason: String },
    #[error(transparent)]
    Shape(#[from] ShapeError),
    #[error(transparent)]
    Kin(#[from] KinError),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// A named collision object posed relative to its parent frame.
#[derive(Clone, Debug)]
pub struct SceneObject<S> {
    pub name: String,
    pub shape: Shape<S>,
    /// Pose in the parent frame.
    pub pose: Pose<S>,
    /// `"world"` or the name of another object.
    pub parent: String,
}

/// An articulated sub-scene at a fixed joint configuration.
#[derive(Clone, Debug)]
pub struct ArticulatedPart<S> {
    pub model: Arc<KinematicModel<S>>,
    pub config: JointConfig<S>,
    /// Source path kept for serialization.
    pub urdf_file: PathBuf,
}

/// Immutable scene snapshot. World poses are resolved at construction;
/// "mutation" builds a new scene.
#[derive(Clone, Debug)]
pub struct Scene<S> {
    objects: Vec<SceneObject<S>>,
    world_poses: Vec<Pose<S>>,
    articulated: Vec<ArticulatedPart<S>>,
    octree: Option<OcTree<S>>,
}

impl<S: Scalar> Scene<S> {
    pub fn empty() -> Self {
        Self {
            objects: Vec::new(),
            world_poses: Vec::new(),
            articulated: Vec::new(),
            octree: None,
        }
    }

    pub fn new(
        objects: Vec<SceneObject<S>>,
        articulated: Vec<ArticulatedPart<S>>,
    ) -> Result<Self, SceneError> {
        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, obj) in objects.iter().enumerate() {
            if obj.name == WORLD_FRAME {
                return Err(SceneError::DuplicateName(WORLD_FRAME.into()));
            }
            if index.insert(obj.name.as_str(), i).is_some() {
                return Err(SceneError::DuplicateName(obj.name.clone()));
            }
        }

        // Resolve world poses; detects unknown parents and cycles.
        let mut world_poses: Vec<Option<Pose<S>>> = vec![None; objects.len()];
        for i in 0..objects.len() {
            let mut chain = Vec::new();
            let mut cur = i;
            loop {
                if world_poses[cur].is_some() {
                    break;
                }
                if chain.contains(&cur) {
                    return Err(SceneError::CycleError(objects[cur].name.clone()));
                }
                chain.push(cur);
                if objects[cur].parent == WORLD_FRAME {
                    break;
                }
                cur = *index.get(objects[cur].parent.as_str()).ok_or_else(|| {
                    SceneError::UnknownParent {
                        object: objects[cur].name.clone(),
                        parent: objects[cur].parent.clone(),
                    }
                })?;
            }
            for &link in chain.iter().rev() {
                let parent_pose = if objects[link].parent == WORLD_FRAME {
                    Pose::identity()
                } else {
                    world_poses[index[objects[link].parent.as_str()]].unwrap()
                };
                world_poses[link] = Some(parent_pose.compose(&objects[link].pose));
            }
        }
        let world_poses = world_poses.into_iter().map(Option::unwrap).collect();

        for part in &articulated {
            validate_config(&part.model, &part.config)?;
        }

        Ok(Self {
            objects,
            world_poses,
            articulated,
            octree: None,
        })
    }

    pub fn objects(&self) -> &[SceneObject<S>] {
        &self.objects
    }

    pub fn articulated(&self) -> &[ArticulatedPart<S>] {
        &self.articulated
    }

    pub fn octree(&self) -> Option<&OcTree<S>> {
        self.octree.as_ref()
    }

    pub fn with_octree(mut self, octree: Option<OcTree<S>>) -> Self {
        self.octree = octree;
        self
    }

    /// Scene without its geometric objects; collision falls back to the octree.
    pub fn sensed_only(&self) -> Self {
        Self {
            objects: Vec::new(),
            world_poses: Vec::new(),
            articulated: Vec::new(),
            octree: self.octree.clone(),
        }
    }

    pub fn object_index(&self, name: &str) -> Result<usize, SceneError> {
        self.objects
            .iter()
            .position(|o| o.name == name)
            .ok_or_else(|| SceneError::UnknownObject(name.to_string()))
    }

    /// World pose of a named object (composition of its parent chain).
    pub fn world_pose(&self, name: &str) -> Result<Pose<S>, SceneError> {
        Ok(self.world_poses[self.object_index(name)?])
    }

    /// Rebuilds the scene with one object's parent-relative pose replaced.
    pub fn with_object_pose(&self, name: &str, pose: Pose<S>) -> Result<Self, SceneError> {
        let idx = self.object_index(name)?;
        let mut objects = self.objects.clone();
        objects[idx].pose = pose;
        Ok(Self::new(objects, self.articulated.clone())?.with_octree(self.octree.clone()))
    }

    /// Rebuilds the scene with one articulation's configuration replaced.
    pub fn with_articulation_config(
        &self,
        part_index: usize,
        config: JointConfig<S>,
    ) -> Result<Self, SceneError> {
        let mut articulated = self.articulated.clone();
        validate_config(&articulated[part_index].model, &config)?;
        articulated[part_index].config = config;
        Ok(Self::new(self.objects.clone(), articulated)?.with_octree(self.octree.clone()))
    }

    /// Removes an object. Rejected while other objects are parented to it.
    pub fn without_object(&self, name: &str) -> Result<Self, SceneError> {
        let idx = self.object_index(name)?;
        if self.objects.iter().any(|o| o.parent == name) {
            return Err(SceneError::RemoveWithChildren(name.to_string()));
        }
        let mut objects = self.objects.clone();
        objects.remove(idx);
        Ok(Self::new(objects, self.articulated.clone())?.with_octree(self.octree.clone()))
    }

    /// All world-posed obstacle shapes: geometric objects plus the link
    /// geometry of articulated parts at their configurations.
    pub fn obstacles(&self) -> Vec<(&Shape<S>, Pose<S>)> {
        let mut out: Vec<(&Shape<S>, Pose<S>)> = self
            .objects
            .iter()
            .zip(&self.world_poses)
            .map(|(o, p)| (&o.shape, *p))
            .collect();
        for part in &self.articulated {
            let poses = part
                .model
                .forward_kinematics(&part.config)
                .expect("validated configuration");
            for (link, link_pose) in part.model.links().iter().zip(&poses) {
                for ls in &link.collisions {
                    out.push((&ls.shape, link_pose.compose(&ls.local_pose)));
                }
            }
        }
        out
    }
}

fn validate_config<S: Scalar>(
    model: &KinematicModel<S>,
    config: &[S],
) -> Result<(), SceneError> {
    if config.len() != model.dof() {
        return Err(SceneError::Kin(KinError::DimensionMismatch {
            expected: model.dof(),
            got: config.len(),
        }));
    }
    for ((lim, &v), name) in model
        .joint_limits()
        .iter()
        .zip(config)
        .zip(model.joint_names())
    {
        if v < lim[0] || v > lim[1] {
            return Err(SceneError::ConfigOutOfLimits {
                joint: name.to_string(),
                value: v.as_f64(),
            });
        }
    }
    Ok(())
}
