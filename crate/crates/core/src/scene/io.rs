//! Scene file format: one YAML document per scene.
//!
//! ```yaml
//! format_version: 1
//! frame_id: world
//! objects:
//!   - name: shelf
//!     parent: world
//!     shape: {type: box, dims: [0.8, 0.3, 0.02]}
//!     pose: {xyz: [0.7, 0.0, 0.5], quat_wxyz: [1.0, 0.0, 0.0, 0.0]}
//! articulations:
//!   - urdf_file: cabinet.urdf
//!     joints: {door_left: 0.3}
//! ```
//!
//! Mesh shapes reference an ASCII vertices file (one `x y z` per line)
//! resolved relative to the scene file.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::geom::Shape;
use crate::kin::load_urdf;
use crate::math::{Pose, Quat, Vec3};
use crate::scalar::Scalar;

use super::{ArticulatedPart, Scene, SceneError, SceneObject, WORLD_FRAME};

pub(crate) const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct SceneDoc {
    format_version: u32,
    frame_id: String,
    #[serde(default)]
    objects: Vec<ObjectDoc>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    articulations: Vec<ArticulationDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
struct ObjectDoc {
    name: String,
    #[serde(default = "world_frame")]
    parent: String,
    shape: ShapeDoc,
    #[serde(default)]
    pose: PoseDoc,
}

fn world_frame() -> String {
    WORLD_FRAME.to_string()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub(crate) enum ShapeDoc {
    Box { dims: [f64; 3] },
    Sphere { radius: f64 },
    Cylinder { radius: f64, length: f64 },
    Mesh { vertices_file: String },
}

#[derive(Debug, Serialize, Deserialize)]
pub(crate) struct PoseDoc {
    pub xyz: [f64; 3],
    pub quat_wxyz: [f64; 4],
}

impl Default for PoseDoc {
    fn default() -> Self {
        Self {
            xyz: [0.0; 3],
            quat_wxyz: [1.0, 0.0, 0.0, 0.0],
        }
    }
}

impl PoseDoc {
    pub fn to_pose<S: Scalar>(&self) -> Pose<S> {
        Pose::new(
            Vec3::new(S::of(self.xyz[0]), S::of(self.xyz[1]), S::of(self.xyz[2])),
            Quat::from_wxyz(
                S::of(self.quat_wxyz[0]),
                S::of(self.quat_wxyz[1]),
                S::of(self.quat_wxyz[2]),
                S::of(self.quat_wxyz[3]),
            ),
        )
    }

    pub fn from_pose<S: Scalar>(pose: &Pose<S>) -> Self {
        Self {
            xyz: [
                pose.translation.x.as_f64(),
                pose.translation.y.as_f64(),
                pose.translation.z.as_f64(),
            ],
            quat_wxyz: [
                pose.rotation.w.as_f64(),
                pose.rotation.x.as_f64(),
                pose.rotation.y.as_f64(),
                pose.rotation.z.as_f64(),
            ],
        }
    }
}

#[derive(Debug, Serialize, Deserialize)]
struct ArticulationDoc {
    urdf_file: String,
    #[serde(default)]
    joints: BTreeMap<String, f64>,
}

pub(crate) fn yaml_parse_error(path: &Path, err: &serde_yaml::Error) -> SceneError {
    SceneError::ParseError {
        path: path.display().to_string(),
        location: err
            .location()
            .map(|l| format!("{}:{}", l.line(), l.column()))
            .unwrap_or_else(|| "?".into()),
        reason: err.to_string(),
    }
}

/// Loads a scene document and its referenced mesh/URDF files.
pub fn load_scene<S: Scalar>(path: &Path) -> Result<Scene<S>, SceneError> {
    let text = std::fs::read_to_string(path)?;
    let doc: SceneDoc = serde_yaml::from_str(&text).map_err(|e| yaml_parse_error(path, &e))?;
    if doc.frame_id != WORLD_FRAME {
        return Err(SceneError::SchemaError {
            path: path.display().to_string(),
            reason: format!("frame_id must be '{WORLD_FRAME}', got '{}'", doc.frame_id),
        });
    }
    let dir = path.parent().unwrap_or_else(|| Path::new("."));

    let mut objects = Vec::with_capacity(doc.objects.len());
    for obj in &doc.objects {
        let shape = shape_from_doc(&obj.shape, dir)?;
        objects.push(SceneObject {
            name: obj.name.clone(),
            shape,
            pose: obj.pose.to_pose(),
            parent: obj.parent.clone(),
        });
    }

    let mut articulated = Vec::with_capacity(doc.articulations.len());
    for art in &doc.articulations {
        let urdf_path = dir.join(&art.urdf_file);
        let model = Arc::new(load_urdf::<S>(&urdf_path)?);
        let config = model
            .joint_names()
            .iter()
            .zip(model.joint_limits())
            .map(|(name, lim)| {
                let v = art.joints.get(*name).copied().unwrap_or(0.0);
                S::of(v).max(lim[0]).min(lim[1])
            })
            .collect();
        articulated.push(ArticulatedPart {
            model,
            config,
            urdf_file: PathBuf::from(&art.urdf_file),
        });
    }

    Scene::new(objects, articulated)
}

pub(crate) fn shape_from_doc<S: Scalar>(doc: &ShapeDoc, dir: &Path) -> Result<Shape<S>, SceneError> {
    Ok(match doc {
        ShapeDoc::Box { dims } => Shape::cuboid(S::of(dims[0]), S::of(dims[1]), S::of(dims[2]))?,
        ShapeDoc::Sphere { radius } => Shape::sphere(S::of(*radius))?,
        ShapeDoc::Cylinder { radius, length } => {
            Shape::cylinder(S::of(*radius), S::of(*length))?
        }
        ShapeDoc::Mesh { vertices_file } => {
            let points = crate::kin::urdf_vertices::<S>(&dir.join(vertices_file))?;
            Shape::convex_mesh(&points)?
        }
    })
}

/// Saves a scene document. Mesh vertex files are written beside it.
pub fn save_scene<S: Scalar>(scene: &Scene<S>, path: &Path) -> Result<(), SceneError> {
    let dir = path.parent().unwrap_or_else(|| Path::new("."));
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "scene".into());

    let mut objects = Vec::with_capacity(scene.objects().len());
    for obj in scene.objects() {
        let shape = match &obj.shape {
            Shape::Box { extents } => ShapeDoc::Box {
                dims: [extents.x.as_f64(), extents.y.as_f64(), extents.z.as_f64()],
            },
            Shape::Sphere { radius } => ShapeDoc::Sphere {
                radius: radius.as_f64(),
            },
            Shape::Cylinder { radius, length } => ShapeDoc::Cylinder {
                radius: radius.as_f64(),
                length: length.as_f64(),
            },
            Shape::ConvexMesh(mesh) => {
                let file = format!("{stem}.{}.xyz", obj.name);
                let mut text = String::new();
                for v in mesh.vertices() {
                    text.push_str(&format!(
                        "{} {} {}\n",
                        v.x.as_f64(),
                        v.y.as_f64(),
                        v.z.as_f64()
                    ));
                }
                std::fs::write(dir.join(&file), text)?;
                ShapeDoc::Mesh {
                    vertices_file: file,
                }
            }
        };
        objects.push(ObjectDoc {
            name: obj.name.clone(),
            parent: obj.parent.clone(),
            shape,
            pose: PoseDoc::from_pose(&obj.pose),
        });
    }

    let articulations = scene
        .articulated()
        .iter()
        .map(|part| ArticulationDoc {
            urdf_file: part.urdf_file.display().to_string(),
            joints: part
                .model
                .joint_names()
                .iter()
                .zip(&part.config)
                .map(|(n, v)| (n.to_string(), v.as_f64()))
                .collect(),
        })
        .collect();

    let doc = SceneDoc {
        format_version: FORMAT_VERSION,
        frame_id: WORLD_FRAME.into(),
        objects,
        articulations,
    };
    let text = serde_yaml::to_string(&doc).expect("scene doc serializes");
    std::fs::write(path, text)?;
    Ok(())
}
