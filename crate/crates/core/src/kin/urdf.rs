//! Parser for the URDF subset used by the fixtures and dataset articulations.
//!
//! Supported: `link` with `collision` geometry (box, sphere, cylinder, mesh),
//! `joint` of type revolute/prismatic/fixed/continuous with `origin`, `axis`
//! and `limit`. `continuous` maps to revolute with limits [−π, π]. Visual,
//! inertial, transmission and gazebo elements are skipped with a warning.

use std::path::Path;

use roxmltree::{Document, Node};

use crate::geom::Shape;
use crate::math::{Pose, Vec3};
use crate::scalar::Scalar;

use super::{Joint, JointKind, KinError, KinematicModel, Link, LinkShape};

/// Parses URDF XML text. `mesh_dir` resolves relative mesh file names.
pub fn parse_urdf<S: Scalar>(
    text: &str,
    mesh_dir: Option<&Path>,
) -> Result<KinematicModel<S>, KinError> {
    let doc = Document::parse(text).map_err(|e| KinError::Xml(e.to_string()))?;
    let robot = doc.root_element();
    if robot.tag_name().name() != "robot" {
        return Err(KinError::Xml(format!(
            "expected <robot> root element, got <{}>",
            robot.tag_name().name()
        )));
    }
    let robot_name = robot.attribute("name").unwrap_or("robot").to_string();

    let mut links: Vec<Link<S>> = Vec::new();
    let mut joints_raw: Vec<(String, String, String, JointKind, Pose<S>, Vec3<S>, Option<[S; 2]>)> =
        Vec::new();

    for node in robot.children().filter(Node::is_element) {
        match node.tag_name().name() {
            "link" => links.push(parse_link(&node, mesh_dir)?),
            "joint" => joints_raw.push(parse_joint(&node)?),
            "material" => {}
            other => {
                log::warn!("ignoring unsupported URDF element <{other}>");
            }
        }
    }

    let link_idx = |name: &str| {
        links
            .iter()
            .position(|l| l.name == name)
            .ok_or_else(|| KinError::UnknownLink(name.to_string()))
    };

    let mut joints = Vec::with_capacity(joints_raw.len());
    for (name, parent, child, kind, origin, axis, limits) in joints_raw {
        let limits = match (kind, limits) {
            (JointKind::Fixed, _) => [S::zero(), S::zero()],
            (_, Some(l)) => l,
            (_, None) => return Err(KinError::MissingLimit(name)),
        };
        let axis = if kind == JointKind::Fixed {
            Vec3::unit_x()
        } else {
            axis.try_normalized()
                .ok_or_else(|| KinError::InvalidModel(format!("joint '{name}' has zero axis")))?
        };
        joints.push(Joint {
            name,
            kind,
            parent_link: link_idx(&parent)?,
            child_link: link_idx(&child)?,
            origin,
            axis,
            limits,
        });
    }

    KinematicModel::new(robot_name, links, joints)
}

/// Loads and parses a URDF file; mesh paths resolve relative to it.
pub fn load_urdf<S: Scalar>(path: &Path) -> Result<KinematicModel<S>, KinError> {
    let text = std::fs::read_to_string(path)?;
    parse_urdf(&text, path.parent())
}

fn parse_link<S: Scalar>(node: &Node, mesh_dir: Option<&Path>) -> Result<Link<S>, KinError> {
    let name = node
        .attribute("name")
        .ok_or_else(|| KinError::Xml("link without name".into()))?
        .to_string();
    let mut collisions = Vec::new();
    for child in node.children().filter(Node::is_element) {
        match child.tag_name().name() {
            "collision" => {
                let local_pose = child
                    .children()
                    .filter(Node::is_element)
                    .find(|n| n.tag_name().name() == "origin")
                    .map(|n| parse_origin(&n))
                    .transpose()?
                    .unwrap_or_else(Pose::identity);
                let geometry = child
                    .children()
                    .filter(Node::is_element)
                    .find(|n| n.tag_name().name() == "geometry")
                    .ok_or_else(|| KinError::Xml(format!("collision in '{name}' lacks geometry")))?;
                let shape = parse_geometry(&geometry, mesh_dir)?;
                collisions.push(LinkShape { shape, local_pose });
            }
            "visual" | "inertial" => {}
            other => log::warn!("ignoring <{other}> inside link '{name}'"),
        }
    }
    Ok(Link { name, collisions })
}

type RawJoint<S> = (String, String, String, JointKind, Pose<S>, Vec3<S>, Option<[S; 2]>);

fn parse_joint<S: Scalar>(node: &Node) -> Result<RawJoint<S>, KinError> {
    let name = node
        .attribute("name")
        .ok_or_else(|| KinError::Xml("joint without name".into()))?
        .to_string();
    let kind = match node.attribute("type") {
        Some("revolute") => JointKind::Revolute,
        Some("continuous") => JointKind::Revolute,
        Some("prismatic") => JointKind::Prismatic,
        Some("fixed") => JointKind::Fixed,
        Some(other) => {
            return Err(KinError::Xml(format!(
                "joint '{name}' has unsupported type '{other}'"
            )))
        }
        None => return Err(KinError::Xml(format!("joint '{name}' has no type"))),
    };
    let continuous = node.attribute("type") == Some("continuous");

    let mut parent = None;
    let mut child = None;
    let mut origin = Pose::identity();
    let mut axis = Vec3::unit_x();
    let mut limits: Option<[S; 2]> = None;
    for item in node.children().filter(Node::is_element) {
        match item.tag_name().name() {
            "parent" => parent = item.attribute("link").map(str::to_string),
            "child" => child = item.attribute("link").map(str::to_string),
            "origin" => origin = parse_origin(&item)?,
            "axis" => {
                axis = parse_vec3(item.attribute("xyz").unwrap_or("1 0 0"))?;
            }
            "limit" => {
                let lower = parse_scalar(item.attribute("lower").unwrap_or("0"))?;
                let upper = parse_scalar(item.attribute("upper").unwrap_or("0"))?;
                limits = Some([lower, upper]);
            }
            "dynamics" | "safety_controller" | "calibration" | "mimic" => {
                log::warn!("ignoring <{}> in joint '{name}'", item.tag_name().name());
            }
            other => log::warn!("ignoring <{other}> in joint '{name}'"),
        }
    }
    if continuous {
        limits = Some([S::of(-std::f64::consts::PI), S::of(std::f64::consts::PI)]);
    }

    let parent = parent.ok_or_else(|| KinError::Xml(format!("joint '{name}' has no parent")))?;
    let child = child.ok_or_else(|| KinError::Xml(format!("joint '{name}' has no child")))?;
    Ok((name, parent, child, kind, origin, axis, limits))
}

fn parse_geometry<S: Scalar>(node: &Node, mesh_dir: Option<&Path>) -> Result<Shape<S>, KinError> {
    let geo = node
        .children()
        .filter(Node::is_element)
        .next()
        .ok_or_else(|| KinError::Xml("empty geometry element".into()))?;
    match geo.tag_name().name() {
        "box" => {
            let size = parse_vec3(geo.attribute("size").unwrap_or(""))?;
            Ok(Shape::cuboid(size.x, size.y, size.z)?)
        }
        "sphere" => {
            let r = parse_scalar(geo.attribute("radius").unwrap_or(""))?;
            Ok(Shape::sphere(r)?)
        }
        "cylinder" => {
            let r = parse_scalar(geo.attribute("radius").unwrap_or(""))?;
            let l = parse_scalar(geo.attribute("length").unwrap_or(""))?;
            Ok(Shape::cylinder(r, l)?)
        }
        "mesh" => {
            let file = geo
                .attribute("filename")
                .ok_or_else(|| KinError::Xml("mesh without filename".into()))?;
            let path = match mesh_dir {
                Some(dir) => dir.join(file),
                None => Path::new(file).to_path_buf(),
            };
            let points = load_vertices::<S>(&path)?;
            Ok(Shape::convex_mesh(&points)?)
        }
        other => Err(KinError::Xml(format!("unsupported geometry <{other}>"))),
    }
}

/// Reads an ASCII vertex file: one `x y z` triple per line.
pub(crate) fn load_vertices<S: Scalar>(path: &Path) -> Result<Vec<Vec3<S>>, KinError> {
    let text = std::fs::read_to_string(path)?;
    let mut points = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let mut it = line.split_whitespace();
        let mut take = || -> Result<S, KinError> {
            let tok = it.next().ok_or_else(|| {
                KinError::Xml(format!(
                    "{}:{}: expected three coordinates",
                    path.display(),
                    lineno + 1
                ))
            })?;
            parse_scalar(tok)
        };
        points.push(Vec3::new(take()?, take()?, take()?));
    }
    Ok(points)
}

fn parse_origin<S: Scalar>(node: &Node) -> Result<Pose<S>, KinError> {
    let xyz = parse_vec3(node.attribute("xyz").unwrap_or("0 0 0"))?;
    let rpy = parse_vec3(node.attribute("rpy").unwrap_or("0 0 0"))?;
    Ok(Pose::from_xyz_rpy(xyz, rpy))
}

fn parse_vec3<S: Scalar>(text: &str) -> Result<Vec3<S>, KinError> {
    let vals: Vec<S> = text
        .split_whitespace()
        .map(parse_scalar)
        .collect::<Result<_, _>>()?;
    if vals.len() != 3 {
        return Err(KinError::Xml(format!("expected 3 numbers, got '{text}'")));
    }
    Ok(Vec3::new(vals[0], vals[1], vals[2]))
}

fn parse_scalar<S: Scalar>(text: &str) -> Result<S, KinError> {
    text.trim()
        .parse::<f64>()
        .map(S::of)
        .map_err(|_| KinError::Xml(format!("invalid number '{text}'")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_single_link() {
        let model: KinematicModel<f64> =
            parse_urdf(r#"<robot name="one"><link name="base"/></robot>"#, None).unwrap();
        assert_eq!(model.links().len(), 1);
        assert_eq!(model.dof(), 0);
    }

    #[test]
    fn two_link_planar_arm_reads_limits() {
        let text = r#"
<robot name="planar2">
  <link name="base"/>
  <link name="link1">
    <collision>
      <origin xyz="0.5 0 0"/>
      <geometry><box size="1.0 0.08 0.08"/></geometry>
    </collision>
  </link>
  <link name="link2"/>
  <joint name="j1" type="revolute">
    <parent link="base"/><child link="link1"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.14159265358979" upper="3.14159265358979"/>
  </joint>
  <joint name="j2" type="revolute">
    <parent link="link1"/><child link="link2"/>
    <origin xyz="1 0 0"/>
    <axis xyz="0 0 1"/>
    <limit lower="-3.14159265358979" upper="3.14159265358979"/>
  </joint>
</robot>"#;
        let model: KinematicModel<f64> = parse_urdf(text, None).unwrap();
        assert_eq!(model.dof(), 2);
        let limits = model.joint_limits();
        assert!((limits[0][0] + std::f64::consts::PI).abs() < 1e-9);
        assert!((limits[1][1] - std::f64::consts::PI).abs() < 1e-9);
        assert_eq!(model.links()[1].collisions.len(), 1);
    }

    #[test]
    fn loop_is_detected() {
        let text = r#"
<robot name="looped">
  <link name="a"/><link name="b"/>
  <joint name="j1" type="fixed"><parent link="a"/><child link="b"/></joint>
  <joint name="j2" type="fixed"><parent link="b"/><child link="a"/></joint>
</robot>"#;
        let err = parse_urdf::<f64>(text, None).unwrap_err();
        assert!(matches!(err, KinError::KinematicLoop(_)));
    }

    #[test]
    fn revolute_without_limit_is_rejected() {
        let text = r#"
<robot name="nolimit">
  <link name="a"/><link name="b"/>
  <joint name="j1" type="revolute">
    <parent link="a"/><child link="b"/><axis xyz="0 0 1"/>
  </joint>
</robot>"#;
        assert!(matches!(
            parse_urdf::<f64>(text, None),
            Err(KinError::MissingLimit(_))
        ));
    }

    #[test]
    fn continuous_maps_to_revolute_with_pi_limits() {
        let text = r#"
<robot name="cont">
  <link name="a"/><link name="b"/>
  <joint name="j1" type="continuous">
    <parent link="a"/><child link="b"/><axis xyz="0 0 1"/>
  </joint>
</robot>"#;
        let model: KinematicModel<f64> = parse_urdf(text, None).unwrap();
        let lim = model.joint_limits()[0];
        assert!((lim[0] + std::f64::consts::PI).abs() < 1e-12);
        assert!((lim[1] - std::f64::consts::PI).abs() < 1e-12);
    }

    #[test]
    fn malformed_xml_reports_error() {
        assert!(matches!(
            parse_urdf::<f64>("<robot><link ", None),
            Err(KinError::Xml(_))
        ));
    }
}
