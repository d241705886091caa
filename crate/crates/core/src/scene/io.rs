//! Scene files (TOML) and the plain-text triangle-list mesh format.

use std::fs;
use std::path::{Path, PathBuf};

use nalgebra::Vector3;
use serde::Deserialize;
use toml::Spanned;

use super::{Material, Pose, Primitive, PrimitiveKind, Scene, TriMesh, Triangle};
use crate::error::{Result, SonarError};

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct SceneFile {
    #[serde(default, rename = "object")]
    objects: Vec<ObjectSpec>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ObjectSpec {
    kind: Spanned<String>,
    size: Option<[f64; 3]>,
    radius: Option<f64>,
    height: Option<f64>,
    width: Option<f64>,
    depth: Option<f64>,
    path: Option<String>,
    #[serde(default = "default_resolution")]
    resolution: usize,
    #[serde(default)]
    position: [f64; 3],
    #[serde(default)]
    rotation_deg: [f64; 3],
    #[serde(default = "default_reflectivity")]
    reflectivity: Spanned<f64>,
    #[serde(default = "default_roughness")]
    roughness: Spanned<f64>,
}

fn default_resolution() -> usize {
    24
}

fn default_reflectivity() -> Spanned<f64> {
    Spanned::new(0..0, 1.0)
}

fn default_roughness() -> Spanned<f64> {
    Spanned::new(0..0, 0.0)
}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

pub fn load_scene(path: impl AsRef<Path>) -> Result<Scene> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| SonarError::io(path, e))?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    parse_scene(&text, path, &base)
}

/// Parses scene text. `origin` labels errors; mesh paths resolve against `base_dir`.
pub fn parse_scene(text: &str, origin: &Path, base_dir: &Path) -> Result<Scene> {
    let parse_err = |message: String| SonarError::Parse {
        path: origin.to_path_buf(),
        message,
    };
    let file: SceneFile = toml::from_str(text).map_err(|e| parse_err(e.to_string()))?;
    let mut scene = Scene::new();
    for (index, spec) in file.objects.iter().enumerate() {
        let at = |span: std::ops::Range<usize>| {
            if span.is_empty() {
                format!("object #{}", index + 1)
            } else {
                format!("line {}, object #{}", line_of(text, span.start), index + 1)
            }
        };
        let material = Material::new(*spec.reflectivity.get_ref(), *spec.roughness.get_ref())
            .map_err(|e| {
                let span = match &e {
                    SonarError::OutOfRange { field, .. } if field == "roughness" => {
                        spec.roughness.span()
                    }
                    _ => spec.reflectivity.span(),
                };
                parse_err(format!("{}: {e}", at(span)))
            })?;
        let pose = Pose::new(
            Vector3::from(spec.position),
            Vector3::from(spec.rotation_deg).map(f64::to_radians),
        );
        let kind_at = at(spec.kind.span());
        let need = |value: Option<f64>, field: &str| {
            value.ok_or_else(|| parse_err(format!("{kind_at}: missing `{field}`")))
        };
        let primitive = match spec.kind.get_ref().as_str() {
            "box" => Primitive::Box {
                size: Vector3::from(
                    spec.size
                        .ok_or_else(|| parse_err(format!("{kind_at}: missing `size`")))?,
                ),
            },
            "sphere" => Primitive::Sphere {
                radius: need(spec.radius, "radius")?,
            },
            "cylinder" => Primitive::Cylinder {
                radius: need(spec.radius, "radius")?,
                height: need(spec.height, "height")?,
            },
            "cone" => Primitive::Cone {
                radius: need(spec.radius, "radius")?,
                height: need(spec.height, "height")?,
            },
            "plane" => Primitive::Plane {
                width: need(spec.width, "width")?,
                depth: need(spec.depth, "depth")?,
            },
            "mesh" => {
                let rel = spec
                    .path
                    .as_ref()
                    .ok_or_else(|| parse_err(format!("{kind_at}: missing `path`")))?;
                let mesh_path: PathBuf = base_dir.join(rel);
                let mesh = load_mesh_text(&mesh_path)?.transformed(&pose.isometry());
                scene.add_object(PrimitiveKind::Mesh, mesh, material)?;
                continue;
            }
            other => {
                return Err(parse_err(format!(
                    "{kind_at}: unknown primitive kind `{other}` (expected box, sphere, cylinder, cone, plane or mesh)"
                )))
            }
        };
        scene
            .add_primitive(&primitive, spec.resolution, &pose, material)
            .map_err(|e| parse_err(format!("{kind_at}: {e}")))?;
    }
    Ok(scene)
}

pub fn load_mesh_text(path: impl AsRef<Path>) -> Result<TriMesh> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| SonarError::io(path, e))?;
    parse_mesh_text(&text, path)
}

/// Parses `v x y z` vertex lines and `f i j k` zero-based triangle lines.
/// Blank lines and `#` comments are ignored.
pub fn parse_mesh_text(text: &str, origin: &Path) -> Result<TriMesh> {
    let err = |line: usize, message: String| SonarError::Parse {
        path: origin.to_path_buf(),
        message: format!("line {line}: {message}"),
    };
    let mut vertices: Vec<Vector3<f64>> = Vec::new();
    let mut triangles = Vec::new();
    for (n, raw) in text.lines().enumerate() {
        let line_no = n + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap_or_default();
        let rest: Vec<&str> = fields.collect();
        if rest.len() != 3 {
            return Err(err(
                line_no,
                format!("expected 3 values after `{tag}`, found {}", rest.len()),
            ));
        }
        match tag {
            "v" => {
                let mut v = [0.0; 3];
                for (slot, field) in v.iter_mut().zip(&rest) {
                    *slot = field
                        .parse::<f64>()
                        .ok()
                        .filter(|x| x.is_finite())
                        .ok_or_else(|| err(line_no, format!("bad coordinate `{field}`")))?;
                }
                vertices.push(Vector3::from(v));
            }
            "f" => {
                let mut idx = [0usize; 3];
                for (slot, field) in idx.iter_mut().zip(&rest) {
                    let i: usize = field
                        .parse()
                        .map_err(|_| err(line_no, format!("bad vertex index `{field}`")))?;
                    if i >= vertices.len() {
                        return Err(err(line_no, format!("vertex index {i} not yet defined")));
                    }
                    *slot = i;
                }
                let t = Triangle::new(vertices[idx[0]], vertices[idx[1]], vertices[idx[2]])
                    .ok_or_else(|| err(line_no, "degenerate triangle".into()))?;
                triangles.push(t);
            }
            other => return Err(err(line_no, format!("unknown record `{other}`"))),
        }
    }
    TriMesh::new(triangles).map_err(|_| SonarError::Parse {
        path: origin.to_path_buf(),
        message: "mesh declares no triangles".into(),
    })
}
