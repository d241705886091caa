//! World geometry: triangle meshes with per-object acoustic materials.

mod io;
mod random;
mod tessellate;

use nalgebra::{Isometry3, Point3, Rotation3, Translation3, UnitQuaternion, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Result, SonarError};

pub use io::{load_mesh_text, load_scene, parse_mesh_text, parse_scene};
pub use random::{random_benchmark_scene, random_scene_in_view, BenchmarkView, BENCH_RESOLUTION};
pub use tessellate::{arc_wall, tessellate_primitive};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triangle {
    pub v0: Vector3<f64>,
    pub v1: Vector3<f64>,
    pub v2: Vector3<f64>,
    /// Unit normal following the counter-clockwise winding `v0, v1, v2`.
    pub normal: Vector3<f64>,
    pub centroid: Vector3<f64>,
}

impl Triangle {
    /// Returns `None` for zero-area or non-finite triangles.
    pub fn new(v0: Vector3<f64>, v1: Vector3<f64>, v2: Vector3<f64>) -> Option<Triangle> {
        let cross = (v1 - v0).cross(&(v2 - v0));
        let len = cross.norm();
        if !(len > 0.0 && len.is_finite()) {
            return None;
        }
        Some(Triangle {
            v0,
            v1,
            v2,
            normal: cross / len,
            centroid: (v0 + v1 + v2) / 3.0,
        })
    }

    pub fn vertices(&self) -> [Vector3<f64>; 3] {
        [self.v0, self.v1, self.v2]
    }

    pub fn area(&self) -> f64 {
        0.5 * (self.v1 - self.v0).cross(&(self.v2 - self.v0)).norm()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TriMesh {
    pub triangles: Vec<Triangle>,
    pub material_id: usize,
}

impl TriMesh {
    pub fn new(triangles: Vec<Triangle>) -> Result<TriMesh> {
        if triangles.is_empty() {
            return Err(SonarError::invalid("mesh has no triangles"));
        }
        Ok(TriMesh {
            triangles,
            material_id: 0,
        })
    }

    pub fn len(&self) -> usize {
        self.triangles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triangles.is_empty()
    }

    pub fn surface_area(&self) -> f64 {
        self.triangles.iter().map(Triangle::area).sum()
    }

    pub fn vertices(&self) -> impl Iterator<Item = Vector3<f64>> + '_ {
        self.triangles.iter().flat_map(|t| t.vertices())
    }

    /// Applies a rigid transform to every vertex and recomputes normals.
    pub fn transformed(&self, pose: &Isometry3<f64>) -> TriMesh {
        let map = |v: &Vector3<f64>| pose.transform_point(&Point3::from(*v)).coords;
        let triangles = self
            .triangles
            .iter()
            .map(|t| {
                let (v0, v1, v2) = (map(&t.v0), map(&t.v1), map(&t.v2));
                // Rigid motions preserve area, so the result stays valid;
                // keep the rotated normal to avoid recomputation round-off.
                Triangle {
                    v0,
                    v1,
                    v2,
                    normal: pose.rotation * t.normal,
                    centroid: (v0 + v1 + v2) / 3.0,
                }
            })
            .collect();
        TriMesh {
            triangles,
            material_id: self.material_id,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Material {
    /// Fraction of incident energy returned, in `[0, 1]`.
    pub reflectivity: f64,
    /// Amplitude of the procedural normal perturbation.
    #[serde(default)]
    pub roughness: f64,
}

impl Material {
    pub fn new(reflectivity: f64, roughness: f64) -> Result<Material> {
        if !(0.0..=1.0).contains(&reflectivity) {
            return Err(SonarError::out_of_range(
                "reflectivity",
                format!("{reflectivity} not in [0, 1]"),
            ));
        }
        if !(roughness >= 0.0 && roughness.is_finite()) {
            return Err(SonarError::out_of_range(
                "roughness",
                format!("{roughness} must be finite and >= 0"),
            ));
        }
        Ok(Material {
            reflectivity,
            roughness,
        })
    }
}

impl Default for Material {
    fn default() -> Self {
        Material {
            reflectivity: 1.0,
            roughness: 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Aabb {
    pub min: Vector3<f64>,
    pub max: Vector3<f64>,
}

impl Aabb {
    pub fn contains(&self, p: &Vector3<f64>) -> bool {
        (0..3).all(|i| self.min[i] <= p[i] && p[i] <= self.max[i])
    }

    pub fn center(&self) -> Vector3<f64> {
        (self.min + self.max) / 2.0
    }
}

/// Exact component-wise bounds of every vertex in the mesh.
pub fn compute_aabb(mesh: &TriMesh) -> Result<Aabb> {
    let mut vertices = mesh.vertices();
    let first = vertices
        .next()
        .ok_or_else(|| SonarError::invalid("cannot bound an empty mesh"))?;
    let (min, max) = vertices.fold((first, first), |(lo, hi), v| (lo.inf(&v), hi.sup(&v)));
    Ok(Aabb { min, max })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PrimitiveKind {
    Box,
    Sphere,
    Cylinder,
    Cone,
    Plane,
    Mesh,
}

/// Analytic shapes, centered at their local origin.
///
/// Cylinders span `z ∈ [-h/2, h/2]`; cones have their base disc at `z = 0`
/// and apex at `(0, 0, h)`; planes lie in `z = 0` facing +z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Primitive {
    Box { size: Vector3<f64> },
    Sphere { radius: f64 },
    Cylinder { radius: f64, height: f64 },
    Cone { radius: f64, height: f64 },
    Plane { width: f64, depth: f64 },
}

impl Primitive {
    pub fn kind(&self) -> PrimitiveKind {
        match self {
            Primitive::Box { .. } => PrimitiveKind::Box,
            Primitive::Sphere { .. } => PrimitiveKind::Sphere,
            Primitive::Cylinder { .. } => PrimitiveKind::Cylinder,
            Primitive::Cone { .. } => PrimitiveKind::Cone,
            Primitive::Plane { .. } => PrimitiveKind::Plane,
        }
    }
}

/// Rigid placement: translation plus roll/pitch/yaw about x, y, z.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub position: Vector3<f64>,
    /// Roll, pitch, yaw in radians.
    pub rotation: Vector3<f64>,
}

impl Pose {
    pub fn new(position: Vector3<f64>, rotation: Vector3<f64>) -> Pose {
        Pose { position, rotation }
    }

    pub fn isometry(&self) -> Isometry3<f64> {
        let rot = Rotation3::from_euler_angles(self.rotation.x, self.rotation.y, self.rotation.z);
        Isometry3::from_parts(
            Translation3::from(self.position),
            UnitQuaternion::from_rotation_matrix(&rot),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SceneObject {
    pub kind: PrimitiveKind,
    pub mesh: TriMesh,
    pub aabb: Aabb,
}

/// Immutable after construction; shared read-only by the render stages.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Scene {
    pub objects: Vec<SceneObject>,
    pub materials: Vec<Material>,
}

impl Scene {
    pub fn new() -> Scene {
        Scene::default()
    }

    /// Adds a world-space mesh with its own material, returning the object index.
    pub fn add_object(
        &mut self,
        kind: PrimitiveKind,
        mut mesh: TriMesh,
        material: Material,
    ) -> Result<usize> {
        let aabb = compute_aabb(&mesh)?;
        mesh.material_id = self.materials.len();
        self.materials.push(material);
        self.objects.push(SceneObject { kind, mesh, aabb });
        Ok(self.objects.len() - 1)
    }

    /// Tessellates `primitive`, places it at `pose` and adds it.
    pub fn add_primitive(
        &mut self,
        primitive: &Primitive,
        resolution: usize,
        pose: &Pose,
        material: Material,
    ) -> Result<usize> {
        let mesh = tessellate_primitive(primitive, resolution)?.transformed(&pose.isometry());
        self.add_object(primitive.kind(), mesh, material)
    }

    pub fn triangle_count(&self) -> usize {
        self.objects.iter().map(|o| o.mesh.len()).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.objects.is_empty()
    }

    /// Iterates `(global index, triangle, material id)` in declaration order.
    pub fn triangles(&self) -> impl Iterator<Item = (usize, &Triangle, usize)> + '_ {
        self.objects
            .iter()
            .flat_map(|o| {
                o.mesh
                    .triangles
                    .iter()
                    .map(move |t| (t, o.mesh.material_id))
            })
            .enumerate()
            .map(|(i, (t, m))| (i, t, m))
    }
}
