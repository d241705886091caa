use std::f64::consts::{PI, TAU};

use nalgebra::Vector3;

use super::{Primitive, TriMesh, Triangle};
use crate::error::{Result, SonarError};

fn positive(name: &str, value: f64) -> Result<()> {
    if value > 0.0 && value.is_finite() {
        Ok(())
    } else {
        Err(SonarError::invalid(format!(
            "{name} must be positive, got {value}"
        )))
    }
}

fn tri(out: &mut Vec<Triangle>, a: Vector3<f64>, b: Vector3<f64>, c: Vector3<f64>) {
    out.push(Triangle::new(a, b, c).expect("tessellation produced a degenerate triangle"));
}

/// Ring of `n` points of radius `r` at height `z`, counter-clockwise about +z.
fn ring(r: f64, z: f64, n: usize) -> Vec<Vector3<f64>> {
    (0..n)
        .map(|j| {
            let (s, c) = (TAU * j as f64 / n as f64).sin_cos();
            Vector3::new(r * c, r * s, z)
        })
        .collect()
}

/// Triangulates an analytic primitive with outward-facing normals.
///
/// Triangle counts for resolution `n`:
///
/// | kind     | triangles      |
/// |----------|----------------|
/// | box      | 12             |
/// | plane    | 2              |
/// | sphere   | `2·n·(n − 1)`  |
/// | cylinder | `4·n`          |
/// | cone     | `2·n`          |
///
/// Spheres use `n` latitude bands and `n` longitude slices; cylinders and
/// cones use radial fans for their caps. Box and plane ignore `resolution`.
pub fn tessellate_primitive(primitive: &Primitive, resolution: usize) -> Result<TriMesh> {
    let mut out = Vec::new();
    match *primitive {
        Primitive::Box { size } => {
            for i in 0..3 {
                positive("box size", size[i])?;
            }
            box_faces(&mut out, size / 2.0);
        }
        Primitive::Plane { width, depth } => {
            positive("plane width", width)?;
            positive("plane depth", depth)?;
            let (hw, hd) = (width / 2.0, depth / 2.0);
            let a = Vector3::new(-hw, -hd, 0.0);
            let b = Vector3::new(hw, -hd, 0.0);
            let c = Vector3::new(hw, hd, 0.0);
            let d = Vector3::new(-hw, hd, 0.0);
            tri(&mut out, a, b, c);
            tri(&mut out, a, c, d);
        }
        Primitive::Sphere { radius } => {
            positive("sphere radius", radius)?;
            check_resolution(resolution)?;
            sphere(&mut out, radius, resolution);
        }
        Primitive::Cylinder { radius, height } => {
            positive("cylinder radius", radius)?;
            positive("cylinder height", height)?;
            check_resolution(resolution)?;
            let n = resolution;
            let bottom = ring(radius, -height / 2.0, n);
            let top = ring(radius, height / 2.0, n);
            let (cb, ct) = (
                Vector3::new(0.0, 0.0, -height / 2.0),
                Vector3::new(0.0, 0.0, height / 2.0),
            );
            for j in 0..n {
                let k = (j + 1) % n;
                tri(&mut out, top[j], bottom[j], bottom[k]);
                tri(&mut out, top[j], bottom[k], top[k]);
            }
            for j in 0..n {
                tri(&mut out, ct, top[j], top[(j + 1) % n]);
            }
            for j in 0..n {
                tri(&mut out, cb, bottom[(j + 1) % n], bottom[j]);
            }
        }
        Primitive::Cone { radius, height } => {
            positive("cone radius", radius)?;
            positive("cone height", height)?;
            check_resolution(resolution)?;
            let n = resolution;
            let base = ring(radius, 0.0, n);
            let apex = Vector3::new(0.0, 0.0, height);
            for j in 0..n {
                tri(&mut out, apex, base[j], base[(j + 1) % n]);
            }
            for j in 0..n {
                tri(&mut out, Vector3::zeros(), base[(j + 1) % n], base[j]);
            }
        }
    }
    TriMesh::new(out)
}

fn check_resolution(resolution: usize) -> Result<()> {
    if resolution < 3 {
        return Err(SonarError::invalid(format!(
            "resolution must be at least 3 for curved shapes, got {resolution}"
        )));
    }
    Ok(())
}

fn box_faces(out: &mut Vec<Triangle>, h: Vector3<f64>) {
    let v = |sx: f64, sy: f64, sz: f64| Vector3::new(sx * h.x, sy * h.y, sz * h.z);
    // Each face listed counter-clockwise as seen from outside.
    let faces = [
        [
            v(1., -1., -1.),
            v(1., 1., -1.),
            v(1., 1., 1.),
            v(1., -1., 1.),
        ],
        [
            v(-1., 1., -1.),
            v(-1., -1., -1.),
            v(-1., -1., 1.),
            v(-1., 1., 1.),
        ],
        [
            v(1., 1., -1.),
            v(-1., 1., -1.),
            v(-1., 1., 1.),
            v(1., 1., 1.),
        ],
        [
            v(-1., -1., -1.),
            v(1., -1., -1.),
            v(1., -1., 1.),
            v(-1., -1., 1.),
        ],
        [
            v(-1., -1., 1.),
            v(1., -1., 1.),
            v(1., 1., 1.),
            v(-1., 1., 1.),
        ],
        [
            v(-1., 1., -1.),
            v(1., 1., -1.),
            v(1., -1., -1.),
            v(-1., -1., -1.),
        ],
    ];
    for [a, b, c, d] in faces {
        tri(out, a, b, c);
        tri(out, a, c, d);
    }
}

fn sphere(out: &mut Vec<Triangle>, radius: f64, n: usize) {
    let vertex = |i: usize, j: usize| {
        let (sp, cp) = (PI * i as f64 / n as f64).sin_cos();
        let (st, ct) = (TAU * (j % n) as f64 / n as f64).sin_cos();
        Vector3::new(radius * sp * ct, radius * sp * st, radius * cp)
    };
    let north = Vector3::new(0.0, 0.0, radius);
    let south = Vector3::new(0.0, 0.0, -radius);
    for j in 0..n {
        tri(out, north, vertex(1, j), vertex(1, j + 1));
    }
    for i in 1..n - 1 {
        for j in 0..n {
            let (a, b, c, d) = (
                vertex(i, j),
                vertex(i + 1, j),
                vertex(i + 1, j + 1),
                vertex(i, j + 1),
            );
            tri(out, a, b, c);
            tri(out, a, c, d);
        }
    }
    for j in 0..n {
        tri(out, vertex(n - 1, j), south, vertex(n - 1, j + 1));
    }
}

/// A spherical-shell patch of radius `radius` centered on the origin, facing
/// the origin, spanning `azimuth_span × elevation_span` around the +x axis.
///
/// Every facet is seen head-on from the origin, so all returns share the
/// same range. Facets are at most `max_step` radians wide.
pub fn arc_wall(
    radius: f64,
    azimuth_span: f64,
    elevation_span: f64,
    max_step: f64,
) -> Result<TriMesh> {
    positive("arc radius", radius)?;
    positive("arc azimuth span", azimuth_span)?;
    positive("arc elevation span", elevation_span)?;
    positive("arc step", max_step)?;
    if azimuth_span >= PI || elevation_span >= PI {
        return Err(SonarError::invalid("arc spans must be below π"));
    }
    let n_az = (azimuth_span / max_step).ceil().max(1.0) as usize;
    let n_el = (elevation_span / max_step).ceil().max(1.0) as usize;
    let vertex = |i: usize, j: usize| {
        let az = -azimuth_span / 2.0 + azimuth_span * i as f64 / n_az as f64;
        let el = -elevation_span / 2.0 + elevation_span * j as f64 / n_el as f64;
        let (se, ce) = el.sin_cos();
        let (sa, ca) = az.sin_cos();
        Vector3::new(radius * ce * ca, radius * ce * sa, radius * se)
    };
    let mut out = Vec::with_capacity(2 * n_az * n_el);
    for i in 0..n_az {
        for j in 0..n_el {
            let (a, b, c, d) = (
                vertex(i, j),
                vertex(i + 1, j),
                vertex(i + 1, j + 1),
                vertex(i, j + 1),
            );
            // Winding chosen so the normal points back toward the origin.
            tri(&mut out, a, c, b);
            tri(&mut out, a, d, c);
        }
    }
    TriMesh::new(out)
}
