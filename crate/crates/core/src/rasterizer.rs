//! Primary reflections by z-buffered rasterization.
//!
//! The sonar head is modelled as a pinhole camera looking along its local
//! +x axis (+y left, +z up). Image columns run from the right edge of the fan
//! (azimuth `-θmax/2`) to the left edge (`+θmax/2`); rows run from the top
//! (`+φmax/2`) down. Pixel centers are spaced uniformly on the image plane,
//! so the azimuth of a column is `atan(s · tan(θmax/2))` with `s ∈ [-1, 1]`.

use std::f64::consts::FRAC_PI_2;

use nalgebra::{Isometry3, Point3, Vector3};
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;

use crate::error::{Result, SonarError};
use crate::rng::CellRng;
use crate::scene::{Material, Scene};

/// Mean angular deviation (radians) of a perturbed normal per unit roughness.
pub const ROUGHNESS_ANGLE_SCALE: f64 = 0.5;

const NORMAL_STREAM: u64 = 0x6e6f_726d;

const ROWS_PER_BAND: usize = 8;

#[derive(Debug, Clone, PartialEq)]
pub struct SonarCamera {
    pub pose: Isometry3<f64>,
    pub fov_azimuth: f64,
    pub fov_elevation: f64,
    pub range_min: f64,
    pub range_max: f64,
    pub width: usize,
    pub height: usize,
}

impl SonarCamera {
    pub fn new(
        pose: Isometry3<f64>,
        fov_azimuth: f64,
        fov_elevation: f64,
        range_min: f64,
        range_max: f64,
        width: usize,
        height: usize,
    ) -> Result<SonarCamera> {
        let in_open_pi = |x: f64| x > 0.0 && x < std::f64::consts::PI;
        if !in_open_pi(fov_azimuth) {
            return Err(SonarError::out_of_range(
                "fov_azimuth",
                format!("{fov_azimuth} rad not in (0, π)"),
            ));
        }
        if !in_open_pi(fov_elevation) {
            return Err(SonarError::out_of_range(
                "fov_elevation",
                format!("{fov_elevation} rad not in (0, π)"),
            ));
        }
        if !(range_min > 0.0 && range_min < range_max && range_max.is_finite()) {
            return Err(SonarError::out_of_range(
                "range",
                format!("need 0 < range_min < range_max, got [{range_min}, {range_max}]"),
            ));
        }
        if width == 0 || height == 0 {
            return Err(SonarError::invalid(format!(
                "image size {width}x{height} must be non-empty"
            )));
        }
        Ok(SonarCamera {
            pose,
            fov_azimuth,
            fov_elevation,
            range_min,
            range_max,
            width,
            height,
        })
    }

    pub fn position(&self) -> Vector3<f64> {
        self.pose.translation.vector
    }

    fn tan_half_azimuth(&self) -> f64 {
        (self.fov_azimuth / 2.0).tan()
    }

    fn tan_half_elevation(&self) -> f64 {
        (self.fov_elevation / 2.0).tan()
    }

    /// Azimuth of a continuous column coordinate (pixel units, 0 = left image edge).
    pub fn column_azimuth(&self, column: f64) -> f64 {
        column_azimuth(column, self.width, self.fov_azimuth)
    }

    /// Camera-frame direction through the center of pixel `(col, row)`, with unit x.
    pub fn pixel_direction_camera(&self, col: usize, row: usize) -> Vector3<f64> {
        let s = 2.0 * (col as f64 + 0.5) / self.width as f64 - 1.0;
        let t = 1.0 - 2.0 * (row as f64 + 0.5) / self.height as f64;
        Vector3::new(
            1.0,
            s * self.tan_half_azimuth(),
            t * self.tan_half_elevation(),
        )
    }

    /// World-space origin and unit direction of the ray through pixel `(col, row)`.
    pub fn pixel_ray(&self, col: usize, row: usize) -> (Vector3<f64>, Vector3<f64>) {
        let d = self.pose.rotation * self.pixel_direction_camera(col, row).normalize();
        (self.position(), d)
    }

    /// Continuous `(column, row)` of a camera-frame point with positive x.
    fn project(&self, p: &Vector3<f64>) -> (f64, f64) {
        let s = p.y / p.x / self.tan_half_azimuth();
        let t = p.z / p.x / self.tan_half_elevation();
        (
            (s + 1.0) / 2.0 * self.width as f64,
            (1.0 - t) / 2.0 * self.height as f64,
        )
    }

    /// Smallest axial distance at which an in-frustum point can reach `range_min`.
    fn near_plane(&self) -> f64 {
        let (a, e) = (self.tan_half_azimuth(), self.tan_half_elevation());
        self.range_min / (1.0 + a * a + e * e).sqrt()
    }
}

/// Azimuth of continuous column `column` in an image `width` pixels wide
/// spanning `fov_azimuth` radians.
pub fn column_azimuth(column: f64, width: usize, fov_azimuth: f64) -> f64 {
    let s = 2.0 * column / width as f64 - 1.0;
    (s * (fov_azimuth / 2.0).tan()).atan()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GSample {
    pub world_position: Vector3<f64>,
    /// Zero for pixels without geometry.
    pub world_normal: Vector3<f64>,
    /// Euclidean distance from the camera center; `+∞` when empty.
    pub depth: f64,
    pub material_id: usize,
}

impl GSample {
    pub const EMPTY: GSample = GSample {
        world_position: Vector3::new(0.0, 0.0, 0.0),
        world_normal: Vector3::new(0.0, 0.0, 0.0),
        depth: f64::INFINITY,
        material_id: 0,
    };

    pub fn is_hit(&self) -> bool {
        self.world_normal != Vector3::zeros()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GBuffer {
    pub width: usize,
    pub height: usize,
    /// Row-major samples.
    pub samples: Vec<GSample>,
}

impl GBuffer {
    pub fn empty(width: usize, height: usize) -> GBuffer {
        GBuffer {
            width,
            height,
            samples: vec![GSample::EMPTY; width * height],
        }
    }

    pub fn at(&self, col: usize, row: usize) -> &GSample {
        &self.samples[row * self.width + col]
    }

    pub fn hit_count(&self) -> usize {
        self.samples.iter().filter(|s| s.is_hit()).count()
    }
}

/// Screen-space triangle ready for scan conversion.
struct Prepared {
    screen: [(f64, f64); 3],
    inv_w: [f64; 3],
    camera: [Vector3<f64>; 3],
    normal: Vector3<f64>,
    material_id: usize,
    area: f64,
    cols: (usize, usize),
    rows: (usize, usize),
}

/// Clips a polygon against the half-space `x >= near`.
fn clip_near(poly: &[Vector3<f64>], near: f64) -> Vec<Vector3<f64>> {
    let mut out = Vec::with_capacity(poly.len() + 1);
    for i in 0..poly.len() {
        let a = poly[i];
        let b = poly[(i + 1) % poly.len()];
        let (ina, inb) = (a.x >= near, b.x >= near);
        if ina {
            out.push(a);
        }
        if ina != inb {
            let t = (near - a.x) / (b.x - a.x);
            let mut p = a + (b - a) * t;
            p.x = near;
            out.push(p);
        }
    }
    out
}

fn edge(a: (f64, f64), b: (f64, f64), p: (f64, f64)) -> f64 {
    (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0)
}

fn prepare(scene: &Scene, camera: &SonarCamera) -> Vec<Prepared> {
    let cam_pos = camera.position();
    let near = camera.near_plane();
    let inverse = camera.pose.inverse();
    let to_camera = |v: &Vector3<f64>| inverse.transform_point(&Point3::from(*v)).coords;
    let triangles: Vec<_> = scene.triangles().collect();
    triangles
        .par_iter()
        .map(|&(_, tri, material_id)| {
            let mut out = Vec::new();
            // Back faces cannot return energy toward the head.
            if tri.normal.dot(&(tri.v0 - cam_pos)) >= 0.0 {
                return out;
            }
            let poly = clip_near(
                &[to_camera(&tri.v0), to_camera(&tri.v1), to_camera(&tri.v2)],
                near,
            );
            for k in 1..poly.len().saturating_sub(1) {
                let camera_pts = [poly[0], poly[k], poly[k + 1]];
                let screen = camera_pts.map(|p| camera.project(&p));
                let area = edge(screen[0], screen[1], screen[2]);
                if area == 0.0 || !area.is_finite() {
                    continue;
                }
                let (xs, ys) = (screen.map(|s| s.0), screen.map(|s| s.1));
                let lo = |v: [f64; 3]| v.iter().cloned().fold(f64::INFINITY, f64::min);
                let hi = |v: [f64; 3]| v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
                let c0 = (lo(xs) - 0.5).ceil().max(0.0);
                let c1 = (hi(xs) - 0.5).floor().min(camera.width as f64 - 1.0);
                let r0 = (lo(ys) - 0.5).ceil().max(0.0);
                let r1 = (hi(ys) - 0.5).floor().min(camera.height as f64 - 1.0);
                if c0 > c1 || r0 > r1 {
                    continue;
                }
                out.push(Prepared {
                    screen,
                    inv_w: camera_pts.map(|p| 1.0 / p.x),
                    camera: camera_pts,
                    normal: tri.normal,
                    material_id,
                    area,
                    cols: (c0 as usize, c1 as usize),
                    rows: (r0 as usize, r1 as usize),
                });
            }
            out
        })
        .flatten()
        .collect()
}

/// Rasterizes the scene into a G-buffer.
///
/// Depth is the Euclidean camera-to-surface distance; samples outside
/// `[range_min, range_max]` are discarded. On equal depth the triangle
/// declared first wins.
pub fn rasterize(scene: &Scene, camera: &SonarCamera) -> GBuffer {
    let prepared = prepare(scene, camera);
    let pose = camera.pose;
    let mut gbuffer = GBuffer::empty(camera.width, camera.height);
    let width = camera.width;
    gbuffer
        .samples
        .par_chunks_mut(width * ROWS_PER_BAND)
        .enumerate()
        .for_each(|(band, chunk)| {
            let row_lo = band * ROWS_PER_BAND;
            let row_hi = row_lo + chunk.len() / width - 1;
            for tri in &prepared {
                let (r0, r1) = (tri.rows.0.max(row_lo), tri.rows.1.min(row_hi));
                if r0 > r1 {
                    continue;
                }
                for row in r0..=r1 {
                    let py = row as f64 + 0.5;
                    for col in tri.cols.0..=tri.cols.1 {
                        let p = (col as f64 + 0.5, py);
                        let l0 = edge(tri.screen[1], tri.screen[2], p) / tri.area;
                        let l1 = edge(tri.screen[2], tri.screen[0], p) / tri.area;
                        let l2 = edge(tri.screen[0], tri.screen[1], p) / tri.area;
                        if l0 < 0.0 || l1 < 0.0 || l2 < 0.0 {
                            continue;
                        }
                        let (q0, q1, q2) =
                            (l0 * tri.inv_w[0], l1 * tri.inv_w[1], l2 * tri.inv_w[2]);
                        let cam = (tri.camera[0] * q0 + tri.camera[1] * q1 + tri.camera[2] * q2)
                            / (q0 + q1 + q2);
                        let depth = cam.norm();
                        if depth < camera.range_min || depth > camera.range_max {
                            continue;
                        }
                        let slot = &mut chunk[(row - row_lo) * width + col];
                        if depth < slot.depth {
                            *slot = GSample {
                                world_position: pose.transform_point(&Point3::from(cam)).coords,
                                world_normal: tri.normal,
                                depth,
                                material_id: tri.material_id,
                            };
                        }
                    }
                }
            }
        });
    gbuffer
}

/// Orthonormal vectors spanning the plane perpendicular to `n`.
pub(crate) fn tangent_basis(n: &Vector3<f64>) -> (Vector3<f64>, Vector3<f64>) {
    let helper = if n.x.abs() < 0.9 {
        Vector3::x()
    } else {
        Vector3::y()
    };
    let e1 = n.cross(&helper).normalize();
    let e2 = n.cross(&e1);
    (e1, e2)
}

/// Tilts each hit normal by a seeded random angle.
///
/// The tilt axis is uniform in the tangent plane and the tilt angle is
/// Rayleigh distributed with mean `ROUGHNESS_ANGLE_SCALE × roughness`.
/// Pixels with zero roughness are left untouched.
pub fn perturb_normals(gbuffer: &GBuffer, materials: &[Material], seed: u64) -> GBuffer {
    let rayleigh_sigma = ROUGHNESS_ANGLE_SCALE / FRAC_PI_2.sqrt();
    let samples = gbuffer
        .samples
        .par_iter()
        .enumerate()
        .map(|(index, s)| {
            let roughness = materials.get(s.material_id).map_or(0.0, |m| m.roughness);
            if !s.is_hit() || roughness == 0.0 {
                return *s;
            }
            let mut rng = CellRng::new(&[seed, NORMAL_STREAM, index as u64]);
            let sigma = rayleigh_sigma * roughness;
            let g1: f64 = StandardNormal.sample(&mut rng);
            let g2: f64 = StandardNormal.sample(&mut rng);
            let (e1, e2) = tangent_basis(&s.world_normal);
            let offset = (e1 * g1 + e2 * g2) * sigma;
            let angle = offset.norm();
            if angle == 0.0 {
                return *s;
            }
            let tilted = s.world_normal * angle.cos() + offset / angle * angle.sin();
            GSample {
                world_normal: tilted.normalize(),
                ..*s
            }
        })
        .collect();
    GBuffer {
        width: gbuffer.width,
        height: gbuffer.height,
        samples,
    }
}

/// A single return: pulse distance in meters and echo intensity in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Echo {
    pub distance: f64,
    pub intensity: f64,
}

impl Echo {
    pub const NONE: Echo = Echo {
        distance: f64::INFINITY,
        intensity: 0.0,
    };

    pub fn is_hit(&self) -> bool {
        self.distance.is_finite()
    }
}

/// Per-pixel pulse distance and echo intensity.
#[derive(Debug, Clone, PartialEq)]
pub struct ReflectionImage {
    pub width: usize,
    pub height: usize,
    pub echoes: Vec<Echo>,
}

impl ReflectionImage {
    pub fn empty(width: usize, height: usize) -> ReflectionImage {
        ReflectionImage {
            width,
            height,
            echoes: vec![Echo::NONE; width * height],
        }
    }

    pub fn at(&self, col: usize, row: usize) -> &Echo {
        &self.echoes[row * self.width + col]
    }

    pub fn hit_count(&self) -> usize {
        self.echoes.iter().filter(|e| e.is_hit()).count()
    }
}

/// Lambertian return toward a monostatic head, scaled by reflectivity.
pub(crate) fn lambert(
    normal: &Vector3<f64>,
    toward_source: &Vector3<f64>,
    reflectivity: f64,
) -> f64 {
    normal.dot(toward_source).clamp(0.0, 1.0) * reflectivity
}

/// Converts a G-buffer into pulse distance and echo intensity.
pub fn primary_reflections(
    gbuffer: &GBuffer,
    camera: &SonarCamera,
    materials: &[Material],
) -> ReflectionImage {
    let origin = camera.position();
    let echoes = gbuffer
        .samples
        .par_iter()
        .map(|s| {
            if !s.is_hit() {
                return Echo::NONE;
            }
            let to_camera = origin - s.world_position;
            let distance = to_camera.norm();
            let reflectivity = materials.get(s.material_id).map_or(1.0, |m| m.reflectivity);
            Echo {
                distance,
                intensity: lambert(&s.world_normal, &(to_camera / distance), reflectivity),
            }
        })
        .collect();
    ReflectionImage {
        width: gbuffer.width,
        height: gbuffer.height,
        echoes,
    }
}
