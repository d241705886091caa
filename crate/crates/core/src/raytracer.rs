//! Selective secondary reflections.
//!
//! Only G-buffer pixels holding geometry launch a ray: the mirror reflection
//! of the view direction about the surface normal. Each ray is tested against
//! the per-object bounding boxes first and only against the triangles of the
//! boxes it crosses.

use std::ops::AddAssign;

use nalgebra::Vector3;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Result, SonarError};
use crate::rasterizer::{lambert, Echo, GBuffer, ReflectionImage, SonarCamera};
use crate::scene::{Aabb, Scene, Triangle};

/// Origin offset along a secondary ray, meters.
pub const ORIGIN_OFFSET: f64 = 1e-4;
/// Minimum accepted ray parameter for a triangle hit, meters.
pub const HIT_EPSILON: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Ray {
    pub origin: Vector3<f64>,
    /// Unit length.
    pub direction: Vector3<f64>,
}

impl Ray {
    pub fn new(origin: Vector3<f64>, direction: Vector3<f64>) -> Ray {
        Ray {
            origin,
            direction: direction.normalize(),
        }
    }

    pub fn at(&self, t: f64) -> Vector3<f64> {
        self.origin + self.direction * t
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub struct IntersectionStats {
    pub rays_launched: u64,
    pub box_tests: u64,
    pub triangle_tests: u64,
    pub triangle_tests_skipped_by_box: u64,
}

impl AddAssign for IntersectionStats {
    fn add_assign(&mut self, other: Self) {
        self.rays_launched += other.rays_launched;
        self.box_tests += other.box_tests;
        self.triangle_tests += other.triangle_tests;
        self.triangle_tests_skipped_by_box += other.triangle_tests_skipped_by_box;
    }
}

/// Mirror reflection `i − 2(i·n)n`.
pub fn reflect_direction(incident: &Vector3<f64>, normal: &Vector3<f64>) -> Vector3<f64> {
    (incident - normal * (2.0 * incident.dot(normal))).normalize()
}

/// Slab test. Returns the entry parameter (0 when the origin is inside).
///
/// Comparisons are inclusive so rays grazing a face count as hits. Axis-parallel
/// rays are handled per axis without dividing by zero.
pub fn ray_aabb_intersect(ray: &Ray, aabb: &Aabb) -> Option<f64> {
    let mut t_near = 0.0f64;
    let mut t_far = f64::INFINITY;
    for axis in 0..3 {
        let o = ray.origin[axis];
        let d = ray.direction[axis];
        let (lo, hi) = (aabb.min[axis], aabb.max[axis]);
        if d == 0.0 {
            if o < lo || o > hi {
                return None;
            }
            continue;
        }
        let inv = 1.0 / d;
        let (mut t0, mut t1) = ((lo - o) * inv, (hi - o) * inv);
        if t0 > t1 {
            std::mem::swap(&mut t0, &mut t1);
        }
        t_near = t_near.max(t0);
        t_far = t_far.min(t1);
    }
    // Relative slack absorbs round-off for rays that skim a face; a false
    // positive only costs the triangle tests.
    let slack = 1e-9 * (1.0 + t_far.abs());
    (t_near <= t_far + slack).then_some(t_near)
}

/// Möller–Trumbore intersection: `(t, u, v)` with `t > HIT_EPSILON`.
pub fn ray_triangle_intersect(ray: &Ray, tri: &Triangle) -> Option<(f64, f64, f64)> {
    let e1 = tri.v1 - tri.v0;
    let e2 = tri.v2 - tri.v0;
    let p = ray.direction.cross(&e2);
    let det = e1.dot(&p);
    if det.abs() < 1e-12 * e1.norm() * e2.norm() {
        return None;
    }
    let inv_det = 1.0 / det;
    let s = ray.origin - tri.v0;
    let u = s.dot(&p) * inv_det;
    if !(0.0..=1.0).contains(&u) {
        return None;
    }
    let q = s.cross(&e1);
    let v = ray.direction.dot(&q) * inv_det;
    if v < 0.0 || u + v > 1.0 {
        return None;
    }
    let t = e2.dot(&q) * inv_det;
    (t > HIT_EPSILON).then_some((t, u, v))
}

/// Whether secondary rays are culled by object bounding boxes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TraceMode {
    /// Box test per object, then triangle tests for crossed boxes.
    Selective,
    /// Every ray against every triangle; the reference for `Selective`.
    BruteForce,
}

#[derive(Debug, Clone, Copy)]
struct Hit {
    t: f64,
    normal: Vector3<f64>,
    material_id: usize,
}

fn closest_hit(
    ray: &Ray,
    scene: &Scene,
    mode: TraceMode,
    stats: &mut IntersectionStats,
) -> Option<Hit> {
    let mut best: Option<Hit> = None;
    for object in &scene.objects {
        let n = object.mesh.len() as u64;
        if mode == TraceMode::Selective {
            stats.box_tests += 1;
            if ray_aabb_intersect(ray, &object.aabb).is_none() {
                stats.triangle_tests_skipped_by_box += n;
                continue;
            }
        }
        stats.triangle_tests += n;
        for tri in &object.mesh.triangles {
            if let Some((t, _, _)) = ray_triangle_intersect(ray, tri) {
                if best.is_none_or(|b| t < b.t) {
                    best = Some(Hit {
                        t,
                        normal: tri.normal,
                        material_id: object.mesh.material_id,
                    });
                }
            }
        }
    }
    best
}

/// Traces one reflected ray per hit pixel.
///
/// A return is recorded at the originating pixel with the accumulated path
/// length (primary distance plus the reflected segment) and intensity equal
/// to the Lambert term at the second surface times its reflectivity times
/// the pixel's primary intensity.
pub fn secondary_reflections(
    gbuffer: &GBuffer,
    scene: &Scene,
    camera: &SonarCamera,
) -> (ReflectionImage, IntersectionStats) {
    trace(gbuffer, scene, camera, TraceMode::Selective)
}

pub fn trace(
    gbuffer: &GBuffer,
    scene: &Scene,
    camera: &SonarCamera,
    mode: TraceMode,
) -> (ReflectionImage, IntersectionStats) {
    let origin = camera.position();
    let results: Vec<(Echo, IntersectionStats)> = gbuffer
        .samples
        .par_iter()
        .map(|s| {
            let mut stats = IntersectionStats::default();
            if !s.is_hit() {
                return (Echo::NONE, stats);
            }
            stats.rays_launched = 1;
            let view = s.world_position - origin;
            let primary_distance = view.norm();
            let incident = view / primary_distance;
            let first_reflectivity = scene
                .materials
                .get(s.material_id)
                .map_or(1.0, |m| m.reflectivity);
            let first_intensity = lambert(&s.world_normal, &(-incident), first_reflectivity);
            let direction = reflect_direction(&incident, &s.world_normal);
            let ray = Ray {
                origin: s.world_position + direction * ORIGIN_OFFSET,
                direction,
            };
            let echo = match closest_hit(&ray, scene, mode, &mut stats) {
                Some(hit) => {
                    let reflectivity = scene
                        .materials
                        .get(hit.material_id)
                        .map_or(1.0, |m| m.reflectivity);
                    Echo {
                        distance: primary_distance + ORIGIN_OFFSET + hit.t,
                        intensity: lambert(&hit.normal, &(-direction), reflectivity)
                            * first_intensity,
                    }
                }
                None => Echo::NONE,
            };
            (echo, stats)
        })
        .collect();
    let mut stats = IntersectionStats::default();
    let mut echoes = Vec::with_capacity(results.len());
    for (echo, s) in results {
        echoes.push(echo);
        stats += s;
    }
    (
        ReflectionImage {
            width: gbuffer.width,
            height: gbuffer.height,
            echoes,
        },
        stats,
    )
}

/// Primary returns plus the secondary return attached to the same pixel.
#[derive(Debug, Clone, PartialEq)]
pub struct ShaderImage {
    pub primary: ReflectionImage,
    pub secondary: ReflectionImage,
}

impl ShaderImage {
    pub fn width(&self) -> usize {
        self.primary.width
    }

    pub fn height(&self) -> usize {
        self.primary.height
    }

    /// Hit samples of pixel `index`: the primary return, then the secondary.
    pub fn samples_at(&self, index: usize) -> impl Iterator<Item = Echo> + '_ {
        [self.primary.echoes[index], self.secondary.echoes[index]]
            .into_iter()
            .filter(Echo::is_hit)
    }
}

/// Blends primary and secondary reflections into one shader image.
///
/// A secondary return at a pixel with no primary return is inconsistent
/// (no ray could have been launched there) and is rejected.
pub fn unify_reflections(
    primary: &ReflectionImage,
    secondary: &ReflectionImage,
) -> Result<ShaderImage> {
    if (primary.width, primary.height) != (secondary.width, secondary.height) {
        return Err(SonarError::mismatch(
            format!("{}x{}", primary.width, primary.height),
            format!("{}x{}", secondary.width, secondary.height),
        ));
    }
    if let Some(index) = primary
        .echoes
        .iter()
        .zip(&secondary.echoes)
        .position(|(p, s)| !p.is_hit() && s.is_hit())
    {
        return Err(SonarError::invalid(format!(
            "secondary return at pixel {index} has no primary return"
        )));
    }
    Ok(ShaderImage {
        primary: primary.clone(),
        secondary: secondary.clone(),
    })
}
