use std::f64::consts::{FRAC_PI_6, TAU};

use nalgebra::Vector3;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Material, Pose, Primitive, Scene};

/// Tessellation resolution used for benchmark shapes.
pub const BENCH_RESOLUTION: usize = 24;

/// Viewing volume of a sonar head at the origin looking along +x.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BenchmarkView {
    pub fov_azimuth: f64,
    pub fov_elevation: f64,
    pub range_min: f64,
    pub range_max: f64,
}

impl Default for BenchmarkView {
    /// 120° × 20° fan covering 1–30 m.
    fn default() -> Self {
        BenchmarkView {
            fov_azimuth: 120f64.to_radians(),
            fov_elevation: 20f64.to_radians(),
            range_min: 1.0,
            range_max: 30.0,
        }
    }
}

/// One cylinder, box, sphere and cone at random poses inside the default view.
pub fn random_benchmark_scene(seed: u64) -> Scene {
    random_scene_in_view(seed, &BenchmarkView::default())
}

/// Places the four benchmark shapes inside `view`.
///
/// Object centers are drawn at ranges uniform in the central 80% of the range
/// interval, bearings uniform within ±0.8 of the half azimuth aperture and
/// elevations within ±0.5 of the half elevation aperture.
pub fn random_scene_in_view(seed: u64, view: &BenchmarkView) -> Scene {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let span = view.range_max - view.range_min;
    let (r_lo, r_hi) = (view.range_min + 0.1 * span, view.range_max - 0.1 * span);
    let az = 0.8 * view.fov_azimuth / 2.0;
    let el = 0.5 * view.fov_elevation / 2.0;

    let mut scene = Scene::new();
    let kinds = ["cylinder", "box", "sphere", "cone"];
    for kind in kinds {
        let r = rng.random_range(r_lo..r_hi);
        let bearing = rng.random_range(-az..=az);
        let elevation = rng.random_range(-el..=el);
        let position = Vector3::new(
            r * elevation.cos() * bearing.cos(),
            r * elevation.cos() * bearing.sin(),
            r * elevation.sin(),
        );
        let rotation = Vector3::new(
            rng.random_range(-FRAC_PI_6..FRAC_PI_6),
            rng.random_range(-FRAC_PI_6..FRAC_PI_6),
            rng.random_range(0.0..TAU),
        );
        let scale = rng.random_range(0.5..2.0);
        let primitive = match kind {
            "cylinder" => Primitive::Cylinder {
                radius: 0.4 * scale,
                height: 1.5 * scale,
            },
            "box" => Primitive::Box {
                size: Vector3::new(
                    scale,
                    scale * rng.random_range(0.5..1.5),
                    scale * rng.random_range(0.5..1.5),
                ),
            },
            "sphere" => Primitive::Sphere {
                radius: 0.5 * scale,
            },
            _ => Primitive::Cone {
                radius: 0.5 * scale,
                height: 1.2 * scale,
            },
        };
        let material = Material {
            reflectivity: rng.random_range(0.5..=1.0),
            roughness: rng.random_range(0.0..0.3),
        };
        scene
            .add_primitive(
                &primitive,
                BENCH_RESOLUTION,
                &Pose::new(position, rotation),
                material,
            )
            .expect("benchmark primitives have positive dimensions");
    }
    scene
}
