//! End-to-end frame simulation, MSIS scans, benchmarking and tracer ablation.

use std::f64::consts::TAU;
use std::time::Instant;

use nalgebra::{Isometry3, UnitQuaternion, Vector3};
use serde::Serialize;

use crate::acoustics::{attenuate_shader, attenuation_coefficient, db_to_neper};
use crate::error::{Result, SonarError, Stage};
use crate::rasterizer::{
    perturb_normals, primary_reflections, rasterize, ReflectionImage, SonarCamera,
};
use crate::raytracer::{trace, unify_reflections, IntersectionStats, ShaderImage, TraceMode};
use crate::scene::{random_scene_in_view, BenchmarkView, Scene};
use crate::sonogram::{
    accumulate_msis_scan, apply_speckle, bin_shader, frame_to_cartesian, scan_slots, AcousticImage,
    BinningStats, Device, NoiseParams, SonarConfig, SonarFrame,
};

/// Source of the absorption coefficient.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Attenuation {
    Off,
    /// Computed from the sonar frequency and water properties.
    Water,
    /// Fixed coefficient in dB/km.
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationConfig {
    pub sonar: SonarConfig,
    /// Sonar pose in the world frame (x forward, y left, z up).
    pub pose: Isometry3<f64>,
    /// Shader image `(width, height)`; `None` picks [`default_image_size`].
    pub image_size: Option<(usize, usize)>,
    /// Drives both normal perturbation and speckle noise.
    pub seed: u64,
    pub noise: bool,
    pub attenuation: Attenuation,
    pub secondary: bool,
    pub trace_mode: TraceMode,
    /// Cartesian display size, if one should be rendered.
    pub display: Option<(usize, usize)>,
    /// Ping counter written into the frame.
    pub timestamp: u64,
}

impl SimulationConfig {
    pub fn new(sonar: SonarConfig) -> SimulationConfig {
        SimulationConfig {
            sonar,
            pose: Isometry3::identity(),
            image_size: None,
            seed: 0,
            noise: true,
            attenuation: Attenuation::Water,
            secondary: true,
            trace_mode: TraceMode::Selective,
            display: None,
            timestamp: 0,
        }
    }

    pub fn image_size(&self) -> (usize, usize) {
        self.image_size
            .unwrap_or_else(|| default_image_size(&self.sonar))
    }

    /// Attenuation coefficient in Np/km.
    pub fn gamma(&self) -> Result<f64> {
        Ok(match self.attenuation {
            Attenuation::Off => 0.0,
            Attenuation::Water => db_to_neper(
                attenuation_coefficient(self.sonar.frequency_khz, &self.sonar.water)?.alpha_total,
            ),
            Attenuation::Fixed(alpha) if alpha >= 0.0 && alpha.is_finite() => db_to_neper(alpha),
            Attenuation::Fixed(alpha) => {
                return Err(SonarError::out_of_range(
                    "attenuation",
                    format!("{alpha} dB/km must be >= 0"),
                ))
            }
        })
    }

    pub fn camera(&self) -> Result<SonarCamera> {
        let (w, h) = self.image_size();
        SonarCamera::new(
            self.pose,
            self.sonar.fov_azimuth,
            self.sonar.fov_elevation,
            self.sonar.range_min,
            self.sonar.range_max,
            w,
            h,
        )
    }
}

/// Two columns per beam; rows follow the aperture aspect ratio.
pub fn default_image_size(sonar: &SonarConfig) -> (usize, usize) {
    let width = 2 * sonar.n_beams;
    let ratio = (sonar.fov_elevation / 2.0).tan() / (sonar.fov_azimuth / 2.0).tan();
    (width, ((width as f64 * ratio).round() as usize).max(1))
}

/// Wall-clock milliseconds per stage.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct StageTimings {
    pub rasterize: f64,
    pub perturb_normals: f64,
    pub primary_reflections: f64,
    pub secondary_reflections: f64,
    pub unify: f64,
    pub attenuation: f64,
    pub sonogram: f64,
    pub noise: f64,
    pub display: f64,
    pub total: f64,
}

impl StageTimings {
    pub fn stage_sum(&self) -> f64 {
        self.rasterize
            + self.perturb_normals
            + self.primary_reflections
            + self.secondary_reflections
            + self.unify
            + self.attenuation
            + self.sonogram
            + self.noise
            + self.display
    }
}

#[derive(Debug, Clone)]
pub struct SimulationRun {
    pub config: SimulationConfig,
    pub camera: SonarCamera,
    /// Attenuated primary and secondary layers fed to the sonogram stage.
    pub shader: ShaderImage,
    pub frame: SonarFrame,
    pub display: Option<AcousticImage>,
    pub timings: StageTimings,
    pub intersections: IntersectionStats,
    pub binning: BinningStats,
}

fn timed<T>(slot: &mut f64, stage: Stage, f: impl FnOnce() -> Result<T>) -> Result<T> {
    let start = Instant::now();
    let out = f().map_err(|e| e.in_stage(stage));
    *slot = start.elapsed().as_secs_f64() * 1e3;
    out
}

/// Runs every stage once and returns all intermediate products.
pub fn simulate_frame(scene: &Scene, config: &SimulationConfig) -> Result<SimulationRun> {
    let start = Instant::now();
    config.sonar.validate()?;
    let camera = config.camera()?;
    let gamma = config.gamma()?;
    let mut t = StageTimings::default();

    let gbuffer = timed(&mut t.rasterize, Stage::Rasterize, || {
        Ok(rasterize(scene, &camera))
    })?;
    let gbuffer = timed(&mut t.perturb_normals, Stage::PerturbNormals, || {
        Ok(perturb_normals(&gbuffer, &scene.materials, config.seed))
    })?;
    let primary = timed(
        &mut t.primary_reflections,
        Stage::PrimaryReflections,
        || Ok(primary_reflections(&gbuffer, &camera, &scene.materials)),
    )?;
    let (secondary, intersections) = timed(
        &mut t.secondary_reflections,
        Stage::SecondaryReflections,
        || {
            Ok(if config.secondary {
                trace(&gbuffer, scene, &camera, config.trace_mode)
            } else {
                (
                    ReflectionImage::empty(gbuffer.width, gbuffer.height),
                    IntersectionStats::default(),
                )
            })
        },
    )?;
    let shader = timed(&mut t.unify, Stage::Unify, || {
        unify_reflections(&primary, &secondary)
    })?;
    let shader = timed(&mut t.attenuation, Stage::Attenuation, || {
        attenuate_shader(&shader, gamma)
    })?;
    let (frame, binning) = timed(&mut t.sonogram, Stage::Sonogram, || {
        bin_shader(&shader, &config.sonar, config.timestamp)
    })?;
    let noise = if config.noise {
        NoiseParams {
            seed: config.seed,
            ..config.sonar.noise
        }
    } else {
        NoiseParams::OFF
    };
    let frame = timed(&mut t.noise, Stage::Noise, || {
        Ok(apply_speckle(&frame, &noise))
    })?;
    let display = timed(&mut t.display, Stage::Display, || {
        config
            .display
            .map(|(w, h)| frame_to_cartesian(&frame, w, h))
            .transpose()
    })?;
    t.total = start.elapsed().as_secs_f64() * 1e3;
    Ok(SimulationRun {
        config: config.clone(),
        camera,
        shader,
        frame,
        display,
        timings: t,
        intersections,
        binning,
    })
}

#[derive(Debug, Clone)]
pub struct ScanResult {
    /// One single-beam frame per head position, bearing = head angle.
    pub pings: Vec<SonarFrame>,
    pub mosaic: SonarFrame,
    pub display: Option<AcousticImage>,
}

/// One full MSIS revolution: the head yaws by `msis_step` between pings.
pub fn simulate_msis_scan(scene: &Scene, config: &SimulationConfig) -> Result<ScanResult> {
    if config.sonar.device != Device::Msis {
        return Err(SonarError::invalid("scanning requires an MSIS device"));
    }
    config.sonar.validate()?;
    let step = config.sonar.msis_step;
    let slots = scan_slots(step)?;
    let mut pings = Vec::with_capacity(slots);
    for k in 0..slots {
        let head = k as f64 * step;
        let yaw = UnitQuaternion::from_axis_angle(&Vector3::z_axis(), head);
        let ping_config = SimulationConfig {
            pose: config.pose * Isometry3::from_parts(Default::default(), yaw),
            display: None,
            timestamp: config.timestamp + k as u64,
            ..config.clone()
        };
        let mut frame = simulate_frame(scene, &ping_config)?.frame;
        frame.bearings[0] = (frame.bearings[0] + head).rem_euclid(TAU);
        pings.push(frame);
    }
    let mosaic = accumulate_msis_scan(&pings, step)?;
    let display = config
        .display
        .map(|(w, h)| frame_to_cartesian(&mosaic, w, h))
        .transpose()?;
    Ok(ScanResult {
        pings,
        mosaic,
        display,
    })
}

/// One benchmark configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchmarkCase {
    pub label: String,
    pub sonar: SonarConfig,
}

impl BenchmarkCase {
    pub fn new(sonar: SonarConfig) -> BenchmarkCase {
        let label = match sonar.device {
            Device::Fls => format!(
                "fls-{}x{}-{:.0}x{:.0}",
                sonar.n_beams,
                sonar.n_bins,
                sonar.fov_azimuth.to_degrees(),
                sonar.fov_elevation.to_degrees()
            ),
            Device::Msis => format!(
                "msis-{}-{:.0}x{:.0}",
                sonar.n_bins,
                sonar.fov_azimuth.to_degrees(),
                sonar.fov_elevation.to_degrees()
            ),
        };
        BenchmarkCase { label, sonar }
    }
}

/// The eight forward-looking setups, apertures outermost, then beams, then bins.
pub fn standard_fls_cases() -> Vec<BenchmarkCase> {
    let mut cases = Vec::new();
    for (az, el) in [(120.0, 20.0), (90.0, 15.0)] {
        for beams in [128, 256] {
            for bins in [500, 1000] {
                cases.push(BenchmarkCase::new(SonarConfig::fls(beams, bins, az, el)));
            }
        }
    }
    cases
}

/// The four scanning-sonar setups.
pub fn standard_msis_cases() -> Vec<BenchmarkCase> {
    let mut cases = Vec::new();
    for (az, el) in [(3.0, 35.0), (2.0, 20.0)] {
        for bins in [500, 1000] {
            cases.push(BenchmarkCase::new(SonarConfig::msis(bins, az, el)));
        }
    }
    cases
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkRow {
    pub label: String,
    pub device: Device,
    pub beams: usize,
    pub bins: usize,
    pub fov_azimuth_deg: f64,
    pub fov_elevation_deg: f64,
    pub samples: usize,
    pub avg_time_ms: f64,
    pub std_dev_ms: f64,
    pub frame_rate_fps: f64,
    pub rays_launched: u64,
    pub box_tests: u64,
    pub triangle_tests: u64,
    pub triangle_tests_skipped: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchmarkReport {
    pub rows: Vec<BenchmarkRow>,
}

/// Mean and sample standard deviation (0 for a single sample).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (0.0, 0.0);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Times scene generation plus [`simulate_frame`] over `n_samples` random
/// four-primitive scenes per case. Sample `i` uses scene seed `seed + i` in
/// every case, so rows are directly comparable.
pub fn run_benchmark(
    cases: &[BenchmarkCase],
    n_samples: usize,
    seed: u64,
) -> Result<BenchmarkReport> {
    if n_samples == 0 {
        return Err(SonarError::invalid("benchmark needs at least one sample"));
    }
    let mut rows = Vec::with_capacity(cases.len());
    for case in cases {
        case.sonar.validate()?;
        let view = BenchmarkView {
            fov_azimuth: case.sonar.fov_azimuth,
            fov_elevation: case.sonar.fov_elevation,
            range_min: case.sonar.range_min,
            range_max: case.sonar.range_max,
        };
        let mut times = Vec::with_capacity(n_samples);
        let mut stats = IntersectionStats::default();
        for i in 0..n_samples as u64 {
            let sample_seed = seed.wrapping_add(i);
            let start = Instant::now();
            let scene = random_scene_in_view(sample_seed, &view);
            let config = SimulationConfig {
                seed: sample_seed,
                timestamp: i,
                ..SimulationConfig::new(case.sonar.clone())
            };
            let run = simulate_frame(&scene, &config)?;
            times.push(start.elapsed().as_secs_f64() * 1e3);
            stats += run.intersections;
        }
        let (avg, std) = mean_std(&times);
        rows.push(BenchmarkRow {
            label: case.label.clone(),
            device: case.sonar.device,
            beams: case.sonar.n_beams,
            bins: case.sonar.n_bins,
            fov_azimuth_deg: case.sonar.fov_azimuth.to_degrees(),
            fov_elevation_deg: case.sonar.fov_elevation.to_degrees(),
            samples: n_samples,
            avg_time_ms: avg,
            std_dev_ms: std,
            frame_rate_fps: if avg > 0.0 {
                1000.0 / avg
            } else {
                f64::INFINITY
            },
            rays_launched: stats.rays_launched,
            box_tests: stats.box_tests,
            triangle_tests: stats.triangle_tests,
            triangle_tests_skipped: stats.triangle_tests_skipped_by_box,
        });
    }
    Ok(BenchmarkReport { rows })
}

/// Selective versus brute-force secondary tracing on one scene.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationReport {
    pub selective_ms: f64,
    pub brute_force_ms: f64,
    /// `brute_force_ms / selective_ms`.
    pub speedup: f64,
    pub selective: IntersectionStats,
    pub brute_force: IntersectionStats,
    pub max_intensity_diff: f64,
    pub max_distance_diff: f64,
}

pub fn run_ablation(scene: &Scene, config: &SimulationConfig) -> Result<AblationReport> {
    let run = |mode| {
        simulate_frame(
            scene,
            &SimulationConfig {
                trace_mode: mode,
                secondary: true,
                ..config.clone()
            },
        )
    };
    let selective = run(TraceMode::Selective)?;
    let brute = run(TraceMode::BruteForce)?;
    let mut max_intensity_diff = 0.0f64;
    let mut max_distance_diff = 0.0f64;
    for (a, b) in selective
        .shader
        .secondary
        .echoes
        .iter()
        .zip(&brute.shader.secondary.echoes)
    {
        max_intensity_diff = max_intensity_diff.max((a.intensity - b.intensity).abs());
        if a.is_hit() != b.is_hit() {
            max_distance_diff = f64::INFINITY;
        } else if a.is_hit() {
            max_distance_diff = max_distance_diff.max((a.distance - b.distance).abs());
        }
    }
    let (s_ms, b_ms) = (
        selective.timings.secondary_reflections,
        brute.timings.secondary_reflections,
    );
    Ok(AblationReport {
        selective_ms: s_ms,
        brute_force_ms: b_ms,
        speedup: if s_ms > 0.0 { b_ms / s_ms } else { 1.0 },
        selective: selective.intersections,
        brute_force: brute.intersections,
        max_intensity_diff,
        max_distance_diff,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scene::{
        arc_wall, random_benchmark_scene, Material, Pose, Primitive, PrimitiveKind,
    };

    fn small_fls() -> SonarConfig {
        SonarConfig::fls(32, 100, 60.0, 12.0)
    }

    fn wall_scene(distance: f64) -> Scene {
        let mut scene = Scene::new();
        let mesh = arc_wall(
            distance,
            100f64.to_radians(),
            30f64.to_radians(),
            0.5f64.to_radians(),
        )
        .unwrap();
        scene
            .add_object(PrimitiveKind::Mesh, mesh, Material::default())
            .unwrap();
        scene
    }

    #[test]
    fn default_size() {
        assert_eq!(
            default_image_size(&SonarConfig::fls(128, 500, 120.0, 20.0)),
            (256, 26)
        );
        assert_eq!(
            default_image_size(&SonarConfig::fls(64, 500, 90.0, 90.0)),
            (128, 128)
        );
        let (w, h) = default_image_size(&SonarConfig::msis(500, 3.0, 35.0));
        assert_eq!(w, 2);
        assert!(h > 10);
    }

    #[test]
    fn empty_scene_noise_off_is_zero() {
        let cfg = SimulationConfig {
            noise: false,
            ..SimulationConfig::new(small_fls())
        };
        let run = simulate_frame(&Scene::new(), &cfg).unwrap();
        assert!(run.frame.intensities.iter().all(|&v| v == 0.0));
        assert_eq!(run.intersections.rays_launched, 0);
    }

    #[test]
    fn deterministic() {
        let scene = random_benchmark_scene(4);
        let cfg = SimulationConfig {
            seed: 9,
            display: Some((64, 48)),
            ..SimulationConfig::new(SonarConfig::fls(64, 200, 120.0, 20.0))
        };
        let a = simulate_frame(&scene, &cfg).unwrap();
        let b = simulate_frame(&scene, &cfg).unwrap();
        assert_eq!(a.frame, b.frame);
        assert_eq!(a.display, b.display);
        let c = simulate_frame(&scene, &SimulationConfig { seed: 10, ..cfg }).unwrap();
        assert_ne!(a.frame, c.frame);
    }

    #[test]
    fn wall_energy_in_predicted_bin() {
        let d = 12.3;
        let cfg = SimulationConfig {
            noise: false,
            ..SimulationConfig::new(small_fls())
        };
        let run = simulate_frame(&wall_scene(d), &cfg).unwrap();
        let f = &run.frame;
        let bin = ((d - f.range_min) / f.bin_width()).floor() as usize;
        let near: f64 = (0..f.n_beams)
            .map(|b| {
                f.beam(b)[bin.saturating_sub(1)..=(bin + 1).min(f.n_bins - 1)]
                    .iter()
                    .sum::<f64>()
            })
            .sum();
        assert!(near / f.total_energy() > 0.95);
        assert!(run.binning.assigned > 0);
        // Nothing before the wall.
        assert!((0..f.n_beams).all(|b| f.beam(b)[..bin - 1].iter().all(|&v| v == 0.0)));
    }

    #[test]
    fn attenuation_zero_matches_off() {
        let scene = random_benchmark_scene(2);
        let base = SimulationConfig::new(small_fls());
        let off = simulate_frame(
            &scene,
            &SimulationConfig {
                attenuation: Attenuation::Off,
                ..base.clone()
            },
        )
        .unwrap();
        let zero = simulate_frame(
            &scene,
            &SimulationConfig {
                attenuation: Attenuation::Fixed(0.0),
                ..base.clone()
            },
        )
        .unwrap();
        assert_eq!(off.frame, zero.frame);
        assert!(SimulationConfig {
            attenuation: Attenuation::Fixed(-1.0),
            ..base
        }
        .gamma()
        .is_err());
    }

    #[test]
    fn stage_errors_are_labelled() {
        let cfg = SimulationConfig {
            image_size: Some((8, 4)),
            ..SimulationConfig::new(small_fls())
        };
        match simulate_frame(&Scene::new(), &cfg).unwrap_err() {
            SonarError::Stage { stage, .. } => assert_eq!(stage, Stage::Sonogram),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn timings_account() {
        let run = simulate_frame(
            &random_benchmark_scene(1),
            &SimulationConfig::new(small_fls()),
        )
        .unwrap();
        let t = run.timings;
        assert!(t.stage_sum() <= t.total * 1.05 + 1e-3);
        assert!([t.rasterize, t.secondary_reflections, t.sonogram, t.noise]
            .iter()
            .all(|&v| v >= 0.0));
    }

    #[test]
    fn msis_scan_slots_and_bearings() {
        let mut sonar = SonarConfig::msis(50, 3.0, 35.0);
        sonar.msis_step = 30f64.to_radians();
        let cfg = SimulationConfig {
            display: Some((40, 40)),
            ..SimulationConfig::new(sonar.clone())
        };
        let scan = simulate_msis_scan(&random_benchmark_scene(3), &cfg).unwrap();
        assert_eq!(scan.pings.len(), 12);
        assert_eq!(scan.mosaic.n_beams, 12);
        for (k, p) in scan.pings.iter().enumerate() {
            let expected = k as f64 * sonar.msis_step;
            assert!((p.bearings[0] - expected).abs() < 1e-9);
        }
        assert!(scan.display.is_some());
        sonar.msis_step = TAU;
        let single = simulate_msis_scan(&Scene::new(), &SimulationConfig::new(sonar)).unwrap();
        assert_eq!(single.mosaic.n_beams, 1);
        assert!(simulate_msis_scan(&Scene::new(), &SimulationConfig::new(small_fls())).is_err());
    }

    #[test]
    fn msis_sees_object_behind() {
        // A box behind the head is only seen once the head has turned around.
        let mut scene = Scene::new();
        let pose = Pose::new(Vector3::new(-10.0, 0.0, 0.0), Vector3::zeros());
        scene
            .add_primitive(
                &Primitive::Box {
                    size: Vector3::new(2.0, 4.0, 4.0),
                },
                3,
                &pose,
                Material::default(),
            )
            .unwrap();
        let mut sonar = SonarConfig::msis(100, 3.0, 35.0);
        sonar.msis_step = 10f64.to_radians();
        let cfg = SimulationConfig {
            noise: false,
            ..SimulationConfig::new(sonar)
        };
        let scan = simulate_msis_scan(&scene, &cfg).unwrap();
        let lit: Vec<usize> = (0..scan.mosaic.n_beams)
            .filter(|&b| scan.mosaic.beam(b).iter().any(|&v| v > 0.0))
            .collect();
        assert!(!lit.is_empty());
        assert!(
            lit.iter().all(|&b| (b as f64 * 10.0 - 180.0).abs() <= 20.0),
            "{lit:?}"
        );
    }

    #[test]
    fn benchmark_rows() {
        let cases = vec![
            BenchmarkCase::new(small_fls()),
            BenchmarkCase::new(SonarConfig::msis(100, 3.0, 35.0)),
        ];
        let report = run_benchmark(&cases, 1, 5).unwrap();
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].std_dev_ms, 0.0);
        assert_eq!(report.rows[0].label, "fls-32x100-60x12");
        assert_eq!(report.rows[1].label, "msis-100-3x35");
        let r = &report.rows[0];
        assert!((r.frame_rate_fps - 1000.0 / r.avg_time_ms).abs() < 1e-9);
        assert!(run_benchmark(&cases, 0, 5).is_err());
    }

    #[test]
    fn presets() {
        let fls = standard_fls_cases();
        assert_eq!(fls.len(), 8);
        let setup: Vec<_> = fls.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(setup[0], "fls-128x500-120x20");
        assert_eq!(setup[1], "fls-128x1000-120x20");
        assert_eq!(setup[2], "fls-256x500-120x20");
        assert_eq!(setup[7], "fls-256x1000-90x15");
        let msis = standard_msis_cases();
        assert_eq!(msis.len(), 4);
        assert_eq!(msis[2].label, "msis-500-2x20");
    }

    #[test]
    fn mean_std_sample() {
        assert_eq!(mean_std(&[3.0]), (3.0, 0.0));
        let (m, s) = mean_std(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        assert!((s - (5.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }

    #[test]
    fn ablation() {
        let cfg = SimulationConfig::new(small_fls());
        let report = run_ablation(&random_benchmark_scene(7), &cfg).unwrap();
        assert!(report.max_intensity_diff <= 1e-6);
        assert!(report.max_distance_diff <= 1e-4);
        assert_eq!(
            report.selective.rays_launched,
            report.brute_force.rays_launched
        );
        let empty = run_ablation(&Scene::new(), &cfg).unwrap();
        assert_eq!(empty.selective.rays_launched, 0);
        assert_eq!(empty.brute_force.rays_launched, 0);
    }

    #[test]
    fn clustered_geometry_skips_most_tests() {
        // A floor spanning the view plus a dense sphere off to one side.
        let mut scene = Scene::new();
        let floor = Pose::new(Vector3::new(15.0, 0.0, -2.0), Vector3::zeros());
        scene
            .add_primitive(
                &Primitive::Plane {
                    width: 40.0,
                    depth: 40.0,
                },
                3,
                &floor,
                Material::default(),
            )
            .unwrap();
        let side = Pose::new(Vector3::new(10.0, 8.0, 0.0), Vector3::zeros());
        scene
            .add_primitive(
                &Primitive::Sphere { radius: 1.0 },
                48,
                &side,
                Material::default(),
            )
            .unwrap();
        let report = run_ablation(&scene, &SimulationConfig::new(small_fls())).unwrap();
        assert!(report.selective.triangle_tests * 10 < report.brute_force.triangle_tests);
    }
}
