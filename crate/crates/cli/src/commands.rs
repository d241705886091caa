use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use sonarsim_core::metrics::compare_frames;
use sonarsim_core::pipeline::{
    run_ablation, run_benchmark, simulate_frame, simulate_msis_scan, standard_fls_cases,
    standard_msis_cases, BenchmarkCase, SimulationConfig,
};
use sonarsim_core::scene::{load_scene, random_scene_in_view, BenchmarkView};
use sonarsim_core::sonogram::{
    read_frame, write_frame, write_gray_pgm, write_pgm, Device, PgmDepth,
};
use sonarsim_core::{Scene, ShaderImage};

use crate::config::RunConfig;
use crate::error::CliError;
use crate::Preset;

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn prepare(
    config_path: Option<&Path>,
    flags: RunConfig,
) -> Result<(RunConfig, SimulationConfig, Scene), CliError> {
    let file = config_path.map(RunConfig::load).transpose()?;
    let resolved = RunConfig::resolve(flags, file);
    let sim = resolved.simulation()?;
    let scene_path = resolved.scene.as_ref().ok_or_else(|| {
        CliError::Usage("no scene given (use --scene or `scene` in the config file)".into())
    })?;
    let scene = load_scene(scene_path)?;
    Ok((resolved, sim, scene))
}

fn sidecar(frame_path: &Path) -> PathBuf {
    let mut name = frame_path.as_os_str().to_owned();
    name.push(".config.toml");
    PathBuf::from(name)
}

fn write_outputs(
    resolved: &RunConfig,
    frame: &sonarsim_core::SonarFrame,
    image: Option<&sonarsim_core::sonogram::AcousticImage>,
) -> Result<(), CliError> {
    let output = resolved.output.as_ref().expect("resolved output");
    write_frame(output, frame)?;
    let config_path = sidecar(output);
    fs::write(&config_path, resolved.to_toml()).map_err(|e| io_err(&config_path, e))?;
    if let (Some(image), Some(path)) = (image, resolved.image.as_ref()) {
        write_pgm(path, image, resolved.pgm_depth()?)?;
    }
    Ok(())
}

/// Primary-layer distance (scaled by the maximum range) and intensity images.
fn dump_shader(
    prefix: &Path,
    shader: &ShaderImage,
    range_max: f64,
    depth: PgmDepth,
) -> Result<(), CliError> {
    let (w, h) = (shader.width(), shader.height());
    let echoes = &shader.primary.echoes;
    let distance: Vec<f64> = echoes
        .iter()
        .map(|e| {
            if e.is_hit() {
                e.distance / range_max
            } else {
                0.0
            }
        })
        .collect();
    let intensity: Vec<f64> = echoes.iter().map(|e| e.intensity).collect();
    let with_suffix = |suffix: &str| {
        let mut name = prefix.as_os_str().to_owned();
        name.push(suffix);
        PathBuf::from(name)
    };
    write_gray_pgm(with_suffix(".distance.pgm"), &distance, w, h, depth)?;
    write_gray_pgm(with_suffix(".intensity.pgm"), &intensity, w, h, depth)?;
    Ok(())
}

pub fn render(config_path: Option<&Path>, flags: RunConfig) -> Result<(), CliError> {
    let (resolved, sim, scene) = prepare(config_path, flags)?;
    let run = simulate_frame(&scene, &sim)?;
    write_outputs(&resolved, &run.frame, run.display.as_ref())?;
    if let Some(prefix) = &resolved.dump_shader {
        dump_shader(
            prefix,
            &run.shader,
            sim.sonar.range_max,
            resolved.pgm_depth()?,
        )?;
    }
    println!(
        "{} beams x {} bins, {} rays, {:.1} ms -> {}",
        run.frame.n_beams,
        run.frame.n_bins,
        run.intersections.rays_launched,
        run.timings.total,
        resolved.output.as_ref().expect("resolved output").display()
    );
    Ok(())
}

pub fn scan(config_path: Option<&Path>, flags: RunConfig) -> Result<(), CliError> {
    let file = config_path.map(RunConfig::load).transpose()?;
    let device = flags
        .device
        .or(file.as_ref().and_then(|f| f.device))
        .unwrap_or(Device::Fls);
    if device != Device::Msis {
        return Err(CliError::Usage(
            "scan needs an MSIS device (--device msis)".into(),
        ));
    }
    let (resolved, sim, scene) = prepare(None, RunConfig::resolve(flags, file))?;
    let scan = simulate_msis_scan(&scene, &sim)?;
    write_outputs(&resolved, &scan.mosaic, scan.display.as_ref())?;
    println!(
        "{} head positions x {} bins -> {}",
        scan.mosaic.n_beams,
        scan.mosaic.n_bins,
        resolved.output.as_ref().expect("resolved output").display()
    );
    Ok(())
}

fn write_report(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(path) => fs::write(path, text).map_err(|e| io_err(path, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::Io(format!("stdout: {e}"))),
    }
}

fn csv_text<T: serde::Serialize>(rows: &[T]) -> Result<String, CliError> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    for row in rows {
        writer
            .serialize(row)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    let bytes = writer
        .into_inner()
        .map_err(|e| CliError::Io(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv is utf-8"))
}

#[derive(serde::Serialize)]
struct AblationRow {
    label: String,
    selective_ms: f64,
    brute_force_ms: f64,
    speedup: f64,
    selective_triangle_tests: u64,
    brute_force_triangle_tests: u64,
    selective_box_tests: u64,
    rays_launched: u64,
    max_intensity_diff: f64,
    max_distance_diff: f64,
}

pub fn bench(
    preset: Preset,
    samples: usize,
    seed: u64,
    ablation: bool,
    output: Option<&Path>,
) -> Result<(), CliError> {
    let cases: Vec<BenchmarkCase> = match preset {
        Preset::Fls => standard_fls_cases(),
        Preset::Msis => standard_msis_cases(),
        Preset::All => standard_fls_cases()
            .into_iter()
            .chain(standard_msis_cases())
            .collect(),
    };
    let report = run_benchmark(&cases, samples, seed)?;
    let mut text = csv_text(&report.rows)?;
    if ablation {
        let mut rows = Vec::new();
        for case in &cases {
            let view = BenchmarkView {
                fov_azimuth: case.sonar.fov_azimuth,
                fov_elevation: case.sonar.fov_elevation,
                range_min: case.sonar.range_min,
                range_max: case.sonar.range_max,
            };
            let scene = random_scene_in_view(seed, &view);
            let r = run_ablation(&scene, &SimulationConfig::new(case.sonar.clone()))?;
            rows.push(AblationRow {
                label: case.label.clone(),
                selective_ms: r.selective_ms,
                brute_force_ms: r.brute_force_ms,
                speedup: r.speedup,
                selective_triangle_tests: r.selective.triangle_tests,
                brute_force_triangle_tests: r.brute_force.triangle_tests,
                selective_box_tests: r.selective.box_tests,
                rays_launched: r.selective.rays_launched,
                max_intensity_diff: r.max_intensity_diff,
                max_distance_diff: r.max_distance_diff,
            });
        }
        text.push('\n');
        text.push_str(&csv_text(&rows)?);
    }
    write_report(output, &text)
}

pub fn compare(a: &Path, b: &Path, output: Option<&Path>) -> Result<(), CliError> {
    let fa = read_frame(a)?;
    let fb = read_frame(b)?;
    let report = compare_frames(&fa, &fb)?;
    let text = toml::to_string(&report).map_err(|e| CliError::Io(e.to_string()))?;
    write_report(output, &text)
}
