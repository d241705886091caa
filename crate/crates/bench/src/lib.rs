//! Shared fixtures for the criterion benchmarks.

use sonarsim_core::pipeline::SimulationConfig;
use sonarsim_core::rasterizer::{perturb_normals, rasterize, GBuffer};
use sonarsim_core::scene::random_benchmark_scene;
use sonarsim_core::sonogram::SonarConfig;
use sonarsim_core::Scene;

/// Random four-primitive scene with the 128-beam, 500-bin, 120° × 20° sonar.
pub fn fls_fixture(seed: u64) -> (Scene, SimulationConfig) {
    let config = SimulationConfig {
        seed,
        ..SimulationConfig::new(SonarConfig::fls(128, 500, 120.0, 20.0))
    };
    (random_benchmark_scene(seed), config)
}

/// Perturbed G-buffer for `fls_fixture(seed)`, ready for tracing.
pub fn gbuffer_fixture(seed: u64) -> (Scene, SimulationConfig, GBuffer) {
    let (scene, config) = fls_fixture(seed);
    let camera = config.camera().expect("valid fixture camera");
    let gbuffer = perturb_normals(&rasterize(&scene, &camera), &scene.materials, seed);
    (scene, config, gbuffer)
}
