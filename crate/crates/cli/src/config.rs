//! Run configuration shared by the config file and the command line.

use std::f64::consts::PI;
use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};
use sonarsim_core::acoustics::WaterProperties;
use sonarsim_core::pipeline::{Attenuation, SimulationConfig};
use sonarsim_core::sonogram::{Device, NoiseParams, PgmDepth, SigmoidParams, SonarConfig};

use crate::error::CliError;

/// Every field is optional so that file values and flags can be layered.
#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    /// Scene description file.
    #[arg(long)]
    pub scene: Option<PathBuf>,
    /// fls or msis.
    #[arg(long, value_parser = parse_device)]
    pub device: Option<Device>,
    #[arg(long)]
    pub beams: Option<usize>,
    #[arg(long)]
    pub bins: Option<usize>,
    #[arg(long)]
    pub fov_azimuth_deg: Option<f64>,
    #[arg(long)]
    pub fov_elevation_deg: Option<f64>,
    /// Meters.
    #[arg(long)]
    pub range_min: Option<f64>,
    /// Meters.
    #[arg(long)]
    pub range_max: Option<f64>,
    #[arg(long)]
    pub frequency_khz: Option<f64>,
    /// Water temperature, °C.
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Parts per thousand.
    #[arg(long)]
    pub salinity: Option<f64>,
    #[arg(long)]
    pub ph: Option<f64>,
    #[arg(long)]
    pub depth_km: Option<f64>,
    /// Sonar position in the scene, meters.
    #[arg(long, num_args = 3, value_names = ["X", "Y", "Z"])]
    pub position: Option<Vec<f64>>,
    /// Sonar roll, pitch and yaw, degrees.
    #[arg(long, num_args = 3, value_names = ["ROLL", "PITCH", "YAW"])]
    pub rotation_deg: Option<Vec<f64>>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub noise: Option<bool>,
    #[arg(long)]
    pub sigma_mult: Option<f64>,
    #[arg(long)]
    pub sigma_add: Option<f64>,
    #[arg(long)]
    pub sigmoid_gain: Option<f64>,
    #[arg(long)]
    pub sigmoid_center: Option<f64>,
    #[arg(long)]
    pub attenuation: Option<bool>,
    /// Fixed absorption coefficient, dB/km, instead of the water model.
    #[arg(long)]
    pub alpha_db_per_km: Option<f64>,
    /// Trace secondary reflections.
    #[arg(long)]
    pub secondary: Option<bool>,
    /// MSIS head step, degrees.
    #[arg(long)]
    pub step_deg: Option<f64>,
    #[arg(long)]
    pub image_width: Option<usize>,
    #[arg(long)]
    pub image_height: Option<usize>,
    #[arg(long)]
    pub display_width: Option<usize>,
    #[arg(long)]
    pub display_height: Option<usize>,
    /// 8 or 16.
    #[arg(long)]
    pub pgm_bits: Option<u8>,
    /// Polar frame output.
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Cartesian image output; defaults to the frame path with a .pgm extension.
    #[arg(long)]
    pub image: Option<PathBuf>,
    /// Writes `<prefix>.distance.pgm` and `<prefix>.intensity.pgm`.
    #[arg(long)]
    pub dump_shader: Option<PathBuf>,
}

fn parse_device(s: &str) -> Result<Device, String> {
    match s.to_ascii_lowercase().as_str() {
        "fls" => Ok(Device::Fls),
        "msis" => Ok(Device::Msis),
        other => Err(format!("unknown device `{other}` (expected fls or msis)")),
    }
}

macro_rules! layer {
    ($top:expr, $bottom:expr, $($field:ident),* $(,)?) => {
        RunConfig { $($field: $top.$field.or($bottom.$field),)* }
    };
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<RunConfig, CliError> {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        let mut config: RunConfig = toml::from_str(&text)
            .map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
        // Paths in a config file are relative to the file.
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [
            &mut config.scene,
            &mut config.output,
            &mut config.image,
            &mut config.dump_shader,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(config)
    }

    /// Values from `self` win; gaps are filled from `below`.
    pub fn over(self, below: RunConfig) -> RunConfig {
        layer!(
            self,
            below,
            scene,
            device,
            beams,
            bins,
            fov_azimuth_deg,
            fov_elevation_deg,
            range_min,
            range_max,
            frequency_khz,
            temperature,
            salinity,
            ph,
            depth_km,
            position,
            rotation_deg,
            seed,
            noise,
            sigma_mult,
            sigma_add,
            sigmoid_gain,
            sigmoid_center,
            attenuation,
            alpha_db_per_km,
            secondary,
            step_deg,
            image_width,
            image_height,
            display_width,
            display_height,
            pgm_bits,
            output,
            image,
            dump_shader,
        )
    }

    /// Defaults for everything left unset.
    pub fn defaults(device: Device) -> RunConfig {
        let sonar = match device {
            Device::Fls => SonarConfig::fls(256, 500, 120.0, 20.0),
            Device::Msis => SonarConfig::msis(500, 3.0, 35.0),
        };
        let water = WaterProperties::default();
        let noise = NoiseParams::default();
        let sigmoid = SigmoidParams::default();
        let output = match device {
            Device::Fls => "frame.sf",
            Device::Msis => "scan.sf",
        };
        RunConfig {
            scene: None,
            device: Some(device),
            beams: Some(sonar.n_beams),
            bins: Some(sonar.n_bins),
            fov_azimuth_deg: Some(sonar.fov_azimuth.to_degrees().round()),
            fov_elevation_deg: Some(sonar.fov_elevation.to_degrees().round()),
            range_min: Some(sonar.range_min),
            range_max: Some(sonar.range_max),
            frequency_khz: Some(sonar.frequency_khz),
            temperature: Some(water.temperature),
            salinity: Some(water.salinity),
            ph: Some(water.ph),
            depth_km: Some(water.depth),
            position: Some(vec![0.0; 3]),
            rotation_deg: Some(vec![0.0; 3]),
            seed: Some(0),
            noise: Some(true),
            sigma_mult: Some(noise.sigma_mult),
            sigma_add: Some(noise.sigma_add),
            sigmoid_gain: Some(sigmoid.gain),
            sigmoid_center: Some(sigmoid.center),
            attenuation: Some(true),
            alpha_db_per_km: None,
            secondary: Some(true),
            step_deg: Some(1.8),
            image_width: None,
            image_height: None,
            display_width: Some(800),
            display_height: Some(600),
            pgm_bits: Some(8),
            output: Some(PathBuf::from(output)),
            image: None,
            dump_shader: None,
        }
    }

    /// Flags over file over defaults; the result has every required field set.
    pub fn resolve(flags: RunConfig, file: Option<RunConfig>) -> RunConfig {
        let layered = flags.over(file.unwrap_or_default());
        let device = layered.device.unwrap_or(Device::Fls);
        let mut resolved = layered.over(RunConfig::defaults(device));
        if resolved.device == Some(Device::Msis) {
            resolved.beams = Some(1);
        }
        if resolved.image.is_none() {
            resolved.image = resolved.output.as_ref().map(|p| p.with_extension("pgm"));
        }
        resolved
    }

    pub fn pgm_depth(&self) -> Result<PgmDepth, CliError> {
        match self.pgm_bits {
            Some(8) | None => Ok(PgmDepth::Eight),
            Some(16) => Ok(PgmDepth::Sixteen),
            Some(other) => Err(CliError::Validation(format!(
                "pgm_bits must be 8 or 16, got {other}"
            ))),
        }
    }

    /// Builds the simulation settings from a resolved configuration.
    pub fn simulation(&self) -> Result<SimulationConfig, CliError> {
        let need = |name: &str| CliError::Validation(format!("missing `{name}`"));
        let triple = |v: &Option<Vec<f64>>, name: &str| -> Result<[f64; 3], CliError> {
            let v = v.as_ref().ok_or_else(|| need(name))?;
            <[f64; 3]>::try_from(v.as_slice())
                .map_err(|_| CliError::Validation(format!("`{name}` needs 3 values")))
        };
        let sonar = SonarConfig {
            device: self.device.ok_or_else(|| need("device"))?,
            n_beams: self.beams.ok_or_else(|| need("beams"))?,
            n_bins: self.bins.ok_or_else(|| need("bins"))?,
            fov_azimuth: self
                .fov_azimuth_deg
                .ok_or_else(|| need("fov_azimuth_deg"))?
                .to_radians(),
            fov_elevation: self
                .fov_elevation_deg
                .ok_or_else(|| need("fov_elevation_deg"))?
                .to_radians(),
            range_min: self.range_min.ok_or_else(|| need("range_min"))?,
            range_max: self.range_max.ok_or_else(|| need("range_max"))?,
            frequency_khz: self.frequency_khz.ok_or_else(|| need("frequency_khz"))?,
            water: WaterProperties {
                temperature: self.temperature.ok_or_else(|| need("temperature"))?,
                salinity: self.salinity.ok_or_else(|| need("salinity"))?,
                ph: self.ph.ok_or_else(|| need("ph"))?,
                depth: self.depth_km.ok_or_else(|| need("depth_km"))?,
            },
            noise: NoiseParams {
                sigma_mult: self.sigma_mult.ok_or_else(|| need("sigma_mult"))?,
                sigma_add: self.sigma_add.ok_or_else(|| need("sigma_add"))?,
                seed: self.seed.unwrap_or(0),
            },
            sigmoid: SigmoidParams {
                gain: self.sigmoid_gain.ok_or_else(|| need("sigmoid_gain"))?,
                center: self.sigmoid_center.ok_or_else(|| need("sigmoid_center"))?,
            },
            msis_step: self.step_deg.ok_or_else(|| need("step_deg"))?.to_radians(),
        };
        sonar
            .validate()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        let [x, y, z] = triple(&self.position, "position")?;
        let [roll, pitch, yaw] = triple(&self.rotation_deg, "rotation_deg")?;
        let pose = nalgebra_pose(
            x,
            y,
            z,
            roll.to_radians(),
            pitch.to_radians(),
            yaw.to_radians(),
        );
        let image_size = match (self.image_width, self.image_height) {
            (Some(w), Some(h)) => Some((w, h)),
            (None, None) => None,
            _ => {
                return Err(CliError::Validation(
                    "set both image_width and image_height, or neither".into(),
                ))
            }
        };
        let attenuation = match (self.attenuation.unwrap_or(true), self.alpha_db_per_km) {
            (false, _) => Attenuation::Off,
            (true, Some(alpha)) => Attenuation::Fixed(alpha),
            (true, None) => Attenuation::Water,
        };
        let display = match (self.display_width, self.display_height) {
            (Some(w), Some(h)) if w > 0 && h > 0 => Some((w, h)),
            (None, None) => None,
            _ => {
                return Err(CliError::Validation(
                    "display size must be two positive numbers".into(),
                ))
            }
        };
        let mut config = SimulationConfig::new(sonar);
        config.pose = pose;
        config.image_size = image_size;
        config.seed = self.seed.unwrap_or(0);
        config.noise = self.noise.unwrap_or(true);
        config.attenuation = attenuation;
        config.secondary = self.secondary.unwrap_or(true);
        config.display = display;
        if let Some(step) = self.step_deg {
            if !(step > 0.0 && step.to_radians() <= 2.0 * PI + 1e-12) {
                return Err(CliError::Validation(format!(
                    "step_deg {step} not in (0, 360]"
                )));
            }
        }
        config
            .gamma()
            .map_err(|e| CliError::Validation(e.to_string()))?;
        Ok(config)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }
}

fn nalgebra_pose(
    x: f64,
    y: f64,
    z: f64,
    roll: f64,
    pitch: f64,
    yaw: f64,
) -> nalgebra::Isometry3<f64> {
    nalgebra::Isometry3::from_parts(
        nalgebra::Translation3::new(x, y, z),
        nalgebra::UnitQuaternion::from_euler_angles(roll, pitch, yaw),
    )
}
