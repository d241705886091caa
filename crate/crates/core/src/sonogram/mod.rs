//! CPU stage: shader image → polar sonar frame.
//!
//! Shader-image columns are split into contiguous beam sections; all pixels
//! of a section share the section's bearing (the elevation is discarded).
//! Within a beam, returns are grouped into range bins and each bin's value
//! is the mean of a sigmoid applied to its echo intensities. Speckle noise
//! then perturbs every cell.

mod display;
mod io;

use std::f64::consts::TAU;
use std::ops::Range;

use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::acoustics::WaterProperties;
use crate::error::{Result, SonarError};
use crate::rasterizer::column_azimuth;
use crate::raytracer::ShaderImage;
use crate::rng::CellRng;

pub use display::{frame_to_cartesian, write_gray_pgm, write_pgm, AcousticImage, PgmDepth};
pub use io::{decode_frame, encode_frame, read_frame, write_frame, FRAME_MAGIC, FRAME_VERSION};

const NOISE_STREAM: u64 = 0x6e6f_6973;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Device {
    /// Forward-looking sonar: every beam of the fan in one ping.
    Fls,
    /// Mechanical scanning sonar: one beam per ping, rotated stepwise.
    Msis,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Standard deviation of the multiplicative term (mean 1) at mid-range.
    pub sigma_mult: f64,
    /// Standard deviation of the additive zero-mean term.
    pub sigma_add: f64,
    pub seed: u64,
}

impl NoiseParams {
    pub const OFF: NoiseParams = NoiseParams {
        sigma_mult: 0.0,
        sigma_add: 0.0,
        seed: 0,
    };

    pub fn is_off(&self) -> bool {
        self.sigma_mult == 0.0 && self.sigma_add == 0.0
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        NoiseParams {
            sigma_mult: 0.15,
            sigma_add: 0.02,
            seed: 0,
        }
    }
}

/// Logistic curve `1 / (1 + exp(−gain·(i − center)))`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SigmoidParams {
    pub gain: f64,
    pub center: f64,
}

impl Default for SigmoidParams {
    fn default() -> Self {
        SigmoidParams {
            gain: 12.0,
            center: 0.5,
        }
    }
}

impl SigmoidParams {
    pub fn apply(&self, intensity: f64) -> f64 {
        1.0 / (1.0 + (-self.gain * (intensity - self.center)).exp())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SonarConfig {
    pub device: Device,
    pub n_beams: usize,
    pub n_bins: usize,
    /// Radians.
    pub fov_azimuth: f64,
    /// Radians.
    pub fov_elevation: f64,
    /// Meters.
    pub range_min: f64,
    /// Meters.
    pub range_max: f64,
    pub frequency_khz: f64,
    pub water: WaterProperties,
    pub noise: NoiseParams,
    pub sigmoid: SigmoidParams,
    /// Head rotation per ping, radians (MSIS only).
    pub msis_step: f64,
}

impl SonarConfig {
    /// Forward-looking sonar, 1–30 m, 700 kHz.
    pub fn fls(
        n_beams: usize,
        n_bins: usize,
        fov_azimuth_deg: f64,
        fov_elevation_deg: f64,
    ) -> SonarConfig {
        SonarConfig {
            device: Device::Fls,
            n_beams,
            n_bins,
            fov_azimuth: fov_azimuth_deg.to_radians(),
            fov_elevation: fov_elevation_deg.to_radians(),
            range_min: 1.0,
            range_max: 30.0,
            frequency_khz: 700.0,
            water: WaterProperties::default(),
            noise: NoiseParams::default(),
            sigmoid: SigmoidParams::default(),
            msis_step: 1.8f64.to_radians(),
        }
    }

    /// Single-beam scanning sonar with a 1.8° step.
    pub fn msis(n_bins: usize, fov_azimuth_deg: f64, fov_elevation_deg: f64) -> SonarConfig {
        SonarConfig {
            device: Device::Msis,
            ..SonarConfig::fls(1, n_bins, fov_azimuth_deg, fov_elevation_deg)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_beams == 0 {
            return Err(SonarError::out_of_range("n_beams", "must be at least 1"));
        }
        if self.n_bins == 0 {
            return Err(SonarError::out_of_range("n_bins", "must be at least 1"));
        }
        if self.device == Device::Msis && self.n_beams != 1 {
            return Err(SonarError::out_of_range(
                "n_beams",
                "an MSIS head has exactly one beam",
            ));
        }
        if !(self.range_min > 0.0 && self.range_min < self.range_max && self.range_max.is_finite())
        {
            return Err(SonarError::out_of_range(
                "range",
                format!(
                    "need 0 < range_min < range_max, got [{}, {}]",
                    self.range_min, self.range_max
                ),
            ));
        }
        let pi = std::f64::consts::PI;
        if !(self.fov_azimuth > 0.0 && self.fov_azimuth < pi) {
            return Err(SonarError::out_of_range(
                "fov_azimuth",
                "must be in (0°, 180°)",
            ));
        }
        if !(self.fov_elevation > 0.0 && self.fov_elevation < pi) {
            return Err(SonarError::out_of_range(
                "fov_elevation",
                "must be in (0°, 180°)",
            ));
        }
        if self.frequency_khz.is_nan() || self.frequency_khz <= 0.0 {
            return Err(SonarError::out_of_range("frequency", "must be positive"));
        }
        if !(self.noise.sigma_mult >= 0.0 && self.noise.sigma_add >= 0.0) {
            return Err(SonarError::out_of_range(
                "noise",
                "standard deviations must be >= 0",
            ));
        }
        if self.sigmoid.gain.is_nan() || self.sigmoid.gain <= 0.0 {
            return Err(SonarError::out_of_range("sigmoid.gain", "must be positive"));
        }
        if self.device == Device::Msis && !(self.msis_step > 0.0 && self.msis_step <= TAU) {
            return Err(SonarError::out_of_range(
                "msis_step",
                "must be in (0°, 360°]",
            ));
        }
        self.water.validate()
    }

    pub fn bin_width(&self) -> f64 {
        (self.range_max - self.range_min) / self.n_bins as f64
    }
}

/// Polar acoustic frame: `n_beams × n_bins` intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SonarFrame {
    pub device: Device,
    pub n_beams: usize,
    pub n_bins: usize,
    /// Beam-major: `intensities[beam * n_bins + bin]`.
    pub intensities: Vec<f64>,
    /// Per-beam bearing, radians, strictly increasing.
    pub bearings: Vec<f64>,
    pub fov_azimuth: f64,
    pub fov_elevation: f64,
    pub range_min: f64,
    pub range_max: f64,
    pub frequency_khz: f64,
    /// Ping counter; also selects the noise substream.
    pub timestamp: u64,
}

impl SonarFrame {
    pub fn bin_width(&self) -> f64 {
        (self.range_max - self.range_min) / self.n_bins as f64
    }

    pub fn get(&self, beam: usize, bin: usize) -> f64 {
        self.intensities[beam * self.n_bins + bin]
    }

    pub fn beam(&self, beam: usize) -> &[f64] {
        &self.intensities[beam * self.n_bins..(beam + 1) * self.n_bins]
    }

    pub fn total_energy(&self) -> f64 {
        self.intensities.iter().sum()
    }
}

/// Splits `image_width` columns into `n_beams` contiguous sections.
///
/// Widths differ by at most one; the first `image_width % n_beams` sections
/// take the extra column.
pub fn beam_sections(image_width: usize, n_beams: usize) -> Result<Vec<Range<usize>>> {
    if n_beams == 0 || image_width < n_beams {
        return Err(SonarError::invalid(format!(
            "cannot split {image_width} columns into {n_beams} beams"
        )));
    }
    let base = image_width / n_beams;
    let extra = image_width % n_beams;
    let mut start = 0;
    Ok((0..n_beams)
        .map(|b| {
            let len = base + usize::from(b < extra);
            let section = start..start + len;
            start += len;
            section
        })
        .collect())
}

/// Bin of a pulse distance, or `None` outside `[range_min, range_max]`.
pub fn bin_index(distance: f64, n_bins: usize, range_min: f64, range_max: f64) -> Option<usize> {
    if !(distance >= range_min && distance <= range_max) {
        return None;
    }
    let bin = ((distance - range_min) / (range_max - range_min) * n_bins as f64).floor() as usize;
    Some(bin.min(n_bins - 1))
}

/// Groups `(distance, intensity)` samples into range bins.
pub fn distance_histogram(
    samples: &[(f64, f64)],
    n_bins: usize,
    range_min: f64,
    range_max: f64,
) -> Vec<Vec<f64>> {
    let mut bins = vec![Vec::new(); n_bins];
    for &(d, i) in samples {
        if let Some(b) = bin_index(d, n_bins, range_min, range_max) {
            bins[b].push(i);
        }
    }
    bins
}

/// Mean sigmoid response of one bin's samples; empty bins are 0.
pub fn energy_normalization(bin_samples: &[f64], sigmoid: &SigmoidParams) -> f64 {
    if bin_samples.is_empty() {
        return 0.0;
    }
    let n = bin_samples.len() as f64;
    bin_samples.iter().map(|&i| sigmoid.apply(i) / n).sum()
}

/// Applies `Î = clamp(I·η_m + η_a, 0, 1)` to every cell.
///
/// `η_m ~ N(1, σ_m·(0.5 + bin/n_bins))` widens linearly with range and
/// `η_a ~ N(0, σ_a)`. Each cell draws from its own stream keyed by
/// `(seed, timestamp, beam, bin)`.
pub fn apply_speckle(frame: &SonarFrame, noise: &NoiseParams) -> SonarFrame {
    if noise.is_off() {
        return frame.clone();
    }
    let n_bins = frame.n_bins;
    let intensities = frame
        .intensities
        .par_iter()
        .enumerate()
        .map(|(cell, &value)| {
            let (beam, bin) = (cell / n_bins, cell % n_bins);
            let mut rng = CellRng::new(&[
                noise.seed,
                NOISE_STREAM,
                frame.timestamp,
                beam as u64,
                bin as u64,
            ]);
            let gm: f64 = StandardNormal.sample(&mut rng);
            let ga: f64 = StandardNormal.sample(&mut rng);
            let spread = noise.sigma_mult * (0.5 + bin as f64 / n_bins as f64);
            (value * (1.0 + spread * gm) + noise.sigma_add * ga).clamp(0.0, 1.0)
        })
        .collect();
    SonarFrame {
        intensities,
        ..frame.clone()
    }
}

/// Counts of shader samples routed into bins versus dropped as out of range.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct BinningStats {
    pub assigned: usize,
    pub discarded: usize,
}

pub fn build_frame(
    shader: &ShaderImage,
    config: &SonarConfig,
    timestamp: u64,
) -> Result<SonarFrame> {
    build_frame_with_stats(shader, config, timestamp).map(|(frame, _)| frame)
}

/// Noise-free polar frame plus binning counters.
pub fn bin_shader(
    shader: &ShaderImage,
    config: &SonarConfig,
    timestamp: u64,
) -> Result<(SonarFrame, BinningStats)> {
    config.validate()?;
    let (width, height) = (shader.width(), shader.height());
    if shader.primary.echoes.len() != width * height
        || (shader.secondary.width, shader.secondary.height) != (width, height)
    {
        return Err(SonarError::mismatch(
            format!("{width}x{height} primary and secondary layers"),
            format!(
                "{}x{} secondary",
                shader.secondary.width, shader.secondary.height
            ),
        ));
    }
    let sections = beam_sections(width, config.n_beams)?;
    let n_bins = config.n_bins;
    let per_beam: Vec<(Vec<f64>, BinningStats)> = sections
        .par_iter()
        .map(|cols| {
            let mut sums = vec![0.0; n_bins];
            let mut counts = vec![0usize; n_bins];
            let mut stats = BinningStats::default();
            for row in 0..height {
                for col in cols.clone() {
                    for echo in shader.samples_at(row * width + col) {
                        match bin_index(echo.distance, n_bins, config.range_min, config.range_max) {
                            Some(b) => {
                                sums[b] += config.sigmoid.apply(echo.intensity);
                                counts[b] += 1;
                                stats.assigned += 1;
                            }
                            None => stats.discarded += 1,
                        }
                    }
                }
            }
            let values = sums
                .iter()
                .zip(&counts)
                .map(|(&s, &n)| {
                    if n == 0 {
                        0.0
                    } else {
                        (s / n as f64).clamp(0.0, 1.0)
                    }
                })
                .collect();
            (values, stats)
        })
        .collect();

    let mut intensities = Vec::with_capacity(config.n_beams * n_bins);
    let mut stats = BinningStats::default();
    for (values, s) in per_beam {
        intensities.extend(values);
        stats.assigned += s.assigned;
        stats.discarded += s.discarded;
    }
    let bearings = sections
        .iter()
        .map(|c| column_azimuth((c.start + c.end) as f64 / 2.0, width, config.fov_azimuth))
        .collect();
    let frame = SonarFrame {
        device: config.device,
        n_beams: config.n_beams,
        n_bins,
        intensities,
        bearings,
        fov_azimuth: config.fov_azimuth,
        fov_elevation: config.fov_elevation,
        range_min: config.range_min,
        range_max: config.range_max,
        frequency_khz: config.frequency_khz,
        timestamp,
    };
    Ok((frame, stats))
}

/// Full CPU stage: beam sections, histograms, normalization, then speckle.
pub fn build_frame_with_stats(
    shader: &ShaderImage,
    config: &SonarConfig,
    timestamp: u64,
) -> Result<(SonarFrame, BinningStats)> {
    let (frame, stats) = bin_shader(shader, config, timestamp)?;
    Ok((apply_speckle(&frame, &config.noise), stats))
}

/// Number of head positions in one revolution at `step` radians.
///
/// When `step` does not divide 2π the last sector is narrower.
pub fn scan_slots(step: f64) -> Result<usize> {
    if !(step > 0.0 && step <= TAU + 1e-12) {
        return Err(SonarError::invalid(format!(
            "scan step {step} rad not in (0, 2π]"
        )));
    }
    let n = TAU / step;
    Ok(if (n - n.round()).abs() < 1e-6 {
        n.round() as usize
    } else {
        n.ceil() as usize
    }
    .max(1))
}

/// Assembles single-beam pings into a 360° polar mosaic.
///
/// Slot `k` covers bearing `k·step`; each ping lands in the slot nearest its
/// bearing (wrapped to `[0, 2π)`), later pings overwriting earlier ones.
pub fn accumulate_msis_scan(frames: &[SonarFrame], step: f64) -> Result<SonarFrame> {
    let slots = scan_slots(step)?;
    let first = frames
        .first()
        .ok_or_else(|| SonarError::invalid("an MSIS scan needs at least one ping"))?;
    let n_bins = first.n_bins;
    let mut intensities = vec![0.0; slots * n_bins];
    for frame in frames {
        if frame.n_beams != 1 {
            return Err(SonarError::invalid(format!(
                "MSIS ping has {} beams, expected 1",
                frame.n_beams
            )));
        }
        if frame.n_bins != n_bins
            || frame.range_min != first.range_min
            || frame.range_max != first.range_max
        {
            return Err(SonarError::mismatch(
                format!(
                    "{n_bins} bins over [{}, {}] m",
                    first.range_min, first.range_max
                ),
                format!(
                    "{} bins over [{}, {}] m",
                    frame.n_bins, frame.range_min, frame.range_max
                ),
            ));
        }
        let bearing = frame.bearings[0].rem_euclid(TAU);
        let slot = (bearing / step).round() as usize % slots;
        intensities[slot * n_bins..(slot + 1) * n_bins].copy_from_slice(&frame.intensities);
    }
    let last = frames.last().expect("non-empty");
    Ok(SonarFrame {
        device: Device::Msis,
        n_beams: slots,
        n_bins,
        intensities,
        bearings: (0..slots).map(|k| k as f64 * step).collect(),
        fov_azimuth: TAU,
        fov_elevation: first.fov_elevation,
        range_min: first.range_min,
        range_max: first.range_max,
        frequency_khz: first.frequency_khz,
        timestamp: last.timestamp,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rasterizer::{Echo, ReflectionImage};

    fn frame(n_beams: usize, n_bins: usize, value: f64) -> SonarFrame {
        SonarFrame {
            device: Device::Fls,
            n_beams,
            n_bins,
            intensities: vec![value; n_beams * n_bins],
            bearings: (0..n_beams).map(|b| b as f64 * 0.01).collect(),
            fov_azimuth: 1.0,
            fov_elevation: 0.2,
            range_min: 1.0,
            range_max: 11.0,
            frequency_khz: 700.0,
            timestamp: 0,
        }
    }

    #[test]
    fn sections() {
        let s = beam_sections(512, 128).unwrap();
        assert_eq!(s.len(), 128);
        assert!(s.iter().all(|r| r.len() == 4));
        let s = beam_sections(7, 7).unwrap();
        assert!(s.iter().enumerate().all(|(i, r)| *r == (i..i + 1)));
        let s = beam_sections(10, 3).unwrap();
        assert_eq!(s.iter().map(|r| r.len()).collect::<Vec<_>>(), vec![4, 3, 3]);
        assert_eq!(s.last().unwrap().end, 10);
        assert!(beam_sections(3, 4).is_err());
        assert!(beam_sections(3, 0).is_err());
    }

    #[test]
    fn histogram_rules() {
        assert_eq!(bin_index(1.5, 10, 1.0, 11.0), Some(0));
        assert_eq!(bin_index(11.0, 10, 1.0, 11.0), Some(9));
        assert_eq!(bin_index(0.99, 10, 1.0, 11.0), None);
        assert_eq!(bin_index(11.01, 10, 1.0, 11.0), None);
        assert_eq!(bin_index(f64::INFINITY, 10, 1.0, 11.0), None);
        let h = distance_histogram(
            &[(1.5, 0.2), (1.7, 0.4), (10.9, 1.0), (0.5, 1.0)],
            10,
            1.0,
            11.0,
        );
        assert_eq!(h[0], vec![0.2, 0.4]);
        assert_eq!(h[9], vec![1.0]);
        assert_eq!(h.iter().map(Vec::len).sum::<usize>(), 3);
    }

    #[test]
    fn normalization_rules() {
        let s = SigmoidParams::default();
        let v = 0.37;
        let got = energy_normalization(&[v; 5], &s);
        assert!((got - s.apply(v)).abs() < 1e-15);
        assert_eq!(energy_normalization(&[], &s), 0.0);
        // Pick intensities whose sigmoid values are 0.2 and 0.6.
        let inv = |y: f64| s.center - ((1.0 / y - 1.0).ln()) / s.gain;
        let got = energy_normalization(&[inv(0.2), inv(0.6)], &s);
        assert!((got - 0.4).abs() < 1e-12);
    }

    #[test]
    fn sigmoid_bounds() {
        let s = SigmoidParams::default();
        for i in [0.0, 0.25, 0.5, 0.75, 1.0] {
            let y = s.apply(i);
            assert!(y > 0.0 && y < 1.0);
        }
        assert!((s.apply(0.5) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn speckle_off_and_determinism() {
        let f = frame(8, 16, 0.5);
        assert_eq!(apply_speckle(&f, &NoiseParams::OFF), f);
        let noise = NoiseParams {
            sigma_mult: 0.1,
            sigma_add: 0.05,
            seed: 3,
        };
        let a = apply_speckle(&f, &noise);
        assert_eq!(a, apply_speckle(&f, &noise));
        assert_ne!(a, f);
        let later = SonarFrame {
            timestamp: 1,
            ..f.clone()
        };
        assert_ne!(apply_speckle(&later, &noise).intensities, a.intensities);
        assert!(a.intensities.iter().all(|v| (0.0..=1.0).contains(v)));
    }

    #[test]
    fn multiplicative_spread_grows_with_range() {
        let (n_beams, n_bins) = (10_000, 100);
        let f = frame(n_beams, n_bins, 0.5);
        let noise = NoiseParams {
            sigma_mult: 0.1,
            sigma_add: 0.0,
            seed: 11,
        };
        let out = apply_speckle(&f, &noise);
        for bin in [0, 25, 50, 99] {
            let ratios: Vec<f64> = (0..n_beams).map(|b| out.get(b, bin) / 0.5).collect();
            let mean = ratios.iter().sum::<f64>() / n_beams as f64;
            let std = (ratios.iter().map(|r| (r - mean).powi(2)).sum::<f64>()
                / (n_beams - 1) as f64)
                .sqrt();
            let expected = 0.1 * (0.5 + bin as f64 / n_bins as f64);
            assert!(
                (std - expected).abs() / expected < 0.02,
                "bin {bin}: {std} vs {expected}"
            );
        }
    }

    fn shader(width: usize, height: usize) -> ShaderImage {
        ShaderImage {
            primary: ReflectionImage::empty(width, height),
            secondary: ReflectionImage::empty(width, height),
        }
    }

    fn config(n_beams: usize, n_bins: usize) -> SonarConfig {
        SonarConfig {
            range_min: 1.0,
            range_max: 11.0,
            noise: NoiseParams::OFF,
            ..SonarConfig::fls(n_beams, n_bins, 60.0, 10.0)
        }
    }

    #[test]
    fn empty_shader_gives_zero_frame() {
        let f = build_frame(&shader(8, 4), &config(4, 10), 0).unwrap();
        assert!(f.intensities.iter().all(|&v| v == 0.0));
        assert_eq!(f.bearings.len(), 4);
        assert!(f.bearings.windows(2).all(|w| w[1] > w[0]));
        assert!(f.bearings[0] > -30f64.to_radians() && f.bearings[3] < 30f64.to_radians());
    }

    #[test]
    fn primary_and_secondary_both_binned() {
        let mut s = shader(2, 1);
        s.primary.echoes[0] = Echo {
            distance: 10.0,
            intensity: 0.8,
        };
        s.secondary.echoes[0] = Echo {
            distance: 14.0,
            intensity: 0.3,
        };
        s.primary.echoes[1] = Echo {
            distance: 5.0,
            intensity: 0.6,
        };
        let cfg = SonarConfig {
            range_max: 21.0,
            ..config(1, 20)
        };
        let (f, stats) = bin_shader(&s, &cfg, 0).unwrap();
        assert_eq!(
            stats,
            BinningStats {
                assigned: 3,
                discarded: 0
            }
        );
        let sg = cfg.sigmoid;
        assert!((f.get(0, 9) - sg.apply(0.8)).abs() < 1e-15);
        assert!((f.get(0, 13) - sg.apply(0.3)).abs() < 1e-15);
        assert!((f.get(0, 4) - sg.apply(0.6)).abs() < 1e-15);
        assert_eq!(f.intensities.iter().filter(|&&v| v > 0.0).count(), 3);

        // Beyond range_max the secondary return is dropped at binning time.
        let (_, stats) = bin_shader(
            &s,
            &SonarConfig {
                range_max: 12.0,
                ..config(1, 20)
            },
            0,
        )
        .unwrap();
        assert_eq!(
            stats,
            BinningStats {
                assigned: 2,
                discarded: 1
            }
        );
    }

    #[test]
    fn build_matches_histogram_composition() {
        let mut s = shader(6, 3);
        for (i, e) in s.primary.echoes.iter_mut().enumerate() {
            *e = Echo {
                distance: 1.0 + 0.53 * i as f64,
                intensity: (i as f64 * 0.37) % 1.0,
            };
        }
        let cfg = config(2, 7);
        let f = build_frame(&s, &cfg, 0).unwrap();
        for (beam, cols) in beam_sections(6, 2).unwrap().into_iter().enumerate() {
            let samples: Vec<(f64, f64)> = (0..3)
                .flat_map(|r| cols.clone().map(move |c| r * 6 + c))
                .map(|i| (s.primary.echoes[i].distance, s.primary.echoes[i].intensity))
                .collect();
            let hist = distance_histogram(&samples, 7, 1.0, 11.0);
            for (bin, values) in hist.iter().enumerate() {
                let expected = energy_normalization(values, &cfg.sigmoid);
                assert!((f.get(beam, bin) - expected).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn dimension_checks() {
        let mut s = shader(4, 2);
        s.secondary = ReflectionImage::empty(2, 4);
        assert!(build_frame(&s, &config(2, 4), 0).is_err());
        assert!(build_frame(&shader(2, 2), &config(4, 4), 0).is_err());
    }

    #[test]
    fn config_validation() {
        assert!(SonarConfig::fls(128, 500, 120.0, 20.0).validate().is_ok());
        assert!(SonarConfig::msis(500, 3.0, 35.0).validate().is_ok());
        assert!(SonarConfig {
            n_beams: 2,
            ..SonarConfig::msis(500, 3.0, 35.0)
        }
        .validate()
        .is_err());
        assert!(SonarConfig {
            n_bins: 0,
            ..SonarConfig::fls(1, 1, 10.0, 10.0)
        }
        .validate()
        .is_err());
        assert!(SonarConfig::fls(1, 1, 190.0, 10.0).validate().is_err());
    }

    fn ping(bearing: f64, value: f64) -> SonarFrame {
        SonarFrame {
            device: Device::Msis,
            bearings: vec![bearing],
            ..frame(1, 4, value)
        }
    }

    #[test]
    fn msis_slots() {
        assert_eq!(scan_slots(TAU / 360.0).unwrap(), 360);
        assert_eq!(scan_slots(1.8f64.to_radians()).unwrap(), 200);
        assert_eq!(scan_slots(TAU).unwrap(), 1);
        assert_eq!(scan_slots(0.7 * TAU).unwrap(), 2);
        assert!(scan_slots(0.0).is_err());
    }

    #[test]
    fn msis_overwrite_and_wrap() {
        let step = TAU / 4.0;
        let first: Vec<_> = (0..4).map(|k| ping(k as f64 * step, 0.1)).collect();
        let second: Vec<_> = (0..4).map(|k| ping(k as f64 * step + TAU, 0.9)).collect();
        let all: Vec<_> = first.iter().chain(&second).cloned().collect();
        let mosaic = accumulate_msis_scan(&all, step).unwrap();
        assert_eq!(mosaic.n_beams, 4);
        assert!(mosaic.intensities.iter().all(|&v| v == 0.9));
        assert_eq!(mosaic.fov_azimuth, TAU);
        let partial = accumulate_msis_scan(&[ping(-step, 0.5)], step).unwrap();
        assert_eq!(partial.get(3, 0), 0.5);
        assert_eq!(partial.get(0, 0), 0.0);
        assert!(accumulate_msis_scan(&[], step).is_err());
        assert!(accumulate_msis_scan(&[frame(2, 4, 0.0)], step).is_err());
    }
}
