//! Image similarity on polar frames, each mapped to `[0, 1]` (1 = identical).

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SonarError};
use crate::sonogram::SonarFrame;

/// Standard five-scale MS-SSIM exponents.
pub const MS_SSIM_WEIGHTS: [f64; 5] = [0.0448, 0.2856, 0.3001, 0.2363, 0.1333];

/// Borrowed row-major intensity grid.
#[derive(Debug, Clone, Copy)]
pub struct Grid<'a> {
    pub width: usize,
    pub height: usize,
    pub data: &'a [f64],
}

impl<'a> Grid<'a> {
    pub fn new(data: &'a [f64], width: usize, height: usize) -> Result<Grid<'a>> {
        if data.len() != width * height {
            return Err(SonarError::mismatch(
                format!("{} samples for {width}x{height}", width * height),
                format!("{} samples", data.len()),
            ));
        }
        Ok(Grid {
            width,
            height,
            data,
        })
    }

    /// One row per beam, one column per bin.
    pub fn from_frame(frame: &'a SonarFrame) -> Grid<'a> {
        Grid {
            width: frame.n_bins,
            height: frame.n_beams,
            data: &frame.intensities,
        }
    }
}

fn same_shape(a: &Grid, b: &Grid) -> Result<()> {
    if (a.width, a.height) != (b.width, b.height) {
        return Err(SonarError::mismatch(
            format!("{}x{}", a.width, a.height),
            format!("{}x{}", b.width, b.height),
        ));
    }
    Ok(())
}

/// What to do with a negative mean SSIM.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NegativeSsim {
    /// Map `[-1, 1]` onto `[0, 1]` via `(s + 1) / 2`; non-negative values pass through.
    Rescale,
    Clamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    pub psnr_cap_db: f64,
    pub window: usize,
    pub sigma: f64,
    pub k1: f64,
    pub k2: f64,
    pub data_range: f64,
    pub negative_ssim: NegativeSsim,
    pub ms_ssim_weights: Vec<f64>,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            psnr_cap_db: 100.0,
            window: 11,
            sigma: 1.5,
            k1: 0.01,
            k2: 0.03,
            data_range: 1.0,
            negative_ssim: NegativeSsim::Rescale,
            ms_ssim_weights: MS_SSIM_WEIGHTS.to_vec(),
        }
    }
}

fn mse(a: &Grid, b: &Grid) -> Result<f64> {
    same_shape(a, b)?;
    if a.data.is_empty() {
        return Err(SonarError::invalid("cannot compare empty images"));
    }
    let sum: f64 = a
        .data
        .par_chunks(4096)
        .zip(b.data.par_chunks(4096))
        .map(|(x, y)| x.iter().zip(y).map(|(p, q)| (p - q) * (p - q)).sum::<f64>())
        .collect::<Vec<_>>()
        .iter()
        .sum();
    Ok(sum / a.data.len() as f64)
}

/// `1 − MSE`, clamped to `[0, 1]`.
pub fn mse_similarity(a: &Grid, b: &Grid) -> Result<f64> {
    Ok((1.0 - mse(a, b)?).clamp(0.0, 1.0))
}

/// PSNR in dB over the configured cap; identical inputs give 1.
pub fn psnr_similarity_with(a: &Grid, b: &Grid, cfg: &MetricConfig) -> Result<f64> {
    let m = mse(a, b)?;
    if m == 0.0 {
        return Ok(1.0);
    }
    let psnr = 10.0 * (cfg.data_range * cfg.data_range / m).log10();
    Ok((psnr / cfg.psnr_cap_db).clamp(0.0, 1.0))
}

pub fn psnr_similarity(a: &Grid, b: &Grid) -> Result<f64> {
    psnr_similarity_with(a, b, &MetricConfig::default())
}

fn gaussian_kernel(size: usize, sigma: f64) -> Vec<f64> {
    let c = (size as f64 - 1.0) / 2.0;
    let raw: Vec<f64> = (0..size)
        .map(|i| (-((i as f64 - c).powi(2)) / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = raw.iter().sum();
    raw.into_iter().map(|v| v / total).collect()
}

/// Separable "valid" filtering; output is `(w − k + 1) × (h − k + 1)`.
fn filter_valid(data: &[f64], width: usize, height: usize, kernel: &[f64]) -> Vec<f64> {
    let k = kernel.len();
    let (ow, oh) = (width + 1 - k, height + 1 - k);
    let mut horizontal = vec![0.0; ow * height];
    horizontal
        .par_chunks_mut(ow)
        .enumerate()
        .for_each(|(row, out)| {
            let src = &data[row * width..(row + 1) * width];
            for (x, o) in out.iter_mut().enumerate() {
                *o = kernel.iter().zip(&src[x..x + k]).map(|(w, v)| w * v).sum();
            }
        });
    let mut out = vec![0.0; ow * oh];
    out.par_chunks_mut(ow).enumerate().for_each(|(row, line)| {
        for (x, o) in line.iter_mut().enumerate() {
            *o = kernel
                .iter()
                .enumerate()
                .map(|(j, w)| w * horizontal[(row + j) * ow + x])
                .sum();
        }
    });
    out
}

/// Mean SSIM and mean contrast-structure term over all valid windows.
fn ssim_components(
    a: &[f64],
    b: &[f64],
    width: usize,
    height: usize,
    cfg: &MetricConfig,
) -> (f64, f64) {
    let kernel = gaussian_kernel(cfg.window, cfg.sigma);
    let c1 = (cfg.k1 * cfg.data_range).powi(2);
    let c2 = (cfg.k2 * cfg.data_range).powi(2);
    let product = |f: &dyn Fn(f64, f64) -> f64| -> Vec<f64> {
        a.iter().zip(b).map(|(&x, &y)| f(x, y)).collect()
    };
    let mu_a = filter_valid(a, width, height, &kernel);
    let mu_b = filter_valid(b, width, height, &kernel);
    let aa = filter_valid(&product(&|x, _| x * x), width, height, &kernel);
    let bb = filter_valid(&product(&|_, y| y * y), width, height, &kernel);
    let ab = filter_valid(&product(&|x, y| x * y), width, height, &kernel);

    let ow = width + 1 - cfg.window;
    let rows: Vec<(f64, f64)> = (0..mu_a.len() / ow)
        .into_par_iter()
        .map(|row| {
            let mut s = (0.0, 0.0);
            for i in row * ow..(row + 1) * ow {
                let (ma, mb) = (mu_a[i], mu_b[i]);
                let var_a = aa[i] - ma * ma;
                let var_b = bb[i] - mb * mb;
                let cov = ab[i] - ma * mb;
                let luminance = (2.0 * ma * mb + c1) / (ma * ma + mb * mb + c1);
                let cs = (2.0 * cov + c2) / (var_a + var_b + c2);
                s.0 += luminance * cs;
                s.1 += cs;
            }
            s
        })
        .collect();
    let n = mu_a.len() as f64;
    let (ssim, cs) = rows
        .iter()
        .fold((0.0, 0.0), |acc, r| (acc.0 + r.0, acc.1 + r.1));
    (ssim / n, cs / n)
}

fn check_window(a: &Grid, cfg: &MetricConfig) -> Result<()> {
    if cfg.window == 0 || a.width < cfg.window || a.height < cfg.window {
        return Err(SonarError::invalid(format!(
            "image {}x{} is smaller than the {}x{} SSIM window",
            a.width, a.height, cfg.window, cfg.window
        )));
    }
    Ok(())
}

fn normalize_ssim(s: f64, cfg: &MetricConfig) -> f64 {
    let mapped = match (cfg.negative_ssim, s < 0.0) {
        (NegativeSsim::Rescale, true) => (s + 1.0) / 2.0,
        (NegativeSsim::Clamp, true) => 0.0,
        _ => s,
    };
    mapped.clamp(0.0, 1.0)
}

pub fn ssim_with(a: &Grid, b: &Grid, cfg: &MetricConfig) -> Result<f64> {
    same_shape(a, b)?;
    check_window(a, cfg)?;
    let (s, _) = ssim_components(a.data, b.data, a.width, a.height, cfg);
    Ok(normalize_ssim(s, cfg))
}

/// Gaussian-window SSIM (11×11, σ = 1.5, k₁ = 0.01, k₂ = 0.03, unit range).
pub fn ssim(a: &Grid, b: &Grid) -> Result<f64> {
    ssim_with(a, b, &MetricConfig::default())
}

fn downsample(data: &[f64], width: usize, height: usize) -> (Vec<f64>, usize, usize) {
    let (w, h) = (width / 2, height / 2);
    let mut out = Vec::with_capacity(w * h);
    for y in 0..h {
        for x in 0..w {
            let i = 2 * y * width + 2 * x;
            out.push((data[i] + data[i + 1] + data[i + width] + data[i + width + 1]) / 4.0);
        }
    }
    (out, w, h)
}

/// Smallest side a pyramid of `scales` levels needs.
pub fn ms_ssim_min_side(scales: usize, window: usize) -> usize {
    (1usize << scales.saturating_sub(1)) * window
}

pub fn ms_ssim_with(a: &Grid, b: &Grid, cfg: &MetricConfig) -> Result<f64> {
    same_shape(a, b)?;
    // Trailing zero weights contribute nothing; drop those scales entirely.
    let scales = cfg
        .ms_ssim_weights
        .iter()
        .rposition(|&w| w != 0.0)
        .map_or(0, |i| i + 1);
    if scales == 0 || cfg.ms_ssim_weights.iter().any(|&w| w.is_nan() || w < 0.0) {
        return Err(SonarError::invalid(
            "MS-SSIM needs non-negative weights, at least one non-zero",
        ));
    }
    let need = ms_ssim_min_side(scales, cfg.window);
    if a.width < need || a.height < need {
        return Err(SonarError::invalid(format!(
            "MS-SSIM with {scales} scales needs at least {need}x{need} pixels, got {}x{}",
            a.width, a.height
        )));
    }
    let (mut x, mut y) = (a.data.to_vec(), b.data.to_vec());
    let (mut w, mut h) = (a.width, a.height);
    let mut result = 1.0;
    for (level, &weight) in cfg.ms_ssim_weights[..scales].iter().enumerate() {
        let (s, cs) = ssim_components(&x, &y, w, h, cfg);
        let term = if level + 1 == scales { s } else { cs };
        result *= term.max(0.0).powf(weight);
        if level + 1 < scales {
            let (nx, nw, nh) = downsample(&x, w, h);
            y = downsample(&y, w, h).0;
            x = nx;
            (w, h) = (nw, nh);
        }
    }
    Ok(result.clamp(0.0, 1.0))
}

/// Five-scale MS-SSIM; both sides must be at least 176 pixels.
pub fn ms_ssim(a: &Grid, b: &Grid) -> Result<f64> {
    ms_ssim_with(a, b, &MetricConfig::default())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimilarityReport {
    pub mse_similarity: f64,
    pub psnr_similarity: f64,
    pub ssim: f64,
    pub ms_ssim: f64,
}

impl SimilarityReport {
    pub fn values(&self) -> [f64; 4] {
        [
            self.mse_similarity,
            self.psnr_similarity,
            self.ssim,
            self.ms_ssim,
        ]
    }
}

pub fn compare(a: &Grid, b: &Grid, cfg: &MetricConfig) -> Result<SimilarityReport> {
    Ok(SimilarityReport {
        mse_similarity: mse_similarity(a, b)?,
        psnr_similarity: psnr_similarity_with(a, b, cfg)?,
        ssim: ssim_with(a, b, cfg)?,
        ms_ssim: ms_ssim_with(a, b, cfg)?,
    })
}

/// All four metrics between two frames of equal shape.
pub fn compare_frames(a: &SonarFrame, b: &SonarFrame) -> Result<SimilarityReport> {
    compare(
        &Grid::from_frame(a),
        &Grid::from_frame(b),
        &MetricConfig::default(),
    )
}
