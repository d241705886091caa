//! Polar frame → Cartesian fan image.
//!
//! The sonar sits at the origin looking up the image; positive bearings are
//! drawn to the left. Each output pixel is mapped back to `(range, bearing)`
//! and sampled bilinearly across neighbouring beams and bins.

use std::f64::consts::{PI, TAU};
use std::path::Path;

use image::codecs::pnm::{GraymapHeader, PnmEncoder, SampleEncoding};
use image::{ExtendedColorType, ImageEncoder};

use super::SonarFrame;
use crate::error::{Result, SonarError};

#[derive(Debug, Clone, PartialEq)]
pub struct AcousticImage {
    pub width: usize,
    pub height: usize,
    /// Row-major, top row first, values in `[0, 1]`; outside the fan is 0.
    pub pixels: Vec<f64>,
    pub meters_per_pixel: f64,
    /// Sonar position in pixel coordinates.
    pub origin: (f64, f64),
}

impl AcousticImage {
    pub fn at(&self, col: usize, row: usize) -> f64 {
        self.pixels[row * self.width + col]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PgmDepth {
    Eight,
    Sixteen,
}

/// Angular footprint of the frame: center bearing and half-width, or `None`
/// for a full revolution.
fn sector(frame: &SonarFrame) -> Option<(f64, f64)> {
    if frame.fov_azimuth >= TAU - 1e-9 {
        return None;
    }
    let center = (frame.bearings[0] + frame.bearings[frame.n_beams - 1]) / 2.0;
    Some((center, frame.fov_azimuth / 2.0))
}

/// Display-space extent `(x_min, x_max, y_min, y_max)` with x to the right
/// and y forward.
fn extent(frame: &SonarFrame) -> (f64, f64, f64, f64) {
    let r = frame.range_max;
    let Some((center, half)) = sector(frame) else {
        return (-r, r, -r, r);
    };
    let mut bounds = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
    let steps = 720;
    for k in 0..=steps {
        let theta = center - half + 2.0 * half * k as f64 / steps as f64;
        for radius in [frame.range_min, r] {
            let (x, y) = (-radius * theta.sin(), radius * theta.cos());
            bounds = (
                bounds.0.min(x),
                bounds.1.max(x),
                bounds.2.min(y),
                bounds.3.max(y),
            );
        }
    }
    bounds
}

fn wrap_pi(a: f64) -> f64 {
    (a + PI).rem_euclid(TAU) - PI
}

/// Fractional beam coordinate of `theta`, or `None` outside the frame.
fn beam_coordinate(frame: &SonarFrame, theta: f64) -> Option<(usize, usize, f64)> {
    let b = &frame.bearings;
    let n = b.len();
    match sector(frame) {
        None => {
            let t = (theta - b[0]).rem_euclid(TAU) + b[0];
            let i = b.partition_point(|&x| x <= t);
            if i == 0 || i == n {
                // Between the last beam and the first one of the next turn.
                let lo = b[n - 1];
                let span = b[0] + TAU - lo;
                let f = if span > 0.0 {
                    ((t - lo).rem_euclid(TAU) / span).clamp(0.0, 1.0)
                } else {
                    0.0
                };
                Some((n - 1, 0, f))
            } else {
                let (lo, hi) = (b[i - 1], b[i]);
                Some((i - 1, i, (t - lo) / (hi - lo)))
            }
        }
        Some((center, half)) => {
            let t = center + wrap_pi(theta - center);
            if (t - center).abs() > half + 1e-12 {
                return None;
            }
            if n == 1 || t <= b[0] {
                return Some((0, 0, 0.0));
            }
            if t >= b[n - 1] {
                return Some((n - 1, n - 1, 0.0));
            }
            let i = b.partition_point(|&x| x <= t);
            let (lo, hi) = (b[i - 1], b[i]);
            Some((i - 1, i, (t - lo) / (hi - lo)))
        }
    }
}

/// Renders `frame` into a `width × height` fan image.
pub fn frame_to_cartesian(
    frame: &SonarFrame,
    width: usize,
    height: usize,
) -> Result<AcousticImage> {
    if width == 0 || height == 0 {
        return Err(SonarError::invalid("display size must be non-zero"));
    }
    if frame.n_beams == 0 || frame.n_bins == 0 || frame.bearings.len() != frame.n_beams {
        return Err(SonarError::invalid(
            "frame has no beams, no bins or a bearing table of the wrong size",
        ));
    }
    let (x_min, x_max, y_min, y_max) = extent(frame);
    let scale = (width as f64 / (x_max - x_min)).min(height as f64 / (y_max - y_min));
    let pad_x = (width as f64 - (x_max - x_min) * scale) / 2.0;
    let pad_y = (height as f64 - (y_max - y_min) * scale) / 2.0;
    let bin_width = frame.bin_width();
    let last_bin = (frame.n_bins - 1) as f64;

    let mut pixels = vec![0.0; width * height];
    for (row, line) in pixels.chunks_mut(width).enumerate() {
        let y = y_max - (row as f64 + 0.5 - pad_y) / scale;
        for (col, px) in line.iter_mut().enumerate() {
            let x = x_min + (col as f64 + 0.5 - pad_x) / scale;
            let range = x.hypot(y);
            if range < frame.range_min || range > frame.range_max {
                continue;
            }
            // x points right, bearings grow to the left.
            let theta = (-x).atan2(y);
            let Some((b0, b1, fb)) = beam_coordinate(frame, theta) else {
                continue;
            };
            let r = ((range - frame.range_min) / bin_width - 0.5).clamp(0.0, last_bin);
            let k0 = r.floor() as usize;
            let k1 = (k0 + 1).min(frame.n_bins - 1);
            let fr = r - k0 as f64;
            let along = |b: usize| frame.get(b, k0) * (1.0 - fr) + frame.get(b, k1) * fr;
            *px = (along(b0) * (1.0 - fb) + along(b1) * fb).clamp(0.0, 1.0);
        }
    }
    Ok(AcousticImage {
        width,
        height,
        pixels,
        meters_per_pixel: 1.0 / scale,
        origin: (pad_x - x_min * scale, pad_y + y_max * scale),
    })
}

/// Writes a binary greyscale PGM.
pub fn write_pgm(path: impl AsRef<Path>, image: &AcousticImage, depth: PgmDepth) -> Result<()> {
    write_gray_pgm(path, &image.pixels, image.width, image.height, depth)
}

/// Writes row-major `[0, 1]` values (clamped) as a binary greyscale PGM.
pub fn write_gray_pgm(
    path: impl AsRef<Path>,
    pixels: &[f64],
    width: usize,
    height: usize,
    depth: PgmDepth,
) -> Result<()> {
    let path = path.as_ref();
    if pixels.len() != width * height {
        return Err(SonarError::mismatch(
            format!("{width}x{height} pixels"),
            pixels.len(),
        ));
    }
    let file = std::fs::File::create(path).map_err(|e| SonarError::io(path, e))?;
    let (w, h) = (width as u32, height as u32);
    let (maxwhite, color) = match depth {
        PgmDepth::Eight => (255, ExtendedColorType::L8),
        PgmDepth::Sixteen => (65535, ExtendedColorType::L16),
    };
    let header = GraymapHeader {
        encoding: SampleEncoding::Binary,
        width: w,
        height: h,
        maxwhite,
    };
    let encoder = PnmEncoder::new(std::io::BufWriter::new(file)).with_header(header.into());
    let unit = pixels.iter().map(|v| v.clamp(0.0, 1.0));
    let buf: Vec<u8> = match depth {
        PgmDepth::Eight => unit.map(|v| (v * 255.0).round() as u8).collect(),
        // The encoder takes native-endian u16 samples as bytes.
        PgmDepth::Sixteen => unit
            .flat_map(|v| ((v * 65535.0).round() as u16).to_ne_bytes())
            .collect(),
    };
    encoder
        .write_image(&buf, w, h, color)
        .map_err(|e| SonarError::io(path, std::io::Error::other(e)))
}
