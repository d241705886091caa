//! Little-endian binary frame file.
//!
//! Layout: `b"SONF"`, `u16` version, `u8` device (0 FLS, 1 MSIS), `u8`
//! reserved, `u32` beams, `u32` bins, `f64` azimuth and elevation aperture
//! (radians), `f64` min and max range (m), `f64` frequency (kHz), `u64`
//! timestamp; then one `f64` bearing per beam; then the intensities as
//! beam-major `f32`.

use std::fs;
use std::path::Path;

use super::{Device, SonarFrame};
use crate::error::{Result, SonarError};

pub const FRAME_MAGIC: [u8; 4] = *b"SONF";
pub const FRAME_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 1 + 1 + 4 + 4 + 5 * 8 + 8;

pub fn encode_frame(frame: &SonarFrame) -> Vec<u8> {
    let cells = frame.n_beams * frame.n_bins;
    let mut out = Vec::with_capacity(HEADER_LEN + frame.n_beams * 8 + cells * 4);
    out.extend_from_slice(&FRAME_MAGIC);
    out.extend_from_slice(&FRAME_VERSION.to_le_bytes());
    out.push(match frame.device {
        Device::Fls => 0,
        Device::Msis => 1,
    });
    out.push(0);
    out.extend_from_slice(&(frame.n_beams as u32).to_le_bytes());
    out.extend_from_slice(&(frame.n_bins as u32).to_le_bytes());
    for v in [
        frame.fov_azimuth,
        frame.fov_elevation,
        frame.range_min,
        frame.range_max,
        frame.frequency_khz,
    ] {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out.extend_from_slice(&frame.timestamp.to_le_bytes());
    for b in &frame.bearings {
        out.extend_from_slice(&b.to_le_bytes());
    }
    for &v in &frame.intensities {
        out.extend_from_slice(&(v as f32).to_le_bytes());
    }
    out
}

struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
    origin: &'a str,
}

impl<'a> Reader<'a> {
    fn take<const N: usize>(&mut self, what: &str) -> Result<[u8; N]> {
        let end = self.pos + N;
        let chunk = self
            .bytes
            .get(self.pos..end)
            .ok_or_else(|| SonarError::Parse {
                path: self.origin.into(),
                message: format!("truncated at byte {} while reading {what}", self.pos),
            })?;
        self.pos = end;
        Ok(chunk.try_into().expect("length checked"))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        self.take::<4>(what).map(u32::from_le_bytes)
    }

    fn f64(&mut self, what: &str) -> Result<f64> {
        self.take::<8>(what).map(f64::from_le_bytes)
    }
}

pub fn decode_frame(bytes: &[u8], origin: &str) -> Result<SonarFrame> {
    let bad = |message: String| SonarError::Parse {
        path: origin.into(),
        message,
    };
    let mut r = Reader {
        bytes,
        pos: 0,
        origin,
    };
    if r.take::<4>("magic")? != FRAME_MAGIC {
        return Err(bad("not a sonar frame file (bad magic)".into()));
    }
    let version = u16::from_le_bytes(r.take::<2>("version")?);
    if version != FRAME_VERSION {
        return Err(bad(format!("unsupported frame version {version}")));
    }
    let device = match r.take::<1>("device")?[0] {
        0 => Device::Fls,
        1 => Device::Msis,
        other => return Err(bad(format!("unknown device code {other}"))),
    };
    r.take::<1>("reserved")?;
    let n_beams = r.u32("beam count")? as usize;
    let n_bins = r.u32("bin count")? as usize;
    let fov_azimuth = r.f64("azimuth aperture")?;
    let fov_elevation = r.f64("elevation aperture")?;
    let range_min = r.f64("minimum range")?;
    let range_max = r.f64("maximum range")?;
    let frequency_khz = r.f64("frequency")?;
    let timestamp = u64::from_le_bytes(r.take::<8>("timestamp")?);

    let expected = n_beams
        .checked_mul(n_bins)
        .and_then(|c| c.checked_mul(4))
        .and_then(|c| c.checked_add(n_beams * 8 + HEADER_LEN));
    if expected != Some(bytes.len()) {
        return Err(bad(format!(
            "{n_beams}x{n_bins} frame needs {} bytes, file has {}",
            expected.map_or("too many".to_string(), |e| e.to_string()),
            bytes.len()
        )));
    }
    let bearings = (0..n_beams)
        .map(|_| r.f64("bearings"))
        .collect::<Result<Vec<_>>>()?;
    let intensities = (0..n_beams * n_bins)
        .map(|_| {
            r.take::<4>("intensities")
                .map(|b| f32::from_le_bytes(b) as f64)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(SonarFrame {
        device,
        n_beams,
        n_bins,
        intensities,
        bearings,
        fov_azimuth,
        fov_elevation,
        range_min,
        range_max,
        frequency_khz,
        timestamp,
    })
}

pub fn write_frame(path: impl AsRef<Path>, frame: &SonarFrame) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, encode_frame(frame)).map_err(|e| SonarError::io(path, e))
}

pub fn read_frame(path: impl AsRef<Path>) -> Result<SonarFrame> {
    let path = path.as_ref();
    let bytes = fs::read(path).map_err(|e| SonarError::io(path, e))?;
    decode_frame(&bytes, &path.display().to_string())
}
