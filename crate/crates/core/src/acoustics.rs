//! Seawater sound absorption and its effect on echo intensity.
//!
//! The absorption coefficient is the sum of a boric-acid relaxation term, a
//! magnesium-sulphate relaxation term and a pure-water viscous term
//! (Ainslie & McColm, 1998). Frequencies are in kHz, depths in km and the
//! result in dB/km.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Result, SonarError};
use crate::rasterizer::{Echo, ReflectionImage};
use crate::raytracer::ShaderImage;

/// Decibel-to-neper factor for the absorption coefficient, ≈ 0.0115.
///
/// This is one tenth of the amplitude conversion `1 / (20 log10 e)`; the
/// attenuation stage is calibrated against the 0.0115 convention.
pub const NEPER_PER_DB: f64 = 0.011_512_925_464_970_228;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WaterProperties {
    /// °C
    pub temperature: f64,
    /// Parts per thousand.
    pub salinity: f64,
    pub ph: f64,
    /// km
    pub depth: f64,
}

impl Default for WaterProperties {
    fn default() -> Self {
        WaterProperties {
            temperature: 15.0,
            salinity: 35.0,
            ph: 8.0,
            depth: 0.0,
        }
    }
}

impl WaterProperties {
    pub fn validate(&self) -> Result<()> {
        if !(self.salinity >= 0.0 && self.salinity.is_finite()) {
            return Err(SonarError::out_of_range(
                "salinity",
                format!("{} must be >= 0", self.salinity),
            ));
        }
        if !(self.depth >= 0.0 && self.depth.is_finite()) {
            return Err(SonarError::out_of_range(
                "depth",
                format!("{} must be >= 0", self.depth),
            ));
        }
        if !(0.0..=14.0).contains(&self.ph) {
            return Err(SonarError::out_of_range(
                "ph",
                format!("{} not in [0, 14]", self.ph),
            ));
        }
        if !self.temperature.is_finite() {
            return Err(SonarError::out_of_range("temperature", "must be finite"));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AttenuationBreakdown {
    /// dB/km
    pub alpha_boric: f64,
    /// dB/km
    pub alpha_magnesium: f64,
    /// dB/km
    pub alpha_fresh: f64,
    /// dB/km
    pub alpha_total: f64,
    /// Boric acid relaxation frequency, kHz.
    pub f1: f64,
    /// Magnesium sulphate relaxation frequency, kHz.
    pub f2: f64,
    /// Np/km
    pub gamma: f64,
}

pub fn attenuation_coefficient(
    frequency_khz: f64,
    water: &WaterProperties,
) -> Result<AttenuationBreakdown> {
    if !(frequency_khz > 0.0 && frequency_khz.is_finite()) {
        return Err(SonarError::invalid(format!(
            "frequency must be positive, got {frequency_khz} kHz"
        )));
    }
    let WaterProperties {
        temperature: t,
        salinity: s,
        ph,
        depth: z,
    } = *water;
    let f_sq = frequency_khz * frequency_khz;

    let f1 = 0.78 * (s / 35.0).sqrt() * (t / 26.0).exp();
    let alpha_boric = 0.106 * (f1 * f_sq / (f_sq + f1 * f1)) * ((ph - 8.0) / 0.56).exp();

    let f2 = 42.0 * (t / 17.0).exp();
    let alpha_magnesium =
        0.52 * (1.0 + t / 43.0) * (s / 35.0) * (f2 * f_sq / (f_sq + f2 * f2)) * (-z / 6.0).exp();

    let alpha_fresh = 0.00049 * f_sq * (-(t / 27.0 + z / 17.0)).exp();

    let alpha_total = alpha_boric + alpha_magnesium + alpha_fresh;
    Ok(AttenuationBreakdown {
        alpha_boric,
        alpha_magnesium,
        alpha_fresh,
        alpha_total,
        f1,
        f2,
        gamma: db_to_neper(alpha_total),
    })
}

pub fn db_to_neper(alpha_db: f64) -> f64 {
    alpha_db * NEPER_PER_DB
}

/// Two-way intensity loss factor `exp(−2γd)` for a path of `distance_m` meters.
pub fn intensity_factor(gamma_np_per_km: f64, distance_m: f64) -> f64 {
    (-2.0 * gamma_np_per_km * distance_m / 1000.0).exp()
}

fn attenuate(echoes: &[Echo], gamma: f64) -> Vec<Echo> {
    echoes
        .par_iter()
        .map(|e| {
            if !e.is_hit() {
                return *e;
            }
            Echo {
                distance: e.distance,
                intensity: e.intensity * intensity_factor(gamma, e.distance),
            }
        })
        .collect()
}

/// Scales every return by `exp(−2γd)`, with `d` its pulse distance in km.
pub fn apply_attenuation(image: &ReflectionImage, gamma_np_per_km: f64) -> Result<ReflectionImage> {
    if !(gamma_np_per_km >= 0.0 && gamma_np_per_km.is_finite()) {
        return Err(SonarError::invalid(format!(
            "gamma must be >= 0, got {gamma_np_per_km}"
        )));
    }
    if gamma_np_per_km == 0.0 {
        return Ok(image.clone());
    }
    Ok(ReflectionImage {
        width: image.width,
        height: image.height,
        echoes: attenuate(&image.echoes, gamma_np_per_km),
    })
}

/// Attenuates both the primary and the secondary returns of a shader image.
pub fn attenuate_shader(image: &ShaderImage, gamma_np_per_km: f64) -> Result<ShaderImage> {
    Ok(ShaderImage {
        primary: apply_attenuation(&image.primary, gamma_np_per_km)?,
        secondary: apply_attenuation(&image.secondary, gamma_np_per_km)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn water(t: f64, s: f64, ph: f64, z: f64) -> WaterProperties {
        WaterProperties {
            temperature: t,
            salinity: s,
            ph,
            depth: z,
        }
    }

    #[test]
    fn neper_constant() {
        let exact = 0.1 / (20.0 * std::f64::consts::E.log10());
        assert!((NEPER_PER_DB - exact).abs() < 1e-17);
        assert_eq!(db_to_neper(0.0), 0.0);
        assert!((db_to_neper(1.0) - 0.0115).abs() < 0.00005);
        assert!((db_to_neper(100.0) - 1.15129).abs() < 5e-6);
    }

    #[test]
    fn relaxation_frequencies() {
        let b = attenuation_coefficient(100.0, &water(0.0, 35.0, 8.0, 0.0)).unwrap();
        assert_eq!(b.f2, 42.0);
        assert_eq!(b.f1, 0.78);
    }

    #[test]
    fn fresh_water_term_at_one_khz() {
        let b = attenuation_coefficient(1.0, &water(0.0, 35.0, 8.0, 0.0)).unwrap();
        assert_eq!(b.alpha_fresh, 0.00049);
    }

    #[test]
    fn reference_value_at_700_khz() {
        // Term-by-term evaluation of the three components at
        // f = 700 kHz, T = 15 °C, S = 35 ppt, pH 8, z = 0, computed with
        // 50-digit arithmetic (mpmath).
        let b = attenuation_coefficient(700.0, &water(15.0, 35.0, 8.0, 0.0)).unwrap();
        let oracle = 207.628_635_235_577_14;
        assert!(
            (b.alpha_total - oracle).abs() / oracle < 1e-9,
            "{}",
            b.alpha_total
        );
    }

    #[test]
    fn rejects_non_positive_frequency() {
        assert!(attenuation_coefficient(0.0, &WaterProperties::default()).is_err());
        assert!(attenuation_coefficient(-5.0, &WaterProperties::default()).is_err());
    }

    #[test]
    fn water_validation() {
        assert!(water(10.0, -1.0, 8.0, 0.0).validate().is_err());
        assert!(water(10.0, 35.0, 15.0, 0.0).validate().is_err());
        assert!(water(10.0, 35.0, 8.0, -0.1).validate().is_err());
        assert!(WaterProperties::default().validate().is_ok());
    }

    #[test]
    fn attenuation_examples() {
        let mut img = ReflectionImage::empty(3, 1);
        img.echoes[0] = Echo {
            distance: 500.0,
            intensity: 1.0,
        };
        img.echoes[1] = Echo {
            distance: 20.0,
            intensity: 0.4,
        };
        assert_eq!(apply_attenuation(&img, 0.0).unwrap(), img);
        let out = apply_attenuation(&img, 1.0).unwrap();
        assert!((out.echoes[0].intensity - (-1.0f64).exp()).abs() < 1e-15);
        assert_eq!(out.echoes[0].distance, 500.0);
        assert_eq!(out.echoes[2], Echo::NONE);
        assert!(apply_attenuation(&img, -1.0).is_err());
    }

    #[test]
    fn pressure_squared_matches_intensity_decay() {
        let (gamma, d_km) = (2.7f64, 0.043f64);
        let pressure = (-gamma * d_km).exp();
        assert!((pressure * pressure - intensity_factor(gamma, d_km * 1000.0)).abs() < 1e-15);
    }

    #[test]
    fn fresh_term_frequency_limit() {
        let w = water(12.0, 30.0, 7.9, 3.0);
        let f = 1e6;
        let b = attenuation_coefficient(f, &w).unwrap();
        let limit = 0.00049 * (-(12.0 / 27.0 + 3.0 / 17.0f64)).exp();
        assert!((b.alpha_fresh / (f * f) - limit).abs() / limit < 1e-6);
    }

    proptest! {
        #[test]
        fn components_nonnegative(
            f in 0.01..2000.0f64, t in -2.0..40.0f64, s in 0.0..45.0f64, ph in 6.0..9.0f64, z in 0.0..11.0f64,
        ) {
            let b = attenuation_coefficient(f, &water(t, s, ph, z)).unwrap();
            prop_assert!(b.alpha_boric >= 0.0 && b.alpha_magnesium >= 0.0 && b.alpha_fresh >= 0.0);
            let sum = b.alpha_boric + b.alpha_magnesium + b.alpha_fresh;
            prop_assert!((b.alpha_total - sum).abs() <= 1e-12 * sum);
            prop_assert!(b.gamma >= 0.0);
        }

        #[test]
        fn attenuation_is_monotone_in_distance(gamma in 1e-3..10.0f64, d1 in 1.0..500.0f64, gap in 0.01..500.0f64) {
            let near = intensity_factor(gamma, d1);
            let far = intensity_factor(gamma, d1 + gap);
            prop_assert!(far < near);
        }

        #[test]
        fn attenuation_composes(g1 in 0.0..5.0f64, g2 in 0.0..5.0f64, d in 0.0..1000.0f64, i in 0.0..1.0f64) {
            let mut img = ReflectionImage::empty(1, 1);
            img.echoes[0] = Echo { distance: d, intensity: i };
            let twice = apply_attenuation(&apply_attenuation(&img, g1).unwrap(), g2).unwrap();
            let once = apply_attenuation(&img, g1 + g2).unwrap();
            prop_assert!((twice.echoes[0].intensity - once.echoes[0].intensity).abs() <= 1e-12);
        }
    }
}
