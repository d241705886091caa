//! Sonar projection coordinates.
//!
//! A sonar head measures points in spherical coordinates `(r, θ, φ)`: range,
//! azimuth in the x-y plane, and the polar angle from the +z axis. Imaging
//! sonars lose the elevation, so returns are collapsed onto the zero-elevation
//! plane and described by polar coordinates `(r, θ)`.

use nalgebra::{Vector2, Vector3};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SphericalPoint {
    /// Range in meters.
    pub r: f64,
    /// Azimuth in `[-π, π]`.
    pub theta: f64,
    /// Polar angle from +z in `[0, π]`.
    pub phi: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolarPoint {
    pub r: f64,
    pub theta: f64,
}

/// Converts a Cartesian point to spherical coordinates.
///
/// Both angles use the two-argument arctangent so every quadrant is
/// recovered. The origin maps to `(0, 0, 0)`.
pub fn cartesian_to_spherical(p: &Vector3<f64>) -> SphericalPoint {
    let rho = p.x.hypot(p.y);
    let r = rho.hypot(p.z);
    if r == 0.0 {
        return SphericalPoint {
            r: 0.0,
            theta: 0.0,
            phi: 0.0,
        };
    }
    SphericalPoint {
        r,
        theta: p.y.atan2(p.x),
        phi: rho.atan2(p.z),
    }
}

pub fn spherical_to_cartesian(q: &SphericalPoint) -> Vector3<f64> {
    let (sin_phi, cos_phi) = q.phi.sin_cos();
    let (sin_theta, cos_theta) = q.theta.sin_cos();
    Vector3::new(
        q.r * sin_phi * cos_theta,
        q.r * sin_phi * sin_theta,
        q.r * cos_phi,
    )
}

/// Zero-elevation mapping of a polar sample onto the image plane.
pub fn polar_to_cartesian(q: &PolarPoint) -> Vector2<f64> {
    let (sin_theta, cos_theta) = q.theta.sin_cos();
    Vector2::new(q.r * cos_theta, q.r * sin_theta)
}

pub fn cartesian_to_polar(p: &Vector2<f64>) -> PolarPoint {
    let r = p.x.hypot(p.y);
    if r == 0.0 {
        return PolarPoint { r: 0.0, theta: 0.0 };
    }
    PolarPoint {
        r,
        theta: p.y.atan2(p.x),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::{FRAC_PI_2, PI};

    #[test]
    fn spherical_axis_cases() {
        let q = cartesian_to_spherical(&Vector3::new(1.0, 0.0, 0.0));
        assert_eq!((q.r, q.theta), (1.0, 0.0));
        assert_abs_diff_eq!(q.phi, FRAC_PI_2, epsilon = 1e-15);

        let q = cartesian_to_spherical(&Vector3::new(0.0, 0.0, 1.0));
        assert_eq!((q.r, q.theta, q.phi), (1.0, 0.0, 0.0));

        let q = cartesian_to_spherical(&Vector3::new(3.0, 4.0, 0.0));
        assert_abs_diff_eq!(q.r, 5.0, epsilon = 1e-15);
        // atan(4/3)
        assert_abs_diff_eq!(q.theta, 0.927_295_218_001_612_2, epsilon = 1e-15);
        assert_abs_diff_eq!(q.phi, FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn origin_is_all_zero() {
        let q = cartesian_to_spherical(&Vector3::zeros());
        assert_eq!((q.r, q.theta, q.phi), (0.0, 0.0, 0.0));
    }

    #[test]
    fn quadrants_are_preserved() {
        let q = cartesian_to_spherical(&Vector3::new(-1.0, -1.0, -1.0));
        assert_abs_diff_eq!(q.theta, -3.0 * PI / 4.0, epsilon = 1e-15);
        assert!(q.phi > FRAC_PI_2 && q.phi <= PI);
        let q = cartesian_to_spherical(&Vector3::new(0.0, 2.0, 0.0));
        assert_abs_diff_eq!(q.theta, FRAC_PI_2, epsilon = 1e-15);
    }

    #[test]
    fn polar_examples() {
        let p = polar_to_cartesian(&PolarPoint { r: 1.0, theta: 0.0 });
        assert_eq!((p.x, p.y), (1.0, 0.0));
        let p = polar_to_cartesian(&PolarPoint {
            r: 2.0,
            theta: FRAC_PI_2,
        });
        assert_abs_diff_eq!(p.x, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(p.y, 2.0, epsilon = 1e-15);
        let p = polar_to_cartesian(&PolarPoint {
            r: 5.0,
            theta: 0.92730,
        });
        assert_abs_diff_eq!(p.x, 3.0, epsilon = 1e-4);
        assert_abs_diff_eq!(p.y, 4.0, epsilon = 1e-4);
    }

    #[test]
    fn spherical_examples() {
        let p = spherical_to_cartesian(&SphericalPoint {
            r: 1.0,
            theta: 0.0,
            phi: FRAC_PI_2,
        });
        assert_abs_diff_eq!(p, Vector3::new(1.0, 0.0, 0.0), epsilon = 1e-15);
        let p = spherical_to_cartesian(&SphericalPoint {
            r: 1.0,
            theta: 0.0,
            phi: 0.0,
        });
        assert_abs_diff_eq!(p, Vector3::new(0.0, 0.0, 1.0), epsilon = 1e-15);
        let p = spherical_to_cartesian(&SphericalPoint {
            r: 5.0,
            theta: 0.92730,
            phi: FRAC_PI_2,
        });
        assert_abs_diff_eq!(p, Vector3::new(3.0, 4.0, 0.0), epsilon = 1e-4);
    }

    proptest! {
        #[test]
        fn spherical_round_trip(x in -1e3..1e3f64, y in -1e3..1e3f64, z in -1e3..1e3f64) {
            prop_assume!(x.hypot(y) > 1e-6);
            let p = Vector3::new(x, y, z);
            let back = spherical_to_cartesian(&cartesian_to_spherical(&p));
            prop_assert!((back - p).norm() <= 1e-9 * p.norm());
        }

        #[test]
        fn spherical_ranges(x in -1e3..1e3f64, y in -1e3..1e3f64, z in -1e3..1e3f64) {
            let q = cartesian_to_spherical(&Vector3::new(x, y, z));
            prop_assert!(q.r >= 0.0);
            prop_assert!((-PI..=PI).contains(&q.theta));
            prop_assert!((0.0..=PI).contains(&q.phi));
        }

        #[test]
        fn polar_norm_is_range(r in 0.0..1e4f64, theta in -10.0..10.0f64) {
            let p = polar_to_cartesian(&PolarPoint { r, theta });
            prop_assert!((p.norm() - r).abs() <= 1e-12 * r.max(1.0));
        }

        #[test]
        fn range_is_scale_equivariant(x in -1e3..1e3f64, y in -1e3..1e3f64, z in -1e3..1e3f64) {
            prop_assume!(x.hypot(y).hypot(z) > 1e-9);
            let p = Vector3::new(x, y, z);
            let a = cartesian_to_spherical(&p);
            let b = cartesian_to_spherical(&(2.0 * p));
            prop_assert!((b.r - 2.0 * a.r).abs() <= 1e-12 * b.r);
            prop_assert!((b.theta - a.theta).abs() <= 1e-12);
            prop_assert!((b.phi - a.phi).abs() <= 1e-12);
        }
    }
}
