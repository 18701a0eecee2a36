//! Scalar kernels of the generalized axial-gauge propagators.
//!
//! Kernels return the scalar coefficient p(z, w) only; the tangent
//! +-component factors for each contour leg are applied by the integration
//! module, so one kernel serves every diagram position. Writing a separation
//! x = z - w as real coordinates (x0, x1) = (Re x, Im x), the rotated
//! coordinates are x_{α,±} = x0 ± e^{iα} x1.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{Surface, CHART_RADIUS_MAX};

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Gauge family member: an interpolation angle α ∈ (0, π/2], or the
/// Wu-Mandelstam-Liebrandt α → 0⁺ limit at a fixed regulator ε > 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GaugeChoice {
    Alpha { alpha: f64 },
    Wml { epsilon: f64 },
}

/// Default WML regulator when none is requested.
pub const WML_DEFAULT_EPSILON: f64 = 1e-6;

impl GaugeChoice {
    /// Holomorphic gauge, α = π/2.
    pub fn holomorphic() -> GaugeChoice {
        GaugeChoice::Alpha {
            alpha: std::f64::consts::FRAC_PI_2,
        }
    }

    pub fn alpha(alpha: f64) -> Result<GaugeChoice> {
        if alpha <= 0.0 || alpha > std::f64::consts::FRAC_PI_2 {
            return Err(Error::InvalidParameter(format!(
                "alpha must lie in (0, pi/2], got {alpha}"
            )));
        }
        Ok(GaugeChoice::Alpha { alpha })
    }

    pub fn wml(epsilon: f64) -> Result<GaugeChoice> {
        if epsilon <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "wml epsilon must be > 0, got {epsilon}"
            )));
        }
        Ok(GaugeChoice::Wml { epsilon })
    }

    pub fn is_holomorphic(&self) -> bool {
        matches!(self, GaugeChoice::Alpha { alpha } if (*alpha - std::f64::consts::FRAC_PI_2).abs() < 1e-15)
    }

    /// +-component of a tangent vector for the dx_{α,+} leg:
    /// ż₊ = ẋ₀ + e^{iα} ẋ₁ (holomorphic gauge recovers ż itself; WML uses
    /// the light-cone ẋ₀ + ẋ₁).
    pub fn tangent_plus(&self, tangent: Complex64) -> Complex64 {
        match self {
            GaugeChoice::Alpha { alpha } => {
                tangent.re + Complex64::from_polar(1.0, *alpha) * tangent.im
            }
            GaugeChoice::Wml { .. } => Complex64::new(tangent.re + tangent.im, 0.0),
        }
    }
}

/// Holomorphic-gauge kernel on the standard plane:
/// p(z,w) = (1/4π)(z̄ − w̄)/(z − w). Modulus is exactly 1/4π off-diagonal.
pub fn kernel_hol_plane(z: Complex64, w: Complex64) -> Result<Complex64> {
    let d = z - w;
    if d.norm_sqr() == 0.0 {
        return Err(Error::Coincident);
    }
    Ok(d.conj() / d / FOUR_PI)
}

/// α-gauge kernel on the standard plane:
/// p = (i / 4π e^{iα}) · (x−x')_{α,−} / (x−x')_{α,+}.
pub fn kernel_alpha_plane(z: Complex64, w: Complex64, alpha: f64) -> Result<Complex64> {
    let x = z - w;
    let e = Complex64::from_polar(1.0, alpha);
    let plus = x.re + e * x.im;
    let minus = x.re - e * x.im;
    if plus.norm() < 1e-300 {
        return Err(Error::LightConeSingularity {
            modulus: plus.norm(),
        });
    }
    Ok(Complex64::new(0.0, 1.0) / (FOUR_PI * e) * (minus / plus))
}

/// WML light-cone kernel with iε regularization:
/// p = (i/4π) · x₋² / (x₊ x₋ − iε), with x_± = x₀ ± x₁.
pub fn kernel_wml_plane(z: Complex64, w: Complex64, epsilon: f64) -> Complex64 {
    let x = z - w;
    let plus = x.re + x.im;
    let minus = x.re - x.im;
    Complex64::new(0.0, 1.0 / FOUR_PI) * (minus * minus)
        / Complex64::new(plus * minus, -epsilon)
}

/// Holomorphic-gauge kernel for the round sphere of radius `radius`, area
/// form scaled by `scale` (dσ = 4·scale·d²z/(1+|z/radius|²)²):
/// p = (scale/π)·(z̄−w̄)/(z−w)·(1+|z/r|²)⁻¹(1+|w/r|²)⁻¹.
///
/// As radius → ∞ with scale → 1/4 this limits to the flat-plane kernel.
pub fn kernel_hol_sphere_scaled(
    z: Complex64,
    w: Complex64,
    radius: f64,
    scale: f64,
) -> Result<Complex64> {
    for p in [z, w] {
        if p.norm() > CHART_RADIUS_MAX {
            return Err(Error::ChartOverflow {
                modulus: p.norm(),
                max: CHART_RADIUS_MAX,
            });
        }
    }
    let d = z - w;
    if d.norm_sqr() == 0.0 {
        return Err(Error::Coincident);
    }
    let fz = 1.0 + (z / radius).norm_sqr();
    let fw = 1.0 + (w / radius).norm_sqr();
    Ok(d.conj() / d * (scale / std::f64::consts::PI) / (fz * fw))
}

/// Round-sphere kernel in the unit-radius chart with total area `total_area`
/// (total_area = 4π recovers the standard unit sphere).
pub fn kernel_hol_sphere_round(z: Complex64, w: Complex64, total_area: f64) -> Result<Complex64> {
    kernel_hol_sphere_scaled(z, w, 1.0, total_area / FOUR_PI)
}

/// Normalization of the sphere kernel in diagram weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Normalization {
    Raw,
    /// Divide by the total surface area (sphere only).
    HatNormalized,
}

/// Scalar kernel with surface/gauge/normalization resolved once.
#[derive(Debug, Clone)]
pub struct PropagatorKernel {
    pub gauge: GaugeChoice,
    pub normalization: Normalization,
    surface: SurfaceKind,
}

#[derive(Debug, Clone, Copy)]
enum SurfaceKind {
    Plane,
    Sphere { total_area: f64 },
}

impl PropagatorKernel {
    pub fn new(surface: &Surface, gauge: GaugeChoice, normalization: Normalization) -> Result<Self> {
        let kind = match surface {
            Surface::SphereRound { total_area } => {
                if !gauge.is_holomorphic() {
                    return Err(Error::Unsupported(
                        "sphere kernels exist only in holomorphic gauge".into(),
                    ));
                }
                SurfaceKind::Sphere {
                    total_area: *total_area,
                }
            }
            _ => {
                if normalization == Normalization::HatNormalized {
                    return Err(Error::Unsupported(
                        "HatNormalized applies to the sphere only".into(),
                    ));
                }
                SurfaceKind::Plane
            }
        };
        Ok(PropagatorKernel {
            gauge,
            normalization,
            surface: kind,
        })
    }

    /// p̂(z, w), including the 1/|Σ| hat normalization when requested.
    pub fn eval(&self, z: Complex64, w: Complex64) -> Result<Complex64> {
        match self.surface {
            SurfaceKind::Plane => match self.gauge {
                GaugeChoice::Alpha { alpha } => {
                    if self.gauge.is_holomorphic() {
                        kernel_hol_plane(z, w)
                    } else {
                        kernel_alpha_plane(z, w, alpha)
                    }
                }
                GaugeChoice::Wml { epsilon } => Ok(kernel_wml_plane(z, w, epsilon)),
            },
            SurfaceKind::Sphere { total_area } => {
                let p = kernel_hol_sphere_round(z, w, total_area)?;
                Ok(match self.normalization {
                    Normalization::Raw => p,
                    Normalization::HatNormalized => p / total_area,
                })
            }
        }
    }

    pub fn tangent_plus(&self, tangent: Complex64) -> Complex64 {
        self.gauge.tangent_plus(tangent)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn hol_plane_values() {
        let p = kernel_hol_plane(c(1.0, 0.0), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(p.re, 1.0 / FOUR_PI, max_relative = 1e-14);
        assert!(p.im.abs() < 1e-16);
        let q = kernel_hol_plane(c(0.0, 1.0), c(0.0, 0.0)).unwrap();
        assert_relative_eq!(q.re, -1.0 / FOUR_PI, max_relative = 1e-14);
        // symmetric under swap
        let a = kernel_hol_plane(c(0.3, 0.7), c(-1.1, 0.2)).unwrap();
        let b = kernel_hol_plane(c(-1.1, 0.2), c(0.3, 0.7)).unwrap();
        assert!((a - b).norm() < 1e-16);
        assert!(kernel_hol_plane(c(1.0, 1.0), c(1.0, 1.0)).is_err());
    }

    #[test]
    fn hol_plane_unimodular() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        for _ in 0..100_000 {
            let z = c(rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0);
            let w = c(rng.gen::<f64>() * 4.0 - 2.0, rng.gen::<f64>() * 4.0 - 2.0);
            if (z - w).norm() < 1e-12 {
                continue;
            }
            let p = kernel_hol_plane(z, w).unwrap();
            assert!((p.norm() - 1.0 / FOUR_PI).abs() < 1e-15);
        }
    }

    #[test]
    fn alpha_matches_hol_at_pi_over_2() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(6);
        for _ in 0..1000 {
            let z = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            let w = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
            if (z - w).norm() < 1e-6 {
                continue;
            }
            let a = kernel_alpha_plane(z, w, FRAC_PI_2).unwrap();
            let h = kernel_hol_plane(z, w).unwrap();
            assert!((a - h).norm() < 1e-14);
        }
    }

    #[test]
    fn alpha_pi_over_4_value() {
        // separation (1, 0): p = e^{iπ/4}/4π
        let p = kernel_alpha_plane(c(1.0, 0.0), c(0.0, 0.0), FRAC_PI_4).unwrap();
        let expected = Complex64::from_polar(1.0 / FOUR_PI, FRAC_PI_4);
        assert!((p - expected).norm() < 1e-15);
    }

    #[test]
    fn alpha_vertical_separation() {
        // separation (0,1) at α=π/2: x₊ = i, x₋ = −i → −1/4π
        let p = kernel_alpha_plane(c(0.0, 1.0), c(0.0, 0.0), FRAC_PI_2).unwrap();
        assert_relative_eq!(p.re, -1.0 / FOUR_PI, max_relative = 1e-14);
        let h = kernel_hol_plane(c(0.0, 1.0), c(0.0, 0.0)).unwrap();
        assert!((p - h).norm() < 1e-15);
    }

    #[test]
    fn wml_vertical_separation_limit() {
        // separation (0,1): limit −i/4π, Richardson over ε ladder
        let ladder = [1e-2, 1e-3, 1e-4];
        let vals: Vec<Complex64> = ladder
            .iter()
            .map(|&e| kernel_wml_plane(c(0.0, 1.0), c(0.0, 0.0), e))
            .collect();
        // linear-in-ε Richardson from the two smallest
        let extrap = vals[2] + (vals[2] - vals[1]) * (ladder[2] / (ladder[1] - ladder[2]));
        assert!((extrap - c(0.0, -1.0 / FOUR_PI)).norm() < 1e-8);
    }

    #[test]
    fn wml_vanishes_on_minus_axis() {
        // x₋ = 0 when x₀ = x₁
        let p = kernel_wml_plane(c(1.0, 1.0), c(0.0, 0.0), 0.1);
        assert_eq!(p, c(0.0, 0.0));
    }

    #[test]
    fn wml_limits_to_small_alpha() {
        let z = c(0.9, 0.3);
        let w = c(-0.2, -0.4);
        let mut prev_gap = f64::INFINITY;
        for (&alpha, &eps) in [0.1, 0.05, 0.01].iter().zip([1e-2, 1e-3, 1e-4].iter()) {
            let a = kernel_alpha_plane(z, w, alpha).unwrap();
            let m = kernel_wml_plane(z, w, eps);
            let gap = (a - m).norm();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 2e-2);
    }

    #[test]
    fn sphere_round_values() {
        let p = kernel_hol_sphere_round(c(1.0, 0.0), c(0.0, 0.0), 4.0 * PI).unwrap();
        assert_relative_eq!(p.re, 1.0 / (2.0 * PI), max_relative = 1e-14);
        let q = kernel_hol_sphere_round(c(0.0, 1.0), c(0.0, 0.0), 4.0 * PI).unwrap();
        assert_relative_eq!(q.re, -1.0 / (2.0 * PI), max_relative = 1e-14);
    }

    #[test]
    fn sphere_kernel_decompactifies_to_plane() {
        let z = c(0.7, -0.2);
        let w = c(-0.3, 0.5);
        let flat = kernel_hol_plane(z, w).unwrap();
        let mut prev_gap = f64::INFINITY;
        for r in [10.0, 100.0, 1000.0] {
            let p = kernel_hol_sphere_scaled(z, w, r, 0.25).unwrap();
            let gap = (p - flat).norm();
            assert!(gap < prev_gap);
            prev_gap = gap;
        }
        assert!(prev_gap < 1e-5);
    }

    #[test]
    fn gauge_family_is_continuous_in_alpha() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for &(a1, a2) in &[(1.0, 1.0 + 1e-4), (0.5, 0.5 + 1e-5), (FRAC_PI_2, FRAC_PI_2 - 1e-6)] {
            let mut sup: f64 = 0.0;
            for _ in 0..200 {
                let z = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                let w = c(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5);
                if (z - w).norm() < 0.05 {
                    continue;
                }
                let p1 = kernel_alpha_plane(z, w, a1).unwrap();
                let p2 = kernel_alpha_plane(z, w, a2).unwrap();
                sup = sup.max((p1 - p2).norm());
            }
            assert!(sup < 50.0 * (a2 - a1).abs(), "sup {sup} for gap {}", a2 - a1);
        }
    }

    #[test]
    fn tangent_plus_components() {
        let hol = GaugeChoice::holomorphic();
        let t = c(0.3, -0.8);
        assert!((hol.tangent_plus(t) - t).norm() < 1e-15);
        let wml = GaugeChoice::wml(1e-6).unwrap();
        assert_relative_eq!(wml.tangent_plus(t).re, 0.3 - 0.8, max_relative = 1e-15);
    }

    #[test]
    fn hat_normalization_rules() {
        let sphere = Surface::sphere(2.0).unwrap();
        assert!(PropagatorKernel::new(&sphere, GaugeChoice::holomorphic(), Normalization::HatNormalized).is_ok());
        assert!(PropagatorKernel::new(
            &sphere,
            GaugeChoice::alpha(FRAC_PI_4).unwrap(),
            Normalization::Raw
        )
        .is_err());
        assert!(PropagatorKernel::new(
            &Surface::PlaneStandard,
            GaugeChoice::holomorphic(),
            Normalization::HatNormalized
        )
        .is_err());
    }
}
