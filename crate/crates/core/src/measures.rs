//! Measure densities on symplectic spectra.
//!
//! The Hilbert-Schmidt density is
//!
//! ```text
//! √det g = √(N+1) / 4^{N²} · (∏ν)^{-(N² + 5N/2 − 1)} · ∏_{l>m} (ν_l² − ν_m²)²
//! ```
//!
//! and the normalized spectral distribution is `P_N = Z_N · (∏ν)^{-e} ∏(ν_l² − ν_m²)²`,
//! so `Z_1 = 3/2` and `Z_2 = 525/8`.

use std::collections::HashMap;
use std::sync::{OnceLock, RwLock};

use crate::error::{Error, Result};
use crate::moments;
use crate::quadrature::{integrate, integrate_spectral, Estimate, QuadratureConfig};
use crate::scalar::Real;
use crate::symplectic::SymplecticSpectrum;

/// Largest mode count with a supported normalization constant.
pub const MAX_NORMALIZED_MODES: usize = 6;

/// Largest mode count accepted by [`purity_density`].
pub const MAX_PURITY_DENSITY_MODES: usize = 4;

/// A density value with its normalization metadata.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DensityEvaluation<T> {
    pub value: T,
    pub normalized: bool,
    /// `Z_N` when known; `None` means not computed.
    pub normalization_constant: Option<T>,
}

/// Exponent `N² + 5N/2 − 1` of `∏ν` in the Hilbert-Schmidt density.
pub fn spectral_exponent<T: Real>(modes: usize) -> T {
    T::lit(moments::twice_weight_exponent(modes) as f64 * 0.5)
}

/// `(∏ν)^{-e} ∏_{l>m}(ν_l² − ν_m²)²`, the density without its constant prefactor.
pub fn hs_density_shape<T: Real>(nu: &[T]) -> T {
    let e = spectral_exponent::<T>(nu.len());
    let product = nu.iter().fold(T::one(), |acc, &v| acc * v);
    let mut vandermonde = T::one();
    for l in 0..nu.len() {
        for m in 0..l {
            let d = nu[l] * nu[l] - nu[m] * nu[m];
            vandermonde *= d * d;
        }
    }
    vandermonde * product.powf(-e)
}

/// Square root of the determinant of the Hilbert-Schmidt metric in the
/// canonical coordinates.
pub fn hs_sqrt_det_g<T: Real>(spectrum: &SymplecticSpectrum<T>) -> T {
    let n = spectrum.modes();
    let prefactor = T::from_count(n + 1).sqrt() / T::lit(4.0).powi((n * n) as i32);
    prefactor * hs_density_shape(spectrum.values())
}

fn constant_cache() -> &'static RwLock<HashMap<usize, f64>> {
    static CACHE: OnceLock<RwLock<HashMap<usize, f64>>> = OnceLock::new();
    CACHE.get_or_init(|| RwLock::new(HashMap::new()))
}

fn check_modes(modes: usize) -> Result<()> {
    if modes == 0 || modes > MAX_NORMALIZED_MODES {
        return Err(Error::UnsupportedModes {
            operation: "normalization constant",
            supported: "1..=6",
            modes,
        });
    }
    Ok(())
}

/// Normalization constant `Z_N` of the spectral distribution for `N ≤ 6`.
///
/// `N = 1, 2` are the exact values `3/2` and `525/8`. Larger `N` come from the
/// moment reduction in [`moments`] and are cached per mode count.
pub fn hs_normalization_constant<T: Real>(modes: usize, config: &QuadratureConfig<T>) -> Result<T> {
    config.validate()?;
    check_modes(modes)?;
    match modes {
        1 => return Ok(T::lit(1.5)),
        2 => return Ok(T::lit(525.0 / 8.0)),
        _ => {}
    }
    if let Some(&z) = constant_cache().read().expect("cache lock").get(&modes) {
        return Ok(T::lit(z));
    }
    let z = moments::normalization_constant::<f64>(modes)?;
    constant_cache().write().expect("cache lock").entry(modes).or_insert(z);
    Ok(T::lit(z))
}

/// `Z_N` by nested adaptive quadrature of the density shape over `[1, ∞)^N`.
///
/// The returned error is the propagated quadrature error of `Z_N`. Practical
/// for `N ≤ 3`.
pub fn hs_normalization_constant_quadrature<T: Real>(
    modes: usize,
    config: &QuadratureConfig<T>,
) -> Result<Estimate<T>> {
    config.validate()?;
    check_modes(modes)?;
    let est = integrate_spectral(modes, |nu: &[T]| hs_density_shape(nu), &config.relative_only())?;
    let z = T::one() / est.value;
    Ok(Estimate {
        value: z,
        abs_error: est.abs_error * z * z,
        evaluations: est.evaluations,
    })
}

/// Hilbert-Schmidt spectral density.
///
/// Unnormalized evaluations return [`hs_sqrt_det_g`]; normalized ones return
/// `P_N`, which requires `N ≤ 6`.
pub fn hs_spectral_density<T: Real>(
    spectrum: &SymplecticSpectrum<T>,
    normalized: bool,
) -> Result<DensityEvaluation<T>> {
    if !normalized {
        return Ok(DensityEvaluation {
            value: hs_sqrt_det_g(spectrum),
            normalized: false,
            normalization_constant: None,
        });
    }
    let z = hs_normalization_constant(spectrum.modes(), &QuadratureConfig::default())?;
    Ok(DensityEvaluation {
        value: z * hs_density_shape(spectrum.values()),
        normalized: true,
        normalization_constant: Some(z),
    })
}

/// One-mode Bures spectral weight `ν² / ((ν² + 1) √(ν² − 1))` on `ν > 1`.
///
/// Not normalizable: it decays like `1/ν`.
pub fn bures_spectral_density_one_mode<T: Real>(nu: T) -> Result<T> {
    if !(nu > T::one()) || !nu.finite() {
        return Err(Error::Domain(format!(
            "Bures density is defined for ν > 1, got {}",
            nu.to_f64_lossy()
        )));
    }
    let sq = nu * nu;
    Ok(sq / ((sq + T::one()) * (sq - T::one()).sqrt()))
}

/// Constant prefactor of the one-mode Bures volume element
/// `dV_B = ¼ P̃_B(ν) dν da db`.
pub const BURES_VOLUME_PREFACTOR: f64 = 0.25;

/// `∫₁^{ν_m} f(ν) P̃_B(ν) dν` computed in `θ = arccosh ν`, which removes the
/// endpoint singularity.
pub fn bures_weighted_integral<T, F>(mut f: F, cutoff: T, config: &QuadratureConfig<T>) -> Result<Estimate<T>>
where
    T: Real,
    F: FnMut(T) -> T,
{
    config.validate()?;
    if !(cutoff > T::one()) || !cutoff.finite() {
        return Err(Error::Domain("Bures cutoff must be finite and exceed one".into()));
    }
    let theta_max = cutoff.acosh();
    integrate(
        |theta: T| {
            let c = theta.cosh();
            let c2 = c * c;
            f(c) * c2 / (c2 + T::one())
        },
        T::zero(),
        theta_max,
        config,
    )
}

/// Truncated normalization `I(ν_m) = ∫₁^{ν_m} P̃_B dν`.
pub fn bures_truncated_integral<T: Real>(cutoff: T, config: &QuadratureConfig<T>) -> Result<T> {
    Ok(bures_weighted_integral(|_| T::one(), cutoff, config)?.value)
}

/// Density of the purity `μ = 1/∏ν` under the normalized Hilbert-Schmidt
/// spectral distribution, for `N ≤ 4` and `0 < μ ≤ 1`.
///
/// The `ν₁` integral is removed by the delta function, leaving nested
/// integrals over `ν₂ … ν_N` on the region `ν₂⋯ν_N ≤ 1/μ`.
pub fn purity_density<T: Real>(modes: usize, mu: T, config: &QuadratureConfig<T>) -> Result<T> {
    config.validate()?;
    if modes == 0 || modes > MAX_PURITY_DENSITY_MODES {
        return Err(Error::UnsupportedModes {
            operation: "purity density",
            supported: "1..=4",
            modes,
        });
    }
    if !(mu > T::zero() && mu <= T::one()) {
        return Err(Error::Domain(format!(
            "purity must lie in (0, 1], got {}",
            mu.to_f64_lossy()
        )));
    }
    let z = hs_normalization_constant(modes, config)?;
    let mut point = vec![T::one(); modes];
    let mut failure = None;
    let cfg = config.relative_only();
    let value = purity_level(1, T::one(), mu, &mut point, &cfg, &mut failure);
    if let Some(err) = failure {
        return Err(err);
    }
    Ok(z * value)
}

fn purity_level<T: Real>(
    level: usize,
    partial: T,
    mu: T,
    point: &mut [T],
    cfg: &QuadratureConfig<T>,
    failure: &mut Option<Error>,
) -> T {
    if level == point.len() {
        point[0] = T::one() / (mu * partial);
        return hs_density_shape(point) / (mu * mu * partial);
    }
    if failure.is_some() {
        return T::zero();
    }
    let upper = T::one() / (mu * partial);
    if upper <= T::one() {
        return T::zero();
    }
    let result = integrate(
        |nu: T| {
            point[level] = nu;
            purity_level(level + 1, partial * nu, mu, point, cfg, failure)
        },
        T::one(),
        upper,
        cfg,
    );
    match result {
        Ok(est) => est.value,
        Err(err) => {
            failure.get_or_insert(err);
            T::zero()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn spec(v: &[f64]) -> SymplecticSpectrum<f64> {
        SymplecticSpectrum::new(v.to_vec())
    }

    #[test]
    fn sqrt_det_g_examples() {
        let r2 = 2f64.sqrt();
        assert_relative_eq!(hs_sqrt_det_g(&spec(&[1.0])), r2 / 4.0, max_relative = 1e-15);
        assert_relative_eq!(hs_sqrt_det_g(&spec(&[4.0])), r2 / 128.0, max_relative = 1e-15);
        assert_eq!(hs_sqrt_det_g(&spec(&[1.7, 1.7])), 0.0);
    }

    #[test]
    fn sqrt_det_g_symmetric() {
        let a = hs_density_shape(&[1.2, 2.5, 1.9]);
        let b = hs_density_shape(&[2.5, 1.9, 1.2]);
        assert_relative_eq!(a, b, max_relative = 1e-14);
    }

    #[test]
    fn normalized_density_examples() {
        let p1 = hs_spectral_density(&spec(&[1.0]), true).unwrap();
        assert_relative_eq!(p1.value, 1.5);
        assert!(p1.normalized);
        assert_eq!(p1.normalization_constant, Some(1.5));
        assert_eq!(hs_spectral_density(&spec(&[1.0, 1.0]), true).unwrap().value, 0.0);
        let raw = hs_spectral_density(&spec(&[2.0]), false).unwrap();
        assert!(!raw.normalized && raw.normalization_constant.is_none());
    }

    #[test]
    fn p2_maximum_at_one_and_root_two() {
        let p = |a: f64, b: f64| hs_density_shape(&[a, b]);
        let peak = p(1.0, 2f64.sqrt());
        for &(a, b) in &[(1.0, 1.4), (1.0, 1.43), (1.01, 1.414), (1.05, 1.5), (1.0, 1.3)] {
            assert!(p(a, b) < peak);
        }
    }

    #[test]
    fn constants_by_quadrature() {
        let cfg = QuadratureConfig::default();
        let z1 = hs_normalization_constant_quadrature::<f64>(1, &cfg).unwrap();
        assert_relative_eq!(z1.value, 1.5, max_relative = 1e-10);
        let z2 = hs_normalization_constant_quadrature::<f64>(2, &cfg).unwrap();
        assert_relative_eq!(z2.value, 65.625, max_relative = 1e-9);
    }

    #[test]
    fn cached_constants_match_regression() {
        let cfg = QuadratureConfig::<f64>::default();
        assert_relative_eq!(
            hs_normalization_constant(3, &cfg).unwrap(),
            210211194375.0 / 262144.0,
            max_relative = 1e-12
        );
        assert_relative_eq!(hs_normalization_constant(4, &cfg).unwrap(), 6638962176000.0, max_relative = 1e-12);
        assert!(hs_normalization_constant(7, &cfg).is_err());
        assert!(hs_normalization_constant(0, &cfg).is_err());
    }

    #[test]
    fn bures_density_examples() {
        assert_relative_eq!(
            bures_spectral_density_one_mode(3f64.sqrt()).unwrap(),
            3.0 / (4.0 * 2f64.sqrt()),
            max_relative = 1e-15
        );
        assert!(bures_spectral_density_one_mode(1.0).is_err());
        assert!(bures_spectral_density_one_mode(0.5).is_err());
        assert!(bures_spectral_density_one_mode(1.0 + 1e-10).unwrap() > 1e4);
    }

    #[test]
    fn bures_truncated_integral_closed_form() {
        // I(ν_m) = θ − artanh(tanh θ / √2) / √2 with θ = arccosh ν_m
        let closed = |nu: f64| {
            let t = nu.acosh();
            t - (t.tanh() / 2f64.sqrt()).atanh() / 2f64.sqrt()
        };
        let cfg = QuadratureConfig::default();
        for nu in [1.001, 2.0, 10.0, 1e4, 1e10] {
            assert_relative_eq!(
                bures_truncated_integral(nu, &cfg).unwrap(),
                closed(nu),
                max_relative = 1e-10
            );
        }
        assert_relative_eq!(bures_truncated_integral(2.0, &cfg).unwrap(), 0.812996903693102147708, max_relative = 1e-12);
    }

    #[test]
    fn purity_density_one_mode_closed_form() {
        let cfg = QuadratureConfig::default();
        for mu in [0.01f64, 0.3, 0.77, 1.0] {
            assert_relative_eq!(purity_density(1, mu, &cfg).unwrap(), 1.5 * mu.sqrt(), max_relative = 1e-14);
        }
    }

    #[test]
    fn purity_density_two_modes_closed_form() {
        let cfg = QuadratureConfig::default();
        let expected = [
            (0.1, 0.29787075815445315040),
            (0.5, 2.0044567219691986337),
            (0.9, 0.067293932593146494109),
        ];
        for (mu, p) in expected {
            assert_relative_eq!(purity_density(2, mu, &cfg).unwrap(), p, max_relative = 1e-9);
        }
        assert_eq!(purity_density(2, 1.0, &cfg).unwrap(), 0.0);
    }

    #[test]
    fn purity_density_domain() {
        let cfg = QuadratureConfig::<f64>::default();
        assert!(purity_density(1, 0.0, &cfg).is_err());
        assert!(purity_density(1, 1.5, &cfg).is_err());
        assert!(purity_density(5, 0.5, &cfg).is_err());
    }
}
