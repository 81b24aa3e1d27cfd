//! Exact sampling of symplectic spectra from the Hilbert-Schmidt distribution.
//!
//! Each `νᵢ` is proposed from the power law `q(ν) = (β − 1) ν^{-β}` on
//! `[1, ∞)` by inversion, and the tuple is accepted with probability
//!
//! ```text
//! (∏ν)^{β − β_N} ∏_{l>m} (1/ν_m² − 1/ν_l²)²  ≤ 1,   β_N = N² − 3N/2 + 3,
//! ```
//!
//! which makes accepted tuples exact draws from `P_N`. The overall acceptance
//! rate is `(β − 1)^N / Z_N`; it is one for `N = 1` and about `3.4e-4` for
//! `N = 3`, and collapses for larger `N`.
//!
//! Sample `i` of a batch with seed `s` uses its own ChaCha8 stream
//! `(s, i)`, so batches are identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::measures;
use crate::quadrature::QuadratureConfig;
use crate::scalar::Real;
use crate::symplectic::{conjugate, symplectic_exp, CovarianceMatrix, HamiltonianGenerator, SymplecticSpectrum};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5E_ED0F_6A55;

/// Default number of proposals allowed per accepted sample.
pub const DEFAULT_MAX_RETRIES: u64 = 1_000_000;

/// Configuration of the rejection sampler.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SamplerConfig<T> {
    pub modes: usize,
    pub seed: u64,
    /// Tail exponent of the proposal, in `(1, β_N]`.
    pub beta: T,
    pub max_retries: u64,
}

impl<T: Real> SamplerConfig<T> {
    pub fn new(modes: usize, seed: u64) -> Self {
        Self {
            modes,
            seed,
            beta: default_beta(modes),
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }

    pub fn with_beta(mut self, beta: T) -> Self {
        self.beta = beta;
        self
    }

    pub fn with_max_retries(mut self, max_retries: u64) -> Self {
        self.max_retries = max_retries;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.modes == 0 {
            return Err(Error::Config("sampler needs at least one mode".into()));
        }
        if !(self.beta > T::one()) || self.beta > default_beta::<T>(self.modes) {
            return Err(Error::Config(format!(
                "proposal exponent must lie in (1, {}], got {}",
                default_beta::<f64>(self.modes),
                self.beta.to_f64_lossy()
            )));
        }
        if self.max_retries == 0 {
            return Err(Error::Config("max_retries must be positive".into()));
        }
        Ok(())
    }
}

/// Proposal exponent `β_N = N² − 3N/2 + 3`.
pub fn default_beta<T: Real>(modes: usize) -> T {
    let n = modes as f64;
    T::lit(n * n - 1.5 * n + 3.0)
}

/// Expected fraction of accepted proposals, `(β − 1)^N / Z_N`, for `N ≤ 6`.
pub fn predicted_acceptance_rate(modes: usize, beta: f64) -> Result<f64> {
    let z = measures::hs_normalization_constant::<f64>(modes, &QuadratureConfig::default())?;
    Ok((beta - 1.0).powi(modes as i32) / z)
}

/// Accepted spectra of a batch together with the proposal count.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch<T: Real> {
    pub spectra: Vec<SymplecticSpectrum<T>>,
    pub attempts: u64,
    pub acceptance_rate: T,
}

/// Random stream for sample `index` of a run seeded with `seed`.
pub fn sample_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

fn uniform<T: Real, R: Rng + ?Sized>(rng: &mut R) -> T {
    T::lit(rng.random::<f64>())
}

/// Inverse CDF of `(β − 1) ν^{-β}` on `[1, ∞)`.
pub fn power_law_quantile<T: Real>(u: T, beta: T) -> T {
    (T::one() - u).powf(-T::one() / (beta - T::one())).max(T::one())
}

/// One-mode draw `ν = (1 − u)^{-2/3}` from `P₁ = (3/2) ν^{-5/2}`.
pub fn sample_spectrum_one_mode<T: Real, R: Rng + ?Sized>(rng: &mut R) -> SymplecticSpectrum<T> {
    SymplecticSpectrum::new(vec![power_law_quantile(uniform(rng), T::lit(2.5))])
}

/// `∏_{l>m} (ν_l² − ν_m²)² / (ν_l⁴ ν_m⁴)`, the rejection weight for the default exponent.
pub fn acceptance_probability<T: Real>(nu: &[T]) -> T {
    let mut p = T::one();
    for l in 0..nu.len() {
        for m in 0..l {
            let d = T::one() / (nu[m] * nu[m]) - T::one() / (nu[l] * nu[l]);
            p *= d * d;
        }
    }
    p
}

/// Draws one spectrum and reports how many proposals it took.
pub fn sample_spectrum_counted<T: Real, R: Rng + ?Sized>(
    config: &SamplerConfig<T>,
    rng: &mut R,
) -> Result<(SymplecticSpectrum<T>, u64)> {
    config.validate()?;
    let shift = config.beta - default_beta::<T>(config.modes);
    let mut nu = vec![T::one(); config.modes];
    for attempt in 1..=config.max_retries {
        for v in nu.iter_mut() {
            *v = power_law_quantile(uniform(rng), config.beta);
        }
        let mut weight = acceptance_probability(&nu);
        if shift != T::zero() {
            weight *= nu.iter().fold(T::one(), |acc, &v| acc * v).powf(shift);
        }
        if config.modes == 1 && shift == T::zero() {
            return Ok((SymplecticSpectrum::new(nu), attempt));
        }
        if uniform::<T, R>(rng) < weight {
            return Ok((SymplecticSpectrum::new(nu), attempt));
        }
    }
    Err(Error::RetryBudgetExhausted(config.max_retries))
}

/// Exact draw from the normalized Hilbert-Schmidt spectral distribution.
pub fn sample_spectrum<T: Real, R: Rng + ?Sized>(config: &SamplerConfig<T>, rng: &mut R) -> Result<SymplecticSpectrum<T>> {
    Ok(sample_spectrum_counted(config, rng)?.0)
}

/// Runs `f(i, rng_i)` for `i < count` on `workers` threads (all available when
/// `None`), returning results in index order.
pub fn run_indexed<U, F>(count: usize, seed: u64, workers: Option<usize>, f: F) -> Result<Vec<U>>
where
    U: Send,
    F: Fn(usize, &mut ChaCha8Rng) -> Result<U> + Sync + Send,
{
    let job = || {
        (0..count)
            .into_par_iter()
            .map(|i| f(i, &mut sample_rng(seed, i as u64)))
            .collect::<Result<Vec<U>>>()
    };
    match workers {
        Some(0) => Err(Error::Config("worker count must be positive".into())),
        Some(k) => rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build()
            .map_err(|e| Error::Config(e.to_string()))?
            .install(job),
        None => job(),
    }
}

/// `count` spectra with per-sample streams derived from `config.seed`.
pub fn sample_batch<T: Real>(config: &SamplerConfig<T>, count: usize, workers: Option<usize>) -> Result<SampleBatch<T>> {
    config.validate()?;
    let draws = run_indexed(count, config.seed, workers, |_, rng| sample_spectrum_counted(config, rng))?;
    let attempts: u64 = draws.iter().map(|(_, a)| a).sum();
    let spectra: Vec<_> = draws.into_iter().map(|(s, _)| s).collect();
    let acceptance_rate = if attempts == 0 {
        T::one()
    } else {
        T::from_count(spectra.len()) / T::lit(attempts as f64)
    };
    Ok(SampleBatch {
        spectra,
        attempts,
        acceptance_rate,
    })
}

/// Canonical generator with independent `N(0, scale²)` coordinates.
pub fn random_generator<T: Real, R: Rng + ?Sized>(modes: usize, scale: T, rng: &mut R) -> Result<HamiltonianGenerator<T>> {
    let coords: Vec<T> = (0..HamiltonianGenerator::<T>::canonical_dimension(modes))
        .map(|_| scale * T::lit(rng.sample::<f64, _>(StandardNormal)))
        .collect();
    HamiltonianGenerator::from_canonical_coordinates(modes, &coords)
}

/// A sampled covariance matrix and the spectrum it was built from.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceSample<T: Real> {
    pub sigma: CovarianceMatrix<T>,
    pub spectrum: SymplecticSpectrum<T>,
}

/// `Σ = Sᵀ D S` with `D` from [`sample_spectrum`] and `S = exp(X)` for a
/// random generator of the given entry scale.
///
/// This is not a uniform measure on the symplectic group, which has infinite
/// volume; it is meant for invariance tests.
pub fn sample_covariance<T: Real, R: Rng + ?Sized>(
    config: &SamplerConfig<T>,
    generator_scale: T,
    rng: &mut R,
) -> Result<CovarianceSample<T>> {
    if !(generator_scale > T::zero()) || !generator_scale.finite() {
        return Err(Error::Config("generator scale must be positive".into()));
    }
    let spectrum = sample_spectrum(config, rng)?;
    let x = random_generator(config.modes, generator_scale, rng)?;
    let s = symplectic_exp(&x)?;
    let sigma = conjugate(&CovarianceMatrix::from_spectrum(&spectrum), &s)?;
    Ok(CovarianceSample { sigma, spectrum })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn quantile_examples() {
        assert_eq!(power_law_quantile(0.0, 2.5), 1.0);
        assert_relative_eq!(power_law_quantile(0.75, 2.5), 4f64.powf(2.0 / 3.0), max_relative = 1e-15);
    }

    #[test]
    fn default_exponents() {
        assert_eq!(default_beta::<f64>(1), 2.5);
        assert_eq!(default_beta::<f64>(2), 4.0);
        assert_eq!(default_beta::<f64>(3), 7.5);
    }

    #[test]
    fn coincident_pair_never_accepted() {
        assert_eq!(acceptance_probability(&[1.7, 1.7]), 0.0);
        assert_eq!(acceptance_probability(&[2.0]), 1.0);
    }

    #[test]
    fn one_mode_accepts_every_proposal() {
        let cfg = SamplerConfig::<f64>::new(1, 3);
        let batch = sample_batch(&cfg, 100, Some(2)).unwrap();
        assert_eq!(batch.attempts, 100);
        assert_eq!(batch.acceptance_rate, 1.0);
    }

    #[test]
    fn batches_independent_of_workers() {
        let cfg = SamplerConfig::<f64>::new(2, 11);
        let a = sample_batch(&cfg, 64, Some(1)).unwrap();
        let b = sample_batch(&cfg, 64, Some(4)).unwrap();
        assert_eq!(a, b);
        assert!(a.spectra.iter().all(|s| s.values().iter().all(|&v| v >= 1.0)));
    }

    #[test]
    fn predicted_rates() {
        assert_relative_eq!(predicted_acceptance_rate(1, 2.5).unwrap(), 1.0);
        assert_relative_eq!(predicted_acceptance_rate(2, 4.0).unwrap(), 9.0 / 65.625, max_relative = 1e-14);
    }

    #[test]
    fn exhausted_budget_is_reported() {
        let cfg = SamplerConfig::<f64>::new(5, 1).with_max_retries(10);
        let mut rng = sample_rng(1, 0);
        assert_eq!(sample_spectrum(&cfg, &mut rng), Err(Error::RetryBudgetExhausted(10)));
    }

    #[test]
    fn config_validation() {
        assert!(SamplerConfig::<f64>::new(0, 1).validate().is_err());
        assert!(SamplerConfig::<f64>::new(2, 1).with_beta(5.0).validate().is_err());
        assert!(SamplerConfig::<f64>::new(2, 1).with_beta(1.0).validate().is_err());
        assert!(SamplerConfig::<f64>::new(2, 1).with_beta(3.0).validate().is_ok());
    }

    #[test]
    fn covariance_carries_sampled_spectrum() {
        let cfg = SamplerConfig::<f64>::new(2, 5);
        let mut rng = sample_rng(5, 0);
        let sample = sample_covariance(&cfg, 0.3, &mut rng).unwrap();
        let nu = crate::symplectic::symplectic_spectrum(&sample.sigma).unwrap();
        for (a, b) in nu.values().iter().zip(sample.spectrum.values()) {
            assert_relative_eq!(a, b, max_relative = 1e-8);
        }
        let tiny = sample_covariance(&cfg, 1e-300, &mut sample_rng(5, 1)).unwrap();
        let m = tiny.sigma.matrix();
        assert!(m[(0, 1)].abs() < 1e-200 && m[(0, 2)].abs() < 1e-200);
        assert!(sample_covariance(&cfg, 0.0, &mut rng).is_err());
    }
}
