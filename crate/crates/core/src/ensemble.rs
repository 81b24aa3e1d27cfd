//! Ensemble averages, purity histograms, truncated Bures means and the
//! tabular data behind the figures.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::measures::{self, bures_weighted_integral, hs_density_shape, hs_normalization_constant, purity_density};
use crate::metrics::{entropy_term, purity, von_neumann_entropy};
use crate::moments;
use crate::quadrature::{integrate_spectral, QuadratureConfig};
use crate::sampling::{run_indexed, sample_spectrum, SamplerConfig};
use crate::scalar::Real;
use crate::symplectic::SymplecticSpectrum;

/// Largest mode count for nested quadrature means.
pub const MAX_QUADRATURE_MODES: usize = 4;

/// Spectral function being averaged.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Observable {
    Purity,
    Entropy,
    /// The constant one; its mean checks normalization.
    Unit,
}

impl Observable {
    pub fn name(self) -> &'static str {
        match self {
            Observable::Purity => "purity",
            Observable::Entropy => "entropy",
            Observable::Unit => "unit",
        }
    }

    /// Value on a physical spectrum.
    pub fn evaluate<T: Real>(self, spectrum: &SymplecticSpectrum<T>) -> Result<T> {
        match self {
            Observable::Purity => Ok(purity(spectrum)),
            Observable::Entropy => von_neumann_entropy(spectrum),
            Observable::Unit => Ok(T::one()),
        }
    }

    fn one_mode<T: Real>(self, nu: T) -> T {
        match self {
            Observable::Purity => T::one() / nu,
            Observable::Entropy => entropy_term(nu),
            Observable::Unit => T::one(),
        }
    }
}

impl fmt::Display for Observable {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Observable {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "purity" => Ok(Observable::Purity),
            "entropy" => Ok(Observable::Entropy),
            "unit" => Ok(Observable::Unit),
            other => Err(Error::Parse(format!("unknown observable `{other}`"))),
        }
    }
}

/// How an ensemble estimate was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Method {
    MonteCarlo,
    /// Nested adaptive quadrature over `[1, ∞)^N`.
    Quadrature,
    /// Hankel-determinant reduction to one-dimensional moments.
    Moments,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::MonteCarlo => "monte-carlo",
            Method::Quadrature => "quadrature",
            Method::Moments => "moments",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// A Monte Carlo or deterministic estimate of an ensemble mean.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnsembleSummary<T> {
    pub observable: Observable,
    pub modes: usize,
    pub method: Method,
    pub estimate: T,
    /// Sample standard deviation over `√count`; zero for deterministic methods.
    pub standard_error: T,
    pub sample_count: Option<usize>,
    pub tolerance: Option<T>,
    pub seed: Option<u64>,
}

/// Monte Carlo mean over `count` exact samples of the spectral distribution.
pub fn mc_mean<T: Real>(
    observable: Observable,
    config: &SamplerConfig<T>,
    count: usize,
    workers: Option<usize>,
) -> Result<EnsembleSummary<T>> {
    if count == 0 {
        return Err(Error::Config("sample count must be positive".into()));
    }
    config.validate()?;
    let values = run_indexed(count, config.seed, workers, |_, rng| {
        observable.evaluate(&sample_spectrum(config, rng)?)
    })?;
    let (mean, variance) = mean_and_variance(&values);
    Ok(EnsembleSummary {
        observable,
        modes: config.modes,
        method: Method::MonteCarlo,
        estimate: mean,
        standard_error: (variance / T::from_count(count)).sqrt(),
        sample_count: Some(count),
        tolerance: None,
        seed: Some(config.seed),
    })
}

/// Mean and unbiased sample variance by Welford's recurrence.
pub fn mean_and_variance<T: Real>(values: &[T]) -> (T, T) {
    let mut mean = T::zero();
    let mut m2 = T::zero();
    for (k, &x) in values.iter().enumerate() {
        let delta = x - mean;
        mean += delta / T::from_count(k + 1);
        m2 += delta * (x - mean);
    }
    let variance = if values.len() > 1 {
        m2 / T::from_count(values.len() - 1)
    } else {
        T::zero()
    };
    (mean, variance)
}

/// Mean by nested quadrature of `f · P_N` for `N ≤ 4`.
///
/// The entropy is additive and `P_N` symmetric, so its mean is computed as
/// `N ∫ s(ν₁) P_N`.
pub fn quad_mean<T: Real>(observable: Observable, modes: usize, config: &QuadratureConfig<T>) -> Result<EnsembleSummary<T>> {
    config.validate()?;
    if modes == 0 || modes > MAX_QUADRATURE_MODES {
        return Err(Error::UnsupportedModes {
            operation: "quadrature mean",
            supported: "1..=4",
            modes,
        });
    }
    let z = hs_normalization_constant(modes, config)?;
    let cfg = config.relative_only();
    let n = T::from_count(modes);
    let est = integrate_spectral(
        modes,
        |nu: &[T]| {
            let shape = hs_density_shape(nu);
            match observable {
                Observable::Purity => shape / nu.iter().fold(T::one(), |acc, &v| acc * v),
                Observable::Entropy => n * entropy_term(nu[0]) * shape,
                Observable::Unit => shape,
            }
        },
        &cfg,
    )?;
    Ok(EnsembleSummary {
        observable,
        modes,
        method: Method::Quadrature,
        estimate: z * est.value,
        standard_error: T::zero(),
        sample_count: None,
        tolerance: Some(config.rel_tol),
        seed: None,
    })
}

/// Mean through the moment reduction, for `N ≤ 6`.
///
/// The purity mean is a ratio of closed-form Hankel determinants; additive
/// observables need one-dimensional quadratures only.
pub fn moment_mean<T: Real>(observable: Observable, modes: usize, config: &QuadratureConfig<T>) -> Result<EnsembleSummary<T>> {
    config.validate()?;
    if modes == 0 || modes > measures::MAX_NORMALIZED_MODES {
        return Err(Error::UnsupportedModes {
            operation: "moment mean",
            supported: "1..=6",
            modes,
        });
    }
    let estimate = match observable {
        Observable::Purity => T::lit(moments::mean_purity::<f64>(modes)?),
        Observable::Entropy => moments::mean_additive(modes, entropy_term, config)?,
        Observable::Unit => T::one(),
    };
    Ok(EnsembleSummary {
        observable,
        modes,
        method: Method::Moments,
        estimate,
        standard_error: T::zero(),
        sample_count: None,
        tolerance: Some(config.rel_tol),
        seed: None,
    })
}

/// Histogram on uniform bins over `[lower, upper]`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HistogramSeries<T> {
    pub edges: Vec<T>,
    pub counts: Vec<u64>,
    /// `count / (total · width)`, so the heights integrate to one.
    pub heights: Vec<T>,
}

impl<T: Real> HistogramSeries<T> {
    /// Bins `values` on `bins` equal cells of `[lower, upper]`; the upper edge
    /// belongs to the last cell and values outside the range are dropped.
    pub fn from_values(values: &[T], lower: T, upper: T, bins: usize) -> Result<Self> {
        if bins == 0 || !(upper > lower) {
            return Err(Error::Config("histogram needs bins and a non-empty range".into()));
        }
        let width = (upper - lower) / T::from_count(bins);
        let edges: Vec<T> = (0..=bins).map(|k| lower + width * T::from_count(k)).collect();
        let mut counts = vec![0u64; bins];
        for &v in values {
            if v < lower || v > upper {
                continue;
            }
            let k = ((v - lower) / width).floor().to_f64_lossy() as usize;
            counts[k.min(bins - 1)] += 1;
        }
        let total = T::lit(counts.iter().sum::<u64>() as f64);
        let heights = counts
            .iter()
            .map(|&c| if total > T::zero() { T::lit(c as f64) / (total * width) } else { T::zero() })
            .collect();
        Ok(Self { edges, counts, heights })
    }

    pub fn centers(&self) -> Vec<T> {
        self.edges
            .windows(2)
            .map(|w| (w[0] + w[1]) * T::lit(0.5))
            .collect()
    }
}

/// Normalized Monte Carlo histogram of the purity over `(0, 1]`.
pub fn purity_histogram<T: Real>(
    config: &SamplerConfig<T>,
    count: usize,
    bins: usize,
    workers: Option<usize>,
) -> Result<HistogramSeries<T>> {
    if bins == 0 || count < bins {
        return Err(Error::Config("purity histogram needs count ≥ bins ≥ 1".into()));
    }
    config.validate()?;
    let values = run_indexed(count, config.seed, workers, |_, rng| Ok(purity(&sample_spectrum(config, rng)?)))?;
    HistogramSeries::from_values(&values, T::zero(), T::one(), bins)
}

/// One-mode Bures mean truncated at `ν_m`,
/// `∫₁^{ν_m} f P̃_B / ∫₁^{ν_m} P̃_B`.
pub fn bures_truncated_mean<T: Real>(observable: Observable, cutoff: T, config: &QuadratureConfig<T>) -> Result<T> {
    if observable == Observable::Unit {
        bures_weighted_integral(|_| T::one(), cutoff, config)?;
        return Ok(T::one());
    }
    let cfg = config.relative_only();
    let numerator = bures_weighted_integral(|nu| observable.one_mode(nu), cutoff, &cfg)?;
    let denominator = bures_weighted_integral(|_| T::one(), cutoff, &cfg)?;
    Ok(numerator.value / denominator.value)
}

/// Figure selector for [`figure_data`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Figure {
    /// Normalized spectral distribution for one or two modes.
    SpectralDensity,
    /// Mean purity and entropy against the mode count.
    Means,
    /// Purity densities for several mode counts.
    PurityDist,
}

impl FromStr for Figure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "spectral_density" | "spectral-density" => Ok(Figure::SpectralDensity),
            "means" => Ok(Figure::Means),
            "purity_dist" | "purity-dist" => Ok(Figure::PurityDist),
            other => Err(Error::Parse(format!("unknown figure `{other}`"))),
        }
    }
}

/// Parameters of [`figure_data`].
#[derive(Debug, Clone, PartialEq)]
pub struct FigureParams {
    /// Mode counts: the single `N` for the spectral density, the curves for
    /// the purity distribution, and `1..=max` for the means.
    pub modes: Vec<usize>,
    /// Points per axis.
    pub grid: usize,
    /// Largest `ν` on the spectral-density grid.
    pub nu_max: f64,
    pub quadrature: QuadratureConfig<f64>,
}

impl FigureParams {
    /// Default parameters for each figure.
    pub fn for_figure(figure: Figure) -> Self {
        let modes = match figure {
            Figure::SpectralDensity => vec![1],
            Figure::Means => vec![6],
            Figure::PurityDist => vec![1, 2, 3],
        };
        Self {
            modes,
            grid: 50,
            nu_max: 4.0,
            quadrature: QuadratureConfig::default().with_rel_tol(1e-9),
        }
    }
}

/// Named columns of numbers.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

/// Tabular series for a figure.
///
/// * `spectral_density`: `nu, density` for `N = 1`, or `nu1, nu2, density`
///   on a square grid for `N = 2`.
/// * `means`: `modes, mean_purity, mean_entropy, purity_standard_error,
///   entropy_standard_error`; nested quadrature for `N ≤ 4`, the moment
///   reduction beyond.
/// * `purity_dist`: `mu` followed by one `density_n<N>` column per mode count.
pub fn figure_data(figure: Figure, params: &FigureParams) -> Result<Table> {
    if params.grid < 2 {
        return Err(Error::Config("figure grids need at least two points".into()));
    }
    if params.modes.is_empty() {
        return Err(Error::Config("figure needs at least one mode count".into()));
    }
    match figure {
        Figure::SpectralDensity => spectral_density_table(params),
        Figure::Means => means_table(params),
        Figure::PurityDist => purity_table(params),
    }
}

fn linspace(lower: f64, upper: f64, points: usize) -> Vec<f64> {
    (0..points)
        .map(|k| lower + (upper - lower) * k as f64 / (points - 1) as f64)
        .collect()
}

fn spectral_density_table(params: &FigureParams) -> Result<Table> {
    if !(params.nu_max > 1.0) {
        return Err(Error::Config("nu_max must exceed one".into()));
    }
    let axis = linspace(1.0, params.nu_max, params.grid);
    let density = |nu: Vec<f64>| -> Result<f64> {
        Ok(measures::hs_spectral_density(&SymplecticSpectrum::new(nu), true)?.value)
    };
    match params.modes.as_slice() {
        [1] => Ok(Table {
            columns: vec!["nu".into(), "density".into()],
            rows: axis
                .iter()
                .map(|&nu| Ok(vec![nu, density(vec![nu])?]))
                .collect::<Result<_>>()?,
        }),
        [2] => {
            let mut rows = Vec::with_capacity(axis.len() * axis.len());
            for &a in &axis {
                for &b in &axis {
                    rows.push(vec![a, b, density(vec![a, b])?]);
                }
            }
            Ok(Table {
                columns: vec!["nu1".into(), "nu2".into(), "density".into()],
                rows,
            })
        }
        other => Err(Error::Config(format!(
            "spectral_density figure supports a single mode count of 1 or 2, got {other:?}"
        ))),
    }
}

fn means_table(params: &FigureParams) -> Result<Table> {
    let max = *params.modes.iter().max().expect("non-empty");
    if max > measures::MAX_NORMALIZED_MODES {
        return Err(Error::UnsupportedModes {
            operation: "means figure",
            supported: "1..=6",
            modes: max,
        });
    }
    let cfg = params.quadrature;
    let rows = (1..=max)
        .into_par_iter()
        .map(|n| {
            let mean = |obs| {
                if n <= MAX_QUADRATURE_MODES {
                    quad_mean(obs, n, &cfg)
                } else {
                    moment_mean(obs, n, &cfg)
                }
            };
            let p = mean(Observable::Purity)?;
            let s = mean(Observable::Entropy)?;
            Ok(vec![n as f64, p.estimate, s.estimate, p.standard_error, s.standard_error])
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Table {
        columns: ["modes", "mean_purity", "mean_entropy", "purity_standard_error", "entropy_standard_error"]
            .map(String::from)
            .to_vec(),
        rows,
    })
}

fn purity_table(params: &FigureParams) -> Result<Table> {
    let mus: Vec<f64> = (1..=params.grid).map(|k| k as f64 / params.grid as f64).collect();
    let cfg = params.quadrature;
    let rows = mus
        .par_iter()
        .map(|&mu| {
            let mut row = vec![mu];
            for &n in &params.modes {
                row.push(purity_density(n, mu, &cfg)?);
            }
            Ok(row)
        })
        .collect::<Result<Vec<_>>>()?;
    let mut columns = vec!["mu".to_string()];
    columns.extend(params.modes.iter().map(|n| format!("density_n{n}")));
    Ok(Table { columns, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn welford_matches_two_pass() {
        let xs = [1.0, 2.0, 4.0, 8.0];
        let (m, v) = mean_and_variance(&xs);
        assert_relative_eq!(m, 3.75);
        assert_relative_eq!(v, (7.5625 + 3.0625 + 0.0625 + 18.0625) / 3.0);
        assert_eq!(mean_and_variance(&[2.0]), (2.0, 0.0));
    }

    #[test]
    fn quadrature_means_small_n() {
        let cfg = QuadratureConfig::<f64>::default();
        assert_relative_eq!(quad_mean(Observable::Purity, 1, &cfg).unwrap().estimate, 0.6, epsilon = 1e-10);
        assert_relative_eq!(quad_mean(Observable::Unit, 2, &cfg).unwrap().estimate, 1.0, epsilon = 1e-10);
        assert_relative_eq!(
            quad_mean(Observable::Purity, 2, &cfg).unwrap().estimate,
            175.0 / 384.0,
            max_relative = 1e-10
        );
        assert!(quad_mean(Observable::Purity, 5, &cfg).is_err());
    }

    #[test]
    fn entropy_one_mode_regression() {
        let cfg = QuadratureConfig::<f64>::default();
        let s = quad_mean(Observable::Entropy, 1, &cfg).unwrap();
        assert_relative_eq!(s.estimate, 0.87764914623495130981, max_relative = 1e-9);
        assert_eq!(s.standard_error, 0.0);
    }

    #[test]
    fn moment_route_matches_quadrature() {
        let cfg = QuadratureConfig::<f64>::default();
        for n in 1..=3 {
            for obs in [Observable::Purity, Observable::Entropy] {
                let a = quad_mean(obs, n, &cfg).unwrap().estimate;
                let b = moment_mean(obs, n, &cfg).unwrap().estimate;
                assert_relative_eq!(a, b, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn histogram_binning() {
        let h = HistogramSeries::from_values(&[0.1, 0.5, 1.0, 0.0, 2.0], 0.0, 1.0, 4).unwrap();
        assert_eq!(h.counts, vec![2, 0, 1, 1]);
        let area: f64 = h.heights.iter().map(|x| x * 0.25).sum();
        assert_relative_eq!(area, 1.0, epsilon = 1e-12);
        assert_eq!(h.centers()[0], 0.125);
    }

    #[test]
    fn bures_unit_mean_is_one() {
        let cfg = QuadratureConfig::<f64>::default();
        for cutoff in [1.5, 1e3, 1e9] {
            assert_eq!(bures_truncated_mean(Observable::Unit, cutoff, &cfg).unwrap(), 1.0);
        }
    }

    #[test]
    fn bures_purity_regression() {
        let cfg = QuadratureConfig::<f64>::default();
        let expected = [(1e2, 0.23544242249809), (1e4, 0.119675575630775), (1e12, 0.0400968563517568)];
        for (cutoff, value) in expected {
            assert_relative_eq!(bures_truncated_mean(Observable::Purity, cutoff, &cfg).unwrap(), value, max_relative = 1e-10);
        }
    }

    #[test]
    fn observable_parsing() {
        assert_eq!("entropy".parse::<Observable>().unwrap(), Observable::Entropy);
        assert!("energy".parse::<Observable>().is_err());
        assert_eq!("purity_dist".parse::<Figure>().unwrap(), Figure::PurityDist);
    }

    #[test]
    fn spectral_density_figure_one_mode() {
        let params = FigureParams::for_figure(Figure::SpectralDensity);
        let t = figure_data(Figure::SpectralDensity, &params).unwrap();
        assert_eq!(t.columns, vec!["nu", "density"]);
        for row in &t.rows {
            assert_relative_eq!(row[1], 1.5 * row[0].powf(-2.5), max_relative = 1e-14);
        }
    }

    #[test]
    fn purity_figure_one_mode() {
        let mut params = FigureParams::for_figure(Figure::PurityDist);
        params.modes = vec![1];
        params.grid = 10;
        let t = figure_data(Figure::PurityDist, &params).unwrap();
        for row in &t.rows {
            assert_relative_eq!(row[1], 1.5 * row[0].sqrt(), max_relative = 1e-12);
        }
    }
}
