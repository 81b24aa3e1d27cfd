//! Oracles and statistics shared by the integration tests.
#![allow(dead_code)]

use gaussian_geometry::Covariance;
use nalgebra::DMatrix;
use rand::Rng;
use statrs::distribution::{ChiSquared, ContinuousCDF};

/// `∫_a^b ν^{-k} dν` for `k > 1`.
fn power_integral(a: f64, b: f64, k: i32) -> f64 {
    let p = 1 - k;
    (b.powi(p) - a.powi(p)) / p as f64
}

/// Probability of `[a1,b1] × [a2,b2]` under the normalized two-mode density
/// `(525/8)(ν₁² − ν₂²)² / (ν₁⁸ ν₂⁸)`, expanded into separable power laws.
pub fn p2_rectangle(a1: f64, b1: f64, a2: f64, b2: f64) -> f64 {
    let i = |a: f64, b: f64, k: i32| power_integral(a, b, k);
    525.0 / 8.0 * (i(a1, b1, 4) * i(a2, b2, 8) - 2.0 * i(a1, b1, 6) * i(a2, b2, 6) + i(a1, b1, 8) * i(a2, b2, 4))
}

/// Kolmogorov-Smirnov statistic of a sample against a continuous CDF.
pub fn ks_statistic(mut samples: Vec<f64>, cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).abs().max((f - (i + 1) as f64 / n).abs())
        })
        .fold(0.0, f64::max)
}

/// Pearson χ² test. Cells with expected count below five are pooled into one
/// cell; returns `(statistic, degrees of freedom, p-value)`.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, usize, f64) {
    assert_eq!(observed.len(), expected.len());
    let mut stat = 0.0;
    let mut cells = 0usize;
    let (mut pooled_obs, mut pooled_exp) = (0.0, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        if e < 5.0 {
            pooled_obs += o as f64;
            pooled_exp += e;
        } else {
            stat += (o as f64 - e).powi(2) / e;
            cells += 1;
        }
    }
    if pooled_exp > 0.0 {
        stat += (pooled_obs - pooled_exp).powi(2) / pooled_exp;
        cells += 1;
    }
    let dof = cells - 1;
    let p = 1.0 - ChiSquared::new(dof as f64).unwrap().cdf(stat);
    (stat, dof, p)
}

/// Random symmetric matrix with standard normal entries.
pub fn random_symmetric<R: Rng>(dim: usize, rng: &mut R) -> DMatrix<f64> {
    let m = DMatrix::from_fn(dim, dim, |_, _| rng.sample::<f64, _>(rand_distr::StandardNormal));
    (&m + m.transpose()) * 0.5
}

/// Largest absolute entry difference relative to the larger matrix scale.
pub fn relative_difference(a: &Covariance, b: &Covariance) -> f64 {
    let scale = a.matrix().amax().max(b.matrix().amax());
    (a.matrix() - b.matrix()).amax() / scale
}
