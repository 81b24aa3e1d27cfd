//! Spectral integrals of the Hilbert-Schmidt ensemble reduced to Hankel
//! determinants of one-dimensional moments.
//!
//! For a weight `w(ν) = ν^{-e}` on `[1, ∞)` and the squared Vandermonde in
//! `ν²`,
//!
//! ```text
//! ∫ ∏ w(νᵢ) ∏_{l>m} (ν_l² − ν_m²)² dν = N! det[M_{j+k}],
//! M_p = ∫₁^∞ ν^{-e} (ν² − 1)^p dν = ½ B(e/2 − p − ½, p + 1).
//! ```
//!
//! The moments are rational whenever `e` is, so the routines are generic over
//! any ordered field: `f64` for speed, [`BigRational`](num_rational::BigRational)
//! for exact values.

use num_traits::{FromPrimitive, Num, Signed};

use crate::error::{Error, Result};
use crate::quadrature::{integrate_half_line, QuadratureConfig};
use crate::scalar::Real;

/// Arithmetic needed by the moment reduction.
pub trait Field: Clone + Num + Signed + PartialOrd + FromPrimitive {}

impl<K: Clone + Num + Signed + PartialOrd + FromPrimitive> Field for K {}

/// Twice the exponent of `∏ν` in the Hilbert-Schmidt density, `2N² + 5N − 2`.
pub fn twice_weight_exponent(modes: usize) -> i64 {
    let n = modes as i64;
    2 * n * n + 5 * n - 2
}

fn int<K: Field>(x: i64) -> K {
    K::from_i64(x).expect("integer representable")
}

/// `∫₁^∞ ν^{-e} (ν² − 1)^p dν` with `e = twice_exponent / 2`.
///
/// Requires `e > 2p + 1`.
pub fn shifted_moment<K: Field>(twice_exponent: i64, p: usize) -> Result<K> {
    let p_i = p as i64;
    // a = (e − 2p − 1)/2 = (twice_exponent − 4p − 2)/4
    let a_num = twice_exponent - 4 * p_i - 2;
    if a_num <= 0 {
        return Err(Error::Domain(format!(
            "moment {p} diverges for weight exponent {}/2",
            twice_exponent
        )));
    }
    let four: K = int(4);
    let mut value: K = K::one() / int(2);
    for k in 0..=p_i {
        if k > 0 {
            value = value * int(k);
        }
        value = value / ((int::<K>(a_num) + int::<K>(4 * k)) / four.clone());
    }
    Ok(value)
}

/// Determinant by Gaussian elimination with partial pivoting.
pub fn determinant<K: Field>(mut m: Vec<Vec<K>>) -> K {
    let n = m.len();
    let mut det = K::one();
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| {
                m[i][col]
                    .abs()
                    .partial_cmp(&m[j][col].abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            })
            .expect("non-empty range");
        if m[pivot][col].is_zero() {
            return K::zero();
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col].clone();
        det = det * p.clone();
        for row in col + 1..n {
            let factor = m[row][col].clone() / p.clone();
            if factor.is_zero() {
                continue;
            }
            for k in col..n {
                let delta = factor.clone() * m[col][k].clone();
                m[row][k] = m[row][k].clone() - delta;
            }
        }
    }
    det
}

/// Hankel matrix `[M_{j+k}]` of shifted moments.
pub fn hankel<K: Field>(modes: usize, twice_exponent: i64) -> Result<Vec<Vec<K>>> {
    let moments = (0..2 * modes.max(1) - 1)
        .map(|p| shifted_moment::<K>(twice_exponent, p))
        .collect::<Result<Vec<K>>>()?;
    Ok((0..modes)
        .map(|j| (0..modes).map(|k| moments[j + k].clone()).collect())
        .collect())
}

/// `∫_{[1,∞)^N} (∏ν)^{-e} ∏_{l>m}(ν_l² − ν_m²)² dν` with `e = twice_exponent / 2`.
pub fn spectral_integral<K: Field>(modes: usize, twice_exponent: i64) -> Result<K> {
    if modes == 0 {
        return Err(Error::Domain("need at least one mode".into()));
    }
    let mut factorial = K::one();
    for k in 2..=modes as i64 {
        factorial = factorial * int(k);
    }
    Ok(factorial * determinant(hankel::<K>(modes, twice_exponent)?))
}

/// Normalization constant `Z_N` with `P_N = Z_N (∏ν)^{-e} ∏(ν_l² − ν_m²)²`.
pub fn normalization_constant<K: Field>(modes: usize) -> Result<K> {
    Ok(K::one() / spectral_integral::<K>(modes, twice_weight_exponent(modes))?)
}

/// Mean purity `⟨1/∏ν⟩` under `P_N`.
pub fn mean_purity<K: Field>(modes: usize) -> Result<K> {
    let e2 = twice_weight_exponent(modes);
    Ok(spectral_integral::<K>(modes, e2 + 2)? / spectral_integral::<K>(modes, e2)?)
}

/// Mean of `Σᵢ f(νᵢ)` under `P_N`, as `tr(G⁻¹ G_f)` with
/// `(G_f)_{jk} = ∫ w f (ν² − 1)^{j+k}` evaluated by one-dimensional quadrature.
pub fn mean_additive<T, F>(modes: usize, f: F, cfg: &QuadratureConfig<T>) -> Result<T>
where
    T: Real,
    F: Fn(T) -> T,
{
    cfg.validate()?;
    let e2 = twice_weight_exponent(modes);
    let e = T::lit(e2 as f64 * 0.5);
    let gram = hankel::<f64>(modes, e2)?;
    let mut g = nalgebra::DMatrix::<T>::zeros(modes, modes);
    let mut gf = nalgebra::DMatrix::<T>::zeros(modes, modes);
    let inner_cfg = cfg.relative_only();
    let mut weighted = Vec::with_capacity(2 * modes - 1);
    for p in 0..2 * modes - 1 {
        let est = integrate_half_line(
            |nu: T| {
                let x = nu * nu - T::one();
                f(nu) * nu.powf(-e) * x.powi(p as i32)
            },
            T::one(),
            &inner_cfg,
        )?;
        weighted.push(est.value);
    }
    for j in 0..modes {
        for k in 0..modes {
            g[(j, k)] = T::lit(gram[j][k]);
            gf[(j, k)] = weighted[j + k];
        }
    }
    let lu = g.lu();
    let solved = lu.solve(&gf).ok_or(Error::Singular)?;
    Ok(solved.trace())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use num_bigint::BigInt;
    use num_rational::BigRational;

    fn ratio(n: i64, d: i64) -> BigRational {
        BigRational::new(BigInt::from(n), BigInt::from(d))
    }

    #[test]
    fn exponents() {
        assert_eq!(twice_weight_exponent(1), 5);
        assert_eq!(twice_weight_exponent(2), 16);
        assert_eq!(twice_weight_exponent(3), 31);
    }

    #[test]
    fn first_moment_matches_power_law() {
        // ∫ ν^{-5/2} = 2/3
        assert_eq!(shifted_moment::<BigRational>(5, 0).unwrap(), ratio(2, 3));
        // ∫ ν^{-8} (ν² − 1) = 1/5 − 1/7
        assert_eq!(shifted_moment::<BigRational>(16, 1).unwrap(), ratio(2, 35));
        assert!(shifted_moment::<f64>(5, 1).is_err());
    }

    #[test]
    fn exact_constants_small_n() {
        assert_eq!(normalization_constant::<BigRational>(1).unwrap(), ratio(3, 2));
        assert_eq!(normalization_constant::<BigRational>(2).unwrap(), ratio(525, 8));
        assert_eq!(mean_purity::<BigRational>(1).unwrap(), ratio(3, 5));
        assert_eq!(mean_purity::<BigRational>(2).unwrap(), ratio(175, 384));
    }

    #[test]
    fn float_and_exact_agree() {
        for n in 1..=6 {
            let exact: f64 = num_traits::ToPrimitive::to_f64(&normalization_constant::<BigRational>(n).unwrap()).unwrap();
            assert_relative_eq!(normalization_constant::<f64>(n).unwrap(), exact, max_relative = 1e-11);
        }
    }

    #[test]
    fn determinant_small() {
        let m = vec![vec![2.0, 1.0], vec![4.0, 5.0]];
        assert_relative_eq!(determinant(m), 6.0);
        let singular = vec![vec![1.0, 2.0], vec![2.0, 4.0]];
        assert_eq!(determinant(singular), 0.0);
        let swap = vec![vec![0.0, 1.0], vec![1.0, 0.0]];
        assert_eq!(determinant(swap), -1.0);
    }

    #[test]
    fn additive_mean_of_constant_is_mode_count() {
        let cfg = QuadratureConfig::<f64>::default();
        for n in 1..=4 {
            let m = mean_additive(n, |_| 1.0, &cfg).unwrap();
            assert_relative_eq!(m, n as f64, max_relative = 1e-9);
        }
    }
}
