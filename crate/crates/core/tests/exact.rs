//! Brute-force rational oracle for the spectral integrals: the squared
//! Vandermonde in `xᵢ = νᵢ²` is expanded into monomials and each monomial is
//! integrated in closed form.

use std::collections::HashMap;

use gaussian_geometry::moments::{mean_purity, normalization_constant, twice_weight_exponent};
use gaussian_geometry::ExactRational;
use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

type Poly = HashMap<Vec<u32>, BigInt>;

fn multiply(p: &Poly, q: &Poly) -> Poly {
    let mut out = Poly::new();
    for (a, ca) in p {
        for (b, cb) in q {
            let key: Vec<u32> = a.iter().zip(b).map(|(x, y)| x + y).collect();
            *out.entry(key).or_insert_with(BigInt::zero) += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn squared_vandermonde(n: usize) -> Poly {
    let mut p = Poly::from([(vec![0; n], BigInt::one())]);
    for l in 0..n {
        for m in 0..l {
            let mut factor = Poly::new();
            let mut xl = vec![0; n];
            xl[l] = 1;
            let mut xm = vec![0; n];
            xm[m] = 1;
            factor.insert(xl, BigInt::one());
            factor.insert(xm, -BigInt::one());
            let square = multiply(&factor, &factor);
            p = multiply(&p, &square);
        }
    }
    p
}

/// `∫_{[1,∞)^N} (∏ν)^{-e} V(ν²)² dν` with `e = twice_exponent / 2`.
fn brute_force_integral(n: usize, twice_exponent: i64) -> ExactRational {
    let mut total = ExactRational::zero();
    for (powers, coeff) in squared_vandermonde(n) {
        // ∫₁^∞ ν^{2k − e} dν = 2 / (2e − 4k − 2)
        let mut term = ExactRational::from_integer(coeff);
        for k in powers {
            let denom = twice_exponent - 4 * k as i64 - 2;
            assert!(denom > 0);
            term *= ExactRational::new(BigInt::from(2), BigInt::from(denom));
        }
        total += term;
    }
    total
}

#[test]
fn normalization_constants_match_monomial_expansion() {
    for n in 1..=5 {
        let e2 = twice_weight_exponent(n);
        let expected = brute_force_integral(n, e2).recip();
        assert_eq!(normalization_constant::<ExactRational>(n).unwrap(), expected, "N = {n}");
    }
}

#[test]
fn mean_purity_matches_monomial_expansion() {
    for n in 1..=5 {
        let e2 = twice_weight_exponent(n);
        let expected = brute_force_integral(n, e2 + 2) / brute_force_integral(n, e2);
        assert_eq!(mean_purity::<ExactRational>(n).unwrap(), expected, "N = {n}");
    }
}

#[test]
fn known_small_values() {
    let r = |a: i64, b: i64| ExactRational::new(BigInt::from(a), BigInt::from(b));
    assert_eq!(normalization_constant::<ExactRational>(1).unwrap(), r(3, 2));
    assert_eq!(normalization_constant::<ExactRational>(2).unwrap(), r(525, 8));
    assert_eq!(
        normalization_constant::<ExactRational>(3).unwrap(),
        r(210_211_194_375, 262_144)
    );
    assert_eq!(normalization_constant::<ExactRational>(4).unwrap(), r(6_638_962_176_000, 1));
    assert_eq!(mean_purity::<ExactRational>(1).unwrap(), r(3, 5));
    assert_eq!(mean_purity::<ExactRational>(2).unwrap(), r(175, 384));
}

#[test]
fn floating_point_route_agrees_with_exact() {
    for n in 1..=6 {
        let exact = normalization_constant::<ExactRational>(n).unwrap().to_f64().unwrap();
        let float = normalization_constant::<f64>(n).unwrap();
        assert!((float / exact - 1.0).abs() < 1e-11, "N = {n}: {float} vs {exact}");
    }
}
