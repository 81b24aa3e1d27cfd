mod common;

use approx::assert_relative_eq;
use gaussian_geometry::sampling::{random_generator, sample_rng};
use gaussian_geometry::symplectic::symplectic_residual;
use gaussian_geometry::{
    conjugate, symplectic_exp, symplectic_spectrum, validate_covariance, Covariance, Covariance32, Generator,
};
use nalgebra::DMatrix;
use proptest::prelude::*;

fn spectrum_strategy() -> impl Strategy<Value = Vec<f64>> {
    (1usize..=4).prop_flat_map(|n| proptest::collection::vec(1.0f64..20.0, n))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn spectrum_survives_congruence(nu in spectrum_strategy(), seed in any::<u64>(), scale in 0.05f64..0.8) {
        let modes = nu.len();
        let mut rng = sample_rng(seed, 0);
        let s = symplectic_exp(&random_generator(modes, scale, &mut rng).unwrap()).unwrap();
        prop_assert!(symplectic_residual(&s).unwrap() < 1e-10);
        prop_assert!((s.determinant() - 1.0).abs() < 1e-8 * s.amax().powi(2 * modes as i32));
        let sigma = conjugate(&Covariance::williamson(&nu), &s).unwrap();
        let recovered = symplectic_spectrum(&sigma).unwrap();
        let mut sorted = nu.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (x, y) in recovered.values().iter().zip(&sorted) {
            prop_assert!((x / y - 1.0).abs() < 1e-9, "{x} vs {y}");
        }
    }

    #[test]
    fn canonical_coordinates_round_trip(modes in 1usize..=4, seed in any::<u64>()) {
        let mut rng = sample_rng(seed, 1);
        let x = random_generator(modes, 1.0, &mut rng).unwrap();
        let back = Generator::from_canonical_coordinates(modes, &x.canonical_coordinates()).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn two_mode_thermal_squeezed_construction() {
    // D = diag(2,5,2,5) in interleaved order is diag(2,2,5,5) in block order.
    let d = Covariance::williamson(&[2.0, 5.0]);
    assert_eq!(d.to_row_major()[0], 2.0);
    assert_eq!(d.to_row_major()[3 * 4 + 3], 5.0);
    let mut rng = sample_rng(11, 0);
    for _ in 0..20 {
        let s = symplectic_exp(&random_generator(2, 0.6, &mut rng).unwrap()).unwrap();
        let sigma = conjugate(&d, &s).unwrap();
        let spec = symplectic_spectrum(&sigma).unwrap();
        assert_relative_eq!(spec.values()[0], 2.0, max_relative = 1e-10);
        assert_relative_eq!(spec.values()[1], 5.0, max_relative = 1e-10);
        assert_relative_eq!(sigma.determinant(), 100.0, max_relative = 1e-9);
    }
}

#[test]
fn vacuum_is_physical_up_to_eight_modes() {
    for modes in 1..=8 {
        let report = validate_covariance(&DMatrix::<f64>::identity(2 * modes, 2 * modes)).unwrap();
        assert!(report.physical && report.symmetric);
        assert_eq!(report.min_nu, 1.0);
    }
}

#[test]
fn squeezing_preserves_pure_spectrum() {
    let mut rng = sample_rng(5, 0);
    for modes in 1..=3 {
        let s = symplectic_exp(&random_generator(modes, 1.0, &mut rng).unwrap()).unwrap();
        let pure = conjugate(&Covariance::identity(modes), &s).unwrap();
        let spec = symplectic_spectrum(&pure).unwrap();
        assert!(spec.values().iter().all(|&nu| (nu - 1.0).abs() < 1e-9));
        assert!(validate_covariance(pure.matrix()).unwrap().physical);
    }
}

#[test]
fn single_precision_spectrum() {
    let sigma = Covariance32::from_row_major(1, &[2.0, 0.5, 0.5, 3.0]).unwrap();
    let spec = symplectic_spectrum(&sigma).unwrap();
    assert!((spec.values()[0] - 5.75f32.sqrt()).abs() < 1e-5);
    let thermal = Covariance32::williamson(&[1.5, 4.0]);
    assert_eq!(symplectic_spectrum(&thermal).unwrap().values(), &[1.5, 4.0]);
}

#[test]
fn unphysical_matrices_are_reported() {
    let mut rng = sample_rng(3, 0);
    let m = common::random_symmetric(4, &mut rng);
    let m = &m * m.transpose() * 0.01 + DMatrix::identity(4, 4) * 0.2;
    let report = validate_covariance(&m).unwrap();
    assert!(!report.physical);
    assert!(report.min_nu < 1.0);
}
