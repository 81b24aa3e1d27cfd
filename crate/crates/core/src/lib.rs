//! Geometry and random ensembles of mixed Gaussian states.
//!
//! States are zero-mean Gaussian states given by their covariance matrix in
//! block ordering `(x₁ … x_N, p₁ … p_N)`, with the vacuum equal to the
//! identity. The crate provides symplectic spectra, Hilbert-Schmidt and
//! one-mode Bures geometry, the Hilbert-Schmidt spectral distribution with an
//! exact sampler, and ensemble averages.
//!
//! Numerical routines are generic over [`Real`] (`f32` or `f64`); the
//! [`moments`] module also works over exact rationals.
//!
//! ```
//! use gaussian_geometry::{hs_distance, symplectic_spectrum, Covariance};
//!
//! let vacuum = Covariance::identity(1);
//! let thermal = Covariance::williamson(&[3.0]);
//! assert_eq!(symplectic_spectrum(&thermal)?.values(), &[3.0]);
//! assert!((hs_distance(&vacuum, &thermal)? - (1.0f64 / 3.0).sqrt()).abs() < 1e-14);
//! # Ok::<(), gaussian_geometry::Error>(())
//! ```

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod ensemble;
pub mod error;
pub mod io;
pub mod measures;
pub mod metrics;
pub mod moments;
pub mod quadrature;
pub mod sampling;
pub mod scalar;
pub mod symplectic;

pub use ensemble::{
    bures_truncated_mean, figure_data, mc_mean, moment_mean, purity_histogram, quad_mean, EnsembleSummary, Figure,
    FigureParams, HistogramSeries, Method, Observable, Table,
};
pub use error::{Error, Result};
pub use measures::{
    bures_spectral_density_one_mode, hs_normalization_constant, hs_spectral_density, hs_sqrt_det_g, purity_density,
    DensityEvaluation,
};
pub use metrics::{
    bures_distance_one_mode, fidelity_one_mode, hs_distance, hs_line_element, hs_line_element_diagonal, hs_overlap,
    purity, von_neumann_entropy, DiagonalLineElementInput, LineElementInput,
};
pub use quadrature::QuadratureConfig;
pub use sampling::{sample_batch, sample_covariance, sample_spectrum, sample_spectrum_one_mode, SampleBatch, SamplerConfig};
pub use scalar::Real;
pub use symplectic::{
    assemble_generator, conjugate, symplectic_exp, symplectic_form, symplectic_spectrum, validate_covariance,
    CovarianceMatrix, HamiltonianGenerator, SymplecticForm, SymplecticSpectrum, ValidityReport,
};

/// Double-precision covariance matrix.
pub type Covariance = CovarianceMatrix<f64>;
/// Double-precision symplectic spectrum.
pub type Spectrum = SymplecticSpectrum<f64>;
/// Double-precision Hamiltonian generator.
pub type Generator = HamiltonianGenerator<f64>;
/// Single-precision covariance matrix.
pub type Covariance32 = CovarianceMatrix<f32>;
/// Single-precision symplectic spectrum.
pub type Spectrum32 = SymplecticSpectrum<f32>;
/// Arbitrary-precision rational used by the exact moment routines.
pub type ExactRational = num_rational::BigRational;
