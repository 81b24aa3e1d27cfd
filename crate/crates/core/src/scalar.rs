//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use nalgebra as na;
use num_traits as nt;

/// Floating-point type the geometry routines are generic over (`f32` or `f64`).
///
/// The associated tolerances are the numerical thresholds used by the
/// validity checks. The `f64` values are the reference ones; `f32` gets
/// thresholds scaled to its precision.
pub trait Real:
    Copy
    + Debug
    + Display
    + Send
    + Sync
    + 'static
    + nt::FloatConst
    + nt::FromPrimitive
    + nt::ToPrimitive
    + na::RealField
{
    /// Relative tolerance for symmetry of covariance matrices.
    const SYMMETRY_TOL: f64;
    /// Slack below one allowed for the smallest symplectic eigenvalue of a physical state.
    const PHYSICAL_TOL: f64;
    /// Absolute tolerance for symmetry of generator blocks and the Hamiltonian condition.
    const GENERATOR_TOL: f64;
    /// Tolerance on `SᵀJS = J` and `det S = 1`.
    const SYMPLECTIC_TOL: f64;
    /// Relative tolerance on the pairing of the doubly degenerate spectrum.
    const PAIRING_TOL: f64;
    /// Magnitude below which negative radicands are treated as rounding noise.
    const RADICAND_TOL: f64;

    /// Smallest positive normal value.
    fn tiny() -> Self;

    /// Converts an `f64` literal into this type.
    #[inline]
    fn lit(x: f64) -> Self {
        <Self as nt::FromPrimitive>::from_f64(x).expect("f64 literal representable")
    }

    #[inline]
    fn from_count(n: usize) -> Self {
        <Self as nt::FromPrimitive>::from_usize(n).expect("count representable")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        <Self as nt::ToPrimitive>::to_f64(&self).unwrap_or(f64::NAN)
    }

    #[inline]
    fn finite(self) -> bool {
        self.to_f64_lossy().is_finite()
    }
}

impl Real for f64 {
    const SYMMETRY_TOL: f64 = 1e-9;
    const PHYSICAL_TOL: f64 = 1e-9;
    const GENERATOR_TOL: f64 = 1e-12;
    const SYMPLECTIC_TOL: f64 = 1e-9;
    const PAIRING_TOL: f64 = 1e-7;
    const RADICAND_TOL: f64 = 1e-12;

    fn tiny() -> Self {
        f64::MIN_POSITIVE
    }
}

impl Real for f32 {
    const SYMMETRY_TOL: f64 = 1e-5;
    const PHYSICAL_TOL: f64 = 1e-4;
    const GENERATOR_TOL: f64 = 1e-5;
    const SYMPLECTIC_TOL: f64 = 1e-4;
    const PAIRING_TOL: f64 = 1e-3;
    const RADICAND_TOL: f64 = 1e-5;

    fn tiny() -> Self {
        f32::MIN_POSITIVE
    }
}
