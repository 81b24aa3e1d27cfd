//! Unitarily invariant observables, Hilbert-Schmidt geometry and the
//! one-mode fidelity and Bures distance.

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::symplectic::{CovarianceMatrix, HamiltonianGenerator, SymplecticSpectrum};

/// Purity `tr ρ² = 1 / ∏ νᵢ`.
pub fn purity<T: Real>(spectrum: &SymplecticSpectrum<T>) -> T {
    T::one() / spectrum.product()
}

/// One-mode contribution to the von Neumann entropy, in nats.
///
/// Returns zero for `ν − 1 < 1e-12`, the analytic limit at the pure state.
pub fn entropy_term<T: Real>(nu: T) -> T {
    let one = T::one();
    if nu - one < T::lit(1e-12) {
        return T::zero();
    }
    let half = T::lit(0.5);
    let plus = (nu + one) * half;
    let minus = (nu - one) * half;
    plus * plus.ln() - minus * minus.ln()
}

/// Von Neumann entropy `Σᵢ g(νᵢ)` in nats.
pub fn von_neumann_entropy<T: Real>(spectrum: &SymplecticSpectrum<T>) -> Result<T> {
    spectrum.check_physical()?;
    Ok(spectrum
        .values()
        .iter()
        .fold(T::zero(), |acc, &nu| acc + entropy_term(nu)))
}

fn same_modes<T: Real>(a: &CovarianceMatrix<T>, b: &CovarianceMatrix<T>) -> Result<()> {
    if a.modes() != b.modes() {
        return Err(Error::DimensionMismatch {
            expected: a.dim(),
            found: b.dim(),
        });
    }
    Ok(())
}

fn inverse_sqrt_det<T: Real>(m: &DMatrix<T>) -> Result<T> {
    let det = m.clone().determinant();
    if !(det > T::zero()) {
        return Err(Error::Domain(format!(
            "covariance determinant {} is not positive",
            det.to_f64_lossy()
        )));
    }
    Ok(T::one() / det.sqrt())
}

/// Overlap `tr(ρ_Σ ρ_Σ') = 1 / √det((Σ + Σ')/2)`.
pub fn hs_overlap<T: Real>(a: &CovarianceMatrix<T>, b: &CovarianceMatrix<T>) -> Result<T> {
    same_modes(a, b)?;
    let mean = (a.matrix() + b.matrix()) * T::lit(0.5);
    inverse_sqrt_det(&mean)
}

/// Hilbert-Schmidt distance `√(μ_Σ + μ_Σ' − 2 tr(ρ_Σ ρ_Σ'))`.
///
/// Radicands that are negative by at most the rounding tolerance are
/// clamped to zero.
pub fn hs_distance<T: Real>(a: &CovarianceMatrix<T>, b: &CovarianceMatrix<T>) -> Result<T> {
    let squared = hs_distance_squared(a, b)?;
    Ok(squared.sqrt())
}

fn base_first<T: Real>(a: &CovarianceMatrix<T>, b: &CovarianceMatrix<T>) -> bool {
    for (x, y) in a.matrix().iter().zip(b.matrix().iter()) {
        if x != y {
            return x < y;
        }
    }
    true
}

/// Square of [`hs_distance`].
///
/// With `λᵢ` the eigenvalues of `Σ⁻¹Σ'`, `xᵢ = ln λᵢ` and `s = Σ xᵢ`,
/// `d² = μ_Σ [expm1(−s/4)² − 2 e^{−s/4} expm1(−½ Σ ln cosh(xᵢ/2))]`,
/// which equals `μ_Σ + μ_Σ' − 2 tr(ρ_Σ ρ_Σ')` without its cancellation for
/// nearby states.
pub fn hs_distance_squared<T: Real>(a: &CovarianceMatrix<T>, b: &CovarianceMatrix<T>) -> Result<T> {
    same_modes(a, b)?;
    // evaluate from a fixed member of the pair so the result is exactly symmetric
    let (a, b) = if base_first(a, b) { (a, b) } else { (b, a) };
    let mu_a = inverse_sqrt_det(a.matrix())?;
    let chol = a
        .matrix()
        .clone()
        .cholesky()
        .ok_or_else(|| Error::Domain("covariance is not positive definite".into()))?;
    let l_inv = chol
        .l()
        .solve_lower_triangular(&DMatrix::identity(a.dim(), a.dim()))
        .ok_or(Error::Singular)?;
    let k = &l_inv * (b.matrix() - a.matrix()) * l_inv.transpose();
    let k = (&k + k.transpose()) * T::lit(0.5);
    let (half, quarter) = (T::lit(0.5), T::lit(0.25));
    let mut log_sum = T::zero();
    let mut log_cosh = T::zero();
    for delta in k.symmetric_eigenvalues().iter().copied() {
        if !(delta > -T::one()) {
            return Err(Error::Domain("covariance is not positive definite".into()));
        }
        let x = delta.ln_1p();
        log_sum += x;
        let sh = (x * quarter).sinh();
        log_cosh += (T::lit(2.0) * sh * sh).ln_1p();
    }
    let shift = (-log_sum * quarter).exp_m1();
    let radicand = mu_a * (shift * shift - T::lit(2.0) * (-log_sum * quarter).exp() * (-log_cosh * half).exp_m1());
    if radicand < T::zero() {
        if -radicand > T::lit(T::RADICAND_TOL) {
            return Err(Error::NegativeRadicand(radicand.to_f64_lossy()));
        }
        return Ok(T::zero());
    }
    Ok(radicand)
}

/// A covariance matrix together with a symmetric displacement `dΣ`.
#[derive(Debug, Clone, PartialEq)]
pub struct LineElementInput<T: Real> {
    pub sigma: CovarianceMatrix<T>,
    pub d_sigma: DMatrix<T>,
}

/// Infinitesimal Hilbert-Schmidt distance
/// `ds² = [(tr Σ⁻¹dΣ)² + 2 tr (Σ⁻¹dΣ)²] / (16 √det Σ)`.
pub fn hs_line_element<T: Real>(input: &LineElementInput<T>) -> Result<T> {
    let sigma = input.sigma.matrix();
    let d = &input.d_sigma;
    if d.shape() != sigma.shape() {
        return Err(Error::DimensionMismatch {
            expected: sigma.nrows(),
            found: d.nrows().max(d.ncols()),
        });
    }
    let scale = d.iter().fold(T::one(), |acc, x| acc.max(x.abs()));
    let asym = (d - d.transpose()).iter().fold(T::zero(), |acc, x| acc.max(x.abs()));
    if asym > T::lit(T::SYMMETRY_TOL) * scale {
        return Err(Error::NotSymmetric(asym.to_f64_lossy()));
    }
    let inv = sigma.clone().try_inverse().ok_or(Error::Singular)?;
    let m = inv * d;
    let tr = m.trace();
    let tr_sq = (&m * &m).trace();
    let prefactor = inverse_sqrt_det(sigma)? / T::lit(16.0);
    Ok(prefactor * (tr * tr + T::lit(2.0) * tr_sq))
}

/// A displacement in Williamson coordinates: shifts of the symplectic
/// eigenvalues plus an infinitesimal canonical generator.
#[derive(Debug, Clone, PartialEq)]
pub struct DiagonalLineElementInput<T: Real> {
    pub spectrum: SymplecticSpectrum<T>,
    pub d_nu: Vec<T>,
    pub d_x: HamiltonianGenerator<T>,
}

/// Line element at `Σ = D` for `dΣ = dD + dXᵀD + D dX`:
///
/// ```text
/// ds² = [(tr D⁻¹dD)² + 2 tr(D⁻¹dD)² + 4 tr(dX²) + 4 tr(dX D⁻¹ dXᵀ D)] / (16 √det D)
/// ```
///
/// Mixed `dD dX` terms vanish, so the result splits into an eigenvalue part
/// and a generator part.
pub fn hs_line_element_diagonal<T: Real>(input: &DiagonalLineElementInput<T>) -> Result<T> {
    let n = input.spectrum.modes();
    if input.d_nu.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: input.d_nu.len(),
        });
    }
    if input.d_x.modes() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: input.d_x.modes(),
        });
    }
    let c = input.d_x.c();
    if !input.d_x.is_canonical() || (0..n).any(|i| c[(i, i)] != T::zero()) {
        return Err(Error::NonCanonicalGenerator);
    }
    let nu = input.spectrum.values();
    let prefactor = T::one() / (T::lit(16.0) * input.spectrum.product());

    // eigenvalue block: D⁻¹dD = diag(dν/ν, dν/ν)
    let (mut tr, mut tr_sq) = (T::zero(), T::zero());
    for (&v, &dv) in nu.iter().zip(&input.d_nu) {
        let r = dv / v;
        tr += T::lit(2.0) * r;
        tr_sq += T::lit(2.0) * r * r;
    }
    let eigen_part = tr * tr + T::lit(2.0) * tr_sq;

    let dx = input.d_x.matrix();
    let d_diag: Vec<T> = nu.iter().chain(nu.iter()).copied().collect();
    let mut cross = T::zero();
    // tr(dX D⁻¹ dXᵀ D) = Σ_ij dX_ij² d_i / d_j
    for i in 0..2 * n {
        for j in 0..2 * n {
            let x = dx[(i, j)];
            cross += x * x * d_diag[i] / d_diag[j];
        }
    }
    let generator_part = T::lit(4.0) * (&dx * &dx).trace() + T::lit(4.0) * cross;

    Ok(prefactor * (eigen_part + generator_part))
}

fn require_one_mode<T: Real>(operation: &'static str, sigma: &CovarianceMatrix<T>) -> Result<()> {
    if sigma.modes() != 1 {
        return Err(Error::UnsupportedModes {
            operation,
            supported: "1",
            modes: sigma.modes(),
        });
    }
    Ok(())
}

/// Uhlmann fidelity of two one-mode states,
/// `F = 2 / (√(det(Σ+Σ') + P) − √P)` with `P = (det Σ − 1)(det Σ' − 1)`.
///
/// Evaluated in the cancellation-free form `2 (√(det(Σ+Σ') + P) + √P) / det(Σ+Σ')`.
/// Multi-mode states are rejected.
pub fn fidelity_one_mode<T: Real>(a: &CovarianceMatrix<T>, b: &CovarianceMatrix<T>) -> Result<T> {
    require_one_mode("fidelity", a)?;
    require_one_mode("fidelity", b)?;
    let det_a = a.determinant();
    let det_b = b.determinant();
    let floor = T::one() - T::lit(T::PHYSICAL_TOL);
    for det in [det_a, det_b] {
        if det < floor * floor {
            return Err(Error::Unphysical(det.max(T::zero()).sqrt().to_f64_lossy()));
        }
    }
    let p = ((det_a - T::one()) * (det_b - T::one())).max(T::zero());
    let det_sum = (a.matrix() + b.matrix()).determinant();
    let root_p = p.sqrt();
    let f = T::lit(2.0) * ((det_sum + p).sqrt() + root_p) / det_sum;
    Ok(f.min(T::one()))
}

/// Bures distance `√(2 (1 − √F))` of two one-mode states.
pub fn bures_distance_one_mode<T: Real>(a: &CovarianceMatrix<T>, b: &CovarianceMatrix<T>) -> Result<T> {
    let f = fidelity_one_mode(a, b)?;
    Ok((T::lit(2.0) * (T::one() - f.sqrt())).max(T::zero()).sqrt())
}
