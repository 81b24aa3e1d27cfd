//! Covariance matrices, symplectic spectra and symplectic transforms.
//!
//! # Basis convention
//!
//! Phase-space vectors are ordered in **block** form: all `x` quadratures
//! first, then all `p` quadratures, `(x₁, …, x_N, p₁, …, p_N)`. The symplectic
//! form is therefore
//!
//! ```text
//! J = [[ 0, 1],
//!      [-1, 0]]      (N x N identity blocks)
//! ```
//!
//! Much of the literature uses the mode-interleaved ordering
//! `(x₁, p₁, x₂, p₂, …)`; [`interleaved_to_block`] converts such input.
//!
//! The vacuum has the identity covariance matrix, so symplectic eigenvalues of
//! physical states satisfy `ν ≥ 1` (no `ħ/2` factor).

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::scalar::Real;

/// The symplectic form `J` for `N` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm<T: Real> {
    modes: usize,
    matrix: DMatrix<T>,
}

impl<T: Real> SymplecticForm<T> {
    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.matrix
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.matrix
    }
}

/// Builds `J = [[0, 1], [-1, 0]]` with `N x N` identity blocks.
///
/// Panics if `modes == 0`.
pub fn symplectic_form<T: Real>(modes: usize) -> SymplecticForm<T> {
    assert!(modes >= 1, "symplectic form needs at least one mode");
    let dim = 2 * modes;
    let mut matrix = DMatrix::zeros(dim, dim);
    for i in 0..modes {
        matrix[(i, modes + i)] = T::one();
        matrix[(modes + i, i)] = -T::one();
    }
    SymplecticForm { modes, matrix }
}

/// Real symmetric `2N x 2N` covariance matrix of a zero-mean Gaussian state.
///
/// Construction checks shape, finiteness and symmetry; it does *not* check
/// physicality, see [`validate_covariance`].
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceMatrix<T: Real> {
    modes: usize,
    entries: DMatrix<T>,
}

impl<T: Real> CovarianceMatrix<T> {
    /// Wraps a block-ordered matrix. Entries are symmetrized after the
    /// symmetry check so downstream code sees an exactly symmetric matrix.
    pub fn new(entries: DMatrix<T>) -> Result<Self> {
        let modes = check_shape(&entries)?;
        let asym = relative_asymmetry(&entries);
        if asym > T::SYMMETRY_TOL {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self {
            modes,
            entries: symmetrized(&entries),
        })
    }

    /// Builds a covariance matrix from `4N²` row-major entries.
    pub fn from_row_major(modes: usize, entries: &[T]) -> Result<Self> {
        let dim = 2 * modes;
        if modes == 0 || entries.len() != dim * dim {
            return Err(Error::DimensionMismatch {
                expected: dim * dim,
                found: entries.len(),
            });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Builds a covariance matrix from a mode-interleaved `(x₁, p₁, x₂, p₂, …)` matrix.
    pub fn from_interleaved(entries: DMatrix<T>) -> Result<Self> {
        check_shape(&entries)?;
        Self::new(interleaved_to_block(&entries))
    }

    /// The vacuum state.
    pub fn identity(modes: usize) -> Self {
        assert!(modes >= 1, "covariance matrix needs at least one mode");
        Self {
            modes,
            entries: DMatrix::identity(2 * modes, 2 * modes),
        }
    }

    /// The Williamson diagonal form `D = diag(ν₁…ν_N, ν₁…ν_N)`.
    pub fn from_spectrum(spectrum: &SymplecticSpectrum<T>) -> Self {
        Self::williamson(spectrum.values())
    }

    /// `diag(ν, ν)` with the values in the given order (not sorted).
    pub fn williamson(nu: &[T]) -> Self {
        let modes = nu.len();
        assert!(modes >= 1, "covariance matrix needs at least one mode");
        let mut entries = DMatrix::zeros(2 * modes, 2 * modes);
        for (i, &v) in nu.iter().enumerate() {
            entries[(i, i)] = v;
            entries[(modes + i, modes + i)] = v;
        }
        Self { modes, entries }
    }

    pub fn modes(&self) -> usize {
        self.modes
    }

    pub fn dim(&self) -> usize {
        2 * self.modes
    }

    pub fn matrix(&self) -> &DMatrix<T> {
        &self.entries
    }

    pub fn into_matrix(self) -> DMatrix<T> {
        self.entries
    }

    pub fn determinant(&self) -> T {
        self.entries.clone().determinant()
    }

    /// Row-major entries in block ordering.
    pub fn to_row_major(&self) -> Vec<T> {
        self.entries.transpose().iter().copied().collect()
    }
}

fn check_shape<T: Real>(m: &DMatrix<T>) -> Result<usize> {
    let (rows, cols) = m.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 || rows % 2 != 0 {
        return Err(Error::OddDimension(rows));
    }
    if m.iter().any(|x| !x.finite()) {
        return Err(Error::NonFinite);
    }
    Ok(rows / 2)
}

fn max_abs<T: Real>(m: &DMatrix<T>) -> T {
    m.iter().fold(T::zero(), |acc, x| acc.max(x.abs()))
}

fn relative_asymmetry<T: Real>(m: &DMatrix<T>) -> f64 {
    let scale = max_abs(m).max(T::tiny());
    let asym = max_abs(&(m - m.transpose()));
    (asym / scale).to_f64_lossy()
}

fn symmetrized<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    (m + m.transpose()) * T::lit(0.5)
}

/// Permutes a mode-interleaved `(x₁, p₁, …)` matrix into block `(x…, p…)` order.
pub fn interleaved_to_block<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    let dim = m.nrows();
    let modes = dim / 2;
    // block index -> interleaved index
    let source = |k: usize| if k < modes { 2 * k } else { 2 * (k - modes) + 1 };
    DMatrix::from_fn(dim, dim, |i, j| m[(source(i), source(j))])
}

/// Inverse of [`interleaved_to_block`].
pub fn block_to_interleaved<T: Real>(m: &DMatrix<T>) -> DMatrix<T> {
    let dim = m.nrows();
    let modes = dim / 2;
    let source = |k: usize| if k % 2 == 0 { k / 2 } else { modes + k / 2 };
    DMatrix::from_fn(dim, dim, |i, j| m[(source(i), source(j))])
}

/// Symplectic eigenvalues `ν₁ ≤ … ≤ ν_N`.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticSpectrum<T: Real> {
    values: Vec<T>,
}

impl<T: Real> SymplecticSpectrum<T> {
    /// Sorts the values ascending. Panics on an empty or non-finite input.
    pub fn new(mut values: Vec<T>) -> Self {
        assert!(!values.is_empty(), "spectrum needs at least one mode");
        assert!(values.iter().all(|v| v.finite()), "spectrum must be finite");
        values.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
        Self { values }
    }

    /// The vacuum spectrum `(1, …, 1)`.
    pub fn pure(modes: usize) -> Self {
        Self::new(vec![T::one(); modes])
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn into_values(self) -> Vec<T> {
        self.values
    }

    pub fn modes(&self) -> usize {
        self.values.len()
    }

    pub fn min(&self) -> T {
        self.values[0]
    }

    pub fn max(&self) -> T {
        self.values[self.values.len() - 1]
    }

    /// `∏ νᵢ = √det Σ`.
    pub fn product(&self) -> T {
        self.values.iter().fold(T::one(), |acc, &v| acc * v)
    }

    pub fn is_physical(&self) -> bool {
        self.min() >= T::one() - T::lit(T::PHYSICAL_TOL)
    }

    pub(crate) fn check_physical(&self) -> Result<()> {
        if self.is_physical() {
            Ok(())
        } else {
            Err(Error::Unphysical(self.min().to_f64_lossy()))
        }
    }
}

/// Outcome of [`validate_covariance`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport<T> {
    pub physical: bool,
    pub symmetric: bool,
    pub min_nu: T,
}

/// Symplectic eigenvalues of a covariance matrix.
///
/// The values are the square roots of the eigenvalues of `-(JΣ)²`, each of
/// which appears twice. For positive definite `Σ = LLᵀ` the eigenproblem is
/// solved on the similar antisymmetric matrix `LᵀJL`, whose singular values
/// are exactly those square roots; otherwise the real Schur form of `-(JΣ)²`
/// is used and its imaginary residue checked. Values within the physicality
/// tolerance below one are clamped to one.
pub fn symplectic_spectrum<T: Real>(sigma: &CovarianceMatrix<T>) -> Result<SymplecticSpectrum<T>> {
    if let Some(values) = williamson_diagonal(sigma) {
        return Ok(SymplecticSpectrum::new(values));
    }
    let raw = match sigma.matrix().clone().cholesky() {
        Some(chol) => spectrum_via_cholesky(sigma.modes(), chol.l())?,
        None => spectrum_via_schur(sigma.modes(), sigma.matrix())?,
    };
    let one = T::one();
    let slack = T::lit(T::PHYSICAL_TOL);
    let values = raw
        .into_iter()
        .map(|v| if v < one && v >= one - slack { one } else { v })
        .collect();
    Ok(SymplecticSpectrum::new(values))
}

/// Reads the spectrum off a matrix already in Williamson form `diag(𝒩, 𝒩)`.
fn williamson_diagonal<T: Real>(sigma: &CovarianceMatrix<T>) -> Option<Vec<T>> {
    let m = sigma.matrix();
    let n = sigma.modes();
    for i in 0..2 * n {
        for j in 0..2 * n {
            if i != j && m[(i, j)] != T::zero() {
                return None;
            }
        }
    }
    let values: Vec<T> = (0..n).map(|i| m[(i, i)]).collect();
    let paired = (0..n).all(|i| m[(i + n, i + n)] == values[i] && values[i] > T::zero());
    paired.then_some(values)
}

fn spectrum_via_cholesky<T: Real>(modes: usize, l: DMatrix<T>) -> Result<Vec<T>> {
    let j = symplectic_form::<T>(modes).into_matrix();
    let k = l.transpose() * j * l;
    let svd = k.try_svd(false, false, T::default_epsilon(), 0);
    let mut singular: Vec<T> = svd
        .ok_or(Error::EigenSolve("singular value decomposition did not converge"))?
        .singular_values
        .iter()
        .copied()
        .collect();
    singular.sort_by(|a, b| b.partial_cmp(a).expect("finite singular values"));
    pair_up(&singular)
}

fn spectrum_via_schur<T: Real>(modes: usize, sigma: &DMatrix<T>) -> Result<Vec<T>> {
    let j = symplectic_form::<T>(modes).into_matrix();
    let js = j * sigma;
    let m = -(&js * &js);
    let eig = nalgebra::Schur::try_new(m, T::default_epsilon(), 0)
        .ok_or(Error::EigenSolve("Schur decomposition did not converge"))?
        .complex_eigenvalues();
    let scale = eig.iter().fold(T::one(), |acc, z| acc.max(z.re.abs()));
    let tol = T::lit(1e-8) * scale;
    let mut squares = Vec::with_capacity(eig.len());
    for z in eig.iter() {
        if z.im.abs() > tol {
            return Err(Error::EigenSolve("complex eigenvalues of -(JΣ)²"));
        }
        squares.push(z.re);
    }
    squares.sort_by(|a, b| b.partial_cmp(a).expect("finite eigenvalues"));
    let roots: Vec<T> = squares.iter().map(|&s| s.max(T::zero()).sqrt()).collect();
    pair_up(&roots)
}

/// Collapses a descending list of doubly degenerate values into one value per pair.
fn pair_up<T: Real>(sorted_desc: &[T]) -> Result<Vec<T>> {
    let tol = T::lit(T::PAIRING_TOL);
    let mut worst = T::zero();
    let values = sorted_desc
        .chunks_exact(2)
        .map(|pair| {
            let mismatch = (pair[0] - pair[1]).abs() / pair[0].abs().max(T::one());
            worst = worst.max(mismatch);
            (pair[0] + pair[1]) * T::lit(0.5)
        })
        .collect();
    if worst > tol {
        return Err(Error::PairingViolation(worst.to_f64_lossy()));
    }
    Ok(values)
}

/// Checks physicality `Σ + iJ ≥ 0`, i.e. symmetric with `min ν ≥ 1 − tol`.
///
/// Non-symmetric input is reported as unphysical; its `min_nu` is computed
/// from the symmetric part. When `Σ` is indefinite and has no real
/// symplectic spectrum, `min_nu` is reported as zero.
pub fn validate_covariance<T: Real>(matrix: &DMatrix<T>) -> Result<ValidityReport<T>> {
    check_shape(matrix)?;
    let symmetric = relative_asymmetry(matrix) <= T::SYMMETRY_TOL;
    let sigma = CovarianceMatrix {
        modes: matrix.nrows() / 2,
        entries: symmetrized(matrix),
    };
    let min_nu = match symplectic_spectrum(&sigma) {
        Ok(spectrum) => spectrum.min(),
        Err(Error::EigenSolve(_)) => T::zero(),
        Err(e) => return Err(e),
    };
    let positive_definite = sigma.entries.clone().cholesky().is_some();
    let physical = symmetric && positive_definite && min_nu >= T::one() - T::lit(T::PHYSICAL_TOL);
    Ok(ValidityReport {
        physical,
        symmetric,
        min_nu,
    })
}

/// Generator `X = [[A, B], [C, -Aᵀ]]` of a symplectic transformation.
///
/// `B` and `C` are symmetric, so `(JX)ᵀ = JX`. In the canonical gauge the
/// diagonal of `C` is zero, which removes the `SO(2)^N` freedom of rotating
/// each mode of a Williamson form into itself.
#[derive(Debug, Clone, PartialEq)]
pub struct HamiltonianGenerator<T: Real> {
    a: DMatrix<T>,
    b: DMatrix<T>,
    c: DMatrix<T>,
    canonical: bool,
    gauge_zeroed: bool,
}

/// Builds a generator from its blocks.
///
/// With `canonical = true` a non-zero diagonal of `c` is zeroed and
/// [`HamiltonianGenerator::gauge_zeroed`] reports that this happened.
pub fn assemble_generator<T: Real>(
    a: DMatrix<T>,
    b: DMatrix<T>,
    c: DMatrix<T>,
    canonical: bool,
) -> Result<HamiltonianGenerator<T>> {
    let n = a.nrows();
    for m in [&a, &b, &c] {
        if m.nrows() != n || m.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: m.nrows().max(m.ncols()),
            });
        }
        if m.iter().any(|x| !x.finite()) {
            return Err(Error::NonFinite);
        }
    }
    if n == 0 {
        return Err(Error::Domain("generator needs at least one mode".into()));
    }
    let tol = T::lit(T::GENERATOR_TOL);
    for (name, m) in [("B", &b), ("C", &c)] {
        let asym = max_abs(&(m - m.transpose()));
        if asym > tol * max_abs(m).max(T::one()) {
            return Err(Error::AsymmetricBlock {
                block: name,
                asymmetry: asym.to_f64_lossy(),
            });
        }
    }
    let mut c = symmetrized(&c);
    let b = symmetrized(&b);
    let mut gauge_zeroed = false;
    if canonical {
        for i in 0..n {
            if c[(i, i)] != T::zero() {
                c[(i, i)] = T::zero();
                gauge_zeroed = true;
            }
        }
    }
    let generator = HamiltonianGenerator {
        a,
        b,
        c,
        canonical,
        gauge_zeroed,
    };
    let residual = generator.hamiltonian_residual();
    if residual > tol * max_abs(&generator.matrix()).max(T::one()) {
        return Err(Error::NotHamiltonian(residual.to_f64_lossy()));
    }
    Ok(generator)
}

impl<T: Real> HamiltonianGenerator<T> {
    pub fn zero(modes: usize, canonical: bool) -> Self {
        Self {
            a: DMatrix::zeros(modes, modes),
            b: DMatrix::zeros(modes, modes),
            c: DMatrix::zeros(modes, modes),
            canonical,
            gauge_zeroed: false,
        }
    }

    /// Number of free coordinates in the canonical gauge: `2N²`.
    pub fn canonical_dimension(modes: usize) -> usize {
        2 * modes * modes
    }

    /// Builds a canonical generator from its `2N²` coordinates, ordered as all
    /// `a_lm` (row-major), then `b_rs` for `r ≥ s`, then `c_qp` for `q > p`.
    pub fn from_canonical_coordinates(modes: usize, coords: &[T]) -> Result<Self> {
        let expected = Self::canonical_dimension(modes);
        if coords.len() != expected {
            return Err(Error::DimensionMismatch {
                expected,
                found: coords.len(),
            });
        }
        let a = DMatrix::from_row_slice(modes, modes, &coords[..modes * modes]);
        let mut it = coords[modes * modes..].iter().copied();
        let mut next = || it.next().expect("length checked");
        let mut b = DMatrix::zeros(modes, modes);
        for r in 0..modes {
            for s in 0..=r {
                let v = next();
                b[(r, s)] = v;
                b[(s, r)] = v;
            }
        }
        let mut c = DMatrix::zeros(modes, modes);
        for q in 0..modes {
            for p in 0..q {
                let v = next();
                c[(q, p)] = v;
                c[(p, q)] = v;
            }
        }
        Ok(Self {
            a,
            b,
            c,
            canonical: true,
            gauge_zeroed: false,
        })
    }

    /// Inverse of [`Self::from_canonical_coordinates`]; the diagonal of `C` is dropped.
    pub fn canonical_coordinates(&self) -> Vec<T> {
        let n = self.modes();
        let mut out = Vec::with_capacity(Self::canonical_dimension(n));
        for l in 0..n {
            for m in 0..n {
                out.push(self.a[(l, m)]);
            }
        }
        for r in 0..n {
            for s in 0..=r {
                out.push(self.b[(r, s)]);
            }
        }
        for q in 0..n {
            for p in 0..q {
                out.push(self.c[(q, p)]);
            }
        }
        out
    }

    pub fn modes(&self) -> usize {
        self.a.nrows()
    }

    pub fn a(&self) -> &DMatrix<T> {
        &self.a
    }

    pub fn b(&self) -> &DMatrix<T> {
        &self.b
    }

    pub fn c(&self) -> &DMatrix<T> {
        &self.c
    }

    pub fn is_canonical(&self) -> bool {
        self.canonical
    }

    /// Whether assembly had to zero the diagonal of `C` to reach the canonical gauge.
    pub fn gauge_zeroed(&self) -> bool {
        self.gauge_zeroed
    }

    /// The assembled `2N x 2N` matrix `[[A, B], [C, -Aᵀ]]`.
    pub fn matrix(&self) -> DMatrix<T> {
        let n = self.modes();
        let mut x = DMatrix::zeros(2 * n, 2 * n);
        x.view_mut((0, 0), (n, n)).copy_from(&self.a);
        x.view_mut((0, n), (n, n)).copy_from(&self.b);
        x.view_mut((n, 0), (n, n)).copy_from(&self.c);
        x.view_mut((n, n), (n, n)).copy_from(&(-self.a.transpose()));
        x
    }

    /// `max |(JX)ᵀ − JX|`.
    pub fn hamiltonian_residual(&self) -> T {
        let jx = symplectic_form::<T>(self.modes()).into_matrix() * self.matrix();
        max_abs(&(jx.transpose() - &jx))
    }

    pub fn scaled(&self, factor: T) -> Self {
        Self {
            a: &self.a * factor,
            b: &self.b * factor,
            c: &self.c * factor,
            canonical: self.canonical,
            gauge_zeroed: self.gauge_zeroed,
        }
    }
}

/// `max |SᵀJS − J|` relative to `max(1, max|S|²)`.
pub fn symplectic_residual<T: Real>(s: &DMatrix<T>) -> Result<T> {
    let (rows, cols) = s.shape();
    if rows != cols {
        return Err(Error::NotSquare { rows, cols });
    }
    if rows == 0 || rows % 2 != 0 {
        return Err(Error::OddDimension(rows));
    }
    let j = symplectic_form::<T>(rows / 2).into_matrix();
    let residual = max_abs(&(s.transpose() * &j * s - &j));
    let scale = max_abs(s);
    Ok(residual / (scale * scale).max(T::one()))
}

/// The symplectic matrix `S = exp(X)`.
///
/// Evaluated with Padé scaling and squaring; the result is checked against
/// `SᵀJS = J`.
pub fn symplectic_exp<T: Real>(x: &HamiltonianGenerator<T>) -> Result<DMatrix<T>> {
    let s = x.matrix().exp();
    if s.iter().any(|v| !v.finite()) {
        return Err(Error::ExpNonConvergence);
    }
    if symplectic_residual(&s)? > T::lit(T::SYMPLECTIC_TOL) {
        return Err(Error::ExpNonConvergence);
    }
    Ok(s)
}

/// The congruence `SᵀΣS`.
pub fn conjugate<T: Real>(sigma: &CovarianceMatrix<T>, s: &DMatrix<T>) -> Result<CovarianceMatrix<T>> {
    if s.nrows() != sigma.dim() || s.ncols() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: sigma.dim(),
            found: s.nrows().max(s.ncols()),
        });
    }
    let residual = symplectic_residual(s)?;
    if residual > T::lit(T::SYMPLECTIC_TOL) {
        return Err(Error::NotSymplectic(residual.to_f64_lossy()));
    }
    let out = s.transpose() * sigma.matrix() * s;
    Ok(CovarianceMatrix {
        modes: sigma.modes(),
        entries: symmetrized(&out),
    })
}
