//! Finite-dimensional complex Hilbert space algebra.
//!
//! States, observables and density operators on `C^n`, together with the
//! trace formulas and the seeded generators used to build test corpora.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::rng::{self, keyed_rng, standard_complex_normal};

/// Deviation from Hermitian accepted at ingestion; anything larger is treated
/// as a caller error rather than rounding drift.
pub const HERMITIAN_INGEST_TOL: f64 = 1e-6;
/// Tolerance for validated Hermitian and anti-Hermitian storage.
pub const STRUCTURE_TOL: f64 = 1e-12;
pub const NORM_TOL: f64 = 1e-12;
pub const EIGENVALUE_FLOOR: f64 = -1e-10;
pub const TRACE_TOL: f64 = 1e-10;
/// Largest imaginary residue tolerated when a trace is known to be real.
pub const IMAG_RESIDUE_TOL: f64 = 1e-10;

const MAX_STATE_DRAWS: usize = 100;

/// Square complex matrix with finite entries.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexMatrix(DMatrix<Complex64>);

impl ComplexMatrix {
    pub fn new(m: DMatrix<Complex64>) -> Result<Self> {
        if m.nrows() != m.ncols() {
            return Err(Error::NotSquare { rows: m.nrows(), cols: m.ncols() });
        }
        if m.nrows() == 0 {
            return Err(Error::EmptyDimension);
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotFinite);
        }
        Ok(Self(m))
    }

    /// Builds an `n x n` matrix from `n*n` entries in row-major order.
    pub fn from_row_slice(dim: usize, entries: &[Complex64]) -> Result<Self> {
        if entries.len() != dim * dim {
            let cols = entries.len().checked_div(dim).unwrap_or(entries.len());
            return Err(Error::NotSquare { rows: dim, cols });
        }
        Self::new(DMatrix::from_row_slice(dim, dim, entries))
    }

    /// Real-entry convenience constructor, row-major.
    pub fn from_real_rows(dim: usize, entries: &[f64]) -> Result<Self> {
        let entries: Vec<Complex64> = entries.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_row_slice(dim, &entries)
    }

    pub fn identity(dim: usize) -> Self {
        Self(DMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(DMatrix::zeros(dim, dim))
    }

    pub(crate) fn from_unchecked(m: DMatrix<Complex64>) -> Self {
        debug_assert_eq!(m.nrows(), m.ncols());
        Self(m)
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    /// Largest entry modulus.
    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// `max |m - m†|` over entries.
    pub fn hermitian_deviation(&self) -> f64 {
        max_abs_diff(&self.0, &self.0.adjoint())
    }

    pub fn anti_hermitian_deviation(&self) -> f64 {
        max_abs_diff(&self.0, &(-self.0.adjoint()))
    }
}

pub(crate) fn max_abs_diff(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// `Tr(AB)` without forming the product.
pub(crate) fn trace_of_product(a: &DMatrix<Complex64>, b: &DMatrix<Complex64>) -> Complex64 {
    let n = a.nrows();
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += a[(i, j)] * b[(j, i)];
        }
    }
    acc
}

/// Quantum observable: a Hermitian matrix, stored exactly Hermitian.
#[derive(Debug, Clone, PartialEq)]
pub struct HermitianOperator(ComplexMatrix);

impl HermitianOperator {
    /// See [`make_hermitian`].
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        make_hermitian(&m)
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Result<Self> {
        if diag.is_empty() {
            return Err(Error::EmptyDimension);
        }
        let d = DVector::from_iterator(diag.len(), diag.iter().map(|&x| Complex64::new(x, 0.0)));
        Self::new(ComplexMatrix::new(DMatrix::from_diagonal(&d))?)
    }

    pub fn identity(dim: usize) -> Self {
        Self(ComplexMatrix::identity(dim))
    }

    pub fn zeros(dim: usize) -> Self {
        Self(ComplexMatrix::zeros(dim))
    }

    pub fn pauli_x() -> Self {
        Self(ComplexMatrix::from_unchecked(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(1.0, 0.0), c(1.0, 0.0), c(0.0, 0.0)],
        )))
    }

    pub fn pauli_y() -> Self {
        Self(ComplexMatrix::from_unchecked(DMatrix::from_row_slice(
            2,
            2,
            &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)],
        )))
    }

    pub fn pauli_z() -> Self {
        Self(ComplexMatrix::from_unchecked(DMatrix::from_row_slice(
            2,
            2,
            &[c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-1.0, 0.0)],
        )))
    }

    pub(crate) fn from_symmetrized(m: DMatrix<Complex64>) -> Self {
        let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
        Self(ComplexMatrix::from_unchecked(h))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        self.0.as_matrix()
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    /// `Tr A^2`, the sum of squared entry moduli for Hermitian `A`.
    pub fn trace_of_square(&self) -> f64 {
        self.0.as_matrix().iter().map(|z| z.norm_sqr()).sum()
    }

    /// `αA + βB` for real coefficients.
    pub fn linear_combination(alpha: f64, a: &Self, beta: f64, b: &Self) -> Result<Self> {
        check_dim(a.dim(), b.dim())?;
        let m = a.as_matrix() * Complex64::new(alpha, 0.0) + b.as_matrix() * Complex64::new(beta, 0.0);
        Ok(Self::from_symmetrized(m))
    }
}

impl From<HermitianOperator> for ComplexMatrix {
    fn from(h: HermitianOperator) -> Self {
        h.0
    }
}

/// Anti-Hermitian matrix, such as the commutator of two observables.
#[derive(Debug, Clone, PartialEq)]
pub struct AntiHermitianOperator(ComplexMatrix);

impl AntiHermitianOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = m.anti_hermitian_deviation();
        if deviation > STRUCTURE_TOL {
            return Err(Error::NotAntiHermitian { deviation });
        }
        Ok(Self::from_antisymmetrized(m.into_inner()))
    }

    fn from_antisymmetrized(m: DMatrix<Complex64>) -> Self {
        let k = (&m - m.adjoint()) * Complex64::new(0.5, 0.0);
        Self(ComplexMatrix::from_unchecked(k))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        self.0.as_matrix()
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }
}

impl From<AntiHermitianOperator> for ComplexMatrix {
    fn from(k: AntiHermitianOperator) -> Self {
        k.0
    }
}

/// Unit vector in `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PureState(DVector<Complex64>);

impl PureState {
    pub fn new(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = finite_vector(amplitudes)?;
        let norm = v.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(v))
    }

    /// Rescales a nonzero vector to unit length.
    pub fn normalized(amplitudes: Vec<Complex64>) -> Result<Self> {
        let v = finite_vector(amplitudes)?;
        let norm = v.norm();
        if norm == 0.0 {
            return Err(Error::NotNormalized { norm });
        }
        Ok(Self(v.unscale(norm)))
    }

    /// Computational basis vector `e_k`.
    pub fn basis(dim: usize, k: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::EmptyDimension);
        }
        if k >= dim {
            return Err(Error::DimensionMismatch { expected: dim, found: k + 1 });
        }
        let mut v = DVector::zeros(dim);
        v[k] = Complex64::new(1.0, 0.0);
        Ok(Self(v))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn vector(&self) -> &DVector<Complex64> {
        &self.0
    }
}

fn finite_vector(amplitudes: Vec<Complex64>) -> Result<DVector<Complex64>> {
    if amplitudes.is_empty() {
        return Err(Error::EmptyDimension);
    }
    if amplitudes.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
        return Err(Error::NotFinite);
    }
    Ok(DVector::from_vec(amplitudes))
}

/// Positive semidefinite, unit-trace Hermitian matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityOperator(ComplexMatrix);

impl DensityOperator {
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = m.hermitian_deviation();
        if deviation > STRUCTURE_TOL {
            return Err(Error::NotDensity { reason: format!("Hermitian deviation {deviation:e}") });
        }
        let h = HermitianOperator::from_symmetrized(m.into_inner());
        let trace = h.trace();
        if (trace - 1.0).abs() > TRACE_TOL {
            return Err(Error::NotDensity { reason: format!("trace {trace}") });
        }
        let min = min_eigenvalue(h.as_matrix());
        if min < EIGENVALUE_FLOOR {
            return Err(Error::NotDensity { reason: format!("eigenvalue {min:e}") });
        }
        Ok(Self(h.0))
    }

    /// `I/n`.
    pub fn maximally_mixed(dim: usize) -> Self {
        let m = DMatrix::identity(dim, dim) * Complex64::new(1.0 / dim as f64, 0.0);
        Self(ComplexMatrix::from_unchecked(m))
    }

    pub fn dim(&self) -> usize {
        self.0.dim()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.0
    }

    pub fn as_matrix(&self) -> &DMatrix<Complex64> {
        self.0.as_matrix()
    }
}

pub(crate) fn min_eigenvalue(m: &DMatrix<Complex64>) -> f64 {
    m.clone().symmetric_eigenvalues().iter().copied().fold(f64::INFINITY, f64::min)
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// Validates an observable and returns its exact Hermitian part `(m + m†)/2`.
pub fn make_hermitian(m: &ComplexMatrix) -> Result<HermitianOperator> {
    let deviation = m.hermitian_deviation();
    if deviation > HERMITIAN_INGEST_TOL {
        return Err(Error::TooFarFromHermitian { deviation, limit: HERMITIAN_INGEST_TOL });
    }
    Ok(HermitianOperator::from_symmetrized(m.as_matrix().clone()))
}

/// Rank-one projector `ψψ†`.
pub fn pure_state_density(psi: &PureState) -> DensityOperator {
    let v = psi.vector();
    let h = HermitianOperator::from_symmetrized(v * v.adjoint());
    DensityOperator(h.0)
}

/// `Tr(ρA)`.
pub fn expectation(a: &HermitianOperator, rho: &DensityOperator) -> Result<f64> {
    check_dim(a.dim(), rho.dim())?;
    let t = trace_of_product(rho.as_matrix(), a.as_matrix());
    debug_assert!(t.im.abs() < IMAG_RESIDUE_TOL * (1.0 + t.re.abs()));
    Ok(t.re)
}

/// `ψ†Mψ` for an arbitrary matrix.
pub fn state_average(m: &ComplexMatrix, psi: &PureState) -> Result<Complex64> {
    check_dim(m.dim(), psi.dim())?;
    let v = psi.vector();
    Ok(v.dotc(&(m.as_matrix() * v)))
}

/// `⟨A⟩_ψ` for an observable.
pub fn pure_expectation(a: &HermitianOperator, psi: &PureState) -> Result<f64> {
    Ok(state_average(a.matrix(), psi)?.re)
}

/// `⟨A^2⟩_ψ - ⟨A⟩_ψ^2`, clamped at zero.
pub fn quantum_dispersion(a: &HermitianOperator, psi: &PureState) -> Result<f64> {
    check_dim(a.dim(), psi.dim())?;
    let a_psi = a.as_matrix() * psi.vector();
    let mean = psi.vector().dotc(&a_psi).re;
    // ⟨A^2⟩ = |Aψ|^2 for Hermitian A
    let second = a_psi.norm_squared();
    Ok((second - mean * mean).max(0.0))
}

/// `[A₁, A₂] = A₁A₂ - A₂A₁`.
pub fn commutator(a1: &HermitianOperator, a2: &HermitianOperator) -> Result<AntiHermitianOperator> {
    check_dim(a1.dim(), a2.dim())?;
    let (x, y) = (a1.as_matrix(), a2.as_matrix());
    Ok(AntiHermitianOperator::from_antisymmetrized(x * y - y * x))
}

/// `A - ⟨A⟩_ψ I`: zero mean in `ψ`, same dispersion.
pub fn shift_observable(a: &HermitianOperator, psi: &PureState) -> Result<HermitianOperator> {
    let mean = pure_expectation(a, psi)?;
    let n = a.dim();
    let shifted = a.as_matrix() - DMatrix::<Complex64>::identity(n, n) * Complex64::new(mean, 0.0);
    Ok(HermitianOperator::from_symmetrized(shifted))
}

/// `(G + G†)/2` with i.i.d. complex Gaussian `G_ij`, `E|G_ij|^2 = scale^2`.
///
/// Panics if `dim == 0`.
pub fn random_hermitian(dim: usize, seed: u64, scale: f64) -> HermitianOperator {
    assert!(dim >= 1, "random_hermitian needs dim >= 1");
    let mut rng = keyed_rng(seed, rng::HERMITIAN_STREAM);
    let s = Complex64::new(scale, 0.0);
    let g = DMatrix::from_fn(dim, dim, |_, _| standard_complex_normal(&mut rng) * s);
    HermitianOperator::from_symmetrized(g)
}

/// Normalized complex Gaussian vector; the law is unitarily invariant.
pub fn random_pure_state(dim: usize, seed: u64) -> Result<PureState> {
    if dim == 0 {
        return Err(Error::EmptyDimension);
    }
    let mut rng = keyed_rng(seed, rng::PURE_STATE_STREAM);
    for _ in 0..MAX_STATE_DRAWS {
        let v = DVector::from_fn(dim, |_, _| standard_complex_normal(&mut rng));
        let norm = v.norm();
        if norm > f64::MIN_POSITIVE && norm.is_finite() {
            return Ok(PureState(v.unscale(norm)));
        }
    }
    Err(Error::DegenerateDraw { attempts: MAX_STATE_DRAWS })
}

/// Mixed state `GG†/Tr(GG†)` from a complex Gaussian `G`.
///
/// Panics if `dim == 0`.
pub fn random_density(dim: usize, seed: u64) -> DensityOperator {
    assert!(dim >= 1, "random_density needs dim >= 1");
    let mut rng = keyed_rng(seed, rng::DENSITY_STREAM);
    let g = DMatrix::from_fn(dim, dim, |_, _| standard_complex_normal(&mut rng));
    let p = &g * g.adjoint();
    let tr = p.trace().re;
    let h = HermitianOperator::from_symmetrized(p.unscale(tr));
    DensityOperator(h.0)
}
