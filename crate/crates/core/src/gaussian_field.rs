//! Prequantum Gaussian fields.
//!
//! A state `ρ` is mapped to the covariance `D_ρ = ρ + I`; fields are drawn as
//! `φ = Lz` with `LL† = D` and `z` a standard circularly-symmetric complex
//! Gaussian, so `E[φφ†] = D`, `E[φφᵀ] = 0` and `E[φ] = 0`.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::hilbert::{
    min_eigenvalue, pure_state_density, ComplexMatrix, DensityOperator, HermitianOperator, PureState, EIGENVALUE_FLOOR,
    STRUCTURE_TOL,
};
use crate::rng::{keyed_rng, standard_complex_normal};

/// Positive semidefinite Hermitian covariance of a zero-mean complex Gaussian field.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceOperator(ComplexMatrix);

impl CovarianceOperator {
    /// Validates Hermiticity (1e-12) and eigenvalues `>= -1e-10`.
    pub fn new(m: ComplexMatrix) -> Result<Self> {
        let deviation = m.hermitian_deviation();
        if deviation > STRUCTURE_TOL {
            return Err(Error::TooFarFromHermitian { deviation, limit: STRUCTURE_TOL });
        }
        let h = HermitianOperator::from_symmetrized(m.into_inner());
        let min = min_eigenvalue(h.as_matrix());
        if min < EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
        Ok(Self(h.into()))
    }

    pub(crate) fn from_unchecked(m: DMatrix<Complex64>) -> Self {
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

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }
}

/// `D_ρ = ρ + I`: the state's covariance shifted by white noise.
pub fn covariance_for_state(rho: &DensityOperator) -> CovarianceOperator {
    let n = rho.dim();
    CovarianceOperator::from_unchecked(rho.as_matrix() + DMatrix::<Complex64>::identity(n, n))
}

/// `D_ψ = ψψ† + I`.
pub fn covariance_for_pure_state(psi: &PureState) -> CovarianceOperator {
    covariance_for_state(&pure_state_density(psi))
}

/// Covariance `I` of the vacuum background.
pub fn white_noise_covariance(dim: usize) -> CovarianceOperator {
    CovarianceOperator::from_unchecked(DMatrix::identity(dim, dim))
}

/// Square root `L = U diag(√λ) U†` of a covariance, so that `LL† = D`.
#[derive(Debug, Clone, PartialEq)]
pub struct CovarianceFactor {
    factor: DMatrix<Complex64>,
    source_eigenvalues: Vec<f64>,
}

impl CovarianceFactor {
    pub fn dim(&self) -> usize {
        self.factor.nrows()
    }

    pub fn factor(&self) -> &DMatrix<Complex64> {
        &self.factor
    }

    /// Eigenvalues of the factorized covariance, before clamping.
    pub fn source_eigenvalues(&self) -> &[f64] {
        &self.source_eigenvalues
    }

    /// `LL†`.
    pub fn covariance(&self) -> DMatrix<Complex64> {
        &self.factor * self.factor.adjoint()
    }

    /// Draws the field for one substream.
    pub fn sample(&self, stream: SampleStream) -> FieldSample {
        let mut rng = keyed_rng(stream.base_seed, stream.substream_index);
        let n = self.dim();
        let z = DVector::from_fn(n, |_, _| standard_complex_normal(&mut rng));
        FieldSample(&self.factor * z)
    }
}

/// Eigendecomposition-based square root; eigenvalues in `[-1e-10, 0)` are clamped to zero.
pub fn factorize(d: &CovarianceOperator) -> Result<CovarianceFactor> {
    let eigen = d.as_matrix().clone().symmetric_eigen();
    let eigenvalues: Vec<f64> = eigen.eigenvalues.iter().copied().collect();
    if let Some(&min) = eigenvalues.iter().min_by(|a, b| a.total_cmp(b)) {
        if min < EIGENVALUE_FLOOR {
            return Err(Error::NotPositiveSemidefinite { min_eigenvalue: min });
        }
    }
    let roots =
        DVector::from_iterator(eigenvalues.len(), eigenvalues.iter().map(|&l| Complex64::new(l.max(0.0).sqrt(), 0.0)));
    let u = &eigen.eigenvectors;
    let factor = u * DMatrix::from_diagonal(&roots) * u.adjoint();
    Ok(CovarianceFactor { factor, source_eigenvalues: eigenvalues })
}

/// Identifies one draw: the base seed keys the generator, the index selects
/// an independent stream within it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SampleStream {
    pub base_seed: u64,
    pub substream_index: u64,
}

impl SampleStream {
    pub fn new(base_seed: u64, substream_index: u64) -> Self {
        Self { base_seed, substream_index }
    }
}

/// `φ = L z` for `z` drawn from `stream`.
pub fn sample(factor: &CovarianceFactor, stream: SampleStream) -> FieldSample {
    factor.sample(stream)
}

/// One realization of the prequantum field.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldSample(DVector<Complex64>);

impl FieldSample {
    pub fn new(phi: Vec<Complex64>) -> Result<Self> {
        if phi.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NotFinite);
        }
        Ok(Self(DVector::from_vec(phi)))
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn phi(&self) -> &DVector<Complex64> {
        &self.0
    }
}

/// `f_A(φ) = φ†Aφ`.
pub fn quadratic_functional(a: &ComplexMatrix, phi: &FieldSample) -> Result<Complex64> {
    check_dim(a.dim(), phi.dim())?;
    Ok(quadratic_form(a.as_matrix(), phi.phi()))
}

pub(crate) fn quadratic_form(a: &DMatrix<Complex64>, phi: &DVector<Complex64>) -> Complex64 {
    phi.dotc(&(a * phi))
}
