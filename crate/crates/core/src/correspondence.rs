//! Closed-form side of the classical-field/quantum dictionary.
//!
//! Every quantity here is an exact trace formula for a moment of
//! `f_A(φ) = φ†Aφ` under a zero-mean circularly-symmetric complex Gaussian
//! field with covariance `D`. For `D_ψ = ψψ† + I`:
//!
//! * `E f_A = Tr(D_ψ A) = ⟨A⟩_ψ + Tr A`
//! * `Var f_A = Tr(D_ψ A D_ψ A) = Tr A² + 2σ²_ψ(A) + 3⟨A⟩²_ψ`
//!
//! so the quantum average and dispersion are recovered after removing the
//! white-noise contribution.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Result};
use crate::gaussian_field::{
    covariance_for_pure_state, covariance_for_state, white_noise_covariance, CovarianceOperator,
};
use crate::hilbert::{
    commutator, pure_expectation, quantum_dispersion, shift_observable, trace_of_product, ComplexMatrix,
    DensityOperator, HermitianOperator, PureState,
};

/// Margin tolerance for inequality audits, scaled by `1 + |lhs|`.
pub const AUDIT_TOL: f64 = 1e-9;

/// `|x - y| / (1 + max(|x|, |y|))`: relative for large values, absolute near zero.
pub fn scaled_residual(x: f64, y: f64) -> f64 {
    (x - y).abs() / (1.0 + x.abs().max(y.abs()))
}

/// Moments of `f_A` under the covariance `D_ψ`, next to their quantum counterparts.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DispersionReport {
    /// `Var f_A` under `D_ψ`, from the closed form `Tr A² + 2σ² + 3⟨A⟩²`.
    pub classical_dispersion: f64,
    /// Same quantity via `E f_A² - (E f_A)²` from the Gaussian moment formula.
    pub moment_route_dispersion: f64,
    pub quantum_dispersion: f64,
    /// `Tr A²`, the dispersion under white noise alone.
    pub vacuum_dispersion: f64,
    pub gamma: f64,
    pub qm_mean: f64,
}

/// Outcome of one classical uncertainty-relation check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AuditRecord {
    /// `Γ(f_{C₁}) Γ(f_{C₂})`.
    pub lhs: f64,
    /// `¼ |E f_K - Tr K|²`.
    pub rhs: f64,
    pub margin: f64,
    pub commutator_trace: Complex64,
    pub passed: bool,
}

/// `E_{μ_D} f_A = Tr(DA)`, valid for any linear `A`.
pub fn prequantum_average(a: &ComplexMatrix, d: &CovarianceOperator) -> Result<Complex64> {
    check_dim(d.dim(), a.dim())?;
    Ok(trace_of_product(d.as_matrix(), a.as_matrix()))
}

/// `Tr(D_ρ A) - Tr A`, which reproduces `Tr(ρA)`.
pub fn vacuum_subtracted_average(a: &HermitianOperator, rho: &DensityOperator) -> Result<f64> {
    check_dim(rho.dim(), a.dim())?;
    let d = covariance_for_state(rho);
    Ok(prequantum_average(a.matrix(), &d)?.re - a.trace())
}

/// Both sides of `Tr(D_ψ A)² = Tr A² + 2⟨A²⟩_ψ + ⟨A⟩²_ψ`.
///
/// The left side is the explicit product `Tr(D_ψ A D_ψ A)`.
pub fn lemma1_trace(a: &HermitianOperator, psi: &PureState) -> Result<(f64, f64)> {
    check_dim(psi.dim(), a.dim())?;
    let d = covariance_for_pure_state(psi);
    let da = d.as_matrix() * a.as_matrix();
    let lhs = trace_of_product(&da, &da).re;
    let a_psi = a.as_matrix() * psi.vector();
    let mean = psi.vector().dotc(&a_psi).re;
    let second = a_psi.norm_squared();
    let rhs = a.trace_of_square() + 2.0 * second + mean * mean;
    Ok((lhs, rhs))
}

/// `E f_{A₁} f_{A₂} = Tr(DA₁) Tr(DA₂) + Tr(DA₂DA₁)` for a circular complex Gaussian.
pub fn second_moment(a1: &HermitianOperator, a2: &HermitianOperator, d: &CovarianceOperator) -> Result<f64> {
    check_dim(d.dim(), a1.dim())?;
    check_dim(d.dim(), a2.dim())?;
    let t1 = prequantum_average(a1.matrix(), d)?.re;
    let t2 = prequantum_average(a2.matrix(), d)?.re;
    let da1 = d.as_matrix() * a1.as_matrix();
    let da2 = d.as_matrix() * a2.as_matrix();
    Ok(t1 * t2 + trace_of_product(&da2, &da1).re)
}

/// `E f_{A₁} f_{A₂}` by expanding `Σ A₁_ij A₂_kl E[φ̄_i φ_j φ̄_k φ_l]` over the
/// two conjugate/plain pairings, each pair contributing `E[φ̄_i φ_j] = D_ji`.
///
/// Entry-wise route, independent of the trace formula in [`second_moment`].
pub fn wick_pairing_moment(a1: &ComplexMatrix, a2: &ComplexMatrix, d: &CovarianceOperator) -> Result<Complex64> {
    check_dim(d.dim(), a1.dim())?;
    check_dim(d.dim(), a2.dim())?;
    let (x, y, dm) = (a1.as_matrix(), a2.as_matrix(), d.as_matrix());
    let n = d.dim();
    let pair = |i: usize, j: usize| dm[(j, i)];
    let mut acc = Complex64::new(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            for k in 0..n {
                for l in 0..n {
                    let moment = pair(i, j) * pair(k, l) + pair(i, l) * pair(k, j);
                    acc += x[(i, j)] * y[(k, l)] * moment;
                }
            }
        }
    }
    Ok(acc)
}

/// Dispersion of `f_A` under `D_ψ` and its decomposition.
pub fn classical_dispersion_report(a: &HermitianOperator, psi: &PureState) -> Result<DispersionReport> {
    check_dim(psi.dim(), a.dim())?;
    let qm_mean = pure_expectation(a, psi)?;
    let quantum = quantum_dispersion(a, psi)?;
    let vacuum = a.trace_of_square();
    let classical = vacuum + 2.0 * quantum + 3.0 * qm_mean * qm_mean;

    let d = covariance_for_pure_state(psi);
    let mean = prequantum_average(a.matrix(), &d)?.re;
    let moment_route = second_moment(a, a, &d)? - mean * mean;

    Ok(DispersionReport {
        classical_dispersion: classical,
        moment_route_dispersion: moment_route,
        quantum_dispersion: quantum,
        vacuum_dispersion: vacuum,
        gamma: 0.5 * (classical - vacuum),
        qm_mean,
    })
}

/// `Var f_A` under white noise: `Tr A²`.
pub fn white_noise_dispersion(a: &HermitianOperator) -> f64 {
    a.trace_of_square()
}

/// `Γ = ½(Var_{D_ψ} f_A - Var_I f_A)`, equal to `σ²_ψ(A) + (3/2)⟨A⟩²_ψ`.
pub fn gamma_regularized(a: &HermitianOperator, psi: &PureState) -> Result<f64> {
    Ok(classical_dispersion_report(a, psi)?.gamma)
}

/// `¼ |⟨[A₁, A₂]⟩_ψ|²`.
pub fn robertson_bound(a1: &HermitianOperator, a2: &HermitianOperator, psi: &PureState) -> Result<f64> {
    check_dim(psi.dim(), a1.dim())?;
    let k = commutator(a1, a2)?;
    let mean = crate::hilbert::state_average(k.matrix(), psi)?;
    Ok(0.25 * mean.norm_sqr())
}

/// Checks `Γ(f_{C₁}) Γ(f_{C₂}) >= ¼ |E_{μ_ψ} f_K - Tr K|²` on the observables
/// shifted to zero mean in `ψ`. `K = [A₁, A₂]` is unchanged by the shift.
pub fn classical_robertson_audit(
    a1: &HermitianOperator,
    a2: &HermitianOperator,
    psi: &PureState,
) -> Result<AuditRecord> {
    check_dim(psi.dim(), a1.dim())?;
    check_dim(psi.dim(), a2.dim())?;
    let c1 = shift_observable(a1, psi)?;
    let c2 = shift_observable(a2, psi)?;
    let lhs = gamma_regularized(&c1, psi)? * gamma_regularized(&c2, psi)?;

    let k = commutator(a1, a2)?;
    let d = covariance_for_pure_state(psi);
    let commutator_trace = k.trace();
    let centered = prequantum_average(k.matrix(), &d)? - commutator_trace;
    let rhs = 0.25 * centered.norm_sqr();
    let margin = lhs - rhs;
    Ok(AuditRecord { lhs, rhs, margin, commutator_trace, passed: margin >= -AUDIT_TOL * (1.0 + lhs.abs()) })
}

/// Both sides of the quantum relation `σ²_ψ(C₁) σ²_ψ(C₂) >= ¼ |⟨K⟩_ψ|²`.
pub fn quantum_robertson_margin(a1: &HermitianOperator, a2: &HermitianOperator, psi: &PureState) -> Result<(f64, f64)> {
    let c1 = shift_observable(a1, psi)?;
    let c2 = shift_observable(a2, psi)?;
    let lhs = quantum_dispersion(&c1, psi)? * quantum_dispersion(&c2, psi)?;
    let rhs = robertson_bound(a1, a2, psi)?;
    Ok((lhs, rhs))
}

/// Dispersion of `f_A` under covariance `D`: `Tr(DADA)`.
pub fn dispersion_under(a: &HermitianOperator, d: &CovarianceOperator) -> Result<f64> {
    check_dim(d.dim(), a.dim())?;
    let da: DMatrix<Complex64> = d.as_matrix() * a.as_matrix();
    Ok(trace_of_product(&da, &da).re)
}

/// Mean and dispersion of `f_A` under white noise.
pub fn white_noise_moments(a: &HermitianOperator) -> (f64, f64) {
    let d = white_noise_covariance(a.dim());
    let mean = trace_of_product(d.as_matrix(), a.as_matrix()).re;
    (mean, white_noise_dispersion(a))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hilbert::expectation;
    use crate::hilbert::{random_density, random_hermitian, random_pure_state};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn e0() -> PureState {
        PureState::basis(2, 0).unwrap()
    }

    fn diag_cov(d: &[f64]) -> CovarianceOperator {
        let h = HermitianOperator::from_real_diagonal(d).unwrap();
        CovarianceOperator::new(h.into()).unwrap()
    }

    #[test]
    fn prequantum_average_examples() {
        let d = covariance_for_pure_state(&e0());
        let z = prequantum_average(HermitianOperator::pauli_z().matrix(), &d).unwrap();
        assert_eq!(z, c(1.0, 0.0));
        let v = prequantum_average(HermitianOperator::identity(5).matrix(), &white_noise_covariance(5)).unwrap();
        assert_eq!(v, c(5.0, 0.0));
        let k = commutator(&HermitianOperator::pauli_x(), &HermitianOperator::pauli_y()).unwrap();
        assert_eq!(prequantum_average(k.matrix(), &d).unwrap(), c(0.0, 2.0));
    }

    #[test]
    fn vacuum_subtraction_examples() {
        let rho = crate::hilbert::pure_state_density(&e0());
        let proj = HermitianOperator::from_real_diagonal(&[1.0, 0.0]).unwrap();
        assert_eq!(vacuum_subtracted_average(&proj, &rho).unwrap(), 1.0);
        assert_eq!(vacuum_subtracted_average(&HermitianOperator::pauli_x(), &rho).unwrap(), 0.0);
        let mixed = random_density(2, 4);
        let v = vacuum_subtracted_average(&HermitianOperator::identity(2), &mixed).unwrap();
        assert!((v - 1.0).abs() < 1e-14);
    }

    #[test]
    fn vacuum_subtraction_matches_expectation() {
        for n in [2usize, 4, 8, 16] {
            for t in 0..100u64 {
                let a = random_hermitian(n, t, 1.0);
                let rho = random_density(n, 1000 + t);
                let x = vacuum_subtracted_average(&a, &rho).unwrap();
                let y = expectation(&a, &rho).unwrap();
                assert!(scaled_residual(x, y) <= 1e-10, "n={n} t={t}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn lemma1_examples() {
        let (l, r) = lemma1_trace(&HermitianOperator::pauli_z(), &e0()).unwrap();
        assert_eq!((l, r), (5.0, 5.0));
        let psi = random_pure_state(2, 3).unwrap();
        let (l, r) = lemma1_trace(&HermitianOperator::identity(2), &psi).unwrap();
        assert!((l - 5.0).abs() < 1e-13 && (r - 5.0).abs() < 1e-13);
        let (l, r) = lemma1_trace(&HermitianOperator::pauli_x(), &e0()).unwrap();
        assert_eq!((l, r), (4.0, 4.0));
    }

    #[test]
    fn second_moment_examples() {
        let x = HermitianOperator::pauli_x();
        assert_eq!(second_moment(&x, &x, &white_noise_covariance(2)).unwrap(), 2.0);
        let id = HermitianOperator::identity(3);
        assert_eq!(second_moment(&id, &id, &white_noise_covariance(3)).unwrap(), 12.0);
        let v = second_moment(&x, &HermitianOperator::pauli_z(), &diag_cov(&[2.0, 1.0])).unwrap();
        assert_eq!(v, 0.0);
    }

    #[test]
    fn second_moment_matches_pairing_expansion() {
        for n in 1..=4usize {
            for t in 0..20u64 {
                let a1 = random_hermitian(n, 10 * t, 1.0);
                let a2 = random_hermitian(n, 10 * t + 1, 1.0);
                let psi = random_pure_state(n, t).unwrap();
                let d = covariance_for_pure_state(&psi);
                let x = second_moment(&a1, &a2, &d).unwrap();
                let y = wick_pairing_moment(a1.matrix(), a2.matrix(), &d).unwrap();
                assert!(y.im.abs() < 1e-10 * (1.0 + y.re.abs()));
                assert!(scaled_residual(x, y.re) <= 1e-10, "n={n}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn dispersion_report_examples() {
        let r = classical_dispersion_report(&HermitianOperator::pauli_x(), &e0()).unwrap();
        assert_eq!(
            (r.classical_dispersion, r.quantum_dispersion, r.vacuum_dispersion, r.qm_mean, r.gamma),
            (4.0, 1.0, 2.0, 0.0, 1.0)
        );
        assert_eq!(r.moment_route_dispersion, 4.0);
        let r = classical_dispersion_report(&HermitianOperator::pauli_z(), &e0()).unwrap();
        assert_eq!(
            (r.classical_dispersion, r.quantum_dispersion, r.vacuum_dispersion, r.qm_mean, r.gamma),
            (5.0, 0.0, 2.0, 1.0, 1.5)
        );
        assert_eq!(r.moment_route_dispersion, 5.0);
        let r = classical_dispersion_report(&HermitianOperator::zeros(3), &random_pure_state(3, 1).unwrap()).unwrap();
        assert_eq!(
            [
                r.classical_dispersion,
                r.moment_route_dispersion,
                r.quantum_dispersion,
                r.vacuum_dispersion,
                r.gamma,
                r.qm_mean
            ],
            [0.0; 6]
        );
    }

    #[test]
    fn dispersion_routes_agree_and_order() {
        for n in [1usize, 2, 5, 9] {
            for t in 0..50u64 {
                let a = random_hermitian(n, t, 1.5);
                let psi = random_pure_state(n, t + 77).unwrap();
                let r = classical_dispersion_report(&a, &psi).unwrap();
                assert!(scaled_residual(r.classical_dispersion, r.moment_route_dispersion) <= 1e-10);
                assert!(r.classical_dispersion >= r.vacuum_dispersion);
                assert!(r.classical_dispersion >= r.quantum_dispersion);
                let expected_gamma = r.quantum_dispersion + 1.5 * r.qm_mean * r.qm_mean;
                assert!(scaled_residual(r.gamma, expected_gamma) <= 1e-10);
            }
        }
    }

    #[test]
    fn white_noise_examples() {
        assert_eq!(white_noise_dispersion(&HermitianOperator::pauli_x()), 2.0);
        assert_eq!(white_noise_dispersion(&HermitianOperator::identity(4)), 4.0);
        assert_eq!(white_noise_dispersion(&HermitianOperator::zeros(2)), 0.0);
        let a = random_hermitian(6, 8, 1.0);
        let via_moment = second_moment(&a, &a, &white_noise_covariance(6)).unwrap() - a.trace().powi(2);
        assert!(scaled_residual(white_noise_dispersion(&a), via_moment) <= 1e-10);
        let (m, v) = white_noise_moments(&a);
        assert!(scaled_residual(m, a.trace()) <= 1e-14);
        assert_eq!(v, white_noise_dispersion(&a));
    }

    #[test]
    fn gamma_examples() {
        assert_eq!(gamma_regularized(&HermitianOperator::pauli_x(), &e0()).unwrap(), 1.0);
        assert_eq!(gamma_regularized(&HermitianOperator::pauli_z(), &e0()).unwrap(), 1.5);
        assert_eq!(gamma_regularized(&HermitianOperator::zeros(2), &e0()).unwrap(), 0.0);
    }

    #[test]
    fn robertson_bound_examples() {
        let (x, y) = (HermitianOperator::pauli_x(), HermitianOperator::pauli_y());
        assert_eq!(robertson_bound(&x, &y, &e0()).unwrap(), 1.0);
        assert_eq!(robertson_bound(&x, &x, &e0()).unwrap(), 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        let plus = PureState::new(vec![c(h, 0.0), c(h, 0.0)]).unwrap();
        assert!(robertson_bound(&x, &y, &plus).unwrap() < 1e-30);
    }

    #[test]
    fn audit_examples() {
        let (x, y, z) = (HermitianOperator::pauli_x(), HermitianOperator::pauli_y(), HermitianOperator::pauli_z());
        let rec = classical_robertson_audit(&x, &y, &e0()).unwrap();
        assert_eq!((rec.lhs, rec.rhs, rec.margin), (1.0, 1.0, 0.0));
        assert!(rec.passed);
        assert_eq!(rec.commutator_trace, c(0.0, 0.0));

        let rec = classical_robertson_audit(&z, &z, &e0()).unwrap();
        let g = gamma_regularized(&shift_observable(&z, &e0()).unwrap(), &e0()).unwrap();
        assert_eq!(rec.lhs, g * g);
        assert_eq!(rec.rhs, 0.0);
        assert!(rec.passed);
    }

    #[test]
    fn audit_sweep_passes() {
        for n in [2usize, 4, 8] {
            for t in 0..1000u64 {
                let a1 = random_hermitian(n, 3 * t, 1.0);
                let a2 = random_hermitian(n, 3 * t + 1, 1.0);
                let psi = random_pure_state(n, 3 * t + 2).unwrap();
                let rec = classical_robertson_audit(&a1, &a2, &psi).unwrap();
                assert!(rec.passed, "n={n} t={t}: {rec:?}");
                assert!(rec.commutator_trace.norm() <= 1e-10);
                let (ql, qr) = quantum_robertson_margin(&a1, &a2, &psi).unwrap();
                assert!(ql - qr >= -AUDIT_TOL * (1.0 + ql.abs()));
            }
        }
    }

    #[test]
    fn dispersion_without_vacuum_shift() {
        // Under the bare covariance ψψ† the complex convention gives ⟨A⟩², not 3⟨A⟩².
        let z = HermitianOperator::pauli_z();
        let rho = CovarianceOperator::new(crate::hilbert::pure_state_density(&e0()).matrix().clone()).unwrap();
        assert_eq!(dispersion_under(&z, &rho).unwrap(), 1.0);
        for t in 0..20u64 {
            let a = random_hermitian(5, t, 1.0);
            let psi = random_pure_state(5, t + 40).unwrap();
            let bare = CovarianceOperator::new(crate::hilbert::pure_state_density(&psi).matrix().clone()).unwrap();
            let mean = crate::hilbert::pure_expectation(&a, &psi).unwrap();
            assert!(scaled_residual(dispersion_under(&a, &bare).unwrap(), mean * mean) <= 1e-12);
            let lifted = dispersion_under(&a, &covariance_for_pure_state(&psi)).unwrap();
            let r = classical_dispersion_report(&a, &psi).unwrap();
            assert!(scaled_residual(lifted, r.classical_dispersion) <= 1e-10);
        }
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let a = HermitianOperator::identity(3);
        assert!(lemma1_trace(&a, &e0()).is_err());
        assert!(classical_robertson_audit(&a, &a, &e0()).is_err());
        assert!(second_moment(&a, &HermitianOperator::identity(2), &white_noise_covariance(3)).is_err());
        assert!(prequantum_average(a.matrix(), &white_noise_covariance(2)).is_err());
    }
}
