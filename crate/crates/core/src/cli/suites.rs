use std::time::Instant;

use super::config::{ExperimentConfig, ExperimentKind};
use super::report::{
    tally, Aggregate, ConfigEcho, IdentityCheck, NamedComparison, RunReport, TrialRecord, SCHEMA_VERSION,
};
use super::CliError;
use crate::correspondence::{
    classical_dispersion_report, classical_robertson_audit, lemma1_trace, prequantum_average, scaled_residual,
    second_moment, vacuum_subtracted_average, white_noise_moments, wick_pairing_moment,
};
use crate::gaussian_field::{covariance_for_pure_state, factorize, white_noise_covariance};
use crate::hilbert::{
    expectation, pure_state_density, random_hermitian, random_pure_state, HermitianOperator, PureState,
};
use crate::montecarlo::{compare, estimate_cross_moment, estimate_moments, EstimatorConfig};
use crate::rng::mix_seed;

/// Residual bound for the exact identities.
pub const IDENTITY_TOL: f64 = 1e-10;

const TAG_OBSERVABLE: u64 = 1;
const TAG_STATE: u64 = 2;
const TAG_SECOND_OBSERVABLE: u64 = 3;
const TAG_SAMPLER: u64 = 16;

fn trial_observable(cfg: &ExperimentConfig, tag: u64, trial: u64) -> HermitianOperator {
    random_hermitian(cfg.dim, mix_seed(cfg.seed, tag, trial), cfg.hermitian_scale)
}

fn trial_state(cfg: &ExperimentConfig, trial: u64) -> Result<PureState, CliError> {
    Ok(random_pure_state(cfg.dim, mix_seed(cfg.seed, TAG_STATE, trial))?)
}

fn require_kind(cfg: &ExperimentConfig, kind: ExperimentKind) -> Result<(), CliError> {
    cfg.validate()?;
    if cfg.kind != kind {
        return Err(CliError::ConfigInvalid(format!(
            "config kind {} does not match suite {}",
            cfg.kind.as_str(),
            kind.as_str()
        )));
    }
    Ok(())
}

fn finish(
    cfg: &ExperimentConfig,
    checks_per_trial: u64,
    trials: Vec<TrialRecord>,
    mut aggregate: Aggregate,
    started: Instant,
) -> Result<RunReport, CliError> {
    let (passed, failed) = tally(&trials);
    aggregate.passed_count = passed;
    aggregate.failed_count = failed;
    let report = RunReport {
        schema_version: SCHEMA_VERSION,
        config: ConfigEcho::from(cfg),
        checks_per_trial,
        trials,
        aggregate,
        wall_time_seconds: started.elapsed().as_secs_f64(),
    };
    if let Some(path) = &cfg.output_path {
        report.write_to(path)?;
    }
    Ok(report)
}

fn empty_aggregate() -> Aggregate {
    Aggregate { passed_count: 0, failed_count: 0, max_abs_residual: None, max_abs_z: None, min_margin: None }
}

fn identity_check(name: &'static str, lhs: f64, rhs: f64) -> IdentityCheck {
    let residual = scaled_residual(lhs, rhs);
    IdentityCheck { name, lhs, rhs, residual, passed: residual <= IDENTITY_TOL }
}

/// Evaluates each closed-form identity two ways on random `(A, ψ)`.
pub fn run_identity_suite(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    require_kind(cfg, ExperimentKind::Identity)?;
    let started = Instant::now();
    let mut trials = Vec::with_capacity(cfg.trials as usize);
    for trial in 0..cfg.trials {
        let a = trial_observable(cfg, TAG_OBSERVABLE, trial);
        let b = trial_observable(cfg, TAG_SECOND_OBSERVABLE, trial);
        let psi = trial_state(cfg, trial)?;
        let rho = pure_state_density(&psi);
        let d = covariance_for_pure_state(&psi);

        let (l1_lhs, l1_rhs) = lemma1_trace(&a, &psi)?;
        let subtracted = vacuum_subtracted_average(&a, &rho)?;
        let direct = expectation(&a, &rho)?;
        let report = classical_dispersion_report(&a, &psi)?;
        let trace_formula = second_moment(&a, &b, &d)?;
        let pairing = wick_pairing_moment(a.matrix(), b.matrix(), &d)?;

        trials.push(TrialRecord::Identity {
            trial,
            checks: vec![
                identity_check("lemma1_trace", l1_lhs, l1_rhs),
                identity_check("vacuum_subtracted_average", subtracted, direct),
                identity_check("dispersion_two_routes", report.classical_dispersion, report.moment_route_dispersion),
                identity_check("second_moment_vs_pairings", trace_formula, pairing.re),
            ],
        });
    }
    let max_residual = trials
        .iter()
        .flat_map(|t| match t {
            TrialRecord::Identity { checks, .. } => checks.iter().map(|c| c.residual).collect::<Vec<_>>(),
            _ => Vec::new(),
        })
        .fold(0.0, f64::max);
    let aggregate = Aggregate { max_abs_residual: Some(max_residual), ..empty_aggregate() };
    finish(cfg, 4, trials, aggregate, started)
}

/// Monte Carlo moments of `f_A` against the trace formulas, under `D_ψ` and `I`.
pub fn run_estimate_suite(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    require_kind(cfg, ExperimentKind::Estimate)?;
    let started = Instant::now();
    let samples = cfg.samples.expect("validated");
    let estimator = |trial: u64, slot: u64| EstimatorConfig {
        sample_count: samples,
        base_seed: mix_seed(cfg.seed, TAG_SAMPLER + slot, trial),
        worker_hint: cfg.workers,
        z_threshold: cfg.z_threshold,
    };
    let z = cfg.z_threshold;
    let named = |name, analytic: f64, empirical: f64, se: f64| NamedComparison {
        name,
        record: compare(analytic, empirical, se, z),
        std_error: se,
    };

    let mut trials = Vec::with_capacity(cfg.trials as usize);
    for trial in 0..cfg.trials {
        let a = trial_observable(cfg, TAG_OBSERVABLE, trial);
        let psi = trial_state(cfg, trial)?;
        let d = covariance_for_pure_state(&psi);
        let state_factor = factorize(&d)?;
        let vacuum_factor = factorize(&white_noise_covariance(cfg.dim))?;

        let mean_exact = prequantum_average(a.matrix(), &d)?.re;
        let second_exact = second_moment(&a, &a, &d)?;
        let dispersion = classical_dispersion_report(&a, &psi)?;
        let (vac_mean_exact, vac_disp_exact) = white_noise_moments(&a);

        let state = estimate_moments(a.matrix(), &state_factor, &estimator(trial, 0))?;
        let second = estimate_cross_moment(&a, &a, &state_factor, &estimator(trial, 1))?;
        let vacuum = estimate_moments(a.matrix(), &vacuum_factor, &estimator(trial, 2))?;

        trials.push(TrialRecord::Estimate {
            trial,
            comparisons: vec![
                named("mean_state", mean_exact, state.mean.re, state.std_error_mean),
                named("second_moment_state", second_exact, second.mean.re, second.std_error_mean),
                named("dispersion_state", dispersion.classical_dispersion, state.variance, state.std_error_variance),
                named("mean_vacuum", vac_mean_exact, vacuum.mean.re, vacuum.std_error_mean),
                named("dispersion_vacuum", vac_disp_exact, vacuum.variance, vacuum.std_error_variance),
            ],
        });
    }
    let max_z = trials
        .iter()
        .flat_map(|t| match t {
            TrialRecord::Estimate { comparisons, .. } => {
                comparisons.iter().map(|c| c.record.z_score.abs()).collect::<Vec<_>>()
            }
            _ => Vec::new(),
        })
        .fold(0.0, f64::max);
    let aggregate = Aggregate { max_abs_z: Some(max_z), ..empty_aggregate() };
    finish(cfg, 5, trials, aggregate, started)
}

/// Classical uncertainty-relation audit on random `(A₁, A₂, ψ)`. At `dim = 2`
/// trial 0 is the Pauli equality case `(σ_x, σ_y, e₀)`.
pub fn run_robertson_audit(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    require_kind(cfg, ExperimentKind::RobertsonAudit)?;
    let started = Instant::now();
    let mut trials = Vec::with_capacity(cfg.trials as usize);
    for trial in 0..cfg.trials {
        let (label, a1, a2, psi) = if cfg.dim == 2 && trial == 0 {
            ("pauli_xy_e0", HermitianOperator::pauli_x(), HermitianOperator::pauli_y(), PureState::basis(2, 0)?)
        } else {
            (
                "random",
                trial_observable(cfg, TAG_OBSERVABLE, trial),
                trial_observable(cfg, TAG_SECOND_OBSERVABLE, trial),
                trial_state(cfg, trial)?,
            )
        };
        let audit = classical_robertson_audit(&a1, &a2, &psi)?;
        trials.push(TrialRecord::Audit { trial, label, audit });
    }
    let min_margin = trials
        .iter()
        .filter_map(|t| match t {
            TrialRecord::Audit { audit, .. } => Some(audit.margin),
            _ => None,
        })
        .fold(f64::INFINITY, f64::min);
    let aggregate = Aggregate { min_margin: Some(min_margin), ..empty_aggregate() };
    finish(cfg, 1, trials, aggregate, started)
}

/// Dispatches on `cfg.kind`.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport, CliError> {
    match cfg.kind {
        ExperimentKind::Identity => run_identity_suite(cfg),
        ExperimentKind::Estimate => run_estimate_suite(cfg),
        ExperimentKind::RobertsonAudit => run_robertson_audit(cfg),
    }
}
