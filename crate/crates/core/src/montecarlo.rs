//! Streaming Monte Carlo estimation of quadratic-functional moments.
//!
//! Samples are drawn from substreams `0..count` and grouped into fixed-size
//! chunks. Each chunk is accumulated independently (possibly in parallel) and
//! the chunk partials are merged by a fixed pairwise tree, so the result does
//! not depend on how many workers ran.

use nalgebra::DVector;
use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::gaussian_field::{quadratic_form, CovarianceFactor, SampleStream};
use crate::hilbert::{ComplexMatrix, HermitianOperator};
use crate::rng::{keyed_rng, standard_complex_normal};

pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

/// Samples per partial accumulator. Part of the reproducibility contract:
/// changing it changes the floating-point reduction order.
const CHUNK: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorConfig {
    pub sample_count: u64,
    pub base_seed: u64,
    /// Advisory thread count; never affects results.
    pub worker_hint: usize,
    pub z_threshold: f64,
}

impl EstimatorConfig {
    pub fn new(sample_count: u64, base_seed: u64) -> Self {
        Self { sample_count, base_seed, worker_hint: 1, z_threshold: DEFAULT_Z_THRESHOLD }
    }

    pub fn with_workers(mut self, workers: usize) -> Self {
        self.worker_hint = workers;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.sample_count < 2 {
            return Err(Error::InvalidEstimator(format!("sample_count {} < 2", self.sample_count)));
        }
        if self.worker_hint == 0 {
            return Err(Error::InvalidEstimator("worker_hint must be positive".into()));
        }
        if self.z_threshold.is_nan() || self.z_threshold <= 0.0 {
            return Err(Error::InvalidEstimator(format!("z_threshold {} must be positive", self.z_threshold)));
        }
        Ok(())
    }
}

/// Empirical moments of a complex-valued statistic. Variance and higher
/// moments refer to the real part.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EstimatorSummary {
    pub mean: Complex64,
    pub variance: f64,
    pub std_error_mean: f64,
    /// `√((m₄ - s⁴)/N)`; approximate for small `N`.
    pub std_error_variance: f64,
    pub count: u64,
}

/// Streaming accumulator for the mean of a complex value and the central
/// moments of its real part up to order four.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct MomentAccumulator {
    count: u64,
    mean: f64,
    mean_im: f64,
    m2: f64,
    m3: f64,
    m4: f64,
}

impl MomentAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn push(&mut self, value: Complex64) {
        let n1 = self.count as f64;
        self.count += 1;
        let n = self.count as f64;
        let delta = value.re - self.mean;
        let delta_n = delta / n;
        let delta_n2 = delta_n * delta_n;
        let term1 = delta * delta_n * n1;
        self.mean += delta_n;
        self.m4 += term1 * delta_n2 * (n * n - 3.0 * n + 3.0) + 6.0 * delta_n2 * self.m2 - 4.0 * delta_n * self.m3;
        self.m3 += term1 * delta_n * (n - 2.0) - 3.0 * delta_n * self.m2;
        self.m2 += term1;
        self.mean_im += (value.im - self.mean_im) / n;
    }

    /// Combines two disjoint sample sets.
    pub fn merge(&self, other: &Self) -> Self {
        if self.count == 0 {
            return *other;
        }
        if other.count == 0 {
            return *self;
        }
        let (na, nb) = (self.count as f64, other.count as f64);
        let n = na + nb;
        let delta = other.mean - self.mean;
        let d2 = delta * delta;
        let mean = self.mean + delta * nb / n;
        let mean_im = self.mean_im + (other.mean_im - self.mean_im) * nb / n;
        let m2 = self.m2 + other.m2 + d2 * na * nb / n;
        let m3 = self.m3
            + other.m3
            + d2 * delta * na * nb * (na - nb) / (n * n)
            + 3.0 * delta * (na * other.m2 - nb * self.m2) / n;
        let m4 = self.m4
            + other.m4
            + d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (n * n * n)
            + 6.0 * d2 * (na * na * other.m2 + nb * nb * self.m2) / (n * n)
            + 4.0 * delta * (na * other.m3 - nb * self.m3) / n;
        Self { count: self.count + other.count, mean, mean_im, m2, m3, m4 }
    }

    pub fn mean(&self) -> Complex64 {
        Complex64::new(self.mean, self.mean_im)
    }

    /// Unbiased variance of the real part.
    pub fn variance(&self) -> f64 {
        if self.count < 2 {
            0.0
        } else {
            (self.m2 / (self.count - 1) as f64).max(0.0)
        }
    }

    /// Fourth central moment (population form).
    pub fn fourth_central_moment(&self) -> f64 {
        if self.count == 0 {
            0.0
        } else {
            self.m4 / self.count as f64
        }
    }

    pub fn summary(&self) -> EstimatorSummary {
        let n = self.count as f64;
        let variance = self.variance();
        let (se_mean, se_var) = if self.count == 0 {
            (0.0, 0.0)
        } else {
            let s4 = variance * variance;
            ((variance / n).sqrt(), ((self.fourth_central_moment() - s4).max(0.0) / n).sqrt())
        };
        EstimatorSummary {
            mean: self.mean(),
            variance,
            std_error_mean: se_mean,
            std_error_variance: se_var,
            count: self.count,
        }
    }
}

/// Runs `stat` on the field drawn from every substream `0..sample_count` and
/// reduces the results deterministically.
fn estimate_with<F>(factor: &CovarianceFactor, cfg: &EstimatorConfig, stat: F) -> Result<EstimatorSummary>
where
    F: Fn(&DVector<Complex64>) -> Complex64 + Sync,
{
    cfg.validate()?;
    let chunks = cfg.sample_count.div_ceil(CHUNK);
    let run_chunk = |chunk: u64| {
        let start = chunk * CHUNK;
        let end = (start + CHUNK).min(cfg.sample_count);
        let n = factor.dim();
        let mut acc = MomentAccumulator::new();
        let mut z = DVector::<Complex64>::zeros(n);
        let mut phi = DVector::<Complex64>::zeros(n);
        for index in start..end {
            let stream = SampleStream::new(cfg.base_seed, index);
            let mut rng = keyed_rng(stream.base_seed, stream.substream_index);
            for zi in z.iter_mut() {
                *zi = standard_complex_normal(&mut rng);
            }
            phi.gemv(Complex64::new(1.0, 0.0), factor.factor(), &z, Complex64::new(0.0, 0.0));
            acc.push(stat(&phi));
        }
        acc
    };

    let partials: Vec<MomentAccumulator> = if cfg.worker_hint <= 1 {
        (0..chunks).map(run_chunk).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.worker_hint)
            .build()
            .map_err(|e| Error::InvalidEstimator(format!("thread pool: {e}")))?;
        pool.install(|| (0..chunks).into_par_iter().map(run_chunk).collect())
    };
    Ok(tree_reduce(partials).summary())
}

/// Pairwise reduction in a fixed order: `((p0+p1)+(p2+p3))+...`.
fn tree_reduce(mut level: Vec<MomentAccumulator>) -> MomentAccumulator {
    if level.is_empty() {
        return MomentAccumulator::new();
    }
    while level.len() > 1 {
        level = level.chunks(2).map(|pair| if pair.len() == 2 { pair[0].merge(&pair[1]) } else { pair[0] }).collect();
    }
    level[0]
}

/// Empirical moments of `f_A(φ)` for `φ ~ N(0, LL†)`.
pub fn estimate_moments(
    a: &ComplexMatrix,
    factor: &CovarianceFactor,
    cfg: &EstimatorConfig,
) -> Result<EstimatorSummary> {
    check_dim(factor.dim(), a.dim())?;
    let m = a.as_matrix();
    estimate_with(factor, cfg, |phi| quadratic_form(m, phi))
}

/// Empirical moments of the product `f_{A₁}(φ) f_{A₂}(φ)`.
pub fn estimate_cross_moment(
    a1: &HermitianOperator,
    a2: &HermitianOperator,
    factor: &CovarianceFactor,
    cfg: &EstimatorConfig,
) -> Result<EstimatorSummary> {
    check_dim(factor.dim(), a1.dim())?;
    check_dim(factor.dim(), a2.dim())?;
    let (m1, m2) = (a1.as_matrix(), a2.as_matrix());
    estimate_with(factor, cfg, |phi| quadratic_form(m1, phi) * quadratic_form(m2, phi))
}

/// z-test of an empirical value against its analytic target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ComparisonRecord {
    pub analytic: f64,
    pub empirical: f64,
    #[serde(serialize_with = "serialize_extended_f64")]
    pub z_score: f64,
    pub passed: bool,
}

/// `z = (empirical - analytic) / std_error`. With zero standard error, an
/// exact match scores 0 and any difference scores ±∞.
pub fn compare(analytic: f64, empirical: f64, std_error: f64, z_threshold: f64) -> ComparisonRecord {
    let diff = empirical - analytic;
    let z_score = if std_error > 0.0 {
        diff / std_error
    } else if diff == 0.0 {
        0.0
    } else {
        f64::INFINITY.copysign(diff)
    };
    ComparisonRecord { analytic, empirical, z_score, passed: z_score.abs() <= z_threshold }
}

/// Writes non-finite values as the strings `"inf"`, `"-inf"` or `"nan"`.
pub fn serialize_extended_f64<S: serde::Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else if v.is_nan() {
        s.serialize_str("nan")
    } else if *v > 0.0 {
        s.serialize_str("inf")
    } else {
        s.serialize_str("-inf")
    }
}
