//! Monte Carlo null calibration, power estimation, consistency checks, exact
//! small-case Bahadur slope experiments and asymptotic-normality diagnostics.
//!
//! Every replication draws its generator from a counter-based derivation of
//! `(master seed, replication index)`, so parallel and serial runs produce
//! identical results and any replication can be reproduced in isolation.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use statrs::function::factorial::ln_binomial;

use std::f64::consts::TAU;

use crate::dist::{DiscreteDistribution, EmpiricalSample, empirical_distribution};
use crate::error::{RdgofError, Result};
use crate::kernels::{
    alpha_from_hamming_distortion, gaussian_alpha_from_distortion, hamming_distortion_of_alpha,
    vonmises_kappa_from_distortion,
};
use crate::statistics::{
    QuadratureConfig, rayleigh_statistic, rd_statistic_circular, rd_statistic_gaussian,
    rd_statistic_hamming, second_moment,
};

/// The null hypotheses of the three worked examples.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum NullModel {
    UniformDiscrete { alphabet_size: usize },
    StandardNormal,
    UniformCircle,
}

impl NullModel {
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> EmpiricalSample {
        match *self {
            NullModel::UniformDiscrete { alphabet_size } => EmpiricalSample::Categorical(
                (0..n).map(|_| rng.random_range(0..alphabet_size)).collect(),
            ),
            NullModel::StandardNormal => {
                EmpiricalSample::Real((0..n).map(|_| StandardNormal.sample(rng)).collect())
            }
            NullModel::UniformCircle => {
                EmpiricalSample::Circular((0..n).map(|_| rng.random_range(0.0..TAU)).collect())
            }
        }
    }
}

/// Statistic to evaluate on a sample.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "statistic", rename_all = "snake_case")]
pub enum StatisticKind {
    HammingRd {
        alpha: f64,
        alphabet_size: usize,
    },
    GaussianRd {
        alpha: f64,
        quad: QuadratureConfig,
    },
    CircularRd {
        kappa: f64,
        quad: QuadratureConfig,
    },
    Rayleigh,
    SecondMoment,
}

impl StatisticKind {
    pub fn evaluate(&self, sample: &EmpiricalSample) -> Result<f64> {
        match (self, sample) {
            (
                StatisticKind::HammingRd {
                    alpha,
                    alphabet_size,
                },
                s @ EmpiricalSample::Categorical(_),
            ) => {
                let emp = empirical_distribution(s, *alphabet_size)?;
                rd_statistic_hamming(&emp, *alpha)
            }
            (StatisticKind::GaussianRd { alpha, quad }, EmpiricalSample::Real(values)) => {
                rd_statistic_gaussian(values, *alpha, quad)
            }
            (StatisticKind::CircularRd { kappa, quad }, EmpiricalSample::Circular(angles)) => {
                rd_statistic_circular(angles, *kappa, quad)
            }
            (StatisticKind::Rayleigh, EmpiricalSample::Circular(angles)) => {
                Ok(rayleigh_statistic(angles).resultant_norm_sq)
            }
            (StatisticKind::SecondMoment, EmpiricalSample::Real(values)) => {
                Ok(second_moment(values))
            }
            _ => Err(RdgofError::Incompatible(format!(
                "statistic {self:?} cannot be evaluated on this sample kind"
            ))),
        }
    }
}

/// Generator for replication `rep` of stream `seed`; deterministic regardless
/// of execution order.
pub fn replication_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // Stream 0 is left to ad hoc draws.
    rng.set_stream((stream).wrapping_add(1));
    rng
}

/// Draws `reps` independent null samples of size `n` and evaluates the
/// statistic on each; deterministic given `seed`.
pub fn simulate_null(
    model: &NullModel,
    statistic: &StatisticKind,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<Vec<f64>> {
    simulate_stream(model, statistic, n, reps, seed, 0)
}

fn simulate_stream(
    model: &NullModel,
    statistic: &StatisticKind,
    n: usize,
    reps: usize,
    seed: u64,
    stream_base: u64,
) -> Result<Vec<f64>> {
    if reps == 0 {
        return Err(RdgofError::Empty("replications"));
    }
    (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(seed, stream_base + rep as u64);
            let sample = model.sample(n, &mut rng);
            statistic.evaluate(&sample).map_err(|e| RdgofError::Replication {
                index: rep,
                source: Box::new(e),
            })
        })
        .collect()
}

/// Conservative critical value: the `⌈(1-α_sig)·R⌉`-th order statistic, with
/// no interpolation.
pub fn critical_value(null_samples: &[f64], significance: f64) -> Result<f64> {
    if null_samples.is_empty() {
        return Err(RdgofError::Empty("null samples"));
    }
    if !(significance > 0.0 && significance < 1.0) {
        return Err(RdgofError::ParameterOutOfRange {
            name: "significance",
            value: significance,
            range: "(0, 1)",
        });
    }
    let r = null_samples.len();
    let rank = ((1.0 - significance) * r as f64).ceil() as usize;
    let rank = rank.clamp(1, r);
    let mut sorted = null_samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(sorted[rank - 1])
}

/// Add-one permutation p-value: `(1 + #{samples ≥ observed}) / (R + 1)`.
pub fn p_value(observed: f64, null_samples: &[f64]) -> f64 {
    let count = null_samples.iter().filter(|&&s| s >= observed).count();
    (1 + count) as f64 / (null_samples.len() + 1) as f64
}

/// Result of a null calibration run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CalibrationResult {
    pub null_samples: Vec<f64>,
    pub critical_value: f64,
    pub significance: f64,
    pub replications: usize,
    pub seed: u64,
}

pub fn calibrate(
    model: &NullModel,
    statistic: &StatisticKind,
    n: usize,
    reps: usize,
    seed: u64,
    significance: f64,
) -> Result<CalibrationResult> {
    let null_samples = simulate_null(model, statistic, n, reps, seed)?;
    let critical = critical_value(&null_samples, significance)?;
    Ok(CalibrationResult {
        null_samples,
        critical_value: critical,
        significance,
        replications: reps,
        seed,
    })
}

/// Data-generating alternatives for power studies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "snake_case")]
pub enum AlternativeModel {
    Discrete(DiscreteDistribution),
    Gaussian { mean: f64, std_dev: f64 },
    VonMises { center: f64, kappa: f64 },
}

impl AlternativeModel {
    pub fn sample(&self, n: usize, rng: &mut ChaCha8Rng) -> EmpiricalSample {
        match self {
            AlternativeModel::Discrete(p) => {
                let probs = p.probs();
                EmpiricalSample::Categorical(
                    (0..n)
                        .map(|_| {
                            let u: f64 = rng.random_range(0.0..1.0);
                            let mut acc = 0.0;
                            for (i, &pi) in probs.iter().enumerate() {
                                acc += pi;
                                if u < acc {
                                    return i;
                                }
                            }
                            probs.len() - 1
                        })
                        .collect(),
                )
            }
            AlternativeModel::Gaussian { mean, std_dev } => EmpiricalSample::Real(
                (0..n)
                    .map(|_| {
                        let z: f64 = StandardNormal.sample(rng);
                        mean + std_dev * z
                    })
                    .collect(),
            ),
            AlternativeModel::VonMises { center, kappa } => EmpiricalSample::Circular(
                (0..n).map(|_| sample_von_mises(*center, *kappa, rng)).collect(),
            ),
        }
    }
}

/// Best-Fisher rejection sampler for the von Mises distribution.
fn sample_von_mises(center: f64, kappa: f64, rng: &mut ChaCha8Rng) -> f64 {
    if kappa <= 1e-12 {
        return rng.random_range(0.0..TAU);
    }
    let a = 1.0 + (1.0 + 4.0 * kappa * kappa).sqrt();
    let b = (a - (2.0 * a).sqrt()) / (2.0 * kappa);
    let r = (1.0 + b * b) / (2.0 * b);
    loop {
        let u1: f64 = rng.random_range(0.0..1.0);
        let z = (std::f64::consts::PI * u1).cos();
        let f = (1.0 + r * z) / (r + z);
        let c = kappa * (r - f);
        let u2: f64 = rng.random_range(0.0..1.0);
        if c * (2.0 - c) - u2 > 0.0 || (c / u2).ln() + 1.0 - c >= 0.0 {
            let u3: f64 = rng.random_range(0.0..1.0);
            let theta = if u3 > 0.5 {
                center + f.acos()
            } else {
                center - f.acos()
            };
            return crate::dist::reduce_angle(theta);
        }
    }
}

/// Rejection frequency against a calibrated threshold, with its binomial
/// standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerEstimate {
    pub power: f64,
    pub std_error: f64,
}

pub fn power_estimate(
    statistic: &StatisticKind,
    critical: f64,
    alternative: &AlternativeModel,
    n: usize,
    reps: usize,
    seed: u64,
) -> Result<PowerEstimate> {
    if reps == 0 {
        return Err(RdgofError::Empty("replications"));
    }
    let rejections: Vec<bool> = (0..reps)
        .into_par_iter()
        .map(|rep| {
            let mut rng = replication_rng(seed, rep as u64);
            let sample = alternative.sample(n, &mut rng);
            statistic
                .evaluate(&sample)
                .map(|s| s >= critical)
                .map_err(|e| RdgofError::Replication {
                    index: rep,
                    source: Box::new(e),
                })
        })
        .collect::<Result<_>>()?;
    let hits = rejections.iter().filter(|&&r| r).count();
    let p = hits as f64 / reps as f64;
    Ok(PowerEstimate {
        power: p,
        std_error: (p * (1.0 - p) / reps as f64).sqrt(),
    })
}

/// Distortion schedule `d_n = n^{-exponent}` for the consistency checks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsistencyConfig {
    pub distortion_exponent: f64,
    pub replications: usize,
    pub seed: u64,
}

impl Default for ConsistencyConfig {
    fn default() -> Self {
        Self {
            distortion_exponent: 0.25,
            replications: 500,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyEntry {
    pub n: usize,
    pub distortion: f64,
    pub median: f64,
}

#[derive(Debug, Clone, Serialize)]
pub struct AlternativeBound {
    pub n: usize,
    pub fifth_percentile: f64,
    pub target: f64,
    pub ok: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct ConsistencyReport {
    pub entries: Vec<ConsistencyEntry>,
    pub isotonic_residual: f64,
    pub noise_estimate: f64,
    /// Medians under the null are within Monte Carlo noise of a
    /// non-increasing sequence.
    pub null_monotone_ok: bool,
    pub alternative: Option<AlternativeBound>,
}

/// Alternative-side inputs of [`consistency_check`]: at the largest grid
/// size, the 5th percentile of the statistic must exceed
/// `target_divergence - epsilon`.
#[derive(Debug, Clone)]
pub struct AlternativeSpec {
    pub model: AlternativeModel,
    pub target_divergence: f64,
    pub epsilon: f64,
}

fn statistic_at_distortion(model: &NullModel, d: f64, quad: &QuadratureConfig) -> Result<StatisticKind> {
    match *model {
        NullModel::UniformDiscrete { alphabet_size } => {
            let max = hamming_distortion_of_alpha(0.0, alphabet_size);
            let alpha = alpha_from_hamming_distortion(d.min(max), alphabet_size)?;
            Ok(StatisticKind::HammingRd {
                alpha,
                alphabet_size,
            })
        }
        NullModel::StandardNormal => Ok(StatisticKind::GaussianRd {
            alpha: gaussian_alpha_from_distortion(d.min(2.0))?,
            quad: quad.clone(),
        }),
        NullModel::UniformCircle => Ok(StatisticKind::CircularRd {
            kappa: vonmises_kappa_from_distortion(d.min(2.0 - 1e-12))?,
            quad: quad.clone(),
        }),
    }
}

fn median(sorted: &[f64]) -> f64 {
    let r = sorted.len();
    if r % 2 == 1 {
        sorted[r / 2]
    } else {
        0.5 * (sorted[r / 2 - 1] + sorted[r / 2])
    }
}

/// Pool-adjacent-violators fit of a non-increasing sequence.
fn antitonic_fit(values: &[f64]) -> Vec<f64> {
    // Fit -v as non-decreasing.
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &v in values {
        let mut mean = -v;
        let mut count = 1;
        while let Some(&(prev_mean, prev_count)) = blocks.last() {
            if prev_mean > mean {
                blocks.pop();
                mean = (mean * count as f64 + prev_mean * prev_count as f64)
                    / (count + prev_count) as f64;
                count += prev_count;
            } else {
                break;
            }
        }
        blocks.push((mean, count));
    }
    let mut out = Vec::with_capacity(values.len());
    for &(mean, count) in &blocks {
        out.extend(std::iter::repeat_n(-mean, count));
    }
    out
}

/// Bootstrap standard error of the median (seeded, 200 resamples).
fn median_bootstrap_std(samples: &[f64], rng: &mut ChaCha8Rng) -> f64 {
    const B: usize = 200;
    let mut medians = Vec::with_capacity(B);
    let mut buf = vec![0.0; samples.len()];
    for _ in 0..B {
        for slot in buf.iter_mut() {
            *slot = samples[rng.random_range(0..samples.len())];
        }
        buf.sort_by(f64::total_cmp);
        medians.push(median(&buf));
    }
    let mean = medians.iter().sum::<f64>() / B as f64;
    (medians.iter().map(|m| (m - mean) * (m - mean)).sum::<f64>() / (B - 1) as f64).sqrt()
}

/// Empirical check of the consistency theorems: under the null, the median
/// statistic along a slowly decreasing distortion schedule falls toward 0;
/// under a fixed alternative the statistic stays above the divergence from
/// the null, up to `epsilon`.
pub fn consistency_check(
    model: &NullModel,
    n_grid: &[usize],
    config: &ConsistencyConfig,
    quad: &QuadratureConfig,
    alternative: Option<&AlternativeSpec>,
) -> Result<ConsistencyReport> {
    if n_grid.is_empty() {
        return Err(RdgofError::Empty("sample-size grid"));
    }
    let mut entries = Vec::with_capacity(n_grid.len());
    let mut noise = 0.0f64;
    for (gi, &n) in n_grid.iter().enumerate() {
        let d = (n as f64).powf(-config.distortion_exponent);
        let statistic = statistic_at_distortion(model, d, quad)?;
        let mut samples = simulate_stream(
            model,
            &statistic,
            n,
            config.replications,
            config.seed,
            (gi as u64) << 32,
        )?;
        samples.sort_by(f64::total_cmp);
        let mut boot_rng = replication_rng(config.seed, (gi as u64) | (1 << 62));
        noise = noise.max(median_bootstrap_std(&samples, &mut boot_rng));
        entries.push(ConsistencyEntry {
            n,
            distortion: d,
            median: median(&samples),
        });
    }
    let medians: Vec<f64> = entries.iter().map(|e| e.median).collect();
    let fit = antitonic_fit(&medians);
    let isotonic_residual = medians
        .iter()
        .zip(&fit)
        .map(|(m, f)| (m - f).abs())
        .fold(0.0f64, f64::max);
    let null_monotone_ok = isotonic_residual <= 2.0 * noise + 1e-12;

    let alternative = match alternative {
        None => None,
        Some(spec) => {
            let n = *n_grid.iter().max().unwrap();
            let d = (n as f64).powf(-config.distortion_exponent);
            let statistic = statistic_at_distortion(model, d, quad)?;
            let mut samples: Vec<f64> = (0..config.replications)
                .into_par_iter()
                .map(|rep| {
                    let mut rng = replication_rng(config.seed, (rep as u64) | (1 << 61));
                    let sample = spec.model.sample(n, &mut rng);
                    statistic.evaluate(&sample).map_err(|e| RdgofError::Replication {
                        index: rep,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<_>>()?;
            samples.sort_by(f64::total_cmp);
            let idx = ((samples.len() as f64) * 0.05).floor() as usize;
            let fifth = samples[idx.min(samples.len() - 1)];
            Some(AlternativeBound {
                n,
                fifth_percentile: fifth,
                target: spec.target_divergence,
                ok: fifth >= spec.target_divergence - spec.epsilon,
            })
        }
    };

    Ok(ConsistencyReport {
        entries,
        isotonic_residual,
        noise_estimate: noise,
        null_monotone_ok,
        alternative,
    })
}

/// One exact tail evaluation of the binary uniformity test.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct BahadurPoint {
    pub n: usize,
    pub threshold: f64,
    /// `ln Pr₀(statistic ≥ threshold)`; `-∞` when the threshold is
    /// unachievable.
    pub tail_log_prob: f64,
    /// `-(1/n) ln Pr₀`; `+∞` flags an unachievable threshold.
    pub slope: f64,
}

/// Exact Bahadur slope experiment on the binary alphabet.
///
/// For each `n` the tail probability of the Hamming rate-distortion statistic
/// under the uniform null is computed by exact binomial enumeration in log
/// space, and `-(1/n) ln Pr` is reported. Restricted to `l = 2` and
/// `n ≤ 2000`: larger alphabets grow combinatorially and Monte Carlo cannot
/// resolve `e^{-nD}` tails.
pub fn bahadur_slope_exact(
    alternative: &DiscreteDistribution,
    alpha: f64,
    n_grid: &[usize],
    threshold: impl Fn(usize) -> f64,
) -> Result<Vec<BahadurPoint>> {
    if alternative.alphabet_size() != 2 {
        return Err(RdgofError::Incompatible(
            "exact enumeration is restricted to the binary alphabet".into(),
        ));
    }
    let mut out = Vec::with_capacity(n_grid.len());
    for &n in n_grid {
        if n == 0 || n > 2000 {
            return Err(RdgofError::ParameterOutOfRange {
                name: "n",
                value: n as f64,
                range: "[1, 2000]",
            });
        }
        let k_n = threshold(n);
        let ln_half = 0.5f64.ln();
        // logsumexp over qualifying counts.
        let mut max_term = f64::NEG_INFINITY;
        let mut terms = Vec::new();
        for k in 0..=n {
            let emp = DiscreteDistribution::from_normalized(vec![
                k as f64 / n as f64,
                (n - k) as f64 / n as f64,
            ]);
            let stat = rd_statistic_hamming(&emp, alpha)?;
            if stat >= k_n {
                let t = ln_binomial(n as u64, k as u64) + n as f64 * ln_half;
                max_term = max_term.max(t);
                terms.push(t);
            }
        }
        let (tail_log_prob, slope) = if terms.is_empty() {
            (f64::NEG_INFINITY, f64::INFINITY)
        } else {
            let lse = max_term
                + terms
                    .iter()
                    .map(|t| (t - max_term).exp())
                    .sum::<f64>()
                    .ln();
            // Probability 1 gives slope exactly 0.
            (lse.min(0.0), -(lse.min(0.0)) / n as f64)
        };
        out.push(BahadurPoint {
            n,
            threshold: k_n,
            tail_log_prob,
            slope,
        });
    }
    Ok(out)
}

/// Growth schedules for the Bahadur-efficiency conditions: bins
/// `k_n = ⌈n^γ⌉` with `γ < 1`, concentration `κ_n = n^{η'}` with `η' < η`
/// for some `η ∈ [1, 3)`, so `κ_n/n^η → 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BahadurSchedule {
    gamma: f64,
    eta: f64,
    eta_prime: f64,
}

impl BahadurSchedule {
    pub fn new(gamma: f64, eta: f64, eta_prime: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "gamma",
                value: gamma,
                range: "(0, 1)",
            });
        }
        if !(1.0..3.0).contains(&eta) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "eta",
                value: eta,
                range: "[1, 3)",
            });
        }
        if !(eta_prime < eta) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "eta_prime",
                value: eta_prime,
                range: "(-∞, eta)",
            });
        }
        Ok(Self {
            gamma,
            eta,
            eta_prime,
        })
    }

    pub fn bins(&self, n: usize) -> usize {
        (n as f64).powf(self.gamma).ceil() as usize
    }

    pub fn kappa(&self, n: usize) -> f64 {
        (n as f64).powf(self.eta_prime)
    }
}

/// Moment and Q-Q diagnostics for the asymptotic-normality conjecture;
/// report-only, no pass/fail.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct GaussianityDiagnostics {
    pub skewness: f64,
    pub excess_kurtosis: f64,
    pub qq_correlation: f64,
}

pub fn gaussianity_diagnostics(samples: &[f64]) -> Result<GaussianityDiagnostics> {
    let r = samples.len();
    if r < 100 {
        return Err(RdgofError::ParameterOutOfRange {
            name: "replications",
            value: r as f64,
            range: "[100, ∞)",
        });
    }
    let mean = samples.iter().sum::<f64>() / r as f64;
    let m2 = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / r as f64;
    if m2 <= 0.0 {
        return Err(RdgofError::Degenerate("constant samples"));
    }
    let m3 = samples.iter().map(|s| (s - mean).powi(3)).sum::<f64>() / r as f64;
    let m4 = samples.iter().map(|s| (s - mean).powi(4)).sum::<f64>() / r as f64;
    let skewness = m3 / m2.powf(1.5);
    let excess_kurtosis = m4 / (m2 * m2) - 3.0;

    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let normal = Normal::new(0.0, 1.0).expect("valid normal");
    // Blom plotting positions.
    let quantiles: Vec<f64> = (0..r)
        .map(|i| normal.inverse_cdf((i as f64 + 1.0 - 0.375) / (r as f64 + 0.25)))
        .collect();
    let qmean = quantiles.iter().sum::<f64>() / r as f64;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (s, q) in sorted.iter().zip(&quantiles) {
        let dx = s - mean;
        let dy = q - qmean;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    Ok(GaussianityDiagnostics {
        skewness,
        excess_kurtosis,
        qq_correlation: sxy / (sxx * syy).sqrt(),
    })
}
