//! Domain types shared by all modules plus elementary distribution
//! arithmetic: probability vectors, empirical samples, channels, smoothing
//! kernels, distortion functions and the Kullback-Leibler divergence.
//!
//! All divergences are in nats. Probability vectors are validated to sum to
//! one within `NORMALIZATION_TOL`; inputs outside that tolerance are rejected
//! rather than renormalized so calibration artifacts cannot mask data errors.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::error::{RdgofError, Result};

/// Tolerance on the sum of a probability vector (and of each channel row).
pub const NORMALIZATION_TOL: f64 = 1e-12;

/// A probability vector over a finite alphabet.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct DiscreteDistribution {
    probs: Vec<f64>,
}

impl DiscreteDistribution {
    /// Validates nonnegativity and normalization within [`NORMALIZATION_TOL`].
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(RdgofError::Empty("probability vector"));
        }
        for (i, &p) in probs.iter().enumerate() {
            if !(p >= 0.0) {
                return Err(RdgofError::NegativeEntry { index: i, value: p });
            }
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > NORMALIZATION_TOL {
            return Err(RdgofError::NotNormalized { sum });
        }
        Ok(Self { probs })
    }

    /// The uniform distribution on an alphabet of size `l`.
    pub fn uniform(l: usize) -> Self {
        assert!(l >= 1, "alphabet size must be positive");
        Self {
            probs: vec![1.0 / l as f64; l],
        }
    }

    /// Constructor for internally computed vectors whose normalization is
    /// guaranteed up to floating-point rounding.
    pub(crate) fn from_normalized(probs: Vec<f64>) -> Self {
        debug_assert!(!probs.is_empty());
        debug_assert!((probs.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        Self { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn alphabet_size(&self) -> usize {
        self.probs.len()
    }
}

/// Raw observations together with their kind.
///
/// Circular angles are reduced modulo 2π to `[0, 2π)` on ingestion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum EmpiricalSample {
    Categorical(Vec<usize>),
    Real(Vec<f64>),
    Circular(Vec<f64>),
}

impl EmpiricalSample {
    pub fn categorical(labels: Vec<usize>) -> Result<Self> {
        if labels.is_empty() {
            return Err(RdgofError::Empty("categorical sample"));
        }
        Ok(Self::Categorical(labels))
    }

    pub fn real(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(RdgofError::Empty("real sample"));
        }
        if let Some(&v) = values.iter().find(|v| !v.is_finite()) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "observation",
                value: v,
                range: "finite reals",
            });
        }
        Ok(Self::Real(values))
    }

    pub fn circular(angles: Vec<f64>) -> Result<Self> {
        if angles.is_empty() {
            return Err(RdgofError::Empty("circular sample"));
        }
        if let Some(&a) = angles.iter().find(|a| !a.is_finite()) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "angle",
                value: a,
                range: "finite reals",
            });
        }
        let reduced = angles.into_iter().map(reduce_angle).collect();
        Ok(Self::Circular(reduced))
    }

    pub fn len(&self) -> usize {
        match self {
            Self::Categorical(v) => v.len(),
            Self::Real(v) => v.len(),
            Self::Circular(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Reduces an angle to `[0, 2π)`.
pub fn reduce_angle(theta: f64) -> f64 {
    let r = theta.rem_euclid(TAU);
    // rem_euclid can return exactly 2π for tiny negative inputs.
    if r >= TAU { 0.0 } else { r }
}

/// Empirical distribution of a categorical sample over `0..l`.
pub fn empirical_distribution(sample: &EmpiricalSample, l: usize) -> Result<DiscreteDistribution> {
    let labels = match sample {
        EmpiricalSample::Categorical(labels) => labels,
        _ => {
            return Err(RdgofError::Incompatible(
                "empirical_distribution requires a categorical sample".into(),
            ));
        }
    };
    let mut counts = vec![0u64; l];
    for &label in labels {
        if label >= l {
            return Err(RdgofError::LabelOutOfRange { label, alphabet: l });
        }
        counts[label] += 1;
    }
    let n = labels.len() as f64;
    Ok(DiscreteDistribution::from_normalized(
        counts.iter().map(|&c| c as f64 / n).collect(),
    ))
}

/// Kullback-Leibler divergence `Σ p_i ln(p_i/q_i)` in nats.
///
/// Uses the convention `0 ln(0/q) = 0` and returns `+∞` when `p` puts mass
/// where `q` does not.
pub fn divergence_discrete(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(RdgofError::LengthMismatch {
            left: p.alphabet_size(),
            right: q.alphabet_size(),
        });
    }
    let mut sum = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi > 0.0 {
            if qi == 0.0 {
                return Ok(f64::INFINITY);
            }
            sum += pi * (pi / qi).ln();
        }
    }
    Ok(sum)
}

/// Pearson chi-square statistic `Σ (p_i - q_i)² / q_i`.
pub fn pearson_chi2(p: &DiscreteDistribution, q: &DiscreteDistribution) -> Result<f64> {
    if p.alphabet_size() != q.alphabet_size() {
        return Err(RdgofError::LengthMismatch {
            left: p.alphabet_size(),
            right: q.alphabet_size(),
        });
    }
    let mut sum = 0.0;
    for (i, (&pi, &qi)) in p.probs().iter().zip(q.probs()).enumerate() {
        if qi == 0.0 {
            return Err(RdgofError::ZeroReference(i));
        }
        let d = pi - qi;
        sum += d * d / qi;
    }
    Ok(sum)
}

/// Row-stochastic matrix: `data[x * cols + y]` is the probability of
/// reproducing `x` as `y`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteChannel {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DiscreteChannel {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(RdgofError::LengthMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        for (i, &w) in data.iter().enumerate() {
            if !(w >= 0.0) {
                return Err(RdgofError::NegativeEntry { index: i, value: w });
            }
        }
        for x in 0..rows {
            let sum: f64 = data[x * cols..(x + 1) * cols].iter().sum();
            if (sum - 1.0).abs() > NORMALIZATION_TOL {
                return Err(RdgofError::NotNormalized { sum });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub(crate) fn from_rows_unchecked(rows: usize, cols: usize, data: Vec<f64>) -> Self {
        debug_assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.cols..(x + 1) * self.cols]
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }

    /// Output marginal `q(y) = Σ_x p(x) W(y|x)`.
    pub fn apply(&self, p: &DiscreteDistribution) -> Result<DiscreteDistribution> {
        if p.alphabet_size() != self.rows {
            return Err(RdgofError::LengthMismatch {
                left: p.alphabet_size(),
                right: self.rows,
            });
        }
        let mut out = vec![0.0; self.cols];
        for (x, &px) in p.probs().iter().enumerate() {
            if px == 0.0 {
                continue;
            }
            for (y, &w) in self.row(x).iter().enumerate() {
                out[y] += px * w;
            }
        }
        Ok(DiscreteDistribution::from_normalized(out))
    }
}

/// The smoothing channels used as test channels.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SmoothingKernel {
    /// `x -> α δ_x + (1-α) U` on an alphabet of size `l`.
    HammingMixture { alpha: f64, alphabet_size: usize },
    /// `x -> N(αx, 1-α²)` on the real line, `0 ≤ α < 1`.
    GaussianChannel { alpha: f64 },
    /// Circular convolution with a von Mises density of concentration `κ`.
    VonMisesSmoother { kappa: f64 },
    /// A general finite test channel.
    Discrete(DiscreteChannel),
}

impl SmoothingKernel {
    pub fn hamming(alpha: f64, alphabet_size: usize) -> Result<Self> {
        if !(0.0..=1.0).contains(&alpha) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "alpha",
                value: alpha,
                range: "[0, 1]",
            });
        }
        if alphabet_size == 0 {
            return Err(RdgofError::Empty("alphabet"));
        }
        Ok(Self::HammingMixture {
            alpha,
            alphabet_size,
        })
    }

    /// `α = 1` is reserved for the exact likelihood-ratio degenerate case and
    /// rejected here: the smoothed law has no density.
    pub fn gaussian(alpha: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&alpha) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "alpha",
                value: alpha,
                range: "[0, 1)",
            });
        }
        Ok(Self::GaussianChannel { alpha })
    }

    pub fn von_mises(kappa: f64) -> Result<Self> {
        if !(kappa >= 0.0) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "kappa",
                value: kappa,
                range: "[0, ∞)",
            });
        }
        Ok(Self::VonMisesSmoother { kappa })
    }
}

/// A point on the rate-distortion curve; `slope` is the Lagrange parameter β.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RdPoint {
    pub rate: f64,
    pub distortion: f64,
    pub slope: f64,
}

/// Entrywise-nonnegative distortion matrix `d(x, y)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistortionMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DistortionMatrix {
    pub fn new(rows: usize, cols: usize, data: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || data.len() != rows * cols {
            return Err(RdgofError::LengthMismatch {
                left: data.len(),
                right: rows * cols,
            });
        }
        for (i, &d) in data.iter().enumerate() {
            if !(d >= 0.0) {
                return Err(RdgofError::NegativeEntry { index: i, value: d });
            }
        }
        Ok(Self { rows, cols, data })
    }

    pub fn hamming(l: usize) -> Self {
        let mut data = vec![1.0; l * l];
        for x in 0..l {
            data[x * l + x] = 0.0;
        }
        Self {
            rows: l,
            cols: l,
            data,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, x: usize) -> &[f64] {
        &self.data[x * self.cols..(x + 1) * self.cols]
    }

    pub fn entry(&self, x: usize, y: usize) -> f64 {
        self.data[x * self.cols + y]
    }
}

/// Distortion functions on the supported sample spaces.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum DistortionSpec {
    Matrix(DistortionMatrix),
    Hamming(usize),
    SquaredEuclideanReal,
    SquaredChordCircle,
}

/// Squared Euclidean distance between two points on the unit circle:
/// `2 - 2 cos(θ₂-θ₁) = 4 sin²((θ₂-θ₁)/2)`, with range `[0, 4]`.
pub fn squared_chord(theta1: f64, theta2: f64) -> f64 {
    let s = (0.5 * (theta2 - theta1)).sin();
    4.0 * s * s
}
