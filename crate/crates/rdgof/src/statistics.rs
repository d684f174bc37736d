//! The rate-distortion test statistic for the three sample spaces, the
//! classical baseline statistics, and the mixture divergence decomposition.
//!
//! Continuous-case divergences use deterministic quadrature rather than Monte
//! Carlo: everything here is one-dimensional and reproducibility at tight
//! tolerances matters more than dimension scaling. The real line is truncated
//! at `truncation_sigmas` beyond the extreme component means; the discarded
//! mass contributes less than 1e-20 to the integrals at the default setting.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::dist::{DiscreteDistribution, reduce_angle};
use crate::error::{RdgofError, Result};
use crate::kernels::{apply_hamming, bessel_i0_scaled, bessel_ratio, ln_bessel_i0};
use crate::quad::{boole_point_count, composite_boole, periodic_mean};

/// Residual bound for the internally verified compensation identity.
const DECOMPOSITION_TOL: f64 = 1e-8;

/// Grid settings for the continuous-case quadratures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct QuadratureConfig {
    pub grid_points: usize,
    /// Real-line truncation, in units of the component standard deviation,
    /// beyond the extreme component means.
    pub truncation_sigmas: f64,
}

impl QuadratureConfig {
    pub fn new(grid_points: usize, truncation_sigmas: f64) -> Result<Self> {
        if grid_points < 16 {
            return Err(RdgofError::ParameterOutOfRange {
                name: "grid_points",
                value: grid_points as f64,
                range: "[16, ∞)",
            });
        }
        if !(truncation_sigmas > 0.0) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "truncation_sigmas",
                value: truncation_sigmas,
                range: "(0, ∞)",
            });
        }
        Ok(Self {
            grid_points,
            truncation_sigmas,
        })
    }
}

impl Default for QuadratureConfig {
    fn default() -> Self {
        Self {
            grid_points: 4096,
            truncation_sigmas: 10.0,
        }
    }
}

/// Mean resultant vector of an angular sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CircularSummary {
    pub resultant: (f64, f64),
    pub resultant_norm_sq: f64,
}

/// Rate-distortion statistic for the uniformity test on a finite alphabet:
/// `D(α emp + (1-α) U ‖ U)`.
///
/// Finite for every α < 1 since the mixture has full support; at α = 1 this
/// is exactly the likelihood-ratio statistic.
pub fn rd_statistic_hamming(emp: &DiscreteDistribution, alpha: f64) -> Result<f64> {
    let smoothed = apply_hamming(alpha, emp)?;
    let u = DiscreteDistribution::uniform(emp.alphabet_size());
    crate::dist::divergence_discrete(&smoothed, &u)
}

fn normal_pdf(x: f64, mean: f64, sigma: f64) -> f64 {
    let t = (x - mean) / sigma;
    (-0.5 * t * t).exp() / (sigma * TAU.sqrt())
}

/// Merges repeated keys into `(key, weight)` pairs with weights summing to 1.
fn merge_components(keys: impl Iterator<Item = f64>, n: usize) -> Vec<(f64, f64)> {
    let mut sorted: Vec<f64> = keys.collect();
    sorted.sort_by(f64::total_cmp);
    let inv_n = 1.0 / n as f64;
    let mut out: Vec<(f64, usize)> = Vec::new();
    for v in sorted {
        match out.last_mut() {
            Some((k, c)) if *k == v => *c += 1,
            _ => out.push((v, 1)),
        }
    }
    out.into_iter()
        .map(|(k, c)| (k, c as f64 * inv_n))
        .collect()
}

/// Rate-distortion statistic for the normality test: KL divergence of the
/// smoothed empirical mixture `Σ (1/n) N(αxᵢ, 1-α²)` from `N(0, 1)`.
pub fn rd_statistic_gaussian(values: &[f64], alpha: f64, quad: &QuadratureConfig) -> Result<f64> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(RdgofError::ParameterOutOfRange {
            name: "alpha",
            value: alpha,
            range: "[0, 1) (no density exists at alpha = 1)",
        });
    }
    if values.is_empty() {
        return Err(RdgofError::Empty("real sample"));
    }
    // Repeated means are merged with multiplicity weights before quadrature;
    // the result is unchanged.
    let comps = merge_components(values.iter().map(|&x| alpha * x), values.len());
    let sigma = (1.0 - alpha * alpha).sqrt();
    let trunc = quad.truncation_sigmas * sigma;
    let a = comps.first().unwrap().0 - trunc;
    let b = comps.last().unwrap().0 + trunc;
    let g = boole_point_count(quad.grid_points);
    let h = (b - a) / (g - 1) as f64;

    let mut mix = vec![0.0; g];
    for &(mean, weight) in &comps {
        let lo = (((mean - trunc - a) / h).ceil().max(0.0)) as usize;
        let hi = (((mean + trunc - a) / h).floor() as usize).min(g - 1);
        for k in lo..=hi {
            let x = a + k as f64 * h;
            mix[k] += weight * normal_pdf(x, mean, sigma);
        }
    }

    let f: Vec<f64> = mix
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            if p > 0.0 {
                let x = a + k as f64 * h;
                p * (p.ln() - normal_pdf(x, 0.0, 1.0).ln())
            } else {
                0.0
            }
        })
        .collect();
    Ok(composite_boole(&f, h).max(0.0))
}

/// Rate-distortion statistic for uniformity of angular data: KL divergence of
/// the von Mises mixture `Σ (1/n) vM(θᵢ, κ)` from the uniform circle density,
/// by the periodic trapezoid rule.
pub fn rd_statistic_circular(angles: &[f64], kappa: f64, quad: &QuadratureConfig) -> Result<f64> {
    if !(kappa >= 0.0 && kappa.is_finite()) {
        return Err(RdgofError::ParameterOutOfRange {
            name: "kappa",
            value: kappa,
            range: "[0, ∞)",
        });
    }
    if angles.is_empty() {
        return Err(RdgofError::Empty("circular sample"));
    }
    if quad.grid_points < 16 {
        return Err(RdgofError::ParameterOutOfRange {
            name: "grid_points",
            value: quad.grid_points as f64,
            range: "[16, ∞)",
        });
    }
    if kappa == 0.0 {
        // The kernel maps everything to the uniform distribution exactly.
        return Ok(0.0);
    }
    let comps = merge_components(angles.iter().map(|&t| reduce_angle(t)), angles.len());
    let inv_i0s = 1.0 / bessel_i0_scaled(kappa);
    let g = quad.grid_points;
    // Density relative to uniform: values g(θ) with D = mean of g ln g.
    let rel: Vec<f64> = (0..g)
        .map(|k| {
            let theta = TAU * k as f64 / g as f64;
            comps
                .iter()
                .map(|&(center, w)| w * (kappa * ((theta - center).cos() - 1.0)).exp() * inv_i0s)
                .sum::<f64>()
        })
        .collect();
    let f: Vec<f64> = rel
        .iter()
        .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 })
        .collect();
    Ok(periodic_mean(&f).max(0.0))
}

/// Likelihood-ratio (G) statistic `D(emp ‖ p0)`; `+∞` on support violation.
pub fn lr_statistic(emp: &DiscreteDistribution, p0: &DiscreteDistribution) -> Result<f64> {
    crate::dist::divergence_discrete(emp, p0)
}

/// Shannon entropy in nats.
pub fn entropy_statistic(binned: &DiscreteDistribution) -> f64 {
    binned
        .probs()
        .iter()
        .map(|&p| if p > 0.0 { -p * p.ln() } else { 0.0 })
        .sum()
}

/// Rayleigh statistic: the mean resultant vector and its squared norm.
pub fn rayleigh_statistic(angles: &[f64]) -> CircularSummary {
    let n = angles.len() as f64;
    let (mut c, mut s) = (0.0, 0.0);
    for &theta in angles {
        c += theta.cos();
        s += theta.sin();
    }
    c /= n;
    s /= n;
    CircularSummary {
        resultant: (c, s),
        resultant_norm_sq: (c * c + s * s).min(1.0),
    }
}

/// `(1/n) Σ xᵢ²`.
pub fn second_moment(values: &[f64]) -> f64 {
    values.iter().map(|&x| x * x).sum::<f64>() / values.len() as f64
}

/// Sample mean; exposed alongside the second moment for the small-compression
/// normality discussion.
pub fn sample_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

/// Bins a real sample into `k` equal-probability bins
/// `[F⁻¹((j-1)/k), F⁻¹(j/k))` and returns the normalized counts.
///
/// Boundary points go to the right-open bin. Under the null the image
/// distribution is uniform.
pub fn quantile_bin<F>(values: &[f64], inverse_cdf: F, k: usize) -> Result<DiscreteDistribution>
where
    F: Fn(f64) -> f64,
{
    if k < 2 {
        return Err(RdgofError::ParameterOutOfRange {
            name: "bins",
            value: k as f64,
            range: "[2, ∞)",
        });
    }
    if values.is_empty() {
        return Err(RdgofError::Empty("real sample"));
    }
    let edges: Vec<f64> = (1..k).map(|j| inverse_cdf(j as f64 / k as f64)).collect();
    let mut counts = vec![0u64; k];
    for &x in values {
        let bin = edges.partition_point(|&e| e <= x);
        counts[bin] += 1;
    }
    let n = values.len() as f64;
    Ok(DiscreteDistribution::from_normalized(
        counts.iter().map(|&c| c as f64 / n).collect(),
    ))
}

/// An equally weighted mixture in one of the three supported families.
#[derive(Debug, Clone)]
pub enum MixtureModel<'a> {
    /// Discrete components against an arbitrary reference distribution.
    Discrete {
        components: &'a [DiscreteDistribution],
        reference: &'a DiscreteDistribution,
    },
    /// `(mean, variance)` normal components against `N(0, 1)`.
    Gaussian { components: &'a [(f64, f64)] },
    /// `(center, kappa)` von Mises components against the uniform circle.
    VonMises { components: &'a [(f64, f64)] },
}

/// The three divergences of the compensation identity
/// `D(mix ‖ ref) = avg D(comp ‖ ref) - avg D(comp ‖ mix)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DivergenceDecomposition {
    pub avg_component_to_ref: f64,
    pub avg_component_to_mixture: f64,
    pub mixture_to_ref: f64,
    /// `mixture_to_ref - (avg_component_to_ref - avg_component_to_mixture)`;
    /// verified internally to 1e-8.
    pub residual: f64,
}

/// Computes the three quantities of the compensation identity independently
/// (closed forms where available, quadrature otherwise) and verifies the
/// identity to 1e-8.
pub fn mixture_divergence_decomposition(
    model: &MixtureModel<'_>,
    quad: &QuadratureConfig,
) -> Result<DivergenceDecomposition> {
    let (to_ref, to_mix, mix_ref) = match model {
        MixtureModel::Discrete {
            components,
            reference,
        } => decompose_discrete(components, reference)?,
        MixtureModel::Gaussian { components } => decompose_gaussian(components, quad)?,
        MixtureModel::VonMises { components } => decompose_von_mises(components, quad)?,
    };
    let residual = mix_ref - (to_ref - to_mix);
    if !residual.is_finite() || residual.abs() > DECOMPOSITION_TOL {
        return Err(RdgofError::Numeric(format!(
            "compensation identity residual {residual:e} exceeds {DECOMPOSITION_TOL:e}"
        )));
    }
    Ok(DivergenceDecomposition {
        avg_component_to_ref: to_ref,
        avg_component_to_mixture: to_mix,
        mixture_to_ref: mix_ref,
        residual,
    })
}

fn decompose_discrete(
    components: &[DiscreteDistribution],
    reference: &DiscreteDistribution,
) -> Result<(f64, f64, f64)> {
    if components.is_empty() {
        return Err(RdgofError::Empty("mixture components"));
    }
    let l = reference.alphabet_size();
    let n = components.len() as f64;
    let mut mix = vec![0.0; l];
    for c in components {
        if c.alphabet_size() != l {
            return Err(RdgofError::LengthMismatch {
                left: c.alphabet_size(),
                right: l,
            });
        }
        for (m, &p) in mix.iter_mut().zip(c.probs()) {
            *m += p / n;
        }
    }
    let mix = DiscreteDistribution::from_normalized(mix);
    let mut to_ref = 0.0;
    let mut to_mix = 0.0;
    for c in components {
        to_ref += crate::dist::divergence_discrete(c, reference)? / n;
        to_mix += crate::dist::divergence_discrete(c, &mix)? / n;
    }
    let mix_ref = crate::dist::divergence_discrete(&mix, reference)?;
    if !(to_ref.is_finite() && mix_ref.is_finite()) {
        return Err(RdgofError::Incompatible(
            "reference must dominate every component for the decomposition".into(),
        ));
    }
    Ok((to_ref, to_mix, mix_ref))
}

fn decompose_gaussian(
    components: &[(f64, f64)],
    quad: &QuadratureConfig,
) -> Result<(f64, f64, f64)> {
    if components.is_empty() {
        return Err(RdgofError::Empty("mixture components"));
    }
    for &(_, v) in components {
        if !(v > 0.0) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "variance",
                value: v,
                range: "(0, ∞)",
            });
        }
    }
    let n = components.len() as f64;
    let weight = 1.0 / n;
    // Closed form: D(N(μ,σ²) ‖ N(0,1)) = (σ² + μ² - 1 - ln σ²) / 2.
    let to_ref = components
        .iter()
        .map(|&(mu, v)| 0.5 * (v + mu * mu - 1.0 - v.ln()))
        .sum::<f64>()
        * weight;

    let t = quad.truncation_sigmas;
    let a = components
        .iter()
        .map(|&(mu, v)| mu - t * v.sqrt())
        .fold(f64::INFINITY, f64::min);
    let b = components
        .iter()
        .map(|&(mu, v)| mu + t * v.sqrt())
        .fold(f64::NEG_INFINITY, f64::max);
    let g = boole_point_count(quad.grid_points);
    let h = (b - a) / (g - 1) as f64;

    let mut mix = vec![0.0; g];
    for &(mu, v) in components {
        let sigma = v.sqrt();
        let lo = (((mu - t * sigma - a) / h).ceil().max(0.0)) as usize;
        let hi = (((mu + t * sigma - a) / h).floor() as usize).min(g - 1);
        for k in lo..=hi {
            mix[k] += weight * normal_pdf(a + k as f64 * h, mu, sigma);
        }
    }

    let mut to_mix = 0.0;
    let mut f = vec![0.0; g];
    for &(mu, v) in components {
        let sigma = v.sqrt();
        let lo = (((mu - t * sigma - a) / h).ceil().max(0.0)) as usize;
        let hi = (((mu + t * sigma - a) / h).floor() as usize).min(g - 1);
        f.fill(0.0);
        for k in lo..=hi {
            let pi = normal_pdf(a + k as f64 * h, mu, sigma);
            if pi > 0.0 && mix[k] > 0.0 {
                f[k] = pi * (pi.ln() - mix[k].ln());
            }
        }
        to_mix += weight * composite_boole(&f, h);
    }

    let f: Vec<f64> = mix
        .iter()
        .enumerate()
        .map(|(k, &p)| {
            if p > 0.0 {
                // Log density directly, so a far-out reference cannot
                // underflow to -inf.
                let x = a + k as f64 * h;
                let ln_ref = -0.5 * x * x - 0.5 * std::f64::consts::TAU.ln();
                p * (p.ln() - ln_ref)
            } else {
                0.0
            }
        })
        .collect();
    let mix_ref = composite_boole(&f, h);
    Ok((to_ref, to_mix, mix_ref))
}

fn decompose_von_mises(
    components: &[(f64, f64)],
    quad: &QuadratureConfig,
) -> Result<(f64, f64, f64)> {
    if components.is_empty() {
        return Err(RdgofError::Empty("mixture components"));
    }
    for &(_, kappa) in components {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(RdgofError::ParameterOutOfRange {
                name: "kappa",
                value: kappa,
                range: "[0, ∞)",
            });
        }
    }
    let n = components.len() as f64;
    let weight = 1.0 / n;
    // Closed form: D(vM(κ) ‖ U) = κ I₁(κ)/I₀(κ) - ln I₀(κ).
    let to_ref = components
        .iter()
        .map(|&(_, kappa)| kappa * bessel_ratio(kappa) - ln_bessel_i0(kappa))
        .sum::<f64>()
        * weight;

    let g = quad.grid_points;
    // Densities relative to uniform.
    let rel: Vec<Vec<f64>> = components
        .iter()
        .map(|&(center, kappa)| {
            let inv_i0s = 1.0 / bessel_i0_scaled(kappa);
            (0..g)
                .map(|k| {
                    let theta = TAU * k as f64 / g as f64;
                    (kappa * ((theta - center).cos() - 1.0)).exp() * inv_i0s
                })
                .collect()
        })
        .collect();
    let mix: Vec<f64> = (0..g)
        .map(|k| rel.iter().map(|r| weight * r[k]).sum())
        .collect();

    let mut to_mix = 0.0;
    for r in &rel {
        let f: Vec<f64> = r
            .iter()
            .zip(&mix)
            .map(|(&gi, &gm)| {
                if gi > 0.0 && gm > 0.0 {
                    gi * (gi.ln() - gm.ln())
                } else {
                    0.0
                }
            })
            .collect();
        to_mix += weight * periodic_mean(&f);
    }

    let f: Vec<f64> = mix
        .iter()
        .map(|&v| if v > 0.0 { v * v.ln() } else { 0.0 })
        .collect();
    let mix_ref = periodic_mean(&f);
    Ok((to_ref, to_mix, mix_ref))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::pearson_chi2;

    fn dist(p: &[f64]) -> DiscreteDistribution {
        DiscreteDistribution::new(p.to_vec()).unwrap()
    }

    #[test]
    fn hamming_statistic_examples() {
        let p = dist(&[1.0, 0.0]);
        let s = rd_statistic_hamming(&p, 1.0).unwrap();
        assert!((s - 2f64.ln()).abs() < 1e-15);
        let u = DiscreteDistribution::uniform(5);
        for &alpha in &[0.0, 0.3, 0.9, 1.0] {
            assert!(rd_statistic_hamming(&u, alpha).unwrap().abs() < 1e-14);
        }
    }

    #[test]
    fn hamming_equals_lr_at_alpha_one_bitwise() {
        let p = dist(&[0.15, 0.0, 0.45, 0.4]);
        let u = DiscreteDistribution::uniform(4);
        let rd = rd_statistic_hamming(&p, 1.0).unwrap();
        let lr = lr_statistic(&p, &u).unwrap();
        assert_eq!(rd.to_bits(), lr.to_bits());
    }

    #[test]
    fn hamming_chi2_small_alpha_limit() {
        let p = dist(&[0.5, 0.2, 0.2, 0.1]);
        let u = DiscreteDistribution::uniform(4);
        let chi2_half = pearson_chi2(&p, &u).unwrap() / 2.0;
        for &alpha in &[1e-3, 5e-4] {
            let ratio = rd_statistic_hamming(&p, alpha).unwrap() / (alpha * alpha);
            assert!(
                (ratio - chi2_half).abs() / chi2_half < 0.01,
                "alpha={alpha}: {ratio} vs {chi2_half}"
            );
        }
    }

    #[test]
    fn gaussian_single_point_closed_form() {
        let quad = QuadratureConfig::default();
        let s = rd_statistic_gaussian(&[2.0], 0.6, &quad).unwrap();
        let expect = 0.5 * (0.36 * 4.0 - 0.36 - (1.0 - 0.36f64).ln());
        assert!((s - expect).abs() < 1e-9, "{s} vs {expect}");
        assert!((expect - 0.7631).abs() < 1e-4);
    }

    #[test]
    fn gaussian_all_zero_sample() {
        let quad = QuadratureConfig::default();
        for &alpha in &[0.3, 0.8] {
            let s = rd_statistic_gaussian(&[0.0, 0.0, 0.0], alpha, &quad).unwrap();
            let a2 = alpha * alpha;
            let expect = 0.5 * (-a2 - (1.0 - a2).ln());
            assert!((s - expect).abs() < 1e-9, "alpha={alpha}");
        }
    }

    #[test]
    fn gaussian_alpha_zero_is_exactly_zero() {
        let quad = QuadratureConfig::default();
        let s = rd_statistic_gaussian(&[-1.7, 0.3, 2.4, 0.3], 0.0, &quad).unwrap();
        assert_eq!(s, 0.0);
    }

    #[test]
    fn gaussian_rejects_alpha_one() {
        let quad = QuadratureConfig::default();
        assert!(rd_statistic_gaussian(&[1.0], 1.0, &quad).is_err());
    }

    /// Adding noise to the raw data instead of shrinking it gives the same
    /// divergence: `D(X + (1/α²-1)^{1/2} Z ‖ N(0, 1/α²))` equals the direct
    /// mixture-vs-N(0,1) statistic, by scale invariance of the divergence.
    #[test]
    fn gaussian_rewritten_channel_equality() {
        let xs = [-1.2, 0.4, 0.9, 2.5];
        let alpha: f64 = 0.7;
        let quad = QuadratureConfig::default();
        let direct = rd_statistic_gaussian(&xs, alpha, &quad).unwrap();

        // Scaled by 1/α: components N(xᵢ, 1/α² - 1) against N(0, 1/α²).
        let sigma = (1.0 / (alpha * alpha) - 1.0).sqrt();
        let ref_sigma = 1.0 / alpha;
        let t = 12.0 * sigma.max(ref_sigma);
        let a = xs.iter().cloned().fold(f64::INFINITY, f64::min) - t;
        let b = xs.iter().cloned().fold(f64::NEG_INFINITY, f64::max) + t;
        let g = boole_point_count(1 << 15);
        let h = (b - a) / (g - 1) as f64;
        let f: Vec<f64> = (0..g)
            .map(|k| {
                let x = a + k as f64 * h;
                let p: f64 = xs.iter().map(|&xi| normal_pdf(x, xi, sigma)).sum::<f64>()
                    / xs.len() as f64;
                if p > 0.0 {
                    p * (p.ln() - normal_pdf(x, 0.0, ref_sigma).ln())
                } else {
                    0.0
                }
            })
            .collect();
        let rewritten = composite_boole(&f, h);
        assert!(
            (direct - rewritten).abs() < 1e-8,
            "{direct} vs {rewritten}"
        );
    }

    #[test]
    fn gaussian_separation_asymptotics() {
        // Pairwise gaps far above sigma: statistic ≈ ½(α²m₂ - α² - ln(1-α²)) - ln n.
        let alpha: f64 = 0.999;
        let xs = [0.0, 1.0, 2.0, 3.0];
        let quad = QuadratureConfig::default();
        let s = rd_statistic_gaussian(&xs, alpha, &quad).unwrap();
        let a2 = alpha * alpha;
        let m2 = second_moment(&xs);
        let expect = 0.5 * (a2 * m2 - a2 - (1.0 - a2).ln()) - (xs.len() as f64).ln();
        assert!((s - expect).abs() < 1e-3, "{s} vs {expect}");
    }

    #[test]
    fn circular_fixed_points() {
        let quad = QuadratureConfig::default();
        assert_eq!(
            rd_statistic_circular(&[0.3, 1.0, 4.4], 0.0, &quad).unwrap(),
            0.0
        );
    }

    #[test]
    fn circular_single_point_closed_form() {
        let quad = QuadratureConfig::default();
        for &kappa in &[0.5, 2.0, 10.0] {
            let s = rd_statistic_circular(&[0.0], kappa, &quad).unwrap();
            let expect = kappa * bessel_ratio(kappa) - ln_bessel_i0(kappa);
            assert!(
                (s - expect).abs() < 1e-10,
                "kappa={kappa}: {s} vs {expect}"
            );
        }
    }

    #[test]
    fn circular_rayleigh_small_kappa_limit() {
        let quad = QuadratureConfig::default();
        let angles = [0.1, 0.5, 2.2, 3.9, 5.5];
        let r2 = rayleigh_statistic(&angles).resultant_norm_sq;
        for &kappa in &[1e-2, 5e-3] {
            let ratio = rd_statistic_circular(&angles, kappa, &quad).unwrap() / (kappa * kappa);
            assert!(
                (ratio - r2 / 4.0).abs() / (r2 / 4.0) < 0.01,
                "kappa={kappa}: {ratio} vs {}",
                r2 / 4.0
            );
        }
    }

    #[test]
    fn circular_rotation_invariance() {
        let quad = QuadratureConfig::default();
        let angles = [0.2, 1.4, 2.7, 4.1, 5.9];
        let base = rd_statistic_circular(&angles, 3.0, &quad).unwrap();
        for &shift in &[0.5, 2.0, 5.0] {
            let shifted: Vec<f64> = angles.iter().map(|&t| reduce_angle(t + shift)).collect();
            let s = rd_statistic_circular(&shifted, 3.0, &quad).unwrap();
            assert!((s - base).abs() < 1e-10, "shift={shift}: {s} vs {base}");
        }
    }

    #[test]
    fn quadrature_doubling_is_stable() {
        let coarse = QuadratureConfig::default();
        let fine = QuadratureConfig::new(2 * coarse.grid_points, coarse.truncation_sigmas).unwrap();
        let xs = [-2.1, -0.4, 0.0, 0.7, 1.9, 3.2];
        for &alpha in &[0.3, 0.9, 0.99] {
            let a = rd_statistic_gaussian(&xs, alpha, &coarse).unwrap();
            let b = rd_statistic_gaussian(&xs, alpha, &fine).unwrap();
            assert!((a - b).abs() < 1e-8, "alpha={alpha}: {a} vs {b}");
        }
        let angles = [0.2, 1.1, 2.9, 3.3, 4.8, 6.1];
        for &kappa in &[0.5, 5.0, 50.0] {
            let a = rd_statistic_circular(&angles, kappa, &coarse).unwrap();
            let b = rd_statistic_circular(&angles, kappa, &fine).unwrap();
            assert!((a - b).abs() < 1e-8, "kappa={kappa}: {a} vs {b}");
        }
    }

    #[test]
    fn rayleigh_examples() {
        let s = rayleigh_statistic(&[1.2, 1.2, 1.2]);
        assert!((s.resultant_norm_sq - 1.0).abs() < 1e-12);
        use std::f64::consts::{FRAC_PI_2, PI};
        let s = rayleigh_statistic(&[0.0, FRAC_PI_2, PI, 3.0 * FRAC_PI_2]);
        assert!(s.resultant_norm_sq < 1e-30);
        // Norm consistency.
        let s = rayleigh_statistic(&[0.4, 2.2, 5.0]);
        let (c, x) = s.resultant;
        assert!((s.resultant_norm_sq - (c * c + x * x)).abs() < 1e-14);
    }

    #[test]
    fn entropy_and_moments() {
        assert!((entropy_statistic(&DiscreteDistribution::uniform(7)) - 7f64.ln()).abs() < 1e-12);
        assert_eq!(entropy_statistic(&dist(&[1.0, 0.0])), 0.0);
        assert!((second_moment(&[1.0, 2.0, 3.0]) - 14.0 / 3.0).abs() < 1e-15);
        assert!((sample_mean(&[1.0, 2.0, 3.0]) - 2.0).abs() < 1e-15);
    }

    #[test]
    fn quantile_bin_examples() {
        use statrs::distribution::{ContinuousCDF, Normal};
        let normal = Normal::new(0.0, 1.0).unwrap();
        let inv = |p: f64| normal.inverse_cdf(p);
        let d = quantile_bin(&[-1.0, 1.0], inv, 2).unwrap();
        assert_eq!(d.probs(), &[0.5, 0.5]);

        // Exact quartile midpoints land one per bin.
        let mids: Vec<f64> = (0..4)
            .map(|j| normal.inverse_cdf((j as f64 + 0.5) / 4.0))
            .collect();
        let d = quantile_bin(&mids, inv, 4).unwrap();
        assert_eq!(d.probs(), &[0.25; 4]);

        // Boundary point goes to the right-open bin.
        let edge = normal.inverse_cdf(0.5);
        let d = quantile_bin(&[edge], inv, 2).unwrap();
        assert_eq!(d.probs(), &[0.0, 1.0]);

        assert!(quantile_bin(&[0.0], inv, 1).is_err());
    }

    #[test]
    fn quantile_bin_uniform_under_null() {
        use rand::SeedableRng;
        use rand_distr::{Distribution, StandardNormal};
        use statrs::distribution::{ContinuousCDF, Normal};
        let normal = Normal::new(0.0, 1.0).unwrap();
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let xs: Vec<f64> = (0..10_000).map(|_| StandardNormal.sample(&mut rng)).collect();
        let d = quantile_bin(&xs, |p| normal.inverse_cdf(p), 10).unwrap();
        // Binomial tail bound: max deviation from 0.1 stays below 0.02 whp.
        for &p in d.probs() {
            assert!((p - 0.1).abs() < 0.02, "bin probability {p}");
        }
    }

    #[test]
    fn decomposition_trivial_cases() {
        let quad = QuadratureConfig::default();
        // Single component.
        let comps = [(1.5, 0.64)];
        let d = mixture_divergence_decomposition(&MixtureModel::Gaussian { components: &comps }, &quad)
            .unwrap();
        assert!(d.avg_component_to_mixture.abs() < 1e-12);
        assert!((d.mixture_to_ref - d.avg_component_to_ref).abs() < 1e-9);
        // Identical components behave like a single one.
        let comps = [(1.5, 0.64), (1.5, 0.64), (1.5, 0.64)];
        let d3 = mixture_divergence_decomposition(&MixtureModel::Gaussian { components: &comps }, &quad)
            .unwrap();
        assert!((d3.mixture_to_ref - d.mixture_to_ref).abs() < 1e-10);
        assert!(d3.avg_component_to_mixture.abs() < 1e-12);
    }

    #[test]
    fn decomposition_disjoint_support_limit() {
        // Well separated components: avg divergence to the mixture is ln n.
        let quad = QuadratureConfig::new(1 << 15, 10.0).unwrap();
        let v = 1.0 - 0.999f64 * 0.999;
        let comps = [(0.0, v), (20.0, v), (40.0, v)];
        let d = mixture_divergence_decomposition(&MixtureModel::Gaussian { components: &comps }, &quad)
            .unwrap();
        assert!(
            (d.avg_component_to_mixture - 3f64.ln()).abs() < 1e-3,
            "{} vs ln 3",
            d.avg_component_to_mixture
        );
    }

    #[test]
    fn decomposition_discrete_exact() {
        let comps = [dist(&[0.9, 0.1]), dist(&[0.2, 0.8]), dist(&[0.5, 0.5])];
        let refd = dist(&[0.6, 0.4]);
        let d = mixture_divergence_decomposition(
            &MixtureModel::Discrete {
                components: &comps,
                reference: &refd,
            },
            &QuadratureConfig::default(),
        )
        .unwrap();
        assert!(d.residual.abs() < 1e-14);
        // Support violation is rejected.
        let bad = [dist(&[1.0, 0.0])];
        let point = dist(&[0.0, 1.0]);
        assert!(
            mixture_divergence_decomposition(
                &MixtureModel::Discrete {
                    components: &bad,
                    reference: &point,
                },
                &QuadratureConfig::default(),
            )
            .is_err()
        );
    }

    #[test]
    fn decomposition_von_mises() {
        let quad = QuadratureConfig::default();
        let comps = [(0.5, 2.0), (2.5, 7.0), (4.0, 0.5)];
        let d = mixture_divergence_decomposition(&MixtureModel::VonMises { components: &comps }, &quad)
            .unwrap();
        assert!(d.residual.abs() < 1e-8);
        assert!(d.mixture_to_ref >= 0.0 && d.avg_component_to_mixture >= 0.0);
    }
}
