//! Internal deterministic quadrature helpers.
//!
//! Real-line integrals use the composite Boole rule on a uniform grid (error
//! O(h^6) for smooth integrands); circular integrals use the periodic
//! trapezoid rule, which is spectrally accurate for smooth periodic
//! integrands. Summation orders are fixed so results are reproducible.

/// Rounds a requested point count up to the next `4k + 1` as required by the
/// composite Boole rule.
pub(crate) fn boole_point_count(requested: usize) -> usize {
    let r = requested.max(5);
    let panels = (r - 1).div_ceil(4);
    4 * panels + 1
}

/// Composite Boole rule over `values` sampled on a uniform grid of spacing
/// `h`; `values.len()` must be `4k + 1`.
pub(crate) fn composite_boole(values: &[f64], h: f64) -> f64 {
    assert!(values.len() >= 5 && (values.len() - 1) % 4 == 0);
    let mut acc = 0.0;
    let mut i = 0;
    while i + 4 < values.len() {
        acc += 7.0 * (values[i] + values[i + 4])
            + 32.0 * (values[i + 1] + values[i + 3])
            + 12.0 * values[i + 2];
        i += 4;
    }
    acc * 2.0 * h / 45.0
}

/// Mean of `values`, used as the periodic trapezoid rule on `[0, 2π)` after
/// multiplying by the period.
pub(crate) fn periodic_mean(values: &[f64]) -> f64 {
    values.iter().sum::<f64>() / values.len() as f64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn point_count_rounds_up() {
        assert_eq!(boole_point_count(5), 5);
        assert_eq!(boole_point_count(6), 9);
        assert_eq!(boole_point_count(4096), 4097);
        assert_eq!(boole_point_count(1), 5);
    }

    #[test]
    fn integrates_polynomials_exactly() {
        // Boole is exact through degree 5.
        let n = boole_point_count(33);
        let (a, b) = (-1.0, 2.0);
        let h = (b - a) / (n - 1) as f64;
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let x: f64 = a + i as f64 * h;
                x.powi(5) - 3.0 * x.powi(2) + 1.0
            })
            .collect();
        // ∫ = [x^6/6 - x^3 + x] over [-1, 2]
        let exact = (64.0 / 6.0 - 8.0 + 2.0) - (1.0 / 6.0 + 1.0 - 1.0);
        assert!((composite_boole(&values, h) - exact).abs() < 1e-12);
    }

    #[test]
    fn gaussian_integral_converges() {
        let n = boole_point_count(2048);
        let (a, b) = (-10.0, 10.0);
        let h = (b - a) / (n - 1) as f64;
        let values: Vec<f64> = (0..n)
            .map(|i| {
                let x = a + i as f64 * h;
                (-0.5 * x * x).exp()
            })
            .collect();
        let exact = std::f64::consts::TAU.sqrt();
        assert!((composite_boole(&values, h) - exact).abs() < 1e-13);
    }
}
