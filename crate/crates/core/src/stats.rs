//! Small descriptive-statistics helpers shared across modules.
//!
//! Spread estimates use the sample convention (denominator `n - 1`).

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

/// Sample variance; `NaN` for fewer than two values.
pub fn sample_variance(values: &[f64]) -> f64 {
    let n = values.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(values);
    values.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (n - 1) as f64
}

pub fn sample_std(values: &[f64]) -> f64 {
    sample_variance(values).sqrt()
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mid = sorted.len() / 2;
    if sorted.len().is_multiple_of(2) {
        0.5 * (sorted[mid - 1] + sorted[mid])
    } else {
        sorted[mid]
    }
}

/// Centered sums of squares below this fraction of the raw second moment are
/// treated as exact zeros (rounding residue of a constant column).
pub(crate) fn is_negligible_spread(centered_ss: f64, values: &[f64]) -> bool {
    let raw: f64 = values.iter().map(|v| v * v).sum();
    centered_ss <= raw * 1e-24 || centered_ss == 0.0
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn median_even_and_odd() {
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 3.0, 2.0]), 2.5);
        assert!(median(&[]).is_nan());
    }

    #[test]
    fn sample_variance_uses_n_minus_one() {
        assert_eq!(sample_variance(&[1.0, 3.0]), 2.0);
        assert!(sample_variance(&[1.0]).is_nan());
    }

    #[test]
    fn constant_column_spread_is_negligible() {
        let v = [0.1; 7];
        let m = mean(&v);
        let ss: f64 = v.iter().map(|x| (x - m) * (x - m)).sum();
        assert!(is_negligible_spread(ss, &v));
        assert!(!is_negligible_spread(1e-6, &[1.0, 1.001]));
    }
}
