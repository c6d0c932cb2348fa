use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::coords::FragmentCloud;
use crate::error::{Error, Result};

/// Rectangular study window.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Window {
    pub x_min: f64,
    pub y_min: f64,
    pub x_max: f64,
    pub y_max: f64,
}

impl Window {
    /// The normalized window `[-1, 1]²`.
    pub const NORMALIZED: Window = Window {
        x_min: -1.0,
        y_min: -1.0,
        x_max: 1.0,
        y_max: 1.0,
    };

    pub fn area(&self) -> f64 {
        (self.x_max - self.x_min) * (self.y_max - self.y_min)
    }
}

/// Which coordinates Ripley's K is evaluated in.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowKind {
    /// `(x, y)` in `[-1, 1]²`.
    #[default]
    Normalized,
    /// Box centers in metres over a `W·scale × H·scale` frame.
    Metric,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KFunction {
    pub radii: Vec<f64>,
    pub k_observed: Vec<f64>,
    /// `π r²`.
    pub k_poisson: Vec<f64>,
    pub window_area: f64,
    pub window: WindowKind,
}

/// Twenty evenly spaced radii: `0.025..=0.5` in the normalized window,
/// `0.25..=5.0` m in the metric one.
pub fn default_radii(window: WindowKind) -> Vec<f64> {
    let (lo, hi) = match window {
        WindowKind::Normalized => (0.025, 0.5),
        WindowKind::Metric => (0.25, 5.0),
    };
    (0..20).map(|i| lo + (hi - lo) * i as f64 / 19.0).collect()
}

fn check_radii(radii: &[f64]) -> Result<()> {
    if radii.iter().any(|r| !(r.is_finite() && *r >= 0.0)) {
        return Err(Error::domain("radii must be finite and non-negative"));
    }
    if radii.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::domain("radii must be strictly ascending"));
    }
    Ok(())
}

/// Unweighted pair-count estimator without edge correction:
/// `K(r) = |A| / (n (n − 1)) · #{ordered pairs i ≠ j : d_ij ≤ r}`, with `K(0) = 0`.
pub fn k_estimate(points: &[(f64, f64)], radii: &[f64], window_area: f64) -> Result<Vec<f64>> {
    let n = points.len();
    if n < 2 {
        return Err(Error::degenerate(format!(
            "Ripley's K needs at least 2 points, got {n}"
        )));
    }
    check_radii(radii)?;
    let r2: Vec<f64> = radii.iter().map(|r| r * r).collect();
    // counts[b] = pairs whose squared distance first fits under radius b.
    let mut counts = vec![0u64; radii.len() + 1];
    for i in 0..n {
        let (xi, yi) = points[i];
        for &(xj, yj) in &points[i + 1..] {
            let d2 = (xi - xj) * (xi - xj) + (yi - yj) * (yi - yj);
            counts[r2.partition_point(|&r| r < d2)] += 1;
        }
    }
    let factor = window_area / (n as f64 * (n as f64 - 1.0));
    let mut cumulative = 0u64;
    Ok(radii
        .iter()
        .zip(&counts)
        .map(|(&r, &c)| {
            cumulative += c;
            if r == 0.0 {
                0.0
            } else {
                factor * 2.0 * cumulative as f64
            }
        })
        .collect())
}

/// Ripley's K of a fragment cloud in the chosen window.
pub fn ripley_k(cloud: &FragmentCloud, radii: &[f64], window: WindowKind) -> Result<KFunction> {
    let (points, area) = match window {
        WindowKind::Normalized => (cloud.xy(), Window::NORMALIZED.area()),
        WindowKind::Metric => {
            let scale = cloud.scale.ok_or_else(|| {
                Error::Unsupported("metric Ripley window needs a scale (m/px)".into())
            })?;
            let (w, h) = (
                f64::from(cloud.width) * scale,
                f64::from(cloud.height) * scale,
            );
            let pts = cloud
                .points
                .iter()
                .map(|p| (p.u * w, (1.0 - p.v) * h))
                .collect();
            (pts, w * h)
        }
    };
    let k_observed = k_estimate(&points, radii, area)?;
    Ok(KFunction {
        radii: radii.to_vec(),
        k_poisson: radii.iter().map(|r| std::f64::consts::PI * r * r).collect(),
        k_observed,
        window_area: area,
        window,
    })
}

/// Monte-Carlo envelope of the estimator under complete spatial randomness.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsrEnvelope {
    pub radii: Vec<f64>,
    /// Mean of the simulated estimates.
    pub mean: Vec<f64>,
    /// Pointwise `(1 − level)/2` and `(1 + level)/2` quantiles.
    pub pointwise_lo: Vec<f64>,
    pub pointwise_hi: Vec<f64>,
    /// Simultaneous band from the studentized maximum-deviation statistic:
    /// a pattern is inside for every radius at once with probability `level`.
    pub global_lo: Vec<f64>,
    pub global_hi: Vec<f64>,
    pub level: f64,
    pub simulations: usize,
}

impl CsrEnvelope {
    /// True when `k` lies within the simultaneous band at every radius.
    pub fn contains_globally(&self, k: &[f64]) -> bool {
        k.iter()
            .zip(self.global_lo.iter().zip(&self.global_hi))
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }

    pub fn contains_pointwise(&self, k: &[f64]) -> bool {
        k.iter()
            .zip(self.pointwise_lo.iter().zip(&self.pointwise_hi))
            .all(|(v, (lo, hi))| *v >= *lo && *v <= *hi)
    }
}

/// Simulates `simulations` binomial CSR patterns of `n` points in `window`.
pub fn csr_envelope(
    n: usize,
    window: Window,
    radii: &[f64],
    simulations: usize,
    level: f64,
    seed: u64,
) -> Result<CsrEnvelope> {
    if simulations < 2 {
        return Err(Error::domain("envelope needs at least 2 simulations"));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::domain("envelope level must lie in (0, 1)"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let area = window.area();
    let sims: Vec<Vec<f64>> = (0..simulations)
        .map(|_| {
            let pts: Vec<(f64, f64)> = (0..n)
                .map(|_| {
                    (
                        rng.random_range(window.x_min..window.x_max),
                        rng.random_range(window.y_min..window.y_max),
                    )
                })
                .collect();
            k_estimate(&pts, radii, area)
        })
        .collect::<Result<_>>()?;

    let m = radii.len();
    let s = simulations as f64;
    let mean: Vec<f64> = (0..m)
        .map(|b| sims.iter().map(|k| k[b]).sum::<f64>() / s)
        .collect();
    let sd: Vec<f64> = (0..m)
        .map(|b| (sims.iter().map(|k| (k[b] - mean[b]).powi(2)).sum::<f64>() / (s - 1.0)).sqrt())
        .collect();

    let quantile = |sorted: &[f64], q: f64| -> f64 {
        // Order statistic at rank ceil(q · (s + 1)), clamped to the sample.
        let rank = ((q * (s + 1.0)).ceil() as usize).clamp(1, sorted.len());
        sorted[rank - 1]
    };
    let tail = 0.5 * (1.0 - level);
    let (mut pointwise_lo, mut pointwise_hi) = (Vec::with_capacity(m), Vec::with_capacity(m));
    for b in 0..m {
        let mut col: Vec<f64> = sims.iter().map(|k| k[b]).collect();
        col.sort_by(f64::total_cmp);
        pointwise_lo.push(quantile(&col, tail));
        pointwise_hi.push(quantile(&col, 1.0 - tail));
    }

    let mut deviations: Vec<f64> = sims
        .iter()
        .map(|k| {
            (0..m)
                .filter(|&b| sd[b] > 0.0)
                .map(|b| (k[b] - mean[b]).abs() / sd[b])
                .fold(0.0, f64::max)
        })
        .collect();
    deviations.sort_by(f64::total_cmp);
    let u = quantile(&deviations, level);

    Ok(CsrEnvelope {
        radii: radii.to_vec(),
        global_lo: (0..m).map(|b| mean[b] - u * sd[b]).collect(),
        global_hi: (0..m).map(|b| mean[b] + u * sd[b]).collect(),
        mean,
        pointwise_lo,
        pointwise_hi,
        level,
        simulations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn two_points_half_apart() {
        let pts = [(0.0, 0.0), (0.5, 0.0)];
        let k = k_estimate(&pts, &[0.1, 0.49, 0.5, 0.9], 4.0).unwrap();
        assert_eq!(k, vec![0.0, 0.0, 4.0, 4.0]);
    }

    #[test]
    fn zero_radius_is_zero_even_with_duplicates() {
        let pts = [(0.2, 0.2), (0.2, 0.2), (0.9, 0.9)];
        let k = k_estimate(&pts, &[0.0, 0.01], 4.0).unwrap();
        assert_eq!(k[0], 0.0);
        assert!((k[1] - 4.0 / 6.0 * 2.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_radii_and_tiny_clouds() {
        let pts = [(0.0, 0.0), (0.1, 0.1)];
        assert!(k_estimate(&pts, &[0.2, 0.1], 4.0).is_err());
        assert!(k_estimate(&pts, &[-0.1], 4.0).is_err());
        assert!(matches!(
            k_estimate(&pts[..1], &[0.1], 4.0),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn estimate_is_nondecreasing() {
        let pts: Vec<_> = (0..40)
            .map(|i| ((i as f64 * 0.37).sin(), (i as f64 * 0.91).cos()))
            .collect();
        let radii: Vec<f64> = (1..=30).map(|i| i as f64 * 0.05).collect();
        let k = k_estimate(&pts, &radii, 4.0).unwrap();
        assert!(k.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn envelope_is_ordered_and_reproducible() {
        let radii = [0.1, 0.2, 0.3];
        let a = csr_envelope(50, Window::NORMALIZED, &radii, 99, 0.95, 7).unwrap();
        let b = csr_envelope(50, Window::NORMALIZED, &radii, 99, 0.95, 7).unwrap();
        assert_eq!(a, b);
        for i in 0..3 {
            assert!(a.pointwise_lo[i] <= a.mean[i] && a.mean[i] <= a.pointwise_hi[i]);
            assert!(a.global_lo[i] < a.mean[i] && a.mean[i] < a.global_hi[i]);
        }
        assert!(a.contains_globally(&a.mean));
    }
}
