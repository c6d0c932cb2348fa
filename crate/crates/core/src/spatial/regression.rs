use serde::{Deserialize, Serialize};

use crate::coords::FragmentPoint;
use crate::error::{Error, Result};
use crate::stats::is_negligible_spread;

/// Least-squares line `log s = alpha + beta · log z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegressionFit {
    pub alpha: f64,
    pub beta: f64,
    pub r_squared: f64,
    /// Points with `s > 0` and `z > 0` that entered the fit.
    pub n_used: usize,
}

impl RegressionFit {
    pub fn predict(&self, log_z: f64) -> f64 {
        self.alpha + self.beta * log_z
    }
}

/// Ordinary least squares of `y` on `[1, x]` through the normal equations
/// `[α, β]ᵀ = (XᵀX)⁻¹ Xᵀy`, with `R² = 1 − SSE/SST`.
///
/// A response with no spread has nothing to explain and gets `R² = 0`.
pub fn ols_line(x: &[f64], y: &[f64]) -> Result<RegressionFit> {
    let n = x.len();
    if n != y.len() {
        return Err(Error::domain("predictor and response lengths differ"));
    }
    if n < 3 {
        return Err(Error::degenerate(format!(
            "line fit needs at least 3 points, got {n}"
        )));
    }
    let nf = n as f64;
    let x_mean = x.iter().sum::<f64>() / nf;
    let sxx_centered: f64 = x.iter().map(|v| (v - x_mean) * (v - x_mean)).sum();
    if is_negligible_spread(sxx_centered, x) {
        return Err(Error::degenerate("predictor has zero variance"));
    }

    // XᵀX = [[n, Σx], [Σx, Σx²]], Xᵀy = [Σy, Σxy].
    let (sx, sxx) = (x.iter().sum::<f64>(), x.iter().map(|v| v * v).sum::<f64>());
    let (sy, sxy) = (
        y.iter().sum::<f64>(),
        x.iter().zip(y).map(|(a, b)| a * b).sum::<f64>(),
    );
    let det = nf * sxx - sx * sx;
    let alpha = (sxx * sy - sx * sxy) / det;
    let beta = (nf * sxy - sx * sy) / det;

    let y_mean = sy / nf;
    let sst: f64 = y.iter().map(|v| (v - y_mean) * (v - y_mean)).sum();
    let sse: f64 = x
        .iter()
        .zip(y)
        .map(|(a, b)| {
            let e = b - alpha - beta * a;
            e * e
        })
        .sum();
    let r_squared = if is_negligible_spread(sst, y) {
        0.0
    } else {
        1.0 - sse / sst
    };

    Ok(RegressionFit {
        alpha,
        beta,
        r_squared,
        n_used: n,
    })
}

/// Fits the size–depth power law on `(log z, log s)`, skipping points where
/// either quantity is non-positive.
pub fn fit_size_depth(points: &[FragmentPoint]) -> Result<RegressionFit> {
    let (log_z, log_s): (Vec<f64>, Vec<f64>) = points
        .iter()
        .filter(|p| p.z > 0.0 && p.s > 0.0 && p.z.is_finite() && p.s.is_finite())
        .map(|p| (p.z.ln(), p.s.ln()))
        .unzip();
    ols_line(&log_z, &log_s)
}
