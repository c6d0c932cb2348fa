use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Principal axes of a 2D point set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcaResult {
    pub mean: [f64; 2],
    /// Sample covariance `[[cxx, cxy], [cxy, cyy]]`.
    pub covariance: [[f64; 2]; 2],
    /// Major axis; `v1.x > 0`, or `v1.x == 0` and `v1.y ≥ 0`.
    pub v1: [f64; 2],
    /// `v1` rotated by +90°.
    pub v2: [f64; 2],
    pub lambda1: f64,
    pub lambda2: f64,
    pub var_ratio1: f64,
    pub var_ratio2: f64,
}

impl PcaResult {
    /// `λ1 / λ2`, undefined for collinear input.
    pub fn anisotropy(&self) -> Option<f64> {
        (self.lambda2 > 0.0).then(|| self.lambda1 / self.lambda2)
    }

    /// Orientation of `v1` in degrees, in `(-90, 90]`.
    pub fn angle_deg(&self) -> f64 {
        self.v1[1].atan2(self.v1[0]).to_degrees()
    }
}

/// Closed-form eigendecomposition of the sample covariance of `points`.
pub fn pca(points: &[(f64, f64)]) -> Result<PcaResult> {
    let n = points.len();
    if n < 2 {
        return Err(Error::degenerate(format!(
            "PCA needs at least 2 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / nf;
    let my = points.iter().map(|p| p.1).sum::<f64>() / nf;
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for &(x, y) in points {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let (a, c, b) = (sxx / (nf - 1.0), syy / (nf - 1.0), sxy / (nf - 1.0));
    let trace = a + c;
    if !(trace > 0.0) {
        return Err(Error::degenerate("points have zero total variance"));
    }

    let half_gap = 0.5 * (a - c);
    let disc = half_gap.hypot(b);
    let lambda1 = 0.5 * trace + disc;
    let lambda2 = ((a * c - b * b) / lambda1).max(0.0);

    let mut v1 = if disc == 0.0 {
        [1.0, 0.0]
    } else {
        // Two algebraically equivalent null vectors of C - λ1·I; keep the better-conditioned one.
        let r1 = [lambda1 - c, b];
        let r2 = [b, lambda1 - a];
        let pick = if r1[0].hypot(r1[1]) >= r2[0].hypot(r2[1]) {
            r1
        } else {
            r2
        };
        let norm = pick[0].hypot(pick[1]);
        [pick[0] / norm, pick[1] / norm]
    };
    if v1[0] < 0.0 || (v1[0] == 0.0 && v1[1] < 0.0) {
        v1 = [-v1[0], -v1[1]];
    }
    let v2 = [-v1[1], v1[0]];
    let total = lambda1 + lambda2;

    Ok(PcaResult {
        mean: [mx, my],
        covariance: [[a, b], [b, c]],
        v1,
        v2,
        lambda1,
        lambda2,
        var_ratio1: lambda1 / total,
        var_ratio2: lambda2 / total,
    })
}
