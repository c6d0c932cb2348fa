use serde::{Deserialize, Serialize};

use super::{Feature, FeatureVector};
use crate::error::{Error, Result};
use crate::stats::is_negligible_spread;

/// Column-wise z-scores of a feature table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ZScores {
    pub mu: Vec<f64>,
    /// Sample standard deviations.
    pub sigma: Vec<f64>,
    /// Columns with no spread; their normalized values are all 0.
    pub constant: Vec<bool>,
    /// Row-major normalized values.
    pub normalized: Vec<Vec<f64>>,
}

/// Standardizes each column of `rows` to zero mean and unit sample variance.
pub fn zscore(rows: &[Vec<f64>]) -> Result<ZScores> {
    let m = rows.len();
    if m < 2 {
        return Err(Error::degenerate(format!(
            "normalization needs at least 2 rows, got {m}"
        )));
    }
    let j = rows[0].len();
    if rows.iter().any(|r| r.len() != j) {
        return Err(Error::domain("ragged feature table"));
    }
    let mut out = ZScores {
        mu: Vec::with_capacity(j),
        sigma: Vec::with_capacity(j),
        constant: Vec::with_capacity(j),
        normalized: vec![vec![0.0; j]; m],
    };
    for c in 0..j {
        let col: Vec<f64> = rows.iter().map(|r| r[c]).collect();
        if col.iter().any(|v| !v.is_finite()) {
            return Err(Error::domain(format!(
                "column {c} holds a non-finite value"
            )));
        }
        let mu = col.iter().sum::<f64>() / m as f64;
        let ss: f64 = col.iter().map(|v| (v - mu) * (v - mu)).sum();
        let sigma = (ss / (m - 1) as f64).sqrt();
        let constant = is_negligible_spread(ss, &col);
        for (r, v) in col.iter().enumerate() {
            out.normalized[r][c] = if constant { 0.0 } else { (v - mu) / sigma };
        }
        out.mu.push(mu);
        out.sigma.push(sigma);
        out.constant.push(constant);
    }
    Ok(out)
}

/// Stacked feature vectors with their normalized table and clustering results.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusMatrix {
    pub rows: Vec<FeatureVector>,
    pub features: Vec<Feature>,
    pub mu: Vec<f64>,
    pub sigma: Vec<f64>,
    pub constant: Vec<bool>,
    pub normalized: Vec<Vec<f64>>,
    pub labels: Vec<usize>,
    pub outlier_flags: Vec<bool>,
}

impl CorpusMatrix {
    pub fn raw_column(&self, feature: Feature) -> Option<Vec<f64>> {
        self.rows.iter().map(|r| feature.value(r)).collect()
    }
}

/// Builds the normalized corpus table over the selected features.
///
/// Every selected feature must be present in every row.
pub fn normalize(rows: &[FeatureVector], features: &[Feature]) -> Result<CorpusMatrix> {
    if features.is_empty() {
        return Err(Error::domain("no features selected"));
    }
    let table = rows
        .iter()
        .map(|row| {
            features
                .iter()
                .map(|&f| {
                    f.value(row).ok_or_else(|| {
                        Error::domain(format!(
                            "feature `{f}` is missing for image `{}`",
                            row.image_id
                        ))
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    let z = zscore(&table)?;
    Ok(CorpusMatrix {
        rows: rows.to_vec(),
        features: features.to_vec(),
        mu: z.mu,
        sigma: z.sigma,
        constant: z.constant,
        normalized: z.normalized,
        labels: Vec::new(),
        outlier_flags: vec![false; rows.len()],
    })
}
