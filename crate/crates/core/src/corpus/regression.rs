use serde::{Deserialize, Serialize};

use super::CorpusMatrix;
use crate::error::{Error, Result};
use crate::stats::is_negligible_spread;

/// Residual norm, relative to the column norm, below which a column counts as
/// dependent on the ones before it.
const RANK_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamRegression {
    pub parameter_name: String,
    pub feature_names: Vec<String>,
    pub gamma0: f64,
    pub gamma: Vec<f64>,
    pub r_squared: f64,
    pub n_used: usize,
}

impl ParamRegression {
    pub fn predict(&self, features: &[f64]) -> f64 {
        self.gamma0
            + self
                .gamma
                .iter()
                .zip(features)
                .map(|(g, f)| g * f)
                .sum::<f64>()
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Least squares of `y` on `[1, columns...]` through a Gram–Schmidt QR.
pub fn ols(
    parameter_name: &str,
    names: &[String],
    columns: &[Vec<f64>],
    y: &[f64],
) -> Result<ParamRegression> {
    let n = y.len();
    let j = columns.len();
    if columns.iter().any(|c| c.len() != n) || names.len() != j {
        return Err(Error::domain(
            "design columns and response differ in length",
        ));
    }
    if n < j + 2 {
        return Err(Error::degenerate(format!(
            "regression on {j} features needs at least {} rows, got {n}",
            j + 2
        )));
    }
    if columns.iter().flatten().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::domain("regression inputs must be finite"));
    }

    let mut all_names = vec!["intercept".to_string()];
    all_names.extend(names.iter().cloned());
    let mut design = vec![vec![1.0; n]];
    design.extend(columns.iter().cloned());
    let p = j + 1;

    let mut q: Vec<Vec<f64>> = Vec::with_capacity(p);
    let mut r = vec![vec![0.0; p]; p];
    for (c, col) in design.iter().enumerate() {
        let norm0 = dot(col, col).sqrt();
        let mut v = col.clone();
        // Two passes of modified Gram–Schmidt keep Q orthogonal to rounding.
        for _ in 0..2 {
            for (i, qi) in q.iter().enumerate() {
                let coef = dot(qi, &v);
                r[i][c] += coef;
                for (vk, qk) in v.iter_mut().zip(qi) {
                    *vk -= coef * qk;
                }
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm0 == 0.0 || norm <= RANK_TOL * norm0 {
            let coef = back_substitute(&r, c, &r.iter().map(|row| row[c]).collect::<Vec<_>>());
            let mut culprits: Vec<String> = coef
                .iter()
                .enumerate()
                .filter(|(_, x)| x.abs() > 1e-9)
                .map(|(i, _)| all_names[i].clone())
                .collect();
            culprits.push(all_names[c].clone());
            return Err(Error::RankDeficient { columns: culprits });
        }
        r[c][c] = norm;
        q.push(v.iter().map(|x| x / norm).collect());
    }

    let qty: Vec<f64> = q.iter().map(|qi| dot(qi, y)).collect();
    let coef = back_substitute(&r, p, &qty);

    let mean_y = y.iter().sum::<f64>() / n as f64;
    let sst: f64 = y.iter().map(|v| (v - mean_y) * (v - mean_y)).sum();
    let sse: f64 = (0..n)
        .map(|i| {
            let fit: f64 = design.iter().zip(&coef).map(|(col, g)| col[i] * g).sum();
            (y[i] - fit) * (y[i] - fit)
        })
        .sum();
    let r_squared = if is_negligible_spread(sst, y) {
        0.0
    } else {
        1.0 - sse / sst
    };

    Ok(ParamRegression {
        parameter_name: parameter_name.to_string(),
        feature_names: names.to_vec(),
        gamma0: coef[0],
        gamma: coef[1..].to_vec(),
        r_squared,
        n_used: n,
    })
}

/// Solves the leading `size × size` upper-triangular block of `r` against `rhs`.
fn back_substitute(r: &[Vec<f64>], size: usize, rhs: &[f64]) -> Vec<f64> {
    let mut x = vec![0.0; size];
    for i in (0..size).rev() {
        let tail: f64 = (i + 1..size).map(|k| r[i][k] * x[k]).sum();
        x[i] = (rhs[i] - tail) / r[i][i];
    }
    x
}

/// Regresses a blast parameter on the corpus features (raw, unnormalized values).
///
/// `params[i]` belongs to `matrix.rows[i]`; rows with a missing parameter are skipped.
pub fn param_regression(
    matrix: &CorpusMatrix,
    parameter_name: &str,
    params: &[Option<f64>],
) -> Result<ParamRegression> {
    if params.len() != matrix.rows.len() {
        return Err(Error::domain(
            "one parameter value per corpus row is required",
        ));
    }
    let keep: Vec<usize> = (0..params.len()).filter(|&i| params[i].is_some()).collect();
    let y: Vec<f64> = keep.iter().map(|&i| params[i].unwrap()).collect();
    let names: Vec<String> = matrix
        .features
        .iter()
        .map(|f| f.name().to_string())
        .collect();
    let columns = matrix
        .features
        .iter()
        .map(|&f| {
            keep.iter()
                .map(|&i| {
                    f.value(&matrix.rows[i])
                        .ok_or_else(|| Error::domain(format!("feature `{f}` is missing")))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    ols(parameter_name, &names, &columns, &y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spatial::regression::ols_line;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn names(n: usize) -> Vec<String> {
        (0..n).map(|i| format!("f{i}")).collect()
    }

    #[test]
    fn exact_linear_response() {
        let f0: Vec<f64> = (0..10).map(|i| i as f64 * 0.7 - 2.0).collect();
        let f1: Vec<f64> = (0..10).map(|i| ((i * i) % 7) as f64).collect();
        let y: Vec<f64> = f0.iter().map(|v| 1.5 + 4.0 * v).collect();
        let fit = ols("P", &names(2), &[f0, f1], &y).unwrap();
        assert!((fit.gamma0 - 1.5).abs() < 1e-12);
        assert!((fit.gamma[0] - 4.0).abs() < 1e-12);
        assert!(fit.gamma[1].abs() < 1e-12);
        assert!((fit.r_squared - 1.0).abs() < 1e-12);
    }

    #[test]
    fn noise_response_has_small_r_squared() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let f: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
        let y: Vec<f64> = (0..400).map(|_| rng.random::<f64>()).collect();
        let fit = ols("P", &names(1), &[f], &y).unwrap();
        assert!(fit.r_squared < 0.02, "{}", fit.r_squared);
    }

    #[test]
    fn duplicate_columns_are_named() {
        let f: Vec<f64> = (0..8).map(|i| (i as f64).sqrt()).collect();
        let g: Vec<f64> = (0..8).map(|i| i as f64).collect();
        let y: Vec<f64> = (0..8).map(|i| i as f64 * 2.0).collect();
        let err = ols("P", &names(3), &[f.clone(), g, f], &y).unwrap_err();
        match err {
            Error::RankDeficient { columns } => assert_eq!(columns, vec!["f0", "f2"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn constant_column_collides_with_intercept() {
        let f = vec![2.0; 6];
        let y: Vec<f64> = (0..6).map(|i| i as f64).collect();
        match ols("P", &names(1), &[f], &y).unwrap_err() {
            Error::RankDeficient { columns } => assert_eq!(columns, vec!["intercept", "f0"]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn too_few_rows() {
        let f = vec![1.0, 2.0];
        assert!(matches!(
            ols("P", &names(1), &[f], &[1.0, 2.0]),
            Err(Error::Degenerate(_))
        ));
    }

    proptest! {
        #[test]
        fn bivariate_case_matches_line_fit(
            xy in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 3..60),
        ) {
            let x: Vec<f64> = xy.iter().map(|p| p.0).collect();
            let y: Vec<f64> = xy.iter().map(|p| p.1).collect();
            let mx = x.iter().sum::<f64>() / x.len() as f64;
            let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
            prop_assume!(sxx / x.len() as f64 > 0.05);
            let line = ols_line(&x, &y).unwrap();
            let multi = ols("P", &names(1), &[x], &y).unwrap();
            let tol = |a: f64| 1e-12 * a.abs().max(1.0);
            prop_assert!((line.alpha - multi.gamma0).abs() <= tol(line.alpha));
            prop_assert!((line.beta - multi.gamma[0]).abs() <= tol(line.beta));
            prop_assert!((line.r_squared - multi.r_squared).abs() <= 1e-12);
        }
    }
}
