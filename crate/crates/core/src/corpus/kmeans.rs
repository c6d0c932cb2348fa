use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const DEFAULT_K: usize = 3;
pub const MAX_ITERATIONS: usize = 100;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KMeansResult {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    /// Within-cluster sum of squares after seeding and after every Lloyd step.
    pub objective_history: Vec<f64>,
    pub iterations: usize,
    pub converged: bool,
}

impl KMeansResult {
    pub fn objective(&self) -> f64 {
        *self
            .objective_history
            .last()
            .expect("history is never empty")
    }
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn objective(rows: &[Vec<f64>], labels: &[usize], centroids: &[Vec<f64>]) -> f64 {
    rows.iter()
        .zip(labels)
        .map(|(r, &l)| sq_dist(r, &centroids[l]))
        .sum()
}

/// k-means++ seeding: the first center uniformly, the rest proportional to
/// squared distance from the nearest chosen center.
fn seed_centroids(rows: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let m = rows.len();
    let mut chosen = vec![false; m];
    let first = rng.random_range(0..m);
    chosen[first] = true;
    let mut centroids = vec![rows[first].clone()];
    let mut d2: Vec<f64> = rows.iter().map(|r| sq_dist(r, &rows[first])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                if d <= 0.0 {
                    continue;
                }
                acc += d;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total implies a positive weight")
        } else {
            // All remaining rows coincide with a center; take any unused row.
            let free: Vec<usize> = (0..m).filter(|&i| !chosen[i]).collect();
            free[rng.random_range(0..free.len())]
        };
        chosen[pick] = true;
        for (d, r) in d2.iter_mut().zip(rows) {
            *d = d.min(sq_dist(r, &rows[pick]));
        }
        centroids.push(rows[pick].clone());
    }
    centroids
}

fn nearest(row: &[f64], centroids: &[Vec<f64>]) -> usize {
    let mut best = 0;
    let mut best_d = sq_dist(row, &centroids[0]);
    for (c, centroid) in centroids.iter().enumerate().skip(1) {
        let d = sq_dist(row, centroid);
        if d < best_d {
            best = c;
            best_d = d;
        }
    }
    best
}

/// Lloyd's algorithm with k-means++ seeding.
///
/// A row only changes cluster when another centroid is strictly closer, and a
/// cluster that loses all its rows keeps its previous centroid.
pub fn kmeans(rows: &[Vec<f64>], k: usize, seed: u64) -> Result<KMeansResult> {
    let m = rows.len();
    if k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if k > m {
        return Err(Error::domain(format!(
            "k = {k} exceeds the {m} available rows"
        )));
    }
    let dim = rows[0].len();
    if rows.iter().any(|r| r.len() != dim) {
        return Err(Error::domain("ragged feature table"));
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = seed_centroids(rows, k, &mut rng);
    let mut labels: Vec<usize> = rows.iter().map(|r| nearest(r, &centroids)).collect();
    let mut history = vec![objective(rows, &labels, &centroids)];
    let mut iterations = 0;
    let mut converged = false;

    while iterations < MAX_ITERATIONS {
        iterations += 1;
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (r, &l) in rows.iter().zip(&labels) {
            counts[l] += 1;
            for (s, v) in sums[l].iter_mut().zip(r) {
                *s += v;
            }
        }
        for c in 0..k {
            if counts[c] > 0 {
                centroids[c] = sums[c].iter().map(|s| s / counts[c] as f64).collect();
            }
        }

        let mut changed = false;
        for (r, label) in rows.iter().zip(labels.iter_mut()) {
            let current = sq_dist(r, &centroids[*label]);
            let candidate = nearest(r, &centroids);
            if candidate != *label && sq_dist(r, &centroids[candidate]) < current {
                *label = candidate;
                changed = true;
            }
        }
        history.push(objective(rows, &labels, &centroids));
        if !changed {
            converged = true;
            break;
        }
    }

    Ok(KMeansResult {
        labels,
        centroids,
        objective_history: history,
        iterations,
        converged,
    })
}
