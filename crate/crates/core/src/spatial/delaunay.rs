use std::cmp::Ordering;
use std::collections::{BTreeSet, HashSet};

use serde::{Deserialize, Serialize};

use super::predicates::{incircle, orient, Vertex};
use crate::error::{Error, Result};
use crate::stats;

/// Directions of the symbolic super-triangle, counter-clockwise.
const SUPER: [(i64, i64); 3] = [(-1, -1), (1, -1), (0, 1)];

/// Delaunay mesh of a 2D point set and its edge-length summary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EdgeStats {
    /// Unique edges as `(i, j)` with `i < j`, sorted.
    pub edges: Vec<(usize, usize)>,
    /// Counter-clockwise triangles, sorted.
    pub triangles: Vec<[usize; 3]>,
    pub mean: f64,
    /// Sample standard deviation (`n - 1`).
    pub std: f64,
    pub min: f64,
    pub max: f64,
}

impl EdgeStats {
    pub fn lengths(&self, points: &[(f64, f64)]) -> Vec<f64> {
        self.edges
            .iter()
            .map(|&(i, j)| (points[i].0 - points[j].0).hypot(points[i].1 - points[j].1))
            .collect()
    }
}

/// Bowyer–Watson triangulation of `points`.
///
/// The enclosing super-triangle has its vertices at infinity, so no input
/// triangle is ever lost to a finite bounding triangle. Points are inserted
/// in lexicographic order; exact duplicates are collapsed onto the first
/// occurrence. Cocircular configurations yield one valid Delaunay
/// triangulation chosen deterministically by that order.
pub fn triangulate(points: &[(f64, f64)]) -> Result<Vec<[usize; 3]>> {
    if points.iter().any(|p| !(p.0.is_finite() && p.1.is_finite())) {
        return Err(Error::domain("triangulation input must be finite"));
    }
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        points[a]
            .0
            .total_cmp(&points[b].0)
            .then(points[a].1.total_cmp(&points[b].1))
            .then(a.cmp(&b))
    });
    order.dedup_by(|b, a| points[*a] == points[*b]);
    if order.len() < 3 {
        return Err(Error::degenerate(format!(
            "triangulation needs at least 3 distinct points, got {}",
            order.len()
        )));
    }

    let n = points.len();
    let vertex = |k: usize| -> Vertex {
        if k < n {
            Vertex::Finite(points[k].0, points[k].1)
        } else {
            let (dx, dy) = SUPER[k - n];
            Vertex::Infinite(dx, dy)
        }
    };

    let mut triangles: Vec<[usize; 3]> = vec![[n, n + 1, n + 2]];
    for &p in &order {
        let vp = vertex(p);
        let (bad, mut kept): (Vec<[usize; 3]>, Vec<[usize; 3]>) =
            triangles.into_iter().partition(|t| {
                incircle(vertex(t[0]), vertex(t[1]), vertex(t[2]), vp) == Ordering::Greater
            });

        let directed: HashSet<(usize, usize)> = bad
            .iter()
            .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
            .collect();
        for t in &bad {
            for (a, b) in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                if !directed.contains(&(b, a)) {
                    kept.push([a, b, p]);
                }
            }
        }
        triangles = kept;
    }

    let mut out: Vec<[usize; 3]> = triangles
        .into_iter()
        .filter(|t| t.iter().all(|&k| k < n))
        .map(canonical_rotation)
        .collect();
    out.sort_unstable();
    if out.is_empty() {
        return Err(Error::degenerate("all points are collinear"));
    }
    debug_assert!(out
        .iter()
        .all(|t| orient(vertex(t[0]), vertex(t[1]), vertex(t[2])) == Ordering::Greater));
    Ok(out)
}

/// Rotates a triangle so its smallest index comes first, keeping orientation.
fn canonical_rotation(t: [usize; 3]) -> [usize; 3] {
    let m = (0..3).min_by_key(|&i| t[i]).unwrap_or(0);
    [t[m], t[(m + 1) % 3], t[(m + 2) % 3]]
}

/// Unique undirected edges of a triangle list.
pub fn edges_of(triangles: &[[usize; 3]]) -> Vec<(usize, usize)> {
    let set: BTreeSet<(usize, usize)> = triangles
        .iter()
        .flat_map(|t| [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])])
        .map(|(a, b)| (a.min(b), a.max(b)))
        .collect();
    set.into_iter().collect()
}

/// Triangulates and summarizes Euclidean edge lengths.
pub fn delaunay(points: &[(f64, f64)]) -> Result<EdgeStats> {
    let triangles = triangulate(points)?;
    let edges = edges_of(&triangles);
    let mut stats = EdgeStats {
        edges,
        triangles,
        mean: 0.0,
        std: 0.0,
        min: 0.0,
        max: 0.0,
    };
    let lengths = stats.lengths(points);
    stats.mean = stats::mean(&lengths);
    stats.std = stats::sample_std(&lengths);
    stats.min = lengths.iter().copied().fold(f64::INFINITY, f64::min);
    stats.max = lengths.iter().copied().fold(0.0, f64::max);
    Ok(stats)
}
