use std::collections::{HashMap, VecDeque};

use super::DetectionSet;
use crate::error::{Error, Result};

/// DBSCAN assignment for one instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ClusterLabel {
    Noise,
    Cluster(usize),
}

impl ClusterLabel {
    pub fn is_noise(self) -> bool {
        self == ClusterLabel::Noise
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DbscanOutcome {
    /// One label per input instance, in input order.
    pub labels: Vec<ClusterLabel>,
    /// Input set with noise instances removed.
    pub filtered: DetectionSet,
}

/// Uniform bucket grid with cell side `eps`; a radius query touches 3×3 cells.
struct CellIndex {
    eps: f64,
    cells: HashMap<(i64, i64), Vec<usize>>,
}

impl CellIndex {
    fn new(points: &[(f64, f64)], eps: f64) -> Self {
        let mut cells: HashMap<(i64, i64), Vec<usize>> = HashMap::new();
        for (i, &p) in points.iter().enumerate() {
            cells.entry(Self::key(p, eps)).or_default().push(i);
        }
        Self { eps, cells }
    }

    fn key((u, v): (f64, f64), eps: f64) -> (i64, i64) {
        ((u / eps).floor() as i64, (v / eps).floor() as i64)
    }

    /// Indices within `eps` of `points[i]` (itself included), ascending.
    fn neighbors(&self, points: &[(f64, f64)], i: usize) -> Vec<usize> {
        let (cx, cy) = Self::key(points[i], self.eps);
        let (u, v) = points[i];
        let eps2 = self.eps * self.eps;
        let mut out = Vec::new();
        for dx in -1..=1 {
            for dy in -1..=1 {
                if let Some(bucket) = self.cells.get(&(cx + dx, cy + dy)) {
                    out.extend(bucket.iter().copied().filter(|&j| {
                        let (du, dv) = (points[j].0 - u, points[j].1 - v);
                        du * du + dv * dv <= eps2
                    }));
                }
            }
        }
        out.sort_unstable();
        out
    }
}

/// Runs DBSCAN on normalized box centers `(u, v) ∈ [0, 1]²` and drops noise.
///
/// A core point has at least `min_pts` neighbors within `eps` (itself
/// included). Clusters are numbered in order of their lowest-index core
/// point; a border point joins the first cluster that reaches it.
pub fn dbscan_centroids(ds: &DetectionSet, eps: f64, min_pts: usize) -> Result<DbscanOutcome> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::domain(format!("eps must be positive, got {eps}")));
    }
    if min_pts < 1 {
        return Err(Error::domain("min_pts must be at least 1"));
    }
    let (w, h) = (f64::from(ds.width), f64::from(ds.height));
    let points: Vec<(f64, f64)> = ds
        .instances
        .iter()
        .map(|inst| {
            let (cx, cy) = inst.center_px();
            (cx / w, cy / h)
        })
        .collect();

    let index = CellIndex::new(&points, eps);
    let mut labels: Vec<Option<ClusterLabel>> = vec![None; points.len()];
    let mut next_cluster = 0;

    for i in 0..points.len() {
        if labels[i].is_some() {
            continue;
        }
        let seeds = index.neighbors(&points, i);
        if seeds.len() < min_pts {
            labels[i] = Some(ClusterLabel::Noise);
            continue;
        }
        let cluster = ClusterLabel::Cluster(next_cluster);
        next_cluster += 1;
        labels[i] = Some(cluster);

        let mut queue: VecDeque<usize> = seeds.into_iter().filter(|&j| j != i).collect();
        while let Some(j) = queue.pop_front() {
            match labels[j] {
                Some(ClusterLabel::Noise) => {
                    // Border point previously rejected as a seed.
                    labels[j] = Some(cluster);
                    continue;
                }
                Some(ClusterLabel::Cluster(_)) => continue,
                None => labels[j] = Some(cluster),
            }
            let reach = index.neighbors(&points, j);
            if reach.len() >= min_pts {
                queue.extend(
                    reach
                        .into_iter()
                        .filter(|&k| !matches!(labels[k], Some(ClusterLabel::Cluster(_)))),
                );
            }
        }
    }

    let labels: Vec<ClusterLabel> = labels
        .into_iter()
        .map(|l| l.unwrap_or(ClusterLabel::Noise))
        .collect();
    let filtered = DetectionSet {
        instances: ds
            .instances
            .iter()
            .zip(&labels)
            .filter(|(_, l)| !l.is_noise())
            .map(|(inst, _)| *inst)
            .collect(),
        ..ds.clone()
    };
    Ok(DbscanOutcome { labels, filtered })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Instance;

    fn at(u: f64, v: f64) -> Instance {
        // 1000×1000 image, 2 px box centered on (u, v).
        let (cx, cy) = (u * 1000.0, v * 1000.0);
        Instance::new([cx - 1.0, cy - 1.0, cx + 1.0, cy + 1.0], 4.0, 1.0)
    }

    #[test]
    fn coincident_points_form_one_cluster() {
        let ds = DetectionSet::new("c", 1000, 1000).with_instances(vec![at(0.5, 0.5); 3]);
        let out = dbscan_centroids(&ds, 0.05, 2).unwrap();
        assert_eq!(out.labels, vec![ClusterLabel::Cluster(0); 3]);
        assert_eq!(out.filtered, ds);
    }

    #[test]
    fn isolated_point_is_noise() {
        let mut inst: Vec<_> = (0..5).map(|i| at(0.2 + 0.01 * i as f64, 0.2)).collect();
        inst.insert(2, at(0.9, 0.9));
        let ds = DetectionSet::new("i", 1000, 1000).with_instances(inst);
        let out = dbscan_centroids(&ds, 0.05, 3).unwrap();
        assert_eq!(out.labels[2], ClusterLabel::Noise);
        assert!(out
            .labels
            .iter()
            .enumerate()
            .all(|(i, l)| i == 2 || *l == ClusterLabel::Cluster(0)));
        assert_eq!(out.filtered.instances.len(), 5);
    }

    #[test]
    fn min_pts_one_keeps_everything() {
        let ds =
            DetectionSet::new("s", 1000, 1000).with_instances(vec![at(0.1, 0.1), at(0.9, 0.9)]);
        let out = dbscan_centroids(&ds, 0.01, 1).unwrap();
        assert_eq!(
            out.labels,
            vec![ClusterLabel::Cluster(0), ClusterLabel::Cluster(1)]
        );
    }

    #[test]
    fn border_point_reached_after_being_marked_noise() {
        // Point 0 has only one neighbor (point 1), so it is visited first as noise;
        // point 1 is core and later absorbs it.
        let ds = DetectionSet::new("b", 1000, 1000).with_instances(vec![
            at(0.10, 0.5),
            at(0.14, 0.5),
            at(0.18, 0.5),
            at(0.19, 0.5),
        ]);
        let out = dbscan_centroids(&ds, 0.045, 3).unwrap();
        assert_eq!(out.labels, vec![ClusterLabel::Cluster(0); 4]);
    }

    #[test]
    fn rejects_bad_parameters() {
        let ds = DetectionSet::new("x", 10, 10);
        assert!(dbscan_centroids(&ds, 0.0, 2).is_err());
        assert!(dbscan_centroids(&ds, 0.1, 0).is_err());
        assert!(dbscan_centroids(&ds, 0.1, 2).unwrap().labels.is_empty());
    }
}
