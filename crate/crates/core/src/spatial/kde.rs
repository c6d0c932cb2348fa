use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel bandwidth selection.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Bandwidth {
    /// Scott's rule for 2D data: `h = n^(-1/6) · sqrt((var x + var y) / 2)`.
    #[default]
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KdeConfig {
    pub bandwidth: Bandwidth,
    /// Grid nodes per axis.
    pub resolution: usize,
    /// Maximum number of hotspots reported.
    pub top_k: usize,
}

impl Default for KdeConfig {
    fn default() -> Self {
        Self {
            bandwidth: Bandwidth::Auto,
            resolution: 256,
            top_k: 3,
        }
    }
}

/// A local maximum of the density grid.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hotspot {
    pub x: f64,
    pub y: f64,
    pub density: f64,
}

/// Gaussian KDE sampled on a square grid over `[-1, 1]²`.
///
/// Node `(i, j)` sits at `(-1 + i·Δ, -1 + j·Δ)` with `Δ = 2 / resolution`, so
/// the origin is a node whenever the resolution is even.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityField {
    pub resolution: usize,
    pub bandwidth: f64,
    /// Row-major values, `grid[j * resolution + i]`; row `j` has constant `y`.
    pub grid: Vec<f64>,
    /// Strongest first.
    pub hotspots: Vec<Hotspot>,
}

impl DensityField {
    pub fn cell(&self) -> f64 {
        2.0 / self.resolution as f64
    }

    pub fn node(&self, index: usize) -> f64 {
        -1.0 + index as f64 * self.cell()
    }

    pub fn value(&self, i: usize, j: usize) -> f64 {
        self.grid[j * self.resolution + i]
    }

    /// Left Riemann sum of the grid over the window.
    pub fn mass(&self) -> f64 {
        self.grid.iter().sum::<f64>() * self.cell() * self.cell()
    }

    pub fn max_value(&self) -> f64 {
        self.grid.iter().copied().fold(0.0, f64::max)
    }
}

/// Scott's-rule bandwidth for a 2D sample.
pub fn scott_bandwidth(points: &[(f64, f64)]) -> Result<f64> {
    let n = points.len();
    if n < 2 {
        return Err(Error::degenerate(
            "automatic bandwidth needs at least 2 points",
        ));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1).collect();
    let pooled =
        (0.5 * (crate::stats::sample_variance(&xs) + crate::stats::sample_variance(&ys))).sqrt();
    if !(pooled > 0.0) {
        return Err(Error::degenerate(
            "automatic bandwidth undefined for coincident points",
        ));
    }
    Ok((n as f64).powf(-1.0 / 6.0) * pooled)
}

/// Evaluates the density grid and extracts up to `top_k` hotspots.
pub fn kde(points: &[(f64, f64)], config: &KdeConfig) -> Result<DensityField> {
    if points.is_empty() {
        return Err(Error::degenerate("KDE of an empty point set"));
    }
    let h = match config.bandwidth {
        Bandwidth::Auto => scott_bandwidth(points)?,
        Bandwidth::Fixed(h) if h > 0.0 && h.is_finite() => h,
        Bandwidth::Fixed(h) => {
            return Err(Error::domain(format!(
                "bandwidth must be positive, got {h}"
            )))
        }
    };
    let r = config.resolution;
    if r < 2 {
        return Err(Error::domain("grid resolution must be at least 2"));
    }
    let cell = 2.0 / r as f64;
    let inv_two_h2 = 1.0 / (2.0 * h * h);
    let norm = 1.0 / (points.len() as f64 * h * h * 2.0 * std::f64::consts::PI);

    // The Gaussian kernel factorizes over axes: per point, one exp table per axis.
    let axis = |coord: f64| -> Vec<f64> {
        (0..r)
            .map(|i| {
                let d = -1.0 + i as f64 * cell - coord;
                (-d * d * inv_two_h2).exp()
            })
            .collect()
    };
    let gx: Vec<Vec<f64>> = points.iter().map(|p| axis(p.0)).collect();
    let gy: Vec<Vec<f64>> = points.iter().map(|p| axis(p.1)).collect();

    let mut grid = vec![0.0; r * r];
    grid.par_chunks_mut(r).enumerate().for_each(|(j, row)| {
        for (p, gxp) in gx.iter().enumerate() {
            let wy = gy[p][j];
            if wy == 0.0 {
                continue;
            }
            for (cell_value, wx) in row.iter_mut().zip(gxp) {
                *cell_value += wy * wx;
            }
        }
        for v in row.iter_mut() {
            *v *= norm;
        }
    });

    let mut field = DensityField {
        resolution: r,
        bandwidth: h,
        grid,
        hotspots: Vec::new(),
    };
    field.hotspots = find_hotspots(&field, config.top_k, h);
    Ok(field)
}

/// Grid local maxima over the 8-neighborhood, strongest first, with
/// non-maximum suppression at distance `suppression`.
///
/// Equal values are ordered by raster index (lower index wins), which makes
/// every reported node a strict maximum under that total order.
pub fn find_hotspots(field: &DensityField, top_k: usize, suppression: f64) -> Vec<Hotspot> {
    let r = field.resolution;
    let mut candidates: Vec<(usize, usize)> = Vec::new();
    for j in 0..r {
        for i in 0..r {
            let v = field.value(i, j);
            if !(v > 0.0) {
                continue;
            }
            let idx = j * r + i;
            let mut is_max = true;
            'scan: for dj in -1i64..=1 {
                for di in -1i64..=1 {
                    if di == 0 && dj == 0 {
                        continue;
                    }
                    let (ni, nj) = (i as i64 + di, j as i64 + dj);
                    if ni < 0 || nj < 0 || ni >= r as i64 || nj >= r as i64 {
                        continue;
                    }
                    let nidx = nj as usize * r + ni as usize;
                    let nv = field.grid[nidx];
                    if nv > v || (nv == v && nidx < idx) {
                        is_max = false;
                        break 'scan;
                    }
                }
            }
            if is_max {
                candidates.push((i, j));
            }
        }
    }
    candidates.sort_by(|a, b| {
        field
            .value(b.0, b.1)
            .total_cmp(&field.value(a.0, a.1))
            .then((a.1 * r + a.0).cmp(&(b.1 * r + b.0)))
    });

    let mut accepted: Vec<Hotspot> = Vec::new();
    for (i, j) in candidates {
        if accepted.len() >= top_k {
            break;
        }
        let (x, y) = (field.node(i), field.node(j));
        if accepted
            .iter()
            .all(|hs| (hs.x - x).hypot(hs.y - y) >= suppression)
        {
            accepted.push(Hotspot {
                x,
                y,
                density: field.value(i, j),
            });
        }
    }
    accepted
}
