use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::format::sig;
use super::svg::{category_color, padded_range, viridis, Frame, Svg};
use crate::coords::{FragmentCloud, SizeMetric};
use crate::corpus::{CorpusMatrix, FeatureVector};
use crate::spatial::{self, overlay, Bandwidth, KdeConfig};

/// Side length of the downsampled density heatmap.
pub const HEATMAP_CELLS: usize = 64;
/// The heatmap shows natural-log density down to this many units below its peak.
pub const LOG_DENSITY_SPAN: f64 = 10.0;

const HIST_BINS: usize = 20;

/// Per-image figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Plot {
    Overlay,
    Density,
    Pca,
    SizeDepth,
    Delaunay,
    Ripley,
    ElevationHist,
    SizeHist,
    Cloud3d,
}

impl Plot {
    pub const ALL: [Plot; 9] = [
        Plot::Overlay,
        Plot::Density,
        Plot::Pca,
        Plot::SizeDepth,
        Plot::Delaunay,
        Plot::Ripley,
        Plot::ElevationHist,
        Plot::SizeHist,
        Plot::Cloud3d,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Plot::Overlay => "overlay",
            Plot::Density => "density",
            Plot::Pca => "pca",
            Plot::SizeDepth => "size_depth",
            Plot::Delaunay => "delaunay",
            Plot::Ripley => "ripley",
            Plot::ElevationHist => "elevation_hist",
            Plot::SizeHist => "size_hist",
            Plot::Cloud3d => "cloud3d",
        }
    }
}

impl fmt::Display for Plot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Plot {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Plot::ALL
            .iter()
            .copied()
            .find(|p| p.name() == s)
            .ok_or_else(|| format!("unknown plot `{s}`"))
    }
}

/// Parses `all`, `none` or a comma-separated list of plot names.
pub fn parse_plot_list(s: &str) -> Result<Vec<Plot>, String> {
    match s.trim() {
        "all" => Ok(Plot::ALL.to_vec()),
        "none" | "" => Ok(Vec::new()),
        list => {
            let mut plots = list
                .split(',')
                .map(|p| p.trim().parse())
                .collect::<Result<Vec<Plot>, _>>()?;
            plots.sort();
            plots.dedup();
            Ok(plots)
        }
    }
}

/// Renders the selected figures in selection order. Figures whose inputs are
/// missing are skipped and reported in the second list.
pub fn render_plots(
    cloud: &FragmentCloud,
    feature: &FeatureVector,
    selection: &[Plot],
) -> (Vec<(Plot, String)>, Vec<String>) {
    let mut out = Vec::new();
    let mut warnings = Vec::new();
    for &plot in selection {
        let rendered = match plot {
            Plot::Overlay => overlay_plot(cloud, feature),
            Plot::Density => density_plot(cloud, feature),
            Plot::Pca => pca_plot(cloud, feature),
            Plot::SizeDepth => size_depth_plot(cloud, feature),
            Plot::Delaunay => delaunay_plot(cloud),
            Plot::Ripley => ripley_plot(feature),
            Plot::ElevationHist => elevation_hist(cloud),
            Plot::SizeHist => size_hist(cloud),
            Plot::Cloud3d => cloud3d_plot(cloud),
        };
        match rendered {
            Ok(svg) => out.push((plot, svg)),
            Err(why) => warnings.push(format!("{}: {plot} plot omitted: {why}", feature.image_id)),
        }
    }
    (out, warnings)
}

type Rendered = Result<String, String>;

fn need_points(cloud: &FragmentCloud, min: usize) -> Result<(), String> {
    if cloud.len() < min {
        Err(format!(
            "needs at least {min} fragments, found {}",
            cloud.len()
        ))
    } else {
        Ok(())
    }
}

fn square_frame(top: f64) -> Frame {
    Frame::new((-1.0, 1.0), (-1.0, 1.0), 70.0, top, 400.0, 400.0)
}

fn overlay_plot(cloud: &FragmentCloud, feature: &FeatureVector) -> Rendered {
    need_points(cloud, 1)?;
    let (w, h) = (f64::from(cloud.width), f64::from(cloud.height));
    let k = 800.0 / w.max(h);
    let mut svg = Svg::new(w * k, h * k);
    svg.rect(0.0, 0.0, w * k, h * k, "#f4f4f4", Some("#333333"));
    for p in &cloud.points {
        let (bw, bh) = (p.box_w * w * k, p.box_h * h * k);
        svg.rect(
            p.u * w * k - 0.5 * bw,
            p.v * h * k - 0.5 * bh,
            bw,
            bh,
            "none",
            Some("#1f77b4"),
        );
    }
    if let Some(v1) = feature.v1 {
        let length = overlay::default_arrow_length(cloud.width, cloud.height);
        let seg = overlay::principal_arrow(cloud.width, cloud.height, v1, length);
        let scale = |p: [f64; 2]| [p[0] * k, p[1] * k];
        svg.arrow(scale(seg.start), scale(seg.end), "#d62728", 3.0);
    }
    let pixels = overlay::hotspot_pixels(cloud.width, cloud.height, &feature.hotspots);
    for (rank, p) in pixels.iter().enumerate() {
        let at = [p[0] * k, p[1] * k];
        svg.ring(at, 10.0, "#ff7f0e", 2.5);
        svg.text(
            [at[0] + 13.0, at[1] - 8.0],
            14.0,
            "start",
            &(rank + 1).to_string(),
        );
    }
    Ok(svg.finish())
}

fn density_plot(cloud: &FragmentCloud, feature: &FeatureVector) -> Rendered {
    need_points(cloud, 2)?;
    let config = KdeConfig {
        bandwidth: feature.bandwidth.map_or(Bandwidth::Auto, Bandwidth::Fixed),
        ..KdeConfig::default()
    };
    let field = spatial::kde(cloud, &config).map_err(|e| e.to_string())?;
    let r = field.resolution;
    let cells = HEATMAP_CELLS.min(r);
    let mut block = vec![0.0; cells * cells];
    let mut count = vec![0usize; cells * cells];
    for j in 0..r {
        for i in 0..r {
            let b = (j * cells / r) * cells + i * cells / r;
            block[b] += field.value(i, j);
            count[b] += 1;
        }
    }
    let logs: Vec<f64> = block
        .iter()
        .zip(&count)
        .map(|(s, c)| (s / *c as f64).ln())
        .collect();
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let lo = hi - LOG_DENSITY_SPAN;

    let mut svg = Svg::new(560.0, 500.0);
    let frame = square_frame(40.0);
    let step = 2.0 / cells as f64;
    for bj in 0..cells {
        for bi in 0..cells {
            let t = (logs[bj * cells + bi] - lo) / LOG_DENSITY_SPAN;
            let (x0, y0) = (-1.0 + bi as f64 * step, -1.0 + bj as f64 * step);
            let a = frame.at(x0, y0 + step);
            let b = frame.at(x0 + step, y0);
            svg.rect(
                a[0],
                a[1],
                b[0] - a[0] + 0.5,
                b[1] - a[1] + 0.5,
                &viridis(t),
                None,
            );
        }
    }
    for (rank, hs) in feature.hotspots.iter().enumerate() {
        let at = frame.at(hs.x, hs.y);
        svg.ring(at, 8.0, "#ffffff", 2.0);
        svg.text(
            [at[0] + 10.0, at[1] - 6.0],
            12.0,
            "start",
            &(rank + 1).to_string(),
        );
    }
    frame.axes(
        &mut svg,
        &format!("KDE, h = {}", sig(field.bandwidth, 4)),
        "x",
        "y",
    );
    for k in 0..10 {
        let t = (k as f64 + 0.5) / 10.0;
        svg.rect(
            490.0,
            400.0 - 40.0 * k as f64,
            20.0,
            40.5,
            &viridis(t),
            None,
        );
    }
    svg.text(
        [500.0, 34.0],
        10.0,
        "middle",
        &format!("ln f: {}", sig(hi, 3)),
    );
    svg.text([500.0, 456.0], 10.0, "middle", &sig(lo, 3));
    Ok(svg.finish())
}

fn pca_plot(cloud: &FragmentCloud, feature: &FeatureVector) -> Rendered {
    need_points(cloud, 2)?;
    let (Some(l1), Some(l2), Some(v1)) = (feature.lambda1, feature.lambda2, feature.v1) else {
        return Err("principal axes unavailable".into());
    };
    let xy = cloud.xy();
    let n = xy.len() as f64;
    let mean = [
        xy.iter().map(|p| p.0).sum::<f64>() / n,
        xy.iter().map(|p| p.1).sum::<f64>() / n,
    ];
    let v2 = [-v1[1], v1[0]];
    let mut svg = Svg::new(520.0, 500.0);
    let frame = square_frame(40.0);
    for p in &xy {
        svg.circle(frame.at(p.0, p.1), 2.0, "#7f7f7f");
    }
    for (v, l, color) in [(v1, l1, "#d62728"), (v2, l2, "#1f77b4")] {
        let len = 2.0 * l.sqrt();
        svg.arrow(
            frame.at(mean[0], mean[1]),
            frame.at(mean[0] + len * v[0], mean[1] + len * v[1]),
            color,
            2.5,
        );
    }
    let ratio = feature.var_ratio1.map_or(String::from("-"), |r| sig(r, 3));
    frame.axes(
        &mut svg,
        &format!("principal axes, λ1 share {ratio}"),
        "x",
        "y",
    );
    Ok(svg.finish())
}

fn size_depth_plot(cloud: &FragmentCloud, feature: &FeatureVector) -> Rendered {
    let pts: Vec<(f64, f64)> = cloud
        .points
        .iter()
        .filter(|p| p.z > 0.0 && p.s > 0.0)
        .map(|p| (p.z.ln(), p.s.ln()))
        .collect();
    if pts.is_empty() {
        return Err("no fragments with positive size and depth".into());
    }
    let (Some(alpha), Some(beta)) = (feature.alpha, feature.beta) else {
        return Err("size-depth fit unavailable".into());
    };
    let xr = padded_range(pts.iter().map(|p| p.0));
    let yr = padded_range(pts.iter().map(|p| p.1));
    let frame = Frame::new(xr, yr, 70.0, 40.0, 540.0, 380.0);
    let mut svg = Svg::new(640.0, 480.0);
    for p in &pts {
        svg.circle(frame.at(p.0, p.1), 2.0, "#1f77b4");
    }
    let (a, b) = frame.x_range;
    let clip = |y: f64| y.clamp(frame.y_range.0, frame.y_range.1);
    svg.line(
        frame.at(a, clip(alpha + beta * a)),
        frame.at(b, clip(alpha + beta * b)),
        "#d62728",
        2.0,
    );
    let r2 = feature.r_squared.map_or(String::from("-"), |r| sig(r, 4));
    frame.axes(
        &mut svg,
        &format!("β = {}, R² = {r2}", sig(beta, 5)),
        "ln z",
        "ln s",
    );
    Ok(svg.finish())
}

fn delaunay_plot(cloud: &FragmentCloud) -> Rendered {
    need_points(cloud, 3)?;
    let xy = cloud.xy();
    let stats = spatial::delaunay::delaunay(&xy).map_err(|e| e.to_string())?;
    let mut svg = Svg::new(520.0, 500.0);
    let frame = square_frame(40.0);
    for &(a, b) in &stats.edges {
        svg.line(
            frame.at(xy[a].0, xy[a].1),
            frame.at(xy[b].0, xy[b].1),
            "#2ca02c",
            1.0,
        );
    }
    for p in &xy {
        svg.circle(frame.at(p.0, p.1), 2.0, "#333333");
    }
    frame.axes(
        &mut svg,
        &format!("Delaunay, mean edge {}", sig(stats.mean, 4)),
        "x",
        "y",
    );
    Ok(svg.finish())
}

fn ripley_plot(feature: &FeatureVector) -> Rendered {
    let Some(k) = &feature.k_function else {
        return Err("K function unavailable".into());
    };
    if k.radii.is_empty() {
        return Err("no radii".into());
    }
    let xr = padded_range(k.radii.iter().copied());
    let yr = padded_range(k.k_observed.iter().chain(&k.k_poisson).copied());
    let frame = Frame::new(xr, yr, 70.0, 40.0, 540.0, 380.0);
    let mut svg = Svg::new(640.0, 480.0);
    let curve = |vals: &[f64]| -> Vec<[f64; 2]> {
        k.radii
            .iter()
            .zip(vals)
            .map(|(r, v)| frame.at(*r, *v))
            .collect()
    };
    svg.polyline(&curve(&k.k_poisson), "#7f7f7f", 1.5, Some("6 4"));
    svg.polyline(&curve(&k.k_observed), "#1f77b4", 2.0, None);
    let unit = match k.window {
        spatial::WindowKind::Normalized => "r (normalized)",
        spatial::WindowKind::Metric => "r (m)",
    };
    frame.axes(&mut svg, "Ripley's K (dashed: πr²)", unit, "K(r)");
    Ok(svg.finish())
}

fn histogram(values: &[f64], title: &str, x_label: &str) -> Rendered {
    if values.is_empty() {
        return Err("no values".into());
    }
    let (lo, hi) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), v| {
            (a.min(*v), b.max(*v))
        });
    let width = if hi > lo {
        (hi - lo) / HIST_BINS as f64
    } else {
        1.0
    };
    let mut counts = [0usize; HIST_BINS];
    for v in values {
        let b = (((v - lo) / width) as usize).min(HIST_BINS - 1);
        counts[b] += 1;
    }
    let top = *counts.iter().max().expect("bins") as f64;
    let frame = Frame::new(
        (lo, lo + width * HIST_BINS as f64),
        (0.0, top * 1.05),
        70.0,
        40.0,
        540.0,
        380.0,
    );
    let mut svg = Svg::new(640.0, 480.0);
    for (b, &c) in counts.iter().enumerate() {
        let x0 = lo + b as f64 * width;
        let a = frame.at(x0, c as f64);
        let z = frame.at(x0 + width, 0.0);
        svg.rect(
            a[0],
            a[1],
            z[0] - a[0],
            z[1] - a[1],
            "#1f77b4",
            Some("#ffffff"),
        );
    }
    frame.axes(&mut svg, title, x_label, "count");
    Ok(svg.finish())
}

fn elevation_hist(cloud: &FragmentCloud) -> Rendered {
    match cloud.elevations_m() {
        Ok(v) => histogram(&v, "elevation", "elevation (m)"),
        Err(_) => {
            let y: Vec<f64> = cloud.points.iter().map(|p| p.y).collect();
            histogram(&y, "elevation", "y (normalized)")
        }
    }
}

fn size_hist(cloud: &FragmentCloud) -> Rendered {
    match cloud.sizes_m(SizeMetric::BoxDiagonal) {
        Ok(v) => histogram(&v, "fragment size", "box diagonal (m)"),
        Err(_) => {
            let s: Vec<f64> = cloud.points.iter().map(|p| p.s).collect();
            histogram(&s, "fragment size", "s (normalized)")
        }
    }
}

/// Axis-pair projections of a 3D point set, one panel per pair.
fn projections(
    points: &[[f64; 3]],
    labels: [&str; 3],
    colors: &[&str],
    rings: &[bool],
    title: &str,
) -> String {
    let ranges: Vec<(f64, f64)> = (0..3)
        .map(|d| padded_range(points.iter().map(|p| p[d])))
        .collect();
    let mut svg = Svg::new(1020.0, 380.0);
    svg.text([510.0, 20.0], 14.0, "middle", title);
    for (panel, (a, b)) in [(0, 1), (0, 2), (1, 2)].into_iter().enumerate() {
        let frame = Frame::new(
            ranges[a],
            ranges[b],
            70.0 + panel as f64 * 335.0,
            50.0,
            250.0,
            270.0,
        );
        for (i, p) in points.iter().enumerate() {
            let at = frame.at(p[a], p[b]);
            svg.circle(at, 3.0, colors.get(i).copied().unwrap_or("#1f77b4"));
            if rings.get(i).copied().unwrap_or(false) {
                svg.ring(at, 7.0, "#d62728", 1.5);
            }
        }
        frame.axes(
            &mut svg,
            &format!("{} vs {}", labels[b], labels[a]),
            labels[a],
            labels[b],
        );
    }
    svg.finish()
}

fn cloud3d_plot(cloud: &FragmentCloud) -> Rendered {
    need_points(cloud, 1)?;
    let pts: Vec<[f64; 3]> = cloud.points.iter().map(|p| [p.x, p.y, p.z]).collect();
    Ok(projections(
        &pts,
        ["x", "y", "z"],
        &[],
        &[],
        "fragment cloud",
    ))
}

/// One bar per image.
pub fn bar_chart(labels: &[String], values: &[Option<f64>], title: &str, y_label: &str) -> String {
    let present: Vec<f64> = values.iter().flatten().copied().collect();
    let lo = present.iter().copied().fold(0.0, f64::min);
    let hi = present.iter().copied().fold(0.0, f64::max);
    let pad = 0.05 * (hi - lo);
    let n = labels.len().max(1) as f64;
    let frame = Frame::new((0.0, n), (lo - pad, hi + pad), 70.0, 40.0, 540.0, 340.0);
    let mut svg = Svg::new(640.0, 480.0);
    let slot = 1.0;
    for (i, (label, v)) in labels.iter().zip(values).enumerate() {
        let x0 = i as f64 * slot + 0.15;
        if let Some(v) = v {
            let a = frame.at(x0, v.max(0.0));
            let b = frame.at(x0 + 0.7, v.min(0.0));
            svg.rect(a[0], a[1], b[0] - a[0], b[1] - a[1], "#1f77b4", None);
        }
        let at = frame.at(i as f64 + 0.5, frame.y_range.0);
        svg.text([at[0], at[1] + 50.0], 10.0, "middle", label);
    }
    let zero = frame.py(0.0);
    svg.line(
        [frame.left, zero],
        [frame.left + frame.width, zero],
        "#333333",
        1.0,
    );
    frame.axes(&mut svg, title, "", y_label);
    svg.finish()
}

/// Projections of the first three normalized corpus features, colored by cluster.
pub fn feature3d_plot(matrix: &CorpusMatrix) -> Option<String> {
    if matrix.features.len() < 3 || matrix.normalized.is_empty() {
        return None;
    }
    let pts: Vec<[f64; 3]> = matrix
        .normalized
        .iter()
        .map(|r| [r[0], r[1], r[2]])
        .collect();
    let colors: Vec<&str> = (0..pts.len())
        .map(|i| {
            matrix
                .labels
                .get(i)
                .map_or("#1f77b4", |l| category_color(*l))
        })
        .collect();
    let names = [
        matrix.features[0].name(),
        matrix.features[1].name(),
        matrix.features[2].name(),
    ];
    Some(projections(
        &pts,
        names,
        &colors,
        &matrix.outlier_flags,
        "normalized features by cluster",
    ))
}
