use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::io::{file_stem, write_atomic, write_feature_file};
use super::plots::{render_plots, Plot};
use super::table::features_csv;
use crate::coords::{build_cloud, FragmentCloud, DEFAULT_EPSILON};
use crate::corpus::FeatureVector;
use crate::error::{Error, Result};
use crate::ingest::{
    dbscan_centroids, filter_geometric, parse_detections, DetectionSet, FilterConfig,
};
use crate::spatial::{self, overlay, ripley, KdeConfig, Segment, WindowKind};
use crate::stats::{mean, median};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyzeConfig {
    pub epsilon: f64,
    pub kde: KdeConfig,
    /// Metres per pixel; overrides any scale carried by the input.
    pub scale: Option<f64>,
    /// Ripley radii; defaults depend on the window.
    pub radii: Option<Vec<f64>>,
    /// Drop geometric outliers and DBSCAN noise before analysis.
    pub filter: bool,
    pub plots: Vec<Plot>,
}

impl Default for AnalyzeConfig {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            kde: KdeConfig::default(),
            scale: None,
            radii: None,
            filter: true,
            plots: Plot::ALL.to_vec(),
        }
    }
}

impl AnalyzeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon.is_finite() && self.epsilon > 0.0) {
            return Err(Error::domain(format!(
                "epsilon must be positive, got {}",
                self.epsilon
            )));
        }
        if let Some(s) = self.scale {
            if !(s.is_finite() && s > 0.0) {
                return Err(Error::domain(format!("scale must be positive, got {s}")));
            }
        }
        if let spatial::Bandwidth::Fixed(h) = self.kde.bandwidth {
            if !(h.is_finite() && h > 0.0) {
                return Err(Error::domain(format!(
                    "bandwidth must be positive, got {h}"
                )));
            }
        }
        if self.kde.resolution < 2 {
            return Err(Error::domain("KDE resolution must be at least 2"));
        }
        if let Some(r) = &self.radii {
            if r.is_empty()
                || r.iter().any(|v| !(v.is_finite() && *v >= 0.0))
                || r.windows(2).any(|w| w[1] <= w[0])
            {
                return Err(Error::domain(
                    "radii must be non-negative and strictly ascending",
                ));
            }
        }
        Ok(())
    }
}

/// Everything computed for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalysisReport {
    pub feature: FeatureVector,
    /// Principal-direction arrow in image pixels.
    pub arrow: Option<Segment>,
    /// Hotspot positions in image pixels, strongest first.
    pub hotspot_pixels: Vec<[f64; 2]>,
    pub cloud: Option<FragmentCloud>,
    /// Rendered figures keyed by plot.
    pub plots: Vec<(Plot, String)>,
    pub warnings: Vec<String>,
    /// Instances removed by filtering.
    pub dropped: usize,
}

/// Runs filtering, coordinate construction and every spatial statistic on one image.
///
/// Statistics that are undefined for the data are left `None` and explained in
/// `warnings`; only invalid configuration is an error.
pub fn analyze_set(ds: &DetectionSet, config: &AnalyzeConfig) -> Result<AnalysisReport> {
    config.validate()?;
    let mut ds = ds.clone();
    if config.scale.is_some() {
        ds.scale = config.scale;
    }
    let id = ds.image_id.clone();
    let mut warnings = Vec::new();
    let before = ds.instances.len();
    if config.filter && !ds.instances.is_empty() {
        let cfg = FilterConfig::defaults_for(ds.width, ds.height);
        let kept = filter_geometric(&ds, &cfg);
        ds = dbscan_centroids(&kept, cfg.dbscan_eps, cfg.dbscan_min_pts)?.filtered;
    }
    let dropped = before - ds.instances.len();

    let cloud = match build_cloud(&ds, config.epsilon) {
        Ok(c) => c,
        Err(Error::Degenerate(why)) => {
            warnings.push(format!("{id}: {why}"));
            return Ok(AnalysisReport {
                feature: FeatureVector::empty(id, 0),
                arrow: None,
                hotspot_pixels: Vec::new(),
                cloud: None,
                plots: Vec::new(),
                warnings,
                dropped,
            });
        }
        Err(e) => return Err(e),
    };

    let mut f = FeatureVector::empty(id.clone(), cloud.len());
    let note = |w: &mut Vec<String>, what: &str, e: Error| degrade(w, &id, what, e);

    let areas: Vec<f64> = cloud.points.iter().map(|p| p.a_norm).collect();
    f.mean_area = Some(mean(&areas));
    f.median_area = Some(median(&areas));

    match spatial::fit_size_depth(&cloud) {
        Ok(fit) => {
            f.alpha = Some(fit.alpha);
            f.beta = Some(fit.beta);
            f.r_squared = Some(fit.r_squared);
        }
        Err(e) => note(&mut warnings, "size-depth fit", e)?,
    }

    match spatial::pca(&cloud) {
        Ok(p) => {
            f.lambda1 = Some(p.lambda1);
            f.lambda2 = Some(p.lambda2);
            f.var_ratio1 = Some(p.var_ratio1);
            f.anisotropy = p.anisotropy();
            f.v1 = Some(p.v1);
            if f.anisotropy.is_none() {
                warnings.push(format!(
                    "{id}: anisotropy unavailable: minor-axis variance is zero"
                ));
            }
        }
        Err(e) => note(&mut warnings, "principal axes", e)?,
    }

    match spatial::kde(&cloud, &config.kde) {
        Ok(field) => {
            f.bandwidth = Some(field.bandwidth);
            f.hotspots = field.hotspots;
        }
        Err(e) => note(&mut warnings, "density", e)?,
    }

    match spatial::delaunay(&cloud) {
        Ok(d) => {
            f.mean_edge = Some(d.mean);
            f.std_edge = if d.std.is_finite() { Some(d.std) } else { None };
            f.min_edge = Some(d.min);
            f.max_edge = Some(d.max);
        }
        Err(e) => note(&mut warnings, "Delaunay edges", e)?,
    }

    match spatial::radial_size_correlation(&cloud) {
        Ok(r) => f.radial_corr = Some(r),
        Err(e) => note(&mut warnings, "radial correlation", e)?,
    }

    let window = if cloud.scale.is_some() {
        WindowKind::Metric
    } else {
        WindowKind::Normalized
    };
    let radii = config
        .radii
        .clone()
        .unwrap_or_else(|| ripley::default_radii(window));
    match spatial::ripley_k(&cloud, &radii, window) {
        Ok(k) => f.k_function = Some(k),
        Err(e) => note(&mut warnings, "K function", e)?,
    }

    let arrow = f.v1.map(|v1| {
        overlay::principal_arrow(
            cloud.width,
            cloud.height,
            v1,
            overlay::default_arrow_length(cloud.width, cloud.height),
        )
    });
    let hotspot_pixels = overlay::hotspot_pixels(cloud.width, cloud.height, &f.hotspots);
    let (plots, plot_warnings) = render_plots(&cloud, &f, &config.plots);
    warnings.extend(plot_warnings);

    Ok(AnalysisReport {
        feature: f,
        arrow,
        hotspot_pixels,
        cloud: Some(cloud),
        plots,
        warnings,
        dropped,
    })
}

/// Records statistics that are undefined for the data; anything else propagates.
fn degrade(warnings: &mut Vec<String>, id: &str, what: &str, e: Error) -> Result<()> {
    match e {
        Error::Degenerate(_) | Error::Unsupported(_) => {
            warnings.push(format!("{id}: {what} unavailable: {e}"));
            Ok(())
        }
        other => Err(other),
    }
}

/// Analyzes every image of a detection document in parallel, in input order.
pub fn analyze_document(bytes: &[u8], config: &AnalyzeConfig) -> Result<Vec<AnalysisReport>> {
    config.validate()?;
    let sets = parse_detections(bytes)?;
    sets.par_iter().map(|ds| analyze_set(ds, config)).collect()
}

/// Writes one feature file and the selected plots per image, plus `features.csv`.
pub fn write_outputs(reports: &[AnalysisReport], out_dir: &Path) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    for r in reports {
        written.push(write_feature_file(out_dir, &r.feature)?);
        let stem = file_stem(&r.feature.image_id);
        for (plot, svg) in &r.plots {
            let path = out_dir.join(format!("{stem}.{plot}.svg"));
            write_atomic(&path, svg.as_bytes())?;
            written.push(path);
        }
    }
    let rows: Vec<FeatureVector> = reports.iter().map(|r| r.feature.clone()).collect();
    let csv_path = out_dir.join("features.csv");
    write_atomic(&csv_path, features_csv(&rows)?.as_bytes())?;
    written.push(csv_path);
    Ok(written)
}

/// Reads a detection file, analyzes it and writes all outputs under `out_dir`.
pub fn analyze(
    input: &Path,
    out_dir: &Path,
    config: &AnalyzeConfig,
) -> Result<Vec<AnalysisReport>> {
    let bytes = std::fs::read(input)?;
    let reports = analyze_document(&bytes, config)?;
    write_outputs(&reports, out_dir)?;
    Ok(reports)
}
