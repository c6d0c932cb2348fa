//! Per-image spatial statistics over a [`FragmentCloud`].
//!
//! The submodules work on plain point slices; the functions here are the
//! cloud-level entry points used by the pipeline.

pub mod autocorr;
pub mod delaunay;
pub mod kde;
pub mod overlay;
pub mod pca;
pub mod predicates;
pub mod regression;
pub mod ripley;

pub use delaunay::EdgeStats;
pub use kde::{Bandwidth, DensityField, Hotspot, KdeConfig};
pub use overlay::{principal_arrow, Segment};
pub use pca::PcaResult;
pub use regression::RegressionFit;
pub use ripley::{
    csr_envelope, default_radii, ripley_k, CsrEnvelope, KFunction, Window, WindowKind,
};

use crate::coords::FragmentCloud;
use crate::error::Result;

/// Principal axes of the fragment centers.
pub fn pca(cloud: &FragmentCloud) -> Result<PcaResult> {
    pca::pca(&cloud.xy())
}

/// Gaussian KDE of the fragment centers with hotspot extraction.
pub fn kde(cloud: &FragmentCloud, config: &KdeConfig) -> Result<DensityField> {
    kde::kde(&cloud.xy(), config)
}

/// `log s = α + β log z` over the cloud.
pub fn fit_size_depth(cloud: &FragmentCloud) -> Result<RegressionFit> {
    regression::fit_size_depth(&cloud.points)
}

/// Delaunay mesh of the fragment centers.
pub fn delaunay(cloud: &FragmentCloud) -> Result<EdgeStats> {
    delaunay::delaunay(&cloud.xy())
}

/// Correlation of size with distance from the cloud centroid.
pub fn radial_size_correlation(cloud: &FragmentCloud) -> Result<f64> {
    let sizes: Vec<f64> = cloud.points.iter().map(|p| p.s).collect();
    autocorr::radial_size_correlation(&cloud.xy(), &sizes)
}
