use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::spatial::{Hotspot, KFunction};

/// One image's descriptor set.
///
/// Statistics that could not be computed (too few fragments, collinear
/// centers, ...) are `None` and serialize as JSON `null`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub image_id: String,
    pub n_fragments: usize,
    /// Mean normalized mask area.
    pub mean_area: Option<f64>,
    pub median_area: Option<f64>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub r_squared: Option<f64>,
    pub lambda1: Option<f64>,
    pub lambda2: Option<f64>,
    pub var_ratio1: Option<f64>,
    /// `λ1 / λ2`.
    pub anisotropy: Option<f64>,
    pub v1: Option<[f64; 2]>,
    pub mean_edge: Option<f64>,
    pub std_edge: Option<f64>,
    pub min_edge: Option<f64>,
    pub max_edge: Option<f64>,
    pub radial_corr: Option<f64>,
    pub bandwidth: Option<f64>,
    pub hotspots: Vec<Hotspot>,
    pub k_function: Option<KFunction>,
}

impl FeatureVector {
    /// A vector with every statistic missing.
    pub fn empty(image_id: impl Into<String>, n_fragments: usize) -> Self {
        Self {
            image_id: image_id.into(),
            n_fragments,
            mean_area: None,
            median_area: None,
            alpha: None,
            beta: None,
            r_squared: None,
            lambda1: None,
            lambda2: None,
            var_ratio1: None,
            anisotropy: None,
            v1: None,
            mean_edge: None,
            std_edge: None,
            min_edge: None,
            max_edge: None,
            radial_corr: None,
            bandwidth: None,
            hotspots: Vec::new(),
            k_function: None,
        }
    }

    pub fn get(&self, feature: Feature) -> Option<f64> {
        feature.value(self)
    }
}

/// A scalar column of [`FeatureVector`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    NFragments,
    MeanArea,
    MedianArea,
    Alpha,
    Beta,
    RSquared,
    Lambda1,
    Lambda2,
    VarRatio1,
    Anisotropy,
    MeanEdge,
    StdEdge,
    MinEdge,
    MaxEdge,
    RadialCorr,
    HotspotX,
    HotspotY,
    HotspotDensity,
}

impl Feature {
    pub const ALL: [Feature; 18] = [
        Feature::NFragments,
        Feature::MeanArea,
        Feature::MedianArea,
        Feature::Alpha,
        Feature::Beta,
        Feature::RSquared,
        Feature::Lambda1,
        Feature::Lambda2,
        Feature::VarRatio1,
        Feature::Anisotropy,
        Feature::MeanEdge,
        Feature::StdEdge,
        Feature::MinEdge,
        Feature::MaxEdge,
        Feature::RadialCorr,
        Feature::HotspotX,
        Feature::HotspotY,
        Feature::HotspotDensity,
    ];

    /// Default clustering inputs.
    pub const CLUSTERING_DEFAULT: [Feature; 5] = [
        Feature::VarRatio1,
        Feature::Beta,
        Feature::MeanEdge,
        Feature::RadialCorr,
        Feature::NFragments,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Feature::NFragments => "n_fragments",
            Feature::MeanArea => "mean_area",
            Feature::MedianArea => "median_area",
            Feature::Alpha => "alpha",
            Feature::Beta => "beta",
            Feature::RSquared => "r_squared",
            Feature::Lambda1 => "lambda1",
            Feature::Lambda2 => "lambda2",
            Feature::VarRatio1 => "var_ratio1",
            Feature::Anisotropy => "anisotropy",
            Feature::MeanEdge => "mean_edge",
            Feature::StdEdge => "std_edge",
            Feature::MinEdge => "min_edge",
            Feature::MaxEdge => "max_edge",
            Feature::RadialCorr => "radial_corr",
            Feature::HotspotX => "hotspot_x",
            Feature::HotspotY => "hotspot_y",
            Feature::HotspotDensity => "hotspot_density",
        }
    }

    pub fn value(self, f: &FeatureVector) -> Option<f64> {
        let top = f.hotspots.first();
        match self {
            Feature::NFragments => Some(f.n_fragments as f64),
            Feature::MeanArea => f.mean_area,
            Feature::MedianArea => f.median_area,
            Feature::Alpha => f.alpha,
            Feature::Beta => f.beta,
            Feature::RSquared => f.r_squared,
            Feature::Lambda1 => f.lambda1,
            Feature::Lambda2 => f.lambda2,
            Feature::VarRatio1 => f.var_ratio1,
            Feature::Anisotropy => f.anisotropy,
            Feature::MeanEdge => f.mean_edge,
            Feature::StdEdge => f.std_edge,
            Feature::MinEdge => f.min_edge,
            Feature::MaxEdge => f.max_edge,
            Feature::RadialCorr => f.radial_corr,
            Feature::HotspotX => top.map(|h| h.x),
            Feature::HotspotY => top.map(|h| h.y),
            Feature::HotspotDensity => top.map(|h| h.density),
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Feature::ALL
            .iter()
            .copied()
            .find(|f| f.name() == s)
            .ok_or_else(|| format!("unknown feature `{s}`"))
    }
}
