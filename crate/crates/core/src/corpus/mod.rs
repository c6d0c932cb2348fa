//! Cross-image analysis: feature normalization, clustering, outlier flags and
//! regression of blast parameters on image features.

mod features;
mod kmeans;
mod normalize;
mod outliers;
mod params;
mod regression;

pub use features::{Feature, FeatureVector};
pub use kmeans::{kmeans, KMeansResult, DEFAULT_K, MAX_ITERATIONS};
pub use normalize::{normalize, zscore, CorpusMatrix, ZScores};
pub use outliers::{flag_outliers, DEFAULT_OUTLIER_T};
pub use params::BlastParams;
pub use regression::{ols, param_regression, ParamRegression};

impl CorpusMatrix {
    /// Clusters the normalized rows and flags outliers, storing both on the matrix.
    pub fn cluster(&mut self, k: usize, seed: u64, outlier_t: f64) -> crate::Result<KMeansResult> {
        let result = kmeans(&self.normalized, k, seed)?;
        self.outlier_flags = flag_outliers(
            &self.normalized,
            &result.labels,
            &result.centroids,
            outlier_t,
        );
        self.labels = result.labels.clone();
        Ok(result)
    }
}
