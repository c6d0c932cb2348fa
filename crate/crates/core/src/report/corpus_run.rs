use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::format::{fixed_opt, sig6, sig6_opt};
use super::io::{read_feature_file, write_atomic};
use super::plots::{bar_chart, feature3d_plot};
use super::table::{feature_header, feature_record, to_csv, STAT_DECIMALS};
use crate::corpus::{
    normalize, param_regression, BlastParams, CorpusMatrix, Feature, FeatureVector, KMeansResult,
    ParamRegression, DEFAULT_K, DEFAULT_OUTLIER_T,
};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusConfig {
    pub k: usize,
    pub seed: u64,
    pub outlier_t: f64,
    pub features: Vec<Feature>,
    /// Order the summary table by ascending β instead of input order.
    pub sort_by_beta: bool,
    pub plots: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        Self {
            k: DEFAULT_K,
            seed: 0,
            outlier_t: DEFAULT_OUTLIER_T,
            features: Feature::CLUSTERING_DEFAULT.to_vec(),
            sort_by_beta: false,
            plots: true,
        }
    }
}

/// The headline metrics for one image.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub image_id: String,
    pub beta: Option<f64>,
    pub anisotropy: Option<f64>,
    pub mean_edge: Option<f64>,
    pub hotspot: Option<[f64; 2]>,
    pub r_squared: Option<f64>,
    /// `None` for images left out of clustering.
    pub cluster: Option<usize>,
    pub outlier: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusReport {
    pub matrix: CorpusMatrix,
    pub kmeans: KMeansResult,
    /// `k` actually used; lowered when the corpus has fewer rows.
    pub k: usize,
    pub regressions: Vec<ParamRegression>,
    pub summary: Vec<SummaryRow>,
    pub excluded: Vec<String>,
    pub warnings: Vec<String>,
}

/// Normalizes, clusters and flags a set of feature vectors, and regresses any
/// supplied blast parameters on the selected features.
///
/// Images missing a selected feature are excluded from the matrix but still
/// listed in the summary.
pub fn corpus_run(
    rows: &[FeatureVector],
    params: Option<&BlastParams>,
    config: &CorpusConfig,
) -> Result<CorpusReport> {
    if rows.len() < 2 {
        return Err(Error::domain(format!(
            "a corpus needs at least 2 feature files, got {}",
            rows.len()
        )));
    }
    if config.k == 0 {
        return Err(Error::domain("k must be at least 1"));
    }
    if !(config.outlier_t.is_finite() && config.outlier_t > 0.0) {
        return Err(Error::domain(format!(
            "outlier threshold must be positive, got {}",
            config.outlier_t
        )));
    }
    let mut warnings = Vec::new();
    let (usable_idx, excluded_idx): (Vec<usize>, Vec<usize>) =
        (0..rows.len()).partition(|&i| config.features.iter().all(|f| f.value(&rows[i]).is_some()));
    for &i in &excluded_idx {
        warnings.push(format!(
            "{}: excluded from clustering, a selected feature is missing",
            rows[i].image_id
        ));
    }
    if usable_idx.len() < 2 {
        return Err(Error::degenerate(format!(
            "only {} image(s) carry every selected feature",
            usable_idx.len()
        )));
    }
    let usable: Vec<FeatureVector> = usable_idx.iter().map(|&i| rows[i].clone()).collect();
    let mut matrix = normalize(&usable, &config.features)?;
    for (c, f) in matrix.features.iter().enumerate() {
        if matrix.constant[c] {
            warnings.push(format!("feature `{f}` is constant across the corpus"));
        }
    }

    let k = config.k.min(usable.len());
    if k < config.k {
        warnings.push(format!(
            "k lowered from {} to {k} to match the corpus size",
            config.k
        ));
    }
    let kmeans = matrix.cluster(k, config.seed, config.outlier_t)?;

    let mut regressions = Vec::new();
    if let Some(params) = params {
        let ids: Vec<&str> = matrix.rows.iter().map(|r| r.image_id.as_str()).collect();
        for name in &params.names {
            let column = params
                .column(name, &ids)
                .expect("name comes from the sidecar");
            match param_regression(&matrix, name, &column) {
                Ok(fit) => regressions.push(fit),
                Err(e @ (Error::Degenerate(_) | Error::RankDeficient { .. })) => {
                    warnings.push(format!("parameter `{name}`: regression skipped: {e}"));
                }
                Err(e) => return Err(e),
            }
        }
    }

    let mut summary: Vec<SummaryRow> = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let slot = usable_idx.iter().position(|&u| u == i);
            SummaryRow {
                image_id: r.image_id.clone(),
                beta: r.beta,
                anisotropy: r.anisotropy,
                mean_edge: r.mean_edge,
                hotspot: r.hotspots.first().map(|h| [h.x, h.y]),
                r_squared: r.r_squared,
                cluster: slot.map(|i| matrix.labels[i]),
                outlier: slot.is_some_and(|i| matrix.outlier_flags[i]),
            }
        })
        .collect();
    if config.sort_by_beta {
        // Stable: images without β keep their relative order at the end.
        summary.sort_by(|a, b| match (a.beta, b.beta) {
            (Some(x), Some(y)) => x.total_cmp(&y),
            (Some(_), None) => std::cmp::Ordering::Less,
            (None, Some(_)) => std::cmp::Ordering::Greater,
            (None, None) => std::cmp::Ordering::Equal,
        });
    }

    Ok(CorpusReport {
        matrix,
        kmeans,
        k,
        regressions,
        summary,
        excluded: excluded_idx
            .iter()
            .map(|&i| rows[i].image_id.clone())
            .collect(),
        warnings,
    })
}

pub const SUMMARY_COLUMNS: [&str; 9] = [
    "image_id",
    "beta",
    "anisotropy",
    "mean_edge",
    "hotspot_x",
    "hotspot_y",
    "r_squared",
    "cluster",
    "outlier",
];

pub fn summary_csv(summary: &[SummaryRow]) -> Result<String> {
    to_csv(
        SUMMARY_COLUMNS,
        summary.iter().map(|s| {
            vec![
                s.image_id.clone(),
                fixed_opt(s.beta, STAT_DECIMALS),
                sig6_opt(s.anisotropy),
                fixed_opt(s.mean_edge, STAT_DECIMALS),
                sig6_opt(s.hotspot.map(|h| h[0])),
                sig6_opt(s.hotspot.map(|h| h[1])),
                fixed_opt(s.r_squared, STAT_DECIMALS),
                s.cluster.map(|c| c.to_string()).unwrap_or_default(),
                s.outlier.to_string(),
            ]
        }),
    )
}

/// Feature table of the clustered rows with normalized values, cluster and outlier flag.
pub fn corpus_csv(matrix: &CorpusMatrix) -> Result<String> {
    let mut header: Vec<String> = feature_header().into_iter().map(String::from).collect();
    header.extend(matrix.features.iter().map(|f| format!("z_{f}")));
    header.push("cluster".into());
    header.push("outlier".into());
    to_csv(
        header,
        matrix.rows.iter().enumerate().map(|(i, r)| {
            let mut rec = feature_record(r);
            rec.extend(matrix.normalized[i].iter().map(|v| sig6(*v)));
            rec.push(matrix.labels[i].to_string());
            rec.push(matrix.outlier_flags[i].to_string());
            rec
        }),
    )
}

/// Writes `corpus.json`, `corpus.csv`, `summary.csv` and the comparison charts.
pub fn write_corpus(report: &CorpusReport, out_dir: &Path, plots: bool) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    let mut put = |name: &str, body: String| -> Result<()> {
        let path = out_dir.join(name);
        write_atomic(&path, body.as_bytes())?;
        written.push(path);
        Ok(())
    };
    let mut json = serde_json::to_string_pretty(report).expect("corpus reports serialize");
    json.push('\n');
    put("corpus.json", json)?;
    put("corpus.csv", corpus_csv(&report.matrix)?)?;
    put("summary.csv", summary_csv(&report.summary)?)?;
    if plots {
        let labels: Vec<String> = report.summary.iter().map(|s| s.image_id.clone()).collect();
        let charts = [
            (
                "bar_beta.svg",
                "size-depth exponent β",
                report.summary.iter().map(|s| s.beta).collect::<Vec<_>>(),
            ),
            (
                "bar_anisotropy.svg",
                "anisotropy λ1/λ2",
                report.summary.iter().map(|s| s.anisotropy).collect(),
            ),
            (
                "bar_mean_edge.svg",
                "mean Delaunay edge",
                report.summary.iter().map(|s| s.mean_edge).collect(),
            ),
        ];
        for (file, title, values) in charts {
            put(file, bar_chart(&labels, &values, title, title))?;
        }
        if let Some(svg) = feature3d_plot(&report.matrix) {
            put("feature3d.svg", svg)?;
        }
    }
    Ok(written)
}

/// Reads feature files in the given order.
pub fn load_feature_files(paths: &[PathBuf]) -> Result<Vec<FeatureVector>> {
    paths.iter().map(|p| read_feature_file(p)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reference_rows() -> Vec<FeatureVector> {
        [
            ("1", 128, -3.1977, 0.8337, 0.2138),
            ("2", 300, -2.8615, 0.8758, 0.1374),
            ("3", 300, -2.8530, 0.8646, 0.1321),
            ("4", 284, -2.5470, 0.8812, 0.1124),
        ]
        .into_iter()
        .map(|(id, n, beta, r2, edge)| {
            let mut f = FeatureVector::empty(id, n);
            f.beta = Some(beta);
            f.r_squared = Some(r2);
            f.mean_edge = Some(edge);
            f
        })
        .collect()
    }

    fn config() -> CorpusConfig {
        CorpusConfig {
            features: vec![Feature::Beta, Feature::MeanEdge, Feature::NFragments],
            ..CorpusConfig::default()
        }
    }

    #[test]
    fn summary_sorted_by_beta() {
        let mut rows = reference_rows();
        rows.swap(0, 3);
        let report = corpus_run(
            &rows,
            None,
            &CorpusConfig {
                sort_by_beta: true,
                ..config()
            },
        )
        .unwrap();
        let ids: Vec<&str> = report.summary.iter().map(|s| s.image_id.as_str()).collect();
        assert_eq!(ids, vec!["1", "2", "3", "4"]);
        let csv = summary_csv(&report.summary).unwrap();
        assert!(csv
            .lines()
            .nth(1)
            .unwrap()
            .starts_with("1,-3.1977,,0.2138,,,0.8337,"));
    }

    #[test]
    fn needs_two_rows() {
        let rows = reference_rows();
        assert!(matches!(
            corpus_run(&rows[..1], None, &config()),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn missing_features_exclude_rows() {
        let mut rows = reference_rows();
        rows[2].beta = None;
        let report = corpus_run(&rows, None, &config()).unwrap();
        assert_eq!(report.excluded, vec!["3"]);
        assert_eq!(report.matrix.rows.len(), 3);
        assert_eq!(report.summary[2].cluster, None);
    }

    #[test]
    fn k_is_lowered_for_small_corpora() {
        let rows = reference_rows();
        let report = corpus_run(&rows[..2], None, &config()).unwrap();
        assert_eq!(report.k, 2);
        assert!(report.warnings.iter().any(|w| w.contains("k lowered")));
    }

    #[test]
    fn parameter_regression_warns_when_underdetermined() {
        let params = BlastParams::parse("image_id,burden\n1,3\n2,3.2\n3,3.1\n4,3.6\n").unwrap();
        let report = corpus_run(&reference_rows(), Some(&params), &config()).unwrap();
        assert!(report.regressions.is_empty());
        assert!(report.warnings.iter().any(|w| w.contains("burden")));

        let one = CorpusConfig {
            features: vec![Feature::Beta],
            ..config()
        };
        let report = corpus_run(&reference_rows(), Some(&params), &one).unwrap();
        assert_eq!(report.regressions.len(), 1);
        assert_eq!(report.regressions[0].gamma.len(), 1);
    }

    #[test]
    fn writes_all_artifacts() {
        let dir = tempfile::tempdir().unwrap();
        let report = corpus_run(&reference_rows(), None, &config()).unwrap();
        let written = write_corpus(&report, dir.path(), true).unwrap();
        let names: Vec<String> = written
            .iter()
            .map(|p| p.file_name().unwrap().to_string_lossy().into_owned())
            .collect();
        for expected in [
            "corpus.json",
            "corpus.csv",
            "summary.csv",
            "bar_beta.svg",
            "feature3d.svg",
        ] {
            assert!(names.iter().any(|n| n == expected), "{expected}");
        }
        let back: CorpusReport =
            serde_json::from_slice(&std::fs::read(dir.path().join("corpus.json")).unwrap())
                .unwrap();
        assert_eq!(back, report);
    }
}
