use std::path::PathBuf;

use serde_json::Value;

use muckpile::corpus::FeatureVector;
use muckpile::report::io::{read_feature_file, write_feature_file};
use muckpile::report::{
    analyze_set, corpus_run, load_feature_files, write_corpus, AnalyzeConfig, CorpusConfig,
};
use muckpile::synth::{generate, Centers, Process, SceneSpec};

fn scenes() -> Vec<FeatureVector> {
    let config = AnalyzeConfig {
        plots: vec![],
        ..AnalyzeConfig::default()
    };
    (0..5u64)
        .map(|i| {
            let process = if i < 3 {
                Process::Poisson
            } else {
                Process::Clustered {
                    centers: Centers::Random(2),
                    spread: 0.2,
                }
            };
            let mut spec = SceneSpec::new(
                100 + 40 * i as usize,
                -2.6 - 0.1 * i as f64,
                process,
                800,
                600,
                i,
            );
            spec.noise_sigma = 0.25;
            spec.scale_m_per_px = Some(0.004);
            analyze_set(&generate(&spec).unwrap(), &config)
                .unwrap()
                .feature
        })
        .collect()
}

#[test]
fn feature_files_survive_the_corpus_run_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let rows = scenes();
    let paths: Vec<PathBuf> = rows
        .iter()
        .map(|f| write_feature_file(dir.path(), f).unwrap())
        .collect();
    for (p, f) in paths.iter().zip(&rows) {
        assert_eq!(&read_feature_file(p).unwrap(), f);
    }

    let loaded = load_feature_files(&paths).unwrap();
    assert_eq!(loaded, rows);
    let report = corpus_run(&loaded, None, &CorpusConfig::default()).unwrap();
    assert_eq!(report.matrix.rows, rows);

    let out = dir.path().join("corpus");
    std::fs::create_dir(&out).unwrap();
    write_corpus(&report, &out, true).unwrap();
    let json: Value =
        serde_json::from_slice(&std::fs::read(out.join("corpus.json")).unwrap()).unwrap();
    let exported: Vec<FeatureVector> =
        serde_json::from_value(json["matrix"]["rows"].clone()).unwrap();
    assert_eq!(exported, rows);

    for name in [
        "corpus.csv",
        "summary.csv",
        "bar_beta.svg",
        "bar_anisotropy.svg",
        "bar_mean_edge.svg",
        "feature3d.svg",
    ] {
        assert!(out.join(name).is_file(), "{name} missing");
    }
    let summary = std::fs::read_to_string(out.join("summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), rows.len() + 1);
}
