use std::path::Path;
use std::process::{Command, Output};

fn muckpile(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_muckpile"))
        .args(args)
        .current_dir(cwd)
        .output()
        .unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

const SPEC: &str = r#"{
  "n": 150,
  "beta_true": -2.9,
  "noise_sigma": 0.25,
  "process": {"type": "clustered", "centers": 2, "spread": 0.25},
  "width": 800,
  "height": 600,
  "seed": 4,
  "scale_m_per_px": 0.005
}"#;

#[test]
fn help_and_version_succeed() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&muckpile(&["--help"], dir.path())), 0);
    assert_eq!(code(&muckpile(&["--version"], dir.path())), 0);
    assert_eq!(code(&muckpile(&["analyze", "--help"], dir.path())), 0);
}

#[test]
fn usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(code(&muckpile(&[], dir.path())), 1);
    assert_eq!(
        code(&muckpile(&["analyze", "--input", "x.json"], dir.path())),
        1
    );
    assert_eq!(
        code(&muckpile(
            &[
                "analyze",
                "--input",
                "x",
                "--out-dir",
                "o",
                "--plots",
                "bogus"
            ],
            dir.path()
        )),
        1
    );
    assert_eq!(
        code(&muckpile(
            &[
                "analyze",
                "--input",
                "x",
                "--out-dir",
                "o",
                "--bandwidth",
                "-1"
            ],
            dir.path()
        )),
        1
    );
}

#[test]
fn bad_input_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = muckpile(
        &["analyze", "--input", "missing.json", "--out-dir", "o"],
        dir.path(),
    );
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("missing.json"));

    std::fs::write(dir.path().join("bad.json"), "[{\"image_id\": ").unwrap();
    assert_eq!(
        code(&muckpile(
            &["analyze", "--input", "bad.json", "--out-dir", "o"],
            dir.path()
        )),
        2
    );

    let invalid = r#"[{"image_id":"a","width":100,"height":100,"instances":[{"bbox":[50,10,20,20],"mask_area":10,"confidence":0.9}]}]"#;
    std::fs::write(dir.path().join("invalid.json"), invalid).unwrap();
    assert_eq!(
        code(&muckpile(
            &["analyze", "--input", "invalid.json", "--out-dir", "o"],
            dir.path()
        )),
        2
    );

    std::fs::write(
        dir.path().join("spec.json"),
        r#"{"n": 0, "beta_true": -3, "process": {"type": "poisson"}, "width": 10, "height": 10}"#,
    )
    .unwrap();
    assert_eq!(
        code(&muckpile(
            &["synth", "--spec", "spec.json", "--out", "s.json"],
            dir.path()
        )),
        2
    );

    assert_eq!(
        code(&muckpile(
            &["corpus", "--features", "nothing/*.json"],
            dir.path()
        )),
        2
    );
}

#[test]
fn synth_analyze_corpus_flow() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("spec.json"), SPEC).unwrap();
    for seed in ["1", "2", "3", "4"] {
        let scene = format!("scene{seed}.json");
        let out = muckpile(
            &[
                "synth",
                "--spec",
                "spec.json",
                "--out",
                &scene,
                "--seed",
                seed,
            ],
            d,
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
        let out = muckpile(
            &[
                "analyze",
                "--input",
                &scene,
                "--out-dir",
                "features",
                "--plots",
                "overlay,density",
            ],
            d,
        );
        assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    }
    assert!(d.join("features/synth-3.features.json").is_file());
    assert!(d.join("features/synth-3.overlay.svg").is_file());
    assert!(!d.join("features/synth-3.ripley.svg").exists());

    std::fs::write(
        d.join("params.csv"),
        "image_id,burden\nsynth-1,3.1\nsynth-2,2.8\nsynth-3,3.4\nsynth-4,2.9\n",
    )
    .unwrap();
    let out = muckpile(
        &[
            "corpus",
            "--features",
            "features/*.features.json",
            "--params",
            "params.csv",
            "--k",
            "2",
            "--out-dir",
            "corpus",
        ],
        d,
    );
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let summary = std::fs::read_to_string(d.join("corpus/summary.csv")).unwrap();
    assert!(summary.starts_with(
        "image_id,beta,anisotropy,mean_edge,hotspot_x,hotspot_y,r_squared,cluster,outlier"
    ));
    assert_eq!(summary.lines().count(), 5);
    assert!(d.join("corpus/corpus.json").is_file());
    assert!(d.join("corpus/bar_beta.svg").is_file());
}

#[test]
fn analyze_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    std::fs::write(d.join("spec.json"), SPEC).unwrap();
    assert_eq!(
        code(&muckpile(
            &["synth", "--spec", "spec.json", "--out", "scene.json"],
            d
        )),
        0
    );
    for out_dir in ["a", "b"] {
        assert_eq!(
            code(&muckpile(
                &["analyze", "--input", "scene.json", "--out-dir", out_dir],
                d
            )),
            0
        );
    }
    let mut names: Vec<_> = std::fs::read_dir(d.join("a"))
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert!(names.len() > 3);
    for name in names {
        assert_eq!(
            std::fs::read(d.join("a").join(&name)).unwrap(),
            std::fs::read(d.join("b").join(&name)).unwrap(),
            "{name:?}"
        );
    }
}

#[test]
fn empty_image_is_a_warning_not_an_error() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(
        dir.path().join("empty.json"),
        r#"[{"image_id":"e","width":64,"height":48,"instances":[]}]"#,
    )
    .unwrap();
    let out = muckpile(
        &["analyze", "--input", "empty.json", "--out-dir", "o"],
        dir.path(),
    );
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stderr).contains("no detections"));
    let csv = std::fs::read_to_string(dir.path().join("o/features.csv")).unwrap();
    assert!(csv.lines().nth(1).unwrap().starts_with("e,0,"));
}
