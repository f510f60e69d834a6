use std::path::PathBuf;

use perskern_bench::config::ExperimentConfig;
use perskern_bench::data::Sample;
use perskern_bench::protocol::{load_dataset, run_pipeline};

fn fixture(name: &str) -> ExperimentConfig {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name);
    ExperimentConfig::load(&path).unwrap()
}

fn check(name: &str, kind: &str, min_pssk: f64) {
    let mut cfg = fixture(name);
    let ds = load_dataset(&cfg.dataset).unwrap();
    assert_eq!(ds.len(), 12);
    assert!(ds.samples.iter().all(|s| s.kind() == kind), "{name}");
    let dir = tempfile::tempdir().unwrap();
    cfg.output = dir.path().to_path_buf();
    let table = run_pipeline(&cfg, |_| {}).unwrap();
    assert_eq!(table.rows.len(), 5);
    for r in &table.rows {
        assert_eq!(r.scores.len(), 2);
        assert!(
            r.scores.iter().all(|s| (0.0..=1.0).contains(s)),
            "{name} {r:?}"
        );
    }
    let pssk = table.rows.iter().find(|r| r.kernel == "PSSK").unwrap();
    assert!(pssk.mean >= min_pssk, "{name}: PSSK {}", pssk.mean);
    assert!(dir.path().join("results.csv").exists());
    assert_eq!(
        std::fs::read_dir(dir.path().join("diagrams"))
            .unwrap()
            .count(),
        13
    );
}

#[test]
fn graph_fixture_runs_end_to_end() {
    check("graphs.toml", "graph", 0.75);
}

#[test]
fn image_fixture_runs_end_to_end() {
    check("images.toml", "image", 0.75);
}

#[test]
fn series_fixture_runs_end_to_end() {
    let cfg = fixture("series.toml");
    let ds = load_dataset(&cfg.dataset).unwrap();
    assert_eq!(ds.labels.iter().filter(|&&l| l == 1).count(), 6);
    let Sample::Series(ts) = &ds.samples[0] else {
        panic!()
    };
    assert_eq!(ts.len(), 60);
    check("series.toml", "time series", 0.75);
}
