//! The benchmark protocol: repeated stratified splits, cross-validated
//! grid search on the training part, refit, and scoring on the test part.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::time::Instant;

use perskern::kernels::KernelKind;
use perskern::svm::{
    cv_grid_search, stratified_split, train_multiclass, CvOptions, Metric, SmoOptions,
};
use perskern::{KernelSpec, PersistenceDiagram};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::config::{DatasetConfig, ExperimentConfig, MetricSetting, ProtocolConfig};
use crate::data::{self, Dataset};
use crate::error::{BenchError, Result};
use crate::grams::{candidates, describe, GramStore};
use crate::pipeline::{compute_diagrams, fingerprint};

/// Independent random streams derived from the protocol seed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeedPurpose {
    Split = 1,
    Folds = 2,
}

/// Seed number `index` of stream `purpose`: word `2·index` onwards of the
/// ChaCha8 stream `purpose` keyed by `base`.
pub fn derive_seed(base: u64, purpose: SeedPurpose, index: usize) -> u64 {
    let mut rng = ChaCha8Rng::seed_from_u64(base);
    rng.set_stream(purpose as u64);
    rng.set_word_pos(2 * index as u128);
    rng.next_u64()
}

pub fn load_dataset(cfg: &DatasetConfig) -> Result<Dataset> {
    match cfg {
        DatasetConfig::Orbits {
            r_values,
            n_orbits,
            n_points,
            seed,
        } => data::generate_orbits(r_values, *n_orbits, *n_points, *seed),
        DatasetConfig::PointClouds { manifest } => data::load_point_clouds(manifest),
        DatasetConfig::Graphs { manifest } => data::load_graphs(manifest),
        DatasetConfig::Images { manifest } => data::load_images(manifest),
        DatasetConfig::TimeSeries { path } => data::load_time_series(path),
    }
}

/// Labelled diagrams of a configured experiment.
pub struct Prepared {
    pub ids: Vec<String>,
    pub labels: Vec<i64>,
    pub diagrams: Vec<PersistenceDiagram>,
    fingerprint: String,
}

impl Prepared {
    pub fn new(ids: Vec<String>, labels: Vec<i64>, diagrams: Vec<PersistenceDiagram>) -> Self {
        Self {
            ids,
            labels,
            diagrams,
            fingerprint: String::new(),
        }
    }

    /// Loads the dataset and computes its diagrams, cached under
    /// `<output>/diagrams`.
    pub fn load(cfg: &ExperimentConfig) -> Result<Self> {
        let ds = load_dataset(&cfg.dataset)?;
        let fp = fingerprint(&cfg.dataset, &cfg.filtration, &cfg.diagrams);
        let dir = cfg.output.join("diagrams");
        let diagrams = compute_diagrams(&ds, &cfg.filtration, &cfg.diagrams, Some((&dir, &fp)))?;
        Ok(Self {
            ids: ds.ids,
            labels: ds.labels,
            diagrams,
            fingerprint: fp,
        })
    }

    /// Gram store over these diagrams, cached under `<output>/grams` when
    /// an output directory is given.
    pub fn store(&self, output: Option<&Path>) -> Result<GramStore<'_>> {
        let dir = output.map(|o| o.join("grams"));
        GramStore::new(
            &self.diagrams,
            dir.as_deref().map(|d| (d, self.fingerprint.as_str())),
        )
    }
}

pub fn metric_for(setting: MetricSetting, labels: &[i64]) -> Metric {
    match setting {
        MetricSetting::Auto => Metric::for_labels(labels),
        MetricSetting::Accuracy => Metric::Accuracy,
        MetricSetting::Balanced => Metric::Balanced,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestChoice {
    pub kernel: KernelSpec,
    pub c: f64,
    pub cv_score: f64,
}

/// One train/test cycle of one kernel.
#[derive(Debug, Clone, PartialEq)]
pub struct RunOutcome {
    pub best: BestChoice,
    pub test_score: f64,
    pub model: perskern::svm::MulticlassModel,
    /// Binary fits, during the search and the refit, that hit the
    /// iteration cap; they are kept and scored.
    pub unconverged: usize,
}

/// Grid search on `train`, refit of the best cell on all of `train`, score
/// on `test`.
#[allow(clippy::too_many_arguments)]
pub fn run_once(
    store: &GramStore<'_>,
    kind: KernelKind,
    cfg: &ExperimentConfig,
    labels: &[i64],
    train: &[usize],
    test: &[usize],
    metric: Metric,
    run: usize,
) -> Result<RunOutcome> {
    let p = &cfg.protocol;
    let specs = candidates(kind, &cfg.kernels, store.diagrams(), train)?;
    store.prepare(&specs)?;
    let opts = CvOptions {
        tol: p.tol,
        keep_unconverged: true,
        ..CvOptions::new(
            p.folds,
            derive_seed(p.seed, SeedPurpose::Folds, run),
            metric,
        )
    };
    let out = cv_grid_search(
        specs.len(),
        |i| store.gram(&specs[i]),
        labels,
        train,
        &p.c_grid,
        &opts,
        None,
    )?;
    let spec = specs[out.best.param].clone();
    let g = store.gram(&spec)?;
    let y_train: Vec<i64> = train.iter().map(|&i| labels[i]).collect();
    let model = train_multiclass(
        &g.submatrix(train),
        &y_train,
        &SmoOptions::new(out.best.c)
            .with_tol(p.tol)
            .keep_unconverged(true),
    )?;
    let pred = model.predict_many(&g.block(test, train))?;
    let y_test: Vec<i64> = test.iter().map(|&i| labels[i]).collect();
    let test_score = metric.score(&pred, &y_test)?;
    let unconverged = out.unconverged + model.unconverged();
    Ok(RunOutcome {
        best: BestChoice {
            kernel: spec,
            c: out.best.c,
            cv_score: out.best.score,
        },
        test_score,
        model,
        unconverged,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub kernel: String,
    pub mean: f64,
    /// Sample standard deviation over runs; 0 for a single run.
    pub std: f64,
    pub scores: Vec<f64>,
    pub best: Vec<BestChoice>,
    /// Binary fits stopped by the iteration cap, over all runs.
    pub unconverged: usize,
    pub seconds: f64,
}

impl ResultRow {
    pub fn new(
        kernel: impl Into<String>,
        scores: Vec<f64>,
        best: Vec<BestChoice>,
        unconverged: usize,
        seconds: f64,
    ) -> Self {
        let (mean, std) = mean_std(&scores);
        Self {
            kernel: kernel.into(),
            mean,
            std,
            scores,
            best,
            unconverged,
            seconds,
        }
    }
}

pub fn mean_std(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub name: String,
    pub metric: Metric,
    pub runs: usize,
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, kernel: KernelKind) -> Option<&ResultRow> {
        self.rows.iter().find(|r| r.kernel == kernel.name())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("kernel,mean,std,runs,scores,best,unconverged,seconds\n");
        for r in &self.rows {
            let scores: Vec<String> = r.scores.iter().map(|s| format!("{s}")).collect();
            let best: Vec<String> = r
                .best
                .iter()
                .map(|b| format!("{} C={}", describe(&b.kernel), b.c))
                .collect();
            let _ = writeln!(
                out,
                "{},{},{},{},{},\"{}\",{},{:.3}",
                r.kernel,
                r.mean,
                r.std,
                r.scores.len(),
                scores.join(";"),
                best.join(";"),
                r.unconverged,
                r.seconds
            );
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("table serializes")
    }

    /// Writes `results.csv` and `results.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(BenchError::io(dir))?;
        let csv = dir.join("results.csv");
        let json = dir.join("results.json");
        std::fs::write(&csv, self.to_csv()).map_err(BenchError::io(&csv))?;
        std::fs::write(&json, self.to_json()).map_err(BenchError::io(&json))?;
        Ok((csv, json))
    }
}

/// Stratified split of run `run`.
pub fn split_for_run(
    p: &ProtocolConfig,
    labels: &[i64],
    run: usize,
) -> Result<(Vec<usize>, Vec<usize>)> {
    Ok(stratified_split(
        labels,
        p.test_fraction,
        derive_seed(p.seed, SeedPurpose::Split, run),
    )?)
}

/// The full protocol over already prepared diagrams.
pub fn run_prepared(
    cfg: &ExperimentConfig,
    data: &Prepared,
    store: &GramStore<'_>,
    kinds: &[KernelKind],
    mut progress: impl FnMut(&str),
) -> Result<ResultTable> {
    let p = &cfg.protocol;
    let metric = metric_for(p.metric, &data.labels);
    let splits: Vec<_> = (0..p.runs)
        .map(|r| split_for_run(p, &data.labels, r))
        .collect::<Result<_>>()?;
    let mut rows = Vec::new();
    for &kind in kinds {
        let start = Instant::now();
        let mut scores = Vec::new();
        let mut best = Vec::new();
        let mut unconverged = 0;
        for (run, (train, test)) in splits.iter().enumerate() {
            let out = run_once(store, kind, cfg, &data.labels, train, test, metric, run)?;
            progress(&format!(
                "{kind} run {}/{}: test {:.4} (cv {:.4}, {} C={})",
                run + 1,
                p.runs,
                out.test_score,
                out.best.cv_score,
                describe(&out.best.kernel),
                out.best.c
            ));
            if out.unconverged > 0 {
                progress(&format!(
                    "{kind} run {}: {} fits hit the iteration cap",
                    run + 1,
                    out.unconverged
                ));
            }
            unconverged += out.unconverged;
            scores.push(out.test_score);
            best.push(out.best);
        }
        store.release();
        rows.push(ResultRow::new(
            kind.name(),
            scores,
            best,
            unconverged,
            start.elapsed().as_secs_f64(),
        ));
    }
    Ok(ResultTable {
        name: cfg.name.clone(),
        metric,
        runs: p.runs,
        rows,
    })
}

/// Loads data, runs every configured kernel and writes the result table
/// under the output directory.
pub fn run_pipeline(cfg: &ExperimentConfig, progress: impl FnMut(&str)) -> Result<ResultTable> {
    let data = Prepared::load(cfg)?;
    let store = data.store(Some(&cfg.output))?;
    let table = run_prepared(cfg, &data, &store, &cfg.kernels.kinds(), progress)?;
    table.write(&cfg.output)?;
    Ok(table)
}
