//! One-parameter sweeps: conditioning of the training Gram matrix and the
//! cross-validated score, per parameter value.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use perskern::kernels::{condition_number, KernelKind};
use perskern::svm::{cv_grid_search, CvOptions};
use perskern::KernelSpec;
use serde::{Deserialize, Serialize};

use crate::config::{ExperimentConfig, KernelGrids, PfkGrid, PiGrid, PsskGrid, PwgkGrid, SwkGrid};
use crate::error::{BenchError, Result};
use crate::grams::{candidates, GramStore};
use crate::protocol::{derive_seed, metric_for, split_for_run, Prepared, SeedPurpose};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub param: f64,
    /// Infinite when the jittered Gram matrix is not positive definite;
    /// written as `null` in JSON.
    pub condition: f64,
    pub cv_score: f64,
    pub best_c: f64,
    /// Binary fits stopped by the iteration cap during the search.
    pub unconverged: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepTable {
    pub kernel: KernelKind,
    pub parameter: String,
    pub jitter: f64,
    pub rows: Vec<SweepRow>,
}

/// Name of the swept parameter of each kernel.
pub fn swept_parameter(kind: KernelKind) -> &'static str {
    match kind {
        KernelKind::WeightedGaussian => "tau",
        KernelKind::SlicedWasserstein => "eta",
        _ => "sigma",
    }
}

/// `grids` with the swept parameter of `kind` set to `value` and every
/// other parameter fixed to its first grid value.
fn single_grid(kind: KernelKind, grids: &KernelGrids, value: f64) -> Result<KernelGrids> {
    let missing = || BenchError::Config(format!("no [kernels] grid for {kind}"));
    let mut g = KernelGrids::default();
    match kind {
        KernelKind::ScaleSpace => g.pssk = Some(PsskGrid { sigma: vec![value] }),
        KernelKind::WeightedGaussian => {
            let w = grids.pwgk.as_ref().ok_or_else(missing)?;
            g.pwgk = Some(PwgkGrid {
                tau: vec![value],
                rho: vec![w.rho[0]],
                p: vec![w.p[0]],
                c_w: vec![w.c_w[0]],
            });
        }
        KernelKind::SlicedWasserstein => {
            let s = grids.swk.as_ref().ok_or_else(missing)?;
            g.swk = Some(SwkGrid {
                eta: vec![value],
                directions: s.directions,
            });
        }
        KernelKind::Fisher => {
            let f = grids.pfk.as_ref().ok_or_else(missing)?;
            g.pfk = Some(PfkGrid {
                sigma: vec![value],
                t: vec![f.t[0]],
            });
        }
        KernelKind::Image => {
            let pixel_size = grids.pi.as_ref().map_or(0.1, |p| p.pixel_size);
            g.pi = Some(PiGrid {
                sigma: vec![value],
                pixel_size,
            });
        }
    }
    Ok(g)
}

/// Sweeps `values` on the training part of the first split. Rows are
/// sorted by parameter.
pub fn sweep_conditioning(
    cfg: &ExperimentConfig,
    data: &Prepared,
    store: &GramStore<'_>,
    kind: KernelKind,
    values: &[f64],
    jitter: f64,
) -> Result<SweepTable> {
    let p = &cfg.protocol;
    let labels = &data.labels;
    let metric = metric_for(p.metric, labels);
    let (train, _) = split_for_run(p, labels, 0)?;
    let opts = CvOptions {
        tol: p.tol,
        keep_unconverged: true,
        ..CvOptions::new(p.folds, derive_seed(p.seed, SeedPurpose::Folds, 0), metric)
    };
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    sorted.dedup();
    let mut rows = Vec::new();
    for value in sorted {
        let specs: Vec<KernelSpec> = candidates(
            kind,
            &single_grid(kind, &cfg.kernels, value)?,
            &data.diagrams,
            &train,
        )?;
        store.prepare(&specs)?;
        let g = store.gram(&specs[0])?;
        let condition = condition_number(&g.submatrix(&train), jitter)?;
        let out = cv_grid_search(1, |_| Ok(g.clone()), labels, &train, &p.c_grid, &opts, None)?;
        rows.push(SweepRow {
            param: value,
            condition,
            cv_score: out.best.score,
            best_c: out.best.c,
            unconverged: out.unconverged,
        });
    }
    Ok(SweepTable {
        kernel: kind,
        parameter: swept_parameter(kind).into(),
        jitter,
        rows,
    })
}

impl SweepTable {
    pub fn to_csv(&self) -> String {
        let mut out = format!("{},condition,cv_score,best_c,unconverged\n", self.parameter);
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{}",
                r.param, r.condition, r.cv_score, r.best_c, r.unconverged
            );
        }
        out
    }

    /// Writes `sweep-<kernel>.csv` and `.json` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<(PathBuf, PathBuf)> {
        std::fs::create_dir_all(dir).map_err(BenchError::io(dir))?;
        let stem = format!("sweep-{}", self.kernel.name().to_lowercase());
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        std::fs::write(&csv, self.to_csv()).map_err(BenchError::io(&csv))?;
        let text = serde_json::to_string_pretty(self).expect("table serializes");
        std::fs::write(&json, text).map_err(BenchError::io(&json))?;
        Ok((csv, json))
    }
}
