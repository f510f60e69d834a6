use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::multiclass::{sorted_classes, train_multiclass};
use super::scores::Metric;
use super::smo::{SmoOptions, DEFAULT_TOL};
use crate::error::{Error, Result};
use crate::kernels::GramMatrix;

fn class_members(indices: &[usize], labels: &[i64]) -> Vec<(i64, Vec<usize>)> {
    let picked: Vec<i64> = indices.iter().map(|&i| labels[i]).collect();
    sorted_classes(&picked)
        .into_iter()
        .map(|c| {
            (
                c,
                indices
                    .iter()
                    .copied()
                    .filter(|&i| labels[i] == c)
                    .collect(),
            )
        })
        .collect()
}

/// Per-class proportional split of `0..labels.len()`, returning sorted
/// `(train, test)` indices. A class with at least two samples always keeps
/// one in train and, when its share rounds to zero, gives none to test.
pub fn stratified_split(
    labels: &[i64],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(Error::InvalidParameter(format!(
            "test fraction must lie in (0, 1), got {test_fraction}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let all: Vec<usize> = (0..labels.len()).collect();
    let (mut train, mut test) = (Vec::new(), Vec::new());
    for (_, mut members) in class_members(&all, labels) {
        members.shuffle(&mut rng);
        let size = members.len();
        let mut n_test = (size as f64 * test_fraction).round() as usize;
        if size >= 2 {
            n_test = n_test.min(size - 1);
        } else {
            n_test = 0;
        }
        test.extend_from_slice(&members[..n_test]);
        train.extend_from_slice(&members[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Stratified `k`-fold partition of `indices`: each class is shuffled and
/// dealt round-robin, continuing where the previous class stopped.
pub fn stratified_folds(
    indices: &[usize],
    labels: &[i64],
    k: usize,
    seed: u64,
) -> Result<Vec<Vec<usize>>> {
    if k < 2 {
        return Err(Error::InvalidParameter(format!(
            "need at least 2 folds, got {k}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut folds = vec![Vec::new(); k];
    let mut next = 0;
    for (_, mut members) in class_members(indices, labels) {
        members.shuffle(&mut rng);
        for i in members {
            folds[next].push(i);
            next = (next + 1) % k;
        }
    }
    for f in &mut folds {
        f.sort_unstable();
    }
    Ok(folds)
}

/// Observer for every sample index a grid search reads. Used to audit that
/// held-out samples are never touched.
pub trait IndexAudit: Sync {
    fn touch(&self, index: usize);
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvOptions {
    pub folds: usize,
    pub seed: u64,
    pub metric: Metric,
    pub tol: f64,
    /// Score fits stopped by the iteration cap instead of failing.
    pub keep_unconverged: bool,
}

impl CvOptions {
    pub fn new(folds: usize, seed: u64, metric: Metric) -> Self {
        Self {
            folds,
            seed,
            metric,
            tol: DEFAULT_TOL,
            keep_unconverged: false,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CvCell {
    /// Position of the kernel parameter tuple in the caller's grid.
    pub param: usize,
    pub c: f64,
    /// Mean validation score over the folds that were not skipped.
    pub score: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvOutcome {
    pub best: CvCell,
    /// Every cell, parameter-major then in `c_grid` order.
    pub cells: Vec<CvCell>,
    /// Folds whose training part missed a class, or that were empty.
    pub skipped_folds: Vec<usize>,
    /// Pairwise machines, over all cells and folds, stopped by the
    /// iteration cap.
    pub unconverged: usize,
}

/// Grid search by stratified `k`-fold cross-validation on `train`.
///
/// `gram_for(p)` returns the Gram matrix of parameter tuple `p` over the
/// whole dataset; fold matrices are sliced from it and only rows and
/// columns in `train` are read. The best cell maximizes the mean score;
/// ties go to the smaller `C`, then to the earlier parameter tuple.
pub fn cv_grid_search<F>(
    n_params: usize,
    gram_for: F,
    labels: &[i64],
    train: &[usize],
    c_grid: &[f64],
    opts: &CvOptions,
    audit: Option<&dyn IndexAudit>,
) -> Result<CvOutcome>
where
    F: Fn(usize) -> Result<GramMatrix> + Sync,
{
    if n_params == 0 || c_grid.is_empty() {
        return Err(Error::Empty("parameter grid"));
    }
    let touch = |i: usize| {
        if let Some(a) = audit {
            a.touch(i);
        }
    };
    train.iter().for_each(|&i| touch(i));
    let classes = sorted_classes(&train.iter().map(|&i| labels[i]).collect::<Vec<_>>());
    if classes.len() < 2 {
        return Err(Error::SingleClass(train.len()));
    }
    let folds = stratified_folds(train, labels, opts.folds, opts.seed)?;
    let mut plans = Vec::new();
    let mut skipped = Vec::new();
    for (f, val) in folds.iter().enumerate() {
        let fit: Vec<usize> = train
            .iter()
            .copied()
            .filter(|i| val.binary_search(i).is_err())
            .collect();
        let fit_labels: Vec<i64> = fit.iter().map(|&i| labels[i]).collect();
        if val.is_empty() || sorted_classes(&fit_labels) != classes {
            skipped.push(f);
            continue;
        }
        let val_labels: Vec<i64> = val.iter().map(|&i| labels[i]).collect();
        plans.push((fit, fit_labels, val.clone(), val_labels));
    }
    if plans.is_empty() {
        return Err(Error::AllFoldsSkipped);
    }

    let smo = |c: f64| {
        SmoOptions::new(c)
            .with_tol(opts.tol)
            .keep_unconverged(opts.keep_unconverged)
    };
    let mut cells = Vec::with_capacity(n_params * c_grid.len());
    let mut unconverged = 0;
    for p in 0..n_params {
        let g = gram_for(p)?;
        let scores: Vec<Vec<(f64, usize)>> = plans
            .par_iter()
            .map(|(fit, fit_labels, val, val_labels)| {
                fit.iter().chain(val).for_each(|&i| touch(i));
                let sub = g.submatrix(fit);
                let rows = g.block(val, fit);
                c_grid
                    .iter()
                    .map(|&c| {
                        let model = train_multiclass(&sub, fit_labels, &smo(c))?;
                        let pred = model.predict_many(&rows)?;
                        Ok((opts.metric.score(&pred, val_labels)?, model.unconverged()))
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<_>>()?;
        for (ci, &c) in c_grid.iter().enumerate() {
            let mean = scores.iter().map(|s| s[ci].0).sum::<f64>() / scores.len() as f64;
            unconverged += scores.iter().map(|s| s[ci].1).sum::<usize>();
            cells.push(CvCell {
                param: p,
                c,
                score: mean,
            });
        }
    }
    let best = *cells
        .iter()
        .reduce(|a, b| {
            let better = b.score > a.score
                || (b.score == a.score && (b.c < a.c || (b.c == a.c && b.param < a.param)));
            if better {
                b
            } else {
                a
            }
        })
        .expect("nonempty grid");
    Ok(CvOutcome {
        best,
        cells,
        skipped_folds: skipped,
        unconverged,
    })
}
