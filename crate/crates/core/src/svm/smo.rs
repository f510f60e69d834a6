use crate::error::{Error, Result};
use crate::kernels::GramMatrix;

pub const DEFAULT_TOL: f64 = 1e-4;

const TAU: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SmoOptions {
    pub c: f64,
    /// Stop once the maximal KKT violation drops below this.
    pub tol: f64,
    /// Iteration cap; `None` means `max(10⁷, 100·n)`.
    pub max_iter: Option<usize>,
    /// On reaching the cap, return the current iterate marked as not
    /// converged instead of failing.
    pub keep_unconverged: bool,
}

impl SmoOptions {
    pub fn new(c: f64) -> Self {
        Self {
            c,
            tol: DEFAULT_TOL,
            max_iter: None,
            keep_unconverged: false,
        }
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn keep_unconverged(mut self, keep: bool) -> Self {
        self.keep_unconverged = keep;
        self
    }
}

/// A binary kernel SVM in dual form. The decision value on a sample is
/// `Σ coef[k] · K(x_support[k], x) + bias`; positive means `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainedModel {
    /// Indices into the training set of samples with `α > 0`.
    pub support: Vec<usize>,
    /// `α_i y_i` for each support index.
    pub coef: Vec<f64>,
    pub bias: f64,
    pub c: f64,
    /// Size of the training set the kernel rows must be aligned with.
    pub n_train: usize,
    /// Dual objective `Σα − ½ αᵀQα` at the solution.
    pub objective: f64,
    pub iterations: usize,
    /// False when the iteration cap stopped the solver first.
    pub converged: bool,
}

impl TrainedModel {
    /// Full-length `α` vector (non-negative).
    pub fn alphas(&self, y: &[f64]) -> Vec<f64> {
        let mut a = vec![0.0; self.n_train];
        for (&i, &c) in self.support.iter().zip(&self.coef) {
            a[i] = c * y[i];
        }
        a
    }

    /// Decision value for a sample given its kernel values against every
    /// training sample.
    pub fn margin(&self, kernel_row: &[f64]) -> Result<f64> {
        if kernel_row.len() != self.n_train {
            return Err(Error::LengthMismatch {
                expected: self.n_train,
                got: kernel_row.len(),
            });
        }
        let s: f64 = self
            .support
            .iter()
            .zip(&self.coef)
            .map(|(&i, &c)| c * kernel_row[i])
            .sum();
        Ok(s + self.bias)
    }

    /// Label (`+1` on a non-negative margin, `-1` otherwise) and margin.
    pub fn predict(&self, kernel_row: &[f64]) -> Result<(i8, f64)> {
        let m = self.margin(kernel_row)?;
        Ok((if m >= 0.0 { 1 } else { -1 }, m))
    }
}

/// Solves the soft-margin dual with precomputed kernel `g` and labels `±1`
/// by sequential minimal optimization with second-order working-set
/// selection.
pub fn solve_binary(g: &GramMatrix, y: &[f64], opts: &SmoOptions) -> Result<TrainedModel> {
    let n = g.len();
    if y.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if !(opts.c.is_finite() && opts.c > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "C must be positive, got {}",
            opts.c
        )));
    }
    if !(opts.tol.is_finite() && opts.tol > 0.0) {
        return Err(Error::InvalidParameter(format!(
            "tol must be positive, got {}",
            opts.tol
        )));
    }
    if let Some(bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
        return Err(Error::InvalidInput(format!(
            "binary labels must be +1 or -1, got {bad}"
        )));
    }
    if y.iter().all(|&v| v == y[0]) {
        return Err(Error::SingleClass(n));
    }
    g.check_finite()?;
    let scale = g.as_slice().iter().fold(0.0f64, |m, v| m.max(v.abs()));
    g.check_symmetric(1e-9 * scale.max(1.0))?;

    let c = opts.c;
    let max_iter = opts.max_iter.unwrap_or_else(|| (100 * n).max(10_000_000));
    let k = |i: usize, j: usize| g.get(i, j);
    let q = |i: usize, j: usize| y[i] * y[j] * g.get(i, j);

    let mut alpha = vec![0.0; n];
    // gradient of ½αᵀQα − eᵀα
    let mut grad = vec![-1.0; n];
    let upper = |a: f64| a >= c;
    let lower = |a: f64| a <= 0.0;

    let mut iter = 0;
    let mut converged = true;
    loop {
        // i: maximal violator in I_up
        let mut gmax = f64::NEG_INFINITY;
        let mut gmax_idx = None;
        for t in 0..n {
            let in_up = if y[t] > 0.0 {
                !upper(alpha[t])
            } else {
                !lower(alpha[t])
            };
            if in_up && -y[t] * grad[t] >= gmax {
                gmax = -y[t] * grad[t];
                gmax_idx = Some(t);
            }
        }
        let mut gmax2 = f64::NEG_INFINITY;
        let mut best_j = None;
        let mut obj_min = f64::INFINITY;
        if let Some(i) = gmax_idx {
            for t in 0..n {
                let in_low = if y[t] > 0.0 {
                    !lower(alpha[t])
                } else {
                    !upper(alpha[t])
                };
                if !in_low {
                    continue;
                }
                let v = y[t] * grad[t];
                gmax2 = gmax2.max(v);
                let diff = gmax + v;
                if diff > 0.0 {
                    let quad = k(i, i) + k(t, t) - 2.0 * k(i, t);
                    let quad = if quad > 0.0 { quad } else { TAU };
                    let obj = -(diff * diff) / quad;
                    if obj <= obj_min {
                        obj_min = obj;
                        best_j = Some(t);
                    }
                }
            }
        }
        let (i, j) = match (gmax_idx, best_j) {
            (Some(i), Some(j)) if gmax + gmax2 >= opts.tol => (i, j),
            _ => break,
        };
        if iter >= max_iter {
            if !opts.keep_unconverged {
                return Err(Error::NotConverged {
                    iterations: iter,
                    gap: gmax + gmax2,
                });
            }
            converged = false;
            break;
        }
        iter += 1;

        let (old_i, old_j) = (alpha[i], alpha[j]);
        if y[i] != y[j] {
            let quad = k(i, i) + k(j, j) + 2.0 * q(i, j);
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (-grad[i] - grad[j]) / quad;
            let diff = alpha[i] - alpha[j];
            alpha[i] += delta;
            alpha[j] += delta;
            if diff > 0.0 {
                if alpha[j] < 0.0 {
                    alpha[j] = 0.0;
                    alpha[i] = diff;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = -diff;
            }
            if diff > 0.0 {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = c - diff;
                }
            } else if alpha[j] > c {
                alpha[j] = c;
                alpha[i] = c + diff;
            }
        } else {
            let quad = k(i, i) + k(j, j) - 2.0 * q(i, j);
            let quad = if quad > 0.0 { quad } else { TAU };
            let delta = (grad[i] - grad[j]) / quad;
            let sum = alpha[i] + alpha[j];
            alpha[i] -= delta;
            alpha[j] += delta;
            if sum > c {
                if alpha[i] > c {
                    alpha[i] = c;
                    alpha[j] = sum - c;
                }
            } else if alpha[j] < 0.0 {
                alpha[j] = 0.0;
                alpha[i] = sum;
            }
            if sum > c {
                if alpha[j] > c {
                    alpha[j] = c;
                    alpha[i] = sum - c;
                }
            } else if alpha[i] < 0.0 {
                alpha[i] = 0.0;
                alpha[j] = sum;
            }
        }
        let (di, dj) = (alpha[i] - old_i, alpha[j] - old_j);
        for t in 0..n {
            grad[t] += q(i, t) * di + q(j, t) * dj;
        }
    }

    // bias: mean over free multipliers, midpoint of the feasible interval otherwise
    let (mut ub, mut lb) = (f64::INFINITY, f64::NEG_INFINITY);
    let (mut free, mut free_sum) = (0usize, 0.0);
    for t in 0..n {
        let yg = y[t] * grad[t];
        if upper(alpha[t]) {
            if y[t] < 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else if lower(alpha[t]) {
            if y[t] > 0.0 {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            free += 1;
            free_sum += yg;
        }
    }
    let rho = if free > 0 {
        free_sum / free as f64
    } else {
        (ub + lb) / 2.0
    };

    // f(α) = ½αᵀQα − eᵀα = ½ Σ α_t (grad_t − 1)
    let objective = -0.5
        * alpha
            .iter()
            .zip(&grad)
            .map(|(a, g)| a * (g - 1.0))
            .sum::<f64>();
    let support: Vec<usize> = (0..n).filter(|&t| alpha[t] > 0.0).collect();
    let coef = support.iter().map(|&t| alpha[t] * y[t]).collect();
    Ok(TrainedModel {
        support,
        coef,
        bias: -rho,
        c,
        n_train: n,
        objective,
        iterations: iter,
        converged,
    })
}

/// Dual objective `Σα − ½ Σ α_i α_j y_i y_j G_ij`.
pub fn dual_objective(g: &GramMatrix, y: &[f64], alpha: &[f64]) -> f64 {
    let n = g.len();
    let mut quad = 0.0;
    for i in 0..n {
        for j in 0..n {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * g.get(i, j);
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

#[cfg(test)]
mod tests {
    use super::*;

    fn linear_gram(xs: &[[f64; 2]]) -> GramMatrix {
        GramMatrix::from_fn(xs.len(), |i, j| xs[i][0] * xs[j][0] + xs[i][1] * xs[j][1])
    }

    #[test]
    fn two_sample_identity() {
        let g = GramMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        let y = [1.0, -1.0];
        let m = solve_binary(&g, &y, &SmoOptions::new(10.0)).unwrap();
        assert_eq!(m.alphas(&y), vec![1.0, 1.0]);
        assert_eq!(m.bias, 0.0);
        assert_eq!(m.objective, 1.0);
        assert_eq!(m.predict(&[1.0, 0.0]).unwrap().0, 1);
        assert_eq!(m.predict(&[0.0, 1.0]).unwrap().0, -1);
    }

    #[test]
    fn bias_only_row() {
        let m = TrainedModel {
            support: vec![0],
            coef: vec![1.0],
            bias: 0.5,
            c: 1.0,
            n_train: 2,
            objective: 0.0,
            iterations: 0,
            converged: true,
        };
        assert_eq!(m.predict(&[0.0, 0.0]).unwrap(), (1, 0.5));
        assert!(m.predict(&[0.0]).is_err());
        let a = m.margin(&[1.0, 0.0]).unwrap();
        let b = m.margin(&[3.0, 0.0]).unwrap();
        assert_eq!(b - 0.5, 3.0 * (a - 0.5));
    }

    #[test]
    fn separable_toy_reproduces_labels() {
        let xs = [[2.0, 2.0], [3.0, 1.5], [-1.0, -2.0], [-2.0, -0.5]];
        let y = [1.0, 1.0, -1.0, -1.0];
        let g = linear_gram(&xs);
        let m = solve_binary(&g, &y, &SmoOptions::new(1e3)).unwrap();
        for i in 0..4 {
            assert_eq!(m.predict(g.row(i)).unwrap().0 as f64, y[i]);
        }
        let residual: f64 = m.coef.iter().sum();
        assert!(residual.abs() < 1e-12);
        let a = m.alphas(&y);
        assert!((dual_objective(&g, &y, &a) - m.objective).abs() < 1e-9);
    }

    #[test]
    fn duplicated_samples_keep_the_decision() {
        let xs = [
            [2.0, 2.0],
            [3.0, 1.5],
            [-1.0, -2.0],
            [-2.0, -0.5],
            [0.5, 1.0],
        ];
        let y = [1.0, 1.0, -1.0, -1.0, 1.0];
        let probe = [0.3, -0.2];
        let opts = SmoOptions::new(1e4).with_tol(1e-10);
        let m1 = solve_binary(&linear_gram(&xs), &y, &opts).unwrap();
        let row1: Vec<f64> = xs
            .iter()
            .map(|x| x[0] * probe[0] + x[1] * probe[1])
            .collect();
        let xs2: Vec<[f64; 2]> = xs.iter().chain(xs.iter()).copied().collect();
        let y2: Vec<f64> = y.iter().chain(y.iter()).copied().collect();
        let m2 = solve_binary(&linear_gram(&xs2), &y2, &opts).unwrap();
        let row2: Vec<f64> = xs2
            .iter()
            .map(|x| x[0] * probe[0] + x[1] * probe[1])
            .collect();
        let (f1, f2) = (m1.margin(&row1).unwrap(), m2.margin(&row2).unwrap());
        assert!((f1 - f2).abs() < 1e-6, "{f1} vs {f2}");
    }

    #[test]
    fn input_errors() {
        let g = GramMatrix::new(2, vec![1.0, 0.0, 0.0, 1.0]).unwrap();
        assert!(matches!(
            solve_binary(&g, &[1.0, 1.0], &SmoOptions::new(1.0)),
            Err(Error::SingleClass(2))
        ));
        assert!(solve_binary(&g, &[1.0, 0.0], &SmoOptions::new(1.0)).is_err());
        assert!(solve_binary(&g, &[1.0, -1.0], &SmoOptions::new(0.0)).is_err());
        let nan = GramMatrix::new(2, vec![1.0, f64::NAN, f64::NAN, 1.0]).unwrap();
        assert!(solve_binary(&nan, &[1.0, -1.0], &SmoOptions::new(1.0)).is_err());
    }

    #[test]
    fn iteration_cap_fails_or_reports() {
        let g = linear_gram(&[[0.0, 0.0], [1.0, 0.2], [0.3, 1.0], [2.0, 2.0], [1.5, 0.1]]);
        let y = [1.0, 1.0, -1.0, -1.0, 1.0];
        let capped = SmoOptions {
            max_iter: Some(1),
            ..SmoOptions::new(10.0)
        };
        assert!(matches!(
            solve_binary(&g, &y, &capped),
            Err(Error::NotConverged { iterations: 1, .. })
        ));
        let kept = solve_binary(&g, &y, &capped.keep_unconverged(true)).unwrap();
        assert!(!kept.converged);
        assert_eq!(kept.iterations, 1);
        assert!(
            solve_binary(&g, &y, &SmoOptions::new(10.0))
                .unwrap()
                .converged
        );
    }
}
