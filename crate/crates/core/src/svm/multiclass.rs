use super::smo::{solve_binary, SmoOptions, TrainedModel};
use crate::error::{Error, Result};
use crate::kernels::GramMatrix;

/// One binary machine of a one-vs-one ensemble: `positive` gets `+1`.
#[derive(Debug, Clone, PartialEq)]
pub struct PairModel {
    pub positive: i64,
    pub negative: i64,
    /// Support indices refer to the full training set.
    pub model: TrainedModel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassModel {
    /// Sorted class labels.
    pub classes: Vec<i64>,
    pub machines: Vec<PairModel>,
    pub n_train: usize,
}

pub fn sorted_classes(labels: &[i64]) -> Vec<i64> {
    let mut c = labels.to_vec();
    c.sort_unstable();
    c.dedup();
    c
}

/// One-vs-one ensemble over all class pairs. With two classes this is a
/// single [`solve_binary`] call with the smaller label as `+1`.
pub fn train_multiclass(
    g: &GramMatrix,
    labels: &[i64],
    opts: &SmoOptions,
) -> Result<MulticlassModel> {
    let n = g.len();
    if labels.len() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: labels.len(),
        });
    }
    let classes = sorted_classes(labels);
    if classes.len() < 2 {
        return Err(Error::SingleClass(n));
    }
    let mut machines = Vec::new();
    for (a, &pos) in classes.iter().enumerate() {
        for &neg in &classes[a + 1..] {
            let idx: Vec<usize> = (0..n)
                .filter(|&i| labels[i] == pos || labels[i] == neg)
                .collect();
            let y: Vec<f64> = idx
                .iter()
                .map(|&i| if labels[i] == pos { 1.0 } else { -1.0 })
                .collect();
            let sub = if idx.len() == n {
                g.clone()
            } else {
                g.submatrix(&idx)
            };
            let mut model = solve_binary(&sub, &y, opts)?;
            model.support = model.support.iter().map(|&k| idx[k]).collect();
            model.n_train = n;
            machines.push(PairModel {
                positive: pos,
                negative: neg,
                model,
            });
        }
    }
    Ok(MulticlassModel {
        classes,
        machines,
        n_train: n,
    })
}

impl MulticlassModel {
    /// Pairwise machines stopped by the iteration cap.
    pub fn unconverged(&self) -> usize {
        self.machines.iter().filter(|m| !m.model.converged).count()
    }

    /// Majority vote over the pairwise machines. Ties go to the class with
    /// the largest sum of margins in its favour, then to the smaller label.
    pub fn predict(&self, kernel_row: &[f64]) -> Result<i64> {
        let k = self.classes.len();
        let mut votes = vec![0usize; k];
        let mut margins = vec![0.0; k];
        let pos_of = |c: i64| self.classes.binary_search(&c).expect("class of a machine");
        for m in &self.machines {
            let (p, n) = (pos_of(m.positive), pos_of(m.negative));
            let (label, margin) = m.model.predict(kernel_row)?;
            if label > 0 {
                votes[p] += 1;
            } else {
                votes[n] += 1;
            }
            margins[p] += margin;
            margins[n] -= margin;
        }
        let best = (0..k)
            .max_by(|&a, &b| {
                votes[a]
                    .cmp(&votes[b])
                    .then(margins[a].total_cmp(&margins[b]))
                    .then(b.cmp(&a))
            })
            .expect("at least two classes");
        Ok(self.classes[best])
    }

    pub fn predict_many(&self, rows: &[Vec<f64>]) -> Result<Vec<i64>> {
        rows.iter().map(|r| self.predict(r)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rbf_gram(xs: &[(f64, f64)], gamma: f64) -> GramMatrix {
        GramMatrix::from_fn(xs.len(), |i, j| {
            let d = (xs[i].0 - xs[j].0).powi(2) + (xs[i].1 - xs[j].1).powi(2);
            (-gamma * d).exp()
        })
    }

    #[test]
    fn binary_reduction_matches_solve_binary() {
        let xs = [(0.0, 0.0), (0.2, 0.1), (1.0, 1.0), (0.9, 1.2), (0.5, 0.4)];
        let labels = [3, 3, 7, 7, 3];
        let g = rbf_gram(&xs, 2.0);
        let opts = SmoOptions::new(1.0);
        let mc = train_multiclass(&g, &labels, &opts).unwrap();
        let y: Vec<f64> = labels
            .iter()
            .map(|&l| if l == 3 { 1.0 } else { -1.0 })
            .collect();
        let bin = solve_binary(&g, &y, &opts).unwrap();
        assert_eq!(mc.machines.len(), 1);
        assert_eq!(mc.machines[0].model, bin);
        for i in 0..5 {
            let expected = if bin.predict(g.row(i)).unwrap().0 > 0 {
                3
            } else {
                7
            };
            assert_eq!(mc.predict(g.row(i)).unwrap(), expected);
        }
    }

    #[test]
    fn three_clusters_fit_perfectly() {
        let mut xs = Vec::new();
        let mut labels = Vec::new();
        for (c, centre) in [(0.0, 0.0), (5.0, 0.0), (0.0, 5.0)].iter().enumerate() {
            for k in 0..4 {
                let t = k as f64 * 0.3;
                xs.push((centre.0 + t.cos() * 0.3, centre.1 + t.sin() * 0.3));
                labels.push(c as i64);
            }
        }
        let g = rbf_gram(&xs, 1.0);
        let mc = train_multiclass(&g, &labels, &SmoOptions::new(10.0)).unwrap();
        assert_eq!(mc.machines.len(), 3);
        for i in 0..xs.len() {
            assert_eq!(mc.predict(g.row(i)).unwrap(), labels[i]);
        }
    }

    #[test]
    fn vote_tie_uses_margin_sum() {
        let machine = |positive, negative, bias| PairModel {
            positive,
            negative,
            model: TrainedModel {
                support: vec![],
                coef: vec![],
                bias,
                c: 1.0,
                n_train: 1,
                objective: 0.0,
                iterations: 0,
                converged: true,
            },
        };
        // 0 beats 1, 1 beats 2, 2 beats 0: one vote each
        let mc = MulticlassModel {
            classes: vec![0, 1, 2],
            machines: vec![machine(0, 1, 0.5), machine(0, 2, -2.0), machine(1, 2, 0.1)],
            n_train: 1,
        };
        // margin sums: 0 → 0.5 - 2.0, 1 → -0.5 + 0.1, 2 → 2.0 - 0.1
        assert_eq!(mc.predict(&[0.0]).unwrap(), 2);
        assert_eq!(mc.predict(&[0.0]).unwrap(), 2);
    }
}
