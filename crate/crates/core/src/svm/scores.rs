use serde::{Deserialize, Serialize};

use super::multiclass::sorted_classes;
use crate::error::{Error, Result};

/// Validation score used in model selection.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Accuracy,
    Balanced,
}

impl Metric {
    /// Balanced accuracy when the imbalance ratio exceeds 1.5.
    pub fn for_labels(labels: &[i64]) -> Self {
        if imbalance_ratio(labels) > 1.5 {
            Metric::Balanced
        } else {
            Metric::Accuracy
        }
    }

    pub fn score(self, pred: &[i64], truth: &[i64]) -> Result<f64> {
        match self {
            Metric::Accuracy => accuracy(pred, truth),
            Metric::Balanced => balanced_accuracy(pred, truth),
        }
    }
}

/// Majority-class size over minority-class size; 1 for empty input.
pub fn imbalance_ratio(labels: &[i64]) -> f64 {
    let counts: Vec<usize> = sorted_classes(labels)
        .iter()
        .map(|c| labels.iter().filter(|l| *l == c).count())
        .collect();
    match (counts.iter().max(), counts.iter().min()) {
        (Some(&hi), Some(&lo)) => hi as f64 / lo as f64,
        _ => 1.0,
    }
}

fn check(pred: &[i64], truth: &[i64]) -> Result<()> {
    if pred.len() != truth.len() {
        return Err(Error::LengthMismatch {
            expected: truth.len(),
            got: pred.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Empty("label sequence"));
    }
    Ok(())
}

pub fn accuracy(pred: &[i64], truth: &[i64]) -> Result<f64> {
    check(pred, truth)?;
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / truth.len() as f64)
}

/// Mean per-class recall over the classes present in `truth`.
pub fn balanced_accuracy(pred: &[i64], truth: &[i64]) -> Result<f64> {
    balanced_accuracy_over(pred, truth, &sorted_classes(truth))
}

/// Mean per-class recall over `classes`; every class must occur in `truth`.
pub fn balanced_accuracy_over(pred: &[i64], truth: &[i64], classes: &[i64]) -> Result<f64> {
    check(pred, truth)?;
    if classes.is_empty() {
        return Err(Error::Empty("class list"));
    }
    let mut total = 0.0;
    for &c in classes {
        let members = truth.iter().filter(|&&t| t == c).count();
        if members == 0 {
            return Err(Error::InvalidInput(format!("class {c} has no samples")));
        }
        let hit = pred
            .iter()
            .zip(truth)
            .filter(|(p, t)| **t == c && **p == c)
            .count();
        total += hit as f64 / members as f64;
    }
    Ok(total / classes.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn examples() {
        let truth = [0, 0, 1, 1];
        assert_eq!(balanced_accuracy(&[0, 0, 1, 0], &truth).unwrap(), 0.75);
        assert_eq!(accuracy(&truth, &truth).unwrap(), 1.0);
        assert_eq!(balanced_accuracy(&truth, &truth).unwrap(), 1.0);
        assert_eq!(balanced_accuracy(&[1, 1, 1, 1], &truth).unwrap(), 0.5);
        assert!(balanced_accuracy_over(&truth, &truth, &[0, 1, 2]).is_err());
        assert!(accuracy(&[], &[]).is_err());
        assert!(accuracy(&[0], &[0, 1]).is_err());
    }

    #[test]
    fn balanced_equals_plain_on_equal_class_sizes() {
        let truth = [0, 0, 0, 1, 1, 1, 2, 2, 2];
        for pred in [
            [0, 1, 0, 1, 1, 2, 2, 0, 2],
            [2, 2, 2, 2, 2, 2, 2, 2, 2],
            [0, 0, 0, 1, 1, 1, 2, 2, 1],
        ] {
            let a = accuracy(&pred, &truth).unwrap();
            let b = balanced_accuracy(&pred, &truth).unwrap();
            assert!((a - b).abs() < 1e-15);
        }
    }

    #[test]
    fn metric_flag() {
        assert_eq!(imbalance_ratio(&[0, 0, 0, 1]), 3.0);
        assert_eq!(Metric::for_labels(&[0, 0, 0, 1]), Metric::Balanced);
        assert_eq!(Metric::for_labels(&[0, 0, 1, 1, 2, 2]), Metric::Accuracy);
    }
}
