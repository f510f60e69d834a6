use std::f64::consts::PI;

use super::{canonical_pair, positive};
use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::error::Result;

#[inline]
fn heat_term(x: &DiagramPoint, y: &DiagramPoint, denom: f64) -> f64 {
    let direct = (x.birth - y.birth).powi(2) + (x.death - y.death).powi(2);
    // y reflected across the diagonal
    let mirrored = (x.birth - y.death).powi(2) + (x.death - y.birth).powi(2);
    (-direct / denom).exp() - (-mirrored / denom).exp()
}

/// Persistence scale-space kernel: the `L²` inner product of the heat
/// diffusions of both diagrams at time `sigma`, with Dirichlet boundary on
/// the diagonal.
pub fn k_pss(d: &PersistenceDiagram, e: &PersistenceDiagram, sigma: f64) -> Result<f64> {
    positive("sigma", sigma)?;
    d.require_finite()?;
    e.require_finite()?;
    let (d, e) = canonical_pair(d, e);
    let denom = 8.0 * sigma;
    let sum: f64 = d
        .iter()
        .map(|x| e.iter().map(|y| heat_term(x, y, denom)).sum::<f64>())
        .sum();
    Ok(sum / (8.0 * PI * sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(t: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::from_triples(t.iter().map(|&(b, d)| (1, b, d))).unwrap()
    }

    #[test]
    fn single_point_closed_form() {
        let d = pd(&[(0.0, 1.0)]);
        let expected = (1.0 - (-0.5f64).exp()) / (4.0 * PI);
        let got = k_pss(&d, &d, 0.5).unwrap();
        assert!((got - expected).abs() < 1e-15, "{got} vs {expected}");
    }

    #[test]
    fn diagonal_diagrams_vanish() {
        let diag = pd(&[(0.3, 0.3), (1.0, 1.0)]);
        let other = pd(&[(0.0, 2.0), (0.5, 0.9)]);
        assert_eq!(k_pss(&diag, &other, 0.1).unwrap(), 0.0);
    }

    #[test]
    fn symmetric_and_validated() {
        let d = pd(&[(0.0, 1.0), (0.2, 0.7)]);
        let e = pd(&[(0.1, 1.3)]);
        assert_eq!(k_pss(&d, &e, 0.3).unwrap(), k_pss(&e, &d, 0.3).unwrap());
        assert!(k_pss(&d, &e, 0.0).is_err());
        assert!(k_pss(&pd(&[(0.0, f64::INFINITY)]), &e, 1.0).is_err());
    }
}
