use rayon::prelude::*;

use super::{canonical_pair, positive, GramMatrix};
use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};

fn augmented(d: &PersistenceDiagram, e: &PersistenceDiagram) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = d.iter().map(|p| (p.birth, p.death)).collect();
    out.extend(e.iter().map(|p| {
        let m = (p.birth + p.death) / 2.0;
        (m, m)
    }));
    out
}

/// Unnormalized Gaussian mixture (covariance `sigma * I`) at `theta`.
fn mixture(centres: &[(f64, f64)], theta: (f64, f64), two_sigma: f64) -> f64 {
    centres
        .iter()
        .map(|c| {
            let sq = (theta.0 - c.0).powi(2) + (theta.1 - c.1).powi(2);
            (-sq / two_sigma).exp()
        })
        .sum()
}

/// Fisher information distance between the smoothed, normalized measures of
/// `D ∪ Δ(E)` and `E ∪ Δ(D)`, evaluated on the support of both.
///
/// The Bhattacharyya sum is `Σ sqrt(a_θ b_θ) / sqrt(Σa · Σb)` over the
/// unnormalized mixtures, clamped to `[0, 1]` before the arccosine.
pub fn fisher_distance(d: &PersistenceDiagram, e: &PersistenceDiagram, sigma: f64) -> Result<f64> {
    positive("sigma", sigma)?;
    d.require_finite()?;
    e.require_finite()?;
    if d.is_empty() && e.is_empty() {
        return Err(Error::Empty("both diagrams"));
    }
    let (d, e) = canonical_pair(d, e);
    let a = augmented(d, e);
    let b = augmented(e, d);
    let two_sigma = 2.0 * sigma;
    let (mut sum_a, mut sum_b, mut cross) = (0.0, 0.0, 0.0);
    for &theta in a.iter().chain(&b) {
        let pa = mixture(&a, theta, two_sigma);
        let pb = mixture(&b, theta, two_sigma);
        sum_a += pa;
        sum_b += pb;
        cross += (pa * pb).sqrt();
    }
    let bc = (cross / (sum_a * sum_b).sqrt()).clamp(0.0, 1.0);
    Ok(bc.acos())
}

/// `exp(-t · d_FIM(D, E))`.
pub fn k_pf(d: &PersistenceDiagram, e: &PersistenceDiagram, t: f64, sigma: f64) -> Result<f64> {
    positive("t", t)?;
    Ok((-t * fisher_distance(d, e, sigma)?).exp())
}

/// Pairwise Fisher distances for one `sigma`; the kernel for any `t` is a
/// map over this matrix. Two empty diagrams are at distance 0.
pub fn fisher_distance_matrix(diagrams: &[PersistenceDiagram], sigma: f64) -> Result<GramMatrix> {
    positive("sigma", sigma)?;
    let n = diagrams.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    let (d, e) = (&diagrams[i], &diagrams[j]);
                    if d.is_empty() && e.is_empty() {
                        return Ok(0.0);
                    }
                    fisher_distance(d, e, sigma).map_err(|e| Error::GramEntry {
                        i,
                        j,
                        source: Box::new(e),
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramMatrix::from_upper_rows(rows))
}

pub fn pfk_from_distances(distances: &GramMatrix, t: f64) -> Result<GramMatrix> {
    positive("t", t)?;
    Ok(distances.map(|d| (-t * d).exp()))
}
