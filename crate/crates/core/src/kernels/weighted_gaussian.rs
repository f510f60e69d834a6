use rayon::prelude::*;

use super::{canonical_pair, positive, GramMatrix};
use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PwgkParams {
    pub rho: f64,
    pub tau: f64,
    pub p: f64,
    pub c_w: f64,
}

/// `arctan(c_w * pers^p)`.
pub fn pwgk_weight(x: &DiagramPoint, c_w: f64, p: f64) -> f64 {
    (c_w * x.persistence().powf(p)).atan()
}

/// RKHS inner product of the weighted Gaussian embeddings of `D` and `E`:
/// `Σ w(x) w(y) exp(-|x - y|² / 2ρ²)`.
pub fn pwgk_embedding_inner(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    rho: f64,
    c_w: f64,
    p: f64,
) -> Result<f64> {
    positive("rho", rho)?;
    d.require_finite()?;
    e.require_finite()?;
    let (d, e) = canonical_pair(d, e);
    let wd: Vec<f64> = d.iter().map(|x| pwgk_weight(x, c_w, p)).collect();
    let we: Vec<f64> = e.iter().map(|y| pwgk_weight(y, c_w, p)).collect();
    Ok(inner_with_weights(d, &wd, e, &we, 2.0 * rho * rho))
}

fn inner_with_weights(
    d: &PersistenceDiagram,
    wd: &[f64],
    e: &PersistenceDiagram,
    we: &[f64],
    denom: f64,
) -> f64 {
    d.iter()
        .zip(wd)
        .map(|(x, &wx)| {
            e.iter()
                .zip(we)
                .map(|(y, &wy)| {
                    let sq = (x.birth - y.birth).powi(2) + (x.death - y.death).powi(2);
                    wx * wy * (-sq / denom).exp()
                })
                .sum::<f64>()
        })
        .sum()
}

fn from_inner(dd: f64, ee: f64, de: f64, tau: f64) -> f64 {
    (-(dd + ee - 2.0 * de) / (2.0 * tau * tau)).exp()
}

/// Persistence weighted Gaussian kernel.
pub fn k_pwg(d: &PersistenceDiagram, e: &PersistenceDiagram, params: &PwgkParams) -> Result<f64> {
    positive("tau", params.tau)?;
    let PwgkParams { rho, tau, p, c_w } = *params;
    let dd = pwgk_embedding_inner(d, d, rho, c_w, p)?;
    let ee = pwgk_embedding_inner(e, e, rho, c_w, p)?;
    let de = pwgk_embedding_inner(d, e, rho, c_w, p)?;
    Ok(from_inner(dd, ee, de, tau))
}

/// All pairwise embedding inner products; independent of `tau`.
pub fn pwgk_inner_matrix(
    diagrams: &[PersistenceDiagram],
    rho: f64,
    c_w: f64,
    p: f64,
) -> Result<GramMatrix> {
    positive("rho", rho)?;
    for (i, d) in diagrams.iter().enumerate() {
        d.require_finite().map_err(|e| Error::GramEntry {
            i,
            j: i,
            source: Box::new(e),
        })?;
    }
    let weights: Vec<Vec<f64>> = diagrams
        .iter()
        .map(|d| d.iter().map(|x| pwgk_weight(x, c_w, p)).collect())
        .collect();
    let denom = 2.0 * rho * rho;
    let n = diagrams.len();
    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    let (a, b) = canonical_pair(&diagrams[i], &diagrams[j]);
                    let (wa, wb) = if std::ptr::eq(a, &diagrams[i]) {
                        (&weights[i], &weights[j])
                    } else {
                        (&weights[j], &weights[i])
                    };
                    inner_with_weights(a, wa, b, wb, denom)
                })
                .collect()
        })
        .collect();
    Ok(GramMatrix::from_upper_rows(rows))
}

/// Applies the outer Gaussian of scale `tau` to a matrix of embedding inner
/// products.
pub fn pwgk_from_inner(inner: &GramMatrix, tau: f64) -> Result<GramMatrix> {
    positive("tau", tau)?;
    let n = inner.len();
    Ok(GramMatrix::from_fn(n, |i, j| {
        from_inner(inner.get(i, i), inner.get(j, j), inner.get(i, j), tau)
    }))
}
