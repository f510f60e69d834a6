use super::GramMatrix;
use crate::error::{Error, Result};

const SYMMETRY_TOL: f64 = 1e-9;

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations, ascending.
pub fn symmetric_eigenvalues(g: &GramMatrix) -> Result<Vec<f64>> {
    g.check_finite()?;
    let n = g.len();
    let mut a: Vec<f64> = g.as_slice().to_vec();
    // work on the symmetric part
    for i in 0..n {
        for j in i + 1..n {
            let m = 0.5 * (a[i * n + j] + a[j * n + i]);
            a[i * n + j] = m;
            a[j * n + i] = m;
        }
    }
    let frob: f64 = a.iter().map(|v| v * v).sum::<f64>().sqrt();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
            .map(|(i, j)| a[i * n + j] * a[i * n + j])
            .sum::<f64>()
            .sqrt();
        if off <= f64::EPSILON * frob * 1e-3 || off == 0.0 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                let apq = a[p * n + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * n + p];
                let aqq = a[q * n + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i * n + i]).collect();
    eig.sort_by(f64::total_cmp);
    Ok(eig)
}

/// `λ_max / λ_min` of `G + jitter·I`, or infinity when the smallest
/// eigenvalue is not positive. A positive `λ_min` is floored at
/// `ε·λ_max`, so finite results never exceed `1/ε`. Rejects matrices
/// asymmetric beyond `1e-9`.
pub fn condition_number(g: &GramMatrix, jitter: f64) -> Result<f64> {
    if g.is_empty() {
        return Err(Error::Empty("Gram matrix"));
    }
    if !(jitter.is_finite() && jitter >= 0.0) {
        return Err(Error::InvalidParameter(format!(
            "jitter must be >= 0, got {jitter}"
        )));
    }
    g.check_finite()?;
    g.check_symmetric(SYMMETRY_TOL)?;
    let eig = symmetric_eigenvalues(g)?;
    let lo = eig[0] + jitter;
    let hi = eig[eig.len() - 1] + jitter;
    if lo <= 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(hi / lo.max(f64::EPSILON * hi))
}
