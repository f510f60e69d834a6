use rayon::prelude::*;

use super::{positive, GramMatrix};
use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};
use crate::metrics::{sliced_wasserstein, sliced_wasserstein_with, sw_directions};

/// `exp(-SW(D, E) / 2η²)`.
pub fn k_sw(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    eta: f64,
    directions: usize,
) -> Result<f64> {
    positive("eta", eta)?;
    Ok(swk_value(sliced_wasserstein(d, e, directions)?, eta))
}

#[inline]
fn swk_value(distance: f64, eta: f64) -> f64 {
    (-distance / (2.0 * eta * eta)).exp()
}

/// Pairwise sliced Wasserstein distances; the kernel for any `eta` is a
/// cheap map over this matrix.
pub fn sw_distance_matrix(
    diagrams: &[PersistenceDiagram],
    directions: usize,
) -> Result<GramMatrix> {
    if directions == 0 {
        return Err(Error::InvalidParameter(
            "direction count must be >= 1".into(),
        ));
    }
    let dirs = sw_directions(directions);
    let n = diagrams.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    sliced_wasserstein_with(&diagrams[i], &diagrams[j], &dirs).map_err(|e| {
                        Error::GramEntry {
                            i,
                            j,
                            source: Box::new(e),
                        }
                    })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramMatrix::from_upper_rows(rows))
}

pub fn swk_from_distances(distances: &GramMatrix, eta: f64) -> Result<GramMatrix> {
    positive("eta", eta)?;
    Ok(distances.map(|d| swk_value(d, eta)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(t: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::from_triples(t.iter().map(|&(b, d)| (1, b, d))).unwrap()
    }

    #[test]
    fn self_value_and_monotonicity() {
        let d = pd(&[(0.0, 1.0), (0.4, 0.6)]);
        assert_eq!(k_sw(&d, &d, 0.3, 50).unwrap(), 1.0);
        let near = pd(&[(0.0, 1.1), (0.4, 0.6)]);
        let far = pd(&[(0.0, 3.0), (0.4, 0.6)]);
        assert!(k_sw(&d, &near, 0.5, 50).unwrap() > k_sw(&d, &far, 0.5, 50).unwrap());
        assert!(k_sw(&d, &near, 0.0, 50).is_err());
    }

    #[test]
    fn matrix_route_matches_direct() {
        let ds = vec![
            pd(&[(0.0, 1.0)]),
            pd(&[(0.2, 0.9), (0.0, 3.0)]),
            PersistenceDiagram::empty(),
        ];
        let dist = sw_distance_matrix(&ds, 20).unwrap();
        let g = swk_from_distances(&dist, 0.7).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_eq!(g.get(i, j), k_sw(&ds[i], &ds[j], 0.7, 20).unwrap());
            }
        }
    }
}
