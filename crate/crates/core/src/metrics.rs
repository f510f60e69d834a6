//! Distances between point clouds and between persistence diagrams.

use std::f64::consts::PI;

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::filtration::PointCloud;

fn sup_norm(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Hausdorff distance under the sup-norm.
pub fn hausdorff(x: &PointCloud, y: &PointCloud) -> Result<f64> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::Empty("point cloud"));
    }
    if x.dim() != y.dim() {
        return Err(Error::LengthMismatch {
            expected: x.dim(),
            got: y.dim(),
        });
    }
    let directed = |a: &PointCloud, b: &PointCloud| {
        a.points()
            .iter()
            .map(|p| {
                b.points()
                    .iter()
                    .map(|q| sup_norm(p, q))
                    .fold(f64::INFINITY, f64::min)
            })
            .fold(0.0, f64::max)
    };
    Ok(directed(x, y).max(directed(y, x)))
}

/// Sup-norm distance between two diagram points.
#[inline]
pub fn point_distance(a: &DiagramPoint, b: &DiagramPoint) -> f64 {
    (a.birth - b.birth).abs().max((a.death - b.death).abs())
}

/// Sup-norm distance from a point to the diagonal.
#[inline]
pub fn diagonal_distance(a: &DiagramPoint) -> f64 {
    (a.death - a.birth) / 2.0
}

/// Bottleneck distance between two finite diagrams, ignoring homology
/// dimension (the caller filters first for a per-dimension distance).
///
/// Each side is augmented with diagonal slots for the other side's points.
/// A point may match a point of the other diagram or its own diagonal slot;
/// diagonal slots match each other at no cost. The answer is the smallest
/// candidate cost for which a perfect matching exists.
pub fn bottleneck(d: &PersistenceDiagram, e: &PersistenceDiagram) -> Result<f64> {
    d.require_finite()?;
    e.require_finite()?;
    let (a, b) = (d.points(), e.points());
    let (n, m) = (a.len(), b.len());
    if n + m == 0 {
        return Ok(0.0);
    }
    let size = n + m;
    // cost[l][r]; INFINITY marks a forbidden pair
    let mut cost = vec![f64::INFINITY; size * size];
    for i in 0..n {
        for j in 0..m {
            cost[i * size + j] = point_distance(&a[i], &b[j]);
        }
        cost[i * size + m + i] = diagonal_distance(&a[i]);
    }
    for j in 0..m {
        cost[(n + j) * size + j] = diagonal_distance(&b[j]);
        for k in 0..n {
            cost[(n + j) * size + m + k] = 0.0;
        }
    }
    let mut candidates: Vec<f64> = cost.iter().copied().filter(|c| c.is_finite()).collect();
    candidates.sort_by(f64::total_cmp);
    candidates.dedup();

    let (mut lo, mut hi) = (0, candidates.len() - 1);
    while lo < hi {
        let mid = (lo + hi) / 2;
        if has_perfect_matching(&cost, size, candidates[mid]) {
            hi = mid;
        } else {
            lo = mid + 1;
        }
    }
    Ok(candidates[lo])
}

/// Bottleneck distance for each homology dimension present in either
/// diagram.
pub fn bottleneck_per_dimension(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
) -> Result<Vec<(usize, f64)>> {
    let mut dims = d.dimensions();
    dims.extend(e.dimensions());
    dims.sort_unstable();
    dims.dedup();
    dims.into_iter()
        .map(|k| {
            Ok((
                k,
                bottleneck(&d.filter_dimension(k), &e.filter_dimension(k))?,
            ))
        })
        .collect()
}

fn has_perfect_matching(cost: &[f64], size: usize, threshold: f64) -> bool {
    let adj: Vec<Vec<usize>> = (0..size)
        .map(|l| {
            (0..size)
                .filter(|&r| cost[l * size + r] <= threshold)
                .collect()
        })
        .collect();
    let mut match_of_right: Vec<Option<usize>> = vec![None; size];
    let mut visited = vec![false; size];
    for l in 0..size {
        visited.iter_mut().for_each(|v| *v = false);
        if !augment(l, &adj, &mut match_of_right, &mut visited) {
            return false;
        }
    }
    true
}

fn augment(
    l: usize,
    adj: &[Vec<usize>],
    match_of_right: &mut [Option<usize>],
    visited: &mut [bool],
) -> bool {
    for &r in &adj[l] {
        if visited[r] {
            continue;
        }
        visited[r] = true;
        match match_of_right[r] {
            None => {
                match_of_right[r] = Some(l);
                return true;
            }
            Some(other) => {
                if augment(other, adj, match_of_right, visited) {
                    match_of_right[r] = Some(l);
                    return true;
                }
            }
        }
    }
    false
}

/// 1-Wasserstein distance between two equal-mass empirical measures on the
/// line: `Σ |a_(i) - b_(i)|` over the sorted samples.
pub fn wasserstein_1d(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch {
            expected: a.len(),
            got: b.len(),
        });
    }
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    Ok(sorted_transport(&a, &b))
}

fn sorted_transport(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}

/// Unit directions at the midpoints of `M` equal arcs of `[-π/2, π/2)`.
pub fn sw_directions(m: usize) -> Vec<(f64, f64)> {
    (0..m)
        .map(|i| {
            let theta = -PI / 2.0 + (i as f64 + 0.5) * PI / m as f64;
            (theta.cos(), theta.sin())
        })
        .collect()
}

/// Sliced Wasserstein distance, averaging the 1-D transport cost of
/// `D ∪ Δ(E)` against `E ∪ Δ(D)` over `M` directions of a half circle.
///
/// The transport cost is antipodally symmetric, so the half-circle mean
/// equals the mean over the full circle.
pub fn sliced_wasserstein(d: &PersistenceDiagram, e: &PersistenceDiagram, m: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidParameter(
            "direction count must be >= 1".into(),
        ));
    }
    sliced_wasserstein_with(d, e, &sw_directions(m))
}

/// Same as [`sliced_wasserstein`] with precomputed directions.
pub fn sliced_wasserstein_with(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    directions: &[(f64, f64)],
) -> Result<f64> {
    d.require_finite()?;
    e.require_finite()?;
    if directions.is_empty() {
        return Err(Error::InvalidParameter(
            "direction count must be >= 1".into(),
        ));
    }
    let size = d.len() + e.len();
    let mut lhs = Vec::with_capacity(size);
    let mut rhs = Vec::with_capacity(size);
    let mut total = 0.0;
    for &(c, s) in directions {
        lhs.clear();
        rhs.clear();
        lhs.extend(d.iter().map(|p| p.birth * c + p.death * s));
        lhs.extend(e.iter().map(|p| (p.birth + p.death) / 2.0 * (c + s)));
        rhs.extend(e.iter().map(|p| p.birth * c + p.death * s));
        rhs.extend(d.iter().map(|p| (p.birth + p.death) / 2.0 * (c + s)));
        lhs.sort_by(f64::total_cmp);
        rhs.sort_by(f64::total_cmp);
        total += sorted_transport(&lhs, &rhs);
    }
    Ok(total / directions.len() as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pd(t: &[(f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram::from_triples(t.iter().map(|&(b, d)| (0, b, d))).unwrap()
    }

    fn cloud(p: &[[f64; 2]]) -> PointCloud {
        PointCloud::new(p.iter().map(|x| x.to_vec()).collect()).unwrap()
    }

    #[test]
    fn hausdorff_examples() {
        assert_eq!(
            hausdorff(&cloud(&[[0.0, 0.0]]), &cloud(&[[1.0, 0.0]])).unwrap(),
            1.0
        );
        let x = cloud(&[[0.0, 0.0], [2.0, 3.0]]);
        assert_eq!(hausdorff(&x, &x).unwrap(), 0.0);
        let y = cloud(&[[0.0, 0.0], [2.0, 0.0]]);
        assert_eq!(hausdorff(&y, &cloud(&[[1.0, 0.0]])).unwrap(), 1.0);
        assert!(hausdorff(&y, &PointCloud::new(vec![]).unwrap()).is_err());
        let z = PointCloud::new(vec![vec![0.0]]).unwrap();
        assert!(hausdorff(&y, &z).is_err());
    }

    #[test]
    fn bottleneck_examples() {
        assert_eq!(
            bottleneck(&pd(&[(0.0, 2.0)]), &PersistenceDiagram::empty()).unwrap(),
            1.0
        );
        let d = pd(&[(0.0, 2.0), (1.0, 4.0)]);
        assert_eq!(bottleneck(&d, &d).unwrap(), 0.0);
        assert_eq!(
            bottleneck(&pd(&[(0.0, 2.0)]), &pd(&[(0.0, 2.5)])).unwrap(),
            0.5
        );
        let inf = pd(&[(0.0, f64::INFINITY)]);
        assert!(matches!(
            bottleneck(&inf, &d),
            Err(Error::InfiniteDeath { .. })
        ));
        let empty = PersistenceDiagram::empty();
        assert_eq!(bottleneck(&empty, &empty).unwrap(), 0.0);
    }

    #[test]
    fn per_dimension_bottleneck() {
        let d = PersistenceDiagram::from_triples([(0, 0.0, 2.0), (1, 0.0, 4.0)]).unwrap();
        let e = PersistenceDiagram::from_triples([(0, 0.0, 2.0)]).unwrap();
        assert_eq!(
            bottleneck_per_dimension(&d, &e).unwrap(),
            vec![(0, 0.0), (1, 2.0)]
        );
    }

    #[test]
    fn wasserstein_examples() {
        assert_eq!(wasserstein_1d(&[0.0, 1.0], &[0.5, 1.5]).unwrap(), 1.0);
        assert_eq!(wasserstein_1d(&[0.3, 2.0], &[2.0, 0.3]).unwrap(), 0.0);
        assert_eq!(wasserstein_1d(&[0.0], &[3.0]).unwrap(), 3.0);
        assert!(wasserstein_1d(&[0.0], &[]).is_err());
    }

    #[test]
    fn sliced_wasserstein_basics() {
        let d = pd(&[(0.0, 2.0), (0.5, 1.0)]);
        let e = pd(&[(0.2, 1.5)]);
        assert_eq!(sliced_wasserstein(&d, &d, 50).unwrap(), 0.0);
        assert_eq!(
            sliced_wasserstein(&d, &e, 50).unwrap(),
            sliced_wasserstein(&e, &d, 50).unwrap()
        );
        assert!(sliced_wasserstein(&d, &e, 0).is_err());
        assert!(sliced_wasserstein(&pd(&[(0.0, f64::INFINITY)]), &e, 5).is_err());
    }

    #[test]
    fn single_point_closed_form() {
        // D = {(0, 2)}, E = ∅: W(θ) = |<(0,2) - (1,1), θ>| = |sin θ - cos θ|,
        // whose mean over the circle is 2√2/π.
        let sw =
            sliced_wasserstein(&pd(&[(0.0, 2.0)]), &PersistenceDiagram::empty(), 4000).unwrap();
        let exact = 2.0 * 2f64.sqrt() / PI;
        assert!((sw - exact).abs() / exact < 1e-6, "{sw} vs {exact}");
    }
}
