use super::{Cell, ComplexKind, FilteredComplex, PointCloud};
use crate::error::{Error, Result};

pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub fn chebyshev(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// Metric used for Rips filtrations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum PointMetric {
    #[default]
    Euclidean,
    /// Sup-norm.
    Chebyshev,
}

impl PointMetric {
    pub fn distance(self, a: &[f64], b: &[f64]) -> f64 {
        match self {
            PointMetric::Euclidean => euclidean(a, b),
            PointMetric::Chebyshev => chebyshev(a, b),
        }
    }
}

/// Vietoris–Rips complex with simplices through dimension `max_dim + 1`,
/// so homology through `max_dim` is exact.
///
/// A simplex enters at its diameter (largest pairwise distance); vertices
/// enter at 0. Simplices whose diameter exceeds `max_scale` are left out.
pub fn vietoris_rips(pc: &PointCloud, max_dim: usize, max_scale: f64) -> Result<FilteredComplex> {
    vietoris_rips_with(pc, max_dim, max_scale, PointMetric::Euclidean)
}

/// [`vietoris_rips`] under another metric.
pub fn vietoris_rips_with(
    pc: &PointCloud,
    max_dim: usize,
    max_scale: f64,
    metric: PointMetric,
) -> Result<FilteredComplex> {
    if pc.is_empty() {
        return Err(Error::Empty("point cloud"));
    }
    if max_scale.is_nan() || max_scale <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "max_scale {max_scale} must be positive"
        )));
    }
    let n = pc.len();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let d = metric.distance(&pc.points()[i], &pc.points()[j]);
            dist[i * n + j] = d;
            dist[j * n + i] = d;
        }
    }
    // upper neighbours within scale
    let neighbours: Vec<Vec<usize>> = (0..n)
        .map(|i| {
            ((i + 1)..n)
                .filter(|&j| dist[i * n + j] <= max_scale)
                .collect()
        })
        .collect();

    let top = max_dim + 1;
    let mut cells = Vec::new();
    let mut stack = Vec::with_capacity(top + 1);
    for v in 0..n {
        cells.push(Cell {
            vertices: vec![v],
            dim: 0,
            value: 0.0,
        });
        stack.clear();
        stack.push(v);
        expand(
            &dist,
            n,
            &neighbours,
            &neighbours[v],
            0.0,
            top,
            &mut stack,
            &mut cells,
        );
    }
    FilteredComplex::new(cells, ComplexKind::Simplicial)
}

#[allow(clippy::too_many_arguments)]
fn expand(
    dist: &[f64],
    n: usize,
    neighbours: &[Vec<usize>],
    candidates: &[usize],
    diameter: f64,
    top: usize,
    simplex: &mut Vec<usize>,
    out: &mut Vec<Cell>,
) {
    if simplex.len() > top {
        return;
    }
    for (k, &w) in candidates.iter().enumerate() {
        let value = simplex
            .iter()
            .map(|&u| dist[u * n + w])
            .fold(diameter, f64::max);
        simplex.push(w);
        out.push(Cell {
            vertices: simplex.clone(),
            dim: simplex.len() - 1,
            value,
        });
        let next: Vec<usize> = candidates[k + 1..]
            .iter()
            .copied()
            .filter(|x| neighbours[w].binary_search(x).is_ok())
            .collect();
        expand(dist, n, neighbours, &next, value, top, simplex, out);
        simplex.pop();
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn values_of_dim(fc: &FilteredComplex, dim: usize) -> Vec<f64> {
        let mut v: Vec<f64> = fc
            .cells()
            .iter()
            .filter(|c| c.dim == dim)
            .map(|c| c.value)
            .collect();
        v.sort_by(f64::total_cmp);
        v
    }

    #[test]
    fn two_points() {
        let pc = PointCloud::new(vec![vec![0.0], vec![1.0]]).unwrap();
        let fc = vietoris_rips(&pc, 0, 2.0).unwrap();
        assert_eq!(values_of_dim(&fc, 0), vec![0.0, 0.0]);
        assert_eq!(values_of_dim(&fc, 1), vec![1.0]);
        assert_eq!(fc.len(), 3);
    }

    #[test]
    fn unit_square() {
        let pc = PointCloud::new(vec![
            vec![0.0, 0.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
            vec![0.0, 1.0],
        ])
        .unwrap();
        let fc = vietoris_rips(&pc, 1, 10.0).unwrap();
        let s2 = 2f64.sqrt();
        assert_eq!(values_of_dim(&fc, 1), vec![1.0, 1.0, 1.0, 1.0, s2, s2]);
        assert_eq!(values_of_dim(&fc, 2), vec![s2; 4]);
        assert!(values_of_dim(&fc, 3).is_empty());
        fc.check_monotone().unwrap();
    }

    #[test]
    fn single_point_and_errors() {
        let pc = PointCloud::new(vec![vec![1.0, 2.0]]).unwrap();
        let fc = vietoris_rips(&pc, 3, 1.0).unwrap();
        assert_eq!(fc.len(), 1);
        assert_eq!(fc.cells()[0].value, 0.0);
        let empty = PointCloud::new(vec![]).unwrap();
        assert!(matches!(
            vietoris_rips(&empty, 1, 1.0),
            Err(Error::Empty(_))
        ));
        assert!(vietoris_rips(&pc, 1, 0.0).is_err());
    }

    #[test]
    fn scale_cutoff() {
        let pc = PointCloud::new(vec![vec![0.0], vec![1.0], vec![3.0]]).unwrap();
        let fc = vietoris_rips(&pc, 1, 2.0).unwrap();
        assert_eq!(values_of_dim(&fc, 1), vec![1.0, 2.0]);
        assert!(values_of_dim(&fc, 2).is_empty());
    }
}
