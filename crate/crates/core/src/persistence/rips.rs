//! Vietoris–Rips persistence in dimensions 0 and 1 without building the
//! triangles.
//!
//! Dimension 0 is a union-find sweep over the sorted edges. Dimension 1 is
//! the reduction of the coboundary matrix (persistent cohomology), which
//! yields the same pairs as the boundary reduction for the same total order.
//! Edges paired in dimension 0 are cleared. Coboundaries are enumerated on
//! demand from the distance matrix into a lazy binary heap, and a column
//! whose smallest cofacet is not yet a pivot needs no reduction. Only the
//! reduction coefficients (edge sets) of reduced columns are stored.
//!
//! Above the enclosing radius the complex is a cone, so when `max_scale`
//! exceeds it the edges are truncated there without changing the diagram.

use std::cmp::{Ordering, Reverse};
use std::collections::hash_map::Entry;
use std::collections::{BinaryHeap, HashMap};

use super::compute_persistence;
use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::filtration::{vietoris_rips_with, PointCloud, PointMetric};

/// Dense symmetric distance matrix.
#[derive(Debug, Clone)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    pub fn from_cloud(pc: &PointCloud) -> Self {
        Self::from_cloud_with(pc, PointMetric::Euclidean)
    }

    pub fn from_cloud_with(pc: &PointCloud, metric: PointMetric) -> Self {
        let n = pc.len();
        let mut data = vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = metric.distance(&pc.points()[i], &pc.points()[j]);
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        Self { n, data }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

/// `min_i max_j d(i, j)`: above this scale the Rips complex is a cone.
pub fn enclosing_radius(dm: &DistanceMatrix) -> f64 {
    (0..dm.n)
        .map(|i| dm.row(i).iter().copied().fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy)]
struct Edge {
    d: f64,
    u: u32,
    v: u32,
}

impl Edge {
    fn cmp_key(&self, other: &Self) -> Ordering {
        self.d
            .total_cmp(&other.d)
            .then(self.u.cmp(&other.u))
            .then(self.v.cmp(&other.v))
    }
}

/// Triangle in filtration order: diameter, then sorted vertex tuple
/// encoded lexicographically. Diameters are non-negative, so their bit
/// patterns order like the values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
struct Tri {
    diam_bits: u64,
    id: u64,
}

impl Tri {
    fn diam(&self) -> f64 {
        f64::from_bits(self.diam_bits)
    }
}

/// Distances with entries above the threshold (and the diagonal) set to
/// infinity, so a vertex `w` spans a triangle with `(u, v)` iff
/// `max(d(u, w), d(v, w))` is finite.
struct Cofaces {
    masked: Vec<f64>,
    n: usize,
}

impl Cofaces {
    fn new(dm: &DistanceMatrix, threshold: f64) -> Self {
        let n = dm.n;
        let mut masked = dm.data.clone();
        for (k, v) in masked.iter_mut().enumerate() {
            if *v > threshold || k / n == k % n {
                *v = f64::INFINITY;
            }
        }
        Self { masked, n }
    }

    fn row(&self, i: u32) -> &[f64] {
        let i = i as usize;
        &self.masked[i * self.n..(i + 1) * self.n]
    }

    fn tri(&self, e: &Edge, w: usize, m: f64) -> Tri {
        let w = w as u64;
        let (u, v, n) = (e.u as u64, e.v as u64, self.n as u64);
        let (a, b, c) = if w < u {
            (w, u, v)
        } else if w < v {
            (u, w, v)
        } else {
            (u, v, w)
        };
        Tri {
            diam_bits: e.d.max(m).to_bits(),
            id: (a * n + b) * n + c,
        }
    }

    /// Smallest cofacet of `e` in filtration order, if any. For a fixed
    /// edge the encoded id grows with the third vertex, so among cofacets
    /// of equal diameter the smallest vertex wins.
    fn min_cofacet(&self, e: &Edge) -> Option<Tri> {
        let (ru, rv) = (self.row(e.u), self.row(e.v));
        let m = ru
            .iter()
            .zip(rv)
            .fold(f64::INFINITY, |acc, (a, b)| acc.min(a.max(*b)));
        if m.is_infinite() {
            return None;
        }
        let diam = e.d.max(m);
        let w = ru
            .iter()
            .zip(rv)
            .position(|(a, b)| a.max(*b) <= diam)
            .expect("minimum attained");
        Some(self.tri(e, w, ru[w].max(rv[w])))
    }

    fn push_coboundary(&self, e: &Edge, heap: &mut BinaryHeap<Reverse<Tri>>) {
        let (ru, rv) = (self.row(e.u), self.row(e.v));
        for (w, (a, b)) in ru.iter().zip(rv).enumerate() {
            let m = a.max(*b);
            if m.is_finite() {
                heap.push(Reverse(self.tri(e, w, m)));
            }
        }
    }
}

/// Smallest entry of odd multiplicity, removed from the heap.
fn pop_pivot(heap: &mut BinaryHeap<Reverse<Tri>>) -> Option<Tri> {
    loop {
        let Reverse(top) = heap.pop()?;
        if heap.peek() == Some(&Reverse(top)) {
            heap.pop();
        } else {
            return Some(top);
        }
    }
}

fn xor_indices(target: &mut Vec<usize>, other: &[usize]) {
    for &x in other {
        match target.binary_search(&x) {
            Ok(p) => {
                target.remove(p);
            }
            Err(p) => target.insert(p, x),
        }
    }
}

struct UnionFind {
    parent: Vec<u32>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n as u32).collect(),
        }
    }

    fn find(&mut self, mut x: u32) -> u32 {
        while self.parent[x as usize] != x {
            let grand = self.parent[self.parent[x as usize] as usize];
            self.parent[x as usize] = grand;
            x = grand;
        }
        x
    }

    fn union(&mut self, a: u32, b: u32) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.parent[hi as usize] = lo;
        true
    }
}

/// Rips persistence through `max_dim`, with edges longer than `max_scale`
/// excluded. Dimensions 0 and 1 use the implicit cohomology route; higher
/// dimensions fall back to the explicit boundary reduction.
pub fn rips_persistence(
    pc: &PointCloud,
    max_dim: usize,
    max_scale: f64,
) -> Result<PersistenceDiagram> {
    rips_persistence_with(pc, max_dim, max_scale, PointMetric::Euclidean)
}

/// [`rips_persistence`] under another metric.
pub fn rips_persistence_with(
    pc: &PointCloud,
    max_dim: usize,
    max_scale: f64,
    metric: PointMetric,
) -> Result<PersistenceDiagram> {
    if pc.is_empty() {
        return Err(Error::Empty("point cloud"));
    }
    if max_scale.is_nan() || max_scale <= 0.0 {
        return Err(Error::InvalidInput(format!(
            "max_scale {max_scale} must be positive"
        )));
    }
    if max_dim >= 2 {
        let full = compute_persistence(&vietoris_rips_with(pc, max_dim, max_scale, metric)?)?;
        let points = full.iter().copied().filter(|p| p.dim <= max_dim).collect();
        return PersistenceDiagram::new(points);
    }
    let dm = DistanceMatrix::from_cloud_with(pc, metric);
    Ok(rips_low_dim(&dm, max_dim, max_scale))
}

fn rips_low_dim(dm: &DistanceMatrix, max_dim: usize, max_scale: f64) -> PersistenceDiagram {
    let n = dm.n;
    let threshold = max_scale.min(enclosing_radius(dm));
    let mut edges = Vec::new();
    for u in 0..n {
        for v in (u + 1)..n {
            let d = dm.get(u, v);
            if d <= threshold {
                edges.push(Edge {
                    d,
                    u: u as u32,
                    v: v as u32,
                });
            }
        }
    }
    edges.sort_by(Edge::cmp_key);

    let mut points = Vec::new();
    let mut uf = UnionFind::new(n);
    let mut killer = vec![false; edges.len()];
    for (i, e) in edges.iter().enumerate() {
        if uf.union(e.u, e.v) {
            killer[i] = true;
            if e.d > 0.0 {
                points.push(DiagramPoint {
                    dim: 0,
                    birth: 0.0,
                    death: e.d,
                });
            }
        }
    }
    let components = (0..n as u32).filter(|&v| uf.find(v) == v).count();
    points.extend((0..components).map(|_| DiagramPoint {
        dim: 0,
        birth: 0.0,
        death: f64::INFINITY,
    }));

    if max_dim >= 1 {
        points.extend(rips_dim1(dm, &edges, &killer, threshold));
    }
    PersistenceDiagram::new(points).expect("rips values are ordered")
}

enum Column {
    /// Reduced column equals the raw coboundary of this edge.
    Apparent(usize),
    /// Index into the stored reduction coefficients.
    Stored(usize),
}

fn rips_dim1(
    dm: &DistanceMatrix,
    edges: &[Edge],
    killer: &[bool],
    threshold: f64,
) -> Vec<DiagramPoint> {
    let cof = Cofaces::new(dm, threshold);
    let mut pivots: HashMap<u64, Column> = HashMap::new();
    let mut stored: Vec<Vec<usize>> = Vec::new();
    let mut points = Vec::new();
    let mut heap = BinaryHeap::new();

    for (i, e) in edges.iter().enumerate().rev() {
        if killer[i] {
            continue;
        }
        let Some(first) = cof.min_cofacet(e) else {
            points.push(DiagramPoint {
                dim: 1,
                birth: e.d,
                death: f64::INFINITY,
            });
            continue;
        };
        // an unclaimed smallest cofacet ends the reduction at once
        if let Entry::Vacant(slot) = pivots.entry(first.id) {
            slot.insert(Column::Apparent(i));
            if e.d < first.diam() {
                points.push(DiagramPoint {
                    dim: 1,
                    birth: e.d,
                    death: first.diam(),
                });
            }
            continue;
        }

        let mut v_col = vec![i];
        heap.clear();
        cof.push_coboundary(e, &mut heap);
        loop {
            let Some(pivot) = pop_pivot(&mut heap) else {
                points.push(DiagramPoint {
                    dim: 1,
                    birth: e.d,
                    death: f64::INFINITY,
                });
                break;
            };
            match pivots.get(&pivot.id) {
                Some(&Column::Apparent(j)) => {
                    heap.push(Reverse(pivot));
                    cof.push_coboundary(&edges[j], &mut heap);
                    xor_indices(&mut v_col, &[j]);
                }
                Some(&Column::Stored(s)) => {
                    heap.push(Reverse(pivot));
                    for &j in &stored[s] {
                        cof.push_coboundary(&edges[j], &mut heap);
                    }
                    let other = stored[s].clone();
                    xor_indices(&mut v_col, &other);
                }
                None => {
                    pivots.insert(pivot.id, Column::Stored(stored.len()));
                    stored.push(v_col);
                    if e.d < pivot.diam() {
                        points.push(DiagramPoint {
                            dim: 1,
                            birth: e.d,
                            death: pivot.diam(),
                        });
                    }
                    break;
                }
            }
        }
    }
    points
}
