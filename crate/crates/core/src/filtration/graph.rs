use std::collections::{BTreeSet, HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use super::{Cell, ComplexKind, FilteredComplex};
use crate::error::{Error, Result};

/// Undirected graph on vertices `0..n`; each edge stored once with `u < v`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    n: usize,
    edges: Vec<(usize, usize, f64)>,
}

impl WeightedGraph {
    /// Normalizes endpoint order; rejects self-loops, out-of-range
    /// vertices, duplicates and non-finite weights.
    pub fn new(n: usize, edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut normalized = Vec::with_capacity(edges.len());
        for (u, v, w) in edges {
            let (u, v) = if u <= v { (u, v) } else { (v, u) };
            if u == v {
                return Err(Error::InvalidInput(format!("self-loop at vertex {u}")));
            }
            if v >= n {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{v}) out of range for n={n}"
                )));
            }
            if !w.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "edge ({u},{v}) has weight {w}"
                )));
            }
            if !seen.insert((u, v)) {
                return Err(Error::InvalidInput(format!("duplicate edge ({u},{v})")));
            }
            normalized.push((u, v, w));
        }
        Ok(Self {
            n,
            edges: normalized,
        })
    }

    /// Unit-weight graph from an edge list.
    pub fn unweighted(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        Self::new(n, edges.iter().map(|&(u, v)| (u, v, 1.0)).collect())
    }

    pub fn vertex_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    fn adjacency(&self) -> Vec<BTreeSet<usize>> {
        let mut adj = vec![BTreeSet::new(); self.n];
        for &(u, v, _) in &self.edges {
            adj[u].insert(v);
            adj[v].insert(u);
        }
        adj
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum VertexBirth {
    Zero,
    #[default]
    MinIncident,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct GraphFiltrationOptions {
    pub include_triangles: bool,
    pub vertex_birth: VertexBirth,
}

/// Sub-level filtration of the edge weights. Vertices enter with their
/// lightest edge (or at 0, see [`VertexBirth`]); triangles, when enabled,
/// enter at their heaviest edge.
pub fn graph_sublevel_filtration(
    g: &WeightedGraph,
    opts: GraphFiltrationOptions,
) -> Result<FilteredComplex> {
    let mut vertex_value = vec![f64::INFINITY; g.n];
    for &(u, v, w) in &g.edges {
        vertex_value[u] = vertex_value[u].min(w);
        vertex_value[v] = vertex_value[v].min(w);
    }
    let mut cells: Vec<Cell> = vertex_value
        .iter()
        .enumerate()
        .map(|(v, &w)| {
            let value = match opts.vertex_birth {
                VertexBirth::Zero => 0.0,
                VertexBirth::MinIncident if w.is_finite() => w,
                VertexBirth::MinIncident => 0.0,
            };
            Cell {
                vertices: vec![v],
                dim: 0,
                value,
            }
        })
        .collect();
    if opts.vertex_birth == VertexBirth::Zero {
        // a negative weight would enter before its endpoints
        if let Some(&(u, v, w)) = g.edges.iter().find(|e| e.2 < 0.0) {
            return Err(Error::InvalidInput(format!(
                "edge ({u},{v}) has negative weight {w} with vertex_birth = zero"
            )));
        }
    }
    cells.extend(g.edges.iter().map(|&(u, v, w)| Cell {
        vertices: vec![u, v],
        dim: 1,
        value: w,
    }));

    if opts.include_triangles {
        let weight: HashMap<(usize, usize), f64> =
            g.edges.iter().map(|&(u, v, w)| ((u, v), w)).collect();
        let adj = g.adjacency();
        for &(u, v, w_uv) in &g.edges {
            for &x in adj[v].range((v + 1)..) {
                if let Some(&w_ux) = weight.get(&(u, x)) {
                    let w_vx = weight[&(v, x)];
                    cells.push(Cell {
                        vertices: vec![u, v, x],
                        dim: 2,
                        value: w_uv.max(w_ux).max(w_vx),
                    });
                }
            }
        }
    }
    FilteredComplex::new(cells, ComplexKind::Simplicial)
}

/// Complete graph on every connected component, weighted by hop distance.
/// Input weights are ignored.
pub fn shortest_path_weights(g: &WeightedGraph) -> WeightedGraph {
    let adj = g.adjacency();
    let mut edges = Vec::new();
    let mut hops = vec![usize::MAX; g.n];
    let mut queue = VecDeque::new();
    for s in 0..g.n {
        hops.iter_mut().for_each(|h| *h = usize::MAX);
        hops[s] = 0;
        queue.clear();
        queue.push_back(s);
        while let Some(u) = queue.pop_front() {
            for &v in &adj[u] {
                if hops[v] == usize::MAX {
                    hops[v] = hops[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        for (t, &h) in hops.iter().enumerate().skip(s + 1) {
            if h != usize::MAX {
                edges.push((s, t, h as f64));
            }
        }
    }
    WeightedGraph { n: g.n, edges }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JaccardOrientation {
    /// Store the raw index: dissimilar edges enter first.
    Similarity,
    /// Store `1 - index`: similar edges enter first.
    #[default]
    Dissimilarity,
}

/// Re-weights every edge by the Jaccard index of its endpoints'
/// neighbourhoods (each neighbourhood excludes the vertex itself).
pub fn jaccard_weights(g: &WeightedGraph, orientation: JaccardOrientation) -> WeightedGraph {
    let adj = g.adjacency();
    let edges = g
        .edges
        .iter()
        .map(|&(u, v, _)| {
            let inter = adj[u].intersection(&adj[v]).count();
            let union = adj[u].union(&adj[v]).count();
            let index = if union == 0 {
                0.0
            } else {
                inter as f64 / union as f64
            };
            let w = match orientation {
                JaccardOrientation::Similarity => index,
                JaccardOrientation::Dissimilarity => 1.0 - index,
            };
            (u, v, w)
        })
        .collect();
    WeightedGraph { n: g.n, edges }
}
