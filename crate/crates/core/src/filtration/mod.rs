//! Builders that turn raw data into filtered complexes.

mod cubical;
mod graph;
mod rips;
mod takens;

use std::collections::HashMap;

use crate::error::{Error, Result};

pub use cubical::{binarize, default_h_inf, height_filtration, GrayImage};
pub use graph::{
    graph_sublevel_filtration, jaccard_weights, shortest_path_weights, GraphFiltrationOptions,
    JaccardOrientation, VertexBirth, WeightedGraph,
};
pub use rips::{chebyshev, euclidean, vietoris_rips, vietoris_rips_with, PointMetric};
pub use takens::{takens_embedding, TimeSeries};

/// Finite point cloud in `R^d`, Euclidean metric.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    points: Vec<Vec<f64>>,
    dim: usize,
}

impl PointCloud {
    pub fn new(points: Vec<Vec<f64>>) -> Result<Self> {
        let dim = points.first().map_or(0, Vec::len);
        if !points.is_empty() && dim == 0 {
            return Err(Error::InvalidInput(
                "points must have dimension >= 1".into(),
            ));
        }
        for (i, p) in points.iter().enumerate() {
            if p.len() != dim {
                return Err(Error::InvalidInput(format!(
                    "point {i} has dimension {}, expected {dim}",
                    p.len()
                )));
            }
            if p.iter().any(|x| !x.is_finite()) {
                return Err(Error::InvalidInput(format!(
                    "point {i} has a non-finite coordinate"
                )));
            }
        }
        Ok(Self { points, dim })
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient dimension; 0 for an empty cloud.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn distance(&self, i: usize, j: usize) -> f64 {
        euclidean(&self.points[i], &self.points[j])
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ComplexKind {
    Simplicial,
    /// Cubical complex on a 2-D vertex grid; vertex id = `row * width + col`.
    Cubical {
        width: usize,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Cell {
    /// Vertex ids, sorted ascending.
    pub vertices: Vec<usize>,
    pub dim: usize,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FilteredComplex {
    cells: Vec<Cell>,
    kind: ComplexKind,
}

impl FilteredComplex {
    /// Assembles a complex. Vertex tuples are sorted; dimensions are
    /// checked against the cell kind but monotonicity is not (see
    /// [`FilteredComplex::check_monotone`]).
    pub fn new(mut cells: Vec<Cell>, kind: ComplexKind) -> Result<Self> {
        for cell in &mut cells {
            cell.vertices.sort_unstable();
            if !cell.value.is_finite() {
                return Err(Error::InvalidInput(format!(
                    "cell {:?} has non-finite value",
                    cell.vertices
                )));
            }
            let expected = match kind {
                ComplexKind::Simplicial => cell.vertices.len().checked_sub(1),
                ComplexKind::Cubical { .. } => match cell.vertices.len() {
                    1 => Some(0),
                    2 => Some(1),
                    4 => Some(2),
                    _ => None,
                },
            };
            if expected != Some(cell.dim) {
                return Err(Error::InvalidInput(format!(
                    "cell {:?} has dimension {} inconsistent with its vertices",
                    cell.vertices, cell.dim
                )));
            }
        }
        Ok(Self { cells, kind })
    }

    /// Simplicial complex from `(vertices, value)` pairs.
    pub fn simplicial<I>(cells: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<usize>, f64)>,
    {
        let cells = cells
            .into_iter()
            .map(|(vertices, value)| Cell {
                dim: vertices.len().saturating_sub(1),
                vertices,
                value,
            })
            .collect();
        Self::new(cells, ComplexKind::Simplicial)
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn kind(&self) -> ComplexKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn max_dim(&self) -> Option<usize> {
        self.cells.iter().map(|c| c.dim).max()
    }

    pub fn max_value(&self) -> Option<f64> {
        self.cells.iter().map(|c| c.value).max_by(f64::total_cmp)
    }

    /// Codimension-1 faces of a cell, as sorted vertex tuples.
    pub fn faces(&self, cell: &Cell) -> Vec<Vec<usize>> {
        faces_of(self.kind, &cell.vertices, cell.dim)
    }

    /// Sub-complex of cells with value `<= scale`.
    pub fn sublevel(&self, scale: f64) -> Self {
        Self {
            cells: self
                .cells
                .iter()
                .filter(|c| c.value <= scale)
                .cloned()
                .collect(),
            kind: self.kind,
        }
    }

    /// Every face is present and enters no later than its cofaces.
    pub fn check_monotone(&self) -> Result<()> {
        let index: HashMap<&[usize], usize> = self
            .cells
            .iter()
            .enumerate()
            .map(|(i, c)| (c.vertices.as_slice(), i))
            .collect();
        if index.len() != self.cells.len() {
            return Err(Error::InvalidInput(
                "complex contains a duplicate cell".into(),
            ));
        }
        for cell in &self.cells {
            for face in self.faces(cell) {
                let Some(&f) = index.get(face.as_slice()) else {
                    return Err(Error::MissingFace(cell.vertices.clone()));
                };
                let face_cell = &self.cells[f];
                if face_cell.value > cell.value {
                    return Err(Error::NotMonotone {
                        face: face_cell.vertices.clone(),
                        face_value: face_cell.value,
                        coface: cell.vertices.clone(),
                        coface_value: cell.value,
                    });
                }
            }
        }
        Ok(())
    }
}

pub(crate) fn faces_of(kind: ComplexKind, vertices: &[usize], dim: usize) -> Vec<Vec<usize>> {
    if dim == 0 {
        return Vec::new();
    }
    match kind {
        ComplexKind::Simplicial => (0..vertices.len())
            .map(|skip| {
                vertices
                    .iter()
                    .enumerate()
                    .filter(|&(i, _)| i != skip)
                    .map(|(_, &v)| v)
                    .collect()
            })
            .collect(),
        ComplexKind::Cubical { width } => {
            if dim == 1 {
                return vertices.iter().map(|&v| vec![v]).collect();
            }
            // 2-cube with corners a=(r,c), b=(r,c+1), c=(r+1,c), d=(r+1,c+1)
            let (a, b, c, d) = (vertices[0], vertices[1], vertices[2], vertices[3]);
            debug_assert!(b == a + 1 && c == a + width && d == c + 1);
            vec![vec![a, b], vec![c, d], vec![a, c], vec![b, d]]
        }
    }
}
