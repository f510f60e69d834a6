//! Persistence diagrams by boundary-matrix reduction over GF(2).
//!
//! The general route is [`order_cells`] → [`BoundaryMatrix::from_ordered`]
//! → [`reduce`] → [`extract_diagram`], wrapped by [`compute_persistence`].
//! Vietoris–Rips clouds have a dedicated route, [`rips_persistence`], that
//! never materializes the triangles.

mod oracle;
mod rips;

use std::cmp::Ordering;
use std::collections::HashMap;

use crate::diagram::{DiagramPoint, PersistenceDiagram};
use crate::error::{Error, Result};
use crate::filtration::{Cell, FilteredComplex};

pub use oracle::{betti_oracle, betti_oracle_with_limit, DEFAULT_ORACLE_LIMIT};
pub use rips::{enclosing_radius, rips_persistence, rips_persistence_with, DistanceMatrix};

/// Cells in filtration order: `(value, dim, vertex tuple)`.
#[derive(Debug, Clone)]
pub struct OrderedComplex {
    cells: Vec<Cell>,
    index: HashMap<Vec<usize>, usize>,
    faces: Vec<Vec<usize>>,
}

impl OrderedComplex {
    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn position(&self, vertices: &[usize]) -> Option<usize> {
        self.index.get(vertices).copied()
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }
}

pub(crate) fn filtration_cmp(a: &Cell, b: &Cell) -> Ordering {
    a.value
        .total_cmp(&b.value)
        .then(a.dim.cmp(&b.dim))
        .then_with(|| a.vertices.cmp(&b.vertices))
}

/// Sorts the cells into a total filtration order and resolves every face.
/// Fails on a missing face or a face entering after its coface.
pub fn order_cells(fc: &FilteredComplex) -> Result<OrderedComplex> {
    fc.check_monotone()?;
    let mut cells = fc.cells().to_vec();
    cells.sort_by(filtration_cmp);
    let index: HashMap<Vec<usize>, usize> = cells
        .iter()
        .enumerate()
        .map(|(i, c)| (c.vertices.clone(), i))
        .collect();
    let faces = cells
        .iter()
        .map(|c| {
            let mut col: Vec<usize> = fc.faces(c).iter().map(|f| index[f]).collect();
            col.sort_unstable();
            col
        })
        .collect();
    Ok(OrderedComplex {
        cells,
        index,
        faces,
    })
}

/// Sparse GF(2) boundary matrix; column `j` lists the positions of the
/// codimension-1 faces of cell `j`, ascending and all `< j`.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryMatrix {
    columns: Vec<Vec<usize>>,
    dims: Vec<usize>,
}

impl BoundaryMatrix {
    pub fn from_ordered(oc: &OrderedComplex) -> Self {
        Self {
            columns: oc.faces.clone(),
            dims: oc.cells.iter().map(|c| c.dim).collect(),
        }
    }

    /// Raw columns with their cell dimensions. Entries must be ascending
    /// and below the column index.
    pub fn new(columns: Vec<Vec<usize>>, dims: Vec<usize>) -> Result<Self> {
        if columns.len() != dims.len() {
            return Err(Error::LengthMismatch {
                expected: columns.len(),
                got: dims.len(),
            });
        }
        for (j, col) in columns.iter().enumerate() {
            if col.windows(2).any(|w| w[0] >= w[1]) || col.last().is_some_and(|&r| r >= j) {
                return Err(Error::InvalidInput(format!(
                    "column {j} is not a valid boundary"
                )));
            }
        }
        Ok(Self { columns, dims })
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn column(&self, j: usize) -> &[usize] {
        &self.columns[j]
    }

    pub fn dim(&self, j: usize) -> usize {
        self.dims[j]
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct PairingResult {
    /// `(birth position, death position)`, ordered by death position.
    pub pairs: Vec<(usize, usize)>,
    /// Unpaired positions, ascending.
    pub essentials: Vec<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Plain left-to-right column reduction.
    #[default]
    Standard,
    /// Reduce higher dimensions first and clear the columns of cells that
    /// are already known to be births (twist / clearing).
    Twist,
}

/// Symmetric difference of two ascending index lists.
pub(crate) fn xor_into(target: &mut Vec<usize>, other: &[usize], scratch: &mut Vec<usize>) {
    scratch.clear();
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            Ordering::Less => {
                scratch.push(target[i]);
                i += 1;
            }
            Ordering::Greater => {
                scratch.push(other[j]);
                j += 1;
            }
            Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    scratch.extend_from_slice(&target[i..]);
    scratch.extend_from_slice(&other[j..]);
    std::mem::swap(target, scratch);
}

/// Column reduction with pivot = lowest nonzero row.
pub fn reduce(bm: &BoundaryMatrix) -> PairingResult {
    reduce_with(bm, Strategy::Standard)
}

pub fn reduce_with(bm: &BoundaryMatrix, strategy: Strategy) -> PairingResult {
    let n = bm.len();
    let mut reduced: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut column_of_pivot: Vec<Option<usize>> = vec![None; n];
    let mut cleared = vec![false; n];
    let mut scratch = Vec::new();

    let order: Vec<usize> = match strategy {
        Strategy::Standard => (0..n).collect(),
        Strategy::Twist => {
            let max_dim = bm.dims.iter().copied().max().unwrap_or(0);
            (0..=max_dim)
                .rev()
                .flat_map(|d| (0..n).filter(move |&j| bm.dims[j] == d))
                .collect()
        }
    };

    for j in order {
        if cleared[j] {
            continue;
        }
        let mut col = bm.columns[j].clone();
        while let Some(&low) = col.last() {
            match column_of_pivot[low] {
                Some(k) => xor_into(&mut col, &reduced[k], &mut scratch),
                None => break,
            }
        }
        if let Some(&low) = col.last() {
            column_of_pivot[low] = Some(j);
            if strategy == Strategy::Twist {
                cleared[low] = true;
            }
        }
        reduced[j] = col;
    }

    let mut pairs = Vec::new();
    let mut is_paired = vec![false; n];
    for (j, col) in reduced.iter().enumerate() {
        if let Some(&low) = col.last() {
            pairs.push((low, j));
            is_paired[low] = true;
            is_paired[j] = true;
        }
    }
    let essentials = (0..n).filter(|&j| !is_paired[j]).collect();
    PairingResult { pairs, essentials }
}

/// Reads off `(dim, birth value, death value)` for every pair with positive
/// persistence, and an infinite-death point for each essential cell.
pub fn extract_diagram(oc: &OrderedComplex, pr: &PairingResult) -> PersistenceDiagram {
    let mut points = Vec::with_capacity(pr.pairs.len() + pr.essentials.len());
    for &(b, d) in &pr.pairs {
        let (birth, death) = (&oc.cells[b], &oc.cells[d]);
        if birth.value < death.value {
            points.push(DiagramPoint {
                dim: birth.dim,
                birth: birth.value,
                death: death.value,
            });
        }
    }
    for &e in &pr.essentials {
        let cell = &oc.cells[e];
        points.push(DiagramPoint {
            dim: cell.dim,
            birth: cell.value,
            death: f64::INFINITY,
        });
    }
    PersistenceDiagram::new(points).expect("filtration order guarantees birth <= death")
}

/// Full diagram of a filtered complex (all dimensions it contains).
pub fn compute_persistence(fc: &FilteredComplex) -> Result<PersistenceDiagram> {
    let oc = order_cells(fc)?;
    let bm = BoundaryMatrix::from_ordered(&oc);
    Ok(extract_diagram(&oc, &reduce_with(&bm, Strategy::Twist)))
}
