use super::{Cell, ComplexKind, FilteredComplex};
use crate::error::{Error, Result};

/// Row-major grid of intensities. Rows grow downward.
#[derive(Debug, Clone, PartialEq)]
pub struct GrayImage {
    rows: usize,
    cols: usize,
    values: Vec<f64>,
}

impl GrayImage {
    pub fn new(rows: usize, cols: usize, values: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidInput(
                "image needs positive rows and cols".into(),
            ));
        }
        if values.len() != rows * cols {
            return Err(Error::LengthMismatch {
                expected: rows * cols,
                got: values.len(),
            });
        }
        Ok(Self { rows, cols, values })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.cols + col]
    }
}

/// Foreground (1) iff intensity is strictly above `threshold`.
pub fn binarize(img: &GrayImage, threshold: f64) -> GrayImage {
    GrayImage {
        rows: img.rows,
        cols: img.cols,
        values: img
            .values
            .iter()
            .map(|&v| if v > threshold { 1.0 } else { 0.0 })
            .collect(),
    }
}

/// Background value strictly above every `<(row, col), v>` for the axis
/// directions.
pub fn default_h_inf(rows: usize, cols: usize) -> f64 {
    ((rows + cols) * 2) as f64
}

/// Height filtration of a binary image along the unit direction
/// `v = (row, col)`.
///
/// Foreground pixels at `(r, c)` take `r * v[0] + c * v[1]`, background
/// pixels take `h_inf`. Pixels are the 2-cubes; every edge and vertex takes
/// the minimum over the pixels that contain it, so each sub-level complex is
/// the closure of the pixels at or below that level.
pub fn height_filtration(binary: &GrayImage, v: [f64; 2], h_inf: f64) -> Result<FilteredComplex> {
    let norm = v[0].hypot(v[1]);
    if (norm - 1.0).abs() > 1e-9 {
        return Err(Error::InvalidInput(format!(
            "direction {v:?} is not a unit vector"
        )));
    }
    let (rows, cols) = (binary.rows, binary.cols);
    let max_height = ((rows - 1) as f64 * v[0]).max(0.0) + ((cols - 1) as f64 * v[1]).max(0.0);
    if h_inf.is_nan() || h_inf <= max_height {
        return Err(Error::InvalidInput(format!(
            "h_inf {h_inf} must exceed the largest attainable height {max_height}"
        )));
    }
    let pixel = |r: usize, c: usize| -> f64 {
        if binary.get(r, c) > 0.5 {
            r as f64 * v[0] + c as f64 * v[1]
        } else {
            h_inf
        }
    };
    let pixel_values: Vec<f64> = (0..rows)
        .flat_map(|r| (0..cols).map(move |c| (r, c)))
        .map(|(r, c)| pixel(r, c))
        .collect();
    let pv = |r: usize, c: usize| pixel_values[r * cols + c];

    let width = cols + 1;
    let vid = |r: usize, c: usize| r * width + c;
    let mut cells = Vec::with_capacity((rows + 1) * (cols + 1) + 2 * rows * cols + rows + cols);

    for r in 0..=rows {
        for c in 0..=cols {
            let mut value = f64::INFINITY;
            for (pr, pc) in [
                (r.wrapping_sub(1), c.wrapping_sub(1)),
                (r.wrapping_sub(1), c),
                (r, c.wrapping_sub(1)),
                (r, c),
            ] {
                if pr < rows && pc < cols {
                    value = value.min(pv(pr, pc));
                }
            }
            cells.push(Cell {
                vertices: vec![vid(r, c)],
                dim: 0,
                value,
            });
        }
    }
    // horizontal edges (r,c)-(r,c+1): pixels above and below
    for r in 0..=rows {
        for c in 0..cols {
            let mut value = f64::INFINITY;
            if r > 0 {
                value = value.min(pv(r - 1, c));
            }
            if r < rows {
                value = value.min(pv(r, c));
            }
            cells.push(Cell {
                vertices: vec![vid(r, c), vid(r, c + 1)],
                dim: 1,
                value,
            });
        }
    }
    // vertical edges (r,c)-(r+1,c): pixels left and right
    for r in 0..rows {
        for c in 0..=cols {
            let mut value = f64::INFINITY;
            if c > 0 {
                value = value.min(pv(r, c - 1));
            }
            if c < cols {
                value = value.min(pv(r, c));
            }
            cells.push(Cell {
                vertices: vec![vid(r, c), vid(r + 1, c)],
                dim: 1,
                value,
            });
        }
    }
    for r in 0..rows {
        for c in 0..cols {
            cells.push(Cell {
                vertices: vec![vid(r, c), vid(r, c + 1), vid(r + 1, c), vid(r + 1, c + 1)],
                dim: 2,
                value: pv(r, c),
            });
        }
    }
    FilteredComplex::new(cells, ComplexKind::Cubical { width })
}
