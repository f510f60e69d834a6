use std::fmt::Write as _;

use rayon::prelude::*;

use super::{
    fisher_distance_matrix, image_gram, pfk_from_distances, pwgk_from_inner, pwgk_inner_matrix,
    sw_distance_matrix, swk_from_distances, KernelSpec,
};
use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};

/// Dense square matrix of kernel values, row-major, with optional row
/// identifiers.
#[derive(Debug, Clone, PartialEq)]
pub struct GramMatrix {
    n: usize,
    data: Vec<f64>,
    ids: Vec<String>,
}

impl GramMatrix {
    /// Builds from row-major data. Identifiers default to `0..n`.
    pub fn new(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::LengthMismatch {
                expected: n * n,
                got: data.len(),
            });
        }
        Ok(Self {
            n,
            data,
            ids: default_ids(n),
        })
    }

    /// Row `i` of `rows` holds entries `j = i..n`; the lower triangle is
    /// mirrored.
    pub fn from_upper_rows(rows: Vec<Vec<f64>>) -> Self {
        let n = rows.len();
        let mut data = vec![0.0; n * n];
        for (i, row) in rows.into_iter().enumerate() {
            debug_assert_eq!(row.len(), n - i);
            for (k, v) in row.into_iter().enumerate() {
                let j = i + k;
                data[i * n + j] = v;
                data[j * n + i] = v;
            }
        }
        Self {
            n,
            data,
            ids: default_ids(n),
        }
    }

    /// Evaluates `f` on the upper triangle and mirrors it.
    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        Self::from_upper_rows((0..n).map(|i| (i..n).map(|j| f(i, j)).collect()).collect())
    }

    pub fn with_ids(mut self, ids: Vec<String>) -> Result<Self> {
        if ids.len() != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: ids.len(),
            });
        }
        self.ids = ids;
        Ok(self)
    }

    pub fn ids(&self) -> &[String] {
        &self.ids
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

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    /// Elementwise map, keeping identifiers.
    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            n: self.n,
            data: self.data.iter().map(|&v| f(v)).collect(),
            ids: self.ids.clone(),
        }
    }

    /// Elementwise sum of two matrices of the same size.
    pub fn add(&self, other: &GramMatrix) -> Result<Self> {
        if other.n != self.n {
            return Err(Error::LengthMismatch {
                expected: self.n,
                got: other.n,
            });
        }
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a + b)
            .collect();
        Ok(Self {
            n: self.n,
            data,
            ids: self.ids.clone(),
        })
    }

    /// Square submatrix on `idx` (rows and columns).
    pub fn submatrix(&self, idx: &[usize]) -> Self {
        let data = idx
            .iter()
            .flat_map(|&i| idx.iter().map(move |&j| self.get(i, j)))
            .collect();
        let ids = idx.iter().map(|&i| self.ids[i].clone()).collect();
        Self {
            n: idx.len(),
            data,
            ids,
        }
    }

    /// Rectangular block `rows × cols`, one vector per row.
    pub fn block(&self, rows: &[usize], cols: &[usize]) -> Vec<Vec<f64>> {
        rows.iter()
            .map(|&i| cols.iter().map(|&j| self.get(i, j)).collect())
            .collect()
    }

    /// Largest `|G_ij - G_ji|`, with its position.
    pub fn asymmetry(&self) -> (f64, usize, usize) {
        let mut worst = (0.0, 0, 0);
        for i in 0..self.n {
            for j in i + 1..self.n {
                let gap = (self.get(i, j) - self.get(j, i)).abs();
                if gap > worst.0 || gap.is_nan() {
                    worst = (gap, i, j);
                }
            }
        }
        worst
    }

    pub fn check_symmetric(&self, tol: f64) -> Result<()> {
        let (gap, i, j) = self.asymmetry();
        if gap > tol || gap.is_nan() {
            return Err(Error::NotSymmetric { i, j, gap });
        }
        Ok(())
    }

    pub fn check_finite(&self) -> Result<()> {
        if self.data.iter().all(|v| v.is_finite()) {
            Ok(())
        } else {
            Err(Error::NonFinite("Gram matrix entry"))
        }
    }

    /// CSV with a header row of identifiers and one identifier-led row per
    /// diagram.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("id");
        for id in &self.ids {
            out.push(',');
            out.push_str(id);
        }
        out.push('\n');
        for i in 0..self.n {
            out.push_str(&self.ids[i]);
            for v in self.row(i) {
                let _ = write!(out, ",{v:?}");
            }
            out.push('\n');
        }
        out
    }

    pub fn from_csv(text: &str) -> Result<Self> {
        let mut lines = text
            .lines()
            .enumerate()
            .filter(|(_, l)| !l.trim().is_empty());
        let (_, header) = lines.next().ok_or(Error::Empty("Gram CSV"))?;
        let ids: Vec<String> = header
            .split(',')
            .skip(1)
            .map(|s| s.trim().to_string())
            .collect();
        let n = ids.len();
        let mut data = Vec::with_capacity(n * n);
        let mut row_count = 0;
        for (lineno, line) in lines {
            let mut fields = line.split(',');
            let id = fields.next().unwrap_or("").trim();
            if row_count >= n || id != ids[row_count] {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("unexpected row identifier {id:?}"),
                });
            }
            let before = data.len();
            for f in fields {
                let v: f64 = f.trim().parse().map_err(|_| Error::Parse {
                    line: lineno + 1,
                    message: format!("bad number {f:?}"),
                })?;
                data.push(v);
            }
            if data.len() - before != n {
                return Err(Error::Parse {
                    line: lineno + 1,
                    message: format!("expected {n} values, got {}", data.len() - before),
                });
            }
            row_count += 1;
        }
        if row_count != n {
            return Err(Error::LengthMismatch {
                expected: n,
                got: row_count,
            });
        }
        Self::new(n, data)?.with_ids(ids)
    }
}

fn default_ids(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn generic(diagrams: &[PersistenceDiagram], spec: &KernelSpec) -> Result<GramMatrix> {
    let n = diagrams.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    spec.evaluate(&diagrams[i], &diagrams[j])
                        .map_err(|e| Error::GramEntry {
                            i,
                            j,
                            source: Box::new(e),
                        })
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(GramMatrix::from_upper_rows(rows))
}

/// Gram matrix of `spec` over finite diagrams, treating each diagram as the
/// multiset of all its points. Identifiers come from the diagrams' source
/// ids when every diagram has one.
pub fn gram(diagrams: &[PersistenceDiagram], spec: &KernelSpec) -> Result<GramMatrix> {
    spec.validate()?;
    for (i, d) in diagrams.iter().enumerate() {
        d.require_finite().map_err(|e| Error::GramEntry {
            i,
            j: i,
            source: Box::new(e),
        })?;
    }
    let g = match spec {
        KernelSpec::ScaleSpace { .. } => generic(diagrams, spec)?,
        KernelSpec::WeightedGaussian { rho, tau, p, c_w } => {
            pwgk_from_inner(&pwgk_inner_matrix(diagrams, *rho, *c_w, *p)?, *tau)?
        }
        KernelSpec::SlicedWasserstein { eta, directions } => {
            swk_from_distances(&sw_distance_matrix(diagrams, *directions)?, *eta)?
        }
        KernelSpec::Fisher { sigma, t } => {
            pfk_from_distances(&fisher_distance_matrix(diagrams, *sigma)?, *t)?
        }
        KernelSpec::Image(pi) => image_gram(diagrams, pi)?,
    };
    g.check_finite()?;
    if diagrams.iter().all(|d| !d.source_id().is_empty()) {
        return g.with_ids(diagrams.iter().map(|d| d.source_id().to_string()).collect());
    }
    Ok(g)
}

/// Sum over `dims` of the Gram matrices of the dimension-filtered diagrams.
pub fn gram_per_dimension(
    diagrams: &[PersistenceDiagram],
    spec: &KernelSpec,
    dims: &[usize],
) -> Result<GramMatrix> {
    let mut total: Option<GramMatrix> = None;
    for &k in dims {
        let filtered: Vec<PersistenceDiagram> =
            diagrams.iter().map(|d| d.filter_dimension(k)).collect();
        let g = gram(&filtered, spec)?;
        total = Some(match total {
            None => g,
            Some(t) => t.add(&g)?,
        });
    }
    total.ok_or(Error::Empty("dimension list"))
}
