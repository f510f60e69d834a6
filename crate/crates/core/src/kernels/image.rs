//! Persistence images.
//!
//! Points move to birth–persistence coordinates `(b, d - b)`, each carries
//! the ramp weight `w_b(d - b)`, and the surface is a sum of isotropic
//! Gaussians. Pixel values are exact integrals of the surface over the
//! pixel: a product of two differences of the normal CDF. Rows run over
//! persistence, columns over birth, flattened row-major.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{positive, GramMatrix};
use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};

/// Pixel grid over birth (`x`) and persistence (`y`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ImageGrid {
    pub x_min: f64,
    pub y_min: f64,
    pub pixel_size: f64,
    pub cols: usize,
    pub rows: usize,
}

impl ImageGrid {
    /// Smallest grid of `pixel_size` pixels anchored at `(x_min, y_min)`
    /// that covers `[x_min, x_max] × [y_min, y_max]`.
    pub fn covering(
        x_min: f64,
        x_max: f64,
        y_min: f64,
        y_max: f64,
        pixel_size: f64,
    ) -> Result<Self> {
        positive("pixel_size", pixel_size)?;
        if !(x_min.is_finite() && x_max.is_finite() && y_min.is_finite() && y_max.is_finite()) {
            return Err(Error::InvalidParameter("grid bounds must be finite".into()));
        }
        let count = |lo: f64, hi: f64| (((hi - lo) / pixel_size).ceil() as usize).max(1);
        Ok(Self {
            x_min,
            y_min,
            pixel_size,
            cols: count(x_min, x_max),
            rows: count(y_min, y_max),
        })
    }

    pub fn x_max(&self) -> f64 {
        self.x_min + self.cols as f64 * self.pixel_size
    }

    pub fn y_max(&self) -> f64 {
        self.y_min + self.rows as f64 * self.pixel_size
    }

    pub fn len(&self) -> usize {
        self.rows * self.cols
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn validate(&self) -> Result<()> {
        positive("pixel_size", self.pixel_size)?;
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidParameter(
                "grid needs at least one pixel".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistenceImageSpec {
    /// Gaussian standard deviation.
    pub sigma: f64,
    /// Persistence at which the weight ramp reaches 1.
    pub weight_cutoff: f64,
    pub grid: ImageGrid,
}

impl PersistenceImageSpec {
    /// Freezes grid bounds and weight cutoff from training diagrams: the
    /// bounding box of the transformed points grown by `3σ`, and the largest
    /// training persistence as cutoff.
    pub fn fit(train: &[PersistenceDiagram], sigma: f64, pixel_size: f64) -> Result<Self> {
        positive("sigma", sigma)?;
        positive("pixel_size", pixel_size)?;
        let mut bounds: Option<(f64, f64, f64, f64)> = None;
        let mut max_pers: f64 = 0.0;
        for d in train {
            d.require_finite()?;
            for p in d {
                let (x, y) = (p.birth, p.death - p.birth);
                max_pers = max_pers.max(y);
                bounds = Some(match bounds {
                    None => (x, x, y, y),
                    Some((a, b, c, e)) => (a.min(x), b.max(x), c.min(y), e.max(y)),
                });
            }
        }
        let (x0, x1, y0, y1) = bounds.unwrap_or((0.0, 0.0, 0.0, 0.0));
        let pad = 3.0 * sigma;
        let grid = ImageGrid::covering(x0 - pad, x1 + pad, y0 - pad, y1 + pad, pixel_size)?;
        let weight_cutoff = if max_pers > 0.0 { max_pers } else { 1.0 };
        Ok(Self {
            sigma,
            weight_cutoff,
            grid,
        })
    }

    pub fn validate(&self) -> Result<()> {
        positive("sigma", self.sigma)?;
        positive("weight_cutoff", self.weight_cutoff)?;
        self.grid.validate()
    }
}

/// Piecewise-linear weight: 0 for `t <= 0`, `t / b` on `(0, b)`, 1 beyond.
pub fn weight_ramp(t: f64, b: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t < b {
        t / b
    } else {
        1.0
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceImageVector {
    pub values: Vec<f64>,
    pub grid: ImageGrid,
    /// Some transformed point fell outside the grid.
    pub clipped: bool,
}

impl PersistenceImageVector {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.grid.cols + col]
    }

    pub fn sum(&self) -> f64 {
        self.values.iter().sum()
    }
}

/// `P(lo <= X < hi)` for `X ~ N(0, 1)`, using the upper tail when both
/// bounds are positive to avoid cancellation.
fn normal_mass(lo: f64, hi: f64) -> f64 {
    let sqrt2 = std::f64::consts::SQRT_2;
    if lo >= 0.0 {
        0.5 * (libm::erfc(lo / sqrt2) - libm::erfc(hi / sqrt2))
    } else if hi <= 0.0 {
        0.5 * (libm::erfc(-hi / sqrt2) - libm::erfc(-lo / sqrt2))
    } else {
        0.5 * (libm::erf(hi / sqrt2) - libm::erf(lo / sqrt2))
    }
}

/// Mass of `N(centre, σ²)` in each of `count` consecutive bins of width
/// `size` starting at `start`.
fn axis_profile(centre: f64, sigma: f64, start: f64, size: f64, count: usize) -> Vec<f64> {
    (0..count)
        .map(|k| {
            let lo = start + k as f64 * size;
            let hi = start + (k + 1) as f64 * size;
            normal_mass((lo - centre) / sigma, (hi - centre) / sigma)
        })
        .collect()
}

/// Per-point separable factors: `(weight, birth-axis mass, persistence-axis mass)`.
struct Profiles {
    points: Vec<(f64, Vec<f64>, Vec<f64>)>,
    clipped: bool,
}

fn profiles(d: &PersistenceDiagram, spec: &PersistenceImageSpec) -> Result<Profiles> {
    d.require_finite()?;
    let g = &spec.grid;
    let mut clipped = false;
    let points = d
        .iter()
        .map(|p| {
            let (x, y) = (p.birth, p.death - p.birth);
            if x < g.x_min || x > g.x_max() || y < g.y_min || y > g.y_max() {
                clipped = true;
            }
            let w = weight_ramp(y, spec.weight_cutoff);
            let px = axis_profile(x, spec.sigma, g.x_min, g.pixel_size, g.cols);
            let py = axis_profile(y, spec.sigma, g.y_min, g.pixel_size, g.rows);
            (w, px, py)
        })
        .collect();
    Ok(Profiles { points, clipped })
}

pub fn persistence_image(
    d: &PersistenceDiagram,
    spec: &PersistenceImageSpec,
) -> Result<PersistenceImageVector> {
    spec.validate()?;
    let g = spec.grid;
    let prof = profiles(d, spec)?;
    let mut values = vec![0.0; g.len()];
    for (w, px, py) in &prof.points {
        if *w == 0.0 {
            continue;
        }
        for (r, &fy) in py.iter().enumerate() {
            let scale = w * fy;
            let row = &mut values[r * g.cols..(r + 1) * g.cols];
            row.iter_mut().zip(px).for_each(|(v, &fx)| *v += scale * fx);
        }
    }
    Ok(PersistenceImageVector {
        values,
        grid: g,
        clipped: prof.clipped,
    })
}

/// `<PI(D), PI(E)>` on a shared grid.
pub fn k_pi(
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    spec: &PersistenceImageSpec,
) -> Result<f64> {
    let a = persistence_image(d, spec)?;
    let b = persistence_image(e, spec)?;
    if a.grid != b.grid {
        return Err(Error::InvalidParameter(
            "persistence images use different grids".into(),
        ));
    }
    Ok(a.values.iter().zip(&b.values).map(|(x, y)| x * y).sum())
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Gram matrix of persistence-image inner products without materializing
/// the images: each pixel integral factors over the two axes, so
/// `<PI(D), PI(E)> = Σ_{u,v} w_u w_v (x_u · x_v)(y_u · y_v)`.
pub fn image_gram(
    diagrams: &[PersistenceDiagram],
    spec: &PersistenceImageSpec,
) -> Result<GramMatrix> {
    spec.validate()?;
    let profs = diagrams
        .iter()
        .enumerate()
        .map(|(i, d)| {
            profiles(d, spec).map_err(|e| Error::GramEntry {
                i,
                j: i,
                source: Box::new(e),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let n = diagrams.len();
    let rows = (0..n)
        .into_par_iter()
        .map(|i| {
            (i..n)
                .map(|j| {
                    profs[i]
                        .points
                        .iter()
                        .map(|(wu, xu, yu)| {
                            profs[j]
                                .points
                                .iter()
                                .map(|(wv, xv, yv)| {
                                    if *wu == 0.0 || *wv == 0.0 {
                                        0.0
                                    } else {
                                        wu * wv * dot(xu, xv) * dot(yu, yv)
                                    }
                                })
                                .sum::<f64>()
                        })
                        .sum()
                })
                .collect()
        })
        .collect();
    Ok(GramMatrix::from_upper_rows(rows))
}
