//! Experiment configuration, read from TOML.

use std::path::{Path, PathBuf};

use perskern::filtration::{JaccardOrientation, VertexBirth};
use perskern::kernels::KernelKind;
use serde::{Deserialize, Serialize};

use crate::error::{BenchError, Result};

pub const PAPER_C_GRID: [f64; 6] = [0.001, 0.01, 0.1, 1.0, 10.0, 100.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    /// Directory for diagrams, cached Gram matrices and result tables.
    #[serde(default = "default_output")]
    pub output: PathBuf,
    pub dataset: DatasetConfig,
    pub filtration: FiltrationConfig,
    #[serde(default)]
    pub diagrams: DiagramConfig,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub kernels: KernelGrids,
    #[serde(default)]
    pub sweep: Option<SweepConfig>,
}

fn default_output() -> PathBuf {
    PathBuf::from("out")
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum DatasetConfig {
    /// Linked twisted map orbits, one class per `r`.
    Orbits {
        r_values: Vec<f64>,
        n_orbits: usize,
        n_points: usize,
        seed: u64,
    },
    /// Manifest CSV of `path,label` rows; each file holds one point per row.
    PointClouds { manifest: PathBuf },
    /// Manifest CSV of `path,label` rows pointing at edge-list files.
    Graphs { manifest: PathBuf },
    /// Manifest CSV of `path,label` rows pointing at intensity grids.
    Images { manifest: PathBuf },
    /// One labelled series per line, label first.
    TimeSeries { path: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GraphWeights {
    /// Weights as given in the edge list.
    #[default]
    Given,
    /// Hop distance on each connected component.
    ShortestPath,
    /// `1 − J(N(u), N(v))` on the edges.
    Jaccard,
    /// `J(N(u), N(v))` on the edges.
    JaccardSimilarity,
}

impl GraphWeights {
    pub fn jaccard_orientation(self) -> Option<JaccardOrientation> {
        match self {
            GraphWeights::Jaccard => Some(JaccardOrientation::Dissimilarity),
            GraphWeights::JaccardSimilarity => Some(JaccardOrientation::Similarity),
            _ => None,
        }
    }
}

fn one() -> usize {
    1
}

fn infinite() -> f64 {
    f64::INFINITY
}

fn four_directions() -> Vec<[f64; 2]> {
    vec![[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum FiltrationConfig {
    Rips {
        #[serde(default = "one")]
        max_dim: usize,
        #[serde(default = "infinite")]
        max_scale: f64,
    },
    Graph {
        #[serde(default)]
        weights: GraphWeights,
        #[serde(default)]
        include_triangles: bool,
        #[serde(default)]
        vertex_birth: VertexBirth,
    },
    Cubical {
        threshold: f64,
        #[serde(default = "four_directions")]
        directions: Vec<[f64; 2]>,
        /// Background height; defaults to `2·(rows + cols)`.
        #[serde(default)]
        h_inf: Option<f64>,
    },
    Takens {
        delay: usize,
        dimension: usize,
        #[serde(default = "one")]
        max_dim: usize,
        #[serde(default = "infinite")]
        max_scale: f64,
    },
}

/// What to do with points of infinite persistence.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CapRule {
    Value(f64),
    Named(NamedCap),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NamedCap {
    /// Remove essential points.
    Drop,
    /// Cap at the diagram's largest finite coordinate; 1 above the largest
    /// birth when every point is essential.
    MaxFinite,
}

impl Default for CapRule {
    fn default() -> Self {
        CapRule::Named(NamedCap::MaxFinite)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagramConfig {
    /// Homology dimensions kept.
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default)]
    pub cap: CapRule,
    /// Keep only the `k` most persistent points.
    #[serde(default)]
    pub top_k: Option<usize>,
}

fn default_dims() -> Vec<usize> {
    vec![0, 1]
}

impl Default for DiagramConfig {
    fn default() -> Self {
        Self {
            dims: default_dims(),
            cap: CapRule::default(),
            top_k: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MetricSetting {
    /// Balanced accuracy when the imbalance ratio exceeds 1.5.
    #[default]
    Auto,
    Accuracy,
    Balanced,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default = "default_runs")]
    pub runs: usize,
    #[serde(default = "default_test_fraction")]
    pub test_fraction: f64,
    #[serde(default = "default_folds")]
    pub folds: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub metric: MetricSetting,
    #[serde(default = "default_c_grid")]
    pub c_grid: Vec<f64>,
    #[serde(default = "default_tol")]
    pub tol: f64,
}

fn default_runs() -> usize {
    10
}
fn default_test_fraction() -> f64 {
    0.3
}
fn default_folds() -> usize {
    10
}
fn default_c_grid() -> Vec<f64> {
    PAPER_C_GRID.to_vec()
}
fn default_tol() -> f64 {
    perskern::svm::DEFAULT_TOL
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        Self {
            runs: default_runs(),
            test_fraction: default_test_fraction(),
            folds: default_folds(),
            seed: 0,
            metric: MetricSetting::Auto,
            c_grid: default_c_grid(),
            tol: default_tol(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PsskGrid {
    pub sigma: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PwgkGrid {
    pub tau: Vec<f64>,
    pub rho: Vec<f64>,
    pub p: Vec<f64>,
    pub c_w: Vec<f64>,
}

fn default_directions() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SwkGrid {
    pub eta: Vec<f64>,
    #[serde(default = "default_directions")]
    pub directions: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PfkGrid {
    pub sigma: Vec<f64>,
    pub t: Vec<f64>,
}

fn default_pixel_size() -> f64 {
    0.1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PiGrid {
    pub sigma: Vec<f64>,
    #[serde(default = "default_pixel_size")]
    pub pixel_size: f64,
}

/// Kernels to benchmark; a missing section skips that kernel.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct KernelGrids {
    pub pssk: Option<PsskGrid>,
    pub pwgk: Option<PwgkGrid>,
    pub swk: Option<SwkGrid>,
    pub pfk: Option<PfkGrid>,
    pub pi: Option<PiGrid>,
}

impl KernelGrids {
    /// Grids used for the dynamical-systems benchmark.
    pub fn paper() -> Self {
        Self {
            pssk: Some(PsskGrid {
                sigma: vec![1e-5, 1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0],
            }),
            pwgk: Some(PwgkGrid {
                tau: vec![0.001, 0.01, 0.1, 1.0, 10.0, 100.0],
                rho: vec![0.001, 0.01, 0.1, 1.0, 10.0, 100.0, 1000.0],
                p: vec![1.0, 5.0, 10.0, 50.0, 100.0],
                c_w: vec![0.001, 0.01, 0.1, 1.0],
            }),
            swk: Some(SwkGrid {
                eta: vec![1e-5, 1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0],
                directions: default_directions(),
            }),
            pfk: Some(PfkGrid {
                sigma: vec![0.001, 0.01, 0.1, 1.0, 10.0],
                t: vec![0.1, 1.0, 10.0, 100.0, 1000.0],
            }),
            pi: Some(PiGrid {
                sigma: vec![1e-6, 1e-5, 1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0],
                pixel_size: default_pixel_size(),
            }),
        }
    }

    pub fn kinds(&self) -> Vec<KernelKind> {
        let mut k = Vec::new();
        if self.pssk.is_some() {
            k.push(KernelKind::ScaleSpace);
        }
        if self.pwgk.is_some() {
            k.push(KernelKind::WeightedGaussian);
        }
        if self.swk.is_some() {
            k.push(KernelKind::SlicedWasserstein);
        }
        if self.pfk.is_some() {
            k.push(KernelKind::Fisher);
        }
        if self.pi.is_some() {
            k.push(KernelKind::Image);
        }
        k
    }
}

/// One-parameter conditioning sweep. Other parameters of the kernel take
/// the first value of its grid in `[kernels]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub kernel: KernelKind,
    /// `sigma` for PSSK/PFK/PI, `eta` for SWK, `tau` for PWGK.
    pub values: Vec<f64>,
    #[serde(default)]
    pub jitter: f64,
}

pub const PSSK_SWEEP: [f64; 11] = [
    1e-5, 1e-4, 1e-3, 0.01, 0.1, 1.0, 10.0, 100.0, 500.0, 800.0, 1000.0,
];

fn positive_list(name: &str, v: &[f64]) -> Result<()> {
    if v.is_empty() {
        return Err(BenchError::Config(format!("{name}: grid is empty")));
    }
    if let Some(bad) = v.iter().find(|x| !(x.is_finite() && **x > 0.0)) {
        return Err(BenchError::Config(format!(
            "{name}: {bad} is not a positive number"
        )));
    }
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| BenchError::Config(e.to_string()))?;
        Ok(cfg)
    }

    /// Reads and validates a config file. Relative dataset and output paths
    /// are taken relative to the config file's directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| BenchError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        let rebase = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        match &mut cfg.dataset {
            DatasetConfig::PointClouds { manifest }
            | DatasetConfig::Graphs { manifest }
            | DatasetConfig::Images { manifest } => rebase(manifest),
            DatasetConfig::TimeSeries { path } => rebase(path),
            DatasetConfig::Orbits { .. } => {}
        }
        rebase(&mut cfg.output);
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string_pretty(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<()> {
        match &self.dataset {
            DatasetConfig::Orbits {
                r_values,
                n_orbits,
                n_points,
                ..
            } => {
                if r_values.is_empty() || *n_orbits == 0 || *n_points == 0 {
                    return Err(BenchError::Config(
                        "orbits need r values, orbits and points".into(),
                    ));
                }
            }
            DatasetConfig::PointClouds { manifest }
            | DatasetConfig::Graphs { manifest }
            | DatasetConfig::Images { manifest } => exists(manifest)?,
            DatasetConfig::TimeSeries { path } => exists(path)?,
        }
        let compatible = matches!(
            (&self.dataset, &self.filtration),
            (
                DatasetConfig::Orbits { .. } | DatasetConfig::PointClouds { .. },
                FiltrationConfig::Rips { .. }
            ) | (DatasetConfig::Graphs { .. }, FiltrationConfig::Graph { .. })
                | (
                    DatasetConfig::Images { .. },
                    FiltrationConfig::Cubical { .. }
                )
                | (
                    DatasetConfig::TimeSeries { .. },
                    FiltrationConfig::Takens { .. }
                )
        );
        if !compatible {
            return Err(BenchError::Config(
                "filtration kind does not fit the dataset".into(),
            ));
        }
        if self.diagrams.dims.is_empty() {
            return Err(BenchError::Config("diagrams.dims is empty".into()));
        }
        let p = &self.protocol;
        if p.runs == 0 {
            return Err(BenchError::Config("protocol.runs must be >= 1".into()));
        }
        if !(p.test_fraction > 0.0 && p.test_fraction < 1.0) {
            return Err(BenchError::Config(
                "protocol.test_fraction must lie in (0, 1)".into(),
            ));
        }
        if p.folds < 2 {
            return Err(BenchError::Config("protocol.folds must be >= 2".into()));
        }
        positive_list("protocol.c_grid", &p.c_grid)?;
        let k = &self.kernels;
        if let Some(g) = &k.pssk {
            positive_list("kernels.pssk.sigma", &g.sigma)?;
        }
        if let Some(g) = &k.pwgk {
            positive_list("kernels.pwgk.tau", &g.tau)?;
            positive_list("kernels.pwgk.rho", &g.rho)?;
            positive_list("kernels.pwgk.p", &g.p)?;
            positive_list("kernels.pwgk.c_w", &g.c_w)?;
            if g.p.iter().any(|&p| p < 1.0) {
                return Err(BenchError::Config("kernels.pwgk.p must be >= 1".into()));
            }
        }
        if let Some(g) = &k.swk {
            positive_list("kernels.swk.eta", &g.eta)?;
            if g.directions == 0 {
                return Err(BenchError::Config(
                    "kernels.swk.directions must be >= 1".into(),
                ));
            }
        }
        if let Some(g) = &k.pfk {
            positive_list("kernels.pfk.sigma", &g.sigma)?;
            positive_list("kernels.pfk.t", &g.t)?;
        }
        if let Some(g) = &k.pi {
            positive_list("kernels.pi.sigma", &g.sigma)?;
            positive_list("kernels.pi.pixel_size", &[g.pixel_size])?;
        }
        if let Some(s) = &self.sweep {
            positive_list("sweep.values", &s.values)?;
            if !(s.jitter.is_finite() && s.jitter >= 0.0) {
                return Err(BenchError::Config("sweep.jitter must be >= 0".into()));
            }
            if !k.kinds().contains(&s.kernel) {
                return Err(BenchError::Config(format!(
                    "sweep kernel {} needs a [kernels] section",
                    s.kernel
                )));
            }
        }
        Ok(())
    }
}

fn exists(p: &Path) -> Result<()> {
    if p.exists() {
        Ok(())
    } else {
        Err(BenchError::Config(format!(
            "{} does not exist",
            p.display()
        )))
    }
}
