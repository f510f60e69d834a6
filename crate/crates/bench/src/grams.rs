//! Kernel candidates for a grid and the Gram matrices behind them.
//!
//! Kernels with a parameter-free core (SW and Fisher distances, PWGK
//! embedding inner products) store that core once and map the remaining
//! parameter over it. Every base matrix is kept in memory and, with a cache
//! directory, as `<key>.bin` (entry count as `u64`, then row-major `f64`,
//! little-endian).

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};

use perskern::kernels::{
    fisher_distance_matrix, gram, pfk_from_distances, pwgk_from_inner, pwgk_inner_matrix,
    sw_distance_matrix, swk_from_distances, KernelKind, PersistenceImageSpec,
};
use perskern::{GramMatrix, KernelSpec, PersistenceDiagram};

use crate::config::KernelGrids;
use crate::error::{BenchError, Result};

/// Every parameter tuple of `kind` in `grids`. PI grids are fitted on the
/// `train` diagrams.
pub fn candidates(
    kind: KernelKind,
    grids: &KernelGrids,
    diagrams: &[PersistenceDiagram],
    train: &[usize],
) -> Result<Vec<KernelSpec>> {
    let missing = || BenchError::Config(format!("no [kernels] grid for {kind}"));
    let specs = match kind {
        KernelKind::ScaleSpace => {
            let g = grids.pssk.as_ref().ok_or_else(missing)?;
            g.sigma
                .iter()
                .map(|&sigma| KernelSpec::ScaleSpace { sigma })
                .collect()
        }
        KernelKind::WeightedGaussian => {
            let g = grids.pwgk.as_ref().ok_or_else(missing)?;
            let mut out = Vec::new();
            for &rho in &g.rho {
                for &c_w in &g.c_w {
                    for &p in &g.p {
                        for &tau in &g.tau {
                            out.push(KernelSpec::WeightedGaussian { rho, tau, p, c_w });
                        }
                    }
                }
            }
            out
        }
        KernelKind::SlicedWasserstein => {
            let g = grids.swk.as_ref().ok_or_else(missing)?;
            g.eta
                .iter()
                .map(|&eta| KernelSpec::SlicedWasserstein {
                    eta,
                    directions: g.directions,
                })
                .collect()
        }
        KernelKind::Fisher => {
            let g = grids.pfk.as_ref().ok_or_else(missing)?;
            g.sigma
                .iter()
                .flat_map(|&sigma| g.t.iter().map(move |&t| KernelSpec::Fisher { sigma, t }))
                .collect()
        }
        KernelKind::Image => {
            let g = grids.pi.as_ref().ok_or_else(missing)?;
            let train: Vec<PersistenceDiagram> =
                train.iter().map(|&i| diagrams[i].clone()).collect();
            g.sigma
                .iter()
                .map(|&sigma| {
                    Ok(KernelSpec::Image(PersistenceImageSpec::fit(
                        &train,
                        sigma,
                        g.pixel_size,
                    )?))
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(specs)
}

/// Short `name=value` listing of a spec's parameters.
pub fn describe(spec: &KernelSpec) -> String {
    match spec {
        KernelSpec::ScaleSpace { sigma } => format!("sigma={sigma}"),
        KernelSpec::WeightedGaussian { rho, tau, p, c_w } => {
            format!("rho={rho} tau={tau} p={p} c_w={c_w}")
        }
        KernelSpec::SlicedWasserstein { eta, directions } => format!("eta={eta} M={directions}"),
        KernelSpec::Fisher { sigma, t } => format!("sigma={sigma} t={t}"),
        KernelSpec::Image(s) => format!("sigma={} pixel={}", s.sigma, s.grid.pixel_size),
    }
}

fn base_key(spec: &KernelSpec) -> String {
    match spec {
        KernelSpec::ScaleSpace { sigma } => format!("pssk_sigma{sigma:e}"),
        KernelSpec::WeightedGaussian { rho, p, c_w, .. } => {
            format!("pwgk-inner_rho{rho:e}_cw{c_w:e}_p{p:e}")
        }
        KernelSpec::SlicedWasserstein { directions, .. } => format!("sw-dist_m{directions}"),
        KernelSpec::Fisher { sigma, .. } => format!("fisher-dist_sigma{sigma:e}"),
        KernelSpec::Image(s) => {
            let g = &s.grid;
            format!(
                "pi_sigma{:e}_w{:e}_x{:e}_y{:e}_px{:e}_{}x{}",
                s.sigma, s.weight_cutoff, g.x_min, g.y_min, g.pixel_size, g.cols, g.rows
            )
        }
    }
}

/// Memoized base matrices over a fixed list of diagrams.
pub struct GramStore<'a> {
    diagrams: &'a [PersistenceDiagram],
    dir: Option<PathBuf>,
    mem: Mutex<HashMap<String, Arc<GramMatrix>>>,
}

impl<'a> GramStore<'a> {
    /// `dir` is wiped when its `fingerprint.json` differs from `fingerprint`.
    pub fn new(diagrams: &'a [PersistenceDiagram], dir: Option<(&Path, &str)>) -> Result<Self> {
        if let Some((dir, fp)) = dir {
            prepare_dir(dir, fp)?;
        }
        Ok(Self {
            diagrams,
            dir: dir.map(|(d, _)| d.to_path_buf()),
            mem: Mutex::new(HashMap::new()),
        })
    }

    pub fn diagrams(&self) -> &[PersistenceDiagram] {
        self.diagrams
    }

    fn base(&self, spec: &KernelSpec) -> Result<Arc<GramMatrix>> {
        let key = base_key(spec);
        if let Some(g) = self.mem.lock().expect("store lock").get(&key) {
            return Ok(g.clone());
        }
        let path = self.dir.as_ref().map(|d| d.join(format!("{key}.bin")));
        let cached = match &path {
            Some(p) if p.exists() => Some(read_matrix(p)?),
            _ => None,
        };
        let g = match cached {
            Some(g) if g.len() == self.diagrams.len() => g,
            _ => {
                let g = self.compute_base(spec)?;
                if let Some(p) = &path {
                    write_matrix(p, &g)?;
                }
                g
            }
        };
        let g = Arc::new(g);
        self.mem.lock().expect("store lock").insert(key, g.clone());
        Ok(g)
    }

    fn compute_base(&self, spec: &KernelSpec) -> Result<GramMatrix> {
        let d = self.diagrams;
        Ok(match spec {
            KernelSpec::ScaleSpace { .. } | KernelSpec::Image(_) => gram(d, spec)?,
            KernelSpec::WeightedGaussian { rho, p, c_w, .. } => {
                pwgk_inner_matrix(d, *rho, *c_w, *p)?
            }
            KernelSpec::SlicedWasserstein { directions, .. } => sw_distance_matrix(d, *directions)?,
            KernelSpec::Fisher { sigma, .. } => fisher_distance_matrix(d, *sigma)?,
        })
    }

    /// Loads or computes every base matrix the specs need.
    pub fn prepare(&self, specs: &[KernelSpec]) -> Result<()> {
        for s in specs {
            s.validate()?;
            self.base(s)?;
        }
        Ok(())
    }

    /// Gram matrix of `spec` over all diagrams; its base must be prepared.
    pub fn gram(&self, spec: &KernelSpec) -> perskern::Result<GramMatrix> {
        let base = {
            let mem = self.mem.lock().expect("store lock");
            mem.get(&base_key(spec))
                .cloned()
                .expect("base matrix prepared")
        };
        let g = match spec {
            KernelSpec::ScaleSpace { .. } | KernelSpec::Image(_) => (*base).clone(),
            KernelSpec::WeightedGaussian { tau, .. } => pwgk_from_inner(&base, *tau)?,
            KernelSpec::SlicedWasserstein { eta, .. } => swk_from_distances(&base, *eta)?,
            KernelSpec::Fisher { t, .. } => pfk_from_distances(&base, *t)?,
        };
        g.check_finite()?;
        Ok(g)
    }

    /// Drops in-memory copies (disk copies stay).
    pub fn release(&self) {
        self.mem.lock().expect("store lock").clear();
    }
}

pub(crate) fn prepare_dir(dir: &Path, fingerprint: &str) -> Result<()> {
    let fp_path = dir.join("fingerprint.json");
    let stored = std::fs::read_to_string(&fp_path).ok();
    if stored.as_deref() != Some(fingerprint) {
        if dir.exists() {
            std::fs::remove_dir_all(dir).map_err(BenchError::io(dir))?;
        }
        std::fs::create_dir_all(dir).map_err(BenchError::io(dir))?;
        std::fs::write(&fp_path, fingerprint).map_err(BenchError::io(&fp_path))?;
    }
    Ok(())
}

fn write_matrix(path: &Path, g: &GramMatrix) -> Result<()> {
    let mut bytes = Vec::with_capacity(8 + 8 * g.as_slice().len());
    bytes.extend_from_slice(&(g.len() as u64).to_le_bytes());
    for v in g.as_slice() {
        bytes.extend_from_slice(&v.to_le_bytes());
    }
    // write then rename, so an interrupted run never leaves a torn file
    let tmp = path.with_extension("tmp");
    std::fs::write(&tmp, bytes).map_err(BenchError::io(&tmp))?;
    std::fs::rename(&tmp, path).map_err(BenchError::io(path))
}

fn read_matrix(path: &Path) -> Result<GramMatrix> {
    let bytes = std::fs::read(path).map_err(BenchError::io(path))?;
    let bad = || BenchError::Data(format!("{}: corrupt matrix file", path.display()));
    let (head, body) = bytes.split_first_chunk::<8>().ok_or_else(bad)?;
    let n = u64::from_le_bytes(*head) as usize;
    if body.len() != 8 * n * n {
        return Err(bad());
    }
    let data = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().expect("8 bytes")))
        .collect();
    Ok(GramMatrix::new(n, data)?)
}
