//! Sample → persistence diagram recipes, and the on-disk diagram cache.

use std::path::Path;

use perskern::filtration::{
    binarize, default_h_inf, graph_sublevel_filtration, height_filtration, jaccard_weights,
    shortest_path_weights, takens_embedding, GraphFiltrationOptions,
};
use perskern::persistence::{compute_persistence, rips_persistence};
use perskern::PersistenceDiagram;
use rayon::prelude::*;
use serde::Serialize;

use crate::config::{
    CapRule, DatasetConfig, DiagramConfig, FiltrationConfig, GraphWeights, NamedCap,
};
use crate::data::{Dataset, Sample};
use crate::error::{BenchError, Result};

/// Raw diagram of one sample, before dimension filtering and capping.
pub fn raw_diagram(sample: &Sample, filtration: &FiltrationConfig) -> Result<PersistenceDiagram> {
    let d = match (sample, filtration) {
        (Sample::Cloud(pc), FiltrationConfig::Rips { max_dim, max_scale }) => {
            rips_persistence(pc, *max_dim, *max_scale)?
        }
        (
            Sample::Graph(g),
            FiltrationConfig::Graph {
                weights,
                include_triangles,
                vertex_birth,
            },
        ) => {
            let g = match weights {
                GraphWeights::Given => g.clone(),
                GraphWeights::ShortestPath => shortest_path_weights(g),
                GraphWeights::Jaccard | GraphWeights::JaccardSimilarity => {
                    jaccard_weights(g, weights.jaccard_orientation().expect("jaccard"))
                }
            };
            let opts = GraphFiltrationOptions {
                include_triangles: *include_triangles,
                vertex_birth: *vertex_birth,
            };
            compute_persistence(&graph_sublevel_filtration(&g, opts)?)?
        }
        (
            Sample::Image(img),
            FiltrationConfig::Cubical {
                threshold,
                directions,
                h_inf,
            },
        ) => {
            let binary = binarize(img, *threshold);
            let h_inf = h_inf.unwrap_or_else(|| default_h_inf(img.rows(), img.cols()));
            let mut all = PersistenceDiagram::empty();
            for &v in directions {
                let norm = v[0].hypot(v[1]);
                let fc = height_filtration(&binary, [v[0] / norm, v[1] / norm], h_inf)?;
                all.extend(&compute_persistence(&fc)?);
            }
            all
        }
        (
            Sample::Series(ts),
            FiltrationConfig::Takens {
                delay,
                dimension,
                max_dim,
                max_scale,
            },
        ) => rips_persistence(
            &takens_embedding(ts, *delay, *dimension)?,
            *max_dim,
            *max_scale,
        )?,
        (s, _) => {
            return Err(BenchError::Config(format!(
                "a {} does not fit the configured filtration",
                s.kind()
            )))
        }
    };
    Ok(d)
}

/// Keeps the configured dimensions, caps or drops essential points, then
/// keeps the `top_k` most persistent.
pub fn postprocess(raw: &PersistenceDiagram, cfg: &DiagramConfig) -> Result<PersistenceDiagram> {
    let mut d = PersistenceDiagram::empty();
    for &dim in &cfg.dims {
        d.extend(&raw.filter_dimension(dim));
    }
    let d = match cfg.cap {
        _ if !d.has_infinite() => d,
        CapRule::Value(cap) => d.cap_infinite(cap)?,
        CapRule::Named(NamedCap::Drop) => {
            PersistenceDiagram::new(d.iter().copied().filter(|p| !p.is_essential()).collect())?
        }
        CapRule::Named(NamedCap::MaxFinite) => {
            let max_birth = d.iter().map(|p| p.birth).fold(f64::NEG_INFINITY, f64::max);
            let cap = if d.iter().any(|p| !p.is_essential()) {
                d.max_finite_value().expect("finite point")
            } else {
                max_birth + 1.0
            };
            d.cap_infinite(cap)?
        }
    };
    Ok(match cfg.top_k {
        Some(k) => d.top_k_by_persistence(k),
        None => d,
    })
}

pub fn diagram_pipeline(
    sample: &Sample,
    id: &str,
    filtration: &FiltrationConfig,
    cfg: &DiagramConfig,
) -> Result<PersistenceDiagram> {
    let raw = raw_diagram(sample, filtration).map_err(|e| e.at(id, "filtration"))?;
    let d = postprocess(&raw, cfg).map_err(|e| e.at(id, "postprocess"))?;
    Ok(d.with_source(id))
}

#[derive(Serialize)]
struct Fingerprint<'a> {
    dataset: &'a DatasetConfig,
    filtration: &'a FiltrationConfig,
    diagrams: &'a DiagramConfig,
}

/// JSON of everything a diagram depends on.
pub fn fingerprint(
    dataset: &DatasetConfig,
    filtration: &FiltrationConfig,
    diagrams: &DiagramConfig,
) -> String {
    serde_json::to_string(&Fingerprint {
        dataset,
        filtration,
        diagrams,
    })
    .expect("config serializes")
}

/// Diagrams for every sample, in dataset order. With a cache directory,
/// diagrams are read from `<dir>/<id>.txt` when `<dir>/fingerprint.json`
/// matches and written there otherwise.
pub fn compute_diagrams(
    ds: &Dataset,
    filtration: &FiltrationConfig,
    cfg: &DiagramConfig,
    cache: Option<(&Path, &str)>,
) -> Result<Vec<PersistenceDiagram>> {
    if let Some((dir, fp)) = cache {
        crate::grams::prepare_dir(dir, fp)?;
    }
    let fresh = cache.is_none();
    let computed: Vec<(PersistenceDiagram, bool)> = ds
        .samples
        .par_iter()
        .zip(&ds.ids)
        .map(|(sample, id)| {
            if !fresh {
                let (dir, _) = cache.expect("cache");
                if let Ok(text) = std::fs::read_to_string(dir.join(format!("{id}.txt"))) {
                    let d: PersistenceDiagram = text
                        .parse()
                        .map_err(|e| BenchError::from(e).at(id.as_str(), "diagram cache"))?;
                    return Ok((d.with_source(id.as_str()), false));
                }
            }
            Ok((diagram_pipeline(sample, id, filtration, cfg)?, true))
        })
        .collect::<Result<_>>()?;
    if let Some((dir, _)) = cache {
        for (d, new) in &computed {
            if *new {
                let path = dir.join(format!("{}.txt", d.source_id()));
                std::fs::write(&path, d.to_string()).map_err(BenchError::io(&path))?;
            }
        }
    }
    Ok(computed.into_iter().map(|(d, _)| d).collect())
}
