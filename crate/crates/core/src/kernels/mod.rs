//! Persistence kernels, Gram assembly and conditioning diagnostics.
//!
//! Every kernel treats a diagram as its total multiset of points. For
//! per-dimension evaluation use [`evaluate_per_dimension`], which sums the
//! kernel over dimension-filtered diagrams.
//!
//! Kernels whose value is a double sum over point pairs fix the summation
//! order with [`canonical_pair`], so `k(D, E)` and `k(E, D)` agree to the
//! last bit.

mod eigen;
mod fisher;
mod gram;
mod image;
mod scale_space;
mod sliced;
mod weighted_gaussian;

use std::cmp::Ordering;

use serde::{Deserialize, Serialize};

use crate::diagram::PersistenceDiagram;
use crate::error::{Error, Result};

pub use eigen::{condition_number, symmetric_eigenvalues};
pub use fisher::{fisher_distance, fisher_distance_matrix, k_pf, pfk_from_distances};
pub use gram::{gram, gram_per_dimension, GramMatrix};
pub use image::{
    image_gram, k_pi, persistence_image, weight_ramp, ImageGrid, PersistenceImageSpec,
    PersistenceImageVector,
};
pub use scale_space::k_pss;
pub use sliced::{k_sw, sw_distance_matrix, swk_from_distances};
pub use weighted_gaussian::{
    k_pwg, pwgk_embedding_inner, pwgk_from_inner, pwgk_inner_matrix, pwgk_weight, PwgkParams,
};

/// A persistence kernel and its parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kernel")]
pub enum KernelSpec {
    /// Persistence scale-space kernel.
    #[serde(rename = "PSSK")]
    ScaleSpace { sigma: f64 },
    /// Persistence weighted Gaussian kernel: Gaussian bandwidth `rho`,
    /// outer scale `tau`, weight `arctan(c_w * pers^p)`.
    #[serde(rename = "PWGK")]
    WeightedGaussian {
        rho: f64,
        tau: f64,
        p: f64,
        c_w: f64,
    },
    /// Sliced Wasserstein kernel with `directions` slices.
    #[serde(rename = "SWK")]
    SlicedWasserstein { eta: f64, directions: usize },
    /// Persistence Fisher kernel.
    #[serde(rename = "PFK")]
    Fisher { sigma: f64, t: f64 },
    /// Inner product of persistence images.
    #[serde(rename = "PI")]
    Image(PersistenceImageSpec),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum KernelKind {
    #[serde(rename = "PSSK")]
    ScaleSpace,
    #[serde(rename = "PWGK")]
    WeightedGaussian,
    #[serde(rename = "SWK")]
    SlicedWasserstein,
    #[serde(rename = "PFK")]
    Fisher,
    #[serde(rename = "PI")]
    Image,
}

impl KernelKind {
    pub const ALL: [KernelKind; 5] = [
        KernelKind::ScaleSpace,
        KernelKind::WeightedGaussian,
        KernelKind::SlicedWasserstein,
        KernelKind::Fisher,
        KernelKind::Image,
    ];

    pub fn name(self) -> &'static str {
        match self {
            KernelKind::ScaleSpace => "PSSK",
            KernelKind::WeightedGaussian => "PWGK",
            KernelKind::SlicedWasserstein => "SWK",
            KernelKind::Fisher => "PFK",
            KernelKind::Image => "PI",
        }
    }
}

impl std::str::FromStr for KernelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        KernelKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidParameter(format!("unknown kernel {s:?}")))
    }
}

impl std::fmt::Display for KernelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

pub(crate) fn positive(name: &str, v: f64) -> Result<()> {
    if v.is_finite() && v > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "{name} must be positive and finite, got {v}"
        )))
    }
}

impl KernelSpec {
    pub fn kind(&self) -> KernelKind {
        match self {
            KernelSpec::ScaleSpace { .. } => KernelKind::ScaleSpace,
            KernelSpec::WeightedGaussian { .. } => KernelKind::WeightedGaussian,
            KernelSpec::SlicedWasserstein { .. } => KernelKind::SlicedWasserstein,
            KernelSpec::Fisher { .. } => KernelKind::Fisher,
            KernelSpec::Image(_) => KernelKind::Image,
        }
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            KernelSpec::ScaleSpace { sigma } => positive("sigma", *sigma),
            KernelSpec::WeightedGaussian { rho, tau, p, c_w } => {
                positive("rho", *rho)?;
                positive("tau", *tau)?;
                positive("c_w", *c_w)?;
                if !(p.is_finite() && *p >= 1.0) {
                    return Err(Error::InvalidParameter(format!("p must be >= 1, got {p}")));
                }
                Ok(())
            }
            KernelSpec::SlicedWasserstein { eta, directions } => {
                positive("eta", *eta)?;
                if *directions == 0 {
                    return Err(Error::InvalidParameter("directions must be >= 1".into()));
                }
                Ok(())
            }
            KernelSpec::Fisher { sigma, t } => {
                positive("sigma", *sigma)?;
                positive("t", *t)
            }
            KernelSpec::Image(spec) => spec.validate(),
        }
    }

    /// `k(D, E)` for finite diagrams.
    pub fn evaluate(&self, d: &PersistenceDiagram, e: &PersistenceDiagram) -> Result<f64> {
        match self {
            KernelSpec::ScaleSpace { sigma } => k_pss(d, e, *sigma),
            KernelSpec::WeightedGaussian { rho, tau, p, c_w } => k_pwg(
                d,
                e,
                &PwgkParams {
                    rho: *rho,
                    tau: *tau,
                    p: *p,
                    c_w: *c_w,
                },
            ),
            KernelSpec::SlicedWasserstein { eta, directions } => k_sw(d, e, *eta, *directions),
            KernelSpec::Fisher { sigma, t } => k_pf(d, e, *t, *sigma),
            KernelSpec::Image(spec) => k_pi(d, e, spec),
        }
    }

    /// Value on a pair of empty diagrams: 1 for the normalized kernels,
    /// 0 for the linear ones.
    pub fn empty_pair_value(&self) -> f64 {
        match self {
            KernelSpec::ScaleSpace { .. } | KernelSpec::Image(_) => 0.0,
            _ => 1.0,
        }
    }
}

/// Sum of `spec` over the dimension-filtered diagrams.
pub fn evaluate_per_dimension(
    spec: &KernelSpec,
    d: &PersistenceDiagram,
    e: &PersistenceDiagram,
    dims: &[usize],
) -> Result<f64> {
    dims.iter().try_fold(0.0, |acc, &k| {
        let (dk, ek) = (d.filter_dimension(k), e.filter_dimension(k));
        let v = if dk.is_empty() && ek.is_empty() {
            spec.empty_pair_value()
        } else {
            spec.evaluate(&dk, &ek)?
        };
        Ok(acc + v)
    })
}

fn diagram_cmp(a: &PersistenceDiagram, b: &PersistenceDiagram) -> Ordering {
    a.len().cmp(&b.len()).then_with(|| {
        a.iter()
            .zip(b.iter())
            .map(|(p, q)| {
                p.dim
                    .cmp(&q.dim)
                    .then(p.birth.total_cmp(&q.birth))
                    .then(p.death.total_cmp(&q.death))
            })
            .find(|o| o.is_ne())
            .unwrap_or(Ordering::Equal)
    })
}

/// Orders a pair of diagrams by a fixed total order so double sums run in
/// the same order whichever argument comes first.
pub(crate) fn canonical_pair<'a>(
    d: &'a PersistenceDiagram,
    e: &'a PersistenceDiagram,
) -> (&'a PersistenceDiagram, &'a PersistenceDiagram) {
    if diagram_cmp(d, e) == Ordering::Greater {
        (e, d)
    } else {
        (d, e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spec_serialization_uses_kernel_tags() {
        let spec = KernelSpec::SlicedWasserstein {
            eta: 0.1,
            directions: 50,
        };
        let json = serde_json::to_string(&spec).unwrap();
        assert_eq!(json, r#"{"kernel":"SWK","eta":0.1,"directions":50}"#);
        let back: KernelSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
        assert_eq!(
            "pssk".parse::<KernelKind>().unwrap(),
            KernelKind::ScaleSpace
        );
        assert!("rbf".parse::<KernelKind>().is_err());
    }

    #[test]
    fn validation() {
        assert!(KernelSpec::ScaleSpace { sigma: 0.0 }.validate().is_err());
        assert!(KernelSpec::WeightedGaussian {
            rho: 1.0,
            tau: 1.0,
            p: 0.5,
            c_w: 1.0
        }
        .validate()
        .is_err());
        assert!(KernelSpec::SlicedWasserstein {
            eta: 1.0,
            directions: 0
        }
        .validate()
        .is_err());
        assert!(KernelSpec::Fisher {
            sigma: 1.0,
            t: -1.0
        }
        .validate()
        .is_err());
        assert!(KernelSpec::Fisher { sigma: 1.0, t: 1.0 }.validate().is_ok());
    }

    #[test]
    fn per_dimension_sum() {
        let d = PersistenceDiagram::from_triples([(0, 0.0, 1.0), (1, 0.5, 2.0)]).unwrap();
        let e = PersistenceDiagram::from_triples([(0, 0.0, 2.0)]).unwrap();
        let spec = KernelSpec::ScaleSpace { sigma: 0.5 };
        let total = evaluate_per_dimension(&spec, &d, &e, &[0, 1, 2]).unwrap();
        let dim0 = spec
            .evaluate(&d.filter_dimension(0), &e.filter_dimension(0))
            .unwrap();
        assert_eq!(total, dim0);
        let fisher = KernelSpec::Fisher { sigma: 0.5, t: 1.0 };
        let v = evaluate_per_dimension(&fisher, &d, &d, &[0, 1, 2]).unwrap();
        assert_eq!(v, 3.0);
    }
}
