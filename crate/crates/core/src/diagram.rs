//! Persistence diagrams: multisets of `(dim, birth, death)` generators.
//!
//! The diagonal is never stored. Operations that need diagonal points
//! (bottleneck matching, sliced Wasserstein, Fisher) build projections on
//! demand with [`DiagramPoint::project_to_diagonal`].
//!
//! The text format is one point per line, `dim,birth,death`, with the token
//! `inf` for an infinite death and `#` starting a comment line.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiagramPoint {
    pub dim: usize,
    pub birth: f64,
    /// `f64::INFINITY` marks an essential class.
    pub death: f64,
}

impl DiagramPoint {
    pub fn new(dim: usize, birth: f64, death: f64) -> Result<Self> {
        if !birth.is_finite() {
            return Err(Error::InvalidPoint(format!("birth {birth} is not finite")));
        }
        if death.is_nan() || death == f64::NEG_INFINITY {
            return Err(Error::InvalidPoint(format!(
                "death {death} is not a valid value"
            )));
        }
        if death < birth {
            return Err(Error::InvalidPoint(format!(
                "death {death} precedes birth {birth}"
            )));
        }
        Ok(Self { dim, birth, death })
    }

    pub fn essential(dim: usize, birth: f64) -> Result<Self> {
        Self::new(dim, birth, f64::INFINITY)
    }

    /// `death - birth`, infinite for essential classes.
    pub fn persistence(&self) -> f64 {
        if self.death.is_infinite() {
            f64::INFINITY
        } else {
            self.death - self.birth
        }
    }

    pub fn is_essential(&self) -> bool {
        self.death.is_infinite()
    }

    /// Orthogonal projection onto the diagonal, `((b+d)/2, (b+d)/2)`.
    pub fn project_to_diagonal(&self) -> Result<Self> {
        if self.is_essential() {
            return Err(Error::InvalidPoint(
                "cannot project an essential class onto the diagonal".into(),
            ));
        }
        let mid = (self.birth + self.death) / 2.0;
        Ok(Self {
            dim: self.dim,
            birth: mid,
            death: mid,
        })
    }

    /// Ordering used by [`PersistenceDiagram::top_k_by_persistence`]:
    /// larger persistence first, then `(birth, death, dim)` ascending.
    fn rank_cmp(&self, other: &Self) -> Ordering {
        other
            .persistence()
            .total_cmp(&self.persistence())
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
            .then(self.dim.cmp(&other.dim))
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct PersistenceDiagram {
    points: Vec<DiagramPoint>,
    source_id: String,
}

impl PersistenceDiagram {
    pub fn new(points: Vec<DiagramPoint>) -> Result<Self> {
        for p in &points {
            DiagramPoint::new(p.dim, p.birth, p.death)?;
        }
        Ok(Self {
            points,
            source_id: String::new(),
        })
    }

    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a diagram from `(dim, birth, death)` triples.
    pub fn from_triples<I>(triples: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, f64, f64)>,
    {
        let points = triples
            .into_iter()
            .map(|(dim, b, d)| DiagramPoint::new(dim, b, d))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            points,
            source_id: String::new(),
        })
    }

    pub fn with_source(mut self, source_id: impl Into<String>) -> Self {
        self.source_id = source_id.into();
        self
    }

    pub fn source_id(&self) -> &str {
        &self.source_id
    }

    pub fn points(&self) -> &[DiagramPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, DiagramPoint> {
        self.points.iter()
    }

    pub fn has_infinite(&self) -> bool {
        self.points.iter().any(DiagramPoint::is_essential)
    }

    /// Largest finite coordinate (birth or death), if any.
    pub fn max_finite_value(&self) -> Option<f64> {
        self.points
            .iter()
            .flat_map(|p| [p.birth, p.death])
            .filter(|v| v.is_finite())
            .max_by(f64::total_cmp)
    }

    /// Replaces every infinite death by `cap`.
    pub fn cap_infinite(&self, cap: f64) -> Result<Self> {
        if !cap.is_finite() {
            return Err(Error::InvalidInput(format!("cap {cap} must be finite")));
        }
        let mut points = Vec::with_capacity(self.points.len());
        for p in &self.points {
            if p.is_essential() {
                if cap < p.birth {
                    return Err(Error::CapTooSmall {
                        cap,
                        death: p.birth,
                    });
                }
                points.push(DiagramPoint { death: cap, ..*p });
            } else {
                if cap < p.death {
                    return Err(Error::CapTooSmall {
                        cap,
                        death: p.death,
                    });
                }
                points.push(*p);
            }
        }
        Ok(Self {
            points,
            source_id: self.source_id.clone(),
        })
    }

    pub fn filter_dimension(&self, dim: usize) -> Self {
        Self {
            points: self
                .points
                .iter()
                .copied()
                .filter(|p| p.dim == dim)
                .collect(),
            source_id: self.source_id.clone(),
        }
    }

    /// The `k` most persistent points. Essential classes outrank every
    /// finite one; ties go to the smaller `(birth, death, dim)`.
    pub fn top_k_by_persistence(&self, k: usize) -> Self {
        let mut points = self.points.clone();
        points.sort_by(DiagramPoint::rank_cmp);
        points.truncate(k);
        Self {
            points,
            source_id: self.source_id.clone(),
        }
    }

    /// Concatenates `other` onto `self`, keeping `self`'s source id.
    pub fn extend(&mut self, other: &PersistenceDiagram) {
        self.points.extend_from_slice(&other.points);
    }

    /// Distinct homology dimensions present, ascending.
    pub fn dimensions(&self) -> Vec<usize> {
        let mut dims: Vec<usize> = self.points.iter().map(|p| p.dim).collect();
        dims.sort_unstable();
        dims.dedup();
        dims
    }

    /// Errors if any death is infinite.
    pub fn require_finite(&self) -> Result<()> {
        match self.points.iter().position(DiagramPoint::is_essential) {
            Some(index) => Err(Error::InfiniteDeath { index }),
            None => Ok(()),
        }
    }

    /// Canonical ordering `(dim, birth, death)`, for comparing diagrams
    /// produced by different reduction routes.
    pub fn sorted(&self) -> Self {
        let mut points = self.points.clone();
        points.sort_by(|a, b| {
            a.dim
                .cmp(&b.dim)
                .then(a.birth.total_cmp(&b.birth))
                .then(a.death.total_cmp(&b.death))
        });
        Self {
            points,
            source_id: self.source_id.clone(),
        }
    }
}

impl<'a> IntoIterator for &'a PersistenceDiagram {
    type Item = &'a DiagramPoint;
    type IntoIter = std::slice::Iter<'a, DiagramPoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

fn format_value(v: f64) -> String {
    if v.is_infinite() {
        "inf".to_string()
    } else {
        format!("{v}")
    }
}

impl fmt::Display for PersistenceDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.source_id.is_empty() {
            writeln!(f, "# source={}", self.source_id)?;
        }
        for p in &self.points {
            writeln!(
                f,
                "{},{},{}",
                p.dim,
                format_value(p.birth),
                format_value(p.death)
            )?;
        }
        Ok(())
    }
}

fn parse_value(field: &str, line: usize) -> Result<f64> {
    let field = field.trim();
    match field {
        "inf" | "+inf" | "Infinity" => Ok(f64::INFINITY),
        _ => field.parse::<f64>().map_err(|e| Error::Parse {
            line,
            message: format!("bad number {field:?}: {e}"),
        }),
    }
}

impl FromStr for PersistenceDiagram {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut points = Vec::new();
        let mut source_id = String::new();
        for (i, raw) in s.lines().enumerate() {
            let line = i + 1;
            let text = raw.trim();
            if text.is_empty() {
                continue;
            }
            if let Some(comment) = text.strip_prefix('#') {
                if let Some(id) = comment.trim().strip_prefix("source=") {
                    source_id = id.to_string();
                }
                continue;
            }
            let fields: Vec<&str> = text.split(',').collect();
            if fields.len() != 3 {
                return Err(Error::Parse {
                    line,
                    message: format!("expected 3 fields, found {}", fields.len()),
                });
            }
            let dim = fields[0]
                .trim()
                .parse::<usize>()
                .map_err(|e| Error::Parse {
                    line,
                    message: format!("bad dimension {:?}: {e}", fields[0]),
                })?;
            let birth = parse_value(fields[1], line)?;
            let death = parse_value(fields[2], line)?;
            let point = DiagramPoint::new(dim, birth, death).map_err(|e| Error::Parse {
                line,
                message: e.to_string(),
            })?;
            points.push(point);
        }
        Ok(Self { points, source_id })
    }
}
