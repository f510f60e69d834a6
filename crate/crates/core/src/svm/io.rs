//! Plain-text model files.
//!
//! ```text
//! perskern-svm 1
//! kernel {"kernel":"PSSK","sigma":0.1}
//! n_train 4
//! ids a<TAB>b<TAB>c<TAB>d
//! classes 0 1
//! machine 0 1
//! c 10.0
//! bias -0.5
//! objective 1.25
//! iterations 3
//! converged true
//! sv 0 0.75
//! sv 2 -0.75
//! end
//! ```

use std::fmt::Write as _;
use std::str::FromStr;

use super::multiclass::{MulticlassModel, PairModel};
use super::smo::TrainedModel;
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;

const MAGIC: &str = "perskern-svm 1";

/// A trained ensemble bound to its kernel and to the identifiers of the
/// training samples its kernel rows must follow.
#[derive(Debug, Clone, PartialEq)]
pub struct SavedModel {
    pub kernel: Option<KernelSpec>,
    pub train_ids: Vec<String>,
    pub model: MulticlassModel,
}

impl SavedModel {
    pub fn to_text(&self) -> Result<String> {
        if let Some(bad) = self
            .train_ids
            .iter()
            .find(|s| s.contains(['\t', '\n', '\r']))
        {
            return Err(Error::InvalidInput(format!(
                "identifier {bad:?} contains a tab or newline"
            )));
        }
        let mut out = String::new();
        let _ = writeln!(out, "{MAGIC}");
        match &self.kernel {
            Some(k) => {
                let json =
                    serde_json::to_string(k).map_err(|e| Error::InvalidInput(e.to_string()))?;
                let _ = writeln!(out, "kernel {json}");
            }
            None => out.push_str("kernel none\n"),
        }
        let _ = writeln!(out, "n_train {}", self.model.n_train);
        let _ = writeln!(out, "ids {}", self.train_ids.join("\t"));
        let classes: Vec<String> = self.model.classes.iter().map(|c| c.to_string()).collect();
        let _ = writeln!(out, "classes {}", classes.join(" "));
        for m in &self.model.machines {
            let t = &m.model;
            let _ = writeln!(out, "machine {} {}", m.positive, m.negative);
            let _ = writeln!(out, "c {:?}", t.c);
            let _ = writeln!(out, "bias {:?}", t.bias);
            let _ = writeln!(out, "objective {:?}", t.objective);
            let _ = writeln!(out, "iterations {}", t.iterations);
            let _ = writeln!(out, "converged {}", t.converged);
            for (i, c) in t.support.iter().zip(&t.coef) {
                let _ = writeln!(out, "sv {i} {c:?}");
            }
        }
        out.push_str("end\n");
        Ok(out)
    }
}

fn parse<T: FromStr>(line: usize, s: &str) -> Result<T> {
    s.trim().parse().map_err(|_| Error::Parse {
        line,
        message: format!("cannot parse {s:?}"),
    })
}

impl FromStr for SavedModel {
    type Err = Error;

    fn from_str(text: &str) -> Result<Self> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        let mut next = |want: &str| -> Result<(usize, String)> {
            let (no, l) = lines.next().ok_or(Error::Parse {
                line: 0,
                message: format!("missing {want}"),
            })?;
            Ok((no, l.to_string()))
        };
        let (no, head) = next("header")?;
        if head.trim() != MAGIC {
            return Err(Error::Parse {
                line: no,
                message: "not a model file".into(),
            });
        }
        let field = |(no, l): (usize, String), key: &str| -> Result<(usize, String)> {
            match l.split_once(' ') {
                Some((k, rest)) if k == key => Ok((no, rest.to_string())),
                _ if l == key => Ok((no, String::new())),
                _ => Err(Error::Parse {
                    line: no,
                    message: format!("expected {key}"),
                }),
            }
        };
        let (no, k) = field(next("kernel")?, "kernel")?;
        let kernel = if k.trim() == "none" {
            None
        } else {
            Some(serde_json::from_str(&k).map_err(|e| Error::Parse {
                line: no,
                message: e.to_string(),
            })?)
        };
        let (no, n) = field(next("n_train")?, "n_train")?;
        let n_train: usize = parse(no, &n)?;
        let (_, ids) = field(next("ids")?, "ids")?;
        let train_ids: Vec<String> = if n_train == 0 {
            vec![]
        } else {
            ids.split('\t').map(String::from).collect()
        };
        if train_ids.len() != n_train {
            return Err(Error::LengthMismatch {
                expected: n_train,
                got: train_ids.len(),
            });
        }
        let (no, cl) = field(next("classes")?, "classes")?;
        let classes = cl
            .split_whitespace()
            .map(|c| parse(no, c))
            .collect::<Result<Vec<i64>>>()?;
        let mut machines = Vec::new();
        let mut pending: Option<(usize, String)> = Some(next("machine")?);
        loop {
            let (no, line) = pending.take().expect("lookahead line");
            if line.trim() == "end" {
                break;
            }
            let (_, pair) = field((no, line), "machine")?;
            let parts: Vec<i64> = pair
                .split_whitespace()
                .map(|c| parse(no, c))
                .collect::<Result<_>>()?;
            if parts.len() != 2 {
                return Err(Error::Parse {
                    line: no,
                    message: "machine needs two classes".into(),
                });
            }
            let (no, c) = field(next("c")?, "c")?;
            let c = parse(no, &c)?;
            let (no, b) = field(next("bias")?, "bias")?;
            let bias = parse(no, &b)?;
            let (no, o) = field(next("objective")?, "objective")?;
            let objective = parse(no, &o)?;
            let (no, it) = field(next("iterations")?, "iterations")?;
            let iterations = parse(no, &it)?;
            let (no, cv) = field(next("converged")?, "converged")?;
            let converged = parse(no, &cv)?;
            let (mut support, mut coef) = (Vec::new(), Vec::new());
            loop {
                let (no, line) = next("sv or end")?;
                match line.strip_prefix("sv ") {
                    Some(rest) => {
                        let mut it = rest.split_whitespace();
                        let i: usize = parse(no, it.next().unwrap_or(""))?;
                        if i >= n_train {
                            return Err(Error::Parse {
                                line: no,
                                message: format!("support index {i} out of range"),
                            });
                        }
                        support.push(i);
                        coef.push(parse(no, it.next().unwrap_or(""))?);
                    }
                    None => {
                        pending = Some((no, line));
                        break;
                    }
                }
            }
            let model = TrainedModel {
                support,
                coef,
                bias,
                c,
                n_train,
                objective,
                iterations,
                converged,
            };
            machines.push(PairModel {
                positive: parts[0],
                negative: parts[1],
                model,
            });
        }
        for m in &machines {
            if classes.binary_search(&m.positive).is_err()
                || classes.binary_search(&m.negative).is_err()
            {
                return Err(Error::Parse {
                    line: 0,
                    message: "machine refers to an unknown class".into(),
                });
            }
        }
        Ok(SavedModel {
            kernel,
            train_ids,
            model: MulticlassModel {
                classes,
                machines,
                n_train,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernels::GramMatrix;
    use crate::svm::{train_multiclass, SmoOptions};

    #[test]
    fn round_trip() {
        let xs = [0.0f64, 0.1, 1.0, 1.1, 2.0, 2.2];
        let labels = [0, 0, 1, 1, 2, 2];
        let g = GramMatrix::from_fn(6, |i, j| (-(xs[i] - xs[j]) * (xs[i] - xs[j])).exp());
        let model = train_multiclass(&g, &labels, &SmoOptions::new(1.0)).unwrap();
        let saved = SavedModel {
            kernel: Some(KernelSpec::ScaleSpace { sigma: 0.1 }),
            train_ids: (0..6).map(|i| format!("orbit {i}")).collect(),
            model,
        };
        let text = saved.to_text().unwrap();
        let back: SavedModel = text.parse().unwrap();
        assert_eq!(back, saved);
        assert!("perskern-svm 2\n".parse::<SavedModel>().is_err());
        let truncated: String = text.lines().take(8).collect::<Vec<_>>().join("\n");
        assert!(truncated.parse::<SavedModel>().is_err());
    }
}
