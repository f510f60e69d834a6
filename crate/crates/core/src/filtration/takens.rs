use super::PointCloud;
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeries {
    samples: Vec<f64>,
}

impl TimeSeries {
    pub fn new(samples: Vec<f64>) -> Result<Self> {
        if samples.is_empty() {
            return Err(Error::Empty("time series"));
        }
        if samples.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite("time series"));
        }
        Ok(Self { samples })
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }
}

/// Delay embedding `v_i = (x_i, x_{i+delay}, ..., x_{i+(edim-1)delay})`.
pub fn takens_embedding(ts: &TimeSeries, delay: usize, edim: usize) -> Result<PointCloud> {
    if delay == 0 || edim == 0 {
        return Err(Error::InvalidInput(
            "delay and embedding dimension must be >= 1".into(),
        ));
    }
    let span = (edim - 1) * delay;
    if ts.len() < span + 1 {
        return Err(Error::InvalidInput(format!(
            "series of length {} is too short for delay {delay} and dimension {edim}",
            ts.len()
        )));
    }
    let x = &ts.samples;
    let points = (0..ts.len() - span)
        .map(|i| (0..edim).map(|k| x[i + k * delay]).collect())
        .collect();
    PointCloud::new(points)
}
