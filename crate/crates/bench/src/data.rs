//! Labelled datasets: the orbit generator and file loaders.
//!
//! File datasets other than time series are described by a manifest CSV
//! with one `path,label` row per sample; paths are relative to the
//! manifest. Lines starting with `#` and blank lines are ignored
//! everywhere.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use perskern::filtration::{GrayImage, PointCloud, TimeSeries, WeightedGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Sample {
    Cloud(PointCloud),
    Graph(WeightedGraph),
    Image(GrayImage),
    Series(TimeSeries),
}

impl Sample {
    pub fn kind(&self) -> &'static str {
        match self {
            Sample::Cloud(_) => "point cloud",
            Sample::Graph(_) => "graph",
            Sample::Image(_) => "image",
            Sample::Series(_) => "time series",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub ids: Vec<String>,
    pub labels: Vec<i64>,
    pub samples: Vec<Sample>,
}

impl Dataset {
    pub fn len(&self) -> usize {
        self.samples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.samples.is_empty()
    }

    fn check_nonempty(self) -> Result<Self> {
        if self.is_empty() {
            return Err(BenchError::Data("dataset is empty".into()));
        }
        Ok(self)
    }
}

/// One step of the linked twisted map.
#[inline]
pub fn twisted_map_step(x: f64, y: f64, r: f64) -> (f64, f64) {
    let x1 = (x + r * y * (1.0 - y)).rem_euclid(1.0);
    let y1 = (y + r * x1 * (1.0 - x1)).rem_euclid(1.0);
    (x1, y1)
}

/// The first `n_points` points of an orbit started at `(x0, y0)`, the start
/// included.
pub fn orbit(x0: f64, y0: f64, r: f64, n_points: usize) -> Vec<Vec<f64>> {
    let mut pts = Vec::with_capacity(n_points);
    let (mut x, mut y) = (x0, y0);
    for _ in 0..n_points {
        pts.push(vec![x, y]);
        (x, y) = twisted_map_step(x, y, r);
    }
    pts
}

/// `n_orbits` orbits per value of `r`, labelled by the index of `r`. Start
/// points are uniform in `[0, 1)²`, drawn from one ChaCha8 stream in
/// `r`-major order, `x` before `y`.
pub fn generate_orbits(
    r_values: &[f64],
    n_orbits: usize,
    n_points: usize,
    seed: u64,
) -> Result<Dataset> {
    if r_values.is_empty() || n_orbits == 0 || n_points == 0 {
        return Err(BenchError::Config(
            "orbits need r values, orbits and points".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut ds = Dataset {
        ids: vec![],
        labels: vec![],
        samples: vec![],
    };
    for (label, &r) in r_values.iter().enumerate() {
        for k in 0..n_orbits {
            let x0: f64 = rng.random();
            let y0: f64 = rng.random();
            let cloud = PointCloud::new(orbit(x0, y0, r, n_points)).map_err(BenchError::from)?;
            ds.ids.push(format!("r{label}-{k:03}"));
            ds.labels.push(label as i64);
            ds.samples.push(Sample::Cloud(cloud));
        }
    }
    Ok(ds)
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(BenchError::io(path))
}

fn data_err(path: &Path, line: usize, msg: impl std::fmt::Display) -> BenchError {
    BenchError::Data(format!("{}:{line}: {msg}", path.display()))
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_f64(path: &Path, line: usize, s: &str) -> Result<f64> {
    let v: f64 = s
        .trim()
        .parse()
        .map_err(|_| data_err(path, line, format!("bad number {s:?}")))?;
    if !v.is_finite() {
        return Err(data_err(path, line, format!("non-finite value {s:?}")));
    }
    Ok(v)
}

fn split_fields(l: &str) -> Vec<&str> {
    l.split([',', '\t', ' '])
        .filter(|s| !s.is_empty())
        .collect()
}

/// Rows of numbers separated by commas, tabs or spaces.
fn parse_rows(path: &Path, text: &str) -> Result<Vec<Vec<f64>>> {
    content_lines(text)
        .map(|(no, l)| {
            split_fields(l)
                .into_iter()
                .map(|f| parse_f64(path, no, f))
                .collect()
        })
        .collect()
}

pub fn parse_point_cloud(path: &Path, text: &str) -> Result<PointCloud> {
    let rows = parse_rows(path, text)?;
    if rows.is_empty() {
        return Err(data_err(path, 0, "no points"));
    }
    let dim = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != dim) {
        return Err(data_err(path, i + 1, format!("expected {dim} coordinates")));
    }
    PointCloud::new(rows).map_err(|e| data_err(path, 0, e))
}

/// `n=<count>` header, then one `u v [weight]` edge per line (weight 1 when
/// omitted).
pub fn parse_graph(path: &Path, text: &str) -> Result<WeightedGraph> {
    let mut lines = content_lines(text);
    let (no, header) = lines
        .next()
        .ok_or_else(|| data_err(path, 0, "missing n=<count> header"))?;
    let n: usize = header
        .strip_prefix("n=")
        .and_then(|s| s.trim().parse().ok())
        .ok_or_else(|| data_err(path, no, format!("expected n=<count>, got {header:?}")))?;
    let mut edges = Vec::new();
    for (no, l) in lines {
        let f = split_fields(l);
        if !(2..=3).contains(&f.len()) {
            return Err(data_err(path, no, "expected `u v [weight]`"));
        }
        let vertex = |s: &str| {
            s.parse::<usize>()
                .map_err(|_| data_err(path, no, format!("bad vertex {s:?}")))
        };
        let w = if f.len() == 3 {
            parse_f64(path, no, f[2])?
        } else {
            1.0
        };
        edges.push((vertex(f[0])?, vertex(f[1])?, w));
    }
    WeightedGraph::new(n, edges).map_err(|e| data_err(path, 0, e))
}

pub fn parse_image(path: &Path, text: &str) -> Result<GrayImage> {
    let rows = parse_rows(path, text)?;
    if rows.is_empty() {
        return Err(data_err(path, 0, "empty image"));
    }
    let cols = rows[0].len();
    if let Some(i) = rows.iter().position(|r| r.len() != cols) {
        return Err(data_err(path, i + 1, format!("expected {cols} columns")));
    }
    let n = rows.len();
    GrayImage::new(n, cols, rows.concat()).map_err(|e| data_err(path, 0, e))
}

/// UCR layout: one series per line, label first, tab- or comma-separated.
pub fn parse_time_series(path: &Path, text: &str) -> Result<Dataset> {
    let mut ds = Dataset {
        ids: vec![],
        labels: vec![],
        samples: vec![],
    };
    for (no, l) in content_lines(text) {
        let f = split_fields(l);
        let label = parse_label(path, no, f[0])?;
        let values = f[1..]
            .iter()
            .map(|s| parse_f64(path, no, s))
            .collect::<Result<Vec<_>>>()?;
        let ts = TimeSeries::new(values).map_err(|e| data_err(path, no, e))?;
        ds.ids.push(format!("ts{:04}", ds.len()));
        ds.labels.push(label);
        ds.samples.push(Sample::Series(ts));
    }
    ds.check_nonempty()
}

/// Integer labels; UCR files often write them as `1.0000000e+00`.
fn parse_label(path: &Path, line: usize, s: &str) -> Result<i64> {
    if let Ok(v) = s.parse::<i64>() {
        return Ok(v);
    }
    let v = parse_f64(path, line, s)?;
    if v.fract() != 0.0 {
        return Err(data_err(
            path,
            line,
            format!("label {s:?} is not an integer"),
        ));
    }
    Ok(v as i64)
}

fn load_manifest(
    manifest: &Path,
    parse: impl Fn(&Path, &str) -> Result<Sample>,
) -> Result<Dataset> {
    let text = read(manifest)?;
    let base = manifest.parent().unwrap_or(Path::new("."));
    let mut ds = Dataset {
        ids: vec![],
        labels: vec![],
        samples: vec![],
    };
    for (no, l) in content_lines(&text) {
        let (file, label) = l
            .rsplit_once(',')
            .ok_or_else(|| data_err(manifest, no, "expected `path,label`"))?;
        let label = parse_label(manifest, no, label.trim())?;
        let path = base.join(file.trim());
        let sample = parse(&path, &read(&path)?)?;
        let id = Path::new(file.trim())
            .file_stem()
            .map_or_else(|| format!("s{no}"), |s| s.to_string_lossy().into_owned());
        ds.ids.push(id);
        ds.labels.push(label);
        ds.samples.push(sample);
    }
    ds.check_nonempty()
}

pub fn load_point_clouds(manifest: &Path) -> Result<Dataset> {
    load_manifest(manifest, |p, t| parse_point_cloud(p, t).map(Sample::Cloud))
}

pub fn load_graphs(manifest: &Path) -> Result<Dataset> {
    load_manifest(manifest, |p, t| parse_graph(p, t).map(Sample::Graph))
}

pub fn load_images(manifest: &Path) -> Result<Dataset> {
    load_manifest(manifest, |p, t| parse_image(p, t).map(Sample::Image))
}

pub fn load_time_series(path: &Path) -> Result<Dataset> {
    parse_time_series(path, &read(path)?)
}

pub fn point_cloud_csv(pc: &PointCloud) -> String {
    let mut out = String::new();
    for p in pc.points() {
        let row: Vec<String> = p.iter().map(|v| format!("{v:?}")).collect();
        let _ = writeln!(out, "{}", row.join(","));
    }
    out
}

/// Writes one CSV per cloud plus `manifest.csv` into `dir`; returns the
/// manifest path.
pub fn save_point_clouds(ds: &Dataset, dir: &Path) -> Result<PathBuf> {
    std::fs::create_dir_all(dir).map_err(BenchError::io(dir))?;
    let mut manifest = String::from("# path,label\n");
    for ((id, label), sample) in ds.ids.iter().zip(&ds.labels).zip(&ds.samples) {
        let Sample::Cloud(pc) = sample else {
            return Err(BenchError::Data(format!(
                "{id} is a {}, not a point cloud",
                sample.kind()
            )));
        };
        let file = format!("{id}.csv");
        let path = dir.join(&file);
        std::fs::write(&path, point_cloud_csv(pc)).map_err(BenchError::io(&path))?;
        let _ = writeln!(manifest, "{file},{label}");
    }
    let path = dir.join("manifest.csv");
    std::fs::write(&path, manifest).map_err(BenchError::io(&path))?;
    Ok(path)
}
