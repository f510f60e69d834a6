//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Diagrams cross the boundary in the plain-text format of
//! [`PersistenceDiagram`]: one `dim,birth,death` line per point.

use perskern::kernels::{persistence_image, PersistenceImageSpec};
use perskern::persistence::rips_persistence;
use perskern::{KernelSpec, PersistenceDiagram, PointCloud};
use serde_json::json;
use wasm_bindgen::prelude::*;

fn parse(text: &str) -> Result<PersistenceDiagram, String> {
    text.parse::<PersistenceDiagram>()
        .map_err(|e| e.to_string())
}

fn finite(d: &PersistenceDiagram) -> PersistenceDiagram {
    PersistenceDiagram::new(d.iter().copied().filter(|p| !p.is_essential()).collect())
        .expect("subset of a valid diagram")
}

/// Vietoris–Rips diagram of planar points given as `x0, y0, x1, y1, …`.
pub fn diagram_of(coords: &[f64], max_dim: usize) -> Result<String, String> {
    if !coords.len().is_multiple_of(2) {
        return Err("odd number of coordinates".into());
    }
    let pc = PointCloud::new(coords.chunks(2).map(|c| c.to_vec()).collect())
        .map_err(|e| e.to_string())?;
    let d = rips_persistence(&pc, max_dim.min(1), f64::INFINITY).map_err(|e| e.to_string())?;
    Ok(d.to_string())
}

/// Persistence image of the finite points of dimension `dim`, on a grid
/// fitted to the diagram. Returns the grid and row-major values as JSON.
pub fn image_of(diagram: &str, dim: usize, sigma: f64, pixel_size: f64) -> Result<String, String> {
    let d = finite(&parse(diagram)?).filter_dimension(dim);
    let spec = PersistenceImageSpec::fit(std::slice::from_ref(&d), sigma, pixel_size)
        .map_err(|e| e.to_string())?;
    if spec.grid.len() > 250_000 {
        return Err(format!(
            "{}x{} pixels; use larger pixels",
            spec.grid.rows, spec.grid.cols
        ));
    }
    let img = persistence_image(&d, &spec).map_err(|e| e.to_string())?;
    let g = spec.grid;
    Ok(json!({
        "x_min": g.x_min, "y_min": g.y_min, "pixel_size": g.pixel_size,
        "rows": g.rows, "cols": g.cols, "values": img.values,
    })
    .to_string())
}

fn spec_for(
    kind: &str,
    param: f64,
    a: &PersistenceDiagram,
    b: &PersistenceDiagram,
) -> Result<KernelSpec, String> {
    Ok(match kind {
        "PSSK" => KernelSpec::ScaleSpace { sigma: param },
        "PWGK" => KernelSpec::WeightedGaussian {
            rho: param,
            tau: 1.0,
            p: 1.0,
            c_w: 1.0,
        },
        "SWK" => KernelSpec::SlicedWasserstein {
            eta: param,
            directions: 50,
        },
        "PFK" => KernelSpec::Fisher {
            sigma: param,
            t: 1.0,
        },
        "PI" => KernelSpec::Image(
            PersistenceImageSpec::fit(&[a.clone(), b.clone()], param, param / 2.0)
                .map_err(|e| e.to_string())?,
        ),
        _ => return Err(format!("unknown kernel {kind:?}")),
    })
}

/// `k(A, A)`, `k(A, B)`, `k(B, B)` and the cosine-normalized `k(A, B)` on
/// the finite points of dimension `dim`. `param` is the kernel's
/// bandwidth; other parameters are fixed.
pub fn kernel_between(
    a: &str,
    b: &str,
    dim: usize,
    kind: &str,
    param: f64,
) -> Result<String, String> {
    let a = finite(&parse(a)?).filter_dimension(dim);
    let b = finite(&parse(b)?).filter_dimension(dim);
    let spec = spec_for(kind, param, &a, &b)?;
    spec.validate().map_err(|e| e.to_string())?;
    let k = |x: &PersistenceDiagram, y: &PersistenceDiagram| {
        spec.evaluate(x, y).map_err(|e| e.to_string())
    };
    let (aa, ab, bb) = (k(&a, &a)?, k(&a, &b)?, k(&b, &b)?);
    let cosine = if aa > 0.0 && bb > 0.0 {
        ab / (aa * bb).sqrt()
    } else {
        f64::NAN
    };
    Ok(json!({ "aa": aa, "ab": ab, "bb": bb, "normalized": cosine }).to_string())
}

#[wasm_bindgen]
pub fn rips_diagram(coords: &[f64], max_dim: usize) -> Result<String, JsError> {
    diagram_of(coords, max_dim).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn diagram_image(
    diagram: &str,
    dim: usize,
    sigma: f64,
    pixel_size: f64,
) -> Result<String, JsError> {
    image_of(diagram, dim, sigma, pixel_size).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn kernel_value(
    a: &str,
    b: &str,
    dim: usize,
    kind: &str,
    param: f64,
) -> Result<String, JsError> {
    kernel_between(a, b, dim, kind, param).map_err(|e| JsError::new(&e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn circle(n: usize, r: f64) -> Vec<f64> {
        (0..n)
            .flat_map(|k| {
                let t = std::f64::consts::TAU * k as f64 / n as f64;
                [r * t.cos(), r * t.sin()]
            })
            .collect()
    }

    #[test]
    fn circle_has_one_loop() {
        let d = parse(&diagram_of(&circle(12, 1.0), 1).unwrap()).unwrap();
        assert_eq!(d.filter_dimension(1).len(), 1);
        assert_eq!(d.iter().filter(|p| p.is_essential()).count(), 1);
        assert!(diagram_of(&[0.0, 1.0, 2.0], 1).is_err());
    }

    #[test]
    fn image_and_kernels() {
        let a = diagram_of(&circle(12, 1.0), 1).unwrap();
        let b = diagram_of(&circle(12, 2.0), 1).unwrap();
        let img: serde_json::Value =
            serde_json::from_str(&image_of(&a, 1, 0.1, 0.05).unwrap()).unwrap();
        let n = img["rows"].as_u64().unwrap() * img["cols"].as_u64().unwrap();
        assert_eq!(img["values"].as_array().unwrap().len() as u64, n);
        for kind in ["PSSK", "PWGK", "SWK", "PFK", "PI"] {
            let v: serde_json::Value =
                serde_json::from_str(&kernel_between(&a, &b, 1, kind, 0.5).unwrap()).unwrap();
            let c = v["normalized"].as_f64().unwrap();
            assert!(c > 0.0 && c <= 1.0 + 1e-12, "{kind} {v}");
        }
        assert!(kernel_between(&a, &b, 1, "XYZ", 1.0).is_err());
        assert!(kernel_between(&a, &b, 1, "PSSK", -1.0).is_err());
    }
}
