//! # perskern
//!
//! Topological classification toolkit: filtered complexes built from point
//! clouds, graphs, images and time series; persistence diagrams by boundary
//! matrix reduction over GF(2); distances between diagrams; five persistence
//! kernels; and a dual SVM solver that consumes precomputed Gram matrices.
//!
//! ```
//! use perskern::filtration::PointCloud;
//! use perskern::persistence::rips_persistence;
//!
//! let square = PointCloud::new(vec![
//!     vec![0.0, 0.0],
//!     vec![1.0, 0.0],
//!     vec![1.0, 1.0],
//!     vec![0.0, 1.0],
//! ])
//! .unwrap();
//! let diagram = rips_persistence(&square, 1, f64::INFINITY).unwrap();
//! let loops = diagram.filter_dimension(1);
//! assert_eq!(loops.len(), 1);
//! assert_eq!(loops.points()[0].birth, 1.0);
//! assert_eq!(loops.points()[0].death, 2f64.sqrt());
//! ```

pub mod diagram;
pub mod error;
pub mod filtration;
pub mod kernels;
pub mod metrics;
pub mod persistence;
pub mod svm;

pub use diagram::{DiagramPoint, PersistenceDiagram};
pub use error::{Error, Result};
pub use filtration::{FilteredComplex, GrayImage, PointCloud, TimeSeries, WeightedGraph};
pub use kernels::{GramMatrix, KernelSpec};
