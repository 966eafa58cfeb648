//! Degree-1 Vietoris-Rips persistence of Euclidean point clouds in two and
//! three dimensions, computed on the reduced Rips filtration.
//!
//! ```
//! use reduced_rips::{compute_ph1, Params, PointCloud2};
//!
//! let square = PointCloud2::new(vec![[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
//! let out = compute_ph1(&square, &Params::default()).unwrap();
//! assert_eq!(out.barcode.sorted_pairs(), vec![(1.0, 2f64.sqrt())]);
//! ```

pub mod avl;
pub mod barcode;
pub mod bench;
pub mod cloud;
pub mod datagen;
pub mod delaunay;
pub mod error;
pub mod graphs;
pub mod lune;
pub mod oracle;
pub mod reduction;
pub mod resource;
pub mod scalar;
pub mod simplex;
pub mod spatial;
pub mod stream;
pub mod unionfind;
pub mod verify;

pub use barcode::{barcode_summary, Barcode, BarcodeInterval, BarcodeSummary, RunStats};
pub use cloud::{label, PointCloud, PointId};
pub use error::{Error, Result};
pub use lune::Selection;
pub use reduction::{compute_ph1, Params, Ph1Output};
pub use scalar::Scalar;
pub use simplex::{total_order_less, SimplexKey};

pub type PointCloud2 = PointCloud<f64, 2>;
pub type PointCloud3 = PointCloud<f64, 3>;
pub type PointCloud2f = PointCloud<f32, 2>;
pub type PointCloud3f = PointCloud<f32, 3>;
pub type Barcode64 = Barcode<f64>;
pub type Barcode32 = Barcode<f32>;
