//! Numerical verification of curvature and complex-structure claims on
//! four-dimensional geometries.
//!
//! Fields are evaluated on second-order jets, so metric derivatives are exact
//! up to roundoff. Everything is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the bottom fix the precision.

pub mod catalog;
pub mod chart;
pub mod complex;
pub mod curvature;
pub mod error;
pub mod expr;
pub mod field;
pub mod forms;
pub mod frame;
pub mod geomfile;
pub mod jets;
pub mod lck;
pub mod linalg;
pub mod metric;
pub mod sampling;
pub mod scalar;
pub mod suite;
pub mod verdict;
pub mod weyl;

pub use catalog::{builtin, Claim, GeometryEntry, BUILTINS};
pub use chart::{Chart, ChartPoint};
pub use complex::AlmostComplexField;
pub use error::{GeometryError, Result};
pub use forms::KFormField;
pub use frame::FrameField;
pub use geomfile::{load_geometry_file, parse_geometry, GeomFileError};
pub use jets::{Jet1, Jet2, DIM};
pub use metric::{MetricField, Signature};
pub use scalar::Scalar;
pub use suite::{run, CheckKind, Report, RunConfig, Status, Tolerances};
pub use verdict::Verdict;

pub type Jet2f64 = Jet2<f64>;
pub type Jet2f32 = Jet2<f32>;
pub type Entry64 = GeometryEntry<f64>;
pub type Entry32 = GeometryEntry<f32>;
pub type Metric64 = MetricField<f64>;
pub type Metric32 = MetricField<f32>;
pub type Point64 = ChartPoint<f64>;
pub type Point32 = ChartPoint<f32>;
