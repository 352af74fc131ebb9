//! Metric and conformal invariants of space curves, and their recovery from
//! inscribed polygons with circular edges.
//!
//! The pipeline runs curve → arc length → Frenet apparatus → conformal
//! invariants on the analytic side, and curve → sampled points → circle and
//! sphere angles → extrapolated estimators on the discrete side. The two
//! meet in [`rectifier`], which reports how fast the discrete side converges
//! to the analytic one.

pub mod conformal;
pub mod crossratio;
pub mod curve;
pub mod error;
pub mod frenet;
pub mod inversive;
pub mod numeric;
pub mod rectifier;
pub mod series;

pub use curve::{arclength_map, catalog_curve, ArcLengthMap, CurveSpec, Point3, Vector3};
pub use error::{Error, Result};
