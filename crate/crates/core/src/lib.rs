//! Hyperbolic cones over finite metric spaces, their level metrics, Cao's
//! graph approximation and the isoperimetric checks built on top of them.
//!
//! Everything geometric is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases below fix `f64`.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

mod scalar;

pub mod report;

pub mod amenability;
pub mod cao;
pub mod cone;
pub mod metric;
pub mod pipeline;

pub use scalar::Scalar;

pub type MetricSpace = metric::FiniteMetricSpace<f64>;
pub type ConePoint = cone::ConePoint<f64>;
pub type HyperbolicCone = cone::HyperbolicCone<f64>;
pub type ConeSample = cone::ConeSample<f64>;
pub type LevelMetric = cone::LevelMetric<f64>;
pub type CaoParams = cao::CaoParams<f64>;
pub type CaoGraph = cao::CaoGraph<f64>;
