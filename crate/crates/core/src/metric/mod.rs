//! Finite metric spaces and the coarse-geometry toolkit built on them:
//! validation, Gromov products, four-point hyperbolicity, coarse
//! components, maximal nets, covering numbers and rough geodesics.

mod components;
mod generators;
mod geodesic;
mod hyperbolicity;
pub mod io;
mod nets;
mod space;

pub use components::{coarse_components, CoarsePartition};
pub use generators::{cantor_sample, circle_sample, two_intervals, uniform_simplex};
pub use geodesic::{qi_scale_transfer, reparametrize_rough_geodesic, rough_geodesic_violation};
pub use hyperbolicity::{
    gromov_product, hyperbolicity_delta, HyperbolicityOptions, HyperbolicityReport,
};
pub use nets::{
    covering_number, estimate_properness_scale, greedy_cover_count, maximal_net,
    quasilattice_check, separation_violation, uncovered_point, CoveringProfile, Net,
    QuasiLatticeReport, COVER_GRID_STEPS_PER_OCTAVE,
};
pub use space::{validate_metric, FiniteMetricSpace};

use thiserror::Error;

use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("empty metric space")]
    Empty,
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    #[error("{labels} labels for {n} points")]
    LabelCount { labels: usize, n: usize },
    #[error("non-finite distance at ({i}, {j})")]
    NonFinite { i: usize, j: usize },
    #[error("d({i},{i}) = {value} is not zero")]
    ZeroDiagonalViolation { i: usize, value: f64 },
    #[error("negative distance d({i},{j}) = {value}")]
    NegativeDistance { i: usize, j: usize, value: f64 },
    #[error("asymmetric distances: d({i},{j}) = {forward} but d({j},{i}) = {backward}")]
    Asymmetry { i: usize, j: usize, forward: f64, backward: f64 },
    #[error("distinct points {i} and {j} are at distance zero")]
    CoincidentPoints { i: usize, j: usize },
    #[error("triangle inequality fails: d({x},{z}) exceeds d({x},{via}) + d({via},{z}) by {excess}")]
    TriangleViolation { x: usize, z: usize, via: usize, excess: f64 },
    #[error("index {index} out of bounds for {len} points")]
    IndexOutOfBounds { index: usize, len: usize },
    #[error("{n} points exceed the exhaustive-scan cap of {cap}")]
    SampleTooLarge { n: usize, cap: usize },
    #[error("point {witness} is at distance {distance} >= {mu} from the subset")]
    NotCobounded { witness: usize, distance: f64, mu: f64 },
    #[error("samples {i} and {j} violate the rough-geodesic bounds (|s-t| = {gap}, d = {distance}, mu = {mu})")]
    NotRoughGeodesic { i: usize, j: usize, gap: f64, distance: f64, mu: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("parse error: {0}")]
    Parse(String),
}

/// Anything that hands out pairwise distances between `size()` indexed points.
///
/// Distances may be `+inf` (level metrics across coarse components).
pub trait Distances<T: Scalar>: Sync {
    fn size(&self) -> usize;
    fn distance(&self, i: usize, j: usize) -> T;

    /// Distance from `x` to a set; `+inf` for the empty set.
    fn distance_to_set(&self, x: usize, set: &[usize]) -> T {
        set.iter()
            .map(|&y| self.distance(x, y))
            .fold(T::infinity(), T::min)
    }
}

impl<T: Scalar, D: Distances<T> + ?Sized> Distances<T> for &D {
    fn size(&self) -> usize {
        (**self).size()
    }
    fn distance(&self, i: usize, j: usize) -> T {
        (**self).distance(i, j)
    }
}

/// A view of `inner` restricted to (and re-indexed by) `indices`.
#[derive(Debug, Clone)]
pub struct Restricted<'a, D: ?Sized> {
    inner: &'a D,
    indices: Vec<usize>,
}

impl<'a, D: ?Sized> Restricted<'a, D> {
    pub fn new(inner: &'a D, indices: Vec<usize>) -> Self {
        Self { inner, indices }
    }

    /// Index in the ambient space of the `k`-th restricted point.
    pub fn ambient(&self, k: usize) -> usize {
        self.indices[k]
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }
}

impl<T: Scalar, D: Distances<T> + ?Sized> Distances<T> for Restricted<'_, D> {
    fn size(&self) -> usize {
        self.indices.len()
    }
    fn distance(&self, i: usize, j: usize) -> T {
        self.inner.distance(self.indices[i], self.indices[j])
    }
}

pub(crate) fn check_index(index: usize, len: usize) -> Result<(), MetricError> {
    if index < len {
        Ok(())
    } else {
        Err(MetricError::IndexOutOfBounds { index, len })
    }
}
