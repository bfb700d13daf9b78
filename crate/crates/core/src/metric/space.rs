use rayon::prelude::*;

use super::{check_index, Distances, MetricError};
use crate::Scalar;

/// A labeled finite metric space with a validated distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace<T> {
    labels: Vec<String>,
    n: usize,
    dist: Vec<T>,
    diameter: T,
}

/// Validates a square matrix as a metric and labels its points `0..n`.
pub fn validate_metric<T: Scalar>(rows: &[Vec<T>]) -> Result<FiniteMetricSpace<T>, MetricError> {
    let labels = (0..rows.len()).map(|i| i.to_string()).collect();
    FiniteMetricSpace::from_rows(labels, rows)
}

impl<T: Scalar> FiniteMetricSpace<T> {
    pub fn from_rows(labels: Vec<String>, rows: &[Vec<T>]) -> Result<Self, MetricError> {
        let n = rows.len();
        for (row, r) in rows.iter().enumerate() {
            if r.len() != n {
                return Err(MetricError::NotSquare { row, len: r.len(), expected: n });
            }
        }
        let dist: Vec<T> = rows.iter().flat_map(|r| r.iter().copied()).collect();
        Self::from_flat(labels, n, dist)
    }

    /// Builds the space from a distance function, validating the result.
    pub fn from_fn(labels: Vec<String>, f: impl Fn(usize, usize) -> T) -> Result<Self, MetricError> {
        let n = labels.len();
        let dist = (0..n * n).map(|k| f(k / n, k % n)).collect();
        Self::from_flat(labels, n, dist)
    }

    fn from_flat(labels: Vec<String>, n: usize, dist: Vec<T>) -> Result<Self, MetricError> {
        if n == 0 {
            return Err(MetricError::Empty);
        }
        if labels.len() != n {
            return Err(MetricError::LabelCount { labels: labels.len(), n });
        }
        let at = |i: usize, j: usize| dist[i * n + j];
        let tol = T::metric_tol();
        for i in 0..n {
            for j in 0..n {
                if !at(i, j).is_finite() {
                    return Err(MetricError::NonFinite { i, j });
                }
            }
        }
        for i in 0..n {
            if at(i, i).abs() > tol {
                return Err(MetricError::ZeroDiagonalViolation { i, value: at(i, i).as_f64() });
            }
        }
        for i in 0..n {
            for j in 0..n {
                if at(i, j) < -tol {
                    return Err(MetricError::NegativeDistance { i, j, value: at(i, j).as_f64() });
                }
            }
        }
        for i in 0..n {
            for j in i + 1..n {
                if (at(i, j) - at(j, i)).abs() > tol {
                    return Err(MetricError::Asymmetry {
                        i,
                        j,
                        forward: at(i, j).as_f64(),
                        backward: at(j, i).as_f64(),
                    });
                }
                if at(i, j) <= tol {
                    return Err(MetricError::CoincidentPoints { i, j });
                }
            }
        }
        if let Some((excess, x, z, via)) = worst_triangle(n, &dist) {
            if excess > tol {
                return Err(MetricError::TriangleViolation { x, z, via, excess: excess.as_f64() });
            }
        }
        let mut dist = dist;
        for i in 0..n {
            dist[i * n + i] = T::zero();
            for j in i + 1..n {
                let m = (dist[i * n + j] + dist[j * n + i]) / T::lit(2.0);
                dist[i * n + j] = m;
                dist[j * n + i] = m;
            }
        }
        let diameter = dist.iter().copied().fold(T::zero(), T::max);
        Ok(Self { labels, n, dist, diameter })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    /// Distance between points `i` and `j`. Panics on out-of-range indices.
    #[inline]
    pub fn d(&self, i: usize, j: usize) -> T {
        self.dist[i * self.n + j]
    }

    pub fn checked_d(&self, i: usize, j: usize) -> Result<T, MetricError> {
        check_index(i, self.n)?;
        check_index(j, self.n)?;
        Ok(self.d(i, j))
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn rows(&self) -> Vec<Vec<T>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    /// The subspace on `indices`, in that order.
    pub fn subspace(&self, indices: &[usize]) -> Self {
        let m = indices.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in indices {
            for &j in indices {
                dist.push(self.d(i, j));
            }
        }
        let diameter = dist.iter().copied().fold(T::zero(), T::max);
        Self {
            labels: indices.iter().map(|&i| self.labels[i].clone()).collect(),
            n: m,
            dist,
            diameter,
        }
    }

    pub fn min_positive_distance(&self) -> Option<T> {
        (0..self.n)
            .flat_map(|i| (i + 1..self.n).map(move |j| (i, j)))
            .map(|(i, j)| self.d(i, j))
            .reduce(T::min)
    }

    /// Largest nearest-neighbour distance: the smallest step at which no
    /// point is isolated. Zero for a one-point space.
    pub fn covering_mesh(&self) -> T {
        (0..self.n)
            .map(|i| {
                (0..self.n)
                    .filter(|&j| j != i)
                    .map(|j| self.d(i, j))
                    .fold(T::infinity(), T::min)
            })
            .filter(|d| d.is_finite())
            .fold(T::zero(), T::max)
    }
}

impl<T: Scalar> Distances<T> for FiniteMetricSpace<T> {
    fn size(&self) -> usize {
        self.n
    }
    fn distance(&self, i: usize, j: usize) -> T {
        self.d(i, j)
    }
}

/// Largest `d(x,z) - d(x,via) - d(via,z)` over all triples, with the triple.
fn worst_triangle<T: Scalar>(n: usize, dist: &[T]) -> Option<(T, usize, usize, usize)> {
    let at = |i: usize, j: usize| dist[i * n + j];
    (0..n)
        .into_par_iter()
        .filter_map(|x| {
            let mut best: Option<(T, usize, usize, usize)> = None;
            for z in 0..n {
                for via in 0..n {
                    let excess = at(x, z) - at(x, via) - at(via, z);
                    if best.is_none_or(|b| excess > b.0) {
                        best = Some((excess, x, z, via));
                    }
                }
            }
            best
        })
        .reduce_with(|a, b| {
            // ties resolve to the lexicographically smallest triple
            if b.0 > a.0 || (b.0 == a.0 && (b.1, b.2, b.3) < (a.1, a.2, a.3)) {
                b
            } else {
                a
            }
        })
}
