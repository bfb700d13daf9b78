use super::{FiniteMetricSpace, MetricError};
use crate::Scalar;

/// `n` equally spaced points on the unit circle with the arc-length metric.
pub fn circle_sample<T: Scalar>(n: usize) -> Result<FiniteMetricSpace<T>, MetricError> {
    let step = T::TAU() / T::from_count(n.max(1));
    let labels = (0..n).map(|i| format!("c{i}")).collect();
    FiniteMetricSpace::from_fn(labels, |i, j| {
        let k = i.abs_diff(j);
        T::from_count(k.min(n - k)) * step
    })
}

/// Left endpoints of the `2^depth` intervals left after `depth` rounds of
/// removing middle thirds from `[0, 1]`, with the euclidean metric.
pub fn cantor_sample<T: Scalar>(depth: u32) -> Result<FiniteMetricSpace<T>, MetricError> {
    if depth > 16 {
        return Err(MetricError::InvalidParameter(format!("cantor depth {depth} too large")));
    }
    let count = 1usize << depth;
    let mut points = Vec::with_capacity(count);
    let mut labels = Vec::with_capacity(count);
    for word in 0..count {
        let mut x = 0.0f64;
        let mut scale = 1.0f64;
        let mut label = String::from("k");
        for k in (0..depth).rev() {
            scale /= 3.0;
            let bit = (word >> k) & 1;
            x += 2.0 * scale * bit as f64;
            label.push(if bit == 1 { '2' } else { '0' });
        }
        points.push(T::lit(x));
        labels.push(label);
    }
    FiniteMetricSpace::from_fn(labels, |i, j| (points[i] - points[j]).abs())
}

/// `n` equally spaced points on `[0, 1]` and `n` on `[1 + gap, 2 + gap]`.
pub fn two_intervals<T: Scalar>(n: usize, gap: T) -> Result<FiniteMetricSpace<T>, MetricError> {
    if !(gap > T::zero()) {
        return Err(MetricError::InvalidParameter(format!("gap must be positive, got {gap}")));
    }
    let spacing = if n > 1 { T::one() / T::from_count(n - 1) } else { T::zero() };
    let mut points = Vec::with_capacity(2 * n);
    let mut labels = Vec::with_capacity(2 * n);
    for (side, offset) in [('a', T::zero()), ('b', T::one() + gap)] {
        for i in 0..n {
            points.push(offset + T::from_count(i) * spacing);
            labels.push(format!("{side}{i}"));
        }
    }
    FiniteMetricSpace::from_fn(labels, |i, j| (points[i] - points[j]).abs())
}

/// `n` points at mutual distance 1.
pub fn uniform_simplex<T: Scalar>(n: usize) -> Result<FiniteMetricSpace<T>, MetricError> {
    let labels = (0..n).map(|i| format!("s{i}")).collect();
    FiniteMetricSpace::from_fn(labels, |i, j| if i == j { T::zero() } else { T::one() })
}
