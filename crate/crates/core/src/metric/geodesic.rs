use super::{check_index, Distances, MetricError};
use crate::Scalar;

/// Scale threshold of a space `(lambda, mu)`-quasi-isometric to one that is
/// coarsely proper above `r_b`: `lambda*mu + mu + r_b*lambda`.
pub fn qi_scale_transfer<T: Scalar>(lambda: T, mu: T, r_b: T) -> Result<T, MetricError> {
    if !(lambda >= T::one()) || !(mu >= T::zero()) || !r_b.is_finite() {
        return Err(MetricError::InvalidParameter(format!(
            "need lambda >= 1 and mu >= 0, got lambda = {lambda}, mu = {mu}, r_b = {r_b}"
        )));
    }
    Ok(lambda * mu + mu + r_b * lambda)
}

/// First sampled pair `(i, j)` (indices into `path`) breaking
/// `|s-t| - mu <= d(path[i], path[j]) <= |s-t| + mu`.
pub fn rough_geodesic_violation<T: Scalar, D: Distances<T> + ?Sized>(
    path: &[(T, usize)],
    mu: T,
    space: &D,
) -> Option<(usize, usize)> {
    let tol = T::metric_tol();
    for (i, &(s, p)) in path.iter().enumerate() {
        for (j, &(t, q)) in path.iter().enumerate().skip(i + 1) {
            let gap = (s - t).abs();
            let d = space.distance(p, q);
            if d < gap - mu - tol || d > gap + mu + tol {
                return Some((i, j));
            }
        }
    }
    None
}

/// Turns a sampled `(1, mu)`-quasi-geodesic from `x` to `y` on `[a, b]` into a
/// sampled `2mu`-rough geodesic on `[0, d(x,y)]`.
///
/// Times are shifted to start at 0. With `R = d(x,y)`: if the path ends before
/// `R` it is held at `y` up to time `R`; if it runs past `R` the samples at
/// times `>= R` are dropped and `(R, y)` is appended.
pub fn reparametrize_rough_geodesic<T: Scalar, D: Distances<T> + ?Sized>(
    path: &[(T, usize)],
    mu: T,
    space: &D,
) -> Result<Vec<(T, usize)>, MetricError> {
    let (Some(&(a, x)), Some(&(b, y))) = (path.first(), path.last()) else {
        return Err(MetricError::InvalidParameter("empty path".into()));
    };
    if !(mu >= T::zero()) {
        return Err(MetricError::InvalidParameter(format!("mu must be nonnegative, got {mu}")));
    }
    for (k, &(t, p)) in path.iter().enumerate() {
        check_index(p, space.size())?;
        if !t.is_finite() || (k > 0 && t < path[k - 1].0) {
            return Err(MetricError::InvalidParameter("sample times must be finite and nondecreasing".into()));
        }
    }
    if let Some((i, j)) = rough_geodesic_violation(path, mu, space) {
        return Err(MetricError::NotRoughGeodesic {
            i,
            j,
            gap: (path[j].0 - path[i].0).as_f64(),
            distance: space.distance(path[i].1, path[j].1).as_f64(),
            mu: mu.as_f64(),
        });
    }
    let big_r = space.distance(x, y);
    let span = b - a;
    let shifted = path.iter().map(|&(t, p)| (t - a, p));
    let mut out: Vec<(T, usize)>;
    if span <= big_r {
        out = shifted.collect();
        if span < big_r {
            out.push((big_r, y));
        }
    } else {
        out = shifted.take_while(|&(t, _)| t < big_r).collect();
        out.push((big_r, y));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{validate_metric, FiniteMetricSpace};

    fn line(points: &[f64]) -> FiniteMetricSpace<f64> {
        let rows: Vec<Vec<f64>> = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        validate_metric(&rows).unwrap()
    }

    #[test]
    fn scale_transfer_examples() {
        assert_eq!(qi_scale_transfer(1.0, 0.0, 1.0).unwrap(), 1.0);
        assert_eq!(qi_scale_transfer(2.0, 1.0, 1.0).unwrap(), 5.0);
        assert_eq!(qi_scale_transfer(1.0, 3.0, 0.0).unwrap(), 6.0);
        assert!(qi_scale_transfer(0.5, 0.0, 1.0).is_err());
        assert!(qi_scale_transfer(1.0, -1.0, 1.0).is_err());
    }

    #[test]
    fn identity_case() {
        let m = line(&[0.0, 1.0, 2.0, 3.0]);
        let path = vec![(0.0, 0), (1.0, 1), (2.0, 2), (3.0, 3)];
        let out = reparametrize_rough_geodesic(&path, 0.0, &m).unwrap();
        assert_eq!(out, path);
    }

    #[test]
    fn short_parameter_interval_is_extended() {
        // times run to 2.5 but d(x, y) = 3
        let m = line(&[0.0, 1.0, 2.0, 3.0]);
        let path = vec![(10.0, 0), (11.0, 1), (12.0, 2), (12.5, 3)];
        let out = reparametrize_rough_geodesic(&path, 0.5, &m).unwrap();
        assert_eq!(out.last(), Some(&(3.0, 3)));
        assert_eq!(out[0], (0.0, 0));
        assert_eq!(rough_geodesic_violation(&out, 1.0, &m), None);
    }

    #[test]
    fn long_parameter_interval_is_truncated() {
        let m = line(&[0.0, 1.0, 2.0, 3.0]);
        let path = vec![(0.0, 0), (1.4, 1), (2.4, 2), (3.4, 3)];
        let out = reparametrize_rough_geodesic(&path, 0.5, &m).unwrap();
        assert_eq!(out, vec![(0.0, 0), (1.4, 1), (2.4, 2), (3.0, 3)]);
        assert_eq!(rough_geodesic_violation(&out, 1.0, &m), None);
    }

    #[test]
    fn rejects_bad_input() {
        let m = line(&[0.0, 1.0, 5.0]);
        let bad = vec![(0.0, 0), (1.0, 1), (2.0, 2)];
        assert!(matches!(
            reparametrize_rough_geodesic(&bad, 0.5, &m),
            Err(MetricError::NotRoughGeodesic { i: 0, j: 2, .. })
        ));
        assert!(reparametrize_rough_geodesic::<f64, _>(&[], 0.5, &m).is_err());
    }
}
