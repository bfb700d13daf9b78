use rayon::prelude::*;
use serde::Serialize;

use super::{level_distances_from, project, ConeError, ConePoint, ConeSample};
use crate::Scalar;

/// Outcome of a ball-enumeration check: how many sampled points fell in the
/// ball and the largest value of the confined quantity against its bound.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfinementReport<T> {
    pub members: usize,
    pub worst: T,
    pub bound: T,
}

/// Every sampled `q` with `rho(p, q) < delta` has `|h(q) - h(p)| < delta`, and
/// the heights in the ball spread by less than `2 delta`.
pub fn ball_height_confinement<T: Scalar>(
    sample: &ConeSample<T>,
    p: ConePoint<T>,
    delta: T,
) -> Result<ConfinementReport<T>, ConeError> {
    if !(delta > T::zero()) {
        return Err(ConeError::InvalidParameter(format!("radius must be positive, got {delta}")));
    }
    let cone = sample.cone();
    let mut worst = T::zero();
    let (mut lo, mut hi) = (T::infinity(), T::neg_infinity());
    let mut members = 0;
    for (i, &q) in sample.points().iter().enumerate() {
        if !(cone.rho(p, q) < delta) {
            continue;
        }
        members += 1;
        let gap = (q.height - p.height).abs();
        if !(gap < delta) {
            return Err(ConeError::ConfinementViolation {
                witness: i,
                detail: format!("height gap {gap} >= radius {delta}"),
            });
        }
        worst = worst.max(gap);
        lo = lo.min(q.height);
        hi = hi.max(q.height);
        if !(hi - lo < T::lit(2.0) * delta) {
            return Err(ConeError::ConfinementViolation {
                witness: i,
                detail: format!("heights in the ball spread by {}", hi - lo),
            });
        }
    }
    Ok(ConfinementReport { members, worst, bound: delta })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ContractionReport<T> {
    pub t: T,
    pub pairs: u64,
    pub violations: u64,
    /// Largest `rho(pi_t p, pi_t q) - rho(p, q)` seen (may be negative).
    pub worst_excess: T,
    pub witness: Option<(usize, usize)>,
}

/// Scans every pair of sampled points at height `>= t` for
/// `rho(pi_t p, pi_t q) <= rho(p, q)`.
pub fn contraction_check<T: Scalar>(sample: &ConeSample<T>, t: T) -> ContractionReport<T> {
    let idx = sample.above(t);
    let cone = sample.cone();
    let tol = T::metric_tol();
    // (pairs, violations, worst excess, witness) per row
    type Row<T> = (u64, u64, T, Option<(usize, usize)>);
    let per_row: Vec<Row<T>> = (0..idx.len())
        .into_par_iter()
        .map(|a| {
            let p = sample.point(idx[a]);
            let mut acc = (0u64, 0u64, T::neg_infinity(), None);
            for &j in &idx[a + 1..] {
                let q = sample.point(j);
                let excess = cone.rho(project(p, t), project(q, t)) - cone.rho(p, q);
                acc.0 += 1;
                if excess > tol {
                    acc.1 += 1;
                }
                if excess > acc.2 {
                    acc.2 = excess;
                    acc.3 = Some((idx[a], j));
                }
            }
            acc
        })
        .collect();
    let mut report = ContractionReport { t, pairs: 0, violations: 0, worst_excess: T::neg_infinity(), witness: None };
    for (pairs, bad, worst, w) in per_row {
        report.pairs += pairs;
        report.violations += bad;
        if worst > report.worst_excess {
            report.worst_excess = worst;
            report.witness = w;
        }
    }
    report
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExpansionReport<T> {
    pub x: usize,
    pub y: usize,
    pub r: T,
    pub t: T,
    /// `rho_{r+t}(sigma_x(r+t), sigma_y(r+t))`
    pub lhs: T,
    /// `kappa^t rho_r(sigma_x(r), sigma_y(r))`
    pub rhs: T,
    pub slack: T,
    /// `lhs >= rhs` without slack (up to rounding).
    pub raw_pass: bool,
    pub pass: bool,
}

/// Compares level distances of the vertical rays over `x` and `y` at heights
/// `r` and `r + t`. Both layers must be sampled in full. The default slack is
/// twice the `rho`-mesh of the layer at `r + t`.
#[allow(clippy::too_many_arguments)]
pub fn level_expansion_check<T: Scalar>(
    sample: &ConeSample<T>,
    x: usize,
    y: usize,
    r: T,
    t: T,
    l: T,
    kappa: T,
    slack: Option<T>,
) -> Result<ExpansionReport<T>, ConeError> {
    if !(t >= T::zero()) || !(r >= T::zero()) {
        return Err(ConeError::InvalidParameter(format!("need r, t >= 0, got r = {r}, t = {t}")));
    }
    let top = r + t;
    let low_layer = sample.layer(r).ok_or(ConeError::MissingStratum(r.as_f64()))?;
    let top_layer = sample.layer(top).ok_or(ConeError::MissingStratum(top.as_f64()))?;
    let n = sample.base().len();
    for b in [x, y] {
        if b >= n {
            return Err(ConeError::BaseOutOfRange { index: b, len: n });
        }
    }
    let lhs = level_distances_from(sample, top, l, top_layer[x])[top_layer[y]];
    let low = level_distances_from(sample, r, l, low_layer[x])[low_layer[y]];
    let rhs = if low == T::zero() { T::zero() } else { kappa.powf(t) * low };
    let slack = slack.unwrap_or_else(|| T::lit(2.0) * sample.mesh(&top_layer));
    let tol = T::metric_tol() * (T::one() + rhs.abs().min(T::max_value()));
    let ge = |a: T, b: T| b.is_infinite() && a.is_infinite() || a >= b;
    let raw_pass = ge(lhs + tol, rhs);
    let pass = ge(lhs + slack + tol, rhs);
    Ok(ExpansionReport { x, y, r, t, lhs, rhs, slack, raw_pass, pass })
}

/// For `y = (p, r)` in the sample and `t >= 2l`: every sampled `z` in
/// `B((p, r+t), t/(2l))` has `r <= h(z) <= r + 2t` and `rho_r(y, pi_r z) < t/2`.
pub fn segment_confinement_check<T: Scalar>(
    sample: &ConeSample<T>,
    y: usize,
    t: T,
    l: T,
) -> Result<ConfinementReport<T>, ConeError> {
    if !(t >= T::lit(2.0) * l) {
        return Err(ConeError::InvalidParameter(format!("need t >= 2L, got t = {t}, L = {l}")));
    }
    let base = sample.point(y);
    let r = base.height;
    let centre = ConePoint { base: base.base, height: r + t };
    let radius = t / (T::lit(2.0) * l);
    let half = t / T::lit(2.0);
    let cone = sample.cone();
    let members: Vec<usize> =
        (0..sample.len()).filter(|&i| cone.rho(centre, sample.point(i)) < radius).collect();
    if members.is_empty() {
        return Ok(ConfinementReport { members: 0, worst: T::zero(), bound: half });
    }
    let level = level_distances_from(sample, r, l, y);
    let mut worst = T::zero();
    for &i in &members {
        let z = sample.point(i);
        if z.height < r || z.height > r + T::lit(2.0) * t {
            return Err(ConeError::ConfinementViolation {
                witness: i,
                detail: format!("height {} outside [{}, {}]", z.height, r, r + T::lit(2.0) * t),
            });
        }
        let foot = sample.index_of(project(z, r)).ok_or(ConeError::MissingStratum(r.as_f64()))?;
        let d = level[foot];
        if !(d < half) {
            return Err(ConeError::ConfinementViolation {
                witness: i,
                detail: format!("level distance {d} of the projection >= {half}"),
            });
        }
        worst = worst.max(d);
    }
    Ok(ConfinementReport { members: members.len(), worst, bound: half })
}
