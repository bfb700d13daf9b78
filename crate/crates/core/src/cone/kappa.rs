use rayon::prelude::*;
use serde::Serialize;

use super::ConeError;

/// Grid sizes and safety factor for [`kappa_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KappaGrid {
    pub s_max: f64,
    pub search_s: usize,
    pub search_t: usize,
    pub certify_s: usize,
    pub certify_t: usize,
    /// `kappa = (1 - safety) * kappa_search`.
    pub safety: f64,
}

impl Default for KappaGrid {
    fn default() -> Self {
        Self { s_max: 50.0, search_s: 512, search_t: 512, certify_s: 5120, certify_t: 5120, safety: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KappaEstimate {
    pub eps: f64,
    pub kappa: f64,
    /// Grid infimum before the safety factor.
    pub search_kappa: f64,
    /// `(s, t)` attaining the search infimum; `s = 0` means the `s -> 0` limit.
    pub argmin: (f64, f64),
    pub grid: KappaGrid,
    /// Least `g(s,t) - ln kappa` over the certification grid (`s > 0` nodes).
    pub certified_margin: f64,
    pub certified_nodes: u64,
}

/// `g(s,t) = (ln ln(1+t) - ln ln(1+e^-s t)) / s`; the constraint
/// `1 + e^-s t <= (1+t)^(kappa^-s)` reads `g(s,t) >= ln kappa`.
fn g(s: f64, t: f64) -> f64 {
    (t.ln_1p().ln() - ((-s).exp() * t).ln_1p().ln()) / s
}

/// `lim_{s -> 0} g(s,t) = t / ((1+t) ln(1+t))`.
fn g0(t: f64) -> f64 {
    t / ((1.0 + t) * t.ln_1p())
}

/// `kappa(eps)` with the default grids.
pub fn kappa(eps: f64) -> Result<KappaEstimate, ConeError> {
    kappa_with(eps, KappaGrid::default())
}

/// Grid search for the largest `kappa` with `1 + e^-s t <= (1+t)^(kappa^-s)` on
/// `s in [0, s_max]`, `t in [0, e^eps]`, then certification on a finer grid.
///
/// The search grid is `s = k s_max / search_s` for `k >= 1` together with the
/// analytic `s -> 0` column. Nodes with `s = 0` or `t = 0` hold with equality
/// for any `kappa` and are counted but not evaluated.
pub fn kappa_with(eps: f64, grid: KappaGrid) -> Result<KappaEstimate, ConeError> {
    if !(eps > 0.0) || !eps.is_finite() {
        return Err(ConeError::InvalidParameter(format!("eps must be positive, got {eps}")));
    }
    if grid.search_s == 0 || grid.search_t == 0 || grid.certify_s == 0 || grid.certify_t == 0 {
        return Err(ConeError::InvalidParameter("empty kappa grid".into()));
    }
    let t_max = eps.exp();
    let search_t = |j: usize| t_max * j as f64 / grid.search_t as f64;

    let limit = (1..=grid.search_t)
        .map(|j| (g0(search_t(j)), 0.0, search_t(j)))
        .fold((f64::INFINITY, 0.0, 0.0), min3);
    let best = (1..=grid.search_s)
        .into_par_iter()
        .map(|k| {
            let s = grid.s_max * k as f64 / grid.search_s as f64;
            (1..=grid.search_t)
                .map(|j| (g(s, search_t(j)), s, search_t(j)))
                .fold((f64::INFINITY, s, 0.0), min3)
        })
        .reduce(|| limit, min3);
    let (log_kappa, s_star, t_star) = min3(limit, best);
    let search_kappa = log_kappa.exp();
    let kappa = search_kappa * (1.0 - grid.safety);
    if !(kappa > 1.0) {
        return Err(ConeError::CertificationFailure { kappa, s: s_star, t: t_star });
    }

    let ln_k = kappa.ln();
    let cert_t = |j: usize| t_max * j as f64 / grid.certify_t as f64;
    let (margin, s_bad, t_bad) = (1..=grid.certify_s)
        .into_par_iter()
        .map(|k| {
            let s = grid.s_max * k as f64 / grid.certify_s as f64;
            (1..=grid.certify_t)
                .map(|j| (g(s, cert_t(j)) - ln_k, s, cert_t(j)))
                .fold((f64::INFINITY, s, 0.0), min3)
        })
        .reduce(|| (f64::INFINITY, 0.0, 0.0), min3);
    if !(margin >= 0.0) {
        return Err(ConeError::CertificationFailure { kappa, s: s_bad, t: t_bad });
    }
    Ok(KappaEstimate {
        eps,
        kappa,
        search_kappa,
        argmin: (s_star, t_star),
        grid,
        certified_margin: margin,
        certified_nodes: ((grid.certify_s + 1) * (grid.certify_t + 1)) as u64,
    })
}

fn min3(a: (f64, f64, f64), b: (f64, f64, f64)) -> (f64, f64, f64) {
    if b.0 < a.0 || (b.0 == a.0 && (b.1, b.2) < (a.1, a.2)) {
        b
    } else {
        a
    }
}
