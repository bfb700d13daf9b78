//! Cao's graph on the hyperbolic cone: parameter selection, per-level nets,
//! regions, the edge rule and the checks run against the built graph.

mod checks;
mod graph;

pub use checks::{
    asymmetry_check, coboundedness_check, degree_stats, edge_length_check, edge_rule_check, graph_metric,
    laplacian, laplacian_check, laplacian_height, level_metrics, level_net_checks, lipschitz_check, qi_check, random_pairs,
    region_multiplicity, region_multiplicity_check, separation_check, valency_check, verify_graph, AsymmetryReport,
    DegreeStats, HopDistances, LaplacianReport, QiReport,
};
pub use graph::{build_cao_graph, CaoGraph, CaoVertex, GraphFile, NetOrder, VertexFile};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::{ConeError, ConeSample, HyperbolicCone};
use crate::metric::{covering_number, MetricError};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CaoError {
    #[error("infeasible parameters: {reason}")]
    InfeasibleParams { reason: String, required_mesh: Option<f64> },
    #[error("the sample has no stratum at level {0}")]
    EmptyLevel(usize),
    #[error("vertex {0} has no neighbours")]
    IsolatedVertex(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed graph: {0}")]
    Format(String),
    #[error(transparent)]
    Cone(#[from] ConeError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// Constants of the graph construction. `n_small` and `n_big` are measured
/// covering numbers `N(10 delta, delta/c)` and `N(10 r0, delta/c)` of the sample.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CaoParams<T> {
    pub mu: T,
    #[serde(rename = "L")]
    pub l: T,
    pub c: T,
    pub delta: T,
    pub r0: T,
    pub r_b: T,
    pub kappa: T,
    #[serde(rename = "N_small")]
    pub n_small: usize,
    #[serde(rename = "N_big")]
    pub n_big: usize,
    pub margin: T,
}

impl<T: Scalar> CaoParams<T> {
    /// `r0 / 3 > delta > c (r_b + 1)`
    pub fn theta0(&self) -> bool {
        self.r0 / T::lit(3.0) > self.delta && self.delta > self.c * (self.r_b + T::one())
    }

    /// `kappa^r0 > 8 delta N_small`, compared in logarithms.
    pub fn theta1(&self) -> bool {
        self.r0 * self.kappa.ln() > (T::lit(8.0) * self.delta * T::from_count(self.n_small)).ln()
    }

    pub fn validate(&self) -> Result<(), CaoError> {
        if !(self.mu >= T::zero()) || !self.mu.is_finite() {
            return Err(CaoError::InvalidParameter(format!("mu must be >= 0, got {}", self.mu)));
        }
        if !(self.kappa > T::one()) {
            return Err(CaoError::InvalidParameter(format!("kappa must exceed 1, got {}", self.kappa)));
        }
        if !self.theta0() {
            return Err(CaoError::InfeasibleParams {
                reason: format!(
                    "r0/3 > delta > c(r_b+1) fails: r0 = {}, delta = {}, c = {}, r_b = {}",
                    self.r0, self.delta, self.c, self.r_b
                ),
                required_mesh: None,
            });
        }
        if !self.theta1() {
            return Err(CaoError::InfeasibleParams {
                reason: format!(
                    "kappa^r0 > 8 delta N_small fails: r0 ln kappa = {}, ln(8 delta N_small) = {}",
                    self.r0 * self.kappa.ln(),
                    (T::lit(8.0) * self.delta * T::from_count(self.n_small)).ln()
                ),
                required_mesh: None,
            });
        }
        Ok(())
    }

    /// Least `r0` satisfying both constraints for the current `delta` and
    /// `N_small`, inflated by the margin.
    pub fn required_r0(&self) -> T {
        let m = T::one() + self.margin;
        let from_theta1 = (T::lit(8.0) * self.delta * T::from_count(self.n_small)).ln() / self.kappa.ln();
        (T::lit(3.0) * self.delta * m).max(from_theta1 * m)
    }
}

/// Knobs for [`select_params`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ParamOptions<T> {
    pub margin: T,
    pub max_rounds: usize,
    /// Fixed `delta` instead of `c (r_b + 1)(1 + margin)`.
    pub delta: Option<T>,
    /// Fixed `r0`; skips the search but still validates.
    pub r0: Option<T>,
}

impl<T: Scalar> Default for ParamOptions<T> {
    fn default() -> Self {
        Self { margin: T::lit(0.05), max_rounds: 12, delta: None, r0: None }
    }
}

/// The sample the graph is built on: strata `Z x {i r0}` and vertex layers
/// `Z x {i r0 + delta}` for `i = 0..=depth`.
pub fn cao_sample<T: Scalar>(
    cone: HyperbolicCone<T>,
    r0: T,
    delta: T,
    depth: usize,
) -> Result<ConeSample<T>, CaoError> {
    let mut sample = ConeSample::strata(cone, r0, depth)?;
    for i in 0..=depth {
        sample.ensure_layer(sample.level_height(i) + delta)?;
    }
    Ok(sample)
}

fn base_params<T: Scalar>(mu: T, r_b: T, kappa: T, margin: T, delta: Option<T>) -> Result<CaoParams<T>, CaoError> {
    if !(mu >= T::zero()) || !mu.is_finite() {
        return Err(CaoError::InvalidParameter(format!("mu must be >= 0, got {mu}")));
    }
    if !(r_b >= T::zero()) || !r_b.is_finite() {
        return Err(CaoError::InvalidParameter(format!("r_b must be >= 0, got {r_b}")));
    }
    if !(margin > T::zero()) {
        return Err(CaoError::InvalidParameter(format!("margin must be positive, got {margin}")));
    }
    if !(kappa > T::one()) {
        return Err(CaoError::InvalidParameter(format!("kappa must exceed 1, got {kappa}")));
    }
    let l = T::one() + T::lit(2.0) * mu;
    let c = T::lit(2.0) * l;
    let delta = delta.unwrap_or(c * (r_b + T::one()) * (T::one() + margin));
    Ok(CaoParams { mu, l, c, delta, r0: T::zero(), r_b, kappa, n_small: 0, n_big: 0, margin })
}

/// The stratum at height 0 must resolve radius `delta / c`; otherwise the
/// covering numbers of the sample say nothing about the cone.
fn check_resolution<T: Scalar>(sample: &ConeSample<T>, p: &CaoParams<T>) -> Result<(), CaoError> {
    let stratum: Vec<usize> = sample.stratum(0).expect("level 0").collect();
    let mesh = sample.mesh(&stratum);
    let scale = p.delta / p.c;
    if mesh >= scale {
        // rho((x,0),(y,0)) = 2 log(1 + d/D) < delta/c  iff  d < D (e^{delta/2c} - 1)
        let required = sample.cone().diameter() * ((scale / T::lit(2.0)).exp() - T::one());
        return Err(CaoError::InfeasibleParams {
            reason: format!("the base sample is too coarse: level-0 mesh {mesh} >= delta/c = {scale}"),
            required_mesh: Some(required.as_f64()),
        });
    }
    Ok(())
}

/// One selection step on a given sample: `delta = c (r_b + 1)(1 + margin)`,
/// `N_small` measured on the sample, `r0` the least value meeting both
/// constraints (inflated by the margin), `N_big` measured at that `r0`.
pub fn choose_params<T: Scalar>(
    sample: &ConeSample<T>,
    mu: T,
    r_b: T,
    kappa: T,
    margin: T,
) -> Result<CaoParams<T>, CaoError> {
    let mut p = base_params(mu, r_b, kappa, margin, None)?;
    check_resolution(sample, &p)?;
    p.n_small = covering_number(sample, T::lit(10.0) * p.delta, p.delta / p.c)?.n;
    p.r0 = p.required_r0();
    p.n_big = covering_number(sample, T::lit(10.0) * p.r0, p.delta / p.c)?.n;
    p.validate()?;
    Ok(p)
}

/// Parameters together with the sample they were measured on.
///
/// `N_small` depends on the sample, which depends on `r0`, so `r0` is raised
/// until the value measured on `cao_sample(cone, r0, delta, depth)` is met.
pub fn select_params<T: Scalar>(
    cone: &HyperbolicCone<T>,
    mu: T,
    r_b: T,
    kappa: T,
    depth: usize,
    opts: ParamOptions<T>,
) -> Result<(CaoParams<T>, ConeSample<T>), CaoError> {
    if depth == 0 {
        return Err(CaoError::InvalidParameter("depth must be at least 1".into()));
    }
    let mut p = base_params(mu, r_b, kappa, opts.margin, opts.delta)?;
    if !(p.delta > T::zero()) {
        return Err(CaoError::InvalidParameter(format!("delta must be positive, got {}", p.delta)));
    }
    let small = |s: &ConeSample<T>, p: &CaoParams<T>| covering_number(s, T::lit(10.0) * p.delta, p.delta / p.c);
    let finish = |mut p: CaoParams<T>, sample: ConeSample<T>| -> Result<_, CaoError> {
        p.n_big = covering_number(&sample, T::lit(10.0) * p.r0, p.delta / p.c)?.n;
        p.validate()?;
        Ok((p, sample))
    };

    if let Some(r0) = opts.r0 {
        p.r0 = r0;
        let sample = cao_sample(cone.clone(), r0, p.delta, depth)?;
        check_resolution(&sample, &p)?;
        p.n_small = small(&sample, &p)?.n;
        return finish(p, sample);
    }

    p.r0 = T::lit(3.0) * p.delta * (T::one() + p.margin);
    for round in 0..opts.max_rounds {
        let sample = cao_sample(cone.clone(), p.r0, p.delta, depth)?;
        check_resolution(&sample, &p)?;
        p.n_small = small(&sample, &p)?.n;
        let need = p.required_r0();
        log::debug!("round {round}: r0 = {}, N_small = {}, required r0 = {need}", p.r0, p.n_small);
        if need <= p.r0 {
            return finish(p, sample);
        }
        p.r0 = need;
    }
    Err(CaoError::InfeasibleParams {
        reason: format!("r0 did not settle after {} rounds (last r0 = {})", opts.max_rounds, p.r0),
        required_mesh: None,
    })
}

/// `D (e^{L/2} - 1) e^{-h}`: base spacing below which neighbouring points of
/// `Z x {h}` are within one step `L`, i.e. the level metric at height `h`
/// can be connected at all.
pub fn connecting_mesh<T: Scalar>(diameter: T, l: T, height: T) -> T {
    diameter * ((l / T::lit(2.0)).exp() - T::one()) * (-height).exp()
}
