//! The hyperbolic cone `Z x [0, inf)` over a finite metric space, its
//! Bonk–Schramm parametrisation, sampled strata and level metrics.

mod checks;
mod kappa;
mod level;
mod sample;

pub use checks::{
    ball_height_confinement, contraction_check, level_expansion_check, segment_confinement_check,
    ConfinementReport, ContractionReport, ExpansionReport,
};
pub use kappa::{kappa, kappa_with, KappaEstimate, KappaGrid};
pub use level::{level_distances_from, LevelMetric};
pub use sample::{ConeSample, ConeSampleFile};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::{FiniteMetricSpace, MetricError};
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ConeError {
    #[error("the base space has diameter zero")]
    DegenerateSpace,
    #[error("height {0} is negative or not finite")]
    BadHeight(f64),
    #[error("scale {scale} outside (0, {max}]")]
    ScaleOutOfRange { scale: f64, max: f64 },
    #[error("base point {index} out of range for {len} points")]
    BaseOutOfRange { index: usize, len: usize },
    #[error("sample has no stratum at height {0}")]
    MissingStratum(f64),
    #[error("confinement violated by sample point {witness}: {detail}")]
    ConfinementViolation { witness: usize, detail: String },
    #[error("kappa = {kappa} fails the defining inequality at s = {s}, t = {t}")]
    CertificationFailure { kappa: f64, s: f64, t: f64 },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed cone sample: {0}")]
    Format(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A point `(x, t)` of the cone: base index into `Z` and height `t >= 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConePoint<T> {
    pub base: usize,
    pub height: T,
}

impl<T: Scalar> ConePoint<T> {
    pub fn new(base: usize, height: T) -> Result<Self, ConeError> {
        if !(height >= T::zero()) || !height.is_finite() {
            return Err(ConeError::BadHeight(height.as_f64()));
        }
        Ok(Self { base, height })
    }
}

/// `pi_t`: same base, height replaced by `t`.
pub fn project<T: Scalar>(p: ConePoint<T>, t: T) -> ConePoint<T> {
    ConePoint { base: p.base, height: t }
}

pub fn height<T: Scalar>(p: ConePoint<T>) -> T {
    p.height
}

/// The vertical ray over `x`, sampled at `heights`.
pub fn sigma_ray<T: Scalar>(x: usize, heights: &[T]) -> Result<Vec<ConePoint<T>>, ConeError> {
    heights.iter().map(|&h| ConePoint::new(x, h)).collect()
}

/// The cone over a base space of positive diameter.
#[derive(Debug, Clone, PartialEq)]
pub struct HyperbolicCone<T> {
    z: FiniteMetricSpace<T>,
    diameter: T,
    ln_diameter: T,
}

impl<T: Scalar> HyperbolicCone<T> {
    pub fn new(z: FiniteMetricSpace<T>) -> Result<Self, ConeError> {
        if !(z.diameter() > T::zero()) {
            return Err(ConeError::DegenerateSpace);
        }
        let diameter = z.diameter();
        Ok(Self { z, diameter, ln_diameter: diameter.ln() })
    }

    /// The cone over `z` with `D` replaced by `diameter`, e.g. the diameter of
    /// an ambient space `z` was cut from. A single point is allowed here.
    pub fn with_diameter(z: FiniteMetricSpace<T>, diameter: T) -> Result<Self, ConeError> {
        if !(diameter > T::zero()) || !diameter.is_finite() {
            return Err(ConeError::InvalidParameter(format!("diameter must be positive, got {diameter}")));
        }
        if z.diameter() > diameter * (T::one() + T::metric_tol()) {
            return Err(ConeError::InvalidParameter(format!(
                "diameter {diameter} is below the base diameter {}",
                z.diameter()
            )));
        }
        Ok(Self { z, diameter, ln_diameter: diameter.ln() })
    }

    /// Whether `D` differs from the diameter of the base.
    pub fn has_ambient_diameter(&self) -> bool {
        self.diameter != self.z.diameter()
    }

    pub fn base(&self) -> &FiniteMetricSpace<T> {
        &self.z
    }

    pub fn diameter(&self) -> T {
        self.diameter
    }

    /// `rho((x,t),(y,s)) = 2 log((d + max(e^-t, e^-s) D) / (e^-(s+t)/2 D))`,
    /// evaluated as `|s-t| + 2 softplus(log(d/D) + min(s,t))`.
    #[inline]
    pub fn rho(&self, p: ConePoint<T>, q: ConePoint<T>) -> T {
        let gap = (p.height - q.height).abs();
        let d = self.z.d(p.base, q.base);
        if d == T::zero() {
            return gap;
        }
        gap + T::lit(2.0) * (d.ln() - self.ln_diameter + p.height.min(q.height)).softplus()
    }

    pub fn checked_rho(&self, p: ConePoint<T>, q: ConePoint<T>) -> Result<T, ConeError> {
        for b in [p.base, q.base] {
            if b >= self.z.len() {
                return Err(ConeError::BaseOutOfRange { index: b, len: self.z.len() });
            }
        }
        for h in [p.height, q.height] {
            if !(h >= T::zero()) || !h.is_finite() {
                return Err(ConeError::BadHeight(h.as_f64()));
            }
        }
        Ok(self.rho(p, q))
    }

    /// Bonk–Schramm distance between `(x, t)` and `(y, s)` for scales in `(0, D]`:
    /// `2 log((d(x,y) + max(t,s)) / sqrt(ts))`.
    pub fn bs_metric(&self, p: (usize, T), q: (usize, T)) -> Result<T, ConeError> {
        self.check_scale(p.1)?;
        self.check_scale(q.1)?;
        let d = self.z.checked_d(p.0, q.0)?;
        Ok(T::lit(2.0) * ((d + p.1.max(q.1)).ln() - (p.1.ln() + q.1.ln()) / T::lit(2.0)))
    }

    /// `(x, t) -> (x, log D - log t)`.
    pub fn bs_isometry(&self, p: (usize, T)) -> Result<ConePoint<T>, ConeError> {
        self.check_scale(p.1)?;
        // clamp the rounding below zero at t = D
        Ok(ConePoint { base: p.0, height: (self.ln_diameter - p.1.ln()).max(T::zero()) })
    }

    fn check_scale(&self, t: T) -> Result<(), ConeError> {
        if t > T::zero() && t <= self.diameter() {
            Ok(())
        } else {
            Err(ConeError::ScaleOutOfRange { scale: t.as_f64(), max: self.diameter().as_f64() })
        }
    }
}

/// `rho(p, q)` on the cone over `z`.
pub fn cone_metric<T: Scalar>(p: ConePoint<T>, q: ConePoint<T>, z: &FiniteMetricSpace<T>) -> Result<T, ConeError> {
    if !(z.diameter() > T::zero()) {
        return Err(ConeError::DegenerateSpace);
    }
    HyperbolicCone::new(z.clone())?.checked_rho(p, q)
}
