use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{io_err, PipelineError};
use crate::metric::io::{load_distance_matrix, load_point_cloud, PointMetric};
use crate::metric::{cantor_sample, circle_sample, two_intervals, uniform_simplex, FiniteMetricSpace};

/// Settings for a run. A config file holds `key = value` lines with the
/// field names as keys; `#` starts a comment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// A file path or a generator spec such as `gen:circle:64`.
    pub input: String,
    /// Read `input` as a point cloud under this metric instead of a distance matrix.
    pub points: Option<String>,
    pub mu: f64,
    pub r_b: Option<f64>,
    /// Scale of the coarse components; defaults to 1.5 times the covering mesh.
    pub eps: Option<f64>,
    pub delta: Option<f64>,
    pub r0: Option<f64>,
    pub depth: usize,
    /// Seed for the net visiting order; ascending order when absent.
    pub seed: Option<u64>,
    pub tolerance: f64,
    pub out: PathBuf,
    pub qi_pairs: usize,
    pub check_seed: u64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            input: String::new(),
            points: None,
            mu: 0.0,
            r_b: None,
            eps: None,
            delta: None,
            r0: None,
            depth: 5,
            seed: None,
            tolerance: 1e-9,
            out: PathBuf::from("coarselab-out"),
            qi_pairs: 200,
            check_seed: 0,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, PipelineError> {
    value.parse().map_err(|_| PipelineError::Config(format!("bad value for {key}: {value:?}")))
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), PipelineError> {
        let none = value.is_empty() || value == "none";
        match key {
            "input" => self.input = value.to_string(),
            "points" => self.points = (!none).then(|| value.to_string()),
            "mu" => self.mu = parse(key, value)?,
            "r_b" => self.r_b = if none { None } else { Some(parse(key, value)?) },
            "eps" => self.eps = if none { None } else { Some(parse(key, value)?) },
            "delta" => self.delta = if none { None } else { Some(parse(key, value)?) },
            "r0" => self.r0 = if none { None } else { Some(parse(key, value)?) },
            "depth" => self.depth = parse(key, value)?,
            "seed" => self.seed = if none { None } else { Some(parse(key, value)?) },
            "tolerance" => self.tolerance = parse(key, value)?,
            "out" => self.out = PathBuf::from(value),
            "qi_pairs" => self.qi_pairs = parse(key, value)?,
            "check_seed" => self.check_seed = parse(key, value)?,
            other => return Err(PipelineError::Config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), PipelineError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| PipelineError::Config(format!("line {}: expected key = value", n + 1)))?;
            self.set(k.trim(), v.trim())?;
        }
        Ok(())
    }

    pub fn from_file(path: &Path) -> Result<Self, PipelineError> {
        let mut cfg = Self::default();
        cfg.apply_text(&std::fs::read_to_string(path).map_err(io_err(path))?)?;
        Ok(cfg)
    }

    pub fn check(&self) -> Result<(), PipelineError> {
        if self.input.is_empty() {
            return Err(PipelineError::Config("no input given".into()));
        }
        if self.depth < 1 {
            return Err(PipelineError::Config("depth must be at least 1".into()));
        }
        if !(self.tolerance > 0.0) {
            return Err(PipelineError::Config(format!("tolerance must be positive, got {}", self.tolerance)));
        }
        if !(self.mu >= 0.0) || !self.mu.is_finite() {
            return Err(PipelineError::Config(format!("mu must be >= 0, got {}", self.mu)));
        }
        for (name, v) in [("r_b", self.r_b), ("eps", self.eps), ("delta", self.delta), ("r0", self.r0)] {
            if let Some(v) = v {
                if !(v >= 0.0) || !v.is_finite() || (name != "r_b" && v == 0.0) {
                    return Err(PipelineError::Config(format!("bad {name}: {v}")));
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Generator {
    Circle(usize),
    Cantor(u32),
    TwoIntervals(usize, f64),
    Simplex(usize),
}

impl Generator {
    pub fn generate(self) -> Result<FiniteMetricSpace<f64>, PipelineError> {
        Ok(match self {
            Generator::Circle(n) => circle_sample(n)?,
            Generator::Cantor(d) => cantor_sample(d)?,
            Generator::TwoIntervals(n, gap) => two_intervals(n, gap)?,
            Generator::Simplex(n) => uniform_simplex(n)?,
        })
    }
}

/// `gen:circle:N`, `gen:cantor:DEPTH`, `gen:two_intervals:N[:GAP]` (gap 1) or `gen:simplex:N`.
pub fn parse_generator(spec: &str) -> Result<Generator, PipelineError> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || PipelineError::Parse(format!("bad generator spec {spec:?}"));
    let num = |s: &str| s.parse::<usize>().map_err(|_| bad());
    match parts.as_slice() {
        ["gen", "circle", n] => Ok(Generator::Circle(num(n)?)),
        ["gen", "cantor", d] => Ok(Generator::Cantor(d.parse().map_err(|_| bad())?)),
        ["gen", "two_intervals", n] => Ok(Generator::TwoIntervals(num(n)?, 1.0)),
        ["gen", "two_intervals", n, g] => Ok(Generator::TwoIntervals(num(n)?, g.parse().map_err(|_| bad())?)),
        ["gen", "simplex", n] => Ok(Generator::Simplex(num(n)?)),
        _ => Err(bad()),
    }
}

pub fn load_input(cfg: &RunConfig) -> Result<FiniteMetricSpace<f64>, PipelineError> {
    if cfg.input.starts_with("gen:") {
        return parse_generator(&cfg.input)?.generate();
    }
    let path = Path::new(&cfg.input);
    if !path.exists() {
        return Err(PipelineError::Parse(format!("{}: no such file", path.display())));
    }
    Ok(match &cfg.points {
        Some(m) => {
            let metric: PointMetric = m.parse().map_err(|e: crate::metric::MetricError| PipelineError::Parse(e.to_string()))?;
            load_point_cloud(path, metric)?
        }
        None => load_distance_matrix(path)?,
    })
}
