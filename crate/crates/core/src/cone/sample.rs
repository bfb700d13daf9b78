use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{ConeError, ConePoint, HyperbolicCone};
use crate::metric::{Distances, FiniteMetricSpace};
use crate::Scalar;

/// A finite subset of the cone holding every stratum `Z x {i r0}` for
/// `i = 0..=depth`, plus optional extra points.
///
/// Strata come first, level-major: the point `(z, i r0)` has index
/// `i * |Z| + z`. Stratum heights are always computed as `T::from(i) * r0`, so
/// level membership is an exact comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct ConeSample<T> {
    cone: HyperbolicCone<T>,
    r0: T,
    depth: usize,
    points: Vec<ConePoint<T>>,
    levels: Vec<Option<usize>>,
}

impl<T: Scalar> ConeSample<T> {
    pub fn strata(cone: HyperbolicCone<T>, r0: T, depth: usize) -> Result<Self, ConeError> {
        if !(r0 > T::zero()) || !r0.is_finite() {
            return Err(ConeError::InvalidParameter(format!("level spacing must be positive, got {r0}")));
        }
        let n = cone.base().len();
        let mut points = Vec::with_capacity(n * (depth + 1));
        let mut levels = Vec::with_capacity(n * (depth + 1));
        for i in 0..=depth {
            let h = T::from_count(i) * r0;
            for z in 0..n {
                points.push(ConePoint { base: z, height: h });
                levels.push(Some(i));
            }
        }
        Ok(Self { cone, r0, depth, points, levels })
    }

    pub fn cone(&self) -> &HyperbolicCone<T> {
        &self.cone
    }

    pub fn base(&self) -> &FiniteMetricSpace<T> {
        self.cone.base()
    }

    pub fn r0(&self) -> T {
        self.r0
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[ConePoint<T>] {
        &self.points
    }

    pub fn point(&self, i: usize) -> ConePoint<T> {
        self.points[i]
    }

    /// Stratum index of point `i`, if it lies on one.
    pub fn level_of(&self, i: usize) -> Option<usize> {
        self.levels[i]
    }

    pub fn level_height(&self, i: usize) -> T {
        T::from_count(i) * self.r0
    }

    /// Indices of `S_{i r0}` ordered by base point.
    pub fn stratum(&self, i: usize) -> Option<std::ops::Range<usize>> {
        let n = self.base().len();
        (i <= self.depth).then(|| i * n..(i + 1) * n)
    }

    /// Index of the sampled point equal to `p`.
    pub fn index_of(&self, p: ConePoint<T>) -> Option<usize> {
        let n = self.base().len();
        if p.base >= n {
            return None;
        }
        let k = (p.height / self.r0).round();
        if let Some(i) = k.to_usize() {
            if i <= self.depth && self.level_height(i) == p.height {
                return Some(i * n + p.base);
            }
        }
        let extras = n * (self.depth + 1);
        (extras..self.points.len()).find(|&j| self.points[j] == p)
    }

    /// Adds points not already present; returns the index of each argument.
    pub fn insert(&mut self, extra: &[ConePoint<T>]) -> Result<Vec<usize>, ConeError> {
        let n = self.base().len();
        let mut out = Vec::with_capacity(extra.len());
        for &p in extra {
            if p.base >= n {
                return Err(ConeError::BaseOutOfRange { index: p.base, len: n });
            }
            let p = ConePoint::new(p.base, p.height)?;
            let idx = match self.index_of(p) {
                Some(j) => j,
                None => {
                    self.points.push(p);
                    self.levels.push(None);
                    self.points.len() - 1
                }
            };
            out.push(idx);
        }
        Ok(out)
    }

    /// Makes sure the whole layer `Z x {height}` is sampled; returns its
    /// indices ordered by base point.
    pub fn ensure_layer(&mut self, height: T) -> Result<Vec<usize>, ConeError> {
        let layer: Vec<ConePoint<T>> = (0..self.base().len()).map(|z| ConePoint { base: z, height }).collect();
        self.insert(&layer)
    }

    /// Indices of the full layer at `height`, if every base point is sampled there.
    pub fn layer(&self, height: T) -> Option<Vec<usize>> {
        (0..self.base().len())
            .map(|z| self.index_of(ConePoint { base: z, height }))
            .collect()
    }

    /// Points of height `>= r` (the complement of `B_r`).
    pub fn above(&self, r: T) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.points[i].height >= r).collect()
    }

    /// Points of `B_r`, i.e. of height `< r`.
    pub fn below(&self, r: T) -> Vec<usize> {
        (0..self.len()).filter(|&i| self.points[i].height < r).collect()
    }

    /// The sample cut at `max_height`: strata above it and higher extras are dropped.
    pub fn truncate(&self, max_height: T) -> Self {
        let mut depth = 0;
        while depth < self.depth && self.level_height(depth + 1) <= max_height {
            depth += 1;
        }
        let mut out = Self::strata(self.cone.clone(), self.r0, depth).expect("valid spacing");
        let extras: Vec<ConePoint<T>> = self.points[self.base().len() * (self.depth + 1)..]
            .iter()
            .copied()
            .filter(|p| p.height <= max_height)
            .collect();
        out.insert(&extras).expect("points from a valid sample");
        out
    }

    /// Largest nearest-neighbour `rho`-distance within `indices`.
    pub fn mesh(&self, indices: &[usize]) -> T {
        indices
            .iter()
            .map(|&i| {
                indices
                    .iter()
                    .filter(|&&j| j != i)
                    .map(|&j| self.distance(i, j))
                    .fold(T::infinity(), T::min)
            })
            .filter(|d| d.is_finite())
            .fold(T::zero(), T::max)
    }

    /// The sample as a validated finite metric space (exhaustive axiom scan).
    pub fn to_metric_space(&self) -> Result<FiniteMetricSpace<T>, ConeError> {
        let labels = self
            .points
            .iter()
            .map(|p| format!("{}@{}", self.base().label(p.base), p.height))
            .collect();
        Ok(FiniteMetricSpace::from_fn(labels, |i, j| self.distance(i, j))?)
    }

    pub fn to_file(&self) -> ConeSampleFile<T> {
        ConeSampleFile {
            z: BaseFile { labels: self.base().labels().to_vec(), matrix: self.base().rows() },
            diameter: self.cone.has_ambient_diameter().then(|| self.cone.diameter()),
            r0: self.r0,
            depth: self.depth,
            points: self.points.iter().map(|p| (p.base, p.height)).collect(),
        }
    }

    pub fn from_file(file: ConeSampleFile<T>) -> Result<Self, ConeError> {
        let z = FiniteMetricSpace::from_rows(file.z.labels, &file.z.matrix)?;
        let cone = match file.diameter {
            Some(d) => HyperbolicCone::with_diameter(z, d)?,
            None => HyperbolicCone::new(z)?,
        };
        let mut sample = Self::strata(cone, file.r0, file.depth)?;
        let n = sample.base().len();
        let mut seen = vec![false; n * (file.depth + 1)];
        let mut extras = Vec::new();
        for (base, height) in file.points {
            let p = ConePoint::new(base, height)?;
            match sample.index_of(p) {
                Some(j) if j < seen.len() => seen[j] = true,
                _ => extras.push(p),
            }
        }
        if let Some(missing) = seen.iter().position(|s| !s) {
            return Err(ConeError::MissingStratum(sample.point(missing).height.as_f64()));
        }
        sample.insert(&extras)?;
        Ok(sample)
    }

    pub fn save(&self, path: &Path) -> Result<(), ConeError> {
        let file = std::fs::File::create(path).map_err(|e| ConeError::Format(format!("{}: {e}", path.display())))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &self.to_file())
            .map_err(|e| ConeError::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, ConeError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConeError::Format(format!("{}: {e}", path.display())))?;
        let file: ConeSampleFile<T> = serde_json::from_str(&text).map_err(|e| ConeError::Format(e.to_string()))?;
        Self::from_file(file)
    }
}

impl<T: Scalar> Distances<T> for ConeSample<T> {
    fn size(&self) -> usize {
        self.points.len()
    }
    fn distance(&self, i: usize, j: usize) -> T {
        self.cone.rho(self.points[i], self.points[j])
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BaseFile<T> {
    pub labels: Vec<String>,
    pub matrix: Vec<Vec<T>>,
}

/// On-disk form of a [`ConeSample`].
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct ConeSampleFile<T> {
    #[serde(rename = "Z")]
    pub z: BaseFile<T>,
    /// `D` when it is not the diameter of `Z`.
    #[serde(rename = "D", default, skip_serializing_if = "Option::is_none")]
    pub diameter: Option<T>,
    pub r0: T,
    pub depth: usize,
    pub points: Vec<(usize, T)>,
}
