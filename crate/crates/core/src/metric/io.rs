//! CSV readers and writers for distance matrices and point clouds.

use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use super::{FiniteMetricSpace, MetricError};
use crate::Scalar;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PointMetric {
    Euclidean,
    Chebyshev,
    Manhattan,
}

impl FromStr for PointMetric {
    type Err = MetricError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "euclidean" | "l2" => Ok(Self::Euclidean),
            "chebyshev" | "linf" => Ok(Self::Chebyshev),
            "manhattan" | "l1" => Ok(Self::Manhattan),
            other => Err(MetricError::Parse(format!("unknown point metric '{other}'"))),
        }
    }
}

impl fmt::Display for PointMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Euclidean => "euclidean",
            Self::Chebyshev => "chebyshev",
            Self::Manhattan => "manhattan",
        })
    }
}

impl PointMetric {
    pub fn eval<T: Scalar>(self, a: &[T], b: &[T]) -> T {
        let diffs = a.iter().zip(b).map(|(&x, &y)| (x - y).abs());
        match self {
            Self::Euclidean => diffs.map(|d| d * d).sum::<T>().sqrt(),
            Self::Chebyshev => diffs.fold(T::zero(), T::max),
            Self::Manhattan => diffs.sum(),
        }
    }
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(input)
}

fn records<R: Read>(input: R) -> Result<Vec<csv::StringRecord>, MetricError> {
    reader(input)
        .records()
        .map(|r| r.map_err(|e| MetricError::Parse(e.to_string())))
        .collect()
}

fn number<T: Scalar>(cell: &str, row: usize, col: usize) -> Result<T, MetricError> {
    cell.parse::<f64>()
        .map(T::lit)
        .map_err(|_| MetricError::Parse(format!("row {row}, column {col}: '{cell}' is not a number")))
}

/// Reads a labelled distance matrix: the first row holds the labels (after a
/// corner cell), and each following row is `label, d(i,0), ..., d(i,n-1)`.
pub fn read_distance_matrix<T: Scalar, R: Read>(input: R) -> Result<FiniteMetricSpace<T>, MetricError> {
    let recs = records(input)?;
    let Some((header, body)) = recs.split_first() else {
        return Err(MetricError::Parse("no header row".into()));
    };
    let labels: Vec<String> = header.iter().skip(1).map(str::to_owned).collect();
    let n = labels.len();
    if body.len() != n {
        return Err(MetricError::Parse(format!("{} labels but {} data rows", n, body.len())));
    }
    let mut rows = Vec::with_capacity(n);
    for (i, rec) in body.iter().enumerate() {
        if rec.len() != n + 1 {
            return Err(MetricError::Parse(format!("row {} has {} cells, expected {}", i + 1, rec.len(), n + 1)));
        }
        if rec.get(0) != Some(labels[i].as_str()) {
            return Err(MetricError::Parse(format!(
                "row {} is labelled '{}' but column {} is '{}'",
                i + 1,
                rec.get(0).unwrap_or(""),
                i + 1,
                labels[i]
            )));
        }
        let row = rec
            .iter()
            .enumerate()
            .skip(1)
            .map(|(j, c)| number(c, i + 1, j))
            .collect::<Result<Vec<T>, _>>()?;
        rows.push(row);
    }
    FiniteMetricSpace::from_rows(labels, &rows)
}

/// Reads a point cloud. Each row is either all coordinates or a label followed
/// by coordinates; a leading all-text row is taken as a header.
pub fn read_point_cloud<T: Scalar, R: Read>(input: R, metric: PointMetric) -> Result<FiniteMetricSpace<T>, MetricError> {
    let mut recs = records(input)?;
    if let Some(first) = recs.first() {
        if first.iter().all(|c| c.parse::<f64>().is_err()) {
            recs.remove(0);
        }
    }
    if recs.is_empty() {
        return Err(MetricError::Parse("no points".into()));
    }
    let labelled = recs[0].get(0).is_some_and(|c| c.parse::<f64>().is_err());
    let skip = usize::from(labelled);
    let dim = recs[0].len() - skip;
    if dim == 0 {
        return Err(MetricError::Parse("points have no coordinates".into()));
    }
    let mut labels = Vec::with_capacity(recs.len());
    let mut coords: Vec<Vec<T>> = Vec::with_capacity(recs.len());
    for (i, rec) in recs.iter().enumerate() {
        if rec.len() != dim + skip {
            return Err(MetricError::Parse(format!("row {} has {} cells, expected {}", i, rec.len(), dim + skip)));
        }
        labels.push(if labelled { rec[0].to_owned() } else { i.to_string() });
        coords.push(
            rec.iter()
                .enumerate()
                .skip(skip)
                .map(|(j, c)| number(c, i, j))
                .collect::<Result<_, _>>()?,
        );
    }
    FiniteMetricSpace::from_fn(labels, |i, j| metric.eval(&coords[i], &coords[j]))
}

pub fn load_distance_matrix<T: Scalar>(path: &Path) -> Result<FiniteMetricSpace<T>, MetricError> {
    let file = std::fs::File::open(path).map_err(|e| MetricError::Parse(format!("{}: {e}", path.display())))?;
    read_distance_matrix(file)
}

pub fn load_point_cloud<T: Scalar>(path: &Path, metric: PointMetric) -> Result<FiniteMetricSpace<T>, MetricError> {
    let file = std::fs::File::open(path).map_err(|e| MetricError::Parse(format!("{}: {e}", path.display())))?;
    read_point_cloud(file, metric)
}

/// Writes the matrix in the format read by [`read_distance_matrix`].
pub fn write_distance_matrix<T: Scalar, W: Write>(space: &FiniteMetricSpace<T>, out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(std::iter::once("").chain(space.labels().iter().map(String::as_str)))?;
    for i in 0..space.len() {
        let mut rec = vec![space.label(i).to_owned()];
        rec.extend(space.row(i).iter().map(|d| format!("{d}")));
        w.write_record(&rec)?;
    }
    w.flush()?;
    Ok(())
}
