use petgraph::unionfind::UnionFind;
use serde::Serialize;

use super::{Distances, MetricError};
use crate::Scalar;

/// The ε-coarse components of a finite space: classes of the relation
/// "joined by a chain with steps `<= epsilon`".
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoarsePartition<T> {
    pub epsilon: T,
    /// Blocks sorted by smallest member; members ascending.
    pub blocks: Vec<Vec<usize>>,
}

impl<T> CoarsePartition<T> {
    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn block_of(&self, point: usize) -> Option<usize> {
        self.blocks.iter().position(|b| b.binary_search(&point).is_ok())
    }

    pub fn singletons(&self) -> impl Iterator<Item = usize> + '_ {
        self.blocks.iter().filter(|b| b.len() == 1).map(|b| b[0])
    }
}

pub fn coarse_components<T: Scalar, D: Distances<T> + ?Sized>(
    space: &D,
    epsilon: T,
) -> Result<CoarsePartition<T>, MetricError> {
    if !(epsilon > T::zero()) {
        return Err(MetricError::InvalidParameter(format!("epsilon must be positive, got {epsilon}")));
    }
    let n = space.size();
    let mut uf = UnionFind::<usize>::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if space.distance(i, j) <= epsilon {
                uf.union(i, j);
            }
        }
    }
    let mut by_root: Vec<Vec<usize>> = vec![Vec::new(); n];
    for i in 0..n {
        by_root[uf.find_mut(i)].push(i);
    }
    let mut blocks: Vec<Vec<usize>> = by_root.into_iter().filter(|b| !b.is_empty()).collect();
    blocks.sort_by_key(|b| b[0]);
    Ok(CoarsePartition { epsilon, blocks })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::validate_metric;

    fn line(points: &[f64]) -> crate::metric::FiniteMetricSpace<f64> {
        let rows: Vec<Vec<f64>> = points
            .iter()
            .map(|a| points.iter().map(|b| (a - b).abs()).collect())
            .collect();
        validate_metric(&rows).unwrap()
    }

    #[test]
    fn gap_splits_line() {
        let m = line(&[0.0, 1.0, 5.0, 6.0]);
        let p = coarse_components(&m, 2.0).unwrap();
        assert_eq!(p.blocks, vec![vec![0, 1], vec![2, 3]]);
        assert_eq!(p.block_of(3), Some(1));
    }

    #[test]
    fn extreme_scales() {
        let m = line(&[0.0, 1.0, 5.0, 6.0]);
        assert_eq!(coarse_components(&m, 6.0).unwrap().len(), 1);
        let fine = coarse_components(&m, 0.5).unwrap();
        assert_eq!(fine.len(), 4);
        assert_eq!(fine.singletons().count(), 4);
        assert!(coarse_components(&m, 0.0).is_err());
    }
}
