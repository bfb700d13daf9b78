use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;

use super::ConeSample;
use crate::metric::Distances;
use crate::Scalar;

/// The level metric `rho_r` on the sampled points of height `>= r`: shortest
/// paths in the graph joining points at `rho`-distance `<= l`.
///
/// Indices passed to [`Distances`] are node-local; [`LevelMetric::node`] maps
/// them back to sample indices.
#[derive(Debug, Clone)]
pub struct LevelMetric<T> {
    pub r: T,
    pub l: T,
    nodes: Vec<usize>,
    local: Vec<Option<usize>>,
    dist: Vec<T>,
}

fn proximity_graph<T: Scalar>(sample: &ConeSample<T>, nodes: &[usize], l: T) -> UnGraph<(), T> {
    let m = nodes.len();
    let mut g = UnGraph::with_capacity(m, 0);
    for _ in 0..m {
        g.add_node(());
    }
    let edges: Vec<(usize, usize, T)> = (0..m)
        .into_par_iter()
        .flat_map_iter(|a| {
            (a + 1..m).filter_map(move |b| {
                let w = sample.distance(nodes[a], nodes[b]);
                (w <= l).then_some((a, b, w))
            })
        })
        .collect();
    for (a, b, w) in edges {
        g.add_edge(NodeIndex::new(a), NodeIndex::new(b), w);
    }
    g
}

fn shortest_from<T: Scalar>(g: &UnGraph<(), T>, source: usize) -> Vec<T> {
    let mut row = vec![T::infinity(); g.node_count()];
    for (node, d) in dijkstra(g, NodeIndex::new(source), None, |e| *e.weight()) {
        row[node.index()] = d;
    }
    row
}

impl<T: Scalar> LevelMetric<T> {
    pub fn build(sample: &ConeSample<T>, r: T, l: T) -> Self {
        let nodes = sample.above(r);
        let mut local = vec![None; sample.len()];
        for (k, &i) in nodes.iter().enumerate() {
            local[i] = Some(k);
        }
        let g = proximity_graph(sample, &nodes, l);
        let m = nodes.len();
        let rows: Vec<Vec<T>> = (0..m).into_par_iter().map(|s| shortest_from(&g, s)).collect();
        let dist: Vec<T> = rows.into_iter().flatten().collect();
        let lm = Self { r, l, nodes, local, dist };
        if m > 0 && (0..m).any(|k| !lm.dist[k].is_finite()) {
            log::debug!("level metric at height {r} with step {l} is disconnected");
        }
        lm
    }

    pub fn nodes(&self) -> &[usize] {
        &self.nodes
    }

    /// Sample index of node `k`.
    pub fn node(&self, k: usize) -> usize {
        self.nodes[k]
    }

    /// Node index of sample point `i`, if it lies at height `>= r`.
    pub fn local(&self, i: usize) -> Option<usize> {
        self.local.get(i).copied().flatten()
    }

    /// `rho_r` between two sample points, `None` if either is below `r`.
    pub fn between(&self, i: usize, j: usize) -> Option<T> {
        Some(self.distance(self.local(i)?, self.local(j)?))
    }

    pub fn is_connected(&self) -> bool {
        self.dist.iter().all(|d| d.is_finite())
    }
}

impl<T: Scalar> Distances<T> for LevelMetric<T> {
    fn size(&self) -> usize {
        self.nodes.len()
    }
    fn distance(&self, i: usize, j: usize) -> T {
        self.dist[i * self.nodes.len() + j]
    }
}

/// `rho_r(source, .)` for every sample point (`+inf` below `r` or when unreachable).
pub fn level_distances_from<T: Scalar>(sample: &ConeSample<T>, r: T, l: T, source: usize) -> Vec<T> {
    let nodes = sample.above(r);
    let mut out = vec![T::infinity(); sample.len()];
    let Some(s) = nodes.iter().position(|&i| i == source) else {
        return out;
    };
    let g = proximity_graph(sample, &nodes, l);
    for (k, d) in shortest_from(&g, s).into_iter().enumerate() {
        out[nodes[k]] = d;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cone::HyperbolicCone;
    use crate::metric::{circle_sample, two_intervals};

    /// Floyd–Warshall over the same proximity graph.
    fn floyd(sample: &ConeSample<f64>, r: f64, l: f64) -> Vec<Vec<f64>> {
        let nodes = sample.above(r);
        let m = nodes.len();
        let mut d = vec![vec![f64::INFINITY; m]; m];
        for a in 0..m {
            for b in 0..m {
                let w = sample.distance(nodes[a], nodes[b]);
                if a == b {
                    d[a][b] = 0.0;
                } else if w <= l {
                    d[a][b] = w;
                }
            }
        }
        for k in 0..m {
            for a in 0..m {
                for b in 0..m {
                    if d[a][k] + d[k][b] < d[a][b] {
                        d[a][b] = d[a][k] + d[k][b];
                    }
                }
            }
        }
        d
    }

    #[test]
    fn matches_floyd_warshall() {
        let cone = HyperbolicCone::new(circle_sample(12).unwrap()).unwrap();
        let s = ConeSample::strata(cone, 0.5, 3).unwrap();
        let lm = LevelMetric::build(&s, 0.5, 1.0);
        let oracle = floyd(&s, 0.5, 1.0);
        assert_eq!(lm.size(), 36);
        for a in 0..lm.size() {
            for b in 0..lm.size() {
                assert!((lm.distance(a, b) - oracle[a][b]).abs() < 1e-9);
                let rho = s.distance(lm.node(a), lm.node(b));
                assert!(lm.distance(a, b) >= rho - 1e-9);
                if rho <= 1.0 {
                    assert!((lm.distance(a, b) - rho).abs() < 1e-12);
                }
            }
        }
        let from = level_distances_from(&s, 0.5, 1.0, lm.node(3));
        for b in 0..lm.size() {
            assert_eq!(from[lm.node(b)], lm.distance(3, b));
        }
        assert!(from[0].is_infinite());
    }

    #[test]
    fn components_stay_apart() {
        // gap 1 in a base of diameter 3: rho across the gap at height 0 is
        // 2 log(1 + 1/3) ~ 0.575, so a step of 0.5 never crosses
        let cone = HyperbolicCone::<f64>::new(two_intervals(6, 1.0).unwrap()).unwrap();
        let s = ConeSample::strata(cone, 1.0, 2).unwrap();
        let lm = LevelMetric::build(&s, 0.0, 0.5);
        assert!(lm.between(0, 6).unwrap().is_infinite());
        assert!(lm.between(0, 5).unwrap().is_finite());
        assert!(!lm.is_connected());
        assert_eq!(lm.between(3, 3), Some(0.0));
        assert_eq!(LevelMetric::build(&s, 1.0, 0.5).between(0, 12), None);
    }
}
