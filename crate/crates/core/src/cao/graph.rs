use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{CaoError, CaoParams};
use crate::cone::{ConePoint, ConeSample, LevelMetric};
use crate::metric::{maximal_net, Distances, Restricted};
use crate::report::CheckReport;
use crate::Scalar;

/// Visiting order for the greedy per-level nets.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum NetOrder {
    /// Ascending base index.
    #[default]
    Ascending,
    /// A ChaCha8 shuffle seeded with `seed ^ level`.
    Seeded(u64),
}

impl NetOrder {
    fn order(self, level: usize, n: usize) -> Option<Vec<usize>> {
        match self {
            NetOrder::Ascending => None,
            NetOrder::Seeded(seed) => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed ^ level as u64);
                let mut o: Vec<usize> = (0..n).collect();
                o.shuffle(&mut rng);
                Some(o)
            }
        }
    }
}

/// `v_{i,alpha}`: the net point `q = (z, i r0)` lifted to height `i r0 + delta`,
/// with the base points of its region `A(q)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct CaoVertex<T> {
    pub level: usize,
    pub net_index: usize,
    pub net_point: ConePoint<T>,
    pub vertex_point: ConePoint<T>,
    /// Sorted.
    pub region_bases: Vec<usize>,
}

impl<T: Scalar> CaoVertex<T> {
    pub fn base(&self) -> usize {
        self.net_point.base
    }

    pub fn height(&self) -> T {
        self.vertex_point.height
    }

    pub fn label(&self) -> String {
        format!("{}:{}", self.level, self.net_index)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CaoGraph<T> {
    pub params: CaoParams<T>,
    pub depth: usize,
    vertices: Vec<CaoVertex<T>>,
    adjacency: Vec<Vec<usize>>,
}

fn regions_meet(a: &[usize], b: &[usize]) -> bool {
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => return true,
        }
    }
    false
}

impl<T: Scalar> CaoGraph<T> {
    /// Assembles a graph from vertices and an edge list. Edges are made
    /// symmetric; self-loops and out-of-range endpoints are rejected. The edge
    /// rule itself is not enforced here (see `edge_rule_check`).
    pub fn from_parts(
        params: CaoParams<T>,
        depth: usize,
        vertices: Vec<CaoVertex<T>>,
        edges: &[(usize, usize)],
    ) -> Result<Self, CaoError> {
        let n = vertices.len();
        for (k, v) in vertices.iter().enumerate() {
            if v.level > depth {
                return Err(CaoError::Format(format!("vertex {k} has level {} above depth {depth}", v.level)));
            }
            if !v.region_bases.windows(2).all(|w| w[0] < w[1]) {
                return Err(CaoError::Format(format!("region of vertex {k} is not sorted")));
            }
        }
        let mut adj: Vec<BTreeSet<usize>> = vec![BTreeSet::new(); n];
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(CaoError::Format(format!("edge ({u}, {v}) out of range for {n} vertices")));
            }
            if u == v {
                return Err(CaoError::Format(format!("self-loop at vertex {u}")));
            }
            adj[u].insert(v);
            adj[v].insert(u);
        }
        let adjacency = adj.into_iter().map(|s| s.into_iter().collect()).collect();
        Ok(Self { params, depth, vertices, adjacency })
    }

    pub fn vertices(&self) -> &[CaoVertex<T>] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> &CaoVertex<T> {
        &self.vertices[v]
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn adjacency(&self) -> &[Vec<usize>] {
        &self.adjacency
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adjacency[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adjacency[v].len()
    }

    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for (u, nb) in self.adjacency.iter().enumerate() {
            out.extend(nb.iter().filter(|&&v| v > u).map(|&v| (u, v)));
        }
        out
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn level(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        (0..self.len()).filter(move |&v| self.vertices[v].level == i)
    }

    pub fn level_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.depth + 1];
        for v in &self.vertices {
            sizes[v.level] += 1;
        }
        sizes
    }

    /// Whether `{u, v}` should be an edge: levels at most one apart and
    /// regions sharing a base point.
    pub fn rule_says_edge(&self, u: usize, v: usize) -> bool {
        let (a, b) = (&self.vertices[u], &self.vertices[v]);
        u != v && a.level.abs_diff(b.level) <= 1 && regions_meet(&a.region_bases, &b.region_bases)
    }

    pub fn to_file(&self, checks: Vec<CheckReport>) -> GraphFile<T> {
        GraphFile {
            params: self.params,
            depth: self.depth,
            vertices: self
                .vertices
                .iter()
                .map(|v| VertexFile {
                    label: v.label(),
                    level: v.level,
                    net_index: v.net_index,
                    base: v.base(),
                    net_height: v.net_point.height,
                    height: v.vertex_point.height,
                    region_bases: v.region_bases.clone(),
                })
                .collect(),
            edges: self.edges(),
            checks,
        }
    }

    pub fn from_file(file: GraphFile<T>) -> Result<Self, CaoError> {
        let vertices = file
            .vertices
            .into_iter()
            .map(|v| CaoVertex {
                level: v.level,
                net_index: v.net_index,
                net_point: ConePoint { base: v.base, height: v.net_height },
                vertex_point: ConePoint { base: v.base, height: v.height },
                region_bases: v.region_bases,
            })
            .collect();
        Self::from_parts(file.params, file.depth, vertices, &file.edges)
    }

    pub fn save(&self, path: &Path, checks: Vec<CheckReport>) -> Result<(), CaoError> {
        let file = std::fs::File::create(path).map_err(|e| CaoError::Format(format!("{}: {e}", path.display())))?;
        serde_json::to_writer_pretty(std::io::BufWriter::new(file), &self.to_file(checks))
            .map_err(|e| CaoError::Format(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<(Self, Vec<CheckReport>), CaoError> {
        let text = std::fs::read_to_string(path).map_err(|e| CaoError::Format(format!("{}: {e}", path.display())))?;
        let file: GraphFile<T> = serde_json::from_str(&text).map_err(|e| CaoError::Format(e.to_string()))?;
        let checks = file.checks.clone();
        Ok((Self::from_file(file)?, checks))
    }

    /// Graphviz rendering: vertices labelled `i:alpha` with a `height` attribute.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("graph cao {\n");
        for (k, v) in self.vertices.iter().enumerate() {
            let _ = writeln!(out, "  v{k} [label=\"{}\", height_cone=\"{}\", level={}];", v.label(), v.height(), v.level);
        }
        for (u, v) in self.edges() {
            let _ = writeln!(out, "  v{u} -- v{v};");
        }
        out.push_str("}\n");
        out
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct VertexFile<T> {
    pub label: String,
    pub level: usize,
    pub net_index: usize,
    pub base: usize,
    pub net_height: T,
    pub height: T,
    pub region_bases: Vec<usize>,
}

/// On-disk form of a [`CaoGraph`] with the check results attached at build time.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(bound = "T: Scalar")]
pub struct GraphFile<T> {
    pub params: CaoParams<T>,
    pub depth: usize,
    pub vertices: Vec<VertexFile<T>>,
    pub edges: Vec<(usize, usize)>,
    #[serde(default)]
    pub checks: Vec<CheckReport>,
}

/// Per-level nets and regions under `rho_{i r0}`, then the edge rule.
fn build_level<T: Scalar>(
    sample: &ConeSample<T>,
    params: &CaoParams<T>,
    level: usize,
    order: NetOrder,
) -> Result<Vec<CaoVertex<T>>, CaoError> {
    let stratum = sample.stratum(level).ok_or(CaoError::EmptyLevel(level))?;
    let h = sample.level_height(level);
    let lm = LevelMetric::build(sample, h, params.l);
    let locals: Vec<usize> = stratum
        .clone()
        .map(|i| lm.local(i).ok_or(CaoError::EmptyLevel(level)))
        .collect::<Result<_, _>>()?;
    let n = locals.len();
    let restricted = Restricted::new(&lm, locals);
    let order = order.order(level, n);
    let net = maximal_net(&restricted, params.delta, order.as_deref())?;
    let three = T::lit(3.0) * params.delta;
    let mut out = Vec::with_capacity(net.members.len());
    for (alpha, &z) in net.members.iter().enumerate() {
        // stratum points are ordered by base, so the local index is the base
        let region_bases: Vec<usize> = (0..n).filter(|&w| restricted.distance(z, w) < three).collect();
        let net_point = ConePoint { base: z, height: h };
        out.push(CaoVertex {
            level,
            net_index: alpha,
            net_point,
            vertex_point: ConePoint { base: z, height: h + params.delta },
            region_bases,
        });
    }
    Ok(out)
}

/// Builds the graph on levels `0..=depth` of `sample`.
pub fn build_cao_graph<T: Scalar>(
    sample: &ConeSample<T>,
    params: CaoParams<T>,
    depth: usize,
    order: NetOrder,
) -> Result<CaoGraph<T>, CaoError> {
    if depth > sample.depth() {
        return Err(CaoError::EmptyLevel(sample.depth() + 1));
    }
    if sample.r0() != params.r0 {
        return Err(CaoError::InvalidParameter(format!(
            "sample spacing {} differs from r0 = {}",
            sample.r0(),
            params.r0
        )));
    }
    let levels: Vec<Vec<CaoVertex<T>>> = (0..=depth)
        .into_par_iter()
        .map(|i| build_level(sample, &params, i, order))
        .collect::<Result<_, _>>()?;
    for (i, lv) in levels.iter().enumerate() {
        log::debug!("level {i}: {} net points", lv.len());
    }
    let vertices: Vec<CaoVertex<T>> = levels.into_iter().flatten().collect();

    // bucket[level][base] = vertices whose region contains the base
    let nbase = sample.base().len();
    let mut bucket = vec![vec![Vec::new(); nbase]; depth + 1];
    for (k, v) in vertices.iter().enumerate() {
        for &b in &v.region_bases {
            bucket[v.level][b].push(k);
        }
    }
    let mut edges = BTreeSet::new();
    for (u, v) in vertices.iter().enumerate() {
        for &b in &v.region_bases {
            for j in v.level..=(v.level + 1).min(depth) {
                for &w in &bucket[j][b] {
                    if w != u {
                        edges.insert((u.min(w), u.max(w)));
                    }
                }
            }
        }
    }
    let edges: Vec<(usize, usize)> = edges.into_iter().collect();
    CaoGraph::from_parts(params, depth, vertices, &edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cao::{cao_sample, CaoParams};
    use crate::cone::HyperbolicCone;
    use crate::metric::{circle_sample, validate_metric};

    pub(crate) fn params(delta: f64, r0: f64) -> CaoParams<f64> {
        CaoParams {
            mu: 0.0,
            l: 1.0,
            c: 2.0,
            delta,
            r0,
            r_b: 0.0,
            kappa: 1.7,
            n_small: 1,
            n_big: 1,
            margin: 0.05,
        }
    }

    #[test]
    fn single_vertex_depth_zero() {
        // neighbours at rho = 2 log 1.5 < L, so rho_0 joins all three within delta
        let z = validate_metric(&[vec![0.0, 0.05, 0.1], vec![0.05, 0.0, 0.05], vec![0.1, 0.05, 0.0]]).unwrap();
        let cone = HyperbolicCone::new(z).unwrap();
        let s = cao_sample(cone, 7.0, 2.0, 0).unwrap();
        let g = build_cao_graph(&s, params(2.0, 7.0), 0, NetOrder::Ascending).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g.edge_count(), 0);
        assert_eq!(g.vertex(0).region_bases, vec![0, 1, 2]);
    }

    #[test]
    fn edge_rule_matches_brute_force() {
        let cone = HyperbolicCone::new(circle_sample::<f64>(24).unwrap()).unwrap();
        let s = cao_sample(cone, 1.5, 0.4, 3).unwrap();
        for order in [NetOrder::Ascending, NetOrder::Seeded(9)] {
            let g = build_cao_graph(&s, params(0.4, 1.5), 3, order).unwrap();
            for u in 0..g.len() {
                for v in 0..g.len() {
                    assert_eq!(g.neighbours(u).contains(&v), g.rule_says_edge(u, v));
                }
                let vx = g.vertex(u);
                assert_eq!(vx.vertex_point.height, vx.net_point.height + 0.4);
                assert!(vx.region_bases.contains(&vx.base()));
            }
            assert!(g.level_sizes().iter().all(|&k| k >= 1));
        }
    }

    #[test]
    fn seeded_build_is_reproducible() {
        let cone = HyperbolicCone::new(circle_sample::<f64>(20).unwrap()).unwrap();
        let s = cao_sample(cone, 1.2, 0.3, 2).unwrap();
        let a = build_cao_graph(&s, params(0.3, 1.2), 2, NetOrder::Seeded(4)).unwrap();
        let b = build_cao_graph(&s, params(0.3, 1.2), 2, NetOrder::Seeded(4)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn file_round_trip_and_dot() {
        let cone = HyperbolicCone::new(circle_sample::<f64>(12).unwrap()).unwrap();
        let s = cao_sample(cone, 1.5, 0.4, 2).unwrap();
        let g = build_cao_graph(&s, params(0.4, 1.5), 2, NetOrder::Ascending).unwrap();
        let text = serde_json::to_string(&g.to_file(vec![])).unwrap();
        let back = CaoGraph::from_file(serde_json::from_str(&text).unwrap()).unwrap();
        assert_eq!(back, g);
        let dot = g.to_dot();
        assert!(dot.starts_with("graph cao {"));
        assert!(dot.contains("label=\"0:0\""));
        assert_eq!(dot.matches(" -- ").count(), g.edge_count());
    }

    #[test]
    fn from_parts_rejects_bad_edges() {
        let v = CaoVertex {
            level: 0,
            net_index: 0,
            net_point: ConePoint { base: 0, height: 0.0 },
            vertex_point: ConePoint { base: 0, height: 1.0 },
            region_bases: vec![0],
        };
        let p = params(1.0, 4.0);
        assert!(CaoGraph::from_parts(p, 0, vec![v.clone()], &[(0, 0)]).is_err());
        assert!(CaoGraph::from_parts(p, 0, vec![v.clone()], &[(0, 1)]).is_err());
        assert!(CaoGraph::from_parts(p, 0, vec![v], &[]).is_ok());
    }
}
