use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{CaoError, CaoGraph};
use crate::cone::{ConeSample, LevelMetric};
use crate::metric::Distances;
use crate::report::CheckReport;
use crate::Scalar;

/// All-pairs hop counts; `None` across components.
#[derive(Debug, Clone, PartialEq)]
pub struct HopDistances {
    n: usize,
    dist: Vec<u32>,
}

impl HopDistances {
    pub fn from_adjacency(adj: &[Vec<usize>]) -> Self {
        let n = adj.len();
        let rows: Vec<Vec<u32>> = (0..n)
            .into_par_iter()
            .map(|s| {
                let mut row = vec![u32::MAX; n];
                row[s] = 0;
                let mut queue = VecDeque::from([s]);
                while let Some(u) = queue.pop_front() {
                    for &v in &adj[u] {
                        if row[v] == u32::MAX {
                            row[v] = row[u] + 1;
                            queue.push_back(v);
                        }
                    }
                }
                row
            })
            .collect();
        Self { n, dist: rows.into_iter().flatten().collect() }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, u: usize, v: usize) -> Option<u32> {
        let d = self.dist[u * self.n + v];
        (d != u32::MAX).then_some(d)
    }

    pub fn is_connected(&self) -> bool {
        self.dist.iter().all(|&d| d != u32::MAX)
    }
}

impl<T: Scalar> Distances<T> for HopDistances {
    fn size(&self) -> usize {
        self.n
    }
    fn distance(&self, i: usize, j: usize) -> T {
        self.get(i, j).map_or(T::infinity(), |d| T::from_count(d as usize))
    }
}

pub fn graph_metric<T: Scalar>(g: &CaoGraph<T>) -> HopDistances {
    HopDistances::from_adjacency(g.adjacency())
}

fn rho<T: Scalar>(g: &CaoGraph<T>, sample: &ConeSample<T>, u: usize, v: usize) -> T {
    sample.cone().rho(g.vertex(u).vertex_point, g.vertex(v).vertex_point)
}

fn pair_label<T: Scalar>(g: &CaoGraph<T>, u: usize, v: usize) -> String {
    format!("({}, {})", g.vertex(u).label(), g.vertex(v).label())
}

/// `rho(u, v) >= delta / c` for all distinct vertices.
pub fn separation_check<T: Scalar>(g: &CaoGraph<T>, sample: &ConeSample<T>) -> CheckReport {
    let bound = g.params.delta / g.params.c;
    let n = g.len();
    let best = (0..n)
        .into_par_iter()
        .flat_map_iter(|u| (u + 1..n).map(move |v| (rho(g, sample, u, v), u, v)))
        .min_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then((a.1, a.2).cmp(&(b.1, b.2))));
    match best {
        None => CheckReport::new("vertices are delta/c-separated in rho", bound.as_f64(), f64::INFINITY, true)
            .with_note("fewer than two vertices"),
        Some((d, u, v)) => {
            CheckReport::new("vertices are delta/c-separated in rho", bound.as_f64(), d.as_f64(), d >= bound)
                .with_witness(pair_label(g, u, v))
        }
    }
}

/// Every sampled point of height `<= depth r0` lies within `2 r0` of a vertex.
pub fn coboundedness_check<T: Scalar>(g: &CaoGraph<T>, sample: &ConeSample<T>) -> CheckReport {
    let bound = T::lit(2.0) * g.params.r0;
    let top = T::from_count(g.depth) * g.params.r0;
    let cone = sample.cone();
    let worst = (0..sample.len())
        .into_par_iter()
        .filter(|&i| sample.point(i).height <= top)
        .map(|i| {
            let p = sample.point(i);
            let d = g.vertices().iter().map(|v| cone.rho(p, v.vertex_point)).fold(T::infinity(), T::min);
            (d, i)
        })
        .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(std::cmp::Ordering::Equal).then(b.1.cmp(&a.1)));
    let (d, i) = worst.unwrap_or((T::zero(), 0));
    let p = sample.point(i);
    CheckReport::new("sample points of height <= depth r0 lie within 2 r0 of a vertex", bound.as_f64(), d.as_f64(), d <= bound)
        .with_witness(format!("({}, {})", sample.base().label(p.base), p.height))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QiReport {
    pub pairs: usize,
    /// `rho / (8 r0) <= d_Gamma`, measured as `min d_Gamma / rho`.
    pub lower: CheckReport,
    /// `d_Gamma < 3 r0 rho`, measured as `max d_Gamma / rho`.
    pub upper: CheckReport,
}

impl QiReport {
    pub fn pass(&self) -> bool {
        self.lower.pass && self.upper.pass
    }
}

/// `count` random pairs of distinct vertices in a common component (fewer if
/// the graph has no such pairs).
pub fn random_pairs(hops: &HopDistances, count: usize, seed: u64) -> Vec<(usize, usize)> {
    let n = hops.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    if n < 2 {
        return out;
    }
    let mut tries = 0;
    while out.len() < count && tries < 100 * count.max(1) {
        tries += 1;
        let u = rng.gen_range(0..n);
        let v = rng.gen_range(0..n);
        if u != v && hops.get(u, v).is_some() {
            out.push((u, v));
        }
    }
    out
}

/// Checks `rho(u,v) / (8 r0) <= d_Gamma(u,v) < 3 r0 rho(u,v)` on the given
/// pairs; pairs in different components are counted as failures of the upper
/// bound, `u = v` passes both trivially.
pub fn qi_check<T: Scalar>(
    g: &CaoGraph<T>,
    sample: &ConeSample<T>,
    hops: &HopDistances,
    pairs: &[(usize, usize)],
) -> QiReport {
    let r0 = g.params.r0.as_f64();
    let mut lo = (f64::INFINITY, None);
    let mut hi = (0.0, None);
    for &(u, v) in pairs {
        if u == v {
            continue;
        }
        let r = rho(g, sample, u, v).as_f64();
        let ratio = hops.get(u, v).map_or(f64::INFINITY, |h| h as f64 / r);
        if ratio < lo.0 {
            lo = (ratio, Some((u, v)));
        }
        if ratio > hi.0 {
            hi = (ratio, Some((u, v)));
        }
    }
    let witness = |w: Option<(usize, usize)>| w.map(|(u, v)| pair_label(g, u, v));
    let mut lower =
        CheckReport::new("rho/(8 r0) <= d_Gamma on sampled pairs", 1.0 / (8.0 * r0), lo.0, lo.0 >= 1.0 / (8.0 * r0));
    if let Some(w) = witness(lo.1) {
        lower = lower.with_witness(w);
    }
    let mut upper = CheckReport::new("d_Gamma < 3 r0 rho on sampled pairs", 3.0 * r0, hi.0, hi.0 < 3.0 * r0);
    if let Some(w) = witness(hi.1) {
        upper = upper.with_witness(w);
    }
    QiReport { pairs: pairs.len(), lower, upper }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct DegreeStats {
    pub n: usize,
    pub n_plus: usize,
    pub n_minus: usize,
    pub n_same: usize,
}

pub fn degree_stats<T: Scalar>(g: &CaoGraph<T>, v: usize) -> DegreeStats {
    let level = g.vertex(v).level;
    let mut s = DegreeStats { n: g.degree(v), n_plus: 0, n_minus: 0, n_same: 0 };
    for &w in g.neighbours(v) {
        match g.vertex(w).level {
            l if l == level + 1 => s.n_plus += 1,
            l if l + 1 == level => s.n_minus += 1,
            _ => s.n_same += 1,
        }
    }
    s
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AsymmetryReport {
    /// `#N-(v) <= N_small` for every vertex.
    pub minus: CheckReport,
    /// `#N+(v) >= 2 N_small` for vertices below the top level with height `> delta`.
    pub plus: CheckReport,
    pub checked_plus: usize,
    /// Labels of top-level vertices (no level above in the truncation).
    pub excluded_top: Vec<String>,
    /// Labels of vertices with height `<= delta`.
    pub excluded_low: Vec<String>,
}

pub fn asymmetry_check<T: Scalar>(g: &CaoGraph<T>) -> AsymmetryReport {
    let n_small = g.params.n_small;
    let stats: Vec<DegreeStats> = (0..g.len()).map(|v| degree_stats(g, v)).collect();
    let worst_minus = (0..g.len()).max_by_key(|&v| (stats[v].n_minus, std::cmp::Reverse(v)));
    let mut minus = CheckReport::new(
        "#N-(v) <= N_small",
        n_small as f64,
        worst_minus.map_or(0.0, |v| stats[v].n_minus as f64),
        worst_minus.is_none_or(|v| stats[v].n_minus <= n_small),
    );
    if let Some(v) = worst_minus {
        minus = minus.with_witness(g.vertex(v).label());
    }

    let mut excluded_top = Vec::new();
    let mut excluded_low = Vec::new();
    let mut checked = Vec::new();
    for v in 0..g.len() {
        let vx = g.vertex(v);
        if vx.level == g.depth {
            excluded_top.push(vx.label());
        } else if vx.height() <= g.params.delta {
            excluded_low.push(vx.label());
        } else {
            checked.push(v);
        }
    }
    let worst_plus = checked.iter().copied().min_by_key(|&v| (stats[v].n_plus, v));
    let bound = 2 * n_small;
    let mut plus = match worst_plus {
        Some(v) => CheckReport::new("#N+(v) >= 2 N_small", bound as f64, stats[v].n_plus as f64, stats[v].n_plus >= bound)
            .with_witness(g.vertex(v).label()),
        None => CheckReport::new("#N+(v) >= 2 N_small", bound as f64, f64::INFINITY, true),
    };
    plus = plus.soft().with_note(format!(
        "{} vertices checked; {} top-level and {} with height <= delta excluded",
        checked.len(),
        excluded_top.len(),
        excluded_low.len()
    ));
    AsymmetryReport { minus, plus, checked_plus: checked.len(), excluded_top, excluded_low }
}

/// Level metrics `rho_{i r0}` on the sample for `i = 0..=depth`.
pub fn level_metrics<T: Scalar>(g: &CaoGraph<T>, sample: &ConeSample<T>) -> Vec<LevelMetric<T>> {
    (0..=g.depth).map(|i| LevelMetric::build(sample, sample.level_height(i), g.params.l)).collect()
}

fn net_local<T: Scalar>(g: &CaoGraph<T>, sample: &ConeSample<T>, lm: &LevelMetric<T>, v: usize) -> Option<usize> {
    lm.local(sample.index_of(g.vertex(v).net_point)?)
}

/// Number of level-`level` vertices whose net point is within `rho_{i r0}`
/// distance `4 delta` of the stratum point over `base`.
pub fn region_multiplicity<T: Scalar>(
    g: &CaoGraph<T>,
    sample: &ConeSample<T>,
    lm: &LevelMetric<T>,
    level: usize,
    base: usize,
) -> usize {
    let four = T::lit(4.0) * g.params.delta;
    let Some(q) = sample.stratum(level).and_then(|r| lm.local(r.start + base)) else {
        return 0;
    };
    g.level(level)
        .filter(|&v| net_local(g, sample, lm, v).is_some_and(|a| lm.distance(a, q) < four))
        .count()
}

/// `max_q #V(i, q) <= N_small` over every stratum point of every level.
pub fn region_multiplicity_check<T: Scalar>(
    g: &CaoGraph<T>,
    sample: &ConeSample<T>,
    lms: &[LevelMetric<T>],
) -> CheckReport {
    let n = sample.base().len();
    let mut worst = (0, String::new());
    for (i, lm) in lms.iter().enumerate().take(g.depth + 1) {
        for b in 0..n {
            let k = region_multiplicity(g, sample, lm, i, b);
            if k > worst.0 || worst.1.is_empty() {
                worst = (k, format!("level {i}, base {}", sample.base().label(b)));
            }
        }
    }
    let bound = g.params.n_small;
    CheckReport::new("#{v_(i,a) : rho_(i r0)(q_(i,a), q) < 4 delta} <= N_small", bound as f64, worst.0 as f64, worst.0 <= bound)
        .with_witness(worst.1)
}

/// Per level: the net is `delta`-separated and `delta`-cobounded in `rho_{i r0}`.
pub fn level_net_checks<T: Scalar>(
    g: &CaoGraph<T>,
    sample: &ConeSample<T>,
    lms: &[LevelMetric<T>],
) -> [CheckReport; 2] {
    let delta = g.params.delta;
    let mut sep = (T::infinity(), String::new());
    let mut gap = (T::zero(), String::new());
    for (i, lm) in lms.iter().enumerate().take(g.depth + 1) {
        let net: Vec<usize> = g.level(i).filter_map(|v| net_local(g, sample, lm, v)).collect();
        for (a, &x) in net.iter().enumerate() {
            for &y in &net[a + 1..] {
                let d = lm.distance(x, y);
                if d < sep.0 {
                    sep = (d, format!("level {i}: nodes {x}, {y}"));
                }
            }
        }
        for p in sample.stratum(i).into_iter().flatten() {
            let Some(x) = lm.local(p) else { continue };
            let d = net.iter().map(|&m| lm.distance(x, m)).fold(T::infinity(), T::min);
            if d > gap.0 || gap.1.is_empty() {
                gap = (d, format!("level {i}, base {}", sample.base().label(sample.point(p).base)));
            }
        }
    }
    let sep_report = CheckReport::new("level nets are delta-separated in rho_(i r0)", delta.as_f64(), sep.0.as_f64(), sep.0 >= delta);
    let sep_report = if sep.1.is_empty() { sep_report } else { sep_report.with_witness(sep.1) };
    [
        sep_report,
        CheckReport::new("level nets are delta-cobounded in rho_(i r0)", delta.as_f64(), gap.0.as_f64(), gap.0 < delta)
            .with_witness(gap.1),
    ]
}

/// `Delta f(v) = mean of f over neighbours - f(v)`.
pub fn laplacian<T: Scalar>(adj: &[Vec<usize>], f: &[T]) -> Result<Vec<T>, CaoError> {
    adj.iter()
        .enumerate()
        .map(|(v, nb)| {
            if nb.is_empty() {
                return Err(CaoError::IsolatedVertex(v));
            }
            let sum: T = nb.iter().map(|&w| f[w]).sum();
            Ok(sum / T::from_count(nb.len()) - f[v])
        })
        .collect()
}

/// `Delta h` for the height function `h(v) = i r0 + delta`.
pub fn laplacian_height<T: Scalar>(g: &CaoGraph<T>) -> Result<Vec<T>, CaoError> {
    let h: Vec<T> = g.vertices().iter().map(|v| v.height()).collect();
    laplacian(g.adjacency(), &h)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LaplacianReport {
    /// `Delta h(v) / r0` per vertex, `None` on the top level.
    pub ratios: Vec<Option<f64>>,
    pub interior: usize,
    pub excluded_top: usize,
    pub min_ratio: f64,
    pub witness: Option<String>,
    /// `min Delta h / r0 >= 1/N_big` and `> 0`.
    pub check: CheckReport,
}

/// Evaluates `Delta h / r0` on every vertex below the top level (all of whose
/// neighbours exist in the truncation).
pub fn laplacian_check<T: Scalar>(g: &CaoGraph<T>) -> Result<LaplacianReport, CaoError> {
    let h: Vec<T> = g.vertices().iter().map(|v| v.height()).collect();
    let r0 = g.params.r0;
    let mut ratios = vec![None; g.len()];
    let mut best: Option<(f64, usize)> = None;
    for v in 0..g.len() {
        if g.vertex(v).level == g.depth {
            continue;
        }
        let nb = g.neighbours(v);
        if nb.is_empty() {
            return Err(CaoError::IsolatedVertex(v));
        }
        let mean: T = nb.iter().map(|&w| h[w]).sum::<T>() / T::from_count(nb.len());
        let ratio = ((mean - h[v]) / r0).as_f64();
        ratios[v] = Some(ratio);
        if best.is_none_or(|(b, _)| ratio < b) {
            best = Some((ratio, v));
        }
    }
    let interior = ratios.iter().filter(|r| r.is_some()).count();
    let excluded_top = g.len() - interior;
    let bound = 1.0 / g.params.n_big.max(1) as f64;
    let (min_ratio, witness) = match best {
        Some((r, v)) => (r, Some(g.vertex(v).label())),
        None => (f64::INFINITY, None),
    };
    let mut check = CheckReport::new(
        "Delta h(v)/r0 >= 1/N_big > 0 on interior vertices",
        bound,
        min_ratio,
        interior > 0 && min_ratio >= bound && min_ratio > 0.0,
    )
    .soft()
    .with_note(format!("{interior} interior vertices, {excluded_top} top-level vertices excluded"));
    if let Some(w) = &witness {
        check = check.with_witness(w.clone());
    }
    Ok(LaplacianReport { ratios, interior, excluded_top, min_ratio, witness, check })
}

/// Every edge obeys the rule and every pair the rule joins is an edge.
pub fn edge_rule_check<T: Scalar>(g: &CaoGraph<T>) -> CheckReport {
    let mut bad = 0usize;
    let mut first = None;
    for u in 0..g.len() {
        for v in u + 1..g.len() {
            if g.neighbours(u).binary_search(&v).is_ok() != g.rule_says_edge(u, v) {
                bad += 1;
                first.get_or_insert((u, v));
            }
        }
    }
    let r = CheckReport::new("edges are exactly the pairs with overlapping regions", 0.0, bad as f64, bad == 0);
    match first {
        Some((u, v)) => r.with_witness(pair_label(g, u, v)),
        None => r,
    }
}

/// `|h(u) - h(v)| <= r0` along edges.
pub fn lipschitz_check<T: Scalar>(g: &CaoGraph<T>) -> CheckReport {
    let r0 = g.params.r0;
    let tol = T::metric_tol() * (T::one() + r0);
    let worst = g
        .edges()
        .into_iter()
        .map(|(u, v)| ((g.vertex(u).height() - g.vertex(v).height()).abs(), u, v))
        .fold(None::<(T, usize, usize)>, |acc, x| match acc {
            Some(a) if a.0 >= x.0 => Some(a),
            _ => Some(x),
        });
    match worst {
        Some((d, u, v)) => CheckReport::new("h is r0-Lipschitz along edges", r0.as_f64(), d.as_f64(), d <= r0 + tol)
            .with_witness(pair_label(g, u, v)),
        None => CheckReport::new("h is r0-Lipschitz along edges", r0.as_f64(), 0.0, true).with_note("no edges"),
    }
}

/// `rho(u, v) < 8 r0` along edges.
pub fn edge_length_check<T: Scalar>(g: &CaoGraph<T>, sample: &ConeSample<T>) -> CheckReport {
    let bound = T::lit(8.0) * g.params.r0;
    let worst = g
        .edges()
        .into_iter()
        .map(|(u, v)| (rho(g, sample, u, v), u, v))
        .fold(None::<(T, usize, usize)>, |acc, x| match acc {
            Some(a) if a.0 >= x.0 => Some(a),
            _ => Some(x),
        });
    match worst {
        Some((d, u, v)) => {
            CheckReport::new("rho(u, v) < 8 r0 along edges", bound.as_f64(), d.as_f64(), d < bound).with_witness(pair_label(g, u, v))
        }
        None => CheckReport::new("rho(u, v) < 8 r0 along edges", bound.as_f64(), 0.0, true).with_note("no edges"),
    }
}

/// `max deg <= N_big`.
pub fn valency_check<T: Scalar>(g: &CaoGraph<T>) -> CheckReport {
    let worst = (0..g.len()).max_by_key(|&v| (g.degree(v), std::cmp::Reverse(v)));
    let d = worst.map_or(0, |v| g.degree(v));
    let r = CheckReport::new("max degree <= N_big", g.params.n_big as f64, d as f64, d <= g.params.n_big);
    match worst {
        Some(v) => r.with_witness(g.vertex(v).label()),
        None => r,
    }
}

/// Every graph check, in a fixed order. `qi_pairs` random pairs are drawn with `seed`.
pub fn verify_graph<T: Scalar>(
    g: &CaoGraph<T>,
    sample: &ConeSample<T>,
    qi_pairs: usize,
    seed: u64,
) -> Result<Vec<CheckReport>, CaoError> {
    let hops = graph_metric(g);
    let pairs = random_pairs(&hops, qi_pairs, seed);
    let qi = qi_check(g, sample, &hops, &pairs);
    let asym = asymmetry_check(g);
    let lms = level_metrics(g, sample);
    let [net_sep, net_cob] = level_net_checks(g, sample, &lms);
    let lap = laplacian_check(g)?;
    Ok(vec![
        edge_rule_check(g),
        separation_check(g, sample),
        coboundedness_check(g, sample),
        qi.lower,
        qi.upper,
        valency_check(g),
        edge_length_check(g, sample),
        lipschitz_check(g),
        net_sep,
        net_cob,
        region_multiplicity_check(g, sample, &lms),
        asym.minus,
        asym.plus,
        lap.check,
    ])
}
