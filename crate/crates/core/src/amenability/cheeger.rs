use rayon::prelude::*;
use serde::Serialize;

use super::AmenabilityError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheegerMethod {
    Exact,
    Sweep,
}

/// `min #dF / #F` over nonempty `F` with `#F <= #V / 2`, using the vertex
/// boundary `dF` = members of `F` adjacent to the complement plus outside
/// vertices adjacent to `F`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerEstimate {
    #[serde(with = "crate::report::real")]
    pub value: f64,
    pub method: CheegerMethod,
    /// The minimising set (exact) or the best sweep prefix.
    pub witness_set: Vec<usize>,
    pub boundary_size: usize,
}

/// Vertex boundary of `f` (a membership mask) in the graph.
pub fn vertex_boundary(adj: &[Vec<usize>], in_f: &[bool]) -> Vec<usize> {
    (0..adj.len())
        .filter(|&x| {
            if in_f[x] {
                adj[x].iter().any(|&y| !in_f[y])
            } else {
                adj[x].iter().any(|&y| in_f[y])
            }
        })
        .collect()
}

fn check_adjacency(adj: &[Vec<usize>]) -> Result<(), AmenabilityError> {
    let n = adj.len();
    for (u, nb) in adj.iter().enumerate() {
        for &v in nb {
            if v >= n || v == u || !adj[v].contains(&u) {
                return Err(AmenabilityError::InvalidParameter(format!(
                    "adjacency is not a simple undirected graph at ({u}, {v})"
                )));
            }
        }
    }
    Ok(())
}

/// Largest graph `cheeger_exact` accepts regardless of `max_n`.
pub const EXACT_HARD_LIMIT: usize = 24;

/// Exhaustive Cheeger constant. Ties go to the numerically smallest bitmask.
pub fn cheeger_exact(adj: &[Vec<usize>], max_n: usize) -> Result<CheegerEstimate, AmenabilityError> {
    let n = adj.len();
    let limit = max_n.min(EXACT_HARD_LIMIT);
    if n > limit {
        return Err(AmenabilityError::TooLarge { n, max: limit });
    }
    check_adjacency(adj)?;
    if n <= 1 {
        return Ok(CheegerEstimate { value: f64::INFINITY, method: CheegerMethod::Exact, witness_set: vec![], boundary_size: 0 });
    }
    let full: u32 = (1u32 << n) - 1;
    let nbr: Vec<u32> = adj.iter().map(|nb| nb.iter().fold(0, |m, &v| m | (1 << v))).collect();
    // reach[m] = union of the neighbourhoods of the members of m
    let mut reach = vec![0u32; 1 << n];
    for m in 1..=full {
        let low = m.trailing_zeros() as usize;
        reach[m as usize] = reach[(m & (m - 1)) as usize] | nbr[low];
    }
    let half = n / 2;
    let (b, f, mask) = (1..=full)
        .into_par_iter()
        .filter(|m| (m.count_ones() as usize) <= half)
        .map(|m| {
            let boundary = (m & reach[(full ^ m) as usize]) | (!m & full & reach[m as usize]);
            (boundary.count_ones() as u64, m.count_ones() as u64, m)
        })
        .reduce(|| (1, 0, u32::MAX), |a, c| if better(c, a) { c } else { a });
    Ok(CheegerEstimate {
        value: b as f64 / f as f64,
        method: CheegerMethod::Exact,
        witness_set: (0..n).filter(|&i| mask >> i & 1 == 1).collect(),
        boundary_size: b as usize,
    })
}

/// `c` strictly better than `a`: smaller ratio, then smaller mask. `a.1 == 0` is the empty seed.
fn better(c: (u64, u64, u32), a: (u64, u64, u32)) -> bool {
    if a.1 == 0 {
        return c.1 != 0;
    }
    if c.1 == 0 {
        return false;
    }
    let (lhs, rhs) = (c.0 * a.1, a.0 * c.1);
    lhs < rhs || (lhs == rhs && c.2 < a.2)
}

fn is_connected(adj: &[Vec<usize>]) -> bool {
    let n = adj.len();
    if n == 0 {
        return true;
    }
    let mut seen = vec![false; n];
    let mut stack = vec![0];
    seen[0] = true;
    while let Some(u) = stack.pop() {
        for &v in &adj[u] {
            if !seen[v] {
                seen[v] = true;
                stack.push(v);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// Vertex ordering by the second eigenvector of the lazy normalised walk
/// `(I + D^-1/2 A D^-1/2) / 2`, by power iteration deflated against the top
/// eigenvector `D^1/2 1`.
pub fn spectral_order(adj: &[Vec<usize>]) -> Vec<usize> {
    let n = adj.len();
    let sq: Vec<f64> = adj.iter().map(|nb| (nb.len() as f64).sqrt()).collect();
    let norm = sq.iter().map(|s| s * s).sum::<f64>().sqrt();
    let top: Vec<f64> = sq.iter().map(|s| s / norm).collect();
    let deflate = |x: &mut Vec<f64>| {
        let dot: f64 = x.iter().zip(&top).map(|(a, b)| a * b).sum();
        for (xi, ti) in x.iter_mut().zip(&top) {
            *xi -= dot * ti;
        }
        let len = x.iter().map(|v| v * v).sum::<f64>().sqrt();
        if len > 0.0 {
            x.iter_mut().for_each(|v| *v /= len);
        }
    };
    // deterministic, non-symmetric start
    let mut x: Vec<f64> = (0..n).map(|i| ((i * 7919 + 13) % 1009) as f64 / 1009.0 - 0.5 + i as f64 * 1e-3).collect();
    deflate(&mut x);
    for _ in 0..(20 * n).clamp(200, 5000) {
        let mut y = vec![0.0; n];
        for u in 0..n {
            let s: f64 = adj[u].iter().map(|&v| x[v] / sq[v]).sum();
            y[u] = 0.5 * x[u] + 0.5 * s / sq[u];
        }
        deflate(&mut y);
        let change: f64 = y.iter().zip(&x).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        x = y;
        if change < 1e-12 {
            break;
        }
    }
    let score: Vec<f64> = (0..n).map(|i| x[i] / sq[i]).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| score[a].total_cmp(&score[b]).then(a.cmp(&b)));
    order
}

/// Best sweep cut along [`spectral_order`]: prefixes and suffixes of size
/// at most `#V / 2`. Never below [`cheeger_exact`].
pub fn cheeger_sweep(adj: &[Vec<usize>]) -> Result<CheegerEstimate, AmenabilityError> {
    check_adjacency(adj)?;
    if !is_connected(adj) {
        return Err(AmenabilityError::NotConnected);
    }
    let n = adj.len();
    if n <= 1 {
        return Ok(CheegerEstimate { value: f64::INFINITY, method: CheegerMethod::Sweep, witness_set: vec![], boundary_size: 0 });
    }
    let order = spectral_order(adj);
    let mut best: Option<(usize, usize, Vec<usize>)> = None;
    for dir in [false, true] {
        let seq: Vec<usize> = if dir { order.iter().rev().copied().collect() } else { order.clone() };
        let mut in_f = vec![false; n];
        for k in 0..n / 2 {
            in_f[seq[k]] = true;
            let b = boundary_count(adj, &in_f, &seq[..=k]);
            let f = k + 1;
            if best.as_ref().is_none_or(|(bb, ff, _)| b * ff < bb * f) {
                let mut set = seq[..=k].to_vec();
                set.sort_unstable();
                best = Some((b, f, set));
            }
        }
    }
    let (b, f, set) = best.expect("n >= 2");
    Ok(CheegerEstimate { value: b as f64 / f as f64, method: CheegerMethod::Sweep, witness_set: set, boundary_size: b })
}

/// `#dF` touching only `F` and its neighbours.
fn boundary_count(adj: &[Vec<usize>], in_f: &[bool], members: &[usize]) -> usize {
    let mut seen = std::collections::HashSet::new();
    for &x in members {
        if adj[x].iter().any(|&y| !in_f[y]) {
            seen.insert(x);
        }
        for &y in &adj[x] {
            if !in_f[y] {
                seen.insert(y);
            }
        }
    }
    seen.len()
}
