//! Coarse isoperimetry: the boundary `d_r F`, Cheeger constants of graphs,
//! Laplacian certificates on truncated Cao graphs and the union of per-component
//! constants.

mod cheeger;
mod profile;

pub use cheeger::{
    cheeger_exact, cheeger_sweep, spectral_order, vertex_boundary, CheegerEstimate, CheegerMethod, EXACT_HARD_LIMIT,
};
pub use profile::{hop_ball_subsets, isoperimetric_profile, profile_csv, profile_svg, ProfileRow};

use serde::Serialize;
use thiserror::Error;

use crate::cao::{laplacian_check, lipschitz_check, CaoError, CaoGraph};
use crate::metric::{quasilattice_check, Distances, MetricError, QuasiLatticeReport};
use crate::report::CheckReport;
use crate::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmenabilityError {
    #[error("graph has {n} vertices, exact enumeration is limited to {max}")]
    TooLarge { n: usize, max: usize },
    #[error("graph is not connected")]
    NotConnected,
    #[error("graph has no interior vertices")]
    NoInteriorVertices,
    #[error("no component certificates to combine")]
    EmptyInput,
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Cao(#[from] CaoError),
    #[error(transparent)]
    Metric(#[from] MetricError),
}

/// A subset `members` of an ambient finite metric, meant to be cobounded at
/// radius `mu`.
#[derive(Debug, Clone)]
pub struct QuasiLattice<'a, D: ?Sized, T> {
    ambient: &'a D,
    members: Vec<usize>,
    in_lattice: Vec<bool>,
    mu: T,
}

impl<'a, T: Scalar, D: Distances<T> + ?Sized> QuasiLattice<'a, D, T> {
    pub fn new(ambient: &'a D, members: Vec<usize>, mu: T) -> Result<Self, AmenabilityError> {
        let n = ambient.size();
        let mut in_lattice = vec![false; n];
        for &m in &members {
            if m >= n {
                return Err(AmenabilityError::InvalidParameter(format!("member {m} out of range for {n} points")));
            }
            in_lattice[m] = true;
        }
        if !(mu > T::zero()) {
            return Err(AmenabilityError::InvalidParameter(format!("mu must be positive, got {mu}")));
        }
        Ok(Self { ambient, members, in_lattice, mu })
    }

    /// The whole ambient space as a lattice.
    pub fn full(ambient: &'a D, mu: T) -> Result<Self, AmenabilityError> {
        Self::new(ambient, (0..ambient.size()).collect(), mu)
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn contains(&self, x: usize) -> bool {
        self.in_lattice.get(x).copied().unwrap_or(false)
    }

    pub fn mu(&self) -> T {
        self.mu
    }

    /// Coboundedness at `mu` and the local count `max_x #(Gamma ∩ B(x, r))`.
    pub fn check(&self, r: T) -> Result<QuasiLatticeReport<T>, AmenabilityError> {
        Ok(quasilattice_check(self.ambient, &self.members, self.mu, r)?)
    }

    /// `d_r F = {x in Gamma : d(x, F) < r and d(x, Gamma \ F) < r}`.
    pub fn boundary(&self, f: &[usize], r: T) -> Result<Vec<usize>, AmenabilityError> {
        if !(r > T::zero()) {
            return Err(AmenabilityError::InvalidParameter(format!("r must be positive, got {r}")));
        }
        let mut in_f = vec![false; self.ambient.size()];
        for &x in f {
            if !self.contains(x) {
                return Err(AmenabilityError::InvalidParameter(format!("{x} is not a lattice member")));
            }
            in_f[x] = true;
        }
        let rest: Vec<usize> = self.members.iter().copied().filter(|&x| !in_f[x]).collect();
        let mut fs: Vec<usize> = f.to_vec();
        fs.sort_unstable();
        fs.dedup();
        Ok(self
            .members
            .iter()
            .copied()
            .filter(|&x| self.ambient.distance_to_set(x, &fs) < r && self.ambient.distance_to_set(x, &rest) < r)
            .collect())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IsoperimetryReport {
    pub f_size: usize,
    pub boundary_size: usize,
    pub r: f64,
    /// `#F / #d_r F` (`+inf` for an empty boundary).
    #[serde(with = "crate::report::real")]
    pub c_witness: f64,
    pub target_c: f64,
    /// `#F <= C #d_r F`
    pub pass: bool,
}

pub fn isoperimetric_check<T: Scalar, D: Distances<T> + ?Sized>(
    gamma: &QuasiLattice<'_, D, T>,
    f: &[usize],
    r: T,
    c: f64,
) -> Result<IsoperimetryReport, AmenabilityError> {
    if f.is_empty() {
        return Err(AmenabilityError::InvalidParameter("F must be nonempty".into()));
    }
    let mut fs = f.to_vec();
    fs.sort_unstable();
    fs.dedup();
    let b = gamma.boundary(&fs, r)?.len();
    if b == 0 {
        log::debug!("F of size {} has empty boundary; isoperimetry fails for every C", fs.len());
    }
    let c_witness = if b == 0 { f64::INFINITY } else { fs.len() as f64 / b as f64 };
    Ok(IsoperimetryReport {
        f_size: fs.len(),
        boundary_size: b,
        r: r.as_f64(),
        c_witness,
        target_c: c,
        pass: fs.len() as f64 <= c * b as f64,
    })
}

/// Laplacian certificate for a truncated Cao graph.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    /// Always "truncation certificate": it checks the vertex-local bound on a
    /// finite truncation, not non-amenability of the infinite graph.
    pub kind: String,
    pub issued: bool,
    pub min_laplacian_ratio: f64,
    pub n_big_bound: f64,
    pub meets_n_big_bound: bool,
    pub interior_vertex_count: usize,
    pub excluded_top_level_count: usize,
    pub witness: Option<String>,
    pub lipschitz: CheckReport,
}

/// Issued iff `min Delta h / r0 > 0` over interior vertices and `h` is
/// `r0`-Lipschitz on vertices.
pub fn nonamenability_certificate<T: Scalar>(g: &CaoGraph<T>) -> Result<Certificate, AmenabilityError> {
    let lap = laplacian_check(g)?;
    if lap.interior == 0 {
        return Err(AmenabilityError::NoInteriorVertices);
    }
    let lipschitz = lipschitz_check(g);
    let n_big_bound = 1.0 / g.params.n_big.max(1) as f64;
    Ok(Certificate {
        kind: "truncation certificate".into(),
        issued: lap.min_ratio > 0.0 && lipschitz.pass,
        min_laplacian_ratio: lap.min_ratio,
        n_big_bound,
        meets_n_big_bound: lap.min_ratio >= n_big_bound,
        interior_vertex_count: lap.interior,
        excluded_top_level_count: lap.excluded_top,
        witness: lap.witness,
        lipschitz,
    })
}

/// Componentwise maxima `(max C_i, max r_i)`.
pub fn combine_components(certs: &[(f64, f64)]) -> Result<(f64, f64), AmenabilityError> {
    if certs.is_empty() {
        return Err(AmenabilityError::EmptyInput);
    }
    Ok(certs.iter().fold((f64::NEG_INFINITY, f64::NEG_INFINITY), |(c, r), &(ci, ri)| (c.max(ci), r.max(ri))))
}

/// Graph boundaries are taken at this radius, i.e. in `(1, 2)`.
pub const GRAPH_BOUNDARY_RADIUS: f64 = 1.5;

/// Block-diagonal union of graphs, with the vertex offset of each block.
pub fn disjoint_union(graphs: &[&[Vec<usize>]]) -> (Vec<Vec<usize>>, Vec<usize>) {
    let mut adj = Vec::new();
    let mut offsets = Vec::with_capacity(graphs.len());
    for g in graphs {
        let off = adj.len();
        offsets.push(off);
        adj.extend(g.iter().map(|nb| nb.iter().map(|&v| v + off).collect::<Vec<_>>()));
    }
    (adj, offsets)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnionSplitReport {
    pub splits: usize,
    /// Splits where every part met its own component inequality.
    pub hypotheses_held: usize,
    /// Splits where the parts held but the union failed `#F <= C #dF`.
    pub violations: usize,
    /// `max #F / #dF` over all splits.
    #[serde(with = "crate::report::real")]
    pub worst_ratio: f64,
    pub c: f64,
    pub r: f64,
    pub check: CheckReport,
}

/// Draws random `F = F_1 ⊔ ... ⊔ F_n` with `0 < #F_i <= #V_i / 2` on the
/// disjoint union of the component graphs and re-checks that the union
/// inequality with `(C, r) = combine_components(constants)` follows from the
/// componentwise ones.
pub fn union_split_check(
    components: &[&[Vec<usize>]],
    constants: &[(f64, f64)],
    splits: usize,
    seed: u64,
) -> Result<UnionSplitReport, AmenabilityError> {
    use rand::{Rng, SeedableRng};
    if components.len() != constants.len() {
        return Err(AmenabilityError::InvalidParameter("one constant pair per component".into()));
    }
    let (c, r) = combine_components(constants)?;
    if components.iter().any(|g| g.len() < 2) {
        return Err(AmenabilityError::InvalidParameter("components need at least two vertices".into()));
    }
    let (adj, offsets) = disjoint_union(components);
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let (mut held, mut violations, mut worst) = (0, 0, 0.0f64);
    let mut witness = None;
    for s in 0..splits {
        let mut in_f = vec![false; adj.len()];
        let mut parts_ok = true;
        for (k, g) in components.iter().enumerate() {
            let n = g.len();
            let size = rng.gen_range(1..=n / 2);
            let chosen = rand::seq::index::sample(&mut rng, n, size);
            let mut local = vec![false; n];
            for v in chosen.iter() {
                local[v] = true;
                in_f[offsets[k] + v] = true;
            }
            let b = vertex_boundary(g, &local).len();
            parts_ok &= size as f64 <= constants[k].0 * b as f64;
        }
        let f = in_f.iter().filter(|&&x| x).count();
        let b = vertex_boundary(&adj, &in_f).len();
        let ratio = if b == 0 { f64::INFINITY } else { f as f64 / b as f64 };
        worst = worst.max(ratio);
        if parts_ok {
            held += 1;
            if !(f as f64 <= c * b as f64) {
                violations += 1;
                witness.get_or_insert(s);
            }
        }
    }
    let mut check = CheckReport::new("#F <= C #d_r F on random splits across components", c, worst, violations == 0)
        .with_note(format!("{held} of {splits} splits met every component inequality"));
    if let Some(s) = witness {
        check = check.with_witness(format!("split {s}"));
    }
    Ok(UnionSplitReport { splits, hypotheses_held: held, violations, worst_ratio: worst, c, r, check })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cao::HopDistances;
    use crate::metric::validate_metric;

    fn integers(n: usize) -> crate::metric::FiniteMetricSpace<f64> {
        let rows: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| (i as f64 - j as f64).abs()).collect()).collect();
        validate_metric(&rows).unwrap()
    }

    #[test]
    fn boundary_on_the_line() {
        let z = integers(11);
        let g = QuasiLattice::full(&z, 1.5).unwrap();
        assert_eq!(g.boundary(&[3, 4, 5], 1.5).unwrap(), vec![2, 3, 5, 6]);
        assert!(g.boundary(&[], 1.5).unwrap().is_empty());
        let all: Vec<usize> = (0..11).collect();
        assert!(g.boundary(&all, 1.5).unwrap().is_empty());
        let wide = g.boundary(&[3, 4, 5], 2.5).unwrap();
        assert!(g.boundary(&[3, 4, 5], 1.5).unwrap().iter().all(|x| wide.contains(x)));
        assert!(g.check(1.5).unwrap().max_gap < 1.5);
    }

    #[test]
    fn isoperimetry_examples() {
        let z = integers(11);
        let g = QuasiLattice::full(&z, 1.5).unwrap();
        let single = isoperimetric_check(&g, &[4], 1.5, 1.0).unwrap();
        assert!(single.pass);
        let all: Vec<usize> = (0..11).collect();
        let whole = isoperimetric_check(&g, &all, 1.5, 1e9).unwrap();
        assert!(!whole.pass && whole.boundary_size == 0);
        assert!(isoperimetric_check(&g, &[], 1.5, 1.0).is_err());
    }

    #[test]
    fn graph_boundary_agrees_with_metric_boundary() {
        let adj: Vec<Vec<usize>> = (0..8).map(|i| vec![(i + 7) % 8, (i + 1) % 8]).collect();
        let hops = HopDistances::from_adjacency(&adj);
        let g = QuasiLattice::full(&hops, 1.5).unwrap();
        let f = [0, 1, 2, 3];
        let in_f: Vec<bool> = (0..8).map(|i| i < 4).collect();
        assert_eq!(g.boundary(&f, GRAPH_BOUNDARY_RADIUS).unwrap(), vertex_boundary(&adj, &in_f));
    }

    #[test]
    fn combine() {
        assert_eq!(combine_components(&[(2.0, 1.0)]).unwrap(), (2.0, 1.0));
        assert_eq!(combine_components(&[(2.0, 1.0), (5.0, 3.0)]).unwrap(), (5.0, 3.0));
        assert_eq!(combine_components(&[]), Err(AmenabilityError::EmptyInput));
    }

    #[test]
    fn union_of_cycles() {
        let c8: Vec<Vec<usize>> = (0..8).map(|i| vec![(i + 7) % 8, (i + 1) % 8]).collect();
        let c6: Vec<Vec<usize>> = (0..6).map(|i| vec![(i + 5) % 6, (i + 1) % 6]).collect();
        let h8 = cheeger_exact(&c8, 20).unwrap().value;
        let h6 = cheeger_exact(&c6, 20).unwrap().value;
        let rep = union_split_check(&[&c8, &c6], &[(1.0 / h8, 1.5), (1.0 / h6, 1.5)], 50, 2).unwrap();
        assert_eq!(rep.hypotheses_held, 50);
        assert_eq!(rep.violations, 0);
        assert!(rep.check.pass);
        assert_eq!(rep.c, 1.0 / h8.min(h6));
    }

    #[test]
    fn union_offsets() {
        let a = vec![vec![1], vec![0]];
        let b = vec![vec![]];
        let (adj, off) = disjoint_union(&[&a, &b, &a]);
        assert_eq!(off, vec![0, 2, 3]);
        assert_eq!(adj[3], vec![4]);
    }
}
