use rayon::prelude::*;
use serde::Serialize;

use super::{Distances, MetricError};
use crate::scalar::cmp;
use crate::Scalar;

/// A μ-separated, μ-cobounded subset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Net<T> {
    pub mu: T,
    pub members: Vec<usize>,
}

/// Greedy maximal net: visit points in `order` (ascending when `None`) and
/// admit a point iff it is at distance `>= mu` from everything admitted so far.
pub fn maximal_net<T: Scalar, D: Distances<T> + ?Sized>(
    space: &D,
    mu: T,
    order: Option<&[usize]>,
) -> Result<Net<T>, MetricError> {
    if !(mu > T::zero()) {
        return Err(MetricError::InvalidParameter(format!("net radius must be positive, got {mu}")));
    }
    let n = space.size();
    let ascending: Vec<usize>;
    let order = match order {
        Some(o) => {
            let mut seen = vec![false; n];
            if o.len() != n || o.iter().any(|&i| i >= n || std::mem::replace(&mut seen[i], true)) {
                return Err(MetricError::InvalidParameter("seed order is not a permutation".into()));
            }
            o
        }
        None => {
            ascending = (0..n).collect();
            &ascending
        }
    };
    let mut members: Vec<usize> = Vec::new();
    for &p in order {
        if members.iter().all(|&m| space.distance(p, m) >= mu) {
            members.push(p);
        }
    }
    Ok(Net { mu, members })
}

/// First pair of distinct members closer than `mu`, if any.
pub fn separation_violation<T: Scalar, D: Distances<T> + ?Sized>(
    space: &D,
    members: &[usize],
    mu: T,
) -> Option<(usize, usize)> {
    for (k, &a) in members.iter().enumerate() {
        for &b in &members[k + 1..] {
            if a != b && space.distance(a, b) < mu {
                return Some((a, b));
            }
        }
    }
    None
}

/// First point at distance `>= mu` from every member, if any.
pub fn uncovered_point<T: Scalar, D: Distances<T> + ?Sized>(space: &D, members: &[usize], mu: T) -> Option<usize> {
    (0..space.size()).find(|&x| !(space.distance_to_set(x, members) < mu))
}

/// Greedy cover count of `B(center, big_r)` by open `small_r`-balls centred at
/// ball points, scanning the ball by increasing distance from the centre.
///
/// The scan order makes the count for a smaller `big_r` a prefix run of the
/// count for a larger one, so it is monotone in `big_r`.
pub fn greedy_cover_count<T: Scalar, D: Distances<T> + ?Sized>(space: &D, center: usize, big_r: T, small_r: T) -> usize {
    let mut ball: Vec<usize> = (0..space.size()).filter(|&y| space.distance(center, y) < big_r).collect();
    ball.sort_by(|&a, &b| cmp(&space.distance(center, a), &space.distance(center, b)).then(a.cmp(&b)));
    let mut covered = vec![false; ball.len()];
    let mut count = 0;
    for k in 0..ball.len() {
        if covered[k] {
            continue;
        }
        count += 1;
        let c = ball[k];
        for (slot, &z) in covered.iter_mut().zip(&ball).skip(k) {
            if !*slot && space.distance(c, z) < small_r {
                *slot = true;
            }
        }
    }
    count
}

/// Cover radii are taken from the grid `2^(k / COVER_GRID_STEPS_PER_OCTAVE)`.
pub const COVER_GRID_STEPS_PER_OCTAVE: i32 = 8;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoveringProfile<T> {
    pub big_r: T,
    pub small_r: T,
    /// Per-centre cover sizes, indexed like the space.
    pub counts: Vec<usize>,
    /// `max(counts)`: an upper bound for `N(big_r, small_r)`.
    pub n: usize,
}

/// Upper bound for the covering number `N(big_r, small_r)` of the space.
///
/// Per centre, the count is the least greedy count over grid radii
/// `g <= small_r`. Each such count bounds the optimal cover at radius `g`,
/// hence at `small_r`; taking the minimum over a fixed grid keeps the profile
/// antitone in `small_r` as well as monotone in `big_r`.
pub fn covering_number<T: Scalar, D: Distances<T> + ?Sized>(
    space: &D,
    big_r: T,
    small_r: T,
) -> Result<CoveringProfile<T>, MetricError> {
    if !(small_r > T::zero() && big_r > small_r) {
        return Err(MetricError::InvalidParameter(format!(
            "covering radii need big_r > small_r > 0, got ({big_r}, {small_r})"
        )));
    }
    let index = NeighbourIndex::new(space);
    let n = index.rows.len();
    let counts: Vec<usize> = (0..n)
        .into_par_iter()
        .map_init(|| Marks::new(n), |marks, c| index.envelope_count(marks, c, big_r, small_r))
        .collect();
    let max = counts.iter().copied().max().unwrap_or(0).max(1);
    Ok(CoveringProfile { big_r, small_r, counts, n: max })
}

/// Every point's neighbours sorted by distance, so that balls are row prefixes.
struct NeighbourIndex<T> {
    rows: Vec<Vec<(T, usize)>>,
    finest: T,
}

/// Reusable "covered" flags, cleared by bumping the epoch.
struct Marks {
    stamp: Vec<u32>,
    epoch: u32,
}

impl Marks {
    fn new(n: usize) -> Self {
        Self { stamp: vec![0; n], epoch: 0 }
    }

    fn clear(&mut self) {
        self.epoch += 1;
    }

    fn set(&mut self, i: usize) {
        self.stamp[i] = self.epoch;
    }

    fn get(&self, i: usize) -> bool {
        self.stamp[i] == self.epoch
    }
}

impl<T: Scalar> NeighbourIndex<T> {
    fn new<D: Distances<T> + ?Sized>(space: &D) -> Self {
        let n = space.size();
        let rows: Vec<Vec<(T, usize)>> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut row: Vec<(T, usize)> = (0..n).map(|j| (space.distance(i, j), j)).collect();
                row.sort_by(|a, b| cmp(&a.0, &b.0).then(a.1.cmp(&b.1)));
                row
            })
            .collect();
        let finest = rows
            .iter()
            .filter_map(|r| r.iter().find(|e| e.1 != r[0].1 || r.len() == 1).map(|e| e.0))
            .fold(T::infinity(), T::min);
        Self { rows, finest }
    }

    /// Same scan as [`greedy_cover_count`], with balls read off sorted rows.
    fn greedy(&self, marks: &mut Marks, center: usize, big_r: T, g: T) -> usize {
        marks.clear();
        let ball = &self.rows[center];
        let in_ball = |d: T| d < big_r;
        let mut count = 0;
        for &(d, z) in ball {
            if !in_ball(d) {
                break;
            }
            if marks.get(z) {
                continue;
            }
            count += 1;
            for &(dz, w) in &self.rows[z] {
                if !(dz < g) {
                    break;
                }
                marks.set(w);
            }
        }
        count
    }

    fn envelope_count(&self, marks: &mut Marks, center: usize, big_r: T, small_r: T) -> usize {
        let steps = T::from_i32(COVER_GRID_STEPS_PER_OCTAVE).unwrap();
        let two = T::lit(2.0);
        let ball_len = self.rows[center].iter().take_while(|e| e.0 < big_r).count();
        let mut k = (small_r.log2() * steps).floor();
        let mut best = ball_len;
        loop {
            let g = two.powf(k / steps);
            // below the smallest gap every ball is a singleton
            if !(g > self.finest) || best <= 1 {
                break;
            }
            best = best.min(self.greedy(marks, center, big_r, g));
            k = k - T::one();
        }
        best
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct QuasiLatticeReport<T> {
    /// `max_x d(x, Gamma)`, strictly below `mu` on success.
    pub max_gap: T,
    /// `max_x #(Gamma ∩ B(x, r))`.
    pub local_bound: usize,
    pub r: T,
}

pub fn quasilattice_check<T: Scalar, D: Distances<T> + ?Sized>(
    space: &D,
    gamma: &[usize],
    mu: T,
    r: T,
) -> Result<QuasiLatticeReport<T>, MetricError> {
    if gamma.is_empty() {
        return Err(MetricError::InvalidParameter("quasi-lattice must be nonempty".into()));
    }
    let n = space.size();
    let mut worst: Option<(usize, T)> = None;
    for x in 0..n {
        let g = space.distance_to_set(x, gamma);
        if worst.is_none_or(|(_, w)| g > w) {
            worst = Some((x, g));
        }
    }
    let (witness, max_gap) = worst.expect("nonempty space");
    if !(max_gap < mu) {
        return Err(MetricError::NotCobounded { witness, distance: max_gap.as_f64(), mu: mu.as_f64() });
    }
    let local_bound = (0..n)
        .map(|x| gamma.iter().filter(|&&g| space.distance(x, g) < r).count())
        .max()
        .unwrap_or(0);
    Ok(QuasiLatticeReport { max_gap, local_bound, r })
}

/// Heuristic properness scale: the smallest grid radius `r` at which the
/// doubling count `N(2r, r)` agrees with the count at the next grid radius.
/// Falls back to the smallest grid value when the profile never settles.
pub fn estimate_properness_scale<T: Scalar, D: Distances<T> + ?Sized>(space: &D, grid: &[T]) -> Result<T, MetricError> {
    let Some(&first) = grid.first() else {
        return Err(MetricError::InvalidParameter("empty scale grid".into()));
    };
    let counts = grid
        .iter()
        .map(|&r| covering_number(space, r * T::lit(2.0), r).map(|p| p.n))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(counts
        .windows(2)
        .position(|w| w[0] == w[1])
        .map_or(first, |k| grid[k]))
}
