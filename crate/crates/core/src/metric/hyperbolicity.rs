use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use super::{check_index, Distances, MetricError};
use crate::Scalar;

/// Gromov product `(x|y)_w = (d(x,w) + d(y,w) - d(x,y)) / 2`.
pub fn gromov_product<T: Scalar, D: Distances<T> + ?Sized>(
    space: &D,
    x: usize,
    y: usize,
    w: usize,
) -> Result<T, MetricError> {
    let n = space.size();
    for i in [x, y, w] {
        check_index(i, n)?;
    }
    Ok(product(space, x, y, w))
}

#[inline]
fn product<T: Scalar, D: Distances<T> + ?Sized>(space: &D, x: usize, y: usize, w: usize) -> T {
    (space.distance(x, w) + space.distance(y, w) - space.distance(x, y)) / T::lit(2.0)
}

#[derive(Debug, Clone, Copy)]
pub struct HyperbolicityOptions {
    /// Largest space scanned exhaustively.
    pub cap: usize,
    /// Above the cap, sample random quadruples instead of failing.
    pub approximate: bool,
    pub samples: usize,
    pub seed: u64,
}

impl Default for HyperbolicityOptions {
    fn default() -> Self {
        Self { cap: 400, approximate: false, samples: 2_000_000, seed: 0 }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct HyperbolicityReport<T> {
    pub delta: T,
    /// `(x, y, z, w)` with `min{(x|y)_w, (y|z)_w} - (x|z)_w = delta`.
    pub witness: Option<[usize; 4]>,
    pub exhaustive: bool,
    pub quadruples: u64,
}

/// Least `delta >= 0` such that `(x|z)_w >= min{(x|y)_w, (y|z)_w} - delta`
/// for every quadruple.
///
/// For a fixed 4-set the worst ordering equals half the gap between the two
/// largest of the three pair-sums `d(a,b)+d(c,d)`, `d(a,c)+d(b,d)`,
/// `d(a,d)+d(b,c)`, so only unordered 4-sets are visited.
pub fn hyperbolicity_delta<T: Scalar, D: Distances<T> + ?Sized>(
    space: &D,
    opts: HyperbolicityOptions,
) -> Result<HyperbolicityReport<T>, MetricError> {
    let n = space.size();
    if n > opts.cap {
        if !opts.approximate {
            return Err(MetricError::SampleTooLarge { n, cap: opts.cap });
        }
        return Ok(sampled(space, opts));
    }
    let best = (0..n)
        .into_par_iter()
        .map(|a| {
            let mut best: Option<(T, [usize; 4])> = None;
            for b in a + 1..n {
                for c in b + 1..n {
                    for d in c + 1..n {
                        let cand = four_set(space, [a, b, c, d]);
                        if best.is_none_or(|(v, _)| cand.0 > v) {
                            best = Some(cand);
                        }
                    }
                }
            }
            best
        })
        .reduce(|| None, pick);
    let count = if n >= 4 {
        (n as u64) * (n as u64 - 1) * (n as u64 - 2) * (n as u64 - 3) / 24
    } else {
        0
    };
    Ok(finish(best, true, count))
}

fn sampled<T: Scalar, D: Distances<T> + ?Sized>(space: &D, opts: HyperbolicityOptions) -> HyperbolicityReport<T> {
    let n = space.size();
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut best = None;
    for _ in 0..opts.samples {
        let mut q = [0usize; 4];
        for slot in q.iter_mut() {
            *slot = rng.gen_range(0..n);
        }
        best = pick(best, Some(four_set(space, q)));
    }
    finish(best, false, opts.samples as u64)
}

fn pick<T: Scalar>(a: Option<(T, [usize; 4])>, b: Option<(T, [usize; 4])>) -> Option<(T, [usize; 4])> {
    match (a, b) {
        (Some(x), Some(y)) => {
            if y.0 > x.0 || (y.0 == x.0 && y.1 < x.1) {
                Some(y)
            } else {
                Some(x)
            }
        }
        (x, None) => x,
        (None, y) => y,
    }
}

fn finish<T: Scalar>(best: Option<(T, [usize; 4])>, exhaustive: bool, quadruples: u64) -> HyperbolicityReport<T> {
    match best {
        Some((v, w)) if v > T::zero() => HyperbolicityReport { delta: v, witness: Some(w), exhaustive, quadruples },
        _ => HyperbolicityReport { delta: T::zero(), witness: None, exhaustive, quadruples },
    }
}

/// Worst four-point defect of `{a,b,c,d}` and an ordered witness `(x,y,z,w)`.
fn four_set<T: Scalar, D: Distances<T> + ?Sized>(space: &D, [a, b, c, d]: [usize; 4]) -> (T, [usize; 4]) {
    let dd = |i, j| space.distance(i, j);
    // (pair-sum, x, z, y, w): the largest sum must be d(x,z) + d(y,w)
    let mut sums = [
        (dd(a, b) + dd(c, d), a, b, c, d),
        (dd(a, c) + dd(b, d), a, c, b, d),
        (dd(a, d) + dd(b, c), a, d, b, c),
    ];
    sums.sort_by(|p, q| crate::scalar::cmp(&q.0, &p.0));
    let (top, x, z, y, w) = sums[0];
    ((top - sums[1].0) / T::lit(2.0), [x, y, z, w])
}
