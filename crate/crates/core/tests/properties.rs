#![allow(clippy::needless_range_loop)]

use coarselab::amenability::{cheeger_exact, cheeger_sweep, union_split_check, QuasiLattice};
use coarselab::cao::{
    build_cao_graph, edge_length_check, edge_rule_check, graph_metric, level_metrics, level_net_checks, lipschitz_check,
    qi_check, select_params, valency_check, CaoError, NetOrder, ParamOptions,
};
use coarselab::cone::{contraction_check, ConePoint, ConeSample, HyperbolicCone, LevelMetric};
use coarselab::metric::{
    coarse_components, covering_number, hyperbolicity_delta, maximal_net, reparametrize_rough_geodesic,
    rough_geodesic_violation, separation_violation, uncovered_point, validate_metric, Distances, FiniteMetricSpace,
    HyperbolicityOptions,
};
use proptest::prelude::*;

fn line(xs: &[f64]) -> FiniteMetricSpace<f64> {
    FiniteMetricSpace::from_fn((0..xs.len()).map(|i| format!("p{i}")).collect(), |i, j| (xs[i] - xs[j]).abs()).unwrap()
}

fn plane(pts: &[(f64, f64)]) -> FiniteMetricSpace<f64> {
    FiniteMetricSpace::from_fn((0..pts.len()).map(|i| format!("p{i}")).collect(), |i, j| {
        (pts[i].0 - pts[j].0).hypot(pts[i].1 - pts[j].1)
    })
    .unwrap()
}

/// Distinct points in the unit square.
fn points(max: usize) -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..max).prop_map(|mut v| {
        v.sort_by(|a, b| a.partial_cmp(b).unwrap());
        v.dedup_by(|a, b| (a.0 - b.0).hypot(a.1 - b.1) < 1e-6);
        v
    })
}

fn shuffled(n: usize) -> impl Strategy<Value = Vec<usize>> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn connected_graph(max: usize) -> impl Strategy<Value = Vec<Vec<usize>>> {
    (2..max).prop_flat_map(|n| {
        let tree = prop::collection::vec(any::<prop::sample::Index>(), n - 1);
        let extra = prop::collection::vec((0..n, 0..n), 0..2 * n);
        (tree, extra).prop_map(move |(tree, extra)| {
            let mut adj = vec![vec![]; n];
            let mut add = |a: usize, b: usize| {
                if a != b && !adj[a].contains(&b) {
                    adj[a].push(b);
                    adj[b].push(a);
                }
            };
            for (v, ix) in tree.iter().enumerate() {
                add(v + 1, ix.index(v + 1));
            }
            for (a, b) in extra {
                add(a, b);
            }
            for nb in &mut adj {
                nb.sort_unstable();
            }
            adj
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn validate_matches_triangle_scan(n in 2usize..8, cells in prop::collection::vec(0.2..1.0f64, 64)) {
        let mut rows = vec![vec![0.0; n]; n];
        let mut k = 0;
        for i in 0..n {
            for j in i + 1..n {
                rows[i][j] = cells[k];
                rows[j][i] = cells[k];
                k += 1;
            }
        }
        let scan_ok = (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| rows[i][j] <= rows[i][k] + rows[k][j] + 1e-9)));
        prop_assert_eq!(validate_metric(&rows).is_ok(), scan_ok);
    }

    #[test]
    fn nets_are_separated_and_cobounded(pts in points(30), mu in 0.05..0.8f64, seed in any::<u64>()) {
        let z = plane(&pts);
        let mut order: Vec<usize> = (0..z.len()).collect();
        order.sort_by_key(|&i| (i as u64).wrapping_mul(seed | 1).rotate_left(17));
        for o in [None, Some(order.as_slice())] {
            let net = maximal_net(&z, mu, o).unwrap();
            prop_assert_eq!(separation_violation(&z, &net.members, mu), None);
            prop_assert_eq!(uncovered_point(&z, &net.members, mu), None);
        }
    }

    #[test]
    fn components_match_threshold_bfs(pts in points(25), eps in 0.05..0.5f64, perm in shuffled(25)) {
        let z = plane(&pts);
        let n = z.len();
        let part = coarse_components(&z, eps).unwrap();
        // BFS oracle
        let mut label = vec![usize::MAX; n];
        let mut next = 0;
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            let mut stack = vec![s];
            label[s] = next;
            while let Some(u) = stack.pop() {
                for v in 0..n {
                    if label[v] == usize::MAX && z.d(u, v) <= eps {
                        label[v] = next;
                        stack.push(v);
                    }
                }
            }
            next += 1;
        }
        prop_assert_eq!(part.len(), next);
        for i in 0..n {
            for j in 0..n {
                prop_assert_eq!(part.block_of(i) == part.block_of(j), label[i] == label[j]);
            }
        }
        // relabelled input gives the same partition
        let perm: Vec<usize> = perm.into_iter().filter(|&i| i < n).collect();
        let permuted: Vec<(f64, f64)> = perm.iter().map(|&i| pts[i]).collect();
        let other = coarse_components(&plane(&permuted), eps).unwrap();
        for a in 0..n {
            for b in 0..n {
                prop_assert_eq!(other.block_of(a) == other.block_of(b), part.block_of(perm[a]) == part.block_of(perm[b]));
            }
        }
    }

    #[test]
    fn tree_metrics_have_zero_delta(n in 2usize..=12, parents in prop::collection::vec((any::<prop::sample::Index>(), 0.1..3.0f64), 11)) {
        let mut adj = vec![vec![]; n];
        for v in 1..n {
            let (ix, w) = &parents[v - 1];
            let p = ix.index(v);
            adj[v].push((p, *w));
            adj[p].push((v, *w));
        }
        let mut rows = vec![vec![0.0; n]; n];
        for (s, row) in rows.iter_mut().enumerate() {
            let mut stack = vec![(s, usize::MAX, 0.0)];
            while let Some((u, from, d)) = stack.pop() {
                row[u] = d;
                for &(v, w) in &adj[u] {
                    if v != from {
                        stack.push((v, u, d + w));
                    }
                }
            }
        }
        let z = validate_metric(&rows).unwrap();
        let rep = hyperbolicity_delta(&z, HyperbolicityOptions { cap: 16, approximate: false, samples: 0, seed: 0 }).unwrap();
        prop_assert!(rep.delta.abs() < 1e-9, "delta {}", rep.delta);
    }

    #[test]
    fn covering_numbers_are_monotone(pts in points(30), r in 0.05..0.3f64, k in 1.5..4.0f64) {
        let z = plane(&pts);
        let n = |big: f64, small: f64| covering_number(&z, big, small).unwrap().n;
        prop_assert!(n(k * r, r) >= n(k * r, 1.3 * r));
        prop_assert!(n(k * r, r) <= n(1.5 * k * r, r));
    }

    #[test]
    fn reparametrised_paths_are_rough_geodesics(
        steps in prop::collection::vec((0.05..0.5f64, -1.0..1.0f64), 2..15),
        mu in 0.0..0.4f64,
        start in 0.0..2.0f64,
    ) {
        // positions s_k + e_k on a line with |e_k| <= mu/2, sampled at times start + s_k
        let mut s = 0.0;
        let mut xs = Vec::new();
        let mut path = Vec::new();
        for (k, (dt, e)) in steps.iter().enumerate() {
            xs.push(s + e * mu / 2.0);
            path.push((start + s, k));
            s += dt;
        }
        let z = line(&xs);
        prop_assert_eq!(rough_geodesic_violation(&path, mu, &z), None);
        let out = reparametrize_rough_geodesic(&path, mu, &z).unwrap();
        prop_assert_eq!(rough_geodesic_violation(&out, 2.0 * mu, &z), None);
        prop_assert_eq!(out.first().unwrap().0, 0.0);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cone_metric_on_samples(xs in prop::collection::vec(0.0..1.0f64, 2..8), r0 in 0.3..2.0f64, depth in 1usize..4) {
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-6);
        prop_assume!(xs.len() >= 2);
        let sample = ConeSample::strata(HyperbolicCone::new(line(&xs)).unwrap(), r0, depth).unwrap();
        let m = sample.len();
        let d = |i: usize, j: usize| sample.distance(i, j);
        for i in 0..m {
            prop_assert_eq!(d(i, i), 0.0);
            for j in 0..m {
                prop_assert_eq!(d(i, j), d(j, i));
                if i != j {
                    prop_assert!(d(i, j) > 0.0);
                }
                for k in 0..m {
                    prop_assert!(d(i, j) <= d(i, k) + d(k, j) + 1e-9);
                }
            }
        }
        for t in [0.0, r0, depth as f64 * r0] {
            prop_assert_eq!(contraction_check(&sample, t).violations, 0);
        }
    }

    #[test]
    fn bs_isometry_preserves_distance(xs in prop::collection::vec(0.0..1.0f64, 2..8), a in 0usize..8, b in 0usize..8, s in 0.0..15.0f64, t in 0.0..15.0f64) {
        let z = line(&xs);
        let cone = HyperbolicCone::new(z.clone()).unwrap();
        prop_assume!(z.diameter() > 0.0);
        let (a, b) = (a % xs.len(), b % xs.len());
        let (ts, tt) = (z.diameter() * (-s).exp(), z.diameter() * (-t).exp());
        let bs = cone.bs_metric((a, ts), (b, tt)).unwrap();
        let rho = cone.rho(cone.bs_isometry((a, ts)).unwrap(), cone.bs_isometry((b, tt)).unwrap());
        prop_assert!((bs - rho).abs() <= 1e-9, "{} vs {}", bs, rho);
    }

    #[test]
    fn level_metric_dominates_rho(xs in prop::collection::vec(0.0..1.0f64, 2..10), r in 0.0..3.0f64, l in 0.5..3.0f64) {
        let z = line(&xs);
        prop_assume!(z.diameter() > 0.0);
        let mut sample = ConeSample::strata(HyperbolicCone::new(z).unwrap(), 1.0, 3).unwrap();
        let extra: Vec<ConePoint<f64>> = (0..xs.len()).map(|b| ConePoint { base: b, height: r + 0.25 }).collect();
        sample.insert(&extra).unwrap();
        let lm = LevelMetric::build(&sample, r, l);
        for a in 0..lm.size() {
            for b in 0..lm.size() {
                let rho = sample.distance(lm.node(a), lm.node(b));
                let d = lm.distance(a, b);
                prop_assert!(d >= rho - 1e-9);
                if rho <= l {
                    prop_assert!((d - rho).abs() <= 1e-9);
                }
            }
        }
    }

    #[test]
    fn boundary_is_monotone_in_r(pts in points(20), mask in any::<u32>(), r in 0.05..0.5f64, k in 1.0..3.0f64) {
        let z = plane(&pts);
        let gamma = QuasiLattice::full(&z, 2.0).unwrap();
        let f: Vec<usize> = (0..z.len()).filter(|&i| mask >> i & 1 == 1).collect();
        let small = gamma.boundary(&f, r).unwrap();
        let large = gamma.boundary(&f, k * r).unwrap();
        prop_assert!(small.iter().all(|x| large.contains(x)));
        prop_assert!(large.iter().all(|&x| x < z.len()));
        // direct definition
        let rest: Vec<usize> = (0..z.len()).filter(|i| !f.contains(i)).collect();
        let oracle: Vec<usize> = (0..z.len())
            .filter(|&x| z.distance_to_set(x, &f) < r && z.distance_to_set(x, &rest) < r)
            .collect();
        prop_assert_eq!(small, oracle);
    }

    #[test]
    fn sweep_never_beats_exact(adj in connected_graph(14)) {
        let exact = cheeger_exact(&adj, 16).unwrap();
        let sweep = cheeger_sweep(&adj).unwrap();
        prop_assert!(sweep.value >= exact.value - 1e-12);
    }

    #[test]
    fn union_inequality_follows_from_parts(a in connected_graph(10), b in connected_graph(10), seed in any::<u64>()) {
        let constants: Vec<(f64, f64)> = [&a, &b].iter().map(|g| (1.0 / cheeger_exact(g, 16).unwrap().value, 1.5)).collect();
        let rep = union_split_check(&[a.as_slice(), b.as_slice()], &constants, 20, seed).unwrap();
        prop_assert_eq!(rep.violations, 0);
        prop_assert_eq!(rep.hypotheses_held, 20);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn cao_graph_invariants(xs in prop::collection::vec(0.0..1.0f64, 12..24), seed in any::<u64>()) {
        let mut xs = xs;
        xs.sort_by(f64::total_cmp);
        xs.dedup_by(|a, b| (*a - *b).abs() < 1e-3);
        prop_assume!(xs.len() >= 3);
        let cone = HyperbolicCone::new(line(&xs)).unwrap();
        let (params, sample) = select_params(&cone, 0.0, 0.0, 1.744, 2, ParamOptions::default()).unwrap();
        let g = match build_cao_graph(&sample, params, 2, NetOrder::Seeded(seed)) {
            Ok(g) => g,
            // too coarse a base for the chosen delta: refused with the spacing it would need
            Err(CaoError::InfeasibleParams { required_mesh, .. }) => {
                prop_assert!(required_mesh.is_some());
                return Ok(());
            }
            Err(e) => panic!("{e}"),
        };
        for v in 0..g.len() {
            for &u in g.neighbours(v) {
                prop_assert!(u != v);
                prop_assert!(g.neighbours(u).contains(&v));
                prop_assert!(g.vertex(u).level.abs_diff(g.vertex(v).level) <= 1);
            }
        }
        prop_assert!(edge_rule_check(&g).pass);
        prop_assert!(lipschitz_check(&g).pass);
        prop_assert!(edge_length_check(&g, &sample).pass);
        prop_assert!(valency_check(&g).pass);
        let lms = level_metrics(&g, &sample);
        for r in level_net_checks(&g, &sample, &lms) {
            prop_assert!(r.pass, "{:?}", r);
        }
        let hops = graph_metric(&g);
        let all: Vec<(usize, usize)> =
            (0..g.len()).flat_map(|u| (u + 1..g.len()).map(move |v| (u, v))).filter(|&(u, v)| hops.get(u, v).is_some()).collect();
        prop_assert!(qi_check(&g, &sample, &hops, &all).lower.pass);

        let again = build_cao_graph(&sample, params, 2, NetOrder::Seeded(seed)).unwrap();
        prop_assert_eq!(
            serde_json::to_string(&g.to_file(vec![])).unwrap(),
            serde_json::to_string(&again.to_file(vec![])).unwrap()
        );
    }
}
