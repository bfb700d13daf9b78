//! The thirteen acceptance criteria. Each test prints one `PASS`/`FAIL` line
//! with the measured value before asserting.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use coarselab::amenability::{cheeger_exact, cheeger_sweep, combine_components};
use coarselab::cao::{
    asymmetry_check, build_cao_graph, coboundedness_check, graph_metric, laplacian_check, qi_check, random_pairs,
    select_params, separation_check, valency_check, CaoGraph, CaoParams, NetOrder, ParamOptions,
};
use coarselab::cone::{
    ball_height_confinement, contraction_check, kappa, level_expansion_check, sigma_ray, ConeSample, HyperbolicCone,
};
use coarselab::metric::{circle_sample, estimate_properness_scale, two_intervals, FiniteMetricSpace};
use coarselab::pipeline::{self, RunConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn report(n: u32, name: &str, pass: bool, detail: String) {
    println!("criterion {n:>2} {}: {name}: {detail}", if pass { "PASS" } else { "FAIL" });
}

struct Circle64 {
    sample: ConeSample<f64>,
    graph: CaoGraph<f64>,
    params: CaoParams<f64>,
    kappa: f64,
}

/// circle_sample(64), mu = 0, depth 5, with r_b estimated as the pipeline does.
fn circle64() -> &'static Circle64 {
    static CELL: OnceLock<Circle64> = OnceLock::new();
    CELL.get_or_init(|| {
        let cone = HyperbolicCone::new(circle_sample(64).unwrap()).unwrap();
        let k = kappa(1.0).unwrap().kappa;
        let provisional = ConeSample::strata(cone.clone(), 1.0, 3).unwrap();
        let grid: Vec<f64> = (0..7).map(|i| 0.125 * 2f64.powi(i)).collect();
        let r_b = estimate_properness_scale(&provisional, &grid).unwrap();
        let (params, sample) = select_params(&cone, 0.0, r_b, k, 5, ParamOptions::default()).unwrap();
        let graph = build_cao_graph(&sample, params, 5, NetOrder::Ascending).unwrap();
        Circle64 { sample, graph, params, kappa: k }
    })
}

fn triangle_violations(z: &FiniteMetricSpace<f64>, tol: f64) -> (u64, f64) {
    let n = z.len();
    let (mut bad, mut worst) = (0, f64::NEG_INFINITY);
    for i in 0..n {
        for j in 0..n {
            let dij = z.d(i, j);
            for k in 0..n {
                let excess = dij - z.d(i, k) - z.d(k, j);
                worst = worst.max(excess);
                if excess > tol {
                    bad += 1;
                }
            }
        }
    }
    (bad, worst)
}

#[test]
fn c01_cone_metric_axioms() {
    let t = Instant::now();
    let mut detail = Vec::new();
    let mut pass = true;
    for (name, z) in [("circle(32)", circle_sample(32).unwrap()), ("two_intervals(16, 1)", two_intervals(16, 1.0).unwrap())]
    {
        let sample: ConeSample<f64> = ConeSample::strata(HyperbolicCone::new(z).unwrap(), 1.0, 5).unwrap();
        let pts = sample.points();
        let cone = sample.cone();
        let mut sym_diag = 0u64;
        let z = FiniteMetricSpace::from_fn((0..pts.len()).map(|i| i.to_string()).collect(), |i, j| {
            cone.rho(pts[i], pts[j])
        })
        .unwrap();
        for i in 0..pts.len() {
            for j in 0..pts.len() {
                let (a, b): (f64, f64) = (cone.rho(pts[i], pts[j]), cone.rho(pts[j], pts[i]));
                if (a - b).abs() > 1e-9 || (i == j) != (a == 0.0) {
                    sym_diag += 1;
                }
            }
        }
        let (bad, worst) = triangle_violations(&z, 1e-9);
        pass &= bad == 0 && sym_diag == 0;
        detail.push(format!("{name}: {} points, {bad} triangle violations (worst excess {worst:.2e}), {sym_diag} symmetry/diagonal", pts.len()));
    }
    let elapsed = t.elapsed();
    pass &= elapsed < Duration::from_secs(10);
    report(1, "metric axioms of rho", pass, format!("{}; {elapsed:.2?}", detail.join("; ")));
    assert!(pass);
}

#[test]
fn c02_bonk_schramm_isometry() {
    let z = circle_sample(32).unwrap();
    let cone = HyperbolicCone::new(z.clone()).unwrap();
    let dd: f64 = z.diameter();
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..10_000 {
        let (x, y) = (rng.gen_range(0..32), rng.gen_range(0..32));
        let t = dd * (-rng.gen_range(0.0..20.0f64)).exp();
        let s = dd * (-rng.gen_range(0.0..20.0f64)).exp();
        let oracle = 2.0 * ((z.d(x, y) + t.max(s)) / (t * s).sqrt()).ln();
        let bs = cone.bs_metric((x, t), (y, s)).unwrap();
        let rho = cone.rho(cone.bs_isometry((x, t)).unwrap(), cone.bs_isometry((y, s)).unwrap());
        worst = worst.max((rho - oracle).abs()).max((bs - oracle).abs());
    }
    let pass = worst <= 1e-9;
    report(2, "rho_BS agrees with rho under (x, t) -> (x, log D - log t)", pass, format!("max |diff| = {worst:.3e} over 10000 pairs"));
    assert!(pass);
}

#[test]
fn c03_vertical_rays_are_geodesic() {
    let cone = HyperbolicCone::new(circle_sample(32).unwrap()).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        let x = rng.gen_range(0..32);
        let (r, s): (f64, f64) = (rng.gen_range(0.0..60.0), rng.gen_range(0.0..60.0));
        let ray = sigma_ray(x, &[r, s]).unwrap();
        let err: f64 = cone.rho(ray[0], ray[1]) - (s - r).abs();
        worst = worst.max(err.abs());
    }
    let pass = worst <= 1e-12;
    report(3, "rho(sigma_x(r), sigma_x(s)) = |s - r|", pass, format!("max error {worst:.3e} over 1000 triples"));
    assert!(pass);
}

#[test]
fn c04_projection_contracts() {
    let sample = ConeSample::strata(HyperbolicCone::new(circle_sample(32).unwrap()).unwrap(), 1.0, 6).unwrap();
    let mut parts = Vec::new();
    let mut total = 0;
    for t in [0.0, 1.0, 2.0, 3.5, 5.0] {
        let rep = contraction_check(&sample, t);
        total += rep.violations;
        parts.push(format!("t={t}: {} pairs, {} violations", rep.pairs, rep.violations));
    }
    let pass = total == 0;
    report(4, "rho(pi_t p, pi_t q) <= rho(p, q)", pass, parts.join("; "));
    assert!(pass);
}

#[test]
fn c05_height_confinement_in_balls() {
    let c = circle64();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let (mut bad, mut members) = (0, 0);
    let mut witness = None;
    for _ in 0..1000 {
        let p = c.sample.point(rng.gen_range(0..c.sample.len()));
        let delta = rng.gen_range(0.05..8.0);
        match ball_height_confinement(&c.sample, p, delta) {
            Ok(r) => members += r.members,
            Err(e) => {
                bad += 1;
                witness.get_or_insert(e.to_string());
            }
        }
    }
    let pass = bad == 0;
    report(5, "rho-balls confine heights", pass, format!("{bad} violations in 1000 balls ({members} members){}", witness.map(|w| format!(", first: {w}")).unwrap_or_default()));
    assert!(pass);
}

#[test]
fn c06_kappa_certificate() {
    let t = Instant::now();
    let k = kappa(1.0).unwrap();
    let elapsed = t.elapsed();
    let pass = k.kappa > 1.0 && k.certified_margin >= 0.0 && k.grid.certify_s >= 5120 && k.grid.certify_t >= 5120 && elapsed < Duration::from_secs(60);
    report(
        6,
        "kappa(1) > 1 certified on the 5120 x 5120 grid",
        pass,
        format!("kappa = {:.9}, margin {:.3e} over {} nodes, {elapsed:.2?}", k.kappa, k.certified_margin, k.certified_nodes),
    );
    assert!(pass);
}

#[test]
fn c07_level_expansion() {
    let c = circle64();
    let p = &c.params;
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let (mut fails, mut raw_fails) = (0, 0);
    let mut witness = None;
    for _ in 0..100 {
        let (x, y) = (rng.gen_range(0..64), rng.gen_range(0..64));
        let mult = rng.gen_range(1..=2usize);
        let i = rng.gen_range(0..=5 - mult);
        let r = i as f64 * p.r0;
        let rep = level_expansion_check(&c.sample, x, y, r, mult as f64 * p.r0, p.l, c.kappa, None).unwrap();
        raw_fails += usize::from(!rep.raw_pass);
        if !rep.pass {
            fails += 1;
            witness.get_or_insert(format!("x={x} y={y} r={r} t={}r0", mult));
        }
    }
    let pass = fails == 0;
    report(7, "rho_(r+t) >= kappa^t rho_r within resolution slack", pass, format!("{fails} failures in 100 tuples ({raw_fails} without slack){}", witness.map(|w| format!(", first {w}")).unwrap_or_default()));
    assert!(pass);
}

#[test]
fn c08_cao_graph_certificates() {
    let c = circle64();
    let g = &c.graph;
    let sep = separation_check(g, &c.sample);
    let cob = coboundedness_check(g, &c.sample);
    let hops = graph_metric(g);
    let pairs = random_pairs(&hops, 200, 8);
    let qi = qi_check(g, &c.sample, &hops, &pairs);
    let val = valency_check(g);
    let pass = sep.pass && cob.pass && qi.pass() && qi.pairs == 200 && val.pass;
    report(
        8,
        "separation, coboundedness, quasi-isometry, valency",
        pass,
        format!(
            "min rho {:.3} >= {:.3}; cover {:.3} <= {:.3}; qi on {} pairs [{:.4} >= {:.4}, {:.4} < {:.2}]; degree {} <= {}",
            sep.measured, sep.bound, cob.measured, cob.bound, qi.pairs, qi.lower.measured, qi.lower.bound, qi.upper.measured, qi.upper.bound, val.measured, val.bound
        ),
    );
    assert!(pass);
}

#[test]
fn c09_degree_asymmetry() {
    let c = circle64();
    let a = asymmetry_check(&c.graph);
    let pass = a.minus.pass && a.plus.pass;
    report(
        9,
        "#N- <= N_small and #N+ >= 2 N_small",
        pass,
        format!(
            "max #N- = {} (bound {}); min #N+ = {} (bound {}) over {} vertices, witness {}; excluded: {} top-level, {} low",
            a.minus.measured,
            a.minus.bound,
            a.plus.measured,
            a.plus.bound,
            a.checked_plus,
            a.plus.witness.as_deref().unwrap_or("-"),
            a.excluded_top.len(),
            a.excluded_low.len()
        ),
    );
    assert!(pass);
}

#[test]
fn c10_laplacian_certificate() {
    let t = Instant::now();
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { input: "gen:circle:64".into(), out: dir.path().join("run"), ..RunConfig::default() };
    pipeline::build(&cfg).unwrap();
    pipeline::verify(&cfg.out).unwrap();
    let cert = pipeline::certify(&cfg.out).unwrap();
    let elapsed = t.elapsed();
    let emitted = cfg.out.join("certificate.json").exists();
    let lap = laplacian_check(&circle64().graph).unwrap();
    let pass = emitted
        && cert.min_laplacian_ratio >= cert.n_big_bound
        && cert.min_laplacian_ratio > 0.0
        && elapsed < Duration::from_secs(300);
    report(
        10,
        "min Delta h / r0 >= 1/N_big > 0 on interior vertices",
        pass,
        format!(
            "min {:.3e} at {} vs 1/N_big = {:.3e}; {} interior, {} top-level excluded; json emitted: {emitted}; pipeline {elapsed:.2?}",
            cert.min_laplacian_ratio,
            lap.witness.as_deref().unwrap_or("-"),
            cert.n_big_bound,
            cert.interior_vertex_count,
            cert.excluded_top_level_count
        ),
    );
    assert!(pass);
}

/// Bitmask brute force with the same vertex boundary convention.
fn brute_cheeger(adj: &[Vec<usize>]) -> (f64, Vec<usize>) {
    let n = adj.len();
    let mut best = (f64::INFINITY, vec![]);
    for mask in 1u32..(1 << n) {
        let f = mask.count_ones() as usize;
        if 2 * f > n {
            continue;
        }
        let inside = |v: usize| mask >> v & 1 == 1;
        let b = (0..n).filter(|&v| adj[v].iter().any(|&u| inside(u) != inside(v))).count();
        let ratio = b as f64 / f as f64;
        if ratio < best.0 {
            best = (ratio, (0..n).filter(|&v| inside(v)).collect());
        }
    }
    best
}

fn random_connected_graph(rng: &mut ChaCha8Rng) -> Vec<Vec<usize>> {
    let n = rng.gen_range(2..=16);
    let p = rng.gen_range(0.05..0.6);
    let mut adj = vec![vec![]; n];
    let add = |a: usize, b: usize, adj: &mut Vec<Vec<usize>>| {
        if a != b && !adj[a].contains(&b) {
            adj[a].push(b);
            adj[b].push(a);
        }
    };
    for v in 1..n {
        let u = rng.gen_range(0..v);
        add(u, v, &mut adj);
    }
    for a in 0..n {
        for b in a + 1..n {
            if rng.gen_bool(p) {
                add(a, b, &mut adj);
            }
        }
    }
    for nb in &mut adj {
        nb.sort_unstable();
    }
    adj
}

/// The depth-`d` truncation: vertices of level `<= d` and the edges among them.
fn truncate(g: &CaoGraph<f64>, d: usize) -> Vec<Vec<usize>> {
    let keep: Vec<usize> = (0..g.len()).filter(|&v| g.vertex(v).level <= d).collect();
    let mut index = vec![usize::MAX; g.len()];
    for (k, &v) in keep.iter().enumerate() {
        index[v] = k;
    }
    keep.iter().map(|&v| g.neighbours(v).iter().filter(|&&u| index[u] != usize::MAX).map(|&u| index[u]).collect()).collect()
}

#[test]
fn c11_cheeger_oracles() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut below = 0;
    let mut exact_mismatch = 0;
    for _ in 0..50 {
        let adj = random_connected_graph(&mut rng);
        let exact = cheeger_exact(&adj, 16).unwrap();
        let sweep = cheeger_sweep(&adj).unwrap();
        below += usize::from(sweep.value < exact.value - 1e-12);
        exact_mismatch += usize::from((brute_cheeger(&adj).0 - exact.value).abs() > 1e-12);
    }
    let c8: Vec<Vec<usize>> = (0..8).map(|i| vec![(i + 7) % 8, (i + 1) % 8]).collect();
    let e8 = cheeger_exact(&c8, 16).unwrap();
    let arc_ratio = 4.0 / 4.0; // a 4-arc has two inner and two outer boundary vertices
    let c8_ok = (e8.value - brute_cheeger(&c8).0).abs() < 1e-12 && (e8.value - arc_ratio).abs() < 1e-12;

    // truncations of one depth-7 build
    let cone = HyperbolicCone::new(circle_sample(64).unwrap()).unwrap();
    let c = circle64();
    let (params, sample) = select_params(&cone, 0.0, c.params.r_b, c.kappa, 7, ParamOptions::default()).unwrap();
    let g = build_cao_graph(&sample, params, 7, NetOrder::Ascending).unwrap();
    let sweeps: Vec<f64> = (3..=7).map(|d| cheeger_sweep(&truncate(&g, d)).unwrap().value).collect();
    let persistent = sweeps.iter().all(|&h| h >= 0.5 * sweeps[0]);

    let pass = below == 0 && exact_mismatch == 0 && c8_ok && persistent;
    report(
        11,
        "sweep >= exact, C8 optimum, expansion persists over depths 3..7",
        pass,
        format!(
            "{below} sweep-below-exact and {exact_mismatch} exact-vs-brute mismatches on 50 graphs; h(C8) = {} ({:?}); sweep by depth 3..7 = {:?}, floor {:.4}",
            e8.value,
            e8.witness_set,
            sweeps.iter().map(|h| (h * 1e4).round() / 1e4).collect::<Vec<_>>(),
            0.5 * sweeps[0]
        ),
    );
    assert!(pass);
}

#[test]
fn c12_union_of_components() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig { input: "gen:two_intervals:16".into(), out: dir.path().join("run"), ..RunConfig::default() };
    let m = pipeline::build(&cfg).unwrap();
    let cert = pipeline::certify(&cfg.out).unwrap();
    let constants: Vec<(f64, f64)> = cert.components.iter().map(|c| c.constants).collect();
    let expected = combine_components(&constants).unwrap();
    let max_c = constants.iter().map(|c| c.0).fold(f64::NEG_INFINITY, f64::max);
    let u = cert.union_check.as_ref().expect("union check ran");
    let pass = m.components.len() == 2
        && u.splits == 50
        && u.violations == 0
        && u.check.pass
        && (expected.0 - max_c).abs() == 0.0
        && (u.c - expected.0).abs() == 0.0;
    report(
        12,
        "#F <= C #d_r F with componentwise maxima",
        pass,
        format!(
            "{} components, (C, r) = ({:.4}, {}), worst #F/#dF = {:.4} over {} splits, {} violations",
            m.components.len(),
            u.c,
            u.r,
            u.worst_ratio,
            u.splits,
            u.violations
        ),
    );
    assert!(pass);
}

#[test]
fn c13_singleton_components_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        input: "gen:cantor:4".into(),
        eps: Some(0.01),
        out: dir.path().join("run"),
        ..RunConfig::default()
    };
    let m = pipeline::build(&cfg).unwrap();
    let cert = pipeline::certify(&cfg.out).unwrap();
    let code = cert.outcome().err().map(|e| e.exit_code());
    let pass = !cert.issued && code == Some(6) && cert.singletons.len() == 16 && m.components.iter().all(|c| c.skipped.is_some());
    report(
        13,
        "singleton components trigger the hypothesis gate",
        pass,
        format!("issued {}, exit {:?}, {} singletons: {}", cert.issued, code, cert.singletons.len(), cert.refusal.as_deref().unwrap_or("-")),
    );
    assert!(pass);
}
