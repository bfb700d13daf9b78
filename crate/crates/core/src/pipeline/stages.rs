use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{io_err, load_input, read_json, write_json, PipelineError, RunConfig};
use crate::amenability::{
    cheeger_exact, cheeger_sweep, combine_components, hop_ball_subsets, isoperimetric_profile, nonamenability_certificate,
    profile_csv, profile_svg, union_split_check, AmenabilityError, Certificate, CheegerEstimate,
    UnionSplitReport, GRAPH_BOUNDARY_RADIUS,
};
use crate::cao::{
    build_cao_graph, connecting_mesh, graph_metric, select_params, verify_graph, CaoGraph, CaoParams, NetOrder,
    ParamOptions,
};
use crate::cone::{
    ball_height_confinement, contraction_check, kappa, level_expansion_check, segment_confinement_check, ConeSample,
    HyperbolicCone, KappaEstimate,
};
use crate::metric::{
    coarse_components, covering_number, estimate_properness_scale, hyperbolicity_delta, CoarsePartition,
    FiniteMetricSpace, HyperbolicityOptions,
};
use crate::report::{first_hard_failure, CheckReport};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverRow {
    pub big_r: f64,
    pub small_r: f64,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicitySummary {
    pub delta: f64,
    pub exhaustive: bool,
    pub quadruples: u64,
    pub witness: Option<Vec<String>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentSummary {
    pub epsilon: f64,
    pub blocks: Vec<Vec<String>>,
    pub singletons: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub input: String,
    pub points: usize,
    pub diameter: f64,
    pub min_distance: f64,
    pub covering_mesh: f64,
    pub components: ComponentSummary,
    /// `N(2r, r)` for `r = mesh, 2 mesh, ...` below the diameter.
    pub covering: Vec<CoverRow>,
    pub hyperbolicity: HyperbolicitySummary,
}

struct Analysis {
    z: FiniteMetricSpace<f64>,
    partition: CoarsePartition<f64>,
    report: ValidationReport,
}

fn analyse(cfg: &RunConfig) -> Result<Analysis, PipelineError> {
    cfg.check()?;
    let z = load_input(cfg)?;
    let mesh = z.covering_mesh();
    let eps = match cfg.eps {
        Some(e) => e,
        None if mesh > 0.0 => 1.5 * mesh,
        None => 1.0,
    };
    let partition = coarse_components(&z, eps)?;
    let label = |i: usize| z.label(i).to_string();
    let mut covering = Vec::new();
    let mut r = mesh;
    while r > 0.0 && 2.0 * r < z.diameter() {
        covering.push(CoverRow { big_r: 2.0 * r, small_r: r, n: covering_number(&z, 2.0 * r, r)?.n });
        r *= 2.0;
    }
    let hyp = hyperbolicity_delta(
        &z,
        HyperbolicityOptions { cap: 120, approximate: true, samples: 200_000, seed: cfg.check_seed },
    )?;
    let report = ValidationReport {
        input: cfg.input.clone(),
        points: z.len(),
        diameter: z.diameter(),
        min_distance: z.min_positive_distance().unwrap_or(0.0),
        covering_mesh: mesh,
        components: ComponentSummary {
            epsilon: eps,
            blocks: partition.blocks.iter().map(|b| b.iter().map(|&i| label(i)).collect()).collect(),
            singletons: partition.singletons().map(label).collect(),
        },
        covering,
        hyperbolicity: HyperbolicitySummary {
            delta: hyp.delta,
            exhaustive: hyp.exhaustive,
            quadruples: hyp.quadruples,
            witness: hyp.witness.map(|w| w.iter().map(|&i| label(i)).collect()),
        },
    };
    Ok(Analysis { z, partition, report })
}

/// Loads and checks the input: metric axioms, coarse components, a covering
/// profile and the four-point constant.
pub fn validate(cfg: &RunConfig) -> Result<ValidationReport, PipelineError> {
    Ok(analyse(cfg)?.report)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GraphStats {
    pub vertices: usize,
    pub edges: usize,
    pub level_sizes: Vec<usize>,
    pub max_degree: usize,
    pub connected: bool,
}

impl GraphStats {
    fn of(g: &CaoGraph<f64>) -> Self {
        Self {
            vertices: g.len(),
            edges: g.edge_count(),
            level_sizes: g.level_sizes(),
            max_degree: (0..g.len()).map(|v| g.degree(v)).max().unwrap_or(0),
            connected: graph_metric(g).is_connected(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComponentEntry {
    pub index: usize,
    pub labels: Vec<String>,
    /// Artifact directory relative to the output directory; absent when skipped.
    pub dir: Option<String>,
    pub skipped: Option<String>,
    pub r_b: Option<f64>,
    pub params: Option<CaoParams<f64>>,
    pub graph: Option<GraphStats>,
    /// Levels whose base spacing exceeds the spacing at which neighbouring
    /// points are one step `L` apart; the level metric cannot join them there.
    pub unresolved_levels: Vec<usize>,
    /// Base spacing needed to resolve the top level.
    pub required_base_mesh: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BuildManifest {
    pub config: RunConfig,
    pub validation: ValidationReport,
    pub kappa: KappaSummary,
    pub components: Vec<ComponentEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KappaSummary {
    pub eps: f64,
    pub kappa: f64,
    pub search_kappa: f64,
    pub argmin: (f64, f64),
    pub certified_margin: f64,
    pub certified_nodes: u64,
}

impl From<&KappaEstimate> for KappaSummary {
    fn from(k: &KappaEstimate) -> Self {
        Self {
            eps: k.eps,
            kappa: k.kappa,
            search_kappa: k.search_kappa,
            argmin: k.argmin,
            certified_margin: k.certified_margin,
            certified_nodes: k.certified_nodes,
        }
    }
}

const PROPERNESS_GRID: [f64; 7] = [0.125, 0.25, 0.5, 1.0, 2.0, 4.0, 8.0];

fn component_cone(a: &Analysis, block: &[usize]) -> Result<HyperbolicCone<f64>, PipelineError> {
    if a.partition.len() == 1 {
        Ok(HyperbolicCone::new(a.z.clone())?)
    } else {
        Ok(HyperbolicCone::with_diameter(a.z.subspace(block), a.z.diameter())?)
    }
}

/// Builds the cone sample and Cao graph of every coarse component with at
/// least two points and writes them under `cfg.out`.
pub fn build(cfg: &RunConfig) -> Result<BuildManifest, PipelineError> {
    let a = analyse(cfg)?;
    let out = &cfg.out;
    std::fs::create_dir_all(out).map_err(io_err(out))?;
    let l = 1.0 + 2.0 * cfg.mu;
    let k = kappa(l)?;
    log::info!("kappa({l}) = {}", k.kappa);
    let order = cfg.seed.map_or(NetOrder::Ascending, NetOrder::Seeded);
    let mut components = Vec::new();
    for (index, block) in a.partition.blocks.iter().enumerate() {
        let labels: Vec<String> = block.iter().map(|&i| a.z.label(i).to_string()).collect();
        let mut entry = ComponentEntry {
            index,
            labels,
            dir: None,
            skipped: None,
            r_b: None,
            params: None,
            graph: None,
            unresolved_levels: vec![],
            required_base_mesh: None,
        };
        if block.len() < 2 {
            entry.skipped = Some("single point".into());
            components.push(entry);
            continue;
        }
        let cone = component_cone(&a, block)?;
        let r_b = match cfg.r_b {
            Some(r) => r,
            None => {
                let provisional = ConeSample::strata(cone.clone(), 1.0, 3)?;
                estimate_properness_scale(&provisional, &PROPERNESS_GRID)?
            }
        };
        let opts = ParamOptions { delta: cfg.delta, r0: cfg.r0, ..ParamOptions::default() };
        let (params, sample) = select_params(&cone, cfg.mu, r_b, k.kappa, cfg.depth, opts)?;
        log::info!("component {index}: delta = {}, r0 = {}, N_small = {}, N_big = {}", params.delta, params.r0, params.n_small, params.n_big);
        let g = build_cao_graph(&sample, params, cfg.depth, order)?;
        let checks = verify_graph(&g, &sample, cfg.qi_pairs, cfg.check_seed)?;

        let base_mesh = cone.base().covering_mesh();
        entry.unresolved_levels = (0..=cfg.depth)
            .filter(|&i| base_mesh > connecting_mesh(cone.diameter(), params.l, i as f64 * params.r0))
            .collect();
        if !entry.unresolved_levels.is_empty() {
            entry.required_base_mesh = Some(connecting_mesh(cone.diameter(), params.l, cfg.depth as f64 * params.r0));
            log::warn!(
                "component {index}: levels {:?} are below sample resolution (base mesh {base_mesh})",
                entry.unresolved_levels
            );
        }

        let dir_name = format!("component-{index}");
        let dir = out.join(&dir_name);
        std::fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        sample.save(&dir.join("cone_sample.json"))?;
        g.save(&dir.join("cao_graph.json"), checks)?;
        std::fs::write(dir.join("cao_graph.dot"), g.to_dot()).map_err(io_err(&dir))?;
        write_json(&dir.join("params.json"), &params)?;
        entry.dir = Some(dir_name);
        entry.r_b = Some(r_b);
        entry.params = Some(params);
        entry.graph = Some(GraphStats::of(&g));
        components.push(entry);
    }
    let manifest = BuildManifest { config: cfg.clone(), validation: a.report, kappa: (&k).into(), components };
    write_json(&out.join("manifest.json"), &manifest)?;
    Ok(manifest)
}

struct Loaded {
    entry: ComponentEntry,
    sample: ConeSample<f64>,
    graph: CaoGraph<f64>,
}

fn load_components(dir: &Path) -> Result<(BuildManifest, Vec<Loaded>), PipelineError> {
    let manifest: BuildManifest = read_json(&dir.join("manifest.json"))?;
    let mut out = Vec::new();
    for entry in &manifest.components {
        let Some(sub) = &entry.dir else { continue };
        let sub = dir.join(sub);
        let sample = ConeSample::load(&sub.join("cone_sample.json"))?;
        let (graph, _) = CaoGraph::load(&sub.join("cao_graph.json"))?;
        out.push(Loaded { entry: entry.clone(), sample, graph });
    }
    Ok((manifest, out))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentReport {
    pub index: usize,
    pub params: CaoParams<f64>,
    pub graph: GraphStats,
    pub checks: Vec<CheckReport>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub config: RunConfig,
    pub validation: ValidationReport,
    pub kappa: KappaSummary,
    pub components: Vec<ComponentReport>,
    /// Run-wide checks (kappa re-certification).
    pub checks: Vec<CheckReport>,
    pub hard_failures: usize,
    pub soft_failures: usize,
    pub pass: bool,
}

impl RunReport {
    pub fn all_checks(&self) -> Vec<CheckReport> {
        let mut all = self.checks.clone();
        for c in &self.components {
            all.extend(c.checks.iter().cloned());
        }
        all
    }

    /// `Err(VerifyFailed)` naming the first failing hard assertion.
    pub fn outcome(&self) -> Result<(), PipelineError> {
        let all = self.all_checks();
        match first_hard_failure(&all) {
            Some(r) => Err(PipelineError::VerifyFailed {
                assertion: r.assertion.clone(),
                measured: r.measured,
                bound: r.bound,
                witness: r.witness.clone(),
            }),
            None => Ok(()),
        }
    }
}

/// Metric checks on the cone sample of one component.
fn cone_checks(
    sample: &ConeSample<f64>,
    g: &CaoGraph<f64>,
    kappa: f64,
    tolerance: f64,
    seed: u64,
) -> Result<Vec<CheckReport>, PipelineError> {
    let p = &g.params;
    let mut out = Vec::new();

    let mut worst = (f64::NEG_INFINITY, None, 0.0);
    for k in 0..=2 {
        let t = k as f64 * p.r0;
        let rep = contraction_check(sample, t);
        if rep.worst_excess > worst.0 {
            worst = (rep.worst_excess, rep.witness, t);
        }
    }
    let mut r = CheckReport::new("rho(pi_t p, pi_t q) <= rho(p, q) for t in {0, r0, 2 r0}", tolerance, worst.0, worst.0 <= tolerance);
    if let Some((i, j)) = worst.1 {
        r = r.with_witness(format!("points {i}, {j} at t = {}", worst.2));
    }
    out.push(r);

    let mut bb = CheckReport::new("rho-balls of radius delta confine heights to within delta", p.delta, 0.0, true);
    for v in g.vertices() {
        match ball_height_confinement(sample, v.vertex_point, p.delta) {
            Ok(rep) => bb.measured = bb.measured.max(rep.worst),
            Err(e) => {
                bb = CheckReport::new(bb.assertion.clone(), p.delta, f64::NAN, false).with_witness(format!("{}: {e}", v.label()));
                break;
            }
        }
    }
    out.push(bb);

    let n = sample.base().len();
    let mut seg =
        CheckReport::new("B((p, r+t), t/2L) stays in A x [r, r+2t] with rho_r(y, pi_r z) < t/2", p.r0 / 2.0, 0.0, true);
    'outer: for i in 0..g.depth {
        for b in [0, n / 3, 2 * n / 3] {
            let y = sample.stratum(i).expect("stratum").start + b;
            match segment_confinement_check(sample, y, p.r0, p.l) {
                Ok(rep) => seg.measured = seg.measured.max(rep.worst),
                Err(e) => {
                    seg = CheckReport::new(seg.assertion.clone(), p.r0 / 2.0, f64::NAN, false)
                        .with_witness(format!("level {i}, base {b}: {e}"));
                    break 'outer;
                }
            }
        }
    }
    out.push(seg);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (mut fails, mut raw_fails, mut count) = (0, 0, 0);
    let mut witness = None;
    for i in 0..g.depth {
        for _ in 0..4 {
            let (x, y) = (rng.gen_range(0..n), rng.gen_range(0..n));
            let rep = level_expansion_check(sample, x, y, i as f64 * p.r0, p.r0, p.l, kappa, None)?;
            count += 1;
            raw_fails += usize::from(!rep.raw_pass);
            if !rep.pass {
                fails += 1;
                witness.get_or_insert(format!("x = {x}, y = {y}, level {i}"));
            }
        }
    }
    let mut exp = CheckReport::new("rho_(r+t) >= kappa^t rho_r on vertical rays (with mesh slack)", 0.0, fails as f64, fails == 0)
        .with_note(format!("{count} tuples, {raw_fails} fail without slack"));
    if let Some(w) = witness {
        exp = exp.with_witness(w);
    }
    out.push(exp);
    Ok(out)
}

/// Re-runs every graph and cone check on the artifacts in `dir` and writes
/// `run_report.json` there.
pub fn verify(dir: &Path) -> Result<RunReport, PipelineError> {
    let (manifest, comps) = load_components(dir)?;
    let cfg = &manifest.config;
    let k = kappa(manifest.kappa.eps)?;
    let same = (k.kappa - manifest.kappa.kappa).abs() <= cfg.tolerance * manifest.kappa.kappa;
    let checks = vec![CheckReport::new(
        "kappa(L) > 1 certified on the refinement grid",
        1.0,
        k.kappa,
        k.kappa > 1.0 && k.certified_margin >= 0.0 && same,
    )
    .with_note(format!("certified margin {}, recorded kappa {}", k.certified_margin, manifest.kappa.kappa))];

    let mut components = Vec::new();
    for c in comps {
        let mut list = verify_graph(&c.graph, &c.sample, cfg.qi_pairs, cfg.check_seed)?;
        list.extend(cone_checks(&c.sample, &c.graph, k.kappa, cfg.tolerance, cfg.check_seed)?);
        if c.entry.params.as_ref() != Some(&c.graph.params) {
            list.push(CheckReport::new("graph parameters match the manifest", 0.0, 1.0, false));
        }
        components.push(ComponentReport { index: c.entry.index, params: c.graph.params, graph: GraphStats::of(&c.graph), checks: list });
    }
    let mut report = RunReport {
        config: manifest.config.clone(),
        validation: manifest.validation,
        kappa: (&k).into(),
        components,
        checks,
        hard_failures: 0,
        soft_failures: 0,
        pass: false,
    };
    let all = report.all_checks();
    report.hard_failures = all.iter().filter(|r| r.hard && !r.pass).count();
    report.soft_failures = all.iter().filter(|r| !r.hard && !r.pass).count();
    report.pass = report.hard_failures == 0;
    write_json(&dir.join("run_report.json"), &report)?;
    Ok(report)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComponentCertificate {
    pub index: usize,
    pub certificate: Option<Certificate>,
    pub refusal: Option<String>,
    pub cheeger_exact: Option<CheegerEstimate>,
    pub cheeger_sweep: Option<CheegerEstimate>,
    /// `(C_i, r_i)` with `C_i = 1 / Cheeger` (exact when available) and `r_i` in `(1, 2)`.
    #[serde(serialize_with = "pair")]
    pub constants: (f64, f64),
    pub profile: PathBuf,
}

fn pair<S: serde::Serializer>(v: &(f64, f64), s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeTuple;
    struct R(f64);
    impl Serialize for R {
        fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
            crate::report::real::serialize(&self.0, s)
        }
    }
    let mut t = s.serialize_tuple(2)?;
    t.serialize_element(&R(v.0))?;
    t.serialize_element(&R(v.1))?;
    t.end()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Combined {
    #[serde(rename = "C", with = "crate::report::real")]
    pub c: f64,
    pub r: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheegerSummary {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<f64>,
    pub sweep: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CertificateFile {
    pub kind: String,
    pub issued: bool,
    pub refusal: Option<String>,
    #[serde(with = "crate::report::real")]
    pub min_laplacian_ratio: f64,
    #[serde(with = "crate::report::real")]
    pub n_big_bound: f64,
    pub interior_vertex_count: usize,
    pub excluded_top_level_count: usize,
    pub cheeger: CheegerSummary,
    pub combined: Option<Combined>,
    pub union_check: Option<UnionSplitReport>,
    pub components: Vec<ComponentCertificate>,
    pub singletons: Vec<String>,
}

impl CertificateFile {
    pub fn outcome(&self) -> Result<(), PipelineError> {
        match (&self.refusal, self.issued) {
            (_, true) => Ok(()),
            (Some(r), false) => Err(PipelineError::NoCertificate(r.clone())),
            (None, false) => Err(PipelineError::NoCertificate("not issued".into())),
        }
    }
}

fn min_opt(a: Option<f64>, b: Option<f64>) -> Option<f64> {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (x, None) => x,
        (None, y) => y,
    }
}

/// Laplacian certificates per component, Cheeger estimates, the combined
/// constants and isoperimetric profiles; writes `certificate.json` and the
/// CSV/SVG profiles into `dir`.
pub fn certify(dir: &Path) -> Result<CertificateFile, PipelineError> {
    let (manifest, comps) = load_components(dir)?;
    let singletons = manifest.validation.components.singletons.clone();
    let mut file = CertificateFile {
        kind: "truncation certificate".into(),
        issued: false,
        refusal: None,
        min_laplacian_ratio: f64::INFINITY,
        n_big_bound: f64::INFINITY,
        interior_vertex_count: 0,
        excluded_top_level_count: 0,
        cheeger: CheegerSummary { exact: None, sweep: None },
        combined: None,
        union_check: None,
        components: Vec::new(),
        singletons: singletons.clone(),
    };
    if !singletons.is_empty() {
        file.refusal = Some(format!(
            "{} coarse component(s) at scale {} are single points ({}); every component must contain at least two points",
            singletons.len(),
            manifest.validation.components.epsilon,
            singletons.join(", ")
        ));
        write_json(&dir.join("certificate.json"), &file)?;
        return Ok(file);
    }

    let mut refusals = Vec::new();
    for c in &comps {
        let g = &c.graph;
        let adj = g.adjacency();
        let (certificate, refusal) = match nonamenability_certificate(g) {
            Ok(cert) => {
                let why = (!cert.issued).then(|| {
                    format!(
                        "component {}: min Delta h / r0 = {} at vertex {}",
                        c.entry.index,
                        cert.min_laplacian_ratio,
                        cert.witness.clone().unwrap_or_default()
                    )
                });
                (Some(cert), why)
            }
            Err(e @ (AmenabilityError::NoInteriorVertices | AmenabilityError::Cao(_))) => {
                (None, Some(format!("component {}: {e}", c.entry.index)))
            }
            Err(e) => return Err(e.into()),
        };
        if let Some(r) = &refusal {
            refusals.push(r.clone());
        }
        let exact = cheeger_exact(adj, 20).ok();
        let sweep = cheeger_sweep(adj).ok();
        let h = exact.as_ref().or(sweep.as_ref()).map_or(0.0, |e| e.value);
        let constants = (if h > 0.0 { 1.0 / h } else { f64::INFINITY }, GRAPH_BOUNDARY_RADIUS);

        let mut subsets = hop_ball_subsets(adj, 0);
        if g.len() > 1 {
            subsets.extend(hop_ball_subsets(adj, g.len() - 1));
        }
        let rows = isoperimetric_profile(adj, &subsets);
        let sub = dir.join(c.entry.dir.as_deref().expect("built component"));
        let csv_path = sub.join("isoperimetric.csv");
        std::fs::write(&csv_path, profile_csv(&rows)).map_err(io_err(&csv_path))?;
        let svg_path = sub.join("isoperimetric.svg");
        std::fs::write(&svg_path, profile_svg(&rows, &format!("component {}: hop balls", c.entry.index)))
            .map_err(io_err(&svg_path))?;

        if let Some(cert) = &certificate {
            if cert.min_laplacian_ratio < file.min_laplacian_ratio {
                file.min_laplacian_ratio = cert.min_laplacian_ratio;
                file.n_big_bound = cert.n_big_bound;
            }
            file.interior_vertex_count += cert.interior_vertex_count;
            file.excluded_top_level_count += cert.excluded_top_level_count;
        }
        file.cheeger.exact = min_opt(file.cheeger.exact, exact.as_ref().map(|e| e.value));
        file.cheeger.sweep = min_opt(file.cheeger.sweep, sweep.as_ref().map(|e| e.value));
        file.components.push(ComponentCertificate {
            index: c.entry.index,
            certificate,
            refusal,
            cheeger_exact: exact,
            cheeger_sweep: sweep,
            constants,
            profile: PathBuf::from(c.entry.dir.as_deref().unwrap_or_default()).join("isoperimetric.csv"),
        });
    }

    let constants: Vec<(f64, f64)> = file.components.iter().map(|c| c.constants).collect();
    if !constants.is_empty() {
        let (c, r) = combine_components(&constants)?;
        file.combined = Some(Combined { c, r });
        let adjs: Vec<&[Vec<usize>]> = comps.iter().map(|c| c.graph.adjacency()).collect();
        if adjs.iter().all(|a| a.len() >= 2) {
            let rep = union_split_check(&adjs, &constants, 50, manifest.config.check_seed)?;
            file.union_check = Some(rep);
        }
        write_union_profile(dir, &comps)?;
    } else {
        refusals.push("no component was built".into());
    }
    file.issued = refusals.is_empty();
    if !refusals.is_empty() {
        file.refusal = Some(refusals.join("; "));
    }
    write_json(&dir.join("certificate.json"), &file)?;
    Ok(file)
}

/// Hop balls of every component, concatenated, as the run-level profile.
fn write_union_profile(dir: &Path, comps: &[Loaded]) -> Result<(), PipelineError> {
    let mut rows = Vec::new();
    for c in comps {
        let adj = c.graph.adjacency();
        for mut r in isoperimetric_profile(adj, &hop_ball_subsets(adj, 0)) {
            r.subset_id = rows.len();
            rows.push(r);
        }
    }
    let csv_path = dir.join("isoperimetric.csv");
    std::fs::write(&csv_path, profile_csv(&rows)).map_err(io_err(&csv_path))?;
    let svg_path = dir.join("isoperimetric.svg");
    std::fs::write(&svg_path, profile_svg(&rows, "hop balls, all components")).map_err(io_err(&svg_path))
}
