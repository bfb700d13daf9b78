use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use coarselab::pipeline::{self, PipelineError, RunConfig};
use coarselab::report::checks_csv;

#[derive(Parser)]
#[command(name = "coarselab", version, about = "Hyperbolic cones, Cao graphs and isoperimetry on finite metric samples")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format for the summary printed to stdout.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand)]
enum Command {
    /// Check the metric axioms and report components, covering numbers and hyperbolicity.
    Validate(RunArgs),
    /// Build cone samples and Cao graphs into the output directory.
    Build(RunArgs),
    /// Re-run all checks on a build directory.
    Verify { dir: PathBuf },
    /// Issue or refuse the isoperimetric certificate for a build directory.
    Certify { dir: PathBuf },
}

#[derive(Args)]
struct RunArgs {
    /// Distance matrix CSV, point cloud CSV (with --points) or `gen:NAME:ARGS`.
    input: String,
    /// Config file of `key = value` lines; flags override it.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Read the input as points under this metric (euclidean, l1, linf).
    #[arg(long)]
    points: Option<String>,
    #[arg(long)]
    mu: Option<f64>,
    #[arg(long)]
    depth: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// Scale of the coarse components.
    #[arg(long)]
    eps: Option<f64>,
    /// Properness scale of the cone; estimated when absent.
    #[arg(long)]
    rb: Option<f64>,
    #[arg(long)]
    delta: Option<f64>,
    #[arg(long)]
    r0: Option<f64>,
}

impl RunArgs {
    fn config(&self) -> Result<RunConfig, PipelineError> {
        let mut cfg = match &self.config {
            Some(p) => RunConfig::from_file(p)?,
            None => RunConfig::default(),
        };
        cfg.input = self.input.clone();
        if let Some(p) = &self.points {
            cfg.points = Some(p.clone());
        }
        if let Some(v) = self.mu {
            cfg.mu = v;
        }
        if let Some(v) = self.depth {
            cfg.depth = v;
        }
        if let Some(v) = self.seed {
            cfg.seed = Some(v);
        }
        if let Some(v) = &self.out {
            cfg.out = v.clone();
        }
        cfg.eps = self.eps.or(cfg.eps);
        cfg.r_b = self.rb.or(cfg.r_b);
        cfg.delta = self.delta.or(cfg.delta);
        cfg.r0 = self.r0.or(cfg.r0);
        Ok(cfg)
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable report");
    s.push('\n');
    s
}

/// Writes to stdout, ignoring a closed pipe.
fn emit(text: &str) {
    let mut out = std::io::stdout().lock();
    let _ = out.write_all(text.as_bytes()).and_then(|()| out.flush());
}

fn run(cli: &Cli) -> Result<(), PipelineError> {
    match &cli.command {
        Command::Validate(a) => {
            let r = pipeline::validate(&a.config()?)?;
            match cli.format {
                Format::Json => emit(&json(&r)),
                Format::Csv => {
                    let mut s = String::from("big_r,small_r,n\n");
                    for row in &r.covering {
                        let _ = writeln!(s, "{},{},{}", row.big_r, row.small_r, row.n);
                    }
                    emit(&s);
                }
            }
            Ok(())
        }
        Command::Build(a) => {
            let m = pipeline::build(&a.config()?)?;
            match cli.format {
                Format::Json => emit(&json(&m.components)),
                Format::Csv => {
                    let mut s = String::from("component,points,vertices,edges,delta,r0\n");
                    for c in &m.components {
                        let _ = write!(s, "{},{},", c.index, c.labels.len());
                        match (&c.graph, &c.params) {
                            (Some(g), Some(p)) => {
                                let _ = writeln!(s, "{},{},{},{}", g.vertices, g.edges, p.delta, p.r0);
                            }
                            _ => s.push_str(",,,\n"),
                        }
                    }
                    emit(&s);
                }
            }
            Ok(())
        }
        Command::Verify { dir } => {
            let r = pipeline::verify(dir)?;
            match cli.format {
                Format::Json => emit(&json(&r)),
                Format::Csv => emit(&checks_csv(&r.all_checks())),
            }
            r.outcome()
        }
        Command::Certify { dir } => {
            let c = pipeline::certify(dir)?;
            match cli.format {
                Format::Json => emit(&json(&c)),
                Format::Csv => emit(&std::fs::read_to_string(Path::new(dir).join("isoperimetric.csv")).unwrap_or_default()),
            }
            c.outcome()
        }
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Some(n) = std::env::var("COARSELAB_THREADS").ok().and_then(|s| s.parse::<usize>().ok()) {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            log::warn!("COARSELAB_THREADS ignored: {e}");
        }
    }
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
