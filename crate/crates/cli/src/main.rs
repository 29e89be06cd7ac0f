//! `jgeo`: metric, curvature, geodesic, GNS and verification reports for
//! states on block-diagonal matrix algebras.
//!
//! Exit codes: 0 success, 1 a verification suite failed, 2 invalid input,
//! 3 a numerical routine could not produce a result.

use std::fs;
use std::io::Write;
use std::path::Path;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use jgeo_core::curvature::{self, CurvaturePlane};
use jgeo_core::geodesic::{self, GeodesicPoint, GeodesicSpec};
use jgeo_core::gns::{self, GnsData};
use jgeo_core::io::{self, IoError, Payload};
use jgeo_core::metric;
use jgeo_core::orbits::{gradient_vec, Functional, StateFunctional};
use jgeo_core::verify::{self, Suite, VerifyConfig};
use jgeo_core::{Element, Error};
use serde::Serialize;
use serde_json::{json, Value};

#[derive(Parser)]
#[command(name = "jgeo", version, about = "Jordan-product geometry of quantum states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Metric on the state orbit along two gradient directions, by every
    /// available route.
    Metric(MetricArgs),
    /// Sectional curvatures of the positive-functional and state orbits.
    Curvature(PairArgs),
    /// Samples of the geodesic through a state along a gradient direction.
    Geodesic(GeodesicArgs),
    /// Dimensions and consistency residuals of the GNS construction.
    Gns(GnsArgs),
    /// Randomized verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct PairArgs {
    /// State document (JSON).
    #[arg(long)]
    state: String,
    /// First direction: element document path, or an inline matrix in JSON.
    #[arg(long)]
    dir_a: String,
    /// Second direction, same forms as --dir-a.
    #[arg(long)]
    dir_b: String,
}

#[derive(Args)]
struct MetricArgs {
    #[command(flatten)]
    pair: PairArgs,
    /// Relative eigenvalue cutoff for the anticommutator inverse.
    #[arg(long, default_value_t = metric::DEFAULT_TOL)]
    tol: f64,
    /// Report the Bures-Helstrom metric with the extra factor 1/2.
    #[arg(long)]
    bh_half: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct GeodesicArgs {
    /// State document; use with --dir-a.
    #[arg(long, required_unless_present = "spec", requires = "dir_a")]
    state: Option<String>,
    /// Direction, as for `metric`.
    #[arg(long)]
    dir_a: Option<String>,
    /// Geodesic document holding both start and direction.
    #[arg(long, conflicts_with_all = ["state", "dir_a"])]
    spec: Option<String>,
    #[arg(long, default_value_t = 1.0)]
    t_max: f64,
    #[arg(long, default_value_t = 101)]
    samples: usize,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
}

#[derive(Args)]
struct GnsArgs {
    #[arg(long)]
    state: String,
    /// Relative eigenvalue cutoff for the Gel'fand ideal.
    #[arg(long, default_value_t = gns::DEFAULT_IDEAL_TOL)]
    tol: f64,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    #[arg(long, default_value = "all")]
    suite: String,
    /// Block size of the test algebra.
    #[arg(long, default_value_t = 3)]
    dim: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    /// Overrides every check tolerance.
    #[arg(long)]
    tol: Option<f64>,
}

enum Failure {
    Input(String),
    Solver(String),
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Input(e.to_string())
        } else {
            Failure::Solver(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn read(path: &str) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("{path}: {e}")))
}

fn load_state(path: &str) -> CliResult<StateFunctional> {
    match io::parse(&read(path)?)?.payload {
        Payload::State(s) => Ok(s),
        _ => Err(Failure::Input(format!("{path}: expected a state document"))),
    }
}

/// A direction is an element document on disk or an inline JSON matrix read
/// against the state's block structure.
fn load_direction(arg: &str, rho: &StateFunctional, flag: &str) -> CliResult<Element> {
    let trimmed = arg.trim_start();
    let e = if trimmed.starts_with('[') && !Path::new(arg).exists() {
        let v: Value =
            serde_json::from_str(arg).map_err(|e| Failure::Input(format!("{flag}: {e}")))?;
        io::parse_matrix(&v, rho.shape(), flag)?
    } else {
        match io::parse(&read(arg)?)?.payload {
            Payload::Element(e) => e,
            _ => return Err(Failure::Input(format!("{arg}: expected an element document"))),
        }
    };
    if e.shape() != rho.shape() {
        return Err(Error::ShapeMismatch {
            left: rho.shape().blocks().to_vec(),
            right: e.shape().blocks().to_vec(),
        }
        .into());
    }
    e.ensure_self_adjoint()?;
    Ok(e)
}

fn load_pair(p: &PairArgs) -> CliResult<(StateFunctional, Element, Element)> {
    let rho = load_state(&p.state)?;
    let a = load_direction(&p.dir_a, &rho, "--dir-a")?;
    let b = load_direction(&p.dir_b, &rho, "--dir-b")?;
    Ok((rho, a, b))
}

fn rel_diff(x: f64, y: f64) -> f64 {
    let s = x.abs().max(y.abs());
    if s == 0.0 {
        0.0
    } else {
        (x - y).abs() / s
    }
}

fn pretty<T: Serialize>(v: &T) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn run_metric(args: &MetricArgs) -> CliResult<String> {
    let (rho, a, b) = load_pair(&args.pair)?;
    let g1_fields = metric::metric_g1_fields(&rho, &a, &b);
    let v = gradient_vec(&rho, &a)?;
    let w = gradient_vec(&rho, &b)?;
    let av = metric::lyapunov_solve(&rho, &w, args.tol)?.solution;
    let g1_tangent = jgeo_core::algebra::trace_pair(v.value(), &av)?.re;

    let factor = if args.bh_half { 0.5 } else { 1.0 };
    let bures_helstrom = if rho.is_faithful(orbits_tol()) {
        Some(factor * metric::bures_helstrom(&rho, &v, &w)?)
    } else {
        None
    };
    let fisher_rao = if rho.shape().is_abelian() {
        Some(metric::fisher_rao(&rho, &v, &w)?)
    } else {
        None
    };

    let mut differences = serde_json::Map::new();
    differences.insert("g1_fields_vs_g1_tangent".into(), json!(rel_diff(g1_fields, g1_tangent)));
    if let Some(bh) = bures_helstrom {
        differences.insert("g1_fields_vs_bures_helstrom".into(), json!(rel_diff(g1_fields, bh / factor)));
    }
    if let Some(fr) = fisher_rao {
        differences.insert("g1_fields_vs_fisher_rao".into(), json!(rel_diff(g1_fields, fr)));
    }
    let report = json!({
        "blocks": rho.shape().blocks(),
        "g1_fields": g1_fields,
        "g1_tangent": g1_tangent,
        "bures_helstrom": bures_helstrom,
        "bures_helstrom_factor": factor,
        "fisher_rao": fisher_rao,
        "relative_differences": differences,
    });
    Ok(pretty(&report))
}

fn orbits_tol() -> f64 {
    jgeo_core::orbits::DEFAULT_KERNEL_TOL
}

fn run_curvature(args: &PairArgs) -> CliResult<String> {
    let (rho, a, b) = load_pair(args)?;
    let plane = CurvaturePlane::new(a.clone(), b.clone())?;
    let sectional_o = curvature::sectional_o(&rho.as_positive(), &plane)?;
    let sectional_o1 = curvature::sectional_o1(&rho, &plane)?;
    let riemann_o1 = curvature::riemann_o1(&rho, &a, &b, &b, &a)?;
    let report = json!({
        "blocks": rho.shape().blocks(),
        "sectional_o": sectional_o,
        "sectional_o1": sectional_o1,
        "riemann_o1_abba": riemann_o1,
        "g1_aa": metric::metric_g1_fields(&rho, &a, &a),
        "g1_bb": metric::metric_g1_fields(&rho, &b, &b),
        "g1_ab": metric::metric_g1_fields(&rho, &a, &b),
    });
    Ok(pretty(&report))
}

fn point_json(p: &GeodesicPoint) -> Value {
    let blocks: Vec<Vec<Vec<[f64; 2]>>> = p
        .density
        .blocks()
        .iter()
        .map(|b| {
            (0..b.nrows())
                .map(|i| (0..b.ncols()).map(|j| [b[(i, j)].re, b[(i, j)].im]).collect())
                .collect()
        })
        .collect();
    json!({
        "t": p.t,
        "trace": p.trace,
        "min_eigenvalue": p.min_eigenvalue,
        "rank": p.rank.total(),
        "rank_by_block": p.rank.ranks(),
        "eigenvalues": p.eigenvalues,
        "density": blocks,
    })
}

fn run_geodesic(args: &GeodesicArgs) -> CliResult<String> {
    let spec = match (&args.spec, &args.state, &args.dir_a) {
        (Some(path), _, _) => match io::parse(&read(path)?)?.payload {
            Payload::Geodesic(g) => g,
            _ => return Err(Failure::Input(format!("{path}: expected a geodesic document"))),
        },
        (None, Some(state), Some(dir)) => {
            let rho = load_state(state)?;
            let a = load_direction(dir, &rho, "--dir-a")?;
            GeodesicSpec::new(rho, a)?
        }
        _ => return Err(Failure::Input("give --spec, or --state with --dir-a".into())),
    };
    if !(args.t_max.is_finite() && args.t_max >= 0.0) {
        return Err(Failure::Input(format!("--t-max must be finite and non-negative, got {}", args.t_max)));
    }
    if args.samples == 0 {
        return Err(Failure::Input("--samples must be positive".into()));
    }
    let samples = if args.t_max == 0.0 { 1 } else { args.samples };
    let points = geodesic::sample(&spec, args.t_max, samples);
    let shape = spec.start().shape().clone();
    Ok(match args.format {
        Format::Csv => io::emit_csv(&shape, &points),
        Format::Json => {
            let report = json!({
                "blocks": shape.blocks(),
                "speed": spec.speed(),
                "period": spec.period(),
                "samples": points.iter().map(point_json).collect::<Vec<_>>(),
            });
            pretty(&report)
        }
    })
}

fn run_gns(args: &GnsArgs) -> CliResult<String> {
    let rho = load_state(&args.state)?;
    let data = GnsData::build(&rho, args.tol);
    Ok(pretty(&data.report()))
}

fn run_verify(args: &VerifyArgs) -> CliResult<(String, bool)> {
    let cfg = VerifyConfig {
        dim: args.dim,
        seed: args.seed,
        trials: args.trials,
        tol: args.tol,
    };
    let reports = if args.suite == "all" {
        verify::run_all(&cfg)
    } else {
        let suite: Suite = args.suite.parse().map_err(Failure::Input)?;
        vec![verify::run_suite(suite, &cfg)]
    };
    let passed = reports.iter().all(|r| r.passed);
    let report = json!({ "passed": passed, "suites": reports });
    Ok((pretty(&report), passed))
}

fn configure_threads() {
    if let Some(n) = std::env::var("JGEO_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        if n > 0 {
            // only fails if a global pool already exists
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    configure_threads();
    let outcome = match &cli.command {
        Command::Metric(a) => run_metric(a).map(|s| (s, true)),
        Command::Curvature(a) => run_curvature(a).map(|s| (s, true)),
        Command::Geodesic(a) => run_geodesic(a).map(|s| (s, true)),
        Command::Gns(a) => run_gns(a).map(|s| (s, true)),
        Command::Verify(a) => run_verify(a),
    };
    match outcome {
        Ok((text, ok)) => {
            let newline = if text.ends_with('\n') { "" } else { "\n" };
            // a closed pipe (e.g. `| head`) is not an error
            let _ = write!(std::io::stdout().lock(), "{text}{newline}");
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}
