use std::fs::File;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use dehnlab::checks::{
    check_names, find_check, named_family, named_map, registry, run_checks, run_suite, Check,
    CheckFailure, OutputFormat, SuiteConfig, SuiteReport, DEFAULT_FD_STEP, DEFAULT_QUAD_NODES, DEFAULT_SAMPLES,
    DEFAULT_SEED, DEFAULT_TOL, FAMILY_NAMES, MAP_NAMES,
};
use dehnlab::compactify::solve_profile_f;
use dehnlab::geom::SpherePoint;
use dehnlab::topology::{homology_matrix, normal_loop_winding, slice_degrees, trace_csv, Basepoints};

const USAGE: u8 = 2;
const FAILED: u8 = 1;

/// Numerical checks for the generalized Dehn twist on S² × S².
#[derive(Debug, Parser)]
#[command(name = "dehnlab", version)]
struct Cli {
    #[command(flatten)]
    opts: Opts,

    /// Print the check registry and exit.
    #[arg(long, global = true)]
    list: bool,

    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(Debug, Args)]
struct Opts {
    /// Random samples per sampled check.
    #[arg(long, global = true, env = "DEHNLAB_SAMPLES", default_value_t = DEFAULT_SAMPLES)]
    samples: u64,

    #[arg(long, global = true, env = "DEHNLAB_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Central-difference step, in (0, 1e-2].
    #[arg(long, global = true, env = "DEHNLAB_FD_STEP", default_value_t = DEFAULT_FD_STEP)]
    fd_step: f64,

    /// Tolerance of the symplectic residual checks.
    #[arg(long, global = true, env = "DEHNLAB_TOL", default_value_t = DEFAULT_TOL)]
    tol: f64,

    /// Quadrature nodes per direction for mapping degrees.
    #[arg(long, global = true, env = "DEHNLAB_QUAD_NODES", default_value_t = DEFAULT_QUAD_NODES)]
    quad_nodes: usize,

    /// Write the report here instead of stdout.
    #[arg(long, global = true, env = "DEHNLAB_OUTPUT")]
    output: Option<PathBuf>,

    /// json or csv.
    #[arg(long, global = true, env = "DEHNLAB_FORMAT", default_value = "json")]
    format: OutputFormat,

    /// Write a CSV trace of degree or winding computations here.
    #[arg(long, global = true, env = "DEHNLAB_TRACE")]
    trace: Option<PathBuf>,

    /// Record wall time in the report summary (makes output run-dependent).
    #[arg(long, global = true)]
    timing: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run every registered check.
    VerifyAll,
    /// Run one registered check.
    Check { name: String },
    /// Homology action of a named map: id, swap, tau, tau-inv, tau2.
    Degree { map: String },
    /// Winding of the normal action along a named family: h, lambda, id.
    Winding {
        family: String,
        /// Loop intervals.
        #[arg(long, default_value_t = 64)]
        loop_samples: usize,
        /// Diagonal point (x, x) as three comma-separated coordinates.
        #[arg(long, value_delimiter = ',', num_args = 3, default_values_t = [0.3, -0.5, 0.8])]
        point: Vec<f64>,
    },
    /// Write the compactification profile table as CSV.
    ProfileExport {
        #[arg(default_value = "compactify_profile.csv")]
        path: PathBuf,
    },
}

/// Failure modes of a command, mapped to exit codes.
enum Fail {
    Usage(String),
    Checks(String),
}

impl From<dehnlab::Error> for Fail {
    fn from(e: dehnlab::Error) -> Self {
        match e {
            dehnlab::Error::Io(_) | dehnlab::Error::OutOfRange { .. } => Fail::Usage(e.to_string()),
            other => Fail::Checks(other.to_string()),
        }
    }
}

fn io_fail(path: &Path, e: std::io::Error) -> Fail {
    Fail::Usage(format!("{}: {e}", path.display()))
}

fn config(opts: &Opts) -> Result<SuiteConfig, Fail> {
    let c = SuiteConfig {
        samples: opts.samples,
        seed: opts.seed,
        fd_step: opts.fd_step,
        tol: opts.tol,
        quad_nodes: opts.quad_nodes,
        output: opts.output.clone(),
        format: opts.format,
    };
    c.validate().map_err(|e| Fail::Usage(e.to_string()))?;
    Ok(c)
}

/// Opens the report sink up front so a bad path fails before any work.
fn sink(output: &Option<PathBuf>) -> Result<Box<dyn Write>, Fail> {
    match output {
        Some(p) => Ok(Box::new(File::create(p).map_err(|e| io_fail(p, e))?)),
        None => Ok(Box::new(std::io::stdout())),
    }
}

fn emit(out: &mut dyn Write, text: &str, output: &Option<PathBuf>) -> Result<(), Fail> {
    out.write_all(text.as_bytes())
        .and_then(|_| out.flush())
        .map_err(|e| match output {
            Some(p) => io_fail(p, e),
            None => Fail::Usage(format!("stdout: {e}")),
        })
}

fn write_trace(path: &Option<PathBuf>, text: &str) -> Result<(), Fail> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| io_fail(p, e))?;
    }
    Ok(())
}

fn list() {
    for c in registry() {
        println!("{:22} {}", c.name, c.claim);
        println!("{:22} {}", "", c.description);
    }
}

fn finish_suite(report: &SuiteReport, failures: &[CheckFailure], c: &SuiteConfig, mut out: Box<dyn Write>) -> Result<(), Fail> {
    let text = match c.format {
        OutputFormat::Json => report.to_json(),
        OutputFormat::Csv => report.to_csv(),
    };
    emit(&mut *out, &text, &c.output)?;
    for f in failures {
        eprintln!("check `{}` raised: {}", f.check, f.error);
    }
    if report.all_pass() {
        return Ok(());
    }
    let names: Vec<&str> = report.failing().map(|r| r.name.as_str()).collect();
    Err(Fail::Checks(format!("failing: {}", names.join(", "))))
}

fn verify_all(opts: &Opts) -> Result<(), Fail> {
    let c = config(opts)?;
    let out = sink(&c.output)?;
    let (report, failures) = run_suite(&c, opts.timing)?;
    finish_suite(&report, &failures, &c, out)
}

fn check(opts: &Opts, name: &str) -> Result<(), Fail> {
    let Some(found) = find_check(name) else {
        return Err(Fail::Usage(format!(
            "unknown check `{name}`; valid names: {}",
            check_names().join(", ")
        )));
    };
    let c = config(opts)?;
    let out = sink(&c.output)?;
    let checks: [&Check; 1] = [found];
    let (report, failures) = run_checks(&checks, &c, opts.timing)?;
    finish_suite(&report, &failures, &c, out)
}

#[derive(Serialize)]
struct DegreeOut<'a> {
    map: &'a str,
    matrix: [[i64; 2]; 2],
    values: [[f64; 2]; 2],
    max_rounding_error: f64,
    nodes: usize,
}

fn degree(opts: &Opts, name: &str) -> Result<(), Fail> {
    let Some(map) = named_map(name) else {
        return Err(Fail::Usage(format!("unknown map `{name}`; valid maps: {}", MAP_NAMES.join(", "))));
    };
    let c = config(opts)?;
    let mut out = sink(&c.output)?;
    let m = homology_matrix(&map, &Basepoints::defaults(), c.quad_nodes)
        .map_err(|e| Fail::Checks(format!("{e} (current --quad-nodes {})", c.quad_nodes)))?;
    if opts.trace.is_some() {
        let d = slice_degrees(&map, &Basepoints::standard(), c.quad_nodes)?;
        let mut text = String::from("row,col,index,cumulative\n");
        for (i, row) in d.iter().enumerate() {
            for (j, deg) in row.iter().enumerate() {
                for line in trace_csv("cumulative", &deg.trace).lines().skip(1) {
                    text.push_str(&format!("{i},{j},{line}\n"));
                }
            }
        }
        write_trace(&opts.trace, &text)?;
    }
    let text = match c.format {
        OutputFormat::Json => {
            let o = DegreeOut {
                map: name,
                matrix: m.entries,
                values: m.values,
                max_rounding_error: m.max_rounding_error,
                nodes: c.quad_nodes,
            };
            serde_json::to_string(&o).expect("serializes") + "\n"
        }
        OutputFormat::Csv => {
            let mut s = String::from("row,col,degree,value\n");
            for i in 0..2 {
                for j in 0..2 {
                    s.push_str(&format!("{i},{j},{},{:?}\n", m.entries[i][j], m.values[i][j]));
                }
            }
            s
        }
    };
    emit(&mut *out, &text, &c.output)
}

#[derive(Serialize)]
struct WindingOut<'a> {
    family: &'a str,
    winding: i64,
    total_angle: f64,
    loop_samples: usize,
}

fn winding(opts: &Opts, name: &str, loop_samples: usize, point: &[f64]) -> Result<(), Fail> {
    let Some(family) = named_family(name) else {
        return Err(Fail::Usage(format!(
            "unknown family `{name}`; valid families: {}",
            FAMILY_NAMES.join(", ")
        )));
    };
    if loop_samples == 0 {
        return Err(Fail::Usage("--loop-samples must be at least 1".into()));
    }
    let c = config(opts)?;
    let mut out = sink(&c.output)?;
    let x = SpherePoint::from_xyz(point[0], point[1], point[2]).map_err(|e| Fail::Usage(format!("--point: {e}")))?;
    let w = normal_loop_winding(&family, &x, loop_samples, c.fd_step)
        .map_err(|e| Fail::Checks(format!("{e} (current --loop-samples {loop_samples})")))?;
    write_trace(&opts.trace, &trace_csv("angle", &w.trace))?;
    let text = match c.format {
        OutputFormat::Json => {
            let o = WindingOut {
                family: name,
                winding: w.winding,
                total_angle: w.total_angle,
                loop_samples,
            };
            serde_json::to_string(&o).expect("serializes") + "\n"
        }
        OutputFormat::Csv => format!("family,winding,total_angle\n{name},{},{:?}\n", w.winding, w.total_angle),
    };
    emit(&mut *out, &text, &c.output)
}

fn profile_export(path: &Path) -> Result<(), Fail> {
    let profile = solve_profile_f()?;
    profile.export(path).map_err(|e| Fail::Usage(format!("{}: {e}", path.display())))?;
    eprintln!("wrote {} rows to {}", profile.grid().len(), path.display());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Fail> {
    if cli.list {
        list();
        return Ok(());
    }
    match &cli.command {
        None => Err(Fail::Usage("no command given; try --help".into())),
        Some(Command::VerifyAll) => verify_all(&cli.opts),
        Some(Command::Check { name }) => check(&cli.opts, name),
        Some(Command::Degree { map }) => degree(&cli.opts, map),
        Some(Command::Winding {
            family,
            loop_samples,
            point,
        }) => winding(&cli.opts, family, *loop_samples, point),
        Some(Command::ProfileExport { path }) => profile_export(path),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Fail::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(USAGE)
        }
        Err(Fail::Checks(msg)) => {
            eprintln!("{msg}");
            ExitCode::from(FAILED)
        }
    }
}
