//! Command-line front end: `meyer-check`, `verify`, `norm`, `synth`.
//!
//! Exit codes: 0 success, 2 rejected parameters or input (including grids
//! too coarse for the requested time), 3 a numerical check failed, 4 I/O or
//! file-schema error.

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use thiserror::Error;

use crate::counterexample::{
    divergence_residual, velocity_samples, verify_theorem, CounterexampleError,
    CounterexampleParams, VerifyConfig,
};
use crate::dyadic::{tl_norm, tl_root_value, CoefficientField, DyadicError, SpaceParams};
use crate::meyer::{build_profile, meyer_check, GridSpec, MeyerError, DEFAULT_TRANSITION_ORDER};
use crate::report::to_json_17;

pub const THREADS_ENV: &str = "CARLESON_NS_THREADS";

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARAMS: i32 = 2;
pub const EXIT_NUMERICAL: i32 = 3;
pub const EXIT_IO: i32 = 4;

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Counterexample(#[from] CounterexampleError),
    #[error(transparent)]
    Dyadic(#[from] DyadicError),
    #[error(transparent)]
    Meyer(#[from] MeyerError),
    #[error("cannot write {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Numerical(String),
}

fn meyer_code(e: &MeyerError) -> i32 {
    match e {
        MeyerError::InvalidTransitionOrder(_)
        | MeyerError::DimensionMismatch { .. }
        | MeyerError::InvalidChannel(_)
        | MeyerError::ZeroChannel
        | MeyerError::Unresolved { .. }
        | MeyerError::InvalidGrid(_) => EXIT_PARAMS,
    }
}

fn dyadic_code(e: &DyadicError) -> i32 {
    match e {
        DyadicError::Io { .. } | DyadicError::Schema(_) => EXIT_IO,
        DyadicError::Divergent { .. } | DyadicError::NotConverged { .. } => EXIT_NUMERICAL,
        DyadicError::Sampling(m) => meyer_code(m),
        _ => EXIT_PARAMS,
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Counterexample(e) => match e {
                CounterexampleError::Divergent { .. }
                | CounterexampleError::NotConverged { .. }
                | CounterexampleError::CertificateRefused(_) => EXIT_NUMERICAL,
                CounterexampleError::Meyer(m) => meyer_code(m),
                CounterexampleError::Dyadic(d) => dyadic_code(d),
                _ => EXIT_PARAMS,
            },
            CliError::Dyadic(e) => dyadic_code(e),
            CliError::Meyer(e) => meyer_code(e),
            CliError::Io { .. } => EXIT_IO,
            CliError::Numerical(_) => EXIT_NUMERICAL,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Parser)]
#[command(name = "carleson-ns", version, about = "Meyer wavelets, dyadic Carleson functionals and a BMO^-1 norm-inflation counterexample")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check the spectral profile identities, Littlewood–Paley completeness
    /// and orthonormality.
    MeyerCheck(MeyerCheckArgs),
    /// Run every check of the counterexample and write a NormReport.
    Verify(VerifyArgs),
    /// Endpoint Triebel–Lizorkin norm of a coefficient table.
    Norm(NormArgs),
    /// Sample (u1, u2) at one time on a grid.
    Synth(SynthArgs),
}

#[derive(Debug, Args)]
pub struct OutputArgs {
    /// Output path; stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Seed for randomized spot checks.
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Order of the polynomial transition inside the Meyer profile.
    #[arg(long, default_value_t = DEFAULT_TRANSITION_ORDER)]
    pub transition_order: u32,
}

#[derive(Debug, Args)]
pub struct ParamArgs {
    #[arg(long = "n", default_value_t = 2)]
    pub n: usize,
    #[arg(long = "a", default_value_t = 0.25, allow_hyphen_values = true)]
    pub a: f64,
    #[arg(long = "b", default_value_t = 0.75, allow_hyphen_values = true)]
    pub b: f64,
}

#[derive(Debug, Args)]
pub struct GridArgs {
    /// Grid points per side (power of two, at least 8).
    #[arg(long = "grid", default_value_t = 256)]
    pub grid: usize,
    /// Side length of the periodic box (positive integer).
    #[arg(long = "box", default_value_t = 1.0)]
    pub box_side: f64,
}

#[derive(Debug, Args)]
pub struct MeyerCheckArgs {
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long, default_value_t = 10)]
    pub j0_max: u32,
    #[arg(long, default_value_t = 40)]
    pub m_max: u32,
    /// Inclusive range of m for the blow-up fit, as LO..HI.
    #[arg(long, value_parser = parse_range, default_value = "4..16")]
    pub m_range: (u32, u32),
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct NormArgs {
    /// Coefficient table (JSON).
    pub file: PathBuf,
    #[arg(long, default_value_t = -1.0, allow_hyphen_values = true)]
    pub gamma: f64,
    /// Summability exponent in [1, inf].
    #[arg(long, default_value_t = 2.0)]
    pub q: f64,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long = "t", allow_hyphen_values = true)]
    pub t: f64,
    #[command(flatten)]
    pub grid: GridArgs,
    #[command(flatten)]
    pub output: OutputArgs,
}

fn parse_range(s: &str) -> Result<(u32, u32), String> {
    let (lo, hi) = s
        .split_once("..=")
        .or_else(|| s.split_once(".."))
        .ok_or_else(|| format!("expected LO..HI, got {s:?}"))?;
    let lo = lo.trim().parse::<u32>().map_err(|e| e.to_string())?;
    let hi = hi.trim().parse::<u32>().map_err(|e| e.to_string())?;
    Ok((lo, hi))
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), CliError> {
    match out {
        Some(p) => write_file(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// `dir/stem{suffix}` next to `path`.
fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let stem = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    path.with_file_name(format!("{stem}{suffix}"))
}

fn configure_threads() {
    if let Some(n) = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .filter(|&n| n > 0)
    {
        // A pool may already exist when called repeatedly in-process.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
}

fn cmd_meyer_check(args: &MeyerCheckArgs) -> Result<i32, CliError> {
    let o = &args.output;
    let profile = build_profile(o.transition_order)?;
    let report = meyer_check(&profile, o.seed)?;
    let text = match o.format {
        Format::Json => to_json_17(&report),
        Format::Csv => format!(
            "identity,residual\n\
             partition_doubling,{:?}\npartition_reflection,{:?}\n\
             littlewood_paley,{:?}\northonormality,{:?}\nperiodization_probe,{:?}\n",
            report.partition_doubling_residual,
            report.partition_reflection_residual,
            report.littlewood_paley_residual,
            report.orthonormality_max_error,
            report.periodization_probe_residual,
        ),
    };
    emit(o.out.as_deref(), &text)?;
    eprintln!(
        "partition {:e} / {:e}, littlewood-paley {:e}, orthonormality {:e}: {}",
        report.partition_doubling_residual,
        report.partition_reflection_residual,
        report.littlewood_paley_residual,
        report.orthonormality_max_error,
        if report.passed { "pass" } else { "fail" }
    );
    if report.passed {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Numerical("Meyer profile battery failed".into()))
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<i32, CliError> {
    let p = &args.params;
    let params = CounterexampleParams::validate(p.n, p.a, p.b)?;
    let profile = build_profile(args.output.transition_order)?;
    let config = VerifyConfig {
        j0_max: args.j0_max,
        m_max: args.m_max,
        m_range: args.m_range,
        grid_points: args.grid.grid,
        box_side: args.grid.box_side,
    };
    let report = verify_theorem(&params, &profile, &config)?;
    let text = match args.output.format {
        Format::Json => report.to_json(),
        Format::Csv => {
            let mut s = String::from("t,bound,grid_value\n");
            for r in &report.ninfty {
                let g = r.grid_value.map_or(String::new(), |v| format!("{v:?}"));
                s.push_str(&format!("{:?},{:?},{}\n", r.t, r.bound, g));
            }
            s
        }
    };
    emit(args.output.out.as_deref(), &text)?;
    if let Some(out) = &args.output.out {
        write_file(&sibling(out, "_blim.csv"), &report.blim_csv())?;
        write_file(&sibling(out, "_bbmo.csv"), &report.bbmo_csv())?;
    }
    let c = &report.claims;
    eprintln!(
        "B.BMO {:?}, B.lim-fails {:?}, N-infty {:?}, div-free {:?}",
        c.bbmo, c.blim_fails, c.n_infty, c.div_free
    );
    if c.all_pass() {
        Ok(EXIT_OK)
    } else {
        Err(CliError::Numerical(report.diagnostics.failures.join("; ")))
    }
}

#[derive(Serialize)]
struct RootValue {
    j: i32,
    k: Vec<i64>,
    value: f64,
}

#[derive(Serialize)]
struct NormOutput {
    gamma: f64,
    q: f64,
    value: f64,
    roots: Vec<RootValue>,
}

fn cmd_norm(args: &NormArgs) -> Result<i32, CliError> {
    let field = CoefficientField::load(&args.file)?;
    let space = SpaceParams::new(args.gamma, args.q)?;
    let roots = field.hull_roots();
    let value = if field.is_empty() {
        eprintln!("warning: coefficient table is empty; norm is 0");
        0.0
    } else {
        tl_norm(&field, space, &roots)?
    };
    println!("{value}");
    if let Some(out) = &args.output.out {
        let breakdown: Vec<RootValue> = roots
            .iter()
            .map(|r| RootValue {
                j: r.j,
                k: r.k.clone(),
                value: tl_root_value(&field, space, r),
            })
            .collect();
        let text = match args.output.format {
            Format::Json => to_json_17(&NormOutput {
                gamma: args.gamma,
                q: args.q,
                value,
                roots: breakdown,
            }),
            Format::Csv => {
                let mut s = String::from("j,k,value\n");
                for r in &breakdown {
                    let k: Vec<String> = r.k.iter().map(i64::to_string).collect();
                    s.push_str(&format!("{},{},{:?}\n", r.j, k.join(" "), r.value));
                }
                s
            }
        };
        write_file(out, &text)?;
    }
    Ok(EXIT_OK)
}

#[derive(Serialize)]
struct SynthMeta {
    n: usize,
    a: f64,
    b: f64,
    t: f64,
    grid: usize,
    box_side: f64,
    u1_sup: f64,
    u2_sup: f64,
    /// Max over the grid of the Euclidean magnitude of `u`.
    sup_norm: f64,
    divergence_residual: f64,
}

fn cmd_synth(args: &SynthArgs) -> Result<i32, CliError> {
    let p = &args.params;
    let params = CounterexampleParams::validate(p.n, p.a, p.b)?;
    let profile = build_profile(args.output.transition_order)?;
    let grid = GridSpec::new(params.n(), args.grid.box_side, args.grid.grid)?;
    let u = velocity_samples(&params, &profile, args.t, &grid)?;
    let residual = divergence_residual(&u, &grid)?;

    let mut csv = String::new();
    let header: Vec<String> = (1..=params.n()).map(|i| format!("x{i}")).collect();
    csv.push_str(&format!("{},u1,u2\n", header.join(",")));
    for flat in 0..grid.len() {
        for x in grid.point(flat) {
            csv.push_str(&format!("{x:?},"));
        }
        csv.push_str(&format!("{:?},{:?}\n", u[0][flat], u[1][flat]));
    }
    emit(args.output.out.as_deref(), &csv)?;

    let sup = |c: &[f64]| c.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let magnitude = (0..grid.len())
        .map(|i| u.iter().map(|c| c[i] * c[i]).sum::<f64>().sqrt())
        .fold(0.0, f64::max);
    let meta = SynthMeta {
        n: params.n(),
        a: params.a(),
        b: params.b(),
        t: args.t,
        grid: grid.points_per_side(),
        box_side: grid.box_side(),
        u1_sup: sup(&u[0]),
        u2_sup: sup(&u[1]),
        sup_norm: magnitude,
        divergence_residual: residual,
    };
    let meta_text = to_json_17(&meta);
    match &args.output.out {
        Some(out) => write_file(&sibling(out, "_meta.json"), &meta_text)?,
        None => eprint!("{meta_text}"),
    }
    Ok(EXIT_OK)
}

/// Parses `args` (including the program name) and runs the subcommand.
/// Returns the process exit code.
pub fn run_from<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::MeyerCheck(a) => cmd_meyer_check(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Norm(a) => cmd_norm(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn range_parsing() {
        assert_eq!(parse_range("4..16"), Ok((4, 16)));
        assert_eq!(parse_range("4..=16"), Ok((4, 16)));
        assert!(parse_range("4-16").is_err());
    }

    #[test]
    fn sibling_paths() {
        assert_eq!(
            sibling(Path::new("/tmp/run/report.json"), "_blim.csv"),
            PathBuf::from("/tmp/run/report_blim.csv")
        );
    }

    #[test]
    fn gate_exit_codes() {
        let e: CliError = CounterexampleError::BelowLowerBound { b: 0.4, lower: 0.5 }.into();
        assert_eq!(e.exit_code(), EXIT_PARAMS);
        let e: CliError = DyadicError::Schema("x".into()).into();
        assert_eq!(e.exit_code(), EXIT_IO);
        let e: CliError = CounterexampleError::CertificateRefused("x".into()).into();
        assert_eq!(e.exit_code(), EXIT_NUMERICAL);
    }
}
