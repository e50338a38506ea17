//! Command-line front end.
//!
//! Every subcommand computes one artifact — a decomposition, an exact
//! splitting product, an evolved input, or a measurement table — writes
//! it to stdout (or `--out`, atomically), and prints a one-line verdict
//! to stderr so pipelines stay clean. Exit codes are part of the
//! interface:
//!
//! * 0 — success
//! * 2 — the eigenvalue-gap hypothesis does not hold (`check-h`,
//!   `report-divergence`)
//! * 3 — an input matrix has no real eigendecomposition, or it is too
//!   ill-conditioned to trust
//! * 4 — an exact product would exceed the term cap
//! * 5 — bad flags, bad input syntax, or an unwritable destination
//!
//! Code 1 is deliberately unused so a controlled refusal can never be
//! confused with a crash.

use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::experiments::{
    commuting_control, divergence_experiment, exact_evolution, stability_probe, ExperimentError,
};
use crate::funcspace::{ScalarProfile, VectorFunction};
use crate::report::{
    commuting_csv, commuting_json, decomposition_json, divergence_csv, divergence_gnuplot,
    divergence_json, function_json, hypothesis_json, operator_json, rfc3339_now, stability_csv,
    stability_json, write_atomic, Meta,
};
use crate::spectral::{check_hypothesis, decompose, HypothesisError, SquareMatrix};
use crate::transport::{trotter_operator, vanishing_edge, TransportError};

/// Success.
pub const EXIT_OK: i32 = 0;
/// The eigenvalue-gap hypothesis does not hold for the given pair.
pub const EXIT_HYPOTHESIS_VIOLATED: i32 = 2;
/// An input matrix could not be eigendecomposed over the reals.
pub const EXIT_DECOMPOSITION: i32 = 3;
/// An exact product grew past the term cap.
pub const EXIT_TERM_EXPLOSION: i32 = 4;
/// Bad flags, malformed input, or an unwritable output destination.
pub const EXIT_CONFIG: i32 = 5;

const DEFAULT_MATRIX_A: &str = "0,1;1,0";
const DEFAULT_MATRIX_B: &str = "0,1;4,0";
const DEFAULT_M: &str = "pow2:10";

#[derive(Parser)]
#[command(
    name = "trotterlab",
    version,
    about = "Exact splitting-product laboratory for first-order hyperbolic systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Eigendecompose a matrix and emit its eigenvalues with dual bases
    Decompose(DecomposeArgs),
    /// Check the eigenvalue-gap hypothesis for a pair of matrices
    CheckH(CheckHArgs),
    /// Apply the exact solution operator of a + b at time t to a profile input
    Evolve(EvolveArgs),
    /// Compose the splitting product [S(t/m) T(t/m)]^m exactly and emit its terms
    Trotter(TrotterArgs),
    /// Measure how far the splitting products stay from the exact solution
    ReportDivergence(ReportDivergenceArgs),
    /// Tabulate operator-norm bounds of the splitting products across m
    ReportStability(ReportStabilityArgs),
    /// Verify the splitting product collapses onto the exact solution when the pieces commute
    ControlCommuting(ControlCommutingArgs),
}

/// Destination and format controls shared by every subcommand.
#[derive(Args)]
struct OutputArgs {
    /// Write the artifact to this path (atomic replace) instead of stdout
    #[arg(long, value_name = "PATH")]
    out: Option<PathBuf>,
    /// Artifact format
    #[arg(long, value_enum, default_value_t = OutputFormat::Json)]
    format: OutputFormat,
    /// Omit the timestamp from the meta block, for byte-reproducible artifacts
    #[arg(long)]
    no_timestamp: bool,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum OutputFormat {
    Json,
    Csv,
    Gnuplot,
}

impl OutputFormat {
    fn name(self) -> &'static str {
        match self {
            OutputFormat::Json => "json",
            OutputFormat::Csv => "csv",
            OutputFormat::Gnuplot => "gnuplot",
        }
    }
}

#[derive(Args)]
struct DecomposeArgs {
    /// Matrix to decompose: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_A)]
    matrix_a: String,
    /// Eigendecomposition tolerance
    #[arg(long, default_value = "1e-9")]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CheckHArgs {
    /// First summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_A)]
    matrix_a: String,
    /// Second summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_B)]
    matrix_b: String,
    /// Eigendecomposition tolerance
    #[arg(long, default_value = "1e-9")]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct EvolveArgs {
    /// First summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_A)]
    matrix_a: String,
    /// Second summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_B)]
    matrix_b: String,
    /// Evolution time
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Scalar profile of the input: bump, sine:<freq>, or gaussian:<center>:<width>
    #[arg(long, default_value = "bump")]
    profile: String,
    /// Eigendecomposition tolerance
    #[arg(long, default_value = "1e-9")]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TrotterArgs {
    /// First summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_A)]
    matrix_a: String,
    /// Second summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_B)]
    matrix_b: String,
    /// Evolution time
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Subdivision counts ("1,2,4" or "pow2:K"); the largest one is composed
    #[arg(long, default_value = DEFAULT_M)]
    m: String,
    /// Eigendecomposition tolerance
    #[arg(long, default_value = "1e-9")]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReportDivergenceArgs {
    /// First summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_A)]
    matrix_a: String,
    /// Second summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_B)]
    matrix_b: String,
    /// Evolution time (must be positive)
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Subdivision counts: "1,2,4" or "pow2:K" for 2^0..2^K
    #[arg(long, default_value = DEFAULT_M)]
    m: String,
    /// Grid density for the sup-distance scan
    #[arg(long, default_value_t = 2048)]
    points_per_unit: usize,
    /// Random restarts for the operator-norm lower bound
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Seed for the norm-bound restarts
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Eigendecomposition tolerance
    #[arg(long, default_value = "1e-9")]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ReportStabilityArgs {
    /// First summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_A)]
    matrix_a: String,
    /// Second summand: rows separated by ';', entries by ','
    #[arg(long, default_value = DEFAULT_MATRIX_B)]
    matrix_b: String,
    /// Evolution time
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Subdivision counts: "1,2,4" or "pow2:K" for 2^0..2^K
    #[arg(long, default_value = DEFAULT_M)]
    m: String,
    /// Random restarts for the operator-norm lower bound
    #[arg(long, default_value_t = 8)]
    restarts: usize,
    /// Seed for the norm-bound restarts
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Eigendecomposition tolerance
    #[arg(long, default_value = "1e-9")]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ControlCommutingArgs {
    /// The matrix a; the second summand is scale·a
    #[arg(long, default_value = DEFAULT_MATRIX_A)]
    matrix_a: String,
    /// Second summand is this multiple of matrix-a
    #[arg(long, default_value_t = 2.0)]
    scale: f64,
    /// Evolution time
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    /// Subdivision counts: "1,2,4" or "pow2:K" for 2^0..2^K
    #[arg(long, default_value = DEFAULT_M)]
    m: String,
    /// Eigendecomposition tolerance
    #[arg(long, default_value = "1e-9")]
    tol: f64,
    #[command(flatten)]
    output: OutputArgs,
}

/// A controlled failure: message for stderr plus the process exit code.
#[derive(Debug)]
struct CliFailure {
    code: i32,
    message: String,
}

impl CliFailure {
    fn new(code: i32, message: impl Into<String>) -> Self {
        CliFailure {
            code,
            message: message.into(),
        }
    }

    fn config(message: impl Into<String>) -> Self {
        Self::new(EXIT_CONFIG, message)
    }
}

/// Parse argv, dispatch, and return the process exit code.
pub fn main() -> i32 {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            // --help and --version surface as clap "errors" but are not
            // failures; everything else is a usage error.
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_CONFIG,
            };
            let _ = e.print();
            return code;
        }
    };
    match run(cli) {
        Ok(code) => code,
        Err(f) => {
            eprintln!("trotterlab: {}", f.message);
            f.code
        }
    }
}

fn run(cli: Cli) -> Result<i32, CliFailure> {
    match cli.command {
        Command::Decompose(args) => cmd_decompose(args),
        Command::CheckH(args) => cmd_check_h(args),
        Command::Evolve(args) => cmd_evolve(args),
        Command::Trotter(args) => cmd_trotter(args),
        Command::ReportDivergence(args) => cmd_report_divergence(args),
        Command::ReportStability(args) => cmd_report_stability(args),
        Command::ControlCommuting(args) => cmd_control_commuting(args),
    }
}

fn cmd_decompose(args: DecomposeArgs) -> Result<i32, CliFailure> {
    require_json(args.output.format, "decompose")?;
    let tol = validate_tol(args.tol)?;
    let a = parse_matrix(&args.matrix_a, "--matrix-a")?;
    let d = decompose(&a, tol)
        .map_err(|e| CliFailure::new(EXIT_DECOMPOSITION, format!("--matrix-a: {e}")))?;
    let meta = Meta::new("decompose")
        .flag("matrix-a", &args.matrix_a)
        .flag("tol", args.tol)
        .flag("format", args.output.format.name())
        .with_timestamp(timestamp(&args.output));
    let summary = format!(
        "DECOMPOSED: n={}, spectrum in [{:.2e}, {:.2e}]",
        d.n(),
        d.min_eigenvalue(),
        d.max_eigenvalue()
    );
    emit(&args.output, decomposition_json(&d, &meta), summary)?;
    Ok(EXIT_OK)
}

fn cmd_check_h(args: CheckHArgs) -> Result<i32, CliFailure> {
    require_json(args.output.format, "check-h")?;
    let tol = validate_tol(args.tol)?;
    let a = parse_matrix(&args.matrix_a, "--matrix-a")?;
    let b = parse_matrix(&args.matrix_b, "--matrix-b")?;
    let report = check_hypothesis(&a, &b, tol).map_err(hypothesis_failure)?;
    let meta = Meta::new("check-h")
        .flag("matrix-a", &args.matrix_a)
        .flag("matrix-b", &args.matrix_b)
        .flag("tol", args.tol)
        .flag("format", args.output.format.name())
        .with_timestamp(timestamp(&args.output));
    let verdict = if report.satisfied {
        "HYPOTHESIS SATISFIED"
    } else {
        "HYPOTHESIS NOT SATISFIED"
    };
    let summary = format!("{verdict}: gap {:.2e}", report.gap);
    let code = if report.satisfied {
        EXIT_OK
    } else {
        EXIT_HYPOTHESIS_VIOLATED
    };
    emit(&args.output, hypothesis_json(&report, &meta), summary)?;
    Ok(code)
}

fn cmd_evolve(args: EvolveArgs) -> Result<i32, CliFailure> {
    require_json(args.output.format, "evolve")?;
    let tol = validate_tol(args.tol)?;
    require_finite("--t", args.t)?;
    let profile: ScalarProfile = args
        .profile
        .parse()
        .map_err(|e| CliFailure::config(format!("--profile: {e}")))?;
    let a = parse_matrix(&args.matrix_a, "--matrix-a")?;
    let b = parse_matrix(&args.matrix_b, "--matrix-b")?;
    let c = a
        .add(&b)
        .map_err(|e| CliFailure::config(format!("matrix sum: {e}")))?;
    let dc = decompose(&c, tol)
        .map_err(|e| CliFailure::new(EXIT_DECOMPOSITION, format!("matrix sum: {e}")))?;
    let f = VectorFunction::single_term(profile, 0.0, dc.right_eigenvector(dc.n() - 1))
        .map_err(|e| CliFailure::config(format!("--profile: {e}")))?;
    let evolved = exact_evolution(&dc, args.t, &f).map_err(experiment_failure)?;
    let meta = Meta::new("evolve")
        .flag("matrix-a", &args.matrix_a)
        .flag("matrix-b", &args.matrix_b)
        .flag("t", args.t)
        .flag("profile", &args.profile)
        .flag("tol", args.tol)
        .flag("format", args.output.format.name())
        .with_timestamp(timestamp(&args.output));
    let summary = format!("EVOLVED: {} term(s) at t={}", evolved.terms().len(), args.t);
    emit(&args.output, function_json(&evolved, &meta), summary)?;
    Ok(EXIT_OK)
}

fn cmd_trotter(args: TrotterArgs) -> Result<i32, CliFailure> {
    require_json(args.output.format, "trotter")?;
    let tol = validate_tol(args.tol)?;
    require_finite("--t", args.t)?;
    let m_list = parse_m_list(&args.m)?;
    let m = *m_list.iter().max().expect("parsed list is nonempty");
    let a = parse_matrix(&args.matrix_a, "--matrix-a")?;
    let b = parse_matrix(&args.matrix_b, "--matrix-b")?;
    let da = decompose(&a, tol)
        .map_err(|e| CliFailure::new(EXIT_DECOMPOSITION, format!("--matrix-a: {e}")))?;
    let db = decompose(&b, tol)
        .map_err(|e| CliFailure::new(EXIT_DECOMPOSITION, format!("--matrix-b: {e}")))?;
    let op = trotter_operator(&da, &db, args.t, m).map_err(transport_failure)?;
    let edge = vanishing_edge(&op, 0.0).map_err(transport_failure)?;
    let meta = Meta::new("trotter")
        .flag("matrix-a", &args.matrix_a)
        .flag("matrix-b", &args.matrix_b)
        .flag("t", args.t)
        .flag("m", &args.m)
        .flag("tol", args.tol)
        .flag("format", args.output.format.name())
        .with_timestamp(timestamp(&args.output));
    let summary = format!(
        "COMPOSED: m={m}, {} terms, vanishing edge {:.2e}",
        op.term_count(),
        edge
    );
    emit(&args.output, operator_json(&op, &meta), summary)?;
    Ok(EXIT_OK)
}

fn cmd_report_divergence(args: ReportDivergenceArgs) -> Result<i32, CliFailure> {
    let tol = validate_tol(args.tol)?;
    require_finite("--t", args.t)?;
    if args.t <= 0.0 {
        return Err(CliFailure::config(format!(
            "--t must be positive for report-divergence (got {})",
            args.t
        )));
    }
    if args.points_per_unit == 0 {
        return Err(CliFailure::config("--points-per-unit must be at least 1"));
    }
    let m_list = parse_m_list(&args.m)?;
    let a = parse_matrix(&args.matrix_a, "--matrix-a")?;
    let b = parse_matrix(&args.matrix_b, "--matrix-b")?;
    let report = divergence_experiment(
        &a,
        &b,
        args.t,
        &m_list,
        args.points_per_unit,
        args.restarts,
        args.seed,
        tol,
    )
    .map_err(experiment_failure)?;
    let meta = Meta::new("report-divergence")
        .flag("matrix-a", &args.matrix_a)
        .flag("matrix-b", &args.matrix_b)
        .flag("t", args.t)
        .flag("m", &args.m)
        .flag("points-per-unit", args.points_per_unit)
        .flag("restarts", args.restarts)
        .flag("seed", args.seed)
        .flag("tol", args.tol)
        .flag("format", args.output.format.name())
        .with_timestamp(timestamp(&args.output));
    let artifact = match args.output.format {
        OutputFormat::Json => divergence_json(&report, &meta),
        OutputFormat::Csv => divergence_csv(&report),
        OutputFormat::Gnuplot => divergence_gnuplot(&report),
    };
    let floor = report
        .rows
        .iter()
        .map(|r| r.d_m)
        .fold(f64::INFINITY, f64::min);
    let summary = format!(
        "NON-CONVERGENT: d_m floor {:.2e} over m={}..{}",
        floor,
        m_list.first().expect("nonempty"),
        m_list.last().expect("nonempty")
    );
    emit(&args.output, artifact, summary)?;
    Ok(EXIT_OK)
}

fn cmd_report_stability(args: ReportStabilityArgs) -> Result<i32, CliFailure> {
    require_tabular(args.output.format, "report-stability")?;
    let tol = validate_tol(args.tol)?;
    require_finite("--t", args.t)?;
    let m_list = parse_m_list(&args.m)?;
    let a = parse_matrix(&args.matrix_a, "--matrix-a")?;
    let b = parse_matrix(&args.matrix_b, "--matrix-b")?;
    let table = stability_probe(&a, &b, args.t, &m_list, args.restarts, args.seed, tol)
        .map_err(experiment_failure)?;
    let meta = Meta::new("report-stability")
        .flag("matrix-a", &args.matrix_a)
        .flag("matrix-b", &args.matrix_b)
        .flag("t", args.t)
        .flag("m", &args.m)
        .flag("restarts", args.restarts)
        .flag("seed", args.seed)
        .flag("tol", args.tol)
        .flag("format", args.output.format.name())
        .with_timestamp(timestamp(&args.output));
    let artifact = match args.output.format {
        OutputFormat::Json => stability_json(&table, &meta),
        OutputFormat::Csv => stability_csv(&table),
        OutputFormat::Gnuplot => unreachable!("rejected above"),
    };
    let first = table.rows.first().expect("nonempty");
    let last = table.rows.last().expect("nonempty");
    let summary = format!(
        "STABILITY: norm lower {:.2e} -> {:.2e} over m={}..{}, log-log slope {:.3}",
        first.norm_lower, last.norm_lower, first.m, last.m, table.slope
    );
    emit(&args.output, artifact, summary)?;
    Ok(EXIT_OK)
}

fn cmd_control_commuting(args: ControlCommutingArgs) -> Result<i32, CliFailure> {
    require_tabular(args.output.format, "control-commuting")?;
    let tol = validate_tol(args.tol)?;
    require_finite("--t", args.t)?;
    require_finite("--scale", args.scale)?;
    let m_list = parse_m_list(&args.m)?;
    let a = parse_matrix(&args.matrix_a, "--matrix-a")?;
    let report =
        commuting_control(&a, args.scale, args.t, &m_list, tol).map_err(experiment_failure)?;
    let meta = Meta::new("control-commuting")
        .flag("matrix-a", &args.matrix_a)
        .flag("scale", args.scale)
        .flag("t", args.t)
        .flag("m", &args.m)
        .flag("tol", args.tol)
        .flag("format", args.output.format.name())
        .with_timestamp(timestamp(&args.output));
    let artifact = match args.output.format {
        OutputFormat::Json => commuting_json(&report, &meta),
        OutputFormat::Csv => commuting_csv(&report),
        OutputFormat::Gnuplot => unreachable!("rejected above"),
    };
    let summary = format!(
        "COMMUTING: max deviation {:.2e} over m={}..{}",
        report.max_deviation,
        m_list.first().expect("nonempty"),
        m_list.last().expect("nonempty")
    );
    emit(&args.output, artifact, summary)?;
    Ok(EXIT_OK)
}

/// Parse "r00,r01;r10,r11" (whitespace around entries is fine).
fn parse_matrix(spec: &str, which: &str) -> Result<SquareMatrix, CliFailure> {
    let mut rows: Vec<Vec<f64>> = Vec::new();
    for (i, row) in spec.split(';').enumerate() {
        let mut entries = Vec::new();
        for (j, cell) in row.split(',').enumerate() {
            let cell = cell.trim();
            let value: f64 = cell.parse().map_err(|_| {
                CliFailure::config(format!(
                    "{which}: cannot parse entry {cell:?} (row {}, column {})",
                    i + 1,
                    j + 1
                ))
            })?;
            entries.push(value);
        }
        rows.push(entries);
    }
    SquareMatrix::from_rows(&rows).map_err(|e| CliFailure::config(format!("{which}: {e}")))
}

/// Parse "1,2,4" or "pow2:K" (meaning 2^0, 2^1, …, 2^K).
fn parse_m_list(spec: &str) -> Result<Vec<usize>, CliFailure> {
    let spec = spec.trim();
    if let Some(k) = spec.strip_prefix("pow2:") {
        let k: u32 = k
            .trim()
            .parse()
            .map_err(|_| CliFailure::config(format!("--m: bad pow2 exponent {:?}", k.trim())))?;
        if k >= 63 {
            return Err(CliFailure::config(format!(
                "--m: pow2 exponent {k} is out of range"
            )));
        }
        return Ok((0..=k).map(|j| 1usize << j).collect());
    }
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        let m: usize = part
            .parse()
            .map_err(|_| CliFailure::config(format!("--m: cannot parse count {part:?}")))?;
        if m == 0 {
            return Err(CliFailure::config("--m: counts must be at least 1"));
        }
        out.push(m);
    }
    Ok(out)
}

fn validate_tol(tol: f64) -> Result<f64, CliFailure> {
    if !(tol.is_finite() && tol > 0.0) {
        return Err(CliFailure::config(format!(
            "--tol must be positive and finite (got {tol})"
        )));
    }
    Ok(tol)
}

fn require_finite(name: &str, value: f64) -> Result<(), CliFailure> {
    if !value.is_finite() {
        return Err(CliFailure::config(format!(
            "{name} must be finite (got {value})"
        )));
    }
    Ok(())
}

fn require_json(format: OutputFormat, command: &str) -> Result<(), CliFailure> {
    if format != OutputFormat::Json {
        return Err(CliFailure::config(format!(
            "{command} emits JSON only (got --format {})",
            format.name()
        )));
    }
    Ok(())
}

fn require_tabular(format: OutputFormat, command: &str) -> Result<(), CliFailure> {
    if format == OutputFormat::Gnuplot {
        return Err(CliFailure::config(format!(
            "{command} supports --format json or csv only"
        )));
    }
    Ok(())
}

fn timestamp(output: &OutputArgs) -> Option<String> {
    if output.no_timestamp {
        None
    } else {
        Some(rfc3339_now())
    }
}

/// Write the artifact to `--out` (atomically) or stdout, then put the
/// one-line verdict on stderr.
fn emit(output: &OutputArgs, artifact: String, summary: String) -> Result<(), CliFailure> {
    let body = if artifact.ends_with('\n') {
        artifact
    } else {
        format!("{artifact}\n")
    };
    match &output.out {
        Some(path) => write_atomic(path, &body)
            .map_err(|e| CliFailure::config(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{body}"),
    }
    eprintln!("{summary}");
    Ok(())
}

fn hypothesis_failure(e: HypothesisError) -> CliFailure {
    let code = match &e {
        HypothesisError::Decomposition { .. } => EXIT_DECOMPOSITION,
        _ => EXIT_CONFIG,
    };
    CliFailure::new(code, e.to_string())
}

fn transport_failure(e: TransportError) -> CliFailure {
    let code = match &e {
        TransportError::TermExplosion { .. } => EXIT_TERM_EXPLOSION,
        _ => EXIT_CONFIG,
    };
    CliFailure::new(code, e.to_string())
}

fn experiment_failure(e: ExperimentError) -> CliFailure {
    let code = match &e {
        ExperimentError::HypothesisViolated { .. } => EXIT_HYPOTHESIS_VIOLATED,
        ExperimentError::Hypothesis(HypothesisError::Decomposition { .. }) => EXIT_DECOMPOSITION,
        ExperimentError::Transport(TransportError::TermExplosion { .. }) => EXIT_TERM_EXPLOSION,
        _ => EXIT_CONFIG,
    };
    CliFailure::new(code, e.to_string())
}
