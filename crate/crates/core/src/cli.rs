//! Command-line front end: `compute`, `simulate`, `report`, `validate`.
//!
//! Exit codes: 0 success, 1 invalid input or usage, 2 internal failure.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::error::Error;
use crate::io::{
    compute_report, parse_matrix_document, parse_report, write_report, write_score_matrix, ComputeOptions,
    InterpretationThresholds, MatrixFormat, Report, ReportFormat,
};
use crate::measurements::{Estimate, Measurement, ScoreMatrix, DEFAULT_LAMBDA};
use crate::metrics::{IntervalMethod, DEFAULT_BOOTSTRAP_SEED, DEFAULT_CONFIDENCE, DEFAULT_RESAMPLES};
use crate::simulator::{
    preset_with, simulate, PresetName, PresetOptions, ShiftDifficulty, DEFAULT_REPETITIONS, DEFAULT_SCALE, DEFAULT_SEED,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 1;
pub const EXIT_INTERNAL: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "adaptive-eval",
    version,
    about = "Learning, potential, and retention of adaptive models"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Compute measurements and intervals from a score matrix.
    Compute(ComputeArgs),
    /// Run a preset scenario and write its score matrix.
    Simulate(SimulateArgs),
    /// Re-render a structured report in another format.
    Report(ReportArgs),
    /// Check that a score matrix supports every measurement at every step.
    Validate(ValidateArgs),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputFormat {
    Auto,
    Delimited,
    Structured,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OutputFormat {
    Structured,
    Delimited,
    PlotSeries,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum MatrixOutput {
    Delimited,
    Structured,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CiMethod {
    Bootstrap,
    Normal,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Difficulty {
    Harder,
    Easier,
}

#[derive(Debug, clap::Args)]
struct Thresholds {
    /// Potential above this is reported as a possible population shift
    /// [default: 5% of the metric range].
    #[arg(long, allow_negative_numbers = true)]
    potential_threshold: Option<f64>,
    /// Retention this far below the previous step's performance is reported
    /// as knowledge loss [default: 5% of the metric range].
    #[arg(long, allow_negative_numbers = true)]
    retention_drop: Option<f64>,
}

impl Thresholds {
    fn resolve(&self, base: InterpretationThresholds) -> Result<Option<InterpretationThresholds>, CliError> {
        if self.potential_threshold.is_none() && self.retention_drop.is_none() {
            return Ok(None);
        }
        let t = InterpretationThresholds {
            potential_high: self.potential_threshold.unwrap_or(base.potential_high),
            retention_drop: self.retention_drop.unwrap_or(base.retention_drop),
        };
        if !(t.potential_high.is_finite() && t.retention_drop.is_finite()) {
            return Err(CliError::invalid("thresholds must be finite"));
        }
        Ok(Some(t))
    }
}

#[derive(Debug, clap::Args)]
struct ComputeArgs {
    /// Score matrix (delimited or structured).
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    input_format: InputFormat,
    /// Where to write the report.
    #[arg(long)]
    output: PathBuf,
    /// Report format [default: delimited for *.csv, structured otherwise].
    #[arg(long, value_enum)]
    format: Option<OutputFormat>,
    /// Decay constant of the retention weights
    /// [default: the file's own value, else 0.5].
    #[arg(long)]
    lambda: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_CONFIDENCE)]
    confidence: f64,
    #[arg(long, value_enum, default_value = "bootstrap")]
    ci_method: CiMethod,
    #[arg(long, default_value_t = DEFAULT_RESAMPLES)]
    resamples: usize,
    /// Bootstrap seed.
    #[arg(long, default_value_t = DEFAULT_BOOTSTRAP_SEED)]
    seed: u64,
    #[command(flatten)]
    thresholds: Thresholds,
}

#[derive(Debug, clap::Args)]
struct SimulateArgs {
    /// One of: single_shift, single_shift_limited, double_shift.
    #[arg(long)]
    scenario: String,
    #[arg(long, default_value_t = DEFAULT_REPETITIONS)]
    reps: usize,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    seed: u64,
    /// Fraction of the reference partition sizes (525/75/150 per class).
    #[arg(long, default_value_t = DEFAULT_SCALE)]
    scale: f64,
    #[arg(long, value_enum, default_value = "harder")]
    difficulty: Difficulty,
    /// Draw fresh samples at every step instead of nesting datasets.
    #[arg(long)]
    fresh_samples: bool,
    /// Start every step from an untrained model.
    #[arg(long)]
    from_scratch: bool,
    /// Where to write the score matrix.
    #[arg(long)]
    out: PathBuf,
    /// Matrix format [default: structured for *.json, delimited otherwise].
    #[arg(long, value_enum)]
    format: Option<MatrixOutput>,
}

#[derive(Debug, clap::Args)]
struct ReportArgs {
    /// Structured report written by `compute`.
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "plot-series")]
    format: OutputFormat,
    /// Output file [default: standard output].
    #[arg(long)]
    output: Option<PathBuf>,
    #[command(flatten)]
    thresholds: Thresholds,
}

#[derive(Debug, clap::Args)]
struct ValidateArgs {
    #[arg(long)]
    input: PathBuf,
    #[arg(long, value_enum, default_value = "auto")]
    input_format: InputFormat,
}

#[derive(Debug)]
struct CliError {
    code: i32,
    message: String,
}

impl CliError {
    fn invalid(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INVALID,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Io(_) | Error::NonFiniteLoss { .. } => CliError::internal(e.to_string()),
            _ => CliError::invalid(e.to_string()),
        }
    }
}

/// Runs the tool with `args` (program name first) and returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                EXIT_INVALID
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    let outcome = match cli.command {
        Command::Compute(a) => compute(a, stdout, stderr),
        Command::Simulate(a) => simulate_cmd(a, stdout),
        Command::Report(a) => report_cmd(a, stdout),
        Command::Validate(a) => validate(a, stdout, stderr),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message);
            e.code
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    std::fs::read(path).map_err(|e| CliError::invalid(format!("cannot read {}: {e}", path.display())))
}

/// Writes through a temporary file in the target directory so a failed run
/// never leaves a partial file behind.
fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let fail = |e: std::io::Error| CliError::internal(format!("cannot write {}: {e}", path.display()));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(fail)?;
    tmp.write_all(bytes).map_err(fail)?;
    tmp.flush().map_err(fail)?;
    tmp.persist(path).map_err(|e| fail(e.error))?;
    Ok(())
}

fn load_matrix(path: &Path, format: InputFormat) -> Result<(Vec<u8>, ScoreMatrix, Option<f64>), CliError> {
    let bytes = read_input(path)?;
    let format = match format {
        InputFormat::Auto => MatrixFormat::sniff(&bytes),
        InputFormat::Delimited => MatrixFormat::Delimited,
        InputFormat::Structured => MatrixFormat::Structured,
    };
    let doc =
        parse_matrix_document(&bytes, format).map_err(|e| CliError::invalid(format!("{}: {e}", path.display())))?;
    Ok((bytes, doc.matrix, doc.lambda))
}

fn has_extension(path: &Path, ext: &str) -> bool {
    path.extension().is_some_and(|e| e.eq_ignore_ascii_case(ext))
}

fn report_format(f: OutputFormat) -> ReportFormat {
    match f {
        OutputFormat::Structured => ReportFormat::Structured,
        OutputFormat::Delimited => ReportFormat::Delimited,
        OutputFormat::PlotSeries => ReportFormat::PlotSeries,
    }
}

fn fmt_estimate(m: Measurement, e: &Estimate) -> String {
    if m == Measurement::Performance || m == Measurement::Retention {
        format!("{} {:.4} [{:.4}, {:.4}]", m.name(), e.mean, e.ci_low, e.ci_high)
    } else {
        format!("{} {:+.4} [{:+.4}, {:+.4}]", m.name(), e.mean, e.ci_low, e.ci_high)
    }
}

/// One summary line per step.
pub fn summary_lines(report: &Report) -> Vec<String> {
    report
        .series
        .points
        .iter()
        .map(|p| {
            let parts: Vec<String> = Measurement::ALL
                .iter()
                .filter_map(|&m| p.get(m).map(|e| fmt_estimate(m, e)))
                .collect();
            format!("step {}: {}", p.step, parts.join("  "))
        })
        .collect()
}

fn compute(a: ComputeArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let (bytes, matrix, file_lambda) = load_matrix(&a.input, a.input_format)?;
    let interval_method = match a.ci_method {
        CiMethod::Bootstrap => IntervalMethod::Bootstrap {
            resamples: a.resamples,
            seed: a.seed,
        },
        CiMethod::Normal => IntervalMethod::Normal,
    };
    let options = ComputeOptions {
        lambda: a.lambda.or(file_lambda).unwrap_or(DEFAULT_LAMBDA),
        confidence: a.confidence,
        interval_method,
        thresholds: a
            .thresholds
            .resolve(InterpretationThresholds::for_range(matrix.range()))?,
    };
    let report = compute_report(&bytes, &matrix, &options)?;
    let format = a
        .format
        .map(report_format)
        .unwrap_or(if has_extension(&a.output, "csv") {
            ReportFormat::Delimited
        } else {
            ReportFormat::Structured
        });
    write_atomic(&a.output, &write_report(&report, format))?;

    let mut out = String::new();
    for line in summary_lines(&report) {
        let _ = writeln!(out, "{line}");
    }
    for n in &report.notes {
        let _ = writeln!(out, "note: step {} [{}] {}", n.step, n.rule, n.message);
    }
    emit(stdout, &out)?;
    let mut diag = String::new();
    for w in report.warnings() {
        let _ = writeln!(diag, "warning: step {}: {}", w.step, w.message);
    }
    let _ = stderr.write_all(diag.as_bytes());
    Ok(EXIT_OK)
}

fn emit(stdout: &mut dyn Write, text: &str) -> Result<(), CliError> {
    stdout
        .write_all(text.as_bytes())
        .map_err(|e| CliError::internal(format!("cannot write to standard output: {e}")))
}

fn simulate_cmd(a: SimulateArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let name: PresetName = a.scenario.parse()?;
    if a.reps == 0 {
        return Err(CliError::invalid("repetitions must be ≥ 1"));
    }
    if !(a.scale.is_finite() && a.scale > 0.0) {
        return Err(CliError::invalid(format!("scale must be positive, got {}", a.scale)));
    }
    let mut config = preset_with(
        name,
        PresetOptions {
            scale: a.scale,
            num_repetitions: a.reps,
            base_seed: a.seed,
            difficulty: match a.difficulty {
                Difficulty::Harder => ShiftDifficulty::Harder,
                Difficulty::Easier => ShiftDifficulty::Easier,
            },
        },
    )?;
    config.reuse_samples = !a.fresh_samples;
    config.retrain_from_scratch = a.from_scratch;
    let matrix = simulate(&config)?;
    let format = match a.format {
        Some(MatrixOutput::Structured) => MatrixFormat::Structured,
        Some(MatrixOutput::Delimited) => MatrixFormat::Delimited,
        None if has_extension(&a.out, "json") => MatrixFormat::Structured,
        None => MatrixFormat::Delimited,
    };
    write_atomic(&a.out, &write_score_matrix(&matrix, format))?;
    emit(
        stdout,
        &format!(
            "{}: wrote {} scores ({} steps, {} repetitions) to {}\n",
            name,
            matrix.len(),
            matrix.num_steps(),
            matrix.num_repetitions(),
            a.out.display()
        ),
    )?;
    Ok(EXIT_OK)
}

fn report_cmd(a: ReportArgs, stdout: &mut dyn Write) -> Result<i32, CliError> {
    let bytes = read_input(&a.input)?;
    let mut report = parse_report(&bytes).map_err(|e| CliError::invalid(format!("{}: {e}", a.input.display())))?;
    if let Some(t) = a.thresholds.resolve(report.provenance.thresholds)? {
        report.reinterpret(t);
    }
    let rendered = write_report(&report, report_format(a.format));
    match &a.output {
        Some(path) => write_atomic(path, &rendered)?,
        None => stdout
            .write_all(&rendered)
            .map_err(|e| CliError::internal(format!("cannot write to standard output: {e}")))?,
    }
    Ok(EXIT_OK)
}

fn validate(a: ValidateArgs, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<i32, CliError> {
    let (_, matrix, _) = load_matrix(&a.input, a.input_format)?;
    let mut out = String::new();
    for step in 0..matrix.num_steps() {
        let parts: Vec<String> = Measurement::applicable(step)
            .iter()
            .map(|&m| {
                let status = if matrix.missing_cells(m, step).is_empty() {
                    "ok"
                } else {
                    "missing"
                };
                format!("{} {status}", m.name())
            })
            .collect();
        let _ = writeln!(out, "step {step}: {}", parts.join(", "));
    }
    emit(stdout, &out)?;
    let report = matrix.completeness();
    if report.is_complete() {
        Ok(EXIT_OK)
    } else {
        let _ = writeln!(stderr, "incomplete score matrix:\n{report}");
        Ok(EXIT_INVALID)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let (mut out, mut err) = (Vec::new(), Vec::new());
        let code = run(
            std::iter::once("adaptive-eval").chain(args.iter().copied()),
            &mut out,
            &mut err,
        );
        (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
    }

    #[test]
    fn usage_errors_exit_one() {
        assert_eq!(run_capture(&[]).0, EXIT_INVALID);
        assert_eq!(run_capture(&["compute", "--bogus"]).0, EXIT_INVALID);
        let (code, out, _) = run_capture(&["--help"]);
        assert_eq!(code, EXIT_OK);
        assert!(out.contains("simulate"));
    }

    #[test]
    fn unknown_scenario_lists_names() {
        let (code, _, err) = run_capture(&["simulate", "--scenario", "nope", "--out", "x.csv"]);
        assert_eq!(code, EXIT_INVALID);
        for name in PresetName::names() {
            assert!(err.contains(&name), "{err}");
        }
    }

    #[test]
    fn zero_repetitions_rejected() {
        let (code, _, err) = run_capture(&[
            "simulate",
            "--scenario",
            "single_shift",
            "--reps",
            "0",
            "--out",
            "x.csv",
        ]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("repetitions must be ≥ 1"), "{err}");
    }

    #[test]
    fn missing_input_is_a_validation_error() {
        let (code, _, err) = run_capture(&["validate", "--input", "/nonexistent/scores.csv"]);
        assert_eq!(code, EXIT_INVALID);
        assert!(err.contains("cannot read"));
    }
}
