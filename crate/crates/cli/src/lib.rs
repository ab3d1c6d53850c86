//! The `clockham` command line: compile circuits to clock Hamiltonians, audit
//! them and report the results as canonical JSON.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 construction validation
//! error, 3 at least one check failed.

pub mod bundle_file;
pub mod report;
pub mod witness;

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, CommandFactory, Parser, Subcommand};
use clockham_core::circuit::format_complex;
use clockham_core::verify::{check_history, gap_report, Check, Expectation, SolverChoice};
use clockham_core::{build, parse_circuit, run_audit, AuditOptions, AuditReport, Circuit, ConstructionKind, HamiltonianBundle};
use sha2::{Digest, Sha256};
use thiserror::Error;

use bundle_file::BundleFile;
use report::{to_canonical_json, DefinitionConstants, GroupEnergy, HistorySummary, ReportDocument, SpectrumDocument};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VALIDATION: i32 = 2;
pub const EXIT_CHECK_FAILED: i32 = 3;

pub const TOOL: &str = "clockham";
pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => EXIT_USAGE,
            CliError::Validation(_) => EXIT_VALIDATION,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "clockham", version, about = "Compile verifier circuits to clock Hamiltonians and audit them")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct CircuitArgs {
    /// Circuit file.
    circuit: PathBuf,
    /// Construction: bravyi, qutrit or threelocal.
    #[arg(long, value_parser = parse_kind)]
    kind: ConstructionKind,
}

#[derive(Debug, Args)]
struct SolverArgs {
    /// Seed for the iterative solver and random sampling.
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Diagonalize densely regardless of dimension.
    #[arg(long)]
    force_dense: bool,
}

impl SolverArgs {
    fn choice(&self) -> SolverChoice {
        if self.force_dense {
            SolverChoice::Dense
        } else {
            SolverChoice::Auto
        }
    }
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write the interaction terms of the construction to a bundle file.
    Compile {
        #[command(flatten)]
        input: CircuitArgs,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the audit suite and print a report.
    Verify {
        #[command(flatten)]
        input: CircuitArgs,
        /// Comma-separated subset of history, invariance, restriction, spectra, gap, norms.
        #[arg(long, value_delimiter = ',', value_parser = parse_check)]
        checks: Vec<Check>,
        #[command(flatten)]
        solver: SolverArgs,
        /// Witness as `basis:<bits>` or a file of amplitudes; defaults to the best basis state.
        #[arg(long)]
        witness: Option<String>,
        /// Whether the instance should be accepted (yes) or rejected (no).
        #[arg(long, value_parser = parse_expectation)]
        expect: Option<Expectation>,
        /// Largest gate count in the norm-scaling table.
        #[arg(long, default_value_t = 6)]
        norm_max_gates: usize,
        /// Record wall-clock time per check (makes the report run-dependent).
        #[arg(long)]
        timings: bool,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the history state of a witness and report its energies.
    History {
        #[command(flatten)]
        input: CircuitArgs,
        /// Witness as `basis:<bits>` or a file of amplitudes.
        #[arg(long)]
        witness: String,
        /// Where to write the state amplitudes.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lowest eigenvalues of the full operator and of its legal restriction.
    Spectrum {
        #[command(flatten)]
        input: CircuitArgs,
        #[command(flatten)]
        solver: SolverArgs,
        /// Number of eigenvalues listed.
        #[arg(long, default_value_t = 10)]
        count: usize,
        /// Output path; standard output when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn parse_kind(s: &str) -> Result<ConstructionKind, String> {
    match s.parse::<ConstructionKind>()? {
        ConstructionKind::Reference => Err("the reference kind cannot be compiled".to_string()),
        kind => Ok(kind),
    }
}

fn parse_check(s: &str) -> Result<Check, String> {
    s.parse()
}

fn parse_expectation(s: &str) -> Result<Expectation, String> {
    match s {
        "yes" => Ok(Expectation::Yes),
        "no" => Ok(Expectation::No),
        _ => Err(format!("expected yes or no, got {s:?}")),
    }
}

/// Runs the command line and returns the process exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return if e.use_stderr() {
                let _ = write!(stderr, "{text}");
                if !text.contains("Usage:") {
                    let _ = writeln!(stderr, "\n{}", usage_for(&args));
                }
                EXIT_USAGE
            } else {
                let _ = write!(stdout, "{text}");
                EXIT_OK
            };
        }
    };
    match execute(cli.command, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            e.exit_code()
        }
    }
}

/// Usage of the subcommand named in `args`, or of the whole tool.
fn usage_for(args: &[OsString]) -> String {
    let mut command = Cli::command();
    command.build();
    let sub = args.get(1).and_then(|a| a.to_str());
    match sub.and_then(|name| command.find_subcommand_mut(name)) {
        Some(sub) => sub.render_usage().to_string(),
        None => command.render_usage().to_string(),
    }
}

struct Loaded {
    circuit: Circuit,
    bundle: HamiltonianBundle,
    file_digest: String,
}

fn load(input: &CircuitArgs) -> Result<Loaded, CliError> {
    let path = &input.circuit;
    let bytes = std::fs::read(path).map_err(|e| CliError::Input(format!("cannot read {}: {e}", path.display())))?;
    let text = String::from_utf8(bytes.clone())
        .map_err(|_| CliError::Input(format!("{} is not UTF-8 text", path.display())))?;
    let circuit = parse_circuit(&text).map_err(|e| CliError::Input(format!("{}: {e}", path.display())))?;
    let bundle = build(input.kind, &circuit).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))?;
    Ok(Loaded { circuit, bundle, file_digest: hex::encode(Sha256::digest(&bytes)) })
}

fn emit(text: &str, out: Option<&Path>, stdout: &mut dyn Write) -> Result<(), CliError> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| CliError::Input(format!("cannot write {}: {e}", path.display())))
        }
        None => stdout.write_all(text.as_bytes()).map_err(|e| CliError::Input(format!("cannot write output: {e}"))),
    }
}

fn execute(command: Command, stdout: &mut dyn Write) -> Result<i32, CliError> {
    match command {
        Command::Compile { input, out } => {
            let loaded = load(&input)?;
            let file = BundleFile::from_bundle(&loaded.bundle, &loaded.file_digest);
            emit(&file.to_text(), out.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
        Command::Verify { input, checks, solver, witness, expect, norm_max_gates, timings, out } => {
            let loaded = load(&input)?;
            let witness = witness
                .map(|spec| witness::parse_witness(&spec, loaded.circuit.n_input()))
                .transpose()
                .map_err(CliError::Input)?;
            let options = AuditOptions {
                checks: if checks.is_empty() { Check::ALL.to_vec() } else { checks },
                witness,
                expect,
                seed: solver.seed,
                solver: solver.choice(),
                norm_max_gates,
            };
            let (report, elapsed) = timed_audit(&loaded.bundle, &options);
            let document = ReportDocument {
                tool: TOOL.to_string(),
                version: VERSION.to_string(),
                kind: input.kind,
                circuit_file_digest: loaded.file_digest,
                solver: options.solver,
                seed: options.seed,
                constants: DefinitionConstants::default(),
                all_pass: report.all_pass(),
                report,
                timings: timings.then_some(elapsed),
            };
            emit(&to_canonical_json(&document), out.as_deref(), stdout)?;
            Ok(if document.all_pass { EXIT_OK } else { EXIT_CHECK_FAILED })
        }
        Command::History { input, witness, out } => {
            let loaded = load(&input)?;
            let witness = witness::parse_witness(&witness, loaded.circuit.n_input()).map_err(CliError::Input)?;
            let bundle = &loaded.bundle;
            let energies = check_history(bundle, &witness).map_err(|e| CliError::Input(e.to_string()))?;
            if let Some(path) = out.as_deref() {
                emit(&state_text(bundle, energies.state.amplitudes()), Some(path), stdout)?;
            }
            let summary = HistorySummary {
                tool: TOOL.to_string(),
                version: VERSION.to_string(),
                kind: input.kind,
                circuit_file_digest: loaded.file_digest,
                dimension: bundle.shape.total_dim(),
                norm: energies.state.norm(),
                total_energy: energies.total,
                max_term_energy: energies.per_term.iter().map(|e| e.abs()).fold(0.0, f64::max),
                groups: bundle
                    .groups
                    .iter()
                    .zip(&energies.per_group)
                    .map(|(g, &energy)| GroupEnergy { family: g.family.to_string(), site: g.site, energy })
                    .collect(),
            };
            emit(&to_canonical_json(&summary), None, stdout)?;
            Ok(EXIT_OK)
        }
        Command::Spectrum { input, solver, count, out } => {
            let loaded = load(&input)?;
            let mut gap = gap_report(&loaded.bundle, solver.choice(), solver.seed)
                .map_err(|e| CliError::Input(e.to_string()))?;
            gap.values.truncate(count);
            let document = SpectrumDocument {
                tool: TOOL.to_string(),
                version: VERSION.to_string(),
                kind: input.kind,
                circuit_file_digest: loaded.file_digest,
                dimension: loaded.bundle.shape.total_dim(),
                gap,
            };
            emit(&to_canonical_json(&document), out.as_deref(), stdout)?;
            Ok(EXIT_OK)
        }
    }
}

/// Runs each selected check on its own so it can be timed, then merges the
/// per-check reports in canonical order.
fn timed_audit(bundle: &HamiltonianBundle, options: &AuditOptions) -> (AuditReport, BTreeMap<String, f64>) {
    let mut selected = options.checks.clone();
    selected.sort();
    selected.dedup();
    let mut merged: Option<AuditReport> = None;
    let mut elapsed = BTreeMap::new();
    for check in selected {
        let single = AuditOptions { checks: vec![check], ..options.clone() };
        let start = Instant::now();
        let report = run_audit(bundle, &single);
        elapsed.insert(check.to_string(), start.elapsed().as_secs_f64());
        match merged.as_mut() {
            None => merged = Some(report),
            Some(m) => {
                // witness failures are reported once
                m.checks.extend(report.checks.into_iter().filter(|c| c.name != "witness"));
                m.scalars.extend(report.scalars);
                for note in report.notes {
                    if !m.notes.contains(&note) {
                        m.notes.push(note);
                    }
                }
            }
        }
    }
    (merged.expect("at least one check is selected"), elapsed)
}

/// Header plus one `index amplitude` line per basis state.
fn state_text(bundle: &HamiltonianBundle, amplitudes: &[clockham_core::C64]) -> String {
    let dims: Vec<String> = bundle.shape.dims().iter().map(usize::to_string).collect();
    let mut out = String::new();
    writeln!(out, "clockham-state 1").unwrap();
    writeln!(out, "kind {}", bundle.kind()).unwrap();
    writeln!(out, "shape {}", dims.join(" ")).unwrap();
    writeln!(out, "total_dim {}", amplitudes.len()).unwrap();
    for (i, z) in amplitudes.iter().enumerate() {
        writeln!(out, "{i} {}", format_complex(*z)).unwrap();
    }
    out
}
