//! Command-line front end: `validate`, `analyze` and `index`.

pub mod format;
pub mod random;
pub mod report;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Args, Parser, Subcommand};
use thiserror::Error;

use crate::conley::{conley_index, ConleyError, IsolationFailure};
use crate::mvf::MultivectorField;
use crate::space::FiniteSpace;

pub use format::ParseError;
pub use random::{random_field, random_space};
pub use report::{analyze, Analysis, AnalysisReport};

/// Size bias used when a field is generated from `--seed`.
pub const DEFAULT_BIAS: f64 = 0.5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{}: {message}", .path.display())]
    Io { path: PathBuf, message: String },
    #[error("{}: {source}", .path.display())]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Validation(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io { .. } | CliError::Parse { .. } => 2,
            CliError::Validation(_) => 3,
            CliError::Internal(_) => 4,
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "cmvf", version, about = "Conley-Morse analysis of combinatorial multivector fields")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that the field is a partition into locally closed multivectors.
    Validate(Input),
    /// Run the full analysis and print a JSON report.
    Analyze {
        #[command(flatten)]
        input: Input,
        /// Write the JSON report here instead of stdout.
        #[arg(long, value_name = "PATH")]
        json: Option<PathBuf>,
        /// Write the Conley-Morse graph in Graphviz format.
        #[arg(long, value_name = "PATH")]
        dot: Option<PathBuf>,
    },
    /// Conley index of an isolated invariant set.
    Index {
        #[command(flatten)]
        input: Input,
        /// Comma-separated cell names; empty for the empty set.
        #[arg(long, value_delimiter = ',', num_args = 0..)]
        cells: Vec<String>,
    },
}

#[derive(Debug, Args)]
pub struct Input {
    /// Space file (poset format unless --simplicial).
    #[arg(long, value_name = "PATH")]
    space: PathBuf,
    /// The space file lists simplices.
    #[arg(long)]
    simplicial: bool,
    /// Multivector field file.
    #[arg(long, value_name = "PATH", required_unless_present = "seed", conflicts_with = "seed")]
    mvf: Option<PathBuf>,
    /// Generate a random field with this seed instead of reading one.
    #[arg(long, value_name = "N")]
    seed: Option<u64>,
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Io { path: path.into(), message: e.to_string() })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io { path: path.into(), message: e.to_string() })
}

pub fn load_space(path: &Path, simplicial: bool) -> Result<Arc<FiniteSpace>, CliError> {
    let text = read(path)?;
    let parsed = if simplicial { format::parse_simplicial(&text) } else { format::parse_poset(&text) };
    parsed.map(Arc::new).map_err(|source| CliError::Parse { path: path.into(), source })
}

pub fn load_field(space: Arc<FiniteSpace>, path: &Path) -> Result<MultivectorField, CliError> {
    let text = read(path)?;
    format::parse_field(space, &text)
        .map_err(|source| CliError::Parse { path: path.into(), source })?
        .map_err(|e| CliError::Validation(e.to_string()))
}

fn load(input: &Input) -> Result<MultivectorField, CliError> {
    let space = load_space(&input.space, input.simplicial)?;
    match (&input.mvf, input.seed) {
        (Some(path), _) => load_field(space, path),
        (None, Some(seed)) => Ok(random_field(space, seed, DEFAULT_BIAS)),
        (None, None) => Err(CliError::Usage("either --mvf or --seed is required".into())),
    }
}

/// `valid: <cells> cells, <multivectors> multivectors, <critical> critical`
pub fn validation_summary(field: &MultivectorField) -> String {
    format!("valid: {} cells, {} multivectors, {} critical", field.space().len(), field.len(), field.critical_count())
}

pub fn describe_failure(space: &FiniteSpace, failure: &IsolationFailure) -> String {
    match failure {
        IsolationFailure::NotVCompatible { cell } => {
            format!("not V-compatible: the multivector of {} is not contained in the set", space.name(*cell))
        }
        IsolationFailure::NotLocallyClosed { lower, middle, upper } => format!(
            "not locally closed: {} < {} < {} with {} missing",
            space.name(*lower),
            space.name(*middle),
            space.name(*upper),
            space.name(*middle)
        ),
        IsolationFailure::NotInvariant { outside_inv } => format!(
            "not invariant: no essential solution inside the set through {}",
            space.names(outside_inv).join(", ")
        ),
    }
}

/// Signature and polynomial of `Con(S)` as printed by `cmvf index`.
pub fn index_text(field: &MultivectorField, cells: &[String]) -> Result<String, CliError> {
    let space = field.space();
    let set = space.set_from_names(cells).map_err(|e| CliError::Validation(e.to_string()))?;
    let index = conley_index(field, &set).map_err(|e| match e {
        ConleyError::NotIsolatedInvariant(f) => {
            CliError::Validation(format!("not an isolated invariant set: {}", describe_failure(space, &f)))
        }
        other => CliError::Internal(other.to_string()),
    })?;
    Ok(format!(
        "betti: {:?}\ntorsion: {:?}\npolynomial: {}\n",
        index.signature.betti, index.signature.torsion, index.polynomial
    ))
}

fn execute(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<(), CliError> {
    let emit =
        |out: &mut dyn Write, text: &str| out.write_all(text.as_bytes()).map_err(|e| CliError::Internal(e.to_string()));
    match cli.command {
        Command::Validate(input) => {
            let field = load(&input)?;
            emit(out, &(validation_summary(&field) + "\n"))
        }
        Command::Analyze { input, json, dot } => {
            let field = load(&input)?;
            let analysis = analyze(&field).map_err(|e| CliError::Internal(e.to_string()))?;
            let r = &analysis.report.invariant_restriction;
            if r.rounds > 0 {
                let note = format!(
                    "note: analysis restricted to the invariant part ({} cells removed in {} rounds)\n",
                    r.removed.len(),
                    r.rounds
                );
                let _ = err.write_all(note.as_bytes());
            }
            if let Some(path) = dot {
                write(&path, &analysis.dot)?;
            }
            let text = analysis.report.to_json();
            match json {
                Some(path) => write(&path, &text),
                None => emit(out, &text),
            }
        }
        Command::Index { input, cells } => {
            let field = load(&input)?;
            let cells: Vec<String> =
                cells.into_iter().map(|c| c.trim().to_string()).filter(|c| !c.is_empty()).collect();
            emit(out, &index_text(&field, &cells)?)
        }
    }
}

/// Runs the CLI and returns the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{e}");
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    match execute(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
