//! `indfree`: build arrangements, compute their lattices and Poincaré
//! polynomials, and check or search for induction tables.
//!
//! Exit status: 0 verified/true, 1 refuted/false, 2 undecided within the
//! budget, 3 usage error, 4 unreadable or malformed input.

mod report;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

use indfree::catalog::{self, CatalogError, GroupDescriptor};
use indfree::format::{ArrangementFile, TableFile};
use indfree::freeness::{
    check_hif, replay_certificate, FreenessVerdict, HifMode, HifVerdict, SearchConfig,
    SearchEngine,
};
use indfree::lattice::{exponents_from_factorization, intersection_lattice, poincare_polynomial};
use indfree::syntax::ParseError;
use indfree::Arrangement;

use report::Output;

#[derive(Parser)]
#[command(name = "indfree", version, about = "Inductive freeness of hyperplane arrangements")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand)]
enum Command {
    /// Write an arrangement file.
    Build {
        /// Catalog id (braid:4, full:3,2, rr:3,3, table:g26, ...) or file.
        src: String,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Intersection lattice sizes and Möbius sums by codimension.
    Lattice { src: String },
    /// Poincaré polynomial and its factorization.
    Charpoly { src: String },
    /// Search for an induction table.
    CheckIf {
        src: String,
        /// Maximum number of search nodes.
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Write the induction table found to this file.
        #[arg(long)]
        emit_table: Option<PathBuf>,
    },
    /// Check inductive freeness of every restriction A^X.
    CheckHif {
        src: String,
        #[arg(long)]
        budget: Option<u64>,
        #[arg(long, default_value_t = 1)]
        threads: usize,
        /// Search every restriction instead of using the low-dimension
        /// shortcuts.
        #[arg(long)]
        direct: bool,
    },
    /// Replay an induction table against an arrangement.
    VerifyTable { src: String, table: PathBuf },
    /// Classify a reflection group (G(3,3,3), G31, B4 x G26, ...).
    Classify { descriptor: String },
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("{path}: {source}")]
    Parse { path: String, source: ParseError },
}

impl From<CatalogError> for CliError {
    fn from(e: CatalogError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 3,
            CliError::Io { .. } | CliError::Parse { .. } => 4,
        }
    }
}

/// Outcome of a command, mapped onto the exit status.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Status {
    Verified,
    Refuted,
    Undecided,
}

impl Status {
    fn code(self) -> u8 {
        match self {
            Status::Verified => 0,
            Status::Refuted => 1,
            Status::Undecided => 2,
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn load(src: &str) -> Result<Arrangement, CliError> {
    let path = Path::new(src);
    if path.is_file() {
        let text = read(path)?;
        return ArrangementFile::parse(&text)
            .map(|f| f.arrangement)
            .map_err(|source| CliError::Parse {
                path: src.to_string(),
                source,
            });
    }
    catalog::resolve(src).map_err(|e| match e {
        CatalogError::UnknownName(_) => {
            CliError::Usage(format!("'{src}' is neither a file nor a catalog id"))
        }
        other => other.into(),
    })
}

fn engine(budget: Option<u64>, threads: usize) -> SearchEngine {
    SearchEngine::new(SearchConfig {
        budget,
        threads: threads.max(1),
        ..SearchConfig::default()
    })
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn run(command: Command, out: &mut Output) -> Result<Status, CliError> {
    match command {
        Command::Build { src, out: target } => {
            let a = load(&src)?;
            let text = ArrangementFile::new(a.clone()).write();
            match &target {
                Some(path) => write_file(path, &text)?,
                None if out.is_json() => {}
                None => out.raw(&text),
            }
            out.build(&a, target.as_deref());
            Ok(Status::Verified)
        }
        Command::Lattice { src } => {
            let a = load(&src)?;
            out.lattice(&a, &intersection_lattice(&a));
            Ok(Status::Verified)
        }
        Command::Charpoly { src } => {
            let a = load(&src)?;
            let poly = poincare_polynomial(&a);
            let exps = exponents_from_factorization(&poly, a.dim());
            out.charpoly(&poly, exps.as_ref());
            Ok(if exps.is_some() {
                Status::Verified
            } else {
                Status::Refuted
            })
        }
        Command::CheckIf {
            src,
            budget,
            threads,
            emit_table,
        } => {
            let a = load(&src)?;
            let engine = engine(budget, threads);
            let verdict = engine.search(&a);
            if let (Some(path), Some(cert)) = (&emit_table, verdict.certificate()) {
                write_file(path, &TableFile::from_certificate(cert).write())?;
            }
            out.check_if(&a, &verdict);
            Ok(match verdict {
                FreenessVerdict::InductivelyFree(_) => Status::Verified,
                FreenessVerdict::Unknown { .. } => Status::Undecided,
                _ => Status::Refuted,
            })
        }
        Command::CheckHif {
            src,
            budget,
            threads,
            direct,
        } => {
            let a = load(&src)?;
            let engine = engine(budget, threads);
            let mode = if direct {
                HifMode::Direct
            } else {
                HifMode::Shortcuts
            };
            let report = check_hif(&a, &engine, mode);
            out.check_hif(&report);
            Ok(match report.verdict {
                HifVerdict::HereditarilyInductivelyFree => Status::Verified,
                HifVerdict::NotHereditarilyInductivelyFree => Status::Refuted,
                HifVerdict::Unknown => Status::Undecided,
            })
        }
        Command::VerifyTable { src, table } => {
            let a = load(&src)?;
            let text = read(&table)?;
            let file = TableFile::parse(&text, Some((a.dim(), a.order()))).map_err(|source| {
                CliError::Parse {
                    path: table.display().to_string(),
                    source,
                }
            })?;
            if (file.dim, file.order) != (a.dim(), a.order()) {
                return Err(CliError::Usage(format!(
                    "table is for dimension {} over order {}, arrangement has dimension {} over order {}",
                    file.dim,
                    file.order,
                    a.dim(),
                    a.order()
                )));
            }
            let engine = SearchEngine::default();
            match replay_certificate(&a, &file.certificate(), &engine) {
                Ok(replay) => {
                    let mismatch = replay
                        .rows
                        .iter()
                        .zip(&file.rows)
                        .enumerate()
                        .find(|(_, (row, listed))| {
                            listed
                                .deleted_exponents
                                .as_ref()
                                .is_some_and(|d| *d != row.deleted_exponents)
                        })
                        .map(|(i, (row, listed))| {
                            (i + 1, listed.deleted_exponents.clone().unwrap(), row.deleted_exponents.clone())
                        });
                    out.verify_table(&replay, mismatch.as_ref());
                    Ok(if mismatch.is_none() {
                        Status::Verified
                    } else {
                        Status::Refuted
                    })
                }
                Err(e) => {
                    out.replay_failure(&e);
                    Ok(Status::Refuted)
                }
            }
        }
        Command::Classify { descriptor } => {
            let g: GroupDescriptor = descriptor.parse()?;
            let c = catalog::classify(&g);
            out.classify(&g, &c, catalog::exponents_formula(&g).ok().as_ref());
            Ok(if c.inductively_free {
                Status::Verified
            } else {
                Status::Refuted
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 3 } else { 0 });
        }
    };
    let mut out = Output::new(cli.format == Format::Json);
    match run(cli.command, &mut out) {
        Ok(status) => {
            out.finish();
            ExitCode::from(status.code())
        }
        Err(e) => {
            if out.is_json() {
                println!("{}", serde_json::json!({ "error": e.to_string(), "exit": e.exit_code() }));
            } else {
                eprintln!("error: {e}");
            }
            ExitCode::from(e.exit_code())
        }
    }
}
