//! `ncg-hodge`: checks and analyses finite real spectral triples stored as
//! JSON, builds Standard Model triples, and runs the classification scan.
//!
//! Exit status is 0 on success, 2 when a triple fails an axiom or a scan
//! finds a disagreement, and 1 on any operational error.

mod analyze;
mod scan;
mod sm;

use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use ncg_hodge::io::{self, TripleFile};
use ncg_hodge::{RealSpectralTriple, Tolerance};

#[derive(Parser, Debug)]
#[command(
    name = "ncg-hodge",
    version,
    about = "Finite real spectral triples: axioms, 2nd order and Hodge checks"
)]
struct Cli {
    #[command(flatten)]
    tol: TolArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone, Copy)]
struct TolArgs {
    /// Relative tolerance for every numerical decision.
    #[arg(long = "tol", global = true, env = "NCG_HODGE_TOL", value_name = "REL")]
    rel: Option<f64>,
    /// Absolute floor under the relative tolerance.
    #[arg(
        long = "tol-floor",
        global = true,
        env = "NCG_HODGE_TOL_FLOOR",
        value_name = "ABS"
    )]
    floor: Option<f64>,
}

impl TolArgs {
    fn resolve(self) -> Result<Tolerance> {
        let d = Tolerance::default();
        Ok(Tolerance::new(
            self.rel.unwrap_or(d.rel),
            self.floor.unwrap_or(d.abs_floor),
        )?)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check the axioms of a triple file.
    Check {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Full analysis: algebras, Wedderburn blocks, order conditions, Hodge.
    Analyze {
        file: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Standard Model internal triples.
    #[command(subcommand)]
    Sm(sm::SmCommand),
    /// Compare engine and closed-form Hodge verdicts on random parameters.
    Scan(scan::ScanArgs),
}

/// Result of a command that ran to completion.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Success,
    Failure,
}

impl Verdict {
    pub fn from_ok(ok: bool) -> Self {
        if ok {
            Verdict::Success
        } else {
            Verdict::Failure
        }
    }
}

pub fn load_triple(path: &Path, tol: &Tolerance) -> Result<RealSpectralTriple> {
    let file: TripleFile = io::read_file(path)?;
    file.to_triple(tol)
        .with_context(|| format!("{}: invalid triple", path.display()))
}

/// Writes `text` to `out`, or stdout when `out` is `None`.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("writing {}", p.display())),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
            Ok(())
        }
    }
}

fn run(cli: Cli) -> Result<Verdict> {
    let tol = cli.tol.resolve()?;
    match cli.command {
        Command::Check { file, json } => analyze::check(&file, &tol, json),
        Command::Analyze { file, json } => analyze::analyze(&file, &tol, json),
        Command::Sm(cmd) => sm::run(cmd, &tol),
        Command::Scan(args) => scan::run(&args, &tol),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(Verdict::Success) => ExitCode::SUCCESS,
        Ok(Verdict::Failure) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
