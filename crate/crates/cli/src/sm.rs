use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::Subcommand;
use ncg_hodge::io::{self, SmParamsFile, TripleFile, SCHEMA_VERSION};
use ncg_hodge::linalg::{c64, identity, C64};
use ncg_hodge::sm::{
    cc_params_blocks, classify_cases, hodge_closed_detail, second_order_closed, sm_build,
    sm_complex_algebra, SmDiracParams,
};
use ncg_hodge::{Tolerance, TripleAnalysis};
use serde::Serialize;

use crate::{emit, Verdict};

#[derive(Subcommand, Debug)]
pub enum SmCommand {
    /// Write the triple for a parameter file.
    Build {
        params: PathBuf,
        /// Output file; stdout when omitted.
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
    /// Closed-form case analysis with engine cross-check.
    Classify {
        params: PathBuf,
        #[arg(long)]
        json: bool,
        /// Skip the engine Hodge computation.
        #[arg(long)]
        no_hodge: bool,
    },
    /// Diagonal Yukawa parameters. Values are `re` or `re,im`.
    Cc {
        /// Neutrino Yukawa
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        yn: C64,
        /// Electron Yukawa
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        ye: C64,
        /// Up-quark Yukawa
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        yu: C64,
        /// Down-quark Yukawa
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true)]
        yd: C64,
        /// Majorana mass
        #[arg(long, value_parser = parse_complex, allow_hyphen_values = true, default_value = "0")]
        yr: C64,
        /// Each coupling becomes a multiple of the identity on this many
        /// generations.
        #[arg(long, default_value_t = 1)]
        generations: usize,
        /// Write here instead of stdout
        #[arg(long, short)]
        out: Option<PathBuf>,
    },
}

pub fn parse_complex(s: &str) -> Result<C64, String> {
    let parse = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|e| format!("{t:?} is not a number: {e}"))
    };
    let z = match s.split_once(',') {
        Some((re, im)) => c64(parse(re)?, parse(im)?),
        None => c64(parse(s)?, 0.0),
    };
    if z.re.is_finite() && z.im.is_finite() {
        Ok(z)
    } else {
        Err(format!("{s:?} is not finite"))
    }
}

fn load_params(path: &Path) -> Result<SmDiracParams> {
    let file: SmParamsFile = io::read_file(path)?;
    file.to_params()
        .with_context(|| format!("{}: invalid parameters", path.display()))
}

pub fn run(cmd: SmCommand, tol: &Tolerance) -> Result<Verdict> {
    match cmd {
        SmCommand::Build { params, out } => {
            let p = load_params(&params)?;
            let sm = sm_build(&p, tol)?;
            emit(
                out.as_deref(),
                &io::to_json(&TripleFile::from_triple(sm.triple())),
            )?;
            Ok(Verdict::Success)
        }
        SmCommand::Classify {
            params,
            json,
            no_hodge,
        } => classify(&params, tol, json, !no_hodge),
        SmCommand::Cc {
            yn,
            ye,
            yu,
            yd,
            yr,
            generations,
            out,
        } => {
            if generations == 0 {
                bail!("generations must be at least 1");
            }
            let id = identity(generations);
            let m = |z: C64| id.map(|x| x * z);
            let p = cc_params_blocks(&m(yn), &m(ye), &m(yu), &m(yd), &m(yr))?;
            emit(out.as_deref(), &io::to_json(&SmParamsFile::from_params(&p)))?;
            Ok(Verdict::Success)
        }
    }
}

#[derive(Serialize)]
struct ClassifyJson {
    schema_version: &'static str,
    generations: usize,
    cases: Vec<u8>,
    second_order_closed: bool,
    second_order_engine: bool,
    second_order_residual: f64,
    /// `(case, verdict)` per applicable theorem; absent for several
    /// generations.
    hodge_closed: Option<Vec<(u8, bool)>>,
    hodge_closed_note: Option<String>,
    hodge_engine: Option<bool>,
    agree: bool,
    warnings: Vec<String>,
    tolerance: Tolerance,
}

fn classify(path: &Path, tol: &Tolerance, json: bool, with_hodge: bool) -> Result<Verdict> {
    let p = load_params(path)?;
    let n = p.generations();
    let cases = classify_cases(&p, tol)?;
    let closed2 = second_order_closed(&p, tol)?;
    let (hodge_closed, note) = if n == 1 {
        match hodge_closed_detail(&p, tol) {
            Ok(h) => (Some(h.by_case), None),
            Err(e) => (None, Some(e.to_string())),
        }
    } else {
        (None, Some("no closed form for several generations".into()))
    };

    let sm = sm_build(&p, tol)?;
    let algebra = sm_complex_algebra(n, tol)?;
    let an = TripleAnalysis::with_algebra(sm.triple(), algebra, tol)?;
    let second = an.second_order().context("engine 2nd order")?;
    let hodge_engine = if with_hodge {
        Some(an.hodge().context("engine Hodge")?.holds)
    } else {
        None
    };
    let warnings = an.validate().warnings;

    let closed_verdict = hodge_closed
        .as_ref()
        .and_then(|v| v.first().map(|&(_, h)| h));
    let hodge_agree = match (closed_verdict, hodge_engine) {
        (Some(c), Some(e)) => c == e,
        _ => true,
    };
    let conflict = n == 1 && hodge_closed.is_none();
    let agree = closed2 == second.holds && hodge_agree && !conflict;

    let out = ClassifyJson {
        schema_version: SCHEMA_VERSION,
        generations: n,
        cases: cases.iter().collect(),
        second_order_closed: closed2,
        second_order_engine: second.holds,
        second_order_residual: second.residual,
        hodge_closed,
        hodge_closed_note: note,
        hodge_engine,
        agree,
        warnings,
        tolerance: *tol,
    };
    let text = if json {
        io::to_json(&out)
    } else {
        render(&out, &cases.to_string())?
    };
    emit(None, &text)?;
    Ok(Verdict::from_ok(agree))
}

fn render(c: &ClassifyJson, cases: &str) -> Result<String> {
    let b = |x: bool| if x { "true" } else { "false" };
    let mut s = String::new();
    writeln!(s, "generations: {}", c.generations)?;
    writeln!(s, "cases: {cases}")?;
    writeln!(
        s,
        "2nd order: closed form {}, engine {} (residual {:.3e})",
        b(c.second_order_closed),
        b(c.second_order_engine),
        c.second_order_residual
    )?;
    let closed = match (&c.hodge_closed, &c.hodge_closed_note) {
        (Some(v), _) if v.is_empty() => "no closed form".to_string(),
        (Some(v), _) => {
            let per: Vec<String> = v
                .iter()
                .map(|(k, h)| format!("case {k}: {}", b(*h)))
                .collect();
            format!("closed form {} ({})", b(v[0].1), per.join(", "))
        }
        (None, Some(note)) => format!("closed form unavailable: {note}"),
        (None, None) => "no closed form".to_string(),
    };
    let engine = match c.hodge_engine {
        Some(h) => format!("engine {}", b(h)),
        None => "engine skipped".to_string(),
    };
    writeln!(s, "Hodge: {closed}; {engine}")?;
    for w in &c.warnings {
        writeln!(s, "warning: {w}")?;
    }
    writeln!(
        s,
        "{}",
        if c.agree {
            "closed form and engine agree"
        } else {
            "closed form and engine DISAGREE"
        }
    )?;
    Ok(s)
}
