use std::fmt::Write as _;
use std::path::PathBuf;

use anyhow::Result;
use clap::Args;
use ncg_hodge::io;
use ncg_hodge::scan::{
    run_scan_with, ScanCase, ScanConfig, ScanReport, DEFAULT_DEGENERATE_FRACTION,
};
use ncg_hodge::Tolerance;

use crate::{emit, Verdict};

#[derive(Args, Debug)]
pub struct ScanArgs {
    /// 1, 2, 3, 4 or all (cycles through the four cases).
    #[arg(long, default_value = "all")]
    case: ScanCase,
    #[arg(long, default_value_t = 100)]
    samples: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Probability of forcing a degeneracy that makes the Hodge property fail.
    #[arg(long, default_value_t = DEFAULT_DEGENERATE_FRACTION)]
    degenerate_fraction: f64,
    /// Print the report as JSON.
    #[arg(long)]
    json: bool,
    /// Also write the JSON report here.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// One line per sample on stderr.
    #[arg(long)]
    progress: bool,
}

pub fn run(args: &ScanArgs, tol: &Tolerance) -> Result<Verdict> {
    let config = ScanConfig {
        case: args.case,
        samples: args.samples,
        seed: args.seed,
        degenerate_fraction: args.degenerate_fraction,
        tolerance: *tol,
    };
    let run = run_scan_with(&config, |o| {
        if args.progress {
            eprintln!(
                "sample {:>5}  case {}  closed {:<5}  engine {:<5}  {}",
                o.index,
                o.case,
                o.closed_form.map_or("-".to_string(), |v| v.to_string()),
                o.engine,
                if o.agrees { "ok" } else { "DISAGREE" }
            );
        }
    })?;
    let report = &run.report;
    let json = io::to_json(report);
    if let Some(path) = &args.out {
        emit(Some(path), &json)?;
    }
    if args.json {
        emit(None, &json)?;
    } else {
        emit(None, &summary(report)?)?;
    }
    Ok(Verdict::from_ok(report.hodge_agrees()))
}

fn tally_line(s: &mut String, name: &str, passed: usize, failed: &[usize]) -> std::fmt::Result {
    write!(s, "{name:<16} {passed}/{}", passed + failed.len())?;
    if !failed.is_empty() {
        let shown: Vec<String> = failed.iter().take(10).map(|i| i.to_string()).collect();
        write!(s, "  failing samples {}", shown.join(" "))?;
        if failed.len() > 10 {
            write!(s, " ...")?;
        }
    }
    writeln!(s)
}

fn summary(r: &ScanReport) -> Result<String> {
    let mut s = String::new();
    writeln!(
        s,
        "scan case {}, {} samples, seed {}, degenerate fraction {}",
        r.case, r.samples, r.seed, r.degenerate_fraction
    )?;
    writeln!(s, "Hodge agreement  {}/{}", r.agreements, r.samples)?;
    writeln!(
        s,
        "closed form      {} true, {} false ({} forced degenerate)",
        r.closed_form_true, r.closed_form_false, r.forced_degenerate
    )?;
    tally_line(
        &mut s,
        "2nd order",
        r.second_order.passed,
        &r.second_order.failed,
    )?;
    tally_line(
        &mut s,
        "decomposition",
        r.decomposition.passed,
        &r.decomposition.failed,
    )?;
    writeln!(
        s,
        "                 max residual {:.3e} (bound {:e})",
        r.max_decomposition_residual, r.identity_bound
    )?;
    tally_line(&mut s, "Clifford", r.clifford.passed, &r.clifford.failed)?;
    for d in &r.disagreements {
        writeln!(
            s,
            "disagreement: sample {} (seed {:#018x}, case {}): engine {}, closed form {}{}",
            d.index,
            d.sample_seed,
            d.case,
            d.engine_verdict,
            d.closed_form_verdict
                .map_or("none".to_string(), |v| v.to_string()),
            d.note
                .as_deref()
                .map_or(String::new(), |n| format!(" ({n})"))
        )?;
    }
    writeln!(
        s,
        "tolerance: rel {:e}, floor {:e}",
        r.tolerance.rel, r.tolerance.abs_floor
    )?;
    writeln!(s, "time {:.1} s", r.timing_seconds)?;
    Ok(s)
}
