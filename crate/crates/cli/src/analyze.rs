use std::fmt::Write as _;
use std::path::Path;

use anyhow::{Context, Result};
use ncg_hodge::algebra::{wedderburn, StarAlgebra};
use ncg_hodge::io::{self, SCHEMA_VERSION};
use ncg_hodge::linalg::norm;
use ncg_hodge::triple::{complex_algebra, ValidationReport};
use ncg_hodge::{Tolerance, TripleAnalysis};
use serde::Serialize;

use crate::{emit, load_triple, Verdict};

const WEDDERBURN_SEED: u64 = 0x0a11_7e5e_ed00_0001;

#[derive(Serialize)]
struct CheckJson<'a> {
    schema_version: &'static str,
    file: String,
    passed: bool,
    checks: Vec<CheckLine<'a>>,
    warnings: &'a [String],
    tolerance: Tolerance,
}

#[derive(Serialize)]
struct CheckLine<'a> {
    name: &'a str,
    passed: bool,
    residual: f64,
    threshold: f64,
}

fn check_lines(report: &ValidationReport) -> Vec<CheckLine<'_>> {
    report
        .checks
        .iter()
        .map(|c| CheckLine {
            name: c.name,
            passed: c.passed,
            residual: c.residual,
            threshold: c.threshold,
        })
        .collect()
}

fn tol_line(tol: &Tolerance) -> String {
    format!("tolerance: rel {:e}, floor {:e}", tol.rel, tol.abs_floor)
}

pub fn check(path: &Path, tol: &Tolerance, json: bool) -> Result<Verdict> {
    let triple = load_triple(path, tol)?;
    let report = TripleAnalysis::new(&triple, tol)?.validate();
    let passed = report.all_passed();
    let text = if json {
        io::to_json(&CheckJson {
            schema_version: SCHEMA_VERSION,
            file: path.display().to_string(),
            passed,
            checks: check_lines(&report),
            warnings: &report.warnings,
            tolerance: *tol,
        })
    } else {
        let mut s = String::new();
        writeln!(s, "{} (dim H = {})", path.display(), triple.dim_h())?;
        for c in &report.checks {
            writeln!(
                s,
                "  {}  {:<32} residual {:.3e}  threshold {:.3e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual,
                c.threshold
            )?;
        }
        for w in &report.warnings {
            writeln!(s, "warning: {w}")?;
        }
        writeln!(s, "{}", tol_line(tol))?;
        writeln!(
            s,
            "{}",
            if passed {
                "all axioms hold".to_string()
            } else {
                let names: Vec<&str> = report.failures().map(|c| c.name).collect();
                format!("failed: {}", names.join(", "))
            }
        )?;
        s
    };
    emit(None, &text)?;
    Ok(Verdict::from_ok(passed))
}

#[derive(Serialize)]
struct BlockJson {
    m: usize,
    k: usize,
}

#[derive(Serialize)]
struct AnalyzeJson<'a> {
    schema_version: &'static str,
    file: String,
    dims: Dims,
    algebra_blocks: Vec<BlockJson>,
    clifford_blocks: Option<Vec<BlockJson>>,
    axioms: Vec<CheckLine<'a>>,
    first_order: bool,
    first_order_witness: Option<String>,
    second_order: bool,
    second_order_residual: f64,
    d0_d1_commutator: Option<f64>,
    hodge: bool,
    opposite_in_commutant: bool,
    projector_distance: f64,
    norms: Norms,
    dr_in_commutant: bool,
    dr_commutator: f64,
    warnings: &'a [String],
    tolerance: Tolerance,
}

#[derive(Serialize)]
struct Dims {
    algebra: usize,
    omega1: usize,
    clifford: usize,
    commutant: usize,
    opposite: usize,
}

#[derive(Serialize)]
struct Norms {
    d0: f64,
    d1: f64,
    d2: f64,
    dr: f64,
}

fn blocks(a: &StarAlgebra) -> Vec<BlockJson> {
    a.block_shape()
        .unwrap_or_default()
        .into_iter()
        .map(|(m, k)| BlockJson { m, k })
        .collect()
}

fn block_table(s: &mut String, title: &str, rows: &[BlockJson]) -> std::fmt::Result {
    writeln!(s, "{title}")?;
    writeln!(s, "    block    m    k  rank")?;
    for (i, b) in rows.iter().enumerate() {
        writeln!(s, "    {:>5} {:>4} {:>4} {:>5}", i + 1, b.m, b.k, b.m * b.k)?;
    }
    Ok(())
}

pub fn analyze(path: &Path, tol: &Tolerance, json: bool) -> Result<Verdict> {
    let triple = load_triple(path, tol)?;
    let algebra = wedderburn(&complex_algebra(&triple, tol)?, tol, WEDDERBURN_SEED)
        .context("Wedderburn decomposition of A_C")?;
    let an = TripleAnalysis::with_algebra(&triple, algebra, tol)?;
    let validation = an.validate();
    let hodge = an.hodge_analysis().context("Hodge analysis")?;
    let clifford_blocks = wedderburn(&hodge.clifford, tol, WEDDERBURN_SEED)
        .ok()
        .map(|c| blocks(&c));
    let first = an
        .first_order_via_decomposition()
        .context("1st-order analysis")?;
    let second = an.second_order().context("2nd-order analysis")?;
    let dec = an.decompose()?;
    let (dr_in_commutant, _) = an.in_commutant(&dec.dr);
    let dr_commutator = an.commutator_with_algebra(&dec.dr);
    let r = &hodge.report;

    let out = AnalyzeJson {
        schema_version: SCHEMA_VERSION,
        file: path.display().to_string(),
        dims: Dims {
            algebra: an.algebra().dim(),
            omega1: r.omega1_dim,
            clifford: r.clifford_dim,
            commutant: r.commutant_dim,
            opposite: r.opposite_dim,
        },
        algebra_blocks: blocks(an.algebra()),
        clifford_blocks,
        axioms: check_lines(&validation),
        first_order: first.holds,
        first_order_witness: first.witness.map(|w| w.to_string()),
        second_order: second.holds,
        second_order_residual: second.residual,
        d0_d1_commutator: second.d0_d1.as_ref().map(|c| c.norm),
        hodge: r.holds,
        opposite_in_commutant: r.opposite_in_commutant,
        projector_distance: r.projector_distance,
        norms: Norms {
            d0: norm(&dec.d0),
            d1: norm(&dec.d1),
            d2: norm(&dec.d2),
            dr: norm(&dec.dr),
        },
        dr_in_commutant,
        dr_commutator,
        warnings: &validation.warnings,
        tolerance: *tol,
    };
    let text = if json {
        io::to_json(&out)
    } else {
        render(&out)?
    };
    emit(None, &text)?;
    Ok(Verdict::Success)
}

fn yes(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

fn render(a: &AnalyzeJson<'_>) -> Result<String> {
    let mut s = String::new();
    writeln!(s, "{}", a.file)?;
    writeln!(s, "dimensions")?;
    writeln!(s, "    A_C          {}", a.dims.algebra)?;
    writeln!(s, "    Omega^1      {}", a.dims.omega1)?;
    writeln!(s, "    Cl           {}", a.dims.clifford)?;
    writeln!(s, "    Cl'          {}", a.dims.commutant)?;
    writeln!(s, "    Cl°          {}", a.dims.opposite)?;
    block_table(&mut s, "A_C blocks", &a.algebra_blocks)?;
    match &a.clifford_blocks {
        Some(b) => block_table(&mut s, "Cl blocks", b)?,
        None => writeln!(s, "Cl blocks: unavailable")?,
    }
    let failed: Vec<&str> = a
        .axioms
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.name)
        .collect();
    if failed.is_empty() {
        writeln!(s, "axioms: all hold")?;
    } else {
        writeln!(s, "axioms: failed {}", failed.join(", "))?;
    }
    write!(s, "1st order: {}", yes(a.first_order))?;
    match &a.first_order_witness {
        Some(w) => writeln!(s, " ({w})")?,
        None => writeln!(s)?,
    }
    writeln!(
        s,
        "2nd order: {} (residual {:.3e})",
        yes(a.second_order),
        a.second_order_residual
    )?;
    if let Some(c) = a.d0_d1_commutator {
        writeln!(s, "    ||[D0, D1]|| = {c:.3e}")?;
    }
    writeln!(
        s,
        "Hodge: {} (Cl° in Cl': {}, projector distance {:.3e})",
        yes(a.hodge),
        yes(a.opposite_in_commutant),
        a.projector_distance
    )?;
    writeln!(s, "decomposition norms")?;
    writeln!(s, "    ||D0||  {:.6e}", a.norms.d0)?;
    writeln!(s, "    ||D1||  {:.6e}", a.norms.d1)?;
    writeln!(s, "    ||D2||  {:.6e}", a.norms.d2)?;
    writeln!(s, "    ||D_R|| {:.6e}", a.norms.dr)?;
    if !a.dr_in_commutant {
        writeln!(
            s,
            "note: D_R is not in A' (max ||[D_R, a]|| = {:.3e})",
            a.dr_commutator
        )?;
    }
    for w in a.warnings {
        writeln!(s, "warning: {w}")?;
    }
    writeln!(s, "{}", tol_line(&a.tolerance))?;
    Ok(s)
}
