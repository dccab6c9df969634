//! Acceptance criteria 1-10. Each criterion prints one PASS/FAIL line with
//! the numbers it was decided on; the test fails if any criterion does.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::Instant;

use ncg_hodge::algebra::{
    algebra_commutant, circle, circle_algebra, generated_algebra, wedderburn,
};
use ncg_hodge::linalg::{
    c64, kron, matrix_unit, norm, nullspace, orthonormalize, subspace_equal, ComplexMatrix,
    Tolerance,
};
use ncg_hodge::scan::{run_scan, ScanCase, ScanConfig, ScanRun};
use ncg_hodge::sm::{
    big_algebra, cc_params, cc_params_blocks, classify_cases, commutant_span, hodge_closed,
    real_structure, second_order_closed, sm_build, sm_complex_algebra, sm_generators,
    SmDiracParams,
};
use ncg_hodge::triple::toys;
use ncg_hodge::{AntilinearMap, TripleAnalysis};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use common::{gaussian, low_rank, unitary, BlockAlgebra};

type Outcome = Result<String, String>;

const PD_BOUND: f64 = 1e-8;
const SCAN_SAMPLES: usize = 200;
const SCAN_SEED: u64 = 7;
const PROPERTY_CASES: usize = 100;

fn tol() -> Tolerance {
    Tolerance::default()
}

macro_rules! ensure {
    ($cond:expr, $($fmt:tt)+) => {
        let ok: bool = $cond;
        if !ok {
            return Err(format!($($fmt)+));
        }
    };
}

fn sorted(mut v: Vec<(usize, usize)>) -> Vec<(usize, usize)> {
    v.sort();
    v
}

fn algebra_structure() -> Outcome {
    let t = tol();
    let gens = sm_generators(1);
    ensure!(gens.len() == 6, "{} generators", gens.len());
    let a = wedderburn(
        &generated_algebra(&gens, true, &t).map_err(|e| e.to_string())?,
        &t,
        11,
    )
    .map_err(|e| e.to_string())?;
    let shape = sorted(a.block_shape().unwrap_or_default());
    ensure!(
        shape == vec![(1, 4), (1, 8), (2, 4), (3, 4)],
        "blocks {shape:?}"
    );
    ensure!(a.dim() == 15, "dim A_C = {}", a.dim());
    let comm = algebra_commutant(&a, &t).map_err(|e| e.to_string())?;
    let expected: usize = shape.iter().map(|&(_, k)| k * k).sum();
    ensure!(
        comm.dim() == 112 && expected == 112,
        "dim A' = {}, sum k^2 = {expected}",
        comm.dim()
    );
    let span = orthonormalize(&commutant_span(), &t).map_err(|e| e.to_string())?;
    let pd = comm
        .space()
        .projector_distance(&span)
        .map_err(|e| e.to_string())?;
    ensure!(
        pd < PD_BOUND,
        "projector distance to explicit span {pd:.3e}"
    );
    Ok(format!(
        "blocks {shape:?}, dim 15, commutant dim 112, distance to explicit span {pd:.1e}"
    ))
}

fn big_algebras() -> Outcome {
    let t = tol();
    let j = AntilinearMap::new(real_structure(1), &t).map_err(|e| e.to_string())?;
    let mut notes = Vec::new();
    for (case, dim, table) in [
        (1u8, 42usize, vec![(1, 4), (3, 4), (4, 1), (4, 3)]),
        (3, 68, vec![(1, 7), (3, 3), (3, 3), (7, 1)]),
    ] {
        let b = big_algebra(case, &t).map_err(|e| e.to_string())?;
        ensure!(b.dim() == dim, "case {case}: dim {}", b.dim());
        let shape = sorted(b.block_shape().unwrap_or_default());
        ensure!(shape == table, "case {case}: blocks {shape:?}");
        let comm = algebra_commutant(&b, &t).map_err(|e| e.to_string())?;
        let opp = circle_algebra(&b, &j).map_err(|e| e.to_string())?;
        let pd = comm
            .space()
            .projector_distance(opp.space())
            .map_err(|e| e.to_string())?;
        ensure!(
            comm.dim() == opp.dim() && pd < PD_BOUND,
            "case {case}: dim B' {} dim B° {} distance {pd:.3e}",
            comm.dim(),
            opp.dim()
        );
        notes.push(format!("dim {dim} blocks {shape:?} |B°-B'| {pd:.1e}"));
    }
    Ok(notes.join("; "))
}

fn cc_criterion() -> Outcome {
    let t = tol();
    let algebra = sm_complex_algebra(1, &t).map_err(|e| e.to_string())?;
    let c = |x: f64| c64(x, 0.0);
    let mut notes = Vec::new();
    for (y, expected) in [
        ([1.0, 2.0, 3.0, 4.0], true),
        ([1.0, 1.0, 1.0, 1.0], false),
        ([0.0, 1.0, 1.0, 1.0], false),
    ] {
        let p = cc_params(c(y[0]), c(y[1]), c(y[2]), c(y[3]), c(0.0));
        let sm = sm_build(&p, &t).map_err(|e| e.to_string())?;
        let an = TripleAnalysis::with_algebra(sm.triple(), algebra.clone(), &t)
            .map_err(|e| e.to_string())?;
        let engine = an.hodge().map_err(|e| e.to_string())?.holds;
        let closed = hodge_closed(&p, &t).map_err(|e| e.to_string())?;
        ensure!(
            engine == expected && closed == Some(expected),
            "{y:?}: engine {engine}, closed form {closed:?}, expected {expected}"
        );
        notes.push(format!("{y:?} -> {engine}"));
    }
    Ok(notes.join(", "))
}

fn scans() -> Result<Vec<(u8, ScanRun)>, String> {
    (1..=4u8)
        .map(|c| {
            let config = ScanConfig::new(ScanCase::Case(c), SCAN_SAMPLES, SCAN_SEED);
            run_scan(&config)
                .map(|r| (c, r))
                .map_err(|e| format!("case {c}: {e}"))
        })
        .collect()
}

fn classification(runs: &[(u8, ScanRun)]) -> Outcome {
    let mut notes = Vec::new();
    for (c, run) in runs {
        let r = &run.report;
        ensure!(
            r.agreements == SCAN_SAMPLES && r.disagreements.is_empty(),
            "case {c}: {}/{} agree, first disagreements {:?}",
            r.agreements,
            r.samples,
            r.disagreements
                .iter()
                .take(3)
                .map(|d| d.index)
                .collect::<Vec<_>>()
        );
        ensure!(
            r.closed_form_true > 0 && r.closed_form_false > 0,
            "case {c}: only one branch sampled ({} true, {} false)",
            r.closed_form_true,
            r.closed_form_false
        );
        notes.push(format!(
            "case {c} {}/{} ({} true, {} false, {:.1} s)",
            r.agreements, r.samples, r.closed_form_true, r.closed_form_false, r.timing_seconds
        ));
    }
    Ok(notes.join("; "))
}

fn second_order_equivalences(runs: &[(u8, ScanRun)]) -> Outcome {
    let mut total = 0;
    for (c, run) in runs {
        let tally = &run.report.second_order;
        ensure!(
            tally.failed.is_empty(),
            "case {c}: three-way disagreement on samples {:?}",
            tally.failed
        );
        for o in &run.outcomes {
            let s = &o.second_order;
            ensure!(
                s.bulk == s.closed_form && s.bulk == s.d0_d1,
                "case {c} sample {}: bulk {} cases {} [D0,D1] {}",
                o.index,
                s.bulk,
                s.closed_form,
                s.d0_d1
            );
        }
        total += tally.passed;
    }
    Ok(format!(
        "{total}/{} samples agree three ways",
        4 * SCAN_SAMPLES
    ))
}

fn decomposition_identities(runs: &[(u8, ScanRun)]) -> Outcome {
    let mut worst = 0.0f64;
    for (c, run) in runs {
        for o in &run.outcomes {
            let d = &o.decomposition;
            ensure!(
                d.error.is_none(),
                "case {c} sample {}: {:?}",
                o.index,
                d.error
            );
            let m = d.max_residual();
            ensure!(
                m < 1e-9,
                "case {c} sample {}: residual {m:.3e} ({d:?})",
                o.index
            );
            worst = worst.max(m);
        }
    }
    Ok(format!(
        "{} triples, max residual {worst:.2e} (relative to ||D||)",
        4 * SCAN_SAMPLES
    ))
}

fn clifford_equals_big_algebra(runs: &[(u8, ScanRun)]) -> Outcome {
    let (mut equal, mut smaller) = (0, 0);
    for (c, run) in runs {
        for o in &run.outcomes {
            let cl = &o.clifford;
            match o.closed_form {
                Some(true) => {
                    ensure!(
                        cl.equal == Some(true) && cl.clifford_dim == cl.target_dim,
                        "case {c} sample {}: Cl dim {} vs {}",
                        o.index,
                        cl.clifford_dim,
                        cl.target_dim
                    );
                    equal += 1;
                }
                _ => {
                    ensure!(
                        cl.clifford_dim < cl.target_dim,
                        "case {c} sample {}: Hodge fails but Cl dim {} >= {}",
                        o.index,
                        cl.clifford_dim,
                        cl.target_dim
                    );
                    smaller += 1;
                }
            }
        }
    }
    Ok(format!("{equal} equal to B, {smaller} strictly smaller"))
}

fn counterexamples() -> Outcome {
    let t = tol();
    let product = toys::m2_product();
    let an = TripleAnalysis::new(&product, &t).map_err(|e| e.to_string())?;
    let check = an.validate();
    let direct = check.check("first order").ok_or("no first order check")?;
    let via = an
        .first_order_via_decomposition()
        .map_err(|e| e.to_string())?;
    ensure!(
        !direct.passed && !via.holds,
        "D = d d°: direct {}, via decomposition {}",
        direct.passed,
        via.holds
    );

    let sum = toys::m2_sum();
    let an = TripleAnalysis::new(&sum, &t).map_err(|e| e.to_string())?;
    let first = an
        .first_order_via_decomposition()
        .map_err(|e| e.to_string())?;
    let second = an.second_order().map_err(|e| e.to_string())?;
    let dec = an.decompose().map_err(|e| e.to_string())?;
    let (dr_in, _) = an.in_commutant(&dec.dr);
    ensure!(
        first.holds && second.holds && !dr_in,
        "D = d + d°: 1st {}, 2nd {}, D_R in A' {dr_in}",
        first.holds,
        second.holds
    );
    Ok(format!(
        "d d° fails 1st order (residual {:.2}); d + d° passes 1st and 2nd order, ||[D_R, A]|| = {:.2}",
        direct.residual,
        an.commutator_with_algebra(&dec.dr)
    ))
}

fn engine_second_order(p: &SmDiracParams, t: &Tolerance) -> Result<bool, String> {
    let sm = sm_build(p, t).map_err(|e| e.to_string())?;
    let algebra = sm_complex_algebra(p.generations(), t).map_err(|e| e.to_string())?;
    let an = TripleAnalysis::with_algebra(sm.triple(), algebra, t).map_err(|e| e.to_string())?;
    Ok(an.second_order().map_err(|e| e.to_string())?.holds)
}

fn several_generations() -> Outcome {
    let t = tol();
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut checked = 0;
    for _ in 0..3 {
        let y: Vec<ComplexMatrix> = (0..5).map(|_| gaussian(&mut rng, 3, 3)).collect();
        // Majorana mass matrices are symmetric
        let yr = &y[4] + y[4].transpose();
        let p = cc_params_blocks(&y[0], &y[1], &y[2], &y[3], &yr).map_err(|e| e.to_string())?;
        let closed = second_order_closed(&p, &t).map_err(|e| e.to_string())?;
        let engine = engine_second_order(&p, &t)?;
        ensure!(closed && engine, "n = 3: closed {closed}, engine {engine}");
        checked += 1;
    }

    let e = |i, j| matrix_unit(2, i, j);
    let mut p = SmDiracParams::zero(2).map_err(|e| e.to_string())?;
    let set = |r: Result<(), _>| r.map_err(|e: ncg_hodge::sm::SmError| e.to_string());
    set(p.set_delta(2, 1, e(0, 0)))?;
    set(p.set_alpha(1, 3, e(1, 1)))?;
    set(p.set_alpha(2, 4, gaussian(&mut rng, 2, 2)))?;
    set(p.set_beta(2, 3, gaussian(&mut rng, 2, 2)))?;
    set(p.set_beta(2, 4, gaussian(&mut rng, 2, 2)))?;
    let cases = classify_cases(&p, &t).map_err(|e| e.to_string())?;
    ensure!(cases.is_empty(), "n = 2: zero patterns {cases} apply");
    let closed = second_order_closed(&p, &t).map_err(|e| e.to_string())?;
    let engine = engine_second_order(&p, &t)?;
    ensure!(closed && engine, "n = 2: closed {closed}, engine {engine}");

    // same support for alpha13 as delta21: the product no longer vanishes
    set(p.set_alpha(1, 3, e(0, 0)))?;
    let closed = second_order_closed(&p, &t).map_err(|e| e.to_string())?;
    let engine = engine_second_order(&p, &t)?;
    ensure!(
        !closed && !engine,
        "n = 2 control: closed {closed}, engine {engine}"
    );
    Ok(format!(
        "{checked} random n = 3 Yukawa sets hold; n = 2 with delta21 = e11, alpha13 = e22 holds outside every zero pattern; control fails on both routes"
    ))
}

fn bicommutant(rng: &mut ChaCha8Rng, t: &Tolerance) -> Result<(), String> {
    let b = BlockAlgebra::random(rng, 3, 2, 2);
    let a = generated_algebra(&b.generators(rng), true, t).map_err(|e| e.to_string())?;
    let a1 = algebra_commutant(&a, t).map_err(|e| e.to_string())?;
    let a2 = algebra_commutant(&a1, t).map_err(|e| e.to_string())?;
    ensure!(
        a.dim() == b.dim() && a1.dim() == b.commutant_dim(),
        "shape {:?}: dims {} {}",
        b.shape,
        a.dim(),
        a1.dim()
    );
    ensure!(
        subspace_equal(a.space(), a2.space(), t).map_err(|e| e.to_string())?,
        "shape {:?}: A'' != A",
        b.shape
    );
    Ok(())
}

fn anti_homomorphism(rng: &mut ChaCha8Rng, t: &Tolerance) -> Result<(), String> {
    let n = rng.random_range(1..=6);
    let j = AntilinearMap::new(unitary(rng, n), t).map_err(|e| e.to_string())?;
    let x = gaussian(rng, n, n);
    let y = gaussian(rng, n, n);
    let o = |m: &ComplexMatrix| circle(m, &j).map_err(|e| e.to_string());
    let scale = norm(&x) * norm(&y);
    let r1 = norm(&(o(&(&x * &y))? - o(&y)? * o(&x)?));
    let r2 = norm(&(o(&x.adjoint())? - o(&x)?.adjoint()));
    let z = c64(rng.random(), rng.random());
    let r3 = norm(&(o(&(&x * z + &y))? - o(&x)? * z - o(&y)?));
    ensure!(
        r1 <= t.threshold(scale) && r2 <= t.threshold(norm(&x)) && r3 <= t.threshold(scale),
        "n = {n}: residuals {r1:.2e} {r2:.2e} {r3:.2e}"
    );
    Ok(())
}

fn kron_bilinear(rng: &mut ChaCha8Rng, t: &Tolerance) -> Result<(), String> {
    let mut dims = || (rng.random_range(1..=4), rng.random_range(1..=4));
    let (p, q) = dims();
    let (r, s) = dims();
    let x = gaussian(rng, p, q);
    let y = gaussian(rng, p, q);
    let z = gaussian(rng, r, s);
    let w = gaussian(rng, r, s);
    let a = c64(rng.random(), rng.random());
    let b = c64(rng.random(), rng.random());
    let left = kron(&(&x * a + &y * b), &z) - (kron(&x, &z) * a + kron(&y, &z) * b);
    let right = kron(&z, &(&x * a + &y * b)) - (kron(&z, &x) * a + kron(&z, &y) * b);
    let mixed =
        kron(&(&x + &y), &(&z + &w)) - kron(&x, &z) - kron(&x, &w) - kron(&y, &z) - kron(&y, &w);
    let scale = (norm(&x) + norm(&y)) * (norm(&z) + norm(&w));
    for (name, m) in [("left", left), ("right", right), ("mixed", mixed)] {
        ensure!(
            norm(&m) <= t.threshold(scale),
            "{name} linearity residual {:.2e}",
            norm(&m)
        );
    }
    Ok(())
}

fn nullspace_orthonormal(rng: &mut ChaCha8Rng, t: &Tolerance) -> Result<(), String> {
    let cols = rng.random_range(1..=8);
    let rows = rng.random_range(1..=8);
    let r = rng.random_range(0..=rows.min(cols));
    let m = low_rank(rng, rows, cols, r);
    let kernel = nullspace(&m, t).map_err(|e| e.to_string())?;
    ensure!(
        kernel.len() == cols - r,
        "{rows}x{cols} rank {r}: kernel dim {}",
        kernel.len()
    );
    let scale = norm(&m).max(1.0);
    for (i, v) in kernel.iter().enumerate() {
        let image = (&m * v).norm();
        ensure!(image <= 1e-8 * scale, "||M v|| = {image:.2e}");
        for (k, w) in kernel.iter().enumerate() {
            let g = w.dotc(v);
            let target = if i == k { 1.0 } else { 0.0 };
            ensure!(
                (g - c64(target, 0.0)).norm() <= 1e-10,
                "Gram entry ({i}, {k}) = {g}"
            );
        }
    }
    Ok(())
}

type Suite = fn(&mut ChaCha8Rng, &Tolerance) -> Result<(), String>;

fn property_suites() -> Outcome {
    let t = tol();
    let suites: [(&str, Suite); 4] = [
        ("bicommutant", bicommutant),
        ("anti-homomorphism", anti_homomorphism),
        ("kron bilinearity", kron_bilinear),
        ("nullspace orthonormality", nullspace_orthonormal),
    ];
    let mut notes = Vec::new();
    for (k, (name, f)) in suites.iter().enumerate() {
        let mut rng = ChaCha8Rng::seed_from_u64(1000 + k as u64);
        for i in 0..PROPERTY_CASES {
            f(&mut rng, &t).map_err(|e| format!("{name} instance {i}: {e}"))?;
        }
        notes.push(format!("{name} {PROPERTY_CASES}/{PROPERTY_CASES}"));
    }
    Ok(notes.join(", "))
}

fn run(n: usize, label: &str, f: impl FnOnce() -> Outcome) -> bool {
    let start = Instant::now();
    let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
        Err(p
            .downcast_ref::<String>()
            .cloned()
            .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
            .unwrap_or_else(|| "panicked".into()))
    });
    let secs = start.elapsed().as_secs_f64();
    match &outcome {
        Ok(detail) => println!("PASS  {n:>2}  {label}: {detail} [{secs:.1} s]"),
        Err(detail) => println!("FAIL  {n:>2}  {label}: {detail} [{secs:.1} s]"),
    }
    outcome.is_ok()
}

#[test]
fn acceptance_criteria() {
    let mut ok = Vec::new();
    ok.push(run(1, "structure of A_C", algebra_structure));
    ok.push(run(2, "big algebras B with B° = B'", big_algebras));
    ok.push(run(3, "Chamseddine-Connes Yukawa criterion", cc_criterion));

    let start = Instant::now();
    let runs = scans();
    let scan_secs = start.elapsed().as_secs_f64();
    println!("      scans: 4 x {SCAN_SAMPLES} samples, seed {SCAN_SEED}, {scan_secs:.1} s");
    let with_runs = |n: usize, label: &str, f: fn(&[(u8, ScanRun)]) -> Outcome| match &runs {
        Ok(r) => run(n, label, || f(r)),
        Err(e) => run(n, label, || Err(format!("scan failed: {e}"))),
    };
    ok.push(with_runs(
        4,
        "engine vs closed-form Hodge classification",
        classification,
    ));
    ok.push(with_runs(
        5,
        "2nd-order three-way equivalence",
        second_order_equivalences,
    ));
    ok.push(with_runs(
        6,
        "decomposition identities",
        decomposition_identities,
    ));
    ok.push(with_runs(
        7,
        "Hodge implies Cl = B",
        clifford_equals_big_algebra,
    ));

    ok.push(run(8, "counterexample toys", counterexamples));
    ok.push(run(9, "several generations", several_generations));
    ok.push(run(10, "property suites", property_suites));

    let failed: Vec<usize> = ok
        .iter()
        .enumerate()
        .filter(|(_, &p)| !p)
        .map(|(i, _)| i + 1)
        .collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
