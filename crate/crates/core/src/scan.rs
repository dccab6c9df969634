//! Seeded Monte Carlo comparison of the closed-form Standard Model verdicts
//! with the generic engine.
//!
//! Each sample draws one-generation parameters with standard Gaussian real
//! and imaginary parts, zeroes the zero pattern of its case and, with
//! probability `degenerate_fraction`, forces a degeneracy under which the
//! closed form predicts failure of the Hodge property. Per-sample seeds come
//! from a SplitMix64 stream, so sample `i` does not depend on how many
//! samples precede it.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::Serialize;
use thiserror::Error;

use crate::algebra::StarAlgebra;
use crate::io::SmParamsFile;
use crate::linalg::{
    self, c64, commutator, subspace_equal, ComplexMatrix, LinalgError, Tolerance, C64,
};
use crate::sm::{
    classify_cases, expected_dr, hodge_clifford_target, hodge_closed_detail, sm_build,
    sm_complex_algebra, SmDiracParams, SmError, DELTA_INDICES,
};
use crate::triple::{TripleAnalysis, TripleError};

pub const DEFAULT_DEGENERATE_FRACTION: f64 = 0.25;

/// Bound on decomposition residuals, relative to `||D||`.
pub const IDENTITY_BOUND: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ScanError {
    #[error("invalid scan configuration: {0}")]
    InvalidConfig(String),
    #[error(transparent)]
    Sm(#[from] SmError),
    #[error(transparent)]
    Triple(#[from] TripleError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScanCase {
    Case(u8),
    All,
}

impl ScanCase {
    /// Case used for sample `index`; `All` cycles through 1..=4.
    pub fn for_sample(self, index: usize) -> u8 {
        match self {
            ScanCase::Case(c) => c,
            ScanCase::All => (index % 4) as u8 + 1,
        }
    }
}

impl fmt::Display for ScanCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ScanCase::Case(c) => write!(f, "{c}"),
            ScanCase::All => f.write_str("all"),
        }
    }
}

impl FromStr for ScanCase {
    type Err = ScanError;

    fn from_str(s: &str) -> Result<Self, ScanError> {
        match s {
            "all" => Ok(ScanCase::All),
            "1" | "2" | "3" | "4" => Ok(ScanCase::Case(s.parse().expect("digit"))),
            other => Err(ScanError::InvalidConfig(format!(
                "case must be 1, 2, 3, 4 or all, got {other:?}"
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub case: ScanCase,
    pub samples: usize,
    pub seed: u64,
    pub degenerate_fraction: f64,
    pub tolerance: Tolerance,
}

impl ScanConfig {
    pub fn new(case: ScanCase, samples: usize, seed: u64) -> Self {
        Self {
            case,
            samples,
            seed,
            degenerate_fraction: DEFAULT_DEGENERATE_FRACTION,
            tolerance: Tolerance::default(),
        }
    }

    pub fn validate(&self) -> Result<(), ScanError> {
        if self.samples == 0 {
            return Err(ScanError::InvalidConfig(
                "samples must be at least 1".into(),
            ));
        }
        if let ScanCase::Case(c) = self.case {
            if !(1..=4).contains(&c) {
                return Err(ScanError::InvalidConfig(format!("case {c} out of range")));
            }
        }
        if !(0.0..=1.0).contains(&self.degenerate_fraction) {
            return Err(ScanError::InvalidConfig(format!(
                "degenerate fraction must lie in [0, 1], got {}",
                self.degenerate_fraction
            )));
        }
        Ok(())
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// The `index`-th output of the SplitMix64 stream started at `seed`.
pub fn sample_seed(seed: u64, index: usize) -> u64 {
    const GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;
    splitmix64(seed.wrapping_add(GAMMA.wrapping_mul(index as u64 + 1)))
}

fn gaussian(rng: &mut ChaCha8Rng) -> C64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn set(p: &mut SmDiracParams, name: &str, i: usize, j: usize, z: C64) {
    let m = ComplexMatrix::from_element(1, 1, z);
    match name {
        "alpha" => p.set_alpha(i, j, m),
        "beta" => p.set_beta(i, j, m),
        "delta" => p.set_delta(i, j, m),
        _ => unreachable!(),
    }
    .expect("1x1 finite entry");
}

fn zero_alpha_row(p: &mut SmDiracParams, i: usize) {
    for j in 3..=4 {
        set(p, "alpha", i, j, C64::new(0.0, 0.0));
    }
}

fn zero_beta_row(p: &mut SmDiracParams, i: usize) {
    for j in 3..=4 {
        set(p, "beta", i, j, C64::new(0.0, 0.0));
    }
}

fn zero_delta_row(p: &mut SmDiracParams, i: usize) {
    for j in 2..=4 {
        set(p, "delta", i, j, C64::new(0.0, 0.0));
    }
}

fn zero_delta21(p: &mut SmDiracParams) {
    set(p, "delta", 2, 1, C64::new(0.0, 0.0));
}

/// Zeroes the entries that the case's zero pattern requires.
fn apply_pattern(p: &mut SmDiracParams, case: u8) {
    match case {
        1 => {
            for &(i, j) in &DELTA_INDICES {
                set(p, "delta", i, j, C64::new(0.0, 0.0));
            }
        }
        2 => {
            zero_alpha_row(p, 1);
            zero_delta_row(p, 1);
            zero_delta_row(p, 2);
        }
        3 => {
            zero_delta21(p);
            zero_beta_row(p, 1);
        }
        4 => {
            zero_delta_row(p, 1);
            zero_beta_row(p, 1);
            zero_alpha_row(p, 1);
        }
        _ => unreachable!("case out of range"),
    }
}

/// Forces a degeneracy that makes the case's theorem predict failure.
/// Returns a short description.
fn force_degeneracy(p: &mut SmDiracParams, case: u8, rng: &mut ChaCha8Rng) -> String {
    match case {
        1 => match rng.random_range(0..3) {
            0 => {
                let i = rng.random_range(1..=2);
                zero_alpha_row(p, i);
                format!("zero alpha row {i}")
            }
            1 => {
                let i = rng.random_range(1..=2);
                zero_beta_row(p, i);
                format!("zero beta row {i}")
            }
            _ => {
                for i in 1..=2 {
                    let phase = C64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU));
                    for j in 3..=4 {
                        let b = p.beta(i, j)[(0, 0)];
                        set(p, "alpha", i, j, phase * b);
                    }
                }
                "alpha rows unimodular multiples of beta rows".to_string()
            }
        },
        2 => match rng.random_range(0..3) {
            0 => {
                zero_delta21(p);
                "zero delta21".to_string()
            }
            1 => {
                zero_alpha_row(p, 2);
                "zero alpha row 2".to_string()
            }
            _ => {
                let i = rng.random_range(1..=2);
                zero_beta_row(p, i);
                format!("zero beta row {i}")
            }
        },
        3 => {
            if rng.random_bool(0.25) {
                zero_beta_row(p, 2);
                return "zero beta row 2".to_string();
            }
            let names = ["alpha row 1", "alpha row 2", "delta row 1", "delta row 2"];
            let first = rng.random_range(0..4);
            let second = (first + rng.random_range(1..4)) % 4;
            let (a, b) = (first.min(second), first.max(second));
            for k in [a, b] {
                match k {
                    0 => zero_alpha_row(p, 1),
                    1 => zero_alpha_row(p, 2),
                    2 => zero_delta_row(p, 1),
                    _ => zero_delta_row(p, 2),
                }
            }
            format!("zero {} and {}", names[a], names[b])
        }
        4 => match rng.random_range(0..4) {
            0 => {
                zero_delta21(p);
                "zero delta21".to_string()
            }
            1 => {
                zero_alpha_row(p, 2);
                "zero alpha row 2".to_string()
            }
            2 => {
                zero_beta_row(p, 2);
                "zero beta row 2".to_string()
            }
            _ => {
                zero_delta_row(p, 2);
                "zero delta row 2".to_string()
            }
        },
        _ => unreachable!("case out of range"),
    }
}

/// Parameters for one sample, with the forced degeneracy if any.
pub fn sample_params(
    case: u8,
    seed: u64,
    degenerate_fraction: f64,
) -> (SmDiracParams, Option<String>) {
    assert!((1..=4).contains(&case), "case {case} out of range");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut p = SmDiracParams::zero(1).expect("one generation");
    for i in 1..=2 {
        for j in 3..=4 {
            set(&mut p, "alpha", i, j, gaussian(&mut rng));
            set(&mut p, "beta", i, j, gaussian(&mut rng));
        }
    }
    for &(i, j) in &DELTA_INDICES {
        set(&mut p, "delta", i, j, gaussian(&mut rng));
    }
    p.set_upsilon_r(ComplexMatrix::from_element(1, 1, gaussian(&mut rng)))
        .expect("1x1 finite entry");
    apply_pattern(&mut p, case);
    let forced = (degenerate_fraction > 0.0 && rng.random_bool(degenerate_fraction))
        .then(|| force_degeneracy(&mut p, case, &mut rng));
    (p, forced)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SecondOrderOutcome {
    /// Double commutator check over basis pairs.
    pub bulk: bool,
    pub bulk_residual: f64,
    /// Nonempty case set.
    pub closed_form: bool,
    /// `[D0, D1] = 0`.
    pub d0_d1: bool,
    pub d0_d1_norm: f64,
    pub threshold: f64,
    pub agree: bool,
}

/// Residuals of the decomposition identities, relative to `||D||`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecompositionOutcome {
    pub d2: f64,
    pub sum: f64,
    pub j_d0_j: f64,
    pub d0_d2_in_omega1: f64,
    pub dr_in_commutant: f64,
    pub dr_support: f64,
    pub d0_block_formula: f64,
    pub error: Option<String>,
    pub ok: bool,
}

impl DecompositionOutcome {
    pub fn max_residual(&self) -> f64 {
        [
            self.d2,
            self.sum,
            self.j_d0_j,
            self.d0_d2_in_omega1,
            self.dr_in_commutant,
            self.dr_support,
            self.d0_block_formula,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CliffordOutcome {
    pub clifford_dim: usize,
    pub target_dim: usize,
    /// Subspace equality with the target; only computed when the closed form
    /// predicts the Hodge property.
    pub equal: Option<bool>,
    pub ok: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SampleOutcome {
    pub index: usize,
    pub sample_seed: u64,
    pub case: u8,
    pub forced: Option<String>,
    pub cases: String,
    pub closed_form: Option<bool>,
    pub engine: bool,
    pub agrees: bool,
    pub note: Option<String>,
    pub omega1_dim: usize,
    pub commutant_dim: usize,
    pub opposite_dim: usize,
    pub projector_distance: f64,
    pub second_order: SecondOrderOutcome,
    pub decomposition: DecompositionOutcome,
    pub clifford: CliffordOutcome,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Residuals {
    pub projector_distance: f64,
    pub second_order: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Disagreement {
    pub index: usize,
    pub sample_seed: u64,
    pub case: u8,
    pub forced: Option<String>,
    pub params: SmParamsFile,
    pub engine_verdict: bool,
    pub closed_form_verdict: Option<bool>,
    pub residuals: Residuals,
    pub note: Option<String>,
}

/// Pass count and failing sample indices for one family of checks.
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct Tally {
    pub passed: usize,
    pub failed: Vec<usize>,
}

impl Tally {
    fn record(&mut self, index: usize, ok: bool) {
        if ok {
            self.passed += 1;
        } else {
            self.failed.push(index);
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScanReport {
    pub seed: u64,
    pub case: String,
    pub samples: usize,
    pub agreements: usize,
    pub disagreements: Vec<Disagreement>,
    pub degenerate_fraction: f64,
    pub forced_degenerate: usize,
    pub closed_form_true: usize,
    pub closed_form_false: usize,
    pub second_order: Tally,
    pub decomposition: Tally,
    pub clifford: Tally,
    pub max_decomposition_residual: f64,
    pub identity_bound: f64,
    pub tolerance: Tolerance,
    pub timing_seconds: f64,
}

impl ScanReport {
    /// Hodge verdicts agree on every sample.
    pub fn hodge_agrees(&self) -> bool {
        self.disagreements.is_empty()
    }

    /// Hodge agreement plus every auxiliary check.
    pub fn all_passed(&self) -> bool {
        self.hodge_agrees()
            && self.second_order.failed.is_empty()
            && self.decomposition.failed.is_empty()
            && self.clifford.failed.is_empty()
    }
}

#[derive(Debug, Clone)]
pub struct ScanRun {
    pub report: ScanReport,
    pub outcomes: Vec<SampleOutcome>,
}

/// Shared state for evaluating SM samples: `A_C` with its Wedderburn
/// structure and the comparison algebras, built on first use.
pub struct SmEngine {
    tol: Tolerance,
    algebra: StarAlgebra,
    targets: [Option<StarAlgebra>; 4],
}

impl SmEngine {
    pub fn new(tol: &Tolerance) -> Result<Self, ScanError> {
        Ok(Self {
            tol: *tol,
            algebra: sm_complex_algebra(1, tol)?,
            targets: Default::default(),
        })
    }

    fn target(&mut self, case: u8) -> Result<&StarAlgebra, ScanError> {
        let slot = &mut self.targets[case as usize - 1];
        if slot.is_none() {
            *slot = Some(hodge_clifford_target(case, &self.tol)?);
        }
        Ok(slot.as_ref().expect("just filled"))
    }

    /// Runs every comparison on one parameter set drawn for `case`.
    pub fn evaluate(
        &mut self,
        params: &SmDiracParams,
        case: u8,
    ) -> Result<(bool, Option<bool>, Option<String>, SampleOutcome), ScanError> {
        let tol = self.tol;
        let sm = sm_build(params, &tol)?;
        let t = sm.triple();
        let an = TripleAnalysis::with_algebra(t, self.algebra.clone(), &tol)?;
        let hodge = an.hodge_analysis()?;
        let engine = hodge.report.holds;

        let (closed, note) = match hodge_closed_detail(params, &tol) {
            Ok(h) => (h.verdict(), None),
            Err(SmError::TheoremConflict(msg)) => {
                (None, Some(format!("closed forms disagree: {msg}")))
            }
            Err(e) => return Err(e.into()),
        };
        let cases = classify_cases(params, &tol)?;

        let d = t.dirac();
        let d_norm = linalg::norm(d);
        let threshold = tol.threshold(d_norm * d_norm);
        let bulk_residual = an.second_order_residual();
        let bulk = bulk_residual <= threshold;

        let scale = if d_norm > 0.0 { d_norm } else { 1.0 };
        let rel = |m: &ComplexMatrix| linalg::norm(m) / scale;
        let (decomposition, d0_d1_norm) = match an.decompose() {
            Ok(dec) => {
                let omega = an.omega1()?;
                let d0_d2 = &dec.d0 + &dec.d2;
                let mut out = DecompositionOutcome {
                    d2: rel(&dec.d2),
                    sum: rel(&(&dec.d0 + &dec.d1 + &dec.d2 + &dec.dr - d)),
                    j_d0_j: rel(&(t.j().conjugate(&dec.d0) - &dec.d1)),
                    d0_d2_in_omega1: omega.residual_norm(&d0_d2)? / scale,
                    dr_in_commutant: an.commutator_with_algebra(&dec.dr) / scale,
                    dr_support: rel(&(&dec.dr - expected_dr(params.upsilon_r()[(0, 0)]))),
                    d0_block_formula: rel(&(&dec.d0 - sm.d0())),
                    error: None,
                    ok: false,
                };
                out.ok = out.max_residual() < IDENTITY_BOUND;
                (out, linalg::norm(&commutator(&dec.d0, &dec.d1)))
            }
            Err(e) => (
                DecompositionOutcome {
                    d2: f64::NAN,
                    sum: f64::NAN,
                    j_d0_j: f64::NAN,
                    d0_d2_in_omega1: f64::NAN,
                    dr_in_commutant: f64::NAN,
                    dr_support: f64::NAN,
                    d0_block_formula: f64::NAN,
                    error: Some(e.to_string()),
                    ok: false,
                },
                f64::NAN,
            ),
        };
        let d0_d1 = d0_d1_norm <= threshold;
        let second_order = SecondOrderOutcome {
            bulk,
            bulk_residual,
            closed_form: !cases.is_empty(),
            d0_d1,
            d0_d1_norm,
            threshold,
            agree: bulk == !cases.is_empty() && bulk == d0_d1,
        };

        let target = self.target(case)?;
        let clifford = match closed {
            Some(true) => {
                let equal = hodge.clifford.dim() == target.dim()
                    && subspace_equal(hodge.clifford.space(), target.space(), &tol)?;
                CliffordOutcome {
                    clifford_dim: hodge.clifford.dim(),
                    target_dim: target.dim(),
                    equal: Some(equal),
                    ok: equal,
                }
            }
            _ => CliffordOutcome {
                clifford_dim: hodge.clifford.dim(),
                target_dim: target.dim(),
                equal: None,
                ok: hodge.clifford.dim() < target.dim(),
            },
        };

        let outcome = SampleOutcome {
            index: 0,
            sample_seed: 0,
            case,
            forced: None,
            cases: cases.to_string(),
            closed_form: closed,
            engine,
            agrees: closed == Some(engine),
            note: note.clone(),
            omega1_dim: hodge.report.omega1_dim,
            commutant_dim: hodge.report.commutant_dim,
            opposite_dim: hodge.report.opposite_dim,
            projector_distance: hodge.report.projector_distance,
            second_order,
            decomposition,
            clifford,
        };
        Ok((engine, closed, note, outcome))
    }
}

pub fn run_scan(config: &ScanConfig) -> Result<ScanRun, ScanError> {
    run_scan_with(config, |_| {})
}

/// As [`run_scan`], calling `progress` after each sample.
pub fn run_scan_with(
    config: &ScanConfig,
    mut progress: impl FnMut(&SampleOutcome),
) -> Result<ScanRun, ScanError> {
    config.validate()?;
    let start = Instant::now();
    let mut engine = SmEngine::new(&config.tolerance)?;
    let mut report = ScanReport {
        seed: config.seed,
        case: config.case.to_string(),
        samples: config.samples,
        agreements: 0,
        disagreements: Vec::new(),
        degenerate_fraction: config.degenerate_fraction,
        forced_degenerate: 0,
        closed_form_true: 0,
        closed_form_false: 0,
        second_order: Tally::default(),
        decomposition: Tally::default(),
        clifford: Tally::default(),
        max_decomposition_residual: 0.0,
        identity_bound: IDENTITY_BOUND,
        tolerance: config.tolerance,
        timing_seconds: 0.0,
    };
    let mut outcomes = Vec::with_capacity(config.samples);
    for index in 0..config.samples {
        let case = config.case.for_sample(index);
        let seed = sample_seed(config.seed, index);
        let (params, forced) = sample_params(case, seed, config.degenerate_fraction);
        let (engine_verdict, closed, note, mut outcome) = engine.evaluate(&params, case)?;
        outcome.index = index;
        outcome.sample_seed = seed;
        outcome.forced = forced.clone();

        report.forced_degenerate += usize::from(forced.is_some());
        match closed {
            Some(true) => report.closed_form_true += 1,
            Some(false) => report.closed_form_false += 1,
            None => {}
        }
        if outcome.agrees {
            report.agreements += 1;
        } else {
            report.disagreements.push(Disagreement {
                index,
                sample_seed: seed,
                case,
                forced,
                params: SmParamsFile::from_params(&params),
                engine_verdict,
                closed_form_verdict: closed,
                residuals: Residuals {
                    projector_distance: outcome.projector_distance,
                    second_order: outcome.second_order.bulk_residual,
                },
                note,
            });
        }
        report
            .second_order
            .record(index, outcome.second_order.agree);
        report.decomposition.record(index, outcome.decomposition.ok);
        report.clifford.record(index, outcome.clifford.ok);
        let r = outcome.decomposition.max_residual();
        if r.is_nan() || r > report.max_decomposition_residual {
            report.max_decomposition_residual = r;
        }
        progress(&outcome);
        outcomes.push(outcome);
    }
    report.timing_seconds = start.elapsed().as_secs_f64();
    Ok(ScanRun { report, outcomes })
}
