//! The finite Standard Model triple on `H = C^4 ⊗ C^2 ⊗ C^4 (⊗ C^n)`.
//!
//! Basis vector `e_i ⊗ f_s ⊗ e_j ⊗ g_k` has index `((i*2 + s)*4 + j)*n + k`
//! (0-based), so `pi(a ⊗ s ⊗ b)` is the plain Kronecker product. Slot `s = 0`
//! holds particles, `s = 1` antiparticles.

use std::fmt;

use thiserror::Error;

use crate::algebra::{
    algebra_commutant, circle_algebra, generated_algebra, wedderburn, AlgebraError, AntilinearMap,
    StarAlgebra,
};
use crate::linalg::{
    self, identity, kron, kron_all, matrix_unit, orthonormalize, subspace_equal, ComplexMatrix,
    LinalgError, Tolerance, C64, ONE, ZERO,
};
use crate::triple::{RealSpectralTriple, Sign, SignTriple, TripleError};

const BIG_ALGEBRA_SEED: u64 = 0xb16a_15eb_0000_0005;
const A_SEED: u64 = 0x5a17_a1ae_0000_0001;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SmError {
    #[error(transparent)]
    Triple(#[from] TripleError),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("q is not a quaternion: residual {residual:.3e}")]
    NotQuaternion { residual: f64 },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("operation needs a single generation, got {0}")]
    RequiresSingleGeneration(usize),
    #[error("unexpected sign: {0}")]
    SignDerivation(String),
    #[error("closed-form theorems disagree on overlapping cases: {0}")]
    TheoremConflict(String),
    #[error("structure check failed: {0}")]
    FormMismatch(String),
}

/// `(i, j)` labels of the seven `delta` entries, in storage order.
pub const DELTA_INDICES: [(usize, usize); 7] =
    [(1, 2), (1, 3), (1, 4), (2, 1), (2, 2), (2, 3), (2, 4)];

fn delta_slot(i: usize, j: usize) -> usize {
    DELTA_INDICES
        .iter()
        .position(|&p| p == (i, j))
        .unwrap_or_else(|| panic!("no delta entry ({i},{j})"))
}

fn ab_slot(i: usize, j: usize) -> (usize, usize) {
    assert!(
        (1..=2).contains(&i) && (3..=4).contains(&j),
        "no entry ({i},{j})"
    );
    (i - 1, j - 3)
}

/// `1 x 1` matrix holding `z`.
pub fn scalar(z: C64) -> ComplexMatrix {
    ComplexMatrix::from_element(1, 1, z)
}

/// Parameters of the internal Dirac operator. Indices follow the usual
/// 1-based labels: `alpha(i, j)` and `beta(i, j)` with `i ∈ {1,2}`,
/// `j ∈ {3,4}`; `delta(i, j)` for the pairs in [`DELTA_INDICES`].
#[derive(Debug, Clone, PartialEq)]
pub struct SmDiracParams {
    generations: usize,
    alpha: [[ComplexMatrix; 2]; 2],
    beta: [[ComplexMatrix; 2]; 2],
    delta: [ComplexMatrix; 7],
    upsilon_r: ComplexMatrix,
}

impl SmDiracParams {
    pub fn zero(generations: usize) -> Result<Self, SmError> {
        if generations == 0 {
            return Err(SmError::InvalidParams(
                "generations must be at least 1".into(),
            ));
        }
        let z = ComplexMatrix::zeros(generations, generations);
        Ok(Self {
            generations,
            alpha: std::array::from_fn(|_| std::array::from_fn(|_| z.clone())),
            beta: std::array::from_fn(|_| std::array::from_fn(|_| z.clone())),
            delta: std::array::from_fn(|_| z.clone()),
            upsilon_r: z,
        })
    }

    pub fn generations(&self) -> usize {
        self.generations
    }

    pub fn alpha(&self, i: usize, j: usize) -> &ComplexMatrix {
        let (r, c) = ab_slot(i, j);
        &self.alpha[r][c]
    }

    pub fn beta(&self, i: usize, j: usize) -> &ComplexMatrix {
        let (r, c) = ab_slot(i, j);
        &self.beta[r][c]
    }

    pub fn delta(&self, i: usize, j: usize) -> &ComplexMatrix {
        &self.delta[delta_slot(i, j)]
    }

    pub fn upsilon_r(&self) -> &ComplexMatrix {
        &self.upsilon_r
    }

    fn checked(&self, name: &str, m: ComplexMatrix) -> Result<ComplexMatrix, SmError> {
        let n = self.generations;
        if m.nrows() != n || m.ncols() != n {
            return Err(SmError::Shape(format!(
                "{name} is {}x{}, expected {n}x{n}",
                m.nrows(),
                m.ncols()
            )));
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(SmError::InvalidParams(format!(
                "{name} has a non-finite entry"
            )));
        }
        Ok(m)
    }

    pub fn set_alpha(&mut self, i: usize, j: usize, m: ComplexMatrix) -> Result<(), SmError> {
        let (r, c) = ab_slot(i, j);
        self.alpha[r][c] = self.checked(&format!("alpha{i}{j}"), m)?;
        Ok(())
    }

    pub fn set_beta(&mut self, i: usize, j: usize, m: ComplexMatrix) -> Result<(), SmError> {
        let (r, c) = ab_slot(i, j);
        self.beta[r][c] = self.checked(&format!("beta{i}{j}"), m)?;
        Ok(())
    }

    pub fn set_delta(&mut self, i: usize, j: usize, m: ComplexMatrix) -> Result<(), SmError> {
        let slot = delta_slot(i, j);
        self.delta[slot] = self.checked(&format!("delta{i}{j}"), m)?;
        Ok(())
    }

    pub fn set_upsilon_r(&mut self, m: ComplexMatrix) -> Result<(), SmError> {
        self.upsilon_r = self.checked("upsilon_r", m)?;
        Ok(())
    }

    /// Scalar variants of the setters, for one generation.
    pub fn with_alpha(mut self, i: usize, j: usize, z: C64) -> Result<Self, SmError> {
        self.set_alpha(i, j, scalar(z))?;
        Ok(self)
    }

    pub fn with_beta(mut self, i: usize, j: usize, z: C64) -> Result<Self, SmError> {
        self.set_beta(i, j, scalar(z))?;
        Ok(self)
    }

    pub fn with_delta(mut self, i: usize, j: usize, z: C64) -> Result<Self, SmError> {
        self.set_delta(i, j, scalar(z))?;
        Ok(self)
    }

    pub fn with_upsilon_r(mut self, z: C64) -> Result<Self, SmError> {
        self.set_upsilon_r(scalar(z))?;
        Ok(self)
    }

    /// Largest entry norm, the scale for zero tests.
    pub fn scale(&self) -> f64 {
        self.entries()
            .iter()
            .map(|(_, m)| linalg::norm(m))
            .fold(0.0, f64::max)
    }

    /// All entries with their names, `upsilon_r` last.
    pub fn entries(&self) -> Vec<(String, &ComplexMatrix)> {
        let mut out = Vec::with_capacity(16);
        for (name, arr) in [("alpha", &self.alpha), ("beta", &self.beta)] {
            for (r, row) in arr.iter().enumerate() {
                for (c, m) in row.iter().enumerate() {
                    out.push((format!("{name}{}{}", r + 1, c + 3), m));
                }
            }
        }
        for (&(i, j), m) in DELTA_INDICES.iter().zip(&self.delta) {
            out.push((format!("delta{i}{j}"), m));
        }
        out.push(("upsilon_r".to_string(), &self.upsilon_r));
        out
    }

    fn validate(&self, tol: &Tolerance) -> Result<(), SmError> {
        let y = &self.upsilon_r;
        if linalg::norm(&(y - y.transpose())) > tol.threshold(linalg::norm(y)) {
            return Err(SmError::InvalidParams(
                "upsilon_r must be a symmetric matrix".into(),
            ));
        }
        Ok(())
    }
}

/// `pi(a ⊗ s ⊗ b) = kron(a, s, b)` on `C^32`.
pub fn sm_rep(
    a: &ComplexMatrix,
    s: &ComplexMatrix,
    b: &ComplexMatrix,
) -> Result<ComplexMatrix, SmError> {
    let shape = |m: &ComplexMatrix, k: usize| m.nrows() == k && m.ncols() == k;
    if !shape(a, 4) || !shape(s, 2) || !shape(b, 4) {
        return Err(SmError::Shape(
            "sm_rep expects 4x4, 2x2 and 4x4 factors".into(),
        ));
    }
    Ok(kron_all(&[a, s, b]))
}

fn e(n: usize, i: usize, j: usize) -> ComplexMatrix {
    matrix_unit(n, i, j)
}

fn embed_diag(first: C64, block: &ComplexMatrix) -> ComplexMatrix {
    let k = block.nrows();
    let mut m = ComplexMatrix::zeros(k + 1, k + 1);
    m[(0, 0)] = first;
    m.view_mut((1, 1), (k, k)).copy_from(block);
    m
}

/// `diag(λ, λ̄, q) ⊗ e11 ⊗ 1 + diag(λ, m) ⊗ e22 ⊗ 1`.
pub fn sm_algebra_element(
    lambda: C64,
    q: &ComplexMatrix,
    m: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<ComplexMatrix, SmError> {
    if q.shape() != (2, 2) || m.shape() != (3, 3) {
        return Err(SmError::Shape("q must be 2x2 and m 3x3".into()));
    }
    let residual = (q[(0, 0)] - q[(1, 1)].conj()).norm() + (q[(0, 1)] + q[(1, 0)].conj()).norm();
    if residual > tol.threshold(linalg::norm(q)) {
        return Err(SmError::NotQuaternion { residual });
    }
    let mut first = ComplexMatrix::zeros(4, 4);
    first[(0, 0)] = lambda;
    first[(1, 1)] = lambda.conj();
    first.view_mut((2, 2), (2, 2)).copy_from(q);
    let second = embed_diag(lambda, m);
    let one = identity(4);
    Ok(kron_all(&[&first, &e(2, 0, 0), &one]) + kron_all(&[&second, &e(2, 1, 1), &one]))
}

/// Six elements generating `A_C`: the unit, `i`, two quaternion units and
/// two matrix units of `M_3`, each tensored with `1_n`.
pub fn sm_generators(generations: usize) -> Vec<ComplexMatrix> {
    let tol = Tolerance::default();
    let z2 = ComplexMatrix::zeros(2, 2);
    let z3 = ComplexMatrix::zeros(3, 3);
    let qi = linalg::diag(&[linalg::I, -linalg::I]);
    let qj = linalg::from_rows(&[&[ZERO, ONE], &[-ONE, ZERO]]);
    let list = [
        (ONE, identity(2), identity(3)),
        (linalg::I, z2.clone(), z3.clone()),
        (ZERO, qi, z3.clone()),
        (ZERO, qj, z3),
        (ZERO, z2.clone(), e(3, 0, 1)),
        (ZERO, z2, e(3, 1, 2)),
    ];
    list.iter()
        .map(|(l, q, m)| {
            let x = sm_algebra_element(*l, q, m, &tol).expect("fixed generators are valid");
            kron(&x, &identity(generations))
        })
        .collect()
}

fn index(i: usize, s: usize, j: usize, k: usize, n: usize) -> usize {
    ((i * 2 + s) * 4 + j) * n + k
}

/// Linear part of `J(v, w) = (w^*, v^*)`, componentwise conjugation on the
/// generation factor.
pub fn real_structure(generations: usize) -> ComplexMatrix {
    let n = generations;
    let mut c = ComplexMatrix::zeros(32 * n, 32 * n);
    for i in 0..4 {
        for s in 0..2 {
            for j in 0..4 {
                for k in 0..n {
                    c[(index(i, s, j, k, n), index(j, 1 - s, i, k, n))] = ONE;
                }
            }
        }
    }
    c
}

/// `diag(1,1,-1,-1) ⊗ e11 ⊗ 1 - 1 ⊗ e22 ⊗ diag(1,1,-1,-1)`.
pub fn grading(generations: usize) -> ComplexMatrix {
    let g = linalg::diag(&[ONE, ONE, -ONE, -ONE]);
    let one = identity(4);
    let gen = identity(generations);
    kron_all(&[&g, &e(2, 0, 0), &one, &gen]) - kron_all(&[&one, &e(2, 1, 1), &g, &gen])
}

/// `U = 1 + e11 ⊗ (e12 + e21 - 1) ⊗ e11`: swaps `nu_R` and `J(nu_R)`.
pub fn permutation_u(generations: usize) -> ComplexMatrix {
    let mid = e(2, 0, 1) + e(2, 1, 0) - identity(2);
    identity(32 * generations) + kron_all(&[&e(4, 0, 0), &mid, &e(4, 0, 0), &identity(generations)])
}

fn hermitian_completion(h: ComplexMatrix) -> ComplexMatrix {
    let hd = h.adjoint();
    h + hd
}

/// The `D0` block formula.
pub fn dirac_d0(p: &SmDiracParams) -> ComplexMatrix {
    let n = p.generations;
    let n4 = 32 * n;
    let mut h = ComplexMatrix::zeros(n4, n4);
    let e11_4 = e(4, 0, 0);
    let rest = identity(4) - &e11_4;
    let e11_2 = e(2, 0, 0);
    let e12_2 = e(2, 0, 1);
    for i in 1..=2 {
        for j in 3..=4 {
            h += kron_all(&[&e(4, i - 1, j - 1), &e11_2, &e11_4, p.alpha(i, j)]);
            h += kron_all(&[&e(4, i - 1, j - 1), &e11_2, &rest, p.beta(i, j)]);
        }
    }
    for &(i, j) in &DELTA_INDICES {
        h += kron_all(&[&e(4, i - 1, j - 1), &e12_2, &e11_4, p.delta(i, j)]);
    }
    hermitian_completion(h)
}

/// `D_R = e11 ⊗ (Υ_R e21 + Υ_R^* e12) ⊗ e11`.
pub fn dirac_dr(p: &SmDiracParams) -> ComplexMatrix {
    hermitian_completion(kron_all(&[
        &e(4, 0, 0),
        &e(2, 1, 0),
        &e(4, 0, 0),
        p.upsilon_r(),
    ]))
}

#[derive(Debug, Clone)]
pub struct SmTriple {
    params: SmDiracParams,
    triple: RealSpectralTriple,
    u: ComplexMatrix,
    d0: ComplexMatrix,
}

impl SmTriple {
    pub fn params(&self) -> &SmDiracParams {
        &self.params
    }

    pub fn triple(&self) -> &RealSpectralTriple {
        &self.triple
    }

    pub fn into_triple(self) -> RealSpectralTriple {
        self.triple
    }

    pub fn u(&self) -> &ComplexMatrix {
        &self.u
    }

    /// `D0` in the current frame.
    pub fn d0(&self) -> &ComplexMatrix {
        &self.d0
    }
}

fn derive_sign(x: &ComplexMatrix, image: &ComplexMatrix, tol: &Tolerance) -> Option<Sign> {
    let cut = tol.threshold(linalg::norm(x));
    [Sign::Plus, Sign::Minus]
        .into_iter()
        .find(|s| linalg::norm(&(image - x.scale(s.value()))) <= cut)
}

pub fn sm_build(params: &SmDiracParams, tol: &Tolerance) -> Result<SmTriple, SmError> {
    params.validate(tol)?;
    let n = params.generations;
    let j = AntilinearMap::new(real_structure(n), tol)?;
    let gamma = grading(n);
    let d0 = dirac_d0(params);
    let d1 = j.conjugate(&d0);
    let dirac = &d0 + d1 + dirac_dr(params);

    let eps = match j.sign(tol) {
        Some(1) => Sign::Plus,
        Some(_) => Sign::Minus,
        None => return Err(SmError::SignDerivation("J^2 is not a sign".into())),
    };
    let eps_p = derive_sign(&dirac, &j.conjugate(&dirac), tol)
        .ok_or_else(|| SmError::SignDerivation("J D J^-1 is not ±D".into()))?;
    let eps_pp = derive_sign(&gamma, &j.conjugate(&gamma), tol)
        .ok_or_else(|| SmError::SignDerivation("J gamma J^-1 is not ±gamma".into()))?;
    if (eps, eps_p, eps_pp) != (Sign::Plus, Sign::Plus, Sign::Minus) {
        return Err(SmError::SignDerivation(format!(
            "got ({eps}, {eps_p}, {eps_pp}), expected (+1, +1, -1)"
        )));
    }
    let signs = SignTriple {
        epsilon: eps,
        epsilon_prime: eps_p,
        epsilon_double_prime: Some(eps_pp),
    };
    let triple = RealSpectralTriple::new(sm_generators(n), dirac, Some(gamma), j, signs)?;
    Ok(SmTriple {
        params: params.clone(),
        triple,
        u: permutation_u(n),
        d0,
    })
}

/// Diagonal Yukawa couplings: `alpha^* = diag(yn, ye)`, `beta^* = diag(yu, yd)`.
pub fn cc_params(yn: C64, ye: C64, yu: C64, yd: C64, yr: C64) -> SmDiracParams {
    cc_params_blocks(
        &scalar(yn),
        &scalar(ye),
        &scalar(yu),
        &scalar(yd),
        &scalar(yr),
    )
    .expect("scalar blocks have matching shapes")
}

/// As [`cc_params`] with `n x n` Yukawa matrices.
pub fn cc_params_blocks(
    yn: &ComplexMatrix,
    ye: &ComplexMatrix,
    yu: &ComplexMatrix,
    yd: &ComplexMatrix,
    yr: &ComplexMatrix,
) -> Result<SmDiracParams, SmError> {
    let mut p = SmDiracParams::zero(yn.nrows())?;
    p.set_alpha(1, 3, yn.adjoint())?;
    p.set_alpha(2, 4, ye.adjoint())?;
    p.set_beta(1, 3, yu.adjoint())?;
    p.set_beta(2, 4, yd.adjoint())?;
    p.set_upsilon_r(yr.clone())?;
    Ok(p)
}

/// A subset of `{1, 2, 3, 4}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct CaseSet(u8);

impl CaseSet {
    pub fn empty() -> Self {
        Self(0)
    }

    pub fn from_cases(cases: &[u8]) -> Self {
        let mut s = Self::empty();
        for &c in cases {
            s.insert(c);
        }
        s
    }

    pub fn insert(&mut self, case: u8) {
        assert!((1..=4).contains(&case), "case {case} out of range");
        self.0 |= 1 << (case - 1);
    }

    pub fn contains(&self, case: u8) -> bool {
        (1..=4).contains(&case) && self.0 & (1 << (case - 1)) != 0
    }

    pub fn is_empty(&self) -> bool {
        self.0 == 0
    }

    pub fn len(&self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn iter(&self) -> impl Iterator<Item = u8> + '_ {
        (1..=4).filter(|&c| self.contains(c))
    }
}

impl fmt::Display for CaseSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let items: Vec<String> = self.iter().map(|c| c.to_string()).collect();
        write!(f, "{{{}}}", items.join(", "))
    }
}

/// Zero tests relative to the size of the whole parameter set.
struct ZeroTest {
    cut: f64,
}

impl ZeroTest {
    fn new(p: &SmDiracParams, tol: &Tolerance) -> Self {
        Self {
            cut: tol.threshold(p.scale()),
        }
    }

    fn zero(&self, m: &ComplexMatrix) -> bool {
        linalg::norm(m) <= self.cut
    }

    fn all_zero<'a>(&self, ms: impl IntoIterator<Item = &'a ComplexMatrix>) -> bool {
        ms.into_iter().all(|m| self.zero(m))
    }

    fn vec_zero(&self, v: &[C64]) -> bool {
        linalg::frobenius(v) <= self.cut
    }
}

fn require_single(p: &SmDiracParams) -> Result<(), SmError> {
    match p.generations {
        1 => Ok(()),
        n => Err(SmError::RequiresSingleGeneration(n)),
    }
}

/// Which of the four zero patterns compatible with the 2nd-order condition hold.
/// With several generations the patterns are read blockwise; they are then
/// sufficient for the 2nd-order condition but no longer necessary.
pub fn classify_cases(p: &SmDiracParams, tol: &Tolerance) -> Result<CaseSet, SmError> {
    let z = ZeroTest::new(p, tol);
    let delta_rows = |rows: &[usize]| {
        rows.iter()
            .flat_map(|&i| (2..=4).map(move |j| (i, j)))
            .collect::<Vec<_>>()
    };
    let alpha1 = [p.alpha(1, 3), p.alpha(1, 4)];
    let beta1 = [p.beta(1, 3), p.beta(1, 4)];

    let mut set = CaseSet::empty();
    if z.all_zero(p.delta.iter()) {
        set.insert(1);
    }
    if z.all_zero(alpha1) && z.all_zero(delta_rows(&[1, 2]).iter().map(|&(i, j)| p.delta(i, j))) {
        set.insert(2);
    }
    if z.zero(p.delta(2, 1)) && z.all_zero(beta1) {
        set.insert(3);
    }
    if z.all_zero(delta_rows(&[1]).iter().map(|&(i, j)| p.delta(i, j)))
        && z.all_zero(beta1)
        && z.all_zero(alpha1)
    {
        set.insert(4);
    }
    Ok(set)
}

/// The products `delta21 conj(alpha1i)`, `delta21 conj(delta1j)` and
/// `delta_ij conj(beta1k)` whose vanishing is the 2nd-order condition.
pub fn second_order_products(p: &SmDiracParams) -> Vec<(String, ComplexMatrix)> {
    let d21 = p.delta(2, 1);
    let mut out = Vec::new();
    for i in 3..=4 {
        out.push((
            format!("delta21 conj(alpha1{i})"),
            d21 * linalg::conj(p.alpha(1, i)),
        ));
    }
    for j in 2..=4 {
        out.push((
            format!("delta21 conj(delta1{j})"),
            d21 * linalg::conj(p.delta(1, j)),
        ));
    }
    for i in 1..=2 {
        for j in 2..=4 {
            for k in 3..=4 {
                out.push((
                    format!("delta{i}{j} conj(beta1{k})"),
                    p.delta(i, j) * linalg::conj(p.beta(1, k)),
                ));
            }
        }
    }
    out
}

/// Closed-form 2nd-order verdict: a nonempty case set for one generation,
/// vanishing products for several.
pub fn second_order_closed(p: &SmDiracParams, tol: &Tolerance) -> Result<bool, SmError> {
    if p.generations == 1 {
        return Ok(!classify_cases(p, tol)?.is_empty());
    }
    let cut = tol.threshold(p.scale() * p.scale());
    Ok(second_order_products(p)
        .iter()
        .all(|(_, m)| linalg::norm(m) <= cut))
}

/// Per-theorem closed-form Hodge verdicts for a one-generation parameter set.
#[derive(Debug, Clone, PartialEq)]
pub struct HodgeClosed {
    pub cases: CaseSet,
    /// `(case, verdict)` for every case whose pattern holds.
    pub by_case: Vec<(u8, bool)>,
}

impl HodgeClosed {
    pub fn verdict(&self) -> Option<bool> {
        self.by_case.first().map(|&(_, v)| v)
    }
}

fn row(m: &[&ComplexMatrix]) -> Vec<C64> {
    m.iter().map(|x| x[(0, 0)]).collect()
}

/// Is `a = c b` for some `|c| = 1`? `b` must be nonzero.
fn unimodular_multiple(a: &[C64], b: &[C64], z: &ZeroTest, tol: &Tolerance) -> bool {
    let bb: f64 = b.iter().map(|x| x.norm_sqr()).sum();
    let c: C64 = b.iter().zip(a).map(|(x, y)| x.conj() * y).sum::<C64>() / bb;
    let resid: Vec<C64> = a.iter().zip(b).map(|(x, y)| x - c * y).collect();
    z.vec_zero(&resid) && (c.norm() - 1.0).abs() <= tol.threshold(1.0)
}

fn theorem_verdict(case: u8, p: &SmDiracParams, z: &ZeroTest, tol: &Tolerance) -> bool {
    let alpha_row = |i| row(&[p.alpha(i, 3), p.alpha(i, 4)]);
    let beta_row = |i| row(&[p.beta(i, 3), p.beta(i, 4)]);
    let delta_row = |i| row(&[p.delta(i, 2), p.delta(i, 3), p.delta(i, 4)]);
    let nonzero = |v: &[C64]| !z.vec_zero(v);
    let d21 = !z.zero(p.delta(2, 1));
    match case {
        1 => {
            let rows_ok = (1..=2).all(|i| nonzero(&alpha_row(i)) && nonzero(&beta_row(i)));
            rows_ok && !(1..=2).all(|i| unimodular_multiple(&alpha_row(i), &beta_row(i), z, tol))
        }
        2 => d21 && nonzero(&alpha_row(2)) && (1..=2).all(|i| nonzero(&beta_row(i))),
        3 => {
            let count = [alpha_row(1), alpha_row(2), delta_row(1), delta_row(2)]
                .iter()
                .filter(|v| nonzero(v))
                .count();
            nonzero(&beta_row(2)) && count >= 3
        }
        4 => d21 && nonzero(&alpha_row(2)) && nonzero(&beta_row(2)) && nonzero(&delta_row(2)),
        _ => unreachable!("case out of range"),
    }
}

pub fn hodge_closed_detail(p: &SmDiracParams, tol: &Tolerance) -> Result<HodgeClosed, SmError> {
    require_single(p)?;
    let cases = classify_cases(p, tol)?;
    let z = ZeroTest::new(p, tol);
    let by_case: Vec<(u8, bool)> = cases
        .iter()
        .map(|c| (c, theorem_verdict(c, p, &z, tol)))
        .collect();
    if by_case.windows(2).any(|w| w[0].1 != w[1].1) {
        return Err(SmError::TheoremConflict(format!("{by_case:?}")));
    }
    Ok(HodgeClosed { cases, by_case })
}

/// `None` when no case applies.
pub fn hodge_closed(p: &SmDiracParams, tol: &Tolerance) -> Result<Option<bool>, SmError> {
    Ok(hodge_closed_detail(p, tol)?.verdict())
}

fn big_algebra_basis(case: u8) -> Vec<ComplexMatrix> {
    let one = identity(4);
    let rest = &one - e(4, 0, 0);
    let mut basis = Vec::new();
    match case {
        1 | 2 => {
            basis.push(kron_all(&[&e(4, 0, 0), &e(2, 1, 1), &one]));
            for k in 1..4 {
                for l in 1..4 {
                    basis.push(kron_all(&[&e(4, k, l), &e(2, 1, 1), &one]));
                }
            }
            for k in 0..4 {
                for l in 0..4 {
                    basis.push(kron_all(&[&e(4, k, l), &e(2, 0, 0), &e(4, 0, 0)]));
                    basis.push(kron_all(&[&e(4, k, l), &e(2, 0, 0), &rest]));
                }
            }
        }
        3 | 4 => {
            let corner = identity(8) - kron(&e(2, 0, 0), &e(4, 0, 0));
            basis.push(kron(&e(4, 0, 0), &corner));
            for s in 0..2 {
                for k in 1..4 {
                    for l in 1..4 {
                        basis.push(kron_all(&[&e(4, k, l), &e(2, s, s), &rest]));
                    }
                }
            }
            let f: Vec<usize> = (0..4)
                .map(|r| index(r, 0, 0, 0, 1))
                .chain((1..4).map(|r| index(r, 1, 0, 0, 1)))
                .collect();
            for &p in &f {
                for &q in &f {
                    basis.push(matrix_unit(32, p, q));
                }
            }
        }
        _ => unreachable!("case out of range"),
    }
    basis
}

/// The algebra `B` that the Clifford algebra fills out when the Hodge
/// property holds: `C ⊕ M3 ⊕ M4 ⊕ M4` for cases 1 and 2, `C ⊕ M3 ⊕ M3 ⊕ M7`
/// for cases 3 and 4. Checks `B° = B'` before returning.
pub fn big_algebra(case: u8, tol: &Tolerance) -> Result<StarAlgebra, SmError> {
    if !(1..=4).contains(&case) {
        return Err(SmError::InvalidParams(format!("case {case} out of range")));
    }
    let basis = big_algebra_basis(case);
    let space = orthonormalize(&basis, tol)?;
    let b = wedderburn(
        &StarAlgebra::from_parts(space, basis, true),
        tol,
        BIG_ALGEBRA_SEED,
    )?;
    let comm = algebra_commutant(&b, tol)?;
    let j = AntilinearMap::new(real_structure(1), tol)?;
    let opp = circle_algebra(&b, &j)?;
    if !subspace_equal(comm.space(), opp.space(), tol)? {
        return Err(SmError::FormMismatch(format!(
            "B° (dim {}) differs from B' (dim {})",
            opp.dim(),
            comm.dim()
        )));
    }
    Ok(b)
}

/// What the Clifford algebra equals when the Hodge property holds: `B` for
/// cases 1 and 3, `U B U` for cases 2 and 4, whose parameters are brought to
/// the case-1/3 shape by conjugating with `U`.
pub fn hodge_clifford_target(case: u8, tol: &Tolerance) -> Result<StarAlgebra, SmError> {
    let b = big_algebra(case, tol)?;
    match case {
        2 | 4 => Ok(b.conjugated_by(&permutation_u(1), tol)?),
        _ => Ok(b),
    }
}

/// `A_C` for `n` generations with its Wedderburn structure filled, for
/// reuse across many Dirac operators.
pub fn sm_complex_algebra(generations: usize, tol: &Tolerance) -> Result<StarAlgebra, SmError> {
    let a = generated_algebra(&sm_generators(generations), true, tol)?;
    Ok(wedderburn(&a, tol, A_SEED)?)
}

/// Expected `U D0 U` when the case-2 or case-4 pattern holds: `delta21`
/// moves into the `alpha` block.
fn conjugated_d0_form(p: &SmDiracParams, case4: bool) -> ComplexMatrix {
    let s = |m: &ComplexMatrix| m[(0, 0)];
    let mut m = ComplexMatrix::zeros(4, 4);
    m[(1, 0)] = s(p.delta(2, 1));
    m[(1, 2)] = s(p.alpha(2, 3));
    m[(1, 3)] = s(p.alpha(2, 4));
    let mut b = ComplexMatrix::zeros(4, 4);
    for i in 1..=2 {
        for j in 3..=4 {
            b[(i - 1, j - 1)] = s(p.beta(i, j));
        }
    }
    let one = identity(4);
    let e11 = e(4, 0, 0);
    let mut out = kron_all(&[&hermitian_completion(m), &e(2, 0, 0), &e11])
        + kron_all(&[&hermitian_completion(b), &e(2, 0, 0), &(&one - &e11)]);
    if case4 {
        let mut dp = ComplexMatrix::zeros(4, 4);
        for j in 2..=4 {
            dp[(1, j - 1)] = s(p.delta(2, j));
        }
        out += hermitian_completion(kron_all(&[&dp, &e(2, 0, 1), &e11]));
    }
    out
}

/// The unitarily equivalent triple with `D -> U D U`.
pub fn conjugate_by_u(t: &SmTriple, tol: &Tolerance) -> Result<SmTriple, SmError> {
    let u = &t.u;
    let n = u.nrows();
    let mut failures = Vec::new();
    if linalg::norm(&(u * u - identity(n))) > 0.0 || linalg::norm(&(u - u.adjoint())) > 0.0 {
        failures.push("U is not a self-adjoint involution".to_string());
    }
    if t.triple
        .generators()
        .iter()
        .any(|g| linalg::norm(&linalg::commutator(u, g)) > tol.threshold(linalg::norm(g)))
    {
        failures.push("U does not commute with A".to_string());
    }
    if linalg::norm(&(t.triple.j().conjugate(u) - u)) > 0.0 {
        failures.push("U does not commute with J".to_string());
    }
    let triple = t.triple.conjugated_by(u, tol)?;
    if linalg::norm(&(triple.j().linear_part() - t.triple.j().linear_part())) > tol.threshold(1.0) {
        failures.push("J changed under conjugation".to_string());
    }
    let d0 = u * &t.d0 * u;
    if t.params.generations == 1 {
        let cases = classify_cases(&t.params, tol)?;
        for (case, case4) in [(2u8, false), (4, true)] {
            if cases.contains(case) {
                let expected = conjugated_d0_form(&t.params, case4);
                let r = linalg::norm(&(&d0 - expected));
                if r > tol.threshold(linalg::norm(&d0)) {
                    failures.push(format!(
                        "U D0 U does not have the case-{case} form (residual {r:.3e})"
                    ));
                }
            }
        }
    }
    if !failures.is_empty() {
        return Err(SmError::FormMismatch(failures.join("; ")));
    }
    Ok(SmTriple {
        params: t.params.clone(),
        triple,
        u: u.clone(),
        d0,
    })
}

/// Explicit spanning set of `A'`: `{e22⊗e11, (e33+e44)⊗e11, (1-e11)⊗e22} ⊗ M4`
/// together with `e11 ⊗ M2 ⊗ M4`.
pub fn commutant_span() -> Vec<ComplexMatrix> {
    let one = identity(4);
    let firsts = [
        kron(&e(4, 1, 1), &e(2, 0, 0)),
        kron(&(e(4, 2, 2) + e(4, 3, 3)), &e(2, 0, 0)),
        kron(&(&one - e(4, 0, 0)), &e(2, 1, 1)),
    ];
    let mut out = Vec::new();
    for k in 0..4 {
        for l in 0..4 {
            let m = e(4, k, l);
            for f in &firsts {
                out.push(kron(f, &m));
            }
            for s in 0..2 {
                for t in 0..2 {
                    out.push(kron_all(&[&e(4, 0, 0), &e(2, s, t), &m]));
                }
            }
        }
    }
    out
}

/// The displayed element `e11 ⊗ (Υ e21 + Ῡ e12) ⊗ e11` for one generation.
pub fn expected_dr(yr: C64) -> ComplexMatrix {
    let mid = e(2, 1, 0) * yr + e(2, 0, 1) * yr.conj();
    kron_all(&[&e(4, 0, 0), &mid, &e(4, 0, 0)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::circle;
    use crate::linalg::c64;
    use crate::triple::TripleAnalysis;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn real_structure_matches_factor_swap() {
        // (swap of factors 1 and 3) · (1 ⊗ sigma_x ⊗ 1)
        let mut swap = ComplexMatrix::zeros(32, 32);
        for i in 0..4 {
            for s in 0..2 {
                for j in 0..4 {
                    swap[(index(j, s, i, 0, 1), index(i, s, j, 0, 1))] = ONE;
                }
            }
        }
        let sx = e(2, 0, 1) + e(2, 1, 0);
        let expected = swap * kron_all(&[&identity(4), &sx, &identity(4)]);
        assert_eq!(real_structure(1), expected);
    }

    #[test]
    fn real_structure_acts_as_adjoint_swap() {
        // J(v, w) = (w^*, v^*) with v, w ∈ M4
        let v = ComplexMatrix::from_fn(4, 4, |i, j| c64(i as f64 + 0.5, j as f64 - 1.0));
        let w = ComplexMatrix::from_fn(4, 4, |i, j| c64((i * j) as f64, 1.0 + i as f64));
        let mut psi = linalg::ComplexVector::zeros(32);
        for i in 0..4 {
            for j in 0..4 {
                psi[index(i, 0, j, 0, 1)] = v[(i, j)];
                psi[index(i, 1, j, 0, 1)] = w[(i, j)];
            }
        }
        let j = AntilinearMap::new(real_structure(1), &tol()).unwrap();
        let out = j.apply(&psi);
        let (wd, vd) = (w.adjoint(), v.adjoint());
        for i in 0..4 {
            for k in 0..4 {
                assert_eq!(out[index(i, 0, k, 0, 1)], wd[(i, k)]);
                assert_eq!(out[index(i, 1, k, 0, 1)], vd[(i, k)]);
            }
        }
    }

    #[test]
    fn circle_of_elementary_tensor() {
        let j = AntilinearMap::new(real_structure(1), &tol()).unwrap();
        let a = ComplexMatrix::from_fn(4, 4, |i, k| c64(i as f64, k as f64 * 0.5 - 1.0));
        let b = ComplexMatrix::from_fn(4, 4, |i, k| c64((i + 2 * k) as f64, -(i as f64)));
        let s = linalg::from_rows(&[
            &[c64(1.0, 1.0), c64(2.0, 0.0)],
            &[c64(0.0, 3.0), c64(-1.0, 0.5)],
        ]);
        let swapped = linalg::from_rows(&[&[s[(1, 1)], s[(0, 1)]], &[s[(1, 0)], s[(0, 0)]]]);
        let lhs = circle(&sm_rep(&a, &s, &b).unwrap(), &j).unwrap();
        let rhs = sm_rep(&b.transpose(), &swapped, &a.transpose()).unwrap();
        assert!(linalg::norm(&(lhs - rhs)) < 1e-12);
    }

    #[test]
    fn algebra_element_examples() {
        let z2 = ComplexMatrix::zeros(2, 2);
        let z3 = ComplexMatrix::zeros(3, 3);
        let unit = sm_algebra_element(ONE, &identity(2), &identity(3), &tol()).unwrap();
        assert_eq!(unit, identity(32));
        let x = sm_algebra_element(linalg::I, &z2, &z3, &tol()).unwrap();
        let i = linalg::I;
        let expected = kron_all(&[
            &linalg::diag(&[i, -i, ZERO, ZERO]),
            &e(2, 0, 0),
            &identity(4),
        ]) + kron_all(&[
            &linalg::diag(&[i, ZERO, ZERO, ZERO]),
            &e(2, 1, 1),
            &identity(4),
        ]);
        assert_eq!(x, expected);
        let not_q = linalg::diag(&[ONE, c64(2.0, 0.0)]);
        assert!(matches!(
            sm_algebra_element(ZERO, &not_q, &z3, &tol()),
            Err(SmError::NotQuaternion { .. })
        ));
    }

    #[test]
    fn generators_give_fifteen_dimensions() {
        let a = generated_algebra(&sm_generators(1), true, &tol()).unwrap();
        assert_eq!(a.dim(), 15);
        for g in commutant_span() {
            for x in a.basis() {
                assert!(linalg::norm(&linalg::commutator(&g, &x)) < 1e-12);
            }
        }
        assert_eq!(
            orthonormalize(&commutant_span(), &tol()).unwrap().dim(),
            112
        );
    }

    #[test]
    fn grading_and_u_properties() {
        let g = grading(1);
        assert_eq!(&g * &g, identity(32));
        let j = AntilinearMap::new(real_structure(1), &tol()).unwrap();
        assert_eq!(j.conjugate(&g), -&g);
        let u = permutation_u(1);
        assert_eq!(&u * &u, identity(32));
        // U swaps the first particle and first antiparticle basis vectors
        assert_eq!(u[(0, 4)], ONE);
        assert_eq!(u[(4, 0)], ONE);
        assert_eq!(u[(0, 0)], ZERO);
    }

    #[test]
    fn zero_params_give_zero_dirac() {
        let t = sm_build(&SmDiracParams::zero(1).unwrap(), &tol()).unwrap();
        assert_eq!(linalg::norm(t.triple().dirac()), 0.0);
        let a = TripleAnalysis::new(t.triple(), &tol()).unwrap();
        let report = a.validate();
        assert!(report.all_passed());
        assert_eq!(report.warnings.len(), 1);
    }

    #[test]
    fn only_upsilon_gives_pure_dr() {
        let y = c64(0.7, -0.2);
        let p = SmDiracParams::zero(1).unwrap().with_upsilon_r(y).unwrap();
        let t = sm_build(&p, &tol()).unwrap();
        assert_eq!(t.triple().dirac(), &expected_dr(y));
        let a = TripleAnalysis::new(t.triple(), &tol()).unwrap();
        assert_eq!(a.omega1().unwrap().dim(), 0);
        let dec = a.decompose().unwrap();
        for part in [&dec.d0, &dec.d1, &dec.d2] {
            assert!(linalg::norm(part) < 1e-12);
        }
        assert!(linalg::norm(&(&dec.dr - expected_dr(y))) < 1e-12);
    }

    #[test]
    fn case_examples() {
        let zero = SmDiracParams::zero(1).unwrap();
        assert_eq!(
            classify_cases(&zero, &tol()).unwrap(),
            CaseSet::from_cases(&[1, 2, 3, 4])
        );
        let p = zero
            .clone()
            .with_delta(2, 1, ONE)
            .unwrap()
            .with_alpha(2, 3, c64(0.3, 1.0))
            .unwrap()
            .with_beta(1, 3, c64(-1.0, 0.2))
            .unwrap()
            .with_beta(2, 4, c64(2.0, 0.0))
            .unwrap();
        assert_eq!(
            classify_cases(&p, &tol()).unwrap(),
            CaseSet::from_cases(&[2])
        );
        assert_eq!(
            classify_cases(&SmDiracParams::zero(2).unwrap(), &tol()).unwrap(),
            CaseSet::from_cases(&[1, 2, 3, 4])
        );
        assert!(matches!(
            hodge_closed(&SmDiracParams::zero(2).unwrap(), &tol()),
            Err(SmError::RequiresSingleGeneration(2))
        ));
    }

    #[test]
    fn cc_closed_forms() {
        let c = |x: f64| c64(x, 0.0);
        let t = tol();
        let same = cc_params(c(1.0), c(1.0), c(1.0), c(1.0), c(0.0));
        assert_eq!(
            classify_cases(&same, &t).unwrap(),
            CaseSet::from_cases(&[1])
        );
        assert_eq!(hodge_closed(&same, &t).unwrap(), Some(false));
        assert_eq!(
            hodge_closed(&cc_params(c(1.0), c(2.0), c(3.0), c(4.0), c(0.0)), &t).unwrap(),
            Some(true)
        );
        assert_eq!(
            hodge_closed(&cc_params(c(0.0), c(1.0), c(1.0), c(1.0), c(0.0)), &t).unwrap(),
            Some(false)
        );
    }

    #[test]
    fn theorem_examples() {
        let t = tol();
        let c = |x: f64| c64(x, 0.0);
        // alpha = beta = identity
        let p = SmDiracParams::zero(1).unwrap();
        let p = p
            .with_alpha(1, 3, ONE)
            .unwrap()
            .with_alpha(2, 4, ONE)
            .unwrap();
        let same = p
            .clone()
            .with_beta(1, 3, ONE)
            .unwrap()
            .with_beta(2, 4, ONE)
            .unwrap();
        assert_eq!(hodge_closed(&same, &t).unwrap(), Some(false));
        let differ = p
            .with_beta(1, 3, c(2.0))
            .unwrap()
            .with_beta(2, 4, ONE)
            .unwrap();
        assert_eq!(hodge_closed(&differ, &t).unwrap(), Some(true));

        let case4 = SmDiracParams::zero(1)
            .unwrap()
            .with_delta(2, 1, ONE)
            .unwrap()
            .with_alpha(2, 3, ONE)
            .unwrap()
            .with_beta(2, 3, ONE)
            .unwrap()
            .with_delta(2, 2, ONE)
            .unwrap();
        let detail = hodge_closed_detail(&case4, &t).unwrap();
        assert!(detail.cases.contains(4));
        assert_eq!(detail.verdict(), Some(true));
    }

    #[test]
    fn products_match_cases_for_one_generation() {
        let t = tol();
        let patterns: [&[(usize, usize)]; 3] =
            [&[(2, 1), (1, 3)], &[(1, 2), (1, 4)], &[(2, 2), (2, 1)]];
        for pattern in patterns {
            let mut p = cc_params(ONE, c64(2.0, 0.0), c64(3.0, 0.0), c64(4.0, 0.0), ZERO);
            for &(i, j) in pattern {
                p.set_delta(i, j, scalar(c64(0.5, 0.5))).unwrap();
            }
            let by_cases = !classify_cases(&p, &t).unwrap().is_empty();
            let cut = t.threshold(p.scale() * p.scale());
            let by_products = second_order_products(&p)
                .iter()
                .all(|(_, m)| linalg::norm(m) <= cut);
            assert_eq!(by_cases, by_products, "{pattern:?}");
        }
    }

    #[test]
    fn upsilon_must_be_symmetric() {
        let mut p = SmDiracParams::zero(2).unwrap();
        p.set_upsilon_r(e(2, 0, 1)).unwrap();
        assert!(matches!(
            sm_build(&p, &tol()),
            Err(SmError::InvalidParams(_))
        ));
        p.set_upsilon_r(e(2, 0, 1) + e(2, 1, 0)).unwrap();
        assert!(sm_build(&p, &tol()).is_ok());
    }

    #[test]
    fn setters_check_shapes() {
        let mut p = SmDiracParams::zero(2).unwrap();
        assert!(matches!(
            p.set_alpha(1, 3, scalar(ONE)),
            Err(SmError::Shape(_))
        ));
        assert!(matches!(
            SmDiracParams::zero(0),
            Err(SmError::InvalidParams(_))
        ));
    }

    #[test]
    fn case_set_display() {
        assert_eq!(CaseSet::from_cases(&[3, 1]).to_string(), "{1, 3}");
        assert_eq!(CaseSet::empty().to_string(), "{}");
        assert_eq!(CaseSet::from_cases(&[2, 4]).len(), 2);
    }
}
