//! Real spectral triples on `C^n`: axiom checks, 1-forms, the Clifford
//! algebra, the splitting `D = D0 + D1 + D2 + D_R` and the 2nd-order and
//! Hodge tests.

use std::cell::OnceCell;
use std::fmt;

use thiserror::Error;

use crate::algebra::{
    algebra_commutant, circle_algebra, generated_algebra, wedderburn, AlgebraError, AntilinearMap,
    StarAlgebra,
};
use crate::linalg::{
    self, common_dim, commutator, identity, orthonormalize, ComplexMatrix, LinalgError,
    MatrixSubspace, Tolerance,
};

const DECOMPOSE_SEED: u64 = 0xdec0_3b05_e000_0011;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TripleError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("a spectral triple needs at least one algebra generator")]
    NoGenerators,
    #[error("epsilon'' must be given exactly when a grading is present")]
    SignMismatch,
    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl TryFrom<i64> for Sign {
    type Error = i64;

    fn try_from(v: i64) -> Result<Self, i64> {
        match v {
            1 => Ok(Sign::Plus),
            -1 => Ok(Sign::Minus),
            other => Err(other),
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

/// `J^2 = e`, `JD = e' DJ`, `J gamma = e'' gamma J`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SignTriple {
    pub epsilon: Sign,
    pub epsilon_prime: Sign,
    pub epsilon_double_prime: Option<Sign>,
}

#[derive(Debug, Clone)]
pub struct RealSpectralTriple {
    generators: Vec<ComplexMatrix>,
    dirac: ComplexMatrix,
    gamma: Option<ComplexMatrix>,
    j: AntilinearMap,
    signs: SignTriple,
}

impl RealSpectralTriple {
    /// Checks shapes and finiteness only; the axioms are for [`validate`].
    pub fn new(
        generators: Vec<ComplexMatrix>,
        dirac: ComplexMatrix,
        gamma: Option<ComplexMatrix>,
        j: AntilinearMap,
        signs: SignTriple,
    ) -> Result<Self, TripleError> {
        let n = common_dim(&generators)?.ok_or(TripleError::NoGenerators)?;
        let d = linalg::ensure_square(&dirac)?;
        if d != n || j.dim() != n {
            return Err(TripleError::Dimension(format!(
                "generators act on C^{n}, dirac on C^{d}, J on C^{}",
                j.dim()
            )));
        }
        for g in &generators {
            linalg::ensure_finite(g)?;
        }
        linalg::ensure_finite(&dirac)?;
        if let Some(g) = &gamma {
            let k = linalg::ensure_square(g)?;
            if k != n {
                return Err(TripleError::Dimension(format!(
                    "gamma acts on C^{k}, expected C^{n}"
                )));
            }
            linalg::ensure_finite(g)?;
        }
        if gamma.is_some() != signs.epsilon_double_prime.is_some() {
            return Err(TripleError::SignMismatch);
        }
        Ok(Self {
            generators,
            dirac,
            gamma,
            j,
            signs,
        })
    }

    pub fn dim_h(&self) -> usize {
        self.dirac.nrows()
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn dirac(&self) -> &ComplexMatrix {
        &self.dirac
    }

    pub fn gamma(&self) -> Option<&ComplexMatrix> {
        self.gamma.as_ref()
    }

    pub fn j(&self) -> &AntilinearMap {
        &self.j
    }

    pub fn signs(&self) -> SignTriple {
        self.signs
    }

    /// Same triple with `D` replaced.
    pub fn with_dirac(&self, dirac: ComplexMatrix) -> Result<Self, TripleError> {
        Self::new(
            self.generators.clone(),
            dirac,
            self.gamma.clone(),
            self.j.clone(),
            self.signs,
        )
    }

    /// The unitarily equivalent triple `(u A u^*, u D u^*, u gamma u^*, u J u^*)`.
    pub fn conjugated_by(&self, u: &ComplexMatrix, tol: &Tolerance) -> Result<Self, TripleError> {
        if u.nrows() != self.dim_h() || !linalg::is_unitary(u, tol) {
            return Err(TripleError::Dimension(
                "conjugating matrix is not a unitary on H".into(),
            ));
        }
        let ud = u.adjoint();
        let conj = |x: &ComplexMatrix| u * x * &ud;
        Self::new(
            self.generators.iter().map(conj).collect(),
            conj(&self.dirac),
            self.gamma.as_ref().map(conj),
            self.j.transformed(u),
            self.signs,
        )
    }
}

/// One axiom with the residual it was decided on.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub name: &'static str,
    pub passed: bool,
    pub residual: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<AxiomCheck>,
    pub warnings: Vec<String>,
    pub tolerance: Tolerance,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&AxiomCheck> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn failures(&self) -> impl Iterator<Item = &AxiomCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

pub const DEGENERATE_OMEGA_WARNING: &str = "Omega^1_D(A) = {0}: D commutes with the algebra";

/// `D_{ij,kl} = P_i Q_j D P_k Q_l` and the four partial sums.
#[derive(Debug, Clone)]
pub struct DiracDecomposition {
    pub d0: ComplexMatrix,
    pub d1: ComplexMatrix,
    pub d2: ComplexMatrix,
    pub dr: ComplexMatrix,
    pub projections_p: Vec<ComplexMatrix>,
    pub projections_q: Vec<ComplexMatrix>,
    blocks: Vec<ComplexMatrix>,
}

impl DiracDecomposition {
    pub fn block_count(&self) -> usize {
        self.projections_p.len()
    }

    pub fn block(&self, i: usize, j: usize, k: usize, l: usize) -> &ComplexMatrix {
        let n = self.block_count();
        &self.blocks[((i * n + j) * n + k) * n + l]
    }

    /// `max ||D_{ij,kl}^* - D_{kl,ij}||`.
    pub fn block_adjoint_residual(&self) -> f64 {
        let n = self.block_count();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                for k in 0..n {
                    for l in 0..n {
                        let r = linalg::norm(
                            &(self.block(i, j, k, l).adjoint() - self.block(k, l, i, j)),
                        );
                        worst = worst.max(r);
                    }
                }
            }
        }
        worst
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FirstOrderWitness {
    D2Nonzero,
    D1NotInCommutant,
    DrViolatesFirstOrder,
}

impl fmt::Display for FirstOrderWitness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FirstOrderWitness::D2Nonzero => "D2 is nonzero",
            FirstOrderWitness::D1NotInCommutant => "D1 not in A'",
            FirstOrderWitness::DrViolatesFirstOrder => "D_R violates 1st order",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct FirstOrderVerdict {
    pub holds: bool,
    pub witness: Option<FirstOrderWitness>,
    pub d2_norm: f64,
    pub d1_commutator: f64,
    pub dr_residual: f64,
    pub direct_residual: f64,
    pub threshold: f64,
}

/// `[D0, D1]`, computed when `D_R` lies in `A'`.
#[derive(Debug, Clone, PartialEq)]
pub struct CommutatorCheck {
    pub norm: f64,
    pub threshold: f64,
    pub vanishes: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SecondOrderVerdict {
    pub holds: bool,
    pub residual: f64,
    pub threshold: f64,
    pub d0_d1: Option<CommutatorCheck>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct HodgeReport {
    pub holds: bool,
    pub omega1_dim: usize,
    pub clifford_dim: usize,
    pub commutant_dim: usize,
    pub opposite_dim: usize,
    /// `Cl° ⊆ Cl'`, the 2nd-order inclusion.
    pub opposite_in_commutant: bool,
    pub projector_distance: f64,
    pub degenerate: bool,
}

/// The pieces of a full analysis, for reporting.
#[derive(Debug, Clone)]
pub struct HodgeAnalysis {
    pub report: HodgeReport,
    pub clifford: StarAlgebra,
    pub commutant: StarAlgebra,
    pub opposite: StarAlgebra,
}

/// Shared state for analysing one triple: `A_C` and its basis are built
/// once, `Omega^1` and the decomposition on first use.
pub struct TripleAnalysis<'t> {
    triple: &'t RealSpectralTriple,
    tol: Tolerance,
    algebra: StarAlgebra,
    basis: Vec<ComplexMatrix>,
    conjugated: Vec<ComplexMatrix>,
    d_norm: f64,
    omega1: OnceCell<MatrixSubspace>,
    decomposition: OnceCell<DiracDecomposition>,
}

fn max_of(values: impl IntoIterator<Item = f64>) -> f64 {
    values.into_iter().fold(0.0, f64::max)
}

impl<'t> TripleAnalysis<'t> {
    pub fn new(triple: &'t RealSpectralTriple, tol: &Tolerance) -> Result<Self, TripleError> {
        let algebra = complex_algebra(triple, tol)?;
        Ok(Self::from_parts(triple, algebra, tol))
    }

    /// Reuses a precomputed `A_C`, for example across a family of Dirac
    /// operators on the same algebra. A Wedderburn structure on `algebra`,
    /// if present, is used by [`Self::decompose`].
    pub fn with_algebra(
        triple: &'t RealSpectralTriple,
        algebra: StarAlgebra,
        tol: &Tolerance,
    ) -> Result<Self, TripleError> {
        if algebra.ambient_dim() != triple.dim_h() {
            return Err(TripleError::Dimension(format!(
                "algebra acts on dimension {}, triple on {}",
                algebra.ambient_dim(),
                triple.dim_h()
            )));
        }
        for g in &triple.generators {
            if !algebra.contains(g, tol)? {
                return Err(TripleError::Inconsistent(
                    "a generator lies outside the supplied algebra".into(),
                ));
            }
        }
        Ok(Self::from_parts(triple, algebra, tol))
    }

    fn from_parts(triple: &'t RealSpectralTriple, algebra: StarAlgebra, tol: &Tolerance) -> Self {
        let basis = algebra.basis();
        let conjugated = basis.iter().map(|b| triple.j.conjugate(b)).collect();
        Self {
            triple,
            tol: *tol,
            algebra,
            basis,
            conjugated,
            d_norm: linalg::norm(&triple.dirac),
            omega1: OnceCell::new(),
            decomposition: OnceCell::new(),
        }
    }

    pub fn triple(&self) -> &RealSpectralTriple {
        self.triple
    }

    pub fn algebra(&self) -> &StarAlgebra {
        &self.algebra
    }

    pub fn tolerance(&self) -> &Tolerance {
        &self.tol
    }

    /// `max ||[x, a]||` over the orthonormal basis of `A_C`.
    pub fn commutator_with_algebra(&self, x: &ComplexMatrix) -> f64 {
        max_of(self.basis.iter().map(|a| linalg::norm(&commutator(x, a))))
    }

    /// Whether `x` commutes with `A`, at a threshold scaled by `||D||`.
    pub fn in_commutant(&self, x: &ComplexMatrix) -> (bool, f64) {
        let r = self.commutator_with_algebra(x);
        (r <= self.tol.threshold(self.d_norm), r)
    }

    /// `max ||[[x, a], J b J^{-1}]||` over basis pairs.
    pub fn first_order_residual(&self, x: &ComplexMatrix) -> f64 {
        let comms: Vec<ComplexMatrix> = self.basis.iter().map(|a| commutator(x, a)).collect();
        max_of(comms.iter().flat_map(|c| {
            self.conjugated
                .iter()
                .map(move |o| linalg::norm(&commutator(c, o)))
        }))
    }

    pub fn validate(&self) -> ValidationReport {
        let t = self.triple;
        let tol = &self.tol;
        let n = t.dim_h();
        let sqrt_n = (n as f64).sqrt();
        let d = &t.dirac;
        let dn = self.d_norm;
        let mut checks = Vec::new();
        let mut push = |name: &'static str, residual: f64, scale: f64| {
            let threshold = tol.threshold(scale);
            checks.push(AxiomCheck {
                name,
                passed: residual <= threshold,
                residual,
                threshold,
            });
        };

        push(
            "dirac self-adjointness",
            linalg::norm(&(d - d.adjoint())),
            dn,
        );

        let eps = t.signs.epsilon.value();
        push(
            "J squared sign",
            linalg::norm(&(t.j.square() - identity(n).scale(eps))),
            sqrt_n,
        );
        let eps_p = t.signs.epsilon_prime.value();
        push(
            "J dirac sign",
            linalg::norm(&(t.j.conjugate(d) - d.scale(eps_p))),
            dn,
        );

        if let (Some(g), Some(eps_pp)) = (&t.gamma, t.signs.epsilon_double_prime) {
            let gn = linalg::norm(g);
            push(
                "gamma self-adjointness",
                linalg::norm(&(g - g.adjoint())),
                gn,
            );
            push(
                "gamma involution",
                linalg::norm(&(g * g - identity(n))),
                sqrt_n,
            );
            push(
                "gamma commutes with algebra",
                self.commutator_with_algebra(g),
                gn,
            );
            push(
                "gamma anticommutes with dirac",
                linalg::norm(&(g * d + d * g)),
                gn * dn,
            );
            push(
                "J gamma sign",
                linalg::norm(&(t.j.conjugate(g) - g.scale(eps_pp.value()))),
                gn,
            );
        }

        let reality = max_of(self.basis.iter().flat_map(|a| {
            self.conjugated
                .iter()
                .map(move |o| linalg::norm(&commutator(a, o)))
        }));
        push("reality", reality, 1.0);
        push("first order", self.first_order_residual(d), dn);

        let mut warnings = Vec::new();
        if self.omega_is_trivial() {
            warnings.push(DEGENERATE_OMEGA_WARNING.to_string());
        }
        ValidationReport {
            checks,
            warnings,
            tolerance: *tol,
        }
    }

    fn omega_is_trivial(&self) -> bool {
        self.in_commutant(&self.triple.dirac).0
    }

    /// Orthonormal basis of the span of `a [D, b]`.
    pub fn omega1(&self) -> Result<&MatrixSubspace, TripleError> {
        if let Some(s) = self.omega1.get() {
            return Ok(s);
        }
        let d = &self.triple.dirac;
        let cut = self.tol.threshold(self.d_norm);
        let comms: Vec<ComplexMatrix> = self
            .basis
            .iter()
            .map(|b| commutator(d, b))
            .filter(|c| linalg::norm(c) > cut)
            .collect();
        let mut products = Vec::with_capacity(self.basis.len() * comms.len());
        for a in &self.basis {
            for c in &comms {
                let p = a * c;
                if linalg::norm(&p) > cut {
                    products.push(p);
                }
            }
        }
        let space = if products.is_empty() {
            MatrixSubspace::zero(self.triple.dim_h())
        } else {
            orthonormalize(&products, &self.tol)?
        };
        let _ = self.omega1.set(space);
        Ok(self.omega1.get().expect("just set"))
    }

    /// The *-algebra generated by `A` and `Omega^1`.
    ///
    /// Built from the generators `g` of `A` and the commutators `[D, g]`:
    /// by `[D, ab] = a[D, b] + [D, a]b` these generate every `a[D, b]`, with
    /// far fewer multipliers than a basis of `Omega^1`. Containment of
    /// `Omega^1` is checked on the result.
    pub fn clifford(&self) -> Result<StarAlgebra, TripleError> {
        let d = &self.triple.dirac;
        let mut gens = self.triple.generators.clone();
        gens.extend(self.triple.generators.iter().map(|g| commutator(d, g)));
        let cl = generated_algebra(&gens, true, &self.tol)?;
        for x in self.omega1()?.basis() {
            if !cl.contains(&x, &self.tol)? {
                return Err(TripleError::Inconsistent(
                    "Omega^1 is not contained in the Clifford algebra".into(),
                ));
            }
        }
        Ok(cl)
    }

    pub fn decompose(&self) -> Result<&DiracDecomposition, TripleError> {
        if let Some(dec) = self.decomposition.get() {
            return Ok(dec);
        }
        let dec = self.build_decomposition()?;
        let _ = self.decomposition.set(dec);
        Ok(self.decomposition.get().expect("just set"))
    }

    fn build_decomposition(&self) -> Result<DiracDecomposition, TripleError> {
        let t = self.triple;
        let n = t.dim_h();
        let computed;
        let w = if self.algebra.structure().is_some() {
            &self.algebra
        } else {
            computed = wedderburn(&self.algebra, &self.tol, DECOMPOSE_SEED)?;
            &computed
        };
        let ps: Vec<ComplexMatrix> = w
            .structure()
            .expect("wedderburn fills the structure")
            .iter()
            .map(|b| b.projection.clone())
            .collect();
        let qs: Vec<ComplexMatrix> = ps.iter().map(|p| t.j.opposite(p)).collect();
        let nb = ps.len();

        let mut r = Vec::with_capacity(nb * nb);
        for p in &ps {
            for q in &qs {
                r.push(p * q);
            }
        }
        let right: Vec<ComplexMatrix> = r.iter().map(|x| &t.dirac * x).collect();
        let mut blocks = Vec::with_capacity(r.len() * r.len());
        let (mut d0, mut d1, mut d2, mut dr) = (
            ComplexMatrix::zeros(n, n),
            ComplexMatrix::zeros(n, n),
            ComplexMatrix::zeros(n, n),
            ComplexMatrix::zeros(n, n),
        );
        for (ij, left) in r.iter().enumerate() {
            let (i, j) = (ij / nb, ij % nb);
            for (kl, dr_kl) in right.iter().enumerate() {
                let (k, l) = (kl / nb, kl % nb);
                let block = left * dr_kl;
                match (i == k, j == l) {
                    (false, true) => d0 += &block,
                    (true, false) => d1 += &block,
                    (false, false) => d2 += &block,
                    (true, true) => dr += &block,
                }
                blocks.push(block);
            }
        }

        let dec = DiracDecomposition {
            d0,
            d1,
            d2,
            dr,
            projections_p: ps,
            projections_q: qs,
            blocks,
        };
        self.check_decomposition(&dec)?;
        Ok(dec)
    }

    fn check_decomposition(&self, dec: &DiracDecomposition) -> Result<(), TripleError> {
        let t = self.triple;
        let cut = self.tol.threshold(self.d_norm);
        let eps_p = t.signs.epsilon_prime.value();
        let sum = &dec.d0 + &dec.d1 + &dec.d2 + &dec.dr;
        let mut failures = Vec::new();
        if linalg::norm(&(sum - &t.dirac)) > cut {
            failures.push("parts do not sum to D".to_string());
        }
        for (name, part) in [
            ("D0", &dec.d0),
            ("D1", &dec.d1),
            ("D2", &dec.d2),
            ("D_R", &dec.dr),
        ] {
            if linalg::norm(&(part - part.adjoint())) > cut {
                failures.push(format!("{name} is not self-adjoint"));
            }
        }
        let pairs = [
            ("J D0 J^-1 = e' D1", &dec.d0, &dec.d1),
            ("J D2 J^-1 = e' D2", &dec.d2, &dec.d2),
            ("J D_R J^-1 = e' D_R", &dec.dr, &dec.dr),
        ];
        for (name, x, y) in pairs {
            if linalg::norm(&(t.j.conjugate(x) - y.scale(eps_p))) > cut {
                failures.push(format!("{name} fails"));
            }
        }
        if failures.is_empty() {
            Ok(())
        } else {
            Err(TripleError::Inconsistent(failures.join("; ")))
        }
    }

    pub fn first_order_via_decomposition(&self) -> Result<FirstOrderVerdict, TripleError> {
        let dec = self.decompose()?;
        let threshold = self.tol.threshold(self.d_norm);
        let d2_norm = linalg::norm(&dec.d2);
        let d1_commutator = self.commutator_with_algebra(&dec.d1);
        let dr_residual = self.first_order_residual(&dec.dr);
        let direct_residual = self.first_order_residual(&self.triple.dirac);
        let witness = if d2_norm > threshold {
            Some(FirstOrderWitness::D2Nonzero)
        } else if d1_commutator > threshold {
            Some(FirstOrderWitness::D1NotInCommutant)
        } else if dr_residual > threshold {
            Some(FirstOrderWitness::DrViolatesFirstOrder)
        } else {
            None
        };
        let holds = witness.is_none();
        if holds != (direct_residual <= threshold) {
            return Err(TripleError::Inconsistent(format!(
                "decomposition gives 1st order = {holds}, direct residual {direct_residual:.3e} vs threshold {threshold:.3e}"
            )));
        }
        Ok(FirstOrderVerdict {
            holds,
            witness,
            d2_norm,
            d1_commutator,
            dr_residual,
            direct_residual,
            threshold,
        })
    }

    /// `max ||[[D,a],[D,b]°]||` over basis pairs.
    pub fn second_order_residual(&self) -> f64 {
        let d = &self.triple.dirac;
        let comms: Vec<ComplexMatrix> = self.basis.iter().map(|a| commutator(d, a)).collect();
        let opps: Vec<ComplexMatrix> = comms.iter().map(|c| self.triple.j.opposite(c)).collect();
        max_of(
            comms
                .iter()
                .flat_map(|c| opps.iter().map(move |o| linalg::norm(&commutator(c, o)))),
        )
    }

    pub fn second_order(&self) -> Result<SecondOrderVerdict, TripleError> {
        let residual = self.second_order_residual();
        let threshold = self.tol.threshold(self.d_norm * self.d_norm);
        let holds = residual <= threshold;
        let dec = self.decompose()?;
        let d0_d1 = if self.in_commutant(&dec.dr).0 {
            let norm = linalg::norm(&commutator(&dec.d0, &dec.d1));
            let check = CommutatorCheck {
                norm,
                threshold,
                vanishes: norm <= threshold,
            };
            if check.vanishes != holds {
                return Err(TripleError::Inconsistent(format!(
                    "2nd order residual {residual:.3e} but ||[D0, D1]|| = {norm:.3e} (threshold {threshold:.3e})"
                )));
            }
            Some(check)
        } else {
            None
        };
        Ok(SecondOrderVerdict {
            holds,
            residual,
            threshold,
            d0_d1,
        })
    }

    pub fn hodge_analysis(&self) -> Result<HodgeAnalysis, TripleError> {
        let omega1_dim = self.omega1()?.dim();
        let clifford = self.clifford()?;
        let commutant = algebra_commutant(&clifford, &self.tol)?;
        let opposite = circle_algebra(&clifford, &self.triple.j)?;
        // same decisions as subspace_contains / subspace_equal, sharing
        // the projections
        let cut = self.tol.threshold(1.0);
        let outside = commutant.space().outside_residuals(opposite.space())?;
        let missing = opposite.space().outside_residuals(commutant.space())?;
        let opposite_in_commutant = outside.iter().all(|&r| r <= cut);
        let projector_distance = outside
            .iter()
            .chain(&missing)
            .map(|r| r * r)
            .sum::<f64>()
            .sqrt();
        let holds = commutant.dim() == opposite.dim() && projector_distance <= cut;
        let report = HodgeReport {
            holds,
            omega1_dim,
            clifford_dim: clifford.dim(),
            commutant_dim: commutant.dim(),
            opposite_dim: opposite.dim(),
            opposite_in_commutant,
            projector_distance,
            degenerate: omega1_dim == 0,
        };
        Ok(HodgeAnalysis {
            report,
            clifford,
            commutant,
            opposite,
        })
    }

    pub fn hodge(&self) -> Result<HodgeReport, TripleError> {
        Ok(self.hodge_analysis()?.report)
    }
}

/// `A_C`, the unital complex *-algebra generated by the generators.
pub fn complex_algebra(
    t: &RealSpectralTriple,
    tol: &Tolerance,
) -> Result<StarAlgebra, TripleError> {
    Ok(generated_algebra(&t.generators, true, tol)?)
}

pub fn validate(t: &RealSpectralTriple, tol: &Tolerance) -> Result<ValidationReport, TripleError> {
    Ok(TripleAnalysis::new(t, tol)?.validate())
}

pub fn omega1(t: &RealSpectralTriple, tol: &Tolerance) -> Result<MatrixSubspace, TripleError> {
    Ok(TripleAnalysis::new(t, tol)?.omega1()?.clone())
}

pub fn clifford(t: &RealSpectralTriple, tol: &Tolerance) -> Result<StarAlgebra, TripleError> {
    TripleAnalysis::new(t, tol)?.clifford()
}

pub fn decompose(
    t: &RealSpectralTriple,
    tol: &Tolerance,
) -> Result<DiracDecomposition, TripleError> {
    Ok(TripleAnalysis::new(t, tol)?.decompose()?.clone())
}

pub fn first_order_via_decomposition(
    t: &RealSpectralTriple,
    tol: &Tolerance,
) -> Result<FirstOrderVerdict, TripleError> {
    TripleAnalysis::new(t, tol)?.first_order_via_decomposition()
}

pub fn second_order(
    t: &RealSpectralTriple,
    tol: &Tolerance,
) -> Result<SecondOrderVerdict, TripleError> {
    TripleAnalysis::new(t, tol)?.second_order()
}

pub fn hodge(t: &RealSpectralTriple, tol: &Tolerance) -> Result<HodgeReport, TripleError> {
    TripleAnalysis::new(t, tol)?.hodge()
}

/// Small triples used as worked examples and regression fixtures.
pub mod toys {
    use super::*;
    use crate::linalg::{kron, matrix_unit, ComplexMatrix};

    /// Swap `e_i ⊗ e_j <-> e_j ⊗ e_i` on `C^2 ⊗ C^2`, i.e. `x -> x^t` on `M_2`.
    fn transpose_permutation() -> ComplexMatrix {
        let mut c = ComplexMatrix::zeros(4, 4);
        for i in 0..2 {
            for j in 0..2 {
                c[(i * 2 + j, j * 2 + i)] = linalg::ONE;
            }
        }
        c
    }

    fn m2_triple(dirac: ComplexMatrix) -> RealSpectralTriple {
        let tol = Tolerance::default();
        let gens = (0..4)
            .map(|k| kron(&matrix_unit(2, k / 2, k % 2), &identity(2)))
            .collect();
        let j = AntilinearMap::new(transpose_permutation(), &tol).expect("permutation is unitary");
        let signs = SignTriple {
            epsilon: Sign::Plus,
            epsilon_prime: Sign::Plus,
            epsilon_double_prime: None,
        };
        RealSpectralTriple::new(gens, dirac, None, j, signs).expect("shapes agree")
    }

    /// `M_2` acting on itself by left multiplication, `J x = x^*`, and
    /// `D = d d°` with `d = e11`.
    pub fn m2_product() -> RealSpectralTriple {
        let e11 = matrix_unit(2, 0, 0);
        m2_triple(kron(&e11, &e11))
    }

    /// As [`m2_product`] with `D = d + d°`.
    pub fn m2_sum() -> RealSpectralTriple {
        let e11 = matrix_unit(2, 0, 0);
        m2_triple(kron(&e11, &identity(2)) + kron(&identity(2), &e11))
    }

    /// Scalars on `C^2`, `D = sigma_x`, `J` = componentwise conjugation.
    pub fn scalar_sigma_x() -> RealSpectralTriple {
        let tol = Tolerance::default();
        let sx = linalg::from_rows(&[&[linalg::ZERO, linalg::ONE], &[linalg::ONE, linalg::ZERO]]);
        let j = AntilinearMap::new(identity(2), &tol).expect("identity is unitary");
        let signs = SignTriple {
            epsilon: Sign::Plus,
            epsilon_prime: Sign::Plus,
            epsilon_double_prime: None,
        };
        RealSpectralTriple::new(vec![identity(2)], sx, None, j, signs).expect("shapes agree")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{kron, matrix_unit};

    #[test]
    fn m2_toy_circle_is_right_multiplication() {
        let t = toys::m2_sum();
        let b = matrix_unit(2, 0, 1);
        let lb = kron(&b, &identity(2));
        assert_eq!(t.j().opposite(&lb), kron(&identity(2), &b.transpose()));
    }

    #[test]
    fn product_toy_fails_first_order_at_d_r() {
        let tol = Tolerance::default();
        let t = toys::m2_product();
        let report = validate(&t, &tol).unwrap();
        assert!(!report.check("first order").unwrap().passed);
        assert!(report.check("reality").unwrap().passed);
        let v = first_order_via_decomposition(&t, &tol).unwrap();
        assert!(!v.holds);
        assert_eq!(v.witness, Some(FirstOrderWitness::DrViolatesFirstOrder));
        assert_eq!(v.witness.unwrap().to_string(), "D_R violates 1st order");
    }

    #[test]
    fn sum_toy_passes_first_and_second_order() {
        let tol = Tolerance::default();
        let t = toys::m2_sum();
        let a = TripleAnalysis::new(&t, &tol).unwrap();
        assert!(a.validate().all_passed());
        assert!(a.first_order_via_decomposition().unwrap().holds);
        let s = a.second_order().unwrap();
        assert!(s.holds);
        // D_R = D is not in A', so no [D0, D1] cross-check applies
        assert!(s.d0_d1.is_none());
        assert!(!a.in_commutant(&a.decompose().unwrap().dr).0);
    }

    #[test]
    fn zero_dirac_is_vacuous() {
        let tol = Tolerance::default();
        let t = toys::m2_sum()
            .with_dirac(ComplexMatrix::zeros(4, 4))
            .unwrap();
        let a = TripleAnalysis::new(&t, &tol).unwrap();
        let report = a.validate();
        assert!(report.all_passed());
        assert_eq!(report.warnings, vec![DEGENERATE_OMEGA_WARNING.to_string()]);
        assert!(a.first_order_via_decomposition().unwrap().holds);
        assert!(a.second_order().unwrap().holds);
        assert_eq!(a.omega1().unwrap().dim(), 0);
        assert_eq!(a.clifford().unwrap().dim(), 4);
    }

    #[test]
    fn scalar_toy_regression() {
        let tol = Tolerance::default();
        let t = toys::scalar_sigma_x();
        let a = TripleAnalysis::new(&t, &tol).unwrap();
        assert!(a.validate().all_passed());
        let h = a.hodge().unwrap();
        assert!(h.degenerate);
        assert_eq!((h.clifford_dim, h.commutant_dim, h.opposite_dim), (1, 4, 1));
        assert!(h.opposite_in_commutant);
        assert!(!h.holds);
    }

    #[test]
    fn decomposition_of_m2_toy_is_all_d_r() {
        let tol = Tolerance::default();
        let t = toys::m2_sum();
        let dec = decompose(&t, &tol).unwrap();
        assert_eq!(dec.block_count(), 1);
        assert_eq!(
            linalg::norm(&dec.d0) + linalg::norm(&dec.d1) + linalg::norm(&dec.d2),
            0.0
        );
        assert!(linalg::norm(&(&dec.dr - t.dirac())) < 1e-12);
        assert!(dec.block_adjoint_residual() < 1e-12);
    }

    #[test]
    fn constructor_rejects_bad_shapes() {
        let tol = Tolerance::default();
        let j = AntilinearMap::new(identity(2), &tol).unwrap();
        let signs = SignTriple {
            epsilon: Sign::Plus,
            epsilon_prime: Sign::Plus,
            epsilon_double_prime: None,
        };
        assert!(matches!(
            RealSpectralTriple::new(vec![], identity(2), None, j.clone(), signs),
            Err(TripleError::NoGenerators)
        ));
        assert!(matches!(
            RealSpectralTriple::new(vec![identity(3)], identity(2), None, j.clone(), signs),
            Err(TripleError::Linalg(_)) | Err(TripleError::Dimension(_))
        ));
        assert!(matches!(
            RealSpectralTriple::new(vec![identity(2)], identity(2), Some(identity(2)), j, signs),
            Err(TripleError::SignMismatch)
        ));
    }

    #[test]
    fn wrong_sign_is_reported() {
        let tol = Tolerance::default();
        let t = toys::scalar_sigma_x();
        let bad = SignTriple {
            epsilon: Sign::Minus,
            ..t.signs()
        };
        let t = RealSpectralTriple::new(
            t.generators().to_vec(),
            t.dirac().clone(),
            None,
            t.j().clone(),
            bad,
        )
        .unwrap();
        let report = validate(&t, &tol).unwrap();
        let failed: Vec<_> = report.failures().map(|c| c.name).collect();
        assert_eq!(failed, vec!["J squared sign"]);
    }

    #[test]
    fn sign_conversions() {
        assert_eq!(Sign::try_from(1), Ok(Sign::Plus));
        assert_eq!(Sign::try_from(-1), Ok(Sign::Minus));
        assert_eq!(Sign::try_from(0), Err(0));
        assert_eq!(Sign::Minus.to_string(), "-1");
    }
}
