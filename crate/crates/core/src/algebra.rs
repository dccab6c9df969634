//! Finite-dimensional *-algebras of operators: generated algebras,
//! commutants, centers, Wedderburn structure and the opposite action
//! `xi -> J xi^* J^{-1}` induced by an antilinear isometry.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use thiserror::Error;

use crate::linalg::{
    self, c64, cluster_sorted, common_dim, commutator, hermitian_eigen, identity, nullspace,
    orthonormalize, subspace_contains, ComplexMatrix, ComplexVector, LinalgError, MatrixSubspace,
    Op, Tolerance, C64,
};

/// Seed for the generic elements drawn inside [`commutant`].
const COMMUTANT_SEED: u64 = 0x5eed_c0a1_7a47_0001;
/// Relative eigenvalue gap below which central eigenvalues are merged.
pub const CLUSTER_GAP: f64 = 1e-6;
/// Clusters closer than this (relative to the spread) count as ambiguous.
const AMBIGUOUS_GAP: f64 = 1e-4;
pub const MAX_WEDDERBURN_RETRIES: u32 = 8;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AlgebraError {
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("no generators given for a non-unital algebra")]
    NoGenerators,
    #[error("antilinear map is not isometric: ||C^*C - 1|| = {residual:.3e}")]
    NotIsometric { residual: f64 },
    #[error("generator set is not closed under adjoints")]
    NotSelfAdjointSet,
    #[error("subspace is not a *-algebra: {0}")]
    NotClosed(String),
    #[error("central eigenvalue clusters stayed ambiguous after {attempts} attempts")]
    ClusterAmbiguity { attempts: u32 },
    #[error("inconsistent Wedderburn structure: {0}")]
    InconsistentStructure(String),
}

/// Antilinear operator `v -> c * conj(v)` on `C^n`.
#[derive(Debug, Clone, PartialEq)]
pub struct AntilinearMap {
    c: ComplexMatrix,
}

impl AntilinearMap {
    /// Validates that the linear part is unitary.
    pub fn new(c: ComplexMatrix, tol: &Tolerance) -> Result<Self, AlgebraError> {
        let n = linalg::ensure_square(&c)?;
        linalg::ensure_finite(&c)?;
        let residual = linalg::norm(&(c.adjoint() * &c - identity(n)));
        if !tol.is_negligible(residual, (n as f64).sqrt()) {
            return Err(AlgebraError::NotIsometric { residual });
        }
        Ok(Self { c })
    }

    pub fn linear_part(&self) -> &ComplexMatrix {
        &self.c
    }

    pub fn dim(&self) -> usize {
        self.c.nrows()
    }

    pub fn apply(&self, v: &ComplexVector) -> ComplexVector {
        &self.c * v.map(|z| z.conj())
    }

    /// `J^2 = c * conj(c)`, a linear operator.
    pub fn square(&self) -> ComplexMatrix {
        &self.c * linalg::conj(&self.c)
    }

    /// The sign `e` with `J^2 = e * 1`, when there is one.
    pub fn sign(&self, tol: &Tolerance) -> Option<i8> {
        let sq = self.square();
        let n = self.dim();
        let scale = (n as f64).sqrt();
        [1i8, -1].into_iter().find(|&s| {
            let r = linalg::norm(&(&sq - identity(n).scale(s as f64)));
            tol.is_negligible(r, scale)
        })
    }

    /// `J x J^{-1} = c conj(x) c^*`.
    pub fn conjugate(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.c * linalg::conj(x) * self.c.adjoint()
    }

    /// `x° = J x^* J^{-1} = c x^t c^*`.
    pub fn opposite(&self, x: &ComplexMatrix) -> ComplexMatrix {
        &self.c * x.transpose() * self.c.adjoint()
    }

    /// `U J U^*` for a unitary `u`: linear part `u c u^t`.
    pub fn transformed(&self, u: &ComplexMatrix) -> AntilinearMap {
        AntilinearMap {
            c: u * &self.c * u.transpose(),
        }
    }
}

/// `xi° = J xi^* J^{-1}`, evaluated in closed form as `C xi^t C^{-1}`.
pub fn circle(xi: &ComplexMatrix, j: &AntilinearMap) -> Result<ComplexMatrix, AlgebraError> {
    let n = linalg::ensure_square(xi)?;
    if n != j.dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "operator on C^{n}, antilinear map on C^{}",
            j.dim()
        ))
        .into());
    }
    Ok(j.opposite(xi))
}

/// One simple summand `M_m(C)` acting with multiplicity `k`.
#[derive(Debug, Clone)]
pub struct WedderburnBlock {
    pub m: usize,
    pub k: usize,
    /// Minimal central projection onto the isotypic component.
    pub projection: ComplexMatrix,
}

impl WedderburnBlock {
    pub fn rank(&self) -> usize {
        self.m * self.k
    }
}

#[derive(Debug, Clone)]
pub struct StarAlgebra {
    space: MatrixSubspace,
    generators: Vec<ComplexMatrix>,
    unital: bool,
    structure: Option<Vec<WedderburnBlock>>,
}

impl StarAlgebra {
    /// Wraps a subspace known to be a *-algebra. `generators` must generate
    /// it; pass the basis when nothing smaller is known.
    pub fn from_parts(space: MatrixSubspace, generators: Vec<ComplexMatrix>, unital: bool) -> Self {
        Self {
            space,
            generators,
            unital,
            structure: None,
        }
    }

    pub fn space(&self) -> &MatrixSubspace {
        &self.space
    }

    pub fn dim(&self) -> usize {
        self.space.dim()
    }

    pub fn ambient_dim(&self) -> usize {
        self.space.ambient_dim()
    }

    pub fn generators(&self) -> &[ComplexMatrix] {
        &self.generators
    }

    pub fn basis(&self) -> Vec<ComplexMatrix> {
        self.space.basis()
    }

    pub fn is_unital(&self) -> bool {
        self.unital
    }

    pub fn structure(&self) -> Option<&[WedderburnBlock]> {
        self.structure.as_deref()
    }

    /// `(m_i, k_i)` pairs of the Wedderburn blocks, if computed.
    pub fn block_shape(&self) -> Option<Vec<(usize, usize)>> {
        self.structure
            .as_ref()
            .map(|b| b.iter().map(|blk| (blk.m, blk.k)).collect())
    }

    pub fn contains(&self, x: &ComplexMatrix, tol: &Tolerance) -> Result<bool, AlgebraError> {
        Ok(subspace_contains(&self.space, x, tol)?)
    }

    /// Conjugates every element by a unitary: `x -> u x u^*`.
    pub fn conjugated_by(
        &self,
        u: &ComplexMatrix,
        tol: &Tolerance,
    ) -> Result<StarAlgebra, AlgebraError> {
        let ud = u.adjoint();
        let basis: Vec<ComplexMatrix> = self.basis().iter().map(|b| u * b * &ud).collect();
        let generators = self.generators.iter().map(|g| u * g * &ud).collect();
        let space = orthonormalize(&basis, tol)?;
        Ok(StarAlgebra {
            space,
            generators,
            unital: self.unital,
            structure: None,
        })
    }

    /// Probabilistic closure check: adjoint and product of two random
    /// elements stay in the space.
    pub fn check_closed(&self, tol: &Tolerance, seed: u64) -> Result<(), AlgebraError> {
        if self.space.is_empty() {
            return Ok(());
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let x = random_element(&self.space, &mut rng);
        let y = random_element(&self.space, &mut rng);
        if !subspace_contains(&self.space, &x.adjoint(), tol)? {
            return Err(AlgebraError::NotClosed("not closed under adjoint".into()));
        }
        if !subspace_contains(&self.space, &(&x * &y), tol)? {
            return Err(AlgebraError::NotClosed("not closed under products".into()));
        }
        if self.unital && !subspace_contains(&self.space, &identity(self.ambient_dim()), tol)? {
            return Err(AlgebraError::NotClosed(
                "identity missing from a unital algebra".into(),
            ));
        }
        Ok(())
    }
}

fn gaussian_c64<R: Rng>(rng: &mut R) -> C64 {
    c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

fn random_element<R: Rng>(space: &MatrixSubspace, rng: &mut R) -> ComplexMatrix {
    let coeffs: Vec<C64> = (0..space.dim()).map(|_| gaussian_c64(rng)).collect();
    space.combination(&coeffs)
}

/// Hermitian and anti-Hermitian parts `(x + x^*)/2`, `(x - x^*)/2i`,
/// dropping the ones that are negligible next to `x`.
fn hermitian_parts(mats: &[ComplexMatrix], tol: &Tolerance) -> Vec<ComplexMatrix> {
    let mut out = Vec::with_capacity(2 * mats.len());
    for x in mats {
        let xd = x.adjoint();
        let re = (x + &xd).unscale(2.0);
        let im = (x - &xd) * c64(0.0, -0.5);
        for h in [re, im] {
            if linalg::norm(&h) > tol.threshold(linalg::norm(x)) {
                out.push(h);
            }
        }
    }
    out
}

fn random_real_combination<R: Rng>(mats: &[ComplexMatrix], n: usize, rng: &mut R) -> ComplexMatrix {
    let mut acc = ComplexMatrix::zeros(n, n);
    for m in mats {
        let scale = linalg::norm(m);
        let r: f64 = rng.sample(StandardNormal);
        acc += m.scale(r / scale);
    }
    acc
}

/// Smallest *-subalgebra containing `generators` (and `1` when `unital`).
///
/// The span of the generators and their adjoints is repeatedly
/// left-multiplied by that same span until no new direction appears; only
/// directions added in the previous round are multiplied again.
pub fn generated_algebra(
    generators: &[ComplexMatrix],
    unital: bool,
    tol: &Tolerance,
) -> Result<StarAlgebra, AlgebraError> {
    let n = common_dim(generators)?.ok_or(AlgebraError::NoGenerators)?;
    for g in generators {
        linalg::ensure_finite(g)?;
    }
    let mut with_adjoints: Vec<ComplexMatrix> = generators.to_vec();
    with_adjoints.extend(generators.iter().map(|g| g.adjoint()));
    let multipliers = orthonormalize(&with_adjoints, tol)?.basis();

    let mut space = MatrixSubspace::zero(n);
    let mut seeds: Vec<&ComplexMatrix> = Vec::with_capacity(multipliers.len() + 1);
    let unit = identity(n);
    if unital {
        seeds.push(&unit);
    }
    seeds.extend(multipliers.iter());
    let mut added = space.insert_batch(pack(&seeds, n), 0.0, tol);
    while added > 0 && space.dim() < n * n {
        let start = space.dim() - added;
        let mut products = Vec::with_capacity(added * multipliers.len());
        for f in start..space.dim() {
            let f = space.basis_element(f);
            for g in &multipliers {
                products.push(linalg::mul(g, &f));
            }
        }
        // products of unit vectors carry roundoff of order eps, whatever
        // their own size
        let packed = pack(&products.iter().collect::<Vec<_>>(), n);
        added = space.insert_batch(packed, 1.0, tol);
    }
    Ok(StarAlgebra {
        space,
        generators: generators.to_vec(),
        unital,
        structure: None,
    })
}

/// Vectorized operators side by side, `n^2 x len`.
fn pack(mats: &[&ComplexMatrix], n: usize) -> ComplexMatrix {
    let mut x = ComplexMatrix::zeros(n * n, mats.len());
    for (j, m) in mats.iter().enumerate() {
        x.column_mut(j).copy_from_slice(m.as_slice());
    }
    x
}

/// Commutant of a single Hermitian operator: block-diagonal operators in
/// its eigenbasis. Nearly equal eigenvalues are merged, which can only
/// enlarge the result.
fn spectral_commutant(h: &ComplexMatrix) -> MatrixSubspace {
    let n = h.nrows();
    let (vals, vecs) = hermitian_eigen(h);
    let scale = vals.iter().fold(0.0f64, |a, v| a.max(v.abs()));
    let clusters = cluster_sorted(&vals, CLUSTER_GAP * scale.max(f64::MIN_POSITIVE));
    let mut columns = Vec::new();
    for cluster in &clusters {
        for &a in cluster {
            for &b in cluster {
                let op = &vecs[a] * vecs[b].adjoint();
                columns.push(ComplexVector::from_column_slice(op.as_slice()));
            }
        }
    }
    MatrixSubspace::from_orthonormal_columns(n, columns)
}

/// Elements of `space` commuting with `g`.
fn restrict_to_commutant(
    space: &MatrixSubspace,
    g: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<MatrixSubspace, AlgebraError> {
    let n = space.ambient_dim();
    let d = space.dim();
    if d == 0 {
        return Ok(space.clone());
    }
    let mut m = ComplexMatrix::zeros(n * n, d);
    for i in 0..d {
        let v = space.basis_element(i);
        let c = commutator(&v, g);
        m.column_mut(i).copy_from_slice(c.as_slice());
    }
    // basis elements have unit norm, so a commutator map that is roundoff
    // on the scale of `g` is zero; relative cuts would split the noise
    let largest = m.column_iter().map(|c| c.norm()).fold(0.0, f64::max);
    if largest <= tol.threshold(linalg::norm(g)) {
        return Ok(space.clone());
    }
    let kernel = match gram_kernel(&m, tol) {
        Some(k) => k,
        None => {
            let vecs = nullspace(&m, tol)?;
            let mut k = ComplexMatrix::zeros(d, vecs.len());
            for (j, v) in vecs.iter().enumerate() {
                k.column_mut(j).copy_from(v);
            }
            k
        }
    };
    let combined = linalg::mul(&space.frame(), &kernel);
    let columns = combined.column_iter().map(|c| c.into_owned()).collect();
    Ok(MatrixSubspace::from_orthonormal_columns(n, columns))
}

/// Kernel of `m` from the eigenvectors of `m^* m`. Candidates are taken
/// with a loose cut and then each is required to pass the usual singular
/// value threshold on `||m k||`; `None` asks the caller to fall back to
/// the SVD.
fn gram_kernel(m: &ComplexMatrix, tol: &Tolerance) -> Option<ComplexMatrix> {
    const LOOSE: f64 = 1e-12;
    let gram = linalg::mul_op(m, Op::Adjoint, m, Op::Plain);
    let (vals, vecs) = hermitian_eigen(&gram);
    let lmax = vals.last().copied().unwrap_or(0.0).max(0.0);
    let sigma_max = lmax.sqrt();
    let cut = LOOSE * lmax;
    let picked: Vec<&ComplexVector> = vals
        .iter()
        .zip(&vecs)
        .filter(|(l, _)| **l <= cut)
        .map(|(_, v)| v)
        .collect();
    let mut k = ComplexMatrix::zeros(m.ncols(), picked.len());
    for (j, v) in picked.iter().enumerate() {
        k.column_mut(j).copy_from(*v);
    }
    if picked.is_empty() {
        return Some(k);
    }
    let image = linalg::mul(m, &k);
    let thr = tol.threshold(sigma_max);
    image.column_iter().all(|c| c.norm() <= thr).then_some(k)
}

/// Intersects `space` with the commutant of every matrix in `gens`.
///
/// A random element of the current space is tested first; the expensive
/// restriction only runs when it fails to commute with `g`.
fn restrict_all<R: Rng>(
    mut space: MatrixSubspace,
    gens: &[ComplexMatrix],
    tol: &Tolerance,
    rng: &mut R,
) -> Result<MatrixSubspace, AlgebraError> {
    for g in gens {
        if space.is_empty() {
            break;
        }
        let gn = linalg::norm(g);
        if gn == 0.0 {
            continue;
        }
        let x = random_element(&space, rng);
        let residual = linalg::norm(&commutator(&x, g));
        if residual <= tol.threshold(linalg::norm(&x) * gn) {
            continue;
        }
        space = restrict_to_commutant(&space, g, tol)?;
    }
    Ok(space)
}

fn is_self_adjoint_set(gens: &[ComplexMatrix], tol: &Tolerance) -> Result<bool, AlgebraError> {
    let span = orthonormalize(gens, tol)?;
    for g in gens {
        if !subspace_contains(&span, &g.adjoint(), tol)? {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `{xi : [xi, g] = 0 for all g}` for a generator set closed under adjoints.
///
/// The search starts from the commutant of two generic Hermitian elements of
/// the generator span (cheap to obtain by diagonalization) and is then cut
/// down by every generator in turn, so the result is exactly the joint
/// kernel of the maps `xi -> g xi - xi g`.
pub fn commutant(
    generators: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<StarAlgebra, AlgebraError> {
    let n = common_dim(generators)?.ok_or(AlgebraError::NoGenerators)?;
    if !is_self_adjoint_set(generators, tol)? {
        return Err(AlgebraError::NotSelfAdjointSet);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(COMMUTANT_SEED);
    let herm = hermitian_parts(generators, tol);
    let space = if herm.is_empty() {
        MatrixSubspace::full(n)
    } else {
        let h1 = random_real_combination(&herm, n, &mut rng);
        let h2 = random_real_combination(&herm, n, &mut rng);
        let start = spectral_commutant(&h1);
        restrict_to_commutant(&start, &h2, tol)?
    };
    let space = restrict_all(space, generators, tol, &mut rng)?;
    let basis = space.basis();
    let alg = StarAlgebra {
        space,
        generators: basis,
        unital: true,
        structure: None,
    };
    alg.check_closed(tol, COMMUTANT_SEED ^ 1)?;
    Ok(alg)
}

/// Commutant of an algebra, via its generating set.
pub fn algebra_commutant(b: &StarAlgebra, tol: &Tolerance) -> Result<StarAlgebra, AlgebraError> {
    let mut gens = b.generators.clone();
    gens.extend(b.generators.iter().map(|g| g.adjoint()));
    commutant(&gens, tol)
}

/// Center `b ∩ b'`.
pub fn center(b: &StarAlgebra, tol: &Tolerance) -> Result<MatrixSubspace, AlgebraError> {
    let mut rng = ChaCha8Rng::seed_from_u64(COMMUTANT_SEED ^ 2);
    let mut gens = b.generators.clone();
    gens.extend(b.generators.iter().map(|g| g.adjoint()));
    restrict_all(b.space.clone(), &gens, tol, &mut rng)
}

fn derived_seed(seed: u64, attempt: u32) -> u64 {
    // splitmix64 step
    let mut z = seed.wrapping_add(0x9e37_79b9_7f4a_7c15u64.wrapping_mul(attempt as u64 + 1));
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn block_sort_key(p: &ComplexMatrix) -> usize {
    (0..p.nrows())
        .find(|&i| p[(i, i)].re > 1e-6)
        .unwrap_or(p.nrows())
}

/// Fills in the Wedderburn structure `b ≅ ⊕ M_{m_i}(C) ⊗ 1_{k_i}`.
///
/// The minimal central projections are the spectral projections of a
/// random self-adjoint central element. Blocks are ordered by the first
/// basis vector in their support, then by `(m, k)`.
pub fn wedderburn(
    b: &StarAlgebra,
    tol: &Tolerance,
    seed: u64,
) -> Result<StarAlgebra, AlgebraError> {
    let n = b.ambient_dim();
    b.check_closed(tol, derived_seed(seed, u32::MAX))?;
    if !b.contains(&identity(n), tol)? {
        return Err(AlgebraError::NotClosed(
            "wedderburn needs a unital algebra".into(),
        ));
    }
    let z = center(b, tol)?;
    let herm = hermitian_parts(&z.basis(), tol);
    let basis = b.basis();

    for attempt in 0..MAX_WEDDERBURN_RETRIES {
        let mut rng = ChaCha8Rng::seed_from_u64(derived_seed(seed, attempt));
        let h = random_real_combination(&herm, n, &mut rng);
        let (vals, vecs) = hermitian_eigen(&h);
        // a trivial center gives h = c 1, whose spread is pure roundoff
        let spread = vals.last().unwrap() - vals.first().unwrap();
        let clusters = if z.dim() == 1 {
            vec![(0..n).collect()]
        } else {
            cluster_sorted(&vals, CLUSTER_GAP * spread)
        };
        if clusters.len() != z.dim() {
            continue;
        }
        let min_gap = clusters
            .windows(2)
            .map(|w| vals[w[1][0]] - vals[*w[0].last().unwrap()])
            .fold(f64::INFINITY, f64::min);
        if clusters.len() > 1 && min_gap < AMBIGUOUS_GAP * spread {
            continue;
        }
        let projections: Vec<ComplexMatrix> = clusters
            .iter()
            .map(|c| {
                let mut p = ComplexMatrix::zeros(n, n);
                for &i in c {
                    p += &vecs[i] * vecs[i].adjoint();
                }
                p
            })
            .collect();
        let mut central = true;
        for p in &projections {
            if !subspace_contains(&z, p, tol)? {
                central = false;
                break;
            }
        }
        if !central {
            continue;
        }

        let mut blocks = Vec::with_capacity(projections.len());
        for (p, cluster) in projections.into_iter().zip(&clusters) {
            let compressed: Vec<ComplexMatrix> = basis.iter().map(|x| &p * x * &p).collect();
            let dim = orthonormalize(&compressed, tol)?.dim();
            let m = (dim as f64).sqrt().round() as usize;
            if m == 0 || m * m != dim {
                return Err(AlgebraError::InconsistentStructure(format!(
                    "corner algebra has dimension {dim}, not a square"
                )));
            }
            let r = cluster.len();
            if r % m != 0 {
                return Err(AlgebraError::InconsistentStructure(format!(
                    "projection rank {r} not divisible by block size {m}"
                )));
            }
            blocks.push(WedderburnBlock {
                m,
                k: r / m,
                projection: p,
            });
        }
        let total: usize = blocks.iter().map(|blk| blk.m * blk.k).sum();
        let dim: usize = blocks.iter().map(|blk| blk.m * blk.m).sum();
        if total != n || dim != b.dim() {
            return Err(AlgebraError::InconsistentStructure(format!(
                "sum m_i k_i = {total} (expected {n}), sum m_i^2 = {dim} (expected {})",
                b.dim()
            )));
        }
        blocks.sort_by_key(|blk| (block_sort_key(&blk.projection), blk.m, blk.k));
        let mut out = b.clone();
        out.structure = Some(blocks);
        return Ok(out);
    }
    Err(AlgebraError::ClusterAmbiguity {
        attempts: MAX_WEDDERBURN_RETRIES,
    })
}

/// `B° = {xi° : xi in B}`.
pub fn circle_algebra(b: &StarAlgebra, j: &AntilinearMap) -> Result<StarAlgebra, AlgebraError> {
    if b.ambient_dim() != j.dim() {
        return Err(LinalgError::DimensionMismatch(format!(
            "algebra on C^{}, antilinear map on C^{}",
            b.ambient_dim(),
            j.dim()
        ))
        .into());
    }
    // x -> C x^t C^* preserves the Hilbert-Schmidt inner product, so the
    // images of an orthonormal basis are orthonormal
    let columns = b
        .basis()
        .iter()
        .map(|x| ComplexVector::from_column_slice(j.opposite(x).as_slice()))
        .collect();
    let space = MatrixSubspace::from_orthonormal_columns(b.ambient_dim(), columns);
    let generators = b.generators.iter().map(|g| j.opposite(g)).collect();
    Ok(StarAlgebra {
        space,
        generators,
        unital: b.unital,
        structure: None,
    })
}
