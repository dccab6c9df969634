//! Dense complex matrix utilities and tolerance-aware subspace primitives.
//!
//! Operators on `H = C^n` are plain `nalgebra` matrices over `Complex64`.
//! Linear subspaces of `End(H)` are stored as Hilbert-Schmidt orthonormal
//! frames of vectorized matrices.

use std::cmp::Ordering;

use nalgebra::{DMatrix, DVector, SVD};
use num_complex::Complex64;
use thiserror::Error;

pub type C64 = Complex64;
pub type ComplexMatrix = DMatrix<C64>;
pub type ComplexVector = DVector<C64>;

pub const ZERO: C64 = C64::new(0.0, 0.0);
pub const ONE: C64 = C64::new(1.0, 0.0);
pub const I: C64 = C64::new(0.0, 1.0);

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("expected a square matrix, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix has no rows or columns")]
    Empty,
    #[error("non-finite entry at ({row}, {col})")]
    NonFinite { row: usize, col: usize },
    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),
    #[error("singular value decomposition did not converge")]
    NoConvergence,
}

/// Threshold used for every rank and zero decision.
///
/// A quantity is treated as zero when it does not exceed
/// `max(abs_floor, rel * scale)`, where `scale` is the natural size of the
/// object being tested (largest singular value, norm of the input, ...).
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Tolerance {
    pub rel: f64,
    pub abs_floor: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            rel: 1e-10,
            abs_floor: 1e-12,
        }
    }
}

impl Tolerance {
    pub fn new(rel: f64, abs_floor: f64) -> Result<Self, LinalgError> {
        if !(rel.is_finite() && rel > 0.0) {
            return Err(LinalgError::InvalidTolerance(format!(
                "rel must be positive, got {rel}"
            )));
        }
        if !(abs_floor.is_finite() && abs_floor >= 0.0) {
            return Err(LinalgError::InvalidTolerance(format!(
                "abs_floor must be nonnegative, got {abs_floor}"
            )));
        }
        Ok(Self { rel, abs_floor })
    }

    /// Same floor, different relative threshold.
    pub fn with_rel(self, rel: f64) -> Self {
        Self { rel, ..self }
    }

    pub fn threshold(&self, scale: f64) -> f64 {
        self.abs_floor.max(self.rel * scale)
    }

    pub fn is_negligible(&self, value: f64, scale: f64) -> bool {
        value <= self.threshold(scale)
    }
}

pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

/// Matrix unit `e_{ij}` of size `n`, zero-based indices.
pub fn matrix_unit(n: usize, i: usize, j: usize) -> ComplexMatrix {
    let mut m = zeros(n);
    m[(i, j)] = ONE;
    m
}

/// Build a matrix from row-major real/imaginary pairs.
pub fn from_rows(rows: &[&[C64]]) -> ComplexMatrix {
    let r = rows.len();
    let c = rows.first().map_or(0, |row| row.len());
    ComplexMatrix::from_fn(r, c, |i, j| rows[i][j])
}

pub fn diag(entries: &[C64]) -> ComplexMatrix {
    ComplexMatrix::from_diagonal(&ComplexVector::from_column_slice(entries))
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize, LinalgError> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Err(LinalgError::Empty);
    }
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn ensure_finite(m: &ComplexMatrix) -> Result<(), LinalgError> {
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let z = m[(i, j)];
            if !(z.re.is_finite() && z.im.is_finite()) {
                return Err(LinalgError::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Checks that all matrices are square of a common size and returns it.
pub fn common_dim(mats: &[ComplexMatrix]) -> Result<Option<usize>, LinalgError> {
    let mut dim = None;
    for (idx, m) in mats.iter().enumerate() {
        let n = ensure_square(m)?;
        match dim {
            None => dim = Some(n),
            Some(d) if d != n => {
                return Err(LinalgError::DimensionMismatch(format!(
                    "matrix {idx} is {n}x{n}, expected {d}x{d}"
                )))
            }
            _ => {}
        }
    }
    Ok(dim)
}

pub fn kron(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    a.kronecker(b)
}

/// Left-to-right Kronecker product of several factors.
pub fn kron_all(factors: &[&ComplexMatrix]) -> ComplexMatrix {
    let mut iter = factors.iter();
    let first = match iter.next() {
        Some(f) => (*f).clone(),
        None => return identity(1),
    };
    iter.fold(first, |acc, f| acc.kronecker(*f))
}

pub fn dagger(a: &ComplexMatrix) -> ComplexMatrix {
    a.adjoint()
}

pub fn conj(a: &ComplexMatrix) -> ComplexMatrix {
    a.map(|z| z.conj())
}

pub fn transpose(a: &ComplexMatrix) -> ComplexMatrix {
    a.transpose()
}

fn check_same_square(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<(), LinalgError> {
    let n = ensure_square(a)?;
    let m = ensure_square(b)?;
    if n != m {
        return Err(LinalgError::DimensionMismatch(format!(
            "{n}x{n} vs {m}x{m}"
        )));
    }
    Ok(())
}

/// Commutator `ab - ba`.
pub fn comm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    check_same_square(a, b)?;
    Ok(commutator(a, b))
}

/// How an operand enters [`gemm`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Op {
    Plain,
    Adjoint,
}

/// `c = alpha * op(a) * op(b) + beta * c` through the blocked kernel.
pub(crate) fn gemm(
    alpha: C64,
    a: &ComplexMatrix,
    opa: Op,
    b: &ComplexMatrix,
    opb: Op,
    beta: C64,
    c: &mut ComplexMatrix,
) {
    // the kernel has no conjugation flag: adjoints are a conjugated copy read
    // with swapped strides
    let prepare = |m: &ComplexMatrix, op: Op| match op {
        Op::Plain => (None, m.nrows(), m.ncols(), 1isize, m.nrows() as isize),
        Op::Adjoint => (
            Some(conj(m)),
            m.ncols(),
            m.nrows(),
            m.nrows() as isize,
            1isize,
        ),
    };
    let (ca, m, k, rsa, csa) = prepare(a, opa);
    let (cb, kb, n, rsb, csb) = prepare(b, opb);
    assert!(
        k == kb && c.nrows() == m && c.ncols() == n,
        "gemm shape mismatch"
    );
    if m == 0 || n == 0 {
        return;
    }
    let pa = ca.as_ref().unwrap_or(a).as_ptr() as *const [f64; 2];
    let pb = cb.as_ref().unwrap_or(b).as_ptr() as *const [f64; 2];
    // SAFETY: Complex<f64> is repr(C) with layout [re, im]; the pointers and
    // strides describe the column-major storage of matrices of the checked
    // shapes, and `c` does not alias `a` or `b` (it is borrowed mutably).
    unsafe {
        matrixmultiply::zgemm(
            matrixmultiply::CGemmOption::Standard,
            matrixmultiply::CGemmOption::Standard,
            m,
            k,
            n,
            [alpha.re, alpha.im],
            pa,
            rsa,
            csa,
            pb,
            rsb,
            csb,
            [beta.re, beta.im],
            c.as_mut_ptr() as *mut [f64; 2],
            1,
            m as isize,
        );
    }
}

/// `op(a) * op(b)`.
pub(crate) fn mul_op(a: &ComplexMatrix, opa: Op, b: &ComplexMatrix, opb: Op) -> ComplexMatrix {
    let m = if opa == Op::Plain {
        a.nrows()
    } else {
        a.ncols()
    };
    let n = if opb == Op::Plain {
        b.ncols()
    } else {
        b.nrows()
    };
    let mut c = ComplexMatrix::zeros(m, n);
    gemm(ONE, a, opa, b, opb, ZERO, &mut c);
    c
}

/// Matrix product.
pub fn mul(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    mul_op(a, Op::Plain, b, Op::Plain)
}

/// Unchecked commutator for internal hot loops.
pub(crate) fn commutator(a: &ComplexMatrix, b: &ComplexMatrix) -> ComplexMatrix {
    let mut c = mul(a, b);
    gemm(-ONE, b, Op::Plain, a, Op::Plain, ONE, &mut c);
    c
}

pub fn anticomm(a: &ComplexMatrix, b: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    check_same_square(a, b)?;
    Ok(a * b + b * a)
}

pub fn norm(a: &ComplexMatrix) -> f64 {
    frobenius(a.as_slice())
}

pub(crate) fn frobenius(v: &[C64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `<a, b> = sum conj(a_k) b_k`.
pub(crate) fn dotc(a: &[C64], b: &[C64]) -> C64 {
    let mut re = 0.0;
    let mut im = 0.0;
    for (x, y) in a.iter().zip(b) {
        re += x.re * y.re + x.im * y.im;
        im += x.re * y.im - x.im * y.re;
    }
    C64::new(re, im)
}

/// `y -= c * x`
pub(crate) fn axpy_neg(c: C64, x: &[C64], y: &mut [C64]) {
    for (xi, yi) in x.iter().zip(y.iter_mut()) {
        *yi -= c * xi;
    }
}

pub fn is_hermitian(a: &ComplexMatrix, tol: &Tolerance) -> bool {
    let residual = norm(&(a - a.adjoint()));
    tol.is_negligible(residual, norm(a))
}

pub fn is_unitary(a: &ComplexMatrix, tol: &Tolerance) -> bool {
    if a.nrows() != a.ncols() {
        return false;
    }
    let n = a.nrows();
    let residual = norm(&(a.adjoint() * a - identity(n)));
    tol.is_negligible(residual, (n as f64).sqrt())
}

fn lex_cmp(a: &ComplexVector, b: &ComplexVector) -> Ordering {
    for (x, y) in a.iter().zip(b.iter()) {
        let o = x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im));
        if o != Ordering::Equal {
            return o;
        }
    }
    Ordering::Equal
}

/// Singular values (descending) together with the right singular vectors.
fn right_svd(m: &ComplexMatrix) -> Result<(Vec<f64>, Vec<ComplexVector>), LinalgError> {
    let (r, c) = m.shape();
    let padded;
    let work = if r < c {
        let mut p = ComplexMatrix::zeros(c, c);
        p.view_mut((0, 0), (r, c)).copy_from(m);
        padded = p;
        &padded
    } else {
        m
    };
    let svd = SVD::try_new(work.clone(), false, true, f64::EPSILON, 0)
        .ok_or(LinalgError::NoConvergence)?;
    let v_t = svd.v_t.ok_or(LinalgError::NoConvergence)?;
    let mut pairs: Vec<(f64, ComplexVector)> = svd
        .singular_values
        .iter()
        .enumerate()
        .map(|(i, &s)| (s, v_t.row(i).adjoint()))
        .collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    Ok(pairs.into_iter().unzip())
}

/// Orthonormal basis of the numerical kernel of `m`.
///
/// Right singular vectors whose singular value does not exceed
/// `max(abs_floor, rel * sigma_max)`, ordered by ascending singular value
/// with a lexicographic tie-break on components.
pub fn nullspace(m: &ComplexMatrix, tol: &Tolerance) -> Result<Vec<ComplexVector>, LinalgError> {
    if m.ncols() == 0 {
        return Ok(Vec::new());
    }
    if m.nrows() == 0 {
        return Ok((0..m.ncols())
            .map(|i| {
                let mut v = ComplexVector::zeros(m.ncols());
                v[i] = ONE;
                v
            })
            .collect());
    }
    let (sigma, vecs) = right_svd(m)?;
    let sigma_max = sigma.first().copied().unwrap_or(0.0);
    let thr = tol.threshold(sigma_max);
    let mut kernel: Vec<(f64, ComplexVector)> = sigma
        .into_iter()
        .zip(vecs)
        .filter(|(s, _)| *s <= thr)
        .collect();
    kernel.sort_by(|a, b| a.0.total_cmp(&b.0).then_with(|| lex_cmp(&a.1, &b.1)));
    Ok(kernel.into_iter().map(|(_, v)| v).collect())
}

/// Numerical rank from the singular values.
pub fn rank(m: &ComplexMatrix, tol: &Tolerance) -> Result<usize, LinalgError> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Ok(0);
    }
    let svd =
        SVD::try_new(m.clone(), false, false, f64::EPSILON, 0).ok_or(LinalgError::NoConvergence)?;
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let thr = tol.threshold(sigma_max);
    Ok(svd.singular_values.iter().filter(|&&s| s > thr).count())
}

/// Hilbert-Schmidt orthonormal basis of a subspace of `n x n` operators.
#[derive(Debug, Clone)]
pub struct MatrixSubspace {
    n: usize,
    columns: Vec<ComplexVector>,
}

impl MatrixSubspace {
    pub fn zero(n: usize) -> Self {
        Self {
            n,
            columns: Vec::new(),
        }
    }

    /// All of `End(C^n)`, spanned by matrix units.
    pub fn full(n: usize) -> Self {
        let columns = (0..n * n)
            .map(|k| {
                let mut v = ComplexVector::zeros(n * n);
                v[k] = ONE;
                v
            })
            .collect();
        Self { n, columns }
    }

    /// Wraps vectorized columns that are already orthonormal.
    pub(crate) fn from_orthonormal_columns(n: usize, columns: Vec<ComplexVector>) -> Self {
        Self { n, columns }
    }

    pub fn ambient_dim(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn basis_element(&self, i: usize) -> ComplexMatrix {
        ComplexMatrix::from_column_slice(self.n, self.n, self.columns[i].as_slice())
    }

    pub fn basis(&self) -> Vec<ComplexMatrix> {
        (0..self.dim()).map(|i| self.basis_element(i)).collect()
    }

    /// `sum_i coeffs[i] * basis[i]`
    pub fn combination(&self, coeffs: &[C64]) -> ComplexMatrix {
        let mut acc = ComplexVector::zeros(self.n * self.n);
        for (c, col) in coeffs.iter().zip(&self.columns) {
            acc.axpy(*c, col, ONE);
        }
        ComplexMatrix::from_column_slice(self.n, self.n, acc.as_slice())
    }

    fn check_ambient(&self, x: &ComplexMatrix) -> Result<(), LinalgError> {
        if x.nrows() != self.n || x.ncols() != self.n {
            return Err(LinalgError::DimensionMismatch(format!(
                "operator is {}x{}, subspace acts on C^{}",
                x.nrows(),
                x.ncols(),
                self.n
            )));
        }
        Ok(())
    }

    /// Basis columns packed side by side, `n^2 x dim`.
    pub(crate) fn frame(&self) -> ComplexMatrix {
        let rows = self.n * self.n;
        let mut f = ComplexMatrix::zeros(rows, self.columns.len());
        for (j, c) in self.columns.iter().enumerate() {
            f.column_mut(j).copy_from(c);
        }
        f
    }

    /// Removes the component in the subspace from every column of `x`
    /// (two block sweeps).
    pub(crate) fn project_out(&self, x: &mut ComplexMatrix) {
        if self.columns.is_empty() || x.ncols() == 0 {
            return;
        }
        let q = self.frame();
        for _ in 0..2 {
            let coeffs = mul_op(&q, Op::Adjoint, x, Op::Plain);
            gemm(-ONE, &q, Op::Plain, &coeffs, Op::Plain, ONE, x);
        }
    }

    /// Inserts the columns of `x` one by one, keeping those not already in
    /// the span. A column counts as new when its residual exceeds the
    /// threshold relative to `max(norm of the column, scale_floor)`; the
    /// floor keeps roundoff in a column that is small through cancellation
    /// from passing as a new direction. Returns how many were added.
    pub(crate) fn insert_batch(
        &mut self,
        mut x: ComplexMatrix,
        scale_floor: f64,
        tol: &Tolerance,
    ) -> usize {
        assert_eq!(x.nrows(), self.n * self.n, "vectorized operators expected");
        let scales: Vec<f64> = x.column_iter().map(|c| c.norm().max(scale_floor)).collect();
        // One sweep decides rejection (its error is O(eps)); only the
        // survivors get the second, cleaning sweep.
        let mut survivors: Vec<usize> = (0..x.ncols()).filter(|&j| scales[j] > 0.0).collect();
        if !self.columns.is_empty() && !survivors.is_empty() {
            let q = self.frame();
            let coeffs = mul_op(&q, Op::Adjoint, &x, Op::Plain);
            gemm(-ONE, &q, Op::Plain, &coeffs, Op::Plain, ONE, &mut x);
            survivors.retain(|&j| x.column(j).norm() > tol.threshold(scales[j]));
            if !survivors.is_empty() {
                let mut y = x.select_columns(&survivors);
                let coeffs = mul_op(&q, Op::Adjoint, &y, Op::Plain);
                gemm(-ONE, &q, Op::Plain, &coeffs, Op::Plain, ONE, &mut y);
                for (k, &j) in survivors.iter().enumerate() {
                    x.column_mut(j).copy_from(&y.column(k));
                }
            }
        }
        let start = self.columns.len();
        for j in survivors {
            let scale = scales[j];
            let thr = tol.threshold(scale);
            let mut r = x.column(j).into_owned();
            let before = r.norm();
            if before <= thr {
                continue;
            }
            for _ in 0..2 {
                for q in &self.columns[start..] {
                    let c = dotc(q.as_slice(), r.as_slice());
                    axpy_neg(c, q.as_slice(), r.as_mut_slice());
                }
            }
            let mut rn = r.norm();
            if rn <= thr {
                continue;
            }
            if rn < 0.5 * before {
                // heavy cancellation magnifies what is left along the
                // older columns; sweep against the whole frame again
                r = self.residual_of(r.as_slice());
                rn = r.norm();
                if rn <= thr {
                    continue;
                }
            }
            r.unscale_mut(rn);
            self.columns.push(r);
        }
        self.columns.len() - start
    }

    /// Component of `v` orthogonal to the subspace (two Gram-Schmidt sweeps).
    fn residual_of(&self, v: &[C64]) -> ComplexVector {
        let mut r = ComplexVector::from_column_slice(v);
        for _ in 0..2 {
            for q in &self.columns {
                let c = dotc(q.as_slice(), r.as_slice());
                axpy_neg(c, q.as_slice(), r.as_mut_slice());
            }
        }
        r
    }

    pub fn residual_norm(&self, x: &ComplexMatrix) -> Result<f64, LinalgError> {
        self.check_ambient(x)?;
        Ok(self.residual_of(x.as_slice()).norm())
    }

    /// Orthogonal projection onto the subspace.
    pub fn project(&self, x: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
        self.check_ambient(x)?;
        let coeffs: Vec<C64> = self
            .columns
            .iter()
            .map(|q| dotc(q.as_slice(), x.as_slice()))
            .collect();
        Ok(self.combination(&coeffs))
    }

    /// `||P_self - P_other||_F`, computed from residuals rather than from
    /// traces so that nearly equal subspaces are resolved to working
    /// precision.
    pub fn projector_distance(&self, other: &MatrixSubspace) -> Result<f64, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch(format!(
                "subspaces act on C^{} and C^{}",
                self.n, other.n
            )));
        }
        let a = self.outside_residuals(other)?;
        let b = other.outside_residuals(self)?;
        Ok(a.iter().chain(&b).map(|r| r * r).sum::<f64>().sqrt())
    }

    /// Norm of the part of each basis element of `other` lying outside
    /// this subspace.
    pub fn outside_residuals(&self, other: &MatrixSubspace) -> Result<Vec<f64>, LinalgError> {
        if self.n != other.n {
            return Err(LinalgError::DimensionMismatch(format!(
                "subspaces act on C^{} and C^{}",
                self.n, other.n
            )));
        }
        let mut a = other.frame();
        self.project_out(&mut a);
        Ok(a.column_iter().map(|c| c.norm()).collect())
    }

    /// Span of the union of two subspaces.
    pub fn span_with(
        &self,
        other: &MatrixSubspace,
        tol: &Tolerance,
    ) -> Result<MatrixSubspace, LinalgError> {
        let mut mats = self.basis();
        mats.extend(other.basis());
        if mats.is_empty() {
            return Ok(MatrixSubspace::zero(self.n));
        }
        orthonormalize(&mats, tol)
    }
}

/// Rank-revealing Hilbert-Schmidt orthonormalization.
///
/// Gram-Schmidt with column pivoting: at every step the candidate with the
/// largest remaining residual is accepted, until all residuals fall below
/// `max(abs_floor, rel * max_i ||m_i||)`.
pub fn orthonormalize(
    mats: &[ComplexMatrix],
    tol: &Tolerance,
) -> Result<MatrixSubspace, LinalgError> {
    let n = match common_dim(mats)? {
        Some(n) => n,
        None => return Err(LinalgError::Empty),
    };
    let mut residuals: Vec<ComplexVector> = mats
        .iter()
        .map(|m| ComplexVector::from_column_slice(m.as_slice()))
        .collect();
    let scale = residuals.iter().map(|v| v.norm()).fold(0.0, f64::max);
    let thr = tol.threshold(scale);
    let mut out = MatrixSubspace::zero(n);
    let max_dim = n * n;
    while out.dim() < max_dim {
        let (idx, best) = residuals
            .iter()
            .enumerate()
            .map(|(i, r)| (i, r.norm()))
            .fold(
                (usize::MAX, 0.0),
                |acc, (i, r)| if r > acc.1 { (i, r) } else { acc },
            );
        if idx == usize::MAX || best <= thr {
            break;
        }
        let mut q = residuals.swap_remove(idx);
        for p in &out.columns {
            let c = dotc(p.as_slice(), q.as_slice());
            axpy_neg(c, p.as_slice(), q.as_mut_slice());
        }
        let qn = q.norm();
        if qn <= thr {
            continue;
        }
        q.unscale_mut(qn);
        for r in residuals.iter_mut() {
            let c = dotc(q.as_slice(), r.as_slice());
            axpy_neg(c, q.as_slice(), r.as_mut_slice());
        }
        out.columns.push(q);
    }
    Ok(out)
}

pub fn subspace_contains(
    s: &MatrixSubspace,
    x: &ComplexMatrix,
    tol: &Tolerance,
) -> Result<bool, LinalgError> {
    let scale = norm(x);
    if scale == 0.0 {
        s.check_ambient(x)?;
        return Ok(true);
    }
    Ok(s.residual_norm(x)? <= tol.threshold(scale))
}

/// Equal dimension and projector distance within `max(abs_floor, rel)`.
pub fn subspace_equal(
    s1: &MatrixSubspace,
    s2: &MatrixSubspace,
    tol: &Tolerance,
) -> Result<bool, LinalgError> {
    let dist = s1.projector_distance(s2)?;
    Ok(s1.dim() == s2.dim() && dist <= tol.threshold(1.0))
}

/// Eigen-decomposition of a Hermitian matrix with ascending eigenvalues.
pub(crate) fn hermitian_eigen(h: &ComplexMatrix) -> (Vec<f64>, Vec<ComplexVector>) {
    let sym = (h + h.adjoint()).unscale(2.0);
    let eig = nalgebra::SymmetricEigen::new(sym);
    let mut pairs: Vec<(f64, ComplexVector)> = eig
        .eigenvalues
        .iter()
        .enumerate()
        .map(|(i, &l)| (l, eig.eigenvectors.column(i).into_owned()))
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0));
    pairs.into_iter().unzip()
}

/// Groups sorted eigenvalues; neighbours closer than `gap` share a cluster.
pub(crate) fn cluster_sorted(values: &[f64], gap: f64) -> Vec<Vec<usize>> {
    let mut clusters: Vec<Vec<usize>> = Vec::new();
    for (i, &v) in values.iter().enumerate() {
        match clusters.last_mut() {
            Some(c) if v - values[*c.last().unwrap()] <= gap => c.push(i),
            _ => clusters.push(vec![i]),
        }
    }
    clusters
}
