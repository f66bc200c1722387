//! Dense complex linear algebra shared by every theory model.
//!
//! Matrices are `nalgebra` dynamic matrices over `Complex<f64>`. Hermitian
//! operators are wrapped in [`HermOp`], which checks hermiticity once at
//! construction so downstream eigen-analysis can assume it.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMatrix = DMatrix<C64>;
pub type RMatrix = DMatrix<f64>;

/// Absolute tolerance on `max |A - A^dag|`.
pub const TOL_HERM: f64 = 1e-9;
/// Relative floor for positivity decisions.
pub const TOL_PSD: f64 = 1e-10;
/// Default relative singular-value threshold for integer rank decisions.
pub const RANK_TOL: f64 = 1e-7;

/// Which factor of a bipartite Hilbert space `H_1 (x) H_2` an operation refers to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Side {
    One,
    Two,
}

impl Side {
    pub fn other(self) -> Side {
        match self {
            Side::One => Side::Two,
            Side::Two => Side::One,
        }
    }

    pub fn index(self) -> u8 {
        match self {
            Side::One => 1,
            Side::Two => 2,
        }
    }
}

/// A Hermitian operator, validated to `TOL_HERM` on construction.
#[derive(Debug, Clone, PartialEq)]
pub struct HermOp(CMatrix);

impl HermOp {
    pub fn new(m: CMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
        if m.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let dev = hermiticity_defect(&m);
        if dev > TOL_HERM {
            return Err(Error::NotHermitian(dev));
        }
        Ok(HermOp(m))
    }

    /// Wraps `m` after replacing it by its Hermitian part `(m + m^dag) / 2`.
    ///
    /// Used for operators that are Hermitian by construction, where only
    /// roundoff separates them from exact hermiticity.
    pub fn symmetrized(m: CMatrix) -> Self {
        let h = (&m + m.adjoint()).scale(0.5);
        HermOp(h)
    }

    pub fn identity(dim: usize) -> Self {
        HermOp(CMatrix::identity(dim, dim))
    }

    pub fn zeros(dim: usize) -> Self {
        HermOp(CMatrix::zeros(dim, dim))
    }

    pub fn from_real_diagonal(diag: &[f64]) -> Self {
        let n = diag.len();
        HermOp(CMatrix::from_fn(n, n, |i, j| {
            if i == j {
                C64::new(diag[i], 0.0)
            } else {
                C64::new(0.0, 0.0)
            }
        }))
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.0
    }

    pub fn into_matrix(self) -> CMatrix {
        self.0
    }

    pub fn trace(&self) -> f64 {
        self.0.trace().re
    }

    pub fn scale(&self, s: f64) -> HermOp {
        HermOp(self.0.map(|z| z * s))
    }

    pub fn add(&self, other: &HermOp) -> Result<HermOp> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(HermOp(&self.0 + &other.0))
    }

    pub fn sub(&self, other: &HermOp) -> Result<HermOp> {
        check_same_dim(self.dim(), other.dim())?;
        Ok(HermOp(&self.0 - &other.0))
    }

    /// Real inner product `Tr[self * other]`.
    pub fn trace_product(&self, other: &HermOp) -> f64 {
        trace_of_product(&self.0, &other.0).re
    }
}

pub(crate) fn check_same_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub fn hermiticity_defect(m: &CMatrix) -> f64 {
    let n = m.nrows();
    let mut dev: f64 = 0.0;
    for i in 0..n {
        for j in i..n {
            dev = dev.max((m[(i, j)] - m[(j, i)].conj()).norm());
        }
    }
    dev
}

/// `Tr[a * b]` without forming the product.
pub fn trace_of_product(a: &CMatrix, b: &CMatrix) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..a.nrows() {
        for k in 0..a.ncols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc
}

/// Kronecker product: `tensor(a, b)[(i*rb + k, j*cb + l)] = a[(i, j)] * b[(k, l)]`.
pub fn tensor(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.kronecker(b)
}

/// Block-diagonal matrix `a (+) b`.
pub fn direct_sum(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    for m in [a, b] {
        if !m.is_square() {
            return Err(Error::NonSquare {
                rows: m.nrows(),
                cols: m.ncols(),
            });
        }
    }
    let (da, db) = (a.nrows(), b.nrows());
    let mut out = CMatrix::zeros(da + db, da + db);
    out.view_mut((0, 0), (da, da)).copy_from(a);
    out.view_mut((da, da), (db, db)).copy_from(b);
    Ok(out)
}

/// Partial trace of an operator on `C^d1 (x) C^d2`, tracing out the factor `traced`.
pub fn partial_trace(r: &HermOp, d1: usize, d2: usize, traced: Side) -> Result<HermOp> {
    Ok(HermOp(partial_trace_matrix(r.matrix(), d1, d2, traced)?))
}

/// Partial trace of an arbitrary square matrix on `C^d1 (x) C^d2`.
pub fn partial_trace_matrix(m: &CMatrix, d1: usize, d2: usize, traced: Side) -> Result<CMatrix> {
    if !m.is_square() {
        return Err(Error::NonSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    check_same_dim(d1 * d2, m.nrows())?;
    Ok(match traced {
        Side::One => CMatrix::from_fn(d2, d2, |i, j| {
            (0..d1).map(|k| m[(k * d2 + i, k * d2 + j)]).sum()
        }),
        Side::Two => CMatrix::from_fn(d1, d1, |i, j| {
            (0..d2).map(|k| m[(i * d2 + k, j * d2 + k)]).sum()
        }),
    })
}

/// Eigenvalues of a Hermitian operator in ascending order.
pub fn eigvals_herm(a: &HermOp) -> Vec<f64> {
    let mut ev: Vec<f64> = SymmetricEigen::new(a.matrix().clone())
        .eigenvalues
        .iter()
        .copied()
        .collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn min_eig_herm(a: &HermOp) -> f64 {
    eigvals_herm(a).first().copied().unwrap_or(0.0)
}

pub fn max_eig_herm(a: &HermOp) -> f64 {
    eigvals_herm(a).last().copied().unwrap_or(0.0)
}

/// Sum of absolute eigenvalues.
pub fn trace_norm_herm(a: &HermOp) -> f64 {
    eigvals_herm(a).iter().map(|v| v.abs()).sum()
}

/// Sum of singular values of an arbitrary matrix.
pub fn trace_norm(m: &CMatrix) -> f64 {
    m.clone().singular_values().iter().sum()
}

/// PSD test with threshold `-1e-10 * max(1, ||a||_1)`.
pub fn is_psd(a: &HermOp) -> bool {
    let ev = eigvals_herm(a);
    let norm: f64 = ev.iter().map(|v| v.abs()).sum();
    ev.first().copied().unwrap_or(0.0) >= -TOL_PSD * norm.max(1.0)
}

pub fn require_psd(a: &HermOp) -> Result<()> {
    if is_psd(a) {
        Ok(())
    } else {
        Err(Error::NotPositive(min_eig_herm(a)))
    }
}

/// Principal square root of a PSD operator; tiny negative eigenvalues are clamped to zero.
pub fn herm_sqrt(a: &HermOp) -> HermOp {
    herm_apply(a, |v| v.max(0.0).sqrt())
}

/// Applies a real function to the spectrum of `a`.
pub fn herm_apply(a: &HermOp, f: impl Fn(f64) -> f64) -> HermOp {
    let eig = SymmetricEigen::new(a.matrix().clone());
    let vecs = &eig.eigenvectors;
    let n = a.dim();
    let diag = CMatrix::from_fn(n, n, |i, j| {
        if i == j {
            C64::new(f(eig.eigenvalues[i]), 0.0)
        } else {
            C64::new(0.0, 0.0)
        }
    });
    HermOp::symmetrized(vecs * diag * vecs.adjoint())
}

/// Coordinates of a Hermitian operator in the orthonormal basis
/// `{E_ii} ++ {(E_ij + E_ji)/sqrt2} ++ {i(E_ij - E_ji)/sqrt2}`, pairs `i < j` row-major.
pub fn herm_coords(a: &CMatrix) -> Vec<f64> {
    let n = a.nrows();
    let s2 = std::f64::consts::SQRT_2;
    let mut out = Vec::with_capacity(n * n);
    out.extend((0..n).map(|i| a[(i, i)].re));
    for i in 0..n {
        for j in i + 1..n {
            out.push(s2 * a[(i, j)].re);
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            out.push(s2 * a[(i, j)].im);
        }
    }
    out
}

/// Rank of a family of real vectors: singular values above `tol * sigma_max`.
pub fn real_rank(vectors: &[Vec<f64>], tol: f64) -> Result<usize> {
    let first = vectors.first().ok_or(Error::Empty("vector family"))?;
    let width = first.len();
    for v in vectors {
        check_same_dim(width, v.len())?;
    }
    if width == 0 {
        return Ok(0);
    }
    let m = RMatrix::from_fn(vectors.len(), width, |i, j| vectors[i][j]);
    let sv = m.singular_values();
    let smax = sv.iter().copied().fold(0.0, f64::max);
    if smax == 0.0 {
        return Ok(0);
    }
    Ok(sv.iter().filter(|&&s| s > tol * smax).count())
}

/// Dimension of the real-linear span of a family of Hermitian operators.
pub fn span_rank(ops: &[HermOp], tol: f64) -> Result<usize> {
    let first = ops.first().ok_or(Error::Empty("operator family"))?;
    for op in ops {
        check_same_dim(first.dim(), op.dim())?;
    }
    let coords: Vec<Vec<f64>> = ops.iter().map(|o| herm_coords(o.matrix())).collect();
    real_rank(&coords, tol)
}

/// Maximum absolute entrywise difference.
pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> f64 {
    if a.shape() != b.shape() {
        return f64::INFINITY;
    }
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn pauli_x() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 0.), c(1., 0.), c(0., 0.)])
}

pub fn pauli_y() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(0., -1.), c(0., 1.), c(0., 0.)])
}

pub fn pauli_z() -> CMatrix {
    CMatrix::from_row_slice(2, 2, &[c(1., 0.), c(0., 0.), c(0., 0.), c(-1., 0.)])
}

/// `|v><v|` for a column vector `v`.
pub fn projector(v: &nalgebra::DVector<C64>) -> CMatrix {
    v * v.adjoint()
}

/// Projector onto the computational basis vector `|k>` in dimension `d`.
pub fn basis_projector(d: usize, k: usize) -> CMatrix {
    CMatrix::from_fn(d, d, |i, j| {
        if i == k && j == k {
            c(1., 0.)
        } else {
            c(0., 0.)
        }
    })
}

/// JSON wire form of a complex matrix: row-major real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl From<&CMatrix> for MatrixJson {
    fn from(m: &CMatrix) -> Self {
        let (rows, cols) = m.shape();
        let mut re = Vec::with_capacity(rows * cols);
        let mut im = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                re.push(m[(i, j)].re);
                im.push(m[(i, j)].im);
            }
        }
        MatrixJson { rows, cols, re, im }
    }
}

impl TryFrom<&MatrixJson> for CMatrix {
    type Error = Error;

    fn try_from(j: &MatrixJson) -> Result<CMatrix> {
        let n = j.rows * j.cols;
        if j.rows == 0 || j.cols == 0 {
            return Err(Error::Empty("matrix"));
        }
        check_same_dim(n, j.re.len())?;
        check_same_dim(n, j.im.len())?;
        if j.re.iter().chain(&j.im).any(|v| !v.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(CMatrix::from_fn(j.rows, j.cols, |r, col| {
            let k = r * j.cols + col;
            c(j.re[k], j.im[k])
        }))
    }
}
