//! Dense complex linear algebra used by the rest of the crate.
//!
//! Eigenvalues come from a complex Hessenberg/shifted-QR Schur iteration
//! ([`eigenvalues`]); singular values and kernels come from a one-sided
//! Jacobi SVD ([`jacobi_svd`]) and square solves from `nalgebra`'s LU.
//! Every rank decision goes through a singular-value threshold so that
//! callers control the cutoff via [`Tolerances`].

mod cluster;
mod schur;
mod svd;

use nalgebra::{Complex, DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use cluster::{eigen_clusters, generalized_kernel_dim, EigenCluster};
pub use svd::{jacobi_svd, Svd};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

pub const ZERO: C64 = C64 { re: 0.0, im: 0.0 };
pub const ONE: C64 = C64 { re: 1.0, im: 0.0 };

#[inline]
pub fn c64(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Numerical thresholds shared by every module.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Relative singular-value cutoff for rank decisions.
    pub rank_rel: f64,
    /// Radius under which eigenvalues and spectrum points are identified.
    pub eig_cluster: f64,
    /// Bound on closure and identity residuals.
    pub residual: f64,
    /// Bound on `dS + Sd - I`, looser because it composes two solves.
    pub homotopy_residual: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rank_rel: 1e-10,
            eig_cluster: 1e-8,
            residual: 1e-9,
            homotopy_residual: 1e-8,
        }
    }
}

impl Tolerances {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("rank_rel", self.rank_rel),
            ("eig_cluster", self.eig_cluster),
            ("residual", self.residual),
            ("homotopy_residual", self.homotopy_residual),
        ];
        for (name, value) in fields {
            if !(value.is_finite() && value > 0.0) {
                return Err(Error::Tolerance(format!("{name} must be positive and finite, got {value}")));
            }
        }
        Ok(())
    }
}

pub fn ensure_finite(m: &CMatrix) -> Result<()> {
    if m.iter().all(|z| z.re.is_finite() && z.im.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite)
    }
}

fn ensure_square(m: &CMatrix, what: &str) -> Result<()> {
    if m.nrows() == m.ncols() {
        Ok(())
    } else {
        Err(Error::Dimension(format!("{what} must be square, got {}x{}", m.nrows(), m.ncols())))
    }
}

pub fn fro_norm(m: &CMatrix) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Spectral norm (largest singular value).
pub fn op_norm(m: &CMatrix) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

pub fn identity(n: usize) -> CMatrix {
    CMatrix::identity(n, n)
}

/// All eigenvalues with algebraic multiplicity, in the order they leave the
/// Schur iteration.
pub fn eigenvalues(m: &CMatrix) -> Result<Vec<C64>> {
    ensure_square(m, "eigenvalue input")?;
    ensure_finite(m)?;
    schur::eigenvalues(m.clone())
}

/// Singular values in descending order, `min(rows, cols)` of them.
pub fn singular_values(m: &CMatrix) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    let mut s = if m.nrows() < m.ncols() { jacobi_svd(&m.adjoint()).values } else { jacobi_svd(m).values };
    s.truncate(m.nrows().min(m.ncols()));
    s
}

/// Number of singular values above `rank_rel * sigma_max`; the zero matrix has rank 0.
pub fn numerical_rank(m: &CMatrix, tol: &Tolerances) -> usize {
    let s = singular_values(m);
    match s.first() {
        Some(&top) if top > 0.0 => s.iter().filter(|&&v| v > tol.rank_rel * top).count(),
        _ => 0,
    }
}

/// Rank with the cutoff `rank_rel * max(sigma_max, scale)`.
///
/// Use this when a matrix may legitimately be zero up to rounding: the plain
/// relative rank would then promote noise to full rank.
pub fn numerical_rank_scaled(m: &CMatrix, tol: &Tolerances, scale: f64) -> usize {
    let s = singular_values(m);
    let top = s.first().copied().unwrap_or(0.0).max(scale);
    if top <= 0.0 {
        return 0;
    }
    s.iter().filter(|&&v| v > tol.rank_rel * top).count()
}

/// Orthonormal basis (as columns) of the kernel of `m`, with singular values
/// at or below `threshold` counted as zero.
pub fn null_space(m: &CMatrix, threshold: f64) -> CMatrix {
    let cols = m.ncols();
    if cols == 0 {
        return CMatrix::zeros(0, 0);
    }
    let svd = jacobi_svd(m);
    let kept: Vec<usize> = (0..cols).filter(|&i| svd.values[i] <= threshold).collect();
    svd.v.select_columns(kept.iter())
}

/// Orthonormal basis of the column span of `m`, keeping singular values above `threshold`.
pub fn range_basis(m: &CMatrix, threshold: f64) -> CMatrix {
    let (rows, cols) = m.shape();
    if rows == 0 || cols == 0 {
        return CMatrix::zeros(rows, 0);
    }
    if rows < cols {
        // the span of `m` is spanned by the leading right singular vectors of `m^H`
        let left = jacobi_svd(&m.adjoint());
        let kept: Vec<usize> = (0..rows).filter(|&i| left.values[i] > threshold).collect();
        return left.v.select_columns(kept.iter());
    }
    let svd = jacobi_svd(m);
    let kept: Vec<usize> = (0..cols).filter(|&i| svd.values[i] > threshold).collect();
    let mut basis = CMatrix::zeros(rows, kept.len());
    for (c, &i) in kept.iter().enumerate() {
        basis.set_column(c, &(svd.w.column(i) / c64(svd.values[i], 0.0)));
    }
    basis
}

/// Minimum-norm least-squares solution of `a x = b`, treating singular values
/// at or below `threshold` as zero.
pub fn least_squares(a: &CMatrix, b: &CMatrix, threshold: f64) -> CMatrix {
    let svd = jacobi_svd(a);
    let mut x = CMatrix::zeros(a.ncols(), b.ncols());
    for i in 0..a.ncols() {
        let s = svd.values[i];
        if s <= threshold {
            break;
        }
        let w = svd.w.column(i);
        // u_i = w_i / s, x += v_i (u_i^H b) / s
        let coeff = w.adjoint() * b / c64(s * s, 0.0);
        x += svd.v.column(i) * coeff;
    }
    x
}

/// Orthonormal basis of the orthogonal complement of the span of the
/// orthonormal columns `q` inside `C^n`.
pub fn orthogonal_complement(q: &CMatrix) -> CMatrix {
    let n = q.nrows();
    if q.ncols() == 0 {
        return identity(n);
    }
    null_space(&q.adjoint(), 0.5)
}

/// Solves `a x = b` for square, numerically nonsingular `a`.
pub fn solve_linear(a: &CMatrix, b: &CMatrix, tol: &Tolerances) -> Result<CMatrix> {
    ensure_square(a, "coefficient matrix")?;
    if a.nrows() != b.nrows() {
        return Err(Error::Dimension(format!(
            "right-hand side has {} rows, expected {}",
            b.nrows(),
            a.nrows()
        )));
    }
    ensure_finite(a)?;
    ensure_finite(b)?;
    let n = a.nrows();
    let rank = numerical_rank(a, tol);
    if rank < n {
        return Err(Error::Singular { rank, dim: n });
    }
    let x = a
        .clone()
        .lu()
        .solve(b)
        .ok_or(Error::Singular { rank, dim: n })?;
    let res = fro_norm(&(a * &x - b));
    let bound = tol.residual * fro_norm(b).max(f64::MIN_POSITIVE);
    if res > bound && res > tol.residual * f64::EPSILON {
        return Err(Error::Numerical(format!(
            "linear solve residual {res:.3e} exceeds {bound:.3e}"
        )));
    }
    Ok(x)
}

/// Column-major vectorisation of a square matrix, used to test linear
/// independence of generators.
pub fn vectorize(m: &CMatrix) -> CVector {
    CVector::from_iterator(m.len(), m.iter().copied())
}

/// Stacks matrices of equal shape as columns of a `(rows*cols) x count` matrix.
pub fn stack_as_columns(mats: &[CMatrix]) -> CMatrix {
    let len = mats.first().map(|m| m.len()).unwrap_or(0);
    let mut out = CMatrix::zeros(len, mats.len());
    for (c, m) in mats.iter().enumerate() {
        out.set_column(c, &vectorize(m));
    }
    out
}

/// Lexicographic order on `(re, im)`, treating real parts within `radius` as equal.
pub fn lex_cmp(a: C64, b: C64, radius: f64) -> std::cmp::Ordering {
    if (a.re - b.re).abs() > radius {
        a.re.total_cmp(&b.re)
    } else if (a.im - b.im).abs() > radius {
        a.im.total_cmp(&b.im)
    } else {
        std::cmp::Ordering::Equal
    }
}

/// Lexicographic order on tuples of complex numbers.
pub fn lex_cmp_tuple(a: &[C64], b: &[C64], radius: f64) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        let o = lex_cmp(*x, *y, radius);
        if o != std::cmp::Ordering::Equal {
            return o;
        }
    }
    a.len().cmp(&b.len())
}

/// Max-norm distance between two tuples.
pub fn max_dist(a: &[C64], b: &[C64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

/// Scales `v` to unit length and rotates its phase so that the first
/// component of (near) maximal modulus is real and positive.
pub fn normalize_phase(v: &CVector) -> CVector {
    let norm = v.norm();
    if norm == 0.0 {
        return v.clone();
    }
    let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let pivot = v
        .iter()
        .find(|z| z.norm() >= top * (1.0 - 1e-9))
        .copied()
        .unwrap_or(ONE);
    let phase = pivot / pivot.norm();
    v.map(|z| z / phase / norm)
}
