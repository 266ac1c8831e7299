//! Dense complex linear algebra used throughout the crate.
//!
//! Everything here works on small (n ≤ 8 or so) dense double-precision
//! matrices. The heavy lifting (Hermitian eigensolver, SVD, matrix
//! exponential) is delegated to `nalgebra`; the symmetric singular value
//! (Takagi) decomposition is built on top of a real symmetric eigensolve.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use thiserror::Error;

pub type ComplexMatrix = DMatrix<Complex64>;
pub type RealMatrix = DMatrix<f64>;
pub type ComplexVector = DVector<Complex64>;

/// Default tolerance for symmetry and Hermiticity checks.
pub const DEFAULT_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum LinalgError {
    #[error("matrix is {rows}x{cols}, expected a square matrix")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not Hermitian (residual {residual:.3e})")]
    NotHermitian { residual: f64 },
    #[error("matrix is not positive definite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPositiveDefinite { min_eigenvalue: f64 },
    #[error("matrix is not symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },
    #[error("matrix is singular")]
    Singular,
    #[error("matrix has non-finite entries")]
    NonFinite,
}

#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn identity(n: usize) -> ComplexMatrix {
    ComplexMatrix::identity(n, n)
}

pub fn zeros(n: usize) -> ComplexMatrix {
    ComplexMatrix::zeros(n, n)
}

/// Complex matrix from a real one.
pub fn complexify(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| c64(x, 0.0))
}

pub fn real_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.re)
}

pub fn imag_part(m: &ComplexMatrix) -> RealMatrix {
    m.map(|z| z.im)
}

/// Entrywise complex conjugate (not the adjoint).
pub fn conj(m: &ComplexMatrix) -> ComplexMatrix {
    m.map(|z| z.conj())
}

/// `(X + X^T) / 2`.
pub fn symmetrize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.transpose()).scale(0.5)
}

/// `(X + X^*) / 2`.
pub fn hermitize(m: &ComplexMatrix) -> ComplexMatrix {
    (m + m.adjoint()).scale(0.5)
}

/// Frobenius norm of `X - X^T`.
pub fn symmetry_residual(m: &ComplexMatrix) -> f64 {
    (m - m.transpose()).norm()
}

/// Frobenius norm of `X - X^*`.
pub fn hermiticity_residual(m: &ComplexMatrix) -> f64 {
    (m - m.adjoint()).norm()
}

pub fn is_finite(m: &ComplexMatrix) -> bool {
    m.iter().all(|z| z.re.is_finite() && z.im.is_finite())
}

pub fn ensure_square(m: &ComplexMatrix) -> Result<usize, LinalgError> {
    if m.nrows() != m.ncols() {
        return Err(LinalgError::NotSquare {
            rows: m.nrows(),
            cols: m.ncols(),
        });
    }
    Ok(m.nrows())
}

pub fn inverse(m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    ensure_square(m)?;
    let inv = m.clone().try_inverse().ok_or(LinalgError::Singular)?;
    if !is_finite(&inv) {
        return Err(LinalgError::Singular);
    }
    Ok(inv)
}

/// Solve `X * m = rhs` for `X`, i.e. return `rhs * m^{-1}`.
pub fn right_divide(rhs: &ComplexMatrix, m: &ComplexMatrix) -> Result<ComplexMatrix, LinalgError> {
    // X m = R  <=>  m^T X^T = R^T
    let lu = m.transpose().lu();
    let xt = lu.solve(&rhs.transpose()).ok_or(LinalgError::Singular)?;
    if !is_finite(&xt) {
        return Err(LinalgError::Singular);
    }
    Ok(xt.transpose())
}

/// Largest singular value.
pub fn operator_norm(m: &ComplexMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

pub fn real_operator_norm(m: &RealMatrix) -> f64 {
    if m.is_empty() {
        return 0.0;
    }
    m.clone()
        .svd(false, false)
        .singular_values
        .iter()
        .copied()
        .fold(0.0, f64::max)
}

/// Eigen-decomposition `H = V diag(w) V^*` of a Hermitian matrix, eigenvalues ascending.
pub fn hermitian_eigen(
    h: &ComplexMatrix,
    tol: f64,
) -> Result<(Vec<f64>, ComplexMatrix), LinalgError> {
    let n = ensure_square(h)?;
    if !is_finite(h) {
        return Err(LinalgError::NonFinite);
    }
    let residual = hermiticity_residual(h);
    if residual > tol * h.norm().max(1.0) {
        return Err(LinalgError::NotHermitian { residual });
    }
    let eig = hermitize(h).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = ComplexMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        vectors.set_column(k, &eig.eigenvectors.column(i));
    }
    Ok((values, vectors))
}

/// Applies a real function to a Hermitian matrix through its spectrum.
pub fn hermitian_function(
    h: &ComplexMatrix,
    tol: f64,
    f: impl Fn(f64) -> f64,
) -> Result<ComplexMatrix, LinalgError> {
    let (w, v) = hermitian_eigen(h, tol)?;
    let d = ComplexMatrix::from_diagonal(&DVector::from_iterator(
        w.len(),
        w.iter().map(|&x| c64(f(x), 0.0)),
    ));
    Ok(hermitize(&(&v * d * v.adjoint())))
}

/// Principal inverse square root of a Hermitian positive-definite matrix.
///
/// `tol` bounds both the Hermiticity residual (relative to `max(1, ||H||)`)
/// and the smallest admissible eigenvalue.
pub fn hermitian_inv_sqrt(h: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix, LinalgError> {
    let (w, _) = hermitian_eigen(h, tol)?;
    let min = w.first().copied().unwrap_or(1.0);
    if min <= tol {
        return Err(LinalgError::NotPositiveDefinite {
            min_eigenvalue: min,
        });
    }
    hermitian_function(h, tol, |x| 1.0 / x.sqrt())
}

/// Principal square root of a complex number; `det^{1/2}` everywhere in the crate.
#[inline]
pub fn principal_sqrt(z: Complex64) -> Complex64 {
    z.sqrt()
}

pub fn determinant(m: &ComplexMatrix) -> Complex64 {
    m.determinant()
}

/// Symmetric singular value decomposition `A = U diag(sigma) U^T`.
#[derive(Debug, Clone)]
pub struct Takagi {
    /// Unitary; column k is a Takagi vector for `sigma[k]`.
    pub u: ComplexMatrix,
    /// Nonincreasing, nonnegative.
    pub sigma: Vec<f64>,
}

impl Takagi {
    pub fn sigma_matrix(&self) -> ComplexMatrix {
        ComplexMatrix::from_diagonal(&DVector::from_iterator(
            self.sigma.len(),
            self.sigma.iter().map(|&s| c64(s, 0.0)),
        ))
    }

    pub fn reconstruct(&self) -> ComplexMatrix {
        &self.u * self.sigma_matrix() * self.u.transpose()
    }
}

/// Takagi factorization of a complex symmetric matrix.
///
/// For `A = X + iY`, a vector `u = x + iy` with `A conj(u) = sigma u` is the
/// same as `[[X, Y], [Y, -X]] [x; y] = sigma [x; y]`, so the positive part of
/// the spectrum of that real symmetric matrix yields an orthonormal set of
/// Takagi vectors, degenerate singular values included. These columns are
/// eigenvectors of `A conj(A)` with eigenvalues `sigma^2`. The kernel of `A`
/// is completed by Gram-Schmidt against the standard basis, which fixes
/// those phases to 1.
pub fn takagi(a: &ComplexMatrix, tol: f64) -> Result<Takagi, LinalgError> {
    let n = ensure_square(a)?;
    if !is_finite(a) {
        return Err(LinalgError::NonFinite);
    }
    let residual = symmetry_residual(a);
    if residual > tol * a.norm().max(1.0) {
        return Err(LinalgError::NotSymmetric { residual });
    }
    let a = symmetrize(a);
    let x = real_part(&a);
    let y = imag_part(&a);
    let mut m = RealMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&x);
    m.view_mut((0, n), (n, n)).copy_from(&y);
    m.view_mut((n, 0), (n, n)).copy_from(&y);
    m.view_mut((n, n), (n, n)).copy_from(&(-&x));

    let eig = m.symmetric_eigen();
    let mut order: Vec<usize> = (0..2 * n).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[j].total_cmp(&eig.eigenvalues[i]));

    // eigenvalues come in +-sigma pairs; anything at roundoff level is kernel
    let scale = a.norm().max(f64::MIN_POSITIVE);
    let zero_cut = 1e-13 * scale.max(1.0) * (n as f64);
    let mut columns: Vec<ComplexVector> = Vec::with_capacity(n);
    let mut sigma: Vec<f64> = Vec::with_capacity(n);
    for &i in order.iter().take(n) {
        let s = eig.eigenvalues[i];
        if s <= zero_cut {
            break;
        }
        let v = eig.eigenvectors.column(i);
        let mut u = ComplexVector::from_iterator(n, (0..n).map(|k| c64(v[k], v[n + k])));
        let norm = u.norm();
        u /= c64(norm, 0.0);
        columns.push(u);
        sigma.push(s);
    }

    // re-orthonormalize the nonzero block (it is orthonormal up to roundoff)
    gram_schmidt(&mut columns);

    // kernel completion
    let mut e = 0;
    while columns.len() < n && e < n {
        let mut cand = ComplexVector::zeros(n);
        cand[e] = c64(1.0, 0.0);
        for q in &columns {
            let proj = q.dotc(&cand);
            cand -= q * proj;
        }
        let norm = cand.norm();
        if norm > 1e-6 {
            cand /= c64(norm, 0.0);
            // second pass for stability
            for q in &columns {
                let proj = q.dotc(&cand);
                cand -= q * proj;
            }
            let norm = cand.norm();
            cand /= c64(norm, 0.0);
            columns.push(cand);
            sigma.push(0.0);
        }
        e += 1;
    }

    // sign convention: first significant component has positive real part
    for col in columns.iter_mut() {
        if let Some(first) = col.iter().find(|z| z.norm() > 1e-8).copied() {
            if first.re < 0.0 || (first.re == 0.0 && first.im < 0.0) {
                *col = -col.clone();
            }
        }
    }

    let mut u = ComplexMatrix::zeros(n, n);
    for (k, col) in columns.iter().enumerate() {
        u.set_column(k, col);
    }
    // exact sigma from the factor itself: diag(U^* A conj(U)) is real nonnegative
    let d = u.adjoint() * &a * conj(&u);
    for (k, s) in sigma.iter_mut().enumerate() {
        if *s > 0.0 {
            *s = d[(k, k)].re.max(0.0);
        }
    }
    Ok(Takagi { u, sigma })
}

fn gram_schmidt(cols: &mut [ComplexVector]) {
    for k in 0..cols.len() {
        for _pass in 0..2 {
            for j in 0..k {
                let proj = cols[j].dotc(&cols[k]);
                let qj = cols[j].clone();
                cols[k] -= qj * proj;
            }
        }
        let norm = cols[k].norm();
        cols[k] /= c64(norm, 0.0);
    }
}

/// Matrix exponential (scaling and squaring with Padé approximants).
pub fn expm(m: &ComplexMatrix) -> ComplexMatrix {
    m.exp()
}

pub fn real_expm(m: &RealMatrix) -> RealMatrix {
    m.exp()
}

/// Builds a block matrix `[[a, b], [c, d]]` from four n x n blocks.
pub fn block2(
    a: &ComplexMatrix,
    b: &ComplexMatrix,
    c: &ComplexMatrix,
    d: &ComplexMatrix,
) -> ComplexMatrix {
    let n = a.nrows();
    let mut m = ComplexMatrix::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(a);
    m.view_mut((0, n), (n, n)).copy_from(b);
    m.view_mut((n, 0), (n, n)).copy_from(c);
    m.view_mut((n, n), (n, n)).copy_from(d);
    m
}

/// Splits a 2n x 2n matrix into its four n x n blocks.
pub fn split_blocks(m: &ComplexMatrix) -> [ComplexMatrix; 4] {
    let n = m.nrows() / 2;
    [
        m.view((0, 0), (n, n)).into_owned(),
        m.view((0, n), (n, n)).into_owned(),
        m.view((n, 0), (n, n)).into_owned(),
        m.view((n, n), (n, n)).into_owned(),
    ]
}
