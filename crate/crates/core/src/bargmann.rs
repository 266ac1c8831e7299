//! Gaussian kernels on Bargmann–Fock space.
//!
//! A kernel `(c, A, B, C)` stands for
//! `K(z, w) = c exp(½ z·Az + ½ w̄·B w̄ + z·C w̄)` acting by
//! `(T_K f)(z) = ∫ K(z, w) f(w) dμ(w)` with the normalized measure
//! `dμ(w) = π^{-n} e^{-|w|²} d²ⁿw`. Square roots of determinants use the
//! principal branch, so operator identities hold up to a global sign.

use num_complex::Complex64;
use thiserror::Error;

use crate::blob::Blob;
use crate::linalg::{
    c64, conj, determinant, hermitian_eigen, hermitize, identity, inverse, operator_norm,
    symmetrize, symmetry_residual, ComplexMatrix, ComplexVector, LinalgError, DEFAULT_TOL,
};
use crate::symplectic::{BlockElement, SemigroupElement, SpcElement};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BargmannError {
    #[error("I − A₂B₁ is singular; kernels cannot be composed")]
    SingularComposition,
    #[error("I − γ conj(δ) is singular")]
    SingularMatrix,
    #[error("Gaussian integrand is not integrable")]
    NotIntegrable,
    #[error("λ block is singular")]
    SingularLambda,
    #[error("kernel quadratic form is not symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },
    #[error("prefactor is zero or not finite")]
    BadPrefactor,
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

fn sym(x: &ComplexMatrix) -> ComplexMatrix {
    symmetrize(x)
}

fn dot(a: &ComplexVector, b: &ComplexVector) -> Complex64 {
    a.iter().zip(b.iter()).map(|(x, y)| x * y).sum()
}

fn inv_sqrt_det(m: &ComplexMatrix) -> Complex64 {
    determinant(m).sqrt().inv()
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianKernel {
    pub c: Complex64,
    pub a: ComplexMatrix,
    pub b: ComplexMatrix,
    pub cm: ComplexMatrix,
}

impl GaussianKernel {
    pub fn new(
        c: Complex64,
        a: ComplexMatrix,
        b: ComplexMatrix,
        cm: ComplexMatrix,
    ) -> Result<Self, BargmannError> {
        let residual = symmetry_residual(&a).max(symmetry_residual(&b));
        if residual > DEFAULT_TOL * a.norm().max(b.norm()).max(1.0) {
            return Err(BargmannError::NotSymmetric { residual });
        }
        if !c.is_finite() || c == Complex64::new(0.0, 0.0) {
            return Err(BargmannError::BadPrefactor);
        }
        Ok(Self {
            c,
            a: sym(&a),
            b: sym(&b),
            cm,
        })
    }

    /// Reproducing kernel `e^{z·w̄}`, the identity operator.
    pub fn reproducing(n: usize) -> Self {
        Self {
            c: c64(1.0, 0.0),
            a: ComplexMatrix::zeros(n, n),
            b: ComplexMatrix::zeros(n, n),
            cm: identity(n),
        }
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn eval(&self, z: &ComplexVector, w: &ComplexVector) -> Complex64 {
        let wb = w.map(|x| x.conj());
        let e = 0.5 * dot(z, &(&self.a * z))
            + 0.5 * dot(&wb, &(&self.b * &wb))
            + dot(z, &(&self.cm * &wb));
        self.c * e.exp()
    }

    /// Squared Hilbert–Schmidt norm `∫∫ |K(z, w)|² dμ(z) dμ(w)`.
    pub fn hilbert_schmidt_sq(&self) -> Result<f64, BargmannError> {
        if hilbert_schmidt_margin(self)? <= DEFAULT_TOL {
            return Err(BargmannError::NotIntegrable);
        }
        let g = crate::linalg::block2(&self.a, &self.cm, &self.cm.transpose(), &self.b);
        let zero = ComplexVector::zeros(2 * self.n());
        let v = itzykson(&g, &g, &zero, &zero)?;
        Ok(self.c.norm_sqr() * v.re)
    }
}

/// `f(z) = c exp(½ z·Az)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianVector {
    pub c: Complex64,
    pub a: ComplexMatrix,
}

impl GaussianVector {
    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn eval(&self, z: &ComplexVector) -> Complex64 {
        self.c * (0.5 * dot(z, &(&self.a * z))).exp()
    }

    /// Bargmann norm squared, `|c|² det(I − A conj A)^{-1/2}`.
    pub fn norm_sq(&self) -> Result<f64, BargmannError> {
        let zero = ComplexVector::zeros(self.n());
        Ok(self.c.norm_sqr() * itzykson(&self.a, &self.a, &zero, &zero)?.re)
    }
}

/// Kernel of the product `T_{K1} T_{K2}`.
pub fn compose(k1: &GaussianKernel, k2: &GaussianKernel) -> Result<GaussianKernel, BargmannError> {
    let n = k1.n();
    let d = identity(n) - &k2.a * &k1.b;
    let di = inverse(&d).map_err(|_| BargmannError::SingularComposition)?;
    let a = &k1.a + sym(&(&k1.cm * &di * &k2.a * k1.cm.transpose()));
    let b = &k2.b + sym(&(k2.cm.transpose() * &k1.b * &di * &k2.cm));
    let cm = &k1.cm * &di * &k2.cm;
    let c = k1.c * k2.c * inv_sqrt_det(&d);
    if !c.is_finite() {
        return Err(BargmannError::SingularComposition);
    }
    Ok(GaussianKernel { c, a, b, cm })
}

/// `∫ exp(½ w·γw + ½ w̄·δ̄ w̄ + w·a + w̄·b̄) dμ(w)` in closed form:
/// `det(I − γδ̄)^{-1/2} exp(½ a·δ̄ N a + b̄·N a + ½ b̄·N γ b̄)` with
/// `N = (I − γδ̄)^{-1}`.
///
/// Integrability is accepted when the spectral radius of `γδ̄` is below 1
/// and, if a linear term is present, `||γ||, ||δ|| ≤ 1`.
pub fn itzykson(
    gamma: &ComplexMatrix,
    delta: &ComplexMatrix,
    a: &ComplexVector,
    b: &ComplexVector,
) -> Result<Complex64, BargmannError> {
    let n = gamma.nrows();
    let db = conj(delta);
    let gd = gamma * &db;
    let eig = gd
        .clone()
        .schur()
        .eigenvalues()
        .ok_or(BargmannError::SingularMatrix)?;
    let radius = eig.iter().map(|x| x.norm()).fold(0.0, f64::max);
    if radius >= 1.0 {
        return Err(BargmannError::NotIntegrable);
    }
    let linear = a.iter().chain(b.iter()).any(|x| x.norm() > 0.0);
    if linear && (operator_norm(gamma) > 1.0 || operator_norm(delta) > 1.0) {
        return Err(BargmannError::NotIntegrable);
    }
    let m = identity(n) - gd;
    let nm = inverse(&m).map_err(|_| BargmannError::SingularMatrix)?;
    let bb = b.map(|x| x.conj());
    let na = &nm * a;
    let e = 0.5 * dot(a, &(&db * &na)) + dot(&bb, &na) + 0.5 * dot(&bb, &(&nm * gamma * &bb));
    Ok(inv_sqrt_det(&m) * e.exp())
}

/// `(e_w, e_{w2}) = e^{w·conj(w2)}` for coherent states `e_w(z) = e^{z·w̄}`.
pub fn coherent_inner(w: &ComplexVector, w2: &ComplexVector) -> Complex64 {
    dot(w, &w2.map(|x| x.conj())).exp()
}

/// Kernel of the metaplectic operator of an Sp_c element.
pub fn metaplectic_kernel(e: &SpcElement) -> GaussianKernel {
    semigroup_kernel(&SemigroupElement::from(e)).expect("λ is invertible on Sp_c")
}

/// `c = det(λ)^{-1/2}`, `A = νλ⁻¹`, `B = −λ⁻¹μ`, `C = λ^{-T}`.
pub fn semigroup_kernel(e: &SemigroupElement) -> Result<GaussianKernel, BargmannError> {
    let b = e.blocks();
    let li = inverse(&b.lambda).map_err(|_| BargmannError::SingularLambda)?;
    Ok(GaussianKernel {
        c: inv_sqrt_det(&b.lambda),
        a: sym(&(&b.nu * &li)),
        b: sym(&(-(&li * &b.mu))),
        cm: li.transpose(),
    })
}

/// Bargmann image of the squeezed state: `det(I − A*A)^{1/4} e^{½ z·Az}`.
pub fn squeezed_state(a: &Blob) -> GaussianVector {
    let m = a.matrix();
    let det = determinant(&(identity(a.n()) - m.adjoint() * m)).re;
    GaussianVector {
        c: c64(det.powf(0.25), 0.0),
        a: m.clone(),
    }
}

/// `T_K v`, again a Gaussian vector.
pub fn apply_kernel_to_vector(
    k: &GaussianKernel,
    v: &GaussianVector,
) -> Result<GaussianVector, BargmannError> {
    let n = k.n();
    let d = identity(n) - &v.a * &k.b;
    let di = inverse(&d).map_err(|_| BargmannError::SingularComposition)?;
    let a = &k.a + sym(&(&k.cm * &di * &v.a * k.cm.transpose()));
    let c = k.c * v.c * inv_sqrt_det(&d);
    if !c.is_finite() {
        return Err(BargmannError::SingularComposition);
    }
    Ok(GaussianVector { c, a })
}

/// `c(S, A)` from `T_S e_A = c(S, A) e_{A'}`, together with `A'`.
pub fn excitation_amplitude(
    k: &GaussianKernel,
    a: &Blob,
) -> Result<(Complex64, ComplexMatrix), BargmannError> {
    let out = apply_kernel_to_vector(k, &squeezed_state(a))?;
    let n = a.n();
    let det = determinant(&(identity(n) - out.a.adjoint() * &out.a)).re;
    if det <= 0.0 {
        return Err(BargmannError::NotIntegrable);
    }
    Ok((out.c / det.powf(0.25), out.a))
}

/// Largest componentwise discrepancy between two kernels, prefactors compared
/// up to sign.
pub fn kernel_distance_up_to_sign(k1: &GaussianKernel, k2: &GaussianKernel) -> f64 {
    let pre = (k1.c - k2.c).norm().min((k1.c + k2.c).norm());
    let scale = k1.c.norm().max(1.0);
    (&k1.a - &k2.a)
        .norm()
        .max((&k1.b - &k2.b).norm())
        .max((&k1.cm - &k2.cm).norm())
        .max(pre / scale)
}

/// Minimum eigenvalue of `I − G G*` for the joint quadratic form of a kernel;
/// positive exactly when the kernel is Hilbert–Schmidt.
pub fn hilbert_schmidt_margin(k: &GaussianKernel) -> Result<f64, BargmannError> {
    let g = crate::linalg::block2(&k.a, &k.cm, &k.cm.transpose(), &k.b);
    let h = hermitize(&(identity(2 * k.n()) - &g * g.adjoint()));
    let (w, _) = hermitian_eigen(&h, DEFAULT_TOL)?;
    Ok(w[0])
}
