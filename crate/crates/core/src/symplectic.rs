//! Real and complex realizations of the symplectic group, the oscillator
//! semigroup, and the generator families driving the walks.
//!
//! Conventions: `J = [[0, I], [-I, 0]]`, `K = diag(I, -I)`, and the Cayley
//! matrix `C = 2^{-1/2} [[I, iI], [I, -iI]]` with `C^{-1} = C^*`. A real
//! symplectic `S` maps to `C S C^{-1} = [[λ, μ], [conj(μ), conj(λ)]]`.
//! Semigroup elements keep all four blocks `[[λ, μ], [ν, ρ]]`; group elements
//! are the special case `ν = conj(μ)`, `ρ = conj(λ)`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DVector;
use num_complex::Complex64;
use rand::Rng;
use thiserror::Error;

use crate::linalg::{
    self, block2, c64, complexify, conj, expm, identity, inverse, operator_norm, real_expm,
    real_operator_norm, split_blocks, symmetry_residual, ComplexMatrix, LinalgError, RealMatrix,
    DEFAULT_TOL,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SymplecticError {
    #[error("matrix dimension {dim} is odd")]
    OddDimension { dim: usize },
    #[error("matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is not real symplectic (residual {residual:.3e})")]
    NotSymplectic { residual: f64 },
    #[error("Cayley image lacks the [[λ, μ], [conj μ, conj λ]] block structure (residual {residual:.3e})")]
    BlockStructureViolation { residual: f64 },
    #[error("matrix is not complex symplectic (residual {residual:.3e})")]
    NotComplexSymplectic { residual: f64 },
    #[error("beta = {beta} outside [0, 1)")]
    BetaOutOfRange { beta: f64 },
    #[error("generator index {index} outside 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("generator matrix is not symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },
    #[error("element is not in the semigroup: {reason}")]
    NotInSemigroup { reason: String },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// `J = [[0, I], [-I, 0]]`.
pub fn standard_j(n: usize) -> RealMatrix {
    let mut j = RealMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        j[(k, n + k)] = 1.0;
        j[(n + k, k)] = -1.0;
    }
    j
}

/// `K = diag(I, -I)`.
pub fn k_form(n: usize) -> ComplexMatrix {
    let mut k = ComplexMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        k[(i, i)] = c64(1.0, 0.0);
        k[(n + i, n + i)] = c64(-1.0, 0.0);
    }
    k
}

pub fn cayley_matrix(n: usize) -> ComplexMatrix {
    let s = FRAC_1_SQRT_2;
    let i = identity(n);
    block2(
        &(&i * c64(s, 0.0)),
        &(&i * c64(0.0, s)),
        &(&i * c64(s, 0.0)),
        &(&i * c64(0.0, -s)),
    )
}

pub fn cayley_matrix_inverse(n: usize) -> ComplexMatrix {
    cayley_matrix(n).adjoint()
}

fn ensure_even_square(rows: usize, cols: usize) -> Result<usize, SymplecticError> {
    if rows != cols {
        return Err(SymplecticError::NotSquare { rows, cols });
    }
    if !rows.is_multiple_of(2) {
        return Err(SymplecticError::OddDimension { dim: rows });
    }
    Ok(rows / 2)
}

/// `max(||S J S^T - J||, ||S^T J S - J||)` in the Frobenius norm.
pub fn real_symplectic_residual(s: &RealMatrix) -> Result<f64, SymplecticError> {
    let n = ensure_even_square(s.nrows(), s.ncols())?;
    let j = standard_j(n);
    let a = (s * &j * s.transpose() - &j).norm();
    let b = (s.transpose() * &j * s - &j).norm();
    Ok(a.max(b))
}

/// True iff `||S J S^T - J|| <= tol` and `||S^T J S - J|| <= tol`.
pub fn is_real_symplectic(s: &RealMatrix, tol: f64) -> Result<bool, SymplecticError> {
    Ok(real_symplectic_residual(s)? <= tol)
}

/// `||M J M^T - J||` for a complex 2n x 2n matrix.
pub fn complex_symplectic_residual(m: &ComplexMatrix) -> Result<f64, SymplecticError> {
    let n = ensure_even_square(m.nrows(), m.ncols())?;
    let j = complexify(&standard_j(n));
    Ok((m * &j * m.transpose() - j).norm())
}

/// A validated element of Sp(2n, R).
#[derive(Debug, Clone, PartialEq)]
pub struct RealSymplectic {
    s: RealMatrix,
}

impl RealSymplectic {
    /// Accepts `s` when its symplectic residual is within `tol * max(1, ||S||^2)`.
    pub fn new(s: RealMatrix, tol: f64) -> Result<Self, SymplecticError> {
        let residual = real_symplectic_residual(&s)?;
        let scale = real_operator_norm(&s).powi(2).max(1.0);
        if residual > tol * scale {
            return Err(SymplecticError::NotSymplectic { residual });
        }
        Ok(Self { s })
    }

    pub fn identity(n: usize) -> Self {
        Self {
            s: RealMatrix::identity(2 * n, 2 * n),
        }
    }

    pub fn matrix(&self) -> &RealMatrix {
        &self.s
    }

    pub fn into_matrix(self) -> RealMatrix {
        self.s
    }

    pub fn n(&self) -> usize {
        self.s.nrows() / 2
    }

    /// `S^{-1} = -J S^T J`.
    pub fn inverse(&self) -> Self {
        let j = standard_j(self.n());
        Self {
            s: -(&j * self.s.transpose() * &j),
        }
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            s: &self.s * &other.s,
        }
    }
}

/// The four n x n blocks of a 2n x 2n matrix `[[λ, μ], [ν, ρ]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blocks {
    pub lambda: ComplexMatrix,
    pub mu: ComplexMatrix,
    pub nu: ComplexMatrix,
    pub rho: ComplexMatrix,
}

impl Blocks {
    pub fn identity(n: usize) -> Self {
        Self {
            lambda: identity(n),
            mu: ComplexMatrix::zeros(n, n),
            nu: ComplexMatrix::zeros(n, n),
            rho: identity(n),
        }
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Result<Self, SymplecticError> {
        ensure_even_square(m.nrows(), m.ncols())?;
        let [lambda, mu, nu, rho] = split_blocks(m);
        Ok(Self {
            lambda,
            mu,
            nu,
            rho,
        })
    }

    pub fn to_matrix(&self) -> ComplexMatrix {
        block2(&self.lambda, &self.mu, &self.nu, &self.rho)
    }

    pub fn n(&self) -> usize {
        self.lambda.nrows()
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            lambda: &self.lambda * &other.lambda + &self.mu * &other.nu,
            mu: &self.lambda * &other.mu + &self.mu * &other.rho,
            nu: &self.nu * &other.lambda + &self.rho * &other.nu,
            rho: &self.nu * &other.mu + &self.rho * &other.rho,
        }
    }
}

/// Anything that can be presented in `[[λ, μ], [ν, ρ]]` block form.
pub trait BlockElement {
    fn blocks(&self) -> Blocks;

    fn n(&self) -> usize;

    fn block_matrix(&self) -> ComplexMatrix {
        self.blocks().to_matrix()
    }
}

impl BlockElement for Blocks {
    fn blocks(&self) -> Blocks {
        self.clone()
    }

    fn n(&self) -> usize {
        self.lambda.nrows()
    }
}

/// Element of the complex realization Sp_c, `[[λ, μ], [conj μ, conj λ]]`.
#[derive(Debug, Clone, PartialEq)]
pub struct SpcElement {
    lambda: ComplexMatrix,
    mu: ComplexMatrix,
}

impl SpcElement {
    /// Wraps `(λ, μ)` without checking anything; see [`validate_spc`].
    pub fn from_blocks_unchecked(lambda: ComplexMatrix, mu: ComplexMatrix) -> Self {
        Self { lambda, mu }
    }

    /// Checked constructor: `λλ* − μμ* = I` and `λμ^T = μλ^T`, both within
    /// `tol * max(1, ||λ||^2)`.
    pub fn new(
        lambda: ComplexMatrix,
        mu: ComplexMatrix,
        tol: f64,
    ) -> Result<Self, SymplecticError> {
        let e = Self { lambda, mu };
        let n = e.n();
        let scale = operator_norm(&e.lambda).powi(2).max(1.0);
        let r1 = (&e.lambda * e.lambda.adjoint() - &e.mu * e.mu.adjoint() - identity(n)).norm();
        let r2 = (&e.lambda * e.mu.transpose() - &e.mu * e.lambda.transpose()).norm();
        let residual = r1.max(r2);
        if residual > tol * scale {
            return Err(SymplecticError::NotComplexSymplectic { residual });
        }
        Ok(e)
    }

    pub fn identity(n: usize) -> Self {
        Self {
            lambda: identity(n),
            mu: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn lambda(&self) -> &ComplexMatrix {
        &self.lambda
    }

    pub fn mu(&self) -> &ComplexMatrix {
        &self.mu
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            lambda: &self.lambda * &other.lambda + &self.mu * conj(&other.mu),
            mu: &self.lambda * &other.mu + &self.mu * conj(&other.lambda),
        }
    }

    /// Inverse via `S^{-1} = K S^* K`.
    pub fn inverse(&self) -> Self {
        Self {
            lambda: self.lambda.adjoint(),
            mu: -self.mu.transpose(),
        }
    }

    /// Scalar entries for n = 1.
    pub fn scalars(&self) -> (Complex64, Complex64) {
        (self.lambda[(0, 0)], self.mu[(0, 0)])
    }
}

impl BlockElement for SpcElement {
    fn blocks(&self) -> Blocks {
        Blocks {
            lambda: self.lambda.clone(),
            mu: self.mu.clone(),
            nu: conj(&self.mu),
            rho: conj(&self.lambda),
        }
    }

    fn n(&self) -> usize {
        self.lambda.nrows()
    }
}

/// Element of the oscillator semigroup `S_K` (complex symplectic, `K`-expanding).
#[derive(Debug, Clone, PartialEq)]
pub struct SemigroupElement {
    blocks: Blocks,
}

impl SemigroupElement {
    /// Checked constructor; see [`validate_semigroup`] for the conditions.
    pub fn new(blocks: Blocks, tol: f64) -> Result<Self, SymplecticError> {
        let report = validate_semigroup(&blocks, tol)?;
        if let Some(c) = report.checks.iter().find(|c| !c.passed) {
            return Err(SymplecticError::NotInSemigroup {
                reason: format!("{} (residual {:.3e})", c.name, c.residual),
            });
        }
        Ok(Self { blocks })
    }

    pub fn from_matrix(m: &ComplexMatrix, tol: f64) -> Result<Self, SymplecticError> {
        Self::new(Blocks::from_matrix(m)?, tol)
    }

    pub fn from_unchecked(blocks: Blocks) -> Self {
        Self { blocks }
    }

    pub fn identity(n: usize) -> Self {
        Self {
            blocks: Blocks::identity(n),
        }
    }

    pub fn as_blocks(&self) -> &Blocks {
        &self.blocks
    }

    pub fn compose(&self, other: &Self) -> Self {
        Self {
            blocks: self.blocks.compose(&other.blocks),
        }
    }

    pub fn scalars(&self) -> [Complex64; 4] {
        let b = &self.blocks;
        [b.lambda[(0, 0)], b.mu[(0, 0)], b.nu[(0, 0)], b.rho[(0, 0)]]
    }
}

impl From<&SpcElement> for SemigroupElement {
    fn from(e: &SpcElement) -> Self {
        Self { blocks: e.blocks() }
    }
}

impl BlockElement for SemigroupElement {
    fn blocks(&self) -> Blocks {
        self.blocks.clone()
    }

    fn n(&self) -> usize {
        self.blocks.n()
    }
}

/// `C S C^{-1}` repackaged as `(λ, μ)`.
pub fn cayley_to_complex(s: &RealSymplectic) -> Result<SpcElement, SymplecticError> {
    let n = s.n();
    let residual = real_symplectic_residual(s.matrix())?;
    let scale = real_operator_norm(s.matrix()).powi(2).max(1.0);
    if residual > DEFAULT_TOL * scale {
        return Err(SymplecticError::NotSymplectic { residual });
    }
    let m = cayley_matrix(n) * complexify(s.matrix()) * cayley_matrix_inverse(n);
    let [lambda, mu, nu, rho] = split_blocks(&m);
    let residual = (nu - conj(&mu)).norm().max((rho - conj(&lambda)).norm());
    if residual > DEFAULT_TOL * scale.sqrt() {
        return Err(SymplecticError::BlockStructureViolation { residual });
    }
    Ok(SpcElement { lambda, mu })
}

/// `C^{-1} M C`; real-valued (up to roundoff) for Sp_c inputs.
pub fn cayley_to_real(e: &impl BlockElement) -> ComplexMatrix {
    let n = e.n();
    cayley_matrix_inverse(n) * e.block_matrix() * cayley_matrix(n)
}

/// Real symplectic matrix of an Sp_c element.
pub fn spc_to_real(e: &SpcElement) -> RealMatrix {
    linalg::real_part(&cayley_to_real(e))
}

/// One named identity in a validation report.
#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub name: &'static str,
    pub residual: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub checks: Vec<Check>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.checks
            .iter()
            .filter(|c| c.name.contains('='))
            .map(|c| c.residual)
            .fold(0.0, f64::max)
    }

    fn push(&mut self, name: &'static str, residual: f64, passed: bool) {
        self.checks.push(Check {
            name,
            residual,
            passed,
        });
    }
}

impl std::fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{} {:<40} residual {:.3e}",
                if c.passed { "PASS" } else { "FAIL" },
                c.name,
                c.residual
            )?;
        }
        Ok(())
    }
}

pub const CHECK_LL_MM: &str = "λλ* − μμ* = I";
pub const CHECK_LMT: &str = "λμ^T = μλ^T";
pub const CHECK_LSL: &str = "λ*λ − μ^T conj(μ) = I";
pub const CHECK_LTM: &str = "λ^T conj(μ) = μ* λ";
pub const CHECK_LINV_MU_SYM: &str = "λ⁻¹μ symmetric";
pub const CHECK_MU_LINV_SYM: &str = "conj(μ)λ⁻¹ symmetric";
pub const CHECK_CONTRACTION: &str = "||conj(μ)λ⁻¹|| < 1";
pub const CHECK_LAMBDA_NORM: &str = "||λ|| ≥ 1";
pub const CHECK_NORM_IDENTITY: &str = "||λ⁻¹μ||² = 1 − ||λ||⁻²";

/// Folland-type identities for a candidate Sp_c element.
///
/// Equalities pass when their Frobenius residual is within
/// `tol * max(1, ||λ||^2)`; the reported residual is the raw value.
///
/// The norm identity checked here is `||λ⁻¹μ||² = ||conj(μ)λ⁻¹||² = 1 − ||λ||⁻²`,
/// which follows from `λ⁻¹μ(λ⁻¹μ)* = I − (λ*λ)⁻¹`.
pub fn validate_spc(e: &SpcElement, tol: f64) -> ValidationReport {
    let l = &e.lambda;
    let m = &e.mu;
    let n = l.nrows();
    let id = identity(n);
    let norm_l = operator_norm(l);
    let scale = norm_l.powi(2).max(1.0);
    let eq = |r: f64| r <= tol * scale;
    let mut report = ValidationReport::default();

    let r = (l * l.adjoint() - m * m.adjoint() - &id).norm();
    report.push(CHECK_LL_MM, r, eq(r));
    let r = (l * m.transpose() - m * l.transpose()).norm();
    report.push(CHECK_LMT, r, eq(r));
    let r = (l.adjoint() * l - m.transpose() * conj(m) - &id).norm();
    report.push(CHECK_LSL, r, eq(r));
    let r = (l.transpose() * conj(m) - m.adjoint() * l).norm();
    report.push(CHECK_LTM, r, eq(r));

    match inverse(l) {
        Ok(li) => {
            let x = &li * m;
            let y = conj(m) * &li;
            let r = symmetry_residual(&x);
            report.push(CHECK_LINV_MU_SYM, r, eq(r));
            let r = symmetry_residual(&y);
            report.push(CHECK_MU_LINV_SYM, r, eq(r));
            let ny = operator_norm(&y);
            report.push(CHECK_CONTRACTION, ny, ny < 1.0);
            report.push(CHECK_LAMBDA_NORM, norm_l, norm_l >= 1.0 - tol);
            let r = (operator_norm(&x).powi(2) - (1.0 - norm_l.powi(-2))).abs();
            report.push(CHECK_NORM_IDENTITY, r, r <= tol * scale);
        }
        Err(_) => {
            for name in [
                CHECK_LINV_MU_SYM,
                CHECK_MU_LINV_SYM,
                CHECK_CONTRACTION,
                CHECK_LAMBDA_NORM,
                CHECK_NORM_IDENTITY,
            ] {
                report.push(name, f64::INFINITY, false);
            }
        }
    }
    report
}

/// U(n, n) conditions `S* K S = K` written blockwise.
pub fn unn_residual(b: &Blocks) -> f64 {
    let n = b.n();
    let id = identity(n);
    let (l, m, v, r) = (&b.lambda, &b.mu, &b.nu, &b.rho);
    let r1 = (l.adjoint() * l - v.adjoint() * v - &id).norm();
    let r2 = (r.adjoint() * r - m.adjoint() * m - &id).norm();
    let r3 = (l.adjoint() * m - v.adjoint() * r).norm();
    let r4 = (m.adjoint() * l - r.adjoint() * v).norm();
    r1.max(r2).max(r3).max(r4)
}

pub const CHECK_SYMPLECTIC: &str = "M J M^T = J";
pub const CHECK_NU_LINV_SYM: &str = "νλ⁻¹ symmetric";
pub const CHECK_NU_LINV_NORM: &str = "||νλ⁻¹|| < 1";
pub const CHECK_RHO: &str = "ρ = λ^{-T} + νλ⁻¹μ";
pub const CHECK_EXPANDING: &str = "M*KM − K ≥ 0";

/// Symplectic and invertibility conditions for a semigroup element.
pub fn validate_semigroup(b: &Blocks, tol: f64) -> Result<ValidationReport, SymplecticError> {
    let m = b.to_matrix();
    let scale = operator_norm(&m).powi(2).max(1.0);
    let mut report = ValidationReport::default();
    let r = complex_symplectic_residual(&m)?;
    report.push(CHECK_SYMPLECTIC, r, r <= tol * scale);
    match inverse(&b.lambda) {
        Ok(li) => {
            let a = &b.nu * &li;
            let r = symmetry_residual(&a);
            report.push(CHECK_NU_LINV_SYM, r, r <= tol * scale);
            let na = operator_norm(&a);
            report.push(CHECK_NU_LINV_NORM, na, na < 1.0);
            let r = (&b.rho - li.transpose() - &a * &b.mu).norm();
            report.push(CHECK_RHO, r, r <= tol * scale);
        }
        Err(_) => {
            for name in [CHECK_NU_LINV_SYM, CHECK_NU_LINV_NORM, CHECK_RHO] {
                report.push(name, f64::INFINITY, false);
            }
        }
    }
    let (w, _) = linalg::hermitian_eigen(&expansion_form(&m), tol)?;
    let min = w.first().copied().unwrap_or(0.0);
    report.push(CHECK_EXPANDING, min, min >= -tol * scale);
    Ok(report)
}

/// `M* K M − K`; positive semidefinite exactly on `S_K`.
pub fn expansion_form(m: &ComplexMatrix) -> ComplexMatrix {
    let k = k_form(m.nrows() / 2);
    linalg::hermitize(&(m.adjoint() * &k * m - &k))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SemigroupClass {
    /// In Sp_c (up to tolerance): `M*KM = K`.
    Group,
    /// In `S_K` but neither in the group nor in the interior.
    Boundary,
    /// `K(Mv) > K(v)` for all nonzero `v`.
    Interior,
    Outside,
}

/// Classifies a complex symplectic matrix by the spectrum of `M*KM − K`.
///
/// `tol` is applied relative to `max(1, ||M||^2)`.
pub fn semigroup_class(m: &ComplexMatrix, tol: f64) -> Result<SemigroupClass, SymplecticError> {
    let residual = complex_symplectic_residual(m)?;
    let scale = operator_norm(m).powi(2).max(1.0);
    if residual > tol * scale {
        return Err(SymplecticError::NotComplexSymplectic { residual });
    }
    let (w, _) = linalg::hermitian_eigen(&expansion_form(m), tol * scale)?;
    let t = tol * scale;
    let class = if w.iter().all(|x| x.abs() <= t) {
        SemigroupClass::Group
    } else if w.iter().all(|&x| x > t) {
        SemigroupClass::Interior
    } else if w.iter().all(|&x| x >= -t) {
        SemigroupClass::Boundary
    } else {
        SemigroupClass::Outside
    };
    Ok(class)
}

fn k_value(v: &linalg::ComplexVector, n: usize) -> f64 {
    let top: f64 = (0..n).map(|i| v[i].norm_sqr()).sum();
    let bottom: f64 = (n..2 * n).map(|i| v[i].norm_sqr()).sum();
    top - bottom
}

/// Draws `samples` random positive vectors (`K(v) > 0`) and reports whether
/// every image is again positive. Probabilistic: `false` is conclusive,
/// `true` is evidence only.
pub fn preserves_positive_vectors(m: &ComplexMatrix, samples: usize, rng: &mut impl Rng) -> bool {
    let n = m.nrows() / 2;
    let mut drawn = 0;
    while drawn < samples {
        let v = random_vector(rng, 2 * n);
        if k_value(&v, n) <= 0.0 {
            continue;
        }
        drawn += 1;
        if k_value(&(m * &v), n) <= 0.0 {
            return false;
        }
    }
    true
}

/// Smallest value of `(K(Mv) − K(v)) / |v|^2` over random unit vectors.
pub fn sampled_expansion(m: &ComplexMatrix, samples: usize, rng: &mut impl Rng) -> f64 {
    let n = m.nrows() / 2;
    (0..samples)
        .map(|_| {
            let v = random_vector(rng, 2 * n);
            (k_value(&(m * &v), n) - k_value(&v, n)) / v.norm_squared()
        })
        .fold(f64::INFINITY, f64::min)
}

fn random_vector(rng: &mut impl Rng, dim: usize) -> linalg::ComplexVector {
    linalg::ComplexVector::from_iterator(
        dim,
        (0..dim).map(|_| c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))),
    )
}

fn check_symmetric_real(h: &RealMatrix) -> Result<usize, SymplecticError> {
    let n = ensure_even_square(h.nrows(), h.ncols())?;
    let residual = (h - h.transpose()).norm();
    if residual > DEFAULT_TOL * h.norm().max(1.0) {
        return Err(SymplecticError::NotSymmetric { residual });
    }
    Ok(n)
}

/// One-parameter subgroup `exp(τ J h)` generated by the quadratic
/// Hamiltonian with symmetric matrix `h`.
pub fn exp_generator(h: &RealMatrix, tau: f64) -> Result<RealSymplectic, SymplecticError> {
    let n = check_symmetric_real(h)?;
    let s = real_expm(&(standard_j(n) * h * tau));
    RealSymplectic::new(s, DEFAULT_TOL)
}

/// Cayley image of the analytic continuation `exp(iκ J h)`.
///
/// For positive semidefinite `h` and `κ > 0` this lands in `S_K`;
/// `h = I` gives the interior element `diag(e^κ, e^{-κ})`.
pub fn continued_flow(h: &RealMatrix, kappa: f64) -> Result<SemigroupElement, SymplecticError> {
    let n = check_symmetric_real(h)?;
    let gen = complexify(&(standard_j(n) * h)) * c64(0.0, kappa);
    let m = cayley_matrix(n) * expm(&gen) * cayley_matrix_inverse(n);
    SemigroupElement::from_matrix(&m, DEFAULT_TOL)
}

fn real2(a: f64, b: f64, c: f64, d: f64) -> RealMatrix {
    RealMatrix::from_row_slice(2, 2, &[a, b, c, d])
}

fn scalar_spc(lambda: Complex64, mu: Complex64) -> SpcElement {
    SpcElement {
        lambda: ComplexMatrix::from_element(1, 1, lambda),
        mu: ComplexMatrix::from_element(1, 1, mu),
    }
}

/// `S_i(β)`, i = 1..4: the squeezing `S_1(β) = (1−β²)^{-1/2} [[1, β], [β, 1]]`
/// and its successive π/2 rotations, paired with the Cayley image
/// `A_i(β) = C S_i(β) C^{-1}`. `S_3 = S_1^{-1}`, `S_4 = S_2^{-1}`.
///
/// The Cayley image has `λ = (1−β²)^{-1/2}` and
/// `μ = (iβ, −β, −iβ, β) (1−β²)^{-1/2}` for i = 1..4.
pub fn hyperbolic_generator(
    beta: f64,
    i: usize,
) -> Result<(RealSymplectic, SpcElement), SymplecticError> {
    if !(0.0..1.0).contains(&beta) {
        return Err(SymplecticError::BetaOutOfRange { beta });
    }
    let g = 1.0 / (1.0 - beta * beta).sqrt();
    let s = match i {
        1 => real2(g, g * beta, g * beta, g),
        2 => real2(g * (1.0 - beta), 0.0, 0.0, g * (1.0 + beta)),
        3 => real2(g, -g * beta, -g * beta, g),
        4 => real2(g * (1.0 + beta), 0.0, 0.0, g * (1.0 - beta)),
        _ => return Err(SymplecticError::IndexOutOfRange { index: i, max: 4 }),
    };
    let s = RealSymplectic::new(s, DEFAULT_TOL)?;
    let a = cayley_to_complex(&s)?;
    Ok((s, a))
}

/// The four hyperbolic Sp_c generators for a given β.
pub fn hyperbolic_family(beta: f64) -> Result<Vec<SpcElement>, SymplecticError> {
    (1..=4)
        .map(|i| hyperbolic_generator(beta, i).map(|(_, a)| a))
        .collect()
}

/// Parabolic elements built from free evolution `S(τ) = [[1, τ], [0, 1]]`.
///
/// Indices 1..4 have `λ = 1 − iτ/2` and `μ = (iτ, −τ, −iτ, τ)/2`; these are
/// successive π/2 rotations of the Cayley image of `S(τ)`. Indices 5..8 are
/// the inverses of 1..4. Every element has trace 2.
pub fn parabolic_generator(
    tau: f64,
    i: usize,
) -> Result<(RealSymplectic, SpcElement), SymplecticError> {
    let base = |k: usize| {
        let lambda = c64(1.0, -tau / 2.0);
        let mu = match k {
            1 => c64(0.0, tau / 2.0),
            2 => c64(-tau / 2.0, 0.0),
            3 => c64(0.0, -tau / 2.0),
            _ => c64(tau / 2.0, 0.0),
        };
        scalar_spc(lambda, mu)
    };
    let a = match i {
        1..=4 => base(i),
        5..=8 => base(i - 4).inverse(),
        _ => return Err(SymplecticError::IndexOutOfRange { index: i, max: 8 }),
    };
    let s = RealSymplectic::new(spc_to_real(&a), DEFAULT_TOL)?;
    Ok((s, a))
}

/// The eight parabolic Sp_c generators for a given τ.
pub fn parabolic_family(tau: f64) -> Vec<SpcElement> {
    (1..=8)
        .map(|i| parabolic_generator(tau, i).expect("index in range").1)
        .collect()
}

/// Phase-space rotation `exp(θ J)` (harmonic oscillator flow) and its Cayley
/// image `diag(e^{-iθ}, e^{iθ})`.
pub fn rotation_generator(theta: f64) -> (RealSymplectic, SpcElement) {
    let (s, c) = theta.sin_cos();
    let rot = RealSymplectic {
        s: real2(c, s, -s, c),
    };
    let a = scalar_spc(Complex64::from_polar(1.0, -theta), c64(0.0, 0.0));
    (rot, a)
}

/// `diag(U, conj U)` for a unitary `U`: the stabilizer of the origin blob.
pub fn unitary_element(u: &ComplexMatrix) -> SpcElement {
    SpcElement {
        lambda: u.clone(),
        mu: ComplexMatrix::zeros(u.nrows(), u.nrows()),
    }
}

/// Trace of the 2n x 2n block matrix.
pub fn trace(e: &impl BlockElement) -> Complex64 {
    e.block_matrix().trace()
}

/// Real diagonal matrix helper.
pub fn real_diag(values: &[f64]) -> RealMatrix {
    RealMatrix::from_diagonal(&DVector::from_row_slice(values))
}
