//! Origin-centred squeezed states ("quantum blobs") as points of the Siegel
//! disk, the fractional-linear action on them, and their phase-space shape.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::linalg::{
    c64, conj, determinant, hermitian_inv_sqrt, identity, inverse, operator_norm, right_divide,
    symmetrize, symmetry_residual, takagi, ComplexMatrix, ComplexVector, LinalgError, RealMatrix,
    DEFAULT_TOL,
};
use crate::symplectic::{BlockElement, Blocks, SpcElement};

/// Default distance kept from the boundary of the disk.
pub const DEFAULT_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BlobError {
    #[error("blob matrix is {rows}x{cols}, expected square")]
    NotSquare { rows: usize, cols: usize },
    #[error("blob matrix is not symmetric (residual {residual:.3e})")]
    NotSymmetric { residual: f64 },
    #[error("blob norm {norm} is not below 1 - {slack:e}")]
    NormTooLarge { norm: f64, slack: f64 },
    #[error("blob matrix has non-finite entries")]
    NonFinite,
    #[error("denominator μA + λ is singular")]
    SingularDenominator,
    #[error("I - A*A is numerically singular")]
    NormTooClose,
    #[error("dimension mismatch: element acts on n = {element}, blob has n = {blob}")]
    DimensionMismatch { element: usize, blob: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// Complex symmetric `A` with `||A|| < 1 - slack`.
#[derive(Debug, Clone, PartialEq)]
pub struct Blob {
    a: ComplexMatrix,
}

impl Blob {
    pub fn new(a: ComplexMatrix) -> Result<Self, BlobError> {
        Self::with_slack(a, DEFAULT_SLACK)
    }

    /// Validates and symmetrizes `a`.
    pub fn with_slack(a: ComplexMatrix, slack: f64) -> Result<Self, BlobError> {
        if a.nrows() != a.ncols() {
            return Err(BlobError::NotSquare {
                rows: a.nrows(),
                cols: a.ncols(),
            });
        }
        if !crate::linalg::is_finite(&a) {
            return Err(BlobError::NonFinite);
        }
        let residual = symmetry_residual(&a);
        if residual > DEFAULT_TOL * a.norm().max(1.0) {
            return Err(BlobError::NotSymmetric { residual });
        }
        let a = symmetrize(&a);
        let norm = operator_norm(&a);
        if norm >= 1.0 - slack {
            return Err(BlobError::NormTooLarge { norm, slack });
        }
        Ok(Self { a })
    }

    pub fn scalar(a: Complex64) -> Result<Self, BlobError> {
        Self::new(ComplexMatrix::from_element(1, 1, a))
    }

    pub fn origin(n: usize) -> Self {
        Self {
            a: ComplexMatrix::zeros(n, n),
        }
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.a
    }

    pub fn into_matrix(self) -> ComplexMatrix {
        self.a
    }

    pub fn n(&self) -> usize {
        self.a.nrows()
    }

    pub fn norm(&self) -> f64 {
        operator_norm(&self.a)
    }

    /// The entry of a 1x1 blob.
    pub fn as_scalar(&self) -> Option<Complex64> {
        (self.n() == 1).then(|| self.a[(0, 0)])
    }
}

/// `(ρA + ν)(μA + λ)^{-1}` without projecting onto the disk.
pub fn mobius_apply_raw(b: &Blocks, a: &ComplexMatrix) -> Result<ComplexMatrix, BlobError> {
    if b.n() != a.nrows() {
        return Err(BlobError::DimensionMismatch {
            element: b.n(),
            blob: a.nrows(),
        });
    }
    let den = &b.mu * a + &b.lambda;
    let num = &b.rho * a + &b.nu;
    right_divide(&num, &den).map_err(|e| match e {
        LinalgError::Singular => BlobError::SingularDenominator,
        other => other.into(),
    })
}

/// Fractional-linear action on the Siegel disk.
///
/// For Sp_c elements this is `(conj(λ)A + conj(μ))(μA + λ)^{-1}`.
pub fn mobius_apply(e: &impl BlockElement, a: &Blob) -> Result<Blob, BlobError> {
    let out = mobius_apply_raw(&e.blocks(), a.matrix())?;
    Blob::new(symmetrize(&out))
}

/// `(ρa + ν)/(μa + λ)` for scalars; also defined on the boundary circle.
pub fn mobius_scalar(blocks: [Complex64; 4], a: Complex64) -> Complex64 {
    let [lambda, mu, nu, rho] = blocks;
    (rho * a + nu) / (mu * a + lambda)
}

/// Scalar entries `[λ, μ, conj μ, conj λ]` of an n = 1 Sp_c element.
pub fn spc_scalars(e: &SpcElement) -> [Complex64; 4] {
    let (l, m) = e.scalars();
    [l, m, m.conj(), l.conj()]
}

/// `ι(A) = [[Λ, A* conj(Λ)], [AΛ, conj(Λ)]]` with `Λ = (I − A*A)^{-1/2}`.
pub fn iota(a: &Blob) -> Result<SpcElement, BlobError> {
    let m = a.matrix();
    let n = a.n();
    let h = identity(n) - m.adjoint() * m;
    let lambda =
        hermitian_inv_sqrt(&crate::linalg::hermitize(&h), 1e-300).map_err(|e| match e {
            LinalgError::NotPositiveDefinite { .. } => BlobError::NormTooClose,
            other => other.into(),
        })?;
    if !crate::linalg::is_finite(&lambda) {
        return Err(BlobError::NormTooClose);
    }
    let mu = m.adjoint() * conj(&lambda);
    Ok(SpcElement::from_blocks_unchecked(lambda, mu))
}

/// `h(S) = conj(μ) λ^{-1}`, the image of the origin under `S`.
pub fn h_map(e: &SpcElement) -> Result<Blob, BlobError> {
    mobius_apply(e, &Blob::origin(e.n()))
}

/// Takagi data and phase-space ellipse of a blob.
#[derive(Debug, Clone, PartialEq)]
pub struct BlobShape {
    pub u: ComplexMatrix,
    pub sigma: Vec<f64>,
    /// `[[Re U, −Im U], [Im U, Re U]]`, orthogonal and symplectic.
    pub q: RealMatrix,
    /// `diag(b, a)`, symplectic.
    pub d: RealMatrix,
    /// Long semi-axes `√((1+σ)/(1−σ))`.
    pub a: Vec<f64>,
    /// Short semi-axes `1/a`.
    pub b: Vec<f64>,
}

impl BlobShape {
    /// `H = Q D Q^T`, the symmetric positive matrix with `|z'| = |H x|`.
    pub fn h_matrix(&self) -> RealMatrix {
        &self.q * &self.d * self.q.transpose()
    }

    /// Rotation angle of the ellipse for n = 1.
    pub fn angle(&self) -> Option<f64> {
        (self.u.nrows() == 1).then(|| self.u[(0, 0)].arg())
    }
}

pub fn shape(a: &Blob) -> Result<BlobShape, BlobError> {
    let n = a.n();
    let t = takagi(a.matrix(), DEFAULT_TOL)?;
    let (re, im) = (
        crate::linalg::real_part(&t.u),
        crate::linalg::imag_part(&t.u),
    );
    let mut q = RealMatrix::zeros(2 * n, 2 * n);
    q.view_mut((0, 0), (n, n)).copy_from(&re);
    q.view_mut((0, n), (n, n)).copy_from(&(-&im));
    q.view_mut((n, 0), (n, n)).copy_from(&im);
    q.view_mut((n, n), (n, n)).copy_from(&re);
    let b: Vec<f64> = t
        .sigma
        .iter()
        .map(|&s| ((1.0 - s) / (1.0 + s)).sqrt())
        .collect();
    let long: Vec<f64> = b.iter().map(|x| 1.0 / x).collect();
    let mut d = RealMatrix::zeros(2 * n, 2 * n);
    for k in 0..n {
        d[(k, k)] = b[k];
        d[(n + k, n + k)] = long[k];
    }
    Ok(BlobShape {
        u: t.u,
        sigma: t.sigma,
        q,
        d,
        a: long,
        b,
    })
}

/// Precomputed data for evaluating the Wigner function of `e_A`.
#[derive(Debug, Clone)]
pub struct Wigner {
    n: usize,
    p: ComplexMatrix,
    pa: ComplexMatrix,
}

impl Wigner {
    pub fn new(a: &Blob) -> Result<Self, BlobError> {
        let m = a.matrix();
        let n = a.n();
        let h = crate::linalg::hermitize(&(identity(n) - m * conj(m)));
        let p = hermitian_inv_sqrt(&h, 1e-300).map_err(|_| BlobError::NormTooClose)?;
        let pa = &p * m;
        Ok(Self { n, p, pa })
    }

    /// `z' = (I − A conj A)^{-1/2} (z − A conj z)` for `z = q + ip`.
    pub fn z_prime(&self, x: &[f64]) -> ComplexVector {
        let n = self.n;
        let z = ComplexVector::from_iterator(n, (0..n).map(|k| c64(x[k], x[n + k])));
        &self.p * &z - &self.pa * z.map(|v| v.conj())
    }

    /// `π^{-n} exp(−|z'|²)` at the phase-space point `x = (q, p)`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        assert_eq!(x.len(), 2 * self.n, "phase-space point has wrong dimension");
        PI.powi(-(self.n as i32)) * (-self.z_prime(x).norm_squared()).exp()
    }
}

/// Wigner distribution of the squeezed state `e_A` at each `(q, p)` point.
pub fn wigner_eval(a: &Blob, points: &[Vec<f64>]) -> Result<Vec<f64>, BlobError> {
    let w = Wigner::new(a)?;
    Ok(points.iter().map(|x| w.eval(x)).collect())
}

/// Position-representation parameters of a blob.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianParams {
    /// `Z = (I − A)(I + A)^{-1}`; complex symmetric with `Re Z > 0`.
    pub z: ComplexMatrix,
    /// Unit-modulus phase `det(I + Z)^{1/2} / |det(I + Z)|^{1/2}`.
    pub phase: Complex64,
}

pub fn blob_to_gaussian(a: &Blob) -> Result<GaussianParams, BlobError> {
    let n = a.n();
    let id = identity(n);
    let z = symmetrize(&right_divide(&(&id - a.matrix()), &(&id + a.matrix()))?);
    let det = determinant(&(&id + &z));
    let phase = det.sqrt() / det.norm().sqrt();
    Ok(GaussianParams { z, phase })
}

/// `A = (I − Z)(I + Z)^{-1}`.
pub fn gaussian_to_blob(z: &ComplexMatrix) -> Result<Blob, BlobError> {
    let id = identity(z.nrows());
    let a = right_divide(&(&id - z), &(&id + z))?;
    Blob::new(symmetrize(&a))
}

/// `|c(S, A)|² = det(I − A*A)^{1/2} / |det M|^{1/2}` with
/// `M = X*X − Y*Y`, `X = μA + λ`, `Y = ρA + ν`.
pub fn jump_probability(e: &impl BlockElement, a: &Blob) -> Result<f64, BlobError> {
    let b = e.blocks();
    let m = a.matrix();
    let n = a.n();
    if b.n() != n {
        return Err(BlobError::DimensionMismatch {
            element: b.n(),
            blob: n,
        });
    }
    let x = &b.mu * m + &b.lambda;
    let y = &b.rho * m + &b.nu;
    let big = x.adjoint() * &x - y.adjoint() * &y;
    let det_m = determinant(&big).re.abs();
    if det_m == 0.0 || inverse(&x).is_err() {
        return Err(BlobError::SingularDenominator);
    }
    let det_a = determinant(&(identity(n) - m.adjoint() * m)).re;
    Ok((det_a / det_m).sqrt())
}

/// Scalar form of [`jump_probability`].
pub fn jump_probability_scalar(blocks: [Complex64; 4], a: Complex64) -> f64 {
    let [lambda, mu, nu, rho] = blocks;
    let m = (mu * a + lambda).norm_sqr() - (rho * a + nu).norm_sqr();
    ((1.0 - a.norm_sqr()) / m.abs()).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::symplectic::{continued_flow, hyperbolic_generator, real_diag, rotation_generator};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn random_blob(rng: &mut impl Rng, n: usize, radius: f64) -> Blob {
        let mut m = ComplexMatrix::from_fn(n, n, |_, _| {
            c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
        });
        m = symmetrize(&m);
        let s = radius * rng.random_range(0.0..1.0) / operator_norm(&m);
        Blob::new(m * c64(s, 0.0)).unwrap()
    }

    #[test]
    fn blob_validation() {
        assert!(Blob::scalar(c64(0.5, 0.5)).is_ok());
        assert!(matches!(
            Blob::scalar(c64(1.0, 0.0)),
            Err(BlobError::NormTooLarge { .. })
        ));
        let m = ComplexMatrix::from_row_slice(
            2,
            2,
            &[c64(0.0, 0.0), c64(0.1, 0.0), c64(0.2, 0.0), c64(0.0, 0.0)],
        );
        assert!(matches!(Blob::new(m), Err(BlobError::NotSymmetric { .. })));
    }

    #[test]
    fn mobius_examples() {
        let a = Blob::scalar(c64(0.3, -0.2)).unwrap();
        let id = SpcElement::identity(1);
        assert_eq!(mobius_apply(&id, &a).unwrap().as_scalar(), a.as_scalar());
        let beta = 0.6;
        let (_, e) = hyperbolic_generator(beta, 1).unwrap();
        let out = mobius_apply(&e, &Blob::origin(1))
            .unwrap()
            .as_scalar()
            .unwrap();
        assert!((out - c64(0.0, -beta)).norm() < 1e-14);
        assert_eq!(h_map(&e).unwrap().as_scalar(), Some(out));
    }

    #[test]
    fn scalar_metric_identity_and_fixed_points() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let (_, s) =
                hyperbolic_generator(rng.random_range(0.0..0.9), rng.random_range(1..=4)).unwrap();
            let a = random_blob(&mut rng, 1, 0.99).as_scalar().unwrap();
            let blocks = spc_scalars(&s);
            let a2 = mobius_scalar(blocks, a);
            let (l, m) = s.scalars();
            let lhs = 1.0 - a2.norm_sqr();
            let rhs = (1.0 - a.norm_sqr()) / (m * a + l).norm_sqr();
            assert!((lhs - rhs).abs() < 1e-12);
        }
        let (_, s) = hyperbolic_generator(0.7, 1).unwrap();
        for p in [c64(0.0, 1.0), c64(0.0, -1.0)] {
            assert!((mobius_scalar(spc_scalars(&s), p) - p).norm() < 1e-12);
        }
    }

    #[test]
    fn iota_and_h() {
        assert_eq!(iota(&Blob::origin(2)).unwrap(), SpcElement::identity(2));
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for n in 1..=4 {
            for _ in 0..20 {
                let a = random_blob(&mut rng, n, 0.95);
                let e = iota(&a).unwrap();
                assert!(crate::symplectic::validate_spc(&e, 1e-10).all_passed());
                let back = h_map(&e).unwrap();
                assert!((back.matrix() - a.matrix()).norm() < 1e-10);
            }
        }
        let near = Blob::with_slack(
            ComplexMatrix::from_element(1, 1, c64(1.0 - 1e-17, 0.0)),
            0.0,
        );
        assert!(near.is_err() || iota(&near.unwrap()).is_err());
    }

    #[test]
    fn shape_examples() {
        let s = shape(&Blob::origin(2)).unwrap();
        assert_eq!(s.a, vec![1.0, 1.0]);
        assert!((&s.d - RealMatrix::identity(4, 4)).norm() < 1e-15);

        let a = Blob::scalar(Complex64::from_polar(0.5, PI / 4.0)).unwrap();
        let s = shape(&a).unwrap();
        assert!((s.a[0] - 3f64.sqrt()).abs() < 1e-12);
        assert!((s.b[0] - 1.0 / 3f64.sqrt()).abs() < 1e-12);
        assert!((s.angle().unwrap() - PI / 8.0).abs() < 1e-12);
    }

    #[test]
    fn shape_matches_wigner() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in 1..=3 {
            let a = random_blob(&mut rng, n, 0.9);
            let s = shape(&a).unwrap();
            let w = Wigner::new(&a).unwrap();
            let h = s.h_matrix();
            for _ in 0..20 {
                let x: Vec<f64> = (0..2 * n).map(|_| rng.random_range(-2.0..2.0)).collect();
                let hx = &h * RealMatrix::from_column_slice(2 * n, 1, &x);
                let zp = w.z_prime(&x).norm_squared();
                assert!((hx.norm_squared() - zp).abs() < 1e-10 * zp.max(1.0));
            }
        }
    }

    #[test]
    fn wigner_origin_blob() {
        let w = Wigner::new(&Blob::origin(1)).unwrap();
        let v = w.eval(&[0.3, -0.4]);
        assert!((v - (-0.25f64).exp() / PI).abs() < 1e-15);
    }

    #[test]
    fn gaussian_round_trip() {
        let g = blob_to_gaussian(&Blob::origin(2)).unwrap();
        assert!((g.z - identity(2)).norm() < 1e-15);
        assert!((g.phase - c64(1.0, 0.0)).norm() < 1e-15);
        let g = blob_to_gaussian(&Blob::scalar(c64(0.4, 0.0)).unwrap()).unwrap();
        assert!((g.z[(0, 0)] - c64(0.6 / 1.4, 0.0)).norm() < 1e-15);
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..20 {
            let a = random_blob(&mut rng, 3, 0.99);
            let g = blob_to_gaussian(&a).unwrap();
            let (w, _) = crate::linalg::hermitian_eigen(
                &crate::linalg::complexify(&crate::linalg::real_part(&g.z)),
                1e-9,
            )
            .unwrap();
            assert!(w.iter().all(|&x| x > 0.0));
            assert!((g.phase.norm() - 1.0).abs() < 1e-12);
            let back = gaussian_to_blob(&g.z).unwrap();
            assert!((back.matrix() - a.matrix()).norm() < 1e-10);
        }
    }

    #[test]
    fn jump_probability_group_and_semigroup() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let a = random_blob(&mut rng, 1, 0.9);
        let (_, r) = rotation_generator(0.3);
        assert!((jump_probability(&r, &a).unwrap() - 1.0).abs() < 1e-12);
        // diag(e^κ, e^{-κ}) fixes the origin and damps it by e^{-κ}
        let osc = continued_flow(&real_diag(&[1.0, 1.0]), 0.4).unwrap();
        let p = jump_probability(&osc, &Blob::origin(1)).unwrap();
        assert!((p - (-0.4f64).exp()).abs() < 1e-12);
        let free = continued_flow(&real_diag(&[0.0, 1.0]), 0.4).unwrap();
        let p = jump_probability(&free, &a).unwrap();
        assert!(p > 0.0 && p <= 1.0);
        let [l, m, v, rr] = free.scalars();
        let ps = jump_probability_scalar([l, m, v, rr], a.as_scalar().unwrap());
        assert!((p - ps).abs() < 1e-12);
    }
}
