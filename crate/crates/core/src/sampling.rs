//! Random draws of blobs, group elements and semigroup elements.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::blob::{iota, Blob};
use crate::linalg::{c64, operator_norm, symmetrize, ComplexMatrix, RealMatrix};
use crate::symplectic::{
    continued_flow, hyperbolic_generator, parabolic_generator, rotation_generator, unitary_element,
    RealSymplectic, SemigroupElement, SpcElement,
};

fn gaussian_matrix(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        c64(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed unitary via QR with phase correction.
pub fn random_unitary(rng: &mut impl Rng, n: usize) -> ComplexMatrix {
    let qr = gaussian_matrix(rng, n).qr();
    let (mut q, r) = qr.unpack();
    for j in 0..n {
        let d = r[(j, j)];
        let phase = if d.norm() > 0.0 {
            d / d.norm()
        } else {
            c64(1.0, 0.0)
        };
        let mut col = q.column_mut(j);
        col *= phase;
    }
    q
}

/// Random blob with operator norm uniform in `[0, max_norm)`.
pub fn random_blob(rng: &mut impl Rng, n: usize, max_norm: f64) -> Blob {
    let m = symmetrize(&gaussian_matrix(rng, n));
    let target = rng.random_range(0.0..max_norm);
    let norm = operator_norm(&m);
    let a = if norm > 0.0 {
        m * c64(target / norm, 0.0)
    } else {
        m
    };
    Blob::new(a).expect("scaled blob lies inside the disk")
}

/// `ι(A)·diag(U, conj U)` with `||A|| < max_norm`.
pub fn random_spc(rng: &mut impl Rng, n: usize, max_norm: f64) -> SpcElement {
    let a = random_blob(rng, n, max_norm);
    let e = iota(&a).expect("blob inside the disk");
    e.compose(&unitary_element(&random_unitary(rng, n)))
}

/// `g₁ · C exp(iκJh) C⁻¹ · g₂` with random positive semidefinite `h`.
pub fn random_semigroup(rng: &mut impl Rng, n: usize, max_norm: f64) -> SemigroupElement {
    loop {
        let x = RealMatrix::from_fn(2 * n, 2 * n, |_, _| rng.sample::<f64, _>(StandardNormal));
        let h = &x * x.transpose() / (2.0 * n as f64);
        let kappa = rng.random_range(0.05..1.0);
        let Ok(flow) = continued_flow(&h, kappa) else {
            continue;
        };
        let g1 = SemigroupElement::from(&random_spc(rng, n, max_norm));
        let g2 = SemigroupElement::from(&random_spc(rng, n, max_norm));
        let s = g1.compose(&flow).compose(&g2);
        if SemigroupElement::new(s.as_blocks().clone(), 1e-9).is_ok() {
            return s;
        }
    }
}

/// One generator from the hyperbolic, parabolic or rotation families.
pub fn random_generator(
    rng: &mut impl Rng,
    max_beta: f64,
    max_tau: f64,
) -> (RealSymplectic, SpcElement) {
    match rng.random_range(0..3u32) {
        0 => hyperbolic_generator(rng.random_range(0.0..max_beta), rng.random_range(1..=4))
            .expect("β below 1"),
        1 => parabolic_generator(rng.random_range(-max_tau..max_tau), rng.random_range(1..=8))
            .expect("index in range"),
        _ => rotation_generator(rng.random_range(-std::f64::consts::PI..std::f64::consts::PI)),
    }
}

/// Product of `len` random generators, in both realizations.
pub fn random_word(
    rng: &mut impl Rng,
    len: usize,
    max_beta: f64,
    max_tau: f64,
) -> (RealSymplectic, SpcElement) {
    let mut s = RealSymplectic::identity(1);
    let mut e = SpcElement::identity(1);
    for _ in 0..len {
        let (gs, ge) = random_generator(rng, max_beta, max_tau);
        s = s.compose(&gs);
        e = e.compose(&ge);
    }
    (s, e)
}
