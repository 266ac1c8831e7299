//! Gaussian kernels on Bargmann–Fock space: composition, the Gaussian
//! integral and Hilbert–Schmidt norms.

use quantum_blobs::bargmann::{
    compose, itzykson, kernel_distance_up_to_sign, metaplectic_kernel, semigroup_kernel,
    GaussianKernel,
};
use quantum_blobs::linalg::{c64, ComplexMatrix, ComplexVector};
use quantum_blobs::quadrature::PlaneRule;
use quantum_blobs::symplectic::{
    continued_flow, hyperbolic_generator, parabolic_generator, real_diag,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (_, s1) = hyperbolic_generator(0.5, 1)?;
    let (_, s2) = parabolic_generator(1.5, 2)?;
    let k12 = compose(&metaplectic_kernel(&s1), &metaplectic_kernel(&s2))?;
    let direct = metaplectic_kernel(&s1.compose(&s2));
    println!(
        "K(S1) ∘ K(S2) vs K(S1 S2): {:.2e}",
        kernel_distance_up_to_sign(&k12, &direct)
    );

    let id = GaussianKernel::reproducing(1);
    println!(
        "reproducing kernel is idempotent: {:.2e}",
        kernel_distance_up_to_sign(&compose(&id, &id)?, &id)
    );

    let (g, d, a, b) = (
        c64(0.3, -0.2),
        c64(-0.1, 0.35),
        c64(0.4, 0.1),
        c64(-0.2, 0.5),
    );
    let one = |z| ComplexMatrix::from_element(1, 1, z);
    let vec = |z| ComplexVector::from_element(1, z);
    let closed = itzykson(&one(g), &one(d), &vec(a), &vec(b))?;
    let rule = PlaneRule::new(64, 1.3);
    let numeric = rule.integrate(|w| {
        (0.5 * g * w * w + 0.5 * d.conj() * w.conj() * w.conj() + w * a + w.conj() * b.conj()).exp()
    });
    println!("Gaussian integral: closed form {closed:.12}, quadrature {numeric:.12}");

    for kappa in [0.25, 0.5, 1.0] {
        let osc = continued_flow(&real_diag(&[1.0, 1.0]), kappa)?;
        let hs = semigroup_kernel(&osc)?.hilbert_schmidt_sq()?;
        println!(
            "oscillator κ = {kappa}: ||K||²_HS = {hs:.10}, 1/(2 sinh κ) = {:.10}",
            0.5 / f64::sinh(kappa)
        );
    }
    Ok(())
}
