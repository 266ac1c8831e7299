//! The three generator families in both realizations, their Cayley transfer
//! and the validators, plus a few oscillator-semigroup elements.

use quantum_blobs::blob::{mobius_scalar, spc_scalars};
use quantum_blobs::linalg::c64;
use quantum_blobs::symplectic::{
    cayley_to_complex, continued_flow, hyperbolic_generator, is_real_symplectic,
    parabolic_generator, real_diag, rotation_generator, semigroup_class, trace, validate_spc,
    BlockElement,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for i in 1..=4 {
        let (s, a) = hyperbolic_generator(0.7, i)?;
        let transferred = cayley_to_complex(&s)?;
        let report = validate_spc(&transferred, 1e-10);
        let (l, m) = a.scalars();
        println!(
            "hyperbolic {i}: real ok = {}, Sp_c ok = {}, λ = {l:.4}, μ = {m:.4}",
            is_real_symplectic(s.matrix(), 1e-10)?,
            report.all_passed(),
        );
    }

    // A(β) has its fixed points on the boundary
    let (_, a) = hyperbolic_generator(0.7, 1)?;
    let i = c64(0.0, 1.0);
    let b = spc_scalars(&a);
    println!(
        "A(0.7)·i = {:.3e}, A(0.7)·0 = {:.4}",
        mobius_scalar(b, i),
        mobius_scalar(b, c64(0.0, 0.0))
    );

    for i in [1, 5] {
        let (s, a) = parabolic_generator(5.0, i)?;
        println!(
            "parabolic {i}: trace = {:.3}, real form {:?}",
            trace(&a),
            s.matrix().as_slice()
        );
    }

    let (_, r) = rotation_generator(std::f64::consts::FRAC_PI_3);
    println!(
        "rotation π/3 passes: {}",
        validate_spc(&r, 1e-12).all_passed()
    );

    for (name, h) in [
        ("oscillator", real_diag(&[1.0, 1.0])),
        ("free particle", real_diag(&[0.0, 1.0])),
    ] {
        let e = continued_flow(&h, 0.5)?;
        println!("{name}: {:?}", semigroup_class(&e.block_matrix(), 1e-10)?);
    }
    Ok(())
}
