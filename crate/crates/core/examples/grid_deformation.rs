//! A polar grid of the disk pushed through a hyperbolic and a parabolic
//! generator. Hyperbolic distances are invariant.

use num_complex::Complex64;
use quantum_blobs::blob::{mobius_scalar, spc_scalars};
use quantum_blobs::symplectic::{hyperbolic_generator, parabolic_generator};
use quantum_blobs::walk::{deform_grid, hyperbolic_distance, CurveKind};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (_, hyp) = hyperbolic_generator(0.7, 1)?;
    let (_, par) = parabolic_generator(5.0, 1)?;

    for (name, e) in [("A(0.7)", &hyp), ("A1(5)", &par)] {
        let curves = deform_grid(e, 16, 8, 200)?;
        let centre = curves[0].points[0];
        let boundary = curves
            .iter()
            .rfind(|c| c.kind == CurveKind::Circle)
            .expect("grid has circles");
        let worst = boundary
            .points
            .iter()
            .map(|z| (z.norm() - 1.0).abs())
            .fold(0.0, f64::max);
        println!("{name}: centre goes to {centre:.4}, boundary stays on |z| = 1 to {worst:.1e}");

        let b = spc_scalars(e);
        let (z, w) = (Complex64::new(0.3, 0.1), Complex64::new(-0.5, 0.4));
        let before = hyperbolic_distance(z, w);
        let after = hyperbolic_distance(mobius_scalar(b, z), mobius_scalar(b, w));
        println!("  d(z, w) = {before:.12}, d(Sz, Sw) = {after:.12}");
    }

    Ok(())
}
