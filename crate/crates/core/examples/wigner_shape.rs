//! Phase-space ellipse of an n = 1 blob and a density image of its Wigner
//! function. Pass an output path to keep the PGM.

use std::f64::consts::FRAC_PI_4;
use std::path::PathBuf;

use num_complex::Complex64;
use quantum_blobs::blob::{blob_to_gaussian, shape, Blob, Wigner};
use quantum_blobs::cli::{tone_map, wigner_grid, write_pgm};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = Blob::scalar(Complex64::from_polar(0.5, FRAC_PI_4))?;
    let s = shape(&a)?;
    println!(
        "semi-axes a = {:.12}, b = {:.12}, ab = {:.15}",
        s.a[0],
        s.b[0],
        s.a[0] * s.b[0]
    );
    println!(
        "ellipse angle {:.6} (φ/2 = {:.6})",
        s.angle().unwrap_or(0.0),
        FRAC_PI_4 / 2.0
    );

    let g = blob_to_gaussian(&a)?;
    println!(
        "Gaussian parameter Z = {:.6}, phase {:.6}",
        g.z[(0, 0)],
        g.phase
    );

    let w = Wigner::new(&a)?;
    let peak = w.eval(&[0.0, 0.0]);
    let r = 1.5;
    let along = w.eval(&[r * (FRAC_PI_4 / 2.0).cos(), r * (FRAC_PI_4 / 2.0).sin()]);
    println!("W(0) = {peak:.6}, W at distance {r} along the long axis = {along:.6}");

    let (values, mass) = wigner_grid(&a, 512, 5.0)?;
    println!("grid mass on [−5, 5]² at 512²: {mass:.6}");
    let out = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| std::env::temp_dir().join("wigner.pgm"));
    write_pgm(&out, 512, 512, &tone_map(&values, false))?;
    println!("wrote {}", out.display());
    Ok(())
}
