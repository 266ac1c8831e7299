//! Blobs as points of the Siegel disk, moved by group and semigroup elements.

use quantum_blobs::blob::{h_map, iota, jump_probability, mobius_apply, Blob};
use quantum_blobs::linalg::c64;
use quantum_blobs::sampling::{random_blob, random_semigroup, random_spc};
use quantum_blobs::symplectic::SemigroupElement;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);

    let a = random_blob(&mut rng, 3, 0.9);
    println!("random 3×3 blob, ||A|| = {:.4}", a.norm());

    // ι(A) carries the origin to A, and h reads A back off
    let e = iota(&a)?;
    let back = h_map(&e)?;
    println!(
        "|h(ι(A)) − A| = {:.2e}",
        (back.matrix() - a.matrix()).norm()
    );
    let moved = mobius_apply(&e, &Blob::origin(3))?;
    println!(
        "|ι(A)·0 − A| = {:.2e}",
        (moved.matrix() - a.matrix()).norm()
    );

    let g = SemigroupElement::from(&random_spc(&mut rng, 3, 0.8));
    let s = random_semigroup(&mut rng, 3, 0.6);
    let nested = mobius_apply(&g, &mobius_apply(&s, &a)?)?;
    let direct = mobius_apply(&g.compose(&s), &a)?;
    println!(
        "action law residual {:.2e}",
        (nested.matrix() - direct.matrix()).norm()
    );
    println!(
        "jump probabilities: group {:.12}, semigroup {:.6}",
        jump_probability(&g, &a)?,
        jump_probability(&s, &a)?
    );

    let scalar = Blob::scalar(c64(0.3, -0.4))?;
    println!(
        "n = 1 blob {:?} has norm {}",
        scalar.as_scalar(),
        scalar.norm()
    );
    Ok(())
}
