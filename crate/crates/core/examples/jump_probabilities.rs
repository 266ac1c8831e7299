//! Excitation probabilities of semigroup elements and a walk that chooses
//! generators with state-dependent weights.

use quantum_blobs::bargmann::{apply_kernel_to_vector, semigroup_kernel, squeezed_state};
use quantum_blobs::blob::{jump_probability, Blob};
use quantum_blobs::linalg::c64;
use quantum_blobs::symplectic::{
    continued_flow, hyperbolic_generator, real_diag, SemigroupElement,
};
use quantum_blobs::walk::{run_chaos_game, ProbabilityMode, WalkConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let a = Blob::scalar(c64(0.4, 0.2))?;
    let (_, g) = hyperbolic_generator(0.6, 2)?;
    println!("group element: p = {:.15}", jump_probability(&g, &a)?);

    for kappa in [0.1, 0.5, 2.0] {
        let s = continued_flow(&real_diag(&[1.0, 0.3]), kappa)?;
        let p = jump_probability(&s, &a)?;
        // ||T_S ψ_A||² for the normalized squeezed state ψ_A
        let oracle =
            apply_kernel_to_vector(&semigroup_kernel(&s)?, &squeezed_state(&a))?.norm_sq()?;
        println!("κ = {kappa}: p = {p:.12}, kernel norm {oracle:.12}");
    }

    // damped squeezers S_i·e^{−κH}: every weight depends on the state
    let damping = continued_flow(&real_diag(&[1.0, 1.0]), 0.3)?;
    let gens: Vec<SemigroupElement> = (1..=4)
        .map(|i| {
            hyperbolic_generator(0.6, i).map(|(_, e)| SemigroupElement::from(&e).compose(&damping))
        })
        .collect::<Result<_, _>>()?;
    let mut cfg = WalkConfig::new(gens, 100_000, 3);
    cfg.mode = ProbabilityMode::StateDependent;
    let cloud = run_chaos_game(&cfg)?;
    let mut used = [0u64; 4];
    for &i in &cloud.generator_index {
        used[i as usize] += 1;
    }
    let mean_radius = cloud.values.iter().map(|z| z.norm()).sum::<f64>() / cloud.len() as f64;
    println!("state-dependent walk: generator counts {used:?}, mean |a| = {mean_radius:.4}");
    Ok(())
}
