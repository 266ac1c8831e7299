//! Angular histograms of parabolic walks and the π/2-rotation symmetry
//! statistic, against a control with one generator set removed.

use quantum_blobs::symplectic::parabolic_family;
use quantum_blobs::walk::{
    angular_histogram, compare_shifted, empty_fraction, run_chaos_game, WalkConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let bins = 1024;
    for tau in [2.0, 5.0] {
        let family = parabolic_family(tau);
        let full = run_chaos_game(&WalkConfig::from_spc(&family, 1_000_000, 1))?;
        let h = angular_histogram(&full, bins)?;
        let shift = compare_shifted(&h, bins / 4);

        // drop generators 4 and 8, which breaks the π/2 symmetry
        let partial: Vec<_> = family
            .iter()
            .enumerate()
            .filter(|(i, _)| i % 4 != 3)
            .map(|(_, g)| g.clone())
            .collect();
        let control = run_chaos_game(&WalkConfig::from_spc(&partial, 1_000_000, 1))?;
        let hc = angular_histogram(&control, bins)?;
        let shift_c = compare_shifted(&hc, bins / 4);

        println!(
            "τ = {tau}: empty bins {:.3}, outside 3σ after π/2 shift {:.3} (control {:.3})",
            empty_fraction(&h),
            shift.outside_3sigma,
            shift_c.outside_3sigma,
        );
    }
    Ok(())
}
