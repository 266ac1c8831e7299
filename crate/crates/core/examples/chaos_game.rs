//! Chaos-game walks with the hyperbolic generators at two squeezing
//! strengths. Pass a directory to keep density images of both clouds.

use std::path::PathBuf;
use std::time::Instant;

use quantum_blobs::cli::{tone_map, write_pgm};
use quantum_blobs::symplectic::hyperbolic_family;
use quantum_blobs::walk::{
    angular_histogram, density_grid, empty_fraction, radial_histogram, run_chaos_game, WalkConfig,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let out_dir = std::env::args().nth(1).map(PathBuf::from);
    for beta in [0.1, 0.75] {
        let cfg = WalkConfig::from_spc(&hyperbolic_family(beta)?, 1_000_000, 1);
        let start = Instant::now();
        let cloud = run_chaos_game(&cfg)?;
        let angular = angular_histogram(&cloud, 1024)?;
        let radial = radial_histogram(&cloud, 100)?;
        println!(
            "β = {beta}: {} points in {:.2}s, {} clamps, empty angular bins {:.3}, outermost 1% of radius holds {:.3}",
            cloud.len(),
            start.elapsed().as_secs_f64(),
            cloud.clamp_count,
            empty_fraction(&angular),
            radial[99] as f64 / cloud.len() as f64,
        );
        if let Some(dir) = &out_dir {
            let grid = density_grid(&cloud, 1024, 1.0)?;
            let values: Vec<f64> = grid.counts.iter().map(|&c| c as f64).collect();
            let path = dir.join(format!("hyperbolic_{beta}.pgm"));
            write_pgm(&path, 1024, 1024, &tone_map(&values, true))?;
            println!("wrote {}", path.display());
        }
    }
    Ok(())
}
