use num_complex::Complex64;
use quantum_blobs::blob::{mobius_scalar, spc_scalars};
use quantum_blobs::linalg::c64;
use quantum_blobs::symplectic::{
    hyperbolic_family, hyperbolic_generator, parabolic_family, parabolic_generator,
};
use quantum_blobs::walk::{
    angular_histogram, compare_shifted, deform_grid, empty_fraction, map_curve, radial_histogram,
    run_chaos_game, CurveKind, WalkConfig,
};

/// Circle through three points: (centre, radius).
fn circumcircle(a: Complex64, b: Complex64, c: Complex64) -> (Complex64, f64) {
    let (b, c) = (b - a, c - a);
    let d = 2.0 * (b.re * c.im - b.im * c.re);
    let ux = (c.im * b.norm_sqr() - b.im * c.norm_sqr()) / d;
    let uy = (b.re * c.norm_sqr() - c.re * b.norm_sqr()) / d;
    let centre = a + c64(ux, uy);
    (centre, c64(ux, uy).norm())
}

#[test]
fn parabolic_image_of_the_diameter_is_an_arc_through_one() {
    let (_, a) = parabolic_generator(5.0, 1).unwrap();
    let pts: Vec<_> = (1..400)
        .map(|k| c64(-1.0 + k as f64 / 200.0, 0.0))
        .collect();
    let image = map_curve(&a, &pts).unwrap();
    let (centre, radius) = circumcircle(image[0], image[199], image[398]);
    for z in &image {
        assert!(((z - centre).norm() - radius).abs() < 1e-9);
    }
    assert!(((c64(1.0, 0.0) - centre).norm() - radius).abs() < 1e-9);
    assert!((mobius_scalar(spc_scalars(&a), c64(1.0, 0.0)) - 1.0).norm() < 1e-12);
}

#[test]
fn hyperbolic_grid_is_pulled_toward_minus_i() {
    let (_, a) = hyperbolic_generator(0.7, 1).unwrap();
    let before = deform_grid(
        &quantum_blobs::symplectic::SpcElement::identity(1),
        16,
        8,
        100,
    )
    .unwrap();
    let after = deform_grid(&a, 16, 8, 100).unwrap();
    let target = c64(0.0, -1.0);
    for (b, c) in before.iter().zip(&after) {
        for (z, w) in b.points.iter().zip(&c.points) {
            if z.norm() < 1.0 - 1e-9 {
                assert!((w - target).norm() < (z - target).norm(), "{z} ↦ {w}");
            }
        }
    }
    assert!((after[0].points[0] - c64(0.0, -0.7)).norm() < 1e-15);
    // the boundary circle maps onto itself with ±i fixed
    let boundary = after.iter().rfind(|c| c.kind == CurveKind::Circle).unwrap();
    assert!(boundary
        .points
        .iter()
        .all(|z| (z.norm() - 1.0).abs() < 1e-12));
}

#[test]
fn hyperbolic_walks_reach_the_boundary() {
    for beta in [0.1, 0.75] {
        let cloud = run_chaos_game(&WalkConfig::from_spc(
            &hyperbolic_family(beta).unwrap(),
            100_000,
            2,
        ))
        .unwrap();
        let radial = radial_histogram(&cloud, 100).unwrap();
        assert!(radial[99] as f64 > 0.5 * cloud.len() as f64);
    }
}

#[test]
fn strong_squeezing_leaves_gaps_in_the_angular_histogram() {
    let weak = run_chaos_game(&WalkConfig::from_spc(
        &hyperbolic_family(0.1).unwrap(),
        1_000_000,
        1,
    ))
    .unwrap();
    let strong = run_chaos_game(&WalkConfig::from_spc(
        &hyperbolic_family(0.75).unwrap(),
        1_000_000,
        1,
    ))
    .unwrap();
    assert!(empty_fraction(&angular_histogram(&weak, 1024).unwrap()) <= 0.01);
    assert!(empty_fraction(&angular_histogram(&strong, 1024).unwrap()) >= 0.5);
}

#[test]
fn rotation_symmetry_statistic_separates_symmetric_and_broken_sets() {
    let family = parabolic_family(2.0);
    let cloud = run_chaos_game(&WalkConfig::from_spc(&family, 1_000_000, 1)).unwrap();
    let sym = compare_shifted(&angular_histogram(&cloud, 1024).unwrap(), 256);
    let broken: Vec<_> = family.iter().skip(1).cloned().collect();
    let cloud = run_chaos_game(&WalkConfig::from_spc(&broken, 1_000_000, 1)).unwrap();
    let asym = compare_shifted(&angular_histogram(&cloud, 1024).unwrap(), 256);
    assert!(sym.outside_3sigma <= 0.15, "{sym:?}");
    assert!(asym.outside_3sigma > 0.15, "{asym:?}");
}
