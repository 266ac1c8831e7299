//! The invariant suite at reduced sample counts, as run by `blobwalk selfcheck`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bargmann::{
    apply_kernel_to_vector, compose, excitation_amplitude, itzykson, kernel_distance_up_to_sign,
    semigroup_kernel, squeezed_state, GaussianKernel,
};
use crate::blob::{
    h_map, iota, jump_probability, mobius_apply, mobius_scalar, shape, spc_scalars, Blob,
};
use crate::linalg::{c64, ComplexMatrix, ComplexVector};
use crate::quadrature::PlaneRule;
use crate::sampling::{random_blob, random_semigroup, random_spc, random_word};
use crate::symplectic::{
    cayley_to_complex, hyperbolic_family, hyperbolic_generator, parabolic_family,
    real_symplectic_residual, trace, validate_spc, SemigroupElement,
};
use crate::walk::{replay, run_chaos_game, WalkConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct CheckResult {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn check(name: &'static str, worst: f64, tol: f64) -> CheckResult {
    CheckResult {
        name,
        passed: worst.is_finite() && worst <= tol,
        detail: format!("max residual {worst:.2e} (tol {tol:.0e})"),
    }
}

fn failure(name: &'static str, detail: impl Into<String>) -> CheckResult {
    CheckResult {
        name,
        passed: false,
        detail: detail.into(),
    }
}

fn words(rng: &mut ChaCha8Rng, count: usize) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let len = rng.random_range(1..=6);
        let (s, e) = random_word(rng, len, 0.75, 2.0);
        let Ok(real) = real_symplectic_residual(s.matrix()) else {
            return failure("generator words", "odd dimension");
        };
        let Ok(transferred) = cayley_to_complex(&s) else {
            return failure("generator words", "Cayley image not in Sp_c");
        };
        let report = validate_spc(&transferred, 1e-10);
        let agree = (transferred.lambda() - e.lambda())
            .norm()
            .max((transferred.mu() - e.mu()).norm());
        worst = worst.max(real).max(report.max_residual()).max(agree);
    }
    check("generator words", worst, 1e-10)
}

fn iota_round_trip(rng: &mut ChaCha8Rng, count: usize) -> CheckResult {
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let a = random_blob(rng, 1 + k % 4, 0.95);
        let Ok(e) = iota(&a) else {
            return failure("iota/h round trip", "iota failed");
        };
        let Ok(back) = h_map(&e) else {
            return failure("iota/h round trip", "h failed");
        };
        worst = worst
            .max((back.matrix() - a.matrix()).norm())
            .max(validate_spc(&e, 1e-10).max_residual());
    }
    check("iota/h round trip", worst, 1e-10)
}

fn element(rng: &mut ChaCha8Rng, n: usize) -> SemigroupElement {
    if rng.random_bool(0.5) {
        SemigroupElement::from(&random_spc(rng, n, 0.8))
    } else {
        random_semigroup(rng, n, 0.6)
    }
}

fn action_law(rng: &mut ChaCha8Rng, count: usize) -> CheckResult {
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let n = 1 + k % 3;
        let (s1, s2) = (element(rng, n), element(rng, n));
        let a = random_blob(rng, n, 0.9);
        let nested = mobius_apply(&s2, &a).and_then(|b| mobius_apply(&s1, &b));
        let direct = mobius_apply(&s1.compose(&s2), &a);
        match (nested, direct) {
            (Ok(x), Ok(y)) => worst = worst.max((x.matrix() - y.matrix()).norm()),
            _ => return failure("action law", "image left the disk"),
        }
    }
    check("action law", worst, 1e-9)
}

fn kernel_composition(rng: &mut ChaCha8Rng, count: usize, corrupt: bool) -> CheckResult {
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let n = 1 + k % 2;
        let (s1, s2) = (element(rng, n), element(rng, n));
        let (Ok(k1), Ok(k2), Ok(k12)) = (
            semigroup_kernel(&s1),
            semigroup_kernel(&s2),
            semigroup_kernel(&s1.compose(&s2)),
        ) else {
            return failure("kernel composition", "singular λ");
        };
        let Ok(mut composed) = compose(&k1, &k2) else {
            return failure("kernel composition", "singular composition");
        };
        if corrupt {
            composed.c *= 1.01;
        }
        worst = worst.max(kernel_distance_up_to_sign(&composed, &k12));
        let a = random_blob(rng, n, 0.9);
        let (Ok((_, a2)), Ok(m)) = (excitation_amplitude(&k1, &a), mobius_apply(&s1, &a)) else {
            return failure("kernel composition", "kernel action failed");
        };
        worst = worst.max((a2 - m.matrix()).norm());
    }
    check("kernel composition", worst, 1e-9)
}

fn itzykson_quadrature(rng: &mut ChaCha8Rng, count: usize) -> CheckResult {
    let rule = PlaneRule::new(64, 1.3);
    let one = |z: Complex64| ComplexMatrix::from_element(1, 1, z);
    let vec = |z: Complex64| ComplexVector::from_element(1, z);
    let mut disk = |r: f64| {
        Complex64::from_polar(
            rng.random_range(0.0..r),
            rng.random_range(0.0..std::f64::consts::TAU),
        )
    };
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let (g, d, a, b) = (disk(0.4), disk(0.4), disk(0.6), disk(0.6));
        let Ok(exact) = itzykson(&one(g), &one(d), &vec(a), &vec(b)) else {
            return failure("itzykson vs quadrature", "rejected an integrable draw");
        };
        let numeric = rule.integrate(|w| {
            (0.5 * g * w * w + 0.5 * d.conj() * w.conj() * w.conj() + w * a + w.conj() * b.conj())
                .exp()
        });
        worst = worst.max((exact - numeric).norm() / exact.norm());
    }
    let id = GaussianKernel::reproducing(1);
    let repro = compose(&id, &id).map_or(f64::INFINITY, |k| kernel_distance_up_to_sign(&k, &id));
    let mut r = check("itzykson vs quadrature", worst, 1e-6);
    if repro > 1e-10 {
        r = failure(
            "itzykson vs quadrature",
            format!("reproducing identity off by {repro:.2e}"),
        );
    }
    r
}

fn probabilities(rng: &mut ChaCha8Rng, count: usize) -> CheckResult {
    let mut worst: f64 = 0.0;
    for k in 0..count {
        let n = 1 + k % 3;
        let a = random_blob(rng, n, 0.9);
        let g = random_spc(rng, n, 0.8);
        let Ok(p) = jump_probability(&g, &a) else {
            return failure("jump probabilities", "group element rejected");
        };
        worst = worst.max((p - 1.0).abs());
        let s = random_semigroup(rng, n, 0.6);
        let oracle = semigroup_kernel(&s)
            .and_then(|k| apply_kernel_to_vector(&k, &squeezed_state(&a)))
            .and_then(|v| v.norm_sq());
        match (jump_probability(&s, &a), oracle) {
            (Ok(p), Ok(q)) => worst = worst.max((p - q).abs()),
            _ => return failure("jump probabilities", "semigroup element rejected"),
        }
    }
    check("jump probabilities", worst, 1e-8)
}

fn shape_and_mass() -> CheckResult {
    let a = Blob::scalar(Complex64::from_polar(0.5, std::f64::consts::FRAC_PI_4))
        .expect("inside the disk");
    let Ok(s) = shape(&a) else {
        return failure("shape r = 1/2", "Takagi failed");
    };
    let axes = (s.a[0] - 3f64.sqrt())
        .abs()
        .max((s.b[0] - 1.0 / 3f64.sqrt()).abs());
    let Ok((_, mass)) = crate::cli::wigner_grid(&a, 256, 5.0) else {
        return failure("shape r = 1/2", "Wigner evaluation failed");
    };
    let mut r = check("shape r = 1/2", axes, 1e-12);
    if (mass - 1.0).abs() > 1e-3 {
        r = failure("shape r = 1/2", format!("grid mass {mass:.6}"));
    }
    r
}

fn scalar_identities(rng: &mut ChaCha8Rng, count: usize) -> CheckResult {
    let mut worst: f64 = 0.0;
    for _ in 0..count {
        let len = rng.random_range(1..=4);
        let (_, e) = random_word(rng, len, 0.75, 2.0);
        let a = Complex64::from_polar(
            rng.random_range(0.0..0.95),
            rng.random_range(0.0..std::f64::consts::TAU),
        );
        let [l, m, _, _] = spc_scalars(&e);
        let a2 = mobius_scalar(spc_scalars(&e), a);
        let rhs = (1.0 - a.norm_sqr()) / (m * a + l).norm_sqr();
        worst = worst.max((1.0 - a2.norm_sqr() - rhs).abs());
    }
    // indices 1, 3 fix ±i; their rotations 2, 4 fix ±1
    for (index, fixed) in [
        (1, c64(0.0, 1.0)),
        (2, c64(1.0, 0.0)),
        (3, c64(0.0, 1.0)),
        (4, c64(1.0, 0.0)),
    ] {
        let (_, g) = hyperbolic_generator(0.7, index).expect("β below 1");
        let b = spc_scalars(&g);
        worst = worst
            .max((mobius_scalar(b, fixed) - fixed).norm())
            .max((mobius_scalar(b, -fixed) + fixed).norm());
    }
    for g in parabolic_family(5.0) {
        worst = worst.max((trace(&g) - 2.0).norm());
    }
    check("scalar identities", worst, 1e-12)
}

fn walk_determinism() -> CheckResult {
    let gens = hyperbolic_family(0.75).expect("β below 1");
    let mut cfg = WalkConfig::from_spc(&gens, 20_000, 11);
    cfg.burn_in = 100;
    let (Ok(a), Ok(b)) = (run_chaos_game(&cfg), run_chaos_game(&cfg)) else {
        return failure("walk determinism", "walk failed");
    };
    if a != b {
        return failure("walk determinism", "two runs differ");
    }
    match replay(&cfg, &a.generator_index) {
        Ok(r) if r.values == a.values => CheckResult {
            name: "walk determinism",
            passed: true,
            detail: format!("{} points reproduced", a.len()),
        },
        _ => failure("walk determinism", "replay differs"),
    }
}

/// Runs every check; `corrupt_composition` perturbs the composed kernel
/// prefactor so the composition check must fail.
pub fn run(seed: u64, corrupt_composition: bool) -> Vec<CheckResult> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    vec![
        words(&mut rng, 200),
        iota_round_trip(&mut rng, 200),
        action_law(&mut rng, 200),
        kernel_composition(&mut rng, 60, corrupt_composition),
        itzykson_quadrature(&mut rng, 20),
        probabilities(&mut rng, 60),
        shape_and_mass(),
        scalar_identities(&mut rng, 200),
        walk_determinism(),
    ]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_passes_and_hook_fails() {
        let ok = run(3, false);
        assert!(ok.iter().all(|r| r.passed), "{ok:?}");
        let bad = run(3, true);
        let comp = bad.iter().find(|r| r.name == "kernel composition").unwrap();
        assert!(!comp.passed);
    }
}
