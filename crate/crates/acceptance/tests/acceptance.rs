//! One PASS/FAIL line per acceptance criterion. Exits nonzero when any
//! criterion fails.

use std::f64::consts::{FRAC_PI_4, PI};
use std::time::Instant;

use clap::Parser;
use num_complex::Complex64;
use quantum_blobs::bargmann::{
    apply_kernel_to_vector, coherent_inner, compose, excitation_amplitude, itzykson,
    kernel_distance_up_to_sign, semigroup_kernel, squeezed_state,
};
use quantum_blobs::blob::{
    h_map, iota, jump_probability, mobius_apply, mobius_scalar, shape, spc_scalars, Blob, Wigner,
};
use quantum_blobs::cli::{run, wigner_grid, Cli};
use quantum_blobs::linalg::{c64, symmetry_residual, ComplexMatrix, ComplexVector, RealMatrix};
use quantum_blobs::quadrature::PlaneRule;
use quantum_blobs::sampling::{random_blob, random_semigroup, random_spc, random_word};
use quantum_blobs::symplectic::{
    cayley_to_complex, continued_flow, hyperbolic_family, hyperbolic_generator, is_real_symplectic,
    parabolic_family, parabolic_generator, real_diag, trace, validate_spc, SemigroupElement,
};
use quantum_blobs::walk::{
    angular_histogram, compare_shifted, empty_fraction, run_chaos_game, WalkConfig,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

const WORDS: usize = 1000;
const WORD_TOL: f64 = 1e-10;
const WORD_SECONDS: f64 = 5.0;
const BLOBS: usize = 1000;
const IOTA_TOL: f64 = 1e-10;
const TRIPLES: usize = 1000;
const ACTION_TOL: f64 = 1e-9;
const KERNEL_PAIRS: usize = 200;
const KERNEL_TOL: f64 = 1e-9;
const KERNEL_ACTION_TOL: f64 = 1e-10;
const GAUSS_DRAWS: usize = 100;
const GAUSS_ORDER: usize = 64;
const GAUSS_REL_TOL: f64 = 1e-6;
const REPRODUCING_TOL: f64 = 1e-10;
const GROUP_ELEMENTS: usize = 200;
const UNIT_TOL: f64 = 1e-10;
const SEMIGROUP_ELEMENTS: usize = 100;
const PROB_TOL: f64 = 1e-8;
const AXES_TOL: f64 = 1e-12;
const ELLIPSE_TOL: f64 = 1e-6;
const MASS_GRID: usize = 512;
const MASS_EXTENT: f64 = 5.0;
const MASS_TOL: f64 = 1e-3;
const MASS_RADII: [f64; 5] = [0.0, 0.25, 0.5, 0.65, 0.8];
const SCALAR_DRAWS: usize = 1000;
const SCALAR_TOL: f64 = 1e-12;
const WALK_STEPS: u64 = 1_000_000;
const WALK_BINS: usize = 1024;
const WEAK_EMPTY_MAX: f64 = 0.01;
const STRONG_EMPTY_MIN: f64 = 0.5;
const SHIFT_OUTSIDE_MAX: f64 = 0.15;
const WALK_SECONDS: f64 = 10.0;
const SELFCHECK_SECONDS: f64 = 60.0;

type Criterion = Box<dyn FnOnce(&mut ChaCha8Rng) -> Outcome>;

struct Outcome {
    passed: bool,
    detail: String,
}

fn outcome(passed: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        passed,
        detail: detail.into(),
    }
}

fn element(rng: &mut ChaCha8Rng, n: usize) -> SemigroupElement {
    match rng.random_range(0..3) {
        0 => SemigroupElement::from(&random_spc(rng, n, 0.8)),
        1 => random_semigroup(rng, n, 0.6),
        _ => {
            let mut d = vec![0.0; 2 * n];
            d[n..].fill(1.0);
            let free = continued_flow(&real_diag(&d), rng.random_range(0.1..1.0)).unwrap();
            SemigroupElement::from(&random_spc(rng, n, 0.5)).compose(&free)
        }
    }
}

fn symplectic_algebra(rng: &mut ChaCha8Rng) -> Outcome {
    let start = Instant::now();
    let mut worst: f64 = 0.0;
    let mut all = true;
    for _ in 0..WORDS {
        let len = rng.random_range(1..=6);
        let (s, _) = random_word(rng, len, 0.75, 2.0);
        all &= is_real_symplectic(s.matrix(), WORD_TOL).unwrap();
        let report = validate_spc(&cayley_to_complex(&s).unwrap(), WORD_TOL);
        all &= report.all_passed();
        worst = worst.max(quantum_blobs::symplectic::real_symplectic_residual(s.matrix()).unwrap());
        worst = worst.max(report.max_residual());
    }
    let secs = start.elapsed().as_secs_f64();
    outcome(
        all && worst <= WORD_TOL && secs < WORD_SECONDS,
        format!("{WORDS} words, max residual {worst:.2e} (tol {WORD_TOL:.0e}), {secs:.2}s (limit {WORD_SECONDS}s)"),
    )
}

fn iota_h(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut all = true;
    for k in 0..BLOBS {
        let a = random_blob(rng, 1 + k % 4, 0.95);
        let e = iota(&a).unwrap();
        all &= validate_spc(&e, IOTA_TOL).all_passed();
        worst = worst.max((h_map(&e).unwrap().matrix() - a.matrix()).norm());
    }
    outcome(
        all && worst <= IOTA_TOL,
        format!("{BLOBS} blobs, n ≤ 4, max |h(ι(A)) − A| {worst:.2e} (tol {IOTA_TOL:.0e})"),
    )
}

fn action_law(rng: &mut ChaCha8Rng) -> Outcome {
    let mut worst: f64 = 0.0;
    let mut sym: f64 = 0.0;
    let mut invalid = 0;
    for k in 0..TRIPLES {
        let n = 1 + k % 3;
        let (s1, s2) = (element(rng, n), element(rng, n));
        let a = random_blob(rng, n, 0.9);
        let nested = mobius_apply(&s2, &a).and_then(|b| mobius_apply(&s1, &b));
        let direct = mobius_apply(&s1.compose(&s2), &a);
        match (nested, direct) {
            (Ok(x), Ok(y)) => {
                worst = worst.max((x.matrix() - y.matrix()).norm());
                sym = sym
                    .max(symmetry_residual(x.matrix()))
                    .max(symmetry_residual(y.matrix()));
            }
            _ => invalid += 1,
        }
    }
    outcome(
        invalid == 0 && worst <= ACTION_TOL && sym <= ACTION_TOL,
        format!("{TRIPLES} triples, max residual {worst:.2e} (tol {ACTION_TOL:.0e}), {invalid} invalid outputs"),
    )
}

fn kernel_consistency(rng: &mut ChaCha8Rng) -> Outcome {
    let mut comp: f64 = 0.0;
    let mut act: f64 = 0.0;
    for k in 0..KERNEL_PAIRS {
        let n = 1 + k % 2;
        let (s1, s2) = (element(rng, n), element(rng, n));
        let (k1, k2) = (
            semigroup_kernel(&s1).unwrap(),
            semigroup_kernel(&s2).unwrap(),
        );
        let k12 = semigroup_kernel(&s1.compose(&s2)).unwrap();
        comp = comp.max(kernel_distance_up_to_sign(
            &compose(&k1, &k2).unwrap(),
            &k12,
        ));
        let a = random_blob(rng, n, 0.9);
        let v = apply_kernel_to_vector(&k1, &squeezed_state(&a)).unwrap();
        act = act.max((v.a - mobius_apply(&s1, &a).unwrap().matrix()).norm());
    }
    outcome(
        comp <= KERNEL_TOL && act <= KERNEL_ACTION_TOL,
        format!(
            "{KERNEL_PAIRS} pairs, composition {comp:.2e} (tol {KERNEL_TOL:.0e}), A′ vs Möbius {act:.2e} (tol {KERNEL_ACTION_TOL:.0e})"
        ),
    )
}

fn disk_point(rng: &mut ChaCha8Rng, r: f64) -> Complex64 {
    Complex64::from_polar(rng.random_range(0.0..r), rng.random_range(0.0..2.0 * PI))
}

fn gaussian_integral(rng: &mut ChaCha8Rng) -> Outcome {
    let rule = PlaneRule::new(GAUSS_ORDER, 1.3);
    let one = |z| ComplexMatrix::from_element(1, 1, z);
    let vec = |z| ComplexVector::from_element(1, z);
    let mut worst: f64 = 0.0;
    for _ in 0..GAUSS_DRAWS {
        let (g, d) = (disk_point(rng, 0.6), disk_point(rng, 0.6));
        let (a, b) = (disk_point(rng, 1.0), disk_point(rng, 1.0));
        let exact = itzykson(&one(g), &one(d), &vec(a), &vec(b)).unwrap();
        let numeric = rule.integrate(|w| {
            (0.5 * g * w * w + 0.5 * d.conj() * w.conj() * w.conj() + w * a + w.conj() * b.conj())
                .exp()
        });
        worst = worst.max((exact - numeric).norm() / exact.norm());
    }
    // (e_a, e_b) = ∫ conj(e_a) e_b dμ with e_a(w) = e^{w·conj(a)}
    let mut repro: f64 = 0.0;
    for n in [1, 2, 3] {
        for _ in 0..20 {
            let a = ComplexVector::from_fn(n, |_, _| disk_point(rng, 1.5));
            let b = ComplexVector::from_fn(n, |_, _| disk_point(rng, 1.5));
            let zero = ComplexMatrix::zeros(n, n);
            let closed =
                itzykson(&zero, &zero, &b.map(|x| x.conj()), &a.map(|x| x.conj())).unwrap();
            let want = a
                .iter()
                .zip(b.iter())
                .map(|(x, y)| x * y.conj())
                .sum::<Complex64>()
                .exp();
            repro = repro
                .max((closed - want).norm() / want.norm())
                .max((coherent_inner(&a, &b) - want).norm() / want.norm());
        }
    }
    outcome(
        worst <= GAUSS_REL_TOL && repro <= REPRODUCING_TOL,
        format!(
            "{GAUSS_DRAWS} draws vs order-{GAUSS_ORDER} rule, rel {worst:.2e} (tol {GAUSS_REL_TOL:.0e}); reproducing identity {repro:.2e} (tol {REPRODUCING_TOL:.0e})"
        ),
    )
}

fn probabilities(rng: &mut ChaCha8Rng) -> Outcome {
    let mut unit: f64 = 0.0;
    for k in 0..GROUP_ELEMENTS {
        let n = 1 + k % 3;
        let g = SemigroupElement::from(&random_spc(rng, n, 0.8));
        let a = random_blob(rng, n, 0.9);
        let c = jump_probability(&g, &a).unwrap().sqrt();
        let (ck, _) = excitation_amplitude(&semigroup_kernel(&g).unwrap(), &a).unwrap();
        unit = unit.max((c - 1.0).abs()).max((ck.norm() - 1.0).abs());
    }
    let mut prob: f64 = 0.0;
    for k in 0..SEMIGROUP_ELEMENTS {
        let n = 1 + k % 3;
        let s = random_semigroup(rng, n, 0.6);
        let a = random_blob(rng, n, 0.9);
        let p = jump_probability(&s, &a).unwrap();
        // ||T_S ψ_A||² with the norm from the Gaussian integral
        let oracle = apply_kernel_to_vector(&semigroup_kernel(&s).unwrap(), &squeezed_state(&a))
            .unwrap()
            .norm_sq()
            .unwrap();
        prob = prob.max((p - oracle).abs());
    }
    outcome(
        unit <= UNIT_TOL && prob <= PROB_TOL,
        format!(
            "|c| − 1 over {GROUP_ELEMENTS} group elements {unit:.2e} (tol {UNIT_TOL:.0e}); probability vs kernel norm over {SEMIGROUP_ELEMENTS} semigroup elements {prob:.2e} (tol {PROB_TOL:.0e})"
        ),
    )
}

/// Fits `αx² + βxy + γy² = 1` to points on a centred ellipse; returns
/// (long semi-axis, short semi-axis, angle of the long axis mod π).
fn fit_ellipse(points: &[(f64, f64)]) -> (f64, f64, f64) {
    let design = RealMatrix::from_fn(points.len(), 3, |i, j| {
        let (x, y) = points[i];
        [x * x, x * y, y * y][j]
    });
    let ones = RealMatrix::from_element(points.len(), 1, 1.0);
    let normal = design.transpose() * &design;
    let sol = normal
        .lu()
        .solve(&(design.transpose() * ones))
        .expect("well-posed fit");
    let conic = RealMatrix::from_row_slice(2, 2, &[sol[0], 0.5 * sol[1], 0.5 * sol[1], sol[2]]);
    let eig = conic.symmetric_eigen();
    let (lo, hi) = if eig.eigenvalues[0] < eig.eigenvalues[1] {
        (0, 1)
    } else {
        (1, 0)
    };
    let v = eig.eigenvectors.column(lo);
    let angle = v[1].atan2(v[0]).rem_euclid(PI);
    (
        1.0 / eig.eigenvalues[lo].sqrt(),
        1.0 / eig.eigenvalues[hi].sqrt(),
        angle,
    )
}

fn contour(w: &Wigner, level: f64, samples: usize) -> Vec<(f64, f64)> {
    (0..samples)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / samples as f64;
            let (c, s) = (t.cos(), t.sin());
            let (mut lo, mut hi) = (0.0, 10.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if w.eval(&[mid * c, mid * s]) > level {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            let r = 0.5 * (lo + hi);
            (r * c, r * s)
        })
        .collect()
}

fn shape_geometry() -> Outcome {
    let phi = FRAC_PI_4;
    let a = Blob::scalar(Complex64::from_polar(0.5, phi)).unwrap();
    let s = shape(&a).unwrap();
    let axes = (s.a[0] - 3f64.sqrt())
        .abs()
        .max((s.b[0] - 1.0 / 3f64.sqrt()).abs());
    let product = (s.a[0] * s.b[0] - 1.0).abs();
    let d_ok = is_real_symplectic(&s.d, AXES_TOL).unwrap();
    let w = Wigner::new(&a).unwrap();
    let (fa, fb, fangle) = fit_ellipse(&contour(&w, (-1.0f64).exp() / PI, 720));
    let fit = (fa - s.a[0])
        .abs()
        .max((fb - s.b[0]).abs())
        .max((fangle - phi / 2.0).abs());
    let shape_ok = axes <= AXES_TOL && product <= f64::EPSILON && d_ok && fit <= ELLIPSE_TOL;

    let mut masses = Vec::new();
    let mut mass_ok = true;
    for r in MASS_RADII {
        let blob = Blob::scalar(Complex64::from_polar(r, phi)).unwrap();
        let (_, mass) = wigner_grid(&blob, MASS_GRID, MASS_EXTENT).unwrap();
        mass_ok &= (mass - 1.0).abs() <= MASS_TOL;
        masses.push(format!("r={r}: {mass:.6}"));
    }
    outcome(
        shape_ok && mass_ok,
        format!(
            "axes {axes:.1e} (tol {AXES_TOL:.0e}), |ab − 1| {product:.1e}, D symplectic {d_ok}, ellipse fit {fit:.1e} (tol {ELLIPSE_TOL:.0e}); grid mass at {MASS_GRID}², extent {MASS_EXTENT} (tol {MASS_TOL:.0e}): {}",
            masses.join(", ")
        ),
    )
}

fn scalar_identities(rng: &mut ChaCha8Rng) -> Outcome {
    let mut metric: f64 = 0.0;
    for _ in 0..SCALAR_DRAWS {
        let len = rng.random_range(1..=6);
        let (_, e) = random_word(rng, len, 0.75, 2.0);
        let a = disk_point(rng, 0.95);
        let [l, m, _, _] = spc_scalars(&e);
        let a2 = mobius_scalar(spc_scalars(&e), a);
        metric =
            metric.max((1.0 - a2.norm_sqr() - (1.0 - a.norm_sqr()) / (m * a + l).norm_sqr()).abs());
    }
    let i = c64(0.0, 1.0);
    let mut fixed: f64 = 0.0;
    for beta in [0.1, 0.3, 0.5, 0.7, 0.75, 0.9] {
        let b = spc_scalars(&hyperbolic_generator(beta, 1).unwrap().1);
        fixed = fixed
            .max((mobius_scalar(b, i) - i).norm())
            .max((mobius_scalar(b, -i) + i).norm());
    }
    let mut traces: f64 = 0.0;
    for tau in [-5.0, -2.0, 0.5, 2.0, 5.0] {
        for g in parabolic_family(tau) {
            traces = traces.max((trace(&g) - 2.0).norm());
        }
        for idx in 1..=8 {
            let (s, _) = parabolic_generator(tau, idx).unwrap();
            traces = traces.max((s.matrix().trace() - 2.0).abs());
        }
    }
    outcome(
        metric <= SCALAR_TOL && fixed <= SCALAR_TOL && traces <= SCALAR_TOL,
        format!("metric identity {metric:.1e}, fixed points {fixed:.1e}, traces {traces:.1e} (tol {SCALAR_TOL:.0e})"),
    )
}

fn timed_walk(gens: &[quantum_blobs::symplectic::SpcElement]) -> (Vec<u64>, f64) {
    let start = Instant::now();
    let cloud = run_chaos_game(&WalkConfig::from_spc(gens, WALK_STEPS, 1)).unwrap();
    let secs = start.elapsed().as_secs_f64();
    (angular_histogram(&cloud, WALK_BINS).unwrap(), secs)
}

fn figure_regressions() -> Outcome {
    let (weak, t1) = timed_walk(&hyperbolic_family(0.1).unwrap());
    let (strong, t2) = timed_walk(&hyperbolic_family(0.75).unwrap());
    let (p2, t3) = timed_walk(&parabolic_family(2.0));
    let (p5, t4) = timed_walk(&parabolic_family(5.0));
    let (e1, e2) = (empty_fraction(&weak), empty_fraction(&strong));
    let (s2, s5) = (
        compare_shifted(&p2, WALK_BINS / 4).outside_3sigma,
        compare_shifted(&p5, WALK_BINS / 4).outside_3sigma,
    );
    let slowest = t1.max(t2).max(t3).max(t4);
    outcome(
        e1 <= WEAK_EMPTY_MAX && e2 >= STRONG_EMPTY_MIN && s2 <= SHIFT_OUTSIDE_MAX && s5 <= SHIFT_OUTSIDE_MAX && slowest < WALK_SECONDS,
        format!(
            "empty bins β=0.1 {e1:.3} (≤ {WEAK_EMPTY_MAX}), β=0.75 {e2:.3} (≥ {STRONG_EMPTY_MIN}); π/2 shift outside 3σ τ=2 {s2:.3}, τ=5 {s5:.3} (≤ {SHIFT_OUTSIDE_MAX}); slowest run {slowest:.2}s (limit {WALK_SECONDS}s)"
        ),
    )
}

fn invoke(args: &[&str]) -> Result<String, String> {
    let cli = Cli::try_parse_from(std::iter::once("blobwalk").chain(args.iter().copied()))
        .map_err(|e| e.to_string())?;
    let mut out = Vec::new();
    run(&cli, &mut out).map_err(|e| e.to_string())?;
    Ok(String::from_utf8_lossy(&out).into_owned())
}

fn digest(path: &std::path::Path) -> Vec<u8> {
    Sha256::digest(std::fs::read(path).unwrap()).to_vec()
}

fn determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).display().to_string();
    let (a, b) = (path("a.csv"), path("b.csv"));
    let base = [
        "walk",
        "--family",
        "hyperbolic",
        "--beta",
        "0.75",
        "--steps",
        "100000",
        "--seed",
        "1",
    ];
    let runs = [a.as_str(), b.as_str()].map(|out| invoke(&[&base[..], &["--out", out]].concat()));
    let identical = runs.iter().all(Result::is_ok)
        && digest(dir.path().join("a.csv").as_path()) == digest(dir.path().join("b.csv").as_path());
    let meta = format!("{a}.meta.json");
    let before = digest(dir.path().join("a.csv").as_path());
    let rerun =
        invoke(&["rerun", &meta]).is_ok() && digest(dir.path().join("a.csv").as_path()) == before;

    let start = Instant::now();
    let selfcheck = invoke(&["selfcheck"]);
    let secs = start.elapsed().as_secs_f64();
    outcome(
        identical && rerun && selfcheck.is_ok() && secs < SELFCHECK_SECONDS,
        format!(
            "repeated walk CSV identical {identical}, rerun from metadata identical {rerun}, selfcheck {} in {secs:.2}s (limit {SELFCHECK_SECONDS}s)",
            if selfcheck.is_ok() { "passed" } else { "failed" }
        ),
    )
}

fn main() {
    let mut rng = ChaCha8Rng::seed_from_u64(20_240_601);
    let criteria: Vec<(&str, Criterion)> = vec![
        ("symplectic algebra", Box::new(symplectic_algebra)),
        ("iota/h correspondence", Box::new(iota_h)),
        ("action law", Box::new(action_law)),
        ("kernel/matrix consistency", Box::new(kernel_consistency)),
        (
            "Gaussian integral vs quadrature",
            Box::new(gaussian_integral),
        ),
        ("probabilities", Box::new(probabilities)),
        ("shape geometry", Box::new(|_| shape_geometry())),
        ("n = 1 identities", Box::new(scalar_identities)),
        ("figure regressions", Box::new(|_| figure_regressions())),
        ("determinism", Box::new(|_| determinism())),
    ];
    let mut failed = 0;
    for (k, (name, check)) in criteria.into_iter().enumerate() {
        let o = check(&mut rng);
        println!(
            "{} {:>2}. {name}: {}",
            if o.passed { "PASS" } else { "FAIL" },
            k + 1,
            o.detail
        );
        failed += usize::from(!o.passed);
    }
    println!("acceptance: {} of 10 criteria passed", 10 - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
