//! Chaos-game random iteration of fractional-linear maps on the disk, and
//! the binning used to turn point clouds into figures.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::blob::{
    jump_probability, jump_probability_scalar, mobius_apply_raw, mobius_scalar, Blob, BlobError,
    DEFAULT_SLACK,
};
use crate::linalg::{c64, operator_norm, symmetrize, ComplexMatrix};
use crate::symplectic::{
    semigroup_class, BlockElement, Blocks, SemigroupClass, SemigroupElement, SpcElement,
};

/// Identifier of the random number generator, recorded with every run.
pub const RNG_ID: &str = "ChaCha8Rng (rand_chacha 0.9), seed_from_u64(seed), stream = run index";

#[derive(Debug, Clone, PartialEq, Error)]
pub enum WalkError {
    #[error("generator list is empty")]
    NoGenerators,
    #[error("steps must be at least 1")]
    ZeroSteps,
    #[error("record_every must be at least 1")]
    ZeroRecordEvery,
    #[error("generators and initial blob disagree on n")]
    DimensionMismatch,
    #[error("step {step}: {source}")]
    Step { step: u64, source: BlobError },
    #[error("step {step}: blob left the representable range")]
    NonFinite { step: u64 },
    #[error("replay sequence has {got} entries, expected {expected}")]
    ReplayLength { got: usize, expected: usize },
    #[error("replay index {index} out of range")]
    ReplayIndex { index: u32 },
    #[error("point cloud is empty")]
    EmptyCloud,
    #[error("operation requires n = 1")]
    NotScalar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProbabilityMode {
    Uniform,
    /// `p_i(A) ∝ |c(S_i, A)|²`.
    StateDependent,
}

#[derive(Debug, Clone)]
pub struct WalkConfig {
    pub generators: Vec<SemigroupElement>,
    pub mode: ProbabilityMode,
    /// Steps after burn-in.
    pub steps: u64,
    pub seed: u64,
    pub initial: Blob,
    /// Unrecorded steps run before the first of `steps`.
    pub burn_in: u64,
    pub record_every: u64,
    pub slack: f64,
}

impl WalkConfig {
    /// Uniform walk from the origin with burn-in 1000 and every step recorded.
    pub fn new(generators: Vec<SemigroupElement>, steps: u64, seed: u64) -> Self {
        let n = generators.first().map_or(1, |g| g.n());
        Self {
            generators,
            mode: ProbabilityMode::Uniform,
            steps,
            seed,
            initial: Blob::origin(n),
            burn_in: 1000,
            record_every: 1,
            slack: DEFAULT_SLACK,
        }
    }

    pub fn from_spc(generators: &[SpcElement], steps: u64, seed: u64) -> Self {
        Self::new(
            generators.iter().map(SemigroupElement::from).collect(),
            steps,
            seed,
        )
    }

    pub fn n(&self) -> usize {
        self.initial.n()
    }

    /// Number of points the walk records.
    pub fn recorded_len(&self) -> u64 {
        self.steps / self.record_every.max(1)
    }

    /// Burn-in plus recorded steps.
    pub fn total_steps(&self) -> u64 {
        self.burn_in + self.steps
    }

    fn validate(&self) -> Result<(), WalkError> {
        if self.generators.is_empty() {
            return Err(WalkError::NoGenerators);
        }
        if self.steps == 0 {
            return Err(WalkError::ZeroSteps);
        }
        if self.record_every == 0 {
            return Err(WalkError::ZeroRecordEvery);
        }
        let n = self.n();
        if self.generators.iter().any(|g| g.n() != n) {
            return Err(WalkError::DimensionMismatch);
        }
        Ok(())
    }
}

/// Recorded trajectory. Blob entries are stored row-major, `n²` per point.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct PointCloud {
    pub n: usize,
    /// Step number (1-based) of each recorded point.
    pub steps: Vec<u64>,
    pub values: Vec<Complex64>,
    /// Generator drawn at every step, burn-in included (0-based).
    pub generator_index: Vec<u32>,
    pub clamp_count: u64,
    pub warnings: Vec<String>,
}

impl PointCloud {
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn point(&self, i: usize) -> ComplexMatrix {
        let k = self.n * self.n;
        ComplexMatrix::from_row_slice(self.n, self.n, &self.values[i * k..(i + 1) * k])
    }

    /// Scalar points of an n = 1 cloud.
    pub fn scalars(&self) -> Result<&[Complex64], WalkError> {
        if self.n != 1 {
            return Err(WalkError::NotScalar);
        }
        Ok(&self.values)
    }
}

trait Dynamics {
    type State: Clone;

    fn apply(&self, i: usize, a: &Self::State) -> Result<Self::State, BlobError>;

    /// Pulls `a` back inside the disk; true when a clamp happened.
    fn clamp(&self, a: &mut Self::State, slack: f64) -> Result<bool, ()>;

    fn weights(&self, a: &Self::State, out: &mut [f64]) -> Result<(), BlobError>;

    fn record(&self, a: &Self::State, out: &mut Vec<Complex64>);
}

struct Scalar(Vec<[Complex64; 4]>);

impl Dynamics for Scalar {
    type State = Complex64;

    fn apply(&self, i: usize, a: &Complex64) -> Result<Complex64, BlobError> {
        let [lambda, mu, ..] = self.0[i];
        if mu * a + lambda == c64(0.0, 0.0) {
            return Err(BlobError::SingularDenominator);
        }
        Ok(mobius_scalar(self.0[i], *a))
    }

    fn clamp(&self, a: &mut Complex64, slack: f64) -> Result<bool, ()> {
        if !a.is_finite() {
            return Err(());
        }
        let r = a.norm();
        if r >= 1.0 - slack {
            *a *= (1.0 - 2.0 * slack) / r;
            return Ok(true);
        }
        Ok(false)
    }

    fn weights(&self, a: &Complex64, out: &mut [f64]) -> Result<(), BlobError> {
        for (w, g) in out.iter_mut().zip(&self.0) {
            *w = jump_probability_scalar(*g, *a);
        }
        Ok(())
    }

    fn record(&self, a: &Complex64, out: &mut Vec<Complex64>) {
        out.push(*a);
    }
}

struct Matrix(Vec<SemigroupElement>, Vec<Blocks>);

impl Dynamics for Matrix {
    type State = ComplexMatrix;

    fn apply(&self, i: usize, a: &ComplexMatrix) -> Result<ComplexMatrix, BlobError> {
        Ok(symmetrize(&mobius_apply_raw(&self.1[i], a)?))
    }

    fn clamp(&self, a: &mut ComplexMatrix, slack: f64) -> Result<bool, ()> {
        if !crate::linalg::is_finite(a) {
            return Err(());
        }
        let r = operator_norm(a);
        if r >= 1.0 - slack {
            *a *= c64((1.0 - 2.0 * slack) / r, 0.0);
            return Ok(true);
        }
        Ok(false)
    }

    fn weights(&self, a: &ComplexMatrix, out: &mut [f64]) -> Result<(), BlobError> {
        let blob = Blob::with_slack(a.clone(), 0.0)?;
        for (w, g) in out.iter_mut().zip(&self.0) {
            *w = jump_probability(g, &blob)?;
        }
        Ok(())
    }

    fn record(&self, a: &ComplexMatrix, out: &mut Vec<Complex64>) {
        let n = a.nrows();
        for r in 0..n {
            for c in 0..n {
                out.push(a[(r, c)]);
            }
        }
    }
}

struct Schedule {
    steps: u64,
    burn_in: u64,
    record_every: u64,
    slack: f64,
}

fn drive<D: Dynamics>(
    d: &D,
    n: usize,
    init: D::State,
    sched: &Schedule,
    mut pick: impl FnMut(u64, &D::State) -> Result<usize, WalkError>,
) -> Result<PointCloud, WalkError> {
    let expected = sched.steps.saturating_sub(sched.burn_in) / sched.record_every;
    let mut cloud = PointCloud {
        n,
        steps: Vec::with_capacity(expected as usize),
        values: Vec::with_capacity(expected as usize * n * n),
        generator_index: Vec::with_capacity(sched.steps as usize),
        ..Default::default()
    };
    let mut a = init;
    for step in 1..=sched.steps {
        let i = pick(step, &a)?;
        cloud.generator_index.push(i as u32);
        a = d
            .apply(i, &a)
            .map_err(|source| WalkError::Step { step, source })?;
        match d.clamp(&mut a, sched.slack) {
            Ok(true) => cloud.clamp_count += 1,
            Ok(false) => {}
            Err(()) => return Err(WalkError::NonFinite { step }),
        }
        if step > sched.burn_in && (step - sched.burn_in).is_multiple_of(sched.record_every) {
            cloud.steps.push(step);
            d.record(&a, &mut cloud.values);
        }
    }
    Ok(cloud)
}

fn draw<D: Dynamics>(
    d: &D,
    mode: ProbabilityMode,
    k: usize,
    rng: &mut ChaCha8Rng,
    weights: &mut [f64],
    step: u64,
    a: &D::State,
) -> Result<usize, WalkError> {
    match mode {
        ProbabilityMode::Uniform => Ok(rng.random_range(0..k as u32) as usize),
        ProbabilityMode::StateDependent => {
            d.weights(a, weights)
                .map_err(|source| WalkError::Step { step, source })?;
            let total: f64 = weights.iter().sum();
            let mut u = rng.random::<f64>() * total;
            for (i, w) in weights.iter().enumerate() {
                if u < *w {
                    return Ok(i);
                }
                u -= w;
            }
            Ok(k - 1)
        }
    }
}

fn scalar_blocks(gens: &[SemigroupElement]) -> Scalar {
    Scalar(gens.iter().map(|g| g.scalars()).collect())
}

fn matrix_blocks(gens: &[SemigroupElement]) -> Matrix {
    Matrix(gens.to_vec(), gens.iter().map(|g| g.blocks()).collect())
}

fn run_with_rng(cfg: &WalkConfig, rng: &mut ChaCha8Rng) -> Result<PointCloud, WalkError> {
    cfg.validate()?;
    let mut mode = cfg.mode;
    let mut warnings = Vec::new();
    if mode == ProbabilityMode::StateDependent {
        let all_group = cfg.generators.iter().all(|g| {
            matches!(
                semigroup_class(&g.block_matrix(), 1e-9),
                Ok(SemigroupClass::Group)
            )
        });
        if all_group {
            warnings.push(
                "state-dependent mode with group generators only: all weights are 1, using uniform"
                    .to_string(),
            );
            mode = ProbabilityMode::Uniform;
        }
    }
    let sched = Schedule {
        steps: cfg.total_steps(),
        burn_in: cfg.burn_in,
        record_every: cfg.record_every,
        slack: cfg.slack,
    };
    let k = cfg.generators.len();
    let mut weights = vec![0.0; k];
    let mut cloud = if cfg.n() == 1 {
        let d = scalar_blocks(&cfg.generators);
        let init = cfg.initial.matrix()[(0, 0)];
        drive(&d, 1, init, &sched, |step, a| {
            draw(&d, mode, k, rng, &mut weights, step, a)
        })?
    } else {
        let d = matrix_blocks(&cfg.generators);
        let init = cfg.initial.matrix().clone();
        drive(&d, cfg.n(), init, &sched, |step, a| {
            draw(&d, mode, k, rng, &mut weights, step, a)
        })?
    };
    cloud.warnings = warnings;
    Ok(cloud)
}

/// Runs the chaos game; the output depends only on `cfg`.
pub fn run_chaos_game(cfg: &WalkConfig) -> Result<PointCloud, WalkError> {
    run_with_rng(cfg, &mut rng_for(cfg.seed, 0))
}

/// Generator for run `stream` of a batch seeded with `seed`.
pub fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Independent walks on disjoint streams of the same seed, run in parallel.
/// Run 0 coincides with [`run_chaos_game`].
pub fn run_many(cfg: &WalkConfig, runs: usize) -> Vec<Result<PointCloud, WalkError>> {
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..runs)
            .map(|k| scope.spawn(move || run_with_rng(cfg, &mut rng_for(cfg.seed, k as u64))))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("walk thread panicked"))
            .collect()
    })
}

/// Re-runs the recurrence with a recorded generator sequence.
pub fn replay(cfg: &WalkConfig, indices: &[u32]) -> Result<PointCloud, WalkError> {
    cfg.validate()?;
    if indices.len() as u64 != cfg.total_steps() {
        return Err(WalkError::ReplayLength {
            got: indices.len(),
            expected: cfg.total_steps() as usize,
        });
    }
    let k = cfg.generators.len() as u32;
    let sched = Schedule {
        steps: cfg.total_steps(),
        burn_in: cfg.burn_in,
        record_every: cfg.record_every,
        slack: cfg.slack,
    };
    let pick = |step: u64| {
        let i = indices[(step - 1) as usize];
        if i >= k {
            Err(WalkError::ReplayIndex { index: i })
        } else {
            Ok(i as usize)
        }
    };
    if cfg.n() == 1 {
        let d = scalar_blocks(&cfg.generators);
        drive(&d, 1, cfg.initial.matrix()[(0, 0)], &sched, |s, _| pick(s))
    } else {
        let d = matrix_blocks(&cfg.generators);
        drive(&d, cfg.n(), cfg.initial.matrix().clone(), &sched, |s, _| {
            pick(s)
        })
    }
}

/// Counts of `arg z` over `bins` equal sectors starting at `−π`.
pub fn angular_histogram(cloud: &PointCloud, bins: usize) -> Result<Vec<u64>, WalkError> {
    let pts = cloud.scalars()?;
    if pts.is_empty() {
        return Err(WalkError::EmptyCloud);
    }
    let mut counts = vec![0u64; bins];
    for z in pts {
        let t = (z.arg() + PI) / (2.0 * PI);
        let k = ((t * bins as f64) as usize) % bins;
        counts[k] += 1;
    }
    Ok(counts)
}

/// Counts of `|z|` over `bins` equal annuli of `[0, 1)`.
pub fn radial_histogram(cloud: &PointCloud, bins: usize) -> Result<Vec<u64>, WalkError> {
    let pts = cloud.scalars()?;
    if pts.is_empty() {
        return Err(WalkError::EmptyCloud);
    }
    let mut counts = vec![0u64; bins];
    for z in pts {
        let k = ((z.norm() * bins as f64) as usize).min(bins - 1);
        counts[k] += 1;
    }
    Ok(counts)
}

/// Fraction of zero entries.
pub fn empty_fraction(counts: &[u64]) -> f64 {
    counts.iter().filter(|&&c| c == 0).count() as f64 / counts.len() as f64
}

/// Comparison of a histogram with its cyclic shift by `shift` bins.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ShiftComparison {
    /// Largest `|h_k − h_{k+shift}| / √(h_k + h_{k+shift})` over nonempty pairs.
    pub max_deviation: f64,
    /// Fraction of nonempty pairs whose deviation exceeds 3.
    pub outside_3sigma: f64,
}

pub fn compare_shifted(counts: &[u64], shift: usize) -> ShiftComparison {
    let n = counts.len();
    let mut max_deviation: f64 = 0.0;
    let mut outside = 0usize;
    let mut pairs = 0usize;
    for k in 0..n {
        let (x, y) = (counts[k] as f64, counts[(k + shift) % n] as f64);
        if x + y == 0.0 {
            continue;
        }
        pairs += 1;
        let dev = (x - y).abs() / (x + y).sqrt();
        max_deviation = max_deviation.max(dev);
        if dev > 3.0 {
            outside += 1;
        }
    }
    ShiftComparison {
        max_deviation,
        outside_3sigma: if pairs == 0 {
            0.0
        } else {
            outside as f64 / pairs as f64
        },
    }
}

/// Square grid of counts over `[−extent, extent]²`; row 0 is the top (`y = extent`).
#[derive(Debug, Clone, PartialEq)]
pub struct DensityGrid {
    pub resolution: usize,
    pub extent: f64,
    pub counts: Vec<u64>,
    pub dropped: u64,
}

impl DensityGrid {
    pub fn get(&self, row: usize, col: usize) -> u64 {
        self.counts[row * self.resolution + col]
    }

    pub fn total(&self) -> u64 {
        self.counts.iter().sum()
    }

    pub fn max(&self) -> u64 {
        self.counts.iter().copied().max().unwrap_or(0)
    }
}

pub fn density_grid(
    cloud: &PointCloud,
    resolution: usize,
    extent: f64,
) -> Result<DensityGrid, WalkError> {
    let pts = cloud.scalars()?;
    let mut grid = DensityGrid {
        resolution,
        extent,
        counts: vec![0; resolution * resolution],
        dropped: 0,
    };
    let scale = resolution as f64 / (2.0 * extent);
    for z in pts {
        let col = ((z.re + extent) * scale).floor();
        let row = ((extent - z.im) * scale).floor();
        if col < 0.0 || row < 0.0 || col >= resolution as f64 || row >= resolution as f64 {
            grid.dropped += 1;
            continue;
        }
        grid.counts[row as usize * resolution + col as usize] += 1;
    }
    Ok(grid)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CurveKind {
    Radial,
    Circle,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Polyline {
    pub kind: CurveKind,
    pub index: usize,
    pub points: Vec<Complex64>,
}

/// Image of a sampled curve under the scalar fractional-linear map.
pub fn map_curve(e: &impl BlockElement, points: &[Complex64]) -> Result<Vec<Complex64>, WalkError> {
    if e.n() != 1 {
        return Err(WalkError::NotScalar);
    }
    let b = e.blocks();
    let blocks = [b.lambda[(0, 0)], b.mu[(0, 0)], b.nu[(0, 0)], b.rho[(0, 0)]];
    Ok(points.iter().map(|&z| mobius_scalar(blocks, z)).collect())
}

/// Polar grid of the closed unit disk: `radial_lines` diameters' halves from
/// the centre to the boundary, and `circles` circles of radius `k/circles`
/// (the last one is the boundary), each pushed through `e`.
pub fn deform_grid(
    e: &impl BlockElement,
    radial_lines: usize,
    circles: usize,
    samples_per_curve: usize,
) -> Result<Vec<Polyline>, WalkError> {
    let m = samples_per_curve.max(2);
    let mut out = Vec::with_capacity(radial_lines + circles);
    for k in 0..radial_lines {
        let dir = Complex64::from_polar(1.0, 2.0 * PI * k as f64 / radial_lines as f64);
        let pts: Vec<_> = (0..m).map(|j| dir * (j as f64 / (m - 1) as f64)).collect();
        out.push(Polyline {
            kind: CurveKind::Radial,
            index: k,
            points: map_curve(e, &pts)?,
        });
    }
    for k in 1..=circles {
        let r = k as f64 / circles as f64;
        let pts: Vec<_> = (0..m)
            .map(|j| Complex64::from_polar(r, 2.0 * PI * j as f64 / (m - 1) as f64))
            .collect();
        out.push(Polyline {
            kind: CurveKind::Circle,
            index: k,
            points: map_curve(e, &pts)?,
        });
    }
    Ok(out)
}

/// Hyperbolic distance in the Poincaré disk (curvature −1).
pub fn hyperbolic_distance(z: Complex64, w: Complex64) -> f64 {
    let t = (z - w).norm() / (c64(1.0, 0.0) - z * w.conj()).norm();
    2.0 * t.atanh()
}
