//! The `blobwalk` command line: validation, walks, histograms and figure
//! emission in plain CSV / PGM / JSON formats.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::blob::{Blob, Wigner};
use crate::linalg::{c64, ComplexMatrix, RealMatrix};
use crate::selfcheck;
use crate::symplectic::{
    cayley_to_complex, hyperbolic_family, hyperbolic_generator, parabolic_family,
    parabolic_generator, real_symplectic_residual, semigroup_class, validate_semigroup,
    validate_spc, Blocks, RealSymplectic, SemigroupClass, SemigroupElement, SpcElement,
};
use crate::walk::{
    angular_histogram, deform_grid, density_grid, radial_histogram, run_many, CurveKind,
    PointCloud, ProbabilityMode, WalkConfig, RNG_ID,
};

pub const POINTS_SCHEMA: &str =
    "points/v1: step,re,im,gen (n = 1) | step,blob,gen (n > 1, blob = re;im;... row-major)";
pub const HIST_SCHEMA: &str = "hist/v1: bin,count";
pub const DEFORM_SCHEMA: &str = "deform/v1: curve,kind,index,point,re,im";

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
}

impl CliError {
    /// 1 validation failure, 2 usage or I/O, 3 numeric failure.
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Usage(_) | CliError::Io(_) => 2,
            CliError::Numeric(_) => 3,
        }
    }
}

fn io_err(path: &Path, e: impl std::fmt::Display) -> CliError {
    CliError::Io(format!("{}: {e}", path.display()))
}

fn numeric(e: impl std::fmt::Display) -> CliError {
    CliError::Numeric(e.to_string())
}

#[derive(Debug, Parser)]
#[command(
    name = "blobwalk",
    version,
    about = "Squeezed-state geometry, kernels and chaos-game walks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Check a matrix against the symplectic / semigroup identities
    Validate(ValidateArgs),
    /// Run a chaos-game walk and write the point cloud as CSV
    Walk(WalkArgs),
    /// Angular or radial histogram of a point CSV
    Hist(HistArgs),
    /// Render the Wigner distribution of an n = 1 blob
    Wigner(WignerArgs),
    /// Push a polar grid of the disk through a generator
    Deform(DeformArgs),
    /// Render a point CSV as a density image
    Density(DensityArgs),
    /// Run the invariant suite at reduced sample counts
    Selfcheck(SelfcheckArgs),
    /// Re-run the command recorded in a metadata file
    Rerun(RerunArgs),
}

#[derive(Debug, Args, Serialize)]
pub struct ValidateArgs {
    /// Matrix JSON: {"re": [[..]]} for a real symplectic matrix, {"re": .., "im": ..} for a complex block matrix
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Hyperbolic,
    Parabolic,
    File,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    Uniform,
    StateDependent,
}

#[derive(Debug, Args, Serialize)]
pub struct WalkArgs {
    #[arg(long, value_enum, default_value_t = Family::Hyperbolic)]
    pub family: Family,
    /// Squeezing parameter of the hyperbolic family, in [0, 1)
    #[arg(long, default_value_t = 0.75)]
    pub beta: f64,
    /// Time parameter of the parabolic family
    #[arg(long, default_value_t = 2.0)]
    pub tau: f64,
    /// Generator JSON for --family file
    #[arg(long)]
    pub generators: Option<PathBuf>,
    #[arg(long, default_value_t = 1_000_000)]
    pub steps: u64,
    #[arg(long, env = "BLOBWALK_SEED", default_value_t = 1)]
    pub seed: u64,
    #[arg(long, value_enum, default_value_t = Mode::Uniform)]
    pub mode: Mode,
    #[arg(long, default_value_t = 1000)]
    pub burn_in: u64,
    #[arg(long, default_value_t = 1)]
    pub record_every: u64,
    /// Independent runs on separate RNG streams
    #[arg(long, default_value_t = 1)]
    pub runs: usize,
    /// Fail with exit code 3 when more clamps than this occur
    #[arg(long)]
    pub max_clamps: Option<u64>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum HistKind {
    Angular,
    Radial,
}

#[derive(Debug, Args, Serialize)]
pub struct HistArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, default_value_t = 1024)]
    pub bins: usize,
    #[arg(long, value_enum, default_value_t = HistKind::Angular)]
    pub kind: HistKind,
    /// log(1 + count) bar heights in the PGM strip
    #[arg(long)]
    pub log: bool,
    /// Optional bar-chart image
    #[arg(long)]
    pub pgm: Option<PathBuf>,
    #[arg(long, default_value_t = 256)]
    pub height: usize,
    /// CSV output; stdout when absent
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
pub struct WignerArgs {
    #[arg(long, default_value_t = 0.5)]
    pub r: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4)]
    pub phi: f64,
    #[arg(long, default_value_t = 512)]
    pub grid: usize,
    #[arg(long, default_value_t = 5.0)]
    pub extent: f64,
    #[arg(long)]
    pub log: bool,
    /// PGM image output
    #[arg(long)]
    pub out: PathBuf,
    /// CSV of q,p,w samples; defaults to the image path with a .csv extension
    #[arg(long)]
    pub csv: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DeformKind {
    Identity,
    Hyperbolic,
    Parabolic,
}

#[derive(Debug, Args, Serialize)]
pub struct DeformArgs {
    #[arg(long, value_enum, default_value_t = DeformKind::Hyperbolic)]
    pub kind: DeformKind,
    /// β for hyperbolic, τ for parabolic
    #[arg(long, default_value_t = 0.7)]
    pub param: f64,
    /// Generator index within the family (1-based)
    #[arg(long, default_value_t = 1)]
    pub index: usize,
    #[arg(long, default_value_t = 16)]
    pub radial_lines: usize,
    #[arg(long, default_value_t = 8)]
    pub circles: usize,
    #[arg(long, default_value_t = 200)]
    pub samples: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct DensityArgs {
    #[arg(long)]
    pub points: PathBuf,
    #[arg(long, default_value_t = 1024)]
    pub resolution: usize,
    #[arg(long, default_value_t = 1.0)]
    pub extent: f64,
    #[arg(long)]
    pub log: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args, Serialize)]
pub struct SelfcheckArgs {
    #[arg(long, default_value_t = 7)]
    pub seed: u64,
    /// Test hook: perturb the composed kernel prefactor
    #[arg(long, hide = true)]
    pub corrupt_composition: bool,
}

#[derive(Debug, Args)]
pub struct RerunArgs {
    pub meta: PathBuf,
}

/// Written next to every artifact as `<artifact>.meta.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunMetadata {
    pub command: String,
    /// Arguments that reproduce the artifact, defaults made explicit.
    pub argv: Vec<String>,
    pub params: serde_json::Value,
    pub seed: Option<u64>,
    pub rng: String,
    pub version: String,
    pub clamp_count: u64,
    pub duration_seconds: f64,
    pub schema: String,
    #[serde(default, skip_serializing_if = "serde_json::Map::is_empty")]
    pub extra: serde_json::Map<String, serde_json::Value>,
}

impl RunMetadata {
    fn new(command: &str, argv: Vec<String>, params: serde_json::Value, schema: &str) -> Self {
        Self {
            command: command.to_string(),
            argv,
            params,
            seed: None,
            rng: RNG_ID.to_string(),
            version: env!("CARGO_PKG_VERSION").to_string(),
            clamp_count: 0,
            duration_seconds: 0.0,
            schema: schema.to_string(),
            extra: Default::default(),
        }
    }

    fn for_args(command: &str, args: &impl Serialize, schema: &str) -> Self {
        let (argv, params) = invocation(command, args);
        Self::new(command, argv, params, schema)
    }

    pub fn path_for(artifact: &Path) -> PathBuf {
        let mut s = artifact.as_os_str().to_owned();
        s.push(".meta.json");
        PathBuf::from(s)
    }

    fn write(&self, artifact: &Path) -> Result<(), CliError> {
        let path = Self::path_for(artifact);
        let json = serde_json::to_string_pretty(self).map_err(|e| io_err(&path, e))?;
        fs::write(&path, json + "\n").map_err(|e| io_err(&path, e))
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
        serde_json::from_str(&text).map_err(|e| io_err(path, e))
    }
}

/// `{"re": [[..]], "im": [[..]]}`, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub re: Vec<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub im: Option<Vec<Vec<f64>>>,
}

impl MatrixJson {
    pub fn from_complex(m: &ComplexMatrix) -> Self {
        let rows = |f: fn(&Complex64) -> f64| {
            (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| f(&m[(r, c)])).collect())
                .collect()
        };
        Self {
            re: rows(|z| z.re),
            im: Some(rows(|z| z.im)),
        }
    }

    pub fn from_real(m: &RealMatrix) -> Self {
        Self {
            re: (0..m.nrows())
                .map(|r| (0..m.ncols()).map(|c| m[(r, c)]).collect())
                .collect(),
            im: None,
        }
    }

    /// Files without an `im` key hold real symplectic matrices; with `im`
    /// present they hold complex block matrices `[[λ, μ], [ν, ρ]]`.
    pub fn is_real(&self) -> bool {
        self.im.is_none()
    }

    pub fn to_complex(&self) -> Result<ComplexMatrix, CliError> {
        let rows = self.re.len();
        let cols = self.re.first().map_or(0, Vec::len);
        if rows == 0 || self.re.iter().any(|r| r.len() != cols) {
            return Err(CliError::Usage(
                "matrix rows must be nonempty and equal length".into(),
            ));
        }
        let im = match &self.im {
            Some(im) => {
                if im.len() != rows || im.iter().any(|r| r.len() != cols) {
                    return Err(CliError::Usage("re and im shapes differ".into()));
                }
                im.clone()
            }
            None => vec![vec![0.0; cols]; rows],
        };
        Ok(ComplexMatrix::from_fn(rows, cols, |r, c| {
            c64(self.re[r][c], im[r][c])
        }))
    }

    pub fn to_real(&self) -> Result<RealMatrix, CliError> {
        Ok(crate::linalg::real_part(&self.to_complex()?))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorForm {
    /// Real symplectic matrices, Cayley-transformed on load.
    Real,
    /// Complex block matrices `[[λ, μ], [ν, ρ]]`.
    #[default]
    Complex,
}

/// Generator file for `walk --family file`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorFile {
    #[serde(default)]
    pub form: GeneratorForm,
    pub matrices: Vec<MatrixJson>,
}

pub fn read_json<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    serde_json::from_str(&text).map_err(|e| io_err(path, e))
}

pub fn load_generators(path: &Path) -> Result<Vec<SemigroupElement>, CliError> {
    let file: GeneratorFile = read_json(path)?;
    if file.matrices.is_empty() {
        return Err(CliError::Usage("generator file lists no matrices".into()));
    }
    file.matrices
        .iter()
        .map(|m| match file.form {
            GeneratorForm::Real => {
                let s = RealSymplectic::new(m.to_real()?, 1e-9)
                    .map_err(|e| CliError::Validation(e.to_string()))?;
                let e = cayley_to_complex(&s).map_err(|e| CliError::Validation(e.to_string()))?;
                Ok(SemigroupElement::from(&e))
            }
            GeneratorForm::Complex => SemigroupElement::from_matrix(&m.to_complex()?, 1e-9)
                .map_err(|e| CliError::Validation(e.to_string())),
        })
        .collect()
}

/// Writes the point cloud CSV; floats use the shortest round-trip form.
pub fn write_points_csv(w: &mut impl Write, cloud: &PointCloud) -> std::io::Result<()> {
    let gen_at = |step: u64| cloud.generator_index[(step - 1) as usize];
    if cloud.n == 1 {
        writeln!(w, "step,re,im,gen")?;
        for (i, &step) in cloud.steps.iter().enumerate() {
            let z = cloud.values[i];
            writeln!(w, "{step},{},{},{}", z.re, z.im, gen_at(step))?;
        }
    } else {
        writeln!(w, "step,blob,gen")?;
        let k = cloud.n * cloud.n;
        for (i, &step) in cloud.steps.iter().enumerate() {
            let blob: Vec<String> = cloud.values[i * k..(i + 1) * k]
                .iter()
                .flat_map(|z| [z.re.to_string(), z.im.to_string()])
                .collect();
            writeln!(w, "{step},{},{}", blob.join(";"), gen_at(step))?;
        }
    }
    Ok(())
}

/// Reads an n = 1 point CSV back into `(step, z, gen)` triples.
pub fn read_points_csv(path: &Path) -> Result<Vec<(u64, Complex64, u32)>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some("step,re,im,gen") => {}
        Some("step,blob,gen") => {
            return Err(CliError::Usage(
                "histograms and density grids need an n = 1 point file".into(),
            ))
        }
        _ => return Err(io_err(path, "missing step,re,im,gen header")),
    }
    lines
        .enumerate()
        .map(|(i, line)| {
            let bad = || io_err(path, format!("malformed row {}", i + 2));
            let mut f = line.split(',');
            let mut next = || f.next().ok_or_else(bad);
            let step = next()?.parse().map_err(|_| bad())?;
            let re = next()?.parse().map_err(|_| bad())?;
            let im = next()?.parse().map_err(|_| bad())?;
            let gen = next()?.parse().map_err(|_| bad())?;
            Ok((step, c64(re, im), gen))
        })
        .collect()
}

fn cloud_from_csv(path: &Path) -> Result<PointCloud, CliError> {
    let rows = read_points_csv(path)?;
    Ok(PointCloud {
        n: 1,
        steps: rows.iter().map(|r| r.0).collect(),
        values: rows.iter().map(|r| r.1).collect(),
        ..Default::default()
    })
}

/// Binary PGM (P5), 8-bit.
pub fn write_pgm(path: &Path, width: usize, height: usize, pixels: &[u8]) -> Result<(), CliError> {
    assert_eq!(
        pixels.len(),
        width * height,
        "pixel buffer does not match image size"
    );
    let mut bytes = format!("P5\n{width} {height}\n255\n").into_bytes();
    bytes.extend_from_slice(pixels);
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

/// Maps intensities to gray levels, 0 → white, max → black.
pub fn tone_map(values: &[f64], log: bool) -> Vec<u8> {
    let max = values.iter().copied().fold(0.0, f64::max);
    values
        .iter()
        .map(|&v| {
            let t = if max <= 0.0 {
                0.0
            } else if log {
                (1.0 + v).ln() / (1.0 + max).ln()
            } else {
                v / max
            };
            255 - (255.0 * t.clamp(0.0, 1.0)).round() as u8
        })
        .collect()
}

fn create(path: &Path) -> Result<std::io::BufWriter<fs::File>, CliError> {
    fs::File::create(path)
        .map(std::io::BufWriter::new)
        .map_err(|e| io_err(path, e))
}

fn generators_for(args: &WalkArgs) -> Result<Vec<SemigroupElement>, CliError> {
    let spc: Vec<SpcElement> = match args.family {
        Family::Hyperbolic => {
            hyperbolic_family(args.beta).map_err(|e| CliError::Usage(e.to_string()))?
        }
        Family::Parabolic => parabolic_family(args.tau),
        Family::File => {
            let path = args
                .generators
                .as_ref()
                .ok_or_else(|| CliError::Usage("--family file needs --generators".into()))?;
            return load_generators(path);
        }
    };
    Ok(spc.iter().map(SemigroupElement::from).collect())
}

fn run_path(out: &Path, k: usize, runs: usize) -> PathBuf {
    if runs == 1 {
        return out.to_path_buf();
    }
    let stem = out
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    let ext = out
        .extension()
        .map(|e| format!(".{}", e.to_string_lossy()))
        .unwrap_or_default();
    out.with_file_name(format!("{stem}.run{k}{ext}"))
}

fn cmd_walk(args: &WalkArgs, out: &mut impl Write) -> Result<(), CliError> {
    let start = Instant::now();
    if args.steps == 0 {
        return Err(CliError::Usage("--steps must be at least 1".into()));
    }
    if args.record_every == 0 || args.runs == 0 {
        return Err(CliError::Usage(
            "--record-every and --runs must be at least 1".into(),
        ));
    }
    let generators = generators_for(args)?;
    let mut cfg = WalkConfig::new(generators, args.steps, args.seed);
    cfg.burn_in = args.burn_in;
    cfg.record_every = args.record_every;
    cfg.mode = match args.mode {
        Mode::Uniform => ProbabilityMode::Uniform,
        Mode::StateDependent => ProbabilityMode::StateDependent,
    };
    let results = run_many(&cfg, args.runs);
    let (argv, params) = invocation("walk", args);
    for (k, result) in results.into_iter().enumerate() {
        let cloud = result.map_err(numeric)?;
        for w in &cloud.warnings {
            eprintln!("warning: {w}");
        }
        let path = run_path(&args.out, k, args.runs);
        let mut file = create(&path)?;
        write_points_csv(&mut file, &cloud).map_err(|e| io_err(&path, e))?;
        file.flush().map_err(|e| io_err(&path, e))?;
        let mut meta = RunMetadata::new("walk", argv.clone(), params.clone(), POINTS_SCHEMA);
        meta.seed = Some(args.seed);
        meta.clamp_count = cloud.clamp_count;
        meta.duration_seconds = start.elapsed().as_secs_f64();
        meta.extra.insert("run".into(), k.into());
        meta.extra.insert("points".into(), cloud.len().into());
        meta.write(&path)?;
        writeln!(
            out,
            "{}: {} points, {} clamps",
            path.display(),
            cloud.len(),
            cloud.clamp_count
        )
        .map_err(|e| io_err(&path, e))?;
        if let Some(limit) = args.max_clamps {
            if cloud.clamp_count > limit {
                return Err(CliError::Numeric(format!(
                    "{} clamps exceed the limit {limit}",
                    cloud.clamp_count
                )));
            }
        }
    }
    Ok(())
}

/// Arguments that reproduce `args` exactly, defaults made explicit.
fn invocation(command: &str, args: &impl Serialize) -> (Vec<String>, serde_json::Value) {
    let params = serde_json::to_value(args).expect("arguments serialize");
    let mut argv = vec![command.to_string()];
    if let serde_json::Value::Object(map) = &params {
        for (key, value) in map {
            let flag = format!("--{}", key.replace('_', "-"));
            match value {
                serde_json::Value::Null | serde_json::Value::Bool(false) => {}
                serde_json::Value::Bool(true) => argv.push(flag),
                serde_json::Value::String(v) => argv.extend([flag, v.clone()]),
                v => argv.extend([flag, v.to_string()]),
            }
        }
    }
    (argv, params)
}

fn cmd_validate(args: &ValidateArgs, out: &mut impl Write) -> Result<(), CliError> {
    let m: MatrixJson = read_json(&args.matrix)?;
    let mut lines = Vec::new();
    let passed = if m.is_real() {
        let s = m.to_real()?;
        let residual = real_symplectic_residual(&s).map_err(|e| CliError::Usage(e.to_string()))?;
        let ok = residual <= args.tol;
        lines.push(format!(
            "{} S J S^T = J and S^T J S = J              residual {residual:.3e}",
            if ok { "PASS" } else { "FAIL" }
        ));
        let mut all = ok;
        if ok {
            let s = RealSymplectic::new(s, args.tol)
                .map_err(|e| CliError::Validation(e.to_string()))?;
            let e = cayley_to_complex(&s).map_err(|e| CliError::Validation(e.to_string()))?;
            let report = validate_spc(&e, args.tol);
            all &= report.all_passed();
            lines.push(report.to_string().trim_end().to_string());
        }
        all
    } else {
        let c = m.to_complex()?;
        let class =
            semigroup_class(&c, args.tol).map_err(|e| CliError::Validation(e.to_string()))?;
        lines.push(format!("class {class:?}"));
        let blocks = Blocks::from_matrix(&c).map_err(|e| CliError::Usage(e.to_string()))?;
        let report = if class == SemigroupClass::Group {
            validate_spc(
                &SpcElement::from_blocks_unchecked(blocks.lambda, blocks.mu),
                args.tol,
            )
        } else {
            validate_semigroup(&blocks, args.tol).map_err(numeric)?
        };
        lines.push(report.to_string().trim_end().to_string());
        class != SemigroupClass::Outside && report.all_passed()
    };
    let path = args.matrix.as_path();
    for l in &lines {
        writeln!(out, "{l}").map_err(|e| io_err(path, e))?;
    }
    if passed {
        writeln!(out, "valid").map_err(|e| io_err(path, e))?;
        Ok(())
    } else {
        Err(CliError::Validation(format!(
            "{} does not satisfy the identities",
            path.display()
        )))
    }
}

fn cmd_hist(args: &HistArgs, out: &mut impl Write) -> Result<(), CliError> {
    let start = Instant::now();
    if args.bins == 0 {
        return Err(CliError::Usage("--bins must be at least 1".into()));
    }
    let cloud = cloud_from_csv(&args.points)?;
    let counts = match args.kind {
        HistKind::Angular => angular_histogram(&cloud, args.bins),
        HistKind::Radial => radial_histogram(&cloud, args.bins),
    }
    .map_err(numeric)?;
    let mut csv = String::from("bin,count\n");
    for (k, c) in counts.iter().enumerate() {
        csv.push_str(&format!("{k},{c}\n"));
    }
    match &args.out {
        Some(path) => {
            fs::write(path, &csv).map_err(|e| io_err(path, e))?;
            let mut meta = RunMetadata::for_args("hist", args, HIST_SCHEMA);
            meta.duration_seconds = start.elapsed().as_secs_f64();
            meta.write(path)?;
        }
        None => out
            .write_all(csv.as_bytes())
            .map_err(|e| CliError::Io(e.to_string()))?,
    }
    if let Some(pgm) = &args.pgm {
        let h = args.height.max(1);
        let max = counts.iter().copied().max().unwrap_or(0) as f64;
        let scale = |c: u64| {
            if max == 0.0 {
                0.0
            } else if args.log {
                (1.0 + c as f64).ln() / (1.0 + max).ln()
            } else {
                c as f64 / max
            }
        };
        let mut pixels = vec![255u8; args.bins * h];
        for (k, &c) in counts.iter().enumerate() {
            let bar = (scale(c) * h as f64).round() as usize;
            for row in h - bar..h {
                pixels[row * args.bins + k] = 0;
            }
        }
        write_pgm(pgm, args.bins, h, &pixels)?;
    }
    Ok(())
}

/// Midpoint-rule samples of the Wigner function on `[−extent, extent]²`;
/// row 0 is `p ≈ extent`. Returns the values and the grid integral.
pub fn wigner_grid(a: &Blob, grid: usize, extent: f64) -> Result<(Vec<f64>, f64), CliError> {
    let w = Wigner::new(a).map_err(numeric)?;
    let h = 2.0 * extent / grid as f64;
    let mut values = Vec::with_capacity(grid * grid);
    for row in 0..grid {
        let p = extent - (row as f64 + 0.5) * h;
        for col in 0..grid {
            let q = -extent + (col as f64 + 0.5) * h;
            values.push(w.eval(&[q, p]));
        }
    }
    let integral = values.iter().sum::<f64>() * h * h;
    Ok((values, integral))
}

fn cmd_wigner(args: &WignerArgs, out: &mut impl Write) -> Result<(), CliError> {
    let start = Instant::now();
    if args.grid == 0 || args.extent <= 0.0 {
        return Err(CliError::Usage(
            "--grid and --extent must be positive".into(),
        ));
    }
    let a = Blob::scalar(Complex64::from_polar(args.r, args.phi))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let (values, integral) = wigner_grid(&a, args.grid, args.extent)?;
    write_pgm(
        &args.out,
        args.grid,
        args.grid,
        &tone_map(&values, args.log),
    )?;
    {
        let csv = &args
            .csv
            .clone()
            .unwrap_or_else(|| args.out.with_extension("csv"));
        let mut f = create(csv)?;
        let h = 2.0 * args.extent / args.grid as f64;
        let mut body = String::from("q,p,w\n");
        for (i, v) in values.iter().enumerate() {
            let (row, col) = (i / args.grid, i % args.grid);
            let q = -args.extent + (col as f64 + 0.5) * h;
            let p = args.extent - (row as f64 + 0.5) * h;
            body.push_str(&format!("{q},{p},{v}\n"));
        }
        f.write_all(body.as_bytes()).map_err(|e| io_err(csv, e))?;
    }
    let shape = crate::blob::shape(&a).map_err(numeric)?;
    let mut meta = RunMetadata::for_args("wigner", args, "pgm/P5 8-bit, row 0 = top (p = +extent)");
    meta.duration_seconds = start.elapsed().as_secs_f64();
    meta.extra.insert("grid_integral".into(), integral.into());
    meta.extra.insert(
        "semi_axes".into(),
        serde_json::json!([shape.a[0], shape.b[0]]),
    );
    meta.write(&args.out)?;
    writeln!(
        out,
        "grid integral {integral:.6}, semi-axes a = {:.7}, b = {:.7}",
        shape.a[0], shape.b[0]
    )
    .map_err(|e| CliError::Io(e.to_string()))
}

fn deform_element(kind: DeformKind, param: f64, index: usize) -> Result<SpcElement, CliError> {
    let usage = |e: crate::symplectic::SymplecticError| CliError::Usage(e.to_string());
    match kind {
        DeformKind::Identity => Ok(SpcElement::identity(1)),
        DeformKind::Hyperbolic => hyperbolic_generator(param, index)
            .map(|(_, a)| a)
            .map_err(usage),
        DeformKind::Parabolic => parabolic_generator(param, index)
            .map(|(_, a)| a)
            .map_err(usage),
    }
}

fn cmd_deform(args: &DeformArgs, out: &mut impl Write) -> Result<(), CliError> {
    let start = Instant::now();
    let e = deform_element(args.kind, args.param, args.index)?;
    let curves = deform_grid(&e, args.radial_lines, args.circles, args.samples).map_err(numeric)?;
    let mut f = create(&args.out)?;
    let mut body = String::from("curve,kind,index,point,re,im\n");
    for (id, c) in curves.iter().enumerate() {
        let kind = match c.kind {
            CurveKind::Radial => "radial",
            CurveKind::Circle => "circle",
        };
        for (j, z) in c.points.iter().enumerate() {
            body.push_str(&format!("{id},{kind},{},{j},{},{}\n", c.index, z.re, z.im));
        }
    }
    f.write_all(body.as_bytes())
        .map_err(|e| io_err(&args.out, e))?;
    f.flush().map_err(|e| io_err(&args.out, e))?;
    let mut meta = RunMetadata::for_args("deform", args, DEFORM_SCHEMA);
    meta.duration_seconds = start.elapsed().as_secs_f64();
    meta.write(&args.out)?;
    writeln!(out, "{}: {} curves", args.out.display(), curves.len())
        .map_err(|e| CliError::Io(e.to_string()))
}

fn cmd_density(args: &DensityArgs, out: &mut impl Write) -> Result<(), CliError> {
    let start = Instant::now();
    if args.resolution == 0 || args.extent <= 0.0 {
        return Err(CliError::Usage(
            "--resolution and --extent must be positive".into(),
        ));
    }
    let cloud = cloud_from_csv(&args.points)?;
    let grid = density_grid(&cloud, args.resolution, args.extent).map_err(numeric)?;
    let values: Vec<f64> = grid.counts.iter().map(|&c| c as f64).collect();
    write_pgm(
        &args.out,
        grid.resolution,
        grid.resolution,
        &tone_map(&values, args.log),
    )?;
    let mut meta = RunMetadata::for_args(
        "density",
        args,
        "pgm/P5 8-bit, row 0 = top (y = +extent), dark = dense",
    );
    meta.duration_seconds = start.elapsed().as_secs_f64();
    meta.extra.insert("dropped".into(), grid.dropped.into());
    meta.write(&args.out)?;
    writeln!(
        out,
        "{}: {} points binned, {} dropped",
        args.out.display(),
        grid.total(),
        grid.dropped
    )
    .map_err(|e| CliError::Io(e.to_string()))
}

fn cmd_selfcheck(args: &SelfcheckArgs, out: &mut impl Write) -> Result<(), CliError> {
    let start = Instant::now();
    let results = selfcheck::run(args.seed, args.corrupt_composition);
    let mut failed = 0;
    for r in &results {
        writeln!(
            out,
            "{} {:<36} {}",
            if r.passed { "PASS" } else { "FAIL" },
            r.name,
            r.detail
        )
        .map_err(|e| CliError::Io(e.to_string()))?;
        failed += usize::from(!r.passed);
    }
    writeln!(
        out,
        "{} checks, {failed} failed, {:.1}s",
        results.len(),
        start.elapsed().as_secs_f64()
    )
    .map_err(|e| CliError::Io(e.to_string()))?;
    if failed > 0 {
        return Err(CliError::Validation(format!("{failed} self-checks failed")));
    }
    Ok(())
}

fn cmd_rerun(args: &RerunArgs, out: &mut impl Write) -> Result<(), CliError> {
    let meta = RunMetadata::read(&args.meta)?;
    if meta.argv.is_empty() {
        return Err(CliError::Usage(format!(
            "{} records no argv",
            args.meta.display()
        )));
    }
    let cli = Cli::try_parse_from(std::iter::once("blobwalk".to_string()).chain(meta.argv))
        .map_err(|e| CliError::Usage(e.to_string()))?;
    run(&cli, out)
}

pub fn run(cli: &Cli, out: &mut impl Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Validate(a) => cmd_validate(a, out),
        Command::Walk(a) => cmd_walk(a, out),
        Command::Hist(a) => cmd_hist(a, out),
        Command::Wigner(a) => cmd_wigner(a, out),
        Command::Deform(a) => cmd_deform(a, out),
        Command::Density(a) => cmd_density(a, out),
        Command::Selfcheck(a) => cmd_selfcheck(a, out),
        Command::Rerun(a) => cmd_rerun(a, out),
    }
}
