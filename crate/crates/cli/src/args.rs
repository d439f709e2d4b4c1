//! Flag definitions for every subcommand.

use std::f64::consts::PI;
use std::path::PathBuf;

use bintomo::phantom::PhantomName;
use bintomo::{GreyLevels, Kernel, LatticeGeometry};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::pipeline::{CompletionMode, Method};
use crate::suite::SuiteChoice;

/// Seed used when `--seed` is not given.
pub const DEFAULT_SEED: u64 = 20_190_611;

#[derive(Debug, Parser)]
#[command(name = "bintomo", version, about = "Binary tomography through the Lagrange dual")]
pub struct Cli {
    /// Flat key=value file whose entries act as defaults for the
    /// subcommand's flags; flags given on the command line win
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write an analytic phantom as a PGM image
    Phantom(PhantomArgs),
    /// Simulate (optionally noisy) projection data of an image
    Project(ProjectArgs),
    /// Reconstruct a binary image from a sinogram
    Reconstruct(ReconstructArgs),
    /// Enumerate all n×n images and check the dual on every instance
    Enumerate(EnumerateArgs),
    /// Run a benchmark sweep and write one CSV table per suite
    Bench(BenchArgs),
}

#[derive(Debug, Args)]
pub struct PhantomArgs {
    /// p1, p2, p3, p4, disk, rings or letters
    #[arg(long)]
    pub name: PhantomName,
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GeometryKind {
    Parallel,
    Lattice,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    /// Binary PGM image (0 and maxval)
    #[arg(long)]
    pub image: PathBuf,
    /// Sinogram CSV; metadata goes to `<out>.meta`
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = GeometryKind::Parallel)]
    pub geometry: GeometryKind,
    /// Number of equispaced projection angles
    #[arg(long, default_value_t = 10)]
    pub angles: usize,
    /// Largest angle, in radians or as `pi`, `pi/2`, `5pi/6`, ...
    #[arg(long, default_value = "pi", value_parser = parse_angle)]
    pub theta_max: f64,
    /// Detector bins per view (defaults to the image size)
    #[arg(long)]
    pub detectors: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub spacing: f64,
    #[arg(long, default_value = "strip")]
    pub kernel: Kernel,
    /// Lattice directions as letter codes (h, v, d, a)
    #[arg(long, default_value = "hv")]
    pub dirs: LatticeGeometry,
    /// Grey levels `u0,u1` assigned to the image
    #[arg(long, default_value = "0,1", value_parser = parse_levels)]
    pub levels: GreyLevels,
    /// Additive Gaussian noise at this SNR in dB
    #[arg(long, conflicts_with = "i0")]
    pub snr: Option<f64>,
    /// Poisson noise with this incident photon count
    #[arg(long)]
    pub i0: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ReconstructArgs {
    #[arg(long)]
    pub sinogram: PathBuf,
    /// Metadata file (defaults to `<sinogram>.meta`)
    #[arg(long)]
    pub meta: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub method: Method,
    /// Binary reconstruction as PGM
    #[arg(long)]
    pub out: PathBuf,
    /// Ternary map for the dual methods (defaults to `<out stem>.ternary.pgm`)
    #[arg(long)]
    pub ternary_out: Option<PathBuf>,
    /// Grey levels `u0,u1` (defaults to the metadata, then `0,1`)
    #[arg(long, value_parser = parse_levels)]
    pub levels: Option<GreyLevels>,
    /// Forward model for parallel-beam data
    #[arg(long, default_value = "joseph")]
    pub kernel: Kernel,
    /// Ground-truth PGM; enables the metrics row
    #[arg(long)]
    pub truth: Option<PathBuf>,
    /// Metrics CSV (defaults to `<out stem>.metrics.csv`)
    #[arg(long)]
    pub metrics: Option<PathBuf>,
    /// Append to the metrics CSV instead of replacing it
    #[arg(long)]
    pub append: bool,
    /// Value of the `test` column (defaults to the sinogram file stem)
    #[arg(long)]
    pub label: Option<String>,
    /// Iteration cap (defaults per method: dp 500, lsqr 1000, tv 5000)
    #[arg(long)]
    pub max_iters: Option<usize>,
    /// KKT tolerance of the dual solvers
    #[arg(long, default_value_t = 1e-6)]
    pub tol: f64,
    /// Smoothing parameter of dp-smooth
    #[arg(long, default_value_t = 0.1)]
    pub epsilon: f64,
    /// Dual entries within this threshold are undetermined in the ternary map
    #[arg(long, default_value_t = 1e-9)]
    pub zero_threshold: f64,
    /// Final smoothing level of the central refinement
    #[arg(long, default_value_t = 1e-13)]
    pub central_rho: f64,
    /// How the binary output fills undetermined pixels
    #[arg(long, value_enum, default_value_t = CompletionMode::Sign)]
    pub completion: CompletionMode,
    /// Noise norm for the discrepancy principle (defaults to the metadata)
    #[arg(long)]
    pub noise_level: Option<f64>,
    /// Fixed TV weight, skipping the discrepancy search
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Relative duality gap at which TV stops
    #[arg(long, default_value_t = 1e-4)]
    pub tv_tol: f64,
    /// Ignore Poisson weights recorded in the metadata
    #[arg(long)]
    pub unweighted: bool,
    /// Exit with code 4 when the solver does not converge
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EnumerateMode {
    Counts,
    Verify,
}

#[derive(Debug, Args)]
pub struct EnumerateArgs {
    /// Image size, at most 4
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..=4))]
    pub n: u64,
    /// Lattice directions as letter codes (h, v, d, a)
    #[arg(long, default_value = "hv")]
    pub dirs: LatticeGeometry,
    #[arg(long, value_enum, default_value_t = EnumerateMode::Counts)]
    pub mode: EnumerateMode,
    /// Summary CSV (defaults to standard output)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Verify a seeded sample of this many instances plus all
    /// multiple-solution ones
    #[arg(long)]
    pub sample: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: SuiteChoice,
    /// Directory receiving `<suite>.csv`
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 32)]
    pub n: usize,
    #[arg(long, value_delimiter = ',', default_value = "p1,p2,p3,p4")]
    pub phantoms: Vec<PhantomName>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "lsqr,tv,dp")]
    pub methods: Vec<Method>,
    /// Worker threads (defaults to the number of cores)
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

/// Parses `u0,u1`.
pub fn parse_levels(s: &str) -> Result<GreyLevels, String> {
    let (a, b) = s.split_once(',').ok_or_else(|| format!("expected u0,u1, got '{s}'"))?;
    let parse = |t: &str| t.trim().parse::<f64>().map_err(|e| format!("'{t}': {e}"));
    GreyLevels::new(parse(a)?, parse(b)?).map_err(|e| e.to_string())
}

/// Parses radians given as a number or as a multiple of `pi`, e.g. `pi/2`,
/// `5pi/6` or `7*pi/12`.
pub fn parse_angle(s: &str) -> Result<f64, String> {
    let t = s.trim().to_ascii_lowercase().replace(['*', ' '], "");
    if let Ok(v) = t.parse::<f64>() {
        return Ok(v);
    }
    let bad = || format!("cannot read '{s}' as an angle");
    let (num, den) = match t.split_once('/') {
        Some((num, den)) => (num, den.parse::<f64>().map_err(|_| bad())?),
        None => (t.as_str(), 1.0),
    };
    let coef = num.strip_suffix("pi").ok_or_else(bad)?;
    let coef = if coef.is_empty() { 1.0 } else { coef.parse::<f64>().map_err(|_| bad())? };
    Ok(coef * PI / den)
}
