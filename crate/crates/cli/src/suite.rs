//! Benchmark sweeps at desk scale.
//!
//! Data is generated with the strip kernel and reconstructed with the Joseph
//! kernel on a detector with one bin of unit width per pixel row.

use std::f64::consts::PI;
use std::io::Write;

use bintomo::dual::poisson_weights_with_scale;
use bintomo::geometry::GridSpec;
use bintomo::metrics::evaluate;
use bintomo::noise::simulate_poisson;
use bintomo::phantom::{make_phantom, PhantomName};
use bintomo::projector::build_parallel_operator;
use bintomo::{BinaryImage, Kernel, ParallelGeometry, Result, SparseOperator};
use clap::ValueEnum;
use rayon::prelude::*;

use crate::pipeline::{reconstruct, Method, ReconOptions};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SuiteChoice {
    Sparse,
    LimitedAngle,
    Noise,
    All,
}

impl SuiteChoice {
    pub fn suites(self) -> Vec<Suite> {
        match self {
            SuiteChoice::Sparse => vec![Suite::Sparse],
            SuiteChoice::LimitedAngle => vec![Suite::LimitedAngle],
            SuiteChoice::Noise => vec![Suite::Noise],
            SuiteChoice::All => vec![Suite::Sparse, Suite::LimitedAngle, Suite::Noise],
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    /// 45, 20, 10 and 5 angles over `[0, π/2]`.
    Sparse,
    /// 10 angles over `[0, θmax]` for θmax ∈ {5π/6, 2π/3, 7π/12, π/2}.
    LimitedAngle,
    /// 10 angles over `[0, π/2]` with Poisson counts, I0 ∈ {1e6, 1e4, 1e3, 1e2}.
    Noise,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Scenario {
    /// Value of the `test` column.
    pub label: String,
    pub angles: usize,
    pub theta_max: f64,
    pub i0: Option<f64>,
}

impl Scenario {
    pub fn noise_free(label: &str, angles: usize, theta_max: f64) -> Self {
        Self { label: label.into(), angles, theta_max, i0: None }
    }
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Sparse => "sparse",
            Suite::LimitedAngle => "limited-angle",
            Suite::Noise => "noise",
        }
    }

    pub fn scenarios(self) -> Vec<Scenario> {
        match self {
            Suite::Sparse => [45, 20, 10, 5].iter().map(|&k| Scenario::noise_free(&k.to_string(), k, PI / 2.0)).collect(),
            Suite::LimitedAngle => [("5pi/6", 5.0 / 6.0), ("2pi/3", 2.0 / 3.0), ("7pi/12", 7.0 / 12.0), ("pi/2", 0.5)]
                .iter()
                .map(|&(label, frac)| Scenario::noise_free(label, 10, frac * PI))
                .collect(),
            Suite::Noise => [("1e6", 1e6), ("1e4", 1e4), ("1e3", 1e3), ("1e2", 1e2)]
                .iter()
                .map(|&(label, i0)| Scenario { label: label.into(), angles: 10, theta_max: PI / 2.0, i0: Some(i0) })
                .collect(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeskSetup {
    pub n: usize,
    pub data_kernel: Kernel,
    pub model_kernel: Kernel,
}

impl Default for DeskSetup {
    fn default() -> Self {
        Self { n: 32, data_kernel: Kernel::Strip, model_kernel: Kernel::Joseph }
    }
}

/// Everything a reconstruction of one (scenario, phantom) pair needs.
#[derive(Debug, Clone)]
pub struct CellData {
    pub truth: BinaryImage,
    /// Model operator.
    pub a: SparseOperator,
    pub y: Vec<f64>,
    pub weights: Option<Vec<f64>>,
    /// Realized `‖ŷ − y‖`; zero for noise-free data.
    pub noise_norm: f64,
}

pub fn prepare(setup: &DeskSetup, scenario: &Scenario, phantom: PhantomName, seed: u64) -> Result<CellData> {
    let n = setup.n;
    let truth = make_phantom(phantom, n)?;
    let grid = GridSpec::new(n)?;
    let angles = ParallelGeometry::equispaced_angles(scenario.angles, scenario.theta_max);
    let geom = ParallelGeometry::new(angles, n, 1.0, setup.data_kernel)?;
    let clean = build_parallel_operator(&grid, &geom)?.apply_forward(&truth.values())?;
    let a = build_parallel_operator(&grid, &geom.with_kernel(setup.model_kernel))?;
    match scenario.i0 {
        None => Ok(CellData { truth, a, y: clean, weights: None, noise_norm: 0.0 }),
        Some(i0) => {
            let data = simulate_poisson(&clean, i0, seed)?;
            // weights from the measurements, as a real scan would have to
            let weights = poisson_weights_with_scale(&data.values, i0, data.scale)?;
            Ok(CellData { truth, a, y: data.values, weights: Some(weights), noise_norm: data.noise_norm })
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CellOutcome {
    pub rms: f64,
    pub ji: f64,
    pub converged: bool,
    pub lambda: Option<f64>,
}

pub fn run_cell(data: &CellData, method: Method, opts: &ReconOptions) -> Result<CellOutcome> {
    let opts = ReconOptions { noise_level: data.noise_norm, ..opts.clone() };
    let rec = reconstruct(&data.a, &data.y, data.weights.as_deref(), data.truth.levels(), method, &opts)?;
    let m = evaluate(&data.a, &rec.image, &data.truth, &data.y)?;
    Ok(CellOutcome { rms: m.rms, ji: m.ji, converged: rec.converged, lambda: rec.lambda })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub test: String,
    pub phantom: String,
    pub method: Method,
    /// Error message for failed cells.
    pub outcome: std::result::Result<CellOutcome, String>,
}

/// Runs every (scenario, phantom, method) cell. Pairs are processed on the
/// current rayon pool; rows come back in sweep order.
pub fn run_suite(suite: Suite, setup: &DeskSetup, phantoms: &[PhantomName], methods: &[Method], seed: u64) -> Vec<Row> {
    let scenarios = suite.scenarios();
    let pairs: Vec<(usize, &Scenario, usize, PhantomName)> = scenarios
        .iter()
        .enumerate()
        .flat_map(|(si, s)| phantoms.iter().enumerate().map(move |(pi, &p)| (si, s, pi, p)))
        .collect();
    let opts = ReconOptions::default();
    let blocks: Vec<Vec<Row>> = pairs
        .par_iter()
        .map(|&(si, scenario, pi, phantom)| {
            let cell_seed = seed.wrapping_add((si * 1000 + pi) as u64);
            let data = prepare(setup, scenario, phantom, cell_seed);
            methods
                .iter()
                .map(|&method| {
                    let outcome = match &data {
                        Ok(d) => run_cell(d, method, &opts).map_err(|e| e.to_string()),
                        Err(e) => Err(e.to_string()),
                    };
                    Row { test: scenario.label.clone(), phantom: phantom.to_string(), method, outcome }
                })
                .collect()
        })
        .collect();
    blocks.into_iter().flatten().collect()
}

pub const CSV_HEADER: &str = "test,phantom,method,rms,ji,converged,lambda,status";

pub fn write_row<W: Write>(mut w: W, r: &Row) -> std::io::Result<()> {
    match &r.outcome {
        Ok(c) => {
            let lambda = c.lambda.map(|l| format!("{l:e}")).unwrap_or_default();
            writeln!(w, "{},{},{},{},{},{},{},ok", r.test, r.phantom, r.method, c.rms, c.ji, c.converged, lambda)
        }
        Err(msg) => {
            // keep the message inside one CSV field
            let msg = msg.replace([',', '\n'], ";");
            writeln!(w, "{},{},{},,,false,,failed: {msg}", r.test, r.phantom, r.method)
        }
    }
}

pub fn write_rows<W: Write>(mut w: W, rows: &[Row]) -> std::io::Result<()> {
    writeln!(w, "{CSV_HEADER}")?;
    for r in rows {
        write_row(&mut w, r)?;
    }
    Ok(())
}
