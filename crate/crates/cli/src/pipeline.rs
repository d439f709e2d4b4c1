//! One reconstruction, independent of where the data came from.

use std::fmt;

use bintomo::baselines::{default_lambda_grid, otsu_threshold, select_lambda_discrepancy, solve_least_squares, solve_tv, TvConfig};
use bintomo::dual::{recover_primal, solve_dual_primal_dual, solve_dual_smoothed};
use bintomo::image::Completion;
use bintomo::io::Meta;
use bintomo::lsqr::LsqrOptions;
use bintomo::{BinaryImage, DualSolution, GreyLevels, Result, SolverConfig, SparseOperator, TernaryImage};
use clap::ValueEnum;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum Method {
    /// Dual problem, primal-dual solver with central refinement
    Dp,
    /// Dual problem with a smoothed penalty, L-BFGS
    DpSmooth,
    /// Least squares, segmented by Otsu's threshold
    Lsqr,
    /// Total variation, segmented by Otsu's threshold
    Tv,
}

impl Method {
    pub fn is_dual(self) -> bool {
        matches!(self, Method::Dp | Method::DpSmooth)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Method::Dp => "dp",
            Method::DpSmooth => "dp-smooth",
            Method::Lsqr => "lsqr",
            Method::Tv => "tv",
        })
    }
}

/// Filling rule for pixels the dual leaves open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CompletionMode {
    /// Sign of the dual entry, ignoring the zero threshold
    Sign,
    Lower,
    Upper,
    /// Majority of the decided 3×3 neighbours
    Majority,
}

impl fmt::Display for CompletionMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CompletionMode::Sign => "sign",
            CompletionMode::Lower => "lower",
            CompletionMode::Upper => "upper",
            CompletionMode::Majority => "majority",
        })
    }
}

#[derive(Debug, Clone)]
pub struct ReconOptions {
    pub solver: SolverConfig,
    pub completion: CompletionMode,
    pub lsqr: LsqrOptions,
    pub tv: TvConfig,
    /// Fixed TV weight; when absent the discrepancy principle picks one.
    pub lambda: Option<f64>,
    /// Noise norm handed to the discrepancy principle.
    pub noise_level: f64,
}

impl Default for ReconOptions {
    fn default() -> Self {
        Self {
            solver: SolverConfig::default(),
            completion: CompletionMode::Sign,
            lsqr: LsqrOptions::default(),
            tv: TvConfig::default(),
            lambda: None,
            noise_level: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction {
    pub image: BinaryImage,
    /// Dual methods only.
    pub ternary: Option<TernaryImage>,
    pub converged: bool,
    pub iterations: usize,
    /// KKT residual (dp), smoothed gradient norm (dp-smooth), relative
    /// normal-equation residual (lsqr) or relative duality gap (tv).
    pub residual: f64,
    pub lambda: Option<f64>,
    pub discrepancy_satisfied: Option<bool>,
}

fn from_dual(sol: DualSolution, levels: GreyLevels, opts: &ReconOptions) -> Result<Reconstruction> {
    let recovered = recover_primal(&sol.nu, levels, opts.solver.zero_threshold)?;
    let image = match opts.completion {
        CompletionMode::Sign => recover_primal(&sol.nu, levels, 0.0)?.completed,
        CompletionMode::Lower => recovered.ternary.complete(Completion::Lower),
        CompletionMode::Upper => recovered.ternary.complete(Completion::Upper),
        CompletionMode::Majority => recovered.ternary.complete(Completion::Majority),
    };
    Ok(Reconstruction {
        image,
        ternary: Some(recovered.ternary),
        converged: sol.converged,
        iterations: sol.iterations,
        residual: sol.kkt_residual,
        lambda: None,
        discrepancy_satisfied: None,
    })
}

/// Reconstructs a binary image from `y ≈ Ax`. Weights only affect the dual
/// methods; the baselines solve their unweighted problems.
pub fn reconstruct(
    a: &SparseOperator,
    y: &[f64],
    weights: Option<&[f64]>,
    levels: GreyLevels,
    method: Method,
    opts: &ReconOptions,
) -> Result<Reconstruction> {
    match method {
        Method::Dp => from_dual(solve_dual_primal_dual(a, y, levels, weights, &opts.solver)?, levels, opts),
        Method::DpSmooth => from_dual(solve_dual_smoothed(a, y, levels, weights, &opts.solver)?, levels, opts),
        Method::Lsqr => {
            let ls = solve_least_squares(a, y, opts.lsqr)?;
            Ok(Reconstruction {
                image: otsu_threshold(&ls.x, levels)?,
                ternary: None,
                converged: ls.converged,
                iterations: ls.iterations,
                residual: ls.relative_normal_residual,
                lambda: None,
                discrepancy_satisfied: None,
            })
        }
        Method::Tv => {
            let cfg = TvConfig { nonneg: levels.u0 >= 0.0, ..opts.tv };
            let (lambda, result, satisfied) = match opts.lambda {
                Some(lambda) => (lambda, solve_tv(a, y, &TvConfig { lambda, ..cfg })?, None),
                None => {
                    let grid = default_lambda_grid(y, a.cols());
                    let sel = select_lambda_discrepancy(a, y, opts.noise_level, &grid, &cfg)?;
                    (sel.lambda, sel.result, Some(sel.satisfied))
                }
            };
            Ok(Reconstruction {
                image: otsu_threshold(&result.x, levels)?,
                ternary: None,
                converged: result.converged,
                iterations: result.iterations,
                residual: result.relative_gap,
                lambda: Some(lambda),
                discrepancy_satisfied: satisfied,
            })
        }
    }
}

/// Key=value summary of a run.
pub fn report(method: Method, rec: &Reconstruction) -> Meta {
    let mut meta = Meta::new();
    meta.insert("method".into(), method.to_string());
    meta.insert("converged".into(), rec.converged.to_string());
    meta.insert("iterations".into(), rec.iterations.to_string());
    meta.insert("residual".into(), format!("{:e}", rec.residual));
    if let Some(t) = &rec.ternary {
        meta.insert("undetermined".into(), t.undetermined_count().to_string());
    }
    if let Some(l) = rec.lambda {
        meta.insert("lambda".into(), format!("{l:e}"));
    }
    if let Some(s) = rec.discrepancy_satisfied {
        meta.insert("discrepancy_satisfied".into(), s.to_string());
    }
    meta
}
