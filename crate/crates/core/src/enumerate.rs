//! Exhaustive enumeration of tiny lattice instances.
//!
//! Every `n × n` image with levels `−1, +1` is projected along the chosen
//! lattice directions; images sharing a projection form one instance. The
//! dual solver is then run on each instance and its ternary output compared
//! with the unique solution or with the intersection of all solutions.

use std::collections::BTreeMap;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::dual::{prepare_data, recover_primal, solve_problem, DualProblem, GreyLevels, SolverConfig};
use crate::error::{Error, Result};
use crate::geometry::{GridSpec, LatticeDirection, LatticeGeometry};
use crate::image::{BinaryImage, Completion, Ternary, TernaryImage};
use crate::projector::build_lattice_operator;
use crate::range::RangeProjector;

/// Largest side length accepted; `2^(n²)` images are visited.
pub const MAX_N: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct InstanceClassification {
    /// Upper-level pixel count of every line, directions in canonical order.
    pub projection_key: Vec<u8>,
    pub solutions: Vec<BinaryImage>,
    pub unique: bool,
    pub intersection: TernaryImage,
}

impl InstanceClassification {
    /// Ray sums of the instance for levels `−1, +1`: `2·count − line length`.
    pub fn data(&self, line_lengths: &[u8]) -> Vec<f64> {
        self.projection_key.iter().zip(line_lengths).map(|(&c, &l)| 2.0 * c as f64 - l as f64).collect()
    }
}

/// Bitmask of the pixels on each line, in operator row order.
fn line_masks(n: usize, geom: &LatticeGeometry) -> Vec<u32> {
    let mut masks = Vec::with_capacity(geom.num_rays(n));
    for &dir in geom.directions() {
        let mut lines = vec![0u32; dir.line_count(n)];
        for r in 0..n {
            for c in 0..n {
                lines[dir.line_of(n, r, c)] |= 1 << (r * n + c);
            }
        }
        masks.extend(lines);
    }
    masks
}

fn check_size(n: usize) -> Result<()> {
    if n == 0 || n > MAX_N {
        return Err(Error::InvalidArgument(format!("enumeration supports 1 ≤ n ≤ {MAX_N}, got {n}")));
    }
    Ok(())
}

/// Groups all `2^(n²)` images by their projection.
pub fn enumerate_all(n: usize, geom: &LatticeGeometry) -> Result<BTreeMap<Vec<u8>, InstanceClassification>> {
    check_size(n)?;
    let masks = line_masks(n, geom);
    let mut groups: BTreeMap<Vec<u8>, Vec<u32>> = BTreeMap::new();
    for image in 0..(1u32 << (n * n)) {
        let key = masks.iter().map(|&m| (image & m).count_ones() as u8).collect();
        groups.entry(key).or_default().push(image);
    }
    groups
        .into_iter()
        .map(|(key, images)| {
            let solutions: Vec<BinaryImage> =
                images.iter().map(|&m| BinaryImage::from_mask(n, GreyLevels::SYMMETRIC, m)).collect();
            let intersection = intersection_of(&solutions)?;
            let class = InstanceClassification {
                projection_key: key.clone(),
                unique: solutions.len() == 1,
                solutions,
                intersection,
            };
            Ok((key, class))
        })
        .collect()
}

/// Pixelwise agreement of all solutions; disagreeing pixels are undetermined.
pub fn intersection_of(solutions: &[BinaryImage]) -> Result<TernaryImage> {
    let first = solutions.first().ok_or_else(|| Error::InvalidArgument("no solutions to intersect".into()))?;
    if let Some(bad) = solutions.iter().find(|s| s.n() != first.n() || s.levels() != first.levels()) {
        return Err(Error::DimensionMismatch { expected: first.len(), actual: bad.len() });
    }
    let pixels = (0..first.len())
        .map(|i| {
            let v = first.flags()[i];
            if solutions.iter().all(|s| s.flags()[i] == v) {
                if v {
                    Ternary::Upper
                } else {
                    Ternary::Lower
                }
            } else {
                Ternary::Undetermined
            }
        })
        .collect();
    TernaryImage::new(first.n(), first.levels(), pixels)
}

/// Whether the upper-level pixels form a gap-free run on every line of all
/// four lattice directions.
pub fn hvd_convexity_check(x: &BinaryImage) -> bool {
    let n = x.n();
    LatticeDirection::ALL.iter().all(|&dir| {
        let mut lines: Vec<Vec<bool>> = vec![Vec::new(); dir.line_count(n)];
        // row-major traversal visits every line's pixels in order
        for r in 0..n {
            for c in 0..n {
                lines[dir.line_of(n, r, c)].push(x.is_upper(r, c));
            }
        }
        lines.iter().all(|line| {
            let runs = line.windows(2).filter(|w| !w[0] && w[1]).count() + usize::from(line.first() == Some(&true));
            runs <= 1
        })
    })
}

/// Which instances to solve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Selection {
    All,
    /// A seeded random subset of `count` instances, plus every
    /// multiple-solution instance when `all_multiple` is set.
    Sample { count: usize, seed: u64, all_multiple: bool },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ClassOutcome {
    pub projection_key: Vec<u8>,
    pub unique: bool,
    pub ternary: TernaryImage,
    pub converged: bool,
    pub kkt_residual: f64,
    /// Completed image equals the solution (unique) or ternary image equals
    /// the intersection exactly (multiple).
    pub correct: bool,
    /// Every pixel the dual decides agrees with the intersection.
    pub correct_relaxed: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EnumerationSummary {
    pub n: usize,
    pub m_dirs: usize,
    pub directions: String,
    /// `2^(n²)`.
    pub total: usize,
    /// Images that are the only solution of their instance.
    pub unique_count: usize,
    /// Images sharing their projection with another image.
    pub multiple_count: usize,
    /// Unique images whose instance was solved.
    pub checked_unique: usize,
    /// Images in multiple-solution instances that were solved.
    pub checked_multiple: usize,
    pub dual_correct_unique: usize,
    pub dual_correct_multiple: usize,
    pub dual_correct_multiple_relaxed: usize,
    /// Instances whose solve did not converge.
    pub dual_failures: usize,
    /// Unique instances decided without any undetermined pixel.
    pub unique_fully_decided: usize,
}

#[derive(Debug, Clone)]
pub struct VerificationReport {
    pub summary: EnumerationSummary,
    pub outcomes: Vec<ClassOutcome>,
}

impl VerificationReport {
    pub fn incorrect(&self) -> impl Iterator<Item = &ClassOutcome> {
        self.outcomes.iter().filter(|o| !o.correct)
    }
}

/// Image counts of an enumeration without running the solver.
pub fn count_summary(n: usize, geom: &LatticeGeometry, classes: &BTreeMap<Vec<u8>, InstanceClassification>) -> EnumerationSummary {
    let unique_count = classes.values().filter(|c| c.unique).count();
    let total: usize = classes.values().map(|c| c.solutions.len()).sum();
    EnumerationSummary {
        n,
        m_dirs: geom.m_dirs(),
        directions: geom.to_string(),
        total,
        unique_count,
        multiple_count: total - unique_count,
        checked_unique: 0,
        checked_multiple: 0,
        dual_correct_unique: 0,
        dual_correct_multiple: 0,
        dual_correct_multiple_relaxed: 0,
        dual_failures: 0,
        unique_fully_decided: 0,
    }
}

/// Solves the dual on every selected instance and tallies agreement with the
/// brute-force solutions.
///
/// Multiple-solution counts are in images, as in the unique column, so a
/// correct instance with `k` solutions adds `k`.
pub fn verify_dual_conjecture(n: usize, geom: &LatticeGeometry, cfg: &SolverConfig, selection: Selection) -> Result<VerificationReport> {
    cfg.validate()?;
    let classes = enumerate_all(n, geom)?;
    let mut summary = count_summary(n, geom, &classes);

    let grid = GridSpec::new(n)?;
    let a = build_lattice_operator(&grid, geom)?;
    let projector = RangeProjector::new(&a, cfg.range);
    let deficient = !projector.has_full_row_rank(cfg.rank_threshold)?;
    let line_lengths: Vec<u8> = line_masks(n, geom).iter().map(|m| m.count_ones() as u8).collect();

    let mut chosen: Vec<&InstanceClassification> = classes.values().collect();
    if let Selection::Sample { count, seed, all_multiple } = selection {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut picked: Vec<bool> = vec![false; chosen.len()];
        let mut order: Vec<usize> = (0..chosen.len()).collect();
        order.shuffle(&mut rng);
        for &i in order.iter().take(count) {
            picked[i] = true;
        }
        if all_multiple {
            for (i, c) in chosen.iter().enumerate() {
                picked[i] |= !c.unique;
            }
        }
        chosen = chosen.into_iter().zip(picked).filter(|(_, p)| *p).map(|(c, _)| c).collect();
    }

    let outcomes: Vec<ClassOutcome> = chosen
        .par_iter()
        .map(|class| {
            let y = class.data(&line_lengths);
            let b = prepare_data(y, deficient.then_some(&projector))?;
            let problem = DualProblem { k: a.clone(), b, levels: GreyLevels::SYMMETRIC, rank_deficient: deficient };
            let sol = solve_problem(&problem, cfg);
            let ternary = recover_primal(&sol.nu, GreyLevels::SYMMETRIC, cfg.zero_threshold)?.ternary;
            let correct = if class.unique {
                ternary.complete(Completion::Lower) == class.solutions[0]
            } else {
                ternary == class.intersection
            };
            Ok(ClassOutcome {
                projection_key: class.projection_key.clone(),
                unique: class.unique,
                correct_relaxed: ternary.is_refined_by(&class.intersection),
                ternary,
                converged: sol.converged,
                kkt_residual: sol.kkt_residual,
                correct,
            })
        })
        .collect::<Result<_>>()?;

    for (o, class) in outcomes.iter().zip(&chosen) {
        let size = class.solutions.len();
        if !o.converged {
            summary.dual_failures += 1;
        }
        if o.unique {
            summary.checked_unique += 1;
            summary.dual_correct_unique += usize::from(o.correct);
            summary.unique_fully_decided += usize::from(o.ternary.undetermined_count() == 0);
        } else {
            summary.checked_multiple += size;
            if o.correct {
                summary.dual_correct_multiple += size;
            }
            if o.correct_relaxed {
                summary.dual_correct_multiple_relaxed += size;
            }
        }
    }
    Ok(VerificationReport { summary, outcomes })
}

/// Writes summaries in the layout `m,n,total,unique,multiple,failures`
/// with `correct/checked` fractions.
pub fn write_summary_csv<W: Write>(mut w: W, rows: &[EnumerationSummary]) -> Result<()> {
    writeln!(w, "m,n,directions,total,unique_count,multiple_count,unique_correct/unique_total,multiple_correct/multiple_total,multiple_relaxed,failures")?;
    for s in rows {
        writeln!(
            w,
            "{},{},{},{},{},{},{}/{},{}/{},{},{}",
            s.m_dirs,
            s.n,
            s.directions,
            s.total,
            s.unique_count,
            s.multiple_count,
            s.dual_correct_unique,
            s.checked_unique,
            s.dual_correct_multiple,
            s.checked_multiple,
            s.dual_correct_multiple_relaxed,
            s.dual_failures
        )?;
    }
    Ok(())
}
