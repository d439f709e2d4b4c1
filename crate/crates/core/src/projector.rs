//! Construction of lattice and parallel-beam projection operators.
//!
//! Pixel `(row, col)` has its center at `u = (col − (n−1)/2)·h`,
//! `v = (row − (n−1)/2)·h` where `v` points down the image. A parallel ray at
//! angle `θ` and detector offset `s` is the line `u cos θ + v sin θ = s`, so
//! at `θ = 0` detector bin `d` integrates column `d` and at `θ = π/2` it
//! integrates row `d`.

use crate::error::Result;
use crate::geometry::{GridSpec, Kernel, LatticeGeometry, ParallelGeometry};
use crate::operator::SparseOperator;

/// Interpolation fractions closer than this to an integer are snapped.
const SNAP: f64 = 1e-10;

/// 0/1 operator with one row per discrete line per direction.
///
/// Rows are grouped by direction in canonical order; within a direction they
/// follow [`LatticeDirection::line_of`](crate::geometry::LatticeDirection::line_of).
pub fn build_lattice_operator(grid: &GridSpec, geom: &LatticeGeometry) -> Result<SparseOperator> {
    let n = grid.n();
    let mut rows = Vec::with_capacity(geom.num_rays(n));
    for &dir in geom.directions() {
        let mut lines = vec![Vec::new(); dir.line_count(n)];
        for r in 0..n {
            for c in 0..n {
                lines[dir.line_of(n, r, c)].push((grid.index(r, c), 1.0));
            }
        }
        rows.extend(lines);
    }
    SparseOperator::from_rows(grid.num_pixels(), rows)
}

/// Parallel-beam operator with `angles × detector_count` rows, angle-major.
///
/// Rays that miss the grid are kept as empty rows.
pub fn build_parallel_operator(grid: &GridSpec, geom: &ParallelGeometry) -> Result<SparseOperator> {
    let mut rows = Vec::with_capacity(geom.num_rays());
    for &theta in geom.angles() {
        let (sin, cos) = theta.sin_cos();
        for d in 0..geom.detector_count() {
            let s = geom.detector_offset(d);
            let row = match geom.kernel() {
                Kernel::Joseph => joseph_ray(grid, cos, sin, s),
                Kernel::Strip => strip_ray(grid, cos, sin, s, geom.detector_spacing()),
            };
            rows.push(row);
        }
    }
    SparseOperator::from_rows(grid.num_pixels(), rows)
}

fn joseph_ray(grid: &GridSpec, cos: f64, sin: f64, s: f64) -> Vec<(usize, f64)> {
    let n = grid.n();
    let h = grid.pixel_size();
    let half = (n as f64 - 1.0) / 2.0;
    let mut out = Vec::with_capacity(2 * n);
    // march along the axis the ray is most aligned with
    let along_rows = cos.abs() >= sin.abs();
    let (lead, trans) = if along_rows { (cos, sin) } else { (sin, cos) };
    let step = h / lead.abs();
    for k in 0..n {
        let fixed = (k as f64 - half) * h;
        let pos = (s - fixed * trans) / lead;
        let idx = pos / h + half;
        let mut j0 = idx.floor();
        let mut f = idx - j0;
        if f < SNAP {
            f = 0.0;
        } else if f > 1.0 - SNAP {
            f = 0.0;
            j0 += 1.0;
        }
        let mut push = |j: f64, w: f64| {
            if w > 0.0 && j >= 0.0 && j < n as f64 {
                let j = j as usize;
                let pixel = if along_rows { grid.index(k, j) } else { grid.index(j, k) };
                out.push((pixel, w * step));
            }
        };
        push(j0, 1.0 - f);
        push(j0 + 1.0, f);
    }
    out
}

fn strip_ray(grid: &GridSpec, cos: f64, sin: f64, s: f64, spacing: f64) -> Vec<(usize, f64)> {
    let n = grid.n();
    let h = grid.pixel_size();
    let half = (n as f64 - 1.0) / 2.0;
    let (a, b) = {
        let (p, q) = (h * cos.abs(), h * sin.abs());
        if p >= q {
            (p, q)
        } else {
            (q, p)
        }
    };
    let reach = (a + b) / 2.0 + spacing / 2.0;
    let (lo, hi) = (s - spacing / 2.0, s + spacing / 2.0);
    let mut out = Vec::new();
    for r in 0..n {
        let v = (r as f64 - half) * h;
        for c in 0..n {
            let u = (c as f64 - half) * h;
            let center = u * cos + v * sin;
            if (center - s).abs() >= reach {
                continue;
            }
            let frac = pixel_cdf(hi - center, a, b) - pixel_cdf(lo - center, a, b);
            let w = frac * h * h / spacing;
            if w > 1e-14 {
                out.push((grid.index(r, c), w));
            }
        }
    }
    out
}

/// Fraction of a pixel lying in the half-plane `p·n − c ≤ z`, where the
/// pixel's projection onto `n` is the sum of two centered uniforms of widths
/// `a ≥ b`.
fn pixel_cdf(z: f64, a: f64, b: f64) -> f64 {
    if b <= 1e-9 * a {
        return ((z + a / 2.0) / a).clamp(0.0, 1.0);
    }
    let r2 = |t: f64| if t > 0.0 { t * t } else { 0.0 };
    let (p, q) = ((a + b) / 2.0, (a - b) / 2.0);
    let val = (r2(z + p) - r2(z + q) - r2(z - q) + r2(z - p)) / (2.0 * a * b);
    val.clamp(0.0, 1.0)
}
