//! Grid and acquisition geometry descriptions.

use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// An `n × n` pixel grid, indexed row-major from the top-left corner.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    n: usize,
    pixel_size: f64,
}

impl GridSpec {
    pub fn new(n: usize) -> Result<Self> {
        Self::with_pixel_size(n, 1.0)
    }

    pub fn with_pixel_size(n: usize, pixel_size: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGeometry("grid must have at least one pixel per side".into()));
        }
        if !(pixel_size > 0.0 && pixel_size.is_finite()) {
            return Err(Error::InvalidGeometry(format!("pixel size must be positive, got {pixel_size}")));
        }
        Ok(Self { n, pixel_size })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn pixel_size(&self) -> f64 {
        self.pixel_size
    }

    /// Number of unknowns, `n²`.
    pub fn num_pixels(&self) -> usize {
        self.n * self.n
    }

    pub fn index(&self, row: usize, col: usize) -> usize {
        row * self.n + col
    }
}

/// The four lattice directions along which discrete line sums are taken.
///
/// Vectors are given as `(dx, dy)` with `x` pointing right and `y` pointing
/// up, so [`Diagonal`](Self::Diagonal) lines keep `row + col` constant and
/// [`AntiDiagonal`](Self::AntiDiagonal) lines keep `row − col` constant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LatticeDirection {
    Horizontal,
    Vertical,
    Diagonal,
    AntiDiagonal,
}

impl LatticeDirection {
    pub const ALL: [LatticeDirection; 4] = [
        LatticeDirection::Horizontal,
        LatticeDirection::Vertical,
        LatticeDirection::Diagonal,
        LatticeDirection::AntiDiagonal,
    ];

    pub fn vector(self) -> (i32, i32) {
        match self {
            LatticeDirection::Horizontal => (1, 0),
            LatticeDirection::Vertical => (0, 1),
            LatticeDirection::Diagonal => (1, 1),
            LatticeDirection::AntiDiagonal => (1, -1),
        }
    }

    pub fn from_vector(v: (i32, i32)) -> Result<Self> {
        match v {
            (1, 0) | (-1, 0) => Ok(LatticeDirection::Horizontal),
            (0, 1) | (0, -1) => Ok(LatticeDirection::Vertical),
            (1, 1) | (-1, -1) => Ok(LatticeDirection::Diagonal),
            (1, -1) | (-1, 1) => Ok(LatticeDirection::AntiDiagonal),
            other => Err(Error::InvalidGeometry(format!("unsupported lattice direction {other:?}"))),
        }
    }

    pub fn letter(self) -> char {
        match self {
            LatticeDirection::Horizontal => 'h',
            LatticeDirection::Vertical => 'v',
            LatticeDirection::Diagonal => 'd',
            LatticeDirection::AntiDiagonal => 'a',
        }
    }

    /// Number of distinct lines on an `n × n` grid.
    pub fn line_count(self, n: usize) -> usize {
        match self {
            LatticeDirection::Horizontal | LatticeDirection::Vertical => n,
            LatticeDirection::Diagonal | LatticeDirection::AntiDiagonal => 2 * n - 1,
        }
    }

    /// Index of the line through pixel `(row, col)`.
    pub fn line_of(self, n: usize, row: usize, col: usize) -> usize {
        match self {
            LatticeDirection::Horizontal => row,
            LatticeDirection::Vertical => col,
            LatticeDirection::Diagonal => row + col,
            LatticeDirection::AntiDiagonal => row + n - 1 - col,
        }
    }
}

/// A set of lattice directions, kept in the canonical order h, v, d, a.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LatticeGeometry {
    directions: Vec<LatticeDirection>,
}

impl LatticeGeometry {
    pub fn new(mut directions: Vec<LatticeDirection>) -> Result<Self> {
        if directions.is_empty() {
            return Err(Error::InvalidGeometry("at least one lattice direction is required".into()));
        }
        directions.sort();
        if directions.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidGeometry("lattice directions must be distinct".into()));
        }
        Ok(Self { directions })
    }

    pub fn from_vectors(vectors: &[(i32, i32)]) -> Result<Self> {
        let dirs = vectors.iter().map(|&v| LatticeDirection::from_vector(v)).collect::<Result<Vec<_>>>()?;
        Self::new(dirs)
    }

    /// The first `m` canonical directions (`m = 2` is h,v; `m = 3` adds d; `m = 4` adds a).
    pub fn first(m: usize) -> Result<Self> {
        if !(1..=4).contains(&m) {
            return Err(Error::InvalidGeometry(format!("between 1 and 4 directions allowed, got {m}")));
        }
        Self::new(LatticeDirection::ALL[..m].to_vec())
    }

    pub fn directions(&self) -> &[LatticeDirection] {
        &self.directions
    }

    pub fn m_dirs(&self) -> usize {
        self.directions.len()
    }

    pub fn num_rays(&self, n: usize) -> usize {
        self.directions.iter().map(|d| d.line_count(n)).sum()
    }
}

impl FromStr for LatticeGeometry {
    type Err = Error;

    /// Parses letter codes such as `"hv"` or `"hvda"`.
    fn from_str(s: &str) -> Result<Self> {
        let dirs = s
            .chars()
            .map(|c| match c.to_ascii_lowercase() {
                'h' => Ok(LatticeDirection::Horizontal),
                'v' => Ok(LatticeDirection::Vertical),
                'd' => Ok(LatticeDirection::Diagonal),
                'a' => Ok(LatticeDirection::AntiDiagonal),
                other => Err(Error::InvalidGeometry(format!("unknown direction code '{other}'"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(dirs)
    }
}

impl fmt::Display for LatticeGeometry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for d in &self.directions {
            write!(f, "{}", d.letter())?;
        }
        Ok(())
    }
}

/// Discretization model for a parallel-beam ray.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kernel {
    /// Linear interpolation across the transverse axis at every slab step.
    Joseph,
    /// Exact pixel/strip overlap area divided by the detector spacing.
    Strip,
}

impl FromStr for Kernel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "joseph" => Ok(Kernel::Joseph),
            "strip" => Ok(Kernel::Strip),
            other => Err(Error::InvalidGeometry(format!("unknown kernel '{other}'"))),
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kernel::Joseph => "joseph",
            Kernel::Strip => "strip",
        })
    }
}

/// Parallel-beam acquisition with a flat, center-aligned detector.
#[derive(Debug, Clone, PartialEq)]
pub struct ParallelGeometry {
    angles: Vec<f64>,
    detector_count: usize,
    detector_spacing: f64,
    kernel: Kernel,
}

impl ParallelGeometry {
    pub fn new(angles: Vec<f64>, detector_count: usize, detector_spacing: f64, kernel: Kernel) -> Result<Self> {
        if angles.is_empty() {
            return Err(Error::InvalidGeometry("at least one projection angle is required".into()));
        }
        if let Some(bad) = angles.iter().find(|a| !(a.is_finite() && **a >= 0.0 && **a < 2.0 * PI)) {
            return Err(Error::InvalidGeometry(format!("angle {bad} outside [0, 2π)")));
        }
        if detector_count == 0 {
            return Err(Error::InvalidGeometry("detector count must be at least one".into()));
        }
        if !(detector_spacing > 0.0 && detector_spacing.is_finite()) {
            return Err(Error::InvalidGeometry(format!(
                "detector spacing must be positive, got {detector_spacing}"
            )));
        }
        Ok(Self { angles, detector_count, detector_spacing, kernel })
    }

    /// `count` equispaced angles over `[0, theta_max]`.
    ///
    /// The end point is included unless `theta_max ≥ π`, where it would
    /// duplicate the first view of a parallel-beam scan.
    pub fn equispaced_angles(count: usize, theta_max: f64) -> Vec<f64> {
        match count {
            0 => Vec::new(),
            1 => vec![0.0],
            _ => {
                let steps = if theta_max >= PI - 1e-12 { count } else { count - 1 };
                (0..count).map(|k| theta_max * k as f64 / steps as f64).collect()
            }
        }
    }

    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    pub fn detector_count(&self) -> usize {
        self.detector_count
    }

    pub fn detector_spacing(&self) -> f64 {
        self.detector_spacing
    }

    pub fn kernel(&self) -> Kernel {
        self.kernel
    }

    pub fn with_kernel(&self, kernel: Kernel) -> Self {
        Self { kernel, ..self.clone() }
    }

    pub fn num_rays(&self) -> usize {
        self.angles.len() * self.detector_count
    }

    /// Signed detector coordinate of bin `d`, measured from the rotation center.
    pub fn detector_offset(&self, d: usize) -> f64 {
        (d as f64 - (self.detector_count as f64 - 1.0) / 2.0) * self.detector_spacing
    }
}
