//! Two-level and three-level images on a square grid.

use std::fmt;

use crate::dual::GreyLevels;
use crate::error::{Error, Result};

/// A square image whose pixels take one of two grey levels.
///
/// Pixels are stored row-major as flags, `true` meaning the upper level.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryImage {
    n: usize,
    levels: GreyLevels,
    upper: Vec<bool>,
}

impl BinaryImage {
    pub fn from_flags(n: usize, levels: GreyLevels, upper: Vec<bool>) -> Result<Self> {
        if upper.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: upper.len() });
        }
        Ok(Self { n, levels, upper })
    }

    /// Rejects any value that is not exactly one of the two levels.
    pub fn from_values(n: usize, levels: GreyLevels, values: &[f64]) -> Result<Self> {
        let upper = values
            .iter()
            .map(|&v| {
                if v == levels.u1 {
                    Ok(true)
                } else if v == levels.u0 {
                    Ok(false)
                } else {
                    Err(Error::InvalidArgument(format!("pixel value {v} is not a grey level of {levels}")))
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_flags(n, levels, upper)
    }

    /// Image of side `n` whose pixel `i` is upper iff bit `i` of `mask` is set.
    pub fn from_mask(n: usize, levels: GreyLevels, mask: u32) -> Self {
        let upper = (0..n * n).map(|i| mask >> i & 1 == 1).collect();
        Self { n, levels, upper }
    }

    pub fn filled(n: usize, levels: GreyLevels, upper: bool) -> Self {
        Self { n, levels, upper: vec![upper; n * n] }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> GreyLevels {
        self.levels
    }

    pub fn len(&self) -> usize {
        self.upper.len()
    }

    pub fn is_empty(&self) -> bool {
        self.upper.is_empty()
    }

    pub fn flags(&self) -> &[bool] {
        &self.upper
    }

    pub fn is_upper(&self, row: usize, col: usize) -> bool {
        self.upper[row * self.n + col]
    }

    pub fn values(&self) -> Vec<f64> {
        self.upper.iter().map(|&u| if u { self.levels.u1 } else { self.levels.u0 }).collect()
    }

    pub fn count_upper(&self) -> usize {
        self.upper.iter().filter(|&&u| u).count()
    }

    /// Same pixel pattern expressed with other grey levels.
    pub fn with_levels(&self, levels: GreyLevels) -> Self {
        Self { levels, ..self.clone() }
    }

    pub fn to_ternary(&self) -> TernaryImage {
        let pixels = self.upper.iter().map(|&u| if u { Ternary::Upper } else { Ternary::Lower }).collect();
        TernaryImage { n: self.n, levels: self.levels, pixels }
    }
}

/// Pixel state recovered from the dual: decided at either level, or left open.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Ternary {
    Lower,
    Undetermined,
    Upper,
}

impl Ternary {
    /// Code used in ternary maps: lower 0, undetermined 1, upper 2.
    pub fn code(self) -> u8 {
        match self {
            Ternary::Lower => 0,
            Ternary::Undetermined => 1,
            Ternary::Upper => 2,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        match code {
            0 => Some(Ternary::Lower),
            1 => Some(Ternary::Undetermined),
            2 => Some(Ternary::Upper),
            _ => None,
        }
    }
}

/// Rule for filling undetermined pixels when a binary image is required.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Completion {
    #[default]
    Lower,
    Upper,
    /// Majority of the decided pixels in the 3×3 neighbourhood, ties and
    /// fully undecided neighbourhoods going to the lower level.
    Majority,
}

impl std::str::FromStr for Completion {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "lower" | "u0" => Ok(Completion::Lower),
            "upper" | "u1" => Ok(Completion::Upper),
            "majority" => Ok(Completion::Majority),
            other => Err(Error::InvalidArgument(format!("unknown completion '{other}'"))),
        }
    }
}

impl fmt::Display for Completion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Completion::Lower => "lower",
            Completion::Upper => "upper",
            Completion::Majority => "majority",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TernaryImage {
    n: usize,
    levels: GreyLevels,
    pixels: Vec<Ternary>,
}

impl TernaryImage {
    pub fn new(n: usize, levels: GreyLevels, pixels: Vec<Ternary>) -> Result<Self> {
        if pixels.len() != n * n {
            return Err(Error::DimensionMismatch { expected: n * n, actual: pixels.len() });
        }
        Ok(Self { n, levels, pixels })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn levels(&self) -> GreyLevels {
        self.levels
    }

    pub fn pixels(&self) -> &[Ternary] {
        &self.pixels
    }

    pub fn undetermined_count(&self) -> usize {
        self.pixels.iter().filter(|&&p| p == Ternary::Undetermined).count()
    }

    /// Values with undetermined pixels mapped to the midpoint of the levels.
    pub fn values(&self) -> Vec<f64> {
        let mid = 0.5 * (self.levels.u0 + self.levels.u1);
        self.pixels
            .iter()
            .map(|p| match p {
                Ternary::Lower => self.levels.u0,
                Ternary::Undetermined => mid,
                Ternary::Upper => self.levels.u1,
            })
            .collect()
    }

    pub fn complete(&self, mode: Completion) -> BinaryImage {
        let n = self.n;
        let upper = (0..n * n)
            .map(|i| match self.pixels[i] {
                Ternary::Upper => true,
                Ternary::Lower => false,
                Ternary::Undetermined => match mode {
                    Completion::Lower => false,
                    Completion::Upper => true,
                    Completion::Majority => self.neighbourhood_majority(i / n, i % n),
                },
            })
            .collect();
        BinaryImage { n, levels: self.levels, upper }
    }

    /// True when every pixel decided here agrees with `other`, which may
    /// decide more pixels.
    pub fn is_refined_by(&self, other: &TernaryImage) -> bool {
        self.pixels.len() == other.pixels.len()
            && self.pixels.iter().zip(&other.pixels).all(|(a, b)| *a == Ternary::Undetermined || a == b)
    }

    fn neighbourhood_majority(&self, row: usize, col: usize) -> bool {
        let n = self.n as isize;
        let (mut up, mut low) = (0, 0);
        for dr in -1..=1isize {
            for dc in -1..=1isize {
                let (r, c) = (row as isize + dr, col as isize + dc);
                if (dr, dc) == (0, 0) || r < 0 || c < 0 || r >= n || c >= n {
                    continue;
                }
                match self.pixels[(r * n + c) as usize] {
                    Ternary::Upper => up += 1,
                    Ternary::Lower => low += 1,
                    Ternary::Undetermined => {}
                }
            }
        }
        up > low
    }
}
