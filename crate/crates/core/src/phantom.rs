//! Analytic binary test images at any resolution.
//!
//! Shapes are defined on the unit square with pixel `(r, c)` sampled at its
//! center `((c + ½)/n, (r + ½)/n)`, and every shape stays inside the disk of
//! radius 0.45 around the image center so that rotated views see all of it.

use std::fmt;
use std::str::FromStr;

use crate::dual::GreyLevels;
use crate::error::{Error, Result};
use crate::image::BinaryImage;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PhantomName {
    /// Several ellipses of different sizes.
    P1,
    /// Two nested rings around an off-center disk.
    P2,
    /// A rectangle with round and square holes.
    P3,
    /// A single filled ellipse.
    P4,
    Disk,
    Rings,
    Letters,
}

impl PhantomName {
    pub const ALL: [PhantomName; 7] = [
        PhantomName::P1,
        PhantomName::P2,
        PhantomName::P3,
        PhantomName::P4,
        PhantomName::Disk,
        PhantomName::Rings,
        PhantomName::Letters,
    ];

    /// The four phantoms used by the benchmark tables.
    pub const BENCH: [PhantomName; 4] = [PhantomName::P1, PhantomName::P2, PhantomName::P3, PhantomName::P4];
}

impl FromStr for PhantomName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "p1" => Ok(PhantomName::P1),
            "p2" => Ok(PhantomName::P2),
            "p3" => Ok(PhantomName::P3),
            "p4" => Ok(PhantomName::P4),
            "disk" => Ok(PhantomName::Disk),
            "rings" => Ok(PhantomName::Rings),
            "letters" => Ok(PhantomName::Letters),
            other => Err(Error::InvalidArgument(format!("unknown phantom '{other}'"))),
        }
    }
}

impl fmt::Display for PhantomName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PhantomName::P1 => "P1",
            PhantomName::P2 => "P2",
            PhantomName::P3 => "P3",
            PhantomName::P4 => "P4",
            PhantomName::Disk => "disk",
            PhantomName::Rings => "rings",
            PhantomName::Letters => "letters",
        })
    }
}

fn ellipse(x: f64, y: f64, cx: f64, cy: f64, rx: f64, ry: f64) -> bool {
    let (dx, dy) = ((x - cx) / rx, (y - cy) / ry);
    dx * dx + dy * dy <= 1.0
}

fn annulus(x: f64, y: f64, cx: f64, cy: f64, inner: f64, outer: f64) -> bool {
    let d = ((x - cx).powi(2) + (y - cy).powi(2)).sqrt();
    d >= inner && d <= outer
}

fn rect(x: f64, y: f64, x0: f64, x1: f64, y0: f64, y1: f64) -> bool {
    x >= x0 && x <= x1 && y >= y0 && y <= y1
}

fn inside(name: PhantomName, x: f64, y: f64) -> bool {
    match name {
        PhantomName::P1 => {
            ellipse(x, y, 0.35, 0.35, 0.12, 0.09)
                || ellipse(x, y, 0.66, 0.40, 0.10, 0.14)
                || ellipse(x, y, 0.42, 0.68, 0.15, 0.08)
                || ellipse(x, y, 0.70, 0.70, 0.06, 0.06)
        }
        PhantomName::P2 => annulus(x, y, 0.5, 0.5, 0.30, 0.40) || annulus(x, y, 0.5, 0.5, 0.12, 0.20) || ellipse(x, y, 0.53, 0.47, 0.05, 0.05),
        PhantomName::P3 => {
            rect(x, y, 0.2, 0.8, 0.25, 0.75)
                && !ellipse(x, y, 0.35, 0.40, 0.07, 0.07)
                && !ellipse(x, y, 0.65, 0.40, 0.07, 0.07)
                && !rect(x, y, 0.45, 0.70, 0.55, 0.65)
        }
        PhantomName::P4 => ellipse(x, y, 0.5, 0.5, 0.38, 0.30),
        PhantomName::Disk => ellipse(x, y, 0.5, 0.5, 0.4, 0.4),
        PhantomName::Rings => annulus(x, y, 0.5, 0.5, 0.15, 0.25) || annulus(x, y, 0.5, 0.5, 0.33, 0.42),
        PhantomName::Letters => {
            // a "C" opening to the right and a "T"
            let (dx, dy) = (x - 0.3, y - 0.5);
            let c = annulus(x, y, 0.3, 0.5, 0.08, 0.15) && !(dx > 0.0 && dy.abs() < dx);
            let t = rect(x, y, 0.55, 0.85, 0.30, 0.38) || rect(x, y, 0.66, 0.74, 0.30, 0.70);
            c || t
        }
    }
}

/// The named phantom on an `n × n` grid with levels `0, 1`.
pub fn make_phantom(name: PhantomName, n: usize) -> Result<BinaryImage> {
    if n < 8 {
        return Err(Error::InvalidArgument(format!("phantoms need n ≥ 8, got {n}")));
    }
    let flags = (0..n * n)
        .map(|i| {
            let (r, c) = (i / n, i % n);
            inside(name, (c as f64 + 0.5) / n as f64, (r as f64 + 0.5) / n as f64)
        })
        .collect();
    BinaryImage::from_flags(n, GreyLevels::UNIT, flags)
}
