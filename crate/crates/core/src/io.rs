//! Plain-text and PGM file formats.
//!
//! Images are PGM: ASCII `P2` up to 64×64 pixels and binary `P5` above.
//! Binary images use maxval 1; ternary maps use maxval 2 with codes from
//! [`Ternary::code`]. Sinograms are CSV with the header
//! `angle_index,detector_index,value` and a `key=value` metadata sidecar.

use std::collections::BTreeMap;
use std::io::{BufRead, Read, Write};

use crate::dual::GreyLevels;
use crate::error::{Error, Result};
use crate::geometry::{GridSpec, Kernel, ParallelGeometry};
use crate::image::{BinaryImage, Ternary, TernaryImage};
use crate::sinogram::GeometryTag;

/// Images with at most this many pixels are written as ASCII.
pub const ASCII_PGM_MAX_PIXELS: usize = 64 * 64;

/// A decoded grey-scale raster.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pgm {
    pub width: usize,
    pub height: usize,
    pub maxval: u16,
    pub pixels: Vec<u16>,
}

pub fn write_pgm<W: Write>(mut w: W, pgm: &Pgm) -> Result<()> {
    if pgm.pixels.len() != pgm.width * pgm.height {
        return Err(Error::DimensionMismatch { expected: pgm.width * pgm.height, actual: pgm.pixels.len() });
    }
    if pgm.maxval == 0 || pgm.maxval > 255 {
        return Err(Error::InvalidArgument(format!("maxval {} outside 1..=255", pgm.maxval)));
    }
    if pgm.pixels.len() <= ASCII_PGM_MAX_PIXELS {
        writeln!(w, "P2\n{} {}\n{}", pgm.width, pgm.height, pgm.maxval)?;
        for row in pgm.pixels.chunks(pgm.width.max(1)) {
            let line: Vec<String> = row.iter().map(u16::to_string).collect();
            writeln!(w, "{}", line.join(" "))?;
        }
    } else {
        write!(w, "P5\n{} {}\n{}\n", pgm.width, pgm.height, pgm.maxval)?;
        let bytes: Vec<u8> = pgm.pixels.iter().map(|&p| p as u8).collect();
        w.write_all(&bytes)?;
    }
    Ok(())
}

/// Reads `P2` or `P5` with 8-bit samples; `#` comments are allowed in the header.
pub fn read_pgm<R: Read>(mut r: R) -> Result<Pgm> {
    let mut data = Vec::new();
    r.read_to_end(&mut data)?;
    let mut pos = 0;
    let mut token = |data: &[u8]| -> Result<String> {
        loop {
            while pos < data.len() && data[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if pos < data.len() && data[pos] == b'#' {
                while pos < data.len() && data[pos] != b'\n' {
                    pos += 1;
                }
                continue;
            }
            break;
        }
        let start = pos;
        while pos < data.len() && !data[pos].is_ascii_whitespace() {
            pos += 1;
        }
        if start == pos {
            return Err(Error::Parse { line: 0, msg: "unexpected end of PGM data".into() });
        }
        Ok(String::from_utf8_lossy(&data[start..pos]).into_owned())
    };
    let magic = token(&data)?;
    let number = |s: String| s.parse::<usize>().map_err(|_| Error::Parse { line: 0, msg: format!("bad PGM number '{s}'") });
    let width = number(token(&data)?)?;
    let height = number(token(&data)?)?;
    let maxval = number(token(&data)?)?;
    if maxval == 0 || maxval > 255 {
        return Err(Error::Parse { line: 0, msg: format!("unsupported maxval {maxval}") });
    }
    let count = width * height;
    let pixels: Vec<u16> = match magic.as_str() {
        "P2" => (0..count).map(|_| number(token(&data)?).map(|v| v as u16)).collect::<Result<_>>()?,
        "P5" => {
            // exactly one whitespace byte separates the header from the raster
            let start = pos + 1;
            if data.len() < start + count {
                return Err(Error::Parse { line: 0, msg: "truncated P5 raster".into() });
            }
            data[start..start + count].iter().map(|&b| b as u16).collect()
        }
        other => return Err(Error::Parse { line: 1, msg: format!("unsupported PGM magic '{other}'") }),
    };
    if let Some(bad) = pixels.iter().find(|&&p| p as usize > maxval) {
        return Err(Error::Parse { line: 0, msg: format!("sample {bad} exceeds maxval {maxval}") });
    }
    Ok(Pgm { width, height, maxval: maxval as u16, pixels })
}

pub fn binary_to_pgm(img: &BinaryImage) -> Pgm {
    Pgm { width: img.n(), height: img.n(), maxval: 1, pixels: img.flags().iter().map(|&u| u as u16).collect() }
}

/// Interprets 0 as the lower and maxval as the upper level.
pub fn pgm_to_binary(pgm: &Pgm, levels: GreyLevels) -> Result<BinaryImage> {
    if pgm.width != pgm.height {
        return Err(Error::InvalidArgument(format!("image must be square, got {}×{}", pgm.width, pgm.height)));
    }
    let flags = pgm
        .pixels
        .iter()
        .map(|&p| match p {
            0 => Ok(false),
            p if p == pgm.maxval => Ok(true),
            p => Err(Error::InvalidArgument(format!("pixel value {p} is neither 0 nor maxval"))),
        })
        .collect::<Result<Vec<_>>>()?;
    BinaryImage::from_flags(pgm.width, levels, flags)
}

pub fn ternary_to_pgm(img: &TernaryImage) -> Pgm {
    Pgm { width: img.n(), height: img.n(), maxval: 2, pixels: img.pixels().iter().map(|t| t.code() as u16).collect() }
}

pub fn pgm_to_ternary(pgm: &Pgm, levels: GreyLevels) -> Result<TernaryImage> {
    if pgm.maxval != 2 || pgm.width != pgm.height {
        return Err(Error::InvalidArgument("ternary maps are square with maxval 2".into()));
    }
    let pixels = pgm.pixels.iter().map(|&p| Ternary::from_code(p as u8).expect("checked against maxval")).collect();
    TernaryImage::new(pgm.width, levels, pixels)
}

/// Writes values laid out as `views × bins`, view-major.
pub fn write_sinogram_csv<W: Write>(mut w: W, values: &[f64], bins: usize) -> Result<()> {
    if bins == 0 || values.len() % bins != 0 {
        return Err(Error::InvalidArgument(format!("{} values do not split into rows of {bins}", values.len())));
    }
    writeln!(w, "angle_index,detector_index,value")?;
    for (i, v) in values.iter().enumerate() {
        writeln!(w, "{},{},{v}", i / bins, i % bins)?;
    }
    Ok(())
}

/// Reads a sinogram CSV, returning the values and the number of bins per view.
pub fn read_sinogram_csv<R: BufRead>(r: R) -> Result<(Vec<f64>, usize)> {
    let mut values = Vec::new();
    let mut bins = 0;
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if lineno == 0 {
            if line != "angle_index,detector_index,value" {
                return Err(Error::Parse { line: 1, msg: format!("unexpected header '{line}'") });
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        let parse_err = |msg: String| Error::Parse { line: lineno + 1, msg };
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != 3 {
            return Err(parse_err(format!("expected 3 fields, got {}", fields.len())));
        }
        let view: usize = fields[0].parse().map_err(|_| parse_err(format!("bad angle index '{}'", fields[0])))?;
        let bin: usize = fields[1].parse().map_err(|_| parse_err(format!("bad detector index '{}'", fields[1])))?;
        let v: f64 = fields[2].parse().map_err(|_| parse_err(format!("bad value '{}'", fields[2])))?;
        if view == 0 {
            bins = bins.max(bin + 1);
        }
        let expected = values.len();
        if bins == 0 || view * bins + bin != expected || bin >= bins {
            return Err(parse_err(format!("entries must be view-major and complete, found ({view}, {bin})")));
        }
        values.push(v);
    }
    if bins == 0 || values.len() % bins != 0 {
        return Err(Error::Parse { line: 0, msg: "sinogram has an incomplete view".into() });
    }
    Ok((values, bins))
}

pub type Meta = BTreeMap<String, String>;

pub fn write_meta<W: Write>(mut w: W, meta: &Meta) -> Result<()> {
    for (k, v) in meta {
        writeln!(w, "{k}={v}")?;
    }
    Ok(())
}

/// Parses `key=value` lines; blank lines and `#` comments are skipped.
pub fn read_meta<R: BufRead>(r: R) -> Result<Meta> {
    let mut meta = Meta::new();
    for (lineno, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| Error::Parse { line: lineno + 1, msg: format!("expected key=value, got '{line}'") })?;
        meta.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(meta)
}

/// Metadata entries describing a geometry.
pub fn geometry_to_meta(tag: &GeometryTag) -> Meta {
    let mut meta = Meta::new();
    match tag {
        GeometryTag::Lattice { grid, geometry } => {
            meta.insert("geometry".into(), "lattice".into());
            meta.insert("n".into(), grid.n().to_string());
            meta.insert("pixel_size".into(), grid.pixel_size().to_string());
            meta.insert("directions".into(), geometry.to_string());
        }
        GeometryTag::Parallel { grid, geometry } => {
            meta.insert("geometry".into(), "parallel".into());
            meta.insert("n".into(), grid.n().to_string());
            meta.insert("pixel_size".into(), grid.pixel_size().to_string());
            let angles: Vec<String> = geometry.angles().iter().map(f64::to_string).collect();
            meta.insert("angles".into(), angles.join(","));
            meta.insert("detector_count".into(), geometry.detector_count().to_string());
            meta.insert("detector_spacing".into(), geometry.detector_spacing().to_string());
            meta.insert("kernel".into(), geometry.kernel().to_string());
        }
        GeometryTag::External => {
            meta.insert("geometry".into(), "external".into());
        }
    }
    meta
}

fn meta_field<'a>(meta: &'a Meta, key: &str) -> Result<&'a str> {
    meta.get(key).map(String::as_str).ok_or_else(|| Error::Parse { line: 0, msg: format!("metadata lacks '{key}'") })
}

fn meta_number<T: std::str::FromStr>(meta: &Meta, key: &str) -> Result<T> {
    let raw = meta_field(meta, key)?;
    raw.parse().map_err(|_| Error::Parse { line: 0, msg: format!("metadata '{key}' has invalid value '{raw}'") })
}

pub fn geometry_from_meta(meta: &Meta) -> Result<GeometryTag> {
    match meta_field(meta, "geometry")? {
        "external" => Ok(GeometryTag::External),
        kind => {
            let grid = GridSpec::with_pixel_size(meta_number(meta, "n")?, meta_number(meta, "pixel_size")?)?;
            match kind {
                "lattice" => Ok(GeometryTag::Lattice { grid, geometry: meta_field(meta, "directions")?.parse()? }),
                "parallel" => {
                    let angles = meta_field(meta, "angles")?
                        .split(',')
                        .map(|s| s.parse::<f64>().map_err(|_| Error::Parse { line: 0, msg: format!("bad angle '{s}'") }))
                        .collect::<Result<Vec<_>>>()?;
                    let kernel: Kernel = meta_field(meta, "kernel")?.parse()?;
                    let geometry =
                        ParallelGeometry::new(angles, meta_number(meta, "detector_count")?, meta_number(meta, "detector_spacing")?, kernel)?;
                    Ok(GeometryTag::Parallel { grid, geometry })
                }
                other => Err(Error::Parse { line: 0, msg: format!("unknown geometry kind '{other}'") }),
            }
        }
    }
}

/// Number of detector bins per view. Lattice lines differ in count per
/// direction, so lattice data is written as a single view.
pub fn bins_per_view(tag: &GeometryTag, len: usize) -> usize {
    match tag {
        GeometryTag::Parallel { geometry, .. } => geometry.detector_count(),
        _ => len.max(1),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::phantom::{make_phantom, PhantomName};

    #[test]
    fn pgm_round_trips_in_both_encodings() {
        for n in [8, 80] {
            let img = make_phantom(PhantomName::Disk, n).unwrap();
            let mut buf = Vec::new();
            write_pgm(&mut buf, &binary_to_pgm(&img)).unwrap();
            assert_eq!(&buf[..2], if n == 8 { b"P2" } else { b"P5" });
            let back = pgm_to_binary(&read_pgm(&buf[..]).unwrap(), GreyLevels::UNIT).unwrap();
            assert_eq!(back, img);
        }
    }

    #[test]
    fn pgm_comments_and_errors() {
        let text = b"P2\n# comment\n2 2\n1\n0 1\n1 0\n";
        let pgm = read_pgm(&text[..]).unwrap();
        assert_eq!(pgm.pixels, vec![0, 1, 1, 0]);
        assert!(read_pgm(&b"P2\n2 2\n1\n0 1 2 0\n"[..]).is_err());
        assert!(read_pgm(&b"P3\n1 1\n1\n0\n"[..]).is_err());
    }

    #[test]
    fn ternary_map_codes() {
        let t = TernaryImage::new(1, GreyLevels::UNIT, vec![Ternary::Undetermined]).unwrap();
        let pgm = ternary_to_pgm(&t);
        assert_eq!((pgm.maxval, pgm.pixels[0]), (2, 1));
        assert_eq!(pgm_to_ternary(&pgm, GreyLevels::UNIT).unwrap(), t);
    }

    #[test]
    fn sinogram_csv_round_trip() {
        let values = vec![0.5, 1.0, -2.25, 3.0, 1e-17, 7.0];
        let mut buf = Vec::new();
        write_sinogram_csv(&mut buf, &values, 3).unwrap();
        let (back, bins) = read_sinogram_csv(&buf[..]).unwrap();
        assert_eq!((back, bins), (values, 3));
        assert!(read_sinogram_csv(&b"angle_index,detector_index,value\n0,1,2.0\n"[..]).is_err());
    }

    #[test]
    fn geometry_meta_round_trip() {
        let grid = GridSpec::new(16).unwrap();
        let angles = ParallelGeometry::equispaced_angles(7, std::f64::consts::FRAC_PI_2);
        let tag = GeometryTag::Parallel { grid, geometry: ParallelGeometry::new(angles, 16, 1.0, Kernel::Strip).unwrap() };
        let mut buf = Vec::new();
        write_meta(&mut buf, &geometry_to_meta(&tag)).unwrap();
        assert_eq!(geometry_from_meta(&read_meta(&buf[..]).unwrap()).unwrap(), tag);
        let lattice = GeometryTag::Lattice { grid, geometry: "hvd".parse().unwrap() };
        assert_eq!(geometry_from_meta(&geometry_to_meta(&lattice)).unwrap(), lattice);
    }
}
