//! File helpers shared by the subcommands.

use std::ffi::OsString;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use bintomo::io::{read_meta, read_pgm, read_sinogram_csv, write_meta, write_pgm, Meta, Pgm};

/// `path` with `suffix` appended to the file name: `a.csv` → `a.csv.meta`.
pub fn sidecar(path: &Path, suffix: &str) -> PathBuf {
    let mut s = OsString::from(path.as_os_str());
    s.push(suffix);
    PathBuf::from(s)
}

/// `path` with its extension replaced: `r.pgm` → `r.ternary.pgm`.
pub fn sibling(path: &Path, extension: &str) -> PathBuf {
    path.with_extension(extension)
}

pub fn require_file(path: &Path) -> Result<()> {
    if path.is_file() {
        Ok(())
    } else {
        anyhow::bail!("input file {} does not exist", path.display())
    }
}

pub fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    }
    let f = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(f))
}

pub fn load_pgm(path: &Path) -> Result<Pgm> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_pgm(BufReader::new(f)).with_context(|| format!("cannot read {}", path.display()))
}

pub fn save_pgm(path: &Path, pgm: &Pgm) -> Result<()> {
    let mut w = create(path)?;
    write_pgm(&mut w, pgm)?;
    w.flush()?;
    Ok(())
}

pub fn load_meta(path: &Path) -> Result<Meta> {
    let f = File::open(path).with_context(|| format!("cannot open metadata {}", path.display()))?;
    read_meta(BufReader::new(f)).with_context(|| format!("cannot read metadata {}", path.display()))
}

pub fn save_meta(path: &Path, meta: &Meta) -> Result<()> {
    let mut w = create(path)?;
    write_meta(&mut w, meta)?;
    w.flush()?;
    Ok(())
}

pub fn load_sinogram(path: &Path) -> Result<(Vec<f64>, usize)> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    read_sinogram_csv(BufReader::new(f)).with_context(|| format!("cannot read {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derived_paths() {
        assert_eq!(sidecar(Path::new("out/a.csv"), ".meta"), PathBuf::from("out/a.csv.meta"));
        assert_eq!(sibling(Path::new("out/r.pgm"), "ternary.pgm"), PathBuf::from("out/r.ternary.pgm"));
    }
}
