use std::io::Write;

use bintomo::geometry::GridSpec;
use bintomo::io::{bins_per_view, geometry_to_meta, pgm_to_binary, write_sinogram_csv};
use bintomo::noise::{add_gaussian_noise, simulate_poisson};
use bintomo::sinogram::GeometryTag;
use bintomo::ParallelGeometry;

use crate::args::{GeometryKind, ProjectArgs};
use crate::failure::Failure;
use crate::files::{create, load_pgm, require_file, save_meta, sidecar};

pub fn run(args: &ProjectArgs) -> Result<(), Failure> {
    require_file(&args.image)?;
    let img = pgm_to_binary(&load_pgm(&args.image)?, args.levels)?;
    let n = img.n();
    let grid = GridSpec::new(n)?;
    let tag = match args.geometry {
        GeometryKind::Parallel => {
            let angles = ParallelGeometry::equispaced_angles(args.angles, args.theta_max);
            let geometry = ParallelGeometry::new(angles, args.detectors.unwrap_or(n), args.spacing, args.kernel)?;
            GeometryTag::Parallel { grid, geometry }
        }
        GeometryKind::Lattice => GeometryTag::Lattice { grid, geometry: args.dirs.clone() },
    };
    let clean = tag.operator()?.apply_forward(&img.values())?;

    let mut meta = geometry_to_meta(&tag);
    meta.insert("levels".into(), format!("{},{}", args.levels.u0, args.levels.u1));
    meta.insert("seed".into(), args.seed.to_string());
    let values = match (args.snr, args.i0) {
        (Some(snr), _) => {
            let noisy = add_gaussian_noise(&clean, snr, args.seed)?;
            meta.insert("noise".into(), "gaussian".into());
            meta.insert("snr_db".into(), snr.to_string());
            meta.insert("noise_norm".into(), noisy.noise_norm.to_string());
            noisy.values
        }
        (None, Some(i0)) => {
            let data = simulate_poisson(&clean, i0, args.seed)?;
            meta.insert("noise".into(), "poisson".into());
            meta.insert("i0".into(), i0.to_string());
            meta.insert("poisson_scale".into(), data.scale.to_string());
            meta.insert("noise_norm".into(), data.noise_norm.to_string());
            data.values
        }
        (None, None) => {
            meta.insert("noise".into(), "none".into());
            meta.insert("noise_norm".into(), "0".into());
            clean
        }
    };

    let bins = bins_per_view(&tag, values.len());
    let mut w = create(&args.out)?;
    write_sinogram_csv(&mut w, &values, bins)?;
    w.flush()?;
    let meta_path = sidecar(&args.out, ".meta");
    save_meta(&meta_path, &meta)?;
    println!("{} views × {bins} bins -> {} (+ {})", values.len() / bins, args.out.display(), meta_path.display());
    Ok(())
}
