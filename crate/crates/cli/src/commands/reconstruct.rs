use std::fs::OpenOptions;
use std::io::{BufWriter, Write};
use std::path::Path;

use anyhow::{anyhow, Context};
use bintomo::baselines::TvConfig;
use bintomo::dual::poisson_weights_with_scale;
use bintomo::io::{binary_to_pgm, geometry_from_meta, pgm_to_binary, ternary_to_pgm, Meta};
use bintomo::lsqr::LsqrOptions;
use bintomo::metrics::evaluate;
use bintomo::sinogram::GeometryTag;
use bintomo::{GreyLevels, Sinogram, SolverConfig};

use crate::args::{parse_levels, ReconstructArgs};
use crate::failure::Failure;
use crate::files::{create, load_meta, load_pgm, load_sinogram, require_file, save_meta, save_pgm, sibling, sidecar};
use crate::pipeline::{reconstruct, report, ReconOptions};
use crate::suite::{write_row, CellOutcome, Row, CSV_HEADER};

fn meta_f64(meta: &Meta, key: &str) -> anyhow::Result<Option<f64>> {
    meta.get(key)
        .map(|v| v.parse::<f64>().map_err(|_| anyhow!("metadata '{key}' has invalid value '{v}'")))
        .transpose()
}

fn stem(path: &Path) -> String {
    path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default()
}

fn options(args: &ReconstructArgs, noise_level: f64) -> Result<ReconOptions, Failure> {
    let solver = SolverConfig {
        max_iters: args.max_iters.unwrap_or(SolverConfig::default().max_iters),
        tol_kkt: args.tol,
        smoothing_epsilon: args.epsilon,
        zero_threshold: args.zero_threshold,
        central_rho: args.central_rho,
        ..Default::default()
    };
    solver.validate().map_err(|e| Failure::Usage(format!("error: {e}")))?;
    if !(args.tv_tol > 0.0) || matches!(args.lambda, Some(l) if !(l >= 0.0)) || !(noise_level >= 0.0) {
        return Err(Failure::Usage("error: TV tolerance, lambda and noise level must be nonnegative".into()));
    }
    Ok(ReconOptions {
        solver,
        completion: args.completion,
        lsqr: LsqrOptions { max_iters: args.max_iters.unwrap_or(LsqrOptions::default().max_iters), ..Default::default() },
        tv: TvConfig { tol_gap: args.tv_tol, max_iters: args.max_iters.unwrap_or(TvConfig::default().max_iters), ..Default::default() },
        lambda: args.lambda,
        noise_level,
    })
}

pub fn run(args: &ReconstructArgs) -> Result<(), Failure> {
    require_file(&args.sinogram)?;
    let meta_path = args.meta.clone().unwrap_or_else(|| sidecar(&args.sinogram, ".meta"));
    require_file(&meta_path)?;
    if let Some(truth) = &args.truth {
        require_file(truth)?;
    }
    let meta = load_meta(&meta_path)?;
    let tag = match geometry_from_meta(&meta)? {
        GeometryTag::Parallel { grid, geometry } => GeometryTag::Parallel { grid, geometry: geometry.with_kernel(args.kernel) },
        other => other,
    };
    let (values, _) = load_sinogram(&args.sinogram)?;
    let sino = Sinogram::new(values, tag).context("sinogram does not match its geometry")?;
    let levels = match (args.levels, meta.get("levels")) {
        (Some(l), _) => l,
        (None, Some(raw)) => parse_levels(raw).map_err(|e| anyhow!("metadata 'levels': {e}"))?,
        (None, None) => GreyLevels::UNIT,
    };

    let weights = match (args.unweighted, meta.get("noise").map(String::as_str)) {
        (false, Some("poisson")) => {
            let i0 = meta_f64(&meta, "i0")?.ok_or_else(|| anyhow!("poisson metadata lacks 'i0'"))?;
            let scale = meta_f64(&meta, "poisson_scale")?.ok_or_else(|| anyhow!("poisson metadata lacks 'poisson_scale'"))?;
            Some(poisson_weights_with_scale(sino.values(), i0, scale)?)
        }
        _ => None,
    };
    let noise_level = match args.noise_level {
        Some(v) => v,
        None => meta_f64(&meta, "noise_norm")?.unwrap_or(0.0),
    };
    let opts = options(args, noise_level)?;

    let a = sino.geometry().operator()?;
    let rec = reconstruct(&a, sino.values(), weights.as_deref(), levels, args.method, &opts)?;

    save_pgm(&args.out, &binary_to_pgm(&rec.image))?;
    if let Some(t) = &rec.ternary {
        let path = args.ternary_out.clone().unwrap_or_else(|| sibling(&args.out, "ternary.pgm"));
        save_pgm(&path, &ternary_to_pgm(t))?;
    }
    let mut summary = report(args.method, &rec);
    summary.insert("completion".into(), args.completion.to_string());
    save_meta(&sibling(&args.out, "report"), &summary)?;
    let line: Vec<String> = summary.iter().map(|(k, v)| format!("{k}={v}")).collect();
    println!("{}", line.join(" "));

    if let Some(truth_path) = &args.truth {
        let truth = pgm_to_binary(&load_pgm(truth_path)?, levels)?;
        let m = evaluate(&a, &rec.image, &truth, sino.values()).context("ground truth does not match the reconstruction")?;
        let row = Row {
            test: args.label.clone().unwrap_or_else(|| stem(&args.sinogram)),
            phantom: stem(truth_path),
            method: args.method,
            outcome: Ok(CellOutcome { rms: m.rms, ji: m.ji, converged: rec.converged, lambda: rec.lambda }),
        };
        let path = args.metrics.clone().unwrap_or_else(|| sibling(&args.out, "metrics.csv"));
        let fresh = !args.append || std::fs::metadata(&path).map(|m| m.len() == 0).unwrap_or(true);
        let mut w = if fresh {
            let mut w = create(&path)?;
            writeln!(w, "{CSV_HEADER}")?;
            w
        } else {
            let f = OpenOptions::new().append(true).open(&path).with_context(|| format!("cannot append to {}", path.display()))?;
            BufWriter::new(f)
        };
        write_row(&mut w, &row)?;
        w.flush()?;
        println!("rms={} ji={}", m.rms, m.ji);
    }

    if !rec.converged {
        let msg = format!("{} stopped after {} iterations without reaching its tolerance", args.method, rec.iterations);
        if args.strict {
            return Err(Failure::NotConverged(msg));
        }
        eprintln!("warning: {msg}");
    }
    Ok(())
}
