use std::collections::HashMap;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use bintomo::io::{read_meta, read_pgm, read_sinogram_csv};

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bintomo")).args(args).current_dir(dir).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn code(dir: &Path, args: &[&str]) -> i32 {
    run(dir, args).status.code().unwrap()
}

fn ji(stdout: &str) -> f64 {
    stdout.split_whitespace().find_map(|w| w.strip_prefix("ji=")).unwrap().parse().unwrap()
}

fn report(path: &Path) -> bintomo::io::Meta {
    read_meta(std::io::BufReader::new(fs::File::open(path).unwrap())).unwrap()
}

fn csv(path: &Path) -> Vec<HashMap<String, String>> {
    let text = fs::read_to_string(path).unwrap();
    let mut lines = text.lines();
    let header: Vec<&str> = lines.next().unwrap().split(',').collect();
    lines.map(|l| header.iter().map(|h| h.to_string()).zip(l.split(',').map(str::to_string)).collect()).collect()
}

#[test]
fn phantom_is_a_binary_pgm_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["phantom", "--name", "p1", "--n", "32", "--out", "a.pgm"]);
    ok(dir.path(), &["phantom", "--name", "p1", "--n", "32", "--out", "b.pgm"]);
    let pgm = read_pgm(fs::File::open(dir.path().join("a.pgm")).unwrap()).unwrap();
    assert_eq!((pgm.width, pgm.height, pgm.maxval), (32, 32, 1));
    assert!(pgm.pixels.iter().all(|&p| p <= 1) && pgm.pixels.contains(&1));
    assert_eq!(fs::read(dir.path().join("a.pgm")).unwrap(), fs::read(dir.path().join("b.pgm")).unwrap());
    assert_eq!(code(dir.path(), &["phantom", "--name", "bogus", "--out", "c.pgm"]), 2);
}

#[test]
fn project_shapes_and_noise_seeds() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["phantom", "--name", "p2", "--n", "32", "--out", "p.pgm"]);
    let base = ["project", "--image", "p.pgm", "--angles", "10", "--theta-max", "pi/2"];
    ok(d, &[&base[..], &["--out", "s.csv"]].concat());
    ok(d, &[&base[..], &["--out", "j.csv", "--kernel", "joseph"]].concat());
    ok(d, &[&base[..], &["--out", "n1.csv", "--snr", "50"]].concat());
    ok(d, &[&base[..], &["--out", "n2.csv", "--snr", "50"]].concat());
    let read = |name: &str| read_sinogram_csv(std::io::BufReader::new(fs::File::open(d.join(name)).unwrap())).unwrap();
    let (strip, bins) = read("s.csv");
    assert_eq!((strip.len() / bins, bins), (10, 32));
    let (joseph, jbins) = read("j.csv");
    assert_eq!((joseph.len(), jbins), (strip.len(), bins));
    assert_ne!(strip, joseph);
    assert_eq!(fs::read(d.join("n1.csv")).unwrap(), fs::read(d.join("n2.csv")).unwrap());
    assert_ne!(read("n1.csv").0, strip);
    let meta = report(&d.join("n1.csv.meta"));
    assert_eq!(meta["noise"], "gaussian");
    assert_eq!(code(d, &[&base[..], &["--out", "x.csv", "--snr", "50", "--i0", "1e4"]].concat()), 2);
    assert_eq!(code(d, &["project", "--image", "missing.pgm", "--out", "x.csv"]), 3);
}

#[test]
fn reconstruct_methods_on_a_disk() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["phantom", "--name", "disk", "--n", "32", "--out", "disk.pgm"]);
    ok(d, &["project", "--image", "disk.pgm", "--out", "y.csv", "--angles", "10", "--theta-max", "pi/2"]);
    let recon = |method: &str| {
        let out = format!("{method}.pgm");
        ji(&ok(d, &["reconstruct", "--sinogram", "y.csv", "--method", method, "--out", &out, "--truth", "disk.pgm"]))
    };
    let (dp, lsqr, tv) = (recon("dp"), recon("lsqr"), recon("tv"));
    assert!(dp >= 0.99, "dp {dp}");
    assert!(lsqr <= dp, "lsqr {lsqr} dp {dp}");
    assert!(tv <= 1.0);
    let dp_report = report(&d.join("dp.report"));
    assert_eq!(dp_report["method"], "dp");
    assert!(dp_report.contains_key("undetermined"));
    assert!(d.join("dp.ternary.pgm").exists());
    let tv_report = report(&d.join("tv.report"));
    assert!(tv_report["lambda"].parse::<f64>().unwrap() > 0.0);
    let metrics = csv(&d.join("dp.metrics.csv"));
    assert_eq!(metrics.len(), 1);
    assert_eq!(metrics[0]["method"], "dp");
}

#[test]
fn many_views_recover_the_phantom_exactly() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["phantom", "--name", "p3", "--n", "32", "--out", "p.pgm"]);
    ok(d, &["project", "--image", "p.pgm", "--out", "y.csv", "--angles", "45", "--kernel", "joseph"]);
    let out = ok(d, &["reconstruct", "--sinogram", "y.csv", "--method", "dp", "--out", "r.pgm", "--truth", "p.pgm"]);
    assert_eq!(ji(&out), 1.0);
}

#[test]
fn enumerate_counts_and_verification() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let row = |text: &str| text.lines().nth(1).unwrap().split(',').map(str::to_string).collect::<Vec<_>>();
    let counts = row(&ok(d, &["enumerate", "--n", "2", "--dirs", "hv"]));
    assert_eq!(&counts[3..6], ["16", "14", "2"]);
    ok(d, &["enumerate", "--n", "3", "--dirs", "hvd", "--mode", "verify", "--out", "v.csv"]);
    let verify = row(&fs::read_to_string(d.join("v.csv")).unwrap());
    assert_eq!(&verify[6..8], ["496/496", "16/16"]);
    let four = row(&ok(d, &["enumerate", "--n", "3", "--dirs", "hvda", "--mode", "verify"]));
    assert_eq!(four[6], "512/512");
    assert_eq!(code(d, &["enumerate", "--n", "5"]), 2);
}

#[test]
fn bench_sparse_writes_every_cell() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["bench", "--suite", "sparse", "--n", "16", "--phantoms", "p1,p4", "--out-dir", "out"]);
    let rows = csv(&d.join("out/sparse.csv"));
    assert_eq!(rows.len(), 4 * 2 * 3);
    assert!(rows.iter().all(|r| r["status"] == "ok"), "{rows:?}");
}

#[test]
fn bench_limited_angle_keeps_the_method_order() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["bench", "--suite", "limited-angle", "--n", "24", "--out-dir", "out"]);
    let rows = csv(&d.join("out/limited-angle.csv"));
    let ji = |test: &str, phantom: &str, method: &str| -> f64 {
        rows.iter().find(|r| r["test"] == test && r["phantom"] == phantom && r["method"] == method).unwrap()["ji"].parse().unwrap()
    };
    let mut cells = Vec::new();
    for r in rows.iter().filter(|r| r["method"] == "dp") {
        let (t, p) = (r["test"].as_str(), r["phantom"].as_str());
        cells.push(ji(t, p, "dp") >= ji(t, p, "tv") && ji(t, p, "tv") >= ji(t, p, "lsqr"));
    }
    let ordered = cells.iter().filter(|&&c| c).count();
    assert!(ordered * 5 >= cells.len() * 4, "{ordered}/{}", cells.len());
}

#[test]
fn bench_noise_degrades_gracefully() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(d, &["bench", "--suite", "noise", "--n", "24", "--methods", "dp", "--out-dir", "out"]);
    let rows = csv(&d.join("out/noise.csv"));
    for phantom in ["P1", "P2", "P3", "P4"] {
        let series: Vec<f64> = rows.iter().filter(|r| r["phantom"] == phantom).map(|r| r["ji"].parse().unwrap()).collect();
        assert_eq!(series.len(), 4);
        for w in series.windows(2) {
            assert!(w[1] <= w[0] + 0.02, "{phantom}: {series:?}");
        }
    }
}

#[test]
fn config_file_supplies_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    fs::write(d.join("run.cfg"), "name = p4\nn = 16\n").unwrap();
    ok(d, &["phantom", "--config", "run.cfg", "--out", "a.pgm"]);
    ok(d, &["phantom", "--config", "run.cfg", "--n", "8", "--out", "b.pgm"]);
    let size = |f: &str| read_pgm(fs::File::open(d.join(f)).unwrap()).unwrap().width;
    assert_eq!((size("a.pgm"), size("b.pgm")), (16, 8));
    fs::write(d.join("bad.cfg"), "colour = red\n").unwrap();
    assert_eq!(code(d, &["phantom", "--config", "bad.cfg", "--name", "p1", "--out", "c.pgm"]), 2);
    assert_eq!(code(d, &["phantom", "--config", "absent.cfg", "--name", "p1", "--out", "c.pgm"]), 3);
}
