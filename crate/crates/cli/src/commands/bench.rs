use std::io::Write;

use anyhow::Context;

use crate::args::BenchArgs;
use crate::failure::Failure;
use crate::files::create;
use crate::suite::{run_suite, write_rows, DeskSetup};

pub fn run(args: &BenchArgs) -> Result<(), Failure> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(args.threads.unwrap_or(0))
        .build()
        .context("cannot start worker pool")?;
    let setup = DeskSetup { n: args.n, ..Default::default() };
    for suite in args.suite.suites() {
        let rows = pool.install(|| run_suite(suite, &setup, &args.phantoms, &args.methods, args.seed));
        let path = args.out_dir.join(format!("{}.csv", suite.name()));
        let mut w = create(&path)?;
        write_rows(&mut w, &rows)?;
        w.flush()?;
        let failed = rows.iter().filter(|r| r.outcome.is_err()).count();
        let unconverged = rows.iter().filter(|r| matches!(&r.outcome, Ok(c) if !c.converged)).count();
        println!("{}: {} rows ({failed} failed, {unconverged} not converged) -> {}", suite.name(), rows.len(), path.display());
    }
    Ok(())
}
