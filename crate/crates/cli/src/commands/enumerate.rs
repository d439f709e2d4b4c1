use std::io::Write;

use bintomo::enumerate::{count_summary, enumerate_all, verify_dual_conjecture, write_summary_csv, Selection};
use bintomo::SolverConfig;

use crate::args::{EnumerateArgs, EnumerateMode};
use crate::failure::Failure;
use crate::files::create;

pub fn run(args: &EnumerateArgs) -> Result<(), Failure> {
    let n = args.n as usize;
    let summary = match args.mode {
        EnumerateMode::Counts => count_summary(n, &args.dirs, &enumerate_all(n, &args.dirs)?),
        EnumerateMode::Verify => {
            let selection = match args.sample {
                Some(count) => Selection::Sample { count, seed: args.seed, all_multiple: true },
                None => Selection::All,
            };
            verify_dual_conjecture(n, &args.dirs, &SolverConfig::default(), selection)?.summary
        }
    };
    match &args.out {
        Some(path) => {
            let mut w = create(path)?;
            write_summary_csv(&mut w, std::slice::from_ref(&summary))?;
            w.flush()?;
            println!(
                "n={} dirs={}: total {} unique {} multiple {}",
                summary.n, summary.directions, summary.total, summary.unique_count, summary.multiple_count
            );
            if args.mode == EnumerateMode::Verify {
                println!(
                    "dual correct: unique {}/{} multiple {}/{} failures {}",
                    summary.dual_correct_unique,
                    summary.checked_unique,
                    summary.dual_correct_multiple,
                    summary.checked_multiple,
                    summary.dual_failures
                );
            }
        }
        None => {
            let stdout = std::io::stdout();
            let mut lock = stdout.lock();
            write_summary_csv(&mut lock, std::slice::from_ref(&summary))?;
            lock.flush()?;
        }
    }
    Ok(())
}
