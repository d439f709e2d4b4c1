use std::process::ExitCode;

fn main() -> ExitCode {
    match bintomo_cli::run(std::env::args().collect()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(failure) => {
            eprintln!("{failure}");
            ExitCode::from(failure.exit_code())
        }
    }
}
