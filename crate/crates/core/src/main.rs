use std::io::Write;
use std::process::ExitCode;

fn main() -> ExitCode {
    let outcome = cptensor::cli::run_command(std::env::args());
    print!("{}", outcome.stdout);
    eprint!("{}", outcome.stderr);
    let _ = std::io::stdout().flush();
    ExitCode::from(u8::try_from(outcome.status).unwrap_or(2))
}
