use std::process::ExitCode;

fn main() -> ExitCode {
    clifford_forge::cli::run(std::env::args_os())
}
