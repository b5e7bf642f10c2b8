use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(polyiter::cli::run(std::env::args_os()))
}
