use std::process::ExitCode;

fn main() -> ExitCode {
    ExitCode::from(aclens::cli::run(std::env::args_os()))
}
