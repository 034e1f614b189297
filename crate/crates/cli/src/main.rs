use std::process::ExitCode;

fn main() -> ExitCode {
    qfl_runner::main_with_args(std::env::args_os())
}
