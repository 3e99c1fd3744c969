use std::process::ExitCode;

fn main() -> ExitCode {
    giantgyro::main_with_args(std::env::args_os())
}
