use std::process::ExitCode;

fn main() -> ExitCode {
    motr::cli::main_entry()
}
