use std::process::ExitCode;

fn main() -> ExitCode {
    graph_ph::cli::main_entry()
}
