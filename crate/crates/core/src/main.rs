use std::process::ExitCode;

fn main() -> ExitCode {
    prunekit::cli::main()
}
