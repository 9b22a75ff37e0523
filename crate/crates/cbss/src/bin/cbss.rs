use clap::Parser;
use std::process::ExitCode;

fn main() -> ExitCode {
    let cli = cbss::cli::Cli::parse();
    ExitCode::from(cbss::cli::run(cli))
}
