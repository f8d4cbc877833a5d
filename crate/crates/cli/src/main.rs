use std::process::ExitCode;

use clap::Parser;
use diachron_cli::Cli;

fn main() -> ExitCode {
    diachron_cli::run(Cli::parse())
}
