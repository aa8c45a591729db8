use clap::Parser;
use gaussmap::cli::{run, Cli};

fn main() {
    std::process::exit(run(&Cli::parse()));
}
