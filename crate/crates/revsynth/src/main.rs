use clap::Parser;
use revsynth::cli::{run, Cli};

fn main() {
    std::process::exit(run(Cli::parse()));
}
