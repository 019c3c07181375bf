use clap::Parser;

fn main() {
    let cli = ctmc_harness::cli::Cli::parse();
    std::process::exit(ctmc_harness::cli::execute(cli));
}
