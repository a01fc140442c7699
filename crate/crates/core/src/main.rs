use clap::Parser;

fn main() {
    std::process::exit(hcmh::cli::main_with(hcmh::cli::Cli::parse()));
}
