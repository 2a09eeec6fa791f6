use clap::Parser;

fn main() {
    let args = stabwall::cli::Args::parse();
    std::process::exit(stabwall::cli::main_with(args));
}
