use clap::Parser;

fn main() {
    let cli = canvar_cli::Cli::parse();
    std::process::exit(canvar_cli::run(&cli));
}
