use clap::Parser;

fn main() {
    let cli = rys_cli::args::Cli::parse();
    std::process::exit(rys_cli::run(cli));
}
