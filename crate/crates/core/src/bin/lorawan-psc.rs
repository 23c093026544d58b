use clap::Parser;

fn main() {
    let cli = lorawan_psc::cli::Cli::parse();
    std::process::exit(lorawan_psc::cli::execute(cli));
}
