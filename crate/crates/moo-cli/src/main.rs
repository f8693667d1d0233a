use clap::Parser;

fn main() {
    let cli = moo_cli::Cli::parse();
    if let Err(failure) = moo_cli::run(cli) {
        eprintln!("error: {failure}");
        std::process::exit(failure.exit_code());
    }
}
