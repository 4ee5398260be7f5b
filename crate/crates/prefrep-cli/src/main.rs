use clap::Parser;

fn main() {
    let cli = prefrep_cli::Cli::parse();
    let code = prefrep_cli::run(cli, &mut std::io::stdout());
    std::process::exit(code);
}
