use clap::Parser;

use graver_prox::cli::{run, CliConfig};

fn main() {
    let config = CliConfig::parse();
    let code = run(&config, &mut std::io::stdout(), &mut std::io::stderr());
    std::process::exit(code);
}
