use clap::Parser;
use hyperlab::{Cli, Command};

fn main() {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Check(args) => hyperlab::run(args),
    };
    std::process::exit(code);
}
