mod args;
mod bench;
mod commands;
mod output;

use std::process::ExitCode;

use clap::Parser;

use args::{Cli, Command};

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    let res = match &cli.command {
        Command::Scan(a) => commands::scan(a),
        Command::Longest(a) => commands::longest(a),
        Command::ApproxLongest(a) => commands::approx_longest(a),
        Command::Oracle(a) => commands::oracle(a),
        Command::Gen(a) => commands::gen_cmd(a),
        Command::Bench(a) => bench::bench(a),
    };
    match res {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("palstream: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
