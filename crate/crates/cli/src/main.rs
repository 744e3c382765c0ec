// SPDX-License-Identifier: MIT OR Apache-2.0

use std::io::{self, Write};
use std::process::ExitCode;

use clap::Parser;
use optblocks_cli::commands;
use optblocks_cli::config::{Cli, RunConfig};

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();

    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = RunConfig::from_cli(cli).and_then(|config| {
        let stdout = io::stdout();
        let mut out = stdout.lock();
        commands::run(&config, &mut out)?;
        out.flush()?;
        Ok(())
    });
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("optblocks: {e}");
            e.exit_code()
        }
    }
}
