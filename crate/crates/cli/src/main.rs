mod args;
mod commands;
mod io;

use std::process::ExitCode;

use clap::Parser;
use specbox::exec::{configure_threads, Exec};
use specbox::inclusion::InclusionError;
use specbox::oracle::OracleError;

use args::{Cli, Command};
use io::Coded;

/// 2: bad flags, 3: unreadable input files, 4: enumeration cap, 1: anything else.
fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if let Some(c) = cause.downcast_ref::<Coded>() {
            return c.code;
        }
        if matches!(
            cause.downcast_ref::<InclusionError>(),
            Some(InclusionError::TooMany { .. })
        ) || matches!(cause.downcast_ref::<OracleError>(), Some(OracleError::TooMany { .. }))
        {
            return 4;
        }
    }
    1
}

fn run(cli: &Cli) -> anyhow::Result<()> {
    if let Some(threads) = cli.threads {
        if threads == 0 {
            return Err(io::usage("thread count must be at least 1"));
        }
        configure_threads(threads);
    }
    let exec = if cli.sequential {
        Exec::Sequential
    } else {
        Exec::default()
    };
    match &cli.command {
        Command::Penalty(a) => commands::penalty(a),
        Command::Inclusion(a) => commands::inclusion(a, exec),
        Command::SpectrumApprox(a) => commands::spectrum_approx(a, exec),
        Command::Oracle(a) => commands::oracle(a, exec),
        Command::Hausdorff(a) => commands::hausdorff_cmd(a, exec),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(exit_code(&err))
        }
    }
}
