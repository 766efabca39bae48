mod args;
mod commands;
mod report;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command, Counterexample};
use report::Status;

fn workers(c: &Command) -> usize {
    match c {
        Command::Audit(a) | Command::Holes(a) => a.output.workers,
        Command::SimplexExact(a) => a.output.workers,
        Command::Lemma2(a) => a.output.workers,
        Command::Boundary(a) => a.output.workers,
        Command::Hausdorff(a) => a.output.workers,
        Command::Counterexample(Counterexample::Gap(a)) => a.output.workers,
        Command::Counterexample(Counterexample::MeasureCube(a)) => a.output.workers,
        Command::Counterexample(Counterexample::MeasureEllipse(a)) => a.output.workers,
        Command::Sweep(a) => a.output.workers,
        Command::Check(_) => 0,
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(Status::Usage as u8),
            };
        }
    };
    let n = workers(&cli.command);
    match minklab::par::with_workers(n, || commands::run(cli.command)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("minklab: {f}");
            ExitCode::from(f.status as u8)
        }
    }
}
