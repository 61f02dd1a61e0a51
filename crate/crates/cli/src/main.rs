mod commands;
mod config;

use std::process::ExitCode;

use clap::Parser;

use commands::Status;
use config::RunConfig;
use transim::Error;

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::InvalidArgument(_) | Error::Serde(_) | Error::UndefinedLogarithm { .. } => 2,
        Error::ResourceLimit { .. } | Error::BudgetExceeded { .. } | Error::ArityOverflow { .. } => 3,
        Error::PlanFailure { .. } | Error::Io(_) => 1,
    }
}

fn main() -> ExitCode {
    let cfg = match RunConfig::parse().resolve() {
        Ok(cfg) => cfg,
        Err(e) => {
            eprintln!("transim: {e}");
            return ExitCode::from(exit_code(&e));
        }
    };
    if let Some(threads) = cfg.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("transim: cannot start {threads} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cfg) {
        Ok(Status::Done) => ExitCode::SUCCESS,
        Ok(Status::Failed(n)) => {
            eprintln!("transim: {n} of {} cases failed", cfg.trials);
            ExitCode::from(4)
        }
        Err(e) => {
            eprintln!("transim: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
