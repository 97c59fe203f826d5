//! `actmatch`: encode, match, evaluate and sweep unsupervised action matching.
//!
//! Exit status: 0 success, 1 usage error, 2 data error, 3 solver did not converge.

mod args;
mod cache;
mod config;
mod dataset;
mod encode;
mod evaluate;
mod matching;
mod output;
mod sweep;
mod synth;

use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;

use args::{Cli, Command};
use config::UsageError;

const EXIT_USAGE: u8 = 1;
const EXIT_DATA: u8 = 2;
const EXIT_NON_CONVERGENCE: u8 = 3;

fn exit_code(err: &anyhow::Error) -> u8 {
    for cause in err.chain() {
        if cause.is::<UsageError>() {
            return EXIT_USAGE;
        }
        if let Some(e) = cause.downcast_ref::<actmatch_core::Error>() {
            return match e {
                e if e.is_non_convergence() => EXIT_NON_CONVERGENCE,
                actmatch_core::Error::Config(_) => EXIT_USAGE,
                _ => EXIT_DATA,
            };
        }
    }
    EXIT_DATA
}

/// The error chain joined by `: `, skipping causes already spelled out by
/// the message before them.
fn describe(err: &anyhow::Error) -> String {
    let mut msg = String::new();
    for cause in err.chain() {
        let text = cause.to_string();
        if msg.is_empty() {
            msg = text;
        } else if !msg.ends_with(&text) {
            msg = format!("{msg}: {text}");
        }
    }
    msg
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => ExitCode::SUCCESS,
                _ => ExitCode::from(EXIT_USAGE),
            };
        }
    };
    let result = match cli.command {
        Command::Encode(c) => encode::run(c),
        Command::Match(c) => matching::run(c),
        Command::Eval(c) => evaluate::run(c),
        Command::Synth(c) => synth::run(c),
        Command::Sweep(c) => sweep::run(c),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", describe(&e));
            ExitCode::from(exit_code(&e))
        }
    }
}
