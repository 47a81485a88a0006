//! `manet-pki`: drive the threshold certificate authority from the shell.
//!
//! Five subcommands: `demo` replays the built-in worked example and checks
//! every published value, `run` executes a scenario file and emits its
//! transcript, `verify-cert` and `verify-transcript` re-check emitted
//! artifacts from scratch, and `params` produces curve parameter files.
//!
//! Machine-readable output goes to stdout, diagnostics to stderr. Exit
//! codes: 0 on success, 1 when a verification or protocol check fails,
//! 2 for usage and configuration errors.

mod assets;
mod demo;
mod params;
mod run;
mod verify;

use std::process::ExitCode;

use clap::{Parser, Subcommand};

#[derive(Parser)]
#[command(name = "manet-pki", version, about = "Threshold certificates for ad-hoc networks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Replay the built-in worked example and compare every quantity
    /// against its published value.
    Demo(demo::DemoArgs),
    /// Run a scenario file and write the resulting transcript.
    Run(run::RunArgs),
    /// Check one certificate file against a group public key.
    VerifyCert(verify::CertArgs),
    /// Re-derive and re-check every claim a transcript makes.
    VerifyTranscript(verify::TranscriptArgs),
    /// Validate curve parameters (searching for missing pieces) and emit
    /// a parameter file.
    Params(params::ParamsArgs),
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .format_timestamp(None)
        .init();
    let outcome = match Cli::parse().command {
        Command::Demo(args) => demo::run(args),
        Command::Run(args) => run::run(args),
        Command::VerifyCert(args) => verify::cert(args),
        Command::VerifyTranscript(args) => verify::transcript(args),
        Command::Params(args) => params::run(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
