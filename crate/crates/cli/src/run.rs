//! The `run` subcommand: execute a scenario script and emit its transcript.
//!
//! With no `--scenario` the embedded worked example runs. Scripted protocol
//! failures (a join without enough responders, a send to a departed node)
//! land in the transcript as `error` records and still exit 0 — the run
//! itself succeeded and the transcript is the report. Only unusable input
//! (a malformed scenario, an unwritable output path) is a process failure.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;

use manet_pki::simnet::{run_scenario, Scenario};

use crate::assets;

#[derive(Clone, Copy, PartialEq, clap::ValueEnum)]
enum Format {
    /// Transcript records only, one per line.
    Records,
    /// Transcript records followed by the terminal network state,
    /// each state line prefixed with `# `.
    Text,
}

#[derive(Args)]
pub struct RunArgs {
    /// Scenario script to run; defaults to the built-in worked example.
    #[arg(long)]
    scenario: Option<PathBuf>,

    /// Override the scenario's random seed.
    #[arg(long)]
    seed: Option<u64>,

    /// Write the output here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "records")]
    format: Format,
}

pub fn run(args: RunArgs) -> anyhow::Result<bool> {
    let mut sc = match &args.scenario {
        Some(path) => {
            Scenario::load(path).with_context(|| format!("loading {}", path.display()))?
        }
        None => assets::example_scenario()?,
    };
    if let Some(seed) = args.seed {
        sc.set_seed(seed);
    }

    let outcome = run_scenario(&sc)?;
    let mut output = outcome.transcript().to_text();
    if args.format == Format::Text {
        for line in outcome.state().to_text().lines() {
            output.push_str("# ");
            output.push_str(line);
            output.push('\n');
        }
    }

    match &args.out {
        Some(path) => fs::write(path, output)
            .with_context(|| format!("writing {}", path.display()))?,
        None => print!("{output}"),
    }
    Ok(true)
}
