//! The worked example baked into the binary, so the default invocations
//! work from any directory, plus the flag plumbing shared by the verify
//! subcommands.

use std::fs;
use std::path::Path;

use anyhow::Context;
use clap::ValueEnum;

use manet_pki::curve::{BasePoint, CurveParams};
use manet_pki::hashing::HashOracle;
use manet_pki::simnet::Scenario;

pub const SCENARIO: &str = include_str!("../../../scenarios/worked-example.scenario");
pub const CURVE: &str = include_str!("../../../scenarios/params/demo.curve");
pub const FIXTURE: &str = include_str!("../../../scenarios/fixtures/demo.hashes");

/// Parse the embedded worked example. Its `curve` and `fixture-file`
/// references are materialized into a scratch directory first; everything
/// is read eagerly, so the directory does not outlive this call.
pub fn example_scenario() -> anyhow::Result<Scenario> {
    let dir = tempfile::tempdir().context("creating a scratch directory")?;
    fs::create_dir(dir.path().join("params"))?;
    fs::create_dir(dir.path().join("fixtures"))?;
    fs::write(dir.path().join("params/demo.curve"), CURVE)?;
    fs::write(dir.path().join("fixtures/demo.hashes"), FIXTURE)?;
    Scenario::parse(SCENARIO, dir.path()).context("parsing the built-in example scenario")
}

/// Curve parameters from `--params`, or the built-in set.
pub fn load_params(path: Option<&Path>) -> anyhow::Result<CurveParams> {
    let text = match path {
        Some(p) => fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?,
        None => CURVE.to_string(),
    };
    CurveParams::from_text(&text).map_err(Into::into)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum HashModeArg {
    /// Digest-based hashing, no pinned values.
    Computed,
    /// A pinned lookup table; `--fixtures` names it, the built-in example
    /// table is the default.
    Fixture,
}

/// The hash oracle selected by `--hash-mode` / `--fixtures`.
pub fn build_oracle(
    params: &CurveParams,
    mode: HashModeArg,
    fixtures: Option<&Path>,
) -> anyhow::Result<HashOracle> {
    match mode {
        HashModeArg::Computed => {
            anyhow::ensure!(
                fixtures.is_none(),
                "--fixtures is only meaningful with --hash-mode fixture"
            );
            Ok(HashOracle::computed(params))
        }
        HashModeArg::Fixture => {
            let text = match fixtures {
                Some(p) => {
                    fs::read_to_string(p).with_context(|| format!("reading {}", p.display()))?
                }
                None => FIXTURE.to_string(),
            };
            HashOracle::from_fixture_text(params, &text).map_err(Into::into)
        }
    }
}

/// Parse a point in the transcript's own `x,y` / `inf` notation.
pub fn parse_point(params: &CurveParams, text: &str) -> anyhow::Result<BasePoint> {
    if text == "inf" {
        return Ok(params.mul_generator(0));
    }
    let (x, y) = text
        .split_once(',')
        .with_context(|| format!("point {text:?} is not \"x,y\" or \"inf\""))?;
    let x: u64 = x.trim().parse().with_context(|| format!("bad x in point {text:?}"))?;
    let y: u64 = y.trim().parse().with_context(|| format!("bad y in point {text:?}"))?;
    params.point(x, y).map_err(Into::into)
}
