//! A deterministic discrete-event simulator for ad-hoc networks running
//! the threshold PKI.
//!
//! A [`Scenario`] (parsed from a sectioned text file) describes the curve,
//! the founding membership, and a script of timed events: nodes joining,
//! certificates being issued and checked, encrypted messages in flight,
//! nodes silently departing. [`run_scenario`] plays the script and returns
//! a [`SimOutcome`]: a line-oriented [`Transcript`] of everything that
//! happened, and the terminal [`SimState`] of every node.
//!
//! Runs are reproducible: the same scenario and seed always produce the
//! same transcript bytes, because all randomness flows from one seeded
//! generator and events execute in a fixed order. Time is logical — a tick
//! is "everything before the next tick", not a duration — and messages
//! sent at tick `t` arrive at `t + 1` unless the loss knob eats them.

pub mod engine;
pub mod scenario;
pub mod transcript;

pub use engine::{run_scenario, SimNode, SimOutcome, SimState};
pub use scenario::{Action, HashMode, Scenario, ScenarioError, ScriptedEvent};
pub use transcript::{Entry, Transcript, TranscriptError};
