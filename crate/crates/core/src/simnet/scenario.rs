//! Scenario files: the complete, self-contained description of one
//! simulation run.
//!
//! A scenario is sectioned text. `[params]` holds run-wide settings and
//! points at the curve parameter file (and hash fixture file, if any),
//! resolved relative to the scenario's own directory. `[founders]` lists
//! the founding nodes in ceremony order. Optional sections pin what would
//! otherwise be drawn from the seeded generator: `[polynomials]` fixes
//! founders' bivariate polynomials, `[rsa]` fixes any node's RSA primes and
//! exponent. `[neighbors]` gives an explicit undirected adjacency list;
//! without it every node can reach every other. `[events]` is the ordered
//! script.
//!
//! ```text
//! [params]
//! curve params/demo.curve
//! degree 2
//! hash-mode fixture
//! fixture-file fixtures/demo.hashes
//!
//! [founders]
//! Node1
//! Node2
//! Node3
//! Node4
//!
//! [events]
//! @1 join Node5 via Node2 Node3 Node4
//! @2 issue Node1
//! verify Node2 Node1
//! send Node1 Node3 56
//! ```
//!
//! Events carry an optional `@tick`; without one, an event runs one tick
//! after its predecessor. Everything structurally wrong with a scenario is
//! rejected here, before a single event runs; what remains for the engine
//! are genuinely dynamic failures (a departed responder, a missing
//! certificate), which it records instead of raising.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;

use crate::algebra::SymmetricBivariatePolynomial;
use crate::curve::{CurveError, CurveParams};
use crate::hashing::{HashOracle, HashingError};
use crate::rsa::RsaKeyPair;

#[derive(Debug, Error)]
pub enum ScenarioError {
    /// A scenario or referenced file that cannot be read.
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    /// A line that does not parse or validate.
    #[error("scenario line {line}: {reason}")]
    Parse { line: usize, reason: String },
    /// A cross-line consistency problem.
    #[error("invalid scenario: {0}")]
    Config(String),
    /// The referenced curve parameter file is bad.
    #[error("curve file {path}: {source}")]
    Curve { path: String, source: CurveError },
    /// The referenced hash fixture file is bad.
    #[error("fixture file {path}: {source}")]
    Fixture { path: String, source: HashingError },
}

/// Where hashes come from during the run.
#[derive(Debug, Clone)]
pub enum HashMode {
    /// SHA-256 based oracles.
    Computed,
    /// A pinned lookup table (file contents held inline after loading).
    Fixture { text: String },
}

/// One scripted action, without its tick.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub enum Action {
    /// A new node requests shares; `via` overrides responder selection.
    Join { node: String, via: Vec<String> },
    /// A node requests a certificate on its RSA key.
    Issue { subject: String, via: Vec<String> },
    /// One node checks another's certificate.
    Verify { verifier: String, subject: String },
    /// An RSA-encrypted message; delivery happens one tick later.
    Send { from: String, to: String, message: u64 },
    /// The node falls silent; its shares remain valid.
    Depart { node: String },
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Join { node, .. } => write!(f, "join {node}"),
            Action::Issue { subject, .. } => write!(f, "issue {subject}"),
            Action::Verify { verifier, subject } => write!(f, "verify {verifier} {subject}"),
            Action::Send { from, to, .. } => write!(f, "send {from} {to}"),
            Action::Depart { node } => write!(f, "depart {node}"),
        }
    }
}

/// An [`Action`] scheduled at a tick.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScriptedEvent {
    pub(crate) time: u64,
    pub(crate) action: Action,
}

impl ScriptedEvent {
    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn action(&self) -> &Action {
        &self.action
    }
}

/// A parsed, validated scenario, ready to run.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub(crate) params: CurveParams,
    pub(crate) degree: usize,
    pub(crate) seed: u64,
    pub(crate) hash_mode: HashMode,
    pub(crate) rsa_prime_bits: u32,
    pub(crate) drop_probability: f64,
    pub(crate) debug_keys: bool,
    pub(crate) founders: Vec<String>,
    /// `None` means every node neighbors every other.
    pub(crate) neighbor_edges: Option<Vec<(String, String)>>,
    pub(crate) polynomials: BTreeMap<String, SymmetricBivariatePolynomial>,
    pub(crate) rsa_keys: BTreeMap<String, (u64, u64, u64)>,
    pub(crate) events: Vec<ScriptedEvent>,
}

impl Scenario {
    /// Read and parse a scenario file; referenced files resolve relative to
    /// its directory.
    pub fn load(path: &Path) -> Result<Self, ScenarioError> {
        let text = std::fs::read_to_string(path).map_err(|source| ScenarioError::Read {
            path: path.display().to_string(),
            source,
        })?;
        let base = path.parent().unwrap_or_else(|| Path::new("."));
        Self::parse(&text, base)
    }

    /// Parse scenario text; `base_dir` anchors the `curve` and
    /// `fixture-file` paths.
    pub fn parse(text: &str, base_dir: &Path) -> Result<Self, ScenarioError> {
        let sections = split_sections(text)?;
        let params_section = ParamsSection::build(sections.get("params"), base_dir)?;
        let founders = parse_founders(sections.get("founders"))?;
        let threshold = params_section.degree + 1;
        if founders.len() < threshold {
            return Err(ScenarioError::Config(format!(
                "founding count {} is below the threshold {} required by degree {}",
                founders.len(),
                threshold,
                params_section.degree
            )));
        }
        let neighbor_edges = parse_neighbors(sections.get("neighbors"))?;
        let polynomials = parse_polynomials(
            sections.get("polynomials"),
            &founders,
            params_section.params.r(),
            params_section.degree,
        )?;
        let rsa_keys = parse_rsa(sections.get("rsa"))?;
        let events = parse_events(sections.get("events"), &founders)?;
        Ok(Self {
            params: params_section.params,
            degree: params_section.degree,
            seed: params_section.seed,
            hash_mode: params_section.hash_mode,
            rsa_prime_bits: params_section.rsa_prime_bits,
            drop_probability: params_section.drop_probability,
            debug_keys: params_section.debug_keys,
            founders,
            neighbor_edges,
            polynomials,
            rsa_keys,
            events,
        })
    }

    pub fn params(&self) -> &CurveParams {
        &self.params
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// t = degree + 1: responders per join, signers per certificate.
    pub fn threshold(&self) -> usize {
        self.degree + 1
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Replace the file's seed (the CLI's `--seed` hook).
    pub fn set_seed(&mut self, seed: u64) {
        self.seed = seed;
    }

    pub fn debug_keys(&self) -> bool {
        self.debug_keys
    }

    pub fn founders(&self) -> &[String] {
        &self.founders
    }

    pub fn events(&self) -> &[ScriptedEvent] {
        &self.events
    }

    /// The hash oracle this scenario runs under.
    pub fn oracle(&self) -> HashOracle {
        match &self.hash_mode {
            HashMode::Computed => HashOracle::computed(&self.params),
            HashMode::Fixture { text } => HashOracle::from_fixture_text(&self.params, text)
                .expect("fixture text was validated at parse time"),
        }
    }
}

fn parse_err(line: usize, reason: impl Into<String>) -> ScenarioError {
    ScenarioError::Parse { line, reason: reason.into() }
}

/// Labels travel through transcripts, queries and via-lists, so they stay
/// on a charset that cannot collide with those formats.
fn validate_label(line: usize, label: &str) -> Result<(), ScenarioError> {
    let ok = !label.is_empty()
        && label != "via"
        && label
            .chars()
            .all(|c| c.is_ascii_alphanumeric() || matches!(c, '-' | '_' | '.'));
    if ok {
        Ok(())
    } else {
        Err(parse_err(
            line,
            format!("bad label {label:?}: use ASCII letters, digits, '-', '_' or '.'"),
        ))
    }
}

/// First pass: bucket the non-comment lines under their section headers.
fn split_sections(text: &str) -> Result<BTreeMap<String, Vec<(usize, String)>>, ScenarioError> {
    const KNOWN: &[&str] = &["params", "founders", "neighbors", "polynomials", "rsa", "events"];
    let mut sections: BTreeMap<String, Vec<(usize, String)>> = BTreeMap::new();
    let mut current: Option<String> = None;
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        let lineno = idx + 1;
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if let Some(rest) = line.strip_prefix('[') {
            let name = rest
                .strip_suffix(']')
                .ok_or_else(|| parse_err(lineno, format!("unterminated section header {line:?}")))?;
            if !KNOWN.contains(&name) {
                return Err(parse_err(lineno, format!("unknown section [{name}]")));
            }
            if sections.contains_key(name) {
                return Err(parse_err(lineno, format!("section [{name}] appears twice")));
            }
            sections.insert(name.to_string(), Vec::new());
            current = Some(name.to_string());
            continue;
        }
        match &current {
            Some(name) => sections
                .get_mut(name)
                .expect("current section was inserted when entered")
                .push((lineno, line.to_string())),
            None => {
                return Err(parse_err(lineno, "content before the first [section] header"))
            }
        }
    }
    Ok(sections)
}

/// The processed `[params]` section.
struct ParamsSection {
    params: CurveParams,
    degree: usize,
    seed: u64,
    hash_mode: HashMode,
    rsa_prime_bits: u32,
    drop_probability: f64,
    debug_keys: bool,
}

impl ParamsSection {
    fn build(
        lines: Option<&Vec<(usize, String)>>,
        base_dir: &Path,
    ) -> Result<Self, ScenarioError> {
        let mut seen: BTreeMap<&str, (usize, String)> = BTreeMap::new();
        for (lineno, line) in lines.into_iter().flatten() {
            let (key, value) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| parse_err(*lineno, format!("expected \"key value\", got {line:?}")))?;
            let key = match key {
                "curve" | "degree" | "seed" | "hash-mode" | "fixture-file"
                | "rsa-prime-bits" | "drop-probability" | "debug-keys" => key,
                other => {
                    return Err(parse_err(*lineno, format!("unknown [params] key {other:?}")))
                }
            };
            if seen
                .insert(key, (*lineno, value.trim().to_string()))
                .is_some()
            {
                return Err(parse_err(*lineno, format!("duplicate [params] key {key:?}")));
            }
        }

        let required = |key: &str| {
            seen.get(key).cloned().ok_or_else(|| {
                ScenarioError::Config(format!("missing required [params] key {key:?}"))
            })
        };
        let parse_num = |key: &str, default: u64| -> Result<u64, ScenarioError> {
            match seen.get(key) {
                None => Ok(default),
                Some((lineno, v)) => v
                    .parse()
                    .map_err(|e| parse_err(*lineno, format!("bad {key}: {e}"))),
            }
        };

        let (_, curve_rel) = required("curve")?;
        let curve_path = base_dir.join(&curve_rel);
        let curve_text =
            std::fs::read_to_string(&curve_path).map_err(|source| ScenarioError::Read {
                path: curve_path.display().to_string(),
                source,
            })?;
        let params = CurveParams::from_text(&curve_text).map_err(|source| {
            ScenarioError::Curve { path: curve_path.display().to_string(), source }
        })?;

        let (degree_line, degree_text) = required("degree")?;
        let degree: usize = degree_text
            .parse()
            .map_err(|e| parse_err(degree_line, format!("bad degree: {e}")))?;
        if degree < 1 {
            return Err(parse_err(degree_line, "degree must be at least 1"));
        }

        let seed = parse_num("seed", 0)?;

        let rsa_prime_bits = parse_num("rsa-prime-bits", 5)? as u32;
        if !(3..=31).contains(&rsa_prime_bits) {
            let (lineno, _) = seen["rsa-prime-bits"];
            return Err(parse_err(lineno, "rsa-prime-bits must be within 3..=31"));
        }

        let drop_probability = match seen.get("drop-probability") {
            None => 0.0,
            Some((lineno, v)) => {
                let p: f64 = v
                    .parse()
                    .map_err(|e| parse_err(*lineno, format!("bad drop-probability: {e}")))?;
                if !p.is_finite() || !(0.0..1.0).contains(&p) {
                    return Err(parse_err(
                        *lineno,
                        "drop-probability must lie in [0, 1)",
                    ));
                }
                p
            }
        };

        let debug_keys = match seen.get("debug-keys") {
            None => false,
            Some((_, v)) if v == "true" => true,
            Some((_, v)) if v == "false" => false,
            Some((lineno, v)) => {
                return Err(parse_err(
                    *lineno,
                    format!("debug-keys must be true or false, got {v:?}"),
                ))
            }
        };

        let hash_mode = match seen.get("hash-mode").map(|(l, v)| (*l, v.as_str())) {
            None | Some((_, "computed")) => {
                if let Some((lineno, _)) = seen.get("fixture-file") {
                    return Err(parse_err(
                        *lineno,
                        "fixture-file is only meaningful with hash-mode fixture",
                    ));
                }
                HashMode::Computed
            }
            Some((_, "fixture")) => {
                let (_, fixture_rel) = required("fixture-file")?;
                let fixture_path = base_dir.join(&fixture_rel);
                let text = std::fs::read_to_string(&fixture_path).map_err(|source| {
                    ScenarioError::Read { path: fixture_path.display().to_string(), source }
                })?;
                HashOracle::from_fixture_text(&params, &text).map_err(|source| {
                    ScenarioError::Fixture {
                        path: fixture_path.display().to_string(),
                        source,
                    }
                })?;
                HashMode::Fixture { text }
            }
            Some((lineno, other)) => {
                return Err(parse_err(
                    lineno,
                    format!("hash-mode must be computed or fixture, got {other:?}"),
                ))
            }
        };

        Ok(Self {
            params,
            degree,
            seed,
            hash_mode,
            rsa_prime_bits,
            drop_probability,
            debug_keys,
        })
    }
}

fn parse_founders(lines: Option<&Vec<(usize, String)>>) -> Result<Vec<String>, ScenarioError> {
    let mut founders = Vec::new();
    for (lineno, line) in lines.into_iter().flatten() {
        if line.split_whitespace().count() != 1 {
            return Err(parse_err(*lineno, "one founder label per line"));
        }
        validate_label(*lineno, line)?;
        if founders.contains(line) {
            return Err(parse_err(*lineno, format!("duplicate founder {line:?}")));
        }
        founders.push(line.clone());
    }
    if founders.is_empty() {
        return Err(ScenarioError::Config(
            "a scenario needs a non-empty [founders] section".to_string(),
        ));
    }
    Ok(founders)
}

fn parse_neighbors(
    lines: Option<&Vec<(usize, String)>>,
) -> Result<Option<Vec<(String, String)>>, ScenarioError> {
    let Some(lines) = lines else { return Ok(None) };
    let mut edges = Vec::new();
    for (lineno, line) in lines {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 2 {
            return Err(parse_err(*lineno, "a neighbor line needs a node and at least one peer"));
        }
        for t in &tokens {
            validate_label(*lineno, t)?;
        }
        let (node, peers) = (tokens[0], &tokens[1..]);
        for peer in peers {
            if *peer == node {
                return Err(parse_err(*lineno, format!("{node:?} cannot neighbor itself")));
            }
            edges.push((node.to_string(), peer.to_string()));
        }
    }
    Ok(Some(edges))
}

fn parse_polynomials(
    lines: Option<&Vec<(usize, String)>>,
    founders: &[String],
    share_modulus: u64,
    degree: usize,
) -> Result<BTreeMap<String, SymmetricBivariatePolynomial>, ScenarioError> {
    let mut pinned = BTreeMap::new();
    for (lineno, line) in lines.into_iter().flatten() {
        let (label, matrix) = line
            .split_once(char::is_whitespace)
            .ok_or_else(|| parse_err(*lineno, "expected \"Label matrix\""))?;
        validate_label(*lineno, label)?;
        if !founders.iter().any(|f| f == label) {
            return Err(parse_err(
                *lineno,
                format!("{label:?} is not a founder; only founders carry polynomials"),
            ));
        }
        let poly = SymmetricBivariatePolynomial::parse_matrix_string(matrix.trim(), share_modulus)
            .map_err(|e| parse_err(*lineno, e.to_string()))?;
        if poly.degree() != degree {
            return Err(parse_err(
                *lineno,
                format!("polynomial degree {} does not match scenario degree {degree}", poly.degree()),
            ));
        }
        if pinned.insert(label.to_string(), poly).is_some() {
            return Err(parse_err(*lineno, format!("duplicate polynomial for {label:?}")));
        }
    }
    Ok(pinned)
}

fn parse_rsa(
    lines: Option<&Vec<(usize, String)>>,
) -> Result<BTreeMap<String, (u64, u64, u64)>, ScenarioError> {
    let mut pinned = BTreeMap::new();
    for (lineno, line) in lines.into_iter().flatten() {
        let tokens: Vec<&str> = line.split_whitespace().collect();
        let [label, p, q, e] = tokens.as_slice() else {
            return Err(parse_err(*lineno, "expected \"Label p q e\""));
        };
        validate_label(*lineno, label)?;
        let parse = |name: &str, v: &str| -> Result<u64, ScenarioError> {
            v.parse()
                .map_err(|err| parse_err(*lineno, format!("bad {name}: {err}")))
        };
        let (p, q, e) = (parse("p", p)?, parse("q", q)?, parse("e", e)?);
        RsaKeyPair::from_primes(p, q, e).map_err(|err| parse_err(*lineno, err.to_string()))?;
        if pinned.insert(label.to_string(), (p, q, e)).is_some() {
            return Err(parse_err(*lineno, format!("duplicate RSA key for {label:?}")));
        }
    }
    Ok(pinned)
}

fn parse_events(
    lines: Option<&Vec<(usize, String)>>,
    founders: &[String],
) -> Result<Vec<ScriptedEvent>, ScenarioError> {
    let mut events: Vec<ScriptedEvent> = Vec::new();
    let mut joined: BTreeSet<String> = BTreeSet::new();
    let mut last_time = 0u64;
    for (lineno, line) in lines.into_iter().flatten() {
        let mut tokens: Vec<&str> = line.split_whitespace().collect();
        let time = match tokens.first().and_then(|t| t.strip_prefix('@')) {
            Some(tick) => {
                tokens.remove(0);
                let t: u64 = tick
                    .parse()
                    .map_err(|e| parse_err(*lineno, format!("bad tick: {e}")))?;
                if t == 0 {
                    return Err(parse_err(*lineno, "tick 0 belongs to the founding ceremony"));
                }
                if t < last_time {
                    return Err(parse_err(
                        *lineno,
                        format!("tick {t} is before the previous event at {last_time}"),
                    ));
                }
                t
            }
            None => last_time + 1,
        };
        last_time = time;

        let (verb, args) = tokens
            .split_first()
            .ok_or_else(|| parse_err(*lineno, "empty event after tick"))?;
        for arg in args.iter().filter(|a| **a != "via") {
            validate_label(*lineno, arg)?;
        }
        let with_via = |what: &str| -> Result<(String, Vec<String>), ScenarioError> {
            let (head, via) = match args.iter().position(|a| *a == "via") {
                Some(pos) => (&args[..pos], &args[pos + 1..]),
                None => (args, &[][..]),
            };
            let [node] = head else {
                return Err(parse_err(*lineno, format!("{what} takes one node, then optionally \"via ...\"")));
            };
            if args.contains(&"via") && via.is_empty() {
                return Err(parse_err(*lineno, "\"via\" needs at least one responder"));
            }
            let mut seen = BTreeSet::new();
            for v in via {
                if *v == *node {
                    return Err(parse_err(*lineno, format!("{node:?} cannot respond to itself")));
                }
                if !seen.insert(*v) {
                    return Err(parse_err(*lineno, format!("duplicate via responder {v:?}")));
                }
            }
            Ok((node.to_string(), via.iter().map(|s| s.to_string()).collect()))
        };

        let action = match *verb {
            "join" => {
                let (node, via) = with_via("join")?;
                if founders.contains(&node) {
                    return Err(parse_err(*lineno, format!("founder {node:?} is already present")));
                }
                if !joined.insert(node.clone()) {
                    return Err(parse_err(*lineno, format!("{node:?} already joined earlier")));
                }
                Action::Join { node, via }
            }
            "issue" => {
                let (subject, via) = with_via("issue")?;
                Action::Issue { subject, via }
            }
            "verify" => {
                let [verifier, subject] = args else {
                    return Err(parse_err(*lineno, "verify takes: verifier subject"));
                };
                Action::Verify { verifier: verifier.to_string(), subject: subject.to_string() }
            }
            "send" => {
                let [from, to, message] = args else {
                    return Err(parse_err(*lineno, "send takes: from to message"));
                };
                let message: u64 = message
                    .parse()
                    .map_err(|e| parse_err(*lineno, format!("bad message: {e}")))?;
                Action::Send { from: from.to_string(), to: to.to_string(), message }
            }
            "depart" => {
                let [node] = args else {
                    return Err(parse_err(*lineno, "depart takes one node"));
                };
                Action::Depart { node: node.to_string() }
            }
            other => return Err(parse_err(*lineno, format!("unknown event verb {other:?}"))),
        };
        events.push(ScriptedEvent { time, action });
    }
    Ok(events)
}

#[cfg(test)]
mod tests {
    use super::*;

    const CURVE_TEXT: &str = "p 4019\nr 67\ncofactor 60\ngenerator 3198,578\nnon-residue 4018\n";

    const VALID: &str = "\
[params]
curve demo.curve
degree 2

[founders]
Node1
Node2
Node3
Node4
";

    /// Parse `text` with the standard curve file sitting next to it.
    fn parse(text: &str) -> Result<Scenario, ScenarioError> {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("demo.curve"), CURVE_TEXT).unwrap();
        Scenario::parse(text, dir.path())
    }

    #[test]
    fn accepts_a_minimal_scenario_with_defaults() {
        let sc = parse(VALID).unwrap();
        assert_eq!(sc.degree(), 2);
        assert_eq!(sc.threshold(), 3);
        assert_eq!(sc.seed(), 0);
        assert_eq!(sc.rsa_prime_bits, 5);
        assert_eq!(sc.drop_probability, 0.0);
        assert!(!sc.debug_keys());
        assert!(matches!(sc.hash_mode, HashMode::Computed));
        assert_eq!(sc.founders(), ["Node1", "Node2", "Node3", "Node4"]);
        assert!(sc.neighbor_edges.is_none());
        assert!(sc.polynomials.is_empty());
        assert!(sc.rsa_keys.is_empty());
        assert!(sc.events().is_empty());
        assert_eq!(sc.params().r(), 67);
    }

    #[test]
    fn unprefixed_events_run_one_tick_after_their_predecessor() {
        let text = format!(
            "{VALID}\n[events]\n@2 issue Node1\nverify Node2 Node1\nsend Node1 Node2 5\n@7 depart Node1\n"
        );
        let sc = parse(&text).unwrap();
        let times: Vec<u64> = sc.events().iter().map(|e| e.time()).collect();
        assert_eq!(times, [2, 3, 4, 7]);
        assert_eq!(
            *sc.events()[3].action(),
            Action::Depart { node: "Node1".to_string() }
        );
    }

    #[test]
    fn via_lists_and_pinned_sections_round_trip() {
        let text = format!(
            "{VALID}\n\
             [neighbors]\nNode1 Node2 Node3\nNode4 Node1\n\n\
             [polynomials]\nNode1 5,5,0;5,8,3;0,3,0\n\n\
             [rsa]\nNode1 11 59 89\n\n\
             [events]\n@1 join Node5 via Node2 Node3\n"
        );
        let sc = parse(&text).unwrap();
        assert_eq!(
            sc.neighbor_edges.as_deref().unwrap(),
            [
                ("Node1".to_string(), "Node2".to_string()),
                ("Node1".to_string(), "Node3".to_string()),
                ("Node4".to_string(), "Node1".to_string()),
            ]
        );
        assert_eq!(sc.polynomials["Node1"].to_matrix_string(), "5,5,0;5,8,3;0,3,0");
        assert_eq!(sc.rsa_keys["Node1"], (11, 59, 89));
        assert_eq!(
            *sc.events()[0].action(),
            Action::Join {
                node: "Node5".to_string(),
                via: vec!["Node2".to_string(), "Node3".to_string()],
            }
        );
    }

    #[test]
    fn load_resolves_referenced_files_beside_the_scenario() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::create_dir(dir.path().join("params")).unwrap();
        std::fs::write(dir.path().join("params/demo.curve"), CURVE_TEXT).unwrap();
        let text = VALID.replace("curve demo.curve", "curve params/demo.curve");
        let path = dir.path().join("demo.scenario");
        std::fs::write(&path, text).unwrap();
        let sc = Scenario::load(&path).unwrap();
        assert_eq!(sc.params().p(), 4019);
    }

    #[test]
    fn rejects_malformed_scenarios() {
        let cases: &[(&str, String, &str)] = &[
            (
                "missing params section",
                "[founders]\nNode1\n".to_string(),
                "missing required [params] key \"curve\"",
            ),
            (
                "missing degree",
                "[params]\ncurve demo.curve\n\n[founders]\nNode1\nNode2\n".to_string(),
                "missing required [params] key \"degree\"",
            ),
            (
                "degree zero",
                VALID.replace("degree 2", "degree 0"),
                "degree must be at least 1",
            ),
            (
                "missing curve file",
                VALID.replace("demo.curve", "nope.curve"),
                "cannot read",
            ),
            (
                "unknown section",
                format!("{VALID}\n[extras]\nfoo\n"),
                "unknown section [extras]",
            ),
            (
                "unterminated header",
                format!("{VALID}\n[events\n"),
                "unterminated section header",
            ),
            (
                "content before any section",
                format!("stray\n{VALID}"),
                "content before the first [section] header",
            ),
            (
                "duplicate section",
                format!("{VALID}\n[founders]\nNode9\n"),
                "section [founders] appears twice",
            ),
            (
                "unknown params key",
                VALID.replace("degree 2", "degree 2\npairing tate"),
                "unknown [params] key \"pairing\"",
            ),
            (
                "duplicate params key",
                VALID.replace("degree 2", "degree 2\ndegree 3"),
                "duplicate [params] key \"degree\"",
            ),
            (
                "rsa-prime-bits out of range",
                VALID.replace("degree 2", "degree 2\nrsa-prime-bits 40"),
                "rsa-prime-bits must be within 3..=31",
            ),
            (
                "drop probability of one",
                VALID.replace("degree 2", "degree 2\ndrop-probability 1.0"),
                "drop-probability must lie in [0, 1)",
            ),
            (
                "bad debug-keys",
                VALID.replace("degree 2", "degree 2\ndebug-keys yes"),
                "debug-keys must be true or false",
            ),
            (
                "bad hash-mode",
                VALID.replace("degree 2", "degree 2\nhash-mode oracle"),
                "hash-mode must be computed or fixture",
            ),
            (
                "fixture file without fixture mode",
                VALID.replace("degree 2", "degree 2\nfixture-file demo.hashes"),
                "fixture-file is only meaningful with hash-mode fixture",
            ),
            (
                "fixture mode without fixture file",
                VALID.replace("degree 2", "degree 2\nhash-mode fixture"),
                "missing required [params] key \"fixture-file\"",
            ),
            (
                "duplicate founder",
                VALID.replace("Node4", "Node1"),
                "duplicate founder \"Node1\"",
            ),
            (
                "bad founder label",
                VALID.replace("Node4", "Node!"),
                "bad label \"Node!\"",
            ),
            (
                "no founders",
                "[params]\ncurve demo.curve\ndegree 2\n\n[founders]\n".to_string(),
                "non-empty [founders] section",
            ),
            (
                "too few founders for the threshold",
                "[params]\ncurve demo.curve\ndegree 2\n\n[founders]\nNode1\nNode2\n".to_string(),
                "founding count 2 is below the threshold 3",
            ),
            (
                "self neighbor",
                format!("{VALID}\n[neighbors]\nNode1 Node2 Node1\n"),
                "\"Node1\" cannot neighbor itself",
            ),
            (
                "neighbor line without peers",
                format!("{VALID}\n[neighbors]\nNode1\n"),
                "a neighbor line needs a node and at least one peer",
            ),
            (
                "polynomial for a non-founder",
                format!("{VALID}\n[polynomials]\nNode9 5,5,0;5,8,3;0,3,0\n"),
                "\"Node9\" is not a founder",
            ),
            (
                "asymmetric polynomial",
                format!("{VALID}\n[polynomials]\nNode1 5,5,0;4,8,3;0,3,0\n"),
                "not symmetric",
            ),
            (
                "polynomial degree mismatch",
                format!("{VALID}\n[polynomials]\nNode1 5,5;5,8\n"),
                "does not match scenario degree 2",
            ),
            (
                "duplicate polynomial",
                format!(
                    "{VALID}\n[polynomials]\nNode1 5,5,0;5,8,3;0,3,0\nNode1 5,5,0;5,8,3;0,3,0\n"
                ),
                "duplicate polynomial for \"Node1\"",
            ),
            (
                "composite rsa prime",
                format!("{VALID}\n[rsa]\nNode1 4 7 5\n"),
                "4 is not prime",
            ),
            (
                "duplicate rsa key",
                format!("{VALID}\n[rsa]\nNode1 11 59 89\nNode1 11 59 89\n"),
                "duplicate RSA key for \"Node1\"",
            ),
            (
                "tick zero",
                format!("{VALID}\n[events]\n@0 issue Node1\n"),
                "tick 0 belongs to the founding ceremony",
            ),
            (
                "ticks moving backwards",
                format!("{VALID}\n[events]\n@3 issue Node1\n@1 issue Node2\n"),
                "tick 1 is before the previous event at 3",
            ),
            (
                "joining an existing founder",
                format!("{VALID}\n[events]\n@1 join Node1\n"),
                "founder \"Node1\" is already present",
            ),
            (
                "joining twice",
                format!("{VALID}\n[events]\n@1 join Node7\n@2 join Node7\n"),
                "\"Node7\" already joined earlier",
            ),
            (
                "empty via list",
                format!("{VALID}\n[events]\n@1 join Node7 via\n"),
                "\"via\" needs at least one responder",
            ),
            (
                "via includes the requester",
                format!("{VALID}\n[events]\n@1 join Node7 via Node7\n"),
                "\"Node7\" cannot respond to itself",
            ),
            (
                "duplicate via responder",
                format!("{VALID}\n[events]\n@1 join Node7 via Node2 Node2\n"),
                "duplicate via responder \"Node2\"",
            ),
            (
                "unknown verb",
                format!("{VALID}\n[events]\n@1 teleport Node1\n"),
                "unknown event verb \"teleport\"",
            ),
            (
                "send without a message",
                format!("{VALID}\n[events]\n@1 send Node1 Node2\n"),
                "send takes: from to message",
            ),
        ];
        for (name, text, needle) in cases {
            let err = parse(text).expect_err(name);
            let shown = err.to_string();
            assert!(shown.contains(needle), "{name}: {shown:?} lacks {needle:?}");
        }
    }

    #[test]
    fn fixture_files_are_validated_during_parsing() {
        let dir = tempfile::tempdir().unwrap();
        std::fs::write(dir.path().join("demo.curve"), CURVE_TEXT).unwrap();
        // (1, 5) is not on the curve, so the fixture must be rejected here,
        // not when the oracle first serves the point.
        std::fs::write(dir.path().join("demo.hashes"), "m\tpoint\t1,5\n").unwrap();
        let text = VALID.replace(
            "degree 2",
            "degree 2\nhash-mode fixture\nfixture-file demo.hashes",
        );
        let err = Scenario::parse(&text, dir.path()).unwrap_err();
        assert!(matches!(err, ScenarioError::Fixture { .. }), "{err}");
    }
}
