//! The simulation transcript: a line-oriented record of everything that
//! happened, stable enough to diff byte-for-byte and queryable enough to
//! pull single values out of.
//!
//! One record per line:
//!
//! ```text
//! 0 state node=Node1 row=41,13,63 share=41
//! 2 certificate subject=Node1 e=89 n=649 signature=2350,3239
//! ```
//!
//! Leading tick, then the record kind, then `key=value` fields in a fixed
//! order per kind. Values are decimal numbers, labels, points (`x,y`) or
//! coefficient lists (`c0,c1,c2`) — never anything with whitespace, so the
//! format splits on spaces without quoting rules.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TranscriptError {
    /// A transcript file line that does not parse.
    #[error("transcript line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    /// An extraction query of a shape this module does not know.
    #[error("unknown extraction query {0:?}")]
    UnknownQuery(String),
    /// A well-formed query with no answering record.
    #[error("no transcript record answers query {0:?}")]
    NoMatch(String),
}

/// One transcript record: a tick, a kind, and ordered `key=value` fields.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Entry {
    time: u64,
    kind: String,
    fields: Vec<(String, String)>,
}

impl Entry {
    pub fn new(time: u64, kind: impl Into<String>) -> Self {
        Self { time, kind: kind.into(), fields: Vec::new() }
    }

    /// Append a field; order of calls is the order on the line.
    pub fn field(mut self, key: &str, value: impl fmt::Display) -> Self {
        let value = value.to_string();
        debug_assert!(
            !key.contains([' ', '=']) && !value.contains(' ') && !value.is_empty(),
            "field {key}={value} would not survive the line format"
        );
        self.fields.push((key.to_string(), value));
        self
    }

    pub fn time(&self) -> u64 {
        self.time
    }

    pub fn kind(&self) -> &str {
        &self.kind
    }

    pub fn fields(&self) -> &[(String, String)] {
        &self.fields
    }

    /// The value of the first field named `key`, if present.
    pub fn get(&self, key: &str) -> Option<&str> {
        self.fields
            .iter()
            .find(|(k, _)| k == key)
            .map(|(_, v)| v.as_str())
    }
}

impl fmt::Display for Entry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} {}", self.time, self.kind)?;
        for (k, v) in &self.fields {
            write!(f, " {k}={v}")?;
        }
        Ok(())
    }
}

/// The full record of one simulation run.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Transcript {
    entries: Vec<Entry>,
}

impl Transcript {
    pub(crate) fn from_entries(entries: Vec<Entry>) -> Self {
        Self { entries }
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    /// Records of one kind, in order.
    pub fn of_kind<'a>(&'a self, kind: &'a str) -> impl Iterator<Item = &'a Entry> {
        self.entries.iter().filter(move |e| e.kind() == kind)
    }

    /// One line per record, trailing newline included.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for entry in &self.entries {
            out.push_str(&entry.to_string());
            out.push('\n');
        }
        out
    }

    /// Inverse of [`to_text`](Self::to_text). Blank lines and `#` comments
    /// are tolerated so annotated copies still load.
    pub fn parse(text: &str) -> Result<Self, TranscriptError> {
        let mut entries = Vec::new();
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            let malformed =
                |reason: String| TranscriptError::Malformed { line: lineno, reason };
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut tokens = line.split(' ');
            let time = tokens
                .next()
                .expect("split yields at least one token")
                .parse::<u64>()
                .map_err(|e| malformed(format!("bad tick: {e}")))?;
            let kind = tokens
                .next()
                .ok_or_else(|| malformed("record kind missing after tick".to_string()))?;
            let mut entry = Entry::new(time, kind);
            for token in tokens {
                let (k, v) = token.split_once('=').ok_or_else(|| {
                    malformed(format!("expected key=value field, got {token:?}"))
                })?;
                if k.is_empty() || v.is_empty() {
                    return Err(malformed(format!("empty key or value in {token:?}")));
                }
                entry = entry.field(k, v);
            }
            entries.push(entry);
        }
        Ok(Self { entries })
    }

    /// Pull one named value out of the transcript.
    ///
    /// Queries are colon-separated: a quantity name plus its arguments.
    /// The last matching record wins, so re-issued certificates or repeated
    /// sends answer with their most recent value.
    ///
    /// | query | answer |
    /// |---|---|
    /// | `share:L` | node L's share (from its `state` record) |
    /// | `row:L` | node L's row polynomial coefficients |
    /// | `commitment:L` | founder L's public commitment point |
    /// | `pubkey` | the group public key |
    /// | `threshold` | the signing threshold t |
    /// | `rsa:L` | node L's RSA public key as `e,n` |
    /// | `signature:L` | the threshold signature on L's certificate |
    /// | `verify:V:S` | result of V verifying S's certificate |
    /// | `response:R:J` | the share point R sent joiner J, as `x,y` |
    /// | `ciphertext:T` | the last ciphertext sent to T |
    /// | `delivered:T` | the last plaintext delivered to T |
    pub fn extract(&self, query: &str) -> Result<String, TranscriptError> {
        let parts: Vec<&str> = query.split(':').collect();
        let found = match parts.as_slice() {
            ["share", label] => self.last("state", &[("node", label)], "share"),
            ["row", label] => self.last("state", &[("node", label)], "row"),
            ["commitment", label] => self.last("commitment", &[("node", label)], "point"),
            ["pubkey"] => self.last("pubkey", &[], "point"),
            ["threshold"] => self.last("pubkey", &[], "threshold"),
            ["rsa", label] => self
                .entries
                .iter()
                .rev()
                .find(|e| e.kind() == "rsa" && e.get("node") == Some(label))
                .and_then(|e| Some(format!("{},{}", e.get("e")?, e.get("n")?))),
            ["signature", label] => {
                self.last("certificate", &[("subject", label)], "signature")
            }
            ["verify", verifier, subject] => {
                self.last("verify", &[("node", verifier), ("subject", subject)], "result")
            }
            ["response", responder, joiner] => self
                .entries
                .iter()
                .rev()
                .find(|e| {
                    e.kind() == "response"
                        && e.get("from") == Some(responder)
                        && e.get("to") == Some(joiner)
                })
                .and_then(|e| Some(format!("{},{}", e.get("x")?, e.get("y")?))),
            ["ciphertext", to] => self.last("send", &[("to", to)], "ciphertext"),
            ["delivered", to] => self.last("deliver", &[("to", to)], "plaintext"),
            _ => return Err(TranscriptError::UnknownQuery(query.to_string())),
        };
        found.ok_or_else(|| TranscriptError::NoMatch(query.to_string()))
    }

    /// The `answer` field of the last `kind` record matching all `wanted`
    /// field constraints.
    fn last(&self, kind: &str, wanted: &[(&str, &str)], answer: &str) -> Option<String> {
        self.entries
            .iter()
            .rev()
            .find(|e| {
                e.kind() == kind && wanted.iter().all(|(k, v)| e.get(k) == Some(v))
            })
            .and_then(|e| e.get(answer))
            .map(str::to_string)
    }
}
