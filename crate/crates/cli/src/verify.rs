//! The `verify-cert` and `verify-transcript` subcommands: independent
//! re-checking of artifacts another run produced.
//!
//! `verify-cert` re-runs the pairing equation on a stored certificate.
//! `verify-transcript` replays every claim a transcript makes — identity
//! hashes, the commitment sum behind the group key, share/row agreement,
//! pairwise row symmetry, join responses, certificate signatures, recorded
//! verification results, and delivered ciphertexts — and reports one tally
//! line per category. A transcript that fails any check (or does not parse
//! at all) is the verification failing, not a process error, so it exits 1.

use std::fs;
use std::path::PathBuf;

use anyhow::Context;
use clap::Args;

use manet_pki::algebra::UnivariatePolynomial;
use manet_pki::cert::{self, Certificate};
use manet_pki::curve::{BasePoint, CurveParams, Point};
use manet_pki::hashing::HashOracle;
use manet_pki::rsa;
use manet_pki::simnet::{Entry, Transcript};

use crate::assets::{self, HashModeArg};

#[derive(Args)]
pub struct CertArgs {
    /// Certificate file to check.
    #[arg(long)]
    cert: PathBuf,

    /// Curve description file; defaults to the built-in curve.
    #[arg(long)]
    params: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "fixture")]
    hash_mode: HashModeArg,

    /// Identity-hash fixture file (fixture mode only); defaults to the
    /// built-in table.
    #[arg(long)]
    fixtures: Option<PathBuf>,

    /// Group public key the signature must verify against.
    #[arg(long, default_value = "2651,2267")]
    pubkey: String,
}

pub fn cert(args: CertArgs) -> anyhow::Result<bool> {
    let params = assets::load_params(args.params.as_deref())?;
    let oracle = assets::build_oracle(&params, args.hash_mode, args.fixtures.as_deref())?;
    let text = fs::read_to_string(&args.cert)
        .with_context(|| format!("reading {}", args.cert.display()))?;
    let cert = Certificate::from_text(&text, &params)
        .with_context(|| format!("parsing {}", args.cert.display()))?;
    let pubkey = assets::parse_point(&params, &args.pubkey).context("bad --pubkey")?;

    let valid = cert::verify(&cert, &pubkey, &params, &oracle)?;
    println!(
        "certificate for {}: {}",
        cert.subject(),
        if valid { "valid" } else { "INVALID" }
    );
    Ok(valid)
}

#[derive(Args)]
pub struct TranscriptArgs {
    /// Transcript file to check.
    transcript: PathBuf,

    /// Curve description file; defaults to the built-in curve.
    #[arg(long)]
    params: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "fixture")]
    hash_mode: HashModeArg,

    /// Identity-hash fixture file (fixture mode only); defaults to the
    /// built-in table.
    #[arg(long)]
    fixtures: Option<PathBuf>,
}

/// One category of checks: how many ran, and what went wrong.
#[derive(Default)]
struct Tally {
    checked: usize,
    failures: Vec<String>,
}

impl Tally {
    fn check(&mut self, ok: bool, failure: impl FnOnce() -> String) {
        self.checked += 1;
        if !ok {
            self.failures.push(failure());
        }
    }
}

pub fn transcript(args: TranscriptArgs) -> anyhow::Result<bool> {
    let params = assets::load_params(args.params.as_deref())?;
    let oracle = assets::build_oracle(&params, args.hash_mode, args.fixtures.as_deref())?;
    let text = fs::read_to_string(&args.transcript)
        .with_context(|| format!("reading {}", args.transcript.display()))?;
    let transcript = match Transcript::parse(&text) {
        Ok(t) => t,
        Err(err) => {
            println!("transcript is malformed: {err}");
            return Ok(false);
        }
    };

    let checker = Checker::new(&transcript, &params, &oracle);
    let categories = [
        ("hashes", checker.check_hashes()),
        ("commitments", checker.check_commitments()),
        ("rows", checker.check_rows()),
        ("symmetry", checker.check_symmetry()),
        ("responses", checker.check_responses()),
        ("certificates", checker.check_certificates()),
        ("verifications", checker.check_verifications()),
        ("deliveries", checker.check_deliveries()),
    ];

    let mut failed = 0;
    for (name, tally) in &categories {
        println!("{name:<13} {} checked, {} failed", tally.checked, tally.failures.len());
        failed += tally.failures.len();
    }
    for (_, tally) in &categories {
        for failure in &tally.failures {
            println!("  {failure}");
        }
    }
    if failed == 0 {
        println!("transcript: ok");
    } else {
        println!("transcript: {failed} check(s) failed");
    }
    Ok(failed == 0)
}

struct Checker<'a> {
    transcript: &'a Transcript,
    params: &'a CurveParams,
    oracle: &'a HashOracle,
    /// node label -> identity hash, from `founder` and `join` records.
    hashes: Vec<(String, u64)>,
    /// node label -> row polynomial, from `state` records.
    rows: Vec<(String, UnivariatePolynomial)>,
}

fn u64_field(entry: &Entry, key: &str) -> Option<u64> {
    entry.get(key)?.parse().ok()
}

impl<'a> Checker<'a> {
    fn new(transcript: &'a Transcript, params: &'a CurveParams, oracle: &'a HashOracle) -> Self {
        let mut hashes = Vec::new();
        let mut rows = Vec::new();
        for entry in transcript.entries() {
            match entry.kind() {
                "founder" | "join" => {
                    if let (Some(node), Some(hash)) =
                        (entry.get("node"), u64_field(entry, "hash"))
                    {
                        hashes.push((node.to_string(), hash));
                    }
                }
                "state" => {
                    if let (Some(node), Some(row)) = (
                        entry.get("node"),
                        entry
                            .get("row")
                            .and_then(|c| {
                                UnivariatePolynomial::parse_coeff_string(c, params.r()).ok()
                            }),
                    ) {
                        rows.push((node.to_string(), row));
                    }
                }
                _ => {}
            }
        }
        Self { transcript, params, oracle, hashes, rows }
    }

    fn hash_of(&self, label: &str) -> Option<u64> {
        self.hashes.iter().find(|(l, _)| l == label).map(|(_, h)| *h)
    }

    fn row_of(&self, label: &str) -> Option<&UnivariatePolynomial> {
        self.rows.iter().find(|(l, _)| l == label).map(|(_, r)| r)
    }

    fn entries_of(&self, kind: &'static str) -> impl Iterator<Item = &Entry> + '_ {
        self.transcript.entries().iter().filter(move |e| e.kind() == kind)
    }

    /// Recorded identity hashes agree with the hash oracle.
    fn check_hashes(&self) -> Tally {
        let mut tally = Tally::default();
        for (label, recorded) in &self.hashes {
            match self.oracle.hash_to_range(label) {
                Ok(h) => tally.check(h.value() == *recorded, || {
                    format!("hash for {label}: recorded {recorded}, oracle says {}", h.value())
                }),
                Err(err) => tally.check(false, || format!("hash for {label}: {err}")),
            }
        }
        tally
    }

    /// The founder commitments sum to the recorded group public key.
    fn check_commitments(&self) -> Tally {
        let mut tally = Tally::default();
        let commitments: Vec<&Entry> = self.entries_of("commitment").collect();
        let pubkey = self.transcript.extract("pubkey").ok();
        if commitments.is_empty() && pubkey.is_none() {
            return tally;
        }
        let (Some(pubkey), false) = (pubkey, commitments.is_empty()) else {
            tally.check(false, || {
                "commitments and pubkey must appear together".to_string()
            });
            return tally;
        };
        let mut sum = Point::infinity();
        for entry in &commitments {
            match self.point_field(entry, "point") {
                Ok(pt) => sum = sum.add(&pt),
                Err(failure) => {
                    tally.check(false, || failure);
                    return tally;
                }
            }
        }
        match assets::parse_point(self.params, &pubkey) {
            Ok(pk) => tally.check(sum == pk, || {
                format!("commitments sum to {sum}, but the recorded public key is {pk}")
            }),
            Err(err) => tally.check(false, || format!("recorded public key: {err:#}")),
        }
        tally
    }

    fn point_field(&self, entry: &Entry, key: &str) -> Result<BasePoint, String> {
        let text = entry
            .get(key)
            .ok_or_else(|| format!("{} record is missing {key}=", entry.kind()))?;
        assets::parse_point(self.params, text)
            .map_err(|err| format!("{} record: bad point {text}: {err:#}", entry.kind()))
    }

    /// Each node's share is its row polynomial at zero.
    fn check_rows(&self) -> Tally {
        let mut tally = Tally::default();
        for entry in self.entries_of("state") {
            let node = entry.get("node").unwrap_or("?");
            match (self.row_of(node), u64_field(entry, "share")) {
                (Some(row), Some(share)) => {
                    let at_zero = row.eval(self.params.share_element(0)).value();
                    tally.check(at_zero == share, || {
                        format!("{node}: share {share} but row gives {at_zero} at zero")
                    });
                }
                _ => tally.check(false, || format!("{node}: unreadable state record")),
            }
        }
        tally
    }

    /// Any two rows agree where they cross: S_i(h_j) = S_j(h_i).
    fn check_symmetry(&self) -> Tally {
        let mut tally = Tally::default();
        let nodes: Vec<&str> = self
            .rows
            .iter()
            .map(|(l, _)| l.as_str())
            .filter(|l| self.hash_of(l).is_some())
            .collect();
        for (i, a) in nodes.iter().enumerate() {
            for b in &nodes[i + 1..] {
                let (row_a, row_b) = (self.row_of(a).unwrap(), self.row_of(b).unwrap());
                let (h_a, h_b) = (self.hash_of(a).unwrap(), self.hash_of(b).unwrap());
                let ab = row_a.eval(self.params.share_element(h_b)).value();
                let ba = row_b.eval(self.params.share_element(h_a)).value();
                tally.check(ab == ba, || {
                    format!("rows of {a} and {b} disagree: S({h_b})={ab} vs S({h_a})={ba}")
                });
            }
        }
        tally
    }

    /// Join responses are genuine row evaluations: the point a responder R
    /// sends joiner J is (h_R, S_R(h_J)).
    fn check_responses(&self) -> Tally {
        let mut tally = Tally::default();
        for entry in self.entries_of("response") {
            let from = entry.get("from").unwrap_or("?");
            let to = entry.get("to").unwrap_or("?");
            let context = (
                self.row_of(from),
                self.hash_of(from),
                self.hash_of(to),
                u64_field(entry, "x"),
                u64_field(entry, "y"),
            );
            let (Some(row), Some(h_from), Some(h_to), Some(x), Some(y)) = context else {
                tally.check(false, || {
                    format!("response {from}->{to}: missing row, hash, or coordinates")
                });
                continue;
            };
            let expected = row.eval(self.params.share_element(h_to)).value();
            tally.check(x == h_from && y == expected, || {
                format!("response {from}->{to}: recorded ({x},{y}), expected ({h_from},{expected})")
            });
        }
        tally
    }

    /// Certificate signatures pass the pairing check against the recorded
    /// group public key.
    fn check_certificates(&self) -> Tally {
        let mut tally = Tally::default();
        let Ok(pubkey) = self
            .transcript
            .extract("pubkey")
            .map_err(|e| e.to_string())
            .and_then(|p| assets::parse_point(self.params, &p).map_err(|e| format!("{e:#}")))
        else {
            for entry in self.entries_of("certificate") {
                let subject = entry.get("subject").unwrap_or("?");
                tally.check(false, || {
                    format!("certificate for {subject}: no usable public key in transcript")
                });
            }
            return tally;
        };
        for entry in self.entries_of("certificate") {
            let subject = entry.get("subject").unwrap_or("?");
            let fields = (
                u64_field(entry, "e"),
                u64_field(entry, "n"),
                self.point_field(entry, "signature"),
            );
            let (Some(e), Some(n), Ok(signature)) = fields else {
                tally.check(false, || {
                    format!("certificate for {subject}: unreadable record")
                });
                continue;
            };
            let cert = Certificate::new(subject, e, n, signature);
            match cert::verify(&cert, &pubkey, self.params, self.oracle) {
                Ok(valid) => tally.check(valid, || {
                    format!("certificate for {subject}: signature does not verify")
                }),
                Err(err) => {
                    tally.check(false, || format!("certificate for {subject}: {err}"))
                }
            }
        }
        tally
    }

    /// Recorded verification results are reproducible.
    fn check_verifications(&self) -> Tally {
        let mut tally = Tally::default();
        for entry in self.entries_of("verify") {
            let node = entry.get("node").unwrap_or("?");
            let subject = entry.get("subject").unwrap_or("?");
            let recorded = entry.get("result").unwrap_or("?");
            let recomputed = self
                .transcript
                .extract(&format!("signature:{subject}"))
                .is_ok_and(|_| !self.certificate_failures(subject));
            tally.check(recorded == recomputed.to_string(), || {
                format!("verify {node} of {subject}: recorded {recorded}, recomputed {recomputed}")
            });
        }
        tally
    }

    /// True when the subject's certificate records fail re-verification.
    fn certificate_failures(&self, subject: &str) -> bool {
        let tally = self.check_certificates();
        tally
            .failures
            .iter()
            .any(|f| f.starts_with(&format!("certificate for {subject}:")))
    }

    /// Delivered plaintexts re-encrypt to the recorded ciphertexts under
    /// the recipient's public key.
    fn check_deliveries(&self) -> Tally {
        let mut tally = Tally::default();
        for entry in self.entries_of("deliver") {
            let to = entry.get("to").unwrap_or("?");
            let from = entry.get("from").unwrap_or("?");
            let fields = (
                u64_field(entry, "ciphertext"),
                u64_field(entry, "plaintext"),
                self.transcript.extract(&format!("rsa:{to}")).ok(),
            );
            let (Some(ciphertext), Some(plaintext), Some(rsa)) = fields else {
                tally.check(false, || {
                    format!("delivery {from}->{to}: missing ciphertext, plaintext, or key")
                });
                continue;
            };
            let Some((e, n)) = rsa
                .split_once(',')
                .and_then(|(e, n)| Some((e.parse().ok()?, n.parse().ok()?)))
            else {
                tally.check(false, || format!("delivery {from}->{to}: unreadable key {rsa}"));
                continue;
            };
            match rsa::encrypt(plaintext, e, n) {
                Ok(c) => tally.check(c == ciphertext, || {
                    format!(
                        "delivery {from}->{to}: plaintext {plaintext} encrypts to {c}, \
                         not the recorded {ciphertext}"
                    )
                }),
                Err(err) => tally.check(false, || format!("delivery {from}->{to}: {err}")),
            }
        }
        tally
    }
}
