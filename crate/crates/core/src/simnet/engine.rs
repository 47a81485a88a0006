//! The discrete-event engine: runs a scenario's founding ceremony at tick
//! zero, then plays the scripted events in (tick, script-order), recording
//! everything in the transcript.
//!
//! The engine is an omniscient narrator. It logs values a wire observer
//! would not see (dealt rows, shares, decrypted plaintexts) because the
//! transcript's job is reproducibility and audit, not confidentiality
//! modeling. The one thing it can never log is the master secret or the
//! master polynomial — no single party, the engine included, ever computes
//! them.
//!
//! Protocol failures during events (a departed responder, a missing
//! certificate, a fixture miss) become `error` records and the run
//! continues; only configuration problems surfaced during founding abort a
//! run. Every random draw — founder polynomials, RSA keys, message drops —
//! comes from one seeded generator, drawn in event order, so a (scenario,
//! seed) pair fully determines the transcript. Pinned polynomials and keys
//! skip their draws entirely, which is how the fully pinned worked example
//! produces the same bytes under any seed.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};
use std::fmt::Write as _;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::cert::{canonical_message, combine_partials, partial_sign, verify, Certificate};
use crate::dkg::{
    aggregate_public_key, aggregate_rows, check_distinct, deal_rows, founding_generate,
    join_complete, join_issue, DealtRow, FounderContribution, ManetPublicInfo, NodeIdentity,
    NodeSecretState,
};
use crate::hashing::HashOracle;
use crate::rsa::{decrypt, encrypt, RsaKeyPair};

use super::scenario::{Action, Scenario, ScenarioError};
use super::transcript::{Entry, Transcript};

/// One simulated node: identity, protocol state, and its place in the
/// neighbor graph.
#[derive(Debug, Clone)]
pub struct SimNode {
    identity: NodeIdentity,
    dkg_state: Option<NodeSecretState>,
    rsa: Option<RsaKeyPair>,
    certificate: Option<Certificate>,
    neighbors: BTreeSet<String>,
    active: bool,
}

impl SimNode {
    pub fn identity(&self) -> &NodeIdentity {
        &self.identity
    }

    pub fn dkg_state(&self) -> Option<&NodeSecretState> {
        self.dkg_state.as_ref()
    }

    pub fn rsa(&self) -> Option<&RsaKeyPair> {
        self.rsa.as_ref()
    }

    pub fn certificate(&self) -> Option<&Certificate> {
        self.certificate.as_ref()
    }

    pub fn neighbors(&self) -> &BTreeSet<String> {
        &self.neighbors
    }

    /// Departed nodes send and receive nothing; their shares stay valid.
    pub fn is_active(&self) -> bool {
        self.active
    }
}

/// Terminal state of a run: every node ever seen, plus the group key.
#[derive(Debug, Clone)]
pub struct SimState {
    nodes: BTreeMap<String, SimNode>,
    info: Option<ManetPublicInfo>,
    debug_keys: bool,
}

impl SimState {
    pub fn node(&self, label: &str) -> Option<&SimNode> {
        self.nodes.get(label)
    }

    /// All nodes, sorted by label.
    pub fn nodes(&self) -> impl Iterator<Item = &SimNode> {
        self.nodes.values()
    }

    pub fn public_info(&self) -> Option<&ManetPublicInfo> {
        self.info.as_ref()
    }

    /// A per-node state dump, one line per node. RSA private exponents
    /// appear only when the scenario set `debug-keys true`; transcripts
    /// themselves never carry them.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if let Some(info) = &self.info {
            let _ = writeln!(
                out,
                "pubkey={} threshold={}",
                info.public_key(),
                info.threshold()
            );
        }
        for (label, node) in &self.nodes {
            let _ = write!(
                out,
                "node={label} status={} hash={}",
                if node.active { "active" } else { "departed" },
                node.identity.hash().value()
            );
            if !node.neighbors.is_empty() {
                let peers: Vec<&str> = node.neighbors.iter().map(String::as_str).collect();
                let _ = write!(out, " neighbors={}", peers.join(","));
            }
            if let Some(state) = &node.dkg_state {
                let _ = write!(
                    out,
                    " share={} row={}",
                    state.share().value(),
                    state.row().to_coeff_string()
                );
            }
            if let Some(keys) = &node.rsa {
                let _ = write!(out, " rsa={},{}", keys.e(), keys.n());
                if self.debug_keys {
                    let _ = write!(out, " rsa-d={}", keys.d());
                }
            }
            if let Some(cert) = &node.certificate {
                let _ = write!(out, " cert={}", cert.signature());
            }
            out.push('\n');
        }
        out
    }
}

/// What a run produces: the transcript and the terminal state.
#[derive(Debug, Clone)]
pub struct SimOutcome {
    transcript: Transcript,
    state: SimState,
}

impl SimOutcome {
    pub fn transcript(&self) -> &Transcript {
        &self.transcript
    }

    pub fn state(&self) -> &SimState {
        &self.state
    }
}

/// Run a scenario to completion.
///
/// Errors only for problems that predate the first event (a founding label
/// whose hash collides or is zero — everything structural was already
/// caught at parse time). Scripted events cannot fail the run; their
/// failures are `error` records in the transcript.
pub fn run_scenario(scenario: &Scenario) -> Result<SimOutcome, ScenarioError> {
    Engine::new(scenario).run()
}

/// A queued event: scripted actions and in-flight message deliveries.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
enum RuntimeAction {
    Scripted(Action),
    Deliver { from: String, to: String, ciphertext: u64 },
}

/// Heap key is (time, seq): sequence numbers break ties, so simultaneous
/// events run in script order and deliveries slot in deterministically.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
struct Queued {
    time: u64,
    seq: u64,
    action: RuntimeAction,
}

struct Engine<'a> {
    sc: &'a Scenario,
    threshold: usize,
    oracle: HashOracle,
    rng: ChaCha12Rng,
    nodes: BTreeMap<String, SimNode>,
    info: Option<ManetPublicInfo>,
    entries: Vec<Entry>,
    queue: BinaryHeap<Reverse<Queued>>,
    seq: u64,
}

impl<'a> Engine<'a> {
    fn new(scenario: &'a Scenario) -> Self {
        Self {
            sc: scenario,
            threshold: scenario.threshold(),
            oracle: scenario.oracle(),
            rng: ChaCha12Rng::seed_from_u64(scenario.seed()),
            nodes: BTreeMap::new(),
            info: None,
            entries: Vec::new(),
            queue: BinaryHeap::new(),
            seq: 0,
        }
    }

    fn run(mut self) -> Result<SimOutcome, ScenarioError> {
        self.found()?;
        for event in self.sc.events() {
            self.enqueue(event.time(), RuntimeAction::Scripted(event.action().clone()));
        }
        while let Some(Reverse(next)) = self.queue.pop() {
            self.step(next.time, next.action);
        }
        Ok(SimOutcome {
            transcript: Transcript::from_entries(self.entries),
            state: SimState {
                nodes: self.nodes,
                info: self.info,
                debug_keys: self.sc.debug_keys(),
            },
        })
    }

    fn log(&mut self, entry: Entry) {
        self.entries.push(entry);
    }

    fn enqueue(&mut self, time: u64, action: RuntimeAction) {
        self.queue.push(Reverse(Queued { time, seq: self.seq, action }));
        self.seq += 1;
    }

    /// The founding ceremony, tick 0: identities, polynomial dealing,
    /// aggregation, the group key, and per-founder RSA keys.
    fn found(&mut self) -> Result<(), ScenarioError> {
        let config = |reason: String| ScenarioError::Config(reason);

        let mut ids = Vec::new();
        for label in self.sc.founders() {
            let id = NodeIdentity::derive(label, &self.oracle)
                .map_err(|e| config(format!("founder {label:?}: {e}")))?;
            self.log(
                Entry::new(0, "founder")
                    .field("node", label)
                    .field("hash", id.hash().value()),
            );
            ids.push(id);
        }
        check_distinct(&ids).map_err(|e| config(format!("founding ceremony: {e}")))?;

        let mut contributions = Vec::new();
        for id in &ids {
            let contribution = match self.sc.polynomials.get(id.label()) {
                Some(poly) => FounderContribution::from_polynomial(poly.clone(), self.sc.params()),
                None => founding_generate(self.sc.degree(), self.sc.params(), &mut self.rng),
            }
            .expect("polynomial degrees were validated at parse time");
            contributions.push(contribution);
        }

        let mut rows_for: BTreeMap<String, Vec<DealtRow>> = BTreeMap::new();
        for (id, contribution) in ids.iter().zip(&contributions) {
            self.log(
                Entry::new(0, "commitment")
                    .field("node", id.label())
                    .field("point", contribution.commitment()),
            );
            for row in deal_rows(contribution, id, &ids) {
                self.log(
                    Entry::new(0, "row")
                        .field("from", row.from_label())
                        .field("to", row.to_label())
                        .field("coeffs", row.row().to_coeff_string()),
                );
                rows_for.entry(row.to_label().to_string()).or_default().push(row);
            }
        }

        for id in &ids {
            let rows = &rows_for[id.label()];
            let state = aggregate_rows(id, rows, &ids, self.sc.degree())
                .expect("the engine dealt one well-formed row per founder");
            self.log(
                Entry::new(0, "state")
                    .field("node", id.label())
                    .field("row", state.row().to_coeff_string())
                    .field("share", state.share().value()),
            );
            self.nodes.insert(
                id.label().to_string(),
                SimNode {
                    identity: id.clone(),
                    dkg_state: Some(state),
                    rsa: None,
                    certificate: None,
                    neighbors: BTreeSet::new(),
                    active: true,
                },
            );
        }

        let commitments: Vec<(String, _)> = ids
            .iter()
            .zip(&contributions)
            .map(|(id, c)| (id.label().to_string(), c.commitment()))
            .collect();
        let pk = aggregate_public_key(&commitments, self.sc.params())
            .expect("commitments are generator multiples of residues below r");
        self.log(
            Entry::new(0, "pubkey")
                .field("point", pk)
                .field("threshold", self.threshold),
        );
        self.info = Some(
            ManetPublicInfo::new(pk, self.sc.degree()).expect("degree was validated at parse time"),
        );

        for label in self.sc.founders().to_vec() {
            self.link_new_node(&label);
            self.assign_rsa(0, &label);
        }
        Ok(())
    }

    /// Wire a newly active node into the neighbor graph: either the
    /// explicit edge list (edges whose other end exists) or, by default,
    /// everyone already present.
    fn link_new_node(&mut self, label: &str) {
        for peer in self.prospective_neighbors(label) {
            if let Some(node) = self.nodes.get_mut(&peer) {
                node.neighbors.insert(label.to_string());
            }
            if let Some(node) = self.nodes.get_mut(label) {
                node.neighbors.insert(peer);
            }
        }
    }

    /// Give `label` its RSA keypair — pinned if the scenario says so,
    /// freshly generated otherwise — and record the public half.
    fn assign_rsa(&mut self, time: u64, label: &str) {
        let keys = match self.sc.rsa_keys.get(label) {
            Some(&(p, q, e)) => {
                RsaKeyPair::from_primes(p, q, e).expect("pinned RSA keys were validated at parse time")
            }
            None => RsaKeyPair::generate(self.sc.rsa_prime_bits, &mut self.rng)
                .expect("rsa-prime-bits was validated at parse time"),
        };
        self.log(
            Entry::new(time, "rsa")
                .field("node", label)
                .field("e", keys.e())
                .field("n", keys.n()),
        );
        if let Some(node) = self.nodes.get_mut(label) {
            node.rsa = Some(keys);
        }
    }

    /// The neighbor set `label` has — or would get, if it joined right now.
    fn prospective_neighbors(&self, label: &str) -> BTreeSet<String> {
        match &self.sc.neighbor_edges {
            Some(edges) => edges
                .iter()
                .filter_map(|(a, b)| {
                    if a == label && self.nodes.contains_key(b) {
                        Some(b.clone())
                    } else if b == label && self.nodes.contains_key(a) {
                        Some(a.clone())
                    } else {
                        None
                    }
                })
                .collect(),
            None => self.nodes.keys().filter(|k| *k != label).cloned().collect(),
        }
    }

    /// Why `label` cannot respond right now, if it cannot.
    fn unavailability(&self, label: &str, neighbors: &BTreeSet<String>) -> Option<&'static str> {
        let Some(node) = self.nodes.get(label) else {
            return Some("unknown-node");
        };
        if !node.active {
            return Some("node-departed");
        }
        if node.dkg_state.is_none() {
            return Some("no-share");
        }
        if !neighbors.contains(label) {
            return Some("not-a-neighbor");
        }
        None
    }

    /// Pick up to `want` responders for `requester`: the via-list first (a
    /// skip record explains each one that cannot serve), then the remaining
    /// eligible neighbors in label order. Skip records name the requester
    /// the way the event does: `subject` for issuance, `node` otherwise.
    fn select_responders(
        &mut self,
        time: u64,
        event: &str,
        requester: &str,
        neighbors: &BTreeSet<String>,
        via: &[String],
        want: usize,
    ) -> Vec<String> {
        let requester_key = if event == "issue" { "subject" } else { "node" };
        let mut chosen: Vec<String> = Vec::new();
        for candidate in via {
            if chosen.len() == want {
                break;
            }
            match self.unavailability(candidate, neighbors) {
                None => chosen.push(candidate.clone()),
                Some(reason) => self.log(
                    Entry::new(time, "skip")
                        .field("event", event)
                        .field(requester_key, requester)
                        .field("responder", candidate)
                        .field("reason", reason),
                ),
            }
        }
        let backups: Vec<String> = neighbors
            .iter()
            .filter(|n| *n != requester && !chosen.contains(n))
            .filter(|n| self.unavailability(n, neighbors).is_none())
            .cloned()
            .collect();
        for candidate in backups {
            if chosen.len() == want {
                break;
            }
            chosen.push(candidate);
        }
        chosen
    }

    fn step(&mut self, time: u64, action: RuntimeAction) {
        match action {
            RuntimeAction::Scripted(Action::Join { node, via }) => self.step_join(time, &node, &via),
            RuntimeAction::Scripted(Action::Issue { subject, via }) => {
                self.step_issue(time, &subject, &via)
            }
            RuntimeAction::Scripted(Action::Verify { verifier, subject }) => {
                self.step_verify(time, &verifier, &subject)
            }
            RuntimeAction::Scripted(Action::Send { from, to, message }) => {
                self.step_send(time, &from, &to, message)
            }
            RuntimeAction::Scripted(Action::Depart { node }) => self.step_depart(time, &node),
            RuntimeAction::Deliver { from, to, ciphertext } => {
                self.step_deliver(time, &from, &to, ciphertext)
            }
        }
    }

    fn step_join(&mut self, time: u64, label: &str, via: &[String]) {
        let fail = |reason: &str| {
            Entry::new(time, "error")
                .field("event", "join")
                .field("node", label)
                .field("reason", reason)
        };
        let hash = match self.oracle.hash_to_range(label) {
            Ok(h) => h,
            Err(_) => return self.log(fail("hash-unavailable")),
        };
        let identity = match NodeIdentity::new(label, hash) {
            Ok(id) => id,
            Err(_) => return self.log(fail("zero-identity")),
        };
        if self.nodes.values().any(|n| n.identity.hash() == hash) {
            let entry = fail("duplicate-identity").field("hash", hash.value());
            return self.log(entry);
        }

        let neighbors = self.prospective_neighbors(label);
        let responders =
            self.select_responders(time, "join", label, &neighbors, via, self.threshold);
        if responders.len() < self.threshold {
            let entry = fail("insufficient-responders")
                .field("got", responders.len())
                .field("need", self.threshold);
            return self.log(entry);
        }

        self.log(
            Entry::new(time, "join")
                .field("node", label)
                .field("hash", hash.value())
                .field("responders", responders.join(",")),
        );
        let mut responses = Vec::new();
        for responder in &responders {
            let state = self.nodes[responder]
                .dkg_state
                .as_ref()
                .expect("selection only returns share-holding nodes");
            let point = join_issue(state, &identity);
            self.log(
                Entry::new(time, "response")
                    .field("from", responder)
                    .field("to", label)
                    .field("x", point.x().value())
                    .field("y", point.y().value()),
            );
            responses.push(point);
        }
        let state = match join_complete(&identity, &responses, self.sc.degree()) {
            Ok(state) => state,
            Err(_) => return self.log(fail("inconsistent-responses")),
        };
        self.log(
            Entry::new(time, "state")
                .field("node", label)
                .field("row", state.row().to_coeff_string())
                .field("share", state.share().value()),
        );
        self.nodes.insert(
            label.to_string(),
            SimNode {
                identity,
                dkg_state: Some(state),
                rsa: None,
                certificate: None,
                neighbors: BTreeSet::new(),
                active: true,
            },
        );
        self.link_new_node(label);
        self.assign_rsa(time, label);
    }

    fn step_issue(&mut self, time: u64, subject: &str, via: &[String]) {
        let fail = |reason: &str| {
            Entry::new(time, "error")
                .field("event", "issue")
                .field("subject", subject)
                .field("reason", reason)
        };
        let Some(node) = self.nodes.get(subject) else {
            return self.log(fail("unknown-node"));
        };
        if !node.active {
            return self.log(fail("node-departed"));
        }
        let (e, n) = node
            .rsa
            .as_ref()
            .expect("active nodes always hold RSA keys")
            .public();
        let neighbors = node.neighbors.clone();
        let message = canonical_message(subject, e, n);

        let mut signers =
            self.select_responders(time, "issue", subject, &neighbors, via, self.threshold);
        if signers.len() < self.threshold {
            // The subject can vouch for itself once when its neighborhood
            // falls one short.
            signers.push(subject.to_string());
        }
        if signers.len() < self.threshold {
            let entry = fail("insufficient-signers")
                .field("got", signers.len())
                .field("need", self.threshold);
            return self.log(entry);
        }
        self.log(
            Entry::new(time, "issue")
                .field("subject", subject)
                .field("signers", signers.join(",")),
        );

        let mut partials = Vec::new();
        for signer in &signers {
            let state = self.nodes[signer]
                .dkg_state
                .as_ref()
                .expect("signers hold shares by construction");
            let partial = match partial_sign(state, &message, &self.oracle) {
                Ok(p) => p,
                Err(_) => return self.log(fail("hash-unavailable")),
            };
            self.log(
                Entry::new(time, "partial")
                    .field("signer", signer)
                    .field("subject", subject)
                    .field("point", partial.point()),
            );
            partials.push(partial);
        }
        let signature = combine_partials(&partials, self.threshold)
            .expect("distinct signers over one message meet the threshold");
        let cert = Certificate::new(subject, e, n, signature);
        let info = self.info.as_ref().expect("founding established the group key");
        match verify(&cert, &info.public_key(), self.sc.params(), &self.oracle) {
            Err(_) => return self.log(fail("hash-unavailable")),
            Ok(false) => return self.log(fail("signature-invalid")),
            Ok(true) => {}
        }
        self.log(
            Entry::new(time, "certificate")
                .field("subject", subject)
                .field("e", e)
                .field("n", n)
                .field("signature", signature),
        );
        self.nodes
            .get_mut(subject)
            .expect("subject existence checked above")
            .certificate = Some(cert);
    }

    fn step_verify(&mut self, time: u64, verifier: &str, subject: &str) {
        let fail = |reason: &str| {
            Entry::new(time, "error")
                .field("event", "verify")
                .field("node", verifier)
                .field("subject", subject)
                .field("reason", reason)
        };
        match self.nodes.get(verifier) {
            None => return self.log(fail("unknown-node")),
            Some(node) if !node.active => return self.log(fail("node-departed")),
            Some(_) => {}
        }
        let Some(target) = self.nodes.get(subject) else {
            return self.log(fail("unknown-node"));
        };
        let Some(cert) = &target.certificate else {
            return self.log(fail("no-certificate"));
        };
        let info = self.info.as_ref().expect("founding established the group key");
        match verify(cert, &info.public_key(), self.sc.params(), &self.oracle) {
            Err(_) => self.log(fail("hash-unavailable")),
            Ok(result) => self.log(
                Entry::new(time, "verify")
                    .field("node", verifier)
                    .field("subject", subject)
                    .field("result", result),
            ),
        }
    }

    fn step_send(&mut self, time: u64, from: &str, to: &str, message: u64) {
        let fail = |reason: &str| {
            Entry::new(time, "error")
                .field("event", "send")
                .field("from", from)
                .field("to", to)
                .field("reason", reason)
        };
        match self.nodes.get(from) {
            None => return self.log(fail("unknown-node")),
            Some(node) if !node.active => return self.log(fail("node-departed")),
            Some(_) => {}
        }
        let Some(recipient) = self.nodes.get(to) else {
            return self.log(fail("unknown-node"));
        };
        let Some(cert) = &recipient.certificate else {
            return self.log(fail("no-certificate"));
        };
        // Trust, then encrypt: the sender only uses a key it has verified
        // against the group's certificate chain of exactly one link.
        let info = self.info.as_ref().expect("founding established the group key");
        match verify(cert, &info.public_key(), self.sc.params(), &self.oracle) {
            Err(_) => return self.log(fail("hash-unavailable")),
            Ok(false) => return self.log(fail("certificate-invalid")),
            Ok(true) => {}
        }
        let (e, n) = cert.rsa_public();
        let ciphertext = match encrypt(message, e, n) {
            Ok(c) => c,
            Err(_) => {
                let entry = fail("message-too-large").field("message", message).field("n", n);
                return self.log(entry);
            }
        };
        self.log(
            Entry::new(time, "send")
                .field("from", from)
                .field("to", to)
                .field("ciphertext", ciphertext),
        );
        self.enqueue(
            time + 1,
            RuntimeAction::Deliver {
                from: from.to_string(),
                to: to.to_string(),
                ciphertext,
            },
        );
    }

    fn step_deliver(&mut self, time: u64, from: &str, to: &str, ciphertext: u64) {
        if self.sc.drop_probability > 0.0 && self.rng.random::<f64>() < self.sc.drop_probability
        {
            return self.log(
                Entry::new(time, "drop").field("from", from).field("to", to),
            );
        }
        let recipient = self.nodes.get(to).expect("deliveries only follow sends");
        if !recipient.active {
            return self.log(
                Entry::new(time, "error")
                    .field("event", "deliver")
                    .field("from", from)
                    .field("to", to)
                    .field("reason", "recipient-departed"),
            );
        }
        let keys = recipient.rsa.as_ref().expect("certified nodes hold RSA keys");
        let plaintext = decrypt(ciphertext, keys.d(), keys.n())
            .expect("the ciphertext is a residue of the recipient's modulus");
        self.log(
            Entry::new(time, "deliver")
                .field("from", from)
                .field("to", to)
                .field("ciphertext", ciphertext)
                .field("plaintext", plaintext),
        );
    }

    fn step_depart(&mut self, time: u64, label: &str) {
        let fail = |reason: &str| {
            Entry::new(time, "error")
                .field("event", "depart")
                .field("node", label)
                .field("reason", reason)
        };
        match self.nodes.get_mut(label) {
            None => {
                let entry = fail("unknown-node");
                self.log(entry);
            }
            Some(node) if !node.active => {
                let entry = fail("node-departed");
                self.log(entry);
            }
            Some(node) => {
                node.active = false;
                self.log(Entry::new(time, "depart").field("node", label));
            }
        }
    }
}
