//! Dealer-free distributed key generation and share issuance.
//!
//! Founding works without any trusted dealer: every founder invents its own
//! symmetric bivariate polynomial F_i(x, z) of degree d, publishes the
//! commitment Y_i = F_i(0,0)·P, and deals the row F_i(h_j, z) to each peer j
//! (h_j is the peer's identity hash). Each node sums the rows it received
//! into S_j(z) = F(h_j, z), where F = ΣF_i is the master polynomial *nobody
//! knows*. The node's signing share is s_j = S_j(0) = F(h_j, 0) — a Shamir
//! share of the master secret F(0,0) — and the group public key is the sum
//! of the commitments, which commits to F(0,0) in its order-r component
//! (that is the only part the pairing, and hence verification, consumes).
//!
//! Later arrivals need no ceremony: any t = d + 1 members each evaluate
//! their own row at the newcomer's hash and send the value. Those responses
//! sit on the degree-d polynomial F(x, h_new), so interpolating them yields
//! the newcomer's entire row F(h_new, z) — symmetry of F turns a column into
//! a row — and fewer than t responses pin down nothing.
//!
//! The [`audit`] submodule can reconstruct F from the founders' private
//! polynomials for forensics; no protocol path uses it.

use thiserror::Error;

use rand::Rng;

use crate::algebra::{
    lagrange_interpolate_poly, AlgebraError, FieldElement, SharePoint,
    SymmetricBivariatePolynomial, UnivariatePolynomial,
};
use crate::curve::{BasePoint, CurveParams, Point};
use crate::hashing::{HashOracle, HashingError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DkgError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Hashing(#[from] HashingError),
    /// An identity hash of zero would place the node's share at x = 0, the
    /// master secret itself.
    #[error("label {label:?} hashes to zero and cannot be used as an identity")]
    ZeroIdentity { label: String },
    /// Two distinct labels landed on one hash; shares would collide.
    #[error("labels {first:?} and {second:?} share identity hash {hash}")]
    DuplicateIdentity { first: String, second: String, hash: u64 },
    /// The sharing degree must be at least 1 (threshold 2): degree 0 would
    /// hand every node the master secret.
    #[error("sharing degree must be at least 1, got {0}")]
    DegreeTooSmall(usize),
    /// A row addressed to someone else ended up in this aggregation.
    #[error("row from {from:?} is addressed to {to:?}, not {expected:?}")]
    WrongRecipient { from: String, to: String, expected: String },
    /// Aggregation saw no row from this founder.
    #[error("missing row from founder {0:?}")]
    MissingRow(String),
    /// Aggregation saw a sender twice, or one outside the founder set.
    #[error("unexpected or repeated row from {0:?}")]
    UnexpectedRow(String),
    /// A dealt row of impossible shape (degree above the ceremony's d).
    #[error("row from {from:?} has degree {got}, above the ceremony degree {max}")]
    RowDegreeTooHigh { from: String, got: usize, max: usize },
    /// A founding commitment outside the usable part of the curve group.
    #[error("commitment from {0:?} has no order-r component")]
    CommitmentOffSubgroup(String),
    /// Aggregating an empty commitment list is always a caller bug.
    #[error("cannot aggregate an empty commitment set")]
    NoCommitments,
    /// A joiner needs at least t responses.
    #[error("{got} join responses cannot meet the threshold of {need}")]
    InsufficientResponses { got: usize, need: usize },
    /// Join responses that do not lie on any degree-d polynomial: at least
    /// one responder evaluated a different master polynomial.
    #[error("join responses interpolate to degree {got}, above the ceremony degree {max}")]
    InconsistentResponses { got: usize, max: usize },
}

/// A node's public identity: its label and the hash h = HTR(label) ∈ Z_r*
/// that serves as its Shamir abscissa.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeIdentity {
    label: String,
    hash: FieldElement,
}

impl NodeIdentity {
    /// Build an identity from a pre-computed hash (must be nonzero).
    pub fn new(label: impl Into<String>, hash: FieldElement) -> Result<Self, DkgError> {
        let label = label.into();
        if hash.is_zero() {
            return Err(DkgError::ZeroIdentity { label });
        }
        Ok(Self { label, hash })
    }

    /// Derive the identity through the hash oracle.
    pub fn derive(label: &str, oracle: &HashOracle) -> Result<Self, DkgError> {
        let hash = oracle.hash_to_range(label)?;
        Self::new(label, hash)
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn hash(&self) -> FieldElement {
        self.hash
    }
}

/// Reject identity sets with colliding hashes (distinct labels only; the
/// same label twice is also a duplicate).
pub fn check_distinct(identities: &[NodeIdentity]) -> Result<(), DkgError> {
    for (i, a) in identities.iter().enumerate() {
        for b in &identities[..i] {
            if a.hash == b.hash {
                return Err(DkgError::DuplicateIdentity {
                    first: b.label.clone(),
                    second: a.label.clone(),
                    hash: a.hash.value(),
                });
            }
        }
    }
    Ok(())
}

/// One founder's secret input to the ceremony plus its public commitment.
#[derive(Debug, Clone)]
pub struct FounderContribution {
    polynomial: SymmetricBivariatePolynomial,
    commitment: BasePoint,
}

impl FounderContribution {
    /// Wrap an explicit polynomial (used when replaying pinned ceremonies).
    pub fn from_polynomial(
        polynomial: SymmetricBivariatePolynomial,
        params: &CurveParams,
    ) -> Result<Self, DkgError> {
        if polynomial.degree() < 1 {
            return Err(DkgError::DegreeTooSmall(polynomial.degree()));
        }
        let commitment = params.mul_generator(polynomial.secret().value());
        Ok(Self { polynomial, commitment })
    }

    /// The secret polynomial; leaves this struct only for dealing and audit.
    pub fn polynomial(&self) -> &SymmetricBivariatePolynomial {
        &self.polynomial
    }

    /// Y_i = F_i(0,0)·P, safe to publish.
    pub fn commitment(&self) -> BasePoint {
        self.commitment
    }
}

/// Sample a fresh founding contribution of the given degree over Z_r.
pub fn founding_generate(
    degree: usize,
    params: &CurveParams,
    rng: &mut impl Rng,
) -> Result<FounderContribution, DkgError> {
    if degree < 1 {
        return Err(DkgError::DegreeTooSmall(degree));
    }
    let polynomial = SymmetricBivariatePolynomial::random(params.r(), degree, rng)?;
    FounderContribution::from_polynomial(polynomial, params)
}

/// A private message of the ceremony: founder `from` tells node `to` its
/// row of F_from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DealtRow {
    from: String,
    to: String,
    row: UnivariatePolynomial,
}

impl DealtRow {
    pub fn new(from: impl Into<String>, to: impl Into<String>, row: UnivariatePolynomial) -> Self {
        Self { from: from.into(), to: to.into(), row }
    }

    pub fn from_label(&self) -> &str {
        &self.from
    }

    pub fn to_label(&self) -> &str {
        &self.to
    }

    pub fn row(&self) -> &UnivariatePolynomial {
        &self.row
    }
}

/// Deal one founder's rows to every recipient (founders deal to themselves
/// too — their own row is part of the sum like anyone else's).
pub fn deal_rows(
    contribution: &FounderContribution,
    from: &NodeIdentity,
    recipients: &[NodeIdentity],
) -> Vec<DealtRow> {
    recipients
        .iter()
        .map(|to| {
            DealtRow::new(
                from.label(),
                to.label(),
                contribution.polynomial.eval_row(to.hash()),
            )
        })
        .collect()
}

/// A node's private protocol state after key generation: its row of the
/// master polynomial and the signing share (the row at zero).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeSecretState {
    identity: NodeIdentity,
    row: UnivariatePolynomial,
    share: FieldElement,
}

impl NodeSecretState {
    /// Bind a row polynomial to an identity; the share falls out as S(0).
    pub fn assemble(identity: NodeIdentity, row: UnivariatePolynomial) -> Self {
        let share = row.constant_term();
        Self { identity, row, share }
    }

    pub fn identity(&self) -> &NodeIdentity {
        &self.identity
    }

    /// S_i(z) = F(h_i, z).
    pub fn row(&self) -> &UnivariatePolynomial {
        &self.row
    }

    /// The signing share s_i = F(h_i, 0).
    pub fn share(&self) -> FieldElement {
        self.share
    }
}

/// Combine the rows a founder received into its secret state.
///
/// Strict bookkeeping: every row must be addressed to `recipient`, and the
/// senders must be exactly `founders` (each once). Any shape violation
/// aborts — a founding ceremony with a missing or forged row must not
/// produce a state that only later turns out unusable.
pub fn aggregate_rows(
    recipient: &NodeIdentity,
    rows: &[DealtRow],
    founders: &[NodeIdentity],
    degree: usize,
) -> Result<NodeSecretState, DkgError> {
    let mut pending: Vec<&str> = founders.iter().map(NodeIdentity::label).collect();
    let mut sum = UnivariatePolynomial::zero(recipient.hash().modulus())?;
    for dealt in rows {
        if dealt.to != recipient.label() {
            return Err(DkgError::WrongRecipient {
                from: dealt.from.clone(),
                to: dealt.to.clone(),
                expected: recipient.label().to_string(),
            });
        }
        let Some(pos) = pending.iter().position(|&l| l == dealt.from) else {
            return Err(DkgError::UnexpectedRow(dealt.from.clone()));
        };
        pending.swap_remove(pos);
        if dealt.row.degree() > Some(degree) {
            return Err(DkgError::RowDegreeTooHigh {
                from: dealt.from.clone(),
                got: dealt.row.degree().unwrap_or(0),
                max: degree,
            });
        }
        sum = sum.add(&dealt.row)?;
    }
    if let Some(missing) = pending.first() {
        return Err(DkgError::MissingRow((*missing).to_string()));
    }
    Ok(NodeSecretState::assemble(recipient.clone(), sum))
}

/// Sum the founders' commitments into the group public key.
///
/// Each commitment must be the identity or retain an order-r component
/// after cofactor clearing; anything living purely in the small cofactor
/// subgroup contributes nothing to the shared key and marks a broken (or
/// hostile) founder.
pub fn aggregate_public_key(
    commitments: &[(String, BasePoint)],
    params: &CurveParams,
) -> Result<BasePoint, DkgError> {
    if commitments.is_empty() {
        return Err(DkgError::NoCommitments);
    }
    let mut sum = Point::infinity();
    for (label, commitment) in commitments {
        if !commitment.is_infinity() && !params.has_r_component(commitment) {
            return Err(DkgError::CommitmentOffSubgroup(label.clone()));
        }
        sum = sum.add(commitment);
    }
    Ok(sum)
}

/// The group-wide public facts every member carries: the threshold public
/// key and the sharing degree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ManetPublicInfo {
    public_key: BasePoint,
    degree: usize,
}

impl ManetPublicInfo {
    pub fn new(public_key: BasePoint, degree: usize) -> Result<Self, DkgError> {
        if degree < 1 {
            return Err(DkgError::DegreeTooSmall(degree));
        }
        Ok(Self { public_key, degree })
    }

    pub fn public_key(&self) -> BasePoint {
        self.public_key
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    /// Signing and admission both need t = d + 1 participants.
    pub fn threshold(&self) -> usize {
        self.degree + 1
    }
}

/// A member's answer to an admission request: its own row evaluated at the
/// joiner's hash, F(h_responder, h_joiner). Pure evaluation — handing out
/// single points of a degree-d polynomial is exactly what the threshold
/// already prices in.
pub fn join_issue(responder: &NodeSecretState, joiner: &NodeIdentity) -> SharePoint {
    SharePoint::new(responder.identity().hash(), responder.row().eval(joiner.hash()))
        .expect("responder and joiner hashes share the field")
}

/// Rebuild the joiner's row from at least t = degree + 1 responses.
///
/// The responses are points (h_responder, F(h_responder, h_joiner)); their
/// interpolation is F(x, h_joiner), which by symmetry *is* the joiner's row
/// F(h_joiner, z). Extra responses beyond t are welcome: they over-determine
/// the polynomial, and any inconsistency (degree above d) is rejected rather
/// than averaged away.
pub fn join_complete(
    joiner: &NodeIdentity,
    responses: &[SharePoint],
    degree: usize,
) -> Result<NodeSecretState, DkgError> {
    let threshold = degree + 1;
    if responses.len() < threshold {
        return Err(DkgError::InsufficientResponses { got: responses.len(), need: threshold });
    }
    let row = lagrange_interpolate_poly(responses)?;
    if row.degree() > Some(degree) {
        return Err(DkgError::InconsistentResponses {
            got: row.degree().unwrap_or(0),
            max: degree,
        });
    }
    Ok(NodeSecretState::assemble(joiner.clone(), row))
}

pub mod audit {
    //! Ceremony forensics: reconstruct the master polynomial from the
    //! founders' private inputs and check every public artifact against it.
    //!
    //! Calling this defeats the whole point of distributing the key — the
    //! master secret appears in memory — so it exists for tests, debugging
    //! and post-mortems only. Nothing in the protocol or the simulator
    //! calls it.

    use super::*;

    /// The reconstructed master polynomial F = ΣF_i.
    #[derive(Debug, Clone)]
    pub struct CeremonyAudit {
        master: SymmetricBivariatePolynomial,
    }

    /// What an audit found wrong.
    #[derive(Debug, Clone, PartialEq, Eq, Error)]
    pub enum AuditError {
        #[error(transparent)]
        Algebra(#[from] AlgebraError),
        #[error("no contributions to audit")]
        Empty,
        #[error("node {label:?}: {what} does not match the master polynomial")]
        StateMismatch { label: String, what: &'static str },
        #[error("public key {got} does not match the committed master secret point {want}")]
        PublicKeyMismatch { got: String, want: String },
    }

    impl CeremonyAudit {
        /// Sum the founders' polynomials. This is the step that must never
        /// run inside the protocol.
        pub fn reconstruct(
            contributions: &[&SymmetricBivariatePolynomial],
        ) -> Result<Self, AuditError> {
            let (first, rest) = contributions.split_first().ok_or(AuditError::Empty)?;
            let mut master = (*first).clone();
            for c in rest {
                master = master.add(c)?;
            }
            Ok(Self { master })
        }

        pub fn master(&self) -> &SymmetricBivariatePolynomial {
            &self.master
        }

        /// F(0, 0) — the secret the group never assembles in real runs.
        pub fn master_secret(&self) -> FieldElement {
            self.master.secret()
        }

        pub fn expected_row(&self, identity: &NodeIdentity) -> UnivariatePolynomial {
            self.master.eval_row(identity.hash())
        }

        pub fn expected_share(&self, identity: &NodeIdentity) -> FieldElement {
            self.master.eval(identity.hash(), identity.hash().zero_like())
        }

        /// Does a node's assembled state match direct evaluation of F?
        pub fn verify_state(&self, state: &NodeSecretState) -> Result<(), AuditError> {
            if *state.row() != self.expected_row(state.identity()) {
                return Err(AuditError::StateMismatch {
                    label: state.identity().label().to_string(),
                    what: "row",
                });
            }
            if state.share() != self.expected_share(state.identity()) {
                return Err(AuditError::StateMismatch {
                    label: state.identity().label().to_string(),
                    what: "share",
                });
            }
            Ok(())
        }

        /// Does the aggregated public key commit to F(0,0)?
        ///
        /// Compared after cofactor clearing: the published key is the plain
        /// point sum of the commitments, i.e. (Σᵢ Fᵢ(0,0) as an integer)·P,
        /// while F(0,0) is that sum reduced mod r. Over a full-order
        /// generator those differ as points yet share the order-r component
        /// — and the pairing only ever sees the r-component, so that is the
        /// part that must match.
        pub fn verify_public_key(
            &self,
            public_key: &BasePoint,
            params: &CurveParams,
        ) -> Result<(), AuditError> {
            let want = params.mul_generator(self.master_secret().value());
            if params.clear_cofactor(public_key) != params.clear_cofactor(&want) {
                return Err(AuditError::PublicKeyMismatch {
                    got: public_key.to_string(),
                    want: want.to_string(),
                });
            }
            Ok(())
        }
    }
}
