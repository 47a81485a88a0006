//! Threshold certificate authority for mobile ad-hoc networks.
//!
//! A MANET has no room for a single certificate authority: nodes appear,
//! disappear and partition at will. This crate spreads the CA's signing key
//! over the network instead. Any `t` live nodes can admit a newcomer or sign
//! a certificate; fewer than `t` learn nothing about the key.
//!
//! The pieces, bottom up:
//!
//! * [`algebra`] — prime fields, polynomials (univariate and symmetric
//!   bivariate) and Lagrange interpolation, the Shamir machinery.
//! * [`curve`] — a small supersingular curve `y² = x³ + 1`, its quadratic
//!   extension field, and a reduced Tate pairing (Weil available as an
//!   alternative backend).
//! * [`hashing`] — hash-to-range and hash-to-point oracles, either computed
//!   from SHA-256 or pinned by a fixture table for reproducible runs.
//! * [`dkg`] — dealer-free distributed key generation from symmetric
//!   bivariate polynomials, plus share issuance for nodes joining later.
//! * [`cert`] — BLS-style threshold signatures binding a node's RSA key to
//!   its identity, and the certificate issuance/verification flow.
//! * [`rsa`] — textbook RSA at toy sizes for the encrypted-messaging leg.
//! * [`simnet`] — a deterministic discrete-event simulator that drives all
//!   of the above from a scenario file and emits a byte-stable transcript.
//!
//! Parameters are deliberately tiny (a 12-bit base field) so every value is
//! checkable by hand; nothing here is hardened against a real adversary.

pub mod algebra;
pub mod cert;
pub mod curve;
pub mod dkg;
pub mod hashing;
pub mod rsa;
pub mod simnet;

#[cfg(test)]
pub(crate) mod testutil {
    use crate::algebra::{FieldElement, SymmetricBivariatePolynomial};
    use crate::curve::{BasePoint, CurveParams, PairingBackend};
    use crate::dkg::{
        aggregate_public_key, aggregate_rows, deal_rows, FounderContribution, NodeIdentity,
        NodeSecretState,
    };

    /// The demo parameter set used throughout the unit tests: p = 4019,
    /// r = 67, cofactor 60, generator (3198, 578), non-residue p - 1.
    pub fn demo_params() -> CurveParams {
        CurveParams::new(4019, 67, 60, (3198, 578), 4018, PairingBackend::Tate)
            .expect("demo parameter set is valid")
    }

    /// The worked founding ceremony: four founders with pinned degree-2
    /// polynomials and identity hashes 37, 54, 25, 17. Master polynomial
    /// F(x, z) = 24 + 24x + 24z + 20xz + 18x²z + 18xz², secret 24.
    pub const FOUNDER_POLYS: &[(&str, &str)] = &[
        ("Node1", "5,5,0;5,8,3;0,3,0"),
        ("Node2", "9,8,0;8,3,5;0,5,0"),
        ("Node3", "6,3,0;3,5,8;0,8,0"),
        ("Node4", "4,8,0;8,4,2;0,2,0"),
    ];
    pub const FOUNDER_HASHES: &[(&str, u64)] =
        &[("Node1", 37), ("Node2", 54), ("Node3", 25), ("Node4", 17)];

    pub fn identity(label: &str, hash: u64) -> NodeIdentity {
        NodeIdentity::new(label, FieldElement::new(hash, 67).unwrap()).unwrap()
    }

    pub fn founders() -> Vec<NodeIdentity> {
        FOUNDER_HASHES.iter().map(|&(l, h)| identity(l, h)).collect()
    }

    pub fn contributions() -> Vec<(NodeIdentity, FounderContribution)> {
        let params = demo_params();
        FOUNDER_POLYS
            .iter()
            .zip(founders())
            .map(|(&(_, matrix), id)| {
                let poly = SymmetricBivariatePolynomial::parse_matrix_string(matrix, 67).unwrap();
                (id, FounderContribution::from_polynomial(poly, &params).unwrap())
            })
            .collect()
    }

    /// Run the pinned ceremony end to end and return everyone's state plus
    /// the public key (2651, 2267).
    pub fn run_ceremony() -> (Vec<NodeSecretState>, BasePoint) {
        let params = demo_params();
        let ids = founders();
        let contribs = contributions();
        let states = ids
            .iter()
            .map(|me| {
                let rows: Vec<_> = contribs
                    .iter()
                    .map(|(from, c)| {
                        deal_rows(c, from, std::slice::from_ref(me)).pop().unwrap()
                    })
                    .collect();
                aggregate_rows(me, &rows, &ids, 2).unwrap()
            })
            .collect();
        let commitments: Vec<(String, BasePoint)> = contribs
            .iter()
            .map(|(id, c)| (id.label().to_string(), c.commitment()))
            .collect();
        let pk = aggregate_public_key(&commitments, &params).unwrap();
        (states, pk)
    }
}
