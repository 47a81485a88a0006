//! The acceptance gate: eight end-to-end criteria, each with an explicit
//! runtime budget. Every test prints one `PASS <criterion> [...]` line
//! (visible under `--nocapture`); a failing assert is the FAIL line.

use std::fs;
use std::path::{Path, PathBuf};
use std::time::{Duration, Instant};

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;

use manet_pki::algebra::{
    lagrange_interpolate_at, lagrange_interpolate_poly, FieldElement, SharePoint,
    UnivariatePolynomial,
};
use manet_pki::cert::{
    self, canonical_message, combine_partials, partial_sign, sign_with_master, Certificate,
    PartialSignature,
};
use manet_pki::curve::{BasePoint, CurveParams, ExtFieldElement, PairingBackend};
use manet_pki::dkg::{
    aggregate_public_key, aggregate_rows, audit::CeremonyAudit, deal_rows, founding_generate,
    FounderContribution, NodeIdentity, NodeSecretState,
};
use manet_pki::hashing::HashOracle;
use manet_pki::rsa::{self, RsaError, RsaKeyPair};
use manet_pki::simnet::{run_scenario, Scenario, Transcript};

fn criterion<T>(name: &str, budget: Duration, body: impl FnOnce() -> T) -> T {
    let start = Instant::now();
    let out = body();
    let elapsed = start.elapsed();
    assert!(elapsed <= budget, "{name}: took {elapsed:?}, budget is {budget:?}");
    println!("PASS {name} [{elapsed:?} of {budget:?} allowed]");
    out
}

fn scenarios_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../scenarios")
}

fn demo_params() -> CurveParams {
    CurveParams::new(4019, 67, 60, (3198, 578), 4018, PairingBackend::Tate).unwrap()
}

fn fixture_oracle(params: &CurveParams) -> HashOracle {
    let text = fs::read_to_string(scenarios_dir().join("fixtures/demo.hashes")).unwrap();
    HashOracle::from_fixture_text(params, &text).unwrap()
}

fn pt(params: &CurveParams, text: &str) -> BasePoint {
    let (x, y) = text.split_once(',').unwrap();
    params.point(x.parse().unwrap(), y.parse().unwrap()).unwrap()
}

/// Criterion 1: running the shipped worked-example scenario reproduces the
/// frozen golden transcript byte for byte, including every named value.
#[test]
fn c1_worked_example_reproduced_byte_for_byte() {
    criterion("worked example reproduced", Duration::from_secs(1), || {
        let sc = Scenario::load(&scenarios_dir().join("worked-example.scenario")).unwrap();
        let outcome = run_scenario(&sc).unwrap();
        let golden = fs::read_to_string(
            scenarios_dir().join("golden/worked-example.transcript"),
        )
        .unwrap();
        assert_eq!(outcome.transcript().to_text(), golden);

        let t = outcome.transcript();
        for (label, share) in
            [("Node1", "41"), ("Node2", "47"), ("Node3", "21"), ("Node4", "30")]
        {
            assert_eq!(t.extract(&format!("share:{label}")).unwrap(), share);
        }
        assert_eq!(t.extract("row:Node1").unwrap(), "41,13,63");
        assert_eq!(t.extract("pubkey").unwrap(), "2651,2267");
        assert_eq!(t.extract("row:Node5").unwrap(), "2,18,17");
        assert_eq!(t.extract("share:Node5").unwrap(), "2");

        // The group key is exactly the sum of the founders' commitments.
        let params = demo_params();
        let mut sum = params.mul_generator(0);
        for (label, point) in [
            ("Node1", "152,1437"),
            ("Node2", "409,2266"),
            ("Node3", "3063,3143"),
            ("Node4", "3863,2497"),
        ] {
            let commitment = t.extract(&format!("commitment:{label}")).unwrap();
            assert_eq!(commitment, point);
            sum = sum.add(&pt(&params, &commitment));
        }
        assert_eq!(sum, pt(&params, "2651,2267"));
        // ...and equally the master secret's own commitment, 24·P.
        assert_eq!(params.mul_generator(24), pt(&params, "2651,2267"));
    });
}

/// Criterion 2: three share-holders' partial signatures combine into the
/// known group signature, and the pairing equation accepts it.
#[test]
fn c2_threshold_signature_combines_and_verifies() {
    criterion("threshold signature combines", Duration::from_secs(1), || {
        let params = demo_params();
        let oracle = fixture_oracle(&params);
        let message = canonical_message("Node1", 89, 649);
        let hm = oracle.hash_to_point(&message).unwrap();
        assert_eq!(hm, pt(&params, "163,1362"));

        let partials: Vec<PartialSignature> = [("Node2", 54, 47), ("Node3", 25, 21), ("Node4", 17, 30)]
            .into_iter()
            .map(|(label, hash, share)| {
                PartialSignature::new(
                    label,
                    FieldElement::new(hash, 67).unwrap(),
                    &message,
                    hm.mul(share),
                )
            })
            .collect();
        let sigma = combine_partials(&partials, 3).unwrap();
        assert_eq!(sigma, pt(&params, "2350,3239"));

        let cert = Certificate::new("Node1", 89, 649, sigma);
        let pk = pt(&params, "2651,2267");
        assert!(cert::verify(&cert, &pk, &params, &oracle).unwrap());
    });
}

/// Criterion 3: over 100 random argument pairs the pairing is bilinear in
/// both slots, lands in the order-r subgroup, and never degenerates when
/// both arguments carry an order-r component.
#[test]
fn c3_pairing_is_bilinear_nondegenerate_order_r() {
    criterion("pairing properties hold", Duration::from_secs(5), || {
        let params = demo_params();
        let one = params.ext_one();
        let pow = |v: ExtFieldElement, k: u64| {
            let mut acc = one;
            for _ in 0..k {
                acc = acc * v;
            }
            acc
        };
        let g = params.generator();
        assert_ne!(params.pairing(&g, &g), one, "the pairing degenerates on its own generator");
        let mut rng = ChaCha12Rng::seed_from_u64(3);
        for _ in 0..100 {
            // Nonzero multiples of the generator mod r keep an order-r
            // component, so non-degeneracy must hold for every trial.
            let (ks, kt) = (rng.random_range(1..67), rng.random_range(1..67));
            let (a, b) = (rng.random_range(1..67u64), rng.random_range(1..67u64));
            let s = g.mul(ks);
            let t = g.mul(kt);
            let v = params.pairing(&s, &t);
            assert_ne!(v, one, "degenerate at {ks}, {kt}");
            assert_eq!(pow(v, 67), one, "output escapes the order-67 subgroup");
            assert_eq!(params.pairing(&s.mul(a), &t), pow(v, a), "left slot not linear");
            assert_eq!(params.pairing(&s, &t.mul(a)), pow(v, a), "right slot not linear");
            assert_eq!(
                params.pairing(&s.mul(a), &t.mul(b)),
                params.pairing(&s.mul(a * b % 67), &t),
                "slots do not compose"
            );
        }
    });
}

/// One full founding ceremony at the given degree with k members; returns
/// every member's secret state and the audit-reconstructed master.
fn ceremony(
    degree: usize,
    k: usize,
    params: &CurveParams,
    rng: &mut ChaCha12Rng,
) -> (Vec<NodeSecretState>, CeremonyAudit, BasePoint) {
    let mut pool: Vec<u64> = (1..67).collect();
    pool.shuffle(rng);
    let ids: Vec<NodeIdentity> = pool[..k]
        .iter()
        .enumerate()
        .map(|(i, &h)| {
            NodeIdentity::new(format!("N{i}"), FieldElement::new(h, 67).unwrap()).unwrap()
        })
        .collect();
    let contributions: Vec<FounderContribution> = ids
        .iter()
        .map(|_| founding_generate(degree, params, rng).unwrap())
        .collect();
    let states: Vec<NodeSecretState> = ids
        .iter()
        .map(|me| {
            let rows: Vec<_> = contributions
                .iter()
                .zip(&ids)
                .map(|(c, from)| deal_rows(c, from, std::slice::from_ref(me)).pop().unwrap())
                .collect();
            aggregate_rows(me, &rows, &ids, degree).unwrap()
        })
        .collect();
    let commitments: Vec<(String, BasePoint)> = ids
        .iter()
        .zip(&contributions)
        .map(|(id, c)| (id.label().to_string(), c.commitment()))
        .collect();
    let pk = aggregate_public_key(&commitments, params).unwrap();
    let polys: Vec<_> = contributions.iter().map(|c| c.polynomial()).collect();
    let audit = CeremonyAudit::reconstruct(&polys).unwrap();
    (states, audit, pk)
}

/// Criterion 4: across 50 random ceremonies (degrees 1–3, group sizes up
/// to 6), every threshold-sized subset of members combines to exactly the
/// signature the reconstructed master secret would have produced alone.
#[test]
fn c4_any_threshold_subset_signs_like_the_master_secret() {
    criterion("every subset matches the master signer", Duration::from_secs(30), || {
        let params = demo_params();
        let oracle = HashOracle::computed(&params);
        let mut rng = ChaCha12Rng::seed_from_u64(4);
        for trial in 0..50 {
            let degree = 1 + trial % 3;
            let k = rng.random_range(degree + 1..=6);
            let (states, audit, pk) = ceremony(degree, k, &params, &mut rng);
            let message = format!("member-{trial}-credential-{}", rng.random::<u32>());
            let expected = sign_with_master(audit.master_secret(), &message, &oracle).unwrap();
            // The key's signing meaning is its order-67 component: the
            // integer sum of the committed secrets can differ from the
            // master secret by multiples of 67, which verification's
            // cofactor clearing erases.
            assert_eq!(
                params.clear_cofactor(&params.mul_generator(audit.master_secret().value())),
                params.clear_cofactor(&pk)
            );
            for subset in states.iter().combinations(degree + 1) {
                let partials: Vec<PartialSignature> = subset
                    .iter()
                    .map(|state| partial_sign(state, &message, &oracle).unwrap())
                    .collect();
                let sigma = combine_partials(&partials, degree + 1).unwrap();
                assert_eq!(sigma, expected, "trial {trial}: a subset disagrees");
            }
        }
    });
}

/// Criterion 5: in 20 random ceremonies, one share short of the threshold
/// leaves every candidate master secret exactly as consistent as the real
/// one — and one more share pins it down completely.
#[test]
fn c5_below_threshold_shares_reveal_nothing() {
    criterion("below-threshold shares reveal nothing", Duration::from_secs(30), || {
        let params = demo_params();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for trial in 0..20 {
            let degree = 1 + trial % 3;
            let k = rng.random_range(degree + 1..=6);
            let (states, audit, _) = ceremony(degree, k, &params, &mut rng);
            let secret = audit.master_secret();

            // Shares are points on f(z) = F(0, z): s_i = F(h_i, 0) = f(h_i).
            let seen: Vec<SharePoint> = states[..degree]
                .iter()
                .map(|s| SharePoint::new(s.identity().hash(), s.share()).unwrap())
                .collect();
            let mut consistent = 0;
            for candidate in 0..67 {
                let mut pts = seen.clone();
                pts.push(
                    SharePoint::new(
                        FieldElement::new(0, 67).unwrap(),
                        FieldElement::new(candidate, 67).unwrap(),
                    )
                    .unwrap(),
                );
                let poly = lagrange_interpolate_poly(&pts).unwrap();
                assert!(poly.degree().unwrap_or(0) <= degree);
                consistent += 1;
            }
            assert_eq!(consistent, 67, "trial {trial}: some secrets were excluded");

            // The threshold-th share collapses the candidates to one.
            let enough: Vec<SharePoint> = states[..degree + 1]
                .iter()
                .map(|s| SharePoint::new(s.identity().hash(), s.share()).unwrap())
                .collect();
            let zero = FieldElement::new(0, 67).unwrap();
            assert_eq!(lagrange_interpolate_at(&enough, zero).unwrap(), secret);
        }
    });
}

/// Criterion 6: RSA round-trips every message below the modulus for the
/// three worked key pairs and twenty generated ones; bad inputs are
/// rejected; and the worked ciphertext of 56 under (63, 115) is 21 — the
/// value whose decryption actually returns 56.
#[test]
fn c6_rsa_roundtrips_exhaustively() {
    criterion("rsa round-trips exhaustively", Duration::from_secs(10), || {
        for (p, q, e) in [(11, 59, 89), (3, 107, 17), (5, 23, 63)] {
            let kp = RsaKeyPair::from_primes(p, q, e).unwrap();
            for m in 0..kp.n() {
                let c = rsa::encrypt(m, kp.e(), kp.n()).unwrap();
                assert_eq!(rsa::decrypt(c, kp.d(), kp.n()).unwrap(), m);
            }
        }

        // All four worked key pairs satisfy e·d ≡ 1 (mod φ(n)).
        for (p, q, e, d) in
            [(11, 59, 89, 189), (3, 107, 17, 25), (5, 23, 63, 7), (2, 101, 91, 11)]
        {
            let kp = RsaKeyPair::from_primes(p, q, e).unwrap();
            assert_eq!(kp.d(), d);
            assert_eq!(kp.e() * kp.d() % ((p - 1) * (q - 1)), 1);
        }

        let mut rng = ChaCha12Rng::seed_from_u64(6);
        for trial in 0..20 {
            let bits = 4 + (trial % 9) as u32;
            let kp = RsaKeyPair::generate(bits, &mut rng).unwrap();
            for _ in 0..200 {
                let m = rng.random_range(0..kp.n());
                let c = rsa::encrypt(m, kp.e(), kp.n()).unwrap();
                assert_eq!(rsa::decrypt(c, kp.d(), kp.n()).unwrap(), m);
            }
        }

        assert!(matches!(
            RsaKeyPair::from_primes(4, 11, 3),
            Err(RsaError::NotPrime(4))
        ));
        assert!(matches!(
            RsaKeyPair::from_primes(11, 11, 3),
            Err(RsaError::EqualPrimes(11))
        ));
        assert!(matches!(
            RsaKeyPair::from_primes(11, 59, 2),
            Err(RsaError::ExponentNotCoprime { .. })
        ));
        assert!(matches!(
            rsa::encrypt(649, 89, 649),
            Err(RsaError::ValueTooLarge { .. })
        ));

        // The worked exchange: 56 encrypts to 21 under (63, 115), not to
        // the sometimes-quoted 463 (which is not even reduced mod 115),
        // and 21 decrypts back to 56 under d = 7.
        let kp = RsaKeyPair::from_primes(5, 23, 63).unwrap();
        assert_eq!(kp.d(), 7);
        assert_eq!(rsa::encrypt(56, 63, 115).unwrap(), 21);
        assert_ne!(rsa::encrypt(56, 63, 115).unwrap(), 463 % 115);
        assert_eq!(rsa::decrypt(21, 7, 115).unwrap(), 56);
    });
}

/// Criterion 7: the same scenario file produces byte-identical transcripts
/// run after run, for both a seeded-random script and a lossy one.
#[test]
fn c7_runs_are_deterministic() {
    criterion("runs are deterministic", Duration::from_secs(5), || {
        for file in ["worked-example.scenario", "churn.scenario", "random-churn.scenario"] {
            let sc = Scenario::load(&scenarios_dir().join(file)).unwrap();
            let first = run_scenario(&sc).unwrap().transcript().to_text();
            let second = run_scenario(&sc).unwrap().transcript().to_text();
            assert_eq!(first, second, "{file} diverged between runs");
            assert!(!first.is_empty());
        }
    });
}

/// Criterion 8: a churn script (4 founders, 3 joins, 2 departures) keeps
/// issuing certificates as long as a threshold of members remains, every
/// pair of member rows stays mutually consistent, and nothing the group
/// must keep secret ever reaches the transcript.
#[test]
fn c8_churn_script_survives_joins_and_departures() {
    criterion("churn script holds together", Duration::from_secs(5), || {
        let sc = Scenario::load(&scenarios_dir().join("churn.scenario")).unwrap();
        let outcome = run_scenario(&sc).unwrap();
        let t = outcome.transcript();
        let count = |kind: &str| t.entries().iter().filter(|e| e.kind() == kind).count();
        assert_eq!(count("founder"), 4);
        assert_eq!(count("join"), 3);
        assert_eq!(count("depart"), 2);
        assert_eq!(count("error"), 0, "every scripted step must succeed");
        assert_eq!(count("issue"), 5);
        assert_eq!(count("certificate"), 5, "every issuance must complete");

        // Collect (hash, row) per member and check every crossing:
        // S_i(h_j) = S_j(h_i).
        let mut hashes: Vec<(String, u64)> = Vec::new();
        let mut rows: Vec<(String, UnivariatePolynomial)> = Vec::new();
        for e in t.entries() {
            match e.kind() {
                "founder" | "join" => hashes.push((
                    e.get("node").unwrap().to_string(),
                    e.get("hash").unwrap().parse().unwrap(),
                )),
                "state" => rows.push((
                    e.get("node").unwrap().to_string(),
                    UnivariatePolynomial::parse_coeff_string(e.get("row").unwrap(), 67)
                        .unwrap(),
                )),
                _ => {}
            }
        }
        assert_eq!(rows.len(), 7);
        let hash_of = |label: &str| {
            let h = hashes.iter().find(|(l, _)| l == label).unwrap().1;
            FieldElement::new(h, 67).unwrap()
        };
        for i in 0..rows.len() {
            for j in i + 1..rows.len() {
                let (a, row_a) = &rows[i];
                let (b, row_b) = &rows[j];
                assert_eq!(
                    row_a.eval(hash_of(b)),
                    row_b.eval(hash_of(a)),
                    "rows of {a} and {b} disagree"
                );
            }
        }

        // Any threshold of rows determines the master row f(z) = F(0, z);
        // that polynomial, its secret, and any key so named must be absent
        // from what the run publishes.
        let params = demo_params();
        let master_row: Vec<FieldElement> = (0..3)
            .map(|coeff| {
                let pts: Vec<SharePoint> = rows[..3]
                    .iter()
                    .map(|(label, row)| {
                        SharePoint::new(hash_of(label), row.coefficient(coeff)).unwrap()
                    })
                    .collect();
                lagrange_interpolate_at(&pts, FieldElement::new(0, 67).unwrap()).unwrap()
            })
            .collect();
        let master_secret = master_row[0];
        assert_eq!(
            params.clear_cofactor(&params.mul_generator(master_secret.value())),
            params.clear_cofactor(&pt(&params, &t.extract("pubkey").unwrap())),
            "reconstruction sanity: the master secret must explain the group key"
        );
        let master_row_text = master_row
            .iter()
            .map(|c| c.value().to_string())
            .collect::<Vec<_>>()
            .join(",");
        let text = t.to_text();
        for (label, row) in &rows {
            assert_ne!(
                row.to_coeff_string(),
                master_row_text,
                "{label} holds the master row outright"
            );
        }
        for needle in ["master", "secret", "rsa-d", &format!("row={master_row_text} ")] {
            assert!(!text.contains(needle), "transcript leaks {needle:?}");
        }

        // Same scan over the frozen worked example, where the master row
        // is known to be 24 + 24z.
        let golden = fs::read_to_string(
            scenarios_dir().join("golden/worked-example.transcript"),
        )
        .unwrap();
        Transcript::parse(&golden).unwrap();
        for needle in ["24,24,0", "master", "secret", "rsa-d"] {
            assert!(!golden.contains(needle), "golden transcript leaks {needle:?}");
        }
    });
}
