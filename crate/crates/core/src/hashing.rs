//! The two random oracles the protocol consumes: hash-to-range (node
//! identities in Z_r) and hash-to-point (messages onto the order-r curve
//! subgroup).
//!
//! Two interchangeable modes with identical signatures and post-conditions:
//!
//! * **Computed** — SHA-256 based. Hash-to-range folds the digest modulo r.
//!   Hash-to-point runs try-and-increment: fold a counter-suffixed digest
//!   into an x-coordinate, solve y² = x³ + 1, take the lexicographically
//!   smaller root, multiply by the cofactor, and retry with the next counter
//!   when x³ + 1 is a non-residue (or when clearing collapses the candidate
//!   to the identity, which happens for the rare small-order x).
//! * **Fixture** — a lookup table loaded from a tab-separated file, used to
//!   pin published test vectors. Inputs that miss the table are errors, so a
//!   fixture run can never silently fall back to different hashes.
//!
//! Both modes are pure functions of their input(s): same oracle, same
//! input, same output, forever.

use std::collections::BTreeMap;

use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::algebra::FieldElement;
use crate::curve::{BasePoint, CurveParams};

/// Give up try-and-increment after this many counters. At the shipped curve
/// size roughly half of all x-candidates yield a point, so hitting the bound
/// means the parameters (not the input) are broken.
const MAX_POINT_ATTEMPTS: u32 = 4096;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HashingError {
    /// Fixture mode saw an input with no pinned entry.
    #[error("no fixture {kind} entry for input {input:?}")]
    FixtureMiss { kind: &'static str, input: String },
    /// A fixture file that does not parse or validate.
    #[error("fixture file line {line}: {reason}")]
    BadFixtureFile { line: usize, reason: String },
    /// Try-and-increment ran out of counters (unreachable for sane curves).
    #[error("no curve point found for input {input:?} after {MAX_POINT_ATTEMPTS} attempts")]
    PointSearchExhausted { input: String },
}

#[derive(Debug)]
enum Mode {
    Computed,
    Fixture {
        ranges: BTreeMap<String, FieldElement>,
        points: BTreeMap<String, BasePoint>,
    },
}

/// A hash oracle bound to one parameter set.
#[derive(Debug)]
pub struct HashOracle {
    params: CurveParams,
    mode: Mode,
}

impl HashOracle {
    /// The SHA-256 backed oracle.
    pub fn computed(params: &CurveParams) -> Self {
        Self { params: params.clone(), mode: Mode::Computed }
    }

    /// Load a fixture table. One entry per line:
    ///
    /// ```text
    /// input<TAB>range<TAB>37
    /// input<TAB>point<TAB>163,1362
    /// ```
    ///
    /// Blank lines and `#` comments are skipped. Range values must lie below
    /// r; points must be affine, on the curve and of order dividing r;
    /// duplicate (input, kind) pairs are rejected.
    pub fn from_fixture_text(params: &CurveParams, text: &str) -> Result<Self, HashingError> {
        let mut ranges = BTreeMap::new();
        let mut points = BTreeMap::new();
        for (idx, raw) in text.lines().enumerate() {
            let lineno = idx + 1;
            let file_err =
                |reason: String| HashingError::BadFixtureFile { line: lineno, reason };
            if raw.trim().is_empty() || raw.trim_start().starts_with('#') {
                continue;
            }
            let mut cols = raw.split('\t');
            let (input, kind, value) = match (cols.next(), cols.next(), cols.next(), cols.next())
            {
                (Some(i), Some(k), Some(v), None) => (i, k, v),
                _ => {
                    return Err(file_err(
                        "expected exactly three tab-separated columns".to_string(),
                    ))
                }
            };
            if input.is_empty() {
                return Err(file_err("empty input column".to_string()));
            }
            match kind {
                "range" => {
                    let v = value
                        .parse::<u64>()
                        .map_err(|e| file_err(format!("bad range value: {e}")))?;
                    if v >= params.r() {
                        return Err(file_err(format!(
                            "range value {v} not below r = {}",
                            params.r()
                        )));
                    }
                    if ranges
                        .insert(input.to_string(), params.share_element(v))
                        .is_some()
                    {
                        return Err(file_err(format!("duplicate range entry for {input:?}")));
                    }
                }
                "point" => {
                    let (x, y) = value
                        .split_once(',')
                        .ok_or_else(|| file_err(format!("point must be \"x,y\", got {value:?}")))?;
                    let x = x
                        .parse::<u64>()
                        .map_err(|e| file_err(format!("bad point x: {e}")))?;
                    let y = y
                        .parse::<u64>()
                        .map_err(|e| file_err(format!("bad point y: {e}")))?;
                    let pt = params
                        .point(x, y)
                        .map_err(|e| file_err(e.to_string()))?;
                    if !params.in_r_subgroup(&pt) {
                        return Err(file_err(format!(
                            "point {pt} is not in the order-{} subgroup",
                            params.r()
                        )));
                    }
                    if points.insert(input.to_string(), pt).is_some() {
                        return Err(file_err(format!("duplicate point entry for {input:?}")));
                    }
                }
                other => return Err(file_err(format!("unknown kind {other:?}"))),
            }
        }
        Ok(Self { params: params.clone(), mode: Mode::Fixture { ranges, points } })
    }

    pub fn mode_name(&self) -> &'static str {
        match self.mode {
            Mode::Computed => "computed",
            Mode::Fixture { .. } => "fixture",
        }
    }

    /// Map an input string to Z_r.
    pub fn hash_to_range(&self, input: &str) -> Result<FieldElement, HashingError> {
        match &self.mode {
            Mode::Computed => {
                let digest = Sha256::digest(input.as_bytes());
                Ok(self.params.share_element(fold_digest(&digest, self.params.r())))
            }
            Mode::Fixture { ranges, .. } => {
                ranges.get(input).copied().ok_or_else(|| HashingError::FixtureMiss {
                    kind: "range",
                    input: input.to_string(),
                })
            }
        }
    }

    /// Map an input string to a point of order r on the curve.
    pub fn hash_to_point(&self, input: &str) -> Result<BasePoint, HashingError> {
        match &self.mode {
            Mode::Computed => self.try_and_increment(input),
            Mode::Fixture { points, .. } => {
                points.get(input).copied().ok_or_else(|| HashingError::FixtureMiss {
                    kind: "point",
                    input: input.to_string(),
                })
            }
        }
    }

    fn try_and_increment(&self, input: &str) -> Result<BasePoint, HashingError> {
        let p = self.params.p();
        for counter in 0..MAX_POINT_ATTEMPTS {
            let mut hasher = Sha256::new();
            hasher.update(input.as_bytes());
            hasher.update(counter.to_be_bytes());
            let x = fold_digest(&hasher.finalize(), p);
            let rhs = crate::algebra::modmath::addmod(
                crate::algebra::modmath::powmod(x, 3, p),
                1,
                p,
            );
            let Some(root) = crate::algebra::modmath::sqrt_mod(rhs, p) else {
                continue;
            };
            let y = root.min((p - root) % p);
            let candidate = self
                .params
                .point(x, y)
                .expect("solved y^2 = x^3 + 1, so the point is on the curve");
            let cleared = self.params.clear_cofactor(&candidate);
            if !cleared.is_infinity() {
                return Ok(cleared);
            }
        }
        Err(HashingError::PointSearchExhausted { input: input.to_string() })
    }
}

/// Fold a digest into Z_m, treating the bytes as one big-endian integer.
fn fold_digest(digest: &[u8], m: u64) -> u64 {
    digest.iter().fold(0u64, |acc, &b| {
        crate::algebra::modmath::addmod(
            crate::algebra::modmath::mulmod(acc, 256, m),
            u64::from(b),
            m,
        )
    })
}
