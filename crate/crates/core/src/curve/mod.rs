//! The supersingular curve E: y² = x³ + 1 over Z_p and its pairing.
//!
//! Parameter sets are small by design — the shipped default uses p = 4019 —
//! so the whole group fits in a u64 and every intermediate value can be
//! checked by hand. The structure is what matters:
//!
//! * p ≡ 2 (mod 3) makes E supersingular with #E(F_p) = p + 1 = cofactor·r
//!   for a prime r, and makes cubing a bijection on F_p.
//! * The distortion map (x, y) ↦ (ζx, y), with ζ a primitive cube root of
//!   unity living in F_p², moves points off the base-field subgroup, which
//!   gives a non-degenerate self-pairing on E(F_p).
//! * The reduced Tate pairing (default) or the Weil pairing supplies the
//!   bilinearity that lets Shamir-shared signatures combine.
//!
//! Points produced by the group law are closed over the curve; the
//! `Point::new` constructor rejects coordinates that do not satisfy the
//! equation. The pairing accepts *any* curve points: both arguments are
//! cofactor-multiplied into the order-r subgroup first, so generators whose
//! order is the full p + 1 (like the shipped one) work directly and the map
//! stays bilinear with exponents mod r.

mod ext;
mod pairing;
mod point;

pub use ext::ExtFieldElement;
pub use pairing::PairingBackend;
pub use point::{BasePoint, Coordinate, ExtPoint, Point};

use thiserror::Error;

use crate::algebra::{AlgebraError, FieldElement};
use crate::algebra::modmath;

/// Errors from curve construction and parameter loading.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CurveError {
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    /// Coordinates that do not satisfy y² = x³ + 1.
    #[error("({x}, {y}) is not on y^2 = x^3 + 1")]
    NotOnCurve { x: String, y: String },
    /// A structural requirement on (p, r, cofactor, generator, non-residue).
    #[error("invalid curve parameters: {0}")]
    BadParameters(String),
    /// A parameter file that does not parse.
    #[error("parameter file line {line}: {reason}")]
    BadParamsFile { line: usize, reason: String },
}

/// A validated parameter set: the curve, its subgroup layout, the extension
/// field, and which pairing backend to run.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct CurveParams {
    p: u64,
    r: u64,
    cofactor: u64,
    generator: BasePoint,
    non_residue: FieldElement,
    /// Primitive cube root of unity in F_p², the distortion constant.
    zeta: ExtFieldElement,
    backend: PairingBackend,
}

impl CurveParams {
    /// Validate and assemble a parameter set.
    ///
    /// Checks, in order: p and r prime with p ≡ 2 (mod 3), p ≥ 5;
    /// cofactor·r = p + 1; r ∤ p − 1 (embedding degree exactly 2); the
    /// non-residue really is a quadratic non-residue; the generator is an
    /// affine curve point whose order has a nonzero r-component (its
    /// cofactor multiple is not the identity). The generator is *not*
    /// required to have order exactly r — the pairing clears cofactors
    /// itself, and the natural choice of generator on these curves has
    /// order p + 1.
    pub fn new(
        p: u64,
        r: u64,
        cofactor: u64,
        generator: (u64, u64),
        non_residue: u64,
        backend: PairingBackend,
    ) -> Result<Self, CurveError> {
        let bad = |msg: String| CurveError::BadParameters(msg);
        // Primality of p and r via the field constructors.
        let _ = FieldElement::new(0, p)?;
        let _ = FieldElement::new(0, r)?;
        if p < 5 || p % 3 != 2 {
            return Err(bad(format!("p = {p} must be a prime >= 5 with p = 2 (mod 3)")));
        }
        if cofactor == 0 || u128::from(cofactor) * u128::from(r) != u128::from(p) + 1 {
            return Err(bad(format!(
                "cofactor * r must equal p + 1: {cofactor} * {r} != {p} + 1"
            )));
        }
        if (p - 1).is_multiple_of(r) {
            return Err(bad(format!(
                "r = {r} divides p - 1, so the embedding degree would be 1, not 2"
            )));
        }
        if non_residue == 0 || non_residue >= p {
            return Err(bad(format!("non-residue {non_residue} is outside 1..{p}")));
        }
        if modmath::powmod(non_residue, (p - 1) / 2, p) != p - 1 {
            return Err(bad(format!("{non_residue} is a quadratic residue mod {p}")));
        }
        let non_residue = FieldElement::new_unchecked(non_residue, p);
        let gx = FieldElement::new_unchecked(generator.0, p);
        let gy = FieldElement::new_unchecked(generator.1, p);
        let generator = Point::new(gx, gy)?;
        if generator.mul(p + 1) != Point::infinity() {
            return Err(bad("generator order does not divide p + 1".to_string()));
        }
        if generator.mul(cofactor) == Point::infinity() {
            return Err(bad(format!(
                "generator ({gx},{gy}) has no order-{r} component: {cofactor} * G = inf"
            )));
        }
        // ζ = (−1 + s·a)/2 where s² = −3/nr, so (s·a)² = −3. Both −3 and nr
        // are non-residues (p ≡ 2 mod 3), hence their ratio is a residue and
        // s always exists.
        let s_squared = (u128::from(p) - 3) % u128::from(p);
        let s_squared = modmath::mulmod(
            s_squared as u64,
            modmath::invmod(non_residue.value(), p).expect("nonzero non-residue"),
            p,
        );
        let s = modmath::sqrt_mod(s_squared, p)
            .ok_or_else(|| bad(format!("-3/{} has no square root mod {p}", non_residue)))?;
        let half = FieldElement::new_unchecked(modmath::invmod(2, p).expect("p odd"), p);
        let zeta = ExtFieldElement::new(
            -half,
            FieldElement::new_unchecked(s, p) * half,
            non_residue,
        );
        let one = ExtFieldElement::from_base(half.one_like(), non_residue);
        if !(zeta * zeta + zeta + one).is_zero() {
            return Err(bad("failed to construct a primitive cube root of unity".to_string()));
        }
        Ok(Self { p, r, cofactor, generator, non_residue, zeta, backend })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Prime order of the signature subgroup; also the share field modulus.
    pub fn r(&self) -> u64 {
        self.r
    }

    pub fn cofactor(&self) -> u64 {
        self.cofactor
    }

    pub fn generator(&self) -> BasePoint {
        self.generator
    }

    pub fn non_residue(&self) -> u64 {
        self.non_residue.value()
    }

    pub fn backend(&self) -> PairingBackend {
        self.backend
    }

    /// The distortion constant ζ (a primitive cube root of unity in F_p²).
    pub fn zeta(&self) -> ExtFieldElement {
        self.zeta
    }

    /// An element of the curve's base field Z_p.
    pub fn base_element(&self, v: u64) -> FieldElement {
        FieldElement::new_unchecked(v, self.p)
    }

    /// An element of the share field Z_r.
    pub fn share_element(&self, v: u64) -> FieldElement {
        FieldElement::new_unchecked(v, self.r)
    }

    /// An extension-field element c1·a + c0.
    pub fn ext_element(&self, c0: u64, c1: u64) -> ExtFieldElement {
        ExtFieldElement::new(self.base_element(c0), self.base_element(c1), self.non_residue)
    }

    pub fn ext_one(&self) -> ExtFieldElement {
        self.ext_element(1, 0)
    }

    /// A checked affine point on the curve.
    pub fn point(&self, x: u64, y: u64) -> Result<BasePoint, CurveError> {
        Point::new(self.base_element(x), self.base_element(y))
    }

    pub fn mul_generator(&self, k: u64) -> BasePoint {
        self.generator.mul(k)
    }

    /// Project onto the order-r subgroup by multiplying with the cofactor.
    pub fn clear_cofactor(&self, pt: &BasePoint) -> BasePoint {
        pt.mul(self.cofactor)
    }

    /// Strict membership in the order-r subgroup (identity included).
    pub fn in_r_subgroup(&self, pt: &BasePoint) -> bool {
        pt.mul(self.r).is_infinity()
    }

    /// Whether the point survives cofactor clearing, i.e. its order has a
    /// nonzero r-component. The identity does not qualify.
    pub fn has_r_component(&self, pt: &BasePoint) -> bool {
        !self.clear_cofactor(pt).is_infinity()
    }

    /// Embed a base-field point into E(F_p²).
    pub fn lift(&self, pt: &BasePoint) -> ExtPoint {
        match (pt.x(), pt.y()) {
            (Some(x), Some(y)) => Point::new(
                ExtFieldElement::from_base(x, self.non_residue),
                ExtFieldElement::from_base(y, self.non_residue),
            )
            .expect("lifting preserves the curve equation"),
            _ => Point::infinity(),
        }
    }

    /// Distortion map (x, y) ↦ (ζx, y) into E(F_p²). Fixes the identity.
    pub fn distort(&self, pt: &BasePoint) -> ExtPoint {
        match (pt.x(), pt.y()) {
            (Some(x), Some(y)) => Point::new(
                self.zeta * ExtFieldElement::from_base(x, self.non_residue),
                ExtFieldElement::from_base(y, self.non_residue),
            )
            .expect("distortion preserves the curve equation"),
            _ => Point::infinity(),
        }
    }

    /// The bilinear pairing ê(s, t); see the module docs. Total on curve
    /// points: arguments are cofactor-cleared internally, the identity (or
    /// anything clearing kills) pairs to 1.
    pub fn pairing(&self, s: &BasePoint, t: &BasePoint) -> ExtFieldElement {
        pairing::pairing(self, s, t)
    }

    /// Parse the one-parameter-per-line text format:
    ///
    /// ```text
    /// # comment
    /// p 4019
    /// r 67
    /// cofactor 60
    /// generator 3198,578
    /// non-residue 4018
    /// pairing tate
    /// ```
    ///
    /// `pairing` is optional (default tate); everything else is required,
    /// each key at most once. Unknown keys are errors so typos cannot
    /// silently fall back to defaults.
    pub fn from_text(text: &str) -> Result<Self, CurveError> {
        let mut p = None;
        let mut r = None;
        let mut cofactor = None;
        let mut generator = None;
        let mut non_residue = None;
        let mut backend = None;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            let lineno = idx + 1;
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let file_err = |reason: String| CurveError::BadParamsFile { line: lineno, reason };
            let (key, value) = line
                .split_once(char::is_whitespace)
                .ok_or_else(|| file_err(format!("expected \"key value\", got {line:?}")))?;
            let value = value.trim();
            let slot = match key {
                "p" => Some(&mut p),
                "r" => Some(&mut r),
                "cofactor" => Some(&mut cofactor),
                "non-residue" => Some(&mut non_residue),
                _ => None,
            };
            if let Some(slot) = slot {
                if slot.is_some() {
                    return Err(file_err(format!("duplicate key {key:?}")));
                }
                let v = value
                    .parse::<u64>()
                    .map_err(|e| file_err(format!("bad value for {key:?}: {e}")))?;
                *slot = Some(v);
                continue;
            }
            match key {
                "generator" => {
                    if generator.is_some() {
                        return Err(file_err("duplicate key \"generator\"".to_string()));
                    }
                    let (x, y) = value.split_once(',').ok_or_else(|| {
                        file_err(format!("generator must be \"x,y\", got {value:?}"))
                    })?;
                    let x = x
                        .trim()
                        .parse::<u64>()
                        .map_err(|e| file_err(format!("bad generator x: {e}")))?;
                    let y = y
                        .trim()
                        .parse::<u64>()
                        .map_err(|e| file_err(format!("bad generator y: {e}")))?;
                    generator = Some((x, y));
                }
                "pairing" => {
                    if backend.is_some() {
                        return Err(file_err("duplicate key \"pairing\"".to_string()));
                    }
                    backend = Some(value.parse::<PairingBackend>().map_err(file_err)?);
                }
                other => return Err(file_err(format!("unknown key {other:?}"))),
            }
        }
        let missing = |name: &str| CurveError::BadParamsFile {
            line: 0,
            reason: format!("missing required key {name:?}"),
        };
        Self::new(
            p.ok_or_else(|| missing("p"))?,
            r.ok_or_else(|| missing("r"))?,
            cofactor.ok_or_else(|| missing("cofactor"))?,
            generator.ok_or_else(|| missing("generator"))?,
            non_residue.ok_or_else(|| missing("non-residue"))?,
            backend.unwrap_or_default(),
        )
    }

    /// Render in the format [`from_text`](Self::from_text) reads.
    pub fn to_text(&self) -> String {
        format!(
            "p {}\nr {}\ncofactor {}\ngenerator {}\nnon-residue {}\npairing {}\n",
            self.p, self.r, self.cofactor, self.generator, self.non_residue, self.backend
        )
    }
}
