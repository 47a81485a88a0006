//! Prime-field arithmetic and the polynomial toolkit behind secret sharing.
//!
//! Everything in the protocol layer reduces to three things defined here:
//! field elements with a runtime modulus, polynomials over them (univariate
//! for shares, symmetric bivariate for dealer-free dealing), and Lagrange
//! interpolation. Moduli live in the values rather than the type system
//! because the same binary juggles several fields at once (the curve's base
//! field, the share field, RSA moduli); mixing two moduli in one operation
//! is a programming error and panics, while data-dependent failures (zero
//! inverses, duplicate interpolation abscissae) surface as [`AlgebraError`].

mod field;
mod interp;
pub(crate) mod modmath;
mod poly;

pub use field::FieldElement;
pub use interp::{deal_univariate_shares, lagrange_interpolate_at, lagrange_interpolate_poly};
pub use poly::{SharePoint, SymmetricBivariatePolynomial, UnivariatePolynomial};

use thiserror::Error;

/// Errors from field and polynomial constructors and data-dependent math.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AlgebraError {
    /// A field modulus must be prime; composite moduli are rejected up front.
    #[error("modulus {0} is not prime")]
    NotPrime(u64),
    /// Zero has no multiplicative inverse.
    #[error("zero has no inverse")]
    ZeroInverse,
    /// Two operands were built over different fields.
    #[error("modulus mismatch: {left} vs {right}")]
    ModulusMismatch { left: u64, right: u64 },
    /// Interpolation needs at least one point.
    #[error("cannot interpolate through an empty point set")]
    EmptyPointSet,
    /// Lagrange interpolation is undefined when two points share an x.
    #[error("duplicate abscissa {0} in interpolation points")]
    DuplicateAbscissa(u64),
    /// Shamir dealing with threshold outside 1..=share_count.
    #[error("threshold {threshold} invalid for {share_count} shares")]
    BadThreshold { threshold: usize, share_count: usize },
    /// More share abscissae were requested than the field has nonzero points.
    #[error("cannot place {share_count} distinct shares in a field of {modulus} elements")]
    FieldTooSmall { share_count: usize, modulus: u64 },
    /// A bivariate coefficient matrix was not square.
    #[error("coefficient matrix is not square: row {row} has length {len}, expected {expected}")]
    NotSquare { row: usize, len: usize, expected: usize },
    /// A bivariate coefficient matrix was not symmetric.
    #[error("coefficient matrix is not symmetric at ({i}, {j})")]
    NotSymmetric { i: usize, j: usize },
    /// A serialized polynomial failed to parse.
    #[error("bad polynomial text {text:?}: {reason}")]
    BadPolynomialText { text: String, reason: String },
}
