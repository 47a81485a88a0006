use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use super::modmath;
use super::AlgebraError;

/// An element of Z_p for a prime `p` carried at runtime.
///
/// The canonical representative lives in `[0, modulus)`. Arithmetic between
/// elements of different fields is a bug in the caller, not a data condition,
/// so the operators panic on a modulus mismatch; see the module docs.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct FieldElement {
    value: u64,
    modulus: u64,
}

impl FieldElement {
    /// Element `value mod modulus`. Rejects composite moduli.
    pub fn new(value: u64, modulus: u64) -> Result<Self, AlgebraError> {
        if !modmath::is_prime(modulus) {
            return Err(AlgebraError::NotPrime(modulus));
        }
        Ok(Self { value: value % modulus, modulus })
    }

    /// Internal constructor for moduli already known to be prime.
    pub(crate) fn new_unchecked(value: u64, modulus: u64) -> Self {
        debug_assert!(modmath::is_prime(modulus));
        Self { value: value % modulus, modulus }
    }

    /// Another element of the same field, skipping the primality re-check.
    pub fn sibling(&self, value: u64) -> Self {
        Self { value: value % self.modulus, modulus: self.modulus }
    }

    pub fn zero_like(&self) -> Self {
        self.sibling(0)
    }

    pub fn one_like(&self) -> Self {
        self.sibling(1)
    }

    pub fn value(&self) -> u64 {
        self.value
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    /// Multiplicative inverse; zero is the one element without one.
    pub fn inv(&self) -> Result<Self, AlgebraError> {
        modmath::invmod(self.value, self.modulus)
            .map(|v| self.sibling(v))
            .ok_or(AlgebraError::ZeroInverse)
    }

    pub fn pow(&self, exp: u64) -> Self {
        self.sibling(modmath::powmod(self.value, exp, self.modulus))
    }

    fn check_same_field(&self, other: &Self) {
        assert_eq!(
            self.modulus, other.modulus,
            "field elements from different fields: {} vs {}",
            self.modulus, other.modulus
        );
    }
}

impl Add for FieldElement {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.check_same_field(&rhs);
        self.sibling(modmath::addmod(self.value, rhs.value, self.modulus))
    }
}

impl Sub for FieldElement {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self.check_same_field(&rhs);
        let m = self.modulus;
        self.sibling(modmath::addmod(self.value, m - rhs.value % m, m))
    }
}

impl Mul for FieldElement {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.check_same_field(&rhs);
        self.sibling(modmath::mulmod(self.value, rhs.value, self.modulus))
    }
}

impl Neg for FieldElement {
    type Output = Self;

    fn neg(self) -> Self {
        self.zero_like() - self
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value)
    }
}

impl fmt::Debug for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.value, self.modulus)
    }
}
