//! Textbook RSA at toy sizes.
//!
//! Each node carries an RSA key pair alongside its identity; the threshold
//! certificate binds the public half (e, n) to the node's label, and the
//! messaging leg encrypts small values directly as m^e mod n. No padding,
//! no OAEP, moduli of a dozen bits — this is the demonstration cipher the
//! protocol wraps, not a real one.

use rand::Rng;
use thiserror::Error;

use crate::algebra::modmath;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum RsaError {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("the two primes must differ, both are {0}")]
    EqualPrimes(u64),
    #[error("exponent {e} shares a factor with phi = {phi}")]
    ExponentNotCoprime { e: u64, phi: u64 },
    #[error("value {value} is not below the modulus {modulus}")]
    ValueTooLarge { value: u64, modulus: u64 },
    #[error("prime size of {0} bits is outside the supported 3..=31")]
    BadPrimeBits(u32),
}

/// A full RSA key: public exponent, modulus, private exponent, and the two
/// primes (kept so audits can recompute φ).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RsaKeyPair {
    e: u64,
    n: u64,
    d: u64,
    p: u64,
    q: u64,
}

impl RsaKeyPair {
    /// Build a key pair from chosen primes and public exponent: d = e⁻¹ mod
    /// (p−1)(q−1). Primality is checked; p = 2 is legal at these toy sizes.
    pub fn from_primes(p: u64, q: u64, e: u64) -> Result<Self, RsaError> {
        if !modmath::is_prime(p) {
            return Err(RsaError::NotPrime(p));
        }
        if !modmath::is_prime(q) {
            return Err(RsaError::NotPrime(q));
        }
        if p == q {
            return Err(RsaError::EqualPrimes(p));
        }
        let phi = (p - 1) * (q - 1);
        let d = modmath::invmod(e, phi).ok_or(RsaError::ExponentNotCoprime { e, phi })?;
        Ok(Self { e, n: p * q, d, p, q })
    }

    /// Generate a fresh pair with two distinct random primes of exactly
    /// `prime_bits` bits and the smallest odd e ≥ 3 coprime to φ.
    ///
    /// At least 3 bits: the generator only samples odd candidates and there
    /// is exactly one odd 2-bit prime, so two distinct ones need 3 bits.
    pub fn generate(prime_bits: u32, rng: &mut impl Rng) -> Result<Self, RsaError> {
        if !(3..=31).contains(&prime_bits) {
            return Err(RsaError::BadPrimeBits(prime_bits));
        }
        let p = random_prime(prime_bits, rng);
        let mut q = random_prime(prime_bits, rng);
        while q == p {
            q = random_prime(prime_bits, rng);
        }
        let phi = (p - 1) * (q - 1);
        let e = (3..)
            .step_by(2)
            .find(|&e| modmath::gcd(e, phi) == 1)
            .expect("phi - 1 is odd and coprime to phi");
        Self::from_primes(p, q, e)
    }

    pub fn e(&self) -> u64 {
        self.e
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn d(&self) -> u64 {
        self.d
    }

    pub fn primes(&self) -> (u64, u64) {
        (self.p, self.q)
    }

    /// The public record (e, n) that goes into certificates.
    pub fn public(&self) -> (u64, u64) {
        (self.e, self.n)
    }
}

/// m^e mod n. The message must be a canonical residue (m < n) or the
/// recipient could never distinguish m from m + n.
pub fn encrypt(m: u64, e: u64, n: u64) -> Result<u64, RsaError> {
    if m >= n {
        return Err(RsaError::ValueTooLarge { value: m, modulus: n });
    }
    Ok(modmath::powmod(m, e, n))
}

/// c^d mod n, the inverse of [`encrypt`] for matching keys.
pub fn decrypt(c: u64, d: u64, n: u64) -> Result<u64, RsaError> {
    if c >= n {
        return Err(RsaError::ValueTooLarge { value: c, modulus: n });
    }
    Ok(modmath::powmod(c, d, n))
}

/// An odd random prime with the top bit of `bits` set.
fn random_prime(bits: u32, rng: &mut impl Rng) -> u64 {
    let lo = 1u64 << (bits - 1);
    let hi = 1u64 << bits;
    loop {
        // Force the width and oddness, then test.
        let candidate = rng.random_range(lo..hi) | lo | 1;
        if modmath::is_probable_prime(candidate, rng) {
            return candidate;
        }
    }
}
