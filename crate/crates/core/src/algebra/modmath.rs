//! Bare modular arithmetic on `u64`, shared by the field, curve and RSA
//! layers. Intermediate products go through `u128` so any `u64` modulus is
//! safe from overflow.

use rand::Rng;

/// `(a * b) mod m` without overflow.
pub(crate) fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    (u128::from(a) * u128::from(b) % u128::from(m)) as u64
}

/// `(a + b) mod m` without overflow.
pub(crate) fn addmod(a: u64, b: u64, m: u64) -> u64 {
    ((u128::from(a) + u128::from(b)) % u128::from(m)) as u64
}

/// `base^exp mod m` by square-and-multiply. `m` must be nonzero.
pub(crate) fn powmod(base: u64, mut exp: u64, m: u64) -> u64 {
    if m == 1 {
        return 0;
    }
    let mut acc = 1u64;
    let mut base = base % m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Inverse of `a` modulo `m` via extended Euclid, `None` when `gcd(a, m) != 1`.
pub(crate) fn invmod(a: u64, m: u64) -> Option<u64> {
    let (mut old_r, mut r) = (i128::from(a % m), i128::from(m));
    let (mut old_s, mut s) = (1i128, 0i128);
    while r != 0 {
        let q = old_r / r;
        (old_r, r) = (r, old_r - q * r);
        (old_s, s) = (s, old_s - q * s);
    }
    if old_r != 1 {
        return None;
    }
    Some(old_s.rem_euclid(i128::from(m)) as u64)
}

/// Deterministic Miller-Rabin, exact for all `u64` (the first twelve prime
/// bases are a proven witness set below 3.3 * 10^24).
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n.is_multiple_of(p) {
            return false;
        }
    }
    let (s, d) = split_pow2(n - 1);
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Write `n` as `2^s * d` with `d` odd.
fn split_pow2(n: u64) -> (u32, u64) {
    let s = n.trailing_zeros();
    (s, n >> s)
}

/// Probabilistic Miller-Rabin with caller-supplied randomness, for candidate
/// testing inside seeded key generation. 32 random bases put the error
/// probability below 4^-32; `is_prime` stays the authority in validators.
pub(crate) fn is_probable_prime(n: u64, rng: &mut impl Rng) -> bool {
    if n < 5 {
        return n == 2 || n == 3;
    }
    if n.is_multiple_of(2) {
        return false;
    }
    let (s, d) = split_pow2(n - 1);
    'witness: for _ in 0..32 {
        let a = rng.random_range(2..n - 1);
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 0..s - 1 {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Square root of `c` modulo an odd prime `p` by Tonelli-Shanks.
/// Returns `None` when `c` is a non-residue.
pub(crate) fn sqrt_mod(c: u64, p: u64) -> Option<u64> {
    let c = c % p;
    if c == 0 {
        return Some(0);
    }
    if powmod(c, (p - 1) / 2, p) != 1 {
        return None;
    }
    if p % 4 == 3 {
        return Some(powmod(c, (p + 1) / 4, p));
    }
    let (s, q) = split_pow2(p - 1);
    let z = (2..p)
        .find(|&z| powmod(z, (p - 1) / 2, p) == p - 1)
        .expect("odd prime has a non-residue");
    let mut m = s;
    let mut c_acc = powmod(z, q, p);
    let mut t = powmod(c, q, p);
    let mut r = powmod(c, q.div_ceil(2), p);
    while t != 1 {
        let i = (1..m)
            .scan(t, |tt, i| {
                *tt = mulmod(*tt, *tt, p);
                Some((i, *tt))
            })
            .find(|&(_, tt)| tt == 1)
            .map(|(i, _)| i)?;
        let b = powmod(c_acc, 1 << (m - i - 1), p);
        m = i;
        c_acc = mulmod(b, b, p);
        t = mulmod(t, c_acc, p);
        r = mulmod(r, b, p);
    }
    Some(r)
}
