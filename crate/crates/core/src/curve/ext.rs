use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::FieldElement;

/// An element of F_{p²} = F_p[a] / (a² − nr), stored as `c1·a + c0` for a
/// fixed quadratic non-residue `nr`. The pairing lands here.
///
/// Like [`FieldElement`], mixing elements built over different fields (or
/// different non-residues) panics: that is a wiring bug, not data.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct ExtFieldElement {
    c0: FieldElement,
    c1: FieldElement,
    non_residue: FieldElement,
}

impl ExtFieldElement {
    pub(crate) fn new(c0: FieldElement, c1: FieldElement, non_residue: FieldElement) -> Self {
        assert_eq!(c0.modulus(), c1.modulus(), "extension coefficients from different fields");
        assert_eq!(c0.modulus(), non_residue.modulus(), "non-residue from a different field");
        Self { c0, c1, non_residue }
    }

    /// Embed a base-field element (c1 = 0).
    pub(crate) fn from_base(c0: FieldElement, non_residue: FieldElement) -> Self {
        Self::new(c0, c0.zero_like(), non_residue)
    }

    /// Constant term (coefficient of 1).
    pub fn c0(&self) -> FieldElement {
        self.c0
    }

    /// Coefficient of `a`.
    pub fn c1(&self) -> FieldElement {
        self.c1
    }

    pub(crate) fn non_residue(&self) -> FieldElement {
        self.non_residue
    }

    pub fn is_zero(&self) -> bool {
        self.c0.is_zero() && self.c1.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.c0.value() == 1 && self.c1.is_zero()
    }

    pub fn zero_like(&self) -> Self {
        Self::new(self.c0.zero_like(), self.c0.zero_like(), self.non_residue)
    }

    pub fn one_like(&self) -> Self {
        Self::new(self.c0.one_like(), self.c0.zero_like(), self.non_residue)
    }

    /// Inverse via the norm: (c1·a + c0)⁻¹ = (−c1·a + c0) / (c0² − nr·c1²).
    /// `None` for zero; the norm of a nonzero element cannot vanish because
    /// `nr` is a non-residue.
    pub fn inv(&self) -> Option<Self> {
        let norm = self.c0 * self.c0 - self.non_residue * self.c1 * self.c1;
        let norm_inv = norm.inv().ok()?;
        Some(Self::new(self.c0 * norm_inv, -self.c1 * norm_inv, self.non_residue))
    }

    /// Square-and-multiply; the exponent is `u128` because the reduced
    /// pairing's final exponent (p² − 1)/r outgrows the base field's width.
    pub fn pow(&self, mut exp: u128) -> Self {
        let mut acc = self.one_like();
        let mut base = *self;
        while exp > 0 {
            if exp & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            exp >>= 1;
        }
        acc
    }

    fn check_compatible(&self, other: &Self) {
        assert_eq!(
            self.c0.modulus(),
            other.c0.modulus(),
            "extension elements from different fields: {} vs {}",
            self.c0.modulus(),
            other.c0.modulus()
        );
        assert_eq!(
            self.non_residue, other.non_residue,
            "extension elements built over different non-residues"
        );
    }
}

impl Add for ExtFieldElement {
    type Output = Self;

    fn add(self, rhs: Self) -> Self {
        self.check_compatible(&rhs);
        Self::new(self.c0 + rhs.c0, self.c1 + rhs.c1, self.non_residue)
    }
}

impl Sub for ExtFieldElement {
    type Output = Self;

    fn sub(self, rhs: Self) -> Self {
        self.check_compatible(&rhs);
        Self::new(self.c0 - rhs.c0, self.c1 - rhs.c1, self.non_residue)
    }
}

impl Mul for ExtFieldElement {
    type Output = Self;

    fn mul(self, rhs: Self) -> Self {
        self.check_compatible(&rhs);
        // (c1 a + c0)(d1 a + d0) = (c1 d0 + c0 d1) a + (c0 d0 + nr c1 d1)
        Self::new(
            self.c0 * rhs.c0 + self.non_residue * self.c1 * rhs.c1,
            self.c1 * rhs.c0 + self.c0 * rhs.c1,
            self.non_residue,
        )
    }
}

impl Neg for ExtFieldElement {
    type Output = Self;

    fn neg(self) -> Self {
        Self::new(-self.c0, -self.c1, self.non_residue)
    }
}

impl fmt::Display for ExtFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}*a + {}", self.c1.value(), self.c0.value())
    }
}

impl fmt::Debug for ExtFieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{}*a + {} (mod {}, a^2 = {})",
            self.c1.value(),
            self.c0.value(),
            self.c0.modulus(),
            self.non_residue.value()
        )
    }
}
