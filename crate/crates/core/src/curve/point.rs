use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::algebra::FieldElement;

use super::ext::ExtFieldElement;
use super::CurveError;

/// What point arithmetic needs from a coordinate field. Implemented for the
/// base field and its quadratic extension so one group law serves both
/// E(F_p) and E(F_p²).
pub trait Coordinate:
    Copy
    + PartialEq
    + Eq
    + fmt::Display
    + fmt::Debug
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Neg<Output = Self>
{
    fn zero_like(&self) -> Self;
    fn one_like(&self) -> Self;
    fn is_zero(&self) -> bool;
    /// `None` exactly for zero.
    fn inv(&self) -> Option<Self>;
    /// The small constant `k` in this element's field.
    fn small(&self, k: u64) -> Self;
}

impl Coordinate for FieldElement {
    fn zero_like(&self) -> Self {
        FieldElement::zero_like(self)
    }

    fn one_like(&self) -> Self {
        FieldElement::one_like(self)
    }

    fn is_zero(&self) -> bool {
        FieldElement::is_zero(self)
    }

    fn inv(&self) -> Option<Self> {
        FieldElement::inv(self).ok()
    }

    fn small(&self, k: u64) -> Self {
        self.sibling(k)
    }
}

impl Coordinate for ExtFieldElement {
    fn zero_like(&self) -> Self {
        ExtFieldElement::zero_like(self)
    }

    fn one_like(&self) -> Self {
        ExtFieldElement::one_like(self)
    }

    fn is_zero(&self) -> bool {
        ExtFieldElement::is_zero(self)
    }

    fn inv(&self) -> Option<Self> {
        ExtFieldElement::inv(self)
    }

    fn small(&self, k: u64) -> Self {
        ExtFieldElement::from_base(self.c0().sibling(k), self.non_residue())
    }
}

/// A point on E: y² = x³ + 1, either affine or the group identity.
///
/// The constructor checks the curve equation, so every `Point` in the
/// program is genuinely on the curve.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct Point<C: Coordinate> {
    /// `None` is the point at infinity.
    coords: Option<(C, C)>,
}

pub type BasePoint = Point<FieldElement>;
pub type ExtPoint = Point<ExtFieldElement>;

impl<C: Coordinate> Point<C> {
    pub fn infinity() -> Self {
        Self { coords: None }
    }

    pub fn new(x: C, y: C) -> Result<Self, CurveError> {
        let one = x.one_like();
        if y * y != x * x * x + one {
            return Err(CurveError::NotOnCurve { x: x.to_string(), y: y.to_string() });
        }
        Ok(Self { coords: Some((x, y)) })
    }

    pub fn is_infinity(&self) -> bool {
        self.coords.is_none()
    }

    pub fn x(&self) -> Option<C> {
        self.coords.map(|(x, _)| x)
    }

    pub fn y(&self) -> Option<C> {
        self.coords.map(|(_, y)| y)
    }

    pub fn neg(&self) -> Self {
        Self { coords: self.coords.map(|(x, y)| (x, -y)) }
    }

    /// Chord-and-tangent addition. The slope denominators cannot vanish:
    /// equal-x cases are dispatched before any division.
    pub fn add(&self, other: &Self) -> Self {
        let (x1, y1) = match self.coords {
            None => return *other,
            Some(c) => c,
        };
        let (x2, y2) = match other.coords {
            None => return *self,
            Some(c) => c,
        };
        if x1 == x2 && (y1 + y2).is_zero() {
            return Self::infinity();
        }
        let lambda = if x1 == x2 && y1 == y2 {
            // Tangent: 3x² / 2y (y ≠ 0 here, or the branch above caught it).
            (x1.small(3) * x1 * x1) * (y1.small(2) * y1).inv().expect("y != 0")
        } else {
            (y2 - y1) * (x2 - x1).inv().expect("x1 != x2")
        };
        let x3 = lambda * lambda - x1 - x2;
        let y3 = lambda * (x1 - x3) - y1;
        Self { coords: Some((x3, y3)) }
    }

    pub fn double(&self) -> Self {
        self.add(self)
    }

    /// Scalar multiple by double-and-add. `k` is not reduced: the caller
    /// decides which group order applies.
    pub fn mul(&self, mut k: u64) -> Self {
        let mut acc = Self::infinity();
        let mut base = *self;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.add(&base);
            }
            base = base.double();
            k >>= 1;
        }
        acc
    }
}

impl<C: Coordinate> fmt::Display for Point<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coords {
            None => write!(f, "inf"),
            Some((x, y)) => write!(f, "{x},{y}"),
        }
    }
}

impl<C: Coordinate> fmt::Debug for Point<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.coords {
            None => write!(f, "Point(inf)"),
            Some((x, y)) => write!(f, "Point({x:?}, {y:?})"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fe(v: u64) -> FieldElement {
        FieldElement::new(v, 4019).unwrap()
    }

    fn pt(x: u64, y: u64) -> BasePoint {
        Point::new(fe(x), fe(y)).unwrap()
    }

    #[test]
    fn rejects_points_off_the_curve() {
        assert!(Point::new(fe(3198), fe(578)).is_ok());
        assert!(matches!(
            Point::new(fe(3198), fe(579)),
            Err(CurveError::NotOnCurve { .. })
        ));
    }

    #[test]
    fn commitment_multiples_of_the_shipped_generator() {
        let g = pt(3198, 578);
        assert_eq!(g.mul(5), pt(152, 1437));
        assert_eq!(g.mul(9), pt(409, 2266));
        assert_eq!(g.mul(6), pt(3063, 3143));
        assert_eq!(g.mul(4), pt(3863, 2497));
        assert_eq!(g.mul(24), pt(2651, 2267));
        // The four founder commitments sum to the group public key.
        let sum = g.mul(5).add(&g.mul(9)).add(&g.mul(6)).add(&g.mul(4));
        assert_eq!(sum, pt(2651, 2267));
    }

    #[test]
    fn group_axioms_hold_on_samples() {
        let g = pt(3198, 578);
        let (a, b, c) = (g.mul(17), g.mul(101), g.mul(999));
        assert_eq!(a.add(&b), b.add(&a));
        assert_eq!(a.add(&b).add(&c), a.add(&b.add(&c)));
        assert_eq!(a.add(&Point::infinity()), a);
        assert_eq!(a.add(&a.neg()), Point::infinity());
        assert_eq!(a.add(&a), a.double());
        // The full group has order p + 1 = 4020.
        assert_eq!(g.mul(4020), Point::infinity());
        assert_ne!(g.mul(67), Point::infinity());
        assert_ne!(g.mul(60), Point::infinity());
    }

    #[test]
    fn order_two_and_three_points_behave() {
        // (0, 1) is an inflection point of order 3: 2·(0,1) = (0,-1).
        let t = pt(0, 1);
        assert_eq!(t.double(), pt(0, 4018));
        assert_eq!(t.mul(3), Point::infinity());
    }

    #[test]
    fn scalar_multiplication_is_a_homomorphism() {
        let g = pt(3198, 578);
        for (a, b) in [(2u64, 3u64), (15, 52), (67, 60), (1000, 3020)] {
            assert_eq!(g.mul(a).add(&g.mul(b)), g.mul(a + b));
            assert_eq!(g.mul(a).mul(b), g.mul(a * b % 4020));
        }
    }

    #[test]
    fn signature_subgroup_points_have_order_r() {
        let h = pt(163, 1362);
        assert_eq!(h.mul(67), Point::infinity());
        assert_eq!(h.mul(24), pt(2350, 3239));
    }

    proptest::proptest! {
        /// The group laws, exercised through random multiples of the
        /// generator (which generates the whole cyclic group of order
        /// 4020 on this curve).
        #[test]
        fn addition_forms_a_commutative_group(
            a in 0..4020u64,
            b in 0..4020u64,
            c in 0..4020u64,
        ) {
            let g = pt(3198, 578);
            let (pa, pb, pc) = (g.mul(a), g.mul(b), g.mul(c));
            proptest::prop_assert_eq!(pa.add(&pb), pb.add(&pa));
            proptest::prop_assert_eq!(pa.add(&pb).add(&pc), pa.add(&pb.add(&pc)));
            proptest::prop_assert_eq!(pa.add(&Point::infinity()), pa);
            proptest::prop_assert_eq!(pa.add(&pa.neg()), Point::infinity());
            proptest::prop_assert_eq!(pa.add(&pb), g.mul((a + b) % 4020));
            proptest::prop_assert_eq!(pa.mul(4020), Point::infinity());
        }
    }
}
