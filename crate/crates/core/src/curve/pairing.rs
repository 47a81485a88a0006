use std::fmt;
use std::str::FromStr;

use crate::algebra::FieldElement;

use super::ext::ExtFieldElement;
use super::point::{Coordinate, Point};
use super::CurveParams;

/// Which pairing the parameter set evaluates. Both are bilinear and
/// non-degenerate on this curve family and both satisfy the certificate
/// verification equation; Tate is the default because it needs one Miller
/// loop instead of two.
#[derive(Clone, Copy, PartialEq, Eq, Debug, Default)]
pub enum PairingBackend {
    #[default]
    Tate,
    Weil,
}

impl fmt::Display for PairingBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PairingBackend::Tate => write!(f, "tate"),
            PairingBackend::Weil => write!(f, "weil"),
        }
    }
}

impl FromStr for PairingBackend {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "tate" => Ok(PairingBackend::Tate),
            "weil" => Ok(PairingBackend::Weil),
            other => Err(format!("unknown pairing backend {other:?} (expected tate or weil)")),
        }
    }
}

/// Value of the line through `a` and `b` (tangent when equal) at `q`,
/// returned as (numerator, denominator): the chord-or-tangent over the
/// vertical at the sum. This is the textbook Miller step with denominators
/// kept explicit rather than eliminated.
fn line_value<C: Coordinate>(a: &Point<C>, b: &Point<C>, q: &Point<C>) -> (C, C) {
    let (xq, yq) = (q.x().expect("q affine"), q.y().expect("q affine"));
    let (x1, y1) = (a.x().expect("a affine"), a.y().expect("a affine"));
    let one = xq.one_like();
    let lambda = if a == b {
        if y1.is_zero() {
            // Tangent at a 2-torsion point is the vertical x = x1.
            return (xq - x1, one);
        }
        (x1.small(3) * x1 * x1) * (y1.small(2) * y1).inv().expect("y1 != 0")
    } else {
        let (x2, y2) = (b.x().expect("b affine"), b.y().expect("b affine"));
        if x1 == x2 {
            // a and b are opposite: the line is the vertical x = x1.
            return (xq - x1, one);
        }
        (y2 - y1) * (x2 - x1).inv().expect("x1 != x2")
    };
    let sum = a.add(b);
    let num = (yq - y1) - lambda * (xq - x1);
    let den = xq - sum.x().expect("chord/tangent sum is affine");
    (num, den)
}

/// Miller's algorithm: f_{n,p}(q) with numerator and denominator accumulated
/// separately and divided once at the end.
///
/// Callers must pass an affine `p` of order dividing `n` and an affine `q`
/// outside the lines' zero sets; the curve shape guarantees the latter
/// whenever `q` is a distorted point — see `pairing` below.
fn miller<C: Coordinate>(p: &Point<C>, q: &Point<C>, n: u64) -> C {
    let one = q.x().expect("q affine").one_like();
    let mut t = *p;
    let mut f_num = one;
    let mut f_den = one;
    let bits = 64 - n.leading_zeros();
    for i in (0..bits.saturating_sub(1)).rev() {
        let (ln, ld) = line_value(&t, &t, q);
        f_num = f_num * f_num * ln;
        f_den = f_den * f_den * ld;
        t = t.double();
        if (n >> i) & 1 == 1 {
            let (ln, ld) = line_value(&t, p, q);
            f_num = f_num * ln;
            f_den = f_den * ld;
            t = t.add(p);
        }
    }
    debug_assert!(t.is_infinity(), "miller input point order does not divide n");
    f_num * f_den.inv().expect("denominator nonzero for independent subgroups")
}

/// The pairing ê(s, t) used by signing and verification.
///
/// Both arguments are first multiplied by the cofactor, which projects any
/// curve point onto the order-r subgroup (the whole group has order
/// cofactor·r). That makes the map total and bilinear with exponents mod r
/// for arbitrary inputs — in particular for the shipped generator, whose
/// order is the full p + 1. The second argument then goes through the
/// distortion map (x, y) ↦ (ζx, y) into E(F_p²) so the two inputs are
/// linearly independent and the result non-degenerate.
///
/// No division inside the Miller loop can hit zero: lines pass through
/// E(F_p) points while the evaluation point has x = ζ·x_t ∉ F_p (x_t = 0
/// would need a point of order 3, which the clearing removed), and p ≡ 2
/// (mod 3) makes x ↦ x³ a bijection so no two distinct points share a
/// y-coordinate (no horizontal chords).
pub(super) fn pairing(
    params: &CurveParams,
    s: &Point<FieldElement>,
    t: &Point<FieldElement>,
) -> ExtFieldElement {
    let s = params.clear_cofactor(s);
    let t = params.clear_cofactor(t);
    if s.is_infinity() || t.is_infinity() {
        return params.ext_one();
    }
    let s_ext = params.lift(&s);
    let q = params.distort(&t);
    match params.backend() {
        PairingBackend::Tate => {
            let f = miller(&s_ext, &q, params.r());
            // Final exponentiation maps the Miller value into the group of
            // r-th roots of unity: exponent (p² − 1)/r.
            let p = u128::from(params.p());
            f.pow((p * p - 1) / u128::from(params.r()))
        }
        PairingBackend::Weil => {
            let w = miller(&s_ext, &q, params.r())
                * miller(&q, &s_ext, params.r()).inv().expect("miller value nonzero");
            // The (−1)^r correction; r is an odd prime here.
            if params.r() % 2 == 1 {
                -w
            } else {
                w
            }
        }
    }
}
