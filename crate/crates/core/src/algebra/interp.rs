use rand::Rng;

use super::{AlgebraError, FieldElement, SharePoint, UnivariatePolynomial};

fn check_points(points: &[SharePoint]) -> Result<u64, AlgebraError> {
    let first = points.first().ok_or(AlgebraError::EmptyPointSet)?;
    let modulus = first.x().modulus();
    for (i, p) in points.iter().enumerate() {
        if p.x().modulus() != modulus {
            return Err(AlgebraError::ModulusMismatch {
                left: modulus,
                right: p.x().modulus(),
            });
        }
        if points[..i].iter().any(|q| q.x() == p.x()) {
            return Err(AlgebraError::DuplicateAbscissa(p.x().value()));
        }
    }
    Ok(modulus)
}

/// Evaluate at `x0` the unique polynomial of degree < points.len() through
/// the given points, without building its coefficients. With `x0 = 0` this
/// is exactly Shamir reconstruction: sum of y_i weighted by the Lagrange
/// coefficients at zero.
pub fn lagrange_interpolate_at(
    points: &[SharePoint],
    x0: FieldElement,
) -> Result<FieldElement, AlgebraError> {
    let modulus = check_points(points)?;
    if x0.modulus() != modulus {
        return Err(AlgebraError::ModulusMismatch { left: modulus, right: x0.modulus() });
    }
    let mut acc = x0.zero_like();
    for (i, p) in points.iter().enumerate() {
        let mut num = x0.one_like();
        let mut den = x0.one_like();
        for (j, q) in points.iter().enumerate() {
            if i != j {
                num = num * (x0 - q.x());
                den = den * (p.x() - q.x());
            }
        }
        acc = acc + p.y() * num * den.inv().expect("abscissae are distinct");
    }
    Ok(acc)
}

/// The full interpolating polynomial through the points (degree below
/// points.len(); lower when the data happens to lie on a smaller curve).
pub fn lagrange_interpolate_poly(
    points: &[SharePoint],
) -> Result<UnivariatePolynomial, AlgebraError> {
    let modulus = check_points(points)?;
    let mut acc = UnivariatePolynomial::zero(modulus)?;
    for (i, p) in points.iter().enumerate() {
        let mut basis = UnivariatePolynomial::from_values(modulus, &[1])?;
        let mut den = p.x().one_like();
        for (j, q) in points.iter().enumerate() {
            if i != j {
                // (x - x_j)
                let linear = UnivariatePolynomial::from_coeffs(
                    modulus,
                    vec![-q.x(), q.x().one_like()],
                )?;
                basis = basis.mul(&linear)?;
                den = den * (p.x() - q.x());
            }
        }
        acc = acc.add(&basis.scale(p.y() * den.inv().expect("abscissae are distinct")))?;
    }
    Ok(acc)
}

/// Classic Shamir dealing: hide `secret` in the constant term of a random
/// polynomial of degree `threshold - 1` and hand out evaluations at
/// x = 1..=share_count. Any `threshold` shares reconstruct; fewer reveal
/// nothing.
pub fn deal_univariate_shares(
    secret: FieldElement,
    threshold: usize,
    share_count: usize,
    rng: &mut impl Rng,
) -> Result<(UnivariatePolynomial, Vec<SharePoint>), AlgebraError> {
    if threshold == 0 || threshold > share_count {
        return Err(AlgebraError::BadThreshold { threshold, share_count });
    }
    let modulus = secret.modulus();
    if share_count as u64 >= modulus {
        return Err(AlgebraError::FieldTooSmall { share_count, modulus });
    }
    let mut coeffs = vec![secret];
    for _ in 1..threshold {
        coeffs.push(secret.sibling(rng.random_range(0..modulus)));
    }
    let poly = UnivariatePolynomial::from_coeffs(modulus, coeffs)?;
    let shares = (1..=share_count as u64)
        .map(|x| {
            let x = secret.sibling(x);
            SharePoint::new(x, poly.eval(x))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok((poly, shares))
}
