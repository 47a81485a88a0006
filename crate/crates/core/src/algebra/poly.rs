use std::fmt;

use rand::Rng;

use super::{AlgebraError, FieldElement};

/// A polynomial over Z_p, coefficients stored low degree first and kept
/// normalized (no trailing zero coefficients; the zero polynomial stores
/// none at all).
#[derive(Clone, PartialEq, Eq)]
pub struct UnivariatePolynomial {
    modulus: u64,
    coeffs: Vec<FieldElement>,
}

impl UnivariatePolynomial {
    pub fn from_coeffs(modulus: u64, coeffs: Vec<FieldElement>) -> Result<Self, AlgebraError> {
        for c in &coeffs {
            if c.modulus() != modulus {
                return Err(AlgebraError::ModulusMismatch { left: modulus, right: c.modulus() });
            }
        }
        // Make sure the modulus itself is legal even for the zero polynomial.
        let _ = FieldElement::new(0, modulus)?;
        let mut p = Self { modulus, coeffs };
        p.normalize();
        Ok(p)
    }

    pub fn from_values(modulus: u64, values: &[u64]) -> Result<Self, AlgebraError> {
        let coeffs = values
            .iter()
            .map(|&v| FieldElement::new(v, modulus))
            .collect::<Result<_, _>>()?;
        Self::from_coeffs(modulus, coeffs)
    }

    pub fn zero(modulus: u64) -> Result<Self, AlgebraError> {
        Self::from_coeffs(modulus, Vec::new())
    }

    fn normalize(&mut self) {
        while self.coeffs.last().is_some_and(FieldElement::is_zero) {
            self.coeffs.pop();
        }
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Coefficient of x^i (zero beyond the stored degree).
    pub fn coefficient(&self, i: usize) -> FieldElement {
        self.coeffs
            .get(i)
            .copied()
            .unwrap_or_else(|| FieldElement::new_unchecked(0, self.modulus))
    }

    pub fn coefficients(&self) -> &[FieldElement] {
        &self.coeffs
    }

    pub fn constant_term(&self) -> FieldElement {
        self.coefficient(0)
    }

    /// Horner evaluation. Panics if `x` comes from a different field.
    pub fn eval(&self, x: FieldElement) -> FieldElement {
        assert_eq!(
            x.modulus(),
            self.modulus,
            "evaluating a polynomial over Z_{} at a point from Z_{}",
            self.modulus,
            x.modulus()
        );
        self.coeffs
            .iter()
            .rev()
            .fold(x.zero_like(), |acc, &c| acc * x + c)
    }

    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.modulus != other.modulus {
            return Err(AlgebraError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        let n = self.coeffs.len().max(other.coeffs.len());
        let coeffs = (0..n)
            .map(|i| self.coefficient(i) + other.coefficient(i))
            .collect();
        Self::from_coeffs(self.modulus, coeffs)
    }

    pub fn scale(&self, k: FieldElement) -> Self {
        let coeffs = self.coeffs.iter().map(|&c| c * k).collect();
        Self::from_coeffs(self.modulus, coeffs).expect("scaling keeps the field")
    }

    pub fn mul(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.modulus != other.modulus {
            return Err(AlgebraError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.modulus);
        }
        let zero = FieldElement::new_unchecked(0, self.modulus);
        let mut coeffs = vec![zero; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            for (j, &b) in other.coeffs.iter().enumerate() {
                coeffs[i + j] = coeffs[i + j] + a * b;
            }
        }
        Self::from_coeffs(self.modulus, coeffs)
    }

    /// Machine form used in transcripts and key files: decimal coefficients,
    /// low degree first, comma separated. The zero polynomial prints as "0".
    pub fn to_coeff_string(&self) -> String {
        if self.is_zero() {
            return "0".to_string();
        }
        self.coeffs
            .iter()
            .map(|c| c.value().to_string())
            .collect::<Vec<_>>()
            .join(",")
    }

    /// Inverse of [`to_coeff_string`](Self::to_coeff_string). Values at or
    /// above the modulus are reduced.
    pub fn parse_coeff_string(text: &str, modulus: u64) -> Result<Self, AlgebraError> {
        let bad = |reason: &str| AlgebraError::BadPolynomialText {
            text: text.to_string(),
            reason: reason.to_string(),
        };
        if text.trim().is_empty() {
            return Err(bad("empty coefficient list"));
        }
        let values = text
            .split(',')
            .map(|tok| tok.trim().parse::<u64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(&format!("bad coefficient: {e}")))?;
        Self::from_values(modulus, &values)
    }
}

impl fmt::Display for UnivariatePolynomial {
    /// Human form, high degree first: `63x^2 + 13x + 41`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            match i {
                0 => write!(f, "{}", c.value())?,
                1 if c.value() == 1 => write!(f, "x")?,
                1 => write!(f, "{}x", c.value())?,
                _ if c.value() == 1 => write!(f, "x^{i}")?,
                _ => write!(f, "{}x^{i}", c.value())?,
            }
        }
        Ok(())
    }
}

impl fmt::Debug for UnivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self, self.modulus)
    }
}

/// One Shamir share: a point `(x, f(x))` on a sharing polynomial.
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub struct SharePoint {
    x: FieldElement,
    y: FieldElement,
}

impl SharePoint {
    pub fn new(x: FieldElement, y: FieldElement) -> Result<Self, AlgebraError> {
        if x.modulus() != y.modulus() {
            return Err(AlgebraError::ModulusMismatch {
                left: x.modulus(),
                right: y.modulus(),
            });
        }
        Ok(Self { x, y })
    }

    pub fn x(&self) -> FieldElement {
        self.x
    }

    pub fn y(&self) -> FieldElement {
        self.y
    }
}

/// A symmetric bivariate polynomial F(x, z) over Z_p: the object each
/// founder contributes to the dealer-free key generation. Symmetry
/// (F(x, z) = F(z, x)) is what lets two nodes cross-check the rows they were
/// dealt, so the constructor enforces it.
#[derive(Clone, PartialEq, Eq)]
pub struct SymmetricBivariatePolynomial {
    modulus: u64,
    /// `matrix[i][j]` is the coefficient of x^i z^j; (d+1) x (d+1), symmetric.
    matrix: Vec<Vec<FieldElement>>,
}

impl SymmetricBivariatePolynomial {
    pub fn from_matrix(modulus: u64, rows: &[Vec<u64>]) -> Result<Self, AlgebraError> {
        let n = rows.len();
        if n == 0 {
            return Err(AlgebraError::NotSquare { row: 0, len: 0, expected: 1 });
        }
        let mut matrix = Vec::with_capacity(n);
        for (i, row) in rows.iter().enumerate() {
            if row.len() != n {
                return Err(AlgebraError::NotSquare { row: i, len: row.len(), expected: n });
            }
            matrix.push(
                row.iter()
                    .map(|&v| FieldElement::new(v, modulus))
                    .collect::<Result<Vec<_>, _>>()?,
            );
        }
        for (i, row) in matrix.iter().enumerate() {
            for (j, value) in row.iter().enumerate().take(i) {
                if *value != matrix[j][i] {
                    return Err(AlgebraError::NotSymmetric { i, j });
                }
            }
        }
        Ok(Self { modulus, matrix })
    }

    /// Uniformly random symmetric polynomial of per-variable degree `degree`:
    /// the upper triangle is sampled and mirrored.
    pub fn random(modulus: u64, degree: usize, rng: &mut impl Rng) -> Result<Self, AlgebraError> {
        let _ = FieldElement::new(0, modulus)?;
        let n = degree + 1;
        let mut rows = vec![vec![0u64; n]; n];
        // Writes hit two rows at once, so plain indexing it is.
        #[allow(clippy::needless_range_loop)]
        for i in 0..n {
            for j in i..n {
                let v = rng.random_range(0..modulus);
                rows[i][j] = v;
                rows[j][i] = v;
            }
        }
        Self::from_matrix(modulus, &rows)
    }

    pub fn modulus(&self) -> u64 {
        self.modulus
    }

    /// Per-variable degree bound (the matrix is (d+1) x (d+1)).
    pub fn degree(&self) -> usize {
        self.matrix.len() - 1
    }

    /// The shared secret is the constant term F(0, 0).
    pub fn secret(&self) -> FieldElement {
        self.matrix[0][0]
    }

    pub fn eval(&self, x: FieldElement, z: FieldElement) -> FieldElement {
        self.eval_row(x).eval(z)
    }

    /// Fix the first variable: the univariate row polynomial S(z) = F(x0, z)
    /// that gets dealt to the node sitting at x0.
    pub fn eval_row(&self, x0: FieldElement) -> UnivariatePolynomial {
        assert_eq!(
            x0.modulus(),
            self.modulus,
            "evaluating a polynomial over Z_{} at a point from Z_{}",
            self.modulus,
            x0.modulus()
        );
        let n = self.matrix.len();
        let mut coeffs = vec![x0.zero_like(); n];
        let mut x_pow = x0.one_like();
        for i in 0..n {
            for (j, c) in coeffs.iter_mut().enumerate() {
                *c = *c + self.matrix[i][j] * x_pow;
            }
            x_pow = x_pow * x0;
        }
        UnivariatePolynomial::from_coeffs(self.modulus, coeffs).expect("same field")
    }

    /// Coefficient-wise sum; degrees may differ, the result takes the larger.
    pub fn add(&self, other: &Self) -> Result<Self, AlgebraError> {
        if self.modulus != other.modulus {
            return Err(AlgebraError::ModulusMismatch {
                left: self.modulus,
                right: other.modulus,
            });
        }
        let n = self.matrix.len().max(other.matrix.len());
        let at = |m: &Self, i: usize, j: usize| {
            m.matrix
                .get(i)
                .and_then(|row| row.get(j))
                .map_or(0, |c| c.value())
        };
        let rows: Vec<Vec<u64>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| (at(self, i, j) + at(other, i, j)) % self.modulus)
                    .collect()
            })
            .collect();
        Self::from_matrix(self.modulus, &rows)
    }

    /// Machine form: rows of the coefficient matrix, comma separated inside
    /// a row and semicolon separated between rows, e.g. `5,5,0;5,8,3;0,3,0`.
    pub fn to_matrix_string(&self) -> String {
        self.matrix
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| c.value().to_string())
                    .collect::<Vec<_>>()
                    .join(",")
            })
            .collect::<Vec<_>>()
            .join(";")
    }

    pub fn parse_matrix_string(text: &str, modulus: u64) -> Result<Self, AlgebraError> {
        let bad = |reason: String| AlgebraError::BadPolynomialText {
            text: text.to_string(),
            reason,
        };
        let rows = text
            .split(';')
            .map(|row| {
                row.split(',')
                    .map(|tok| tok.trim().parse::<u64>())
                    .collect::<Result<Vec<_>, _>>()
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| bad(format!("bad coefficient: {e}")))?;
        Self::from_matrix(modulus, &rows)
    }
}

impl fmt::Debug for SymmetricBivariatePolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (mod {})", self.to_matrix_string(), self.modulus)
    }
}
