//! Dense univariate polynomials over the rationals.
//!
//! The same type carries polynomials in the sinusoidal coordinate η and the
//! closure polynomials in the spectral variable z.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::exact::{fmt_scalar, one, zero, Scalar};

/// Coefficient `k` multiplies `η^k`. Trailing zeros are always trimmed, so the
/// zero polynomial has no coefficients and no degree.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    coeffs: Vec<Scalar>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Scalar>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: Vec::new() }
    }

    pub fn constant(c: Scalar) -> Self {
        Poly::new(vec![c])
    }

    pub fn one() -> Self {
        Poly::constant(one())
    }

    /// The monomial `η`.
    pub fn x() -> Self {
        Poly::new(vec![zero(), one()])
    }

    pub fn monomial(c: Scalar, k: usize) -> Self {
        let mut v = vec![zero(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeffs(&self) -> &[Scalar] {
        &self.coeffs
    }

    /// Coefficient of `η^k` (zero beyond the degree).
    pub fn coeff(&self, k: usize) -> Scalar {
        self.coeffs.get(k).cloned().unwrap_or_else(zero)
    }

    pub fn leading(&self) -> Option<&Scalar> {
        self.coeffs.last()
    }

    pub fn eval(&self, at: &Scalar) -> Scalar {
        self.coeffs
            .iter()
            .rev()
            .fold(zero(), |acc, c| acc * at + c)
    }

    pub fn scale(&self, s: &Scalar) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| c * s).collect())
    }

    /// `p(α η + β)`.
    pub fn compose_affine(&self, alpha: &Scalar, beta: &Scalar) -> Poly {
        let inner = Poly::new(vec![beta.clone(), alpha.clone()]);
        self.coeffs
            .iter()
            .rev()
            .fold(Poly::zero(), |acc, c| &(&acc * &inner) + &Poly::constant(c.clone()))
    }

    /// Newton-form interpolation through `(nodes[i], values[i])`; nodes must
    /// be pairwise distinct. Result has degree `< nodes.len()`.
    pub fn interpolate(nodes: &[Scalar], values: &[Scalar]) -> Result<Poly> {
        if nodes.len() != values.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} nodes vs {} values",
                nodes.len(),
                values.len()
            )));
        }
        let n = nodes.len();
        let mut dd: Vec<Scalar> = values.to_vec();
        for level in 1..n {
            for i in (level..n).rev() {
                let den = &nodes[i] - &nodes[i - level];
                if den.is_zero() {
                    return Err(Error::SingularMatrix);
                }
                dd[i] = (&dd[i] - &dd[i - 1]) / den;
            }
        }
        let mut p = Poly::zero();
        for i in (0..n).rev() {
            let factor = Poly::new(vec![-nodes[i].clone(), one()]);
            p = &(&p * &factor) + &Poly::constant(dd[i].clone());
        }
        Ok(p)
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(fmt_scalar).collect();
        write!(f, "Poly[{}]", parts.join(", "))
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::new(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| -c).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::exact::{int, ratio};

    #[test]
    fn square_of_eta() {
        let p = &Poly::x() * &Poly::x();
        assert_eq!(p, Poly::monomial(int(1), 2));
        assert_eq!(p.degree(), Some(2));
    }

    #[test]
    fn evaluation_by_substitution() {
        let p = Poly::new(vec![int(-1), int(0), int(1)]);
        assert_eq!(p.eval(&ratio(3, 2)), ratio(5, 4));
    }

    #[test]
    fn additive_inverse_is_zero() {
        let p = Poly::new(vec![ratio(1, 3), int(2), int(-5)]);
        let z = &p + &(-&p);
        assert!(z.is_zero());
        assert_eq!(z.degree(), None);
    }

    #[test]
    fn affine_composition() {
        // (η² − 1)(2η + 1) evaluated at 1 equals p(3) = 8
        let p = Poly::new(vec![int(-1), int(0), int(1)]);
        let c = p.compose_affine(&int(2), &int(1));
        assert_eq!(c.eval(&int(1)), int(8));
        assert_eq!(c.degree(), Some(2));
    }

    #[test]
    fn interpolation_recovers_cubic() {
        let p = Poly::new(vec![ratio(1, 2), int(-3), int(0), ratio(7, 5)]);
        let nodes: Vec<Scalar> = (0..6).map(|i| ratio(i * i + 1, 3)).collect();
        let values: Vec<Scalar> = nodes.iter().map(|t| p.eval(t)).collect();
        assert_eq!(Poly::interpolate(&nodes, &values).unwrap(), p);
        assert!(Poly::interpolate(&[int(1), int(1)], &[int(0), int(1)]).is_err());
    }

    fn arb_poly() -> impl Strategy<Value = Poly> {
        proptest::collection::vec(-5i64..6, 0..5).prop_map(|v| Poly::new(v.into_iter().map(int).collect()))
    }

    proptest! {
        #[test]
        fn evaluation_is_a_ring_homomorphism(p in arb_poly(), q in arb_poly(), n in -7i64..8, d in 1i64..5) {
            let z = ratio(n, d);
            prop_assert_eq!((&p + &q).eval(&z), p.eval(&z) + q.eval(&z));
            prop_assert_eq!((&p * &q).eval(&z), p.eval(&z) * q.eval(&z));
        }

        #[test]
        fn interpolation_recovers_the_polynomial(p in arb_poly()) {
            let nodes: Vec<Scalar> = (0..5).map(|k| ratio(k * k + 1, k + 2)).collect();
            let values: Vec<Scalar> = nodes.iter().map(|z| p.eval(z)).collect();
            prop_assert_eq!(Poly::interpolate(&nodes, &values).unwrap(), p);
        }
    }
}
