//! Rational scalars and the small helpers every formula module leans on.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};

/// Exact rational number, always kept in lowest terms with a positive denominator.
pub type Scalar = BigRational;

pub fn int(i: i64) -> Scalar {
    Scalar::from_integer(BigInt::from(i))
}

pub fn ratio(n: i64, d: i64) -> Scalar {
    Scalar::new(BigInt::from(n), BigInt::from(d))
}

pub fn zero() -> Scalar {
    Scalar::zero()
}

pub fn one() -> Scalar {
    Scalar::one()
}

/// Parses `"p/q"` or a bare integer `"p"`.
pub fn parse_scalar(s: &str) -> Result<Scalar> {
    let bad = || Error::ParseScalar(s.to_string());
    let t = s.trim();
    let (num, den) = match t.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (t, "1"),
    };
    let num: BigInt = num.parse().map_err(|_| bad())?;
    let den: BigInt = den.parse().map_err(|_| bad())?;
    if den.is_zero() {
        return Err(bad());
    }
    Ok(Scalar::new(num, den))
}

/// Canonical `"p/q"` rendering; integers keep the `/1`.
pub fn fmt_scalar(x: &Scalar) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

/// Integer power allowing negative exponents. Panics on `0^(-k)`.
pub fn pow_i(x: &Scalar, e: i64) -> Scalar {
    if e >= 0 {
        num_traits::pow(x.clone(), e as usize)
    } else {
        assert!(!x.is_zero(), "negative power of zero");
        num_traits::pow(x.recip(), (-e) as usize)
    }
}

/// Rising factorial `(x)_n`.
pub fn poch(x: &Scalar, n: usize) -> Scalar {
    let mut acc = one();
    let mut f = x.clone();
    for _ in 0..n {
        acc *= &f;
        f += one();
    }
    acc
}

/// `(x; q)_n`.
pub fn qpoch(x: &Scalar, q: &Scalar, n: usize) -> Scalar {
    let mut acc = one();
    let mut f = x.clone();
    for _ in 0..n {
        acc *= one() - &f;
        f *= q;
    }
    acc
}

pub fn binomial(n: i64, k: i64) -> Scalar {
    if k < 0 || n < 0 || k > n {
        return zero();
    }
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    Scalar::from_integer(acc)
}

pub fn factorial(n: u64) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, i| acc * BigInt::from(i))
}

/// Divides, reporting a zero denominator with the given context label.
pub fn checked_div(num: &Scalar, den: &Scalar, ctx: &str) -> Result<Scalar> {
    if den.is_zero() {
        Err(Error::ZeroDenominator(ctx.to_string()))
    } else {
        Ok(num / den)
    }
}

pub fn sign(x: &Scalar) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

/// Serde adapter writing scalars as `"p/q"` strings.
pub mod serde_scalar {
    use super::*;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(x: &Scalar, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_scalar(x))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Scalar, D::Error> {
        let s = String::deserialize(d)?;
        parse_scalar(&s).map_err(serde::de::Error::custom)
    }
}

/// Same as [`serde_scalar`] for vectors.
pub mod serde_scalar_vec {
    use super::*;
    use serde::ser::SerializeSeq;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(xs: &[Scalar], s: S) -> std::result::Result<S::Ok, S::Error> {
        let mut seq = s.serialize_seq(Some(xs.len()))?;
        for x in xs {
            seq.serialize_element(&fmt_scalar(x))?;
        }
        seq.end()
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Scalar>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| parse_scalar(s).map_err(serde::de::Error::custom))
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_scalar("3/2").unwrap(), ratio(3, 2));
        assert_eq!(parse_scalar("-14/2").unwrap(), int(-7));
        assert_eq!(fmt_scalar(&int(-7)), "-7/1");
        assert_eq!(fmt_scalar(&ratio(6, -4)), "-3/2");
        assert!(parse_scalar("3/0").is_err());
        assert!(parse_scalar("x").is_err());
    }

    #[test]
    fn pochhammers() {
        assert_eq!(poch(&int(3), 0), int(1));
        assert_eq!(poch(&int(3), 3), int(60));
        assert_eq!(poch(&int(-2), 3), int(0));
        // (1/2;1/2)_2 = (1/2)(3/4)
        assert_eq!(qpoch(&ratio(1, 2), &ratio(1, 2), 2), ratio(3, 8));
        assert_eq!(pow_i(&ratio(1, 2), -3), int(8));
        assert_eq!(binomial(6, 2), int(15));
        assert_eq!(binomial(2, 3), int(0));
    }
}
