//! Binary floating-point numbers with a caller-chosen mantissa width.
//!
//! Only what the square-root-carrying Hamiltonians and the semidefinite
//! factorization need: correctly rounded conversion from rationals, the four
//! operations, and square roots. Each result is rounded to nearest-even at the
//! larger precision of its operands.

use std::cmp::Ordering;
use std::fmt;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::Scalar;

pub const DEFAULT_PRECISION: u32 = 256;

/// `mant · 2^exp` with `|mant| < 2^prec`.
#[derive(Clone, Debug)]
pub struct BigReal {
    mant: BigInt,
    exp: i64,
    prec: u32,
}

fn round_shift_right(m: &BigInt, s: u64) -> BigInt {
    if s == 0 {
        return m.clone();
    }
    let neg = m.is_negative();
    let a = m.abs();
    let q = &a >> s;
    let rem = &a - (&q << s);
    let half = BigInt::one() << (s - 1);
    let q = match rem.cmp(&half) {
        Ordering::Greater => q + 1,
        Ordering::Equal if q.is_odd() => q + 1,
        _ => q,
    };
    if neg {
        -q
    } else {
        q
    }
}

impl BigReal {
    fn normalized(mant: BigInt, exp: i64, prec: u32) -> BigReal {
        let mut mant = mant;
        let mut exp = exp;
        let bits = mant.bits();
        if bits > prec as u64 {
            let s = bits - prec as u64;
            mant = round_shift_right(&mant, s);
            exp += s as i64;
            if mant.bits() > prec as u64 {
                mant >>= 1;
                exp += 1;
            }
        }
        if mant.is_zero() {
            exp = 0;
        }
        BigReal { mant, exp, prec }
    }

    /// `num / den · 2^shift`, rounded to `prec` bits.
    fn quotient(num: &BigInt, den: &BigInt, shift: i64, prec: u32) -> BigReal {
        assert!(!den.is_zero(), "division by zero");
        if num.is_zero() {
            return BigReal::zero(prec);
        }
        let neg = (num.sign() == Sign::Minus) != (den.sign() == Sign::Minus);
        let n = num.abs();
        let d = den.abs();
        let k = prec as i64 + d.bits() as i64 - n.bits() as i64 + 2;
        let (nn, dd) = if k >= 0 {
            (n << k as u64, d)
        } else {
            (n, d << (-k) as u64)
        };
        let (q, r) = nn.div_rem(&dd);
        let mut ext = q << 1u32;
        if !r.is_zero() {
            ext += 1;
        }
        if neg {
            ext = -ext;
        }
        BigReal::normalized(ext, shift - k - 1, prec)
    }

    pub fn zero(prec: u32) -> BigReal {
        BigReal {
            mant: BigInt::zero(),
            exp: 0,
            prec,
        }
    }

    pub fn from_i64(v: i64, prec: u32) -> BigReal {
        BigReal::normalized(BigInt::from(v), 0, prec)
    }

    /// Correctly rounded conversion.
    pub fn from_rational(r: &Scalar, prec: u32) -> BigReal {
        BigReal::quotient(r.numer(), r.denom(), 0, prec)
    }

    /// `2^e` exactly.
    pub fn pow2(e: i64, prec: u32) -> BigReal {
        BigReal {
            mant: BigInt::one(),
            exp: e,
            prec,
        }
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn is_zero(&self) -> bool {
        self.mant.is_zero()
    }

    pub fn is_negative(&self) -> bool {
        self.mant.is_negative()
    }

    pub fn abs(&self) -> BigReal {
        BigReal {
            mant: self.mant.abs(),
            ..self.clone()
        }
    }

    pub fn neg(&self) -> BigReal {
        BigReal {
            mant: -self.mant.clone(),
            ..self.clone()
        }
    }

    /// Exact rational value of this binary number.
    pub fn to_rational(&self) -> Scalar {
        if self.exp >= 0 {
            Scalar::from_integer(&self.mant << self.exp as u64)
        } else {
            Scalar::new(self.mant.clone(), BigInt::one() << (-self.exp) as u64)
        }
    }

    pub fn to_f64(&self) -> f64 {
        if self.mant.is_zero() {
            return 0.0;
        }
        let bits = self.mant.bits() as i64;
        let keep = bits.min(60);
        let top = &self.mant >> (bits - keep) as u64;
        top.to_f64().unwrap() * 2f64.powi((self.exp + bits - keep) as i32)
    }

    pub fn add(&self, other: &BigReal) -> BigReal {
        let prec = self.prec.max(other.prec);
        let e = self.exp.min(other.exp);
        let a = &self.mant << (self.exp - e) as u64;
        let b = &other.mant << (other.exp - e) as u64;
        BigReal::normalized(a + b, e, prec)
    }

    pub fn sub(&self, other: &BigReal) -> BigReal {
        self.add(&other.neg())
    }

    pub fn mul(&self, other: &BigReal) -> BigReal {
        let prec = self.prec.max(other.prec);
        BigReal::normalized(&self.mant * &other.mant, self.exp + other.exp, prec)
    }

    pub fn div(&self, other: &BigReal) -> BigReal {
        let prec = self.prec.max(other.prec);
        BigReal::quotient(&self.mant, &other.mant, self.exp - other.exp, prec)
    }

    pub fn sqrt(&self) -> Result<BigReal> {
        if self.mant.is_negative() {
            return Err(Error::NegativeRadicand);
        }
        if self.mant.is_zero() {
            return Ok(BigReal::zero(self.prec));
        }
        let want = 2 * self.prec as i64 + 4;
        let mut s = (want - self.mant.bits() as i64).max(0);
        if (self.exp - s).rem_euclid(2) != 0 {
            s += 1;
        }
        let m = &self.mant << s as u64;
        let r = m.sqrt();
        let mut ext = &r << 1u32;
        if &r * &r != m {
            ext += 1;
        }
        Ok(BigReal::normalized(ext, (self.exp - s) / 2 - 1, self.prec))
    }

    /// Scientific decimal rendering with as many significant digits as the
    /// precision supports.
    pub fn to_decimal(&self) -> String {
        let digits = ((self.prec as f64) * std::f64::consts::LOG10_2).floor() as usize;
        format_decimal(&self.to_rational(), digits.max(1))
    }
}

impl PartialEq for BigReal {
    fn eq(&self, other: &Self) -> bool {
        self.cmp_value(other) == Ordering::Equal
    }
}

impl BigReal {
    pub fn cmp_value(&self, other: &BigReal) -> Ordering {
        let d = self.sub(other);
        d.mant.sign().cmp(&Sign::NoSign)
    }
}

impl fmt::Display for BigReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_decimal())
    }
}

/// `d.ddd…e±x` with `digits` significant digits, truncated toward zero.
pub fn format_decimal(r: &Scalar, digits: usize) -> String {
    if r.is_zero() {
        return "0".to_string();
    }
    let neg = r.is_negative();
    let a = r.abs();
    let ten = BigInt::from(10);
    // Find e with 10^e <= a < 10^(e+1).
    let approx = a.numer().bits() as i64 - a.denom().bits() as i64;
    let mut e = (approx as f64 * std::f64::consts::LOG10_2).floor() as i64;
    let pow10 = |k: i64| -> Scalar {
        if k >= 0 {
            Scalar::from_integer(num_traits::pow(ten.clone(), k as usize))
        } else {
            Scalar::new(BigInt::one(), num_traits::pow(ten.clone(), (-k) as usize))
        }
    };
    while pow10(e) > a {
        e -= 1;
    }
    while pow10(e + 1) <= a {
        e += 1;
    }
    let scaled = &a / pow10(e) * pow10(digits as i64 - 1);
    let int = scaled.to_integer().to_string();
    let (head, tail) = int.split_at(1);
    let tail = tail.trim_end_matches('0');
    let sign = if neg { "-" } else { "" };
    if tail.is_empty() {
        format!("{sign}{head}e{e}")
    } else {
        format!("{sign}{head}.{tail}e{e}")
    }
}

/// Square matrix of [`BigReal`] entries.
#[derive(Clone, Debug)]
pub struct RealMatrix {
    order: usize,
    prec: u32,
    data: Vec<BigReal>,
}

impl RealMatrix {
    pub fn zeros(order: usize, prec: u32) -> Self {
        RealMatrix {
            order,
            prec,
            data: vec![BigReal::zero(prec); order * order],
        }
    }

    pub fn from_fn(order: usize, prec: u32, mut f: impl FnMut(usize, usize) -> BigReal) -> Self {
        let mut data = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                data.push(f(i, j));
            }
        }
        RealMatrix { order, prec, data }
    }

    pub fn from_exact(m: &crate::matrix::Matrix, prec: u32) -> Self {
        RealMatrix::from_fn(m.order(), prec, |i, j| BigReal::from_rational(&m[(i, j)], prec))
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn precision(&self) -> u32 {
        self.prec
    }

    pub fn get(&self, i: usize, j: usize) -> &BigReal {
        &self.data[i * self.order + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigReal) {
        self.data[i * self.order + j] = v;
    }

    pub fn transpose(&self) -> RealMatrix {
        RealMatrix::from_fn(self.order, self.prec, |i, j| self.get(j, i).clone())
    }

    pub fn mul(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(self.order, other.order, "matrix order mismatch");
        let n = self.order;
        RealMatrix::from_fn(n, self.prec, |i, j| {
            (0..n).fold(BigReal::zero(self.prec), |acc, k| {
                acc.add(&self.get(i, k).mul(other.get(k, j)))
            })
        })
    }

    pub fn sub(&self, other: &RealMatrix) -> RealMatrix {
        assert_eq!(self.order, other.order, "matrix order mismatch");
        RealMatrix::from_fn(self.order, self.prec, |i, j| self.get(i, j).sub(other.get(i, j)))
    }

    pub fn scale(&self, s: &BigReal) -> RealMatrix {
        RealMatrix::from_fn(self.order, self.prec, |i, j| self.get(i, j).mul(s))
    }

    /// Leading `k × k` block.
    pub fn leading_block(&self, k: usize) -> RealMatrix {
        RealMatrix::from_fn(k, self.prec, |i, j| self.get(i, j).clone())
    }

    pub fn max_abs(&self) -> BigReal {
        self.data
            .iter()
            .map(BigReal::abs)
            .fold(BigReal::zero(self.prec), |acc, v| {
                if v.cmp_value(&acc) == Ordering::Greater {
                    v
                } else {
                    acc
                }
            })
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.order)
            .map(|i| (0..self.order).map(|j| self.get(i, j).to_decimal()).collect())
            .collect()
    }
}

/// JSON shape for real matrices: decimal strings plus the precision in bits.
#[derive(Serialize)]
pub struct RealMatrixJson {
    pub precision: u32,
    pub entries: Vec<Vec<String>>,
}

impl From<&RealMatrix> for RealMatrixJson {
    fn from(m: &RealMatrix) -> Self {
        RealMatrixJson {
            precision: m.prec,
            entries: m.to_strings(),
        }
    }
}
