//! Parameter sets λ = (a, b, c, d) for the Racah and q-Racah families.
//!
//! For the q-Racah family the slots hold `q^λ_i`, so every shift is a
//! multiplication by a power of q and all values stay rational.

use std::fmt;

use num_traits::One;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{int, one, pow_i, zero, Scalar};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Family {
    R,
    #[serde(rename = "qR")]
    QR,
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Family::R => "R",
            Family::QR => "qR",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ShiftKind {
    /// δ = (1, 1, 1, 1)
    Delta,
    /// δ̃ = (0, 0, 1, 1)
    Tilde,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ParamSet {
    pub family: Family,
    pub n: usize,
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub d: Scalar,
    /// Present exactly for the q-Racah family.
    pub q: Option<Scalar>,
}

/// Fixes `a` from `N`: `a = −N` (R) or `a = q^(−N)` (qR).
pub fn make_params(
    family: Family,
    n: i64,
    b: Scalar,
    c: Scalar,
    d: Scalar,
    q: Option<Scalar>,
) -> Result<ParamSet> {
    if n < 1 {
        return Err(Error::BadN(n));
    }
    let (a, q) = match family {
        Family::R => (int(-n), None),
        Family::QR => {
            let q = q.ok_or_else(|| Error::BadQ("missing".into()))?;
            if q <= zero() || q >= one() {
                return Err(Error::BadQ(crate::exact::fmt_scalar(&q)));
            }
            (pow_i(&q, -n), Some(q))
        }
    };
    Ok(ParamSet {
        family,
        n: n as usize,
        a,
        b,
        c,
        d,
        q,
    })
}

impl ParamSet {
    pub fn is_q(&self) -> bool {
        self.family == Family::QR
    }

    /// The base q. Panics for the Racah family.
    pub fn q(&self) -> &Scalar {
        self.q.as_ref().expect("q is only defined for the q-Racah family")
    }

    /// `q^k`; for the Racah family this is 1, which lets a few formulas share code.
    pub fn qpow(&self, k: i64) -> Scalar {
        match &self.q {
            Some(q) => pow_i(q, k),
            None => one(),
        }
    }

    /// d̃ = a+b+c−d−1 (R) or abc/(dq) (qR).
    pub fn dtilde(&self) -> Scalar {
        match self.family {
            Family::R => &self.a + &self.b + &self.c - &self.d - one(),
            Family::QR => &self.a * &self.b * &self.c / (&self.d * self.q()),
        }
    }

    pub fn with_abcd(&self, a: Scalar, b: Scalar, c: Scalar, d: Scalar) -> ParamSet {
        ParamSet {
            a,
            b,
            c,
            d,
            ..self.clone()
        }
    }

    /// Moves along δ or δ̃ by `k` steps. `N` is left untouched.
    pub fn shift(&self, k: i64, kind: ShiftKind) -> ParamSet {
        let step = |v: &Scalar| match self.family {
            Family::R => v + int(k),
            Family::QR => v * pow_i(self.q(), k),
        };
        match kind {
            ShiftKind::Delta => self.with_abcd(step(&self.a), step(&self.b), step(&self.c), step(&self.d)),
            ShiftKind::Tilde => self.with_abcd(self.a.clone(), self.b.clone(), step(&self.c), step(&self.d)),
        }
    }

    /// t(λ) = (d−a+1, d−b+1, c, d), multiplicatively for qR.
    pub fn twist(&self) -> ParamSet {
        match self.family {
            Family::R => self.with_abcd(
                &self.d - &self.a + one(),
                &self.d - &self.b + one(),
                self.c.clone(),
                self.d.clone(),
            ),
            Family::QR => {
                let dq = &self.d * self.q();
                self.with_abcd(&dq / &self.a, &dq / &self.b, self.c.clone(), self.d.clone())
            }
        }
    }

    /// The same slots with `d` replaced by `d̃`; its own `d̃` is the original `d`.
    pub fn dual(&self) -> ParamSet {
        self.with_abcd(self.a.clone(), self.b.clone(), self.c.clone(), self.dtilde())
    }
}

/// Strictly increasing positive integers `d_1 < … < d_M`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Default, Serialize)]
pub struct IndexSet(Vec<usize>);

impl IndexSet {
    pub fn new(ds: Vec<usize>) -> Result<IndexSet> {
        if ds.first() == Some(&0) || ds.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Config(format!(
                "index set must be strictly increasing positive integers, got {ds:?}"
            )));
        }
        Ok(IndexSet(ds))
    }

    pub fn empty() -> IndexSet {
        IndexSet(Vec::new())
    }

    pub fn m(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    /// 0 for the empty set.
    pub fn max(&self) -> usize {
        self.0.last().copied().unwrap_or(0)
    }
}

impl fmt::Display for IndexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|d| d.to_string()).collect();
        write!(f, "{{{}}}", parts.join(","))
    }
}

/// ℓ_D = Σ d_j − M(M−1)/2.
pub fn ell(ds: &IndexSet) -> usize {
    let m = ds.m();
    ds.0.iter().sum::<usize>() - m * m.saturating_sub(1) / 2
}

pub const CHAIN_R_D: &str = "0<d<a+b";
pub const CHAIN_R_C: &str = "0<c<1+d";
pub const CHAIN_R_MAX: &str = "d+max(D)+1<a+b";
pub const CHAIN_Q_D: &str = "0<ab<d<1";
pub const CHAIN_Q_C: &str = "qd<c<1";
pub const CHAIN_Q_MAX: &str = "ab<d*q^(max(D)+1)";

/// Names of the violated range chains; empty means admissible.
pub fn validate(p: &ParamSet, ds: &IndexSet) -> Vec<String> {
    let mut out = Vec::new();
    let top = ds.max() as i64;
    match p.family {
        Family::R => {
            let ab = &p.a + &p.b;
            if !(p.d > zero() && p.d < ab) {
                out.push(CHAIN_R_D.to_string());
            }
            if !(p.c > zero() && p.c < &p.d + one()) {
                out.push(CHAIN_R_C.to_string());
            }
            if &p.d + int(top + 1) >= ab {
                out.push(CHAIN_R_MAX.to_string());
            }
        }
        Family::QR => {
            let ab = &p.a * &p.b;
            if !(ab > zero() && ab < p.d && p.d < Scalar::one()) {
                out.push(CHAIN_Q_D.to_string());
            }
            if !(p.q() * &p.d < p.c && p.c < Scalar::one()) {
                out.push(CHAIN_Q_C.to_string());
            }
            if ab >= &p.d * p.qpow(top + 1) {
                out.push(CHAIN_Q_MAX.to_string());
            }
        }
    }
    out
}

/// [`validate`] as a `Result`.
pub fn ensure_admissible(p: &ParamSet, ds: &IndexSet) -> Result<()> {
    let v = validate(p, ds);
    if v.is_empty() {
        Ok(())
    } else {
        Err(Error::InadmissibleParams(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;
    use proptest::prelude::*;

    fn r_set() -> ParamSet {
        make_params(Family::R, 3, int(5), ratio(1, 2), ratio(1, 3), None).unwrap()
    }

    #[test]
    fn make_params_fixes_a() {
        let p = r_set();
        assert_eq!(p.a, int(-3));
        assert_eq!(p.dtilde(), ratio(7, 6));
        let q = make_params(Family::QR, 2, ratio(1, 8), ratio(1, 2), ratio(1, 2), Some(ratio(1, 2))).unwrap();
        assert_eq!(q.a, int(4));
        assert_eq!(
            make_params(Family::QR, 2, int(1), int(1), int(1), Some(ratio(3, 2))),
            Err(Error::BadQ("3/2".into()))
        );
        assert_eq!(make_params(Family::R, 0, int(1), int(1), int(1), None), Err(Error::BadN(0)));
    }

    #[test]
    fn validate_chains() {
        let ds = IndexSet::new(vec![1, 2]).unwrap();
        let ok = make_params(Family::R, 10, int(14), ratio(1, 2), ratio(2, 5), None).unwrap();
        assert!(validate(&ok, &ds).is_empty());
        let bad = ok.with_abcd(ok.a.clone(), ok.b.clone(), ok.c.clone(), int(5));
        assert!(validate(&bad, &ds).contains(&CHAIN_R_D.to_string()));
        // ab = 1/2 = d, qd = 1/4 = c and ab > d q^2: every chain fails on equality or reversal.
        let q = make_params(Family::QR, 4, ratio(1, 32), ratio(1, 4), ratio(1, 2), Some(ratio(1, 2))).unwrap();
        let v = validate(&q, &IndexSet::new(vec![1]).unwrap());
        assert_eq!(v, vec![CHAIN_Q_D, CHAIN_Q_C, CHAIN_Q_MAX]);
    }

    #[test]
    fn shifts_and_twist() {
        let p = r_set();
        assert_eq!(p.shift(0, ShiftKind::Delta), p);
        let t = p.shift(2, ShiftKind::Tilde);
        assert_eq!((t.a, t.b, t.c, t.d), (int(-3), int(5), ratio(5, 2), ratio(7, 3)));
        let tw = p.twist();
        assert_eq!((tw.a.clone(), tw.b.clone()), (ratio(13, 3), ratio(-11, 3)));
        assert_eq!(tw.twist(), p);

        let q = make_params(Family::QR, 2, ratio(1, 8), ratio(1, 2), ratio(1, 2), Some(ratio(1, 2))).unwrap();
        let s = q.shift(1, ShiftKind::Delta);
        assert_eq!((s.a, s.b, s.d), (int(2), ratio(1, 16), ratio(1, 4)));
        assert_eq!(q.twist().twist(), q);
        // a = dq/b makes the twisted b-slot equal to a
        let sym = q.with_abcd(&q.d * q.q() / &q.b, q.b.clone(), q.c.clone(), q.d.clone());
        assert_eq!(sym.twist().b, sym.a);
    }

    #[test]
    fn ell_values() {
        assert_eq!(ell(&IndexSet::empty()), 0);
        assert_eq!(ell(&IndexSet::new(vec![1]).unwrap()), 1);
        assert_eq!(ell(&IndexSet::new(vec![1, 2]).unwrap()), 2);
        assert!(IndexSet::new(vec![2, 2]).is_err());
        assert!(IndexSet::new(vec![0]).is_err());
    }

    #[test]
    fn dual_swaps_d_and_dtilde() {
        let p = r_set();
        assert_eq!(p.dual().dtilde(), p.d);
    }

    proptest! {
        #[test]
        fn delta_shifts_compose(j in -4i64..5, k in -4i64..5, num in 1i64..9) {
            let p = make_params(Family::QR, 3, ratio(num, 97), ratio(1, 3), ratio(1, 2), Some(ratio(num, 10))).unwrap();
            prop_assert_eq!(
                p.shift(j, ShiftKind::Delta).shift(k, ShiftKind::Delta),
                p.shift(j + k, ShiftKind::Delta)
            );
            let r = make_params(Family::R, 3, int(num + 7), ratio(1, num + 1), ratio(num, 7), None).unwrap();
            prop_assert_eq!(
                r.shift(j, ShiftKind::Tilde).shift(k, ShiftKind::Tilde),
                r.shift(j + k, ShiftKind::Tilde)
            );
        }

        #[test]
        fn twist_and_dual_are_involutions(num in 1i64..9, den in 10i64..40) {
            let q = make_params(Family::QR, 4, ratio(num, 97), ratio(1, 3), ratio(num, den), Some(ratio(num, 10))).unwrap();
            let r = make_params(Family::R, 4, int(num + 7), ratio(1, num + 1), ratio(num, den), None).unwrap();
            for p in [q, r] {
                prop_assert_eq!(p.twist().twist(), p.clone());
                prop_assert_eq!(p.dual().dual(), p);
            }
        }
    }
}
