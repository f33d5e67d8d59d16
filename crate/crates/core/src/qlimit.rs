//! q → 1: the multi-indexed q-Racah tables approach the multi-indexed Racah
//! ones when (b, c, d) = (q^β, q^γ, q^δ) and (β, γ, δ) are the Racah values.
//!
//! To keep everything rational, q = s^L where L is the common denominator of
//! β, γ, δ and s = 1 − 10^(−k)/L. For integer parameters this is exactly
//! q = 1 − 10^(−k); otherwise q agrees with it to O(10^(−2k)).

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::bigreal::BigReal;
use crate::dual::dual_values;
use crate::error::{Error, Result};
use crate::exact::{int, one, pow_i, Scalar};
use crate::multi::build_mi_system;
use crate::params::{make_params, Family, IndexSet, ParamSet};
use crate::report::CheckReport;

#[derive(Clone, Debug, Serialize)]
pub struct QLimitRow {
    pub k: u32,
    pub q: String,
    pub max_p_diff: String,
    pub max_q_diff: String,
    pub bound: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct QLimitReport {
    pub rows: Vec<QLimitRow>,
    pub report: CheckReport,
}

fn exponent(v: &Scalar, l: &BigInt) -> Result<i64> {
    (v * Scalar::from_integer(l.clone()))
        .to_integer()
        .to_i64()
        .ok_or_else(|| Error::Config("q-limit exponent does not fit in i64".into()))
}

/// The q-Racah counterpart of `p` at q = s^L, s = 1 − 10^(−k)/L.
pub fn q_partner(p: &ParamSet, k: u32) -> Result<ParamSet> {
    if p.family != Family::R {
        return Err(Error::Config("the q-limit compares against a Racah configuration".into()));
    }
    let l = [&p.b, &p.c, &p.d].iter().fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
    let l_i = l
        .to_i64()
        .ok_or_else(|| Error::Config("q-limit exponent denominator too large".into()))?;
    let s = one() - Scalar::new(BigInt::one(), BigInt::from(10).pow(k) * &l);
    let q = pow_i(&s, l_i);
    make_params(
        Family::QR,
        p.n as i64,
        pow_i(&s, exponent(&p.b, &l)?),
        pow_i(&s, exponent(&p.c, &l)?),
        pow_i(&s, exponent(&p.d, &l)?),
        Some(q),
    )
}

fn max_abs_diff(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Scalar {
    a.iter()
        .zip(b)
        .flat_map(|(ra, rb)| ra.iter().zip(rb).map(|(x, y)| (x - y).abs()))
        .fold(Scalar::zero(), |acc, v| if v > acc { v } else { acc })
}

/// Entrywise distance of the P̌_{D,n}(x) and Q̌_{D,x}(n) tables for each k,
/// required to decrease strictly in k and to stay below 10^(−k+2).
pub fn q_limit(p: &ParamSet, ds: &IndexSet, ks: &[u32], precision: u32) -> Result<QLimitReport> {
    let r_sys = build_mi_system(p, ds)?;
    let r_dual = dual_values(&r_sys)?;
    let mut rows = Vec::with_capacity(ks.len());
    let mut rep = CheckReport::new("q-limit");
    let mut prev: Option<(Scalar, Scalar)> = None;
    for &k in ks {
        let pq = q_partner(p, k)?;
        let q_sys = build_mi_system(&pq, ds)?;
        let q_dual = dual_values(&q_sys)?;
        let dp = max_abs_diff(&q_sys.pdn_grid, &r_sys.pdn_grid);
        let dq = max_abs_diff(&q_dual.q_vals, &r_dual.q_vals);
        let bound = Scalar::new(BigInt::one(), BigInt::from(10).pow(k)) * int(100);
        rep.holds(format!("k={k} P table below 1e-{}", k - 2), dp < bound, || {
            BigReal::from_rational(&dp, precision).to_decimal()
        });
        rep.holds(format!("k={k} Q table below 1e-{}", k - 2), dq < bound, || {
            BigReal::from_rational(&dq, precision).to_decimal()
        });
        if let Some((pp, pqd)) = &prev {
            rep.holds(format!("k={k} P distance decreases"), dp.cmp(pp) == Ordering::Less, || "not decreasing".into());
            rep.holds(format!("k={k} Q distance decreases"), dq.cmp(pqd) == Ordering::Less, || "not decreasing".into());
        }
        rows.push(QLimitRow {
            k,
            q: BigReal::from_rational(pq.q(), precision).to_decimal(),
            max_p_diff: BigReal::from_rational(&dp, precision).to_decimal(),
            max_q_diff: BigReal::from_rational(&dq, precision).to_decimal(),
            bound: BigReal::from_rational(&bound, precision).to_decimal(),
        });
        prev = Some((dp, dq));
    }
    Ok(QLimitReport { rows, report: rep })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::ratio;

    #[test]
    fn integer_exponents_give_exact_q() {
        let p = make_params(Family::R, 4, int(12), int(1), int(2), None).unwrap();
        let pq = q_partner(&p, 3).unwrap();
        assert_eq!(pq.q(), &ratio(999, 1000));
        assert_eq!(pq.c, ratio(999, 1000));
        assert_eq!(pq.d, ratio(999 * 999, 1000 * 1000));
    }

    #[test]
    fn tables_converge() {
        let p = make_params(Family::R, 4, int(12), int(1), int(2), None).unwrap();
        for ds in [IndexSet::empty(), IndexSet::new(vec![1]).unwrap()] {
            let rep = q_limit(&p, &ds, &[3, 4, 5, 6], 256).unwrap();
            assert!(rep.report.passed(), "{ds}: {:?} {:?}", rep.report.failures, rep.rows);
        }
    }

    #[test]
    fn fractional_exponents_are_supported() {
        let p = make_params(Family::R, 3, int(10), ratio(1, 2), ratio(2, 5), None).unwrap();
        let pq = q_partner(&p, 3).unwrap();
        assert!((pq.q() - ratio(999, 1000)).abs() < ratio(1, 100_000));
        let rep = q_limit(&p, &IndexSet::new(vec![1]).unwrap(), &[3, 4], 128).unwrap();
        assert!(rep.report.passed(), "{:?}", rep.report.failures);
    }

    #[test]
    fn q_family_is_rejected() {
        let p = make_params(Family::QR, 3, ratio(1, 1280), ratio(3, 5), ratio(3, 7), Some(ratio(1, 2))).unwrap();
        assert!(matches!(q_partner(&p, 3), Err(Error::Config(_))));
    }
}
