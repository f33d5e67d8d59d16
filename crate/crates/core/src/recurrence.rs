//! The discrete antiderivative I_λ, the recurrence-generating polynomial
//! X(η) = I_{λ+Mδ}[Ξ_D Y], and the constant coefficients r_{n,k} of the
//! 1+2L term recurrence X̌(x) P̌_{D,n}(x) = Σ_k r_{n,k} P̌_{D,n+k}(x).

pub mod closed_forms;

use std::collections::BTreeMap;

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::base::eta;
use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, fmt_scalar, int, one, pow_i, Scalar};
use crate::matrix::Matrix;
use crate::multi::MISystem;
use crate::params::{Family, ParamSet, ShiftKind};
use crate::poly::Poly;
use crate::report::CheckReport;

fn g_wilson(n: usize, k: usize) -> Scalar {
    let sign = if k % 2 == 0 { one() } else { -one() };
    sign * binomial(2 * n as i64 + 2, 2 * k as i64 + 1) / pow_i(&int(2), 2 * k as i64 + 1)
}

/// Inner Askey-Wilson coefficient with the q half-powers and the factor
/// (2√d)^l of the outer sum already folded in, so the result is rational:
/// `(2√d)^l q^{(n−l)/2} g^{(l) AW}_n = d^{l/2} Σ_r' …`. Zero for odd `l`.
fn g_aw_folded(n: usize, l: usize, d: &Scalar, q: &Scalar) -> Scalar {
    if l % 2 == 1 {
        return Scalar::zero();
    }
    let h = l / 2;
    let mut acc = Scalar::zero();
    for rp in 0..=h {
        let sign = if rp % 2 == 0 { one() } else { -one() };
        let qint = (one() - pow_i(q, (n - l + 1 + 2 * rp) as i64)) / (one() - q);
        let den = Scalar::from_integer(factorial((h - rp) as u64) * factorial((n - h + 1 + rp) as u64));
        acc += sign * binomial((n - l + rp) as i64, rp as i64) * pow_i(q, -(rp as i64)) * qint / den;
    }
    acc * Scalar::from_integer(factorial(n as u64 + 1)) * pow_i(d, h as i64)
}

/// g′_n^{(k)}(λ), the expansion coefficients of
/// (η(x)^{n+1} − η(x−1)^{n+1})/(η(x) − η(x−1)) in powers of η(x;λ−δ).
pub fn gprime(n: usize, k: usize, p: &ParamSet) -> Result<Scalar> {
    if k > n {
        return Err(Error::IndexOutOfRange(format!("g'_{n}^({k}) needs k <= n")));
    }
    let d = &p.d;
    let mut acc = Scalar::zero();
    for r in 0..=k {
        for l in 0..=k - r {
            let outer = binomial(n as i64 + 1, r as i64) * binomial((n - r - l) as i64, (n - k) as i64);
            if outer.is_zero() {
                continue;
            }
            let e = (k - r - l) as i64;
            let term = match p.family {
                Family::R => {
                    let sign = if (r + l) % 2 == 0 { one() } else { -one() };
                    sign * pow_i(&(d / int(2)), 2 * r as i64)
                        * pow_i(&((d - one()) / int(2)), 2 * e)
                        * g_wilson(n - r, l)
                }
                Family::QR => {
                    let q = p.q();
                    let sign = if r % 2 == 0 { one() } else { -one() };
                    sign * pow_i(&(one() + d), r as i64)
                        * pow_i(&(one() + d / q), e)
                        * g_aw_folded(n - r, l, d, q)
                }
            };
            acc += outer * term;
        }
    }
    Ok(acc)
}

/// I_λ[p]: the unique polynomial with zero constant term such that
/// I[p](η(x;λ)) − I[p](η(x−1;λ)) = (η(x;λ) − η(x−1;λ)) p(η(x;λ−δ)).
pub fn map_i(pol: &Poly, p: &ParamSet) -> Result<Poly> {
    let n = pol.degree().ok_or(Error::ZeroPolynomial)?;
    let mut b = vec![Scalar::zero(); n + 2];
    for k in (0..=n).rev() {
        let mut acc = pol.coeff(k);
        for j in k + 1..=n {
            acc -= gprime(j, j - k, p)? * &b[j + 1];
        }
        b[k + 1] = acc / gprime(k, 0, p)?;
    }
    Ok(Poly::new(b))
}

#[derive(Clone, Debug)]
pub struct XPoly {
    /// X(η) with η = η(x;λ+Mδ).
    pub poly: Poly,
    pub l: usize,
    pub y: Poly,
    /// X̌(x) for x = −1..=N+1, stored from index 0.
    grid: Vec<Scalar>,
}

impl XPoly {
    /// X̌(x) for −1 ≤ x ≤ N+1.
    pub fn xhat(&self, x: i64) -> &Scalar {
        &self.grid[(x + 1) as usize]
    }

    /// X̌(0..=N).
    pub fn energies(&self) -> Vec<Scalar> {
        self.grid[1..self.grid.len() - 1].to_vec()
    }
}

/// X = I_{λ+Mδ}[Ξ_D Y]. With `for_hamiltonian`, Y must have non-negative
/// coefficients. Whenever Y does, the grid is asserted strictly increasing.
pub fn build_x(s: &MISystem, y: &Poly, for_hamiltonian: bool) -> Result<XPoly> {
    let dy = y.degree().ok_or(Error::ZeroPolynomial)?;
    let nonneg = y.coeffs().iter().all(|c| !c.is_negative());
    if for_hamiltonian {
        if let Some(k) = y.coeffs().iter().position(|c| c.is_negative()) {
            return Err(Error::NegativeYCoefficient(k));
        }
    }
    let p = &s.params;
    let m = s.m() as i64;
    let pm = p.shift(m, ShiftKind::Delta);
    let pm1 = p.shift(m - 1, ShiftKind::Delta);
    let poly = map_i(&(&s.xi_poly * y), &pm)?;
    let l = s.ell + dy + 1;
    if poly.degree() != Some(l) {
        return Err(Error::DegreeMismatch {
            what: "X".into(),
            expected: l,
            got: poly.degree(),
        });
    }
    let big_n = s.n() as i64;
    let grid: Vec<Scalar> = (-1..=big_n + 1).map(|x| poly.eval(&eta(x, &pm))).collect();
    let xp = XPoly {
        poly,
        l,
        y: y.clone(),
        grid,
    };
    // Telescoping sum form on the grid.
    let mut acc = Scalar::zero();
    for x in 0..=big_n {
        if x > 0 {
            acc += (eta(x, &pm) - eta(x - 1, &pm)) * &s.xi_grid[x as usize] * y.eval(&eta(x, &pm1));
        }
        if &acc != xp.xhat(x) {
            return Err(Error::CrossCheckMismatch(format!("telescoping sum for X at x = {x}")));
        }
    }
    if nonneg {
        for x in 1..=big_n {
            if xp.xhat(x) <= xp.xhat(x - 1) {
                return Err(Error::NonMonotone(x));
            }
        }
    }
    Ok(xp)
}

/// X̌(−1) by evaluation, checked against −(d+M−1)Y(0) or −(1−q)(1−dq^{M−1})Y(0).
pub fn xhat_minus1(xp: &XPoly, s: &MISystem) -> Result<Scalar> {
    let p = &s.params;
    let m = s.m() as i64;
    let y0 = xp.y.coeff(0);
    let closed = match p.family {
        Family::R => -(&p.d + int(m - 1)) * &y0,
        Family::QR => -(one() - p.q()) * (one() - &p.d * p.qpow(m - 1)) * &y0,
    };
    let v = xp.xhat(-1).clone();
    if v != closed {
        return Err(Error::CrossCheckMismatch(format!(
            "X(-1) = {} but closed form gives {}",
            fmt_scalar(&v),
            fmt_scalar(&closed)
        )));
    }
    Ok(v)
}

/// r_{n,k} on its band −min(L,n) ≤ k ≤ min(L,N−n).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RecTable {
    pub n_max: usize,
    pub l: usize,
    entries: BTreeMap<(usize, i64), Scalar>,
}

#[derive(Serialize)]
pub struct RecRow {
    pub n: usize,
    pub k: i64,
    pub r: String,
}

impl RecTable {
    pub fn band(&self, n: usize) -> std::ops::RangeInclusive<i64> {
        -(self.l.min(n) as i64)..=(self.l.min(self.n_max - n) as i64)
    }

    /// Zero outside the band.
    pub fn get(&self, n: usize, k: i64) -> Scalar {
        self.entries.get(&(n, k)).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn contains(&self, n: usize, k: i64) -> bool {
        self.entries.contains_key(&(n, k))
    }

    pub fn set(&mut self, n: usize, k: i64, v: Scalar) {
        self.entries.insert((n, k), v);
    }

    pub fn rows(&self) -> Vec<RecRow> {
        self.entries
            .iter()
            .map(|(&(n, k), v)| RecRow { n, k, r: fmt_scalar(v) })
            .collect()
    }

    /// Multiplies every coefficient by `s`.
    pub fn scaled(&self, s: &Scalar) -> RecTable {
        RecTable {
            entries: self.entries.iter().map(|(key, v)| (*key, v * s)).collect(),
            ..self.clone()
        }
    }
}

/// r_{n,k} by orthogonal projection, cross-checked against a direct linear
/// solve of the recurrence on the grid; the band structure and the symmetry
/// r_{n+k,−k} = (d²_{D,n}/d²_{D,n+k}) r_{n,k} are asserted.
pub fn extract_r(s: &MISystem, xp: &XPoly) -> Result<RecTable> {
    let big_n = s.n();
    let xs = xp.energies();
    let mut table = RecTable {
        n_max: big_n,
        l: xp.l,
        entries: BTreeMap::new(),
    };
    let pmat = Matrix::from_fn(big_n + 1, |x, m| s.pdn_grid[m][x].clone());
    let rhs: Vec<Vec<Scalar>> = (0..=big_n)
        .map(|n| (0..=big_n).map(|x| &xs[x] * &s.pdn_grid[n][x]).collect())
        .collect();
    let solved = pmat.solve_many(&rhs)?;
    for n in 0..=big_n {
        let band = table.band(n);
        for m in 0..=big_n {
            let k = m as i64 - n as i64;
            let proj = &s.ddn_sq[m]
                * (0..=big_n).fold(Scalar::zero(), |acc, x| {
                    acc + &s.weights[x] * &xs[x] * &s.pdn_grid[n][x] * &s.pdn_grid[m][x]
                });
            if proj != solved[n][m] {
                return Err(Error::CrossCheckMismatch(format!(
                    "projection and linear solve disagree at (n={n}, k={k})"
                )));
            }
            if band.contains(&k) {
                table.set(n, k, proj);
            } else if !proj.is_zero() {
                return Err(Error::CrossCheckMismatch(format!("nonzero r_(n={n},k={k}) outside the band")));
            }
        }
    }
    for n in 0..=big_n {
        for k in 1..=xp.l.min(big_n - n) {
            let lhs = table.get(n + k, -(k as i64));
            let rhs = &s.ddn_sq[n] / &s.ddn_sq[n + k] * table.get(n, k as i64);
            if lhs != rhs {
                return Err(Error::SymmetryViolation(format!("r_(n={},k=-{k}) vs r_(n={n},k={k})", n + k)));
            }
        }
    }
    Ok(table)
}

/// X(η)P_{D,n}(η) − Σ_k r_{n,k} P_{D,n+k}(η) as a polynomial.
pub fn poly_identity_residual(s: &MISystem, xp: &XPoly, t: &RecTable, n: usize) -> Poly {
    let mut res = &xp.poly * &s.pdn_polys[n];
    for k in t.band(n) {
        let m = (n as i64 + k) as usize;
        res = &res - &s.pdn_polys[m].scale(&t.get(n, k));
    }
    res
}

/// The recurrence as a polynomial identity for n ≤ N−L and on the grid for
/// larger n; also the row sums Σ_k r_{n,k} = X̌(0) = 0.
pub fn verify_recurrence(s: &MISystem, xp: &XPoly, t: &RecTable) -> CheckReport {
    let mut rep = CheckReport::new("recurrence");
    let big_n = s.n();
    for n in 0..=big_n {
        if n + xp.l <= big_n {
            let res = poly_identity_residual(s, xp, t, n);
            rep.holds(format!("(n={n}) polynomial identity"), res.is_zero(), || {
                let parts: Vec<String> = res.coeffs().iter().map(fmt_scalar).collect();
                format!("residual coefficients [{}]", parts.join(", "))
            });
        } else {
            for x in 0..=big_n {
                let lhs = xp.xhat(x as i64) * &s.pdn_grid[n][x];
                let rhs = t
                    .band(n)
                    .fold(Scalar::zero(), |acc, k| acc + t.get(n, k) * &s.pdn_grid[(n as i64 + k) as usize][x]);
                rep.exact(format!("(n={n},x={x})"), &(lhs - rhs));
            }
        }
        let row: Scalar = t.band(n).fold(Scalar::zero(), |acc, k| acc + t.get(n, k));
        rep.exact(format!("row sum n={n}"), &row);
    }
    rep
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::tests::{q6, r6};
    use crate::base::rec_coeffs;
    use crate::multi::build_mi_system;
    use crate::params::IndexSet;
    use proptest::prelude::*;

    fn set(ds: &[usize]) -> IndexSet {
        IndexSet::new(ds.to_vec()).unwrap()
    }

    #[test]
    fn gprime_identity() {
        for p in [r6(), q6()] {
            assert_eq!(gprime(0, 0, &p).unwrap(), int(1));
            let pm = p.shift(-1, ShiftKind::Delta);
            for n in 0..=4usize {
                for x in 1..=p.n as i64 + 2 {
                    let (e1, e0) = (eta(x, &p), eta(x - 1, &p));
                    let lhs = (pow_i(&e1, n as i64 + 1) - pow_i(&e0, n as i64 + 1)) / (&e1 - &e0);
                    let em = eta(x, &pm);
                    let rhs = (0..=n).fold(Scalar::zero(), |acc, k| {
                        acc + gprime(n, k, &p).unwrap() * pow_i(&em, (n - k) as i64)
                    });
                    assert_eq!(lhs, rhs, "{:?} n={n} x={x}", p.family);
                }
            }
        }
    }

    #[test]
    fn map_i_examples() {
        for p in [r6(), q6()] {
            assert_eq!(map_i(&Poly::one(), &p).unwrap(), Poly::x());
            assert_eq!(map_i(&Poly::zero(), &p), Err(Error::ZeroPolynomial));
        }
    }

    proptest! {
        #[test]
        fn map_i_is_a_discrete_antiderivative(cs in proptest::collection::vec(-5i64..6, 1..5), qr in proptest::bool::ANY) {
            let p = if qr { q6() } else { r6() };
            let pol = Poly::new(cs.iter().map(|&c| int(c)).collect());
            prop_assume!(!pol.is_zero());
            let ip = map_i(&pol, &p).unwrap();
            prop_assert_eq!(ip.degree(), Some(pol.degree().unwrap() + 1));
            prop_assert!(ip.coeff(0).is_zero());
            let pm = p.shift(-1, ShiftKind::Delta);
            for x in 1..=p.n as i64 {
                let lhs = ip.eval(&eta(x, &p)) - ip.eval(&eta(x - 1, &p));
                let rhs = (eta(x, &p) - eta(x - 1, &p)) * pol.eval(&eta(x, &pm));
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn undeformed_x_is_eta_and_r_is_three_term() {
        for p in [r6(), q6()] {
            let s = build_mi_system(&p, &IndexSet::empty()).unwrap();
            let xp = build_x(&s, &Poly::one(), true).unwrap();
            assert_eq!(xp.poly, Poly::x());
            assert_eq!(xp.l, 1);
            let t = extract_r(&s, &xp).unwrap();
            for n in 0..=p.n {
                let (a, b, c) = rec_coeffs(n as i64, &p).unwrap();
                assert_eq!(t.get(n, 0), b);
                if n < p.n {
                    assert_eq!(t.get(n, 1), a);
                }
                if n > 0 {
                    assert_eq!(t.get(n, -1), c);
                }
            }
        }
    }

    #[test]
    fn theorem_holds_for_deformed_systems() {
        for p in [r6(), q6()] {
            for ds in [set(&[1]), set(&[2]), set(&[1, 2])] {
                let s = build_mi_system(&p, &ds).unwrap();
                for y in [Poly::one(), Poly::x()] {
                    let xp = build_x(&s, &y, true).unwrap();
                    assert_eq!(xp.xhat(0), &int(0));
                    assert_eq!(xp.poly.coeff(0), int(0));
                    let t = extract_r(&s, &xp).unwrap();
                    let rep = verify_recurrence(&s, &xp, &t);
                    assert!(rep.passed(), "{:?} {ds}: {:?}", p.family, rep.failures);
                    let x_m1 = xhat_minus1(&xp, &s).unwrap();
                    assert_eq!(x_m1.is_zero(), y.coeff(0).is_zero());
                    // off-grid the top row is not a polynomial identity
                    assert!(!poly_identity_residual(&s, &xp, &t, p.n).is_zero());
                    if 2 * xp.l <= p.n {
                        let n = xp.l;
                        let nonzero = t.band(n).filter(|&k| !t.get(n, k).is_zero()).count();
                        assert_eq!(nonzero, 1 + 2 * xp.l);
                    }
                }
            }
        }
    }

    #[test]
    fn first_energy_is_one_term() {
        let p = r6();
        let s = build_mi_system(&p, &set(&[1])).unwrap();
        let xp = build_x(&s, &Poly::one(), true).unwrap();
        let pm = p.shift(1, ShiftKind::Delta);
        assert_eq!(xp.xhat(1), &(eta(1, &pm) * &s.xi_grid[1]));
        assert_eq!(xhat_minus1(&xp, &s).unwrap(), -(&p.d));
    }

    #[test]
    fn negative_y_is_rejected_for_hamiltonians() {
        let s = build_mi_system(&r6(), &set(&[1])).unwrap();
        let y = Poly::new(vec![int(1), int(-1)]);
        assert_eq!(build_x(&s, &y, true).unwrap_err(), Error::NegativeYCoefficient(1));
        let xp = build_x(&s, &y, false).unwrap();
        let t = extract_r(&s, &xp).unwrap();
        assert!(verify_recurrence(&s, &xp, &t).passed());
    }
}
