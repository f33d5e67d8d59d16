//! Closure relation [H̃,[H̃,Ē]] = Ē R₀(H̃) + [H̃,Ē] R₁(H̃) + R₋₁(H̃) and the
//! creation/annihilation operators it yields. Matrix functions are built by
//! exact spectral calculus, V diag(f(X̌(n))) V⁻¹.

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::dual::{DualHamiltonian, DualTable};
use crate::error::{Error, Result};
use crate::exact::{int, one, pow_i, Scalar};
use crate::matrix::Matrix;
use crate::poly::Poly;
use crate::report::CheckReport;

/// R₀, R₁, R₋₁ as polynomials in the spectral variable z, each of degree ≤ N.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosureTriple {
    pub r0: Poly,
    pub r1: Poly,
    pub rm1: Poly,
}

#[derive(Serialize)]
pub struct ClosureJson {
    pub r0: Vec<String>,
    pub r1: Vec<String>,
    pub rm1: Vec<String>,
}

impl From<&ClosureTriple> for ClosureJson {
    fn from(c: &ClosureTriple) -> Self {
        let f = |p: &Poly| p.coeffs().iter().map(crate::exact::fmt_scalar).collect();
        ClosureJson {
            r0: f(&c.r0),
            r1: f(&c.r1),
            rm1: f(&c.rm1),
        }
    }
}

/// X̌(j) for −1 ≤ j ≤ N+1.
fn xhat(h: &DualHamiltonian, j: i64) -> &Scalar {
    let top = h.energies.len() as i64;
    if j == -1 {
        &h.x_minus1
    } else if j == top {
        &h.x_nplus1
    } else {
        &h.energies[j as usize]
    }
}

/// (β₀, β₁, β₋₁) at node j.
fn betas(h: &DualHamiltonian, t: &DualTable, j: usize) -> (Scalar, Scalar, Scalar) {
    let ji = j as i64;
    let up = xhat(h, ji + 1) - xhat(h, ji);
    let down = xhat(h, ji) - xhat(h, ji - 1);
    let b0 = &up * &down;
    let b1 = &up - &down;
    let bm1 = -&b0 * &t.b_dual[j];
    (b0, b1, bm1)
}

/// Cramer-form value of the interpolant through (X̌(j), β^{(j)}) at z, using X̌(0) = 0.
fn cramer_value(nodes: &[Scalar], beta: &[Scalar], z: &Scalar) -> Result<Scalar> {
    let n = nodes.len() - 1;
    let mut rows = Vec::with_capacity(n + 1);
    for j in 1..=n {
        let mut row: Vec<Scalar> = (1..=n).map(|e| pow_i(&nodes[j], e as i64)).collect();
        row.push(&beta[0] - &beta[j]);
        rows.push(row);
    }
    let mut last: Vec<Scalar> = (1..=n).map(|e| pow_i(z, e as i64)).collect();
    last.push(beta[0].clone());
    rows.push(last);
    let det = Matrix::from_rows(rows)?.det();
    let mut pref = one();
    for j in 1..=n {
        pref *= &nodes[j];
        for k in 1..j {
            pref *= &nodes[j] - &nodes[k];
        }
    }
    if pref.is_zero() {
        return Err(Error::SingularMatrix);
    }
    Ok(det / pref)
}

/// Degree-N interpolants through the N+1 node conditions, solved on the
/// Vandermonde system and cross-checked against the Cramer determinant form
/// at an off-grid point; node identities and R₁² + 4R₀ = (X̌(j+1) − X̌(j−1))²
/// are asserted.
pub fn solve_closure(h: &DualHamiltonian, t: &DualTable) -> Result<ClosureTriple> {
    let nodes = &h.energies;
    let size = nodes.len();
    let vander = Matrix::from_fn(size, |j, i| pow_i(&nodes[j], i as i64));
    let mut cols = vec![Vec::with_capacity(size), Vec::with_capacity(size), Vec::with_capacity(size)];
    for j in 0..size {
        let (b0, b1, bm1) = betas(h, t, j);
        cols[0].push(b0);
        cols[1].push(b1);
        cols[2].push(bm1);
    }
    let sols = vander.solve_many(&cols)?;
    let triple = ClosureTriple {
        r0: Poly::new(sols[0].clone()),
        r1: Poly::new(sols[1].clone()),
        rm1: Poly::new(sols[2].clone()),
    };
    let probe = &h.x_nplus1 + int(1);
    for (poly, beta) in [(&triple.r0, &cols[0]), (&triple.r1, &cols[1]), (&triple.rm1, &cols[2])] {
        if cramer_value(nodes, beta, &probe)? != poly.eval(&probe) {
            return Err(Error::CrossCheckMismatch("Cramer form and interpolation solve disagree".into()));
        }
    }
    for j in 0..size {
        let z = &nodes[j];
        let (r0, r1, rm1) = (triple.r0.eval(z), triple.r1.eval(z), triple.rm1.eval(z));
        let ji = j as i64;
        let span = xhat(h, ji + 1) - xhat(h, ji - 1);
        if r0 != cols[0][j] || r1 != cols[1][j] || rm1 != -&r0 * &t.b_dual[j] || &r1 * &r1 + int(4) * &r0 != &span * &span {
            return Err(Error::CrossCheckMismatch(format!("closure node identities at j = {j}")));
        }
    }
    Ok(triple)
}

/// R₀(X̌(j)) − (X̌(j+1) − X̌(j))(X̌(j) − X̌(j−1)) for arbitrary j, given the
/// extended spectrum `xhat_at`. Zero on the grid; generally nonzero off it.
pub fn r0_node_residual(c: &ClosureTriple, xhat_at: impl Fn(i64) -> Scalar, j: i64) -> Scalar {
    let z = xhat_at(j);
    c.r0.eval(&z) - (xhat_at(j + 1) - &z) * (&z - xhat_at(j - 1))
}

/// The exact residual of the closure relation on h̃.
pub fn closure_residual(h_tilde: &Matrix, e_coord: &[Scalar], c: &ClosureTriple) -> Matrix {
    let e = Matrix::diag(e_coord);
    let he = h_tilde.commutator(&e);
    let lhs = h_tilde.commutator(&he);
    let rhs = &(&(&e * &h_tilde.poly_eval(&c.r0)) + &(&he * &h_tilde.poly_eval(&c.r1))) + &h_tilde.poly_eval(&c.rm1);
    &lhs - &rhs
}

pub fn verify_closure(h: &DualHamiltonian, c: &ClosureTriple) -> CheckReport {
    let mut rep = CheckReport::new("closure relation");
    let res = closure_residual(&h.h_tilde, &h.e_coord, c);
    for x in 0..res.order() {
        for y in 0..res.order() {
            rep.exact(format!("({x},{y})"), &res[(x, y)]);
        }
    }
    rep
}

/// V diag(values) V⁻¹.
pub fn spectral_fn(h: &DualHamiltonian, values: &[Scalar]) -> Result<Matrix> {
    if values.len() != h.v.order() {
        return Err(Error::ShapeMismatch(format!("{} node values for order {}", values.len(), h.v.order())));
    }
    Ok(&(&h.v * &Matrix::diag(values)) * &h.v_inv)
}

#[derive(Clone, Debug)]
pub struct LadderPair {
    pub a_plus: Matrix,
    pub a_minus: Matrix,
}

/// ã^{(±)} = ±([H̃,Ē] − (Ē + R₋₁R₀⁻¹) α_∓) (α₊ − α₋)⁻¹, all functions of H̃
/// taken spectrally. Fails with `SingularR0` when R₀ vanishes on the spectrum,
/// which happens exactly when Y(0) = 0.
pub fn build_ladder(h: &DualHamiltonian, t: &DualTable, c: &ClosureTriple) -> Result<LadderPair> {
    let size = h.energies.len();
    let mut r0_vals = Vec::with_capacity(size);
    for (n, z) in h.energies.iter().enumerate() {
        let v = c.r0.eval(z);
        if v.is_zero() {
            return Err(Error::SingularR0(n));
        }
        r0_vals.push(v);
    }
    let mut ap = Vec::with_capacity(size);
    let mut am = Vec::with_capacity(size);
    let mut shift = Vec::with_capacity(size);
    let mut inv_gap = Vec::with_capacity(size);
    for n in 0..size {
        let ni = n as i64;
        let z = &h.energies[n];
        let r1 = c.r1.eval(z);
        let span = xhat(h, ni + 1) - xhat(h, ni - 1);
        if !span.is_positive() || &span * &span != &r1 * &r1 + int(4) * &r0_vals[n] {
            return Err(Error::CrossCheckMismatch(format!("square root of R1^2+4R0 at n = {n}")));
        }
        let plus = (&r1 + &span) / int(2);
        let minus = (&r1 - &span) / int(2);
        if plus != xhat(h, ni + 1) - z || minus != xhat(h, ni - 1) - z {
            return Err(Error::CrossCheckMismatch(format!("alpha node values at n = {n}")));
        }
        let b = -c.rm1.eval(z) / &r0_vals[n];
        if b != t.b_dual[n] {
            return Err(Error::CrossCheckMismatch(format!("-R_-1/R_0 != B^dual at n = {n}")));
        }
        ap.push(plus);
        am.push(minus);
        shift.push(-b);
        inv_gap.push(span.recip());
    }
    let alpha_p = spectral_fn(h, &ap)?;
    let alpha_m = spectral_fn(h, &am)?;
    let rm1_r0inv = spectral_fn(h, &shift)?;
    let horner = &h.h_tilde.poly_eval(&c.rm1) * &h.h_tilde.poly_eval(&c.r0).inverse()?;
    if horner != rm1_r0inv {
        return Err(Error::CrossCheckMismatch("R_-1(H) R_0(H)^-1 by Horner and spectrally".into()));
    }
    let inv = spectral_fn(h, &inv_gap)?;
    let e = Matrix::diag(&h.e_coord);
    let he = h.h_tilde.commutator(&e);
    let shifted_e = &e + &rm1_r0inv;
    let a_plus = &(&he - &(&shifted_e * &alpha_m)) * &inv;
    let a_minus = (&(&he - &(&shifted_e * &alpha_p)) * &inv).scale(&int(-1));
    Ok(LadderPair { a_plus, a_minus })
}

/// ã^{(+)} Q̌_n = A^dual_n Q̌_{n+1}, ã^{(−)} Q̌_n = C^dual_n Q̌_{n−1}, the
/// commutator action of ã^{(+)}, the scalar node identities, and the
/// spectral/Horner agreement for R₀, R₁, R₋₁.
pub fn verify_ladder(h: &DualHamiltonian, t: &DualTable, c: &ClosureTriple, lp: &LadderPair) -> Result<CheckReport> {
    let mut rep = CheckReport::new("ladder");
    let size = h.energies.len();
    let col = |n: usize| h.v.column(n);
    let zero_col = vec![Scalar::zero(); size];
    let scaled = |v: &[Scalar], s: &Scalar| -> Vec<Scalar> { v.iter().map(|e| e * s).collect() };
    let comm = h.h_tilde.commutator(&lp.a_plus);
    for n in 0..size {
        let ni = n as i64;
        let up = if n + 1 < size { scaled(&col(n + 1), &t.a_dual[n]) } else { scaled(&zero_col, &t.a_dual[n]) };
        let down = if n > 0 { scaled(&col(n - 1), &t.c_dual[n]) } else { scaled(&zero_col, &t.c_dual[n]) };
        let got_up = lp.a_plus.mul_vec(&col(n));
        let got_down = lp.a_minus.mul_vec(&col(n));
        for x in 0..size {
            rep.exact(format!("a+ (n={n},x={x})"), &(&got_up[x] - &up[x]));
            rep.exact(format!("a- (n={n},x={x})"), &(&got_down[x] - &down[x]));
        }
        if n + 1 < size {
            let got = comm.mul_vec(&col(n));
            let gap = xhat(h, ni + 1) - xhat(h, ni);
            for x in 0..size {
                rep.exact(format!("[H,a+] (n={n},x={x})"), &(&got[x] - &gap * &up[x]));
            }
        }
        let z = &h.energies[n];
        let r0 = c.r0.eval(z);
        let r1 = c.r1.eval(z);
        let span = xhat(h, ni + 1) - xhat(h, ni - 1);
        rep.exact(format!("alpha+ (n={n})"), &((&r1 + &span) / int(2) - (xhat(h, ni + 1) - z)));
        rep.exact(format!("alpha- (n={n})"), &((&r1 - &span) / int(2) - (xhat(h, ni - 1) - z)));
        if !r0.is_zero() {
            rep.exact(format!("-R_-1/R_0 (n={n})"), &(-c.rm1.eval(z) / &r0 - &t.b_dual[n]));
        }
    }
    rep.holds("X(N+1)>X(N)", h.x_nplus1 > h.energies[size - 1], || "off-grid extension not monotone".into());
    for (name, poly) in [("R0", &c.r0), ("R1", &c.r1), ("R-1", &c.rm1)] {
        let vals: Vec<Scalar> = h.energies.iter().map(|z| poly.eval(z)).collect();
        let diff = &spectral_fn(h, &vals)? - &h.h_tilde.poly_eval(poly);
        rep.holds(format!("spectral {name}(H) = Horner {name}(H)"), diff.is_zero(), || {
            format!("{} entries differ", diff.nonzero_entries().len())
        });
    }
    Ok(rep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{eta, tests::{q6, r6}};
    use crate::bigreal::DEFAULT_PRECISION;
    use crate::dual::{build_hamiltonians, dual_values};
    use crate::multi::{build_mi_system, MISystem};
    use crate::params::{make_params, Family, IndexSet, ParamSet, ShiftKind};
    use crate::exact::ratio;
    use crate::recurrence::{build_x, extract_r, XPoly};

    fn set(ds: &[usize]) -> IndexSet {
        IndexSet::new(ds.to_vec()).unwrap()
    }

    fn r5() -> ParamSet {
        make_params(Family::R, 5, int(10), ratio(1, 2), ratio(2, 5), None).unwrap()
    }

    fn setup(p: &ParamSet, ds: &IndexSet, y: &Poly) -> (MISystem, XPoly, DualTable, DualHamiltonian) {
        let s = build_mi_system(p, ds).unwrap();
        let xp = build_x(&s, y, true).unwrap();
        let t = extract_r(&s, &xp).unwrap();
        let dt = dual_values(&s).unwrap();
        let h = build_hamiltonians(&s, &xp, &t, &dt, DEFAULT_PRECISION).unwrap();
        (s, xp, dt, h)
    }

    #[test]
    fn undeformed_closure_has_low_degrees() {
        for p in [r5(), q6()] {
            let (_, _, dt, h) = setup(&p, &IndexSet::empty(), &Poly::one());
            let c = solve_closure(&h, &dt).unwrap();
            assert!(c.r0.degree().unwrap_or(0) <= 2);
            assert!(c.r1.degree().unwrap_or(0) <= 1);
            assert!(c.rm1.degree().unwrap_or(0) <= 2);
            assert!(verify_closure(&h, &c).passed());
        }
    }

    #[test]
    fn deformed_closure_and_ladder() {
        for p in [r5(), q6()] {
            for ds in [set(&[1]), set(&[2]), set(&[1, 2])] {
                let (_, _, dt, h) = setup(&p, &ds, &Poly::one());
                let c = solve_closure(&h, &dt).unwrap();
                let rep = verify_closure(&h, &c);
                assert!(rep.passed(), "{:?} {ds}: {:?}", p.family, rep.failures);
                let lp = build_ladder(&h, &dt, &c).unwrap();
                let rep = verify_ladder(&h, &dt, &c, &lp).unwrap();
                assert!(rep.passed(), "{:?} {ds}: {:?}", p.family, rep.failures);
            }
        }
    }

    #[test]
    fn node_identities_fail_off_grid() {
        let p = r5();
        let (s, xp, dt, h) = setup(&p, &set(&[1]), &Poly::one());
        let c = solve_closure(&h, &dt).unwrap();
        let pm = p.shift(s.m() as i64, ShiftKind::Delta);
        let at = |j: i64| xp.poly.eval(&eta(j, &pm));
        for j in 0..=p.n as i64 {
            assert!(r0_node_residual(&c, at, j).is_zero());
        }
        assert!(!r0_node_residual(&c, at, p.n as i64 + 1).is_zero());
    }

    #[test]
    fn zero_y_at_origin_makes_r0_singular() {
        let (_, _, dt, h) = setup(&r5(), &set(&[1]), &Poly::x());
        assert!(h.x_minus1.is_zero());
        let c = solve_closure(&h, &dt).unwrap();
        assert!(verify_closure(&h, &c).passed());
        assert_eq!(build_ladder(&h, &dt, &c).unwrap_err(), Error::SingularR0(0));
    }

    #[test]
    fn perturbed_hamiltonian_breaks_closure() {
        let (_, _, dt, h) = setup(&r6(), &set(&[1]), &Poly::one());
        let c = solve_closure(&h, &dt).unwrap();
        let mut bad = h.h_tilde.clone();
        bad = &bad + &Matrix::from_fn(bad.order(), |x, y| if (x, y) == (2, 3) { ratio(1, 7) } else { Scalar::zero() });
        assert!(!closure_residual(&bad, &h.e_coord, &c).is_zero());
    }

    #[test]
    fn spectral_calculus_basics() {
        let (_, _, dt, h) = setup(&r5(), &set(&[1]), &Poly::one());
        let size = h.energies.len();
        assert_eq!(spectral_fn(&h, &vec![one(); size]).unwrap(), Matrix::identity(size));
        assert_eq!(spectral_fn(&h, &h.energies).unwrap(), h.h_tilde);
        let c = solve_closure(&h, &dt).unwrap();
        let lp = build_ladder(&h, &dt, &c).unwrap();
        let mut broken = h.clone();
        broken.v = Matrix::from_fn(size, |x, n| {
            if (x, n) == (2, 3) { &h.v[(x, n)] + int(1) } else { h.v[(x, n)].clone() }
        });
        let rep = verify_ladder(&broken, &dt, &c, &lp).unwrap();
        assert!(!rep.passed());
        assert!(rep.failures.iter().filter(|f| f.at.starts_with("a")).all(|f| f.at.contains("n=2") || f.at.contains("n=3") || f.at.contains("n=4")));
    }
}
