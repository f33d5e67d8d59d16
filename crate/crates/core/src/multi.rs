//! Casoratian construction of the multi-indexed polynomials Ξ_D and P_{D,n}.
//!
//! Both are first produced as values from their determinant formulas and then
//! recovered as polynomials in η by exact interpolation, with the expected
//! degree checked. The determinant formulas are valid off the grid, which is
//! what supplies enough interpolation nodes when ℓ_D + n exceeds N.

use num_traits::{Signed, Zero};

use crate::base::{
    alpha_const, dn_sq, energy, eta, etilde_v, fpoch, hyper_sum, lead_c, lead_ctilde, phi0_sq,
    potential, rec_coeffs_raw, Potential,
};
use crate::error::{Error, Result};
use crate::exact::{checked_div, int, one, pow_i, Scalar};
use crate::matrix::Matrix;
use crate::params::{ell, ensure_admissible, Family, IndexSet, ParamSet, ShiftKind};
use crate::poly::Poly;
use crate::report::CheckReport;

/// φ(x;λ) = (η(x+1)−η(x))/η(1).
pub fn varphi(x: i64, p: &ParamSet) -> Scalar {
    match p.family {
        Family::R => (int(2 * x + 1) + &p.d) / (&p.d + one()),
        Family::QR => (p.qpow(-x) - &p.d * p.qpow(x + 1)) / (one() - &p.d * p.q()),
    }
}

/// φ_M(x;λ) = ∏_{1≤j<k≤M} φ(x+j−1; λ+(k−j−1)δ).
pub fn varphi_m(x: i64, m: usize, p: &ParamSet) -> Scalar {
    let mut acc = one();
    for j in 1..=m as i64 {
        for k in j + 1..=m as i64 {
            acc *= varphi(x + j - 1, &p.shift(k - j - 1, ShiftKind::Delta));
        }
    }
    acc
}

/// det(f_k(x+j−1)) for the given functions; 1 for the empty set.
pub fn casoratian(fs: &[&dyn Fn(i64) -> Result<Scalar>], x: i64) -> Result<Scalar> {
    let n = fs.len();
    let mut rows = Vec::with_capacity(n);
    for j in 0..n {
        rows.push(fs.iter().map(|f| f(x + j as i64)).collect::<Result<Vec<_>>>()?);
    }
    Ok(Matrix::from_rows(rows)?.det())
}

/// r_j(x_j;λ,M) with `x` the base point (x_j = x+j−1), `1 ≤ j ≤ M+1`.
pub fn rj_factor(j: usize, x: i64, m: usize, p: &ParamSet) -> Result<Scalar> {
    if j < 1 || j > m + 1 {
        return Err(Error::IndexOutOfRange(format!("r_j with j = {j}, M = {m}")));
    }
    let (a, b, d) = (&p.a, &p.b, &p.d);
    let ji = j as i64;
    match p.family {
        Family::R => {
            let xs = int(x);
            let num = fpoch(p, &(&xs + a), j - 1)
                * fpoch(p, &(&xs + b), j - 1)
                * fpoch(p, &(&xs + d - a + int(ji)), m + 1 - j)
                * fpoch(p, &(&xs + d - b + int(ji)), m + 1 - j);
            let den = fpoch(p, &(d - a + one()), m) * fpoch(p, &(d - b + one()), m);
            checked_div(&num, &den, "r_j")
        }
        Family::QR => {
            let q = p.q();
            let qx = p.qpow(x);
            let dqxj = d * p.qpow(x + ji);
            let num = fpoch(p, &(a * &qx), j - 1)
                * fpoch(p, &(b * &qx), j - 1)
                * fpoch(p, &(&dqxj / a), m + 1 - j)
                * fpoch(p, &(&dqxj / b), m + 1 - j);
            let den = pow_i(&(a * b / (d * q)), ji - 1)
                * p.qpow(m as i64 * x)
                * fpoch(p, &(d * q / a), m)
                * fpoch(p, &(d * q / b), m);
            checked_div(&num, &den, "r_j")
        }
    }
}

/// C_D(λ).
pub fn c_d(ds: &IndexSet, p: &ParamSet) -> Result<Scalar> {
    let m = ds.m();
    let d = ds.as_slice();
    let alpha = alpha_const(p);
    let mut acc = checked_div(&one(), &varphi_m(0, m, p), "C_D")?;
    for j in 0..m {
        for k in j + 1..m {
            let den = &alpha * potential(j as i64, p, Potential::Bprime)?;
            acc *= checked_div(&(etilde_v(d[j], p) - etilde_v(d[k], p)), &den, "C_D")?;
        }
    }
    if acc.is_zero() {
        return Err(Error::InadmissibleParams(vec!["C_D vanishes".into()]));
    }
    Ok(acc)
}

/// d̃_{D,n}(λ)².
pub fn dtilde_dn_sq(ds: &IndexSet, n: i64, p: &ParamSet) -> Result<Scalar> {
    let m = ds.m();
    let alpha = alpha_const(p);
    let en = energy(n, p);
    let mut acc = checked_div(&varphi_m(0, m, p), &varphi_m(0, m + 1, p), "d~_{D,n}")?;
    for (j, &dj) in ds.as_slice().iter().enumerate() {
        let den = &alpha * potential(j as i64, p, Potential::Bprime)?;
        acc *= checked_div(&(&en - etilde_v(dj, p)), &den, "d~_{D,n}")?;
    }
    Ok(acc)
}

/// Ξ̌_D(x;λ) straight from the Casoratian formula; any x ≥ 0.
pub fn xi_check(ds: &IndexSet, p: &ParamSet, x: i64) -> Result<Scalar> {
    let m = ds.m();
    if m == 0 {
        return Ok(one());
    }
    let cd = c_d(ds, p)?;
    let det = Matrix::from_fn(m, |j, k| xi_entry(ds.as_slice()[k], x + j as i64, p)).det();
    checked_div(&det, &(cd * varphi_m(x, m, p)), "Xi_D")
}

fn xi_entry(v: usize, x: i64, p: &ParamSet) -> Scalar {
    crate::base::xi_v(v, x, p).expect("virtual state polynomial at admissible parameters")
}

/// Leading coefficient c^Ξ_D(λ).
pub fn lead_xi(ds: &IndexSet, p: &ParamSet) -> Scalar {
    let d = ds.as_slice();
    let m = d.len();
    let mut acc = d.iter().fold(one(), |acc, &v| acc * lead_ctilde(v, p));
    let (ra, rb) = match p.family {
        Family::R => (&p.d - &p.a + one(), &p.d - &p.b + one()),
        Family::QR => (&p.d * p.q() / &p.a, &p.d * p.q() / &p.b),
    };
    for j in 0..m {
        acc *= fpoch(p, &ra, j) * fpoch(p, &rb, j) * fpoch(p, &p.c, j);
    }
    for j in 0..m {
        for k in j + 1..m {
            let s = (d[j] + d[k] + 1) as i64;
            acc /= match p.family {
                Family::R => &p.c + &p.d - &p.a - &p.b + int(s),
                Family::QR => one() - &p.c * &p.d * p.qpow(s) / (&p.a * &p.b),
            };
        }
    }
    acc
}

/// Leading coefficient c^P_{D,n}(λ).
pub fn lead_pdn(ds: &IndexSet, n: usize, p: &ParamSet) -> Scalar {
    let mut acc = lead_xi(ds, p) * lead_c(n, p);
    for (j, &dj) in ds.as_slice().iter().enumerate() {
        acc *= match p.family {
            Family::R => (&p.c + int(j as i64)) / (&p.c + int((dj + n) as i64)),
            Family::QR => (one() - &p.c * p.qpow(j as i64)) / (one() - &p.c * p.qpow((dj + n) as i64)),
        };
    }
    acc
}

/// d²_{D,n}/d²_{D,0} rebuilt from A_m, C_m, E_n and Ẽ_{d_j}.
pub fn d_ratio_closed(ds: &IndexSet, n: i64, p: &ParamSet) -> Result<Scalar> {
    let mut acc = one();
    for m in 0..n {
        let (am, _, _) = rec_coeffs_raw(m, p)?;
        let (_, _, cm1) = rec_coeffs_raw(m + 1, p)?;
        acc *= checked_div(&am, &cm1, "d-ratio")?;
    }
    let en = energy(n, p);
    for &dj in ds.as_slice() {
        let et = etilde_v(dj, p);
        acc *= checked_div(&(&en - &et), &(-et), "d-ratio")?;
    }
    Ok(acc)
}

/// Number of adjacent sign flips; zeros are rejected.
pub fn sign_changes(seq: &[Scalar]) -> Result<usize> {
    if let Some(i) = seq.iter().position(|v| v.is_zero()) {
        return Err(Error::ZeroEntry(i));
    }
    Ok(seq
        .windows(2)
        .filter(|w| w[0].is_positive() != w[1].is_positive())
        .count())
}

#[derive(Clone, Debug)]
pub struct MISystem {
    pub params: ParamSet,
    pub ds: IndexSet,
    pub ell: usize,
    /// Ξ_D(η) with η = η(x;λ+(M−1)δ).
    pub xi_poly: Poly,
    /// Ξ̌_D(x;λ) for x = 0..=N+1.
    pub xi_grid: Vec<Scalar>,
    /// Ξ̌_D(x;λ+δ) for x = 0..=N+1.
    pub xi_shift_grid: Vec<Scalar>,
    /// P_{D,n}(η) with η = η(x;λ+Mδ), n = 0..=N.
    pub pdn_polys: Vec<Poly>,
    /// P̌_{D,n}(x), indexed `[n][x]` on the grid.
    pub pdn_grid: Vec<Vec<Scalar>>,
    pub ddn_sq: Vec<Scalar>,
    /// ψ_D(x)²/Ξ̌_D(1) for x = 0..=N.
    pub weights: Vec<Scalar>,
}

fn interpolate_exact(nodes: &[Scalar], values: &[Scalar], degree: usize, what: &str) -> Result<Poly> {
    let poly = Poly::interpolate(nodes, values)?;
    if poly.degree() != Some(degree) {
        return Err(Error::DegreeMismatch {
            what: what.to_string(),
            expected: degree,
            got: poly.degree(),
        });
    }
    Ok(poly)
}

/// Builds Ξ_D, P_{D,n} (n ≤ N), the norms d²_{D,n} and the weights, and
/// asserts the structural invariants along the way.
pub fn build_mi_system(p: &ParamSet, ds: &IndexSet) -> Result<MISystem> {
    ensure_admissible(p, ds)?;
    let big_n = p.n;
    let m = ds.m();
    let ell = ell(ds);
    let mi = m as i64;
    let d = ds.as_slice();

    // Ξ̌_D(x;λ): enough nodes for both the grid (to N+1) and the degree ℓ.
    let xi_top = (big_n + 1).max(ell);
    let xi_vals: Vec<Scalar> = (0..=xi_top as i64)
        .map(|x| xi_check(ds, p, x))
        .collect::<Result<_>>()?;
    let xi_nodes_p = p.shift(mi - 1, ShiftKind::Delta);
    let xi_nodes: Vec<Scalar> = (0..=xi_top as i64).map(|x| eta(x, &xi_nodes_p)).collect();
    let xi_poly = interpolate_exact(&xi_nodes, &xi_vals, ell, "Xi_D")?;
    let xi_grid = xi_vals[..=big_n + 1].to_vec();
    for (x, v) in xi_grid.iter().enumerate().take(big_n + 1) {
        if !v.is_positive() {
            return Err(Error::NonPositiveWeight(format!("Xi_D({x})")));
        }
    }
    let shifted = p.shift(1, ShiftKind::Delta);
    let xi_shift_grid: Vec<Scalar> = (0..=big_n as i64 + 1)
        .map(|x| xi_check(ds, &shifted, x))
        .collect::<Result<_>>()?;

    // Bordered Casoratian expanded along its last column; the M×M minors do not
    // depend on n and are computed once per base point.
    let p_top = big_n.max(ell + big_n);
    let x_reach = p_top + m;
    let xi_table: Vec<Vec<Scalar>> = d
        .iter()
        .map(|&v| (0..=x_reach as i64).map(|x| xi_entry(v, x, p)).collect())
        .collect();
    let base_vals: Vec<Vec<Scalar>> = (0..=big_n)
        .map(|n| (0..=x_reach as i64).map(|x| hyper_sum(n, x, p)).collect::<Result<_>>())
        .collect::<Result<_>>()?;
    let mut cofactors: Vec<Vec<Scalar>> = Vec::with_capacity(p_top + 1);
    for x in 0..=p_top {
        let mut row = Vec::with_capacity(m + 1);
        for skip in 0..=m {
            let minor = Matrix::from_fn(m, |r, k| {
                let rr = if r < skip { r } else { r + 1 };
                xi_table[k][x + rr].clone()
            })
            .det();
            let sign = if (skip + m) % 2 == 0 { one() } else { -one() };
            let rj = rj_factor(skip + 1, x as i64, m, p)?;
            row.push(sign * minor * rj);
        }
        cofactors.push(row);
    }
    let cd = c_d(ds, p)?;
    let sign_m = if m % 2 == 0 { one() } else { -one() };
    let nodes_p = p.shift(mi, ShiftKind::Delta);
    let mut pdn_polys = Vec::with_capacity(big_n + 1);
    let mut pdn_grid = Vec::with_capacity(big_n + 1);
    let mut ddn_sq = Vec::with_capacity(big_n + 1);
    for n in 0..=big_n {
        let dt2 = dtilde_dn_sq(ds, n as i64, p)?;
        let cdn = &sign_m * &cd * &dt2;
        let top = big_n.max(ell + n);
        let mut vals = Vec::with_capacity(top + 1);
        for x in 0..=top {
            let det = (0..=m).fold(Scalar::zero(), |acc, j| acc + &cofactors[x][j] * &base_vals[n][x + j]);
            vals.push(checked_div(&det, &(&cdn * varphi_m(x as i64, m + 1, p)), "P_{D,n}")?);
        }
        let nodes: Vec<Scalar> = (0..=top as i64).map(|x| eta(x, &nodes_p)).collect();
        pdn_polys.push(interpolate_exact(&nodes, &vals, ell + n, "P_{D,n}")?);
        pdn_grid.push(vals[..=big_n].to_vec());
        ddn_sq.push(dn_sq(n as i64, p)? * dt2);
    }

    let wp = p.shift(mi, ShiftKind::Tilde);
    let weights: Vec<Scalar> = (0..=big_n)
        .map(|x| Ok(phi0_sq(x as i64, &wp)? / (&xi_grid[x] * &xi_grid[x + 1])))
        .collect::<Result<_>>()?;

    let s = MISystem {
        params: p.clone(),
        ds: ds.clone(),
        ell,
        xi_poly,
        xi_grid,
        xi_shift_grid,
        pdn_polys,
        pdn_grid,
        ddn_sq,
        weights,
    };
    s.check_invariants()?;
    Ok(s)
}

impl MISystem {
    pub fn n(&self) -> usize {
        self.params.n
    }

    pub fn m(&self) -> usize {
        self.ds.m()
    }

    fn check_invariants(&self) -> Result<()> {
        let bad = |what: String| Err(Error::InadmissibleParams(vec![what]));
        if self.xi_grid[0] != one() {
            return bad("Xi_D(0) != 1".into());
        }
        for (n, row) in self.pdn_grid.iter().enumerate() {
            if row[0] != one() {
                return bad(format!("P_(D,{n})(0) != 1"));
            }
        }
        for (n, v) in self.ddn_sq.iter().enumerate() {
            if !v.is_positive() {
                return Err(Error::NonPositiveWeight(format!("d_(D,{n})^2")));
            }
        }
        Ok(())
    }

    /// B_D(x;λ) on the grid.
    pub fn b_d(&self, x: usize) -> Result<Scalar> {
        let wp = self.params.shift(self.m() as i64, ShiftKind::Tilde);
        let b = potential(x as i64, &wp, Potential::B)?;
        Ok(b * &self.xi_grid[x] / &self.xi_grid[x + 1] * &self.xi_shift_grid[x + 1] / &self.xi_shift_grid[x])
    }

    /// D_D(x;λ) on the grid; D_D(0) = 0.
    pub fn d_d(&self, x: usize) -> Result<Scalar> {
        if x == 0 {
            return Ok(Scalar::zero());
        }
        let wp = self.params.shift(self.m() as i64, ShiftKind::Tilde);
        let dpot = potential(x as i64, &wp, Potential::D)?;
        Ok(dpot * &self.xi_grid[x + 1] / &self.xi_grid[x] * &self.xi_shift_grid[x - 1] / &self.xi_shift_grid[x])
    }

    /// φ_{D,0}(x)² = ψ_D(x)² P̌_{D,0}(x)², x on the grid.
    pub fn phi_d0_sq(&self, x: usize) -> Scalar {
        &self.xi_grid[1] * &self.weights[x] * &self.pdn_grid[0][x] * &self.pdn_grid[0][x]
    }
}

/// Σ_x w(x) P̌_{D,n}(x) P̌_{D,m}(x) = δ_{nm}/d²_{D,n} for all n, m.
pub fn verify_ortho(s: &MISystem) -> CheckReport {
    let mut rep = CheckReport::new("orthogonality");
    let big_n = s.n();
    for n in 0..=big_n {
        for m in n..=big_n {
            let sum = (0..=big_n).fold(Scalar::zero(), |acc, x| {
                acc + &s.weights[x] * &s.pdn_grid[n][x] * &s.pdn_grid[m][x]
            });
            let want = if n == m { s.ddn_sq[n].recip() } else { Scalar::zero() };
            rep.exact(format!("(n={n},m={m})"), &(sum - want));
        }
    }
    rep
}

/// The similarity-transformed difference equation H̃_D P̌_{D,n} = E_n P̌_{D,n}
/// at every grid point, plus the boundary zeros of B_D and D_D.
pub fn verify_difference_eq(s: &MISystem) -> Result<CheckReport> {
    let mut rep = CheckReport::new("difference equation");
    let p = &s.params;
    let big_n = s.n();
    let wp = p.shift(s.m() as i64, ShiftKind::Tilde);
    let xi = &s.xi_grid;
    let xs = &s.xi_shift_grid;
    for n in 0..=big_n {
        let pv = &s.pdn_grid[n];
        let en = energy(n as i64, p);
        for x in 0..=big_n {
            let bx = potential(x as i64, &wp, Potential::B)? * &xi[x] / &xi[x + 1];
            let mut lhs = &bx * &xs[x + 1] / &xs[x] * &pv[x];
            if x < big_n {
                lhs -= &bx * &pv[x + 1];
            }
            if x > 0 {
                let dx = potential(x as i64, &wp, Potential::D)? * &xi[x + 1] / &xi[x];
                lhs += &dx * &xs[x - 1] / &xs[x] * &pv[x] - &dx * &pv[x - 1];
            }
            rep.exact(format!("(n={n},x={x})"), &(lhs - &en * &pv[x]));
        }
    }
    rep.exact("D_D(0)", &s.d_d(0)?);
    rep.exact("B_D(N)", &s.b_d(big_n)?);
    Ok(rep)
}

/// Degrees, normalization, Ξ̌ positivity, the P̌_{D,0}(x;λ) = Ξ̌_D(x;λ+δ)
/// identity, leading coefficients, the closed d-ratio and sign-change counts.
pub fn verify_structure(s: &MISystem) -> Result<CheckReport> {
    let mut rep = CheckReport::new("structure");
    let p = &s.params;
    let big_n = s.n();
    rep.holds("deg Xi_D", s.xi_poly.degree() == Some(s.ell), || format!("{:?}", s.xi_poly.degree()));
    rep.exact("Xi_D(0)-1", &(&s.xi_grid[0] - one()));
    for x in 0..=big_n {
        rep.holds(format!("Xi_D({x})>0"), s.xi_grid[x].is_positive(), || "non-positive".into());
        rep.exact(format!("P_(D,0)({x})-Xi_D({x};l+delta)"), &(&s.pdn_grid[0][x] - &s.xi_shift_grid[x]));
    }
    rep.exact("lead Xi_D", &(s.xi_poly.leading().cloned().unwrap_or_default() - lead_xi(&s.ds, p)));
    for n in 0..=big_n {
        let poly = &s.pdn_polys[n];
        rep.holds(format!("deg P_(D,{n})"), poly.degree() == Some(s.ell + n), || format!("{:?}", poly.degree()));
        rep.exact(format!("P_(D,{n})(0)-1"), &(&s.pdn_grid[n][0] - one()));
        rep.exact(
            format!("lead P_(D,{n})"),
            &(poly.leading().cloned().unwrap_or_default() - lead_pdn(&s.ds, n, p)),
        );
        rep.exact(
            format!("d-ratio n={n}"),
            &(&s.ddn_sq[n] / &s.ddn_sq[0] - d_ratio_closed(&s.ds, n as i64, p)?),
        );
        let changes = sign_changes(&s.pdn_grid[n]);
        rep.holds(format!("sign changes P_(D,{n})"), changes == Ok(n), || format!("{changes:?}"));
    }
    Ok(rep)
}
