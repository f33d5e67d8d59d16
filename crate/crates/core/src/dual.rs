//! Dual polynomials Q̌_{D,x}(n) = P̌_{D,n}(x)/P̌_{D,0}(x) and the
//! (1+2L)-diagonal Hamiltonians whose eigenvectors they describe.
//!
//! Orientation: the Hamiltonian acts on the index x, and its n-th eigenvector
//! is x ↦ Q̌_{D,n}(x) = P̌_{D,x}(n)/P̌_{D,0}(n). The eigenvector matrix V is
//! therefore the transpose of the dual table.

use num_traits::{Signed, Zero};

use crate::base::energy;
use crate::bigreal::{BigReal, RealMatrix};
use crate::error::{Error, Result};
use crate::exact::{checked_div, one, Scalar};
use crate::matrix::Matrix;
use crate::multi::{sign_changes, MISystem};
use crate::recurrence::{RecTable, XPoly};
use crate::report::CheckReport;

#[derive(Clone, Debug)]
pub struct DualTable {
    /// Q̌_{D,x}(n), indexed `[x][n]`.
    pub q_vals: Vec<Vec<Scalar>>,
    pub a_dual: Vec<Scalar>,
    pub b_dual: Vec<Scalar>,
    pub c_dual: Vec<Scalar>,
}

/// The ratio definition, re-derived from the three-term recurrence
/// E_n Q̌_x = A^dual_x Q̌_{x+1} + B^dual_x Q̌_x + C^dual_x Q̌_{x−1} and required
/// to agree entrywise.
pub fn dual_values(s: &MISystem) -> Result<DualTable> {
    let big_n = s.n();
    let q_vals: Vec<Vec<Scalar>> = (0..=big_n)
        .map(|x| {
            (0..=big_n)
                .map(|n| checked_div(&s.pdn_grid[n][x], &s.pdn_grid[0][x], "Q_(D,x)(n)"))
                .collect::<Result<_>>()
        })
        .collect::<Result<_>>()?;
    let a_dual: Vec<Scalar> = (0..=big_n).map(|x| s.b_d(x).map(|v| -v)).collect::<Result<_>>()?;
    let c_dual: Vec<Scalar> = (0..=big_n).map(|x| s.d_d(x).map(|v| -v)).collect::<Result<_>>()?;
    let b_dual: Vec<Scalar> = a_dual.iter().zip(&c_dual).map(|(a, c)| -(a + c)).collect();
    if !c_dual[0].is_zero() || !a_dual[big_n].is_zero() {
        return Err(Error::CrossCheckMismatch("dual boundary coefficients C_0, A_N must vanish".into()));
    }

    let p = &s.params;
    for n in 0..=big_n {
        let en = energy(n as i64, p);
        let mut prev = Scalar::zero();
        let mut cur = one();
        for x in 0..=big_n {
            if cur != q_vals[x][n] {
                return Err(Error::CrossCheckMismatch(format!(
                    "dual recurrence and ratio disagree at (x={x}, n={n})"
                )));
            }
            if x == big_n {
                break;
            }
            let next = checked_div(
                &((&en - &b_dual[x]) * &cur - &c_dual[x] * &prev),
                &a_dual[x],
                "A^dual_x",
            )?;
            prev = std::mem::replace(&mut cur, next);
        }
    }
    Ok(DualTable {
        q_vals,
        a_dual,
        b_dual,
        c_dual,
    })
}

/// Σ_n (d²_{D,n}/Ξ̌_D(1)) Q̌_{D,x}(n) Q̌_{D,y}(n) = δ_{xy}/φ_{D,0}(x)², plus the
/// boundary values and sign-change counts of the table.
pub fn dual_ortho(s: &MISystem, t: &DualTable) -> CheckReport {
    let mut rep = CheckReport::new("dual orthogonality");
    let big_n = s.n();
    let xi1 = &s.xi_grid[1];
    for x in 0..=big_n {
        for y in x..=big_n {
            let sum = (0..=big_n).fold(Scalar::zero(), |acc, n| {
                acc + &s.ddn_sq[n] * &t.q_vals[x][n] * &t.q_vals[y][n]
            }) / xi1;
            let want = if x == y { s.phi_d0_sq(x).recip() } else { Scalar::zero() };
            rep.exact(format!("(x={x},y={y})"), &(sum - want));
        }
    }
    for k in 0..=big_n {
        rep.exact(format!("Q_(D,{k})(0)-1"), &(&t.q_vals[k][0] - one()));
        rep.exact(format!("Q_(D,0)({k})-1"), &(&t.q_vals[0][k] - one()));
        let changes = sign_changes(&t.q_vals[k]);
        rep.holds(format!("sign changes of Q_(D,{k})"), changes == Ok(k), || format!("{changes:?}"));
    }
    rep
}

#[derive(Clone, Debug)]
pub struct DualHamiltonian {
    /// Σ_k r_{x,k} e^{k∂}: the ground-state similarity transform.
    pub h_tilde: Matrix,
    /// The real symmetric Hamiltonian.
    pub h_sym: RealMatrix,
    /// X̌(n), n = 0..=N.
    pub energies: Vec<Scalar>,
    pub x_minus1: Scalar,
    pub x_nplus1: Scalar,
    /// The sinusoidal coordinate E_x(λ), x = 0..=N.
    pub e_coord: Vec<Scalar>,
    /// Column n is x ↦ Q̌_{D,n}(x).
    pub v: Matrix,
    pub v_inv: Matrix,
    pub l: usize,
}

/// Builds h̃ exactly and h by square roots of the exact d²-ratios. The
/// symmetry of h is certified exactly through the rational identity
/// h_{x,x+k} h_{x+k,x} = r_{x,k} r_{x+k,−k} = r_{x,k}² d²_{D,x}/d²_{D,x+k}.
pub fn build_hamiltonians(
    s: &MISystem,
    xp: &XPoly,
    t: &RecTable,
    dt: &DualTable,
    precision: u32,
) -> Result<DualHamiltonian> {
    let big_n = s.n();
    let h_tilde = Matrix::from_fn(big_n + 1, |x, y| t.get(x, y as i64 - x as i64));
    let mut h_sym = RealMatrix::zeros(big_n + 1, precision);
    for x in 0..=big_n {
        for k in t.band(x) {
            let y = (x as i64 + k) as usize;
            let r = t.get(x, k);
            let ratio = &s.ddn_sq[x] / &s.ddn_sq[y];
            if ratio.is_negative() {
                return Err(Error::NegativeUnderSqrt(format!("d_(D,{x})^2/d_(D,{y})^2")));
            }
            let back = t.get(y, -k);
            if &r * &r * &ratio != &r * &back {
                return Err(Error::SymmetryViolation(format!("h({x},{y}) h({y},{x})")));
            }
            let root = BigReal::from_rational(&ratio, precision).sqrt()?;
            h_sym.set(x, y, BigReal::from_rational(&r, precision).mul(&root));
        }
    }
    let tol = BigReal::pow2(-(precision as i64) / 2, precision).mul(&h_sym.max_abs());
    for x in 0..=big_n {
        for y in x + 1..=big_n {
            if h_sym.get(x, y).sub(h_sym.get(y, x)).abs().cmp_value(&tol).is_gt() {
                return Err(Error::SymmetryViolation(format!("h_sym({x},{y}) beyond tolerance")));
            }
        }
    }
    let v = Matrix::from_fn(big_n + 1, |x, n| dt.q_vals[n][x].clone());
    let v_inv = v.inverse()?;
    Ok(DualHamiltonian {
        h_tilde,
        h_sym,
        energies: xp.energies(),
        x_minus1: xp.xhat(-1).clone(),
        x_nplus1: xp.xhat(big_n as i64 + 1).clone(),
        e_coord: (0..=big_n as i64).map(|x| energy(x, &s.params)).collect(),
        v,
        v_inv,
        l: xp.l,
    })
}

/// h̃ V = V diag(X̌(n)) entrywise, the band structure, and
/// 0 = X̌(0) < X̌(1) < ⋯ < X̌(N).
pub fn verify_spectrum(h: &DualHamiltonian) -> CheckReport {
    let mut rep = CheckReport::new("spectrum");
    let size = h.v.order();
    let lhs = &h.h_tilde * &h.v;
    for x in 0..size {
        for n in 0..size {
            rep.exact(format!("(x={x},n={n})"), &(&lhs[(x, n)] - &h.v[(x, n)] * &h.energies[n]));
        }
    }
    for x in 0..size {
        for y in 0..size {
            if x.abs_diff(y) > h.l {
                rep.exact(format!("band ({x},{y})"), &h.h_tilde[(x, y)]);
            }
        }
    }
    rep.exact("X(0)", &h.energies[0]);
    for n in 1..size {
        rep.holds(format!("X({n})>X({})", n - 1), h.energies[n] > h.energies[n - 1], || "not increasing".into());
    }
    rep
}

/// [h̃₁, h̃₂] = 0 exactly.
pub fn commutator_check(h1: &Matrix, h2: &Matrix) -> Result<CheckReport> {
    if h1.order() != h2.order() {
        return Err(Error::ShapeMismatch(format!("{} vs {}", h1.order(), h2.order())));
    }
    let mut rep = CheckReport::new("commutator");
    let c = h1.commutator(h2);
    for x in 0..c.order() {
        for y in 0..c.order() {
            rep.exact(format!("({x},{y})"), &c[(x, y)]);
        }
    }
    Ok(rep)
}
