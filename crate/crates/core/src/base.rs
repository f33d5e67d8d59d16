//! The undeformed (q-)Racah data: sinusoidal coordinate, energies, potentials,
//! polynomials, recurrence coefficients, ground-state weight, norms and the
//! virtual-state objects obtained through the twist.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::{checked_div, int, one, poch, qpoch, Scalar};
use crate::params::{Family, ParamSet};
use crate::poly::Poly;
use crate::report::CheckReport;

/// η(x;λ): `x(x+d)` or `(q^(−x)−1)(1−dq^x)`. Defined for every integer x.
pub fn eta(x: i64, p: &ParamSet) -> Scalar {
    match p.family {
        Family::R => int(x) * (int(x) + &p.d),
        Family::QR => (p.qpow(-x) - one()) * (one() - &p.d * p.qpow(x)),
    }
}

/// E_n(λ): η with `d̃` in place of `d`.
pub fn energy(n: i64, p: &ParamSet) -> Scalar {
    let dt = p.dtilde();
    match p.family {
        Family::R => int(n) * (int(n) + dt),
        Family::QR => (p.qpow(-n) - one()) * (one() - dt * p.qpow(n)),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Potential {
    B,
    D,
    Bprime,
    Dprime,
}

fn in_grid(what: &str, v: i64, p: &ParamSet) -> Result<()> {
    if v < 0 || v > p.n as i64 {
        Err(Error::IndexOutOfRange(format!("{what} = {v} outside 0..={}", p.n)))
    } else {
        Ok(())
    }
}

/// Potential functions at any integer x; the primed ones use their own
/// closed forms and agree with B, D at t(λ).
pub fn potential(x: i64, p: &ParamSet, which: Potential) -> Result<Scalar> {
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    let xs = int(x);
    match p.family {
        Family::R => {
            let (num, den) = match which {
                Potential::B => (
                    -((&xs + a) * (&xs + b) * (&xs + c) * (&xs + d)),
                    (int(2 * x) + d) * (int(2 * x + 1) + d),
                ),
                Potential::D => (
                    -((&xs + d - a) * (&xs + d - b) * (&xs + d - c) * &xs),
                    (int(2 * x - 1) + d) * (int(2 * x) + d),
                ),
                Potential::Bprime => (
                    -((&xs + d - a + one()) * (&xs + d - b + one()) * (&xs + c) * (&xs + d)),
                    (int(2 * x) + d) * (int(2 * x + 1) + d),
                ),
                Potential::Dprime => (
                    -((&xs + a - one()) * (&xs + b - one()) * (&xs + d - c) * &xs),
                    (int(2 * x - 1) + d) * (int(2 * x) + d),
                ),
            };
            quotient_or_zero(num, den)
        }
        Family::QR => {
            let q = p.q();
            let qx = p.qpow(x);
            let dq2 = |k: i64| one() - d * p.qpow(2 * x + k);
            let (num, den) = match which {
                Potential::B => (
                    -((one() - a * &qx) * (one() - b * &qx) * (one() - c * &qx) * (one() - d * &qx)),
                    dq2(0) * dq2(1),
                ),
                Potential::D => (
                    -(p.dtilde()
                        * (one() - d * &qx / a)
                        * (one() - d * &qx / b)
                        * (one() - d * &qx / c)
                        * (one() - &qx)),
                    dq2(-1) * dq2(0),
                ),
                Potential::Bprime => {
                    let dqx1 = d * &qx * q;
                    (
                        -((one() - &dqx1 / a) * (one() - &dqx1 / b) * (one() - c * &qx) * (one() - d * &qx)),
                        dq2(0) * dq2(1),
                    )
                }
                Potential::Dprime => {
                    let qxm1 = &qx / q;
                    (
                        -(c * d * q / (a * b)
                            * (one() - a * &qxm1)
                            * (one() - b * &qxm1)
                            * (one() - d * &qx / c)
                            * (one() - &qx)),
                        dq2(-1) * dq2(0),
                    )
                }
            };
            quotient_or_zero(num, den)
        }
    }
}

/// A vanishing numerator wins over a vanishing denominator: the boundary
/// zeros B(N) and D(0) are part of the definition.
fn quotient_or_zero(num: Scalar, den: Scalar) -> Result<Scalar> {
    if num.is_zero() {
        Ok(num)
    } else {
        checked_div(&num, &den, "potential")
    }
}

/// Terminating ₄F₃ / ₄φ₃ sum for P̌_n(x;λ), accumulated through the exact term
/// ratio. Unlike [`racah_value`] this accepts any x ≥ 0 and any parameter set
/// whose lower parameters do not vanish before termination.
pub fn hyper_sum(n: usize, x: i64, p: &ParamSet) -> Result<Scalar> {
    let dt = p.dtilde();
    let ni = n as i64;
    let mut term = one();
    let mut sum = one();
    for k in 0..ni {
        let (num, den) = match p.family {
            Family::R => {
                let ks = int(k);
                (
                    int(k - ni) * (&ks + int(ni) + &dt) * int(k - x) * (&ks + int(x) + &p.d),
                    (&ks + &p.a) * (&ks + &p.b) * (&ks + &p.c) * int(k + 1),
                )
            }
            Family::QR => {
                let qk = p.qpow(k);
                (
                    (one() - p.qpow(k - ni))
                        * (one() - &dt * p.qpow(ni + k))
                        * (one() - p.qpow(k - x))
                        * (one() - &p.d * p.qpow(x + k))
                        * p.q(),
                    (one() - &p.a * &qk) * (one() - &p.b * &qk) * (one() - &p.c * &qk) * (one() - p.qpow(k + 1)),
                )
            }
        };
        if num.is_zero() {
            break;
        }
        term = term * checked_div(&num, &den, "hypergeometric term ratio")?;
        sum += &term;
    }
    Ok(sum)
}

/// P̌_n(x;λ) on the grid `0 ≤ n, x ≤ N`.
pub fn racah_value(n: i64, x: i64, p: &ParamSet) -> Result<Scalar> {
    in_grid("n", n, p)?;
    in_grid("x", x, p)?;
    hyper_sum(n as usize, x, p)
}

/// (A_n, B_n, C_n) without range checks.
pub fn rec_coeffs_raw(n: i64, p: &ParamSet) -> Result<(Scalar, Scalar, Scalar)> {
    let (a, b, c, d) = (&p.a, &p.b, &p.c, &p.d);
    let dt = p.dtilde();
    let ns = int(n);
    let (an, cn) = match p.family {
        Family::R => (
            checked_div(
                &((&ns + a) * (&ns + b) * (&ns + c) * (&ns + &dt)),
                &((int(2 * n) + &dt) * (int(2 * n + 1) + &dt)),
                "A_n",
            )?,
            checked_div(
                &((&ns + &dt - a) * (&ns + &dt - b) * (&ns + &dt - c) * &ns),
                &((int(2 * n - 1) + &dt) * (int(2 * n) + &dt)),
                "C_n",
            )?,
        ),
        Family::QR => {
            let qn = p.qpow(n);
            let dtq = |k: i64| one() - &dt * p.qpow(2 * n + k);
            (
                checked_div(
                    &((one() - a * &qn) * (one() - b * &qn) * (one() - c * &qn) * (one() - &dt * &qn)),
                    &(dtq(0) * dtq(1)),
                    "A_n",
                )?,
                checked_div(
                    &(d * (one() - &dt * &qn / a)
                        * (one() - &dt * &qn / b)
                        * (one() - &dt * &qn / c)
                        * (one() - &qn)),
                    &(dtq(-1) * dtq(0)),
                    "C_n",
                )?,
            )
        }
    };
    let bn = -(&an + &cn);
    Ok((an, bn, cn))
}

/// Coefficients of η P_n = A_n P_{n+1} + B_n P_n + C_n P_{n−1}, `0 ≤ n ≤ N`.
pub fn rec_coeffs(n: i64, p: &ParamSet) -> Result<(Scalar, Scalar, Scalar)> {
    in_grid("n", n, p)?;
    rec_coeffs_raw(n, p)
}

/// P_0..P_top in η from the three-term recurrence.
pub fn racah_polys_upto(top: usize, p: &ParamSet) -> Result<Vec<Poly>> {
    let mut out = vec![Poly::one()];
    let mut prev = Poly::zero();
    for n in 0..top as i64 {
        let (an, bn, cn) = rec_coeffs_raw(n, p)?;
        if an.is_zero() {
            return Err(Error::ZeroDenominator(format!("A_{n} in the recurrence")));
        }
        let cur = out.last().unwrap();
        let shifted = Poly::new(vec![-bn, one()]);
        let next = (&(&shifted * cur) - &prev.scale(&cn)).scale(&an.recip());
        prev = cur.clone();
        out.push(next);
    }
    Ok(out)
}

/// P_n(η;λ), `0 ≤ n ≤ N`.
pub fn racah_poly(n: i64, p: &ParamSet) -> Result<Poly> {
    in_grid("n", n, p)?;
    Ok(racah_polys_upto(n as usize, p)?.pop().unwrap())
}

/// Family-appropriate Pochhammer symbol: `(x)_n` or `(x;q)_n`.
pub fn fpoch(p: &ParamSet, x: &Scalar, n: usize) -> Scalar {
    match p.family {
        Family::R => poch(x, n),
        Family::QR => qpoch(x, p.q(), n),
    }
}

/// The three "reflected" arguments `(s−a+1, s−b+1, s−c+1)` or `(sq/a, sq/b, sq/c)`
/// plus the unit argument (1 or q).
fn reflected(p: &ParamSet, s: &Scalar) -> [Scalar; 4] {
    match p.family {
        Family::R => [s - &p.a + one(), s - &p.b + one(), s - &p.c + one(), one()],
        Family::QR => {
            let sq = s * p.q();
            [&sq / &p.a, &sq / &p.b, &sq / &p.c, p.q().clone()]
        }
    }
}

fn prod_poch(p: &ParamSet, xs: &[Scalar], n: usize) -> Scalar {
    xs.iter().fold(one(), |acc, x| acc * fpoch(p, x, n))
}

fn positive(v: Scalar, what: String) -> Result<Scalar> {
    if v.is_positive() {
        Ok(v)
    } else {
        Err(Error::NonPositiveWeight(what))
    }
}

/// φ₀(x;λ)² on the grid; positive under admissible parameters.
pub fn phi0_sq(x: i64, p: &ParamSet) -> Result<Scalar> {
    in_grid("x", x, p)?;
    let xu = x as usize;
    let num = prod_poch(p, &[p.a.clone(), p.b.clone(), p.c.clone(), p.d.clone()], xu);
    let den = prod_poch(p, &reflected(p, &p.d), xu);
    let v = match p.family {
        Family::R => checked_div(&num, &den, "phi0")? * (int(2 * x) + &p.d) / &p.d,
        Family::QR => {
            let den = den * crate::exact::pow_i(&p.dtilde(), x);
            checked_div(&num, &den, "phi0")? * (one() - &p.d * p.qpow(2 * x)) / (one() - &p.d)
        }
    };
    positive(v, format!("phi0(x={x})^2"))
}

/// d_n(λ)² on the grid; positive under admissible parameters.
pub fn dn_sq(n: i64, p: &ParamSet) -> Result<Scalar> {
    in_grid("n", n, p)?;
    let nu = n as usize;
    let big_n = p.n;
    let dt = p.dtilde();
    let sign = if big_n % 2 == 0 { one() } else { -one() };
    let num = prod_poch(p, &[p.a.clone(), p.b.clone(), p.c.clone(), dt.clone()], nu);
    let den = prod_poch(p, &reflected(p, &dt), nu);
    let refl_d = reflected(p, &p.d);
    let tail_num = sign * prod_poch(p, &refl_d[..3], big_n);
    let v = match p.family {
        Family::R => {
            let head = checked_div(&num, &den, "d_n")? * (int(2 * n) + &dt) / &dt;
            let tail_den = poch(&(&dt + one()), big_n) * poch(&(&p.d + one()), 2 * big_n);
            head * checked_div(&tail_num, &tail_den, "d_n")?
        }
        Family::QR => {
            let q = p.q();
            let den = den * crate::exact::pow_i(&p.d, n);
            let head = checked_div(&num, &den, "d_n")? * (one() - &dt * p.qpow(2 * n)) / (one() - &dt);
            let tail_num = tail_num
                * crate::exact::pow_i(&dt, big_n as i64)
                * p.qpow((big_n * (big_n + 1) / 2) as i64);
            let tail_den = qpoch(&(&dt * q), q, big_n) * qpoch(&(&p.d * q), q, 2 * big_n);
            head * checked_div(&tail_num, &tail_den, "d_n")?
        }
    };
    positive(v, format!("d_{n}^2"))
}

/// ξ̌_v(x;λ) = P̌_v(x; t(λ)); any x ≥ 0 is accepted since Casoratians reach past N.
pub fn xi_v(v: usize, x: i64, p: &ParamSet) -> Result<Scalar> {
    hyper_sum(v, x, &p.twist())
}

/// Virtual-state energy Ẽ_v(λ).
pub fn etilde_v(v: usize, p: &ParamSet) -> Scalar {
    let dt = p.dtilde();
    let vi = v as i64;
    match p.family {
        Family::R => -((&p.c + int(vi)) * (&dt - &p.c - int(vi))),
        Family::QR => -((one() - &p.c * p.qpow(vi)) * (one() - &dt * p.qpow(-vi) / &p.c)),
    }
}

/// α(λ): 1 (R) or ab/(dq) (qR).
pub fn alpha_const(p: &ParamSet) -> Scalar {
    match p.family {
        Family::R => one(),
        Family::QR => &p.a * &p.b / (&p.d * p.q()),
    }
}

/// Leading coefficient c_n(λ) of P_n(η;λ).
pub fn lead_c(n: usize, p: &ParamSet) -> Scalar {
    let dt = p.dtilde();
    let abc = [p.a.clone(), p.b.clone(), p.c.clone()];
    let top = match p.family {
        Family::R => poch(&(&dt + int(n as i64)), n),
        Family::QR => qpoch(&(&dt * p.qpow(n as i64)), p.q(), n),
    };
    top / prod_poch(p, &abc, n)
}

/// Leading coefficient c̃_v(λ) of ξ_v(η;λ).
pub fn lead_ctilde(v: usize, p: &ParamSet) -> Scalar {
    let vi = v as i64;
    let refl = reflected(p, &p.d);
    let (top, den_args) = match p.family {
        Family::R => (
            poch(&(&p.c + &p.d - &p.a - &p.b + int(vi + 1)), v),
            [refl[0].clone(), refl[1].clone(), p.c.clone()],
        ),
        Family::QR => (
            qpoch(&(&p.c * &p.d * p.qpow(vi + 1) / (&p.a * &p.b)), p.q(), v),
            [refl[0].clone(), refl[1].clone(), p.c.clone()],
        ),
    };
    top / prod_poch(p, &den_args, v)
}

/// Orthogonality Σ_x φ₀² d_n² P̌_n P̌_m = δ_{nm}, duality P̌_n(x;λ) = P̌_x(n;λ^dual),
/// and agreement of the ₄F₃/₄φ₃ sum with the three-term recurrence.
pub fn verify_base(p: &ParamSet) -> Result<CheckReport> {
    let mut rep = CheckReport::new("base family");
    let n = p.n as i64;
    let table: Vec<Vec<Scalar>> = (0..=n)
        .map(|k| grid(p, |x| racah_value(k, x, p)))
        .collect::<Result<_>>()?;
    let weights = grid(p, |x| phi0_sq(x, p))?;
    let norms = grid(p, |k| dn_sq(k, p))?;
    for a in 0..=p.n {
        for b in a..=p.n {
            let s = (0..=p.n).fold(Scalar::zero(), |acc, x| acc + &weights[x] * &table[a][x] * &table[b][x]);
            let want = if a == b { one() } else { Scalar::zero() };
            rep.exact(format!("orthogonality (n={a},m={b})"), &(s * &norms[a] - want));
        }
    }
    let dual = p.dual();
    for k in 0..=n {
        for x in 0..=n {
            let v = racah_value(x, k, &dual)?;
            rep.exact(format!("duality (n={k},x={x})"), &(&table[k as usize][x as usize] - v));
        }
    }
    let polys = racah_polys_upto(p.n, p)?;
    for (k, poly) in polys.iter().enumerate() {
        rep.holds(format!("deg P_{k}"), poly.degree() == Some(k), || format!("{:?}", poly.degree()));
        rep.exact(
            format!("leading coefficient P_{k}"),
            &(poly.leading().cloned().unwrap_or_default() - lead_c(k, p)),
        );
        for x in 0..=n {
            rep.exact(
                format!("sum vs recurrence (n={k},x={x})"),
                &(poly.eval(&eta(x, p)) - &table[k][x as usize]),
            );
        }
    }
    Ok(rep)
}

/// Grid samples `f(0..=N)`.
pub fn grid<F: Fn(i64) -> Result<Scalar>>(p: &ParamSet, f: F) -> Result<Vec<Scalar>> {
    (0..=p.n as i64).map(f).collect()
}
