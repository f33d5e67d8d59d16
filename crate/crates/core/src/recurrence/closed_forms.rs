//! Hand-simplified X(η) and r_{n,k} for a handful of small examples, used as
//! independent comparators for the general construction. The closed forms fix
//! X only up to a positive overall constant, so comparisons first match the
//! coefficient of η¹ and then require every other coefficient to agree.

use num_traits::{Signed, Zero};

use super::{RecTable, XPoly};
use crate::error::{Error, Result};
use crate::exact::{int, one, poch, pow_i, qpoch, Scalar};
use crate::params::{Family, ParamSet};
use crate::poly::Poly;
use crate::report::CheckReport;

/// Recognized identifiers, in `family:D/Y` form.
pub const EXAMPLES: [&str; 6] = ["R:{1}/1", "R:{2}/1", "R:{1,2}/1", "R:{1}/eta", "qR:{1}/1", "qR:{2}/1"];

/// (family, D, Y) behind an example identifier. `η` is accepted for `eta`.
pub fn example_setup(id: &str) -> Result<(Family, Vec<usize>, Poly)> {
    let norm = id.replace('η', "eta");
    let (family, ds, y) = match norm.as_str() {
        "R:{1}/1" => (Family::R, vec![1], Poly::one()),
        "R:{2}/1" => (Family::R, vec![2], Poly::one()),
        "R:{1,2}/1" => (Family::R, vec![1, 2], Poly::one()),
        "R:{1}/eta" => (Family::R, vec![1], Poly::x()),
        "qR:{1}/1" => (Family::QR, vec![1], Poly::one()),
        "qR:{2}/1" => (Family::QR, vec![2], Poly::one()),
        _ => return Err(Error::UnknownExample(id.to_string())),
    };
    Ok((family, ds, y))
}

struct Sym {
    a: Scalar,
    b: Scalar,
    c: Scalar,
    d: Scalar,
    s1: Scalar,
    s2: Scalar,
    t1: Scalar,
    t2: Scalar,
}

fn sym(p: &ParamSet) -> Sym {
    Sym {
        a: p.a.clone(),
        b: p.b.clone(),
        c: p.c.clone(),
        d: p.d.clone(),
        s1: &p.a + &p.b,
        s2: &p.a * &p.b,
        t1: &p.c + &p.d,
        t2: &p.c * &p.d,
    }
}

fn check_family(id: &str, p: &ParamSet) -> Result<()> {
    let (family, _, _) = example_setup(id)?;
    if family != p.family {
        return Err(Error::UnknownExample(format!("{id} for family {}", p.family)));
    }
    Ok(())
}

/// η·(k2 η² + k1 η + k0).
fn cubic(k2: Scalar, k1: Scalar, k0: Scalar) -> Poly {
    Poly::new(vec![Scalar::zero(), k0, k1, k2])
}

/// X(η) for the named example, in its published normalization.
pub fn closed_form_x(id: &str, p: &ParamSet) -> Result<Poly> {
    check_family(id, p)?;
    let Sym { a, b, c, d, s1, s2, t1, t2 } = sym(p);
    let i = int;
    let x = match id.replace('η', "eta").as_str() {
        "R:{1}/1" => {
            let k1 = i(2) - &s1 + &t1;
            let k0 = -(&s1 * (i(2) * &c + &d + i(2) * &t2)) + i(2) * &s2 * &c + i(2) * &t1 + &t2 * (i(5) + i(2) * &d) + &d * &d;
            Poly::new(vec![Scalar::zero(), -k0, -k1])
        }
        "R:{2}/1" => {
            let u = &s1 - &t1;
            let k2 = (&u - i(4)) * (&u - i(3));
            let k1 = -(&u - i(3))
                * (i(3) * (one() + &c) * (&d - &a) * (&d - &b) + i(2) * (i(5) + i(6) * &c) * &d
                    - i(2) * &s1 * (i(2) + i(3) * &c)
                    + i(4)
                    + i(10) * &c);
            let c2 = &c * &c;
            let k0 = (i(3) * &c2 + i(6) * &c + i(2)) * &d * &d * pow_i(&(&d - &s1), 2)
                + (i(12) + i(40) * &c + i(21) * &c2) * pow_i(&d, 3)
                + (i(22) + i(88) * &c + i(50) * &c2 - &s1 * (i(16) + i(55) * &c + i(30) * &c2)
                    + &s2 * (i(3) + i(9) * &c + i(6) * &c2))
                    * &d
                    * &d
                + (i(12) + i(70) * &c + i(46) * &c2 - &s1 * (i(16) + i(71) * &c + i(45) * &c2)
                    + &s1 * &s1 * (i(4) + i(15) * &c + i(9) * &c2)
                    + i(3) * &s2 * (i(3) + i(10) * &c + i(7) * &c2)
                    - i(3) * &s1 * &s2 * (one() + &c) * (one() + i(2) * &c))
                    * &d
                + i(3) * (&a - i(2)) * (&a - i(1)) * (&b - i(2)) * (&b - i(1)) * &c * (&c + i(1));
            cubic(k2, k1, k0)
        }
        "R:{1,2}/1" => {
            let u = &s1 - &t1;
            let k2 = (&u - i(3)) * (&u - i(2));
            let k1 = -(&u - i(3))
                * (i(3) * (one() + &c) * &d * (&d - &s1) + (i(7) + i(9) * &c) * &d + i(2) + i(4) * &c
                    - &s1
                    - i(3) * &c * (&s1 - &s2));
            let c2 = &c * &c;
            let k0 = (i(2) + i(6) * &c + i(3) * &c2) * &d * &d * pow_i(&(&d - &s1), 2)
                + (i(12) + i(40) * &c + i(21) * &c2) * pow_i(&d, 3)
                + (i(22) + i(89) * &c + i(50) * &c2 - &s1 * (i(14) + i(55) * &c + i(30) * &c2)
                    + i(3) * &s2 * &c * (i(3) + i(2) * &c))
                    * &d
                    * &d
                + (i(12) + i(76) * &c + i(47) * &c2 - &s1 * (i(10) + i(73) * &c + i(45) * &c2)
                    + &s1 * &s1 * (i(2) + i(15) * &c + i(9) * &c2)
                    - i(3) * &s1 * &s2 * &c * (i(3) + i(2) * &c)
                    + i(3) * &s2 * &c * (i(10) + i(7) * &c))
                    * &d
                - i(3) * (&s1 - &s2 - i(1)) * &c * (i(7) + i(5) * &c - &s1 * (i(3) + i(2) * &c) + &s2 * (one() + &c));
            cubic(k2, k1, k0)
        }
        "R:{1}/eta" => {
            let k2 = i(2) * (&t1 - &s1 + i(2));
            let tail = i(-2) + i(2) * &c + &s1 + i(3) * &c * (&s2 - &s1);
            let k1 = i(3) * &d * (one() + &c) * (&d - &s1) + (i(5) + i(9) * &c) * &d + &tail;
            let k0 = &d * (&d * (one() + i(3) * &c) * (&d - &s1) + (one() + i(7) * &c) * &d + &tail);
            cubic(-k2, -k1, -k0)
        }
        "qR:{1}/1" => {
            let q = p.q();
            let k1 = one() - &t2 * q * q / &s2;
            let k0 = q * q * (one() + q - i(2) * &c * q) * &d * &d / &s2
                - (&s1 * q * (one() + q) * (one() - &c) + (one() - q) * (&s2 + &c * q * q)) * &d / &s2
                + i(2)
                - &c * (one() + q);
            Poly::new(vec![Scalar::zero(), -k0, -k1])
        }
        "qR:{2}/1" => {
            let q = p.q();
            let qk = |k: i64| pow_i(q, k);
            let q3 = one() + q + q * q;
            let cdq3 = &c * &d * qk(3);
            let k2 = (&s2 - &cdq3) * (&s2 - &c * &d * qk(4));
            let k1 = (&s2 - &cdq3)
                * (&q3 * (qk(3) * &d * &d - q * (one() - &c * q) * &s1 * &d - &c * &s2)
                    - i(3) * &c * qk(5) * &d * &d
                    - pow_i(&(one() - q), 2) * (&s2 - &c * qk(3)) * &d
                    + i(3) * &s2);
            let one_cq = one() - &c * q;
            let inner = qk(6) * (one() - i(2) * &c * q) * pow_i(&d, 4)
                - qk(3) * (q * &one_cq * (one() + q - i(2) * &c * q) * &s1 + (one() - q) * (&s2 + &c * qk(3))) * pow_i(&d, 3)
                + q * (qk(2) * (one() - &c) * &one_cq * &s1 * &s1
                    + (one() - q) * &one_cq * (&s2 + &c * qk(3)) * &s1
                    + q * (one() + q) * (one() + &c * &c * qk(2)) * &s2)
                    * &d
                    * &d
                - (q * &one_cq * (i(2) - (one() + q) * &c) * &s1 - (one() - q) * (&s2 + qk(3) * &c) * &c) * &s2 * &d
                - (i(2) - &c * q) * &c * &s2 * &s2;
            let k0 = &q3 * inner + i(3) * qk(9) * &c * &c * pow_i(&d, 4)
                + qk(4) * (one() - q) * ((i(2) + q) * &s2 + qk(2) * (one() + i(2) * qk(2)) * &c) * &c * pow_i(&d, 3)
                - q * (pow_i(&(one() - q), 2) * (&s2 * &s2 + qk(5) * &c * &c)
                    + q * (one() + q) * (one() + i(4) * qk(2) + qk(4)) * &c * &s2)
                    * &d
                    * &d
                - &s2 * (one() - q) * ((i(2) + qk(2)) * &s2 + qk(3) * (one() + i(2) * q) * &c) * &d
                + i(3) * &s2 * &s2;
            cubic(k2, k1, k0)
        }
        _ => return Err(Error::UnknownExample(id.to_string())),
    };
    Ok(x)
}

fn poch_many(xs: &[Scalar], n: usize) -> Scalar {
    xs.iter().fold(one(), |acc, x| acc * poch(x, n))
}

fn qpoch_many(xs: &[Scalar], q: &Scalar, n: usize) -> Scalar {
    xs.iter().fold(one(), |acc, x| acc * qpoch(x, q, n))
}

/// r_{n,k} in the published normalization. Only the two D={1}, Y=1 examples
/// have closed-form coefficients; r_{n,0} is minus the sum of the others.
pub fn closed_form_r(id: &str, p: &ParamSet, n: usize, k: i64) -> Result<Scalar> {
    check_family(id, p)?;
    let norm = id.replace('η', "eta");
    if norm != "R:{1}/1" && norm != "qR:{1}/1" {
        return Err(Error::UnknownExample(format!("{id} has no closed-form r")));
    }
    if k.abs() > 2 {
        return Ok(Scalar::zero());
    }
    if k == 0 {
        let mut acc = Scalar::zero();
        for kk in [-2, -1, 1, 2] {
            acc -= closed_form_r(id, p, n, kk)?;
        }
        return Ok(acc);
    }
    let Sym { a, b, c, d, s1, s2, t1, t2 } = sym(p);
    let dt = p.dtilde();
    let i = int;
    let ns = i(n as i64);
    let r = match p.family {
        Family::R => {
            let g = i(2) - &s1 + &t1;
            match k {
                2 => -&g * (&c + &ns) * (&c + &ns + i(3)) * poch_many(&[&a + &ns, &b + &ns, &dt + &ns], 2)
                    / poch(&(&dt + i(2) * &ns), 4),
                -2 => -&g
                    * (&dt - &c + &ns - i(3))
                    * (&dt - &c + &ns)
                    * poch_many(&[&dt - &a + &ns - i(1), &dt - &b + &ns - i(1), &ns - i(1)], 2)
                    / poch(&(&dt + i(2) * &ns - i(3)), 4),
                1 => {
                    let pre = i(-2) * (&a + &ns) * (&b + &ns) * (&c + &ns) * (&c + &ns + i(2)) * (&dt - &c + &ns) * (&dt + &ns)
                        / ((&dt + i(2) * &ns + i(3)) * poch(&(&dt + i(2) * &ns - i(1)), 3));
                    pre * (i(-2) * &g * &ns * (&ns + &dt + i(1))
                        + i(2) * (one() - &dt) * (one() + &c - &s2)
                        + &d * (one() - &dt * &dt))
                }
                _ => {
                    let pre = i(-2) * &ns * (&dt - &a + &ns) * (&dt - &b + &ns) * (&c + &ns) * (&dt - &c + &ns - i(2)) * (&dt - &c + &ns)
                        / ((&dt + i(2) * &ns - i(3)) * poch(&(&dt + i(2) * &ns - i(1)), 3));
                    pre * (i(-2) * &g * &ns * (&ns + &dt - i(1))
                        + i(2) * (one() + &c - &s2)
                        + i(2) * (&s2 + &c - &dt) * &dt
                        + &d * (one() - &dt * &dt))
                }
            }
        }
        Family::QR => {
            let q = p.q();
            let qk = |e: i64| pow_i(q, e);
            let nn = n as i64;
            let g = one() - &t2 * q * q / &s2;
            let e1 = &s2 * &t1 + &s1 * (one() - &c) * &d * q - &t1 * &d * q * q;
            let e2 = &s1 * &s2 * &c + &s2 * (one() - &c) * &t1 * q - &s1 * &t2 * q * q;
            let qq = q + q.recip();
            match k {
                2 => -&g * (one() - &c * qk(nn)) * (one() - &c * qk(nn + 3))
                    * qpoch_many(&[&a * qk(nn), &b * qk(nn), &dt * qk(nn)], q, 2)
                    / qpoch(&(&dt * qk(2 * nn)), q, 4),
                -2 => -&d * &d * q * q * &g
                    * (one() - &dt * qk(nn - 3) / &c)
                    * (one() - &dt * qk(nn) / &c)
                    * qpoch_many(&[&dt * qk(nn - 1) / &a, &dt * qk(nn - 1) / &b, qk(nn - 1)], q, 2)
                    / qpoch(&(&dt * qk(2 * nn - 3)), q, 4),
                1 => {
                    let pre = -(one() + q)
                        * (one() - &a * qk(nn))
                        * (one() - &b * qk(nn))
                        * (one() - &c * qk(nn))
                        * (one() - &c * qk(nn + 2))
                        * (one() - &dt * qk(nn) / &c)
                        * (one() - &dt * qk(nn))
                        / (&s2 * &d * (one() - &dt * qk(2 * nn + 3)) * qpoch(&(&dt * qk(2 * nn - 1)), q, 3));
                    pre * (-&e1 * (&s2 * &c * qk(2 * nn) + &d) + &qq * &d * &e2 * qk(nn))
                }
                _ => {
                    let pre = -(one() + q)
                        * (one() - qk(nn))
                        * (one() - &dt * qk(nn) / &a)
                        * (one() - &dt * qk(nn) / &b)
                        * (one() - &c * qk(nn))
                        * (one() - &dt * qk(nn - 2) / &c)
                        * (one() - &dt * qk(nn) / &c)
                        / (&s2 * (one() - &dt * qk(2 * nn - 3)) * qpoch(&(&dt * qk(2 * nn - 1)), q, 3));
                    pre * (-&e1 * (&s2 * &c * qk(2 * nn - 1) + &d * q) + &qq * &d * &e2 * qk(nn))
                }
            }
        }
    };
    Ok(r)
}

/// The positive constant s with `built = s · closed`, fixed by the η¹
/// coefficient and then checked on every coefficient.
pub fn match_scale(built: &Poly, closed: &Poly) -> Result<Scalar> {
    let c1 = closed.coeff(1);
    if c1.is_zero() {
        return Err(Error::CrossCheckMismatch("closed form has no eta^1 term to normalize by".into()));
    }
    let s = built.coeff(1) / c1;
    if !s.is_positive() {
        return Err(Error::CrossCheckMismatch("normalization constant is not positive".into()));
    }
    Ok(s)
}

/// Compares the constructed X (and r, where a closed form exists) with the
/// published closed forms.
pub fn compare_example(id: &str, p: &ParamSet, xp: &XPoly, t: &RecTable) -> Result<CheckReport> {
    let closed = closed_form_x(id, p)?;
    let mut rep = CheckReport::new(format!("closed form {id}"));
    let s = match match_scale(&xp.poly, &closed) {
        Ok(s) => s,
        Err(e) => {
            rep.holds("normalization", false, || e.to_string());
            return Ok(rep);
        }
    };
    let top = xp.poly.degree().max(closed.degree()).unwrap_or(0);
    for j in 0..=top {
        rep.exact(format!("coefficient of eta^{j}"), &(xp.poly.coeff(j) - &s * closed.coeff(j)));
    }
    let norm = id.replace('η', "eta");
    if norm == "R:{1}/1" || norm == "qR:{1}/1" {
        for n in 0..=t.n_max {
            for k in t.band(n) {
                rep.exact(format!("r(n={n},k={k})"), &(t.get(n, k) - &s * closed_form_r(id, p, n, k)?));
            }
        }
    }
    Ok(rep.with_note(format!("scale {}", crate::exact::fmt_scalar(&s))))
}
