//! Square matrices over the rationals with fraction-free elimination.
//!
//! Determinants and solves clear each row to integers and then run Bareiss
//! elimination over `BigInt`, so every intermediate value is an exact minor.

use std::ops::{Add, Index, IndexMut, Mul, Sub};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exact::{fmt_scalar, one, zero, Scalar};

#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Matrix {
    order: usize,
    data: Vec<Scalar>,
}

impl Matrix {
    pub fn zeros(order: usize) -> Self {
        Matrix {
            order,
            data: vec![zero(); order * order],
        }
    }

    pub fn identity(order: usize) -> Self {
        Matrix::diag(&vec![one(); order])
    }

    pub fn diag(d: &[Scalar]) -> Self {
        let mut m = Matrix::zeros(d.len());
        for (i, v) in d.iter().enumerate() {
            m[(i, i)] = v.clone();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<Scalar>>) -> Result<Self> {
        let order = rows.len();
        if rows.iter().any(|r| r.len() != order) {
            return Err(Error::ShapeMismatch("rows of unequal length".into()));
        }
        Ok(Matrix {
            order,
            data: rows.into_iter().flatten().collect(),
        })
    }

    pub fn from_fn(order: usize, mut f: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut data = Vec::with_capacity(order * order);
        for i in 0..order {
            for j in 0..order {
                data.push(f(i, j));
            }
        }
        Matrix { order, data }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn row(&self, i: usize) -> &[Scalar] {
        &self.data[i * self.order..(i + 1) * self.order]
    }

    pub fn column(&self, j: usize) -> Vec<Scalar> {
        (0..self.order).map(|i| self[(i, j)].clone()).collect()
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.order, |i, j| self[(j, i)].clone())
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|v| v.is_zero())
    }

    pub fn scale(&self, s: &Scalar) -> Matrix {
        Matrix {
            order: self.order,
            data: self.data.iter().map(|v| v * s).collect(),
        }
    }

    pub fn mul_vec(&self, v: &[Scalar]) -> Vec<Scalar> {
        (0..self.order)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(v)
                    .fold(zero(), |acc, (a, b)| acc + a * b)
            })
            .collect()
    }

    /// `self·other − other·self`.
    pub fn commutator(&self, other: &Matrix) -> Matrix {
        &(self * other) - &(other * self)
    }

    /// Nonzero entries as `(row, col, value)`.
    pub fn nonzero_entries(&self) -> Vec<(usize, usize, Scalar)> {
        let mut out = Vec::new();
        for i in 0..self.order {
            for j in 0..self.order {
                if !self[(i, j)].is_zero() {
                    out.push((i, j, self[(i, j)].clone()));
                }
            }
        }
        out
    }

    pub fn to_strings(&self) -> Vec<Vec<String>> {
        (0..self.order)
            .map(|i| self.row(i).iter().map(fmt_scalar).collect())
            .collect()
    }

    /// Exact determinant.
    pub fn det(&self) -> Scalar {
        if self.order == 0 {
            return one();
        }
        let (mut rows, scale) = integer_rows(&self.data, self.order, self.order);
        match bareiss(&mut rows, self.order, self.order) {
            Some(sign) => {
                let d = rows[self.order - 1][self.order - 1].clone() * BigInt::from(sign);
                Scalar::new(d, scale)
            }
            None => zero(),
        }
    }

    /// Solves `self · x = b` exactly.
    pub fn solve(&self, b: &[Scalar]) -> Result<Vec<Scalar>> {
        if b.len() != self.order {
            return Err(Error::ShapeMismatch(format!(
                "matrix of order {} with right-hand side of length {}",
                self.order,
                b.len()
            )));
        }
        let cols = vec![b.to_vec()];
        Ok(self.solve_many(&cols)?.pop().unwrap())
    }

    /// Solves for several right-hand sides at once; each entry of `rhs` is a column.
    pub fn solve_many(&self, rhs: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
        let n = self.order;
        let m = rhs.len();
        if rhs.iter().any(|c| c.len() != n) {
            return Err(Error::ShapeMismatch("right-hand side length".into()));
        }
        if n == 0 {
            return Ok(vec![Vec::new(); m]);
        }
        let width = n + m;
        let mut aug = Vec::with_capacity(n * width);
        for i in 0..n {
            aug.extend_from_slice(self.row(i));
            for c in rhs {
                aug.push(c[i].clone());
            }
        }
        let (mut rows, _) = integer_rows(&aug, n, width);
        if bareiss(&mut rows, n, width).is_none() {
            return Err(Error::SingularMatrix);
        }
        // rows is upper triangular in the first n columns with integer entries.
        let mut sols = vec![vec![zero(); n]; m];
        for (c, sol) in sols.iter_mut().enumerate() {
            for i in (0..n).rev() {
                let mut acc = Scalar::from_integer(rows[i][n + c].clone());
                for j in i + 1..n {
                    acc -= Scalar::from_integer(rows[i][j].clone()) * &sol[j];
                }
                sol[i] = acc / Scalar::from_integer(rows[i][i].clone());
            }
        }
        Ok(sols)
    }

    pub fn inverse(&self) -> Result<Matrix> {
        let n = self.order;
        let cols: Vec<Vec<Scalar>> = (0..n)
            .map(|j| (0..n).map(|i| if i == j { one() } else { zero() }).collect())
            .collect();
        let sols = self.solve_many(&cols)?;
        Ok(Matrix::from_fn(n, |i, j| sols[j][i].clone()))
    }

    /// `p(self)` by Horner's scheme.
    pub fn poly_eval(&self, p: &crate::poly::Poly) -> Matrix {
        let mut acc = Matrix::zeros(self.order);
        for c in p.coeffs().iter().rev() {
            acc = &(&acc * self) + &Matrix::identity(self.order).scale(c);
        }
        acc
    }
}

/// Scales every row to integer entries. Returns the rows and the product of
/// the row scale factors (the determinant of the scaling).
fn integer_rows(data: &[Scalar], nrows: usize, width: usize) -> (Vec<Vec<BigInt>>, BigInt) {
    let mut total = BigInt::one();
    let mut rows = Vec::with_capacity(nrows);
    for i in 0..nrows {
        let row = &data[i * width..(i + 1) * width];
        let l = row
            .iter()
            .fold(BigInt::one(), |acc, v| acc.lcm(v.denom()));
        rows.push(
            row.iter()
                .map(|v| v.numer() * (&l / v.denom()))
                .collect::<Vec<BigInt>>(),
        );
        total *= l;
    }
    (rows, total)
}

/// In-place Bareiss elimination over the first `n` columns of an `n × width`
/// integer matrix, with row pivoting. Returns the permutation sign, or `None`
/// when a pivot column is entirely zero.
fn bareiss(rows: &mut [Vec<BigInt>], n: usize, width: usize) -> Option<i64> {
    let mut sign = 1i64;
    let mut prev = BigInt::one();
    for k in 0..n {
        if rows[k][k].is_zero() {
            let p = (k + 1..n).find(|&i| !rows[i][k].is_zero())?;
            rows.swap(k, p);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..width {
                let v = &rows[i][j] * &rows[k][k] - &rows[i][k] * &rows[k][j];
                rows[i][j] = v / &prev;
            }
            rows[i][k] = BigInt::zero();
        }
        prev = rows[k][k].clone();
    }
    Some(sign)
}

impl Index<(usize, usize)> for Matrix {
    type Output = Scalar;
    fn index(&self, (i, j): (usize, usize)) -> &Scalar {
        &self.data[i * self.order + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Scalar {
        &mut self.data[i * self.order + j]
    }
}

impl Mul for &Matrix {
    type Output = Matrix;
    fn mul(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.order, rhs.order, "matrix order mismatch");
        let n = self.order;
        let mut out = Matrix::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..n {
                    let b = &rhs[(k, j)];
                    if !b.is_zero() {
                        out[(i, j)] += a * b;
                    }
                }
            }
        }
        out
    }
}

impl Add for &Matrix {
    type Output = Matrix;
    fn add(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.order, rhs.order, "matrix order mismatch");
        Matrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a + b).collect(),
        }
    }
}

impl Sub for &Matrix {
    type Output = Matrix;
    fn sub(self, rhs: &Matrix) -> Matrix {
        assert_eq!(self.order, rhs.order, "matrix order mismatch");
        Matrix {
            order: self.order,
            data: self.data.iter().zip(&rhs.data).map(|(a, b)| a - b).collect(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use crate::exact::{int, ratio};

    fn m(rows: &[&[i64]]) -> Matrix {
        Matrix::from_rows(rows.iter().map(|r| r.iter().map(|&v| int(v)).collect()).collect())
            .unwrap()
    }

    #[test]
    fn solve_identity() {
        let b = vec![ratio(1, 2), int(0), int(-3)];
        assert_eq!(Matrix::identity(3).solve(&b).unwrap(), b);
    }

    #[test]
    fn solve_two_by_two() {
        // x + y = 0, x + 2y = 1  =>  y = 1, x = -1
        let a = m(&[&[1, 1], &[1, 2]]);
        assert_eq!(a.solve(&[int(0), int(1)]).unwrap(), vec![int(-1), int(1)]);
    }

    #[test]
    fn solve_singular() {
        let a = m(&[&[1, 1], &[2, 2]]);
        assert_eq!(a.solve(&[int(0), int(1)]), Err(Error::SingularMatrix));
    }

    #[test]
    fn determinants() {
        assert_eq!(Matrix::identity(4).det(), int(1));
        assert_eq!(m(&[&[0, 1], &[1, 0]]).det(), int(-1));
        // cofactor expansion: 1·4 − 2·3
        assert_eq!(m(&[&[1, 2], &[3, 4]]).det(), int(-2));
        assert_eq!(Matrix::zeros(0).det(), int(1));
        assert_eq!(m(&[&[1, 1], &[2, 2]]).det(), int(0));
    }

    #[test]
    fn rational_entries() {
        let a = Matrix::from_rows(vec![
            vec![ratio(1, 2), ratio(1, 3)],
            vec![ratio(1, 4), ratio(1, 5)],
        ])
        .unwrap();
        // 1/10 − 1/12 = 1/60
        assert_eq!(a.det(), ratio(1, 60));
        let inv = a.inverse().unwrap();
        assert_eq!(&a * &inv, Matrix::identity(2));
    }

    #[test]
    fn pivoting_needed() {
        let a = m(&[&[0, 0, 1], &[0, 2, 0], &[3, 0, 0]]);
        assert_eq!(a.det(), int(-6));
        let x = a.solve(&[int(1), int(2), int(3)]).unwrap();
        assert_eq!(x, vec![int(1), int(1), int(1)]);
    }

    fn arb_matrix(order: usize) -> impl Strategy<Value = Matrix> {
        proptest::collection::vec((-6i64..7, 1i64..4), order * order)
            .prop_map(move |v| Matrix::from_fn(order, |i, j| ratio(v[i * order + j].0, v[i * order + j].1)))
    }

    proptest! {
        #[test]
        fn det_is_multiplicative(a in arb_matrix(3), b in arb_matrix(3)) {
            prop_assert_eq!((&a * &b).det(), a.det() * b.det());
        }

        #[test]
        fn solve_inverts_multiplication(a in arb_matrix(4), x in proptest::collection::vec(-9i64..10, 4)) {
            let x: Vec<Scalar> = x.into_iter().map(int).collect();
            match a.solve(&a.mul_vec(&x)) {
                Ok(got) => prop_assert_eq!(got, x),
                Err(_) => prop_assert_eq!(a.det(), Scalar::from_integer(0.into())),
            }
        }
    }
}
