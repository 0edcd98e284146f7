//! Exact integer matrices: characteristic polynomials, determinants and
//! rational solves.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use super::poly::IntPolynomial;
use crate::error::{Error, Result};

pub type IntVector = Vec<i64>;

/// Commutative ring operations needed by the division-free algorithms.
pub trait Ring:
    Clone + Zero + One + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self>
{
}

impl<T> Ring for T where T: Clone + Zero + One + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T> {}

/// Dense row-major integer matrix.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<i64>,
}

impl IntMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<i64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Ok(IntMatrix { rows, cols, entries })
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|row| row.len() != c) {
            return Err(Error::Dimension("ragged rows".into()));
        }
        Self::new(r, c, rows.concat())
    }

    pub fn identity(n: usize) -> Self {
        Self::diag(&vec![1; n])
    }

    pub fn diag(d: &[i64]) -> Self {
        let n = d.len();
        let mut e = vec![0; n * n];
        for (i, v) in d.iter().enumerate() {
            e[i * n + i] = *v;
        }
        IntMatrix {
            rows: n,
            cols: n,
            entries: e,
        }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[i64] {
        &self.entries
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.cols + j]
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn is_symmetric(&self) -> bool {
        self.is_square() && (0..self.rows).all(|i| (0..i).all(|j| self.get(i, j) == self.get(j, i)))
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut e = Vec::with_capacity(self.entries.len());
        for j in 0..self.cols {
            for i in 0..self.rows {
                e.push(self.get(i, j));
            }
        }
        IntMatrix {
            rows: self.cols,
            cols: self.rows,
            entries: e,
        }
    }

    /// max |a_ij|, 0 for the empty or zero matrix.
    pub fn max_abs(&self) -> u64 {
        self.entries.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.rows).all(|i| (0..self.cols).all(|j| i == j || self.get(i, j) == 0))
    }

    pub fn scale(&self, c: i64) -> Result<IntMatrix> {
        let e = self
            .entries
            .iter()
            .map(|v| v.checked_mul(c).ok_or_else(|| Error::Domain("entry overflow".into())))
            .collect::<Result<Vec<_>>>()?;
        Ok(IntMatrix { entries: e, ..*self })
    }

    fn square_check(&self, what: &str) -> Result<usize> {
        if !self.is_square() {
            return Err(Error::Dimension(format!(
                "{what} needs a square matrix, got {}x{}",
                self.rows, self.cols
            )));
        }
        Ok(self.rows)
    }

    pub fn to_ring<T: Ring + From<i64>>(&self) -> Vec<Vec<T>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| T::from(self.get(i, j))).collect())
            .collect()
    }

    pub fn to_bigint(&self) -> Vec<Vec<BigInt>> {
        self.to_ring()
    }

    /// Exact Gram matrix AᵀA.
    pub fn gram(&self) -> Vec<Vec<BigInt>> {
        let a = self.to_bigint();
        let n = self.cols;
        let mut g = vec![vec![BigInt::zero(); n]; n];
        for i in 0..n {
            for j in i..n {
                let s: BigInt = (0..self.rows).map(|k| &a[k][i] * &a[k][j]).sum();
                g[i][j] = s.clone();
                g[j][i] = s;
            }
        }
        g
    }

    /// Aᵀb exactly.
    pub fn transpose_mul_vec(&self, b: &[i64]) -> Result<Vec<BigInt>> {
        if b.len() != self.rows {
            return Err(Error::Dimension(format!(
                "vector of length {} against {} rows",
                b.len(),
                self.rows
            )));
        }
        Ok((0..self.cols)
            .map(|j| (0..self.rows).map(|i| BigInt::from(self.get(i, j)) * b[i]).sum())
            .collect())
    }

    /// det(A − tI) with exact coefficients.
    pub fn char_poly(&self) -> Result<IntPolynomial> {
        self.square_check("char_poly")?;
        Ok(char_poly_of(&self.to_bigint()))
    }

    pub fn det(&self) -> Result<BigInt> {
        self.square_check("det")?;
        Ok(det_bareiss(self.to_bigint()))
    }

    /// Exact rational solution of Ax = b.
    pub fn exact_solve(&self, b: &[i64]) -> Result<Vec<BigRational>> {
        let n = self.square_check("exact_solve")?;
        if b.len() != n {
            return Err(Error::Dimension(format!(
                "right-hand side has length {}, expected {n}",
                b.len()
            )));
        }
        let a: Vec<Vec<BigRational>> = (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| BigRational::from_integer(self.get(i, j).into()))
                    .collect()
            })
            .collect();
        let rhs: Vec<BigRational> = b.iter().map(|v| BigRational::from_integer((*v).into())).collect();
        solve_rational(a, rhs)
    }

    /// Exact inverse over the rationals.
    pub fn inverse(&self) -> Result<Vec<Vec<BigRational>>> {
        let n = self.square_check("inverse")?;
        let mut cols = Vec::with_capacity(n);
        for j in 0..n {
            let mut e = vec![0; n];
            e[j] = 1;
            cols.push(self.exact_solve(&e)?);
        }
        Ok((0..n).map(|i| (0..n).map(|j| cols[j][i].clone()).collect()).collect())
    }

    /// Leading principal minors, 1×1 up to n×n.
    pub fn leading_minors(&self) -> Result<Vec<BigInt>> {
        let n = self.square_check("leading_minors")?;
        let a = self.to_bigint();
        Ok((1..=n)
            .map(|k| det_bareiss(a[..k].iter().map(|r| r[..k].to_vec()).collect()))
            .collect())
    }

    /// Exact positive-definiteness test for symmetric matrices (Sylvester).
    pub fn is_positive_definite(&self) -> Result<bool> {
        Ok(self.is_symmetric() && self.leading_minors()?.iter().all(|m| m.is_positive()))
    }
}

impl fmt::Display for IntMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.rows {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "[")?;
            for j in 0..self.cols {
                if j > 0 {
                    write!(f, ",")?;
                }
                write!(f, "{}", self.get(i, j))?;
            }
            write!(f, "]")?;
        }
        write!(f, "]")
    }
}

/// Coefficients of det(tI − A), highest degree first, by Berkowitz's
/// division-free algorithm.
pub fn berkowitz<T: Ring>(a: &[Vec<T>]) -> Vec<T> {
    let n = a.len();
    if n == 0 {
        return vec![T::one()];
    }
    let mut poly = vec![T::one(), -a[0][0].clone()];
    for r in 2..=n {
        let k = r - 1;
        // row and column bordering the leading k×k block
        let row: Vec<T> = (0..k).map(|j| -a[k][j].clone()).collect();
        let mut col: Vec<T> = (0..k).map(|i| a[i][k].clone()).collect();
        let mut toeplitz = Vec::with_capacity(r + 1);
        toeplitz.push(T::one());
        toeplitz.push(-a[k][k].clone());
        for step in 0..k {
            let dot = row
                .iter()
                .zip(&col)
                .fold(T::zero(), |acc, (x, y)| acc + x.clone() * y.clone());
            toeplitz.push(dot);
            if step + 1 < k {
                col = (0..k)
                    .map(|i| (0..k).fold(T::zero(), |acc, j| acc + a[i][j].clone() * col[j].clone()))
                    .collect();
            }
        }
        // (r+1)×r lower-triangular Toeplitz matrix times the previous poly
        let mut next = vec![T::zero(); r + 1];
        for (i, out) in next.iter_mut().enumerate() {
            for (j, pj) in poly.iter().enumerate() {
                if i >= j {
                    *out = out.clone() + toeplitz[i - j].clone() * pj.clone();
                }
            }
        }
        poly = next;
    }
    poly
}

/// det(A − tI) of an exact square matrix, ascending coefficients.
pub fn char_poly_of(a: &[Vec<BigInt>]) -> IntPolynomial {
    let n = a.len();
    let desc = berkowitz(a);
    let sign_flip = n % 2 == 1;
    let asc: Vec<BigInt> = desc.into_iter().rev().map(|c| if sign_flip { -c } else { c }).collect();
    IntPolynomial::new(asc)
}

/// Fraction-free Gaussian elimination; exact for any integral domain with
/// exact division.
pub fn det_bareiss<T>(mut a: Vec<Vec<T>>) -> T
where
    T: Ring + Div<Output = T> + PartialEq,
{
    let n = a.len();
    if n == 0 {
        return T::one();
    }
    let mut sign_neg = false;
    let mut prev = T::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&i| !a[i][k].is_zero()) {
                Some(i) => {
                    a.swap(k, i);
                    sign_neg = !sign_neg;
                }
                None => return T::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = a[i][j].clone() * a[k][k].clone() - a[i][k].clone() * a[k][j].clone();
                a[i][j] = v / prev.clone();
            }
        }
        prev = a[k][k].clone();
    }
    let d = a[n - 1][n - 1].clone();
    if sign_neg {
        -d
    } else {
        d
    }
}

/// Gauss–Jordan over the rationals.
pub fn solve_rational(mut a: Vec<Vec<BigRational>>, mut b: Vec<BigRational>) -> Result<Vec<BigRational>> {
    let n = a.len();
    for k in 0..n {
        let piv = (k..n)
            .find(|&i| !a[i][k].is_zero())
            .ok_or_else(|| Error::Degenerate("singular matrix".into()))?;
        a.swap(k, piv);
        b.swap(k, piv);
        let inv = a[k][k].recip();
        for j in k..n {
            a[k][j] = &a[k][j] * &inv;
        }
        b[k] = &b[k] * &inv;
        for i in 0..n {
            if i != k && !a[i][k].is_zero() {
                let f = a[i][k].clone();
                for j in k..n {
                    let t = &f * &a[k][j];
                    a[i][j] -= t;
                }
                let t = &f * &b[k];
                b[i] -= t;
            }
        }
    }
    Ok(b)
}

/// Exact product of square BigInt matrices.
pub fn mat_mul(a: &[Vec<BigInt>], b: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let n = a.len();
    let m = b.first().map_or(0, Vec::len);
    (0..n)
        .map(|i| {
            (0..m)
                .map(|j| (0..b.len()).map(|k| &a[i][k] * &b[k][j]).sum())
                .collect()
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn laplace(a: &[Vec<BigInt>]) -> BigInt {
        let n = a.len();
        if n == 0 {
            return BigInt::one();
        }
        (0..n)
            .map(|j| {
                let minor: Vec<Vec<BigInt>> = a[1..]
                    .iter()
                    .map(|r| {
                        r.iter()
                            .enumerate()
                            .filter(|(c, _)| *c != j)
                            .map(|(_, v)| v.clone())
                            .collect()
                    })
                    .collect();
                let t = &a[0][j] * laplace(&minor);
                if j % 2 == 0 {
                    t
                } else {
                    -t
                }
            })
            .sum()
    }

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    fn coeffs(p: &IntPolynomial) -> Vec<i64> {
        p.coeffs().iter().map(|c| i64::try_from(c).unwrap()).collect()
    }

    #[test]
    fn char_poly_examples() {
        assert_eq!(coeffs(&IntMatrix::identity(2).char_poly().unwrap()), vec![1, -2, 1]);
        assert_eq!(coeffs(&m(&[&[0, 1], &[1, 0]]).char_poly().unwrap()), vec![-1, 0, 1]);
        assert_eq!(coeffs(&m(&[&[2]]).char_poly().unwrap()), vec![2, -1]);
        assert!(matches!(m(&[&[1, 2]]).char_poly(), Err(Error::Dimension(_))));
    }

    #[test]
    fn char_poly_matches_cofactor_expansion_on_all_2x2() {
        for code in 0..5i64.pow(4) {
            let e: Vec<i64> = (0..4).map(|k| (code / 5i64.pow(k)) % 5 - 2).collect();
            let a = IntMatrix::new(2, 2, e).unwrap();
            let p = a.char_poly().unwrap();
            for t in -3..=3i64 {
                let shifted: Vec<Vec<BigInt>> = (0..2)
                    .map(|i| {
                        (0..2)
                            .map(|j| BigInt::from(a.get(i, j) - if i == j { t } else { 0 }))
                            .collect()
                    })
                    .collect();
                assert_eq!(p.eval(&BigInt::from(t)), laplace(&shifted), "{a}");
            }
        }
    }

    proptest! {
        #[test]
        fn char_poly_matches_cofactor_expansion(n in 3usize..=4, e in prop::collection::vec(-2i64..=2, 16), t in -4i64..=4) {
            let a = IntMatrix::new(n, n, e[..n * n].to_vec()).unwrap();
            let p = a.char_poly().unwrap();
            let shifted: Vec<Vec<BigInt>> = (0..n)
                .map(|i| (0..n).map(|j| BigInt::from(a.get(i, j) - if i == j { t } else { 0 })).collect())
                .collect();
            prop_assert_eq!(p.eval(&BigInt::from(t)), laplace(&shifted));
            prop_assert_eq!(a.det().unwrap(), laplace(&a.to_bigint()));
            prop_assert_eq!(det_bareiss(a.to_ring::<i128>()), i128::try_from(laplace(&a.to_bigint())).unwrap());
        }

        #[test]
        fn exact_solve_substitutes_back(e in prop::collection::vec(-3i64..=3, 9), b in prop::collection::vec(-3i64..=3, 3)) {
            let a = IntMatrix::new(3, 3, e).unwrap();
            match a.exact_solve(&b) {
                Ok(x) => {
                    for i in 0..3 {
                        let s: BigRational = (0..3).map(|j| BigRational::from_integer(a.get(i, j).into()) * &x[j]).sum();
                        prop_assert_eq!(s, BigRational::from_integer(b[i].into()));
                    }
                }
                Err(Error::Degenerate(_)) => prop_assert!(a.det().unwrap().is_zero()),
                Err(e) => prop_assert!(false, "{e}"),
            }
        }
    }

    #[test]
    fn exact_solve_examples() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(
            IntMatrix::identity(2).exact_solve(&[3, 4]).unwrap(),
            vec![r(3, 1), r(4, 1)]
        );
        assert_eq!(
            m(&[&[1, 1], &[0, 1]]).exact_solve(&[2, 1]).unwrap(),
            vec![r(1, 1), r(1, 1)]
        );
        assert_eq!(
            m(&[&[2, 0], &[0, 2]]).exact_solve(&[1, 1]).unwrap(),
            vec![r(1, 2), r(1, 2)]
        );
        assert!(matches!(
            m(&[&[1, 2], &[2, 4]]).exact_solve(&[1, 1]),
            Err(Error::Degenerate(_))
        ));
    }

    #[test]
    fn positive_definiteness_by_minors() {
        assert!(m(&[&[2, 1], &[1, 2]]).is_positive_definite().unwrap());
        assert!(!m(&[&[1, 2], &[2, 1]]).is_positive_definite().unwrap());
        assert!(!m(&[&[1, 1], &[1, 1]]).is_positive_definite().unwrap());
    }

    #[test]
    fn inverse_times_matrix_is_identity() {
        let a = m(&[&[2, 1, 0], &[1, 3, 1], &[0, 1, 4]]);
        let inv = a.inverse().unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let s: BigRational = (0..3)
                    .map(|k| BigRational::from_integer(a.get(i, k).into()) * &inv[k][j])
                    .sum();
                assert_eq!(s, BigRational::from_integer(BigInt::from((i == j) as i64)));
            }
        }
    }
}
