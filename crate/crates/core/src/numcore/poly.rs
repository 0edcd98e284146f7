//! Exact integer univariate polynomials: arithmetic, gcd and squarefree
//! factorization over the rationals, and Sturm counting of positive roots.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};

/// Integer polynomial with ascending coefficients; `coeffs[i]` multiplies xⁱ.
/// Trailing zeros are trimmed, so the zero polynomial has no coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct IntPolynomial {
    coeffs: Vec<BigInt>,
}

impl IntPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPolynomial { coeffs }
    }

    pub fn from_i64(ascending: &[i64]) -> Self {
        Self::new(ascending.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// From coefficients listed highest degree first.
    pub fn from_descending(desc: &[i64]) -> Self {
        Self::new(desc.iter().rev().map(|&c| BigInt::from(c)).collect())
    }

    /// Parses "c_d,...,c_0" (highest degree first).
    pub fn parse_descending(s: &str) -> Result<Self> {
        let desc = s
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<BigInt>()
                    .map_err(|e| Error::Parse(format!("coefficient {t:?}: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        if desc.is_empty() {
            return Err(Error::Parse("empty coefficient list".into()));
        }
        Ok(Self::new(desc.into_iter().rev().collect()))
    }

    pub fn zero() -> Self {
        IntPolynomial { coeffs: Vec::new() }
    }

    pub fn monomial(c: BigInt, k: usize) -> Self {
        let mut v = vec![BigInt::zero(); k + 1];
        v[k] = c;
        Self::new(v)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> BigInt {
        self.coeffs.get(i).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; 0 for the zero polynomial.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.leading().is_one()
    }

    /// max |fᵢ|.
    pub fn max_abs(&self) -> BigInt {
        self.coeffs.iter().map(|c| c.abs()).max().unwrap_or_default()
    }

    /// Number of nonzero coefficients.
    pub fn support(&self) -> usize {
        self.coeffs.iter().filter(|c| !c.is_zero()).count()
    }

    /// Largest coefficient bit length.
    pub fn max_bits(&self) -> u64 {
        self.coeffs.iter().map(|c| c.bits()).max().unwrap_or(0)
    }

    /// Multiplicity of 0 as a root.
    pub fn zero_root_multiplicity(&self) -> usize {
        self.coeffs.iter().take_while(|c| c.is_zero()).count()
    }

    /// f(x) / x^k for the full multiplicity k of the zero root.
    pub fn strip_zero_roots(&self) -> IntPolynomial {
        IntPolynomial {
            coeffs: self.coeffs[self.zero_root_multiplicity().min(self.coeffs.len())..].to_vec(),
        }
    }

    pub fn eval(&self, x: &BigInt) -> BigInt {
        self.coeffs.iter().rev().fold(BigInt::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_rational(&self, x: &BigRational) -> BigRational {
        self.coeffs.iter().rev().fold(BigRational::zero(), |acc, c| {
            acc * x + BigRational::from_integer(c.clone())
        })
    }

    pub fn derivative(&self) -> IntPolynomial {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * BigInt::from(i))
                .collect(),
        )
    }

    pub fn add(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) + other.coeff(i)).collect())
    }

    pub fn sub(&self, other: &IntPolynomial) -> IntPolynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new((0..n).map(|i| self.coeff(i) - other.coeff(i)).collect())
    }

    pub fn mul(&self, other: &IntPolynomial) -> IntPolynomial {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        let mut out = vec![BigInt::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    pub fn scale(&self, c: &BigInt) -> IntPolynomial {
        Self::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn neg(&self) -> IntPolynomial {
        Self::new(self.coeffs.iter().map(|a| -a).collect())
    }

    /// gcd of the coefficients (nonnegative).
    pub fn content(&self) -> BigInt {
        self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c))
    }

    /// Divides out the content and makes the leading coefficient positive.
    pub fn primitive(&self) -> IntPolynomial {
        if self.is_zero() {
            return Self::zero();
        }
        let mut c = self.content();
        if self.leading().is_negative() {
            c = -c;
        }
        Self::new(self.coeffs.iter().map(|a| a / &c).collect())
    }

    /// Primitive gcd over ℚ, leading coefficient positive.
    pub fn gcd(&self, other: &IntPolynomial) -> IntPolynomial {
        let a = RatPoly::from_int(self);
        let b = RatPoly::from_int(other);
        a.gcd(&b).to_primitive()
    }

    /// True when f has no repeated complex root: deg gcd(f, f′) = 0.
    pub fn is_squarefree(&self) -> bool {
        !self.is_zero() && self.gcd(&self.derivative()).degree() == 0
    }

    /// Yun's algorithm: pairwise coprime squarefree factors aᵢ with
    /// f = c·Π aᵢ^{mᵢ}. Factors are primitive; constant factors are dropped.
    pub fn squarefree_factors(&self) -> Vec<(IntPolynomial, usize)> {
        let mut out = Vec::new();
        if self.degree() == 0 {
            return out;
        }
        let f = RatPoly::from_int(self);
        let fp = f.derivative();
        let a0 = f.gcd(&fp);
        let mut b = f.div_rem(&a0).0;
        let c = fp.div_rem(&a0).0;
        let mut d = c.sub(&b.derivative());
        let mut i = 1;
        while b.degree() > 0 {
            let a = b.gcd(&d);
            if a.degree() > 0 {
                out.push((a.to_primitive(), i));
            }
            b = b.div_rem(&a).0;
            let c = d.div_rem(&a).0;
            d = c.sub(&b.derivative());
            i += 1;
        }
        out
    }

    /// Squarefree part: every distinct root once.
    pub fn squarefree_part(&self) -> IntPolynomial {
        self.squarefree_factors()
            .into_iter()
            .fold(IntPolynomial::from_i64(&[1]), |acc, (a, _)| acc.mul(&a))
    }

    /// Number of distinct real roots in (0, ∞), by a Sturm sequence.
    pub fn count_positive_roots(&self) -> usize {
        let g = self.squarefree_part().strip_zero_roots();
        if g.degree() == 0 {
            return 0;
        }
        let seq = sturm_sequence(&g);
        let at_zero: Vec<BigRational> = seq.iter().map(|p| p.coeff(0)).collect();
        let at_inf: Vec<BigRational> = seq.iter().map(RatPoly::leading).collect();
        sign_changes(&at_zero).saturating_sub(sign_changes(&at_inf))
    }

    /// Number of distinct real roots.
    pub fn count_real_roots(&self) -> usize {
        let g = self.squarefree_part();
        if g.degree() == 0 {
            return 0;
        }
        let seq = sturm_sequence(&g);
        let at_inf: Vec<BigRational> = seq.iter().map(RatPoly::leading).collect();
        let at_neg_inf: Vec<BigRational> = seq
            .iter()
            .map(|p| if p.degree() % 2 == 0 { p.leading() } else { -p.leading() })
            .collect();
        sign_changes(&at_neg_inf).saturating_sub(sign_changes(&at_inf))
    }
}

fn sign_changes(vals: &[BigRational]) -> usize {
    let mut last = 0i8;
    let mut n = 0;
    for v in vals {
        let s = if v.is_positive() {
            1
        } else if v.is_negative() {
            -1
        } else {
            0
        };
        if s != 0 {
            if last != 0 && s != last {
                n += 1;
            }
            last = s;
        }
    }
    n
}

fn sturm_sequence(g: &IntPolynomial) -> Vec<RatPoly> {
    let mut seq = vec![RatPoly::from_int(g), RatPoly::from_int(&g.derivative())];
    loop {
        let k = seq.len();
        let (_, r) = seq[k - 2].div_rem(&seq[k - 1]);
        if r.is_zero() {
            break;
        }
        seq.push(r.neg());
    }
    seq
}

impl fmt::Display for IntPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let parts: Vec<String> = self.coeffs.iter().rev().map(|c| c.to_string()).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl Serialize for IntPolynomial {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Dense rational polynomial used for exact Euclidean steps.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct RatPoly {
    c: Vec<BigRational>,
}

impl RatPoly {
    fn new(mut c: Vec<BigRational>) -> Self {
        while c.last().is_some_and(Zero::is_zero) {
            c.pop();
        }
        RatPoly { c }
    }

    pub(crate) fn from_int(p: &IntPolynomial) -> Self {
        Self::new(p.coeffs.iter().map(|a| BigRational::from_integer(a.clone())).collect())
    }

    fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    fn degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    fn leading(&self) -> BigRational {
        self.c.last().cloned().unwrap_or_else(BigRational::zero)
    }

    fn coeff(&self, i: usize) -> BigRational {
        self.c.get(i).cloned().unwrap_or_else(BigRational::zero)
    }

    fn neg(&self) -> Self {
        Self::new(self.c.iter().map(|a| -a).collect())
    }

    fn sub(&self, o: &RatPoly) -> Self {
        let n = self.c.len().max(o.c.len());
        Self::new((0..n).map(|i| self.coeff(i) - o.coeff(i)).collect())
    }

    fn div_rem(&self, d: &RatPoly) -> (RatPoly, RatPoly) {
        assert!(!d.is_zero(), "division by the zero polynomial");
        let mut r = self.c.clone();
        let dl = d.leading();
        let dd = d.degree();
        if r.len() < d.c.len() {
            return (RatPoly::new(Vec::new()), self.clone());
        }
        let mut q = vec![BigRational::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let coef = &r[k + dd] / &dl;
            if !coef.is_zero() {
                for (j, dj) in d.c.iter().enumerate() {
                    r[k + j] -= &coef * dj;
                }
            }
            q[k] = coef;
        }
        r.truncate(dd);
        (RatPoly::new(q), RatPoly::new(r))
    }

    fn derivative(&self) -> Self {
        Self::new(
            self.c
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, a)| a * BigRational::from_integer(i.into()))
                .collect(),
        )
    }

    /// Monic gcd; gcd(0, 0) = 0.
    fn gcd(&self, o: &RatPoly) -> RatPoly {
        let (mut a, mut b) = (self.clone(), o.clone());
        while !b.is_zero() {
            let (_, r) = a.div_rem(&b);
            a = b;
            b = RatPoly::from_int(&r.to_primitive_or_zero());
        }
        if a.is_zero() {
            return a;
        }
        let l = a.leading();
        RatPoly::new(a.c.iter().map(|x| x / &l).collect())
    }

    /// Clears denominators and content.
    fn to_primitive_or_zero(&self) -> IntPolynomial {
        if self.is_zero() {
            return IntPolynomial::zero();
        }
        let l = self.c.iter().fold(BigInt::one(), |l, a| l.lcm(a.denom()));
        IntPolynomial::new(self.c.iter().map(|a| (a * &l).to_integer()).collect()).primitive()
    }

    fn to_primitive(&self) -> IntPolynomial {
        self.to_primitive_or_zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn p(asc: &[i64]) -> IntPolynomial {
        IntPolynomial::from_i64(asc)
    }

    #[test]
    fn parse_and_display_highest_first() {
        let f = IntPolynomial::parse_descending("1,-3,2").unwrap();
        assert_eq!(f, p(&[2, -3, 1]));
        assert_eq!(f.to_string(), "1,-3,2");
        assert!(IntPolynomial::parse_descending("1,x").is_err());
    }

    #[test]
    fn gcd_and_squarefree() {
        // (x-1)^2 (x+2)
        let f = p(&[-1, 1]).mul(&p(&[-1, 1])).mul(&p(&[2, 1]));
        assert!(!f.is_squarefree());
        assert_eq!(f.gcd(&f.derivative()), p(&[-1, 1]));
        let fac = f.squarefree_factors();
        assert_eq!(fac, vec![(p(&[2, 1]), 1), (p(&[-1, 1]), 2)]);
        assert_eq!(f.squarefree_part(), p(&[-2, 1, 1]));
        assert!(p(&[-1, 0, 1]).is_squarefree());
    }

    #[test]
    fn sturm_counts() {
        assert_eq!(p(&[2, -3, 1]).count_positive_roots(), 2);
        assert_eq!(p(&[1, 0, 1]).count_positive_roots(), 0);
        assert_eq!(p(&[-1, 0, 1]).count_positive_roots(), 1);
        assert_eq!(p(&[-1, 0, 1]).count_real_roots(), 2);
        assert_eq!(p(&[0, -1, 1]).count_positive_roots(), 1);
        // (x-1)(x-2)(x-4)
        assert_eq!(
            IntPolynomial::from_descending(&[1, -7, 14, -8]).count_positive_roots(),
            3
        );
    }

    proptest! {
        #[test]
        fn yun_reassembles_the_polynomial(a in prop::collection::vec(-3i64..=3, 1..4), b in prop::collection::vec(-3i64..=3, 1..3)) {
            let fa = p(&a);
            let fb = p(&b);
            prop_assume!(fa.degree() >= 1 && fb.degree() >= 1);
            let f = fa.mul(&fb).mul(&fb);
            let mut prod = p(&[1]);
            for (q, m) in f.squarefree_factors() {
                prop_assert!(q.is_squarefree());
                for _ in 0..m {
                    prod = prod.mul(&q);
                }
            }
            prop_assert_eq!(prod.primitive(), f.primitive());
        }
    }
}
