//! Absolute multiplicative heights of rational data, the Bombieri norm of
//! homogeneous integer polynomials, and exact checks of the standard height
//! inequalities.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numcore::ext::{ExtReal, Interval, Rounding};
use crate::numcore::roots::certified_roots;
use crate::numcore::{IntMatrix, IntPolynomial};

/// log2 of the precision used when a height has to be turned into a real.
const HEIGHT_LOG_PRECISION: usize = 128;

/// A height H ≥ 1. Heights of rational data are exact integers; the log2
/// value is rounded up.
#[derive(Clone, Debug, Serialize)]
pub struct HeightValue {
    pub log2_height: ExtReal,
    pub exact_flag: bool,
    #[serde(serialize_with = "ser_bigint")]
    pub value: BigInt,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.serialize_str(&v.to_string())
}

impl HeightValue {
    pub fn exact(value: BigInt) -> Self {
        debug_assert!(value >= BigInt::one());
        let log2_height = Interval::from_bigint(&value, HEIGHT_LOG_PRECISION)
            .log2()
            .expect("height is at least one")
            .upper();
        HeightValue {
            log2_height,
            exact_flag: true,
            value,
        }
    }
}

/// H(u) = max |uᵢ| for a nonzero integer vector.
pub fn height_int_vector(u: &[i64]) -> Result<HeightValue> {
    let h = u.iter().map(|v| v.unsigned_abs()).max().unwrap_or(0);
    if h == 0 {
        return Err(Error::Domain("height of the zero vector".into()));
    }
    Ok(HeightValue::exact(BigInt::from(h)))
}

/// Exact H(v₁, …, vₙ) = H(v₁ : ⋯ : vₙ : 1) = max(|m·vᵢ|, m), m the least
/// common denominator.
pub fn rational_vector_height(v: &[BigRational]) -> BigInt {
    let m = v.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()));
    v.iter()
        .map(|x| (x * BigRational::from_integer(m.clone())).to_integer().abs())
        .fold(m.clone(), |a, b| a.max(b))
}

/// Height of a single rational, H(x) = max(|num|, den); H(0) = 1.
pub fn rational_height(x: &BigRational) -> BigInt {
    rational_vector_height(std::slice::from_ref(x))
}

pub fn height_rational_vector(v: &[BigRational]) -> Result<HeightValue> {
    if v.iter().all(Zero::is_zero) {
        return Err(Error::Domain("height of the zero vector".into()));
    }
    Ok(HeightValue::exact(rational_vector_height(v)))
}

// ---------------------------------------------------------------------------
// homogeneous systems and the Bombieri norm

/// Sparse integer polynomial in `nvars` variables, homogeneous of `degree`.
/// Terms are merged and kept sorted by exponent vector.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogeneousPoly {
    nvars: usize,
    degree: u32,
    #[serde(serialize_with = "ser_terms")]
    terms: BTreeMap<Vec<u32>, BigInt>,
}

fn ser_terms<S: serde::Serializer>(t: &BTreeMap<Vec<u32>, BigInt>, s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(t.len()))?;
    for (e, c) in t {
        seq.serialize_element(&(e, c.to_string()))?;
    }
    seq.end()
}

impl HomogeneousPoly {
    /// Rejects monomials whose total degree differs from `degree`.
    pub fn new(nvars: usize, degree: u32, terms: Vec<(Vec<u32>, BigInt)>) -> Result<Self> {
        let mut map: BTreeMap<Vec<u32>, BigInt> = BTreeMap::new();
        for (e, c) in terms {
            if e.len() != nvars {
                return Err(Error::Dimension(format!("exponent vector {e:?} for {nvars} variables")));
            }
            let total: u32 = e.iter().sum();
            if total != degree {
                return Err(Error::Domain(format!(
                    "monomial {e:?} has degree {total}, polynomial declared homogeneous of degree {degree}"
                )));
            }
            *map.entry(e).or_default() += c;
        }
        map.retain(|_, c| !c.is_zero());
        Ok(HomogeneousPoly {
            nvars,
            degree,
            terms: map,
        })
    }

    pub fn from_i64(nvars: usize, degree: u32, terms: &[(Vec<u32>, i64)]) -> Result<Self> {
        Self::new(
            nvars,
            degree,
            terms.iter().map(|(e, c)| (e.clone(), BigInt::from(*c))).collect(),
        )
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn degree(&self) -> u32 {
        self.degree
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &BigInt)> {
        self.terms.iter()
    }

    /// S(G): number of nonzero coefficients.
    pub fn support(&self) -> usize {
        self.terms.len()
    }

    pub fn max_abs(&self) -> BigInt {
        self.terms.values().map(|c| c.abs()).max().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = self.clone();
        for v in out.terms.values_mut() {
            *v *= c;
        }
        out.terms.retain(|_, v| !v.is_zero());
        out
    }

    /// Relabels variable i as perm[i].
    pub fn permute(&self, perm: &[usize]) -> Self {
        let terms = self
            .terms
            .iter()
            .map(|(e, c)| {
                let mut ne = vec![0; self.nvars];
                for (i, &k) in e.iter().enumerate() {
                    ne[perm[i]] = k;
                }
                (ne, c.clone())
            })
            .collect();
        Self::new(self.nvars, self.degree, terms).expect("permutation keeps homogeneity")
    }
}

impl fmt::Display for HomogeneousPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in &self.terms {
            if !first {
                write!(f, " + ")?;
            }
            first = false;
            write!(f, "{c}")?;
            for (i, k) in e.iter().enumerate() {
                match k {
                    0 => {}
                    1 => write!(f, "*x{i}")?,
                    _ => write!(f, "*x{i}^{k}")?,
                }
            }
        }
        Ok(())
    }
}

/// F = (F₁, …, Fₙ) in n+1 homogeneous variables x₀, …, xₙ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomogeneousSystem {
    polys: Vec<HomogeneousPoly>,
}

impl HomogeneousSystem {
    pub fn new(polys: Vec<HomogeneousPoly>) -> Result<Self> {
        let Some(first) = polys.first() else {
            return Err(Error::Dimension("empty system".into()));
        };
        let nv = first.nvars;
        if polys.iter().any(|p| p.nvars != nv) {
            return Err(Error::Dimension("polynomials disagree on the variable count".into()));
        }
        if nv != polys.len() + 1 {
            return Err(Error::Dimension(format!(
                "{} equations need {} homogeneous variables, got {nv}",
                polys.len(),
                polys.len() + 1
            )));
        }
        Ok(HomogeneousSystem { polys })
    }

    /// n, the number of affine variables (equations).
    pub fn n(&self) -> usize {
        self.polys.len()
    }

    pub fn polys(&self) -> &[HomogeneousPoly] {
        &self.polys
    }

    pub fn degrees(&self) -> Vec<u32> {
        self.polys.iter().map(|p| p.degree).collect()
    }

    /// D = max dᵢ.
    pub fn max_degree(&self) -> u32 {
        self.polys.iter().map(|p| p.degree).max().unwrap_or(0)
    }

    /// S per polynomial.
    pub fn supports(&self) -> Vec<usize> {
        self.polys.iter().map(HomogeneousPoly::support).collect()
    }

    pub fn max_abs(&self) -> BigInt {
        self.polys
            .iter()
            .map(HomogeneousPoly::max_abs)
            .max()
            .unwrap_or_default()
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        HomogeneousSystem {
            polys: self.polys.iter().map(|p| p.scale(c)).collect(),
        }
    }
}

impl fmt::Display for HomogeneousSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.polys.iter().map(|p| p.to_string()).collect();
        write!(f, "({})", parts.join("; "))
    }
}

/// ‖G‖² as an exact rational.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BombieriNorm {
    pub norm_squared: BigRational,
}

impl BombieriNorm {
    /// Enclosure of ‖G‖.
    pub fn norm(&self, precision_bits: usize) -> Interval {
        Interval::from_rational(&self.norm_squared, precision_bits).sqrt()
    }

    pub fn log2_upper(&self, precision_bits: usize) -> Option<ExtReal> {
        Some(self.norm(precision_bits).log2()?.upper())
    }
}

fn factorial(k: u32) -> BigInt {
    (1..=k).fold(BigInt::one(), |acc, i| acc * i)
}

/// d!/(J₀!⋯Jₙ!)
pub fn multinomial(d: u32, j: &[u32]) -> BigInt {
    j.iter().fold(factorial(d), |acc, &k| acc / factorial(k))
}

/// ‖G‖² = Σ |G_J|² / binom(d, J).
pub fn bombieri_norm(g: &HomogeneousPoly, d: u32, nvars: usize) -> Result<BombieriNorm> {
    if g.degree != d || g.nvars != nvars {
        return Err(Error::Domain(format!(
            "polynomial is homogeneous of degree {} in {} variables, not {d} in {nvars}",
            g.degree, g.nvars
        )));
    }
    let norm_squared = g
        .terms
        .iter()
        .map(|(j, c)| BigRational::new(c * c, multinomial(d, j)))
        .fold(BigRational::zero(), |a, b| a + b);
    Ok(BombieriNorm { norm_squared })
}

/// ‖F‖² = Σ ‖Fᵢ‖².
pub fn system_norm(f: &HomogeneousSystem) -> BombieriNorm {
    let norm_squared = f
        .polys
        .iter()
        .map(|p| {
            bombieri_norm(p, p.degree, p.nvars)
                .expect("validated at construction")
                .norm_squared
        })
        .fold(BigRational::zero(), |a, b| a + b);
    BombieriNorm { norm_squared }
}

// ---------------------------------------------------------------------------
// proposition checks

/// One input to [`check_height_propositions`].
#[derive(Clone, Debug)]
pub enum HeightSample {
    Polynomial(IntPolynomial),
    RationalVector(Vec<BigRational>),
}

/// Number of exact inequalities checked, per family.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct HeightReport {
    pub samples: usize,
    pub root_modulus_checks: usize,
    pub coordinate_checks: usize,
    pub square_checks: usize,
    pub sum_product_checks: usize,
}

fn violation(witness: String) -> Error {
    Error::Verification { witness }
}

/// Checks, for every sample, the consequences of the height propositions
/// that can be decided exactly or with certified enclosures:
///
/// * polynomials: every nonzero root ζ has (2H)^(−d) ≤ |ζ| ≤ (2H)^d, H the
///   largest coefficient;
/// * rational vectors: H(x₁) ≤ H(x) ≤ ΠH(xᵢ), H(xᵢ²) = H(xᵢ)²,
///   H(Σxᵢ) ≤ nΠH(xᵢ) and H(Πxᵢ) ≤ ΠH(xᵢ).
///
/// The first violated inequality is returned as a verification error.
pub fn check_height_propositions(samples: &[HeightSample], precision_bits: usize) -> Result<HeightReport> {
    let mut rep = HeightReport::default();
    for s in samples {
        rep.samples += 1;
        match s {
            HeightSample::Polynomial(f) => rep.root_modulus_checks += check_root_moduli(f, precision_bits)?,
            HeightSample::RationalVector(v) => check_rational_vector(v, &mut rep)?,
        }
    }
    Ok(rep)
}

/// Root-modulus bounds for one polynomial; returns the number of roots checked.
pub fn check_root_moduli(f: &IntPolynomial, precision_bits: usize) -> Result<usize> {
    if f.degree() == 0 {
        return Ok(0);
    }
    let d = f.degree() as u32;
    let two_h = f.max_abs() * 2;
    let mut checked = 0;
    crate::numcore::roots::escalate(precision_bits, |p| {
        checked = 0;
        let bound = Interval::from_bigint(&two_h, p).powi(d);
        let one = Interval::from_i64(1, p);
        let inv = one.div(&bound).expect("bound is positive");
        for r in certified_roots(f, p)? {
            if r.is_exact_zero() {
                continue;
            }
            let m = r.modulus();
            if bound.certainly_lt(&m) || m.certainly_lt(&inv) {
                return Err(violation(format!(
                    "root modulus {m} of {f} outside [(2H)^-d, (2H)^d] = [{inv}, {bound}]"
                )));
            }
            if !(m.certainly_le(&bound) && inv.certainly_le(&m)) {
                return Err(Error::inconclusive(
                    p,
                    format!("root modulus of {f} straddles its height bound"),
                ));
            }
            checked += r.multiplicity;
        }
        Ok(checked)
    })
}

fn check_rational_vector(v: &[BigRational], rep: &mut HeightReport) -> Result<()> {
    if v.is_empty() {
        return Ok(());
    }
    let show = || v.iter().map(ToString::to_string).collect::<Vec<_>>().join(", ");
    let hs: Vec<BigInt> = v.iter().map(rational_height).collect();
    let prod: BigInt = hs.iter().product();
    let hv = rational_vector_height(v);
    rep.coordinate_checks += 1;
    if !(hs[0] <= hv && hv <= prod) {
        return Err(violation(format!(
            "H(x1) = {} <= H(x) = {hv} <= prod H(xi) = {prod} fails for ({})",
            hs[0],
            show()
        )));
    }
    for (x, h) in v.iter().zip(&hs) {
        rep.square_checks += 1;
        let sq = rational_height(&(x * x));
        if sq != h * h {
            return Err(violation(format!("H(x^2) = {sq} != H(x)^2 = {} for x = {x}", h * h)));
        }
    }
    let n = BigInt::from(v.len());
    let sum: BigRational = v.iter().cloned().sum();
    let product: BigRational = v.iter().cloned().product();
    rep.sum_product_checks += 2;
    let hsum = rational_height(&sum);
    if hsum > &n * &prod {
        return Err(violation(format!(
            "H(sum) = {hsum} > n prod H = {} for ({})",
            &n * &prod,
            show()
        )));
    }
    let hprod = rational_height(&product);
    if hprod > prod {
        return Err(violation(format!(
            "H(product) = {hprod} > prod H = {prod} for ({})",
            show()
        )));
    }
    Ok(())
}

/// Outcome of comparing H(A⁻¹) with the two candidate bounds n!·H(A)ⁿ and
/// n·H(A)ⁿ.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InverseHeightCheck {
    #[serde(serialize_with = "ser_bigint")]
    pub inverse_height: BigInt,
    #[serde(serialize_with = "ser_bigint")]
    pub matrix_height: BigInt,
    pub factorial_form_holds: bool,
    pub linear_form_holds: bool,
}

/// H(A⁻¹) against n!·H(A)ⁿ and n·H(A)ⁿ, exactly. Singular input is
/// degenerate.
pub fn check_inverse_height(a: &IntMatrix) -> Result<InverseHeightCheck> {
    let n = a.rows();
    let inv = a.inverse()?;
    let flat: Vec<BigRational> = inv.into_iter().flatten().collect();
    let hi = rational_vector_height(&flat);
    let ha = BigInt::from(a.max_abs().max(1));
    let pow = num_traits::pow(ha.clone(), n);
    Ok(InverseHeightCheck {
        factorial_form_holds: hi <= factorial(n as u32) * &pow,
        linear_form_holds: hi <= BigInt::from(n) * &pow,
        inverse_height: hi,
        matrix_height: ha,
    })
}

/// Exact check of max|pᵢ| ≤ (2√n·max|Aᵢⱼ|)ⁿ for p = det(A − tI), compared
/// in squared form: (max|pᵢ|)² ≤ (4n)ⁿ·max|Aᵢⱼ|^{2n}.
pub fn char_poly_coefficient_bound_holds(a: &IntMatrix) -> Result<bool> {
    let p = a.char_poly()?;
    let n = a.rows();
    let lhs = p.max_abs().pow(2);
    let h = BigInt::from(a.max_abs());
    let rhs = num_traits::pow(BigInt::from(4 * n), n) * num_traits::pow(h, 2 * n);
    Ok(lhs <= rhs)
}

/// Helper for reports: log2 of an exact positive integer, rounded in the
/// requested direction.
pub fn log2_bigint(v: &BigInt, rounding: Rounding) -> ExtReal {
    let iv = Interval::from_bigint(v, HEIGHT_LOG_PRECISION).log2().expect("positive");
    match rounding {
        Rounding::Down => iv.lower(),
        _ => iv.upper(),
    }
}
