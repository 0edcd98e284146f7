//! Condition numbers of concrete integer instances: linear systems, least
//! squares, non-symmetric eigenvalues, univariate roots, homogeneous systems,
//! and the relative gaps that govern unshifted QR and Graeffe iteration.
//!
//! Every certified value is carried as an enclosure of its log2, so a
//! comparison with a bound can use the lower end for upper-bound claims and
//! the upper end for lower-bound claims. Degeneracy is always decided
//! exactly.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::heights::{system_norm, HomogeneousSystem};
use crate::numcore::eigen::{gram_eigen_boxes, null_vector_cx, sym_eigen_boxes, Cx};
use crate::numcore::ext::{
    bf_add, bf_cmp, bf_div, bf_from_i64, bf_max, bf_mul, bf_sqrt, bf_sub, bf_zero, normalize_precision, pow2,
    CInterval, ExtReal, Interval, Rounding,
};
use crate::numcore::fast::{self, F64Interval};
use crate::numcore::matrix::{mat_mul, solve_rational};
use crate::numcore::roots::{certified_roots, escalate, order_boxes, RootBox};
use crate::numcore::{IntMatrix, IntPolynomial};

const N: Rounding = Rounding::Nearest;

/// A finite condition value. `log2_value ≤ log2(true value) ≤ log2_upper`
/// whenever the value is certified; `raw_value` is informational.
#[derive(Clone, Debug, Serialize)]
pub struct ConditionValue {
    pub log2_value: ExtReal,
    pub log2_upper: ExtReal,
    pub raw_value: ExtReal,
    pub witness: String,
    /// False only for values computed in plain rounded arithmetic.
    pub certified: bool,
}

impl ConditionValue {
    fn from_enclosure(value: &Interval, witness: String) -> Result<Self> {
        let l = value
            .log2()
            .ok_or_else(|| Error::inconclusive(value.precision_bits(), format!("enclosure {value} reaches zero")))?;
        Ok(ConditionValue {
            log2_value: l.lower(),
            log2_upper: l.upper(),
            raw_value: value.mid(),
            witness,
            certified: true,
        })
    }

    fn from_f64(log2: F64Interval, raw: f64, witness: String) -> Self {
        ConditionValue {
            log2_value: ExtReal::from_raw(crate::numcore::ext::bf_from_f64(log2.lo, 64), 64, Rounding::Down),
            log2_upper: ExtReal::from_raw(crate::numcore::ext::bf_from_f64(log2.hi, 64), 64, Rounding::Up),
            raw_value: ExtReal::from_f64(raw, 64),
            witness,
            certified: true,
        }
    }

    /// Enclosure [log2_value, log2_upper].
    pub fn log2_enclosure(&self) -> Interval {
        let p = self.log2_value.precision_bits().max(self.log2_upper.precision_bits());
        Interval::from_parts(self.log2_value.value().clone(), self.log2_upper.value().clone(), p)
    }

    pub fn raw_f64(&self) -> f64 {
        self.raw_value.to_f64()
    }
}

/// Either a finite value or the marker for an infinite one (singular
/// matrix, all eigenvalues or root moduli equal).
#[derive(Clone, Debug, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Condition {
    Finite(ConditionValue),
    Infinite { witness: String },
}

impl Condition {
    pub fn finite(&self) -> Option<&ConditionValue> {
        match self {
            Condition::Finite(v) => Some(v),
            Condition::Infinite { .. } => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Condition::Infinite { .. })
    }

    pub fn witness(&self) -> &str {
        match self {
            Condition::Finite(v) => &v.witness,
            Condition::Infinite { witness } => witness,
        }
    }
}

fn finite_or_inconclusive(v: &Interval, witness: String) -> Result<Condition> {
    Ok(Condition::Finite(ConditionValue::from_enclosure(v, witness)?))
}

// ---------------------------------------------------------------------------
// linear systems

fn rows_of(a: &IntMatrix) -> Vec<Vec<i64>> {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| a.get(i, j)).collect())
        .collect()
}

/// Enclosure of σmax²/σmin² from the eigenvalues of AᵀA.
fn kappa_squared_enclosure(a: &IntMatrix, p: usize) -> Result<Interval> {
    let boxes = gram_eigen_boxes(a, p)?;
    let hi = boxes.first().expect("nonempty spectrum").real_enclosure();
    let lo = boxes.last().expect("nonempty spectrum").real_enclosure();
    hi.div(&lo)
        .filter(|_| lo.is_positive())
        .ok_or_else(|| Error::inconclusive(p, "smallest singular value not separated from zero"))
}

/// κ(A) = σmax/σmin; infinite for singular A (decided by the exact
/// determinant).
pub fn kappa(a: &IntMatrix, precision_bits: usize) -> Result<Condition> {
    if !a.is_square() {
        return Err(Error::Dimension(format!(
            "kappa needs a square matrix, got {}x{}",
            a.rows(),
            a.cols()
        )));
    }
    if a.det()?.is_zero() {
        return Ok(Condition::Infinite {
            witness: "singular matrix: det = 0".into(),
        });
    }
    if let Some(c) = kappa_fast(a) {
        return Ok(Condition::Finite(c));
    }
    kappa_extended(a, precision_bits)
}

fn kappa_fast(a: &IntMatrix) -> Option<ConditionValue> {
    let rows = rows_of(a);
    let k = fast::kappa(&rows)?;
    let l = fast::log2_kappa(&rows)?;
    Some(ConditionValue::from_f64(l, k.mid(), "sigma_max/sigma_min".into()))
}

/// κ(A) through the extended-precision path only.
pub fn kappa_extended(a: &IntMatrix, precision_bits: usize) -> Result<Condition> {
    escalate(precision_bits, |p| {
        let k = kappa_squared_enclosure(a, p)?.sqrt();
        finite_or_inconclusive(&k, "sigma_max/sigma_min".into())
    })
}

/// Exact least-squares data: minimizer, residual and the angle θ between b
/// and the image of A.
#[derive(Clone, Debug, PartialEq)]
pub struct LeastSquaresGeometry {
    pub x: Vec<BigRational>,
    pub r: Vec<BigRational>,
    pub sin_theta_sq: BigRational,
    pub cos_theta_sq: BigRational,
    pub tan_theta_sq: BigRational,
}

/// Solves the normal equations exactly. Rank deficiency and b ⟂ im(A) are
/// degenerate.
pub fn least_squares_geometry(a: &IntMatrix, b: &[i64]) -> Result<LeastSquaresGeometry> {
    let (m, n) = (a.rows(), a.cols());
    if m < n {
        return Err(Error::Dimension(format!("least squares needs m >= n, got {m}x{n}")));
    }
    if b.len() != m {
        return Err(Error::Dimension(format!("b has length {}, expected {m}", b.len())));
    }
    let g = a.gram();
    if crate::numcore::matrix::det_bareiss(g.clone()).is_zero() {
        return Err(Error::Degenerate("A does not have full rank: det(AᵀA) = 0".into()));
    }
    let atb = a.transpose_mul_vec(b)?;
    if atb.iter().all(Zero::is_zero) {
        return Err(Error::Degenerate("b is orthogonal to the image of A: Aᵀb = 0".into()));
    }
    let q = |v: &BigInt| BigRational::from_integer(v.clone());
    let gq: Vec<Vec<BigRational>> = g.iter().map(|r| r.iter().map(q).collect()).collect();
    let x = solve_rational(gq, atb.iter().map(q).collect())?;
    let r: Vec<BigRational> = (0..m)
        .map(|i| {
            (0..n)
                .map(|j| BigRational::from_integer(a.get(i, j).into()) * &x[j])
                .sum::<BigRational>()
                - BigRational::from_integer(b[i].into())
        })
        .collect();
    let rr: BigRational = r.iter().map(|v| v * v).sum();
    let bb: BigRational = b.iter().map(|&v| BigRational::from_integer((v * v).into())).sum();
    let sin_theta_sq = rr / bb;
    let cos_theta_sq = BigRational::from_integer(1.into()) - &sin_theta_sq;
    let tan_theta_sq = &sin_theta_sq / &cos_theta_sq;
    Ok(LeastSquaresGeometry {
        x,
        r,
        sin_theta_sq,
        cos_theta_sq,
        tan_theta_sq,
    })
}

fn rational_f64(q: &BigRational) -> Option<F64Interval> {
    let lim = BigInt::from(1i64 << 53);
    if q.numer().abs() >= lim || q.denom() >= &lim {
        return None;
    }
    let n: f64 = q.numer().to_string().parse().ok()?;
    let d: f64 = q.denom().to_string().parse().ok()?;
    if n == 0.0 {
        return Some(F64Interval::point(0.0));
    }
    let v = n / d;
    Some(F64Interval::new(v.next_down(), v.next_up()))
}

/// cond_LS(A, b) = 2κ/cos θ + tan θ·κ².
pub fn cond_ls(a: &IntMatrix, b: &[i64], precision_bits: usize) -> Result<Condition> {
    let geo = least_squares_geometry(a, b)?;
    if let Some(v) = cond_ls_fast(a, &geo) {
        let (log2, raw, k) = v;
        return Ok(Condition::Finite(ConditionValue::from_f64(
            log2,
            raw,
            ls_witness(&geo, k),
        )));
    }
    cond_ls_with(a, &geo, precision_bits)
}

/// cond_LS(A, b) through the extended-precision path only.
pub fn cond_ls_extended(a: &IntMatrix, b: &[i64], precision_bits: usize) -> Result<Condition> {
    let geo = least_squares_geometry(a, b)?;
    cond_ls_with(a, &geo, precision_bits)
}

fn ls_witness(geo: &LeastSquaresGeometry, k: f64) -> String {
    format!(
        "kappa={k:.6}, sin^2(theta)={}, cos^2(theta)={}",
        geo.sin_theta_sq, geo.cos_theta_sq
    )
}

fn cond_ls_with(a: &IntMatrix, geo: &LeastSquaresGeometry, precision_bits: usize) -> Result<Condition> {
    escalate(precision_bits, |p| {
        let k2 = kappa_squared_enclosure(a, p)?;
        let k = k2.sqrt();
        let cos = Interval::from_rational(&geo.cos_theta_sq, p).sqrt();
        let tan = Interval::from_rational(&geo.tan_theta_sq, p).sqrt();
        let first = k
            .scale_i64(2)
            .div(&cos)
            .ok_or_else(|| Error::inconclusive(p, "cos(theta) enclosure reaches zero"))?;
        let v = first.add(&tan.mul(&k2));
        finite_or_inconclusive(&v, ls_witness(geo, k.mid().to_f64()))
    })
}

fn cond_ls_fast(a: &IntMatrix, geo: &LeastSquaresGeometry) -> Option<(F64Interval, f64, f64)> {
    let rows = rows_of(a);
    let k = fast::kappa(&rows)?;
    let cos = rational_f64(&geo.cos_theta_sq)?.sqrt();
    let tan = rational_f64(&geo.tan_theta_sq)?.sqrt();
    let first = k.mul(F64Interval::point(2.0)).div_pos(cos)?;
    let v = first.add(tan.mul(k.mul(k)));
    Some((v.log2()?, v.mid(), k.mid()))
}

// ---------------------------------------------------------------------------
// eigenvalue condition

/// Which eigenvalue `cond_nse` reports on.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EigenSelector {
    /// Maximum over all simple eigenvalues.
    All,
    /// Position in the eigenvalue list ordered by decreasing modulus, then
    /// decreasing real and imaginary parts, with multiplicity.
    Index(usize),
}

fn monic_char_poly(a: &IntMatrix) -> Result<IntPolynomial> {
    let p = a.char_poly()?;
    Ok(if a.rows() % 2 == 1 { p.neg() } else { p })
}

fn horner_c(coeffs: &[BigInt], z: &CInterval, p: usize) -> CInterval {
    let mut acc = CInterval::from_i64(0, p);
    for c in coeffs.iter().rev() {
        acc = acc.mul(z).add(&CInterval::real(Interval::from_bigint(c, p)));
    }
    acc
}

/// adj(tI − A) = Σ t^k M_k with M_{n−1} = I and M_{k−1} = A·M_k + c_k·I.
fn adjugate_coefficients(a: &IntMatrix, q: &IntPolynomial) -> Vec<Vec<Vec<BigInt>>> {
    let n = a.rows();
    let ab = a.to_bigint();
    let ident: Vec<Vec<BigInt>> = (0..n)
        .map(|i| (0..n).map(|j| BigInt::from((i == j) as i64)).collect())
        .collect();
    let mut ms = vec![ident; n];
    for k in (1..n).rev() {
        let mut next = mat_mul(&ab, &ms[k]);
        for (i, row) in next.iter_mut().enumerate() {
            row[i] += q.coeff(k);
        }
        ms[k - 1] = next;
    }
    ms
}

/// Enclosure of cond(λ) = ‖adj(λI − A)‖_F / |q′(λ)| over the box of λ.
fn nse_enclosure(ms: &[Vec<Vec<BigInt>>], dq: &IntPolynomial, lam: &CInterval, p: usize) -> Result<Interval> {
    let n = ms.len();
    let mut fro = Interval::from_i64(0, p);
    for i in 0..n {
        for j in 0..n {
            let coeffs: Vec<BigInt> = ms.iter().map(|m| m[i][j].clone()).collect();
            fro = fro.add(&horner_c(&coeffs, lam, p).norm_sqr());
        }
    }
    let den = horner_c(dq.coeffs(), lam, p).abs();
    fro.sqrt()
        .div(&den)
        .ok_or_else(|| Error::inconclusive(p, "derivative of the characteristic polynomial not separated from zero"))
}

/// 1/|y*x| from unit right and left null vectors, in rounded arithmetic.
fn nse_from_eigenvectors(a: &IntMatrix, b: &RootBox, p: usize) -> Result<BigFloat> {
    let lam = Cx::new(b.re.clone(), b.im.clone());
    let x = null_vector_cx(a, &lam, false, p)?;
    // left eigenvector: ȳ spans the kernel of (Aᵀ − λI)
    let w = null_vector_cx(a, &lam, true, p)?;
    let (mut re, mut im) = (bf_zero(p), bf_zero(p));
    for (xi, wi) in x.iter().zip(&w) {
        re = bf_add(
            &re,
            &bf_sub(&bf_mul(&xi.re, &wi.re, p, N), &bf_mul(&xi.im, &wi.im, p, N), p, N),
            p,
            N,
        );
        im = bf_add(
            &im,
            &bf_add(&bf_mul(&xi.re, &wi.im, p, N), &bf_mul(&xi.im, &wi.re, p, N), p, N),
            p,
            N,
        );
    }
    let m = bf_sqrt(&bf_add(&bf_mul(&re, &re, p, N), &bf_mul(&im, &im, p, N), p, N), p, N);
    Ok(bf_div(&bf_from_i64(1, p), &m, p, N))
}

fn describe(b: &RootBox) -> String {
    let (re, im) = b.center_f64();
    if im == 0.0 {
        format!("lambda={re}")
    } else {
        format!("lambda={re}{im:+}i")
    }
}

/// cond_NSE(A, λ) = 1/|y*x| for unit right and left eigenvectors x, y.
///
/// The certified enclosure comes from the adjugate identity; the raw value
/// from the eigenvectors themselves.
pub fn cond_nse(a: &IntMatrix, which: EigenSelector, precision_bits: usize) -> Result<Condition> {
    if !a.is_square() {
        return Err(Error::Dimension("cond_nse needs a square matrix".into()));
    }
    let q = monic_char_poly(a)?;
    let dq = q.derivative();
    let ms = adjugate_coefficients(a, &q);
    escalate(precision_bits, |p| {
        let boxes = certified_roots(&q, p)?;
        let chosen: Vec<&RootBox> = match which {
            EigenSelector::All => boxes.iter().filter(|b| b.multiplicity == 1).collect(),
            EigenSelector::Index(k) => {
                let mut pos = 0;
                let mut hit = None;
                for b in &boxes {
                    if k < pos + b.multiplicity {
                        hit = Some(b);
                        break;
                    }
                    pos += b.multiplicity;
                }
                let b = hit.ok_or_else(|| Error::Domain(format!("eigenvalue index {k} out of range")))?;
                if b.multiplicity > 1 {
                    return Err(Error::Degenerate(format!(
                        "{} has multiplicity {}",
                        describe(b),
                        b.multiplicity
                    )));
                }
                vec![b]
            }
        };
        if chosen.is_empty() {
            return Err(Error::Degenerate("no simple eigenvalue".into()));
        }
        let mut best: Option<(Interval, &RootBox)> = None;
        for b in chosen {
            let e = nse_enclosure(&ms, &dq, &b.enclosure(), p)?;
            best = Some(match best {
                None => (e, b),
                Some((cur, cb)) => {
                    let keep_new = bf_cmp(e.hi(), cur.hi()) == Ordering::Greater;
                    let hull = cur.max(&e);
                    (hull, if keep_new { b } else { cb })
                }
            });
        }
        let (enc, b) = best.expect("at least one eigenvalue");
        let mut v = ConditionValue::from_enclosure(&enc, describe(b))?;
        let raw = nse_from_eigenvectors(a, b, p)?;
        v.raw_value = ExtReal::from_raw(raw, p, N);
        Ok(Condition::Finite(v))
    })
}

// ---------------------------------------------------------------------------
// univariate and system μ

/// μ(f) = max over roots ζ of (Σᵢ₌₀..d |ζ|^{2i})^{1/2} / |f′(ζ)|.
pub fn mu_univariate(f: &IntPolynomial, precision_bits: usize) -> Result<Condition> {
    if f.degree() == 0 {
        return Err(Error::Domain("mu of a constant polynomial".into()));
    }
    if !f.is_squarefree() {
        return Err(Error::Degenerate(format!("{f} has a multiple root")));
    }
    let d = f.degree();
    let df = f.derivative();
    escalate(precision_bits, |p| {
        let mut best: Option<(Interval, &RootBox)> = None;
        let boxes = certified_roots(f, p)?;
        for b in &boxes {
            let z = b.enclosure();
            let m2 = z.norm_sqr();
            let mut s = Interval::from_i64(1, p);
            let mut pw = Interval::from_i64(1, p);
            for _ in 0..d {
                pw = pw.mul(&m2);
                s = s.add(&pw);
            }
            let den = horner_c(df.coeffs(), &z, p).abs();
            let mu = s
                .sqrt()
                .div(&den)
                .ok_or_else(|| Error::inconclusive(p, format!("f' not separated from zero at a root of {f}")))?;
            best = Some(match best {
                None => (mu, b),
                Some((cur, cb)) => {
                    let keep_new = bf_cmp(mu.hi(), cur.hi()) == Ordering::Greater;
                    (cur.max(&mu), if keep_new { b } else { cb })
                }
            });
        }
        let (enc, b) = best.expect("degree at least one");
        let (re, im) = b.center_f64();
        finite_or_inconclusive(&enc, format!("zeta={re}{im:+}i"))
    })
}

fn cx_conj_dot(u: &[Cx], v: &[Cx], p: usize) -> Cx {
    // Σ conj(uᵢ)·vᵢ
    let (mut re, mut im) = (bf_zero(p), bf_zero(p));
    for (a, b) in u.iter().zip(v) {
        re = bf_add(
            &re,
            &bf_add(&bf_mul(&a.re, &b.re, p, N), &bf_mul(&a.im, &b.im, p, N), p, N),
            p,
            N,
        );
        im = bf_add(
            &im,
            &bf_sub(&bf_mul(&a.re, &b.im, p, N), &bf_mul(&a.im, &b.re, p, N), p, N),
            p,
            N,
        );
    }
    Cx::new(re, im)
}

fn cx_mul(a: &Cx, b: &Cx, p: usize) -> Cx {
    Cx::new(
        bf_sub(&bf_mul(&a.re, &b.re, p, N), &bf_mul(&a.im, &b.im, p, N), p, N),
        bf_add(&bf_mul(&a.re, &b.im, p, N), &bf_mul(&a.im, &b.re, p, N), p, N),
    )
}

fn cx_add(a: &Cx, b: &Cx, p: usize) -> Cx {
    Cx::new(bf_add(&a.re, &b.re, p, N), bf_add(&a.im, &b.im, p, N))
}

fn cx_sub(a: &Cx, b: &Cx, p: usize) -> Cx {
    Cx::new(bf_sub(&a.re, &b.re, p, N), bf_sub(&a.im, &b.im, p, N))
}

fn cx_norm_sqr(a: &Cx, p: usize) -> BigFloat {
    bf_add(&bf_mul(&a.re, &a.re, p, N), &bf_mul(&a.im, &a.im, p, N), p, N)
}

fn cx_div(a: &Cx, b: &Cx, p: usize) -> Cx {
    let den = cx_norm_sqr(b, p);
    let re = bf_add(&bf_mul(&a.re, &b.re, p, N), &bf_mul(&a.im, &b.im, p, N), p, N);
    let im = bf_sub(&bf_mul(&a.im, &b.re, p, N), &bf_mul(&a.re, &b.im, p, N), p, N);
    Cx::new(bf_div(&re, &den, p, N), bf_div(&im, &den, p, N))
}

fn cx_scale(a: &Cx, k: &BigFloat, p: usize) -> Cx {
    Cx::new(bf_mul(&a.re, k, p, N), bf_mul(&a.im, k, p, N))
}

fn cx_int(v: &BigInt, p: usize) -> Cx {
    Cx::new(crate::numcore::ext::bf_from_bigint(v, p, N), bf_zero(p))
}

fn cx_pow(z: &Cx, k: u32, p: usize) -> Cx {
    let mut acc = Cx::new(bf_from_i64(1, p), bf_zero(p));
    for _ in 0..k {
        acc = cx_mul(&acc, z, p);
    }
    acc
}

/// Value and gradient of a homogeneous polynomial at z.
fn eval_with_gradient(g: &crate::heights::HomogeneousPoly, z: &[Cx], p: usize) -> (Cx, Vec<Cx>) {
    let nv = z.len();
    let zero = Cx::new(bf_zero(p), bf_zero(p));
    let mut val = zero.clone();
    let mut grad = vec![zero; nv];
    for (e, c) in g.terms() {
        let cc = cx_int(c, p);
        let pows: Vec<Cx> = e.iter().zip(z).map(|(&k, zi)| cx_pow(zi, k, p)).collect();
        let full = pows.iter().fold(cc.clone(), |acc, t| cx_mul(&acc, t, p));
        val = cx_add(&val, &full, p);
        for j in 0..nv {
            if e[j] == 0 {
                continue;
            }
            let mut t = cx_scale(&cc, &bf_from_i64(e[j] as i64, p), p);
            for (i, pw) in pows.iter().enumerate() {
                let f = if i == j { cx_pow(&z[i], e[i] - 1, p) } else { pw.clone() };
                t = cx_mul(&t, &f, p);
            }
            grad[j] = cx_add(&grad[j], &t, p);
        }
    }
    (val, grad)
}

/// n orthonormal vectors spanning ζ^⊥ in ℂ^{n+1}, by Gram–Schmidt on
/// ζ, e₀, …, eₙ, keeping the candidates with the largest residuals.
fn tangent_basis(z: &[Cx], p: usize) -> Vec<Vec<Cx>> {
    let nv = z.len();
    let zero = || Cx::new(bf_zero(p), bf_zero(p));
    let normalize = |v: &[Cx]| -> Vec<Cx> {
        let nn = v
            .iter()
            .fold(bf_zero(p), |acc, c| bf_add(&acc, &cx_norm_sqr(c, p), p, N));
        let inv = bf_div(&bf_from_i64(1, p), &bf_sqrt(&nn, p, N), p, N);
        v.iter().map(|c| cx_scale(c, &inv, p)).collect()
    };
    let mut basis: Vec<Vec<Cx>> = vec![normalize(z)];
    let mut remaining: Vec<usize> = (0..nv).collect();
    while basis.len() < nv {
        // pick the standard vector with the largest residual
        let mut best: Option<(usize, Vec<Cx>, BigFloat)> = None;
        for &k in &remaining {
            let mut v: Vec<Cx> = (0..nv)
                .map(|i| {
                    if i == k {
                        Cx::new(bf_from_i64(1, p), bf_zero(p))
                    } else {
                        zero()
                    }
                })
                .collect();
            for u in &basis {
                let c = cx_conj_dot(u, &v, p);
                for (vi, ui) in v.iter_mut().zip(u) {
                    *vi = cx_sub(vi, &cx_mul(ui, &c, p), p);
                }
            }
            let nn = v
                .iter()
                .fold(bf_zero(p), |acc, c| bf_add(&acc, &cx_norm_sqr(c, p), p, N));
            if best.as_ref().is_none_or(|b| bf_cmp(&nn, &b.2) == Ordering::Greater) {
                best = Some((k, v, nn));
            }
        }
        let (k, v, _) = best.expect("a candidate remains");
        remaining.retain(|&r| r != k);
        basis.push(normalize(&v));
    }
    basis.remove(0);
    basis
}

fn cx_invert(m: &[Vec<Cx>], p: usize) -> Option<Vec<Vec<Cx>>> {
    let n = m.len();
    let one = Cx::new(bf_from_i64(1, p), bf_zero(p));
    let zero = Cx::new(bf_zero(p), bf_zero(p));
    let mut a: Vec<Vec<Cx>> = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..n).map(|j| if i == j { one.clone() } else { zero.clone() }));
            r
        })
        .collect();
    let scale = m
        .iter()
        .flatten()
        .fold(bf_zero(p), |acc, c| bf_max(&acc, &cx_norm_sqr(c, p)));
    let tol = bf_mul(&scale, &pow2(-(p as i64) / 2), p, N);
    for k in 0..n {
        let piv = (k..n).max_by(|&i, &j| bf_cmp(&cx_norm_sqr(&a[i][k], p), &cx_norm_sqr(&a[j][k], p)))?;
        if bf_cmp(&cx_norm_sqr(&a[piv][k], p), &tol) != Ordering::Greater {
            return None;
        }
        a.swap(k, piv);
        let inv = cx_div(&one, &a[k][k], p);
        for j in 0..2 * n {
            a[k][j] = cx_mul(&a[k][j], &inv, p);
        }
        for i in 0..n {
            if i != k {
                let f = a[i][k].clone();
                for j in 0..2 * n {
                    let t = cx_mul(&f, &a[k][j], p);
                    a[i][j] = cx_sub(&a[i][j], &t, p);
                }
            }
        }
    }
    Some(a.into_iter().map(|r| r[n..].to_vec()).collect())
}

/// Largest eigenvalue of a real symmetric matrix by cyclic Jacobi sweeps.
fn sym_max_eigenvalue(mut a: Vec<Vec<BigFloat>>, p: usize) -> BigFloat {
    let n = a.len();
    let two = bf_from_i64(2, p);
    let one = bf_from_i64(1, p);
    for _ in 0..60 {
        let off = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .fold(bf_zero(p), |acc, (i, j)| bf_max(&acc, &a[i][j].abs()));
        let diag = (0..n).fold(bf_zero(p), |acc, i| bf_max(&acc, &a[i][i].abs()));
        let lim = bf_mul(&bf_max(&diag, &one), &pow2(-(p as i64) + 16), p, N);
        if bf_cmp(&off, &lim) != Ordering::Greater {
            break;
        }
        for i in 0..n {
            for j in i + 1..n {
                if a[i][j].is_zero() {
                    continue;
                }
                let theta = bf_div(&bf_sub(&a[j][j], &a[i][i], p, N), &bf_mul(&two, &a[i][j], p, N), p, N);
                let root = bf_sqrt(&bf_add(&bf_mul(&theta, &theta, p, N), &one, p, N), p, N);
                let mut t = bf_div(&one, &bf_add(&theta.abs(), &root, p, N), p, N);
                if theta.is_negative() {
                    t = t.neg();
                }
                let c = bf_div(&one, &bf_sqrt(&bf_add(&bf_mul(&t, &t, p, N), &one, p, N), p, N), p, N);
                let s = bf_mul(&t, &c, p, N);
                for k in 0..n {
                    let (aki, akj) = (a[k][i].clone(), a[k][j].clone());
                    a[k][i] = bf_sub(&bf_mul(&c, &aki, p, N), &bf_mul(&s, &akj, p, N), p, N);
                    a[k][j] = bf_add(&bf_mul(&s, &aki, p, N), &bf_mul(&c, &akj, p, N), p, N);
                }
                for k in 0..n {
                    let (aik, ajk) = (a[i][k].clone(), a[j][k].clone());
                    a[i][k] = bf_sub(&bf_mul(&c, &aik, p, N), &bf_mul(&s, &ajk, p, N), p, N);
                    a[j][k] = bf_add(&bf_mul(&s, &aik, p, N), &bf_mul(&c, &ajk, p, N), p, N);
                }
            }
        }
    }
    (0..n).fold(a[0][0].clone(), |acc, i| bf_max(&acc, &a[i][i]))
}

/// μ(F, ζ) = ‖F‖·‖(DF(ζ)|_{T_ζ})⁻¹ diag(‖ζ‖^{dᵢ−1})‖ in rounded arithmetic
/// at the working precision. The result is not an enclosure
/// (`certified` is false).
pub fn mu_system(f: &HomogeneousSystem, zeta: &[(ExtReal, ExtReal)], precision_bits: usize) -> Result<Condition> {
    let n = f.n();
    if zeta.len() != n + 1 {
        return Err(Error::Dimension(format!(
            "root has {} coordinates, expected {}",
            zeta.len(),
            n + 1
        )));
    }
    let p = normalize_precision(precision_bits);
    let z: Vec<Cx> = zeta
        .iter()
        .map(|(r, i)| {
            let mut re = r.value().clone();
            let mut im = i.value().clone();
            for x in [&mut re, &mut im] {
                if x.precision().unwrap_or(0) < p {
                    x.set_precision(p, astro_float::RoundingMode::ToEven)
                        .expect("valid precision");
                }
                x.set_inexact(false);
            }
            Cx::new(re, im)
        })
        .collect();
    let zn2 = z
        .iter()
        .fold(bf_zero(p), |acc, c| bf_add(&acc, &cx_norm_sqr(c, p), p, N));
    if zn2.is_zero() {
        return Err(Error::Domain("the zero vector is not a projective point".into()));
    }
    let zn = bf_sqrt(&zn2, p, N);
    let mut jac = Vec::with_capacity(n);
    for g in f.polys() {
        let (val, grad) = eval_with_gradient(g, &z, p);
        // residual relative to the natural scale ‖g‖₁‖ζ‖^d
        let scale = g.terms().fold(bf_zero(p), |acc, (_, c)| {
            bf_add(&acc, &crate::numcore::ext::bf_from_bigint(&c.abs(), p, N), p, N)
        });
        let zd = (0..g.degree()).fold(bf_from_i64(1, p), |acc, _| bf_mul(&acc, &zn, p, N));
        let lim = bf_mul(&bf_mul(&scale, &zd, p, N), &pow2(-(p as i64) / 4), p, N);
        if bf_cmp(&bf_sqrt(&cx_norm_sqr(&val, p), p, N), &lim) == Ordering::Greater {
            return Err(Error::Precondition(format!("zeta is not a root of {g}")));
        }
        jac.push(grad);
    }
    let basis = tangent_basis(&z, p);
    // (DF·B)ᵢₖ = Σⱼ DFᵢⱼ Bₖⱼ
    let restricted: Vec<Vec<Cx>> = jac
        .iter()
        .map(|row| {
            basis
                .iter()
                .map(|b| {
                    row.iter().zip(b).fold(Cx::new(bf_zero(p), bf_zero(p)), |acc, (x, y)| {
                        cx_add(&acc, &cx_mul(x, y, p), p)
                    })
                })
                .collect()
        })
        .collect();
    let inv = cx_invert(&restricted, p).ok_or_else(|| Error::Degenerate("restricted Jacobian is singular".into()))?;
    // K = inv · diag(‖ζ‖^{dᵢ−1})
    let degs = f.degrees();
    let k: Vec<Vec<Cx>> = inv
        .iter()
        .map(|row| {
            row.iter()
                .zip(&degs)
                .map(|(c, &d)| {
                    let s = (1..d).fold(bf_from_i64(1, p), |acc, _| bf_mul(&acc, &zn, p, N));
                    cx_scale(c, &s, p)
                })
                .collect()
        })
        .collect();
    // ‖K‖₂² = λmax(K*K); embed the Hermitian matrix as a real symmetric one
    let mut h = vec![vec![Cx::new(bf_zero(p), bf_zero(p)); n]; n];
    for (i, hrow) in h.iter_mut().enumerate() {
        for (j, hij) in hrow.iter_mut().enumerate() {
            let ci: Vec<Cx> = k.iter().map(|r| r[i].clone()).collect();
            let cj: Vec<Cx> = k.iter().map(|r| r[j].clone()).collect();
            *hij = cx_conj_dot(&ci, &cj, p);
        }
    }
    let mut real = vec![vec![bf_zero(p); 2 * n]; 2 * n];
    for i in 0..n {
        for j in 0..n {
            real[i][j] = h[i][j].re.clone();
            real[i + n][j + n] = h[i][j].re.clone();
            real[i][j + n] = h[i][j].im.neg();
            real[i + n][j] = h[i][j].im.clone();
        }
    }
    let lmax = sym_max_eigenvalue(real, p);
    let op = bf_sqrt(&bf_max(&lmax, &bf_zero(p)), p, N);
    let fnorm = system_norm(f).norm(p).mid().value().clone();
    let mu = bf_mul(&fnorm, &op, p, N);
    let lo = crate::numcore::ext::bf_log2(&mu, p, Rounding::Down);
    let hi = crate::numcore::ext::bf_log2(&mu, p, Rounding::Up);
    Ok(Condition::Finite(ConditionValue {
        log2_value: ExtReal::from_raw(lo, p, Rounding::Down),
        log2_upper: ExtReal::from_raw(hi, p, Rounding::Up),
        raw_value: ExtReal::from_raw(mu, p, N),
        witness: format!("F={f}"),
        certified: false,
    }))
}

// ---------------------------------------------------------------------------
// relative gaps

fn gap(big: &Interval, small: &Interval) -> Option<Interval> {
    // |small/big − 1|
    Some(small.div(big)?.sub(&Interval::from_i64(1, big.precision_bits())).abs())
}

/// min over pairs of distinct eigenvalues of |λⱼ/λᵢ − 1| with |λᵢ| ≥ |λⱼ|
/// and λᵢ ≠ 0; infinite when every eigenvalue is equal.
pub fn relgap_matrix(a: &IntMatrix, precision_bits: usize) -> Result<Condition> {
    if !a.is_symmetric() {
        return Err(Error::Domain("relgap_matrix needs a symmetric matrix".into()));
    }
    let ab = a.to_bigint();
    escalate(precision_bits, |p| {
        let boxes = sym_eigen_boxes(&ab, p)?;
        if boxes.len() < 2 {
            return Ok(Condition::Infinite {
                witness: format!("single eigenvalue {}", boxes[0].center_f64().0),
            });
        }
        let mut best: Option<(Interval, String)> = None;
        for i in 0..boxes.len() {
            for j in i + 1..boxes.len() {
                let (x, y) = (boxes[i].real_enclosure(), boxes[j].real_enclosure());
                let (mx, my) = (x.abs(), y.abs());
                let mut cands = Vec::new();
                // orientation by modulus; both when it cannot be decided
                if !mx.certainly_lt(&my) && !boxes[i].is_exact_zero() {
                    cands.extend(gap(&x, &y));
                }
                if !my.certainly_lt(&mx) && !boxes[j].is_exact_zero() {
                    cands.extend(gap(&y, &x));
                }
                if cands.is_empty() {
                    return Err(Error::inconclusive(p, "eigenvalue enclosure reaches zero"));
                }
                let g = cands.iter().skip(1).fold(cands[0].clone(), |acc, c| acc.hull(c));
                let w = format!(
                    "lambda_i={}, lambda_j={}",
                    boxes[i].center_f64().0,
                    boxes[j].center_f64().0
                );
                best = Some(match best {
                    None => (g, w),
                    Some((cur, cw)) => {
                        let take = bf_cmp(g.lo(), cur.lo()) == Ordering::Less;
                        (cur.min(&g), if take { w } else { cw })
                    }
                });
            }
        }
        let (enc, w) = best.expect("at least one pair");
        finite_or_inconclusive(&enc, w)
    })
}

/// Smallest relative gap between adjacent distinct root moduli,
/// min(|ζᵢ|/|ζᵢ₊₁| − 1) over moduli sorted descending. Zero roots are
/// excluded; infinite when all nonzero roots share one modulus.
pub fn relgap_poly(f: &IntPolynomial, precision_bits: usize) -> Result<Condition> {
    if f.degree() < 2 {
        return Err(Error::Domain(format!(
            "relgap_poly needs degree >= 2, got {}",
            f.degree()
        )));
    }
    escalate(precision_bits, |p| {
        let mut boxes: Vec<RootBox> = certified_roots(f, p)?
            .into_iter()
            .filter(|b| !b.is_exact_zero())
            .collect();
        boxes.sort_by(order_boxes);
        // group moduli whose enclosures overlap
        let mut groups: Vec<(Interval, f64)> = Vec::new();
        for b in &boxes {
            let m = b.modulus();
            let approx = m.mid().to_f64();
            match groups.last_mut() {
                Some((g, _)) if g.overlaps(&m) => *g = g.hull(&m),
                _ => groups.push((m, approx)),
            }
        }
        if groups.len() < 2 {
            return Ok(Condition::Infinite {
                witness: "all nonzero roots share one modulus".into(),
            });
        }
        let mut best: Option<(Interval, String)> = None;
        for w in groups.windows(2) {
            let r = w[0]
                .0
                .div(&w[1].0)
                .ok_or_else(|| Error::inconclusive(p, "root modulus enclosure reaches zero"))?
                .sub(&Interval::from_i64(1, p));
            let label = format!("|zeta_i|={}, |zeta_i+1|={}", w[0].1, w[1].1);
            best = Some(match best {
                None => (r, label),
                Some((cur, cl)) => {
                    let take = bf_cmp(r.lo(), cur.lo()) == Ordering::Less;
                    (cur.min(&r), if take { label } else { cl })
                }
            });
        }
        let (enc, w) = best.expect("at least two moduli");
        finite_or_inconclusive(&enc, w)
    })
}
