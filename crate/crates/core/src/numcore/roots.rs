//! Certified complex roots of integer polynomials.
//!
//! Roots of each squarefree factor are approximated by Aberth–Ehrlich
//! iteration and then certified with Weierstrass corrections: for a monic
//! squarefree g with approximations zᵢ and Wᵢ = g(zᵢ)/Πⱼ≠ᵢ(zᵢ−zⱼ), the roots
//! of g are the eigenvalues of diag(z) − 𝟙Wᵀ, so every connected component of
//! the disks D(zᵢ, n|Wᵢ|) holds as many roots as it has disks.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use super::ext::{
    bf_add, bf_cmp, bf_div, bf_from_bigint, bf_from_f64, bf_mul, bf_sub, bf_zero, max_precision_bits,
    normalize_precision, pow2, CInterval, ExtReal, Interval, Rounding,
};
use super::poly::IntPolynomial;
use crate::error::{Error, Result};

const N: Rounding = Rounding::Nearest;
const SEED_PRECISION: usize = 64;
const SEED_TOLERANCE_BITS: i64 = 44;
const MAX_SEED_ITERATIONS: usize = 400;
const MAX_REFINE_ITERATIONS: usize = 60;

/// One certified root: the disk centred at (re, im) with radius
/// `error_radius` contains it.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexRoot {
    pub re: ExtReal,
    pub im: ExtReal,
    pub error_radius: ExtReal,
}

/// Roots with multiplicity, sorted by decreasing modulus, then decreasing
/// real part, then decreasing imaginary part.
#[derive(Clone, Debug, Serialize)]
pub struct ComplexList {
    pub values: Vec<ComplexRoot>,
}

impl ComplexList {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Nearest f64 approximations (re, im).
    pub fn approx(&self) -> Vec<(f64, f64)> {
        self.values
            .iter()
            .map(|r| (r.re.to_f64_with(N), r.im.to_f64_with(N)))
            .collect()
    }

    pub fn max_error_radius(&self) -> f64 {
        self.values
            .iter()
            .map(|r| r.error_radius.to_f64_with(Rounding::Up))
            .fold(0.0, f64::max)
    }
}

/// A distinct root with its multiplicity. `real` is set only when the root
/// is proven real: its centre lies on the axis and its disk is isolated, so
/// the conjugate root must be the root itself.
#[derive(Clone, Debug)]
pub struct RootBox {
    pub(crate) re: BigFloat,
    pub(crate) im: BigFloat,
    pub(crate) radius: BigFloat,
    pub multiplicity: usize,
    pub real: bool,
    pub(crate) prec: usize,
}

impl RootBox {
    fn exact_zero(multiplicity: usize, prec: usize) -> Self {
        RootBox {
            re: bf_zero(prec),
            im: bf_zero(prec),
            radius: bf_zero(prec),
            multiplicity,
            real: true,
            prec,
        }
    }

    pub fn is_exact_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero() && self.radius.is_zero()
    }

    /// Rectangle containing the disk.
    pub fn enclosure(&self) -> CInterval {
        let re = Interval::ball(&self.re, &self.radius, self.prec);
        let im = if self.real {
            Interval::point_bf(bf_zero(self.prec), self.prec)
        } else {
            Interval::ball(&self.im, &self.radius, self.prec)
        };
        CInterval::new(re, im)
    }

    pub fn real_enclosure(&self) -> Interval {
        Interval::ball(&self.re, &self.radius, self.prec)
    }

    /// Enclosure of |ζ|.
    pub fn modulus(&self) -> Interval {
        let c = CInterval::new(
            Interval::point_bf(self.re.clone(), self.prec),
            Interval::point_bf(self.im.clone(), self.prec),
        );
        let r = Interval::point_bf(self.radius.clone(), self.prec);
        let m = c.abs();
        Interval::from_parts(m.sub(&r).clamp_nonneg().lo().clone(), m.add(&r).hi().clone(), self.prec)
    }

    /// |centre|² at nearest rounding, the ordering key.
    fn modulus_key(&self) -> BigFloat {
        let a = bf_mul(&self.re, &self.re, self.prec, N);
        let b = bf_mul(&self.im, &self.im, self.prec, N);
        bf_add(&a, &b, self.prec, N)
    }

    pub fn center_f64(&self) -> (f64, f64) {
        (super::ext::bf_to_f64(&self.re, N), super::ext::bf_to_f64(&self.im, N))
    }

    pub fn radius_f64(&self) -> f64 {
        super::ext::bf_to_f64(&self.radius, Rounding::Up)
    }

    pub fn precision_bits(&self) -> usize {
        self.prec
    }

    fn to_root(&self) -> ComplexRoot {
        ComplexRoot {
            re: ExtReal::from_raw(self.re.clone(), self.prec, N),
            im: ExtReal::from_raw(self.im.clone(), self.prec, N),
            error_radius: ExtReal::from_raw(self.radius.clone(), self.prec, Rounding::Up),
        }
    }
}

pub(crate) fn order_boxes(a: &RootBox, b: &RootBox) -> Ordering {
    bf_cmp(&b.modulus_key(), &a.modulus_key())
        .then_with(|| bf_cmp(&b.re, &a.re))
        .then_with(|| bf_cmp(&b.im, &a.im))
}

/// All deg(f) roots, repeated by multiplicity, each with error radius at most
/// 2^(−p/2)·max(1, |ζ|). Precision is doubled on demand up to the ceiling.
pub fn poly_roots(f: &IntPolynomial, precision_bits: usize) -> Result<ComplexList> {
    let boxes = certified_roots(f, precision_bits)?;
    let mut values = Vec::with_capacity(f.degree());
    for b in &boxes {
        for _ in 0..b.multiplicity {
            values.push(b.to_root());
        }
    }
    Ok(ComplexList { values })
}

/// Distinct certified roots with multiplicities, sorted like [`ComplexList`].
pub fn certified_roots(f: &IntPolynomial, precision_bits: usize) -> Result<Vec<RootBox>> {
    if f.is_zero() {
        return Err(Error::Domain("the zero polynomial has no finite root set".into()));
    }
    escalate(precision_bits, |p| certified_roots_at(f, p))
}

/// Runs `attempt` at p, 2p, ... up to the precision ceiling while it reports
/// an inconclusive result.
pub(crate) fn escalate<T>(precision_bits: usize, mut attempt: impl FnMut(usize) -> Result<T>) -> Result<T> {
    let max = max_precision_bits();
    let mut p = normalize_precision(precision_bits).min(max);
    loop {
        match attempt(p) {
            Err(Error::Inconclusive { reason, .. }) => {
                if p >= max {
                    return Err(Error::PrecisionExhausted { max_bits: max, reason });
                }
                p = (2 * p).min(max);
            }
            other => return other,
        }
    }
}

fn certified_roots_at(f: &IntPolynomial, p: usize) -> Result<Vec<RootBox>> {
    let mut boxes = Vec::new();
    let z = f.zero_root_multiplicity();
    if z > 0 {
        boxes.push(RootBox::exact_zero(z, p));
    }
    let g = f.strip_zero_roots();
    if g.degree() > 0 {
        let factors = if g.is_squarefree() {
            vec![(g.primitive(), 1)]
        } else {
            g.squarefree_factors()
        };
        for (a, m) in factors {
            for mut b in squarefree_roots(&a, p)? {
                b.multiplicity = m;
                boxes.push(b);
            }
        }
    }
    boxes.sort_by(order_boxes);
    Ok(boxes)
}

// ---------------------------------------------------------------------------
// complex nearest-rounded arithmetic for the iteration

#[derive(Clone, Debug)]
struct C {
    re: BigFloat,
    im: BigFloat,
}

impl C {
    fn zero(p: usize) -> C {
        C {
            re: bf_zero(p),
            im: bf_zero(p),
        }
    }
    fn one(p: usize) -> C {
        C {
            re: bf_from_f64(1.0, p),
            im: bf_zero(p),
        }
    }
    fn add(&self, o: &C, p: usize) -> C {
        C {
            re: bf_add(&self.re, &o.re, p, N),
            im: bf_add(&self.im, &o.im, p, N),
        }
    }
    fn sub(&self, o: &C, p: usize) -> C {
        C {
            re: bf_sub(&self.re, &o.re, p, N),
            im: bf_sub(&self.im, &o.im, p, N),
        }
    }
    fn mul(&self, o: &C, p: usize) -> C {
        C {
            re: bf_sub(&bf_mul(&self.re, &o.re, p, N), &bf_mul(&self.im, &o.im, p, N), p, N),
            im: bf_add(&bf_mul(&self.re, &o.im, p, N), &bf_mul(&self.im, &o.re, p, N), p, N),
        }
    }
    fn add_real(&self, r: &BigFloat, p: usize) -> C {
        C {
            re: bf_add(&self.re, r, p, N),
            im: self.im.clone(),
        }
    }
    fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }
    fn div(&self, o: &C, p: usize) -> Option<C> {
        let den = bf_add(&bf_mul(&o.re, &o.re, p, N), &bf_mul(&o.im, &o.im, p, N), p, N);
        if den.is_zero() {
            return None;
        }
        let re = bf_add(&bf_mul(&self.re, &o.re, p, N), &bf_mul(&self.im, &o.im, p, N), p, N);
        let im = bf_sub(&bf_mul(&self.im, &o.re, p, N), &bf_mul(&self.re, &o.im, p, N), p, N);
        Some(C {
            re: bf_div(&re, &den, p, N),
            im: bf_div(&im, &den, p, N),
        })
    }
    /// Binary exponent of max(|re|, |im|); None for zero.
    fn magnitude_exp(&self) -> Option<i64> {
        let e = |x: &BigFloat| {
            if x.is_zero() {
                None
            } else {
                x.exponent().map(|e| e as i64)
            }
        };
        match (e(&self.re), e(&self.im)) {
            (Some(a), Some(b)) => Some(a.max(b)),
            (a, b) => a.or(b),
        }
    }
    fn with_precision(&self, p: usize) -> C {
        let lift = |x: &BigFloat| {
            let mut y = x.clone();
            if y.precision().unwrap_or(0) < p {
                y.set_precision(p, astro_float::RoundingMode::ToEven)
                    .expect("valid precision");
            }
            y.set_inexact(false);
            y
        };
        C {
            re: lift(&self.re),
            im: lift(&self.im),
        }
    }
}

fn log2_abs_approx(c: &BigInt) -> f64 {
    let bits = c.bits();
    if bits <= 1000 {
        let f = c.abs().to_string().parse::<f64>().unwrap_or(f64::MAX);
        return f.log2();
    }
    let shift = bits - 60;
    let top: BigInt = c.abs() >> shift;
    (top.to_string().parse::<f64>().unwrap_or(1.0)).log2() + shift as f64
}

/// Starting points on circles whose radii come from the upper convex hull of
/// (i, log2|aᵢ|).
fn seeds(a: &[BigInt], p: usize) -> Vec<C> {
    let n = a.len() - 1;
    let pts: Vec<(usize, f64)> = a
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(i, c)| (i, log2_abs_approx(c)))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross = (x2 as f64 - x1 as f64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as f64 - x1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(n);
    for (seg, w) in hull.windows(2).enumerate() {
        let (i, li) = w[0];
        let (j, lj) = w[1];
        let k = j - i;
        let log_r = (li - lj) / k as f64;
        let int = log_r.floor();
        let frac = log_r - int;
        let scale = pow2(int as i64);
        for t in 0..k {
            let ang = std::f64::consts::TAU * t as f64 / k as f64 + 0.4 + 0.7 * seg as f64;
            let mant = frac.exp2();
            let re = bf_mul(&bf_from_f64(mant * ang.cos(), p), &scale, p, N);
            let im = bf_mul(&bf_from_f64(mant * ang.sin(), p), &scale, p, N);
            out.push(C { re, im });
        }
    }
    debug_assert_eq!(out.len(), n);
    out
}

fn horner_with_derivative(coef: &[BigFloat], z: &C, p: usize) -> (C, C) {
    let n = coef.len() - 1;
    let mut v = C {
        re: coef[n].clone(),
        im: bf_zero(p),
    };
    let mut dv = C::zero(p);
    for k in (0..n).rev() {
        dv = dv.mul(z, p).add(&v, p);
        v = v.mul(z, p).add_real(&coef[k], p);
    }
    (v, dv)
}

/// Aberth–Ehrlich sweeps until every correction is below 2^-tol_bits
/// relative to its root.
fn aberth(coef: &[BigFloat], z: &mut [C], p: usize, tol_bits: i64, max_iter: usize) -> bool {
    let n = z.len();
    for _ in 0..max_iter {
        let mut converged = true;
        for i in 0..n {
            let (v, dv) = horner_with_derivative(coef, &z[i], p);
            if v.is_zero() {
                continue;
            }
            let Some(newton) = v.div(&dv, p) else {
                // stationary point: nudge and retry next sweep
                z[i] = z[i].add_real(&pow2(z[i].magnitude_exp().unwrap_or(0) - 20), p);
                converged = false;
                continue;
            };
            let one = C::one(p);
            let mut s = C::zero(p);
            for j in 0..n {
                if j != i {
                    if let Some(inv) = one.div(&z[i].sub(&z[j], p), p) {
                        s = s.add(&inv, p);
                    }
                }
            }
            let den = one.sub(&newton.mul(&s, p), p);
            let w = newton.div(&den, p).unwrap_or(newton);
            z[i] = z[i].sub(&w, p);
            let small = match (w.magnitude_exp(), z[i].magnitude_exp()) {
                (None, _) => true,
                (Some(ew), Some(ez)) => ew - ez < -tol_bits,
                (Some(ew), None) => ew < -tol_bits,
            };
            converged &= small;
        }
        if converged {
            return true;
        }
    }
    false
}

/// Snap nearly-real approximations onto the axis and pair the rest into
/// exact conjugates, which the real coefficients guarantee for the roots.
fn symmetrize(z: &mut [C], p: usize) {
    let snap = -(p as i64) / 2;
    let mut upper = Vec::new();
    let mut lower = Vec::new();
    for (i, c) in z.iter_mut().enumerate() {
        let near_real = match (c.im.is_zero(), c.im.exponent(), c.magnitude_exp()) {
            (true, _, _) => true,
            (false, Some(ei), Some(ez)) => (ei as i64) - ez < snap,
            _ => false,
        };
        if near_real {
            c.im = bf_zero(p);
        } else if c.im.is_positive() {
            upper.push(i);
        } else {
            lower.push(i);
        }
    }
    if upper.len() != lower.len() {
        return;
    }
    let mut free = lower;
    for &i in &upper {
        let conj = C {
            re: z[i].re.clone(),
            im: z[i].im.neg(),
        };
        let (pos, _) = free
            .iter()
            .enumerate()
            .map(|(k, &j)| {
                let d = z[j].sub(&conj, p);
                (
                    k,
                    bf_add(&bf_mul(&d.re, &d.re, p, N), &bf_mul(&d.im, &d.im, p, N), p, N),
                )
            })
            .min_by(|a, b| bf_cmp(&a.1, &b.1))
            .expect("as many lower as upper roots");
        let j = free.swap_remove(pos);
        z[j] = conj;
    }
}

fn squarefree_roots(g: &IntPolynomial, p: usize) -> Result<Vec<RootBox>> {
    let n = g.degree();
    if n == 1 {
        // −a₀/a₁ exactly enclosed
        let q = num_rational::BigRational::new(-g.coeff(0), g.coeff(1));
        let iv = Interval::from_rational(&q, p);
        let mid = iv.mid();
        let w = iv.width();
        return Ok(vec![RootBox {
            re: mid.value().clone(),
            im: bf_zero(p),
            radius: w.value().clone(),
            multiplicity: 1,
            real: true,
            prec: p,
        }]);
    }
    let coeffs = g.coeffs();
    let seed_coef: Vec<BigFloat> = coeffs.iter().map(|c| bf_from_bigint(c, SEED_PRECISION, N)).collect();
    let mut z = seeds(coeffs, SEED_PRECISION);
    aberth(
        &seed_coef,
        &mut z,
        SEED_PRECISION,
        SEED_TOLERANCE_BITS,
        MAX_SEED_ITERATIONS,
    );
    let coef: Vec<BigFloat> = coeffs.iter().map(|c| bf_from_bigint(c, p, N)).collect();
    let mut z: Vec<C> = z.iter().map(|c| c.with_precision(p)).collect();
    aberth(&coef, &mut z, p, p as i64 - 12, MAX_REFINE_ITERATIONS);
    symmetrize(&mut z, p);
    certify(g, &z, p)
}

fn certify(g: &IntPolynomial, z: &[C], p: usize) -> Result<Vec<RootBox>> {
    let n = z.len();
    let coef: Vec<Interval> = g.coeffs().iter().map(|c| Interval::from_bigint(c, p)).collect();
    let lc = CInterval::real(coef[n].clone());
    let pts: Vec<CInterval> = z
        .iter()
        .map(|c| CInterval::new(Interval::point_bf(c.re.clone(), p), Interval::point_bf(c.im.clone(), p)))
        .collect();
    let nn = Interval::from_i64(n as i64, p);
    let mut radius = Vec::with_capacity(n);
    for i in 0..n {
        let mut val = CInterval::real(coef[n].clone());
        for k in (0..n).rev() {
            val = val.mul(&pts[i]).add(&CInterval::real(coef[k].clone()));
        }
        let mut den = lc.clone();
        for j in 0..n {
            if j != i {
                den = den.mul(&pts[i].sub(&pts[j]));
            }
        }
        let w = val
            .div(&den)
            .ok_or_else(|| Error::inconclusive(p, format!("coincident root approximations for {g}")))?;
        radius.push(w.abs().mul(&nn).hi().clone());
    }
    // distances between centres, as intervals
    let dist = |i: usize, j: usize| pts[i].sub(&pts[j]).abs();
    let mut comp: Vec<usize> = (0..n).collect();
    fn find(c: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while c[r] != r {
            r = c[r];
        }
        c[i] = r;
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            let reach = bf_add(&radius[i], &radius[j], p, Rounding::Up);
            if bf_cmp(dist(i, j).lo(), &reach) != Ordering::Greater {
                let (a, b) = (find(&mut comp, i), find(&mut comp, j));
                comp[a] = b;
            }
        }
    }
    let roots: Vec<usize> = (0..n).map(|i| find(&mut comp, i)).collect();
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let members: Vec<usize> = (0..n).filter(|&j| roots[j] == roots[i]).collect();
        let singleton = members.len() == 1;
        let r = if singleton {
            radius[i].clone()
        } else {
            members.iter().fold(radius[i].clone(), |acc, &j| {
                let reach = bf_add(dist(i, j).hi(), &radius[j], p, Rounding::Up);
                super::ext::bf_max(&acc, &reach)
            })
        };
        // relative acceptance: r ≤ 2^(−p/2)·max(1, |z|)
        let scale = match z[i].magnitude_exp() {
            Some(e) if e > 0 => e - 1,
            _ => 0,
        };
        let limit = pow2(scale - (p as i64) / 2);
        if bf_cmp(&r, &limit) == Ordering::Greater || r.is_nan() {
            return Err(Error::inconclusive(
                p,
                format!("root radius above 2^-{} relative for {g}", p / 2),
            ));
        }
        out.push(RootBox {
            re: z[i].re.clone(),
            im: z[i].im.clone(),
            radius: r,
            multiplicity: 1,
            real: singleton && z[i].im.is_zero(),
            prec: p,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn roots(asc: &[i64]) -> Vec<(f64, f64)> {
        poly_roots(&IntPolynomial::from_i64(asc), 256).unwrap().approx()
    }

    #[test]
    fn documented_examples() {
        assert_eq!(roots(&[-1, 0, 1]), vec![(1.0, 0.0), (-1.0, 0.0)]);
        assert_eq!(roots(&[2, -3, 1]), vec![(2.0, 0.0), (1.0, 0.0)]);
        assert_eq!(roots(&[1, 0, 1]), vec![(0.0, 1.0), (0.0, -1.0)]);
        assert!(matches!(poly_roots(&IntPolynomial::zero(), 256), Err(Error::Domain(_))));
    }

    #[test]
    fn multiplicities_are_repeated() {
        // x^2 (x-1)^3 (x+2)
        let f = IntPolynomial::from_i64(&[0, 0, 1])
            .mul(
                &IntPolynomial::from_i64(&[-1, 1])
                    .mul(&IntPolynomial::from_i64(&[-1, 1]))
                    .mul(&IntPolynomial::from_i64(&[-1, 1])),
            )
            .mul(&IntPolynomial::from_i64(&[2, 1]));
        let r = poly_roots(&f, 128).unwrap().approx();
        assert_eq!(
            r,
            vec![(-2.0, 0.0), (1.0, 0.0), (1.0, 0.0), (1.0, 0.0), (0.0, 0.0), (0.0, 0.0)]
        );
    }

    #[test]
    fn radii_meet_the_requested_precision() {
        let f = IntPolynomial::from_descending(&[1, -7, 14, -8]);
        let l = poly_roots(&f, 256).unwrap();
        for r in &l.values {
            let mag = r.re.to_f64().abs().max(1.0);
            assert!(r.error_radius.to_f64() <= mag * 2f64.powi(-128));
        }
    }

    #[test]
    fn huge_coefficients_do_not_overflow() {
        // (x - 2^600)(x - 1)
        let big = BigInt::from(1) << 600usize;
        let f = IntPolynomial::new(vec![big.clone(), -(big + BigInt::from(1)), BigInt::from(1)]);
        let b = certified_roots(&f, 256).unwrap();
        assert_eq!(b.len(), 2);
        assert!(b[0].real && b[1].real);
        assert_eq!(b[0].re.exponent(), Some(601));
    }

    #[test]
    fn realness_is_certified_only_for_real_roots() {
        let b = certified_roots(&IntPolynomial::from_i64(&[-2, 0, 0, 1]), 128).unwrap();
        assert_eq!(b.iter().filter(|r| r.real).count(), 1);
    }

    proptest! {
        #[test]
        fn vieta_sum_and_product(c in prop::collection::vec(-3i64..=3, 2..6)) {
            let f = IntPolynomial::from_i64(&c);
            prop_assume!(f.degree() >= 1);
            let d = f.degree();
            let l = poly_roots(&f, 192).unwrap();
            prop_assert_eq!(l.len(), d);
            let lead = f.leading().to_string().parse::<f64>().unwrap();
            let sum: f64 = l.approx().iter().map(|r| r.0).sum();
            let expect = -f.coeff(d - 1).to_string().parse::<f64>().unwrap() / lead;
            prop_assert!((sum - expect).abs() < 1e-9, "sum {sum} vs {expect}");
            let (mut pr, mut pi) = (1.0f64, 0.0f64);
            for (a, b) in l.approx() {
                let t = pr * a - pi * b;
                pi = pr * b + pi * a;
                pr = t;
            }
            let sign = if d % 2 == 0 { 1.0 } else { -1.0 };
            let expect = sign * f.coeff(0).to_string().parse::<f64>().unwrap() / lead;
            prop_assert!((pr - expect).abs() < 1e-9 && pi.abs() < 1e-9);
        }
    }
}
