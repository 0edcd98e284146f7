//! Extended-precision reals with recorded rounding direction, and the real /
//! complex interval arithmetic built on top of them.
//!
//! The backend rounds to nearest and flags inexact results. Directed rounding
//! is obtained by stepping an inexact result one ulp outward, which always
//! lands on the requested side because the nearest result is within half an
//! ulp of the exact value.

use std::cell::RefCell;
use std::cmp::Ordering;
use std::fmt;

use astro_float::{BigFloat, Consts, RoundingMode, Sign, Word};
use num_bigint::{BigInt, BigUint, Sign as BigSign};
use num_rational::BigRational;
use num_traits::Zero;
use serde::Serialize;

pub const DEFAULT_PRECISION_BITS: usize = 256;
pub const DEFAULT_MAX_PRECISION_BITS: usize = 4096;
pub const MIN_PRECISION_BITS: usize = 64;
pub const MAX_PRECISION_ENV: &str = "CONDBOUND_MAX_PRECISION_BITS";

const WORD_BITS: usize = 64;
const NEAREST: RoundingMode = RoundingMode::ToEven;

thread_local! {
    static CONSTS: RefCell<Consts> = RefCell::new(Consts::new().expect("constants cache"));
}

/// Precision ceiling for on-demand doubling; `CONDBOUND_MAX_PRECISION_BITS`
/// overrides the default of 4096 bits.
pub fn max_precision_bits() -> usize {
    std::env::var(MAX_PRECISION_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .map(normalize_precision)
        .unwrap_or(DEFAULT_MAX_PRECISION_BITS)
}

/// Rounds a requested precision up to whole words, never below 64 bits.
pub fn normalize_precision(p: usize) -> usize {
    let p = p.max(MIN_PRECISION_BITS);
    p.div_ceil(WORD_BITS) * WORD_BITS
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Rounding {
    Up,
    Down,
    Nearest,
}

// ---------------------------------------------------------------------------
// raw BigFloat helpers

fn clean(mut x: BigFloat) -> BigFloat {
    x.set_inexact(false);
    x
}

fn is_finite(x: &BigFloat) -> bool {
    !x.is_nan() && !x.is_inf()
}

/// 2^k as an exact BigFloat.
pub(crate) fn pow2(k: i64) -> BigFloat {
    let mut one = BigFloat::from_word(1, WORD_BITS);
    // 1 = 0.1b * 2^1
    let e = 1i64 + k;
    let e = e.clamp(astro_float::EXPONENT_MIN as i64, astro_float::EXPONENT_MAX as i64);
    one.set_exponent(e as astro_float::Exponent);
    clean(one)
}

fn ulp(x: &BigFloat) -> BigFloat {
    match x.exponent() {
        Some(e) if !x.is_zero() => pow2(e as i64 - x.precision().unwrap_or(WORD_BITS) as i64),
        _ => clean(BigFloat::min_positive(WORD_BITS)),
    }
}

fn step_up(x: &BigFloat) -> BigFloat {
    let p = x.precision().unwrap_or(WORD_BITS).max(WORD_BITS);
    clean(x.add(&ulp(x), p + WORD_BITS, NEAREST))
}

fn step_down(x: &BigFloat) -> BigFloat {
    let p = x.precision().unwrap_or(WORD_BITS).max(WORD_BITS);
    clean(x.sub(&ulp(x), p + WORD_BITS, NEAREST))
}

/// Converts a nearest-rounded result into the requested direction.
fn directed(r: BigFloat, dir: Rounding) -> BigFloat {
    if !is_finite(&r) || !r.inexact() {
        return clean(r);
    }
    match dir {
        Rounding::Nearest => clean(r),
        Rounding::Up => step_up(&r),
        Rounding::Down => step_down(&r),
    }
}

pub(crate) fn bf_from_biguint(u: &BigUint, negative: bool, p: usize, dir: Rounding) -> BigFloat {
    if u.is_zero() {
        return clean(BigFloat::from_word(0, p));
    }
    let words: Vec<Word> = u.to_u64_digits();
    let sign = if negative { Sign::Neg } else { Sign::Pos };
    let exact = BigFloat::from_words(&words, sign, (words.len() * WORD_BITS) as astro_float::Exponent);
    let mut r = exact;
    if r.precision().unwrap_or(0) > p {
        // set_precision marks the value inexact when bits are dropped
        r.set_precision(p, NEAREST).expect("valid precision");
        directed(r, dir)
    } else {
        clean(r)
    }
}

pub(crate) fn bf_from_bigint(v: &BigInt, p: usize, dir: Rounding) -> BigFloat {
    bf_from_biguint(v.magnitude(), v.sign() == BigSign::Minus, p, dir)
}

pub(crate) fn bf_from_i64(v: i64, p: usize) -> BigFloat {
    clean(BigFloat::from_i64(v, p.max(WORD_BITS)))
}

pub(crate) fn bf_from_f64(v: f64, p: usize) -> BigFloat {
    clean(BigFloat::from_f64(v, p.max(WORD_BITS)))
}

pub(crate) fn bf_zero(p: usize) -> BigFloat {
    clean(BigFloat::from_word(0, p.max(WORD_BITS)))
}

pub(crate) fn bf_add(a: &BigFloat, b: &BigFloat, p: usize, dir: Rounding) -> BigFloat {
    directed(a.add(b, p, NEAREST), dir)
}
pub(crate) fn bf_sub(a: &BigFloat, b: &BigFloat, p: usize, dir: Rounding) -> BigFloat {
    directed(a.sub(b, p, NEAREST), dir)
}
pub(crate) fn bf_mul(a: &BigFloat, b: &BigFloat, p: usize, dir: Rounding) -> BigFloat {
    directed(a.mul(b, p, NEAREST), dir)
}
pub(crate) fn bf_div(a: &BigFloat, b: &BigFloat, p: usize, dir: Rounding) -> BigFloat {
    directed(a.div(b, p, NEAREST), dir)
}
pub(crate) fn bf_sqrt(a: &BigFloat, p: usize, dir: Rounding) -> BigFloat {
    directed(a.sqrt(p, NEAREST), dir)
}
pub(crate) fn bf_log2(a: &BigFloat, p: usize, dir: Rounding) -> BigFloat {
    let r = CONSTS.with(|cc| a.log2(p, NEAREST, &mut cc.borrow_mut()));
    directed(r, dir)
}
pub(crate) fn bf_exp2(a: &BigFloat, p: usize, dir: Rounding) -> BigFloat {
    // 2^a = e^(a ln 2); two correctly rounded steps, widened by one extra ulp
    let r = CONSTS.with(|cc| {
        let cc = &mut cc.borrow_mut();
        let ln2 = bf_from_i64(2, p + WORD_BITS).ln(p + WORD_BITS, NEAREST, cc);
        a.mul(&ln2, p + WORD_BITS, NEAREST).exp(p, NEAREST, cc)
    });
    let r = directed(r, dir);
    match dir {
        Rounding::Up => step_up(&r),
        Rounding::Down => step_down(&r),
        Rounding::Nearest => r,
    }
}

pub(crate) fn bf_cmp(a: &BigFloat, b: &BigFloat) -> Ordering {
    a.partial_cmp(b).unwrap_or(Ordering::Equal)
}

pub(crate) fn bf_max(a: &BigFloat, b: &BigFloat) -> BigFloat {
    if bf_cmp(a, b) == Ordering::Less {
        b.clone()
    } else {
        a.clone()
    }
}

pub(crate) fn bf_min(a: &BigFloat, b: &BigFloat) -> BigFloat {
    if bf_cmp(a, b) == Ordering::Greater {
        b.clone()
    } else {
        a.clone()
    }
}

fn pow2_f64(k: i64) -> f64 {
    if k > 1023 {
        f64::INFINITY
    } else if k >= -1022 {
        f64::from_bits(((k + 1023) as u64) << 52)
    } else if k >= -1074 {
        f64::from_bits(1u64 << (k + 1074))
    } else {
        0.0
    }
}

/// Directed conversion to f64.
pub(crate) fn bf_to_f64(x: &BigFloat, dir: Rounding) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    if x.is_inf_pos() {
        return f64::INFINITY;
    }
    if x.is_inf_neg() {
        return f64::NEG_INFINITY;
    }
    if x.is_zero() {
        return 0.0;
    }
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite value");
    let top = *words.last().expect("non-empty mantissa");
    let shift = e as i64 - WORD_BITS as i64;
    // split the scaling so the intermediate never over/underflows spuriously
    let mut f = top as f64;
    if shift < -1000 {
        f *= pow2_f64(-1000);
        f *= pow2_f64(shift + 1000);
    } else {
        f *= pow2_f64(shift);
    }
    if sign == Sign::Neg {
        f = -f;
    }
    if dir == Rounding::Nearest || f.is_infinite() && f.is_sign_positive() && dir == Rounding::Up {
        return f;
    }
    if f.is_infinite() {
        // magnitude beyond f64: clamp toward the requested side
        return match (f.is_sign_positive(), dir) {
            (true, Rounding::Down) => f64::MAX,
            (false, Rounding::Up) => f64::MIN,
            _ => f,
        };
    }
    let back = BigFloat::from_f64(f, WORD_BITS);
    match (bf_cmp(&back, x), dir) {
        (Ordering::Greater, Rounding::Down) => f.next_down(),
        (Ordering::Less, Rounding::Up) => f.next_up(),
        _ => f,
    }
}

/// Exact floor of a finite BigFloat.
pub(crate) fn bf_floor_bigint(x: &BigFloat) -> BigInt {
    bf_to_bigint(x, false)
}

/// Exact ceiling of a finite BigFloat.
pub(crate) fn bf_ceil_bigint(x: &BigFloat) -> BigInt {
    bf_to_bigint(x, true)
}

fn bf_to_bigint(x: &BigFloat, ceil: bool) -> BigInt {
    if x.is_zero() || !is_finite(x) {
        return BigInt::zero();
    }
    let (words, _, sign, e, _) = x.as_raw_parts().expect("finite value");
    let mag = BigUint::from_slice(
        &words
            .iter()
            .flat_map(|w| [(*w & 0xffff_ffff) as u32, (*w >> 32) as u32])
            .collect::<Vec<_>>(),
    );
    let shift = e as i64 - (words.len() * WORD_BITS) as i64;
    let negative = sign == Sign::Neg;
    let (int_part, frac_nonzero) = if shift >= 0 {
        (mag << shift as usize, false)
    } else {
        let s = (-shift) as usize;
        let q = &mag >> s;
        let rem_nonzero = (&q << s) != mag;
        (q, rem_nonzero)
    };
    let mut v = BigInt::from_biguint(if negative { BigSign::Minus } else { BigSign::Plus }, int_part);
    if frac_nonzero {
        // truncation moved toward zero; fix up toward the requested side
        if ceil && !negative {
            v += 1;
        } else if !ceil && negative {
            v -= 1;
        }
    }
    v
}

// ---------------------------------------------------------------------------
// ExtReal

/// Arbitrary-precision real tagged with its precision and the direction in
/// which it was rounded.
#[derive(Clone, Debug)]
pub struct ExtReal {
    value: BigFloat,
    precision_bits: usize,
    rounding: Rounding,
}

impl ExtReal {
    pub(crate) fn from_raw(value: BigFloat, precision_bits: usize, rounding: Rounding) -> Self {
        ExtReal {
            value,
            precision_bits: normalize_precision(precision_bits),
            rounding,
        }
    }

    pub fn zero(precision_bits: usize) -> Self {
        Self::from_raw(bf_zero(precision_bits), precision_bits, Rounding::Nearest)
    }

    pub fn from_i64(v: i64, precision_bits: usize) -> Self {
        Self::from_raw(bf_from_i64(v, precision_bits), precision_bits, Rounding::Nearest)
    }

    /// Exact when `v` is representable as a double.
    pub fn from_f64(v: f64, precision_bits: usize) -> Self {
        Self::from_raw(bf_from_f64(v, precision_bits), precision_bits, Rounding::Nearest)
    }

    pub fn from_bigint(v: &BigInt, precision_bits: usize, rounding: Rounding) -> Self {
        let p = normalize_precision(precision_bits);
        Self::from_raw(bf_from_bigint(v, p, rounding), p, rounding)
    }

    pub fn from_rational(q: &BigRational, precision_bits: usize, rounding: Rounding) -> Self {
        let iv = Interval::from_rational(q, precision_bits);
        match rounding {
            Rounding::Down => iv.lower(),
            Rounding::Up => iv.upper(),
            Rounding::Nearest => iv.mid(),
        }
    }

    pub fn value(&self) -> &BigFloat {
        &self.value
    }

    pub fn precision_bits(&self) -> usize {
        self.precision_bits
    }

    pub fn rounding(&self) -> Rounding {
        self.rounding
    }

    /// Converts to f64, rounding in this value's own direction.
    pub fn to_f64(&self) -> f64 {
        bf_to_f64(&self.value, self.rounding)
    }

    pub fn to_f64_with(&self, rounding: Rounding) -> f64 {
        bf_to_f64(&self.value, rounding)
    }

    pub fn is_zero(&self) -> bool {
        self.value.is_zero()
    }

    pub fn is_finite(&self) -> bool {
        is_finite(&self.value)
    }

    pub fn is_negative(&self) -> bool {
        !self.value.is_zero() && self.value.is_negative()
    }

    /// log2 of a positive value, rounded in the given direction.
    pub fn log2(&self, rounding: Rounding) -> ExtReal {
        Self::from_raw(
            bf_log2(&self.value, self.precision_bits, rounding),
            self.precision_bits,
            rounding,
        )
    }

    /// Re-rounds this value to another precision in the given direction.
    pub fn with_precision(&self, precision_bits: usize, rounding: Rounding) -> ExtReal {
        let p = normalize_precision(precision_bits);
        let mut v = self.value.clone();
        if v.precision().unwrap_or(0) > p {
            v.set_precision(p, NEAREST).expect("valid precision");
            v = directed(v, rounding);
        }
        Self::from_raw(v, p, rounding)
    }

    pub fn floor(&self) -> BigInt {
        bf_floor_bigint(&self.value)
    }

    pub fn ceil(&self) -> BigInt {
        bf_ceil_bigint(&self.value)
    }
}

impl PartialEq for ExtReal {
    fn eq(&self, other: &Self) -> bool {
        self.value == other.value
    }
}

impl PartialOrd for ExtReal {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl fmt::Display for ExtReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_f64_with(Rounding::Nearest))
    }
}

impl Serialize for ExtReal {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_f64(self.to_f64())
    }
}

// ---------------------------------------------------------------------------
// Interval

/// Closed real interval `[lo, hi]` with outward-rounded endpoints.
#[derive(Clone, Debug)]
pub struct Interval {
    lo: BigFloat,
    hi: BigFloat,
    prec: usize,
}

impl Interval {
    pub(crate) fn from_parts(lo: BigFloat, hi: BigFloat, prec: usize) -> Self {
        debug_assert!(bf_cmp(&lo, &hi) != Ordering::Greater || lo.is_nan() || hi.is_nan());
        Interval { lo, hi, prec }
    }

    pub fn point(v: &ExtReal) -> Self {
        Interval {
            lo: v.value.clone(),
            hi: v.value.clone(),
            prec: v.precision_bits,
        }
    }

    pub(crate) fn point_bf(v: BigFloat, prec: usize) -> Self {
        Interval {
            lo: v.clone(),
            hi: v,
            prec: normalize_precision(prec),
        }
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        Self::point_bf(bf_from_i64(v, prec), prec)
    }

    pub fn from_bigint(v: &BigInt, prec: usize) -> Self {
        let p = normalize_precision(prec);
        Interval {
            lo: bf_from_bigint(v, p, Rounding::Down),
            hi: bf_from_bigint(v, p, Rounding::Up),
            prec: p,
        }
    }

    pub fn from_rational(q: &BigRational, prec: usize) -> Self {
        let p = normalize_precision(prec);
        let num = Self::from_bigint(q.numer(), p);
        let den = Self::from_bigint(q.denom(), p);
        num.div(&den).expect("rational denominator is positive")
    }

    /// `[mid - rad, mid + rad]`.
    pub fn ball(mid: &BigFloat, rad: &BigFloat, prec: usize) -> Self {
        let p = normalize_precision(prec);
        Interval {
            lo: bf_sub(mid, rad, p, Rounding::Down),
            hi: bf_add(mid, rad, p, Rounding::Up),
            prec: p,
        }
    }

    pub fn entire(prec: usize) -> Self {
        Interval {
            lo: astro_float::INF_NEG,
            hi: astro_float::INF_POS,
            prec: normalize_precision(prec),
        }
    }

    pub fn precision_bits(&self) -> usize {
        self.prec
    }

    pub fn lower(&self) -> ExtReal {
        ExtReal::from_raw(self.lo.clone(), self.prec, Rounding::Down)
    }

    pub fn upper(&self) -> ExtReal {
        ExtReal::from_raw(self.hi.clone(), self.prec, Rounding::Up)
    }

    pub(crate) fn lo(&self) -> &BigFloat {
        &self.lo
    }

    pub(crate) fn hi(&self) -> &BigFloat {
        &self.hi
    }

    pub fn mid(&self) -> ExtReal {
        let s = self.lo.add(&self.hi, self.prec, NEAREST);
        let two = bf_from_i64(2, self.prec);
        ExtReal::from_raw(clean(s.div(&two, self.prec, NEAREST)), self.prec, Rounding::Nearest)
    }

    /// Upper bound on `hi - lo`.
    pub fn width(&self) -> ExtReal {
        ExtReal::from_raw(
            bf_sub(&self.hi, &self.lo, self.prec, Rounding::Up),
            self.prec,
            Rounding::Up,
        )
    }

    pub fn contains_zero(&self) -> bool {
        !self.lo.is_positive() && !self.hi.is_negative() || self.lo.is_zero() || self.hi.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.lo.is_positive() && !self.lo.is_zero()
    }

    pub fn is_bounded(&self) -> bool {
        is_finite(&self.lo) && is_finite(&self.hi)
    }

    /// `self <= other` holds for every pair of members.
    pub fn certainly_le(&self, other: &Interval) -> bool {
        bf_cmp(&self.hi, &other.lo) != Ordering::Greater
    }

    /// `self < other` holds for every pair of members.
    pub fn certainly_lt(&self, other: &Interval) -> bool {
        bf_cmp(&self.hi, &other.lo) == Ordering::Less
    }

    pub fn overlaps(&self, other: &Interval) -> bool {
        !(self.certainly_lt(other) || other.certainly_lt(self))
    }

    fn p2(&self, other: &Interval) -> usize {
        self.prec.max(other.prec)
    }

    pub fn add(&self, other: &Interval) -> Interval {
        let p = self.p2(other);
        Interval {
            lo: bf_add(&self.lo, &other.lo, p, Rounding::Down),
            hi: bf_add(&self.hi, &other.hi, p, Rounding::Up),
            prec: p,
        }
    }

    pub fn sub(&self, other: &Interval) -> Interval {
        let p = self.p2(other);
        Interval {
            lo: bf_sub(&self.lo, &other.hi, p, Rounding::Down),
            hi: bf_sub(&self.hi, &other.lo, p, Rounding::Up),
            prec: p,
        }
    }

    pub fn neg(&self) -> Interval {
        Interval {
            lo: clean(self.hi.neg()),
            hi: clean(self.lo.neg()),
            prec: self.prec,
        }
    }

    pub fn mul(&self, other: &Interval) -> Interval {
        let p = self.p2(other);
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo: Option<BigFloat> = None;
        let mut hi: Option<BigFloat> = None;
        for (a, b) in cands {
            let d = bf_mul(a, b, p, Rounding::Down);
            let u = bf_mul(a, b, p, Rounding::Up);
            lo = Some(match lo {
                None => d,
                Some(l) => bf_min(&l, &d),
            });
            hi = Some(match hi {
                None => u,
                Some(h) => bf_max(&h, &u),
            });
        }
        Interval {
            lo: lo.expect("four candidates"),
            hi: hi.expect("four candidates"),
            prec: p,
        }
    }

    pub fn scale_i64(&self, k: i64) -> Interval {
        self.mul(&Interval::from_i64(k, self.prec))
    }

    pub fn sqr(&self) -> Interval {
        let p = self.prec;
        let a = self.abs();
        Interval {
            lo: bf_mul(&a.lo, &a.lo, p, Rounding::Down),
            hi: bf_mul(&a.hi, &a.hi, p, Rounding::Up),
            prec: p,
        }
    }

    pub fn abs(&self) -> Interval {
        if !self.lo.is_negative() || self.lo.is_zero() {
            self.clone()
        } else if self.hi.is_negative() && !self.hi.is_zero() {
            self.neg()
        } else {
            let nlo = clean(self.lo.neg());
            Interval {
                lo: bf_zero(self.prec),
                hi: bf_max(&nlo, &self.hi),
                prec: self.prec,
            }
        }
    }

    /// None when the divisor contains zero.
    pub fn div(&self, other: &Interval) -> Option<Interval> {
        if other.contains_zero() {
            return None;
        }
        let p = self.p2(other);
        let cands = [
            (&self.lo, &other.lo),
            (&self.lo, &other.hi),
            (&self.hi, &other.lo),
            (&self.hi, &other.hi),
        ];
        let mut lo: Option<BigFloat> = None;
        let mut hi: Option<BigFloat> = None;
        for (a, b) in cands {
            let d = bf_div(a, b, p, Rounding::Down);
            let u = bf_div(a, b, p, Rounding::Up);
            lo = Some(match lo {
                None => d,
                Some(l) => bf_min(&l, &d),
            });
            hi = Some(match hi {
                None => u,
                Some(h) => bf_max(&h, &u),
            });
        }
        Some(Interval {
            lo: lo.expect("four candidates"),
            hi: hi.expect("four candidates"),
            prec: p,
        })
    }

    /// Square root of the nonnegative part.
    pub fn sqrt(&self) -> Interval {
        let zero = bf_zero(self.prec);
        let lo = if self.lo.is_negative() {
            zero.clone()
        } else {
            self.lo.clone()
        };
        let hi = if self.hi.is_negative() { zero } else { self.hi.clone() };
        Interval {
            lo: bf_sqrt(&lo, self.prec, Rounding::Down),
            hi: bf_sqrt(&hi, self.prec, Rounding::Up),
            prec: self.prec,
        }
    }

    pub fn powi(&self, n: u32) -> Interval {
        let mut acc = Interval::from_i64(1, self.prec);
        for _ in 0..n {
            acc = acc.mul(self);
        }
        acc
    }

    /// log2 of a positive interval; None if the interval reaches zero.
    pub fn log2(&self) -> Option<Interval> {
        if !self.is_positive() {
            return None;
        }
        let lo = bf_log2(&self.lo, self.prec, Rounding::Down);
        let hi = if self.hi.is_inf_pos() {
            self.hi.clone()
        } else {
            bf_log2(&self.hi, self.prec, Rounding::Up)
        };
        Some(Interval {
            lo,
            hi,
            prec: self.prec,
        })
    }

    /// 2^self.
    pub fn exp2(&self) -> Interval {
        Interval {
            lo: bf_exp2(&self.lo, self.prec, Rounding::Down),
            hi: bf_exp2(&self.hi, self.prec, Rounding::Up),
            prec: self.prec,
        }
    }

    pub fn min(&self, other: &Interval) -> Interval {
        Interval {
            lo: bf_min(&self.lo, &other.lo),
            hi: bf_min(&self.hi, &other.hi),
            prec: self.p2(other),
        }
    }

    pub fn max(&self, other: &Interval) -> Interval {
        Interval {
            lo: bf_max(&self.lo, &other.lo),
            hi: bf_max(&self.hi, &other.hi),
            prec: self.p2(other),
        }
    }

    /// Smallest interval containing both.
    pub fn hull(&self, other: &Interval) -> Interval {
        Interval {
            lo: bf_min(&self.lo, &other.lo),
            hi: bf_max(&self.hi, &other.hi),
            prec: self.p2(other),
        }
    }

    /// Intersection with `[0, +inf)`.
    pub fn clamp_nonneg(&self) -> Interval {
        let zero = bf_zero(self.prec);
        Interval {
            lo: bf_max(&self.lo, &zero),
            hi: bf_max(&self.hi, &zero),
            prec: self.prec,
        }
    }

    pub fn to_f64_bounds(&self) -> (f64, f64) {
        (bf_to_f64(&self.lo, Rounding::Down), bf_to_f64(&self.hi, Rounding::Up))
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (lo, hi) = self.to_f64_bounds();
        write!(f, "[{lo:e}, {hi:e}]")
    }
}

// ---------------------------------------------------------------------------
// complex rectangles

/// Rectangular complex interval.
#[derive(Clone, Debug)]
pub struct CInterval {
    pub re: Interval,
    pub im: Interval,
}

impl CInterval {
    pub fn new(re: Interval, im: Interval) -> Self {
        CInterval { re, im }
    }

    pub fn real(re: Interval) -> Self {
        let p = re.prec;
        CInterval {
            re,
            im: Interval::from_i64(0, p),
        }
    }

    pub fn from_i64(v: i64, prec: usize) -> Self {
        Self::real(Interval::from_i64(v, prec))
    }

    pub fn add(&self, o: &CInterval) -> CInterval {
        CInterval {
            re: self.re.add(&o.re),
            im: self.im.add(&o.im),
        }
    }

    pub fn sub(&self, o: &CInterval) -> CInterval {
        CInterval {
            re: self.re.sub(&o.re),
            im: self.im.sub(&o.im),
        }
    }

    pub fn mul(&self, o: &CInterval) -> CInterval {
        CInterval {
            re: self.re.mul(&o.re).sub(&self.im.mul(&o.im)),
            im: self.re.mul(&o.im).add(&self.im.mul(&o.re)),
        }
    }

    pub fn mul_real(&self, k: &Interval) -> CInterval {
        CInterval {
            re: self.re.mul(k),
            im: self.im.mul(k),
        }
    }

    pub fn conj(&self) -> CInterval {
        CInterval {
            re: self.re.clone(),
            im: self.im.neg(),
        }
    }

    /// |z|^2
    pub fn norm_sqr(&self) -> Interval {
        self.re.sqr().add(&self.im.sqr())
    }

    /// |z|
    pub fn abs(&self) -> Interval {
        self.norm_sqr().sqrt()
    }

    /// None when the divisor rectangle may contain zero.
    pub fn div(&self, o: &CInterval) -> Option<CInterval> {
        let den = o.norm_sqr();
        let num = self.mul(&o.conj());
        Some(CInterval {
            re: num.re.div(&den)?,
            im: num.im.div(&den)?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    #[test]
    fn directed_conversion_brackets_thirds() {
        let third = BigRational::new(BigInt::from(1), BigInt::from(3));
        let lo = ExtReal::from_rational(&third, 128, Rounding::Down);
        let hi = ExtReal::from_rational(&third, 128, Rounding::Up);
        assert!(lo < hi);
        // 3*lo < 1 < 3*hi
        let three = bf_from_i64(3, 256);
        let one = bf_from_i64(1, 256);
        assert_eq!(
            bf_cmp(&bf_mul(lo.value(), &three, 512, Rounding::Nearest), &one),
            Ordering::Less
        );
        assert_eq!(
            bf_cmp(&bf_mul(hi.value(), &three, 512, Rounding::Nearest), &one),
            Ordering::Greater
        );
    }

    #[test]
    fn exact_values_stay_exact() {
        let iv = Interval::from_i64(7, 256).mul(&Interval::from_i64(6, 256));
        assert_eq!(iv.lower().to_f64(), 42.0);
        assert_eq!(iv.upper().to_f64(), 42.0);
        let l = Interval::from_i64(8, 256).log2().unwrap();
        assert_eq!(l.to_f64_bounds(), (3.0, 3.0));
    }

    #[test]
    fn sqrt_two_is_bracketed() {
        let s = Interval::from_i64(2, 256).sqrt();
        let (lo, hi) = s.to_f64_bounds();
        assert!(lo <= std::f64::consts::SQRT_2 && std::f64::consts::SQRT_2 <= hi);
        assert!(s.sqr().lower().to_f64() <= 2.0 && s.sqr().upper().to_f64() >= 2.0);
        assert!(!s.sqr().lower().eq(&s.sqr().upper()));
    }

    #[test]
    fn big_integers_round_outward() {
        let big: BigInt = (BigInt::from(1) << 300usize) + 1;
        let lo = ExtReal::from_bigint(&big, 64, Rounding::Down);
        let hi = ExtReal::from_bigint(&big, 64, Rounding::Up);
        assert!(lo.floor() <= big && hi.ceil() >= big);
        assert!(lo < hi);
    }

    #[test]
    fn f64_conversion_is_directed() {
        let third = Interval::from_rational(&BigRational::new(1.into(), 3.into()), 256);
        let (lo, hi) = third.to_f64_bounds();
        assert!(lo < 1.0 / 3.0 || hi > 1.0 / 3.0);
        assert!(lo <= 1.0 / 3.0 && 1.0 / 3.0 <= hi);
        assert_eq!(hi.next_down(), lo);
        let huge = pow2(5000);
        assert_eq!(bf_to_f64(&huge, Rounding::Down), f64::MAX);
        assert_eq!(bf_to_f64(&huge, Rounding::Up), f64::INFINITY);
    }

    #[test]
    fn floor_and_ceil() {
        let x = bf_from_f64(-2.5, 64);
        assert_eq!(bf_floor_bigint(&x), BigInt::from(-3));
        assert_eq!(bf_ceil_bigint(&x), BigInt::from(-2));
        let y = bf_from_f64(1e20, 64);
        assert_eq!(bf_floor_bigint(&y), BigInt::from(100_000_000_000_000_000_000u128));
    }

    #[test]
    fn exp2_encloses() {
        let e = Interval::from_rational(&BigRational::new(1.into(), 2.into()), 128).exp2();
        let (lo, hi) = e.to_f64_bounds();
        assert!(lo <= std::f64::consts::SQRT_2 && std::f64::consts::SQRT_2 <= hi);
    }

    #[test]
    fn precision_normalizes_to_words() {
        assert_eq!(normalize_precision(1), 64);
        assert_eq!(normalize_precision(65), 128);
        assert_eq!(normalize_precision(256), 256);
    }
}
