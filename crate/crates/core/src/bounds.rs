//! A-priori bounds on condition numbers and relative gaps, computed from
//! dimensions and coefficient sizes alone.
//!
//! Everything is evaluated as an enclosure of the log2 of the bound. Upper
//! bounds keep the upper end; lower bounds (on relative gaps) keep the lower
//! end. Either way the stored value is on the conservative side.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numcore::ext::{ExtReal, Interval, DEFAULT_PRECISION_BITS};

/// Which side of the true quantity the bound sits on.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BoundKind {
    /// quantity ≤ bound
    Upper,
    /// quantity ≥ bound
    Lower,
}

/// Parameters a bound was evaluated at.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize)]
pub struct BoundParams {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub m: Option<u64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub d: Option<u64>,
    /// maximal degree of a system
    #[serde(skip_serializing_if = "Option::is_none", rename = "D")]
    pub max_degree: Option<u64>,
    /// number of nonzero coefficients of a system
    #[serde(skip_serializing_if = "Option::is_none", rename = "S")]
    pub support: Option<u64>,
    #[serde(rename = "H", serialize_with = "ser_bigint")]
    pub h: BigInt,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub c: Option<u64>,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

/// log2 of the right-hand side of one of the seven bounds.
#[derive(Clone, Debug, Serialize)]
pub struct Log2Bound {
    pub theorem: u8,
    pub kind: BoundKind,
    /// Rounded up for upper bounds, down for lower bounds.
    pub log2_value: ExtReal,
    pub params: BoundParams,
    /// Set when the formula contains a constant the source leaves
    /// unspecified; such bounds are reported, never asserted.
    pub unspecified_constant: bool,
}

impl Log2Bound {
    /// Re-evaluates the same bound at another precision.
    pub fn at_precision(&self, precision_bits: usize) -> Result<Log2Bound> {
        build(self.theorem, self.params.clone(), precision_bits)
    }

    /// Enclosure of the exact log2 of the bound at the stored precision.
    pub fn enclosure(&self) -> Result<Interval> {
        evaluate(self.theorem, &self.params, self.log2_value.precision_bits())
    }
}

fn lg(v: impl Into<BigInt>, p: usize) -> Interval {
    Interval::from_bigint(&v.into(), p)
        .log2()
        .expect("argument is positive")
}

fn q(num: i64, den: i64, p: usize) -> Interval {
    Interval::from_rational(&BigRational::new(num.into(), den.into()), p)
}

fn int(v: impl Into<BigInt>, p: usize) -> Interval {
    Interval::from_bigint(&v.into(), p)
}

fn need(v: Option<u64>, name: &str) -> Result<u64> {
    match v {
        Some(x) if x >= 1 => Ok(x),
        Some(_) => Err(Error::Domain(format!("{name} must be at least 1"))),
        None => Err(Error::Domain(format!("missing parameter {name}"))),
    }
}

fn kind_of(theorem: u8) -> BoundKind {
    if theorem >= 6 {
        BoundKind::Lower
    } else {
        BoundKind::Upper
    }
}

fn evaluate(theorem: u8, a: &BoundParams, p: usize) -> Result<Interval> {
    if !a.h.is_positive() {
        return Err(Error::Domain(
            "H must be at least 1 (the zero instance is degenerate)".into(),
        ));
    }
    let lh = || lg(a.h.clone(), p);
    Ok(match theorem {
        1 => {
            let n = need(a.n, "n")?;
            q(n as i64 + 2, 2, p).mul(&lg(n, p)).add(&int(n, p).mul(&lh()))
        }
        2 => {
            let (n, m) = (need(a.n, "n")?, need(a.m, "m")?);
            if m < n {
                return Err(Error::Domain(format!("least squares needs m >= n, got m={m}, n={n}")));
            }
            lg(3, p)
                .add(&q(n as i64 + 2, 2, p).mul(&lg(n, p)))
                .add(&q(2 * n as i64 + 1, 2, p).mul(&lg(m, p)))
                .add(&int(2 * n + 1, p).mul(&lh()))
        }
        3 => {
            let n = need(a.n, "n")?;
            let e = 2 * n.pow(3) - 2 * n;
            let inner = int(1, p).add(&q(1, 2, p).mul(&lg(n, p))).add(&lh());
            int(3 * n, p)
                .mul(&lg(n, p))
                .add(&int(2 * n, p))
                .add(&int(e, p).mul(&inner))
        }
        4 => {
            let d = need(a.d, "d")?;
            int(2 * d * d - 2, p)
                .add(&int(2 * d, p).mul(&lg(d, p)))
                .add(&int(2 * d * d, p).mul(&lh()))
        }
        5 => {
            let n = need(a.n, "n")?;
            let s = need(a.support, "S")?;
            let dd = need(a.max_degree, "D")?;
            let c = need(a.c, "c")?;
            let exp: BigInt = Pow::pow(BigInt::from(dd), c * n);
            let base = BigInt::from(n + 1) * BigInt::from(s) * &a.h;
            int(exp, p).mul(&lg(base, p))
        }
        6 => {
            let n = need(a.n, "n")?;
            int(3 * n, p)
                .add(&int(n * n, p).mul(&lg(4 * n, p)))
                .add(&int(2 * n * n, p).mul(&lh()))
                .neg()
        }
        7 => {
            let d = need(a.d, "d")?;
            int(2 * d, p).mul(&int(3, p).add(&lh())).neg()
        }
        t => return Err(Error::Domain(format!("no bound numbered {t}"))),
    })
}

/// Any of the seven bounds from explicit parameters at a given precision.
pub fn bound_from_params(theorem: u8, params: BoundParams, precision_bits: usize) -> Result<Log2Bound> {
    build(theorem, params, precision_bits)
}

fn build(theorem: u8, params: BoundParams, p: usize) -> Result<Log2Bound> {
    let enc = evaluate(theorem, &params, p)?;
    let kind = kind_of(theorem);
    let log2_value = match kind {
        BoundKind::Upper => enc.upper(),
        BoundKind::Lower => enc.lower(),
    };
    Ok(Log2Bound {
        theorem,
        kind,
        log2_value,
        params,
        unspecified_constant: theorem == 5,
    })
}

/// Smallest integer not below the enclosed value. An enclosure that contains
/// an integer is read as that integer, which is how exact values such as
/// log2 16 come out.
pub(crate) fn snapped_ceil(x: &Interval) -> BigInt {
    x.lower().ceil()
}

fn h_param(h: impl Into<BigInt>) -> BigInt {
    h.into()
}

/// κ(A) ≤ n^{n/2+1}·H^n for invertible n×n integer A with H = max|Aᵢⱼ|.
pub fn thm1_bound(n: u64, h: impl Into<BigInt>) -> Result<Log2Bound> {
    let params = BoundParams {
        n: Some(n),
        h: h_param(h),
        ..Default::default()
    };
    build(1, params, DEFAULT_PRECISION_BITS)
}

/// cond_LS(A, b) ≤ 3n^{n/2+1}·m^{n+1/2}·H^{2n+1}, H over the entries of A and b.
pub fn thm2_bound(n: u64, m: u64, h: impl Into<BigInt>) -> Result<Log2Bound> {
    let params = BoundParams {
        n: Some(n),
        m: Some(m),
        h: h_param(h),
        ..Default::default()
    };
    build(2, params, DEFAULT_PRECISION_BITS)
}

/// cond_NSE(A, λ) ≤ n^{3n}·2^{2n}·(2√n·H)^{2n³−2n} for a simple eigenvalue λ.
pub fn thm3_bound(n: u64, h: impl Into<BigInt>) -> Result<Log2Bound> {
    let params = BoundParams {
        n: Some(n),
        h: h_param(h),
        ..Default::default()
    };
    build(3, params, DEFAULT_PRECISION_BITS)
}

/// μ(f) ≤ 2^{2d²−2}·d^{2d}·H^{2d²} for squarefree f of degree d.
pub fn thm4_bound(d: u64, h: impl Into<BigInt>) -> Result<Log2Bound> {
    let params = BoundParams {
        d: Some(d),
        h: h_param(h),
        ..Default::default()
    };
    build(4, params, DEFAULT_PRECISION_BITS)
}

/// μ(F) ≤ ((n+1)·S·H)^{D^{cn}} with a caller-supplied constant c.
pub fn thm5_bound(n: u64, s: u64, max_degree: u64, h: impl Into<BigInt>, c: u64) -> Result<Log2Bound> {
    let params = BoundParams {
        n: Some(n),
        support: Some(s),
        max_degree: Some(max_degree),
        h: h_param(h),
        c: Some(c),
        ..Default::default()
    };
    build(5, params, DEFAULT_PRECISION_BITS)
}

/// Default for the unspecified constant in the system bound.
pub const THM5_DEFAULT_C: u64 = 3;

/// relgap(A) ≥ 8^{−n}·(4n)^{−n²}·H^{−2n²}.
pub fn thm6_bound(n: u64, h: impl Into<BigInt>) -> Result<Log2Bound> {
    let params = BoundParams {
        n: Some(n),
        h: h_param(h),
        ..Default::default()
    };
    build(6, params, DEFAULT_PRECISION_BITS)
}

/// relgap(f) ≥ (8H)^{−2d}.
pub fn thm7_bound(d: u64, h: impl Into<BigInt>) -> Result<Log2Bound> {
    let params = BoundParams {
        d: Some(d),
        h: h_param(h),
        ..Default::default()
    };
    build(7, params, DEFAULT_PRECISION_BITS)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(b: Result<Log2Bound>) -> f64 {
        b.unwrap().log2_value.to_f64()
    }

    fn close(a: f64, b: f64) {
        assert!((a - b).abs() < 1e-12, "{a} vs {b}");
    }

    #[test]
    fn linear_system_bound() {
        close(v(thm1_bound(1, 1)), 0.0);
        close(v(thm1_bound(2, 1)), 2.0);
        close(v(thm1_bound(2, 3)), 36f64.log2());
        assert!(matches!(thm1_bound(2, 0), Err(Error::Domain(_))));
    }

    #[test]
    fn least_squares_bound() {
        close(v(thm2_bound(1, 1, 1)), 3f64.log2());
        close(v(thm2_bound(1, 2, 1)), (3.0 * 2f64.powf(1.5)).log2());
        close(v(thm2_bound(2, 2, 1)), (12.0 * 2f64.powf(2.5)).log2());
    }

    #[test]
    fn eigenvalue_bound() {
        close(v(thm3_bound(1, 1)), 2.0);
        close(v(thm3_bound(2, 1)), 28.0);
        close(v(thm3_bound(2, 2)), 40.0);
    }

    #[test]
    fn univariate_bound() {
        close(v(thm4_bound(1, 1)), 0.0);
        close(v(thm4_bound(2, 1)), 10.0);
        close(v(thm4_bound(2, 3)), 6_718_464f64.log2());
    }

    #[test]
    fn system_bound_is_flagged() {
        let b = thm5_bound(1, 2, 1, 1, THM5_DEFAULT_C).unwrap();
        assert!(b.unspecified_constant);
        close(b.log2_value.to_f64(), 2.0);
        close(v(thm5_bound(1, 2, 2, 1, 1)), 4.0);
        assert!(v(thm5_bound(1, 2, 2, 3, 1)) > v(thm5_bound(1, 2, 2, 2, 1)));
    }

    #[test]
    fn gap_lower_bounds() {
        close(v(thm6_bound(1, 1)), -5.0);
        close(v(thm6_bound(2, 1)), -18.0);
        close(v(thm6_bound(2, 2)), -26.0);
        close(v(thm7_bound(1, 1)), -6.0);
        close(v(thm7_bound(2, 3)), -(331_776f64.log2()));
        close(v(thm7_bound(2, 1)), -12.0);
        assert_eq!(thm7_bound(2, 1).unwrap().kind, BoundKind::Lower);
    }

    #[test]
    fn bounds_are_monotone() {
        for h in 1..6u64 {
            for n in 1..5u64 {
                let upper = [
                    (thm1_bound(n, h), thm1_bound(n + 1, h), thm1_bound(n, h + 1)),
                    (thm3_bound(n, h), thm3_bound(n + 1, h), thm3_bound(n, h + 1)),
                    (thm4_bound(n, h), thm4_bound(n + 1, h), thm4_bound(n, h + 1)),
                    (
                        thm2_bound(n, n + 1, h),
                        thm2_bound(n, n + 2, h),
                        thm2_bound(n, n + 1, h + 1),
                    ),
                ];
                for (base, dim, ht) in upper {
                    let b = v(base);
                    assert!(b <= v(dim) && b <= v(ht));
                }
                // lower bounds on gaps shrink as the instance grows
                for (base, dim, ht) in [
                    (thm6_bound(n, h), thm6_bound(n + 1, h), thm6_bound(n, h + 1)),
                    (thm7_bound(n, h), thm7_bound(n + 1, h), thm7_bound(n, h + 1)),
                ] {
                    let b = v(base);
                    assert!(b >= v(dim) && b >= v(ht));
                }
            }
        }
    }

    #[test]
    fn higher_precision_only_tightens() {
        for b in [
            thm1_bound(3, 7),
            thm2_bound(3, 4, 3),
            thm3_bound(3, 2),
            thm4_bound(4, 2),
            thm6_bound(3, 3),
            thm7_bound(4, 2),
        ] {
            let b = b.unwrap();
            let fine = b.at_precision(512).unwrap();
            match b.kind {
                BoundKind::Upper => assert!(fine.log2_value <= b.log2_value),
                BoundKind::Lower => assert!(fine.log2_value >= b.log2_value),
            }
            let e = b.enclosure().unwrap();
            assert!(e.lower() <= b.log2_value && b.log2_value <= e.upper());
        }
    }
}
