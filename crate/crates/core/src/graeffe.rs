//! Graeffe root squaring in exact integer arithmetic, recovery of root
//! moduli for polynomials with distinct positive real roots, and the
//! iteration-count predictor.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::bounds::{snapped_ceil, thm7_bound};
use crate::condition::{relgap_poly, Condition};
use crate::error::{Error, Result};
use crate::numcore::ext::{ExtReal, Interval, Rounding};
use crate::numcore::roots::{certified_roots, escalate, RootBox};
use crate::numcore::IntPolynomial;

/// Default cap on the total bit length of all coefficients of an iterate.
pub const DEFAULT_BIT_BUDGET: u64 = 1 << 20;

/// The k-th Graeffe iterate of a polynomial.
#[derive(Clone, Debug, Serialize)]
pub struct GraeffeState {
    pub k: u32,
    pub g: IntPolynomial,
    pub bit_budget: u64,
}

/// Gf(x) = (−1)^d f(√x) f(−√x) = (−1)^d (fe(x)² − x·fo(x)²) where
/// f(x) = fe(x²) + x·fo(x²). The leading coefficient is lc(f)², so monic
/// stays monic.
pub fn graeffe_step(f: &IntPolynomial) -> IntPolynomial {
    let c = f.coeffs();
    let fe = IntPolynomial::new(c.iter().step_by(2).cloned().collect());
    let fo = IntPolynomial::new(c.iter().skip(1).step_by(2).cloned().collect());
    let g = fe
        .mul(&fe)
        .sub(&IntPolynomial::monomial(BigInt::from(1), 1).mul(&fo.mul(&fo)));
    if f.degree() % 2 == 1 {
        g.neg()
    } else {
        g
    }
}

fn total_bits(f: &IntPolynomial) -> u64 {
    f.coeffs().iter().map(|c| c.bits()).sum()
}

/// k Graeffe steps under the default bit budget.
pub fn iterate(f: &IntPolynomial, k: u32) -> Result<GraeffeState> {
    iterate_with_budget(f, k, DEFAULT_BIT_BUDGET)
}

/// k Graeffe steps; fails as soon as an iterate needs more than
/// `bit_budget` coefficient bits in total.
pub fn iterate_with_budget(f: &IntPolynomial, k: u32, bit_budget: u64) -> Result<GraeffeState> {
    let mut g = f.clone();
    let check = |g: &IntPolynomial| {
        let needed = total_bits(g);
        if needed > bit_budget {
            Err(Error::BudgetExceeded {
                needed,
                budget: bit_budget,
            })
        } else {
            Ok(())
        }
    };
    check(&g)?;
    for _ in 0..k {
        g = graeffe_step(&g);
        check(&g)?;
    }
    Ok(GraeffeState { k, g, bit_budget })
}

/// Which coefficient ratio is read as ζᵢ^{2^k}.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    /// |g_{d−i}| / |g_{d−i+1}|, from the elementary-symmetric expansion.
    #[default]
    Expansion,
    /// |g_{d−i+1}| / |g_{d−i}|, the inverted ratio; kept for comparison.
    Inverted,
}

/// Recovered moduli, largest first.
#[derive(Clone, Debug, Serialize)]
pub struct RecoveryResult {
    pub roots: Vec<ExtReal>,
    /// log2 of the first-order error claim 2^{d+1−k}/ratio(g), where ratio(g)
    /// is the smallest ratio of adjacent recovered moduli of g; None for a
    /// single root, which is recovered exactly.
    pub claimed_log2_rel_error: Option<f64>,
    pub k_used: u32,
    pub orientation: Orientation,
}

/// Reads root moduli off the coefficients of G^k f in the log2 domain:
/// log2 ζᵢ = 2^{−k}·(log2|g_{d−i}| − log2|g_{d−i+1}|).
pub fn recover_roots(state: &GraeffeState, precision_bits: usize) -> Result<RecoveryResult> {
    recover_roots_oriented(state, Orientation::Expansion, precision_bits)
}

pub fn recover_roots_oriented(
    state: &GraeffeState,
    orientation: Orientation,
    precision_bits: usize,
) -> Result<RecoveryResult> {
    let d = state.g.degree();
    if d == 0 {
        return Err(Error::Recovery("constant polynomial has no roots".into()));
    }
    let p = precision_bits;
    let lg = |j: usize| -> Result<Interval> {
        let c = state.g.coeff(j);
        if c.is_zero() {
            return Err(Error::Recovery(format!(
                "coefficient g_{j} of the k={} iterate is zero",
                state.k
            )));
        }
        Ok(Interval::from_bigint(&c.abs(), p).log2().expect("positive"))
    };
    let scale = Interval::point(&ExtReal::from_raw(
        crate::numcore::ext::pow2(-(state.k as i64)),
        p,
        Rounding::Nearest,
    ));
    let mut logs = Vec::with_capacity(d);
    for i in 1..=d {
        let (num, den) = match orientation {
            Orientation::Expansion => (d - i, d - i + 1),
            Orientation::Inverted => (d - i + 1, d - i),
        };
        logs.push(lg(num)?.sub(&lg(den)?).mul(&scale));
    }
    let mut mids: Vec<ExtReal> = logs.iter().map(|l| l.mid()).collect();
    mids.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let claimed = (d > 1).then(|| {
        let gap = mids
            .windows(2)
            .map(|w| w[0].to_f64() - w[1].to_f64())
            .fold(f64::INFINITY, f64::min);
        (d as f64 + 1.0 - state.k as f64) - gap * 2f64.powi(state.k as i32)
    });
    let roots = mids
        .iter()
        .map(|l| ExtReal::from_raw(Interval::point(l).exp2().mid().value().clone(), p, Rounding::Nearest))
        .collect();
    Ok(RecoveryResult {
        roots,
        claimed_log2_rel_error: claimed,
        k_used: state.k,
        orientation,
    })
}

/// Checks that f is monic with distinct positive real roots and returns
/// their certified boxes, largest first.
pub fn check_hypothesis(f: &IntPolynomial, precision_bits: usize) -> Result<Vec<RootBox>> {
    if f.degree() == 0 {
        return Err(Error::Hypothesis("constant polynomial".into()));
    }
    if !f.is_monic() {
        return Err(Error::Hypothesis(format!("{f} is not monic")));
    }
    if !f.is_squarefree() {
        return Err(Error::Hypothesis(format!("{f} has a multiple root")));
    }
    escalate(precision_bits, |p| {
        let boxes = certified_roots(f, p)?;
        for b in &boxes {
            let (re, im) = b.center_f64();
            if !b.real {
                return Err(Error::Hypothesis(format!("root {re}{im:+}i of {f} is not real")));
            }
            if !b.real_enclosure().is_positive() {
                return Err(Error::Hypothesis(format!("root {re} of {f} is not positive")));
            }
        }
        Ok(boxes)
    })
}

/// Predicted Graeffe iteration counts k = k₁ + k₂ + 1.
#[derive(Clone, Debug, Serialize)]
pub struct GraeffePrediction {
    /// ⌈log2 relgap(f)⁻¹⌉, clamped at 0.
    pub k1: u32,
    /// ⌈log2(d + 1 + log2 δ⁻¹)⌉
    pub k2: u32,
    pub k: u32,
    /// k₁ with relgap replaced by its a-priori lower bound (8H)^{−2d}.
    pub a_priori_k1: u32,
    pub a_priori_k: u32,
    pub relgap: Condition,
}

fn small(v: BigInt) -> u32 {
    u32::try_from(v.max(BigInt::zero())).unwrap_or(u32::MAX)
}

pub fn predict_iterations(f: &IntPolynomial, delta: f64, precision_bits: usize) -> Result<GraeffePrediction> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::Domain(format!(
            "target relative error must lie in (0, 1), got {delta}"
        )));
    }
    let d = f.degree() as u64;
    if d == 0 {
        return Err(Error::Domain("constant polynomial".into()));
    }
    let p = precision_bits;
    let relgap = if d >= 2 {
        relgap_poly(f, p)?
    } else {
        Condition::Infinite {
            witness: "single root".into(),
        }
    };
    let k1 = match &relgap {
        Condition::Infinite { .. } => 0,
        Condition::Finite(v) => small(snapped_ceil(&v.log2_enclosure().neg())),
    };
    let inv_delta = Interval::point(&ExtReal::from_f64(delta, p))
        .log2()
        .expect("delta is positive")
        .neg();
    let inner = Interval::from_i64(d as i64 + 1, p).add(&inv_delta);
    let k2 = small(snapped_ceil(&inner.log2().expect("positive")));
    let h = f.max_abs();
    let a_priori_k1 = small(snapped_ceil(&thm7_bound(d, h)?.enclosure()?.neg()));
    Ok(GraeffePrediction {
        k1,
        k2,
        k: k1 + k2 + 1,
        a_priori_k1,
        a_priori_k: a_priori_k1 + k2 + 1,
        relgap,
    })
}
