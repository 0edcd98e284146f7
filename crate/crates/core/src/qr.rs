//! Unshifted QR iteration on symmetric positive definite integer matrices,
//! with a trace of the off-diagonal decay and the relgap-based iteration
//! predictor.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Pow, Signed, Zero};
use serde::Serialize;

use crate::bounds::{snapped_ceil, thm6_bound};
use crate::condition::{relgap_matrix, Condition};
use crate::error::{Error, Result};
use crate::numcore::ext::{
    bf_add, bf_cmp, bf_div, bf_from_i64, bf_max, bf_mul, bf_sqrt, bf_sub, bf_to_f64, bf_zero, normalize_precision,
    ExtReal, Interval, Rounding,
};
use crate::numcore::matrix::mat_mul;
use crate::numcore::IntMatrix;

const N: Rounding = Rounding::Nearest;

/// Record of one unshifted QR run.
#[derive(Clone, Debug, Serialize)]
pub struct QrTrace {
    pub iterations: usize,
    /// max |off-diagonal| of each iterate, the input first.
    pub offdiag_norms: Vec<f64>,
    /// offdiag_norms[k+1] / offdiag_norms[k]
    pub rate_estimates: Vec<f64>,
    pub converged: bool,
    /// Diagonal of the last iterate, largest first.
    pub diagonal: Vec<f64>,
    /// Largest |Aᵢⱼ − Aⱼᵢ| seen on any iterate.
    pub max_asymmetry: f64,
    /// Largest relative drift of tr(Aᵏ), k = 1..n, from its exact value,
    /// checked every 10 iterations and at the end.
    pub spectrum_drift: f64,
}

impl QrTrace {
    /// Last measured decay ratio.
    pub fn asymptotic_rate(&self) -> Option<f64> {
        self.rate_estimates.last().copied()
    }
}

type Mat = Vec<Vec<BigFloat>>;

fn to_bf(a: &IntMatrix, p: usize) -> Mat {
    (0..a.rows())
        .map(|i| (0..a.cols()).map(|j| bf_from_i64(a.get(i, j), p)).collect())
        .collect()
}

fn max_offdiag(a: &Mat) -> BigFloat {
    let n = a.len();
    let mut m = bf_zero(64);
    for (i, row) in a.iter().enumerate() {
        for (j, x) in row.iter().enumerate().take(n) {
            if i != j {
                m = bf_max(&m, &x.abs());
            }
        }
    }
    m
}

fn matmul(a: &Mat, b: &Mat, p: usize) -> Mat {
    let n = a.len();
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    (0..n).fold(bf_zero(p), |acc, k| {
                        bf_add(&acc, &bf_mul(&a[i][k], &b[k][j], p, N), p, N)
                    })
                })
                .collect()
        })
        .collect()
}

/// One step A ← RQ with A = QR by Householder reflections.
fn qr_step(a: &Mat, p: usize) -> Mat {
    let n = a.len();
    let mut r = a.clone();
    let mut q: Mat = (0..n)
        .map(|i| (0..n).map(|j| bf_from_i64((i == j) as i64, p)).collect())
        .collect();
    let two = bf_from_i64(2, p);
    for j in 0..n.saturating_sub(1) {
        let norm = bf_sqrt(
            &(j..n).fold(bf_zero(p), |acc, i| {
                bf_add(&acc, &bf_mul(&r[i][j], &r[i][j], p, N), p, N)
            }),
            p,
            N,
        );
        if norm.is_zero() {
            continue;
        }
        let alpha = if r[j][j].is_negative() { norm } else { norm.neg() };
        let mut v: Vec<BigFloat> = (j..n).map(|i| r[i][j].clone()).collect();
        v[0] = bf_sub(&v[0], &alpha, p, N);
        let vv = v
            .iter()
            .fold(bf_zero(p), |acc, x| bf_add(&acc, &bf_mul(x, x, p, N), p, N));
        if vv.is_zero() {
            continue;
        }
        // R ← H·R, Q ← Q·H with H = I − 2vvᵀ/(vᵀv)
        for c in 0..n {
            let dot = v.iter().enumerate().fold(bf_zero(p), |acc, (k, x)| {
                bf_add(&acc, &bf_mul(x, &r[j + k][c], p, N), p, N)
            });
            let f = bf_div(&bf_mul(&two, &dot, p, N), &vv, p, N);
            for (k, x) in v.iter().enumerate() {
                r[j + k][c] = bf_sub(&r[j + k][c], &bf_mul(&f, x, p, N), p, N);
            }
        }
        for row in q.iter_mut() {
            let dot = v.iter().enumerate().fold(bf_zero(p), |acc, (k, x)| {
                bf_add(&acc, &bf_mul(&row[j + k], x, p, N), p, N)
            });
            let f = bf_div(&bf_mul(&two, &dot, p, N), &vv, p, N);
            for (k, x) in v.iter().enumerate() {
                row[j + k] = bf_sub(&row[j + k], &bf_mul(&f, x, p, N), p, N);
            }
        }
    }
    matmul(&r, &q, p)
}

fn exact_power_traces(a: &IntMatrix) -> Vec<BigInt> {
    let ab = a.to_bigint();
    let mut pw = ab.clone();
    let mut out = Vec::with_capacity(a.rows());
    for k in 0..a.rows() {
        if k > 0 {
            pw = mat_mul(&pw, &ab);
        }
        out.push((0..a.rows()).map(|i| pw[i][i].clone()).sum());
    }
    out
}

fn trace_drift(a: &Mat, exact: &[BigInt], p: usize) -> f64 {
    let mut pw = a.clone();
    let mut worst = 0f64;
    for (k, t) in exact.iter().enumerate() {
        if k > 0 {
            pw = matmul(&pw, a, p);
        }
        let tr = (0..a.len()).fold(bf_zero(p), |acc, i| bf_add(&acc, &pw[i][i], p, N));
        let te = crate::numcore::ext::bf_from_bigint(t, p, N);
        let rel = bf_div(&bf_sub(&tr, &te, p, N).abs(), &te.abs(), p, N);
        worst = worst.max(bf_to_f64(&rel, Rounding::Up));
    }
    worst
}

fn check_spd(a: &IntMatrix) -> Result<()> {
    if !a.is_square() {
        return Err(Error::Dimension("QR iteration needs a square matrix".into()));
    }
    if !a.is_symmetric() {
        return Err(Error::Domain("QR iteration needs a symmetric matrix".into()));
    }
    if !a.is_positive_definite()? {
        return Err(Error::Domain(
            "matrix is not positive definite (a leading principal minor is <= 0)".into(),
        ));
    }
    Ok(())
}

/// Repeats A ← RQ until max |off-diagonal| ≤ δ1·‖A‖_F or `max_iter` steps.
pub fn qr_iterate(a: &IntMatrix, delta1: f64, max_iter: usize, precision_bits: usize) -> Result<QrTrace> {
    check_spd(a)?;
    if !(delta1 > 0.0 && delta1 < 1.0) {
        return Err(Error::Domain(format!("tolerance must lie in (0, 1), got {delta1}")));
    }
    let p = normalize_precision(precision_bits);
    let n = a.rows();
    let fro2: i64 = a.entries().iter().map(|x| x * x).sum();
    let threshold = bf_mul(
        &bf_sqrt(&bf_from_i64(fro2, p), p, N),
        &crate::numcore::ext::bf_from_f64(delta1, p),
        p,
        N,
    );
    let exact = exact_power_traces(a);
    let mut m = to_bf(a, p);
    let mut offs = vec![max_offdiag(&m)];
    let mut asym = 0f64;
    let mut drift = 0f64;
    let mut iterations = 0;
    while bf_cmp(offs.last().expect("nonempty"), &threshold) == Ordering::Greater && iterations < max_iter {
        m = qr_step(&m, p);
        iterations += 1;
        offs.push(max_offdiag(&m));
        for i in 0..n {
            for j in i + 1..n {
                asym = asym.max(bf_to_f64(&bf_sub(&m[i][j], &m[j][i], p, N).abs(), Rounding::Up));
            }
        }
        if iterations % 10 == 0 {
            drift = drift.max(trace_drift(&m, &exact, p));
        }
    }
    drift = drift.max(trace_drift(&m, &exact, p));
    let converged = bf_cmp(offs.last().expect("nonempty"), &threshold) != Ordering::Greater;
    let offdiag_norms: Vec<f64> = offs.iter().map(|x| bf_to_f64(x, N)).collect();
    let rate_estimates = offs
        .windows(2)
        .filter(|w| !w[0].is_zero())
        .map(|w| bf_to_f64(&bf_div(&w[1], &w[0], p, N), N))
        .collect();
    let mut diagonal: Vec<f64> = (0..n).map(|i| bf_to_f64(&m[i][i], N)).collect();
    diagonal.sort_by(|x, y| y.total_cmp(x));
    Ok(QrTrace {
        iterations,
        offdiag_norms,
        rate_estimates,
        converged,
        diagonal,
        max_asymmetry: asym,
        spectrum_drift: drift,
    })
}

/// Iteration budgets ⌈(1/δ₀)·log2(1/δ1)⌉.
#[derive(Clone, Debug, Serialize)]
pub struct QrPrediction {
    /// With δ₀ = relgap(A).
    pub a_posteriori: u64,
    /// With δ₀ replaced by the a-priori lower bound on relgap(A).
    #[serde(serialize_with = "ser_bigint")]
    pub a_priori: BigInt,
    pub relgap: Condition,
}

fn ser_bigint<S: serde::Serializer>(v: &BigInt, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn budget(log2_inv_gap: &Interval, delta1: f64, p: usize) -> BigInt {
    let l = Interval::point(&ExtReal::from_f64(delta1, p))
        .log2()
        .expect("positive")
        .neg();
    snapped_ceil(&log2_inv_gap.exp2().mul(&l)).max(BigInt::zero())
}

pub fn predict_qr_iterations(a: &IntMatrix, delta1: f64, precision_bits: usize) -> Result<QrPrediction> {
    check_spd(a)?;
    if !(delta1 > 0.0 && delta1 < 1.0) {
        return Err(Error::Domain(format!("tolerance must lie in (0, 1), got {delta1}")));
    }
    let p = normalize_precision(precision_bits);
    let relgap = relgap_matrix(a, p)?;
    let a_posteriori = match &relgap {
        Condition::Infinite { .. } => 0,
        Condition::Finite(v) => u64::try_from(budget(&v.log2_enclosure().neg(), delta1, p)).unwrap_or(u64::MAX),
    };
    let prior = thm6_bound(a.rows() as u64, a.max_abs())?.enclosure()?;
    let a_priori = if relgap.is_infinite() {
        BigInt::zero()
    } else {
        budget(&prior.neg(), delta1, p)
    };
    Ok(QrPrediction {
        a_posteriori,
        a_priori,
        relgap,
    })
}

/// ⌈x⌉ of a nonnegative rational.
fn ceil_rational(x: &BigRational) -> BigInt {
    let f = x.floor().to_integer();
    if BigRational::from_integer(f.clone()) == *x {
        f
    } else {
        f + BigInt::one()
    }
}

/// Exact check of (1+δ₀)^k ≥ 1 + kδ₀ ≥ 2 for k ≥ ⌈1/δ₀⌉, with the first
/// inequality strict once k ≥ 2 (at k = 1 both sides are equal).
pub fn check_ratio_growth(delta0: &BigRational, k: u64) -> Result<bool> {
    if !delta0.is_positive() {
        return Err(Error::Domain(format!("delta0 must be positive, got {delta0}")));
    }
    let need = ceil_rational(&delta0.recip());
    if BigInt::from(k) < need {
        return Err(Error::Precondition(format!("k = {k} is below ceil(1/delta0) = {need}")));
    }
    let one = BigRational::one();
    let power: BigRational = Pow::pow(&one + delta0, k);
    let linear = &one + delta0 * BigRational::from_integer(k.into());
    let bernoulli = if k >= 2 { power > linear } else { power >= linear };
    Ok(bernoulli && linear >= BigRational::from_integer(2.into()))
}

#[cfg(test)]
mod tests {
    use super::*;

    const P: usize = 256;

    fn m(rows: &[&[i64]]) -> IntMatrix {
        IntMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn diagonal_input_needs_no_iterations() {
        let t = qr_iterate(&IntMatrix::diag(&[5, 2]), 2f64.powi(-20), 100, P).unwrap();
        assert_eq!(t.iterations, 0);
        assert!(t.converged && t.asymptotic_rate().is_none());
        assert_eq!(t.offdiag_norms.len(), 1);
    }

    #[test]
    fn two_by_two_rate_matches_eigenvalue_ratio() {
        for (a, rate) in [(m(&[&[2, 1], &[1, 2]]), 1.0 / 3.0), (m(&[&[5, 4], &[4, 5]]), 1.0 / 9.0)] {
            let t = qr_iterate(&a, 2f64.powi(-20), 200, P).unwrap();
            assert!(t.converged);
            assert_eq!(t.offdiag_norms.len(), t.iterations + 1);
            let r = t.asymptotic_rate().unwrap();
            assert!((r - rate).abs() <= 0.1 * rate, "{r} vs {rate}");
            assert!(t.max_asymmetry < 2f64.powi(-(P as i32) / 2));
            assert!(t.spectrum_drift < 2f64.powi(-(P as i32) / 2));
        }
    }

    #[test]
    fn rotated_diagonal_has_the_same_rate() {
        // 25·Q·diag(4,1)·Qᵀ with Q = [[3,-4],[4,3]]/5
        let a = m(&[&[52, -36], &[-36, 73]]);
        let t = qr_iterate(&a, 2f64.powi(-20), 200, P).unwrap();
        let r = t.asymptotic_rate().unwrap();
        assert!((r - 0.25).abs() <= 0.025, "{r}");
        assert!((t.diagonal[0] - 100.0).abs() < 1e-9 && (t.diagonal[1] - 25.0).abs() < 1e-9);
    }

    #[test]
    fn three_by_three_converges_to_the_spectrum() {
        let a = m(&[&[4, 1, 0], &[1, 3, 1], &[0, 1, 2]]);
        let t = qr_iterate(&a, 2f64.powi(-30), 500, P).unwrap();
        assert!(t.converged);
        let eig = crate::numcore::sym_eigenvalues(&a, P).unwrap();
        for (d, e) in t.diagonal.iter().zip(eig.approx()) {
            assert!((d - e.0).abs() < 1e-6);
        }
    }

    #[test]
    fn rejects_indefinite_input() {
        assert!(matches!(
            qr_iterate(&m(&[&[1, 2], &[2, 1]]), 0.1, 10, P),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            qr_iterate(&m(&[&[1, 1], &[1, 1]]), 0.1, 10, P),
            Err(Error::Domain(_))
        ));
        assert!(matches!(
            qr_iterate(&m(&[&[1, 2], &[0, 1]]), 0.1, 10, P),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn exhausted_budget_is_flagged() {
        let t = qr_iterate(&m(&[&[4, 1], &[1, 4]]), 2f64.powi(-40), 3, P).unwrap();
        assert!(!t.converged && t.iterations == 3);
    }

    #[test]
    fn prediction_examples() {
        let pr = predict_qr_iterations(&m(&[&[2, 1], &[1, 2]]), 2f64.powi(-10), P).unwrap();
        assert_eq!(pr.a_posteriori, 15);
        let pr = predict_qr_iterations(&m(&[&[2, 1], &[1, 2]]), 2f64.powi(-20), P).unwrap();
        assert_eq!(pr.a_posteriori, 30);
        // eigenvalues 2 and 1: relgap 1/2, δ1 = 1/2
        assert_eq!(
            predict_qr_iterations(&IntMatrix::diag(&[2, 1]), 0.5, P)
                .unwrap()
                .a_posteriori,
            2
        );
        let pr = predict_qr_iterations(&IntMatrix::diag(&[1, 1]), 2f64.powi(-10), P).unwrap();
        assert_eq!(pr.a_posteriori, 0);
    }

    #[test]
    fn a_priori_budget() {
        // n = 2, H = 1 → δ₀ ≥ 2^-18, budget 2^18·10
        let a = m(&[&[1, 1], &[1, 1]]);
        assert!(predict_qr_iterations(&a, 2f64.powi(-10), P).is_err());
        let pr = predict_qr_iterations(&IntMatrix::identity(2), 2f64.powi(-10), P).unwrap();
        assert_eq!(pr.a_priori, BigInt::zero());
        let b = thm6_bound(2, 1).unwrap().enclosure().unwrap();
        assert_eq!(budget(&b.neg(), 2f64.powi(-10), P), BigInt::from(10u64 << 18));
    }

    #[test]
    fn ratio_growth_examples() {
        let q = |a: i64, b: i64| BigRational::new(a.into(), b.into());
        assert!(check_ratio_growth(&q(1, 2), 2).unwrap());
        assert!(check_ratio_growth(&q(1, 1), 1).unwrap());
        assert!(check_ratio_growth(&q(1, 4), 4).unwrap());
        assert!(check_ratio_growth(&q(1, 3), 7).unwrap());
        assert!(matches!(check_ratio_growth(&q(1, 4), 3), Err(Error::Precondition(_))));
        assert!(matches!(check_ratio_growth(&q(0, 1), 3), Err(Error::Domain(_))));
    }
}
