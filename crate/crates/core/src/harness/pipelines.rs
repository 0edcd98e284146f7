//! End-to-end runs of the two iterative algorithms, compared with their
//! iteration predictors and with independent oracles.

use serde::Serialize;

use crate::error::Result;
use crate::graeffe::{
    check_hypothesis, graeffe_step, iterate, predict_iterations, recover_roots, GraeffePrediction, GraeffeState,
    RecoveryResult, DEFAULT_BIT_BUDGET,
};
use crate::numcore::{sym_eigenvalues, IntMatrix, IntPolynomial};
use crate::qr::{predict_qr_iterations, qr_iterate, QrPrediction};

/// Outcome of a Graeffe run at the predicted iteration count.
#[derive(Clone, Debug, Serialize)]
pub struct GraeffeReport {
    pub poly: String,
    pub target_rel_err: f64,
    pub prediction: GraeffePrediction,
    pub recovery: RecoveryResult,
    /// Recovered moduli as doubles, largest first.
    pub recovered: Vec<f64>,
    /// Centres of the certified roots, largest first.
    pub oracle: Vec<f64>,
    /// |recovered − oracle| / oracle per root.
    pub rel_errors: Vec<f64>,
    pub max_rel_error: f64,
    pub within_target: bool,
    /// Smallest k ≤ predicted k whose recovery already meets the target.
    pub smallest_sufficient_k: Option<u32>,
}

fn rel_errors(rec: &RecoveryResult, oracle: &[f64]) -> Vec<f64> {
    rec.roots
        .iter()
        .zip(oracle)
        .map(|(r, z)| (r.to_f64() - z).abs() / z)
        .collect()
}

fn max_of(v: &[f64]) -> f64 {
    v.iter().copied().fold(0.0, f64::max)
}

/// Checks the hypothesis, predicts k, iterates and compares the recovered
/// roots with the certified ones.
pub fn run_graeffe(f: &IntPolynomial, delta: f64, precision_bits: usize) -> Result<GraeffeReport> {
    let boxes = check_hypothesis(f, precision_bits)?;
    let mut oracle: Vec<f64> = boxes.iter().map(|b| b.center_f64().0).collect();
    oracle.sort_by(|a, b| b.total_cmp(a));
    let prediction = predict_iterations(f, delta, precision_bits)?;
    let state = iterate(f, prediction.k)?;
    let recovery = recover_roots(&state, precision_bits)?;
    let errs = rel_errors(&recovery, &oracle);
    let max_rel_error = max_of(&errs);

    let mut smallest = None;
    let mut g = f.clone();
    for k in 0..=prediction.k {
        if k > 0 {
            g = graeffe_step(&g);
        }
        let st = GraeffeState {
            k,
            g: g.clone(),
            bit_budget: DEFAULT_BIT_BUDGET,
        };
        if let Ok(r) = recover_roots(&st, precision_bits) {
            if max_of(&rel_errors(&r, &oracle)) <= delta {
                smallest = Some(k);
                break;
            }
        }
    }
    Ok(GraeffeReport {
        poly: f.to_string(),
        target_rel_err: delta,
        recovered: recovery.roots.iter().map(|r| r.to_f64()).collect(),
        prediction,
        recovery,
        oracle,
        rel_errors: errs,
        max_rel_error,
        within_target: max_rel_error <= delta,
        smallest_sufficient_k: smallest,
    })
}

/// Outcome of an unshifted QR run.
#[derive(Clone, Debug, Serialize)]
pub struct QrReport {
    pub matrix: String,
    pub tol: f64,
    pub iterations: usize,
    pub converged: bool,
    pub prediction: QrPrediction,
    pub within_prediction: bool,
    /// Last measured off-diagonal decay ratio.
    pub measured_rate: Option<f64>,
    /// max λ_{i+1}/λ_i over the exact spectrum.
    pub expected_rate: f64,
    pub eigenvalue_estimates: Vec<f64>,
    pub oracle_eigenvalues: Vec<f64>,
    pub max_eigenvalue_rel_error: f64,
    pub max_asymmetry: f64,
    pub spectrum_drift: f64,
    pub offdiag_norms: Vec<f64>,
}

const QR_ITERATION_CAP: u64 = 100_000;

pub fn run_qr(a: &IntMatrix, delta1: f64, precision_bits: usize) -> Result<QrReport> {
    let prediction = predict_qr_iterations(a, delta1, precision_bits)?;
    let cap = prediction
        .a_posteriori
        .saturating_mul(4)
        .saturating_add(100)
        .min(QR_ITERATION_CAP);
    let trace = qr_iterate(a, delta1, cap as usize, precision_bits)?;
    let oracle: Vec<f64> = sym_eigenvalues(a, precision_bits)?
        .approx()
        .iter()
        .map(|e| e.0)
        .collect();
    let expected_rate = oracle.windows(2).map(|w| w[1] / w[0]).fold(0.0, f64::max);
    let max_eigenvalue_rel_error = trace
        .diagonal
        .iter()
        .zip(&oracle)
        .map(|(x, l)| (x - l).abs() / l.abs())
        .fold(0.0, f64::max);
    Ok(QrReport {
        matrix: a.to_string(),
        tol: delta1,
        iterations: trace.iterations,
        converged: trace.converged,
        within_prediction: trace.converged && trace.iterations as u64 <= prediction.a_posteriori,
        measured_rate: trace.asymptotic_rate(),
        prediction,
        expected_rate,
        eigenvalue_estimates: trace.diagonal.clone(),
        oracle_eigenvalues: oracle,
        max_eigenvalue_rel_error,
        max_asymmetry: trace.max_asymmetry,
        spectrum_drift: trace.spectrum_drift,
        offdiag_norms: trace.offdiag_norms,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::Error;

    const P: usize = 256;

    #[test]
    fn quadratic_with_roots_one_and_two() {
        let f = IntPolynomial::from_descending(&[1, -3, 2]);
        let r = run_graeffe(&f, 2f64.powi(-10), P).unwrap();
        assert_eq!(r.prediction.k, 5);
        assert!(r.within_target);
        assert!((r.recovered[0] - 2.0).abs() < 2.0 * 2f64.powi(-10));
        assert!((r.recovered[1] - 1.0).abs() < 2f64.powi(-10));
        assert!(r.smallest_sufficient_k.unwrap() <= 5);
    }

    #[test]
    fn cubic_with_roots_one_two_four() {
        let f = IntPolynomial::from_descending(&[1, -7, 14, -8]);
        let r = run_graeffe(&f, 2f64.powi(-6), P).unwrap();
        assert!(r.within_target, "{:?}", r.rel_errors);
        assert_eq!(r.oracle.len(), 3);
    }

    #[test]
    fn complex_roots_are_refused() {
        let f = IntPolynomial::from_descending(&[1, 0, 1]);
        assert!(matches!(run_graeffe(&f, 0.01, P), Err(Error::Hypothesis(_))));
    }

    #[test]
    fn qr_on_two_by_two() {
        let a = IntMatrix::from_rows(&[vec![2, 1], vec![1, 2]]).unwrap();
        let r = run_qr(&a, 2f64.powi(-20), P).unwrap();
        assert!(r.converged && r.within_prediction);
        assert_eq!(r.prediction.a_posteriori, 30);
        assert!(r.max_eigenvalue_rel_error < 1e-5);

        let d = IntMatrix::from_rows(&[vec![5, 0], vec![0, 2]]).unwrap();
        assert_eq!(run_qr(&d, 2f64.powi(-20), P).unwrap().iterations, 0);

        let s = IntMatrix::from_rows(&[vec![5, 4], vec![4, 5]]).unwrap();
        let r = run_qr(&s, 2f64.powi(-20), P).unwrap();
        assert!((r.measured_rate.unwrap() - 1.0 / 9.0).abs() < 0.1 / 9.0);
        assert!((r.expected_rate - 1.0 / 9.0).abs() < 1e-12);
    }

    #[test]
    fn qr_refuses_indefinite_input() {
        let a = IntMatrix::from_rows(&[vec![1, 2], vec![2, 1]]).unwrap();
        assert!(matches!(run_qr(&a, 0.01, P), Err(Error::Domain(_))));
    }
}
