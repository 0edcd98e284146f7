//! Instance-by-instance comparison of actual condition values with the
//! a-priori bounds.

use std::collections::HashMap;
use std::sync::Mutex;
use std::time::{SystemTime, UNIX_EPOCH};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bounds::{bound_from_params, BoundKind, BoundParams, Log2Bound, THM5_DEFAULT_C};
use crate::condition::{
    cond_ls, cond_ls_extended, cond_nse, kappa, kappa_extended, mu_system, mu_univariate, relgap_matrix, relgap_poly,
    Condition, ConditionValue, EigenSelector,
};
use crate::error::{Error, Result};
use crate::numcore::ext::{
    max_precision_bits, normalize_precision, ExtReal, Interval, Rounding, DEFAULT_PRECISION_BITS,
};

use super::family::{generate, Instance, InstanceFamily};

/// Instances verified per parallel batch; records leave in input order.
const CHUNK: usize = 4096;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Violation,
    DegenerateSkipped,
    /// The enclosures still overlapped at the precision ceiling.
    Inconclusive,
    /// Bound contains an unspecified constant; value reported only.
    ReportOnly,
}

impl Status {
    pub fn name(self) -> &'static str {
        match self {
            Status::Ok => "ok",
            Status::Violation => "violation",
            Status::DegenerateSkipped => "degenerate_skipped",
            Status::Inconclusive => "inconclusive",
            Status::ReportOnly => "report_only",
        }
    }
}

/// One line of a verification report.
///
/// For upper bounds `actual_log2` is rounded down, `bound_log2` up and
/// `margin_log2 = bound_log2 − actual_log2`. For the lower bounds on
/// relative gaps the roundings swap and `margin_log2 = actual_log2 −
/// bound_log2`. The margin is computed from the two stored doubles, so it can
/// be recomputed exactly from the record.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationRecord {
    pub instance_id: String,
    pub family: String,
    pub actual_log2: Option<f64>,
    pub bound_log2: Option<f64>,
    pub margin_log2: Option<f64>,
    pub status: Status,
    pub witness: String,
}

/// Totals of a verification run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub summary: bool,
    pub family: String,
    pub theorem: u8,
    pub normalization: String,
    pub precision_bits: usize,
    pub total: u64,
    pub ok: u64,
    pub violation: u64,
    pub degenerate_skipped: u64,
    pub inconclusive: u64,
    pub report_only: u64,
    pub min_margin_log2: Option<f64>,
    pub argmin_instance: Option<String>,
    pub argmin_witness: Option<String>,
    /// Seconds since the Unix epoch; the only nondeterministic field.
    pub timestamp: u64,
}

impl Summary {
    fn new(fam: &InstanceFamily, precision_bits: usize) -> Self {
        Summary {
            summary: true,
            family: fam.descriptor(),
            theorem: fam.problem.theorem(),
            normalization: fam.normalization().into(),
            precision_bits,
            total: 0,
            ok: 0,
            violation: 0,
            degenerate_skipped: 0,
            inconclusive: 0,
            report_only: 0,
            min_margin_log2: None,
            argmin_instance: None,
            argmin_witness: None,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
        }
    }

    fn add(&mut self, r: &VerificationRecord) {
        self.total += 1;
        *match r.status {
            Status::Ok => &mut self.ok,
            Status::Violation => &mut self.violation,
            Status::DegenerateSkipped => &mut self.degenerate_skipped,
            Status::Inconclusive => &mut self.inconclusive,
            Status::ReportOnly => &mut self.report_only,
        } += 1;
        if matches!(r.status, Status::Ok | Status::Violation) {
            if let Some(m) = r.margin_log2 {
                if self.min_margin_log2.is_none_or(|cur| m < cur) {
                    self.min_margin_log2 = Some(m);
                    self.argmin_instance = Some(r.instance_id.clone());
                    self.argmin_witness = Some(r.witness.clone());
                }
            }
        }
    }

    /// 0: no violations; 1: violations found; 3: inconclusive records.
    pub fn exit_code(&self) -> i32 {
        if self.violation > 0 {
            1
        } else if self.inconclusive > 0 {
            3
        } else {
            0
        }
    }
}

/// Knobs of a verification run.
#[derive(Clone, Debug)]
pub struct VerifyOptions {
    pub precision_bits: usize,
    /// Constant used for the system bound, which is reported only.
    pub thm5_c: u64,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions {
            precision_bits: DEFAULT_PRECISION_BITS,
            thm5_c: THM5_DEFAULT_C,
        }
    }
}

type BoundCache = Mutex<HashMap<(u8, BoundParams, usize), (Log2Bound, Interval)>>;

fn cached_bound(cache: &BoundCache, theorem: u8, params: BoundParams, p: usize) -> Result<(Log2Bound, Interval)> {
    let key = (theorem, params, p);
    if let Some(hit) = cache.lock().expect("cache lock").get(&key) {
        return Ok(hit.clone());
    }
    let b = bound_from_params(theorem, key.1.clone(), p)?;
    let e = b.enclosure()?;
    cache.lock().expect("cache lock").insert(key, (b.clone(), e.clone()));
    Ok((b, e))
}

enum Outcome {
    Value(Box<ConditionValue>, BoundParams),
    Degenerate(String),
    Exhausted(String),
}

fn params_for(inst: &Instance, theorem: u8, c: u64) -> BoundParams {
    let h = |v: BigInt| v;
    match inst {
        Instance::Matrix(a) => BoundParams {
            n: Some(a.rows() as u64),
            h: h(a.max_abs().into()),
            ..Default::default()
        },
        Instance::LeastSquares { a, b } => BoundParams {
            n: Some(a.cols() as u64),
            m: Some(a.rows() as u64),
            h: h(b
                .iter()
                .map(|v| v.unsigned_abs())
                .max()
                .unwrap_or(0)
                .max(a.max_abs())
                .into()),
            ..Default::default()
        },
        Instance::Poly(f) => BoundParams {
            d: Some(f.degree() as u64),
            h: f.max_abs(),
            ..Default::default()
        },
        Instance::System { f, .. } => BoundParams {
            n: Some(f.n() as u64),
            support: Some(f.supports().iter().sum::<usize>() as u64),
            max_degree: Some(f.max_degree() as u64),
            h: f.max_abs(),
            c: (theorem == 5).then_some(c),
            ..Default::default()
        },
    }
}

fn actual(inst: &Instance, theorem: u8, p: usize, retry: bool, c: u64) -> Outcome {
    let value = match (inst, theorem) {
        (Instance::Matrix(a), 1) => {
            if retry {
                kappa_extended(a, p)
            } else {
                kappa(a, p)
            }
        }
        (Instance::Matrix(a), 3) => match a.char_poly() {
            Ok(q) if !q.is_squarefree() => return Outcome::Degenerate("repeated eigenvalue".into()),
            Ok(_) => cond_nse(a, EigenSelector::All, p),
            Err(e) => Err(e),
        },
        (Instance::Matrix(a), 6) => relgap_matrix(a, p),
        (Instance::LeastSquares { a, b }, 2) => {
            if retry {
                cond_ls_extended(a, b, p)
            } else {
                cond_ls(a, b, p)
            }
        }
        (Instance::Poly(f), 4) => mu_univariate(f, p),
        (Instance::Poly(f), 7) => relgap_poly(f, p),
        (Instance::System { f, root }, 5) => {
            let z: Vec<(ExtReal, ExtReal)> = root
                .iter()
                .map(|&v| (ExtReal::from_i64(v, p), ExtReal::zero(p)))
                .collect();
            mu_system(f, &z, p)
        }
        _ => Err(Error::Domain(format!("bound {theorem} does not apply to {inst}"))),
    };
    match value {
        Ok(Condition::Finite(v)) => Outcome::Value(Box::new(v), params_for(inst, theorem, c)),
        Ok(Condition::Infinite { witness }) => Outcome::Degenerate(format!("infinite: {witness}")),
        Err(Error::Degenerate(w)) | Err(Error::Domain(w)) | Err(Error::Precondition(w)) => Outcome::Degenerate(w),
        Err(e) => Outcome::Exhausted(e.to_string()),
    }
}

fn f64_dir(x: &ExtReal, r: Rounding) -> f64 {
    x.to_f64_with(r)
}

fn record(
    id: &str,
    family: &str,
    status: Status,
    values: Option<(f64, f64, f64)>,
    witness: String,
) -> VerificationRecord {
    VerificationRecord {
        instance_id: id.to_string(),
        family: family.to_string(),
        actual_log2: values.map(|v| v.0),
        bound_log2: values.map(|v| v.1),
        margin_log2: values.map(|v| v.2),
        status,
        witness,
    }
}

/// Verifies one instance against the bound numbered `theorem`, doubling the
/// precision while the two enclosures overlap.
pub fn verify_instance(inst: &Instance, theorem: u8, family: &str, opts: &VerifyOptions) -> VerificationRecord {
    let cache = BoundCache::default();
    check(inst, theorem, family, opts, &cache)
}

fn check(inst: &Instance, theorem: u8, family: &str, opts: &VerifyOptions, cache: &BoundCache) -> VerificationRecord {
    let id = inst.id();
    let max = max_precision_bits();
    let mut p = normalize_precision(opts.precision_bits);
    let mut retry = false;
    loop {
        let (v, params) = match actual(inst, theorem, p, retry, opts.thm5_c) {
            Outcome::Value(v, params) => (v, params),
            Outcome::Degenerate(w) => {
                return record(&id, family, Status::DegenerateSkipped, None, format!("{inst}; {w}"))
            }
            Outcome::Exhausted(w) => return record(&id, family, Status::Inconclusive, None, format!("{inst}; {w}")),
        };
        let (bound, enc) = match cached_bound(cache, theorem, params, p) {
            Ok(b) => b,
            Err(e) => return record(&id, family, Status::DegenerateSkipped, None, format!("{inst}; {e}")),
        };
        let witness = format!("{inst}; {}", v.witness);
        let (blo, bhi) = (enc.lower(), enc.upper());
        let (status, a, b) = match bound.kind {
            BoundKind::Upper => {
                let a = f64_dir(&v.log2_value, Rounding::Down);
                let b = f64_dir(&bhi, Rounding::Up);
                let st = if bound.unspecified_constant {
                    Some(Status::ReportOnly)
                } else if v.log2_upper <= blo {
                    Some(Status::Ok)
                } else if v.log2_value > bhi {
                    Some(Status::Violation)
                } else {
                    None
                };
                (st, a, b)
            }
            BoundKind::Lower => {
                let a = f64_dir(&v.log2_upper, Rounding::Up);
                let b = f64_dir(&blo, Rounding::Down);
                let st = if v.log2_value >= bhi {
                    Some(Status::Ok)
                } else if v.log2_upper < blo {
                    Some(Status::Violation)
                } else {
                    None
                };
                (st, a, b)
            }
        };
        let margin = match bound.kind {
            BoundKind::Upper => b - a,
            BoundKind::Lower => a - b,
        };
        match status {
            Some(st) => return record(&id, family, st, Some((a, b, margin)), witness),
            None if p * 2 <= max => {
                p *= 2;
                retry = true;
            }
            None => {
                return record(
                    &id,
                    family,
                    Status::Inconclusive,
                    Some((a, b, margin)),
                    format!("{witness}; enclosures overlap at {p} bits"),
                )
            }
        }
    }
}

/// Verifies every instance of a family, streaming records to `sink` in
/// generation order.
pub fn verify(
    fam: &InstanceFamily,
    opts: &VerifyOptions,
    mut sink: impl FnMut(&VerificationRecord) -> Result<()>,
) -> Result<Summary> {
    let theorem = fam.problem.theorem();
    let desc = fam.descriptor();
    let mut summary = Summary::new(fam, normalize_precision(opts.precision_bits));
    let cache = BoundCache::default();
    let mut gen = generate(fam)?;
    loop {
        let batch: Vec<Instance> = gen.by_ref().take(CHUNK).collect();
        if batch.is_empty() {
            break;
        }
        let recs: Vec<VerificationRecord> = batch
            .par_iter()
            .map(|inst| check(inst, theorem, &desc, opts, &cache))
            .collect();
        for r in &recs {
            summary.add(r);
            sink(r)?;
        }
    }
    Ok(summary)
}

/// Runs `verify` and keeps every record in memory.
pub fn verify_collect(fam: &InstanceFamily, opts: &VerifyOptions) -> Result<(Vec<VerificationRecord>, Summary)> {
    let mut out = Vec::new();
    let s = verify(fam, opts, |r| {
        out.push(r.clone());
        Ok(())
    })?;
    Ok((out, s))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::family::{Mode, Problem};
    use crate::numcore::{IntMatrix, IntPolynomial};

    fn opts() -> VerifyOptions {
        VerifyOptions::default()
    }

    #[test]
    fn linear_systems_n2_range1() {
        let fam = InstanceFamily::new(Problem::Linsys, Mode::Exhaustive).n(2).range(1);
        let (recs, s) = verify_collect(&fam, &opts()).unwrap();
        assert_eq!(recs.len(), 81);
        assert_eq!(s.violation, 0);
        assert_eq!(s.ok + s.degenerate_skipped, 81);
        // 2x2 sign patterns with det = 0: 33 of 81
        assert_eq!(s.degenerate_skipped, 33);
        // the shear attains κ = (3 + √5)/2 against the bound 4
        let golden = ((3.0 + 5f64.sqrt()) / 2.0).log2();
        assert!((s.min_margin_log2.unwrap() - (2.0 - golden)).abs() < 1e-9);
        for r in &recs {
            if let (Some(a), Some(b), Some(m)) = (r.actual_log2, r.bound_log2, r.margin_log2) {
                assert_eq!(m, b - a);
            }
        }
    }

    #[test]
    fn one_by_one_eigenvalue_condition_is_one() {
        let inst = Instance::Matrix(IntMatrix::new(1, 1, vec![-3]).unwrap());
        let r = verify_instance(&inst, 3, "t", &opts());
        assert_eq!(r.status, Status::Ok);
        assert!((r.margin_log2.unwrap() - 2.0).abs() < 1e-12);
    }

    #[test]
    fn polynomial_gap_margin() {
        let inst = Instance::Poly(IntPolynomial::from_descending(&[1, -3, 2]));
        let r = verify_instance(&inst, 7, "t", &opts());
        assert_eq!(r.status, Status::Ok);
        assert!((r.margin_log2.unwrap() - 4.0 * 24f64.log2()).abs() < 1e-9);
    }

    #[test]
    fn degenerate_instances_are_skipped() {
        let r = verify_instance(
            &Instance::Poly(IntPolynomial::from_descending(&[1, -2, 1])),
            4,
            "t",
            &opts(),
        );
        assert_eq!(r.status, Status::DegenerateSkipped);
        assert!(r.actual_log2.is_none());
        let r = verify_instance(&Instance::Matrix(IntMatrix::identity(2)), 6, "t", &opts());
        assert_eq!(r.status, Status::DegenerateSkipped);
        let r = verify_instance(&Instance::Matrix(IntMatrix::identity(2)), 3, "t", &opts());
        assert_eq!(r.status, Status::DegenerateSkipped);
    }

    #[test]
    fn system_bound_is_report_only() {
        let fam = InstanceFamily::new(Problem::System, Mode::Random)
            .n(1)
            .d(2)
            .range(2)
            .count(5);
        let (recs, s) = verify_collect(&fam, &opts()).unwrap();
        assert_eq!(recs.len(), 5);
        assert_eq!(s.report_only + s.degenerate_skipped, 5);
        assert_eq!(s.exit_code(), 0);
    }

    #[test]
    fn mismatched_problem_is_skipped_not_failed() {
        let r = verify_instance(
            &Instance::Poly(IntPolynomial::from_descending(&[1, 1])),
            1,
            "t",
            &opts(),
        );
        assert_eq!(r.status, Status::DegenerateSkipped);
    }
}
