//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
//! FAIL. Runs as a plain binary so the lines are always printed.

use std::time::{Duration, Instant};

use num_bigint::BigInt;

use condbound::condition::{mu_system, Condition};
use condbound::graeffe::{iterate, recover_roots};
use condbound::harness::family::random_rational_vectors;
use condbound::harness::report::strip_timestamp;
use condbound::harness::{
    generate, run_graeffe, run_qr, verify, Instance, InstanceFamily, Mode, Problem, ReportFormat, ReportWriter, Status,
    Summary, VerifyOptions,
};
use condbound::heights::{char_poly_coefficient_bound_holds, check_height_propositions, check_root_moduli};
use condbound::numcore::{ExtReal, IntMatrix, IntPolynomial};

const P: usize = 256;
/// Criterion 1 runtime target for the 3x3 family.
const LINSYS_3X3_BUDGET: Duration = Duration::from_secs(60);
/// Random least-squares instances, spread over every (m, n) with n ≤ m ≤ 4, n ≤ 3.
const LSQ_TOTAL: u64 = 100_000;
const LSQ_SEED: u64 = 20_240_101;
/// Graeffe targets.
const DELTAS: [f64; 3] = [1.0 / 64.0, 1.0 / 1024.0, 1.0 / 1_048_576.0];
/// Allowed relative deviation of the measured QR decay rate from λ₂/λ₁.
const QR_RATE_TOL: f64 = 0.10;
const QR_DELTA1: f64 = 1.0 / 1_048_576.0;
const HEIGHT_VECTORS: usize = 10_000;
const HEIGHT_SEED: u64 = 8;
const HEIGHT_RANGE: i64 = 50;
const SYSTEMS: usize = 100;
const SYSTEM_SEED: u64 = 9;
/// Relative agreement required of μ(F, ζ), μ(F, 2ζ) and μ(3F, ζ).
const MU_INVARIANCE_TOL: f64 = 1.0 / 1_073_741_824.0;

/// Criteria expected to fail. The μ(f) bound is false for linear
/// polynomials: f = x − 1 has μ(f) = √2 while the bound evaluates to 1. The
/// run still exits nonzero if any criterion's outcome differs from this list.
const KNOWN_FAILURES: &[usize] = &[4];

struct Run {
    statuses: Vec<Status>,
    summary: Summary,
    violations: Vec<String>,
}

fn run(fam: &InstanceFamily, precision_bits: usize) -> Run {
    let opts = VerifyOptions {
        precision_bits,
        ..Default::default()
    };
    let mut statuses = Vec::new();
    let mut violations = Vec::new();
    let summary = verify(fam, &opts, |r| {
        statuses.push(r.status);
        if r.status == Status::Violation {
            violations.push(format!(
                "{} (margin {:.3})",
                r.witness,
                r.margin_log2.unwrap_or(f64::NAN)
            ));
        }
        Ok(())
    })
    .unwrap_or_else(|e| panic!("{}: {e}", fam.descriptor()));
    Run {
        statuses,
        summary,
        violations,
    }
}

fn clean(runs: &[Run]) -> bool {
    runs.iter()
        .all(|r| r.summary.violation == 0 && r.summary.inconclusive == 0 && r.summary.ok > 0)
}

fn tally(runs: &[Run]) -> String {
    let ok: u64 = runs.iter().map(|r| r.summary.ok).sum();
    let bad: u64 = runs.iter().map(|r| r.summary.violation).sum();
    let inc: u64 = runs.iter().map(|r| r.summary.inconclusive).sum();
    let skip: u64 = runs.iter().map(|r| r.summary.degenerate_skipped).sum();
    let margin = runs
        .iter()
        .filter_map(|r| r.summary.min_margin_log2)
        .fold(f64::INFINITY, f64::min);
    format!("{ok} ok, {bad} violations, {inc} inconclusive, {skip} degenerate skipped, min margin {margin:.4} bits")
}

fn lsq_families() -> Vec<InstanceFamily> {
    let shapes: Vec<(usize, usize)> = (1..=4).flat_map(|m| (1..=m.min(3)).map(move |n| (m, n))).collect();
    let per = LSQ_TOTAL / shapes.len() as u64;
    let extra = LSQ_TOTAL - per * shapes.len() as u64;
    shapes
        .iter()
        .enumerate()
        .map(|(i, &(m, n))| {
            InstanceFamily::new(Problem::Lsq, Mode::Random)
                .m(m)
                .n(n)
                .range(3)
                .seed(LSQ_SEED + i as u64)
                .count(per + if i == 0 { extra } else { 0 })
        })
        .collect()
}

fn mat_exhaustive(problem: Problem, n: usize, range: i64) -> InstanceFamily {
    InstanceFamily::new(problem, Mode::Exhaustive).n(n).range(range)
}

fn poly_exhaustive(problem: Problem, d: usize) -> InstanceFamily {
    InstanceFamily::new(problem, Mode::Exhaustive).d(d).range(2)
}

fn spd_family(n: usize) -> InstanceFamily {
    InstanceFamily::new(Problem::RelgapMat, Mode::Exhaustive)
        .n(n)
        .range(3)
        .entry_min(1)
        .positive_definite(true)
}

struct Outcome {
    pass: bool,
    detail: String,
}

fn criterion_1(store: &mut Vec<(InstanceFamily, Vec<Status>)>) -> Outcome {
    let small = run(&mat_exhaustive(Problem::Linsys, 2, 2), P);
    let t = Instant::now();
    let fam3 = mat_exhaustive(Problem::Linsys, 3, 2);
    let big = run(&fam3, P);
    let elapsed = t.elapsed();
    let runs = [small, big];
    let pass = clean(&runs) && elapsed < LINSYS_3X3_BUDGET;
    let detail = format!("{}; 3x3 family in {:.1}s", tally(&runs), elapsed.as_secs_f64());
    let [small, big] = runs;
    store.push((mat_exhaustive(Problem::Linsys, 2, 2), small.statuses));
    store.push((fam3, big.statuses));
    Outcome { pass, detail }
}

fn keep(store: &mut Vec<(InstanceFamily, Vec<Status>)>, fams: Vec<InstanceFamily>) -> Vec<Run> {
    let runs: Vec<Run> = fams.iter().map(|f| run(f, P)).collect();
    for (f, r) in fams.into_iter().zip(&runs) {
        store.push((f, r.statuses.clone()));
    }
    runs
}

fn criterion_2(store: &mut Vec<(InstanceFamily, Vec<Status>)>) -> Outcome {
    let runs = keep(store, lsq_families());
    let total: u64 = runs.iter().map(|r| r.summary.total).sum();
    Outcome {
        pass: clean(&runs) && total == LSQ_TOTAL,
        detail: format!("{total} instances: {}", tally(&runs)),
    }
}

fn criterion_3(store: &mut Vec<(InstanceFamily, Vec<Status>)>) -> Outcome {
    let runs = keep(store, vec![mat_exhaustive(Problem::Nse, 2, 2)]);
    Outcome {
        pass: clean(&runs),
        detail: tally(&runs),
    }
}

fn criterion_4(store: &mut Vec<(InstanceFamily, Vec<Status>)>) -> Outcome {
    let runs = keep(store, (1..=4).map(|d| poly_exhaustive(Problem::Unipoly, d)).collect());
    let per_degree: Vec<String> = runs
        .iter()
        .enumerate()
        .map(|(i, r)| format!("d={}: {} violations", i + 1, r.summary.violation))
        .collect();
    let witnesses: Vec<&String> = runs.iter().flat_map(|r| &r.violations).collect();
    let mut detail = format!("{} [{}]", tally(&runs), per_degree.join(", "));
    if !witnesses.is_empty() {
        detail += &format!(
            "; violating: {}",
            witnesses.iter().map(|w| w.as_str()).collect::<Vec<_>>().join(" | ")
        );
    }
    Outcome {
        pass: clean(&runs),
        detail,
    }
}

fn criterion_5(store: &mut Vec<(InstanceFamily, Vec<Status>)>) -> Outcome {
    let mats = keep(store, vec![spd_family(2), spd_family(3)]);
    let polys = keep(
        store,
        (2..=4).map(|d| poly_exhaustive(Problem::RelgapPoly, d)).collect(),
    );
    Outcome {
        pass: clean(&mats) && clean(&polys),
        detail: format!("matrices: {}; polynomials: {}", tally(&mats), tally(&polys)),
    }
}

fn from_roots(roots: &[i64]) -> IntPolynomial {
    roots.iter().fold(IntPolynomial::from_i64(&[1]), |acc, &r| {
        acc.mul(&IntPolynomial::from_i64(&[-r, 1]))
    })
}

fn criterion_6() -> Outcome {
    let mut cases = 0;
    let mut failures = Vec::new();
    let mut worst = 0f64;
    for mask in 1u32..32 {
        let roots: Vec<i64> = (1..=5).filter(|r| mask & (1 << (r - 1)) != 0).collect();
        if roots.len() > 4 {
            continue;
        }
        let f = from_roots(&roots);
        let mut sorted = roots.clone();
        sorted.sort_by(|a, b| b.cmp(a));
        for &delta in &DELTAS {
            cases += 1;
            match run_graeffe(&f, delta, P) {
                Ok(r) => {
                    let err = r
                        .recovered
                        .iter()
                        .zip(&sorted)
                        .map(|(x, &z)| (x - z as f64).abs() / z as f64)
                        .fold(0.0, f64::max);
                    worst = worst.max(err / delta);
                    if r.recovered.len() != sorted.len() || err > delta {
                        failures.push(format!("{f} at δ={delta}: error {err:e}"));
                    }
                }
                Err(e) => failures.push(format!("{f} at δ={delta}: {e}")),
            }
        }
    }
    let quad = from_roots(&[1, 2]);
    let z1 = iterate(&quad, 3)
        .and_then(|s| recover_roots(&s, P))
        .map(|r| r.roots[0].to_f64())
        .unwrap_or(f64::NAN);
    let hand = (2.0..=2.001).contains(&z1);
    if !hand {
        failures.push(format!("x^2-3x+2 at k=3 gave {z1}"));
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!("{cases} runs within target (worst error/δ = {worst:.3e}); x^2-3x+2 at k=3 gives {z1:.6}")
        } else {
            failures.join("; ")
        },
    }
}

fn criterion_7() -> Outcome {
    let mut cases = 0;
    let mut failures = Vec::new();
    let mut worst_rate = 0f64;
    let mut worst_use = 0f64;
    for a in 1..=4i64 {
        for b in 1..=4i64 {
            for c in 1..=4i64 {
                if a * c <= b * b {
                    continue;
                }
                let m = IntMatrix::from_rows(&[vec![a, b], vec![b, c]]).expect("2x2");
                cases += 1;
                match run_qr(&m, QR_DELTA1, P) {
                    Ok(r) => {
                        let rate = r.measured_rate.unwrap_or(f64::NAN);
                        let dev = (rate - r.expected_rate).abs() / r.expected_rate;
                        worst_rate = worst_rate.max(dev);
                        worst_use = worst_use.max(r.iterations as f64 / r.prediction.a_posteriori as f64);
                        if !(dev <= QR_RATE_TOL) {
                            failures.push(format!("{m}: rate {rate} vs {}", r.expected_rate));
                        }
                        if !r.within_prediction {
                            failures.push(format!(
                                "{m}: {} iterations, predicted {}",
                                r.iterations, r.prediction.a_posteriori
                            ));
                        }
                    }
                    Err(e) => failures.push(format!("{m}: {e}")),
                }
            }
        }
    }
    Outcome {
        pass: failures.is_empty() && cases > 0,
        detail: if failures.is_empty() {
            format!(
                "{cases} matrices; worst rate deviation {:.2}%, worst iterations/predicted {worst_use:.3}",
                100.0 * worst_rate
            )
        } else {
            failures.join("; ")
        },
    }
}

fn criterion_8() -> Outcome {
    let samples = random_rational_vectors(HEIGHT_SEED, HEIGHT_VECTORS, HEIGHT_RANGE);
    let vectors = check_height_propositions(&samples, P).map_err(|e| e.to_string());
    let mut roots = 0;
    let mut failure = None;
    'outer: for d in 1..=4 {
        for inst in generate(&poly_exhaustive(Problem::Unipoly, d)).expect("family") {
            let Instance::Poly(f) = inst else { unreachable!() };
            match check_root_moduli(&f, P) {
                Ok(k) => roots += k,
                Err(e) => {
                    failure = Some(e.to_string());
                    break 'outer;
                }
            }
        }
    }
    match (vectors, failure) {
        (Ok(rep), None) => Outcome {
            pass: rep.samples == HEIGHT_VECTORS,
            detail: format!(
                "{} vectors ({} coordinate, {} square, {} sum/product checks); {roots} root moduli",
                rep.samples, rep.coordinate_checks, rep.square_checks, rep.sum_product_checks
            ),
        },
        (Err(e), _) | (_, Some(e)) => Outcome { pass: false, detail: e },
    }
}

fn mu_raw(c: &Condition) -> Option<f64> {
    match c {
        Condition::Finite(v) => Some(v.raw_value.to_f64()),
        Condition::Infinite { .. } => None,
    }
}

fn criterion_9() -> Outcome {
    let mut tested = 0;
    let mut skipped = 0;
    let mut worst = 0f64;
    let mut failures = Vec::new();
    let point = |v: &[i64], k: i64| -> Vec<(ExtReal, ExtReal)> {
        v.iter()
            .map(|&x| (ExtReal::from_i64(k * x, P), ExtReal::zero(P)))
            .collect()
    };
    'outer: for n in 1..=2 {
        let fam = InstanceFamily::new(Problem::System, Mode::Random)
            .n(n)
            .d(3)
            .range(2)
            .seed(SYSTEM_SEED + n as u64)
            .count(10 * SYSTEMS as u64);
        for inst in generate(&fam).expect("family") {
            if tested == SYSTEMS * n / 2 {
                continue 'outer;
            }
            let Instance::System { f, root } = inst else {
                unreachable!()
            };
            let base = mu_system(&f, &point(&root, 1), P);
            let Ok(Some(m0)) = base.as_ref().map(mu_raw) else {
                skipped += 1;
                continue;
            };
            tested += 1;
            let twice = mu_system(&f, &point(&root, 2), P).ok().as_ref().and_then(mu_raw);
            let scaled = mu_system(&f.scale(&BigInt::from(3)), &point(&root, 1), P)
                .ok()
                .as_ref()
                .and_then(mu_raw);
            for (what, m) in [("2ζ", twice), ("3F", scaled)] {
                match m {
                    Some(m) => {
                        let rel = (m - m0).abs() / m0;
                        worst = worst.max(rel);
                        if rel > MU_INVARIANCE_TOL {
                            failures.push(format!(
                                "{}: μ changed by {rel:e} under {what}",
                                Instance::System {
                                    f: f.clone(),
                                    root: root.clone()
                                }
                            ));
                        }
                    }
                    None => failures.push(format!("μ undefined under {what}")),
                }
            }
        }
    }
    let mut mats = 0u64;
    let mut bad = None;
    for n in 2..=3 {
        for inst in generate(&mat_exhaustive(Problem::Linsys, n, 2)).expect("family") {
            let Instance::Matrix(a) = inst else { unreachable!() };
            if a.det().map_or(true, |d| d == BigInt::from(0)) {
                continue;
            }
            mats += 1;
            if !char_poly_coefficient_bound_holds(&a).unwrap_or(false) {
                bad = Some(a.to_string());
                break;
            }
        }
    }
    if let Some(a) = &bad {
        failures.push(format!("char-poly coefficient bound fails for {a}"));
    }
    Outcome {
        pass: failures.is_empty() && tested == SYSTEMS,
        detail: if failures.is_empty() {
            format!(
                "{tested} systems ({skipped} singular draws skipped), worst relative change {worst:.2e}; char-poly coefficient bound on {mats} invertible matrices"
            )
        } else {
            failures.join("; ")
        },
    }
}

fn jsonl(fam: &InstanceFamily) -> String {
    let mut w = ReportWriter::new(Vec::new(), ReportFormat::Jsonl, "memory").expect("writer");
    let s = verify(fam, &VerifyOptions::default(), |r| w.write(r)).expect("run");
    String::from_utf8(w.finish(&s).expect("finish")).expect("utf8")
}

fn criterion_10(store: &[(InstanceFamily, Vec<Status>)]) -> Outcome {
    let mut failures = Vec::new();
    for fam in [
        lsq_families().remove(5),
        InstanceFamily::new(Problem::Linsys, Mode::Random)
            .n(3)
            .range(5)
            .seed(3)
            .count(2000),
        InstanceFamily::new(Problem::RelgapPoly, Mode::Adversarial)
            .d(4)
            .range(3)
            .seed(4)
            .count(200),
    ] {
        let (a, b) = (jsonl(&fam), jsonl(&fam));
        if strip_timestamp(&a) != strip_timestamp(&b) {
            failures.push(format!("{} is not reproducible", fam.descriptor()));
        }
    }
    let mut compared = 0usize;
    for (fam, statuses) in store {
        let doubled = run(fam, 2 * P);
        compared += statuses.len();
        if let Some(i) = statuses.iter().zip(&doubled.statuses).position(|(x, y)| x != y) {
            failures.push(format!(
                "{}: record {i} changes status at {} bits",
                fam.descriptor(),
                2 * P
            ));
        } else if statuses.len() != doubled.statuses.len() {
            failures.push(format!("{}: record count changes", fam.descriptor()));
        }
    }
    Outcome {
        pass: failures.is_empty(),
        detail: if failures.is_empty() {
            format!(
                "3 seeded reports byte-identical; {compared} statuses unchanged at {} bits",
                2 * P
            )
        } else {
            failures.join("; ")
        },
    }
}

fn main() {
    // `cargo test -- <filter>` passes arguments; the suite always runs whole.
    let mut store = Vec::new();
    let mut unexpected = Vec::new();
    let mut report = |k: usize, o: Outcome, t: Instant| {
        let known = KNOWN_FAILURES.contains(&k);
        if o.pass == known {
            unexpected.push(k);
        }
        println!(
            "criterion {k:>2}: {} ({:.1}s) {}{}",
            if o.pass { "PASS" } else { "FAIL" },
            t.elapsed().as_secs_f64(),
            o.detail,
            if known && !o.pass {
                " [known counterexample to the stated bound]"
            } else {
                ""
            }
        );
    };
    let t = Instant::now();
    report(1, criterion_1(&mut store), t);
    let t = Instant::now();
    report(2, criterion_2(&mut store), t);
    let t = Instant::now();
    report(3, criterion_3(&mut store), t);
    let t = Instant::now();
    report(4, criterion_4(&mut store), t);
    let t = Instant::now();
    report(5, criterion_5(&mut store), t);
    let t = Instant::now();
    report(6, criterion_6(), t);
    let t = Instant::now();
    report(7, criterion_7(), t);
    let t = Instant::now();
    report(8, criterion_8(), t);
    let t = Instant::now();
    report(9, criterion_9(), t);
    let t = Instant::now();
    report(10, criterion_10(&store), t);
    if !unexpected.is_empty() {
        println!("unexpected outcome for criteria {unexpected:?}");
        std::process::exit(1);
    }
}
