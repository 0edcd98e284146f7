//! Instance families and their generators.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Pow, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::condition::least_squares_geometry;
use crate::error::{Error, Result};
use crate::heights::{HeightSample, HomogeneousPoly, HomogeneousSystem};
use crate::numcore::{IntMatrix, IntPolynomial};

use super::parse::{parse_matrices, parse_polynomials};
use super::verify::{verify_instance, Status, VerifyOptions};

/// Refusal threshold for exhaustive enumeration.
pub const EXHAUSTIVE_CAP: u64 = 10_000_000;

/// Instances produced by random and adversarial modes when no count is set.
pub const DEFAULT_COUNT: u64 = 1000;

/// Candidates drawn per adversarial instance when searching near the
/// degenerate locus.
const ADVERSARIAL_TRIES: usize = 32;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Problem {
    /// κ(A) of square matrices.
    Linsys,
    /// cond_LS(A, b).
    Lsq,
    /// cond_NSE(A, λ).
    Nse,
    /// μ(f) of univariate polynomials.
    Unipoly,
    /// μ(F, ζ) of homogeneous systems.
    System,
    /// relgap of symmetric matrices.
    RelgapMat,
    /// relgap of polynomials.
    RelgapPoly,
}

impl Problem {
    pub const ALL: [Problem; 7] = [
        Problem::Linsys,
        Problem::Lsq,
        Problem::Nse,
        Problem::Unipoly,
        Problem::System,
        Problem::RelgapMat,
        Problem::RelgapPoly,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Problem::Linsys => "linsys",
            Problem::Lsq => "lsq",
            Problem::Nse => "nse",
            Problem::Unipoly => "unipoly",
            Problem::System => "system",
            Problem::RelgapMat => "relgap_mat",
            Problem::RelgapPoly => "relgap_poly",
        }
    }

    /// Number of the bound checked on this problem.
    pub fn theorem(self) -> u8 {
        match self {
            Problem::Linsys => 1,
            Problem::Lsq => 2,
            Problem::Nse => 3,
            Problem::Unipoly => 4,
            Problem::System => 5,
            Problem::RelgapMat => 6,
            Problem::RelgapPoly => 7,
        }
    }

    pub fn from_theorem(t: u8) -> Result<Problem> {
        Problem::ALL
            .into_iter()
            .find(|p| p.theorem() == t)
            .ok_or_else(|| Error::Parse(format!("no bound numbered {t}; expected 1..7")))
    }
}

impl FromStr for Problem {
    type Err = Error;

    fn from_str(s: &str) -> Result<Problem> {
        Problem::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown problem '{s}'")))
    }
}

impl fmt::Display for Problem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Exhaustive,
    Random,
    Adversarial,
    File,
}

impl Mode {
    pub fn name(self) -> &'static str {
        match self {
            Mode::Exhaustive => "exhaustive",
            Mode::Random => "random",
            Mode::Adversarial => "adversarial",
            Mode::File => "file",
        }
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mode> {
        [Mode::Exhaustive, Mode::Random, Mode::Adversarial, Mode::File]
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown mode '{s}'")))
    }
}

/// A reproducible set of problem instances.
///
/// Entries range over [entry_min, coeff_range] with entry_min defaulting to
/// −coeff_range. `n` is the matrix size (columns for least squares, number
/// of equations for systems), `m` the number of rows for least squares, `d`
/// the degree (maximal degree for systems).
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct InstanceFamily {
    pub problem: Problem,
    pub mode: Mode,
    pub n: usize,
    pub m: usize,
    pub d: usize,
    pub coeff_range: i64,
    pub entry_min: Option<i64>,
    /// Keep only positive definite matrices (symmetric families).
    pub positive_definite: bool,
    pub seed: u64,
    pub count: Option<u64>,
    pub input: Option<PathBuf>,
}

impl InstanceFamily {
    pub fn new(problem: Problem, mode: Mode) -> Self {
        InstanceFamily {
            problem,
            mode,
            n: 2,
            m: 2,
            d: 2,
            coeff_range: 1,
            entry_min: None,
            positive_definite: false,
            seed: 0,
            count: None,
            input: None,
        }
    }

    pub fn n(mut self, n: usize) -> Self {
        self.n = n;
        self
    }

    pub fn m(mut self, m: usize) -> Self {
        self.m = m;
        self
    }

    pub fn d(mut self, d: usize) -> Self {
        self.d = d;
        self
    }

    pub fn range(mut self, r: i64) -> Self {
        self.coeff_range = r;
        self
    }

    pub fn entry_min(mut self, lo: i64) -> Self {
        self.entry_min = Some(lo);
        self
    }

    pub fn positive_definite(mut self, yes: bool) -> Self {
        self.positive_definite = yes;
        self
    }

    pub fn seed(mut self, s: u64) -> Self {
        self.seed = s;
        self
    }

    pub fn count(mut self, c: u64) -> Self {
        self.count = Some(c);
        self
    }

    pub fn input(mut self, path: impl Into<PathBuf>) -> Self {
        self.input = Some(path.into());
        self
    }

    pub fn entry_bounds(&self) -> (i64, i64) {
        (self.entry_min.unwrap_or(-self.coeff_range), self.coeff_range)
    }

    /// Compact description used in records.
    pub fn descriptor(&self) -> String {
        let (lo, hi) = self.entry_bounds();
        let mut s = format!("{}/{}", self.problem, self.mode.name());
        match self.problem {
            Problem::Linsys | Problem::Nse | Problem::RelgapMat => s += &format!("/n={}", self.n),
            Problem::Lsq => s += &format!("/m={}/n={}", self.m, self.n),
            Problem::Unipoly | Problem::RelgapPoly => s += &format!("/d={}", self.d),
            Problem::System => s += &format!("/n={}/D={}", self.n, self.d),
        }
        s += &format!("/entries={lo}..{hi}");
        if self.positive_definite {
            s += "/spd";
        }
        if matches!(self.mode, Mode::Random | Mode::Adversarial) {
            s += &format!("/seed={}", self.seed);
        }
        if let Some(p) = &self.input {
            s += &format!("/file={}", p.display());
        }
        s
    }

    /// How exhaustive enumeration normalizes, for report headers.
    pub fn normalization(&self) -> &'static str {
        match self.problem {
            Problem::Unipoly | Problem::RelgapPoly => {
                "degree exactly d: leading coefficient nonzero, both signs kept; lexicographic in coefficients, highest first"
            }
            Problem::RelgapMat => "symmetric: upper triangle enumerated row-major, lexicographic",
            _ => "none: every entry tuple enumerated row-major, lexicographic",
        }
    }

    fn validate(&self) -> Result<()> {
        let (lo, hi) = self.entry_bounds();
        if lo > hi {
            return Err(Error::Domain(format!("empty entry range {lo}..{hi}")));
        }
        if self.n == 0 || self.d == 0 {
            return Err(Error::Domain("dimensions and degrees must be at least 1".into()));
        }
        if self.problem == Problem::Lsq && self.m < self.n {
            return Err(Error::Domain(format!(
                "least squares needs m >= n, got m={}, n={}",
                self.m, self.n
            )));
        }
        Ok(())
    }

    fn digits(&self) -> usize {
        match self.problem {
            Problem::Linsys | Problem::Nse => self.n * self.n,
            Problem::RelgapMat => self.n * (self.n + 1) / 2,
            Problem::Lsq => self.m * self.n + self.m,
            Problem::Unipoly | Problem::RelgapPoly => self.d + 1,
            Problem::System => 0,
        }
    }

    /// Number of instances exhaustive enumeration would visit before the
    /// positive-definite filter.
    pub fn exhaustive_count(&self) -> BigInt {
        let (lo, hi) = self.entry_bounds();
        let k = BigInt::from(hi - lo + 1);
        let nonzero_leading = BigInt::from((lo..=hi).filter(|&v| v != 0).count());
        match self.problem {
            Problem::Unipoly | Problem::RelgapPoly => nonzero_leading * Pow::pow(k, self.d),
            _ => Pow::pow(k, self.digits()),
        }
    }
}

/// One problem instance.
#[derive(Clone, Debug, PartialEq)]
pub enum Instance {
    Matrix(IntMatrix),
    LeastSquares {
        a: IntMatrix,
        b: Vec<i64>,
    },
    Poly(IntPolynomial),
    /// A system together with an integer representative of a known root.
    System {
        f: HomogeneousSystem,
        root: Vec<i64>,
    },
}

impl Instance {
    /// Stable identifier: the first 16 hex digits of the SHA-256 of the
    /// canonical text form.
    pub fn id(&self) -> String {
        let digest = Sha256::digest(self.to_string().as_bytes());
        digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
    }
}

impl fmt::Display for Instance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Instance::Matrix(a) => write!(f, "A={a}"),
            Instance::LeastSquares { a, b } => {
                let b: Vec<String> = b.iter().map(ToString::to_string).collect();
                write!(f, "A={a}; b=[{}]", b.join(","))
            }
            Instance::Poly(p) => write!(f, "f={p}"),
            Instance::System { f: s, root } => {
                let r: Vec<String> = root.iter().map(ToString::to_string).collect();
                write!(f, "F={s}; zeta=[{}]", r.join(","))
            }
        }
    }
}

/// Lexicographic enumeration of all digit tuples in [lo, hi]^k.
struct Odometer {
    digits: Vec<i64>,
    lo: i64,
    hi: i64,
    done: bool,
}

impl Odometer {
    fn new(k: usize, lo: i64, hi: i64) -> Self {
        Odometer {
            digits: vec![lo; k],
            lo,
            hi,
            done: false,
        }
    }
}

impl Iterator for Odometer {
    type Item = Vec<i64>;

    fn next(&mut self) -> Option<Vec<i64>> {
        if self.done {
            return None;
        }
        let out = self.digits.clone();
        let mut i = self.digits.len();
        loop {
            if i == 0 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.digits[i] < self.hi {
                self.digits[i] += 1;
                break;
            }
            self.digits[i] = self.lo;
        }
        Some(out)
    }
}

fn symmetric_from_upper(n: usize, upper: &[i64]) -> IntMatrix {
    let mut e = vec![0; n * n];
    let mut k = 0;
    for i in 0..n {
        for j in i..n {
            e[i * n + j] = upper[k];
            e[j * n + i] = upper[k];
            k += 1;
        }
    }
    IntMatrix::new(n, n, e).expect("square shape")
}

fn keep_matrix(fam: &InstanceFamily, a: &IntMatrix) -> bool {
    !fam.positive_definite || a.is_positive_definite().unwrap_or(false)
}

/// Instance stream of a family; the stream is fully determined by the
/// family (seed included).
pub fn generate(fam: &InstanceFamily) -> Result<Box<dyn Iterator<Item = Instance> + Send>> {
    fam.validate()?;
    match fam.mode {
        Mode::Exhaustive => exhaustive(fam),
        Mode::Random => {
            let mut rng = ChaCha8Rng::seed_from_u64(fam.seed);
            let f = fam.clone();
            let count = fam.count.unwrap_or(DEFAULT_COUNT);
            if f.problem == Problem::RelgapMat && f.positive_definite {
                // rejection sampling needs at least one positive definite member
                spd_exists(&f)?;
            }
            Ok(Box::new((0..count).map(move |_| random_instance(&f, &mut rng))))
        }
        Mode::Adversarial => {
            if fam.problem == Problem::System {
                return Err(Error::Refused("systems support random mode only".into()));
            }
            if fam.problem == Problem::RelgapMat && fam.positive_definite {
                spd_exists(fam)?;
            }
            let mut rng = ChaCha8Rng::seed_from_u64(fam.seed);
            let f = fam.clone();
            let count = fam.count.unwrap_or(DEFAULT_COUNT);
            Ok(Box::new((0..count).map(move |_| adversarial_instance(&f, &mut rng))))
        }
        Mode::File => from_file(fam),
    }
}

fn spd_exists(fam: &InstanceFamily) -> Result<()> {
    let (_, hi) = fam.entry_bounds();
    if hi >= 1 {
        Ok(())
    } else {
        Err(Error::Refused(
            "no positive definite matrix has all entries <= 0".into(),
        ))
    }
}

fn exhaustive(fam: &InstanceFamily) -> Result<Box<dyn Iterator<Item = Instance> + Send>> {
    if fam.problem == Problem::System {
        return Err(Error::Refused("systems support random mode only".into()));
    }
    let needed = fam.exhaustive_count();
    let cap = fam.count.map_or(EXHAUSTIVE_CAP, |c| c.min(EXHAUSTIVE_CAP));
    if needed > BigInt::from(cap) {
        return Err(Error::Refused(format!(
            "exhaustive enumeration of {} needs {needed} instances, cap is {cap}",
            fam.descriptor()
        )));
    }
    let (lo, hi) = fam.entry_bounds();
    let f = fam.clone();
    let n = fam.n;
    Ok(match fam.problem {
        Problem::Linsys | Problem::Nse => Box::new(
            Odometer::new(n * n, lo, hi).map(move |e| Instance::Matrix(IntMatrix::new(n, n, e).expect("square"))),
        ),
        Problem::RelgapMat => Box::new(
            Odometer::new(fam.digits(), lo, hi)
                .map(move |u| symmetric_from_upper(n, &u))
                .filter(move |a| keep_matrix(&f, a))
                .map(Instance::Matrix),
        ),
        Problem::Lsq => {
            let (m, n) = (fam.m, fam.n);
            Box::new(Odometer::new(fam.digits(), lo, hi).map(move |e| {
                let a = IntMatrix::new(m, n, e[..m * n].to_vec()).expect("shape");
                Instance::LeastSquares {
                    a,
                    b: e[m * n..].to_vec(),
                }
            }))
        }
        Problem::Unipoly | Problem::RelgapPoly => Box::new(
            Odometer::new(fam.d + 1, lo, hi)
                .filter(|c| c[0] != 0)
                .map(|c| Instance::Poly(IntPolynomial::from_descending(&c))),
        ),
        Problem::System => unreachable!("refused above"),
    })
}

fn entries(rng: &mut ChaCha8Rng, k: usize, lo: i64, hi: i64) -> Vec<i64> {
    (0..k).map(|_| rng.random_range(lo..=hi)).collect()
}

fn nonzero(rng: &mut ChaCha8Rng, lo: i64, hi: i64) -> i64 {
    if lo == 0 && hi == 0 {
        return 1;
    }
    loop {
        let v = rng.random_range(lo..=hi);
        if v != 0 {
            return v;
        }
    }
}

fn random_poly(rng: &mut ChaCha8Rng, d: usize, lo: i64, hi: i64) -> IntPolynomial {
    let mut c = entries(rng, d + 1, lo, hi);
    c[0] = nonzero(rng, lo, hi);
    IntPolynomial::from_descending(&c)
}

fn random_instance(fam: &InstanceFamily, rng: &mut ChaCha8Rng) -> Instance {
    let (lo, hi) = fam.entry_bounds();
    let n = fam.n;
    match fam.problem {
        Problem::Linsys | Problem::Nse => {
            Instance::Matrix(IntMatrix::new(n, n, entries(rng, n * n, lo, hi)).expect("square"))
        }
        Problem::RelgapMat => loop {
            let a = symmetric_from_upper(n, &entries(rng, fam.digits(), lo, hi));
            if keep_matrix(fam, &a) {
                return Instance::Matrix(a);
            }
        },
        Problem::Lsq => Instance::LeastSquares {
            a: IntMatrix::new(fam.m, n, entries(rng, fam.m * n, lo, hi)).expect("shape"),
            b: entries(rng, fam.m, lo, hi),
        },
        Problem::Unipoly | Problem::RelgapPoly => Instance::Poly(random_poly(rng, fam.d, lo, hi)),
        Problem::System => random_system(fam, rng),
    }
}

/// Exponent vectors of total degree d in k variables.
fn monomials(k: usize, d: u32) -> Vec<Vec<u32>> {
    if k == 1 {
        return vec![vec![d]];
    }
    let mut out = Vec::new();
    for first in (0..=d).rev() {
        for mut rest in monomials(k - 1, d - first) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// n random homogeneous equations in x₀..xₙ, each shifted along x₀^{dᵢ} so
/// that it vanishes at a random integer point with x₀ = 1.
fn random_system(fam: &InstanceFamily, rng: &mut ChaCha8Rng) -> Instance {
    let (lo, hi) = fam.entry_bounds();
    let nv = fam.n + 1;
    loop {
        let mut root = vec![1i64];
        root.extend(entries(rng, fam.n, lo, hi));
        let mut polys = Vec::with_capacity(fam.n);
        for _ in 0..fam.n {
            let deg = rng.random_range(1..=fam.d as u32);
            let mut terms: Vec<(Vec<u32>, BigInt)> = monomials(nv, deg)
                .into_iter()
                .map(|e| (e, BigInt::from(rng.random_range(lo..=hi))))
                .filter(|(_, c)| !c.is_zero())
                .collect();
            let value: BigInt = terms
                .iter()
                .map(|(e, c)| {
                    e.iter()
                        .zip(&root)
                        .fold(c.clone(), |acc, (&k, &z)| acc * Pow::pow(BigInt::from(z), k))
                })
                .sum();
            let mut lead = vec![0u32; nv];
            lead[0] = deg;
            match terms.iter_mut().find(|(e, _)| *e == lead) {
                Some((_, c)) => *c -= &value,
                None => terms.push((lead, -value)),
            }
            terms.retain(|(_, c)| !c.is_zero());
            match HomogeneousPoly::new(nv, deg, terms) {
                Ok(p) if !p.is_zero() => polys.push(p),
                _ => break,
            }
        }
        if polys.len() == fam.n {
            if let Ok(f) = HomogeneousSystem::new(polys) {
                return Instance::System { f, root };
            }
        }
    }
}

/// The candidate of smallest measured margin among ADVERSARIAL_TRIES draws,
/// alternating between a structured construction and plain random draws.
fn least_margin(
    fam: &InstanceFamily,
    rng: &mut ChaCha8Rng,
    mut construct: impl FnMut(&mut ChaCha8Rng) -> Option<Instance>,
) -> Instance {
    let opts = VerifyOptions::default();
    let mut best: Option<(f64, Instance)> = None;
    for t in 0..ADVERSARIAL_TRIES {
        let cand = if t % 2 == 0 { construct(rng) } else { None };
        let cand = cand.unwrap_or_else(|| random_instance(fam, rng));
        let r = verify_instance(&cand, fam.problem.theorem(), "", &opts);
        if let (Status::Ok | Status::Violation, Some(m)) = (r.status, r.margin_log2) {
            if best.as_ref().is_none_or(|(b, _)| m < *b) {
                best = Some((m, cand));
            }
        }
    }
    best.map_or_else(|| random_instance(fam, rng), |(_, i)| i)
}

fn adversarial_instance(fam: &InstanceFamily, rng: &mut ChaCha8Rng) -> Instance {
    let (lo, hi) = fam.entry_bounds();
    let n = fam.n;
    match fam.problem {
        // the nonsingular candidate of smallest |det| among random draws
        Problem::Linsys => {
            let mut best: Option<(BigInt, IntMatrix)> = None;
            for _ in 0..ADVERSARIAL_TRIES {
                let a = IntMatrix::new(n, n, entries(rng, n * n, lo, hi)).expect("square");
                let det = a.det().expect("square").abs();
                if det.is_zero() {
                    continue;
                }
                if best.as_ref().is_none_or(|(d, _)| det < *d) {
                    best = Some((det, a));
                }
            }
            match best {
                Some((_, a)) => Instance::Matrix(a),
                None => random_instance(fam, rng),
            }
        }
        // a perturbed Jordan block: equal diagonal, large superdiagonal
        Problem::Nse => least_margin(fam, rng, |rng| {
            let a0 = rng.random_range(lo..=hi);
            let small = (lo.max(-1), hi.min(1));
            let mut e = entries(rng, n * n, small.0, small.1);
            for i in 0..n {
                e[i * n + i] = a0;
                if i + 1 < n {
                    e[i * n + i + 1] = if hi.abs() >= lo.abs() { hi } else { lo };
                }
            }
            Some(Instance::Matrix(IntMatrix::new(n, n, e).expect("square")))
        }),
        // N·I + E with a small symmetric E: eigenvalues crowd around N
        Problem::RelgapMat => least_margin(fam, rng, |rng| {
            let big = if hi.abs() >= lo.abs() { hi } else { lo };
            let small = (lo.max(-1), hi.min(1));
            let a = symmetric_from_upper(n, &entries(rng, fam.digits(), small.0, small.1));
            let mut e = a.entries().to_vec();
            for i in 0..n {
                e[i * n + i] = big;
            }
            let a = IntMatrix::new(n, n, e).expect("square");
            keep_matrix(fam, &a).then_some(Instance::Matrix(a))
        }),
        // b as close to orthogonal to im(A) as the draws allow
        Problem::Lsq => {
            let mut best: Option<(BigRational, Instance)> = None;
            for _ in 0..ADVERSARIAL_TRIES {
                let a = IntMatrix::new(fam.m, n, entries(rng, fam.m * n, lo, hi)).expect("shape");
                let b = entries(rng, fam.m, lo, hi);
                if let Ok(g) = least_squares_geometry(&a, &b) {
                    if best.as_ref().is_none_or(|(c, _)| g.cos_theta_sq < *c) {
                        best = Some((g.cos_theta_sq, Instance::LeastSquares { a, b }));
                    }
                }
            }
            best.map_or_else(|| random_instance(fam, rng), |(_, i)| i)
        }
        // (x − a)(x − a − 1)·u: roots a and a + 1 crowd together as a grows
        Problem::Unipoly | Problem::RelgapPoly => least_margin(fam, rng, |rng| {
            (fam.d >= 2).then(|| {
                let a = rng.random_range(1..=hi.max(1));
                let u = random_poly(rng, fam.d - 2, lo, hi);
                Instance::Poly(IntPolynomial::from_i64(&[a * (a + 1), -(2 * a + 1), 1]).mul(&u))
            })
        }),
        Problem::System => unreachable!("refused in generate"),
    }
}

fn from_file(fam: &InstanceFamily) -> Result<Box<dyn Iterator<Item = Instance> + Send>> {
    let path = fam
        .input
        .as_ref()
        .ok_or_else(|| Error::Domain("file mode needs an input path".into()))?;
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let out: Vec<Instance> = match fam.problem {
        Problem::Linsys | Problem::Nse | Problem::RelgapMat => {
            parse_matrices(&text)?.into_iter().map(Instance::Matrix).collect()
        }
        Problem::Lsq => parse_matrices(&text)?
            .into_iter()
            .map(|ab| {
                // the last column is b
                let (m, c) = (ab.rows(), ab.cols());
                if c < 2 {
                    return Err(Error::Dimension(
                        "least-squares blocks need at least two columns (A|b)".into(),
                    ));
                }
                let a: Vec<i64> = (0..m)
                    .flat_map(|i| (0..c - 1).map(move |j| (i, j)))
                    .map(|(i, j)| ab.get(i, j))
                    .collect();
                let b = (0..m).map(|i| ab.get(i, c - 1)).collect();
                Ok(Instance::LeastSquares {
                    a: IntMatrix::new(m, c - 1, a)?,
                    b,
                })
            })
            .collect::<Result<_>>()?,
        Problem::Unipoly | Problem::RelgapPoly => parse_polynomials(&text)?.into_iter().map(Instance::Poly).collect(),
        Problem::System => return Err(Error::Refused("systems support random mode only".into())),
    };
    Ok(Box::new(out.into_iter()))
}

/// Seeded random rational vectors for the height checks: lengths 1..=4,
/// numerators in [−range, range], denominators in [1, range].
pub fn random_rational_vectors(seed: u64, count: usize, range: i64) -> Vec<HeightSample> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let len = rng.random_range(1..=4);
            let v = (0..len)
                .map(|_| {
                    let num = rng.random_range(-range..=range);
                    let den = rng.random_range(1..=range.max(1));
                    BigRational::new(num.into(), den.into())
                })
                .collect();
            HeightSample::RationalVector(v)
        })
        .collect()
}
