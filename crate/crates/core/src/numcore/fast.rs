//! Double-precision filter for symmetric integer eigenproblems.
//!
//! The characteristic polynomial is computed exactly in i128. Its roots are
//! located by a complex Aberth iteration in f64, and each one is then
//! certified by a strict sign change of the exact polynomial across a narrow
//! bracket. The sign is evaluated in outward-rounded interval arithmetic. n
//! disjoint brackets for a degree-n polynomial isolate every root. Anything
//! the filter cannot certify is left to the extended-precision path.

use num_complex::Complex64;

use super::matrix::berkowitz;

const EXACT_F64: i128 = 1 << 53;
const BRACKET_WIDTHS: [f64; 3] = [1e-12, 1e-9, 1e-6];

/// Outward-rounded double interval.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct F64Interval {
    pub lo: f64,
    pub hi: f64,
}

impl F64Interval {
    pub fn point(v: f64) -> Self {
        F64Interval { lo: v, hi: v }
    }

    pub fn new(lo: f64, hi: f64) -> Self {
        debug_assert!(lo <= hi);
        F64Interval { lo, hi }
    }

    pub fn add(self, o: Self) -> Self {
        F64Interval {
            lo: (self.lo + o.lo).next_down(),
            hi: (self.hi + o.hi).next_up(),
        }
    }

    pub fn mul(self, o: Self) -> Self {
        let c = [self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi];
        let lo = c.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = c.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        F64Interval {
            lo: lo.next_down(),
            hi: hi.next_up(),
        }
    }

    /// Quotient of positive intervals.
    pub fn div_pos(self, o: Self) -> Option<Self> {
        if !(self.lo > 0.0 && o.lo > 0.0) {
            return None;
        }
        Some(F64Interval {
            lo: (self.lo / o.hi).next_down(),
            hi: (self.hi / o.lo).next_up(),
        })
    }

    pub fn sqrt(self) -> Self {
        F64Interval {
            lo: self.lo.max(0.0).sqrt().next_down().max(0.0),
            hi: self.hi.max(0.0).sqrt().next_up(),
        }
    }

    /// log2 with a margin covering the libm error.
    pub fn log2(self) -> Option<Self> {
        if !(self.lo > 0.0) || !self.hi.is_finite() {
            return None;
        }
        let widen = |v: f64| v.abs() * f64::EPSILON * 4.0 + 1e-300;
        let lo = self.lo.log2();
        let hi = self.hi.log2();
        Some(F64Interval {
            lo: lo - widen(lo) - 2f64.powi(-60),
            hi: hi + widen(hi) + 2f64.powi(-60),
        })
    }

    pub fn sign(self) -> i8 {
        if self.lo > 0.0 {
            1
        } else if self.hi < 0.0 {
            -1
        } else {
            0
        }
    }

    pub fn mid(self) -> f64 {
        0.5 * self.lo + 0.5 * self.hi
    }
}

fn eval(coef_desc: &[f64], x: f64) -> F64Interval {
    let xi = F64Interval::point(x);
    let mut acc = F64Interval::point(coef_desc[0]);
    for &c in &coef_desc[1..] {
        acc = acc.mul(xi).add(F64Interval::point(c));
    }
    acc
}

fn aberth(coef_desc: &[f64]) -> Option<Vec<f64>> {
    let n = coef_desc.len() - 1;
    // Cauchy radius bound for the starting circle
    let r = 1.0 + coef_desc[1..].iter().map(|c| c.abs()).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| Complex64::from_polar(r, std::f64::consts::TAU * k as f64 / n as f64 + 0.4))
        .collect();
    for _ in 0..200 {
        let mut done = true;
        for i in 0..n {
            let (mut v, mut dv) = (Complex64::new(coef_desc[0], 0.0), Complex64::new(0.0, 0.0));
            for &c in &coef_desc[1..] {
                dv = dv * z[i] + v;
                v = v * z[i] + c;
            }
            if v.norm() == 0.0 {
                continue;
            }
            let newton = v / dv;
            let s: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
            let w = newton / (1.0 - newton * s);
            if !w.is_finite() {
                return None;
            }
            z[i] -= w;
            done &= w.norm() <= 1e-15 * z[i].norm().max(1e-300);
        }
        if done {
            break;
        }
    }
    Some(z.into_iter().map(|c| c.re).collect())
}

/// Certified enclosures of the eigenvalues of a symmetric integer matrix,
/// descending. None when the filter cannot decide (repeated or tightly
/// clustered eigenvalues, coefficients too large for exact doubles).
pub fn sym_eigen_brackets(a: &[Vec<i128>]) -> Option<Vec<F64Interval>> {
    let n = a.len();
    let cp = berkowitz(a);
    if cp.iter().any(|c| c.abs() >= EXACT_F64) {
        return None;
    }
    let coef: Vec<f64> = cp.iter().map(|&c| c as f64).collect();
    if n == 1 {
        return Some(vec![F64Interval::point(-coef[1])]);
    }
    let mut approx = aberth(&coef)?;
    approx.sort_by(|x, y| y.total_cmp(x));
    'widths: for &w in &BRACKET_WIDTHS {
        let mut out = Vec::with_capacity(n);
        for &x in &approx {
            let d = w * x.abs() + w;
            let (lo, hi) = (x - d, x + d);
            let (sl, sh) = (eval(&coef, lo).sign(), eval(&coef, hi).sign());
            if sl == 0 || sh == 0 || sl == sh {
                continue 'widths;
            }
            out.push(F64Interval::new(lo, hi));
        }
        // descending and pairwise disjoint
        if out.windows(2).all(|p| p[1].hi < p[0].lo) {
            return Some(out);
        }
    }
    None
}

/// Certified enclosure of log2 κ(A) for an invertible square matrix, where
/// κ(A)² = λmax(AᵀA)/λmin(AᵀA).
pub fn log2_kappa(a: &[Vec<i64>]) -> Option<F64Interval> {
    let g = gram_i128(a);
    let eig = sym_eigen_brackets(&g)?;
    let ratio = eig.first()?.div_pos(*eig.last()?)?;
    let l = ratio.log2()?;
    Some(F64Interval {
        lo: (0.5 * l.lo).next_down(),
        hi: (0.5 * l.hi).next_up(),
    })
}

/// Certified enclosure of κ(A) itself.
pub fn kappa(a: &[Vec<i64>]) -> Option<F64Interval> {
    let g = gram_i128(a);
    let eig = sym_eigen_brackets(&g)?;
    Some(eig.first()?.div_pos(*eig.last()?)?.sqrt())
}

/// AᵀA in i128.
pub fn gram_i128(a: &[Vec<i64>]) -> Vec<Vec<i128>> {
    let n = a.first().map_or(0, Vec::len);
    let mut g = vec![vec![0i128; n]; n];
    for i in 0..n {
        for j in i..n {
            let s: i128 = a.iter().map(|row| row[i] as i128 * row[j] as i128).sum();
            g[i][j] = s;
            g[j][i] = s;
        }
    }
    g
}
