//! Eigenvalues and singular values through exact characteristic
//! polynomials, and null vectors by full-pivot elimination.

use std::cmp::Ordering;

use astro_float::BigFloat;
use num_bigint::BigInt;

use super::ext::{bf_add, bf_cmp, bf_div, bf_from_i64, bf_mul, bf_sqrt, bf_sub, bf_zero, pow2, ExtReal, Rounding};
use super::matrix::{char_poly_of, IntMatrix};
use super::roots::{certified_roots, ComplexList, ComplexRoot, RootBox};
use crate::error::{Error, Result};

const N: Rounding = Rounding::Nearest;

/// Distinct eigenvalues of a symmetric exact matrix, with multiplicities,
/// sorted descending. Symmetry makes every eigenvalue real, so the boxes
/// are flattened onto the real axis.
pub(crate) fn sym_eigen_boxes(a: &[Vec<BigInt>], precision_bits: usize) -> Result<Vec<RootBox>> {
    let p = char_poly_of(a);
    let mut boxes = certified_roots(&p, precision_bits)?;
    for b in &mut boxes {
        b.im = bf_zero(b.prec);
        b.real = true;
    }
    boxes.sort_by(|x, y| bf_cmp(&y.re, &x.re));
    Ok(boxes)
}

fn expand(boxes: &[RootBox]) -> ComplexList {
    let mut values = Vec::new();
    for b in boxes {
        for _ in 0..b.multiplicity {
            values.push(ComplexRoot {
                re: ExtReal::from_raw(b.re.clone(), b.prec, N),
                im: ExtReal::from_raw(b.im.clone(), b.prec, N),
                error_radius: ExtReal::from_raw(b.radius.clone(), b.prec, Rounding::Up),
            });
        }
    }
    ComplexList { values }
}

/// Real eigenvalues of a symmetric matrix, descending, with multiplicity.
pub fn sym_eigenvalues(a: &IntMatrix, precision_bits: usize) -> Result<ComplexList> {
    if !a.is_symmetric() {
        return Err(Error::Domain("sym_eigenvalues needs a symmetric matrix".into()));
    }
    Ok(expand(&sym_eigen_boxes(&a.to_bigint(), precision_bits)?))
}

/// Enclosures of the eigenvalues of AᵀA (squared singular values), distinct
/// and descending, clamped to [0, ∞).
pub(crate) fn gram_eigen_boxes(a: &IntMatrix, precision_bits: usize) -> Result<Vec<RootBox>> {
    sym_eigen_boxes(&a.gram(), precision_bits)
}

/// Singular values, descending: square roots of the eigenvalues of AᵀA.
pub fn singular_values(a: &IntMatrix, precision_bits: usize) -> Result<ComplexList> {
    let boxes = gram_eigen_boxes(a, precision_bits)?;
    let mut values = Vec::new();
    for b in &boxes {
        let p = b.prec;
        let lam = b.real_enclosure().clamp_nonneg();
        let s = lam.sqrt();
        let c = if b.re.is_negative() {
            bf_zero(p)
        } else {
            bf_sqrt(&b.re, p, N)
        };
        let up = bf_sub(s.hi(), &c, p, Rounding::Up);
        let down = bf_sub(&c, s.lo(), p, Rounding::Up);
        let r = super::ext::bf_max(&up, &down);
        for _ in 0..b.multiplicity {
            values.push(ComplexRoot {
                re: ExtReal::from_raw(c.clone(), p, N),
                im: ExtReal::zero(p),
                error_radius: ExtReal::from_raw(r.clone(), p, Rounding::Up),
            });
        }
    }
    Ok(ComplexList { values })
}

// ---------------------------------------------------------------------------
// null vectors

#[derive(Clone, Debug)]
pub(crate) struct Cx {
    pub re: BigFloat,
    pub im: BigFloat,
}

impl Cx {
    pub fn new(re: BigFloat, im: BigFloat) -> Self {
        Cx { re, im }
    }
    fn zero(p: usize) -> Self {
        Cx {
            re: bf_zero(p),
            im: bf_zero(p),
        }
    }
    fn sub(&self, o: &Cx, p: usize) -> Cx {
        Cx {
            re: bf_sub(&self.re, &o.re, p, N),
            im: bf_sub(&self.im, &o.im, p, N),
        }
    }
    fn add(&self, o: &Cx, p: usize) -> Cx {
        Cx {
            re: bf_add(&self.re, &o.re, p, N),
            im: bf_add(&self.im, &o.im, p, N),
        }
    }
    fn mul(&self, o: &Cx, p: usize) -> Cx {
        Cx {
            re: bf_sub(&bf_mul(&self.re, &o.re, p, N), &bf_mul(&self.im, &o.im, p, N), p, N),
            im: bf_add(&bf_mul(&self.re, &o.im, p, N), &bf_mul(&self.im, &o.re, p, N), p, N),
        }
    }
    fn norm_sqr(&self, p: usize) -> BigFloat {
        bf_add(
            &bf_mul(&self.re, &self.re, p, N),
            &bf_mul(&self.im, &self.im, p, N),
            p,
            N,
        )
    }
    fn div(&self, o: &Cx, p: usize) -> Cx {
        let den = o.norm_sqr(p);
        let re = bf_add(&bf_mul(&self.re, &o.re, p, N), &bf_mul(&self.im, &o.im, p, N), p, N);
        let im = bf_sub(&bf_mul(&self.im, &o.re, p, N), &bf_mul(&self.re, &o.im, p, N), p, N);
        Cx {
            re: bf_div(&re, &den, p, N),
            im: bf_div(&im, &den, p, N),
        }
    }
}

/// Unit right null vector of (A − λI) (or of (Aᵀ − λI) when `transpose`),
/// normalized so that its first component of largest modulus is real
/// positive.
pub(crate) fn null_vector_cx(a: &IntMatrix, lambda: &Cx, transpose: bool, p: usize) -> Result<Vec<Cx>> {
    let n = a.rows();
    let mut m: Vec<Vec<Cx>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| {
                    let v = if transpose { a.get(j, i) } else { a.get(i, j) };
                    let e = Cx::new(bf_from_i64(v, p), bf_zero(p));
                    if i == j {
                        e.sub(lambda, p)
                    } else {
                        e
                    }
                })
                .collect()
        })
        .collect();
    // pivots below this size count as zero
    let scale = m
        .iter()
        .flatten()
        .map(|c| c.norm_sqr(p))
        .fold(bf_from_i64(1, p), |acc, x| super::ext::bf_max(&acc, &x));
    let tol = bf_mul(&scale, &pow2(-(p as i64) / 2), p, N);
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rank = n;
    for k in 0..n {
        let mut best = (k, k, bf_zero(p));
        for (i, row) in m.iter().enumerate().skip(k) {
            for (j, c) in row.iter().enumerate().skip(k) {
                let v = c.norm_sqr(p);
                if bf_cmp(&v, &best.2) == Ordering::Greater {
                    best = (i, j, v);
                }
            }
        }
        if bf_cmp(&best.2, &tol) != Ordering::Greater {
            rank = k;
            break;
        }
        m.swap(k, best.0);
        for row in m.iter_mut() {
            row.swap(k, best.1);
        }
        perm.swap(k, best.1);
        for i in k + 1..n {
            let f = m[i][k].div(&m[k][k], p);
            for j in k..n {
                let t = f.mul(&m[k][j], p);
                m[i][j] = m[i][j].sub(&t, p);
            }
        }
    }
    if rank == n {
        return Err(Error::NotAnEigenvalue(format!(
            "A - lambda*I is numerically full rank at {p} bits"
        )));
    }
    // back substitution with the first free variable set to one
    let mut y = vec![Cx::zero(p); n];
    y[rank] = Cx::new(bf_from_i64(1, p), bf_zero(p));
    for k in (0..rank).rev() {
        let mut s = Cx::zero(p);
        for j in k + 1..n {
            s = s.add(&m[k][j].mul(&y[j], p), p);
        }
        y[k] = Cx::zero(p).sub(&s, p).div(&m[k][k], p);
    }
    let mut x = vec![Cx::zero(p); n];
    for (k, &col) in perm.iter().enumerate() {
        x[col] = y[k].clone();
    }
    // normalization
    let mods: Vec<BigFloat> = x.iter().map(|c| c.norm_sqr(p)).collect();
    let total = mods.iter().fold(bf_zero(p), |acc, v| bf_add(&acc, v, p, N));
    let biggest = mods.iter().fold(bf_zero(p), |acc, v| super::ext::bf_max(&acc, v));
    let near = bf_sub(&biggest, &bf_mul(&biggest, &pow2(-(p as i64) / 4), p, N), p, N);
    let lead = mods
        .iter()
        .position(|v| bf_cmp(v, &near) != Ordering::Less)
        .expect("nonzero vector");
    let lead_abs = bf_sqrt(&mods[lead], p, N);
    let norm = bf_sqrt(&total, p, N);
    // multiply by conj(x_lead) / (|x_lead| · ‖x‖)
    let denom = bf_mul(&lead_abs, &norm, p, N);
    let phase = Cx::new(
        bf_div(&x[lead].re, &denom, p, N),
        bf_div(&x[lead].im.neg(), &denom, p, N),
    );
    let mut out: Vec<Cx> = x.iter().map(|c| c.mul(&phase, p)).collect();
    out[lead].im = bf_zero(p);
    out[lead].re = bf_div(&lead_abs, &norm, p, N);
    Ok(out)
}

/// Unit right null vector of (A − λI), with the first largest-modulus
/// component made real positive.
pub fn null_vector(
    a: &IntMatrix,
    lambda_re: &ExtReal,
    lambda_im: &ExtReal,
    precision_bits: usize,
) -> Result<Vec<(ExtReal, ExtReal)>> {
    if !a.is_square() {
        return Err(Error::Dimension("null_vector needs a square matrix".into()));
    }
    let p = super::ext::normalize_precision(precision_bits);
    let lam = Cx::new(lambda_re.value().clone(), lambda_im.value().clone());
    let v = null_vector_cx(a, &lam, false, p)?;
    Ok(v.into_iter()
        .map(|c| (ExtReal::from_raw(c.re, p, N), ExtReal::from_raw(c.im, p, N)))
        .collect())
}

/// ‖v‖² of a complex vector as an interval-free nearest value, for tests.
#[cfg(test)]
fn norm_sqr(v: &[(ExtReal, ExtReal)]) -> f64 {
    v.iter().map(|(a, b)| a.to_f64().powi(2) + b.to_f64().powi(2)).sum()
}
