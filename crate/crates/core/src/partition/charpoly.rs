//! Exact characteristic polynomials by modular arithmetic.

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::modular::{
    add_mod, inv_mod, mul_mod, primes, primes_for_bits, reduce_big, sub_mod, Crt,
};
use crate::poly::ZPolynomial;
use crate::transfer::TransferOperator;

/// Largest matrix accepted by [`charpoly_integer`].
pub const MAX_CHARPOLY_DIM: usize = 4000;
/// Default operator size limit for [`bivariate_charpoly`].
pub const MAX_BIVARIATE_DIM: usize = 50;

/// Characteristic polynomial mod `p` of a square matrix given mod `p`.
pub(crate) fn charpoly_mod(mut a: Vec<Vec<u64>>, p: u64) -> Vec<u64> {
    let n = a.len();
    // Reduce to upper Hessenberg form by similarity transforms.
    for j in 0..n.saturating_sub(2) {
        let Some(piv) = (j + 1..n).find(|&i| a[i][j] != 0) else {
            continue;
        };
        if piv != j + 1 {
            a.swap(piv, j + 1);
            for row in a.iter_mut() {
                row.swap(piv, j + 1);
            }
        }
        let inv = inv_mod(a[j + 1][j], p);
        for i in j + 2..n {
            if a[i][j] == 0 {
                continue;
            }
            let u = mul_mod(a[i][j], inv, p);
            let (top, bottom) = a.split_at_mut(i);
            let src = &top[j + 1];
            let dst = &mut bottom[0];
            for k in j..n {
                dst[k] = sub_mod(dst[k], mul_mod(u, src[k], p), p);
            }
            for row in a.iter_mut() {
                let add = mul_mod(u, row[i], p);
                row[j + 1] = add_mod(row[j + 1], add, p);
            }
        }
    }
    // Charpoly of the Hessenberg matrix by the standard recurrence.
    let mut polys: Vec<Vec<u64>> = vec![vec![1]];
    for m in 0..n {
        // (x - h_mm) p_{m}
        let prev = &polys[m];
        let mut next = vec![0u64; m + 2];
        for (k, &c) in prev.iter().enumerate() {
            next[k + 1] = add_mod(next[k + 1], c, p);
            next[k] = sub_mod(next[k], mul_mod(a[m][m], c, p), p);
        }
        let mut prod = 1u64;
        for i in (0..m).rev() {
            prod = mul_mod(prod, a[i + 1][i], p);
            if prod == 0 {
                break;
            }
            let coef = mul_mod(prod, a[i][m], p);
            if coef == 0 {
                continue;
            }
            for (k, &c) in polys[i].iter().enumerate() {
                next[k] = sub_mod(next[k], mul_mod(coef, c, p), p);
            }
        }
        polys.push(next);
    }
    polys.pop().unwrap()
}

fn det_mod(mut a: Vec<Vec<u64>>, p: u64) -> u64 {
    let n = a.len();
    let mut det = 1u64;
    for j in 0..n {
        let Some(piv) = (j..n).find(|&i| a[i][j] != 0) else {
            return 0;
        };
        if piv != j {
            a.swap(piv, j);
            det = p - det;
            if det == p {
                det = 0;
            }
        }
        det = mul_mod(det, a[j][j], p);
        let inv = inv_mod(a[j][j], p);
        for i in j + 1..n {
            if a[i][j] == 0 {
                continue;
            }
            let u = mul_mod(a[i][j], inv, p);
            let (top, bottom) = a.split_at_mut(i);
            for k in j..n {
                bottom[0][k] = sub_mod(bottom[0][k], mul_mod(u, top[j][k], p), p);
            }
        }
    }
    det
}

fn log2_hadamard(matrix: &[Vec<BigInt>]) -> f64 {
    matrix
        .iter()
        .map(|row| {
            let s: f64 = row
                .iter()
                .map(|x| {
                    let f = x.to_f64().unwrap_or(f64::MAX);
                    f * f
                })
                .sum();
            (1.0 + s.sqrt()).log2()
        })
        .sum()
}

/// Exact `det(xI - M)` of an integer matrix.
pub fn charpoly_integer(matrix: &[Vec<BigInt>]) -> Result<ZPolynomial> {
    let n = matrix.len();
    if n == 0 {
        return Err(Error::InvalidArgument("empty matrix".into()));
    }
    if matrix.iter().any(|r| r.len() != n) {
        return Err(Error::InvalidArgument("matrix is not square".into()));
    }
    if n > MAX_CHARPOLY_DIM {
        return Err(Error::ResourceCap {
            what: "matrix dimension",
            value: n,
            cap: MAX_CHARPOLY_DIM,
        });
    }
    let bits = log2_hadamard(matrix).ceil() as u64 + 2;
    let count = primes_for_bits(bits);
    let ps = primes(count + 1);
    let reduce = |p: u64| -> Vec<Vec<u64>> {
        matrix
            .iter()
            .map(|r| r.iter().map(|x| reduce_big(x, p)).collect())
            .collect()
    };
    let residues: Vec<Vec<u64>> = ps[..count]
        .par_iter()
        .map(|&p| charpoly_mod(reduce(p), p))
        .collect();
    let mut crt = Crt::new(n + 1);
    for (r, &p) in residues.iter().zip(&ps) {
        crt.push(r, p);
    }
    let poly = ZPolynomial::new(crt.into_values());
    // Independent check at two points modulo an unused prime.
    let q = ps[count];
    let base = reduce(q);
    for t in [7u64, 1_000_003] {
        let shifted: Vec<Vec<u64>> = base
            .iter()
            .enumerate()
            .map(|(i, row)| {
                row.iter()
                    .enumerate()
                    .map(|(j, &x)| {
                        let m = sub_mod(0, x, q);
                        if i == j {
                            add_mod(m, t, q)
                        } else {
                            m
                        }
                    })
                    .collect()
            })
            .collect();
        if det_mod(shifted, q) != poly.eval_mod(t, q) {
            return Err(Error::NonConvergence {
                re: t as f64,
                im: 0.0,
                detail: "characteristic polynomial failed its verification".into(),
            });
        }
    }
    Ok(poly)
}

/// Characteristic polynomial of an operator at integer fugacity.
pub fn operator_charpoly_at(op: &TransferOperator, z: i64) -> Result<ZPolynomial> {
    let m: Vec<Vec<BigInt>> = op
        .evaluate_integer(z)
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    charpoly_integer(&m)
}

/// Polynomial in `x` whose coefficients are integer polynomials in `z`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BivariatePolynomial {
    /// `coeffs[k]` multiplies `x^k`.
    pub coeffs: Vec<ZPolynomial>,
}

impl BivariatePolynomial {
    pub fn degree_x(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn degree_z(&self) -> usize {
        self.coeffs
            .iter()
            .filter_map(|c| c.degree())
            .max()
            .unwrap_or(0)
    }

    /// Specializes `z` to an integer.
    pub fn at_z(&self, z: i64) -> ZPolynomial {
        ZPolynomial::new(self.coeffs.iter().map(|c| c.eval_i64(z)).collect())
    }

    fn at_z_mod(&self, z: u64, p: u64) -> Vec<u64> {
        self.coeffs.iter().map(|c| c.eval_mod(z, p)).collect()
    }

    pub fn derivative_x(&self) -> BivariatePolynomial {
        BivariatePolynomial {
            coeffs: self
                .coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| {
                    let kk = ZPolynomial::from_i64(&[k as i64]);
                    &kk * c
                })
                .collect(),
        }
    }
}

/// Interpolates values at `0, 1, ..., n-1` modulo `p` into coefficients.
fn interpolate_mod(values: &[u64], p: u64) -> Vec<u64> {
    let n = values.len();
    // Newton divided differences on integer nodes.
    let mut dd = values.to_vec();
    for level in 1..n {
        let inv = inv_mod(level as u64 % p, p);
        for i in (level..n).rev() {
            dd[i] = mul_mod(sub_mod(dd[i], dd[i - 1], p), inv, p);
        }
    }
    let mut coeffs = vec![0u64; n];
    // Horner expansion of the Newton form.
    for i in (0..n).rev() {
        // coeffs = coeffs * (x - i) + dd[i]
        let mut next = vec![0u64; n];
        for k in 0..n {
            if coeffs[k] == 0 {
                continue;
            }
            if k + 1 < n {
                next[k + 1] = add_mod(next[k + 1], coeffs[k], p);
            }
            next[k] = sub_mod(next[k], mul_mod(coeffs[k], i as u64 % p, p), p);
        }
        next[0] = add_mod(next[0], dd[i], p);
        coeffs = next;
    }
    coeffs
}

/// Exact `det(xI - T(z))` as a polynomial in `x` over `Z[z]`.
pub fn bivariate_charpoly(op: &TransferOperator) -> Result<BivariatePolynomial> {
    bivariate_charpoly_with_cap(op, MAX_BIVARIATE_DIM)
}

pub fn bivariate_charpoly_with_cap(
    op: &TransferOperator,
    cap: usize,
) -> Result<BivariatePolynomial> {
    let n = op.dim();
    if n > cap {
        return Err(Error::ResourceCap {
            what: "operator dimension",
            value: n,
            cap,
        });
    }
    let deg_z: usize = op.exponents().iter().map(|&e| e as usize).sum();
    let points = deg_z + 1;
    // Coefficients are signed sums of principal minors of the count matrix.
    let counts: Vec<Vec<BigInt>> = op
        .evaluate_integer(1)
        .into_iter()
        .map(|r| r.into_iter().map(BigInt::from).collect())
        .collect();
    let bits = log2_hadamard(&counts).ceil() as u64 + 2;
    let count = primes_for_bits(bits);
    let ps = primes(count);
    let per_prime: Vec<Vec<Vec<u64>>> = ps
        .par_iter()
        .map(|&p| {
            let evals: Vec<Vec<u64>> = (0..points)
                .map(|t| {
                    let m: Vec<Vec<u64>> = (0..n)
                        .map(|i| {
                            let w = crate::modular::pow_mod(t as u64, op.exponents()[i] as u64, p);
                            let mut row = vec![0u64; n];
                            for (j, c) in op.row(i) {
                                row[j] = mul_mod(w, c as u64, p);
                            }
                            row
                        })
                        .collect();
                    charpoly_mod(m, p)
                })
                .collect();
            (0..=n)
                .map(|k| {
                    let vals: Vec<u64> = evals.iter().map(|e| e[k]).collect();
                    interpolate_mod(&vals, p)
                })
                .collect()
        })
        .collect();
    let mut coeffs = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let mut crt = Crt::new(points);
        for (pp, &p) in per_prime.iter().zip(&ps) {
            crt.push(&pp[k], p);
        }
        coeffs.push(ZPolynomial::new(crt.into_values()));
    }
    Ok(BivariatePolynomial { coeffs })
}

/// Resultant of two polynomials modulo `p` (coefficients ascending).
fn resultant_mod(a: &[u64], b: &[u64], p: u64) -> u64 {
    let trim = |v: &[u64]| -> Vec<u64> {
        let mut v = v.to_vec();
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let mut a = trim(a);
    let mut b = trim(b);
    if a.is_empty() || b.is_empty() {
        return 0;
    }
    let mut acc = 1u64;
    loop {
        let da = a.len() - 1;
        let db = b.len() - 1;
        if db == 0 {
            return mul_mod(acc, crate::modular::pow_mod(b[0], da as u64, p), p);
        }
        if da < db {
            if da % 2 == 1 && db % 2 == 1 {
                acc = sub_mod(0, acc, p);
            }
            std::mem::swap(&mut a, &mut b);
            continue;
        }
        // r = a mod b
        let mut r = a.clone();
        let inv = inv_mod(b[db], p);
        for k in (db..=da).rev() {
            let c = mul_mod(r[k], inv, p);
            if c == 0 {
                continue;
            }
            for j in 0..=db {
                r[k - db + j] = sub_mod(r[k - db + j], mul_mod(c, b[j], p), p);
            }
        }
        let r = trim(&r[..db]);
        if r.is_empty() {
            return 0;
        }
        let dr = r.len() - 1;
        // res(a, b) = (-1)^{da db} lc(b)^{da - dr} res(b, r)
        if da % 2 == 1 && db % 2 == 1 {
            acc = sub_mod(0, acc, p);
        }
        acc = mul_mod(acc, crate::modular::pow_mod(b[db], (da - dr) as u64, p), p);
        a = b;
        b = r;
    }
}

/// Discriminant in `x` as an integer polynomial in `z`.
///
/// The polynomial must have a constant leading coefficient in `x`.
pub fn discriminant_in_x(p: &BivariatePolynomial) -> Result<ZPolynomial> {
    let n = p.degree_x();
    if n < 2 {
        return Err(Error::InvalidArgument(
            "discriminant needs degree at least 2 in x".into(),
        ));
    }
    let lead = &p.coeffs[n];
    if lead.degree() != Some(0) {
        return Err(Error::InvalidArgument(
            "leading coefficient in x must be a nonzero constant".into(),
        ));
    }
    let lead = lead.coeff(0);
    let dp = p.derivative_x();
    let deg_bound = (2 * n - 1) * p.degree_z();
    let points = deg_bound + 1;
    // Hadamard bound on the Sylvester matrix with entries replaced by the
    // l1 norms of their z-polynomials.
    let l1 = |c: &ZPolynomial| -> f64 {
        c.coeffs()
            .iter()
            .map(|x| x.abs().to_f64().unwrap_or(f64::MAX))
            .sum()
    };
    let row_p: f64 = p.coeffs.iter().map(|c| l1(c).powi(2)).sum::<f64>().sqrt();
    let row_dp: f64 = dp.coeffs.iter().map(|c| l1(c).powi(2)).sum::<f64>().sqrt();
    let log2_bound = (n - 1) as f64 * row_p.max(1.0).log2() + n as f64 * row_dp.max(1.0).log2();
    let count = primes_for_bits(log2_bound.ceil() as u64 + 2);
    let ps = primes(count);
    let per_prime: Vec<Vec<u64>> = ps
        .par_iter()
        .map(|&q| {
            let vals: Vec<u64> = (0..points)
                .map(|t| {
                    let a = p.at_z_mod(t as u64, q);
                    let b = dp.at_z_mod(t as u64, q);
                    resultant_mod(&a, &b, q)
                })
                .collect();
            interpolate_mod(&vals, q)
        })
        .collect();
    let mut crt = Crt::new(points);
    for (r, &q) in per_prime.iter().zip(&ps) {
        crt.push(r, q);
    }
    let res = ZPolynomial::new(crt.into_values());
    let sign = if (n * (n - 1) / 2) % 2 == 1 { -1 } else { 1 };
    let coeffs: Vec<BigInt> = res.coeffs().iter().map(|c| c * sign / &lead).collect();
    if !lead.abs().is_one() && res.coeffs().iter().any(|c| !(c % &lead).is_zero()) {
        return Err(Error::InvalidArgument(
            "resultant not divisible by the leading coefficient".into(),
        ));
    }
    let _ = BigInt::zero();
    Ok(ZPolynomial::new(coeffs))
}
