//! Factorization of roots-of-unity polynomials into `(x^n - 1)^e` products.

use std::fmt;

use crate::error::{Error, Result};
use crate::modular::{add_mod, mul_mod, primes, reduce_big, sub_mod};
#[cfg(test)]
use crate::poly::cyclotomic;
use crate::poly::{mobius, ZPolynomial};

/// A monic polynomial written as `prod (x^n - 1)^e`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CharPolyFactorization {
    /// `(n, e)` pairs with `e != 0`, in decreasing `n`.
    pub factors: Vec<(usize, i64)>,
    /// Multiplicity of each cyclotomic factor `Phi_d`, in increasing `d`.
    pub cyclotomic: Vec<(usize, usize)>,
}

impl CharPolyFactorization {
    /// Expands the product exactly.
    pub fn expand(&self) -> ZPolynomial {
        let mut num = ZPolynomial::one();
        let mut den = ZPolynomial::one();
        for &(n, e) in &self.factors {
            let f = ZPolynomial::x_pow_minus_one(n).pow(e.unsigned_abs() as u32);
            if e > 0 {
                num = &num * &f;
            } else {
                den = &den * &f;
            }
        }
        // Every x^n - 1 has leading coefficient 1, so the signs cancel.
        num.div_exact_monic(&den)
            .expect("factorization expands to a polynomial")
    }

    pub fn degree(&self) -> i64 {
        self.factors.iter().map(|&(n, e)| n as i64 * e).sum()
    }
}

impl fmt::Display for CharPolyFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.factors.is_empty() {
            return write!(f, "1");
        }
        for &(n, e) in &self.factors {
            if n == 1 {
                write!(f, "(x-1)")?;
            } else {
                write!(f, "(x^{n}-1)")?;
            }
            if e != 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

fn totients(limit: usize) -> Vec<usize> {
    let mut phi: Vec<usize> = (0..=limit).collect();
    for i in 2..=limit {
        if phi[i] == i {
            for j in (i..=limit).step_by(i) {
                phi[j] -= phi[j] / i;
            }
        }
    }
    phi
}

/// An index beyond which every totient exceeds `deg`.
fn totient_search_limit(deg: usize) -> usize {
    let lower = |n: f64| {
        let ll = n.ln().ln();
        n / (1.7811 * ll + 2.51 / ll)
    };
    let mut n = 64usize;
    while lower(n as f64) <= deg as f64 {
        n *= 2;
    }
    n
}

/// `Phi_d` modulo `q`.
fn cyclotomic_mod(d: usize, q: u64) -> Vec<u64> {
    let mut poly = vec![1u64];
    let divisors: Vec<usize> = (1..=d).filter(|k| d.is_multiple_of(*k)).collect();
    for &k in &divisors {
        if mobius(d / k) == 1 {
            // multiply by x^k - 1
            let mut next = vec![0u64; poly.len() + k];
            for (i, &c) in poly.iter().enumerate() {
                next[i + k] = add_mod(next[i + k], c, q);
                next[i] = sub_mod(next[i], c, q);
            }
            poly = next;
        }
    }
    for &k in &divisors {
        if mobius(d / k) == -1 {
            // divide by x^k - 1: quotient b satisfies b_i = b_{i-k} - a_i
            let n = poly.len() - k;
            let mut b = vec![0u64; n];
            for i in 0..n {
                let prev = if i >= k { b[i - k] } else { 0 };
                b[i] = sub_mod(prev, poly[i], q);
            }
            poly = b;
        }
    }
    poly
}

/// Divides `p` by monic `d` modulo `q`, returning the quotient if exact.
fn div_mod(p: &[u64], d: &[u64], q: u64) -> Option<Vec<u64>> {
    let dd = d.len() - 1;
    if p.len() <= dd {
        return None;
    }
    let mut r = p.to_vec();
    let mut quot = vec![0u64; r.len() - dd];
    for k in (0..quot.len()).rev() {
        let c = r[k + dd];
        if c == 0 {
            continue;
        }
        for j in 0..dd {
            r[k + j] = sub_mod(r[k + j], mul_mod(c, d[j], q), q);
        }
        r[k + dd] = 0;
        quot[k] = c;
    }
    r.iter().all(|&x| x == 0).then_some(quot)
}

/// Factors a monic polynomial whose roots are all roots of unity.
pub fn cyclotomic_factorize(p: &ZPolynomial) -> Result<CharPolyFactorization> {
    if !p.is_monic() {
        return Err(Error::InvalidArgument("polynomial must be monic".into()));
    }
    let deg = p.degree().unwrap_or(0);
    let q = primes(1)[0];
    let mut work: Vec<u64> = p.coeffs().iter().map(|c| reduce_big(c, q)).collect();
    let limit = totient_search_limit(deg);
    let phi = totients(limit);
    let mut mult: Vec<(usize, usize)> = Vec::new();
    let mut remaining = deg;
    for d in 1..=limit {
        if remaining == 0 {
            break;
        }
        if phi[d] > remaining {
            continue;
        }
        let cyc = cyclotomic_mod(d, q);
        let mut count = 0;
        while let Some(quot) = div_mod(&work, &cyc, q) {
            work = quot;
            count += 1;
            remaining -= phi[d];
        }
        if count > 0 {
            mult.push((d, count));
        }
    }
    if remaining > 0 {
        return Err(Error::NotRootsOfUnity {
            residual_degree: remaining,
        });
    }
    // Solve c_d = sum_{d | n} e_n from the largest n downwards.
    let top = mult.last().map_or(0, |&(d, _)| d);
    let mut c = vec![0i64; top + 1];
    for &(d, m) in &mult {
        c[d] = m as i64;
    }
    let mut e = vec![0i64; top + 1];
    for d in (1..=top).rev() {
        let above: i64 = (2 * d..=top).step_by(d).map(|n| e[n]).sum();
        e[d] = c[d] - above;
    }
    let factors: Vec<(usize, i64)> = (1..=top)
        .rev()
        .filter(|&n| e[n] != 0)
        .map(|n| (n, e[n]))
        .collect();
    let out = CharPolyFactorization {
        factors,
        cyclotomic: mult,
    };
    if out.expand() != *p {
        return Err(Error::NotRootsOfUnity {
            residual_degree: deg,
        });
    }
    Ok(out)
}

/// Multiplicity of the eigenvalue `+1`.
pub fn multiplicity_of_plus_one(f: &CharPolyFactorization) -> i64 {
    f.factors.iter().map(|&(_, e)| e).sum()
}

/// Exponent of `Phi_d` in a factorization, zero when absent.
pub fn cyclotomic_multiplicity(f: &CharPolyFactorization, d: usize) -> usize {
    f.cyclotomic
        .iter()
        .find(|&&(k, _)| k == d)
        .map_or(0, |&(_, m)| m)
}
