//! Dense integer polynomials in one variable.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Integer polynomial with coefficients in ascending powers.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ZPolynomial {
    coeffs: Vec<BigInt>,
}

impl ZPolynomial {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        ZPolynomial { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn zero() -> Self {
        ZPolynomial { coeffs: Vec::new() }
    }

    pub fn one() -> Self {
        Self::from_i64(&[1])
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut c = vec![BigInt::zero(); n + 1];
        c[0] = BigInt::from(-1);
        c[n] = BigInt::one();
        Self::new(c)
    }

    pub fn monomial(coeff: BigInt, power: usize) -> Self {
        let mut c = vec![BigInt::zero(); power + 1];
        c[power] = coeff;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<BigInt> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn coeff(&self, k: usize) -> BigInt {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn leading(&self) -> BigInt {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    pub fn is_monic(&self) -> bool {
        self.coeffs.last().is_some_and(|c| c.is_one())
    }

    pub fn eval_big(&self, x: &BigInt) -> BigInt {
        let mut acc = BigInt::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c;
        }
        acc
    }

    pub fn eval_i64(&self, x: i64) -> BigInt {
        self.eval_big(&BigInt::from(x))
    }

    pub fn eval_mod(&self, x: u64, p: u64) -> u64 {
        use crate::modular::{add_mod, mul_mod, reduce_big};
        let mut acc = 0;
        for c in self.coeffs.iter().rev() {
            acc = add_mod(mul_mod(acc, x, p), reduce_big(c, p), p);
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        let mut acc = 0.0;
        for c in self.coeffs.iter().rev() {
            acc = acc * x + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn eval_complex(&self, z: Complex64) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for c in self.coeffs.iter().rev() {
            acc = acc * z + c.to_f64().unwrap_or(f64::NAN);
        }
        acc
    }

    pub fn derivative(&self) -> Self {
        Self::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| c * BigInt::from(k))
                .collect(),
        )
    }

    /// `x^deg p(1/x)`.
    pub fn reversed(&self) -> Self {
        let mut c = self.coeffs.clone();
        c.reverse();
        Self::new(c)
    }

    /// Division by a monic divisor, returning quotient and remainder.
    pub fn div_rem_monic(&self, d: &ZPolynomial) -> (ZPolynomial, ZPolynomial) {
        assert!(d.is_monic(), "divisor must be monic");
        let dd = d.coeffs.len() - 1;
        if self.coeffs.len() <= dd {
            return (ZPolynomial::zero(), self.clone());
        }
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = std::mem::take(&mut r[k + dd]);
            if c.is_zero() {
                continue;
            }
            for (j, dj) in d.coeffs[..dd].iter().enumerate() {
                if !dj.is_zero() {
                    r[k + j] -= &c * dj;
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (ZPolynomial::new(q), ZPolynomial::new(r))
    }

    /// Exact quotient by a monic divisor, or `None` if it does not divide.
    pub fn div_exact_monic(&self, d: &ZPolynomial) -> Option<ZPolynomial> {
        let (q, r) = self.div_rem_monic(d);
        r.is_zero().then_some(q)
    }

    pub fn pow(&self, e: u32) -> Self {
        let mut r = Self::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Content-free primitive part with positive leading coefficient.
    pub fn primitive(&self) -> Self {
        let g = self.coeffs.iter().fold(BigInt::zero(), |g, c| g.gcd(c));
        if g.is_zero() {
            return self.clone();
        }
        let sign = if self.leading().is_negative() {
            -BigInt::one()
        } else {
            BigInt::one()
        };
        Self::new(self.coeffs.iter().map(|c| c / &g * &sign).collect())
    }

    /// Truncated power-series product modulo `x^n`.
    pub fn mul_trunc(&self, other: &Self, n: usize) -> Self {
        let mut out = vec![BigInt::zero(); n.min(self.coeffs.len() + other.coeffs.len())];
        for (i, a) in self.coeffs.iter().enumerate().take(n) {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if i + j >= out.len() {
                    break;
                }
                out[i + j] += a * b;
            }
        }
        Self::new(out)
    }

    /// Exact quotient by any nonzero divisor, or `None` if the division
    /// leaves a remainder or a fractional coefficient.
    pub fn div_exact(&self, d: &ZPolynomial) -> Option<ZPolynomial> {
        let dd = d.degree()?;
        if self.is_zero() {
            return Some(ZPolynomial::zero());
        }
        if self.coeffs.len() <= dd {
            return None;
        }
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        let mut q = vec![BigInt::zero(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = std::mem::take(&mut r[k + dd]);
            if c.is_zero() {
                continue;
            }
            let (qk, rem) = c.div_rem(&lead);
            if !rem.is_zero() {
                return None;
            }
            for (j, dj) in d.coeffs[..dd].iter().enumerate() {
                if !dj.is_zero() {
                    r[k + j] -= &qk * dj;
                }
            }
            q[k] = qk;
        }
        r.iter().all(Zero::is_zero).then(|| ZPolynomial::new(q))
    }

    /// Pseudo-remainder `lc(d)^(deg self - deg d + 1) * self mod d`.
    pub fn pseudo_rem(&self, d: &ZPolynomial) -> ZPolynomial {
        let dd = d.degree().expect("nonzero divisor");
        let lead = d.leading();
        let mut r = self.coeffs.clone();
        while r.len() > dd && !r.is_empty() {
            let k = r.len() - 1 - dd;
            let c = r.pop().unwrap();
            for x in r.iter_mut() {
                *x *= &lead;
            }
            for (j, dj) in d.coeffs[..dd].iter().enumerate() {
                r[k + j] -= &c * dj;
            }
            while r.last().is_some_and(|c| c.is_zero()) {
                r.pop();
            }
        }
        ZPolynomial::new(r)
    }

    /// Primitive greatest common divisor with positive leading coefficient.
    pub fn gcd(&self, other: &ZPolynomial) -> ZPolynomial {
        let mut a = self.primitive();
        let mut b = other.primitive();
        if a.degree() < b.degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            let r = a.pseudo_rem(&b);
            a = b;
            b = r.primitive();
        }
        a.primitive()
    }

    /// Bit length of the largest coefficient.
    pub fn max_coeff_bits(&self) -> u64 {
        crate::modular::max_bits(&self.coeffs)
    }
}

/// The `d`-th cyclotomic polynomial.
pub fn cyclotomic(d: usize) -> ZPolynomial {
    assert!(d >= 1);
    // Phi_d = prod_{k | d} (x^k - 1)^{mu(d/k)}
    let mut num = ZPolynomial::one();
    let mut den = ZPolynomial::one();
    for k in (1..=d).filter(|k| d.is_multiple_of(*k)) {
        match mobius(d / k) {
            1 => num = &num * &ZPolynomial::x_pow_minus_one(k),
            -1 => den = &den * &ZPolynomial::x_pow_minus_one(k),
            _ => {}
        }
    }
    num.div_exact_monic(&den)
        .expect("cyclotomic division is exact")
}

pub fn mobius(mut n: usize) -> i32 {
    let mut result = 1;
    let mut p = 2;
    while p * p <= n {
        if n.is_multiple_of(p) {
            n /= p;
            if n.is_multiple_of(p) {
                return 0;
            }
            result = -result;
        }
        p += 1;
    }
    if n > 1 {
        result = -result;
    }
    result
}

impl Add for &ZPolynomial {
    type Output = ZPolynomial;
    fn add(self, rhs: &ZPolynomial) -> ZPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ZPolynomial::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub for &ZPolynomial {
    type Output = ZPolynomial;
    fn sub(self, rhs: &ZPolynomial) -> ZPolynomial {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        ZPolynomial::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul for &ZPolynomial {
    type Output = ZPolynomial;
    fn mul(self, rhs: &ZPolynomial) -> ZPolynomial {
        if self.is_zero() || rhs.is_zero() {
            return ZPolynomial::zero();
        }
        let n = self.coeffs.len() + rhs.coeffs.len() - 1;
        self.mul_trunc(rhs, n)
    }
}

impl Neg for ZPolynomial {
    type Output = ZPolynomial;
    fn neg(self) -> ZPolynomial {
        ZPolynomial::new(self.coeffs.into_iter().map(|c| -c).collect())
    }
}

impl fmt::Display for ZPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if first {
                if neg {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", if neg { '-' } else { '+' })?;
            }
            first = false;
            let show_coeff = k == 0 || !mag.is_one();
            if show_coeff {
                write!(f, "{mag}")?;
            }
            match k {
                0 => {}
                1 => write!(f, "{}x", if show_coeff { "*" } else { "" })?,
                _ => write!(f, "{}x^{k}", if show_coeff { "*" } else { "" })?,
            }
        }
        Ok(())
    }
}
