//! Word-sized prime arithmetic and Chinese remaindering.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

#[inline]
pub fn mul_mod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

#[inline]
pub fn add_mod(a: u64, b: u64, p: u64) -> u64 {
    let s = a + b;
    if s >= p {
        s - p
    } else {
        s
    }
}

#[inline]
pub fn sub_mod(a: u64, b: u64, p: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + p - b
    }
}

pub fn pow_mod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    a %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mul_mod(r, a, p);
        }
        a = mul_mod(a, a, p);
        e >>= 1;
    }
    r
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    debug_assert!(!a.is_multiple_of(p));
    pow_mod(a, p - 2, p)
}

/// Reduces a signed integer into `[0, p)`.
pub fn reduce_i128(a: i128, p: u64) -> u64 {
    a.rem_euclid(p as i128) as u64
}

pub fn reduce_big(a: &BigInt, p: u64) -> u64 {
    let r = a.mod_floor(&BigInt::from(p));
    r.iter_u64_digits().next().unwrap_or(0)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let mut d = n - 1;
    let mut s = 0;
    while d.is_multiple_of(2) {
        d /= 2;
        s += 1;
    }
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// The first `count` primes below `2^62`, in descending order.
pub fn primes(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut n = (1u64 << 62) - 1;
    while out.len() < count {
        if is_prime(n) {
            out.push(n);
        }
        n -= 2;
    }
    out
}

/// Number of 62-bit primes whose product exceeds `2^(bits + 1)`.
pub fn primes_for_bits(bits: u64) -> usize {
    (bits as usize + 2).div_ceil(61)
}

/// Incremental Chinese remaindering of integer vectors into the symmetric
/// range around zero.
#[derive(Debug, Clone)]
pub struct Crt {
    modulus: BigInt,
    values: Vec<BigInt>,
}

impl Crt {
    pub fn new(len: usize) -> Self {
        Crt {
            modulus: BigInt::one(),
            values: vec![BigInt::zero(); len],
        }
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    /// Adds residues modulo a new prime.
    pub fn push(&mut self, residues: &[u64], p: u64) {
        assert_eq!(residues.len(), self.values.len());
        let m_mod_p = reduce_big(&self.modulus, p);
        let inv = inv_mod(m_mod_p, p);
        for (v, &r) in self.values.iter_mut().zip(residues) {
            let cur = reduce_big(v, p);
            let t = mul_mod(sub_mod(r, cur, p), inv, p);
            *v += &self.modulus * BigInt::from(t);
        }
        self.modulus *= BigInt::from(p);
        let half = &self.modulus >> 1;
        for v in &mut self.values {
            *v = v.mod_floor(&self.modulus);
            if *v > half {
                *v -= &self.modulus;
            }
        }
    }

    pub fn values(&self) -> &[BigInt] {
        &self.values
    }

    pub fn into_values(self) -> Vec<BigInt> {
        self.values
    }
}

/// Bit length of the largest absolute value.
pub fn max_bits(values: &[BigInt]) -> u64 {
    values.iter().map(|v| v.abs().bits()).max().unwrap_or(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primes_are_distinct_and_large() {
        let ps = primes(5);
        assert_eq!(ps.len(), 5);
        assert!(ps.windows(2).all(|w| w[0] > w[1]));
        assert!(ps.iter().all(|&p| p > 1 << 61));
    }

    #[test]
    fn crt_recovers_signed_values() {
        let vals: Vec<BigInt> = vec![
            BigInt::from(-7),
            BigInt::parse_bytes(b"123456789012345678901234567890123", 10).unwrap(),
            -BigInt::parse_bytes(b"98765432109876543210987654321", 10).unwrap(),
        ];
        let ps = primes(3);
        let mut crt = Crt::new(vals.len());
        for &p in &ps {
            let r: Vec<u64> = vals.iter().map(|v| reduce_big(v, p)).collect();
            crt.push(&r, p);
        }
        assert_eq!(crt.values(), &vals[..]);
    }

    #[test]
    fn modular_inverse() {
        let p = primes(1)[0];
        let a = 123456789;
        assert_eq!(mul_mod(a, inv_mod(a, p), p), 1);
        assert_eq!(reduce_i128(-1, p), p - 1);
    }
}
