//! Integer sequences at `z = -1`: recurrences, generating functions,
//! periods and the identities they satisfy.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::partition::charpoly::operator_charpoly_at;
use crate::partition::{
    cyclotomic_factorize, sequence_at_minus_one, sequence_operator_order, BoundaryCondition,
};
use crate::poly::ZPolynomial;
use crate::transfer::{build_cyclic, build_free, Model};

/// Longest period reported by [`detect_period`].
pub const PERIOD_CAP: u64 = 100_000;

/// Hard-square values `Z(-1)` for `L_v = 1..=n`.
pub fn sequence(bc: BoundaryCondition, lh: usize, n: usize) -> Result<Vec<BigInt>> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one term".into()));
    }
    sequence_at_minus_one(Model::HardSquare, lh, bc, n)
}

/// Minimal linear recurrence and generating function of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct SequenceFit {
    pub bc: Option<BoundaryCondition>,
    pub lh: Option<usize>,
    pub values: Vec<BigInt>,
    /// `s_n = sum_i recurrence[i-1] * s_{n-i}` once `n > order`.
    pub recurrence: Vec<BigRational>,
    /// `G(x) = sum_{k >= 1} s_k x^(k-1) = numerator / denominator`.
    pub numerator: ZPolynomial,
    pub denominator: ZPolynomial,
    pub period: Option<u64>,
    /// Number of leading terms not covered by the periodic part.
    pub transient: usize,
}

impl SequenceFit {
    pub fn order(&self) -> usize {
        self.recurrence.len()
    }

    /// Runs the recurrence forward to `n` terms.
    pub fn extend(&self, n: usize) -> Vec<BigInt> {
        let mut out: Vec<BigRational> = self
            .values
            .iter()
            .take(n)
            .map(|v| BigRational::from_integer(v.clone()))
            .collect();
        while out.len() < n {
            let k = out.len();
            let mut acc = BigRational::zero();
            for (i, r) in self.recurrence.iter().enumerate() {
                acc += r * &out[k - 1 - i];
            }
            out.push(acc);
        }
        out.into_iter().map(|r| r.to_integer()).collect()
    }
}

/// Berlekamp-Massey over the rationals. Returns the connection polynomial
/// `C` with `C[0] = 1` and the linear complexity.
fn berlekamp_massey(s: &[BigRational]) -> (Vec<BigRational>, usize) {
    let mut c = vec![BigRational::one()];
    let mut b = vec![BigRational::one()];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bb = BigRational::one();
    for n in 0..s.len() {
        let mut d = s[n].clone();
        for i in 1..=l.min(c.len() - 1) {
            d += &c[i] * &s[n - i];
        }
        if d.is_zero() {
            m += 1;
            continue;
        }
        let coef = &d / &bb;
        let mut next = c.clone();
        if next.len() < b.len() + m {
            next.resize(b.len() + m, BigRational::zero());
        }
        for (i, bi) in b.iter().enumerate() {
            next[i + m] -= &coef * bi;
        }
        if 2 * l <= n {
            b = std::mem::replace(&mut c, next);
            l = n + 1 - l;
            bb = d;
            m = 1;
        } else {
            c = next;
            m += 1;
        }
    }
    c.resize(l + 1, BigRational::zero());
    (c, l)
}

/// Content-free pair with positive constant term in the denominator.
fn normalize_fraction(num: ZPolynomial, den: ZPolynomial) -> (ZPolynomial, ZPolynomial) {
    let g = num
        .coeffs()
        .iter()
        .chain(den.coeffs())
        .fold(BigInt::zero(), |g, c| g.gcd(c));
    let sign = if den.coeff(0).is_negative() { -1 } else { 1 };
    let scale =
        |p: &ZPolynomial| ZPolynomial::new(p.coeffs().iter().map(|c| c / &g * sign).collect());
    if g.is_zero() {
        return (num, den);
    }
    (scale(&num), scale(&den))
}

/// Exact minimal recurrence of an integer sequence.
pub fn minimal_recursion(values: &[BigInt]) -> Result<SequenceFit> {
    let s: Vec<BigRational> = values
        .iter()
        .map(|v| BigRational::from_integer(v.clone()))
        .collect();
    let (c, l) = berlekamp_massey(&s);
    if 2 * l > values.len() {
        return Err(Error::InsufficientTerms {
            have: values.len(),
            need: 2 * l,
        });
    }
    // numerator = (G * C) mod x^l
    let mut num = vec![BigRational::zero(); l];
    for (k, slot) in num.iter_mut().enumerate() {
        for i in 0..=k {
            *slot += &c[i] * &s[k - i];
        }
    }
    let scale = c
        .iter()
        .chain(&num)
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled = |v: &[BigRational]| {
        ZPolynomial::new(
            v.iter()
                .map(|x| (x * BigRational::from_integer(scale.clone())).to_integer())
                .collect(),
        )
    };
    let (numerator, denominator) = normalize_fraction(scaled(&num), scaled(&c));
    Ok(finish_fit(values, &c, numerator, denominator))
}

fn finish_fit(
    values: &[BigInt],
    c: &[BigRational],
    numerator: ZPolynomial,
    denominator: ZPolynomial,
) -> SequenceFit {
    let recurrence = c[1..].iter().map(|x| -x.clone()).collect();
    let deg_num = numerator.degree().map_or(0, |d| d + 1);
    let deg_den = denominator.degree().unwrap_or(0);
    let mut fit = SequenceFit {
        bc: None,
        lh: None,
        values: values.to_vec(),
        recurrence,
        numerator,
        denominator,
        period: None,
        transient: deg_num.saturating_sub(deg_den),
    };
    fit.period = detect_period(&fit);
    fit
}

/// Smallest `p` such that the denominator divides `1 - x^p`.
pub fn detect_period(fit: &SequenceFit) -> Option<u64> {
    let den = &fit.denominator;
    if den.degree()? == 0 {
        // Polynomial generating function: eventually zero, period 1.
        return Some(1);
    }
    let monic = if den.leading().is_negative() {
        -den.clone()
    } else {
        den.clone()
    };
    if !monic.is_monic() {
        return None;
    }
    let f = cyclotomic_factorize(&monic).ok()?;
    if f.cyclotomic.iter().any(|&(_, m)| m > 1) {
        return None;
    }
    let mut p = 1u64;
    for &(d, _) in &f.cyclotomic {
        p = p.lcm(&(d as u64));
        if p > PERIOD_CAP {
            return None;
        }
    }
    Some(p)
}

/// Fits the `z = -1` sequence of a boundary condition, computing enough
/// terms to certify the recurrence.
pub fn fit_sequence(bc: BoundaryCondition, lh: usize, n: Option<usize>) -> Result<SequenceFit> {
    let order = sequence_operator_order(Model::HardSquare, lh, bc)?;
    let n = n.unwrap_or(2 * order + 4);
    let values = sequence(bc, lh, n)?;
    let mut fit = minimal_recursion(&values)?;
    fit.bc = Some(bc);
    fit.lh = Some(lh);
    Ok(fit)
}

/// Pairs `(L_v, L_h)` with `gcd = 1` where the torus value is not 1.
pub fn check_torus_coprimality(
    lh_max: usize,
    lv_max: usize,
) -> Result<Vec<(usize, usize, BigInt)>> {
    let mut out = Vec::new();
    for lh in 1..=lh_max {
        let seq = sequence(BoundaryCondition::CC, lh, lv_max)?;
        for (k, v) in seq.into_iter().enumerate() {
            let lv = k + 1;
            if lv.gcd(&lh) == 1 && !v.is_one() {
                out.push((lv, lh, v));
            }
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogDerivativeCheck {
    pub holds: bool,
    /// Index `k` of the first mismatching coefficient of `x^k`.
    pub first_mismatch: Option<usize>,
}

/// Compares `sum_k Z_{k+1}(-1) x^k` with `-Q'(x)/Q(x)`, where
/// `Q(x) = det(I - x T(-1))` for the operator running along `L_v`.
pub fn check_log_derivative_identity(
    bc: BoundaryCondition,
    lh: usize,
    depth: usize,
) -> Result<LogDerivativeCheck> {
    let op = if bc.row_boundary() == crate::lattice::Boundary::Cyclic {
        build_cyclic(Model::HardSquare, lh)?
    } else {
        build_free(Model::HardSquare, lh)?
    };
    let p = operator_charpoly_at(&op, -1)?;
    let q = p.reversed();
    let s = sequence(bc, lh, depth)?;
    let g = ZPolynomial::new(s);
    // G * Q + Q' must vanish modulo x^depth.
    let lhs = &g.mul_trunc(&q, depth) + &q.derivative();
    let first_mismatch = (0..depth).find(|&k| !lhs.coeff(k).is_zero());
    Ok(LogDerivativeCheck {
        holds: first_mismatch.is_none(),
        first_mismatch,
    })
}

/// Writes `G(x) = d/dx ln prod_p (1 - x^p)^{m_p}` when possible.
///
/// Requires a periodic fit; returns the nonzero `(p, m_p)` in decreasing `p`.
pub fn check_product_form(fit: &SequenceFit) -> Option<Vec<(u64, i64)>> {
    let period = fit.period?;
    if fit.transient > 0 {
        return None;
    }
    let n = (period as usize).max(fit.values.len());
    let s = fit.extend(n);
    // s_n = -sum_{p | n} p m_p
    let mut m: Vec<BigInt> = vec![BigInt::zero(); n + 1];
    for k in 1..=n {
        let mut acc = -s[k - 1].clone();
        for d in 1..k {
            if k % d == 0 {
                acc -= &m[d] * BigInt::from(d);
            }
        }
        let (q, r) = acc.div_rem(&BigInt::from(k));
        if !r.is_zero() {
            return None;
        }
        if !q.is_zero() && period % k as u64 != 0 {
            return None;
        }
        m[k] = q;
    }
    let mut out: Vec<(u64, i64)> = m
        .iter()
        .enumerate()
        .skip(1)
        .filter(|(_, v)| !v.is_zero())
        .map(|(p, v)| Some((p as u64, v.to_i64()?)))
        .collect::<Option<_>>()?;
    out.reverse();
    Some(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OddRuleReport {
    pub lh: usize,
    pub values: Vec<BigInt>,
    /// `L_v` where "-2 iff 3 | gcd(L_h, L_v - 1), else 1" fails.
    pub table_rule_mismatches: Vec<usize>,
    /// `L_v` where "-2 iff 3 | gcd(L_h - 1, L_v), else 1" fails.
    pub literal_rule_mismatches: Vec<usize>,
}

impl OddRuleReport {
    pub fn table_rule_holds(&self) -> bool {
        self.table_rule_mismatches.is_empty()
    }

    pub fn literal_rule_holds(&self) -> bool {
        self.literal_rule_mismatches.is_empty()
    }
}

/// Tests both readings of the odd-width cylinder rule.
pub fn check_odd_cylinder_rule(lh: usize, lv_max: usize) -> Result<OddRuleReport> {
    if lh.is_multiple_of(2) {
        return Err(Error::InvalidArgument("odd width required".into()));
    }
    let values = sequence(BoundaryCondition::FC, lh, lv_max)?;
    let expect = |hit: bool| BigInt::from(if hit { -2 } else { 1 });
    let mut table = Vec::new();
    let mut literal = Vec::new();
    for (k, v) in values.iter().enumerate() {
        let lv = k + 1;
        if *v != expect(lh.gcd(&(lv - 1)).is_multiple_of(3)) {
            table.push(lv);
        }
        if *v != expect((lh - 1).gcd(&lv) % 3 == 0) {
            literal.push(lv);
        }
    }
    Ok(OddRuleReport {
        lh,
        values,
        table_rule_mismatches: table,
        literal_rule_mismatches: literal,
    })
}

/// Observed torus period next to `lcm(L_h, 2 L_h, ..., n L_h)` with
/// `n = L_h / 3 - 1`, for widths divisible by 3.
pub fn torus_period_observation(lh: usize) -> Result<(Option<u64>, Option<u64>)> {
    let fit = fit_sequence(BoundaryCondition::CC, lh, None)?;
    if !lh.is_multiple_of(3) || lh / 3 < 2 {
        return Ok((fit.period, None));
    }
    let n = lh / 3 - 1;
    let guess = (1..=n as u64).fold(1u64, |acc, k| acc.lcm(&(k * lh as u64)));
    Ok((fit.period, Some(guess)))
}
