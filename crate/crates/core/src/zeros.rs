//! Zeros of exact partition polynomials and their density on the negative
//! real axis.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_traits::{Signed, Zero};
use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Assign, Complex, Float, Integer};

use crate::error::{Error, Result};
use crate::modular::{inv_mod, mul_mod, primes, reduce_big, sub_mod};
use crate::poly::ZPolynomial;

/// Largest working precision tried by [`find_roots`], in bits.
pub const MAX_PRECISION: u32 = 1 << 16;
const SCALE_PREC: u32 = 32;

/// Default relative tolerance for placing a zero on the negative axis.
pub const DEFAULT_AXIS_TOL: f64 = 1e-8;

/// All complex zeros of a polynomial.
#[derive(Debug, Clone)]
pub struct ZeroSet {
    /// Distinct roots with multiplicities, sorted by real then imaginary part.
    pub roots: Vec<(Complex64, usize)>,
    /// The same roots at full working precision.
    pub roots_precise: Vec<Complex>,
    /// Largest `|P(r)| / sum |c_k| |r|^k` over the roots.
    pub residual_bound: f64,
    /// Largest certified inclusion radius relative to `max(1, |r|)`.
    pub error_bound: f64,
    pub precision: u32,
    pub degree: usize,
    pub label: Option<String>,
}

impl ZeroSet {
    /// Roots repeated according to multiplicity.
    pub fn all_roots(&self) -> Vec<Complex64> {
        self.roots
            .iter()
            .flat_map(|&(r, m)| std::iter::repeat_n(r, m))
            .collect()
    }

    /// Real and imaginary parts of root `i` in decimal with `digits`
    /// significant digits.
    pub fn decimal(&self, i: usize, digits: usize) -> (String, String) {
        let r = &self.roots_precise[i];
        let fmt = |x: &Float| {
            if x.is_zero() {
                "0".to_string()
            } else {
                format!("{x:.digits$}")
            }
        };
        (fmt(r.real()), fmt(r.imag()))
    }
}

pub(crate) fn to_integer(b: &BigInt) -> Integer {
    Integer::from_str_radix(&b.to_str_radix(16), 16).expect("hex digits")
}

fn big_to_f64(b: &BigInt) -> f64 {
    num_traits::ToPrimitive::to_f64(b).unwrap_or(f64::NAN)
}

fn ln_abs_f64(b: &BigInt) -> f64 {
    if b.is_zero() {
        return f64::NEG_INFINITY;
    }
    let bits = b.bits();
    let shift = bits.saturating_sub(60);
    let top: BigInt = b.abs() >> shift;
    let top = top.iter_u64_digits().next().unwrap_or(0) as f64;
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

/// Degree of `gcd(p, p')` modulo a large prime.
fn gcd_degree_mod(p: &ZPolynomial, q: u64) -> usize {
    let trim = |mut v: Vec<u64>| {
        while v.last() == Some(&0) {
            v.pop();
        }
        v
    };
    let mut a = trim(p.coeffs().iter().map(|c| reduce_big(c, q)).collect());
    let mut b = trim(
        p.derivative()
            .coeffs()
            .iter()
            .map(|c| reduce_big(c, q))
            .collect(),
    );
    while !b.is_empty() {
        let inv = inv_mod(*b.last().unwrap(), q);
        let db = b.len() - 1;
        while a.len() > db {
            let k = a.len() - 1 - db;
            let c = mul_mod(*a.last().unwrap(), inv, q);
            for j in 0..=db {
                a[k + j] = sub_mod(a[k + j], mul_mod(c, b[j], q), q);
            }
            a = trim(a);
            if a.is_empty() {
                break;
            }
        }
        std::mem::swap(&mut a, &mut b);
    }
    a.len().saturating_sub(1)
}

/// Squarefree decomposition `p = c * prod f_i^i` over the integers.
pub fn squarefree_decomposition(p: &ZPolynomial) -> Vec<(ZPolynomial, usize)> {
    let deg = p.degree().unwrap_or(0);
    if deg == 0 {
        return Vec::new();
    }
    let q = primes(1)[0];
    if reduce_big(&p.leading(), q) != 0 && gcd_degree_mod(p, q) == 0 {
        return vec![(p.primitive(), 1)];
    }
    // Yun's algorithm.
    let f = p.primitive();
    let df = f.derivative();
    let a0 = f.gcd(&df);
    let mut b = f.div_exact(&a0).expect("gcd divides");
    let mut c = df.div_exact(&a0).expect("gcd divides derivative");
    let mut d = &c - &b.derivative();
    let mut out = Vec::new();
    let mut i = 1;
    while b.degree().unwrap_or(0) > 0 {
        let a = b.gcd(&d);
        let nb = b.div_exact(&a).expect("gcd divides");
        c = d.div_exact(&a).expect("gcd divides");
        if a.degree().unwrap_or(0) > 0 {
            out.push((a, i));
        }
        b = nb;
        d = &c - &b.derivative();
        i += 1;
    }
    out
}

/// Deterministic starting points on circles given by the upper convex hull
/// of `(k, ln |a_k|)`.
fn initial_guesses(p: &ZPolynomial) -> Vec<Complex64> {
    let n = p.degree().unwrap();
    let pts: Vec<(usize, f64)> = p
        .coeffs()
        .iter()
        .enumerate()
        .filter(|(_, c)| !c.is_zero())
        .map(|(k, c)| (k, ln_abs_f64(c)))
        .collect();
    let mut hull: Vec<(usize, f64)> = Vec::new();
    for &pt in &pts {
        while hull.len() >= 2 {
            let (x1, y1) = hull[hull.len() - 2];
            let (x2, y2) = hull[hull.len() - 1];
            let cross =
                (x2 as f64 - x1 as f64) * (pt.1 - y1) - (y2 - y1) * (pt.0 as f64 - x1 as f64);
            if cross >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(pt);
    }
    let mut out = Vec::with_capacity(n);
    for w in hull.windows(2) {
        let (i, yi) = w[0];
        let (j, yj) = w[1];
        let m = j - i;
        let r = ((yi - yj) / m as f64).exp();
        for k in 0..m {
            let ang = 2.0 * std::f64::consts::PI * k as f64 / m as f64
                + 2.0 * std::f64::consts::PI * i as f64 / n as f64
                + 0.4;
            out.push(Complex64::from_polar(r, ang));
        }
    }
    out
}

struct Evaluator {
    coeffs: Vec<Complex>,
    /// `|a_k|` at low precision, for the rounding-error scale.
    abs_coeffs: Vec<Float>,
    prec: u32,
}

impl Evaluator {
    fn new(p: &ZPolynomial, prec: u32) -> Self {
        let exact = prec.max(p.max_coeff_bits() as u32 + 2);
        Evaluator::from_complex(
            p.coeffs()
                .iter()
                .map(|c| Complex::with_val(exact, to_integer(c)))
                .collect(),
            prec,
        )
    }

    fn from_complex(coeffs: Vec<Complex>, prec: u32) -> Self {
        let abs_coeffs = coeffs
            .iter()
            .map(|c| Float::with_val(SCALE_PREC, c.abs_ref()))
            .collect();
        Evaluator {
            coeffs,
            abs_coeffs,
            prec,
        }
    }

    /// `p(z)`, `p'(z)` and whether `p(z)` is at the rounding-error level.
    fn step_data(&self, z: &Complex) -> (Complex, Complex, bool) {
        let (p, dp) = self.eval_both(z);
        let r = Float::with_val(SCALE_PREC, z.abs_ref());
        let mut s = Float::new(SCALE_PREC);
        for c in self.abs_coeffs.iter().rev() {
            s *= &r;
            s += c;
        }
        let size = Float::with_val(SCALE_PREC, p.abs_ref());
        let noise = s * Float::with_val(SCALE_PREC, 2).pow(-(self.prec as i32) + 12);
        let converged = size <= noise;
        (p, dp, converged)
    }

    fn eval_both(&self, z: &Complex) -> (Complex, Complex) {
        let mut p = Complex::with_val(self.prec, self.coeffs.last().unwrap());
        let mut dp = Complex::new(self.prec);
        for c in self.coeffs.iter().rev().skip(1) {
            dp *= z;
            dp += &p;
            p *= z;
            p += c;
        }
        (p, dp)
    }

    fn eval(&self, z: &Complex) -> Complex {
        let mut p = Complex::with_val(self.prec, self.coeffs.last().unwrap());
        for c in self.coeffs.iter().rev().skip(1) {
            p *= z;
            p += c;
        }
        p
    }

    /// `sum |a_k| |z|^k`.
    fn scale(&self, z: &Complex) -> Float {
        let r = Float::with_val(self.prec, z.abs_ref());
        let mut s = Float::new(self.prec);
        for c in self.coeffs.iter().rev() {
            s *= &r;
            s += Float::with_val(self.prec, c.abs_ref());
        }
        s
    }
}

fn ln_f64(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    Float::with_val(64, x.ln_ref()).to_f64()
}

/// Aberth iteration on a squarefree polynomial at a fixed precision.
fn aberth(ev: &Evaluator, roots: &mut [Complex], max_iter: usize) {
    let prec = ev.prec;
    let n = roots.len();
    let mut active = vec![true; n];
    for _ in 0..max_iter {
        let snapshot: Vec<Complex> = roots.to_vec();
        let updates: Vec<Option<Complex>> = (0..n)
            .into_par_iter()
            .map(|i| {
                if !active[i] {
                    return None;
                }
                let z = &snapshot[i];
                let (p, dp, converged) = ev.step_data(z);
                if converged {
                    return Some(Complex::new(prec));
                }
                let ratio = Complex::with_val(prec, &p / &dp);
                let mut sum = Complex::new(prec);
                for (j, zj) in snapshot.iter().enumerate() {
                    if j != i {
                        let d = Complex::with_val(prec, z - zj);
                        sum += d.recip();
                    }
                }
                let denom = Complex::with_val(prec, 1) - Complex::with_val(prec, &ratio * &sum);
                Some(ratio / denom)
            })
            .collect();
        let mut any = false;
        for (i, u) in updates.into_iter().enumerate() {
            let Some(w) = u else { continue };
            if w.is_zero() {
                active[i] = false;
                continue;
            }
            if w.real().is_finite() && w.imag().is_finite() {
                roots[i] -= &w;
                any = true;
            }
        }
        if !any {
            break;
        }
    }
}

/// Double precision Aberth iteration used as a warm start.
fn aberth_f64(coeffs: &[f64], roots: &mut [Complex64], max_iter: usize) {
    let n = roots.len();
    let abs: Vec<f64> = coeffs.iter().map(|c| c.abs()).collect();
    let mut active = vec![true; n];
    for _ in 0..max_iter {
        let snapshot = roots.to_vec();
        let mut any = false;
        for i in 0..n {
            if !active[i] {
                continue;
            }
            let z = snapshot[i];
            let (mut p, mut dp, mut s) = (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0), 0.0);
            let r = z.norm();
            for (c, a) in coeffs.iter().zip(&abs).rev() {
                dp = dp * z + p;
                p = p * z + c;
                s = s * r + a;
            }
            if p.norm() <= 64.0 * f64::EPSILON * s {
                active[i] = false;
                continue;
            }
            let ratio = p / dp;
            let sum: Complex64 = snapshot
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, zj)| (z - zj).inv())
                .sum();
            let w = ratio / (1.0 - ratio * sum);
            if w.re.is_finite() && w.im.is_finite() {
                roots[i] -= w;
                any = true;
            }
        }
        if !any {
            break;
        }
    }
}

/// Refines approximate roots of a polynomial with complex coefficients
/// (constant term first) at the given precision.
pub(crate) fn polish_roots(coeffs: Vec<Complex>, initial: &[Complex64], prec: u32) -> Vec<Complex> {
    let ev = Evaluator::from_complex(coeffs, prec);
    let mut roots: Vec<Complex> = initial
        .iter()
        .map(|g| Complex::with_val(prec, (g.re, g.im)))
        .collect();
    aberth(&ev, &mut roots, 100 + 5 * initial.len());
    roots
}

/// Relative inclusion radii `n |p(z_i)| / (|lc| prod |z_i - z_j|)`.
fn inclusion_radii(ev: &Evaluator, roots: &[Complex]) -> Vec<f64> {
    let n = roots.len();
    let ln_lead = ln_f64(&Float::with_val(
        ev.prec,
        ev.coeffs.last().unwrap().abs_ref(),
    ));
    (0..n)
        .into_par_iter()
        .map(|i| {
            let pz = ev.eval(&roots[i]);
            let lp = ln_f64(&Float::with_val(ev.prec, pz.abs_ref()));
            if lp == f64::NEG_INFINITY {
                return 0.0;
            }
            let mut lprod = 0.0;
            for (j, zj) in roots.iter().enumerate() {
                if j != i {
                    let d = Complex::with_val(ev.prec, &roots[i] - zj);
                    lprod += ln_f64(&Float::with_val(ev.prec, d.abs_ref()));
                }
            }
            let mag = Float::with_val(64, roots[i].abs_ref()).to_f64().max(1.0);
            ((n as f64).ln() + lp - ln_lead - lprod).exp() / mag
        })
        .collect()
}

/// Roots of a squarefree integer polynomial.
fn squarefree_roots(p: &ZPolynomial, target_digits: u32) -> Result<(Vec<Complex>, Vec<f64>, u32)> {
    let n = p.degree().unwrap();
    let bits = p.max_coeff_bits() as u32;
    let mut prec = 128
        .max(bits / 4)
        .max((target_digits as f64 * 3.33) as u32 + 32);
    let mut guesses = initial_guesses(p);
    // Warm start in double precision when the values stay in range.
    let max_radius = guesses.iter().map(|g| g.norm()).fold(1.0, f64::max);
    let log2_size = bits as f64 + n as f64 * max_radius.log2() + 4.0 * n as f64;
    if log2_size < 900.0 {
        let coeffs: Vec<f64> = p.coeffs().iter().map(big_to_f64).collect();
        aberth_f64(&coeffs, &mut guesses, 500);
    }
    let mut roots: Vec<Complex> = guesses
        .iter()
        .map(|g| Complex::with_val(prec, (g.re, g.im)))
        .collect();
    let target = 10f64.powi(-(target_digits as i32));
    loop {
        let ev = Evaluator::new(p, prec);
        for r in roots.iter_mut() {
            r.set_prec(prec);
        }
        aberth(&ev, &mut roots, 200 + 10 * n);
        let radii = inclusion_radii(&ev, &roots);
        let worst = radii.iter().cloned().fold(0.0, f64::max);
        if worst <= target && radii.iter().all(|r| r.is_finite()) {
            return Ok((roots, radii, prec));
        }
        if prec >= MAX_PRECISION {
            let i = radii
                .iter()
                .enumerate()
                .max_by(|a, b| a.1.partial_cmp(b.1).unwrap_or(std::cmp::Ordering::Equal))
                .map_or(0, |(i, _)| i);
            let z = &roots[i];
            return Err(Error::NonConvergence {
                re: z.real().to_f64(),
                im: z.imag().to_f64(),
                detail: format!("root inclusion radius {worst:e} at {prec} bits"),
            });
        }
        prec *= 2;
    }
}

/// Averages conjugate pairs and makes isolated real roots exactly real.
fn enforce_conjugates(roots: &mut [Complex], radii: &[f64]) {
    let n = roots.len();
    let approx: Vec<Complex64> = roots
        .iter()
        .map(|z| Complex64::new(z.real().to_f64(), z.imag().to_f64()))
        .collect();
    let mut done = vec![false; n];
    for i in 0..n {
        if done[i] {
            continue;
        }
        let zi = approx[i];
        let scale = zi.norm().max(1.0);
        if zi.im.abs() <= radii[i] * scale * 2.0 + 1e-300 {
            roots[i].mut_imag().assign(0);
            done[i] = true;
            continue;
        }
        let partner = (0..n).filter(|&j| j != i && !done[j]).min_by(|&a, &b| {
            (approx[a] - zi.conj())
                .norm()
                .partial_cmp(&(approx[b] - zi.conj()).norm())
                .unwrap()
        });
        if let Some(j) = partner {
            let prec = roots[i].prec().0;
            let re = Float::with_val(prec, roots[i].real() + roots[j].real()) / 2u32;
            let im = Float::with_val(prec, roots[i].imag() - roots[j].imag()) / 2u32;
            roots[i] = Complex::with_val(prec, (&re, &im));
            roots[j] = Complex::with_val(prec, (&re, -im));
            done[j] = true;
        }
        done[i] = true;
    }
}

/// All roots of `p` to `target_digits` significant digits.
pub fn find_roots(p: &ZPolynomial, target_digits: u32) -> Result<ZeroSet> {
    let degree = p
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::InvalidArgument("polynomial must have degree at least 1".into()))?;
    let mut roots = Vec::new();
    let mut precise = Vec::new();
    let mut prec_used = 0;
    let mut worst_radius = 0.0f64;
    for (factor, mult) in squarefree_decomposition(p) {
        let (mut rs, radii, prec) = squarefree_roots(&factor, target_digits)?;
        enforce_conjugates(&mut rs, &radii);
        prec_used = prec_used.max(prec);
        worst_radius = worst_radius.max(radii.iter().cloned().fold(0.0, f64::max));
        for r in rs {
            roots.push((Complex64::new(r.real().to_f64(), r.imag().to_f64()), mult));
            precise.push(r);
        }
    }
    // Residual of the original polynomial at each root.
    let ev = Evaluator::new(p, prec_used.max(128) * 2);
    let residual_bound = precise
        .par_iter()
        .map(|r| {
            let mut z = r.clone();
            z.set_prec(ev.prec);
            let v = Float::with_val(ev.prec, ev.eval(&z).abs_ref());
            let s = ev.scale(&z);
            Float::with_val(64, &v / &s).to_f64()
        })
        .reduce(|| 0.0, f64::max);
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| {
        let (x, y) = (roots[a].0, roots[b].0);
        x.re.partial_cmp(&y.re)
            .unwrap()
            .then(x.im.partial_cmp(&y.im).unwrap())
    });
    Ok(ZeroSet {
        roots: order.iter().map(|&i| roots[i]).collect(),
        roots_precise: order.iter().map(|&i| precise[i].clone()).collect(),
        residual_bound,
        error_bound: worst_radius,
        precision: prec_used,
        degree,
        label: None,
    })
}

/// Exact sign of `p(x)` at a double.
fn sign_at(p: &ZPolynomial, x: f64) -> std::cmp::Ordering {
    let prec = p.max_coeff_bits() as u32 + 64 * (p.degree().unwrap_or(0) as u32 + 1);
    let x = Float::with_val(prec, x);
    let mut acc = Float::new(prec);
    for c in p.coeffs().iter().rev() {
        acc *= &x;
        acc += to_integer(c);
    }
    acc.cmp0().unwrap_or(std::cmp::Ordering::Equal)
}

/// Root of `p` in `[lo, hi]` by bisection on exact signs, if the signs at
/// the ends differ.
pub fn real_root_in(p: &ZPolynomial, lo: f64, hi: f64, tol: f64) -> Option<f64> {
    use std::cmp::Ordering::Equal;
    let (mut a, mut b) = (lo, hi);
    let sa = sign_at(p, a);
    let sb = sign_at(p, b);
    if sa == Equal {
        return Some(a);
    }
    if sb == Equal {
        return Some(b);
    }
    if sa == sb {
        return None;
    }
    while b - a > tol {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        match sign_at(p, m) {
            Equal => return Some(m),
            s if s == sa => a = m,
            _ => b = m,
        }
    }
    Some(0.5 * (a + b))
}

/// Bookkeeping of zeros relative to the segment `[-1, 0]`.
#[derive(Debug, Clone, PartialEq)]
pub struct EndpointReport {
    /// Rightmost zero on the segment.
    pub z_d: Option<f64>,
    /// Non-real zero closest in argument to the positive real axis.
    pub z_c: Option<Complex64>,
    /// Leftmost zero on the segment.
    pub z_minus_one: Option<f64>,
    /// Zeros on the segment, ascending, with multiplicity.
    pub segment: Vec<f64>,
    /// Real zeros left of `-1`.
    pub left_of_minus_one: usize,
    /// All other zeros.
    pub off_segment: Vec<Complex64>,
}

impl EndpointReport {
    pub fn n_segment(&self) -> usize {
        self.segment.len()
    }
}

pub fn classify_zeros(zs: &ZeroSet, axis_tol: f64) -> EndpointReport {
    classify_roots(&zs.roots, axis_tol)
}

/// [`classify_zeros`] on `(root, multiplicity)` pairs.
pub fn classify_roots(roots: &[(Complex64, usize)], axis_tol: f64) -> EndpointReport {
    let mut segment = Vec::new();
    let mut off = Vec::new();
    let mut left = 0;
    let all = roots.iter().flat_map(|&(r, m)| std::iter::repeat_n(r, m));
    for z in all {
        let on_axis = z.im.abs() <= axis_tol * (1.0 + z.re.abs());
        if on_axis && z.re >= -1.0 - axis_tol && z.re <= 0.0 {
            segment.push(z.re);
        } else {
            if on_axis && z.re < -1.0 - axis_tol {
                left += 1;
            }
            off.push(z);
        }
    }
    segment.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let z_c = off
        .iter()
        .filter(|z| z.im > axis_tol * (1.0 + z.re.abs()))
        .min_by(|a, b| a.arg().abs().partial_cmp(&b.arg().abs()).unwrap())
        .copied();
    EndpointReport {
        z_d: segment.last().copied(),
        z_c,
        z_minus_one: segment.first().copied(),
        segment,
        left_of_minus_one: left,
        off_segment: off,
    }
}

/// Zero density on the negative axis and its lattice derivatives.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityProfile {
    pub lv: usize,
    pub lh: usize,
    /// Ordered zeros `z_j`.
    pub zeros: Vec<f64>,
    /// `derivatives[0][j]` is the density at `z_j`; `derivatives[n]` the
    /// `n`-th lattice derivative.
    pub derivatives: Vec<Vec<f64>>,
}

impl DensityProfile {
    pub fn density(&self) -> &[f64] {
        &self.derivatives[0]
    }

    /// `(z_j, D^(n)(z_j))` pairs of order `n`.
    pub fn points(&self, order: usize) -> Vec<(f64, f64)> {
        self.zeros
            .iter()
            .copied()
            .zip(self.derivatives[order].iter().copied())
            .collect()
    }
}

pub fn density_profile(
    zeros: &[f64],
    lv: usize,
    lh: usize,
    max_order: usize,
) -> Result<DensityProfile> {
    if zeros.len() < max_order + 2 {
        return Err(Error::InsufficientTerms {
            have: zeros.len(),
            need: max_order + 2,
        });
    }
    let n = (lv * lh) as f64;
    let d0: Vec<f64> = zeros
        .windows(2)
        .map(|w| 1.0 / (n * (w[1] - w[0])))
        .collect();
    let mut derivatives = vec![d0];
    for _ in 0..max_order {
        let prev = derivatives.last().unwrap();
        let next = prev
            .windows(2)
            .enumerate()
            .map(|(j, w)| (w[1] - w[0]) / (zeros[j + 1] - zeros[j]))
            .collect();
        derivatives.push(next);
    }
    Ok(DensityProfile {
        lv,
        lh,
        zeros: zeros.to_vec(),
        derivatives,
    })
}

/// Statistics of `|D - (-dphi/dz)| / D` over interior points.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseComparison {
    /// `(z, density, -dphi/dz, relative deviation)` at midpoints of
    /// consecutive zeros.
    pub samples: Vec<(f64, f64, f64, f64)>,
    pub median: f64,
    pub max: f64,
}

/// Exclusion zones for [`density_phase_compare`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CompareOptions {
    /// Distance from any gap endpoint that is skipped.
    pub gap_margin: f64,
    /// Fraction of the common range skipped at each end.
    pub end_fraction: f64,
}

impl Default for CompareOptions {
    fn default() -> Self {
        CompareOptions {
            gap_margin: 0.02,
            end_fraction: 0.1,
        }
    }
}

pub fn density_phase_compare(
    profile: &DensityProfile,
    phases: &crate::spectra::PhaseProfile,
    options: &CompareOptions,
) -> Result<PhaseComparison> {
    let (plo, phi_hi) = phases.z_range();
    let zlo = profile.zeros.first().copied().unwrap_or(f64::NAN).max(plo);
    let zhi = profile
        .zeros
        .last()
        .copied()
        .unwrap_or(f64::NAN)
        .min(phi_hi);
    if !(zlo < zhi) {
        return Err(Error::DisjointRanges(format!(
            "zeros and phase samples do not overlap ({zlo} >= {zhi})"
        )));
    }
    let span = zhi - zlo;
    let lo = zlo + options.end_fraction * span;
    let hi = zhi - options.end_fraction * span;
    let gaps = phases.gap_edges();
    let mut samples = Vec::new();
    for (j, w) in profile.zeros.windows(2).enumerate() {
        let z = 0.5 * (w[0] + w[1]);
        if z < lo || z > hi || gaps.iter().any(|g| (z - g).abs() < options.gap_margin) {
            continue;
        }
        let d = profile.derivatives[0][j];
        let Some(p) = phases.neg_dphi_dz_at(z) else {
            continue;
        };
        samples.push((z, d, p, (d - p).abs() / d));
    }
    if samples.is_empty() {
        return Err(Error::DisjointRanges("no interior samples".into()));
    }
    let mut devs: Vec<f64> = samples.iter().map(|s| s.3).collect();
    devs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if devs.len() % 2 == 1 {
        devs[devs.len() / 2]
    } else {
        0.5 * (devs[devs.len() / 2 - 1] + devs[devs.len() / 2])
    };
    Ok(PhaseComparison {
        median,
        max: *devs.last().unwrap(),
        samples,
    })
}

/// Ratio `D / D'` near the singular edge and its straight-line fit.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeFit {
    /// `(z_j, D(z_j) / D'(z_j))` for every zero with both values.
    pub ratios: Vec<(f64, f64)>,
    /// Fit `ratio = (z_f - z) / alpha_f` over the window.
    pub z_f: f64,
    pub alpha_f: f64,
    /// Number of ratios inside the window.
    pub used: usize,
}

impl EdgeFit {
    /// The reference line `(z_d - z) / alpha` at a point.
    pub fn reference(z_d: f64, alpha: f64, z: f64) -> f64 {
        (z_d - z) / alpha
    }
}

fn line_fit(pts: &[(f64, f64)]) -> Option<(f64, f64)> {
    let n = pts.len() as f64;
    if pts.len() < 2 {
        return None;
    }
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    let slope = sxy / sxx;
    Some((my - slope * mx, slope))
}

fn ratios(profile: &DensityProfile) -> Result<Vec<(f64, f64)>> {
    if profile.derivatives.len() < 2 {
        return Err(Error::InvalidArgument(
            "profile needs the first lattice derivative".into(),
        ));
    }
    Ok(profile.derivatives[1]
        .iter()
        .enumerate()
        .map(|(j, &d1)| (profile.zeros[j], profile.derivatives[0][j] / d1))
        .collect())
}

pub fn edge_exponent_fit(profile: &DensityProfile, window: (f64, f64)) -> Result<EdgeFit> {
    let ratios = ratios(profile)?;
    let inside: Vec<(f64, f64)> = ratios
        .iter()
        .copied()
        .filter(|&(z, r)| z >= window.0 && z <= window.1 && r.is_finite())
        .collect();
    let (a, b) = line_fit(&inside)
        .filter(|&(_, b)| b != 0.0)
        .ok_or_else(|| Error::InvalidArgument("degenerate fitting window".into()))?;
    // ratio = a + b z = (z_f - z) / alpha_f
    let alpha_f = -1.0 / b;
    Ok(EdgeFit {
        used: inside.len(),
        z_f: a * alpha_f,
        alpha_f,
        ratios,
    })
}

/// Slope of `D / D'` against `z_d - z` over the `count` zeros nearest the
/// edge (expected to approach `1 / alpha`).
pub fn near_edge_slope(profile: &DensityProfile, count: usize) -> Result<f64> {
    let ratios = ratios(profile)?;
    let tail = &ratios[ratios.len().saturating_sub(count)..];
    let (_, b) = line_fit(tail).ok_or_else(|| Error::InvalidArgument("too few ratios".into()))?;
    Ok(-b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_roots() {
        let p = ZPolynomial::from_i64(&[1, 4, 2]);
        let zs = find_roots(&p, 30).unwrap();
        let r = zs.all_roots();
        let s = std::f64::consts::FRAC_1_SQRT_2;
        assert!((r[0].re - (-1.0 - s)).abs() < 1e-14);
        assert!((r[1].re - (-1.0 + s)).abs() < 1e-14);
        assert!(r.iter().all(|z| z.im == 0.0));
        let rep = classify_zeros(&zs, DEFAULT_AXIS_TOL);
        assert_eq!(rep.n_segment(), 1);
        assert_eq!(rep.left_of_minus_one, 1);
    }

    #[test]
    fn exact_bisection() {
        let p = ZPolynomial::from_i64(&[-2, 0, 1]);
        let r = real_root_in(&p, 1.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.sqrt()).abs() < 1e-15);
        assert!(real_root_in(&p, -1.0, 1.0, 1e-12).is_none());
    }

    #[test]
    fn multiple_root() {
        // 8 (1 - z/2)^3 = -(z - 2)^3
        let p = ZPolynomial::from_i64(&[8, -12, 6, -1]);
        let zs = find_roots(&p, 20).unwrap();
        assert_eq!(zs.roots.len(), 1);
        assert_eq!(zs.roots[0].1, 3);
        assert!((zs.roots[0].0 - Complex64::new(2.0, 0.0)).norm() < 1e-15);
    }

    #[test]
    fn no_real_roots() {
        let p = ZPolynomial::from_i64(&[1, 0, 1]);
        let zs = find_roots(&p, 20).unwrap();
        let rep = classify_zeros(&zs, DEFAULT_AXIS_TOL);
        assert!(rep.z_d.is_none());
        assert_eq!(rep.off_segment.len(), 2);
        assert!((rep.z_c.unwrap() - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn symmetric_functions_of_roots() {
        let p = ZPolynomial::from_i64(&[3, -7, 1, 5, -2, 11, 4, 1]);
        let zs = find_roots(&p, 25).unwrap();
        let sum: Complex64 = zs.all_roots().iter().sum();
        assert!((sum.re + 4.0).abs() < 1e-10 && sum.im.abs() < 1e-10);
        let prod: Complex64 = zs.all_roots().iter().product();
        assert!((prod.re + 3.0).abs() < 1e-9);
    }

    #[test]
    fn uniform_density() {
        let zeros: Vec<f64> = (0..20).map(|j| -1.0 + 0.05 * j as f64).collect();
        let prof = density_profile(&zeros, 4, 5, 2).unwrap();
        for &d in prof.density() {
            assert!((d - 1.0).abs() < 1e-9);
        }
        assert!(prof.derivatives[1].iter().all(|d| d.abs() < 1e-6));
        assert!(density_profile(&zeros[..3], 1, 1, 2).is_err());
    }

    #[test]
    fn synthetic_edge_exponent() {
        // Zeros with density proportional to (z_d - z)^(-1/6) on [-1, z_d].
        let zd = -0.12;
        let n = 4000;
        let total = (zd + 1.0f64).powf(5.0 / 6.0);
        let zeros: Vec<f64> = (0..n)
            .map(|j| {
                let frac = 1.0 - j as f64 / n as f64;
                zd - (frac * total).powf(6.0 / 5.0)
            })
            .collect();
        let prof = density_profile(&zeros, 1, n, 1).unwrap();
        let fit = edge_exponent_fit(&prof, (-0.6, -0.2)).unwrap();
        assert!((fit.alpha_f - 1.0 / 6.0).abs() < 0.01, "{}", fit.alpha_f);
        assert!((fit.z_f - zd).abs() < 0.01, "{}", fit.z_f);
    }
}
