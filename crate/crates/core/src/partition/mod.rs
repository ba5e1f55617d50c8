//! Exact partition functions on finite lattices.
//!
//! A lattice has `L_v` rows of `L_h` sites. The first letter of a boundary
//! condition describes the direction along `L_v`, the second the direction
//! along a row: `C` is periodic, `F` is open, `K` and `M` are periodic with
//! a reflection twist.

pub mod charpoly;
pub mod factor;
pub mod zpoly;

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{ToPrimitive, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{enumerate_rows, orbit_decompose, reflect, rotate, Boundary, Group};
use crate::modular::{primes, primes_for_bits, Crt};
use crate::poly::ZPolynomial;
use crate::transfer::{
    build_cyclic, build_free, build_sector, for_each_row_avoiding, forbidden_sources,
    forbidden_targets, Model, Sector, TransferOperator,
};

pub use charpoly::{bivariate_charpoly, charpoly_integer, discriminant_in_x, BivariatePolynomial};
pub use factor::{
    cyclotomic_factorize, cyclotomic_multiplicity, multiplicity_of_plus_one, CharPolyFactorization,
};
pub use zpoly::ZPolyRecord;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum BoundaryCondition {
    /// Torus.
    CC,
    /// Periodic rows of length `L_v`, open in the row direction.
    CF,
    /// Open along `L_v`, periodic rows.
    FC,
    FF,
    /// Klein bottle: periodic rows, twisted along `L_v`.
    KC,
    /// Moebius band: open rows, twisted along `L_v`.
    MF,
}

impl BoundaryCondition {
    pub const ALL: [BoundaryCondition; 6] = [
        BoundaryCondition::CC,
        BoundaryCondition::CF,
        BoundaryCondition::FC,
        BoundaryCondition::FF,
        BoundaryCondition::KC,
        BoundaryCondition::MF,
    ];

    pub fn name(self) -> &'static str {
        match self {
            BoundaryCondition::CC => "cc",
            BoundaryCondition::CF => "cf",
            BoundaryCondition::FC => "fc",
            BoundaryCondition::FF => "ff",
            BoundaryCondition::KC => "kc",
            BoundaryCondition::MF => "mf",
        }
    }

    /// Boundary of a single row.
    pub fn row_boundary(self) -> Boundary {
        match self {
            BoundaryCondition::CC | BoundaryCondition::FC | BoundaryCondition::KC => {
                Boundary::Cyclic
            }
            _ => Boundary::Free,
        }
    }

    /// Whether the `L_v` direction closes on itself.
    pub fn periodic_rows(self) -> bool {
        !matches!(self, BoundaryCondition::FC | BoundaryCondition::FF)
    }
}

impl fmt::Display for BoundaryCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BoundaryCondition {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        BoundaryCondition::ALL
            .into_iter()
            .find(|bc| bc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidArgument(format!("unknown boundary condition {s:?}")))
    }
}

/// Resource limits for exact computations.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Caps {
    /// Largest operator dimension used for propagation.
    pub max_dim: usize,
    /// Largest number of lattice sites for a polynomial.
    pub max_sites: usize,
    /// Largest area summed directly over row sequences; 0 disables it.
    pub thin_sites: usize,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            max_dim: 2500,
            max_sites: 576,
            thin_sites: 40,
        }
    }
}

/// How a partition function is read off the transfer operator.
enum Plan {
    /// `sum over starts s of sum over reads (r, m) of m * (T^n)_{r,s}`.
    Trace {
        starts: Vec<(usize, Vec<(usize, u64)>)>,
    },
    /// `sum_i m_i z^{e_i} (T^{n-1} 1)_i`.
    Vector { weights: Vec<u64> },
}

struct Setup {
    op: TransferOperator,
    plan: Plan,
    /// Number of operator applications for lattice length `L_v`.
    offset: usize,
}

fn setup(model: Model, width: usize, bc: BoundaryCondition, caps: &Caps) -> Result<Setup> {
    if width == 0 {
        return Err(Error::InvalidArgument(
            "row width must be at least 1".into(),
        ));
    }
    let (op, plan, offset) = match bc {
        BoundaryCondition::CC | BoundaryCondition::KC => {
            let op = build_cyclic(model, width)?;
            let basis = op.basis();
            let orbits = orbit_decompose(basis, Group::Translation)?;
            let starts = orbits
                .iter()
                .map(|o| {
                    let r = o.representative.bits;
                    let s = basis.index_of(r).unwrap();
                    let reads = if bc == BoundaryCondition::CC {
                        vec![(s, o.size() as u64)]
                    } else {
                        // (T^n)_{R S^k r, S^k r} = (T^n)_{S^-k R S^k r, r}
                        (0..o.size())
                            .map(|k| {
                                let a = rotate(r, width, k);
                                let x = rotate(reflect(a, width), width, width - k % width);
                                (basis.index_of(x).unwrap(), 1)
                            })
                            .collect()
                    };
                    (s, reads)
                })
                .collect();
            (op, Plan::Trace { starts }, 0)
        }
        BoundaryCondition::CF | BoundaryCondition::MF => {
            let op = build_free(model, width)?;
            let twist = crate::transfer::reflection_twist(op.basis());
            let starts = (0..op.dim())
                .map(|a| {
                    let r = if bc == BoundaryCondition::MF {
                        twist[a]
                    } else {
                        a
                    };
                    (a, vec![(r, 1)])
                })
                .collect();
            (op, Plan::Trace { starts }, 0)
        }
        BoundaryCondition::FC => {
            let op = build_sector(model, width, Sector::P0Plus)?;
            let weights = op.orbit_sizes().iter().map(|&s| s as u64).collect();
            (op, Plan::Vector { weights }, 1)
        }
        BoundaryCondition::FF => {
            let op = match model {
                Model::HardSquare => build_sector(model, width, Sector::ParityPlus)?,
                Model::HardHexagon => build_free(model, width)?,
            };
            let weights = op.orbit_sizes().iter().map(|&s| s as u64).collect();
            (op, Plan::Vector { weights }, 1)
        }
    };
    if op.dim() > caps.max_dim {
        return Err(Error::ResourceCap {
            what: "transfer operator dimension",
            value: op.dim(),
            cap: caps.max_dim,
        });
    }
    Ok(Setup { op, plan, offset })
}

/// One application of the operator to a vector of truncated polynomials
/// modulo `p`. Each polynomial occupies `len` consecutive slots.
fn step_mod(op: &TransferOperator, p: u64, len: usize, src: &[u64], dst: &mut [u64]) {
    let exps = op.exponents();
    dst.par_chunks_mut(len).enumerate().for_each(|(i, out)| {
        let e = exps[i] as usize;
        out.iter_mut().for_each(|x| *x = 0);
        if e >= len {
            return;
        }
        let span = len - e;
        let mut acc = vec![0u128; span];
        for (j, c) in op.row(i) {
            let v = &src[j * len..j * len + span];
            let c = c as u128;
            for (a, &x) in acc.iter_mut().zip(v) {
                *a += c * x as u128;
            }
        }
        for (o, a) in out[e..].iter_mut().zip(acc) {
            *o = (a % p as u128) as u64;
        }
    });
}

fn polynomial_mod(setup: &Setup, steps: usize, len: usize, p: u64) -> Vec<u64> {
    let op = &setup.op;
    let dim = op.dim();
    let mut result = vec![0u64; len];
    let add_scaled = |result: &mut Vec<u64>, v: &[u64], m: u64| {
        for (r, &x) in result.iter_mut().zip(v) {
            *r = ((*r as u128 + m as u128 * x as u128) % p as u128) as u64;
        }
    };
    match &setup.plan {
        Plan::Trace { starts } => {
            let mut a = vec![0u64; dim * len];
            let mut b = vec![0u64; dim * len];
            for (s, reads) in starts {
                a.iter_mut().for_each(|x| *x = 0);
                a[s * len] = 1;
                for _ in 0..steps {
                    step_mod(op, p, len, &a, &mut b);
                    std::mem::swap(&mut a, &mut b);
                }
                for &(r, m) in reads {
                    add_scaled(&mut result, &a[r * len..(r + 1) * len], m);
                }
            }
        }
        Plan::Vector { weights } => {
            let mut a = vec![0u64; dim * len];
            let mut b = vec![0u64; dim * len];
            for (i, &e) in op.exponents().iter().enumerate() {
                if (e as usize) < len {
                    a[i * len + e as usize] = 1;
                }
            }
            for _ in 0..steps {
                step_mod(op, p, len, &a, &mut b);
                std::mem::swap(&mut a, &mut b);
            }
            for (i, &m) in weights.iter().enumerate() {
                add_scaled(&mut result, &a[i * len..(i + 1) * len], m);
            }
        }
    }
    result
}

/// Upper bound on `log2` of the value at `z = 1`, which bounds every
/// coefficient since all of them are nonnegative.
fn log2_bound_at_one(setup: &Setup, steps: usize) -> f64 {
    let op = &setup.op;
    let dim = op.dim();
    let mut v = vec![1.0f64; dim];
    let mut w = vec![0.0f64; dim];
    let mut log_scale = 0.0f64;
    for _ in 0..steps {
        op.apply_real(1.0, &v, &mut w);
        let s = w.iter().cloned().fold(0.0, f64::max);
        if s == 0.0 {
            return 0.0;
        }
        for (vi, wi) in v.iter_mut().zip(&w) {
            *vi = wi / s;
        }
        log_scale += s.log2();
    }
    let weights: Vec<u64> = match &setup.plan {
        Plan::Vector { weights } => weights.clone(),
        Plan::Trace { .. } => vec![1; dim],
    };
    let total: f64 = v.iter().zip(&weights).map(|(x, &m)| x * m as f64).sum();
    log_scale + total.max(1.0).log2()
}

/// Exact partition polynomial of an `L_v x L_h` lattice.
pub fn partition_polynomial(
    model: Model,
    lv: usize,
    lh: usize,
    bc: BoundaryCondition,
) -> Result<ZPolynomial> {
    partition_polynomial_with(model, lv, lh, bc, &Caps::default())
}

pub fn partition_polynomial_with(
    model: Model,
    lv: usize,
    lh: usize,
    bc: BoundaryCondition,
    caps: &Caps,
) -> Result<ZPolynomial> {
    if lv == 0 || lh == 0 {
        return Err(Error::InvalidArgument(
            "lattice sides must be at least 1".into(),
        ));
    }
    if lv * lh > caps.max_sites {
        return Err(Error::ResourceCap {
            what: "lattice sites",
            value: lv * lh,
            cap: caps.max_sites,
        });
    }
    let (bc, lv, lh) = oriented(bc, lv, lh);
    let rows = enumerate_rows(lh, bc.row_boundary())?.len();
    if lv * lh <= caps.thin_sites && (rows > caps.max_dim || thin_is_cheaper(bc, lv, lh, rows)) {
        return thin_polynomial(model, lv, lh, bc);
    }
    let setup = setup(model, lh, bc, caps)?;
    let steps = lv - setup.offset;
    let len = lv * setup.op.max_exponent() as usize + 1;
    let bits = log2_bound_at_one(&setup, steps).ceil() as u64 + 4;
    let count = primes_for_bits(bits) + 1;
    let ps = primes(count);
    let residues: Vec<Vec<u64>> = ps
        .par_iter()
        .map(|&p| polynomial_mod(&setup, steps, len, p))
        .collect();
    let mut crt = Crt::new(len);
    for (r, &p) in residues.iter().zip(&ps).take(count - 1) {
        crt.push(r, p);
    }
    let before = crt.values().to_vec();
    crt.push(&residues[count - 1], ps[count - 1]);
    if crt.values() != &before[..] {
        return Err(Error::NonConvergence {
            re: 1.0,
            im: 0.0,
            detail: "coefficient bound too small for Chinese remaindering".into(),
        });
    }
    Ok(ZPolynomial::new(crt.into_values()))
}

/// Compares the configuration count, at most about `phi^(lv lh)`, with
/// the cost of a trace, which propagates one vector per basis row.
fn thin_is_cheaper(bc: BoundaryCondition, lv: usize, lh: usize, rows: usize) -> bool {
    let traced = !matches!(bc, BoundaryCondition::FC | BoundaryCondition::FF);
    let phi = (1.0 + 5f64.sqrt()) / 2.0;
    traced && phi.powi((lv * lh) as i32) < (rows * rows * lv) as f64
}

/// Uses a transpose identity when it gives shorter rows.
fn oriented(bc: BoundaryCondition, lv: usize, lh: usize) -> (BoundaryCondition, usize, usize) {
    use BoundaryCondition::*;
    let transposed = match bc {
        CC => CC,
        FF => FF,
        CF => FC,
        FC => CF,
        KC | MF => return (bc, lv, lh),
    };
    if lv < lh || (lv == lh && bc == CF) {
        (transposed, lh, lv)
    } else {
        (bc, lv, lh)
    }
}

/// Sums over all row sequences directly; cost grows with the number of
/// configurations rather than with the row basis.
fn thin_polynomial(
    model: Model,
    lv: usize,
    lh: usize,
    bc: BoundaryCondition,
) -> Result<ZPolynomial> {
    use BoundaryCondition::*;
    let boundary = bc.row_boundary();
    let basis = enumerate_rows(lh, boundary)?;
    let close = |first: u64| -> Option<u64> {
        match bc {
            FC | FF => None,
            CC | CF => Some(first),
            KC | MF => Some(reflect(first, lh)),
        }
    };
    let compatible = |a: u64, b: u64| a & forbidden_sources(model, b, lh, boundary) == 0;
    struct Walk<'a> {
        model: Model,
        lv: usize,
        lh: usize,
        boundary: Boundary,
        counts: Vec<u64>,
        closing: &'a dyn Fn(u64, u64) -> bool,
    }
    fn walk(w: &mut Walk, depth: usize, first: u64, current: u64, occupied: u32) {
        if depth + 1 == w.lv {
            if (w.closing)(first, current) {
                w.counts[occupied as usize] += 1;
            }
            return;
        }
        let mut next = Vec::new();
        let forbidden = forbidden_targets(w.model, current, w.lh, w.boundary);
        for_each_row_avoiding(w.lh, w.boundary, forbidden, &mut |b| next.push(b));
        for b in next {
            walk(w, depth + 1, first, b, occupied + b.count_ones());
        }
    }
    let closing = |first: u64, last: u64| close(first).is_none_or(|t| compatible(last, t));
    let mut w = Walk {
        model,
        lv,
        lh,
        boundary,
        counts: vec![0; lv * lh + 1],
        closing: &closing,
    };
    for s in basis.states() {
        walk(&mut w, 0, s.bits, s.bits, s.bits.count_ones());
    }
    Ok(ZPolynomial::new(
        w.counts.into_iter().map(BigInt::from).collect(),
    ))
}

/// Integer accumulator that reports overflow.
trait Acc: Clone + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn add_scaled(&mut self, c: i64, x: &Self) -> bool;
    fn to_big(&self) -> BigInt;
}

impl Acc for i128 {
    fn zero() -> Self {
        0
    }
    fn one() -> Self {
        1
    }
    fn add_scaled(&mut self, c: i64, x: &Self) -> bool {
        match x.checked_mul(c as i128).and_then(|y| self.checked_add(y)) {
            Some(v) => {
                *self = v;
                true
            }
            None => false,
        }
    }
    fn to_big(&self) -> BigInt {
        BigInt::from(*self)
    }
}

impl Acc for BigInt {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        BigInt::from(1)
    }
    fn add_scaled(&mut self, c: i64, x: &Self) -> bool {
        *self += x * c;
        true
    }
    fn to_big(&self) -> BigInt {
        self.clone()
    }
}

fn step_int<T: Acc>(op: &TransferOperator, z: i64, src: &[T], dst: &mut [T]) -> bool {
    let exps = op.exponents();
    dst.par_iter_mut()
        .enumerate()
        .map(|(i, out)| {
            let w = z.pow(exps[i]);
            let mut acc = T::zero();
            let mut ok = true;
            for (j, c) in op.row(i) {
                ok &= acc.add_scaled(c as i64 * w, &src[j]);
            }
            *out = acc;
            ok
        })
        .reduce(|| true, |a, b| a && b)
}

fn sequence_generic<T: Acc>(setup: &Setup, z: i64, n: usize) -> Option<Vec<BigInt>> {
    let op = &setup.op;
    let dim = op.dim();
    let mut out = vec![<BigInt as Zero>::zero(); n];
    match &setup.plan {
        Plan::Trace { starts } => {
            let mut a = vec![T::zero(); dim];
            let mut b = vec![T::zero(); dim];
            for (s, reads) in starts {
                a.iter_mut().for_each(|x| *x = T::zero());
                a[*s] = T::one();
                for slot in out.iter_mut() {
                    if !step_int(op, z, &a, &mut b) {
                        return None;
                    }
                    std::mem::swap(&mut a, &mut b);
                    for &(r, m) in reads {
                        *slot += a[r].to_big() * m;
                    }
                }
            }
        }
        Plan::Vector { weights } => {
            let mut a: Vec<T> = op
                .exponents()
                .iter()
                .map(|&e| {
                    let mut x = T::zero();
                    x.add_scaled(z.pow(e), &T::one());
                    x
                })
                .collect();
            let mut b = vec![T::zero(); dim];
            for (k, slot) in out.iter_mut().enumerate() {
                if k > 0 {
                    if !step_int(op, z, &a, &mut b) {
                        return None;
                    }
                    std::mem::swap(&mut a, &mut b);
                }
                for (i, &m) in weights.iter().enumerate() {
                    *slot += a[i].to_big() * m;
                }
            }
        }
    }
    Some(out)
}

/// Values at integer fugacity `z` for `L_v = 1..=n`.
pub fn sequence_at(
    model: Model,
    lh: usize,
    bc: BoundaryCondition,
    z: i64,
    n: usize,
) -> Result<Vec<BigInt>> {
    let setup = setup(model, lh, bc, &Caps::default())?;
    if let Some(v) = sequence_generic::<i128>(&setup, z, n) {
        return Ok(v);
    }
    Ok(sequence_generic::<BigInt>(&setup, z, n).expect("big integers do not overflow"))
}

/// Values at `z = -1` for `L_v = 1..=n`.
pub fn sequence_at_minus_one(
    model: Model,
    lh: usize,
    bc: BoundaryCondition,
    n: usize,
) -> Result<Vec<BigInt>> {
    sequence_at(model, lh, bc, -1, n)
}

/// `Z(-1)` of a single lattice.
pub fn partition_value_at_minus_one(
    model: Model,
    lv: usize,
    lh: usize,
    bc: BoundaryCondition,
) -> Result<BigInt> {
    if lv == 0 {
        return Err(Error::InvalidArgument(
            "lattice sides must be at least 1".into(),
        ));
    }
    Ok(sequence_at_minus_one(model, lh, bc, lv)?.pop().unwrap())
}

/// Dimension of the operator driving the `L_v` direction.
pub fn sequence_operator_order(model: Model, lh: usize, bc: BoundaryCondition) -> Result<usize> {
    Ok(setup(model, lh, bc, &Caps::default())?.op.dim())
}

/// Converts small exact values to `i64` where they fit.
pub fn to_i64_vec(values: &[BigInt]) -> Option<Vec<i64>> {
    values.iter().map(|v| v.to_i64()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poly(model: Model, lv: usize, lh: usize, bc: BoundaryCondition) -> Vec<i64> {
        let p = partition_polynomial(model, lv, lh, bc).unwrap();
        to_i64_vec(p.coeffs()).unwrap()
    }

    #[test]
    fn two_by_two_examples() {
        use BoundaryCondition::*;
        assert_eq!(poly(Model::HardSquare, 2, 2, FF), vec![1, 4, 2]);
        assert_eq!(poly(Model::HardSquare, 2, 2, KC), vec![1, 4]);
        let cc = partition_polynomial(Model::HardSquare, 2, 2, CC).unwrap();
        assert_eq!(cc.eval_i64(-1), BigInt::from(-1));
    }

    #[test]
    fn empty_lattice_and_single_particles() {
        for model in [Model::HardSquare, Model::HardHexagon] {
            for bc in BoundaryCondition::ALL {
                for (lv, lh) in [(3, 3), (2, 5), (4, 3)] {
                    let p = partition_polynomial(model, lv, lh, bc).unwrap();
                    assert_eq!(p.coeff(0), BigInt::from(1), "{bc} {lv}x{lh}");
                    if lv >= 3 && lh >= 3 {
                        assert_eq!(p.coeff(1), BigInt::from(lv * lh), "{bc} {lv}x{lh}");
                    }
                }
            }
        }
    }

    #[test]
    fn minus_one_fast_path_matches_polynomial() {
        for bc in BoundaryCondition::ALL {
            for lh in 1..=5 {
                let seq = sequence_at_minus_one(Model::HardSquare, lh, bc, 6).unwrap();
                for (k, v) in seq.iter().enumerate() {
                    let p = partition_polynomial(Model::HardSquare, k + 1, lh, bc).unwrap();
                    assert_eq!(&p.eval_i64(-1), v, "{bc} {}x{lh}", k + 1);
                }
            }
        }
    }

    #[test]
    fn table_spot_values() {
        use BoundaryCondition::*;
        let v = |lv, lh, bc| partition_value_at_minus_one(Model::HardSquare, lv, lh, bc).unwrap();
        assert_eq!(v(4, 4, CC), BigInt::from(7));
        assert_eq!(v(14, 7, CC), BigInt::from(-27));
        assert_eq!(v(1, 5, FC), BigInt::from(1));
        assert_eq!(v(6, 1, MF), BigInt::from(2));
    }

    #[test]
    fn resource_caps() {
        let caps = Caps {
            max_dim: 10,
            max_sites: 100,
            thin_sites: 0,
        };
        let err = partition_polynomial_with(Model::HardSquare, 8, 8, BoundaryCondition::CC, &caps);
        assert!(matches!(err, Err(Error::ResourceCap { .. })));
        let err = partition_polynomial_with(Model::HardSquare, 20, 6, BoundaryCondition::FC, &caps);
        assert!(matches!(err, Err(Error::ResourceCap { .. })));
        assert!(partition_polynomial(Model::HardSquare, 0, 3, BoundaryCondition::CC).is_err());
    }

    #[test]
    fn parse_names() {
        for bc in BoundaryCondition::ALL {
            assert_eq!(bc.name().parse::<BoundaryCondition>().unwrap(), bc);
        }
        assert!("xy".parse::<BoundaryCondition>().is_err());
    }
}
