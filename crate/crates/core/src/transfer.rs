//! Row-to-row transfer operators for hard squares and hard hexagons.
//!
//! Every entry of a transfer operator has the form `c * z^|b|` where `b` is
//! the target row and `c` a positive integer. The operator is therefore
//! stored as an integer count matrix in compressed rows together with the
//! occupancy of each target row.

use std::collections::HashMap;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::lattice::{
    enumerate_rows, orbit_decompose, reflect, rotate, width_mask, Boundary, Group, RowBasis,
    SymmetryOrbit,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Model {
    HardSquare,
    HardHexagon,
}

impl Model {
    pub fn name(self) -> &'static str {
        match self {
            Model::HardSquare => "squares",
            Model::HardHexagon => "hexagons",
        }
    }
}

impl std::str::FromStr for Model {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "squares" | "square" | "hs" | "hard-square" | "hard-squares" => Ok(Model::HardSquare),
            "hexagons" | "hexagon" | "hh" | "hard-hexagon" | "hard-hexagons" => {
                Ok(Model::HardHexagon)
            }
            _ => Err(Error::InvalidArgument(format!("unknown model {s:?}"))),
        }
    }
}

impl std::fmt::Display for Model {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sector {
    Full,
    /// Zero momentum, even under reflection (cyclic rows).
    P0Plus,
    /// Even under reflection (free rows).
    ParityPlus,
}

/// A sparse transfer operator. Row `i` of the matrix is the target state
/// `i`; its entries are `counts * z^exponents[i]`.
#[derive(Debug, Clone)]
pub struct TransferOperator {
    model: Model,
    basis: RowBasis,
    sector: Sector,
    orbits: Option<Vec<SymmetryOrbit>>,
    exponents: Vec<u32>,
    row_start: Vec<usize>,
    cols: Vec<u32>,
    counts: Vec<u32>,
}

/// Bits of the source row that must be empty when the target row is `b`.
pub(crate) fn forbidden_sources(model: Model, b: u64, width: usize, boundary: Boundary) -> u64 {
    let mut f = b;
    if model == Model::HardHexagon {
        // a_{j+1} b_j = 0
        f |= match boundary {
            Boundary::Cyclic => rotate(b, width, 1),
            Boundary::Free => (b << 1) & width_mask(width),
        };
    }
    f
}

/// Bits of the target row that must be empty when the source row is `a`.
pub(crate) fn forbidden_targets(model: Model, a: u64, width: usize, boundary: Boundary) -> u64 {
    let mut f = a;
    if model == Model::HardHexagon {
        f |= match boundary {
            Boundary::Cyclic => rotate(a, width, width - 1),
            Boundary::Free => a >> 1,
        };
    }
    f
}

/// Calls `visit` on every valid row whose occupied sites avoid `forbidden`.
pub(crate) fn for_each_row_avoiding(
    width: usize,
    boundary: Boundary,
    forbidden: u64,
    visit: &mut impl FnMut(u64),
) {
    fn rec(
        site: usize,
        width: usize,
        boundary: Boundary,
        allowed: u64,
        bits: u64,
        visit: &mut impl FnMut(u64),
    ) {
        if site == width {
            if crate::lattice::is_valid_row(bits, width, boundary) {
                visit(bits);
            }
            return;
        }
        rec(site + 1, width, boundary, allowed, bits, visit);
        let left_free = site == 0 || bits >> (site - 1) & 1 == 0;
        if allowed >> site & 1 == 1 && left_free {
            rec(site + 1, width, boundary, allowed, bits | 1 << site, visit);
        }
    }
    let allowed = width_mask(width) & !forbidden;
    rec(0, width, boundary, allowed, 0, visit);
}

fn build(model: Model, width: usize, boundary: Boundary) -> Result<TransferOperator> {
    let basis = enumerate_rows(width, boundary)?;
    let rows: Vec<Vec<(u32, u32)>> = basis
        .states()
        .par_iter()
        .map(|b| {
            let mut row = Vec::new();
            let forbidden = forbidden_sources(model, b.bits, width, boundary);
            for_each_row_avoiding(width, boundary, forbidden, &mut |a| {
                let idx = basis.index_of(a).expect("enumerated row is in basis");
                row.push((idx as u32, 1));
            });
            row.sort_unstable();
            row
        })
        .collect();
    let exponents = basis.states().iter().map(|s| s.weight_exponent()).collect();
    Ok(TransferOperator::from_rows(
        model,
        basis,
        Sector::Full,
        None,
        exponents,
        rows,
    ))
}

/// The transfer operator with periodic rows.
pub fn build_cyclic(model: Model, width: usize) -> Result<TransferOperator> {
    build(model, width, Boundary::Cyclic)
}

/// The transfer operator with open rows.
pub fn build_free(model: Model, width: usize) -> Result<TransferOperator> {
    build(model, width, Boundary::Free)
}

/// Builds the operator restricted to a symmetry sector directly from the
/// row compatibility rules, without forming the full operator.
pub fn build_sector(model: Model, width: usize, sector: Sector) -> Result<TransferOperator> {
    let (boundary, group) = match sector {
        Sector::Full => return build(model, width, Boundary::Cyclic),
        Sector::P0Plus => (Boundary::Cyclic, Group::Dihedral),
        Sector::ParityPlus => {
            if model == Model::HardHexagon {
                return Err(Error::InvalidArgument(
                    "the free hexagon operator has no reflection symmetry".into(),
                ));
            }
            (Boundary::Free, Group::Reflection)
        }
    };
    let basis = enumerate_rows(width, boundary)?;
    let orbits = orbit_decompose(&basis, group)?;
    let mut orbit_of: HashMap<u64, u32> = HashMap::with_capacity(basis.len());
    for (k, o) in orbits.iter().enumerate() {
        for m in &o.members {
            orbit_of.insert(m.bits, k as u32);
        }
    }
    // Entry (B, A) counts the members of A compatible with the
    // representative of B. This keeps the symmetric subspace invariant
    // for both models.
    let rows: Vec<Vec<(u32, u32)>> = orbits
        .par_iter()
        .map(|ob| {
            let mut acc: HashMap<u32, u32> = HashMap::new();
            let b = ob.representative.bits;
            let forbidden = forbidden_sources(model, b, width, boundary);
            for_each_row_avoiding(width, boundary, forbidden, &mut |a| {
                *acc.entry(orbit_of[&a]).or_insert(0) += 1;
            });
            let mut row: Vec<(u32, u32)> = acc.into_iter().collect();
            row.sort_unstable();
            row
        })
        .collect();
    let exponents = orbits
        .iter()
        .map(|o| o.representative.weight_exponent())
        .collect();
    Ok(TransferOperator::from_rows(
        model,
        basis,
        sector,
        Some(orbits),
        exponents,
        rows,
    ))
}

/// Projects a full operator onto a symmetry sector.
pub fn project_sector(op: &TransferOperator, sector: Sector) -> Result<TransferOperator> {
    if op.sector != Sector::Full {
        return Err(Error::InvalidArgument(
            "only full operators can be projected".into(),
        ));
    }
    match (sector, op.basis.boundary()) {
        (Sector::Full, _) => Ok(op.clone()),
        (Sector::P0Plus, Boundary::Cyclic) | (Sector::ParityPlus, Boundary::Free) => {
            build_sector(op.model, op.basis.width(), sector)
        }
        (Sector::P0Plus, Boundary::Free) => Err(Error::InvalidArgument(
            "the zero-momentum sector needs cyclic rows".into(),
        )),
        (Sector::ParityPlus, Boundary::Cyclic) => Err(Error::InvalidArgument(
            "the parity sector is defined for free rows".into(),
        )),
    }
}

/// Permutation of basis indices induced by reversing each row.
pub fn reflection_twist(basis: &RowBasis) -> Vec<usize> {
    basis
        .states()
        .iter()
        .map(|s| {
            basis
                .index_of(reflect(s.bits, basis.width()))
                .expect("reflected row is valid")
        })
        .collect()
}

/// `ln(lambda_max) / width` at positive real fugacity.
pub fn free_energy_estimate(op: &TransferOperator, z: f64) -> Result<f64> {
    if !(z > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "fugacity must be positive, got {z}"
        )));
    }
    let lambda = op.perron_eigenvalue(z)?;
    Ok(lambda.ln() / op.basis.width() as f64)
}

impl TransferOperator {
    fn from_rows(
        model: Model,
        basis: RowBasis,
        sector: Sector,
        orbits: Option<Vec<SymmetryOrbit>>,
        exponents: Vec<u32>,
        rows: Vec<Vec<(u32, u32)>>,
    ) -> Self {
        let mut row_start = Vec::with_capacity(rows.len() + 1);
        let mut cols = Vec::new();
        let mut counts = Vec::new();
        row_start.push(0);
        for row in rows {
            for (c, n) in row {
                cols.push(c);
                counts.push(n);
            }
            row_start.push(cols.len());
        }
        TransferOperator {
            model,
            basis,
            sector,
            orbits,
            exponents,
            row_start,
            cols,
            counts,
        }
    }

    pub fn model(&self) -> Model {
        self.model
    }

    pub fn basis(&self) -> &RowBasis {
        &self.basis
    }

    pub fn sector(&self) -> Sector {
        self.sector
    }

    pub fn width(&self) -> usize {
        self.basis.width()
    }

    pub fn boundary(&self) -> Boundary {
        self.basis.boundary()
    }

    /// Orbits spanning the sector; `None` for full operators.
    pub fn orbits(&self) -> Option<&[SymmetryOrbit]> {
        self.orbits.as_deref()
    }

    pub fn dim(&self) -> usize {
        self.exponents.len()
    }

    pub fn nnz(&self) -> usize {
        self.cols.len()
    }

    /// Exponent of `z` carried by every entry of row `i`.
    pub fn exponents(&self) -> &[u32] {
        &self.exponents
    }

    pub fn max_exponent(&self) -> u32 {
        self.exponents.iter().copied().max().unwrap_or(0)
    }

    /// Entries of row `i` as `(column, count)` pairs.
    pub fn row(&self, i: usize) -> impl Iterator<Item = (usize, u32)> + '_ {
        let r = self.row_start[i]..self.row_start[i + 1];
        self.cols[r.clone()]
            .iter()
            .zip(&self.counts[r])
            .map(|(&c, &n)| (c as usize, n))
    }

    /// Coefficient and exponent of entry `(to, from)`, if present.
    pub fn entry(&self, to: usize, from: usize) -> Option<(u32, u32)> {
        self.row(to)
            .find(|&(c, _)| c == from)
            .map(|(_, n)| (n, self.exponents[to]))
    }

    /// Size of each basis orbit (all ones for full operators).
    pub fn orbit_sizes(&self) -> Vec<usize> {
        match &self.orbits {
            Some(o) => o.iter().map(|o| o.size()).collect(),
            None => vec![1; self.dim()],
        }
    }

    /// Integer matrix at an integer fugacity.
    pub fn evaluate_integer(&self, z: i64) -> Vec<Vec<i128>> {
        let n = self.dim();
        let mut m = vec![vec![0i128; n]; n];
        for (i, row) in m.iter_mut().enumerate() {
            let w = (z as i128).pow(self.exponents[i]);
            for (j, c) in self.row(i) {
                row[j] = c as i128 * w;
            }
        }
        m
    }

    /// Dense complex matrix at fugacity `z`.
    pub fn evaluate(&self, z: Complex64) -> DMatrix<Complex64> {
        let n = self.dim();
        let powers = self.powers(z);
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let w = powers[self.exponents[i] as usize];
            for (j, c) in self.row(i) {
                m[(i, j)] = w * c as f64;
            }
        }
        m
    }

    /// Dense real matrix at real fugacity `z`.
    pub fn evaluate_real(&self, z: f64) -> DMatrix<f64> {
        let n = self.dim();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..n {
            let w = z.powi(self.exponents[i] as i32);
            for (j, c) in self.row(i) {
                m[(i, j)] = w * c as f64;
            }
        }
        m
    }

    fn powers(&self, z: Complex64) -> Vec<Complex64> {
        let mut p = vec![Complex64::new(1.0, 0.0)];
        for k in 1..=self.max_exponent() as usize {
            p.push(p[k - 1] * z);
        }
        p
    }

    /// `y = T(z) x` for a real fugacity.
    pub fn apply_real(&self, z: f64, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let s: f64 = self.row(i).map(|(j, c)| c as f64 * x[j]).sum();
            *yi = s * z.powi(self.exponents[i] as i32);
        }
    }

    /// Largest eigenvalue of the nonnegative matrix `T(z)`, `z > 0`.
    pub fn perron_eigenvalue(&self, z: f64) -> Result<f64> {
        let n = self.dim();
        if n <= 400 {
            let ev = self.evaluate_real(z).complex_eigenvalues();
            return Ok(ev.iter().map(|c| c.norm()).fold(0.0, f64::max));
        }
        // Power iteration on (T + I), which is primitive for these operators.
        let mut x = vec![1.0 / n as f64; n];
        let mut y = vec![0.0; n];
        let mut lambda = 0.0;
        for _ in 0..100_000 {
            self.apply_real(z, &x, &mut y);
            for (yi, xi) in y.iter_mut().zip(&x) {
                *yi += xi;
            }
            let norm: f64 = y.iter().sum();
            let next = norm - 1.0;
            for (xi, yi) in x.iter_mut().zip(&y) {
                *xi = yi / norm;
            }
            if (next - lambda).abs() <= 1e-15 * next.abs() {
                return Ok(next);
            }
            lambda = next;
        }
        Err(Error::NonConvergence {
            re: z,
            im: 0.0,
            detail: "power iteration for the largest eigenvalue".into(),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bits(op: &TransferOperator, s: &str) -> usize {
        op.basis()
            .index_of(u64::from_str_radix(s, 2).unwrap())
            .unwrap()
    }

    #[test]
    fn cyclic_width_two_entries() {
        let t = build_cyclic(Model::HardSquare, 2).unwrap();
        assert_eq!(t.dim(), 3);
        let (e00, e01, e10) = (bits(&t, "00"), bits(&t, "01"), bits(&t, "10"));
        assert_eq!(t.entry(e00, e00), Some((1, 0)));
        assert_eq!(t.entry(e00, e01), Some((1, 0)));
        assert_eq!(t.entry(e00, e10), Some((1, 0)));
        assert_eq!(t.entry(e01, e00), Some((1, 1)));
        assert_eq!(t.entry(e01, e10), Some((1, 1)));
        assert_eq!(t.entry(e10, e01), Some((1, 1)));
        assert_eq!(t.entry(e01, e01), None);
        assert_eq!(t.entry(e10, e10), None);
        let m = t.evaluate_integer(-1);
        assert_eq!(m, vec![vec![1, 1, 1], vec![-1, 0, -1], vec![-1, -1, 0]]);
    }

    #[test]
    fn width_one_operators() {
        let t = build_cyclic(Model::HardSquare, 1).unwrap();
        assert_eq!(t.evaluate_integer(5), vec![vec![1]]);
        let f = build_free(Model::HardSquare, 1).unwrap();
        assert_eq!(f.evaluate_integer(-1), vec![vec![1, 1], vec![-1, 0]]);
    }

    #[test]
    fn hexagon_diagonal_exclusion() {
        let t = build_cyclic(Model::HardHexagon, 3).unwrap();
        let (b, a) = (bits(&t, "001"), bits(&t, "010"));
        // a_1 b_0 = 1
        assert_eq!(t.entry(b, a), None);
        let s = build_cyclic(Model::HardSquare, 3).unwrap();
        assert!(s.entry(b, a).is_some());
    }

    #[test]
    fn free_hexagon_not_reflection_symmetric() {
        let t = build_free(Model::HardHexagon, 3).unwrap();
        let r = reflection_twist(t.basis());
        let n = t.dim();
        let asym = (0..n)
            .any(|i| (0..n).any(|j| t.entry(i, j).is_some() != t.entry(r[i], r[j]).is_some()));
        assert!(asym);
        let s = build_free(Model::HardSquare, 5).unwrap();
        let r = reflection_twist(s.basis());
        for i in 0..s.dim() {
            for j in 0..s.dim() {
                assert_eq!(s.entry(i, j), s.entry(r[i], r[j]));
            }
        }
    }

    #[test]
    fn sector_dimensions() {
        let c = build_sector(Model::HardSquare, 12, Sector::P0Plus).unwrap();
        assert_eq!(c.dim(), 26);
        let f = build_sector(Model::HardSquare, 4, Sector::ParityPlus).unwrap();
        assert_eq!(f.dim(), 5);
        let one = build_sector(Model::HardSquare, 1, Sector::P0Plus).unwrap();
        assert_eq!(one.evaluate_integer(3), vec![vec![1]]);
        assert!(build_sector(Model::HardHexagon, 4, Sector::ParityPlus).is_err());
        let full = build_free(Model::HardSquare, 4).unwrap();
        assert!(project_sector(&full, Sector::P0Plus).is_err());
    }

    #[test]
    fn twist_examples() {
        let b = enumerate_rows(3, Boundary::Free).unwrap();
        let r = reflection_twist(&b);
        let names: Vec<String> = r.iter().map(|&i| b.states()[i].to_binary(3)).collect();
        assert_eq!(names, ["000", "100", "010", "001", "101"]);
        let b1 = enumerate_rows(1, Boundary::Free).unwrap();
        assert_eq!(reflection_twist(&b1), vec![0, 1]);
    }

    #[test]
    fn free_energy_small_cases() {
        let t = build_cyclic(Model::HardSquare, 2).unwrap();
        let f = free_energy_estimate(&t, 1.0).unwrap();
        assert!((f - (1.0 + 2f64.sqrt()).ln() / 2.0).abs() < 1e-12);
        let one = build_cyclic(Model::HardSquare, 1).unwrap();
        assert_eq!(free_energy_estimate(&one, 2.5).unwrap(), 0.0);
        assert!(free_energy_estimate(&t, 0.0).is_err());
    }

    #[test]
    fn power_iteration_agrees_with_dense() {
        let t = build_cyclic(Model::HardSquare, 14).unwrap();
        assert!(t.dim() > 400);
        let big = t.perron_eigenvalue(0.7).unwrap();
        let p = build_sector(Model::HardSquare, 14, Sector::P0Plus).unwrap();
        let small = p.perron_eigenvalue(0.7).unwrap();
        assert!((big - small).abs() < 1e-10 * big);
    }
}
