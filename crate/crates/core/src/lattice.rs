//! Row states of a lattice strip and their symmetry orbits.
//!
//! A row of width `L` is stored as a bit mask; bit `j` is the occupation of
//! site `j`. Rows are valid when no two horizontally adjacent sites are both
//! occupied. For cyclic rows the last site is adjacent to the first.
//!
//! Small cyclic widths use these conventions: width 1 is self-adjacent, so
//! only the empty row survives, and width 2 has a single edge between its two
//! sites.

use std::collections::HashMap;
use std::fmt;

use crate::error::{Error, Result};

/// Largest supported row width. Rows are stored in a `u64`.
pub const MAX_WIDTH: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Boundary {
    Cyclic,
    Free,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Group {
    /// Cyclic translations only.
    Translation,
    /// Translations and the reflection `j -> L-1-j`.
    Dihedral,
    /// The reflection alone.
    Reflection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RowState {
    pub bits: u64,
}

impl RowState {
    pub fn new(bits: u64) -> Self {
        RowState { bits }
    }

    /// Number of occupied sites.
    pub fn weight_exponent(self) -> u32 {
        self.bits.count_ones()
    }

    pub fn is_occupied(self, site: usize) -> bool {
        self.bits >> site & 1 == 1
    }

    /// Formats the row as a binary string of `width` characters, most
    /// significant site first.
    pub fn to_binary(self, width: usize) -> String {
        (0..width)
            .rev()
            .map(|j| if self.is_occupied(j) { '1' } else { '0' })
            .collect()
    }
}

impl fmt::Display for RowState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:#b}", self.bits)
    }
}

pub(crate) fn width_mask(width: usize) -> u64 {
    if width >= 64 {
        u64::MAX
    } else {
        (1u64 << width) - 1
    }
}

pub(crate) fn rotate(bits: u64, width: usize, by: usize) -> u64 {
    if width <= 1 {
        return bits;
    }
    let by = by % width;
    if by == 0 {
        return bits;
    }
    ((bits << by) | (bits >> (width - by))) & width_mask(width)
}

pub(crate) fn reflect(bits: u64, width: usize) -> u64 {
    let mut out = 0;
    for j in 0..width {
        if bits >> j & 1 == 1 {
            out |= 1 << (width - 1 - j);
        }
    }
    out
}

/// Whether `bits` is a valid row of the given width and boundary.
pub fn is_valid_row(bits: u64, width: usize, boundary: Boundary) -> bool {
    if bits & !width_mask(width) != 0 {
        return false;
    }
    if bits & (bits >> 1) != 0 {
        return false;
    }
    match boundary {
        Boundary::Free => true,
        Boundary::Cyclic => match width {
            1 => bits == 0,
            2 => true,
            _ => !(bits & 1 == 1 && bits >> (width - 1) & 1 == 1),
        },
    }
}

/// The ordered set of valid rows for a width and boundary.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RowBasis {
    width: usize,
    boundary: Boundary,
    states: Vec<RowState>,
    index: HashMap<u64, usize>,
}

impl RowBasis {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn boundary(&self) -> Boundary {
        self.boundary
    }

    pub fn states(&self) -> &[RowState] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn index_of(&self, bits: u64) -> Option<usize> {
        self.index.get(&bits).copied()
    }

    /// Largest occupancy of any row in the basis.
    pub fn max_occupancy(&self) -> u32 {
        self.states
            .iter()
            .map(|s| s.weight_exponent())
            .max()
            .unwrap_or(0)
    }
}

/// Enumerates every valid row of `width` sites, in ascending binary order.
pub fn enumerate_rows(width: usize, boundary: Boundary) -> Result<RowBasis> {
    if width == 0 {
        return Err(Error::InvalidArgument(
            "row width must be at least 1".into(),
        ));
    }
    if width > MAX_WIDTH {
        return Err(Error::ResourceCap {
            what: "row width",
            value: width,
            cap: MAX_WIDTH,
        });
    }
    // Depth-first generation in ascending order: extend from the most
    // significant site downward so the output is already sorted.
    let mut states = Vec::new();
    let mut stack: Vec<(usize, u64)> = vec![(width, 0)];
    while let Some((remaining, bits)) = stack.pop() {
        if remaining == 0 {
            if is_valid_row(bits, width, boundary) {
                states.push(RowState::new(bits));
            }
            continue;
        }
        let site = remaining - 1;
        let above_occupied = site + 1 < width && bits >> (site + 1) & 1 == 1;
        if !above_occupied {
            stack.push((site, bits | 1 << site));
        }
        stack.push((site, bits));
    }
    let index = states
        .iter()
        .enumerate()
        .map(|(i, s)| (s.bits, i))
        .collect();
    Ok(RowBasis {
        width,
        boundary,
        states,
        index,
    })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetryOrbit {
    pub representative: RowState,
    /// Members in ascending order; the first is the representative.
    pub members: Vec<RowState>,
    pub group: Group,
}

impl SymmetryOrbit {
    pub fn size(&self) -> usize {
        self.members.len()
    }
}

fn orbit_images(bits: u64, width: usize, group: Group) -> Vec<u64> {
    let mut images = vec![bits];
    match group {
        Group::Translation => {
            images.extend((1..width).map(|k| rotate(bits, width, k)));
        }
        Group::Dihedral => {
            let r = reflect(bits, width);
            for k in 0..width {
                images.push(rotate(bits, width, k));
                images.push(rotate(r, width, k));
            }
        }
        Group::Reflection => images.push(reflect(bits, width)),
    }
    images.sort_unstable();
    images.dedup();
    images
}

/// Partitions a basis into orbits of `group`, ordered by representative.
///
/// Translation and dihedral orbits are only defined for cyclic rows.
pub fn orbit_decompose(basis: &RowBasis, group: Group) -> Result<Vec<SymmetryOrbit>> {
    if basis.boundary == Boundary::Free && group != Group::Reflection {
        return Err(Error::InvalidArgument(
            "free rows only admit the reflection group".into(),
        ));
    }
    let mut seen = vec![false; basis.len()];
    let mut orbits = Vec::new();
    for (i, state) in basis.states.iter().enumerate() {
        if seen[i] {
            continue;
        }
        let members: Vec<RowState> = orbit_images(state.bits, basis.width, group)
            .into_iter()
            .map(RowState::new)
            .collect();
        for m in &members {
            let k = basis
                .index_of(m.bits)
                .expect("symmetry image of a valid row is valid");
            seen[k] = true;
        }
        orbits.push(SymmetryOrbit {
            representative: members[0],
            members,
            group,
        });
    }
    Ok(orbits)
}

/// `F(n)` with `F(-1) = 0`, `F(0) = 1`, `F(n+2) = F(n+1) + F(n)`.
pub fn fibonacci(n: i64) -> u128 {
    if n < -1 {
        panic!("fibonacci index below -1");
    }
    let (mut a, mut b) = (0u128, 1u128);
    for _ in -1..n {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

/// Lucas numbers `L(0) = 2`, `L(1) = 1`.
pub fn lucas(n: u64) -> u128 {
    let (mut a, mut b) = (2u128, 1u128);
    for _ in 0..n {
        let c = a + b;
        a = b;
        b = c;
    }
    a
}

pub fn totient(n: u64) -> u64 {
    let mut result = n;
    let mut m = n;
    let mut p = 2;
    while p * p <= m {
        if m.is_multiple_of(p) {
            while m.is_multiple_of(p) {
                m /= p;
            }
            result -= result / p;
        }
        p += 1;
    }
    if m > 1 {
        result -= result / m;
    }
    result
}

/// Dimension of the zero-momentum sector of the cyclic transfer matrix,
/// `(1/L) sum_{n | L} phi(L/n) [F(n-2) + F(n)]`.
pub fn sector_dimension_p0(width: usize) -> Result<u128> {
    if width == 0 {
        return Err(Error::InvalidArgument(
            "row width must be at least 1".into(),
        ));
    }
    let w = width as u64;
    let mut total = 0u128;
    for n in (1..=w).filter(|n| w.is_multiple_of(*n)) {
        let n_i = n as i64;
        total += totient(w / n) as u128 * (fibonacci(n_i - 2) + fibonacci(n_i));
    }
    Ok(total / w as u128)
}
