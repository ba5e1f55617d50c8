//! Bundled published tables used as expected values.

use crate::error::{Error, Result};
use crate::partition::BoundaryCondition;

const VALUES_CC: &str = include_str!("../data/values_cc.txt");
const VALUES_KC: &str = include_str!("../data/values_kc.txt");
const VALUES_FC: &str = include_str!("../data/values_fc.txt");
const VALUES_MF: &str = include_str!("../data/values_mf.txt");
const VALUES_FF: &str = include_str!("../data/values_ff.txt");
const RECURRENCES: &str = include_str!("../data/recurrences.txt");
const FACTORIZATIONS: &str = include_str!("../data/factorizations.txt");

fn content_lines(text: &str) -> impl Iterator<Item = &str> {
    text.lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
}

fn parse_values(text: &str) -> Vec<(usize, Vec<i64>)> {
    content_lines(text)
        .map(|l| {
            let (w, rest) = l.split_once(':').expect("width prefix");
            let vals = rest
                .split_whitespace()
                .map(|v| v.parse().expect("integer value"))
                .collect();
            (w.trim().parse().expect("width"), vals)
        })
        .collect()
}

/// Published values at `z = -1`: one row per `L_h`, entries for
/// `L_v = 1, 2, ...`.
pub fn values_at_minus_one(bc: BoundaryCondition) -> Vec<(usize, Vec<i64>)> {
    match bc {
        BoundaryCondition::CC => parse_values(VALUES_CC),
        BoundaryCondition::KC => parse_values(VALUES_KC),
        BoundaryCondition::FC => parse_values(VALUES_FC),
        BoundaryCondition::MF => parse_values(VALUES_MF),
        BoundaryCondition::FF => parse_values(VALUES_FF),
        BoundaryCondition::CF => {
            // Z^CF_{Lv,Lh} = Z^FC_{Lh,Lv}
            let fc = parse_values(VALUES_FC);
            let max_lv = fc.iter().map(|(_, v)| v.len()).min().unwrap_or(0);
            (1..=max_lv)
                .map(|lh| {
                    let row = fc.iter().map(|(_, v)| v[lh - 1]).collect();
                    (lh, row)
                })
                .collect()
        }
    }
}

/// A published expected value, if the tables cover it.
pub fn value_at_minus_one(bc: BoundaryCondition, lv: usize, lh: usize) -> Option<i64> {
    values_at_minus_one(bc)
        .into_iter()
        .find(|(w, _)| *w == lh)
        .and_then(|(_, v)| v.get(lv.checked_sub(1)?).copied())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RecurrenceEntry {
    pub bc: BoundaryCondition,
    pub width: usize,
    pub matrix_order: usize,
    pub min_order: usize,
    /// `None` for sequences that never repeat.
    pub period: Option<u64>,
}

pub fn recurrence_table() -> Vec<RecurrenceEntry> {
    content_lines(RECURRENCES)
        .map(|l| {
            let f: Vec<&str> = l.split_whitespace().collect();
            RecurrenceEntry {
                bc: f[0].parse().expect("boundary condition"),
                width: f[1].parse().expect("width"),
                matrix_order: f[2].parse().expect("order"),
                min_order: f[3].parse().expect("order"),
                period: (f[4] != "-").then(|| f[4].parse().expect("period")),
            }
        })
        .collect()
}

/// Which operator a published factorization belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum FactorizationKind {
    /// Full free-row operator.
    Free,
    /// Reflection-even block of the free-row operator.
    FreeParity,
    /// Zero-momentum reflection-even block of the cyclic operator.
    CyclicP0,
}

impl FactorizationKind {
    pub const ALL: [FactorizationKind; 3] = [
        FactorizationKind::Free,
        FactorizationKind::FreeParity,
        FactorizationKind::CyclicP0,
    ];

    pub fn name(self) -> &'static str {
        match self {
            FactorizationKind::Free => "free",
            FactorizationKind::FreeParity => "free-parity",
            FactorizationKind::CyclicP0 => "cyclic-p0",
        }
    }
}

impl std::str::FromStr for FactorizationKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "free" | "f" => Ok(FactorizationKind::Free),
            "free-parity" | "fp" | "f+" => Ok(FactorizationKind::FreeParity),
            "cyclic-p0" | "c0p" | "c0+" => Ok(FactorizationKind::CyclicP0),
            _ => Err(Error::InvalidArgument(format!("unknown operator {s:?}"))),
        }
    }
}

/// Published `(n, e)` factors by width, with repeated `n` merged and
/// sorted by decreasing `n`.
pub fn factorization_table(kind: FactorizationKind) -> Vec<(usize, Vec<(usize, i64)>)> {
    let prefix = format!("{} ", kind.name());
    content_lines(FACTORIZATIONS)
        .filter_map(|l| l.strip_prefix(&prefix))
        .filter_map(|rest| {
            let (w, body) = rest.split_once(':')?;
            let width: usize = w.trim().parse().ok()?;
            let mut merged: std::collections::BTreeMap<usize, i64> = Default::default();
            for tok in body.split_whitespace() {
                let (n, e) = tok.split_once('^').expect("n^e token");
                *merged.entry(n.parse().expect("n")).or_default() += e.parse::<i64>().expect("e");
            }
            let factors = merged.into_iter().rev().filter(|&(_, e)| e != 0).collect();
            Some((width, factors))
        })
        .collect()
}

/// Published integer sequences by name (`free`, `free-parity`,
/// `cyclic-p0`, `cyclic`), indexed from width 1.
pub fn published_sequence(name: &str) -> Option<Vec<i64>> {
    let prefix = format!("sequence {name}:");
    content_lines(FACTORIZATIONS)
        .find_map(|l| l.strip_prefix(&prefix))
        .map(|rest| {
            rest.split_whitespace()
                .map(|v| v.parse().expect("integer"))
                .collect()
        })
}
