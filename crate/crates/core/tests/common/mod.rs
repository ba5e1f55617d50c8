//! Exhaustive enumeration of hard-core configurations on small lattices.

#![allow(dead_code)]

use hardcore::partition::BoundaryCondition;
use hardcore::transfer::Model;

/// How the last row connects back to the first.
#[derive(Clone, Copy, PartialEq)]
enum Closure {
    Open,
    Periodic,
    Twisted,
}

fn closures(bc: BoundaryCondition) -> (Closure, bool) {
    use BoundaryCondition::*;
    match bc {
        CC => (Closure::Periodic, true),
        CF => (Closure::Periodic, false),
        FC => (Closure::Open, true),
        FF => (Closure::Open, false),
        KC => (Closure::Twisted, true),
        MF => (Closure::Twisted, false),
    }
}

/// Neighbour lists of the `lv x lh` lattice. Site `(i, j)` has index
/// `i * lh + j`; a site listed as its own neighbour can never be occupied.
pub fn adjacency(model: Model, lv: usize, lh: usize, bc: BoundaryCondition) -> Vec<Vec<usize>> {
    let (vertical, cyclic_rows) = closures(bc);
    let n = lv * lh;
    let mut adj = vec![Vec::new(); n];
    let mut link = |a: usize, b: usize| {
        adj[a].push(b);
        adj[b].push(a);
    };
    let site = |i: usize, j: usize| i * lh + j;
    // Next site to the right in a row, if any.
    let right = |j: usize| -> Option<usize> {
        if j + 1 < lh {
            Some(j + 1)
        } else if cyclic_rows {
            Some(0)
        } else {
            None
        }
    };
    for i in 0..lv {
        for j in 0..lh {
            if let Some(k) = right(j) {
                link(site(i, j), site(i, k));
            }
        }
    }
    // Row `i` below row `i + 1`; `target(j)` is the column of row `i + 1`
    // sitting over column `j`.
    let mut stack = |lower: usize, upper: usize, target: &dyn Fn(usize) -> usize| {
        for j in 0..lh {
            link(site(lower, j), site(upper, target(j)));
            if model == Model::HardHexagon {
                if let Some(k) = right(j) {
                    link(site(lower, k), site(upper, target(j)));
                }
            }
        }
    };
    for i in 0..lv.saturating_sub(1) {
        stack(i, i + 1, &|j| j);
    }
    match vertical {
        Closure::Open => {}
        Closure::Periodic => stack(lv - 1, 0, &|j| j),
        Closure::Twisted => stack(lv - 1, 0, &|j| lh - 1 - j),
    }
    for list in adj.iter_mut() {
        list.sort_unstable();
        list.dedup();
    }
    adj
}

/// Coefficients of the partition polynomial by exhaustive search.
pub fn brute_force(model: Model, lv: usize, lh: usize, bc: BoundaryCondition) -> Vec<u64> {
    let adj = adjacency(model, lv, lh, bc);
    let n = adj.len();
    let mut counts = vec![0u64; n + 1];
    let mut occupied = vec![false; n];
    fn rec(
        site: usize,
        size: usize,
        adj: &[Vec<usize>],
        occupied: &mut [bool],
        counts: &mut [u64],
    ) {
        if site == adj.len() {
            counts[size] += 1;
            return;
        }
        rec(site + 1, size, adj, occupied, counts);
        let free = adj[site]
            .iter()
            .all(|&k| k != site && !(k < site && occupied[k]));
        if free {
            occupied[site] = true;
            rec(site + 1, size + 1, adj, occupied, counts);
            occupied[site] = false;
        }
    }
    rec(0, 0, &adj, &mut occupied, &mut counts);
    while counts.len() > 1 && *counts.last().unwrap() == 0 {
        counts.pop();
    }
    counts
}
