mod common;

use hardcore::lattice::{enumerate_rows, Boundary};
use hardcore::partition::BoundaryCondition;
use hardcore::transfer::{build_cyclic, build_free, build_sector, Model, Sector};

const ENTROPY: f64 = 1.503_048_082_475_332;

fn count_rows(width: usize, cyclic: bool) -> usize {
    (0u64..1 << width)
        .filter(|&b| {
            let mut bad = b & (b >> 1) != 0;
            if cyclic && width > 1 {
                bad |= b & 1 != 0 && b >> (width - 1) & 1 != 0;
            }
            if cyclic && width == 1 {
                bad |= b != 0;
            }
            !bad
        })
        .count()
}

fn matmul(a: &[Vec<i128>], b: &[Vec<i128>]) -> Vec<Vec<i128>> {
    let n = a.len();
    let mut c = vec![vec![0; n]; n];
    for i in 0..n {
        for k in 0..n {
            if a[i][k] != 0 {
                for j in 0..n {
                    c[i][j] += a[i][k] * b[k][j];
                }
            }
        }
    }
    c
}

#[test]
fn row_counts() {
    for w in 1..=16 {
        assert_eq!(
            enumerate_rows(w, Boundary::Free).unwrap().len(),
            count_rows(w, false),
            "free {w}"
        );
        assert_eq!(
            enumerate_rows(w, Boundary::Cyclic).unwrap().len(),
            count_rows(w, true),
            "cyclic {w}"
        );
    }
}

#[test]
fn traces_count_torus_configurations() {
    for model in [Model::HardSquare, Model::HardHexagon] {
        for lh in 2..=5 {
            let t = build_cyclic(model, lh).unwrap().evaluate_integer(1);
            let mut power = t.clone();
            for lv in 1..=(20 / lh) {
                let trace: i128 = (0..t.len()).map(|i| power[i][i]).sum();
                let expected: u64 = common::brute_force(model, lv, lh, BoundaryCondition::CC)
                    .iter()
                    .sum();
                assert_eq!(trace, expected as i128, "{model} {lv}x{lh}");
                power = matmul(&power, &t);
            }
        }
    }
}

#[test]
fn free_operator_is_symmetric() {
    for w in 1..=8 {
        let t = build_free(Model::HardSquare, w)
            .unwrap()
            .evaluate_integer(1);
        for i in 0..t.len() {
            for j in 0..i {
                assert_eq!(t[i][j], t[j][i]);
            }
        }
    }
}

#[test]
fn sectors_keep_the_perron_eigenvalue() {
    for w in 2..=10 {
        let full = build_cyclic(Model::HardSquare, w).unwrap();
        let sector = build_sector(Model::HardSquare, w, Sector::P0Plus).unwrap();
        assert!(sector.dim() < full.dim() || w <= 3);
        let a = full.perron_eigenvalue(1.0).unwrap();
        let b = sector.perron_eigenvalue(1.0).unwrap();
        assert!((a - b).abs() < 1e-9 * a, "width {w}: {a} vs {b}");

        let free = build_free(Model::HardSquare, w).unwrap();
        let even = build_sector(Model::HardSquare, w, Sector::ParityPlus).unwrap();
        let a = free.perron_eigenvalue(1.0).unwrap();
        let b = even.perron_eigenvalue(1.0).unwrap();
        assert!((a - b).abs() < 1e-9 * a, "free width {w}: {a} vs {b}");
    }
}

#[test]
fn eigenvalue_ratio_approaches_entropy() {
    let l = |w| {
        build_cyclic(Model::HardSquare, w)
            .unwrap()
            .perron_eigenvalue(1.0)
            .unwrap()
    };
    let coarse = (l(10) / l(8)).sqrt();
    let fine = (l(14) / l(12)).sqrt();
    assert!((fine - ENTROPY).abs() < 1e-5, "{fine}");
    assert!((fine - ENTROPY).abs() < (coarse - ENTROPY).abs());
}
