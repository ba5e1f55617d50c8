mod common;

use hardcore::partition::{partition_polynomial, BoundaryCondition};
use hardcore::poly::ZPolynomial;
use hardcore::transfer::Model;
use hardcore::zeros::{classify_zeros, find_roots, real_root_in, DEFAULT_AXIS_TOL};
use num_complex::Complex64;
use num_traits::ToPrimitive;

#[test]
fn known_roots_and_multiplicities() {
    let cube = ZPolynomial::from_i64(&[1, 1]).pow(3);
    let p = &(&cube * &ZPolynomial::from_i64(&[1, 0, 1])) * &ZPolynomial::from_i64(&[-3, 2]);
    let zs = find_roots(&p, 30).unwrap();
    assert_eq!(zs.degree, 6);
    let expected = [
        (Complex64::new(-1.0, 0.0), 3),
        (Complex64::new(0.0, -1.0), 1),
        (Complex64::new(0.0, 1.0), 1),
        (Complex64::new(1.5, 0.0), 1),
    ];
    assert_eq!(zs.roots.len(), expected.len());
    for ((r, m), (e, k)) in zs.roots.iter().zip(expected) {
        assert_eq!(*m, k);
        assert!((r - e).norm() < 1e-25, "{r} vs {e}");
    }
    let (re, im) = zs.decimal(3, 10);
    assert!(re.starts_with("1.5"));
    assert_eq!(im, "0");
}

#[test]
fn roots_rebuild_the_polynomial() {
    for (bc, lv, lh) in [
        (BoundaryCondition::CC, 5, 5),
        (BoundaryCondition::FF, 4, 6),
        (BoundaryCondition::KC, 6, 4),
    ] {
        let p = partition_polynomial(Model::HardSquare, lv, lh, bc).unwrap();
        let zs = find_roots(&p, 20).unwrap();
        let mut prod = vec![Complex64::new(1.0, 0.0)];
        for r in zs.all_roots() {
            let mut next = vec![Complex64::new(0.0, 0.0); prod.len() + 1];
            for (k, c) in prod.iter().enumerate() {
                next[k + 1] += c;
                next[k] -= c * r;
            }
            prod = next;
        }
        let lead = p.leading().to_f64().unwrap();
        for (k, c) in p.coeffs().iter().enumerate() {
            let c = c.to_f64().unwrap();
            let got = prod[k] * lead;
            assert!(
                (got - c).norm() <= 1e-8 * c.abs().max(1.0),
                "{bc} {lv}x{lh} coeff {k}: {got} vs {c}"
            );
        }
    }
}

#[test]
fn conjugate_symmetry_and_segment() {
    let p = partition_polynomial(Model::HardSquare, 6, 6, BoundaryCondition::CC).unwrap();
    let zs = find_roots(&p, 20).unwrap();
    let roots = zs.all_roots();
    for r in &roots {
        assert!(roots.iter().any(|s| (s - r.conj()).norm() < 1e-12));
    }
    let report = classify_zeros(&zs, DEFAULT_AXIS_TOL);
    let z_d = report.z_d.unwrap();
    assert!(z_d < 0.0 && z_d > -1.0);
    let (lo, hi) = (z_d - 1e-3, z_d + 1e-3);
    let bisected = real_root_in(&p, lo, hi, 1e-14).unwrap();
    assert!((bisected - z_d).abs() < 1e-10);
    assert_eq!(report.segment.len() + report.off_segment.len(), roots.len());
}

#[test]
fn bisection_finds_sqrt_two() {
    let p = ZPolynomial::from_i64(&[-2, 0, 1]);
    let r = real_root_in(&p, 1.0, 2.0, 1e-15).unwrap();
    assert!((r - 2f64.sqrt()).abs() < 1e-14);
    assert_eq!(real_root_in(&p, 2.0, 3.0, 1e-15), None);
}
