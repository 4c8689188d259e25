//! Independent numerical oracles for the internal eigensolver: the
//! characteristic polynomial is built by the Faddeev-LeVerrier recurrence
//! and its roots are found by Durand-Kerner iteration, neither of which
//! shares code with the Hessenberg/QR path under test.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torsion_core::linalg::{det, eigenvalues, ComplexMatrix};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(n, n, |_, _| {
        c(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    })
}

fn trace(m: &ComplexMatrix) -> Complex64 {
    (0..m.rows()).map(|i| m[(i, i)]).sum()
}

/// Monic characteristic polynomial coefficients, constant term first:
/// p(z) = coeffs[0] + coeffs[1] z + ... + coeffs[n] z^n with coeffs[n] = 1.
fn char_poly(a: &ComplexMatrix) -> Vec<Complex64> {
    let n = a.rows();
    let mut coeffs = vec![c(0.0, 0.0); n + 1];
    coeffs[n] = c(1.0, 0.0);
    let mut m = ComplexMatrix::identity(n);
    for k in 1..=n {
        m = a.mul(&m).unwrap();
        let ck = -trace(&m) / c(k as f64, 0.0);
        coeffs[n - k] = ck;
        for i in 0..n {
            m[(i, i)] += ck;
        }
    }
    coeffs
}

fn poly_eval(coeffs: &[Complex64], z: Complex64) -> Complex64 {
    coeffs.iter().rev().fold(c(0.0, 0.0), |acc, &co| acc * z + co)
}

/// Durand-Kerner simultaneous root iteration on a monic polynomial.
fn poly_roots(coeffs: &[Complex64]) -> Vec<Complex64> {
    let n = coeffs.len() - 1;
    let seed = c(0.4, 0.9);
    let mut roots: Vec<Complex64> = (0..n).map(|i| seed.powu(i as u32 + 1)).collect();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..n {
            let mut denom = c(1.0, 0.0);
            for j in 0..n {
                if j != i {
                    denom *= roots[i] - roots[j];
                }
            }
            let step = poly_eval(coeffs, roots[i]) / denom;
            roots[i] -= step;
            moved = moved.max(step.norm());
        }
        if moved < 1e-14 {
            break;
        }
    }
    roots
}

/// Greedy nearest matching; returns the largest pairing distance.
fn match_distance(mut left: Vec<Complex64>, right: &[Complex64]) -> f64 {
    let mut worst = 0.0f64;
    for &r in right {
        let (idx, dist) = left
            .iter()
            .enumerate()
            .map(|(i, &l)| (i, (l - r).norm()))
            .min_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .expect("multiset sizes must agree");
        worst = worst.max(dist);
        left.swap_remove(idx);
    }
    worst
}

#[test]
fn eigenvalues_match_characteristic_roots() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0eac);
    for n in [3usize, 5, 6] {
        for _ in 0..5 {
            let a = random_matrix(&mut rng, n);
            let spec = eigenvalues(&a).unwrap();
            let mut found = Vec::new();
            for &(z, mult) in spec.items() {
                for _ in 0..mult {
                    found.push(z);
                }
            }
            let oracle = poly_roots(&char_poly(&a));
            assert_eq!(found.len(), oracle.len());
            let worst = match_distance(found, &oracle);
            assert!(
                worst < 1e-9,
                "eigenvalue/root mismatch {worst:e} on a {n}x{n} matrix"
            );
        }
    }
}

#[test]
fn determinant_equals_eigenvalue_product() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x0dad);
    for _ in 0..10 {
        let a = random_matrix(&mut rng, 5);
        let lu_det = det(&a).unwrap();
        let product: Complex64 = eigenvalues(&a)
            .unwrap()
            .items()
            .iter()
            .map(|&(z, mult)| z.powu(mult as u32))
            .product();
        assert!(
            (lu_det - product).norm() < 1e-9 * lu_det.norm().max(1.0),
            "det {lu_det} vs eigenvalue product {product}"
        );
    }
}

#[test]
fn trace_equals_eigenvalue_sum() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x7ace);
    let a = random_matrix(&mut rng, 6);
    let sum: Complex64 = eigenvalues(&a)
        .unwrap()
        .items()
        .iter()
        .map(|&(z, mult)| z * c(mult as f64, 0.0))
        .sum();
    assert!((trace(&a) - sum).norm() < 1e-10 * trace(&a).norm().max(1.0));
}
