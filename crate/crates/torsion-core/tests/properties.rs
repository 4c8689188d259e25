//! Randomized invariants over the public API.

use num_complex::Complex64;
use proptest::prelude::*;

use torsion_core::comb::{change_euler, comb_torsion, EulerStructure};
use torsion_core::complexes::{circle_cw, circle_representation, Word};
use torsion_core::linalg::branch_log;

const PI: f64 = std::f64::consts::PI;

proptest! {
    /// The cut logarithm inverts exp and lands in the half-open window
    /// (theta, theta + 2 pi] whenever the argument stays off the cut.
    #[test]
    fn branch_log_window_and_inverse(
        norm in 1e-3..1e3f64,
        arg in -PI..PI,
        theta in -2.0 * PI..0.0f64,
    ) {
        let lambda = Complex64::from_polar(norm, arg);
        let log = match branch_log(lambda, theta) {
            Ok(v) => v,
            Err(_) => return Ok(()), // landed on the cut, nothing to check
        };
        let back = log.exp();
        prop_assert!((back - lambda).norm() < 1e-12 * norm);
        prop_assert!(log.im > theta && log.im <= theta + 2.0 * PI);
    }

    /// Changing an Euler lift by g and then by h is the same as changing
    /// it once by g * h.
    #[test]
    fn euler_changes_compose(
        znorm in 0.5..1.5f64,
        zarg in 0.02..0.98f64,
        cell in 0usize..2,
        m1 in -3i64..=3,
        m2 in -3i64..=3,
    ) {
        let z = Complex64::from_polar(znorm, 2.0 * PI * zarg);
        prop_assume!((z - Complex64::new(1.0, 0.0)).norm() > 0.05);
        let cw = circle_cw();
        let rep = circle_representation(z).unwrap();
        let id = cw.all_cells()[cell].1.to_string();
        let g = Word::generator("t", m1);
        let h = Word::generator("t", m2);

        let eu = EulerStructure::trivial(&cw);
        let step_g = change_euler(&cw, &eu, &id, &g).unwrap();
        let stepped = change_euler(&cw, &step_g, &id, &h).unwrap();
        let joined = change_euler(&cw, &eu, &id, &g.concat(&h)).unwrap();

        let a = comb_torsion(&cw, &rep, &stepped).unwrap().value;
        let b = comb_torsion(&cw, &rep, &joined).unwrap().value;
        prop_assert!((a - b).norm() < 1e-12 * a.norm().max(1e-3));
    }
}
