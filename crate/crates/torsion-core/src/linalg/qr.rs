//! Householder QR, with optional column pivoting, and null-space extraction.

use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // trait float math: used by the no_std build only
use num_traits::Float;

use super::matrix::ComplexMatrix;
use crate::Result;

/// Householder reflector (tau, v) with real tau: H = I - tau v v^H,
/// H x = beta e1, H unitary and Hermitian.
fn make_reflector(x: &[Complex64]) -> (f64, Vec<Complex64>, Complex64) {
    let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if norm == 0.0 {
        return (0.0, x.to_vec(), Complex64::new(0.0, 0.0));
    }
    let alpha = x[0];
    let phase = if alpha.norm() > 0.0 {
        alpha / alpha.norm()
    } else {
        Complex64::new(1.0, 0.0)
    };
    let beta = -phase * norm;
    let mut v = x.to_vec();
    v[0] = alpha - beta;
    // v^H x = norm (norm + |alpha|) is real and positive.
    let tau = 1.0 / (norm * (norm + alpha.norm()));
    (tau, v, beta)
}

/// Applies H = I - tau v v^H to rows [row0, row0+v.len()) of `a`, columns >= col0.
fn apply_left(a: &mut ComplexMatrix, tau: f64, v: &[Complex64], row0: usize, col0: usize) {
    if tau == 0.0 {
        return;
    }
    for j in col0..a.cols() {
        let mut s = Complex64::new(0.0, 0.0);
        for (i, vi) in v.iter().enumerate() {
            s += vi.conj() * a[(row0 + i, j)];
        }
        s *= tau;
        for (i, vi) in v.iter().enumerate() {
            let d = s * vi;
            a[(row0 + i, j)] -= d;
        }
    }
}

/// QR factorization A P = Q R. `perm[j]` is the original column at position j.
pub struct Qr {
    pub q: ComplexMatrix,
    pub r: ComplexMatrix,
    pub perm: Vec<usize>,
}

/// Householder QR with optional column pivoting on the largest remaining
/// sub-column norm. Q is the full square factor.
pub fn qr(a: &ComplexMatrix, pivot: bool) -> Qr {
    let m = a.rows();
    let n = a.cols();
    let steps = m.min(n);
    let mut r = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut reflectors: Vec<(f64, Vec<Complex64>, usize)> = Vec::with_capacity(steps);
    for k in 0..steps {
        if pivot {
            let mut best = k;
            let mut best_norm = -1.0f64;
            for j in k..n {
                let s = (k..m).map(|i| r[(i, j)].norm_sqr()).sum::<f64>();
                if s > best_norm {
                    best_norm = s;
                    best = j;
                }
            }
            if best != k {
                for i in 0..m {
                    let t = r[(i, k)];
                    r[(i, k)] = r[(i, best)];
                    r[(i, best)] = t;
                }
                perm.swap(k, best);
            }
        }
        let x: Vec<Complex64> = (k..m).map(|i| r[(i, k)]).collect();
        let (tau, v, beta) = make_reflector(&x);
        apply_left(&mut r, tau, &v, k, k);
        // The target column is known exactly; avoid leftover roundoff below it.
        r[(k, k)] = beta;
        for i in k + 1..m {
            r[(i, k)] = Complex64::new(0.0, 0.0);
        }
        reflectors.push((tau, v, k));
    }
    // Q = H_0 H_1 ... H_{s-1}, accumulated by applying reflectors to I in reverse.
    let mut q = ComplexMatrix::identity(m);
    for (tau, v, k) in reflectors.iter().rev() {
        apply_left(&mut q, *tau, v, *k, 0);
    }
    Qr { q, r, perm }
}

/// Numerical rank from the pivoted R diagonal, relative cut `rel_tol`.
pub fn rank(a: &ComplexMatrix, rel_tol: f64) -> usize {
    rank_scaled(a, rel_tol, 0.0)
}

/// Rank with the cut measured against max(largest pivot, `scale_floor`).
/// The floor lets callers judge a matrix that cancelled to roundoff against
/// the scale of the data it came from instead of against its own noise.
pub fn rank_scaled(a: &ComplexMatrix, rel_tol: f64, scale_floor: f64) -> usize {
    if a.rows() == 0 || a.cols() == 0 {
        return 0;
    }
    let f = qr(a, true);
    let diag = r_diag(&f.r);
    rank_from_diag(&diag, rel_tol, scale_floor)
}

pub fn r_diag(r: &ComplexMatrix) -> Vec<f64> {
    (0..r.rows().min(r.cols())).map(|i| r[(i, i)].norm()).collect()
}

pub fn rank_from_diag(diag: &[f64], rel_tol: f64, scale_floor: f64) -> usize {
    // Pivoting makes the diagonal non-increasing up to roundoff; measure
    // against the largest entry rather than trusting strict order.
    let top = diag.iter().copied().fold(scale_floor, f64::max);
    if top == 0.0 {
        return 0;
    }
    diag.iter().take_while(|&&d| d > rel_tol * top).count()
}

/// Orthonormal basis of the right null space of `m`, with rank diagnostics.
pub struct NullSpace {
    /// Columns form an orthonormal basis of ker(m).
    pub basis: ComplexMatrix,
    pub rank: usize,
    /// Pivoted R diagonal magnitudes of m^H, descending.
    pub diag: Vec<f64>,
}

/// Null space via pivoted QR of the adjoint: the trailing columns of Q span
/// the orthogonal complement of the row space of `m`.
pub fn null_space(m: &ComplexMatrix, rel_tol: f64) -> Result<NullSpace> {
    null_space_scaled(m, rel_tol, 0.0)
}

/// Null space with the rank cut floored at `scale_floor`, as in [`rank_scaled`].
pub fn null_space_scaled(m: &ComplexMatrix, rel_tol: f64, scale_floor: f64) -> Result<NullSpace> {
    let d = m.cols();
    if m.rows() == 0 || d == 0 {
        return Ok(NullSpace {
            basis: ComplexMatrix::identity(d),
            rank: 0,
            diag: Vec::new(),
        });
    }
    let f = qr(&m.adjoint(), true);
    let diag = r_diag(&f.r);
    let rank = rank_from_diag(&diag, rel_tol, scale_floor);
    let basis = f.q.block(0, rank, d, d - rank);
    Ok(NullSpace { basis, rank, diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::matrix::ComplexMatrix;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_matrix(rows: usize, cols: usize, seed: u64) -> ComplexMatrix {
        // Small deterministic LCG; test-only.
        let mut state = seed.wrapping_mul(6364136223846793005).wrapping_add(1);
        let mut next = || {
            state = state
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            ((state >> 11) as f64 / (1u64 << 53) as f64) * 2.0 - 1.0
        };
        ComplexMatrix::from_fn(rows, cols, |_, _| c(next(), next()))
    }

    #[test]
    fn qr_reconstructs_input() {
        let a = random_matrix(5, 4, 7);
        let f = qr(&a, true);
        let ap = a.select_columns(&f.perm);
        let qr_prod = f.q.mul(&f.r).unwrap();
        assert!(ap.sub(&qr_prod).unwrap().max_abs() < 1e-13);
        let qhq = f.q.adjoint().mul(&f.q).unwrap();
        assert!(qhq.sub(&ComplexMatrix::identity(5)).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn null_space_of_rank_one_map() {
        // 2x2 rank-1: kernel is one-dimensional.
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)])
            .unwrap();
        let ns = null_space(&m, 1e-8).unwrap();
        assert_eq!(ns.rank, 1);
        assert_eq!(ns.basis.cols(), 1);
        let img = m.mul(&ns.basis).unwrap();
        assert!(img.max_abs() < 1e-13);
    }

    #[test]
    fn null_space_of_zero_rows_is_everything() {
        let m = ComplexMatrix::zeros(0, 3);
        let ns = null_space(&m, 1e-8).unwrap();
        assert_eq!(ns.basis.cols(), 3);
        assert_eq!(ns.rank, 0);
    }

    #[test]
    fn rank_of_tall_full_rank() {
        let a = random_matrix(6, 3, 11);
        assert_eq!(rank(&a, 1e-8), 3);
    }
}
