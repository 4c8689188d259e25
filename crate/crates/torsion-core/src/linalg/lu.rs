//! LU factorization with partial pivoting; determinants, solves, inverses.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // trait float math: used by the no_std build only
use num_traits::Float;

use super::matrix::ComplexMatrix;
use crate::error::Error;
use crate::Result;

/// Compact LU factorization PA = LU of a square matrix.
pub struct Lu {
    lu: ComplexMatrix,
    perm: Vec<usize>,
    swaps: usize,
    /// Largest and smallest pivot magnitudes, for conditioning diagnostics.
    pub max_pivot: f64,
    pub min_pivot: f64,
}

impl Lu {
    pub fn decompose(m: &ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::Dimension {
                context: "LU requires a square matrix",
            });
        }
        let n = m.rows();
        let mut lu = m.clone();
        let mut perm: Vec<usize> = (0..n).collect();
        let mut swaps = 0usize;
        let mut max_pivot = 0.0f64;
        let mut min_pivot = f64::INFINITY;
        for k in 0..n {
            let mut p = k;
            let mut best = lu[(k, k)].norm();
            for i in k + 1..n {
                let v = lu[(i, k)].norm();
                if v > best {
                    best = v;
                    p = i;
                }
            }
            if p != k {
                for j in 0..n {
                    let t = lu[(k, j)];
                    lu[(k, j)] = lu[(p, j)];
                    lu[(p, j)] = t;
                }
                perm.swap(k, p);
                swaps += 1;
            }
            let pivot = lu[(k, k)];
            let pm = pivot.norm();
            max_pivot = max_pivot.max(pm);
            min_pivot = min_pivot.min(pm);
            if pm == 0.0 {
                // Singular to working precision; keep zero column, factors stay valid.
                continue;
            }
            for i in k + 1..n {
                let f = lu[(i, k)] / pivot;
                lu[(i, k)] = f;
                if f != Complex64::new(0.0, 0.0) {
                    for j in k + 1..n {
                        let s = f * lu[(k, j)];
                        lu[(i, j)] -= s;
                    }
                }
            }
        }
        if n == 0 {
            min_pivot = 0.0;
        }
        Ok(Self {
            lu,
            perm,
            swaps,
            max_pivot,
            min_pivot,
        })
    }

    pub fn is_singular(&self) -> bool {
        self.min_pivot == 0.0 && self.lu.rows() > 0
    }

    pub fn det(&self) -> Complex64 {
        let mut d = if self.swaps % 2 == 0 {
            Complex64::new(1.0, 0.0)
        } else {
            Complex64::new(-1.0, 0.0)
        };
        for k in 0..self.lu.rows() {
            d *= self.lu[(k, k)];
        }
        d
    }

    /// log det as (log modulus, argument); stable against over/underflow.
    pub fn log_det(&self) -> (f64, f64) {
        let mut log_mod = 0.0f64;
        let mut arg = if self.swaps % 2 == 0 {
            0.0
        } else {
            core::f64::consts::PI
        };
        for k in 0..self.lu.rows() {
            let p = self.lu[(k, k)];
            log_mod += p.norm().ln();
            arg += p.arg();
        }
        (log_mod, arg)
    }

    /// Solves A X = B for each column of B.
    pub fn solve(&self, b: &ComplexMatrix) -> Result<ComplexMatrix> {
        let n = self.lu.rows();
        if b.rows() != n {
            return Err(Error::Dimension {
                context: "LU solve right-hand side rows",
            });
        }
        if self.is_singular() {
            return Err(Error::SingularMatrix {
                context: "LU solve",
            });
        }
        let mut x = ComplexMatrix::zeros(n, b.cols());
        for col in 0..b.cols() {
            // Forward substitution on P b.
            let mut y = vec![Complex64::new(0.0, 0.0); n];
            for i in 0..n {
                let mut s = b[(self.perm[i], col)];
                for j in 0..i {
                    s -= self.lu[(i, j)] * y[j];
                }
                y[i] = s;
            }
            // Back substitution.
            for i in (0..n).rev() {
                let mut s = y[i];
                for j in i + 1..n {
                    s -= self.lu[(i, j)] * x[(j, col)];
                }
                x[(i, col)] = s / self.lu[(i, i)];
            }
        }
        Ok(x)
    }

    pub fn inverse(&self) -> Result<ComplexMatrix> {
        self.solve(&ComplexMatrix::identity(self.lu.rows()))
    }
}

/// Determinant of a square matrix via LU.
pub fn det(m: &ComplexMatrix) -> Result<Complex64> {
    Ok(Lu::decompose(m)?.det())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn det_of_complex_2x2() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 1.0), c(2.0, 0.0), c(0.0, 3.0), c(1.0, -1.0)])
            .unwrap();
        // (1+i)(1-i) - 2*(3i) = 2 - 6i
        let d = det(&m).unwrap();
        assert!((d - c(2.0, -6.0)).norm() < 1e-14);
    }

    #[test]
    fn solve_reproduces_identity() {
        let m = ComplexMatrix::new(
            3,
            3,
            vec![
                c(4.0, 0.0),
                c(1.0, 2.0),
                c(0.0, 0.0),
                c(1.0, -2.0),
                c(3.0, 0.0),
                c(0.5, 0.0),
                c(0.0, 1.0),
                c(0.5, 0.0),
                c(5.0, 0.0),
            ],
        )
        .unwrap();
        let inv = Lu::decompose(&m).unwrap().inverse().unwrap();
        let prod = m.mul(&inv).unwrap();
        let err = prod.sub(&ComplexMatrix::identity(3)).unwrap().max_abs();
        assert!(err < 1e-13, "residual {err}");
    }

    #[test]
    fn singular_matrix_is_flagged() {
        let m = ComplexMatrix::new(2, 2, vec![c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)])
            .unwrap();
        let lu = Lu::decompose(&m).unwrap();
        assert!(lu.det().norm() < 1e-14);
        assert!(lu.solve(&ComplexMatrix::identity(2)).is_err());
    }

    #[test]
    fn empty_matrix_has_det_one() {
        let m = ComplexMatrix::zeros(0, 0);
        assert_eq!(det(&m).unwrap(), c(1.0, 0.0));
    }
}
