//! Dense complex eigenvalues: balancing, Hessenberg reduction, explicit
//! shifted QR with Givens rotations, multiplicity clustering.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // trait float math: used by the no_std build only
use num_traits::Float;

use super::lu::Lu;
use super::matrix::ComplexMatrix;
use crate::error::Error;
use crate::Result;

/// Relative clustering tolerance: eigenvalues within this times the spectral
/// radius are merged into one entry with summed multiplicity.
pub const CLUSTER_REL_TOL: f64 = 1e-8;

/// Eigenvalues with algebraic multiplicities, sorted by (principal argument,
/// modulus) for determinism.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    items: Vec<(Complex64, usize)>,
    dim: usize,
}

impl Spectrum {
    /// Clusters raw eigenvalues (tolerance `CLUSTER_REL_TOL` * spectral
    /// radius) and sorts. Used both by the solver and by exact model spectra.
    pub fn from_raw(vals: Vec<Complex64>) -> Self {
        let dim = vals.len();
        let items = cluster(vals);
        Self::sorted(items, dim)
    }

    /// Builds a spectrum from explicit (eigenvalue, multiplicity) pairs
    /// without clustering.
    pub fn from_items(items: Vec<(Complex64, usize)>) -> Self {
        let dim = items.iter().map(|(_, m)| m).sum();
        Self::sorted(items, dim)
    }

    fn sorted(mut items: Vec<(Complex64, usize)>, dim: usize) -> Self {
        items.sort_by(|a, b| {
            let ka = (a.0.arg(), a.0.norm());
            let kb = (b.0.arg(), b.0.norm());
            ka.partial_cmp(&kb).expect("finite eigenvalues")
        });
        Self { items, dim }
    }

    pub fn items(&self) -> &[(Complex64, usize)] {
        &self.items
    }

    /// Dimension of the source operator (sum of multiplicities).
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.dim == 0
    }

    pub fn spectral_radius(&self) -> f64 {
        self.items.iter().map(|(z, _)| z.norm()).fold(0.0, f64::max)
    }

    pub fn min_modulus(&self) -> f64 {
        self.items
            .iter()
            .map(|(z, _)| z.norm())
            .fold(f64::INFINITY, f64::min)
    }
}

/// Union-find with a sliding window over the really-sorted values; merges
/// pairs within `tol` of each other.
fn cluster(vals: Vec<Complex64>) -> Vec<(Complex64, usize)> {
    let m = vals.len();
    if m == 0 {
        return Vec::new();
    }
    let rho = vals.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let tol = CLUSTER_REL_TOL * rho;
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| vals[i].re.partial_cmp(&vals[j].re).expect("finite"));
    let mut parent: Vec<usize> = (0..m).collect();
    fn find(parent: &mut Vec<usize>, mut i: usize) -> usize {
        while parent[i] != i {
            parent[i] = parent[parent[i]];
            i = parent[i];
        }
        i
    }
    for a in 0..m {
        let i = order[a];
        for b in a + 1..m {
            let j = order[b];
            if vals[j].re - vals[i].re > tol {
                break;
            }
            if (vals[i] - vals[j]).norm() <= tol {
                let ri = find(&mut parent, i);
                let rj = find(&mut parent, j);
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut sums: Vec<(Complex64, usize)> = vec![(Complex64::new(0.0, 0.0), 0); m];
    for i in 0..m {
        let r = find(&mut parent, i);
        sums[r].0 += vals[i];
        sums[r].1 += 1;
    }
    sums.into_iter()
        .filter(|(_, c)| *c > 0)
        .map(|(s, c)| (s / c as f64, c))
        .collect()
}

/// Parlett-Reinsch balancing with radix-2 scale factors (similarity, exact).
fn balance(a: &mut ComplexMatrix) {
    let n = a.rows();
    for _ in 0..100 {
        let mut done = true;
        for i in 0..n {
            let mut c = 0.0f64;
            let mut r = 0.0f64;
            for j in 0..n {
                if j != i {
                    c += a[(j, i)].norm();
                    r += a[(i, j)].norm();
                }
            }
            if c == 0.0 || r == 0.0 || !c.is_finite() || !r.is_finite() {
                continue;
            }
            let s = c + r;
            let mut f = 1.0f64;
            let mut c2 = c;
            let mut r2 = r;
            while c2 < r2 / 2.0 {
                c2 *= 2.0;
                r2 /= 2.0;
                f *= 2.0;
            }
            while c2 >= r2 * 2.0 {
                c2 /= 2.0;
                r2 *= 2.0;
                f /= 2.0;
            }
            if c2 + r2 < 0.95 * s && f != 1.0 && f.is_finite() && f > 0.0 {
                done = false;
                let inv = 1.0 / f;
                for j in 0..n {
                    let v = a[(i, j)] * inv;
                    a[(i, j)] = v;
                }
                for j in 0..n {
                    let v = a[(j, i)] * f;
                    a[(j, i)] = v;
                }
            }
        }
        if done {
            break;
        }
    }
}

/// In-place unitary reduction to upper Hessenberg form.
fn hessenberg(a: &mut ComplexMatrix) {
    let n = a.rows();
    if n < 3 {
        return;
    }
    for k in 0..n - 2 {
        let x: Vec<Complex64> = (k + 1..n).map(|i| a[(i, k)]).collect();
        let norm = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = x[0];
        let phase = if alpha.norm() > 0.0 {
            alpha / alpha.norm()
        } else {
            Complex64::new(1.0, 0.0)
        };
        let beta = -phase * norm;
        let mut v = x;
        v[0] = alpha - beta;
        let tau = 1.0 / (norm * (norm + alpha.norm()));
        // Left: rows k+1..n, all columns >= k.
        for j in k..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (i, vi) in v.iter().enumerate() {
                s += vi.conj() * a[(k + 1 + i, j)];
            }
            s *= tau;
            for (i, vi) in v.iter().enumerate() {
                let d = s * vi;
                a[(k + 1 + i, j)] -= d;
            }
        }
        // Right: columns k+1..n, all rows.
        for i in 0..n {
            let mut s = Complex64::new(0.0, 0.0);
            for (j, vj) in v.iter().enumerate() {
                s += a[(i, k + 1 + j)] * vj;
            }
            s *= tau;
            for (j, vj) in v.iter().enumerate() {
                let d = s * vj.conj();
                a[(i, k + 1 + j)] -= d;
            }
        }
        a[(k + 1, k)] = beta;
        for i in k + 2..n {
            a[(i, k)] = Complex64::new(0.0, 0.0);
        }
    }
}

/// Givens pair (c real, s complex) with G^H [a; b] = [r; 0],
/// G = [[c, s], [-conj(s), c]].
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    let m = (a.norm_sqr() + b.norm_sqr()).sqrt();
    if m == 0.0 {
        return (1.0, Complex64::new(0.0, 0.0));
    }
    let an = a.norm();
    if an == 0.0 {
        return (0.0, -b.conj() / b.norm());
    }
    let c = an / m;
    let s = -(b.conj() / m) * (a / an);
    (c, s)
}

/// Eigenvalues of [[a, b], [c, d]], product-corrected for accuracy.
fn eig2(a: Complex64, b: Complex64, c: Complex64, d: Complex64) -> (Complex64, Complex64) {
    let t = (a + d) * 0.5;
    let det = a * d - b * c;
    let disc = ((a - d) * (a - d) * 0.25 + b * c).sqrt();
    let l1 = if (t + disc).norm() >= (t - disc).norm() {
        t + disc
    } else {
        t - disc
    };
    let l2 = if l1.norm() > 0.0 { det / l1 } else { t };
    (l1, l2)
}

/// Explicit shifted QR on a Hessenberg matrix; returns raw eigenvalues.
fn qr_eigenvalues(h: &mut ComplexMatrix) -> Result<Vec<Complex64>> {
    let n = h.rows();
    let mut eigs: Vec<Complex64> = Vec::with_capacity(n);
    if n == 0 {
        return Ok(eigs);
    }
    let eps = f64::EPSILON;
    let hnorm = h.frobenius_norm().max(f64::MIN_POSITIVE);
    let itmax = 40 * n.max(10);
    let mut total = 0usize;
    let mut hi = n; // exclusive end of the active block
    let mut stall = 0usize;
    while hi > 0 {
        // Deflate negligible subdiagonals and find the active window start.
        let mut lo = 0;
        for i in (1..hi).rev() {
            let scale = h[(i - 1, i - 1)].norm() + h[(i, i)].norm();
            let scale = if scale == 0.0 { hnorm } else { scale };
            if h[(i, i - 1)].norm() <= eps * scale {
                h[(i, i - 1)] = Complex64::new(0.0, 0.0);
                lo = i;
                break;
            }
        }
        let w = hi - lo;
        if w == 1 {
            eigs.push(h[(lo, lo)]);
            hi -= 1;
            stall = 0;
            continue;
        }
        if w == 2 {
            let (l1, l2) = eig2(
                h[(lo, lo)],
                h[(lo, lo + 1)],
                h[(lo + 1, lo)],
                h[(lo + 1, lo + 1)],
            );
            eigs.push(l1);
            eigs.push(l2);
            hi -= 2;
            stall = 0;
            continue;
        }
        total += 1;
        stall += 1;
        if total > itmax {
            return Err(Error::NonConvergence {
                size: n,
                iterations: total,
            });
        }
        // Wilkinson shift from the trailing 2x2; exceptional shift when stalled.
        let mu = if stall % 12 == 0 {
            h[(hi - 1, hi - 1)] + Complex64::new(0.75 * h[(hi - 1, hi - 2)].norm(), 0.0)
        } else {
            let (l1, l2) = eig2(
                h[(hi - 2, hi - 2)],
                h[(hi - 2, hi - 1)],
                h[(hi - 1, hi - 2)],
                h[(hi - 1, hi - 1)],
            );
            let target = h[(hi - 1, hi - 1)];
            if (l1 - target).norm() <= (l2 - target).norm() {
                l1
            } else {
                l2
            }
        };
        // One explicit QR sweep of H - mu I restricted to the window.
        for i in lo..hi {
            let v = h[(i, i)] - mu;
            h[(i, i)] = v;
        }
        let mut rots: Vec<(f64, Complex64)> = Vec::with_capacity(w - 1);
        for i in lo..hi - 1 {
            let (c, s) = givens(h[(i, i)], h[(i + 1, i)]);
            // Rows i, i+1 of the window columns.
            for j in i..hi {
                let x = h[(i, j)];
                let y = h[(i + 1, j)];
                h[(i, j)] = c * x - s * y;
                h[(i + 1, j)] = s.conj() * x + c * y;
            }
            h[(i + 1, i)] = Complex64::new(0.0, 0.0);
            rots.push((c, s));
        }
        for (idx, (c, s)) in rots.iter().enumerate() {
            let i = lo + idx;
            // Columns i, i+1, rows lo..=i+1 (upper triangular input).
            for r in lo..(i + 2).min(hi) {
                let x = h[(r, i)];
                let y = h[(r, i + 1)];
                h[(r, i)] = *c * x - s.conj() * y;
                h[(r, i + 1)] = *s * x + *c * y;
            }
        }
        for i in lo..hi {
            let v = h[(i, i)] + mu;
            h[(i, i)] = v;
        }
    }
    Ok(eigs)
}

/// Multiset comparison of the reconstructed characteristic polynomial against
/// det(zI - A) at fixed probe points, in the log domain.
fn verify_char_poly(a: &ComplexMatrix, spectrum: &Spectrum) -> Result<()> {
    let n = a.rows();
    if n == 0 {
        return Ok(());
    }
    let rho = spectrum.spectral_radius();
    let scale = rho
        .max(a.frobenius_norm() / (n as f64).sqrt())
        .max(1e-30);
    let tol = (n.max(4) as f64) * 1e-10;
    for phi in [0.9371_f64, 2.5811_f64] {
        let z = Complex64::from_polar(2.0 * scale, phi);
        let mut log_p = Complex64::new(0.0, 0.0);
        for (lam, m) in spectrum.items() {
            log_p += (z - lam).ln() * (*m as f64);
        }
        let shifted = ComplexMatrix::from_fn(n, n, |i, j| {
            let d = if i == j { z } else { Complex64::new(0.0, 0.0) };
            d - a[(i, j)]
        });
        let (log_mod, arg) = Lu::decompose(&shifted)?.log_det();
        let dre = log_p.re - log_mod;
        let mut dim = log_p.im - arg;
        dim -= 2.0 * PI * (dim / (2.0 * PI)).round();
        let residual = (dre * dre + dim * dim).sqrt();
        if residual > tol {
            return Err(Error::CharPolyMismatch { residual });
        }
    }
    Ok(())
}

/// All eigenvalues of a square matrix with algebraic multiplicities.
///
/// Internally: balance, Hessenberg, explicit shifted QR. The result is checked
/// against det(zI - A) at probe points before being returned.
pub fn eigenvalues(m: &ComplexMatrix) -> Result<Spectrum> {
    if !m.is_square() {
        return Err(Error::Dimension {
            context: "eigenvalues of a non-square matrix",
        });
    }
    let n = m.rows();
    if n == 0 {
        return Ok(Spectrum::from_raw(Vec::new()));
    }
    if n == 1 {
        return Ok(Spectrum::from_raw(vec![m[(0, 0)]]));
    }
    let mut work = m.clone();
    balance(&mut work);
    hessenberg(&mut work);
    let raw = qr_eigenvalues(&mut work)?;
    let spectrum = Spectrum::from_raw(raw);
    verify_char_poly(m, &spectrum)?;
    Ok(spectrum)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn identity_has_single_clustered_eigenvalue() {
        let s = eigenvalues(&ComplexMatrix::identity(2)).unwrap();
        assert_eq!(s.items().len(), 1);
        let (lam, mult) = s.items()[0];
        assert_eq!(mult, 2);
        assert!((lam - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn rotation_matrix_has_conjugate_pair() {
        let m = ComplexMatrix::new(2, 2, vec![c(0.0, 0.0), c(1.0, 0.0), c(-1.0, 0.0), c(0.0, 0.0)])
            .unwrap();
        let s = eigenvalues(&m).unwrap();
        assert_eq!(s.items().len(), 2);
        // Sorted by argument: -i before i.
        assert!((s.items()[0].0 - c(0.0, -1.0)).norm() < 1e-12);
        assert!((s.items()[1].0 - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn diagonal_matrix_is_exact() {
        let m = ComplexMatrix::from_fn(4, 4, |i, j| {
            if i == j {
                c(i as f64 + 1.0, -(i as f64))
            } else {
                c(0.0, 0.0)
            }
        });
        let s = eigenvalues(&m).unwrap();
        assert_eq!(s.dim(), 4);
        for (lam, m_) in s.items() {
            assert_eq!(*m_, 1);
            let k = lam.re.round();
            assert!((lam - c(k, -(k - 1.0))).norm() < 1e-10);
        }
    }

    #[test]
    fn jordan_block_clusters_to_full_multiplicity() {
        // Defective: eigenvalue 2 with algebraic multiplicity 3.
        let mut m = ComplexMatrix::zeros(3, 3);
        for i in 0..3 {
            m[(i, i)] = c(2.0, 0.0);
            if i + 1 < 3 {
                m[(i, i + 1)] = c(1.0, 0.0);
            }
        }
        let s = eigenvalues(&m).unwrap();
        let total: usize = s.items().iter().map(|(_, m)| m).sum();
        assert_eq!(total, 3);
        for (lam, _) in s.items() {
            assert!((lam - c(2.0, 0.0)).norm() < 1e-4);
        }
    }

    #[test]
    fn empty_matrix_has_empty_spectrum() {
        let s = eigenvalues(&ComplexMatrix::zeros(0, 0)).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.dim(), 0);
    }

    #[test]
    fn spectrum_sort_is_by_argument_then_modulus() {
        let s = Spectrum::from_items(vec![
            (c(2.0, 0.0), 1),
            (c(-1.0, 0.0), 1),
            (c(1.0, 0.0), 1),
            (c(0.0, -1.0), 1),
        ]);
        let args: Vec<f64> = s.items().iter().map(|(z, _)| z.arg()).collect();
        for w in args.windows(2) {
            assert!(w[0] <= w[1]);
        }
        // Equal argument 0: modulus breaks the tie.
        assert!((s.items()[1].0 - c(1.0, 0.0)).norm() < 1e-15);
        assert!((s.items()[2].0 - c(2.0, 0.0)).norm() < 1e-15);
    }
}
