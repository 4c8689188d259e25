//! The even odd-signature operator: assembly, +/- splitting, graded
//! determinant, xi, eta, and refined torsion.
//!
//! Sign conventions (block signs, the orientation of zeta'(0) in xi, and the
//! counting convention in eta) are frozen by the one-dimensional witness
//! d = i t, Gamma = 1, t > 0, for which eta = 0, xi = log t, and
//! graded_det = exp(xi) * exp(-i pi eta) holds exactly. The unit tests pin
//! that witness; the identity then holds for every admissible angle.

use alloc::format;
use alloc::string::ToString;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_rational::Ratio;
#[allow(unused_imports)] // trait float math: used by the no_std build only
use num_traits::Float;

use crate::complexes::{Chirality, TwistedComplex};
use crate::error::{Assumption, Error};
use crate::linalg::{
    branch, eigenvalues, null_space_scaled, AgmonAngle, ComplexMatrix, Lu, Spectrum, ON_CUT_TOL,
};
use crate::Result;

/// Relative spectral-gap threshold for Assumption II (bijectivity).
pub const BIJECTIVITY_TOL: f64 = 1e-8;

/// Relative rank cut for the +/- splitting kernels.
pub const SPLIT_RANK_TOL: f64 = 1e-8;

/// Relative tolerance for invariance and direct-sum residuals.
pub const SPLIT_CHECK_TOL: f64 = 1e-8;

/// Basis pair for the degree-k splitting: columns span the two kernels.
#[derive(Debug, Clone)]
pub struct SplitBasis {
    /// Orthonormal basis of Ker(d Gamma) in degree k.
    pub plus: ComplexMatrix,
    /// Orthonormal basis of Ker(Gamma d) in degree k.
    pub minus: ComplexMatrix,
}

/// The assembled even operator with its splitting and cached spectra.
#[derive(Debug, Clone)]
pub struct OddSignature {
    n: usize,
    r: usize,
    even_dims: Vec<usize>,
    b_even: ComplexMatrix,
    p_plus: ComplexMatrix,
    p_minus: ComplexMatrix,
    b_plus: ComplexMatrix,
    b_minus: ComplexMatrix,
    split_bases: Vec<SplitBasis>,
    spectrum: Spectrum,
    spectrum_plus: Spectrum,
    spectrum_minus: Spectrum,
    /// Spectrum of (Gamma d)^2 restricted to the degree-k plus subspace.
    sq_spectra: Vec<Spectrum>,
}

/// Spectral-asymmetry value with its counting data.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EtaValue {
    pub value: Complex64,
    pub m_plus: usize,
    pub m_minus: usize,
    /// True when the value came from a zeta-regularized (continuum) path
    /// rather than finite counting.
    pub regularized: bool,
}

/// Phase ambiguity class of a torsion value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Ambiguity {
    Exact,
    Sign,
    /// Determined up to i^(k * rank); payload is the bundle rank.
    FourthRoots(u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    Combinatorial,
    Oracle,
}

/// A nonzero torsion number with its ambiguity class and origin.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TorsionValue {
    pub value: Complex64,
    pub ambiguity: Ambiguity,
    pub provenance: Provenance,
}

fn i_pow(r: usize) -> Complex64 {
    match r % 4 {
        0 => Complex64::new(1.0, 0.0),
        1 => Complex64::new(0.0, 1.0),
        2 => Complex64::new(-1.0, 0.0),
        _ => Complex64::new(0.0, -1.0),
    }
}

/// d_k as a matrix, with the out-of-range differentials equal to the zero map
/// into a zero-dimensional space.
fn diff_or_zero(tc: &TwistedComplex, k: usize) -> ComplexMatrix {
    if k < tc.top_degree() {
        tc.differential(k).clone()
    } else {
        ComplexMatrix::zeros(0, tc.dim(k.min(tc.top_degree())))
    }
}

/// Raw block matrix of the even operator i^r (-1)^(p+1) (Gamma d - d Gamma)
/// on the direct sum of the even-degree spaces, ordered by degree.
pub(crate) fn b_even_matrix(tc: &TwistedComplex, ch: &Chirality) -> Result<ComplexMatrix> {
    let n = tc.top_degree();
    let r = (n + 1) / 2;
    let even_dims: Vec<usize> = (0..r).map(|p| tc.dim(2 * p)).collect();
    let mut offsets = Vec::with_capacity(r + 1);
    let mut acc = 0usize;
    for &d in &even_dims {
        offsets.push(acc);
        acc += d;
    }
    offsets.push(acc);
    let total = acc;
    let mut b = ComplexMatrix::zeros(total, total);
    for p in 0..r {
        let sign = i_pow(r) * if p % 2 == 0 { -1.0 } else { 1.0 };
        // Gamma d : C^{2p} -> C^{n-2p-1}, even block index r-1-p.
        let gd = ch.map(2 * p + 1).mul(tc.differential(2 * p))?;
        let row = offsets[r - 1 - p];
        let col = offsets[p];
        for i in 0..gd.rows() {
            for j in 0..gd.cols() {
                b[(row + i, col + j)] += sign * gd[(i, j)];
            }
        }
        // d Gamma : C^{2p} -> C^{n-2p+1}, even block index r-p (absent at p=0).
        if p >= 1 {
            let dg = tc.differential(n - 2 * p).mul(ch.map(2 * p))?;
            let row = offsets[r - p];
            for i in 0..dg.rows() {
                for j in 0..dg.cols() {
                    b[(row + i, col + j)] -= sign * dg[(i, j)];
                }
            }
        }
    }
    Ok(b)
}

/// Smallest singular value, computed honestly from the spectrum of B^H B.
fn smallest_singular_value(b: &ComplexMatrix) -> Option<f64> {
    let gram = b.adjoint().mul(b).ok()?;
    let s = eigenvalues(&gram).ok()?;
    let min = s
        .items()
        .iter()
        .map(|(z, _)| z.re.max(0.0))
        .fold(f64::INFINITY, f64::min);
    if min.is_finite() {
        Some(min.sqrt())
    } else {
        None
    }
}

/// Orthonormal kernel basis with an ambiguity guard: diagonal values within a
/// factor 10 of the rank cut make the splitting ill-posed. The cut is floored
/// at the complex's own scale so a composite that cancelled to roundoff is
/// read as the zero map rather than as a full-rank speck.
fn guarded_kernel(m: &ComplexMatrix, degree: usize, scale_floor: f64) -> Result<ComplexMatrix> {
    let ns = null_space_scaled(m, SPLIT_RANK_TOL, scale_floor)?;
    let top = ns.diag.iter().copied().fold(scale_floor, f64::max);
    if top > 0.0 {
        let cut = SPLIT_RANK_TOL * top;
        for &d in &ns.diag {
            if d > cut / 10.0 && d < cut * 10.0 {
                return Err(Error::SplittingFailure {
                    degree,
                    detail: format!("rank decision ambiguous: pivot {d:e} near cut {cut:e}"),
                });
            }
        }
    }
    Ok(ns.basis)
}

/// Assembles the even operator, verifies both assumptions, computes the
/// +/- splitting in every degree, and caches all spectra.
pub fn assemble(tc: &TwistedComplex, ch: &Chirality) -> Result<OddSignature> {
    let n = tc.top_degree();
    let r = (n + 1) / 2;
    if !tc.is_acyclic() {
        return Err(Error::AssumptionViolated {
            which: Assumption::Acyclicity,
            sigma_min: None,
        });
    }
    let b_even = b_even_matrix(tc, ch)?;
    let spectrum = eigenvalues(&b_even)?;
    if !spectrum.is_empty() {
        let rho = spectrum.spectral_radius();
        if spectrum.min_modulus() <= BIJECTIVITY_TOL * rho || rho == 0.0 {
            return Err(Error::AssumptionViolated {
                which: Assumption::Bijectivity,
                sigma_min: smallest_singular_value(&b_even),
            });
        }
    }

    // Per-degree kernels: plus = Ker(d Gamma), minus = Ker(Gamma d). The rank
    // floor is the scale the composites would have if nothing cancelled.
    let d_scale = (0..n)
        .map(|k| tc.differential(k).frobenius_norm())
        .fold(0.0, f64::max);
    let ch_scale = (0..=n).map(|k| ch.map(k).frobenius_norm()).fold(1.0, f64::max);
    let kernel_floor = d_scale * ch_scale;
    let mut split_bases: Vec<SplitBasis> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let m_plus = diff_or_zero(tc, n - k).mul(ch.map(k))?;
        let plus = guarded_kernel(&m_plus, k, kernel_floor)?;
        let m_minus = if k < n {
            ch.map(k + 1).mul(tc.differential(k))?
        } else {
            ComplexMatrix::zeros(0, tc.dim(n))
        };
        let minus = guarded_kernel(&m_minus, k, kernel_floor)?;
        if plus.cols() + minus.cols() != tc.dim(k) {
            return Err(Error::SplittingFailure {
                degree: k,
                detail: format!(
                    "kernel dimensions {} + {} do not sum to {}",
                    plus.cols(),
                    minus.cols(),
                    tc.dim(k)
                ),
            });
        }
        split_bases.push(SplitBasis { plus, minus });
    }

    // Even-degree stacked bases: block-diagonal embedding by degree.
    let even_dims: Vec<usize> = (0..r).map(|p| tc.dim(2 * p)).collect();
    let total: usize = even_dims.iter().sum();
    let w_plus: usize = (0..r).map(|p| split_bases[2 * p].plus.cols()).sum();
    let w_minus: usize = (0..r).map(|p| split_bases[2 * p].minus.cols()).sum();
    let mut s_plus = ComplexMatrix::zeros(total, w_plus);
    let mut s_minus = ComplexMatrix::zeros(total, w_minus);
    {
        let mut row = 0usize;
        let mut cp = 0usize;
        let mut cm = 0usize;
        for p in 0..r {
            let bp = &split_bases[2 * p].plus;
            for i in 0..bp.rows() {
                for j in 0..bp.cols() {
                    s_plus[(row + i, cp + j)] = bp[(i, j)];
                }
            }
            let bm = &split_bases[2 * p].minus;
            for i in 0..bm.rows() {
                for j in 0..bm.cols() {
                    s_minus[(row + i, cm + j)] = bm[(i, j)];
                }
            }
            row += even_dims[p];
            cp += bp.cols();
            cm += bm.cols();
        }
    }

    // Direct sum and invariance checks, then restrictions in the orthonormal
    // stacked bases.
    let s = s_plus.hstack(&s_minus)?;
    if s.rows() != s.cols() {
        return Err(Error::SplittingFailure {
            degree: 0,
            detail: "even splitting is not a direct sum".to_string(),
        });
    }
    let scale = b_even.frobenius_norm().max(1.0);
    let (b_plus, b_minus, p_plus) = if total > 0 {
        let lu = Lu::decompose(&s)?;
        if lu.is_singular() || lu.min_pivot <= SPLIT_CHECK_TOL * lu.max_pivot {
            return Err(Error::SplittingFailure {
                degree: 0,
                detail: "plus and minus subspaces do not span".to_string(),
            });
        }
        let b_plus = s_plus.adjoint().mul(&b_even)?.mul(&s_plus)?;
        let b_minus = s_minus.adjoint().mul(&b_even)?.mul(&s_minus)?;
        let res_p = b_even.mul(&s_plus)?.sub(&s_plus.mul(&b_plus)?)?.max_abs();
        let res_m = b_even.mul(&s_minus)?.sub(&s_minus.mul(&b_minus)?)?.max_abs();
        if res_p > SPLIT_CHECK_TOL * scale || res_m > SPLIT_CHECK_TOL * scale {
            return Err(Error::SplittingFailure {
                degree: 0,
                detail: format!("splitting is not invariant (residual {:e})", res_p.max(res_m)),
            });
        }
        // P_+ = S diag(I, 0) S^{-1}.
        let mut selector = ComplexMatrix::zeros(total, total);
        for i in 0..w_plus {
            selector[(i, i)] = Complex64::new(1.0, 0.0);
        }
        let s_inv = lu.inverse()?;
        let p_plus = s.mul(&selector)?.mul(&s_inv)?;
        (b_plus, b_minus, p_plus)
    } else {
        (
            ComplexMatrix::zeros(0, 0),
            ComplexMatrix::zeros(0, 0),
            ComplexMatrix::zeros(0, 0),
        )
    };
    let p_minus = ComplexMatrix::identity(total).sub(&p_plus)?;

    let spectrum_plus = eigenvalues(&b_plus)?;
    let spectrum_minus = eigenvalues(&b_minus)?;

    // (Gamma d)^2 restricted to the plus subspace of every degree k < n.
    let mut sq_spectra = Vec::with_capacity(n);
    for k in 0..n {
        let gd1 = ch.map(k + 1).mul(tc.differential(k))?;
        let gd2 = ch.map(n - k).mul(tc.differential(n - k - 1))?;
        // A_k = (Gamma d after Gamma d) : C^k -> C^k; its image lies in the
        // plus subspace, so the orthonormal-basis restriction is exact.
        let a_k = gd2.mul(&gd1)?;
        let q = &split_bases[k].plus;
        let restricted = q.adjoint().mul(&a_k)?.mul(q)?;
        sq_spectra.push(eigenvalues(&restricted)?);
    }

    Ok(OddSignature {
        n,
        r,
        even_dims,
        b_even,
        p_plus,
        p_minus,
        b_plus,
        b_minus,
        split_bases,
        spectrum,
        spectrum_plus,
        spectrum_minus,
        sq_spectra,
    })
}

impl OddSignature {
    pub fn top_degree(&self) -> usize {
        self.n
    }

    /// r = (n + 1) / 2; the power of i in the block signs.
    pub fn half_plus(&self) -> usize {
        self.r
    }

    pub fn even_dims(&self) -> &[usize] {
        &self.even_dims
    }

    pub fn even_dim(&self) -> usize {
        self.b_even.rows()
    }

    pub fn b_even(&self) -> &ComplexMatrix {
        &self.b_even
    }

    pub fn projector_plus(&self) -> &ComplexMatrix {
        &self.p_plus
    }

    pub fn projector_minus(&self) -> &ComplexMatrix {
        &self.p_minus
    }

    /// Restrictions of the even operator to the plus and minus subspaces, in
    /// the orthonormal stacked kernel bases.
    pub fn split(&self) -> (&ComplexMatrix, &ComplexMatrix) {
        (&self.b_plus, &self.b_minus)
    }

    /// Kernel bases for degree k, both parities.
    pub fn split_basis(&self, k: usize) -> &SplitBasis {
        &self.split_bases[k]
    }

    pub fn spectrum(&self) -> &Spectrum {
        &self.spectrum
    }

    pub fn spectrum_plus(&self) -> &Spectrum {
        &self.spectrum_plus
    }

    pub fn spectrum_minus(&self) -> &Spectrum {
        &self.spectrum_minus
    }
}

/// Graded determinant Det(B+)/Det(B-) over the cut at theta; an empty block
/// contributes the factor 1.
pub fn graded_det(os: &OddSignature, theta: AgmonAngle) -> Result<Complex64> {
    let zp = branch::zeta_prime_zero(&os.spectrum_plus, theta.theta)?;
    let zm = branch::zeta_prime_zero(&os.spectrum_minus, theta.theta)?;
    Ok(((-zp) - (-zm)).exp())
}

/// Xi: half the alternating sum over k < n of zeta'(0) at cut angle 2 theta
/// of (-1)^(k+1) (Gamma d)^2 restricted to the degree-k plus subspace. The
/// doubled angle is used raw (window (2 theta, 2 theta + 2 pi)); reducing it
/// modulo 2 pi would break the determinant identity.
pub fn xi(os: &OddSignature, theta: AgmonAngle) -> Result<Complex64> {
    let two_theta = 2.0 * theta.theta;
    let mut acc = Complex64::new(0.0, 0.0);
    for (k, sq) in os.sq_spectra.iter().enumerate() {
        let sign = if (k + 1) % 2 == 0 { 1.0 } else { -1.0 };
        if !sq.is_empty() {
            let rho = sq.spectral_radius();
            if sq.min_modulus() <= 1e-13 * rho.max(1.0) {
                return Err(Error::DegenerateSplitting { degree: k });
            }
        }
        let scaled = Spectrum::from_items(
            sq.items()
                .iter()
                .map(|(z, m)| (z * sign, *m))
                .collect(),
        );
        let zp = branch::zeta_prime_zero(&scaled, two_theta)?;
        acc += zp * (0.5 * sign);
    }
    Ok(acc)
}

/// Eta by finite counting: m- is the number of eigenvalues of the even
/// operator with argument in (theta + pi, theta + 2 pi), m+ the rest; the
/// witness-frozen value is eta = m-.
pub fn eta(os: &OddSignature, theta: AgmonAngle) -> Result<EtaValue> {
    let mut m_plus = 0usize;
    let mut m_minus = 0usize;
    for (lam, mult) in os.spectrum.items() {
        let a = branch::branch_log(*lam, theta.theta)?.im;
        let mid = theta.theta + PI;
        if (a - mid).abs() < ON_CUT_TOL {
            return Err(Error::OnCut {
                theta: mid,
                arg: lam.arg(),
            });
        }
        if a < mid {
            m_plus += mult;
        } else {
            m_minus += mult;
        }
    }
    Ok(EtaValue {
        value: Complex64::new(m_minus as f64, 0.0),
        m_plus,
        m_minus,
        regularized: false,
    })
}

/// Refined torsion: the graded determinant, corrected for top degree
/// n = 3 (mod 4) by exp(i pi rank/2 * L); the L datum is an input rational.
pub fn refined_torsion(
    os: &OddSignature,
    theta: AgmonAngle,
    rank_e: u32,
    l_integral: Option<Ratio<i64>>,
) -> Result<TorsionValue> {
    let g = graded_det(os, theta)?;
    if os.n % 4 == 1 {
        return Ok(TorsionValue {
            value: g,
            ambiguity: Ambiguity::Exact,
            provenance: Provenance::Analytic,
        });
    }
    let l = l_integral.ok_or(Error::MissingLIntegral)?;
    let angle = PI * (rank_e as f64) * (*l.numer() as f64) / (2.0 * *l.denom() as f64);
    let value = g * Complex64::from_polar(1.0, angle);
    let ambiguity = if rank_e % 4 == 0 {
        Ambiguity::Exact
    } else if rank_e % 2 == 0 {
        Ambiguity::Sign
    } else {
        Ambiguity::FourthRoots(rank_e)
    };
    Ok(TorsionValue {
        value,
        ambiguity,
        provenance: Provenance::Analytic,
    })
}

/// Classical positive torsion: exp(Re xi).
pub fn rs_torsion(os: &OddSignature, theta: AgmonAngle) -> Result<f64> {
    Ok(xi(os, theta)?.re.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complexes::{
        circle_cw, circle_representation, identity_chirality, random_chirality_complex, twist,
        TwistedComplex,
    };
    use crate::linalg::choose_agmon;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// d = i t, Gamma = 1 on dims (1, 1).
    fn witness(t: f64) -> (TwistedComplex, Chirality) {
        let d = ComplexMatrix::scalar(c(0.0, t));
        let tc = TwistedComplex::new(vec![1, 1], vec![d]).unwrap();
        let ch = identity_chirality(&[1, 1]).unwrap();
        (tc, ch)
    }

    #[test]
    fn witness_fixes_all_conventions() {
        for t in [0.5, 1.0, 3.0] {
            let (tc, ch) = witness(t);
            let os = assemble(&tc, &ch).unwrap();
            // B = -i * (i t) = t.
            assert!((os.b_even()[(0, 0)] - c(t, 0.0)).norm() < 1e-14);
            let angle = choose_agmon(os.spectrum()).unwrap();
            let e = eta(&os, angle).unwrap();
            assert_eq!(e.m_minus, 0);
            assert_eq!(e.m_plus, 1);
            let x = xi(&os, angle).unwrap();
            assert!((x - c(t.ln(), 0.0)).norm() < 1e-12);
            let g = graded_det(&os, angle).unwrap();
            let predicted = x.exp() * Complex64::from_polar(1.0, -PI * e.value.re);
            assert!((g - predicted).norm() < 1e-12);
            assert!((g - c(t, 0.0)).norm() < 1e-12);
        }
    }

    #[test]
    fn circle_z_two_has_torsion_minus_i() {
        let cw = circle_cw();
        let rep = circle_representation(c(2.0, 0.0)).unwrap();
        let tc = twist(&cw, &rep).unwrap();
        let ch = identity_chirality(tc.dims()).unwrap();
        let os = assemble(&tc, &ch).unwrap();
        assert!((os.b_even()[(0, 0)] - c(0.0, -1.0)).norm() < 1e-14);
        let angle = choose_agmon(os.spectrum()).unwrap();
        let g = graded_det(&os, angle).unwrap();
        assert!((g - c(0.0, -1.0)).norm() < 1e-12);
        let t = refined_torsion(&os, angle, 1, None).unwrap();
        assert_eq!(t.ambiguity, Ambiguity::Exact);
        assert!((t.value - c(0.0, -1.0)).norm() < 1e-12);
    }

    #[test]
    fn non_acyclic_input_is_rejected() {
        let cw = circle_cw();
        let rep = circle_representation(c(1.0, 0.0)).unwrap();
        let tc = twist(&cw, &rep).unwrap();
        let ch = identity_chirality(tc.dims()).unwrap();
        assert!(matches!(
            assemble(&tc, &ch),
            Err(Error::AssumptionViolated {
                which: Assumption::Acyclicity,
                ..
            })
        ));
    }

    #[test]
    fn symmetric_pair_spectrum_gives_eta_one() {
        // Two independent witnesses with opposite signs: spectrum {t, -t}.
        let d = ComplexMatrix::new(2, 2, vec![c(0.0, 1.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -1.0)])
            .unwrap();
        let tc = TwistedComplex::new(vec![2, 2], vec![d]).unwrap();
        let ch = identity_chirality(&[2, 2]).unwrap();
        let os = assemble(&tc, &ch).unwrap();
        let angle = choose_agmon(os.spectrum()).unwrap();
        let e = eta(&os, angle).unwrap();
        assert_eq!((e.m_plus, e.m_minus), (1, 1));
        // exp(-i pi eta) = -1, and the identity still holds.
        let g = graded_det(&os, angle).unwrap();
        let x = xi(&os, angle).unwrap();
        let predicted = x.exp() * Complex64::from_polar(1.0, -PI * e.value.re);
        assert!((g - predicted).norm() < 1e-12);
    }

    #[test]
    fn identity_holds_on_a_random_degree_three_complex() {
        let out = random_chirality_complex(3, &[2, 3, 3, 2], 42).unwrap();
        let os = assemble(&out.complex, &out.chirality).unwrap();
        let angle = choose_agmon(os.spectrum()).unwrap();
        let g = graded_det(&os, angle).unwrap();
        let x = xi(&os, angle).unwrap();
        let e = eta(&os, angle).unwrap();
        let predicted = x.exp() * Complex64::from_polar(1.0, -PI * e.value.re);
        assert!(
            (g - predicted).norm() < 1e-10 * g.norm(),
            "identity residual {:e}",
            (g - predicted).norm() / g.norm()
        );
        // Projector algebra.
        let pp = os.projector_plus();
        let pm = os.projector_minus();
        let idem = pp.mul(pp).unwrap().sub(pp).unwrap().max_abs();
        assert!(idem < 1e-8);
        let comm = os
            .b_even()
            .mul(pp)
            .unwrap()
            .sub(&pp.mul(os.b_even()).unwrap())
            .unwrap()
            .max_abs();
        assert!(comm < 1e-8 * os.b_even().frobenius_norm().max(1.0));
        let sum = pp.mul(pm).unwrap().max_abs();
        assert!(sum < 1e-8);
    }

    #[test]
    fn missing_l_integral_is_an_error_in_dimension_three() {
        let out = random_chirality_complex(3, &[1, 2, 2, 1], 9).unwrap();
        let os = assemble(&out.complex, &out.chirality).unwrap();
        let angle = choose_agmon(os.spectrum()).unwrap();
        assert!(matches!(
            refined_torsion(&os, angle, 1, None),
            Err(Error::MissingLIntegral)
        ));
        let t = refined_torsion(&os, angle, 1, Some(Ratio::new(0, 1))).unwrap();
        assert_eq!(t.ambiguity, Ambiguity::FourthRoots(1));
        let g = graded_det(&os, angle).unwrap();
        assert!((t.value - g).norm() < 1e-14);
        // rank 4 with L = 1/2 rotates by e^{i pi} and is exact.
        let t4 = refined_torsion(&os, angle, 4, Some(Ratio::new(1, 2))).unwrap();
        assert_eq!(t4.ambiguity, Ambiguity::Exact);
        assert!((t4.value + g).norm() < 1e-12);
    }

    #[test]
    fn toy_diagonal_blocks_divide() {
        // B+ = diag(1), B- = diag(2): graded determinant 1/2.
        let sp = Spectrum::from_items(vec![(c(1.0, 0.0), 1)]);
        let sm = Spectrum::from_items(vec![(c(2.0, 0.0), 1)]);
        let theta = -PI / 4.0;
        let zp = branch::zeta_prime_zero(&sp, theta).unwrap();
        let zm = branch::zeta_prime_zero(&sm, theta).unwrap();
        let det = ((-zp) - (-zm)).exp();
        assert!((det - c(0.5, 0.0)).norm() < 1e-14);
    }
}
