//! Exactly solvable continuum circle model and family diagnostics.
//!
//! Flat line bundles over the circle have operator spectrum n + w, n over
//! the integers, where the holonomy is z = e^(2 pi i w). Determinant, xi
//! and eta regularize in closed form through the Hurwitz zeta function at
//! s = 0; an independent Euler-Maclaurin evaluator validates the closed
//! forms inside the test suite. The module also carries the Arg-class
//! pairing, truncation-convergence tables, Cauchy-Riemann residual tests
//! and representation-variety sweeps.

use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
use num_rational::Ratio;
#[allow(unused_imports)] // trait float math: used by the no_std build only
use num_traits::Float;

use crate::comb::{comb_torsion, EulerStructure};
use crate::complexes::{circle_cw, circle_representation, Representation};
use crate::error::{Assumption, Error};
use crate::linalg::{Lu, Spectrum};
use crate::oddsig::EtaValue;
use crate::Result;

/// Grid points whose spectral gap is below this are flagged, not computed.
pub const ADMISSIBILITY_GAP: f64 = 1e-6;

/// Below this gap the model counts as non-acyclic outright.
const ACYCLICITY_GAP: f64 = 1e-12;

const LN_2PI: f64 = 1.8378770664093454835606594728112353;

// Lanczos approximation, g = 7, 9 coefficients.
const LANCZOS: [f64; 9] = [
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
];

// Bernoulli numbers B_2 .. B_12.
const BERNOULLI: [f64; 6] = [
    1.0 / 6.0,
    -1.0 / 30.0,
    1.0 / 42.0,
    -1.0 / 30.0,
    5.0 / 66.0,
    -691.0 / 2730.0,
];

/// Principal-branch log Gamma for Re z > 0, extended left by the
/// recurrence log Gamma(z) = log Gamma(z + 1) - log z.
pub fn log_gamma(z: Complex64) -> Complex64 {
    let mut shift = Complex64::new(0.0, 0.0);
    let mut z = z;
    while z.re < 0.5 {
        shift -= z.ln();
        z += Complex64::new(1.0, 0.0);
    }
    let zm1 = z - Complex64::new(1.0, 0.0);
    let mut x = Complex64::new(LANCZOS[0], 0.0);
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        x += Complex64::new(c, 0.0) / (zm1 + Complex64::new(i as f64, 0.0));
    }
    let t = zm1 + Complex64::new(7.5, 0.0);
    shift + Complex64::new(0.5 * LN_2PI, 0.0)
        + (zm1 + Complex64::new(0.5, 0.0)) * t.ln()
        - t
        + x.ln()
}

/// Hurwitz zeta at s = 0: 1/2 - x.
pub fn zeta0(x: Complex64) -> Complex64 {
    Complex64::new(0.5, 0.0) - x
}

/// s-derivative of the Hurwitz zeta at s = 0: log Gamma(x) - (1/2) log 2 pi.
pub fn zeta_prime0(x: Complex64) -> Complex64 {
    log_gamma(x) - Complex64::new(0.5 * LN_2PI, 0.0)
}

/// Euler-Maclaurin evaluation of the Hurwitz zeta at s = 0. Summed term by
/// term (all but the -x part cancels algebraically); kept as an arithmetic
/// path independent of `zeta0`.
pub fn em_zeta0(x: Complex64) -> Complex64 {
    let m = 30usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for _ in 0..m {
        sum += Complex64::new(1.0, 0.0);
    }
    sum - (Complex64::new(m as f64, 0.0) + x) + Complex64::new(0.5, 0.0)
}

/// Euler-Maclaurin evaluation of the s-derivative of the Hurwitz zeta at
/// s = 0, for Re x > 0. Thirty explicit terms plus Bernoulli corrections
/// through B_12 leave a remainder far below 1e-12; this is the oracle the
/// tests hold `zeta_prime0` against.
pub fn em_zeta_prime0(x: Complex64) -> Complex64 {
    let m = 30usize;
    let mut sum = Complex64::new(0.0, 0.0);
    for k in 0..m {
        sum += (Complex64::new(k as f64, 0.0) + x).ln();
    }
    let p = Complex64::new(m as f64, 0.0) + x;
    let mut value = -sum + p * p.ln() - p - 0.5 * p.ln();
    let p2 = p * p;
    let mut pw = p;
    for (j, &b) in BERNOULLI.iter().enumerate() {
        let two_j = 2.0 * (j as f64 + 1.0);
        value += Complex64::new(b / (two_j * (two_j - 1.0)), 0.0) / pw;
        pw *= p2;
    }
    value
}

/// Stirling form of zeta'_H(0, x) truncated after the B_2 term; remainder
/// ~ 1/(360 x^3). This deliberately coarse tail makes truncation errors a
/// measurable, decreasing sequence instead of rounding noise.
fn stirling_tail(x: Complex64) -> Complex64 {
    (x - Complex64::new(0.5, 0.0)) * x.ln() - x + Complex64::new(1.0, 0.0) / (12.0 * x)
}

/// Flat line bundle over the circle with holonomy z = e^(2 pi i (a + ib)),
/// a in [0, 1), b = -log|z| / (2 pi).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CircleBundle {
    z: Complex64,
    a: f64,
    b: f64,
}

impl CircleBundle {
    pub fn new(z: Complex64) -> Result<Self> {
        if !z.re.is_finite() || !z.im.is_finite() {
            return Err(Error::NonFinite {
                context: "circle holonomy",
            });
        }
        if z.norm() == 0.0 {
            return Err(Error::InvalidCwData {
                reason: "circle holonomy must be nonzero".to_string(),
            });
        }
        let mut a = z.arg() / (2.0 * PI);
        if a < 0.0 {
            a += 1.0;
        }
        if a >= 1.0 {
            a = 0.0;
        }
        let b = -z.norm().ln() / (2.0 * PI);
        Ok(Self { z, a, b })
    }

    pub fn holonomy(&self) -> Complex64 {
        self.z
    }

    /// w = a + ib with z = e^(2 pi i w).
    pub fn exponent(&self) -> Complex64 {
        Complex64::new(self.a, self.b)
    }

    /// Distance from the spectrum {n + w} to zero: min(|w|, |w - 1|).
    pub fn spectral_gap(&self) -> f64 {
        let w = self.exponent();
        w.norm().min((w - Complex64::new(1.0, 0.0)).norm())
    }

    /// Acyclic iff z != 1, i.e. no zero mode.
    pub fn is_acyclic(&self) -> bool {
        self.spectral_gap() > ACYCLICITY_GAP
    }
}

fn zero_mode_error(cb: &CircleBundle) -> Error {
    Error::AssumptionViolated {
        which: Assumption::Bijectivity,
        sigma_min: Some(cb.spectral_gap()),
    }
}

/// Exact eigenvalues n + w of the truncated circle operator, |n| <= modes.
/// Fourier modes are exact eigenvectors, so there is no discretization
/// error in the eigenvalues themselves.
pub fn circle_spectrum_truncated(cb: &CircleBundle, modes: usize) -> Result<Spectrum> {
    if modes == 0 {
        return Err(Error::Dimension {
            context: "truncation needs at least one mode",
        });
    }
    if !cb.is_acyclic() {
        return Err(zero_mode_error(cb));
    }
    let w = cb.exponent();
    let items = (-(modes as i64)..=modes as i64)
        .map(|n| (Complex64::new(n as f64, 0.0) + w, 1usize))
        .collect();
    Ok(Spectrum::from_items(items))
}

/// Log of the regularized graded determinant of the full circle operator:
/// log 2 pi - log Gamma(w) - log Gamma(1 - w) + i pi (w - 1/2), whose
/// exponential is 1 - z. The branch places eigenvalues n + w, n >= 0, on
/// the principal fan and -(m - w), m >= 1, at log(m - w) + i pi.
pub fn circle_log_graded_det(cb: &CircleBundle) -> Result<Complex64> {
    if !cb.is_acyclic() {
        return Err(zero_mode_error(cb));
    }
    let w = cb.exponent();
    let one = Complex64::new(1.0, 0.0);
    Ok(Complex64::new(LN_2PI, 0.0) - log_gamma(w) - log_gamma(one - w)
        + Complex64::new(0.0, PI) * (w - Complex64::new(0.5, 0.0)))
}

/// Regularized graded determinant, eta and xi of the full circle operator.
///
/// eta is reported as (1 - 2a) + ib: the real part is the spectral
/// asymmetry zeta_H(0, a) - zeta_H(0, 1 - a) of the unitarized spectrum
/// and the imaginary part is the uniform displacement b of the spectrum
/// off the real axis, so that pi Im eta equals the Arg-class pairing
/// -(1/2) log|z|. On the unitary arc e^(Re xi) = |1 - z|.
pub fn circle_closed_form(cb: &CircleBundle) -> Result<(Complex64, EtaValue, Complex64)> {
    let log_det = circle_log_graded_det(cb)?;
    let w = cb.exponent();
    let one = Complex64::new(1.0, 0.0);
    let xi = Complex64::new(LN_2PI, 0.0) - log_gamma(w) - log_gamma(one - w);
    let eta = EtaValue {
        value: Complex64::new(1.0 - 2.0 * cb.a, cb.b),
        m_plus: 0,
        m_minus: 0,
        regularized: true,
    };
    Ok((log_det.exp(), eta, xi))
}

/// One truncation level: 2 modes + 1 eigenvalues, log of the tail-corrected
/// partial product, and its distance from the closed form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationRow {
    pub modes: usize,
    pub log_value: Complex64,
    pub error: f64,
}

/// Compensated complex accumulator.
struct Kahan {
    sum: Complex64,
    c: Complex64,
}

impl Kahan {
    fn new() -> Self {
        Self {
            sum: Complex64::new(0.0, 0.0),
            c: Complex64::new(0.0, 0.0),
        }
    }

    fn add(&mut self, v: Complex64) {
        let y = v - self.c;
        let t = self.sum + y;
        self.c = (t - self.sum) - y;
        self.sum = t;
    }
}

/// Partial spectral sums with the analytic tail correction, compared in the
/// log domain against the closed form, one row per requested mode count.
pub fn truncation_convergence(cb: &CircleBundle, mode_counts: &[usize]) -> Result<Vec<TruncationRow>> {
    let closed = circle_log_graded_det(cb)?;
    let w = cb.exponent();
    let one = Complex64::new(1.0, 0.0);
    let ipi = Complex64::new(0.0, PI);
    let mut rows = Vec::with_capacity(mode_counts.len());
    for &n in mode_counts {
        if n == 0 {
            return Err(Error::Dimension {
                context: "truncation needs at least one mode",
            });
        }
        let mut acc = Kahan::new();
        for k in 0..=n {
            acc.add((Complex64::new(k as f64, 0.0) + w).ln());
        }
        for m in 1..=n {
            acc.add((Complex64::new(m as f64, 0.0) - w).ln() + ipi);
        }
        let log_value = acc.sum
            - stirling_tail(w + Complex64::new(n as f64 + 1.0, 0.0))
            - stirling_tail(one - w + Complex64::new(n as f64, 0.0))
            + ipi * (w - Complex64::new(0.5 + n as f64, 0.0));
        rows.push(TruncationRow {
            modes: n,
            log_value,
            error: (log_value - closed).norm(),
        });
    }
    Ok(rows)
}

/// Per-generator values Arg(g) = log(det Mon(g)) / (2 pi i) with the real
/// part normalized into [0, 1); exp(2 pi i Arg(g)) recovers det Mon(g).
#[derive(Debug, Clone, PartialEq)]
pub struct ArgClass {
    values: Vec<Complex64>,
}

impl ArgClass {
    pub fn values(&self) -> &[Complex64] {
        &self.values
    }
}

pub fn arg_class(rep: &Representation) -> Result<ArgClass> {
    let mut values = Vec::with_capacity(rep.images().len());
    for img in rep.images() {
        let det = Lu::decompose(img)?.det();
        let mut re = det.arg() / (2.0 * PI);
        if re < 0.0 {
            re += 1.0;
        }
        values.push(Complex64::new(re, -det.norm().ln() / (2.0 * PI)));
    }
    Ok(ArgClass { values })
}

/// pi * sum over generators of coeff * Im Arg(g), the cup-product pairing
/// against user-supplied L-class coefficients (one rational per generator;
/// 1 for the circle's degree-zero class, 0 in dimension three). Real by
/// construction, returned as a complex number with zero imaginary part.
pub fn arg_pairing(rep: &Representation, coeffs: &[Ratio<i64>]) -> Result<Complex64> {
    if coeffs.len() != rep.images().len() {
        return Err(Error::Dimension {
            context: "one L-class coefficient per generator required",
        });
    }
    let ac = arg_class(rep)?;
    let mut sum = 0.0;
    for (v, c) in ac.values().iter().zip(coeffs) {
        sum += (*c.numer() as f64 / *c.denom() as f64) * v.im;
    }
    Ok(Complex64::new(PI * sum, 0.0))
}

/// Central-difference estimates of df/dzbar over the interior nodes of a
/// square-step grid, with summary max and root-mean-square norms.
#[derive(Debug, Clone, PartialEq)]
pub struct CrResidual {
    /// (rows - 2) x (cols - 2) interior residuals.
    pub field: Vec<Vec<Complex64>>,
    pub max_norm: f64,
    pub l2_norm: f64,
}

/// `samples[r][c] = f(z0 + c*h + i*r*h)`: columns step the real direction,
/// rows the imaginary one. Holomorphic samples decay as O(h^2).
pub fn cr_residual(samples: &[Vec<Complex64>], h: f64) -> Result<CrResidual> {
    if !(h > 0.0) || !h.is_finite() {
        return Err(Error::InvalidGrid {
            reason: "step must be positive and finite".to_string(),
        });
    }
    let rows = samples.len();
    if rows < 3 {
        return Err(Error::InvalidGrid {
            reason: "grid needs at least 3 rows".to_string(),
        });
    }
    let cols = samples[0].len();
    if cols < 3 || samples.iter().any(|row| row.len() != cols) {
        return Err(Error::InvalidGrid {
            reason: "grid needs at least 3 equal-length columns".to_string(),
        });
    }
    for row in samples {
        for v in row {
            if !v.re.is_finite() || !v.im.is_finite() {
                return Err(Error::NonFinite {
                    context: "grid samples",
                });
            }
        }
    }
    let mut field = Vec::with_capacity(rows - 2);
    let mut max_norm = 0.0f64;
    let mut sq_sum = 0.0f64;
    for r in 1..rows - 1 {
        let mut line = Vec::with_capacity(cols - 2);
        for c in 1..cols - 1 {
            let fx = (samples[r][c + 1] - samples[r][c - 1]) / (2.0 * h);
            let fy = (samples[r + 1][c] - samples[r - 1][c]) / (2.0 * h);
            let res = 0.5 * (fx + Complex64::new(0.0, 1.0) * fy);
            max_norm = max_norm.max(res.norm());
            sq_sum += res.norm_sqr();
            line.push(res);
        }
        field.push(line);
    }
    let count = ((rows - 2) * (cols - 2)) as f64;
    Ok(CrResidual {
        field,
        max_norm,
        l2_norm: (sq_sum / count).sqrt(),
    })
}

/// One sweep grid point. Inadmissible or failed points keep their values
/// unset; numbers are never fabricated.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepPoint {
    pub param: Complex64,
    pub admissible: bool,
    /// Continuum graded determinant (the analytic torsion of the family).
    pub analytic: Option<Complex64>,
    /// Combinatorial torsion of the circle CW model at the same holonomy.
    pub comb: Option<Complex64>,
    /// e^(Re xi), the positive-real torsion.
    pub rs: Option<f64>,
    pub eta: Option<Complex64>,
    pub xi: Option<Complex64>,
    /// |analytic| / |comb|.
    pub ratio_modulus: Option<f64>,
    pub error: Option<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub points: Vec<SweepPoint>,
}

/// Geometric radii r_lo .. r_hi crossed with equally spaced angles
/// 2 pi j / angular, radial-major order.
pub fn annulus_grid(
    r_lo: f64,
    r_hi: f64,
    radial: usize,
    angular: usize,
) -> Result<Vec<Complex64>> {
    if !(r_lo > 0.0) || !(r_hi >= r_lo) || !r_hi.is_finite() {
        return Err(Error::InvalidGrid {
            reason: "radii must satisfy 0 < r_lo <= r_hi".to_string(),
        });
    }
    if radial == 0 || angular == 0 {
        return Err(Error::InvalidGrid {
            reason: "grid must have at least one radius and one angle".to_string(),
        });
    }
    let mut grid = Vec::with_capacity(radial * angular);
    for k in 0..radial {
        let t = if radial == 1 {
            0.0
        } else {
            k as f64 / (radial - 1) as f64
        };
        let r = r_lo * (r_hi / r_lo).powf(t);
        for j in 0..angular {
            let phi = 2.0 * PI * j as f64 / angular as f64;
            grid.push(Complex64::from_polar(r, phi));
        }
    }
    Ok(grid)
}

/// Evaluates one grid point; pure, so sweeps parallelize over points.
pub fn sweep_point(z: Complex64) -> SweepPoint {
    let mut point = SweepPoint {
        param: z,
        admissible: false,
        analytic: None,
        comb: None,
        rs: None,
        eta: None,
        xi: None,
        ratio_modulus: None,
        error: None,
    };
    let cb = match CircleBundle::new(z) {
        Ok(cb) => cb,
        Err(e) => {
            point.error = Some(e.to_string());
            return point;
        }
    };
    if cb.spectral_gap() < ADMISSIBILITY_GAP {
        return point;
    }
    point.admissible = true;
    let filled = (|| -> Result<()> {
        let (det, eta, xi) = circle_closed_form(&cb)?;
        let cw = circle_cw();
        let rep = circle_representation(z)?;
        let tau = comb_torsion(&cw, &rep, &EulerStructure::trivial(&cw))?.value;
        point.analytic = Some(det);
        point.comb = Some(tau);
        point.rs = Some(xi.re.exp());
        point.eta = Some(eta.value);
        point.xi = Some(xi);
        point.ratio_modulus = Some(det.norm() / tau.norm());
        Ok(())
    })();
    if let Err(e) = filled {
        point.error = Some(e.to_string());
    }
    point
}

/// Full sweep in deterministic grid order.
pub fn sweep_circle(grid: &[Complex64]) -> SweepTable {
    SweepTable {
        points: grid.iter().map(|&z| sweep_point(z)).collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn unitary(a: f64) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * a)
    }

    #[test]
    fn log_gamma_satisfies_classical_identities() {
        // Gamma(1/2) = sqrt(pi); Gamma(1) = Gamma(2) = 1.
        assert!((log_gamma(c(0.5, 0.0)).re - 0.5 * PI.ln()).abs() < 1e-13);
        assert!(log_gamma(c(1.0, 0.0)).norm() < 1e-13);
        assert!(log_gamma(c(2.0, 0.0)).norm() < 1e-13);
        // Reflection: Gamma(x) Gamma(1-x) = pi / sin(pi x), left half via
        // the recurrence.
        for x in [c(0.3, 0.0), c(0.17, 0.02), c(0.44, -0.05)] {
            let lhs = (log_gamma(x) + log_gamma(c(1.0, 0.0) - x)).exp();
            let rhs = c(PI, 0.0) / (x * PI).sin();
            assert!((lhs - rhs).norm() < 1e-12 * rhs.norm());
        }
    }

    #[test]
    fn closed_forms_match_euler_maclaurin_oracle() {
        for k in 1..=9 {
            let a = c(k as f64 / 10.0, 0.0);
            assert!((zeta0(a) - em_zeta0(a)).norm() < 1e-13);
            assert!((zeta_prime0(a) - em_zeta_prime0(a)).norm() < 1e-10);
        }
        // Complex second argument, as used off the unitary arc.
        let cb = CircleBundle::new(1.2 * unitary(0.3)).unwrap();
        let w = cb.exponent();
        for x in [w, c(1.0, 0.0) - w] {
            assert!((zeta_prime0(x) - em_zeta_prime0(x)).norm() < 1e-10);
        }
    }

    #[test]
    fn truncated_spectrum_lists_shifted_integers() {
        let cb = CircleBundle::new(c(-1.0, 0.0)).unwrap();
        let s = circle_spectrum_truncated(&cb, 2).unwrap();
        let mut vals: Vec<f64> = s.items().iter().map(|(z, _)| z.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let expected = [-1.5, -0.5, 0.5, 1.5, 2.5];
        for (v, e) in vals.iter().zip(expected) {
            assert!((v - e).abs() < 1e-14);
        }

        let cb = CircleBundle::new(unitary(0.3)).unwrap();
        let s = circle_spectrum_truncated(&cb, 1).unwrap();
        let mut vals: Vec<f64> = s.items().iter().map(|(z, _)| z.re).collect();
        vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for (v, e) in vals.iter().zip([-0.7, 0.3, 1.3]) {
            assert!((v - e).abs() < 1e-14);
        }

        // b != 0 shifts every eigenvalue by ib uniformly.
        let cb = CircleBundle::new(1.2 * unitary(0.3)).unwrap();
        let b = cb.exponent().im;
        assert!(b < 0.0);
        for (z, _) in circle_spectrum_truncated(&cb, 3).unwrap().items() {
            assert!((z.im - b).abs() < 1e-14);
        }

        let one = CircleBundle::new(c(1.0, 0.0)).unwrap();
        assert!(matches!(
            circle_spectrum_truncated(&one, 5),
            Err(Error::AssumptionViolated { .. })
        ));
        assert!(circle_spectrum_truncated(&cb, 0).is_err());
    }

    #[test]
    fn closed_form_values_on_witness_points() {
        // z = -1: determinant 2, eta 0, e^(Re xi) = 2.
        let cb = CircleBundle::new(c(-1.0, 0.0)).unwrap();
        let (det, eta, xi) = circle_closed_form(&cb).unwrap();
        assert!((det - c(2.0, 0.0)).norm() < 1e-12);
        assert!(eta.value.norm() < 1e-12);
        assert!(eta.regularized);
        assert!((xi.re.exp() - 2.0).abs() < 1e-12);

        // z = e^(2 pi i / 3): eta = 1/3; determinant 1 - z everywhere.
        let z = unitary(1.0 / 3.0);
        let cb = CircleBundle::new(z).unwrap();
        let (det, eta, _) = circle_closed_form(&cb).unwrap();
        assert!((eta.value - c(1.0 / 3.0, 0.0)).norm() < 1e-12);
        assert!((det - (c(1.0, 0.0) - z)).norm() < 1e-12);

        // Off the arc the determinant is still 1 - z and Im eta = b.
        let z = 1.2 * unitary(0.3);
        let cb = CircleBundle::new(z).unwrap();
        let (det, eta, _) = circle_closed_form(&cb).unwrap();
        assert!((det - (c(1.0, 0.0) - z)).norm() < 1e-12);
        assert!((PI * eta.value.im - (-0.5 * z.norm().ln())).abs() < 1e-12);

        // Positive real holonomy (a = 0, w purely imaginary): same formula.
        for z in [c(2.0, 0.0), c(0.5, 0.0)] {
            let cb = CircleBundle::new(z).unwrap();
            let (det, _, _) = circle_closed_form(&cb).unwrap();
            assert!((det - (c(1.0, 0.0) - z)).norm() < 1e-12);
        }
    }

    #[test]
    fn truncation_errors_decrease_and_propagate_zero_mode() {
        for z in [c(-1.0, 0.0), unitary(0.3), 1.2 * unitary(0.3)] {
            let cb = CircleBundle::new(z).unwrap();
            let rows = truncation_convergence(&cb, &[10, 100, 1000]).unwrap();
            assert!(rows[0].error > rows[1].error);
            assert!(rows[1].error > rows[2].error);
            assert!(rows[2].error < 1e-6);
        }
        let one = CircleBundle::new(c(1.0, 0.0)).unwrap();
        assert!(truncation_convergence(&one, &[10]).is_err());
    }

    #[test]
    fn arg_pairing_measures_non_unitarity() {
        // z = 2: pi * Im Arg = -(1/2) log 2.
        let rep = circle_representation(c(2.0, 0.0)).unwrap();
        let p = arg_pairing(&rep, &[Ratio::new(1, 1)]).unwrap();
        assert!((p.re - (-0.5 * 2.0f64.ln())).abs() < 1e-12);
        assert!(p.im == 0.0);

        // Unitary holonomy pairs to zero; zero coefficient pairs to zero.
        let u = circle_representation(unitary(0.37)).unwrap();
        assert!(arg_pairing(&u, &[Ratio::new(1, 1)]).unwrap().norm() < 1e-12);
        let lens = crate::complexes::lens_character(5, 2).unwrap();
        assert!(arg_pairing(&lens, &[Ratio::new(0, 1)]).unwrap().norm() == 0.0);

        // exp(2 pi i Arg) recovers det Mon; Re Arg lands in [0, 1).
        let ac = arg_class(&rep).unwrap();
        let v = ac.values()[0];
        assert!((0.0..1.0).contains(&v.re));
        let back = (Complex64::new(0.0, 2.0 * PI) * v).exp();
        assert!((back - c(2.0, 0.0)).norm() < 1e-10);

        assert!(arg_pairing(&rep, &[]).is_err());
    }

    #[test]
    fn cr_residual_separates_holomorphic_from_conjugate() {
        let h = 0.01;
        let grid = |f: &dyn Fn(Complex64) -> Complex64| -> Vec<Vec<Complex64>> {
            (0..5)
                .map(|r| {
                    (0..5)
                        .map(|cc| f(c(0.3 + cc as f64 * h, -0.2 + r as f64 * h)))
                        .collect()
                })
                .collect()
        };
        let hol = cr_residual(&grid(&|z| z * z), h).unwrap();
        assert!(hol.max_norm < 1e-11);
        let anti = cr_residual(&grid(&|z| z.conj()), h).unwrap();
        assert!((anti.max_norm - 1.0).abs() < 1e-10);
        assert!((anti.l2_norm - 1.0).abs() < 1e-10);

        assert!(cr_residual(&grid(&|z| z), 0.0).is_err());
        let two_rows = vec![vec![c(0.0, 0.0); 3]; 2];
        assert!(cr_residual(&two_rows, h).is_err());
        let mut bad = grid(&|z| z);
        bad[2][2] = c(f64::NAN, 0.0);
        assert!(matches!(
            cr_residual(&bad, h),
            Err(Error::NonFinite { .. })
        ));
    }

    #[test]
    fn sweep_flags_the_zero_mode_and_computes_the_rest() {
        let grid = annulus_grid(0.8, 1.25, 3, 4).unwrap();
        assert_eq!(grid.len(), 12);
        // Radius row k=1 is exactly 1, angle j=0 is exactly the point 1.
        assert!((grid[4] - c(1.0, 0.0)).norm() < 1e-15);

        let table = sweep_circle(&grid);
        assert_eq!(table.points.len(), 12);
        for (i, p) in table.points.iter().enumerate() {
            if i == 4 {
                assert!(!p.admissible);
                assert!(p.analytic.is_none() && p.error.is_none());
            } else {
                assert!(p.admissible, "point {i} should be admissible");
                let t = p.analytic.unwrap();
                assert!(t.norm() > 0.0);
                assert!((t - (c(1.0, 0.0) - p.param)).norm() < 1e-10);
                assert!((p.ratio_modulus.unwrap() - 1.0).abs() < 1e-10);
                assert!(p.error.is_none());
            }
        }

        assert!(annulus_grid(0.0, 1.0, 2, 2).is_err());
        assert!(annulus_grid(1.0, 2.0, 0, 2).is_err());
    }
}
