//! Branch-cut logarithms along a ray and admissible-angle selection.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // trait float math: used by the no_std build only
use num_traits::Float;

use super::eigen::Spectrum;
use crate::error::{Assumption, Error};
use crate::Result;

/// Angular distance below which an eigenvalue counts as lying on the cut ray.
pub const ON_CUT_TOL: f64 = 1e-12;

/// A cut angle together with the admissibility facts established for it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AgmonAngle {
    pub theta: f64,
    /// theta lies in (-pi/2, 0).
    pub satisfies_ag1: bool,
    /// No eigenvalue direction falls in the closed solid angles swept from
    /// -pi/2 to theta and from pi/2 to theta + pi.
    pub satisfies_ag2: bool,
    /// Angular distance from theta to the nearest eigenvalue ray (mod pi).
    pub margin: f64,
}

/// log lambda with the argument taken in the open window (theta, theta + 2 pi).
///
/// Errors: zero input; eigenvalue within `ON_CUT_TOL` radians of the cut ray.
pub fn branch_log(lambda: Complex64, theta: f64) -> Result<Complex64> {
    let r = lambda.norm();
    if r == 0.0 {
        return Err(Error::SingularSpectrum);
    }
    let mut a = lambda.arg();
    while a <= theta {
        a += 2.0 * PI;
    }
    while a > theta + 2.0 * PI {
        a -= 2.0 * PI;
    }
    if a - theta < ON_CUT_TOL || theta + 2.0 * PI - a < ON_CUT_TOL {
        return Err(Error::OnCut {
            theta,
            arg: lambda.arg(),
        });
    }
    Ok(Complex64::new(r.ln(), a))
}

/// Derivative at zero of the spectral zeta function for a finite spectrum:
/// zeta'(0) = -sum m(lambda) log_theta lambda. An empty spectrum gives 0.
pub fn zeta_prime_zero(spectrum: &Spectrum, theta: f64) -> Result<Complex64> {
    let mut acc = Complex64::new(0.0, 0.0);
    for (lam, mult) in spectrum.items() {
        acc -= branch_log(*lam, theta)? * (*mult as f64);
    }
    Ok(acc)
}

/// Folds an angle into [-pi/2, pi/2) modulo pi (ray direction).
fn fold_direction(mut a: f64) -> f64 {
    while a < -PI / 2.0 {
        a += PI;
    }
    while a >= PI / 2.0 {
        a -= PI;
    }
    a
}

/// Angular distance between two directions modulo pi.
fn dist_mod_pi(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % PI;
    if d < 0.0 {
        d += PI;
    }
    d.min(PI - d)
}

/// Distance from theta to the nearest direction in a sorted list, mod pi.
fn nearest_direction(sorted: &[f64], theta: f64) -> f64 {
    if sorted.is_empty() {
        return f64::INFINITY;
    }
    let t = fold_direction(theta);
    let pos = sorted.partition_point(|&d| d < t);
    let mut best = f64::INFINITY;
    // Neighbours around the insertion point, plus the circular wrap.
    for idx in [
        pos.wrapping_sub(1),
        pos,
        0,
        sorted.len().wrapping_sub(1),
    ] {
        if idx < sorted.len() {
            best = best.min(dist_mod_pi(t, sorted[idx]));
        }
    }
    best
}

/// Picks a cut angle for the given spectrum, preferring angles that satisfy
/// both admissibility conditions with the largest safety margin.
///
/// The objective on the admissible interval is the minimum of the distance to
/// the nearest eigenvalue ray and the distances to the interval limits; it is
/// piecewise linear, so the maximum is attained at one of finitely many
/// midpoint candidates. If no admissible angle clears a tiny margin, the
/// fallback maximizes the eigenray distance alone over (-pi, 0) and reports
/// the failed conditions through the flags.
pub fn choose_agmon(spectrum: &Spectrum) -> Result<AgmonAngle> {
    if spectrum.is_empty() {
        return Err(Error::EmptySpectrum);
    }
    if spectrum.min_modulus() == 0.0 {
        return Err(Error::AssumptionViolated {
            which: Assumption::Bijectivity,
            sigma_min: Some(0.0),
        });
    }
    let mut dirs: Vec<f64> = spectrum
        .items()
        .iter()
        .map(|(z, _)| fold_direction(z.arg()))
        .collect();
    dirs.sort_by(|a, b| a.partial_cmp(b).expect("finite directions"));
    dirs.dedup_by(|a, b| (*a - *b).abs() < 1e-15);

    // Admissible interval: (-pi/2, u) with u the smallest eigen-direction
    // inside (-pi/2, 0), or 0 when none intrudes.
    let mut u = 0.0f64;
    for &d in &dirs {
        if d > -PI / 2.0 && d < 0.0 {
            u = d; // dirs sorted ascending: first hit is the minimum
            break;
        }
    }
    let lo = -PI / 2.0;

    let objective = |theta: f64| -> f64 {
        nearest_direction(&dirs, theta)
            .min(theta - lo)
            .min(u - theta)
    };

    // Candidate maximizers: interval midpoint, eigenray/limit balance points,
    // and midpoints of circularly adjacent eigen-directions.
    let mut candidates: Vec<f64> = Vec::new();
    candidates.push((lo + u) / 2.0);
    for &d in &dirs {
        candidates.push((d + lo) / 2.0);
        candidates.push((d + u) / 2.0);
        candidates.push(d - PI / 2.0);
        candidates.push(d + PI / 2.0);
    }
    for w in dirs.windows(2) {
        candidates.push((w[0] + w[1]) / 2.0);
    }
    if dirs.len() >= 2 {
        let first = dirs[0];
        let last = dirs[dirs.len() - 1];
        candidates.push(fold_direction((last - PI + first) / 2.0));
    }

    let mut best: Option<(f64, f64)> = None;
    for &t in &candidates {
        if t <= lo || t >= u {
            continue;
        }
        let g = objective(t);
        match best {
            Some((_, gb)) if g <= gb => {}
            _ => best = Some((t, g)),
        }
    }

    if let Some((theta, g)) = best {
        if g > 1e-12 {
            return Ok(AgmonAngle {
                theta,
                satisfies_ag1: true,
                satisfies_ag2: true,
                margin: nearest_direction(&dirs, theta),
            });
        }
    }

    // Fallback: maximize eigenray distance over (-pi, 0) alone.
    let mut fb: Option<(f64, f64)> = None;
    let mut walls: Vec<f64> = Vec::new();
    for &d in &dirs {
        for cand in [d, d - PI] {
            if cand > -PI && cand < 0.0 {
                walls.push(cand);
            }
        }
    }
    walls.push(-PI);
    walls.push(0.0);
    walls.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
    for w in walls.windows(2) {
        let t = (w[0] + w[1]) / 2.0;
        if t <= -PI || t >= 0.0 {
            continue;
        }
        let g = nearest_direction(&dirs, t);
        match fb {
            Some((_, gb)) if g <= gb => {}
            _ => fb = Some((t, g)),
        }
    }
    let (theta, margin) = fb.ok_or(Error::AssumptionViolated {
        which: Assumption::Bijectivity,
        sigma_min: Some(spectrum.min_modulus()),
    })?;
    if margin <= ON_CUT_TOL {
        return Err(Error::AssumptionViolated {
            which: Assumption::Bijectivity,
            sigma_min: Some(spectrum.min_modulus()),
        });
    }
    Ok(AgmonAngle {
        theta,
        satisfies_ag1: theta > -PI / 2.0 && theta < 0.0,
        satisfies_ag2: false,
        margin,
    })
}
