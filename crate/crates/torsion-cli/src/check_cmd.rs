//! Randomized invariant-checking suites.

use std::fmt::Write as _;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use torsion_core::complexes::{identity_chirality, random_chirality_complex, TwistedComplex};
use torsion_core::linalg::{choose_agmon, null_space, qr, AgmonAngle, ComplexMatrix};
use torsion_core::oddsig::{assemble, eta, graded_det, xi, OddSignature};

use crate::{CheckArgs, CliError};

const PI: f64 = std::f64::consts::PI;

/// Alternating population of top degree 1 and 3 shapes, deterministic in the
/// suite seed.
fn shapes(seed: u64, trials: usize) -> Vec<(usize, Vec<usize>, u64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..trials as u64)
        .map(|i| {
            if i % 2 == 0 {
                let m = rng.gen_range(2..=12usize);
                (1usize, vec![m, m], seed.wrapping_mul(1000).wrapping_add(i))
            } else {
                let a = rng.gen_range(1..=5usize);
                let b = rng.gen_range(a..=a + 5);
                (
                    3usize,
                    vec![a, b, b, a],
                    seed.wrapping_mul(1000).wrapping_add(i),
                )
            }
        })
        .collect()
}

fn identity_residual(os: &OddSignature, angle: AgmonAngle) -> Result<f64, CliError> {
    let g = graded_det(os, angle)?;
    let x = xi(os, angle)?;
    let e = eta(os, angle)?;
    let predicted = x.exp() * Complex64::from_polar(1.0, -PI * e.value.re);
    Ok((g - predicted).norm() / g.norm())
}

/// Midpoints of the three widest spectrum-free wedges, as in the library's
/// own acceptance gate: genuinely different cut angles.
fn three_angles(os: &OddSignature) -> Vec<AgmonAngle> {
    let mut dirs: Vec<f64> = os
        .spectrum()
        .items()
        .iter()
        .map(|(z, _)| {
            let mut d = z.arg();
            while d >= 0.0 {
                d -= PI;
            }
            while d < -PI {
                d += PI;
            }
            d
        })
        .collect();
    dirs.sort_by(|a, b| a.partial_cmp(b).unwrap());
    dirs.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
    let mut gaps: Vec<(f64, f64)> = Vec::new();
    for i in 0..dirs.len() {
        let lo = dirs[i];
        let hi = if i + 1 < dirs.len() {
            dirs[i + 1]
        } else {
            dirs[0] + PI
        };
        if hi - lo > 1e-9 {
            gaps.push((hi - lo, lo + (hi - lo) / 2.0));
        }
    }
    gaps.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut picked: Vec<(f64, f64)> = gaps.iter().take(3).map(|&(w, m)| (m, w / 2.0)).collect();
    while picked.len() < 3 {
        let (mid, margin) = picked[0];
        let k = picked.len() as f64;
        picked.push((mid + margin / (2.0 * k), margin / (2.0 * k)));
    }
    picked
        .into_iter()
        .map(|(mut theta, margin)| {
            while theta >= 0.0 {
                theta -= PI;
            }
            while theta < -PI {
                theta += PI;
            }
            AgmonAngle {
                theta,
                satisfies_ag1: true,
                satisfies_ag2: true,
                margin,
            }
        })
        .collect()
}

fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.gen::<f64>() * 2.0 - 1.0, rng.gen::<f64>() * 2.0 - 1.0)
    })
}

fn random_unitary(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    qr(&random_matrix(rng, n, n), false).q
}

/// Hermitian with eigenvalue magnitudes in [0.5, 3], far from degeneracy by
/// construction so the residuals measure the formulas, not the conditioning
/// of an unlucky draw.
fn hermitian(rng: &mut ChaCha8Rng, n: usize) -> ComplexMatrix {
    let q = random_unitary(rng, n);
    let mut d = ComplexMatrix::zeros(n, n);
    for i in 0..n {
        let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
        d[(i, i)] = Complex64::new(sign * (0.5 + 2.5 * rng.gen::<f64>()), 0.0);
    }
    q.mul(&d).unwrap().mul(&q.adjoint()).unwrap()
}

/// rows x cols with singular values in [0.5, 2].
fn well_conditioned(rng: &mut ChaCha8Rng, rows: usize, cols: usize) -> ComplexMatrix {
    let u = random_unitary(rng, rows).block(0, 0, rows, cols);
    let v = random_unitary(rng, cols);
    let mut s = ComplexMatrix::zeros(cols, cols);
    for i in 0..cols {
        s[(i, i)] = Complex64::new(0.5 + 1.5 * rng.gen::<f64>(), 0.0);
    }
    u.mul(&s).unwrap().mul(&v.adjoint()).unwrap()
}

/// Self-adjoint witness with dims (m0, m1, m1, m0) and identity chirality;
/// the even operator is [[0, X^H], [X, U S U^H]], Hermitian by construction.
fn self_adjoint_witness(
    rng: &mut ChaCha8Rng,
    m0: usize,
    m1: usize,
) -> Option<TwistedComplex> {
    let x = well_conditioned(rng, m1, m0);
    let u = null_space(&x.adjoint(), 1e-10).ok()?.basis;
    let s = hermitian(rng, m1 - m0);
    let d1 = u.mul(&s).ok()?.mul(&u.adjoint()).ok()?;
    let d2 = x.adjoint().scale(Complex64::new(-1.0, 0.0));
    TwistedComplex::new(vec![m0, m1, m1, m0], vec![x, d1, d2]).ok()
}

pub fn run(args: &CheckArgs) -> Result<(String, bool), CliError> {
    match args.suite.as_str() {
        "identity" => identity_suite(args),
        "angle-independence" => angle_suite(args),
        "hermitian" => hermitian_suite(args),
        other => Err(CliError::validation(format!(
            "unknown suite '{other}' (expected identity, angle-independence, or hermitian)"
        ))),
    }
}

fn identity_suite(args: &CheckArgs) -> Result<(String, bool), CliError> {
    let mut passes = 0usize;
    let mut worst = 0.0f64;
    for (n, dims, seed) in shapes(args.seed, args.trials) {
        let out = random_chirality_complex(n, &dims, seed)?;
        let os = assemble(&out.complex, &out.chirality)?;
        let angle = choose_agmon(os.spectrum())?;
        let res = identity_residual(&os, angle)?;
        worst = worst.max(res);
        if res < args.tolerance {
            passes += 1;
        }
    }
    let ok = passes == args.trials;
    let mut text = String::new();
    writeln!(
        text,
        "identity: {passes}/{} pass, worst residual {worst:.2e}, tolerance {:.1e}",
        args.trials, args.tolerance
    )
    .expect("write to string");
    Ok((text, ok))
}

fn angle_suite(args: &CheckArgs) -> Result<(String, bool), CliError> {
    let mut passes = 0usize;
    let mut worst = 0.0f64;
    for (n, dims, seed) in shapes(args.seed, args.trials) {
        let out = random_chirality_complex(n, &dims, seed)?;
        let os = assemble(&out.complex, &out.chirality)?;
        let angles = three_angles(&os);
        let dets: Vec<Complex64> = angles
            .iter()
            .map(|&a| graded_det(&os, a).map_err(CliError::from))
            .collect::<Result<_, _>>()?;
        let scale = dets[0].norm();
        let mut dev = 0.0f64;
        for i in 0..dets.len() {
            for j in i + 1..dets.len() {
                dev = dev.max((dets[i] - dets[j]).norm() / scale);
            }
        }
        worst = worst.max(dev);
        if dev < args.tolerance {
            passes += 1;
        }
    }
    let ok = passes == args.trials;
    let mut text = String::new();
    writeln!(
        text,
        "angle-independence: {passes}/{} pass, worst deviation {worst:.2e}, tolerance {:.1e}",
        args.trials, args.tolerance
    )
    .expect("write to string");
    Ok((text, ok))
}

fn hermitian_suite(args: &CheckArgs) -> Result<(String, bool), CliError> {
    let mut rng = ChaCha8Rng::seed_from_u64(args.seed);
    let mut passes = 0usize;
    let mut worst_phase = 0.0f64;
    let mut worst_eta = 0.0f64;
    let mut worst_modulus = 0.0f64;
    let mut attempts = 0usize;
    let mut done = 0usize;
    while done < args.trials {
        attempts += 1;
        if attempts > args.trials * 10 {
            return Err(CliError::numerical(
                "self-adjoint witness generation kept degenerating",
            ));
        }
        let os = if done % 2 == 0 {
            let m = rng.gen_range(2..=8usize);
            let d = hermitian(&mut rng, m).scale(Complex64::new(0.0, 1.0));
            let tc = TwistedComplex::new(vec![m, m], vec![d])?;
            let ch = identity_chirality(&[m, m])?;
            assemble(&tc, &ch)?
        } else {
            let m0 = rng.gen_range(1..=3usize);
            let m1 = m0 + rng.gen_range(1..=3usize);
            let Some(tc) = self_adjoint_witness(&mut rng, m0, m1) else {
                continue;
            };
            let ch = identity_chirality(&[m0, m1, m1, m0])?;
            assemble(&tc, &ch)?
        };
        done += 1;
        let angle = choose_agmon(os.spectrum())?;
        let x = xi(&os, angle)?;
        let phase = (x.im / PI - (x.im / PI).round()).abs() * PI;
        let e = eta(&os, angle)?;
        let g = graded_det(&os, angle)?;
        let modulus = (g.norm() - x.re.exp()).abs() / g.norm();
        worst_phase = worst_phase.max(phase);
        worst_eta = worst_eta.max(e.value.im.abs());
        worst_modulus = worst_modulus.max(modulus);
        if phase < 1e-9 && e.value.im.abs() < 1e-12 && modulus < args.tolerance {
            passes += 1;
        }
    }
    let ok = passes == args.trials;
    let mut text = String::new();
    writeln!(
        text,
        "hermitian: {passes}/{} pass, worst xi phase offset {worst_phase:.2e}, \
         worst |Im eta| {worst_eta:.2e}, worst modulus deviation {worst_modulus:.2e}",
        args.trials
    )
    .expect("write to string");
    Ok((text, ok))
}
