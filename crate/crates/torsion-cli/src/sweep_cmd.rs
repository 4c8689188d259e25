//! Annulus and arc sweeps of the circle family, with CSV/JSON output.
//!
//! Grid points are independent, so the work is split across scoped worker
//! threads in contiguous chunks and reassembled in grid order: the output is
//! byte-identical for every --jobs value.

use std::fmt::Write as _;

use num_complex::Complex64;
use serde::Serialize;

use torsion_core::models::{
    annulus_grid, circle_closed_form, cr_residual, sweep_point, CircleBundle, SweepPoint,
};

use crate::emit::{fmt_f64, pair, to_json};
use crate::{CliError, SweepArgs};

const PI: f64 = std::f64::consts::PI;

#[derive(Serialize)]
struct RowReport {
    param: [f64; 2],
    admissible: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comb: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    rs: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    eta: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    xi: Option<[f64; 2]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_modulus: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<String>,
}

#[derive(Serialize, Clone)]
struct Summary {
    points: usize,
    flagged: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_ratio_deviation: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    max_modulus_identity: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    arc_max_deviation: Option<f64>,
    cr_residual_max: f64,
    cr_residual_l2: f64,
}

#[derive(Serialize)]
struct SweepReport {
    points: Vec<RowReport>,
    summary: Summary,
}

fn parallel_sweep(grid: &[Complex64], jobs: usize) -> Vec<SweepPoint> {
    let jobs = jobs.clamp(1, grid.len().max(1));
    let chunk = grid.len().div_ceil(jobs).max(1);
    let mut points = Vec::with_capacity(grid.len());
    std::thread::scope(|scope| {
        let handles: Vec<_> = grid
            .chunks(chunk)
            .map(|slice| scope.spawn(move || slice.iter().map(|&z| sweep_point(z)).collect::<Vec<_>>()))
            .collect();
        for handle in handles {
            points.extend(handle.join().expect("sweep worker panicked"));
        }
    });
    points
}

/// Cauchy-Riemann residual of the continuum torsion in the exponential chart
/// z = e^(2 pi i u), sampled on a 5x5 grid away from the zero-mode locus.
fn torsion_cr_residual() -> Result<(f64, f64), CliError> {
    let u0 = Complex64::new(0.23, -0.07);
    let h = 0.01;
    let mut samples = Vec::with_capacity(5);
    for r in 0..5 {
        let mut row = Vec::with_capacity(5);
        for col in 0..5 {
            let u = u0 + Complex64::new(col as f64 * h, r as f64 * h);
            let z = (Complex64::new(0.0, 2.0 * PI) * u).exp();
            let cb = CircleBundle::new(z)?;
            let (det, _, _) = circle_closed_form(&cb)?;
            row.push(det);
        }
        samples.push(row);
    }
    let res = cr_residual(&samples, h)?;
    Ok((res.max_norm, res.l2_norm))
}

fn flags(p: &SweepPoint) -> String {
    let mut s = if p.admissible { "V".to_string() } else { "!V".to_string() };
    if let Some(err) = &p.error {
        s.push(';');
        s.push_str(&err.replace(',', ";"));
    }
    s
}

fn csv(points: &[SweepPoint]) -> String {
    let opt = |v: Option<f64>| v.map(fmt_f64).unwrap_or_default();
    let mut text = String::from(
        "re(param),im(param),re(T),im(T),T_RS,re(eta),im(eta),|ratio|,flags\n",
    );
    for p in points {
        writeln!(
            text,
            "{},{},{},{},{},{},{},{},{}",
            fmt_f64(p.param.re),
            fmt_f64(p.param.im),
            opt(p.analytic.map(|z| z.re)),
            opt(p.analytic.map(|z| z.im)),
            opt(p.rs),
            opt(p.eta.map(|z| z.re)),
            opt(p.eta.map(|z| z.im)),
            opt(p.ratio_modulus),
            flags(p)
        )
        .expect("write to string");
    }
    text
}

fn summarize(points: &[SweepPoint]) -> Result<Summary, CliError> {
    let flagged = points.iter().filter(|p| !p.admissible).count();
    let fold = |it: &mut dyn Iterator<Item = f64>| it.fold(None, |acc: Option<f64>, v| {
        Some(acc.map_or(v, |a| a.max(v)))
    });
    let max_ratio_deviation = fold(
        &mut points
            .iter()
            .filter_map(|p| p.ratio_modulus)
            .map(|r| (r - 1.0).abs()),
    );
    // Modulus identity: |T| = T_RS * e^(-pi Im eta) at every admissible
    // point; pi Im eta is the pairing value -(1/2) log |z|, so the factor
    // is |z|^(1/2) and degenerates to 1 on the unitary arc.
    let max_modulus_identity = fold(&mut points.iter().filter_map(|p| {
        match (p.analytic, p.rs, p.eta) {
            (Some(t), Some(rs), Some(eta)) => {
                Some((t.norm() - rs * (-PI * eta.im).exp()).abs())
            }
            _ => None,
        }
    }));
    let arc_max_deviation = fold(&mut points.iter().filter_map(|p| {
        let on_arc = (p.param.norm() - 1.0).abs() < 1e-12;
        match (on_arc, p.analytic, p.rs) {
            (true, Some(t), Some(rs)) => Some((t.norm() - rs).abs()),
            _ => None,
        }
    }));
    let (cr_residual_max, cr_residual_l2) = torsion_cr_residual()?;
    Ok(Summary {
        points: points.len(),
        flagged,
        max_ratio_deviation,
        max_modulus_identity,
        arc_max_deviation,
        cr_residual_max,
        cr_residual_l2,
    })
}

fn summary_line(s: &Summary) -> String {
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.2e}")).unwrap_or_else(|| "n/a".to_string());
    format!(
        "summary: {} points, {} flagged, max |ratio-1| {}, max ||T|-T_RS e^(-pi Im eta)| {}, \
         arc max ||T|-T_RS| {}, cr residual max {:.2e} l2 {:.2e}",
        s.points,
        s.flagged,
        opt(s.max_ratio_deviation),
        opt(s.max_modulus_identity),
        opt(s.arc_max_deviation),
        s.cr_residual_max,
        s.cr_residual_l2
    )
}

pub fn run(args: &SweepArgs) -> Result<(), CliError> {
    let grid = if args.arc {
        annulus_grid(1.0, 1.0, 1, args.angular)?
    } else {
        annulus_grid(args.r_lo, args.r_hi, args.radial, args.angular)?
    };
    let points = parallel_sweep(&grid, args.jobs);
    let summary = summarize(&points)?;
    let text = match args.out.as_str() {
        "csv" => csv(&points),
        "json" => {
            let rows: Vec<RowReport> = points
                .iter()
                .map(|p| RowReport {
                    param: pair(p.param),
                    admissible: p.admissible,
                    analytic: p.analytic.map(pair),
                    comb: p.comb.map(pair),
                    rs: p.rs,
                    eta: p.eta.map(pair),
                    xi: p.xi.map(pair),
                    ratio_modulus: p.ratio_modulus,
                    error: p.error.clone(),
                })
                .collect();
            format!(
                "{}\n",
                to_json(&SweepReport {
                    points: rows,
                    summary: summary.clone(),
                })?
            )
        }
        other => {
            return Err(CliError::validation(format!(
                "unknown output format '{other}' (expected csv or json)"
            )))
        }
    };
    crate::write_output(&text, args.file.as_ref())?;
    eprintln!("{}", summary_line(&summary));
    if args.arc {
        if let Some(dev) = summary.arc_max_deviation {
            if dev > 1e-8 {
                return Err(CliError::numerical(format!(
                    "unitary arc modulus deviation {dev:e} exceeds 1e-8"
                )));
            }
        }
    }
    Ok(())
}
