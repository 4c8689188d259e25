//! The generate and torsion commands.

use std::path::PathBuf;

use num_rational::Ratio;
use serde::Serialize;

use torsion_core::comb::comb_torsion;
use torsion_core::complexes::{
    identity_chirality, lens_character, lens_cw, random_chirality_complex, twist,
};
use torsion_core::linalg::{choose_agmon, AgmonAngle};
use torsion_core::models::{circle_closed_form, circle_log_graded_det, CircleBundle};
use torsion_core::oddsig::{
    assemble, eta, graded_det, refined_torsion, rs_torsion, xi, Ambiguity, EtaValue, OddSignature,
    TorsionValue,
};

use crate::emit::{pair, parse_complex, parse_ratio, to_json};
use crate::schema::{
    CircleModel, CwModel, ModelFile, RandomModel, RepresentationModel, Resolved,
};
use crate::{CliError, Family, TorsionArgs};

const PI: f64 = std::f64::consts::PI;

pub fn generate(family: Family) -> Result<(String, Option<PathBuf>), CliError> {
    let (model, out) = match family {
        Family::Circle { z, out } => {
            let z = parse_complex(&z)?;
            let model = ModelFile {
                kind: "circle".to_string(),
                circle: Some(CircleModel { z: pair(z) }),
                cw: None,
                random_complex: None,
                representation: None,
                euler: None,
            };
            (model, out)
        }
        Family::Lens {
            p,
            q,
            character,
            out,
        } => {
            let cw = lens_cw(p, q)?;
            let rep = lens_character(p, character)?;
            let model = ModelFile {
                kind: "cw".to_string(),
                circle: None,
                cw: Some(CwModel::from_cw(&cw)),
                random_complex: None,
                representation: Some(RepresentationModel::from_representation(&rep)),
                euler: None,
            };
            (model, out)
        }
        Family::Random {
            top_degree,
            dims,
            seed,
            out,
        } => {
            if dims.len() != top_degree + 1 {
                return Err(CliError::validation(format!(
                    "top degree {top_degree} needs {} dimension entries, got {}",
                    top_degree + 1,
                    dims.len()
                )));
            }
            let model = ModelFile {
                kind: "random_complex".to_string(),
                circle: None,
                cw: None,
                random_complex: Some(RandomModel {
                    top_degree,
                    dims,
                    seed,
                }),
                representation: None,
                euler: None,
            };
            (model, out)
        }
    };
    Ok((format!("{}\n", to_json(&model)?), out))
}

#[derive(Clone, Copy, PartialEq)]
enum Mode {
    Analytic,
    Comb,
    Both,
}

impl Mode {
    fn parse(s: &str) -> Result<Self, CliError> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "comb" => Ok(Mode::Comb),
            "both" => Ok(Mode::Both),
            other => Err(CliError::validation(format!(
                "unknown mode '{other}' (expected analytic, comb, or both)"
            ))),
        }
    }

    fn wants_analytic(self) -> bool {
        self != Mode::Comb
    }

    fn wants_comb(self) -> bool {
        self != Mode::Analytic
    }
}

#[derive(Serialize)]
struct ThetaReport {
    value: f64,
    satisfies_ag1: bool,
    satisfies_ag2: bool,
    margin: f64,
}

#[derive(Serialize)]
struct EtaReport {
    value: [f64; 2],
    m_plus: usize,
    m_minus: usize,
    regularized: bool,
}

#[derive(Serialize)]
struct AnalyticReport {
    torsion: [f64; 2],
    ambiguity: String,
    graded_det: [f64; 2],
    xi: [f64; 2],
    eta: EtaReport,
    rs_torsion: f64,
    /// |graded_det - e^xi e^(-i pi eta)| / |graded_det|.
    identity_residual: f64,
}

#[derive(Serialize)]
struct CombReport {
    torsion: [f64; 2],
    ambiguity: String,
}

#[derive(Serialize)]
struct ContinuumReport {
    log_det: [f64; 2],
    torsion: [f64; 2],
    xi: [f64; 2],
    eta: EtaReport,
    rs_torsion: f64,
}

#[derive(Serialize)]
struct TorsionReport {
    kind: String,
    mode: String,
    top_degree: usize,
    dims: Vec<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    retries: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    theta: Option<ThetaReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    analytic: Option<AnalyticReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    comb: Option<CombReport>,
    #[serde(skip_serializing_if = "Option::is_none")]
    continuum: Option<ContinuumReport>,
    /// |analytic torsion| / |comb torsion| when both were computed.
    #[serde(skip_serializing_if = "Option::is_none")]
    ratio_modulus: Option<f64>,
}

fn ambiguity_label(a: Ambiguity) -> String {
    match a {
        Ambiguity::Exact => "exact".to_string(),
        Ambiguity::Sign => "sign".to_string(),
        Ambiguity::FourthRoots(rank) => format!("fourth-roots:{rank}"),
    }
}

fn eta_report(e: &EtaValue) -> EtaReport {
    EtaReport {
        value: pair(e.value),
        m_plus: e.m_plus,
        m_minus: e.m_minus,
        regularized: e.regularized,
    }
}

fn fold_direction(mut a: f64) -> f64 {
    while a < -PI / 2.0 {
        a += PI;
    }
    while a >= PI / 2.0 {
        a -= PI;
    }
    a
}

fn dist_mod_pi(a: f64, b: f64) -> f64 {
    let mut d = (a - b) % PI;
    if d < 0.0 {
        d += PI;
    }
    d.min(PI - d)
}

/// "auto" delegates to the library's angle search; an explicit value is
/// packaged with honestly computed admissibility flags and margin.
fn resolve_theta(os: &OddSignature, spec: &str) -> Result<AgmonAngle, CliError> {
    if spec == "auto" {
        return Ok(choose_agmon(os.spectrum())?);
    }
    let theta: f64 = spec
        .parse()
        .map_err(|_| CliError::validation(format!("cannot parse angle '{spec}'")))?;
    let dirs: Vec<f64> = os
        .spectrum()
        .items()
        .iter()
        .map(|(z, _)| fold_direction(z.arg()))
        .collect();
    let margin = dirs
        .iter()
        .map(|&d| dist_mod_pi(d, theta))
        .fold(f64::INFINITY, f64::min);
    let ag1 = theta > -PI / 2.0 && theta < 0.0;
    let ag2 = ag1 && dirs.iter().all(|&d| !(-PI / 2.0..=theta).contains(&d));
    Ok(AgmonAngle {
        theta,
        satisfies_ag1: ag1,
        satisfies_ag2: ag2,
        margin,
    })
}

struct AnalyticSide {
    theta: ThetaReport,
    report: AnalyticReport,
    torsion: TorsionValue,
}

fn analytic_side(
    os: &OddSignature,
    args: &TorsionArgs,
) -> Result<AnalyticSide, CliError> {
    let angle = resolve_theta(os, &args.theta)?;
    let l_integral = match &args.l_integral {
        Some(text) => Some(parse_ratio(text)?),
        None => Some(Ratio::from_integer(0)),
    };
    let e = eta(os, angle)?;
    let x = xi(os, angle)?;
    let g = graded_det(os, angle)?;
    let rs = rs_torsion(os, angle)?;
    let torsion = refined_torsion(os, angle, args.rank_e, l_integral)?;
    let predicted = x.exp() * num_complex::Complex64::from_polar(1.0, -PI * e.value.re);
    let report = AnalyticReport {
        torsion: pair(torsion.value),
        ambiguity: ambiguity_label(torsion.ambiguity),
        graded_det: pair(g),
        xi: pair(x),
        eta: eta_report(&e),
        rs_torsion: rs,
        identity_residual: (g - predicted).norm() / g.norm(),
    };
    Ok(AnalyticSide {
        theta: ThetaReport {
            value: angle.theta,
            satisfies_ag1: angle.satisfies_ag1,
            satisfies_ag2: angle.satisfies_ag2,
            margin: angle.margin,
        },
        report,
        torsion,
    })
}

pub fn run(text: &str, args: &TorsionArgs) -> Result<String, CliError> {
    let mode = Mode::parse(&args.mode)?;
    let file = ModelFile::parse(text)?;
    let report = match file.resolve()? {
        Resolved::Cells {
            cw,
            rep,
            euler,
            circle_z,
        } => {
            let comb = if mode.wants_comb() {
                Some(comb_torsion(&cw, &rep, &euler)?)
            } else {
                None
            };
            let tc = twist(&cw, &rep)?;
            let top_degree = tc.top_degree();
            let dims = tc.dims().to_vec();
            let analytic = if mode.wants_analytic() {
                let ch = identity_chirality(tc.dims())?;
                let os = assemble(&tc, &ch)?;
                Some(analytic_side(&os, args)?)
            } else {
                None
            };
            let continuum = match circle_z {
                Some(z) if mode.wants_analytic() => {
                    let cb = CircleBundle::new(z)?;
                    let (det, ce, cx) = circle_closed_form(&cb)?;
                    Some(ContinuumReport {
                        log_det: pair(circle_log_graded_det(&cb)?),
                        torsion: pair(det),
                        xi: pair(cx),
                        eta: eta_report(&ce),
                        rs_torsion: cx.re.exp(),
                    })
                }
                _ => None,
            };
            let ratio_modulus = match (&analytic, &comb) {
                (Some(a), Some(c)) => Some(a.torsion.value.norm() / c.value.norm()),
                _ => None,
            };
            TorsionReport {
                kind: file.kind.clone(),
                mode: args.mode.clone(),
                top_degree,
                dims,
                retries: None,
                theta: analytic.as_ref().map(|a| ThetaReport {
                    value: a.theta.value,
                    satisfies_ag1: a.theta.satisfies_ag1,
                    satisfies_ag2: a.theta.satisfies_ag2,
                    margin: a.theta.margin,
                }),
                analytic: analytic.map(|a| a.report),
                comb: comb.map(|c| CombReport {
                    torsion: pair(c.value),
                    ambiguity: ambiguity_label(c.ambiguity),
                }),
                continuum,
                ratio_modulus,
            }
        }
        Resolved::Random {
            top_degree,
            dims,
            seed,
        } => {
            if mode.wants_comb() {
                return Err(CliError::validation(
                    "combinatorial torsion needs cell data; random models have none",
                ));
            }
            let out = random_chirality_complex(top_degree, &dims, seed)?;
            let os = assemble(&out.complex, &out.chirality)?;
            let side = analytic_side(&os, args)?;
            TorsionReport {
                kind: file.kind.clone(),
                mode: args.mode.clone(),
                top_degree,
                dims,
                retries: Some(out.retries),
                theta: Some(side.theta),
                analytic: Some(side.report),
                comb: None,
                continuum: None,
                ratio_modulus: None,
            }
        }
    };
    Ok(format!("{}\n", to_json(&report)?))
}
