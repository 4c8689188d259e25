//! The model-file JSON schema and its conversion to library objects.
//!
//! A model file carries one of three payloads selected by "kind": an explicit
//! CW complex with a representation, a seeded random-complex recipe, or a
//! circle holonomy. Unknown fields are rejected everywhere so that typos fail
//! loudly instead of silently computing something else.

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use torsion_core::complexes::{
    circle_cw, circle_representation, BoundaryTerm, CWData, GroupPresentation, Representation,
};
use torsion_core::comb::EulerStructure;
use torsion_core::linalg::ComplexMatrix;

use crate::emit::{format_word, pair, parse_word};
use crate::CliError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelFile {
    pub kind: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub circle: Option<CircleModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cw: Option<CwModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub random_complex: Option<RandomModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub representation: Option<RepresentationModel>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub euler: Option<EulerModel>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircleModel {
    /// Holonomy of the flat line bundle, as an (re, im) pair.
    pub z: [f64; 2],
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomModel {
    pub top_degree: usize,
    pub dims: Vec<usize>,
    pub seed: u64,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CwModel {
    /// cells[k] lists the k-cell identifiers, degree 0 first.
    pub cells: Vec<Vec<String>>,
    /// Boundary terms keyed by cell identifier; 0-cells are omitted.
    #[serde(default)]
    pub boundaries: BTreeMap<String, Vec<BoundaryTermModel>>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryTermModel {
    pub cell: String,
    pub coeff: i64,
    /// Group word acting on the term, e.g. "t^-1"; defaults to the identity.
    #[serde(default = "identity_word")]
    pub word: String,
}

fn identity_word() -> String {
    "1".to_string()
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationModel {
    pub generators: Vec<String>,
    /// Relator words, e.g. ["t^5"] for the cyclic group of order 5.
    #[serde(default)]
    pub relations: Vec<String>,
    /// One image matrix per generator.
    pub images: Vec<MatrixModel>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixModel {
    pub rows: usize,
    pub cols: usize,
    /// Row-major (re, im) pairs, rows * cols of them.
    pub data: Vec<[f64; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EulerModel {
    /// Lift word per cell identifier, e.g. {"e1": "t^2"}.
    pub lifts: BTreeMap<String, String>,
    pub orientation_sign: i8,
}

/// A model resolved to library objects, ready for torsion computations.
pub enum Resolved {
    /// Cell data with a representation: circle files resolve here too, so the
    /// finite and combinatorial paths share one code path.
    Cells {
        cw: CWData,
        rep: Representation,
        euler: EulerStructure,
        /// Set when the model is a circle holonomy (enables the continuum
        /// closed-form report section).
        circle_z: Option<Complex64>,
    },
    Random {
        top_degree: usize,
        dims: Vec<usize>,
        seed: u64,
    },
}

impl ModelFile {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text)
            .map_err(|e| CliError::validation(format!("model file rejected: {e}")))
    }

    pub fn resolve(&self) -> Result<Resolved, CliError> {
        match self.kind.as_str() {
            "circle" => {
                let payload = self
                    .circle
                    .as_ref()
                    .ok_or_else(|| CliError::validation("kind \"circle\" needs a \"circle\" payload"))?;
                self.forbid(&[("cw", self.cw.is_some()), ("random_complex", self.random_complex.is_some()), ("representation", self.representation.is_some())])?;
                let z = Complex64::new(payload.z[0], payload.z[1]);
                let cw = circle_cw();
                let rep = circle_representation(z)?;
                let euler = self.euler_for(&cw)?;
                Ok(Resolved::Cells {
                    cw,
                    rep,
                    euler,
                    circle_z: Some(z),
                })
            }
            "cw" => {
                let payload = self
                    .cw
                    .as_ref()
                    .ok_or_else(|| CliError::validation("kind \"cw\" needs a \"cw\" payload"))?;
                let rep_model = self.representation.as_ref().ok_or_else(|| {
                    CliError::validation("kind \"cw\" needs a \"representation\"")
                })?;
                self.forbid(&[("circle", self.circle.is_some()), ("random_complex", self.random_complex.is_some())])?;
                let cw = payload.to_cw()?;
                let rep = rep_model.to_representation()?;
                let euler = self.euler_for(&cw)?;
                Ok(Resolved::Cells {
                    cw,
                    rep,
                    euler,
                    circle_z: None,
                })
            }
            "random_complex" => {
                let payload = self.random_complex.as_ref().ok_or_else(|| {
                    CliError::validation("kind \"random_complex\" needs a \"random_complex\" payload")
                })?;
                self.forbid(&[
                    ("circle", self.circle.is_some()),
                    ("cw", self.cw.is_some()),
                    ("representation", self.representation.is_some()),
                    ("euler", self.euler.is_some()),
                ])?;
                if payload.dims.len() != payload.top_degree + 1 {
                    return Err(CliError::validation(format!(
                        "top degree {} needs {} dimension entries, got {}",
                        payload.top_degree,
                        payload.top_degree + 1,
                        payload.dims.len()
                    )));
                }
                Ok(Resolved::Random {
                    top_degree: payload.top_degree,
                    dims: payload.dims.clone(),
                    seed: payload.seed,
                })
            }
            other => Err(CliError::validation(format!(
                "unknown model kind '{other}' (expected cw, random_complex, or circle)"
            ))),
        }
    }

    fn forbid(&self, fields: &[(&str, bool)]) -> Result<(), CliError> {
        for (name, present) in fields {
            if *present {
                return Err(CliError::validation(format!(
                    "field \"{name}\" does not belong to kind \"{}\"",
                    self.kind
                )));
            }
        }
        Ok(())
    }

    fn euler_for(&self, cw: &CWData) -> Result<EulerStructure, CliError> {
        match &self.euler {
            None => Ok(EulerStructure::trivial(cw)),
            Some(model) => {
                let mut lifts = BTreeMap::new();
                for (cell, word) in &model.lifts {
                    lifts.insert(cell.clone(), parse_word(word)?);
                }
                Ok(EulerStructure::new(cw, lifts, model.orientation_sign)?)
            }
        }
    }
}

impl CwModel {
    fn to_cw(&self) -> Result<CWData, CliError> {
        let mut boundaries: Vec<Vec<Vec<BoundaryTerm>>> = Vec::with_capacity(self.cells.len());
        let mut seen = std::collections::BTreeSet::new();
        for (k, layer) in self.cells.iter().enumerate() {
            let mut per_cell = Vec::with_capacity(layer.len());
            for id in layer {
                seen.insert(id.clone());
                let terms = match self.boundaries.get(id) {
                    None => Vec::new(),
                    Some(list) if k == 0 && !list.is_empty() => {
                        return Err(CliError::validation(format!(
                            "0-cell '{id}' cannot have boundary terms"
                        )));
                    }
                    Some(list) => list
                        .iter()
                        .map(|t| {
                            Ok(BoundaryTerm {
                                cell: t.cell.clone(),
                                element: parse_word(&t.word)?,
                                coeff: t.coeff,
                            })
                        })
                        .collect::<Result<Vec<_>, CliError>>()?,
                };
                per_cell.push(terms);
            }
            boundaries.push(per_cell);
        }
        for id in self.boundaries.keys() {
            if !seen.contains(id) {
                return Err(CliError::validation(format!(
                    "boundary given for unknown cell '{id}'"
                )));
            }
        }
        Ok(CWData::new(self.cells.clone(), boundaries)?)
    }

    pub fn from_cw(cw: &CWData) -> Self {
        let n = cw.top_degree();
        let cells: Vec<Vec<String>> = (0..=n).map(|k| cw.cells(k).to_vec()).collect();
        let mut boundaries = BTreeMap::new();
        for k in 1..=n {
            for (i, id) in cw.cells(k).iter().enumerate() {
                let terms: Vec<BoundaryTermModel> = cw
                    .boundary(k, i)
                    .iter()
                    .map(|t| BoundaryTermModel {
                        cell: t.cell.clone(),
                        coeff: t.coeff,
                        word: format_word(&t.element),
                    })
                    .collect();
                if !terms.is_empty() {
                    boundaries.insert(id.clone(), terms);
                }
            }
        }
        Self { cells, boundaries }
    }
}

impl RepresentationModel {
    fn to_representation(&self) -> Result<Representation, CliError> {
        let relations = self
            .relations
            .iter()
            .map(|w| parse_word(w))
            .collect::<Result<Vec<_>, _>>()?;
        let presentation = GroupPresentation::new(self.generators.clone(), relations)?;
        if self.images.is_empty() {
            return Err(CliError::validation("representation needs at least one image"));
        }
        let dim = self.images[0].rows;
        let images = self
            .images
            .iter()
            .map(MatrixModel::to_matrix)
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Representation::new(presentation, dim, images)?)
    }

    pub fn from_representation(rep: &Representation) -> Self {
        Self {
            generators: rep.presentation().generators().to_vec(),
            relations: rep
                .presentation()
                .relations()
                .iter()
                .map(format_word)
                .collect(),
            images: rep.images().iter().map(MatrixModel::from_matrix).collect(),
        }
    }
}

impl MatrixModel {
    fn to_matrix(&self) -> Result<ComplexMatrix, CliError> {
        if self.data.len() != self.rows * self.cols {
            return Err(CliError::validation(format!(
                "matrix data length {} does not match {}x{}",
                self.data.len(),
                self.rows,
                self.cols
            )));
        }
        let data = self
            .data
            .iter()
            .map(|p| Complex64::new(p[0], p[1]))
            .collect();
        Ok(ComplexMatrix::new(self.rows, self.cols, data)?)
    }

    pub fn from_matrix(m: &ComplexMatrix) -> Self {
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                data.push(pair(m[(i, j)]));
            }
        }
        Self {
            rows: m.rows(),
            cols: m.cols(),
            data,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_fields_are_rejected() {
        let text = r#"{"kind": "circle", "circle": {"z": [2.0, 0.0]}, "extra": 1}"#;
        assert!(ModelFile::parse(text).is_err());
        let nested = r#"{"kind": "circle", "circle": {"z": [2.0, 0.0], "w": 1}}"#;
        assert!(ModelFile::parse(nested).is_err());
    }

    #[test]
    fn kind_and_payload_must_agree() {
        let missing = r#"{"kind": "circle"}"#;
        assert!(ModelFile::parse(missing).unwrap().resolve().is_err());
        let mixed = r#"{"kind": "circle", "circle": {"z": [2.0, 0.0]},
                        "random_complex": {"top_degree": 1, "dims": [2, 2], "seed": 1}}"#;
        assert!(ModelFile::parse(mixed).unwrap().resolve().is_err());
        let unknown = r#"{"kind": "torus"}"#;
        assert!(ModelFile::parse(unknown).unwrap().resolve().is_err());
    }

    #[test]
    fn circle_files_resolve_to_the_cw_model() {
        let text = r#"{"kind": "circle", "circle": {"z": [2.0, 0.0]}}"#;
        let resolved = ModelFile::parse(text).unwrap().resolve().unwrap();
        match resolved {
            Resolved::Cells { cw, rep, circle_z, .. } => {
                assert_eq!(cw.top_degree(), 1);
                assert_eq!(rep.dim(), 1);
                assert_eq!(circle_z, Some(Complex64::new(2.0, 0.0)));
            }
            Resolved::Random { .. } => panic!("expected cells"),
        }
    }

    #[test]
    fn cw_round_trip_preserves_the_complex() {
        let cw = torsion_core::complexes::lens_cw(5, 1).unwrap();
        let model = CwModel::from_cw(&cw);
        let back = model.to_cw().unwrap();
        assert_eq!(cw, back);
    }

    #[test]
    fn dims_length_is_validated() {
        let text = r#"{"kind": "random_complex",
                       "random_complex": {"top_degree": 3, "dims": [2, 2], "seed": 1}}"#;
        assert!(ModelFile::parse(text).unwrap().resolve().is_err());
    }
}
