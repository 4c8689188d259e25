//! Combinatorial torsion of a twisted CW complex.
//!
//! Cell bases are modified by per-cell group-element lifts and a global
//! orientation sign, then the torsion is the alternating product of block
//! determinants over deterministically chosen index subsets. The exponent
//! convention is fixed on the circle: a one-dimensional representation
//! sending the generator to z with trivial lifts gives z - 1.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use num_complex::Complex64;
#[allow(unused_imports)] // trait float math: used by the no_std build only
use num_traits::Float;

use crate::complexes::{twist, CWData, Representation, Word};
use crate::error::{Assumption, Error};
use crate::linalg::{qr, ComplexMatrix, Lu};
use crate::oddsig::{Ambiguity, Provenance, TorsionValue};
use crate::Result;

/// Relative cut for greedy column selection and block rank checks.
const SUBSET_TOL: f64 = 1e-8;

/// One group-element lift per cell plus a global orientation sign.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerStructure {
    lifts: BTreeMap<String, Word>,
    orientation_sign: i8,
}

impl EulerStructure {
    /// Validates that the lifts cover exactly the cells of `cw` and that the
    /// orientation sign is +1 or -1.
    pub fn new(
        cw: &CWData,
        lifts: BTreeMap<String, Word>,
        orientation_sign: i8,
    ) -> Result<Self> {
        if orientation_sign != 1 && orientation_sign != -1 {
            return Err(Error::InvalidCwData {
                reason: "orientation sign must be +1 or -1".to_string(),
            });
        }
        for id in lifts.keys() {
            if cw.find_cell(id).is_none() {
                return Err(Error::UnknownCell { id: id.clone() });
            }
        }
        for (_, id) in cw.all_cells() {
            if !lifts.contains_key(id) {
                return Err(Error::InvalidCwData {
                    reason: format!("cell {id} has no lift"),
                });
            }
        }
        Ok(Self {
            lifts,
            orientation_sign,
        })
    }

    /// Identity lifts on every cell, orientation sign +1.
    pub fn trivial(cw: &CWData) -> Self {
        let lifts = cw
            .all_cells()
            .into_iter()
            .map(|(_, id)| (id.to_string(), Word::identity()))
            .collect();
        Self {
            lifts,
            orientation_sign: 1,
        }
    }

    pub fn lift(&self, cell: &str) -> Option<&Word> {
        self.lifts.get(cell)
    }

    pub fn lifts(&self) -> &BTreeMap<String, Word> {
        &self.lifts
    }

    pub fn orientation_sign(&self) -> i8 {
        self.orientation_sign
    }

    /// Same lifts, opposite orientation sign.
    pub fn flipped(&self) -> Self {
        Self {
            lifts: self.lifts.clone(),
            orientation_sign: -self.orientation_sign,
        }
    }
}

/// Right-multiplies the lift on `cell` by `g`. The torsion of the new
/// structure is the old one times det(rep(g))^((-1)^k) for a k-cell.
pub fn change_euler(
    cw: &CWData,
    eu: &EulerStructure,
    cell: &str,
    g: &Word,
) -> Result<EulerStructure> {
    if cw.find_cell(cell).is_none() {
        return Err(Error::UnknownCell {
            id: cell.to_string(),
        });
    }
    let mut lifts = eu.lifts.clone();
    let old = lifts.get(cell).cloned().unwrap_or_else(Word::identity);
    lifts.insert(cell.to_string(), old.concat(g));
    Ok(EulerStructure {
        lifts,
        orientation_sign: eu.orientation_sign,
    })
}

/// Identity columns selected by `indices`, in the order given.
fn identity_columns(dim: usize, indices: &[usize]) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(dim, indices.len());
    for (j, &i) in indices.iter().enumerate() {
        m[(i, j)] = Complex64::new(1.0, 0.0);
    }
    m
}

/// Appends `col` (length = q.rows()) as a new last column of `q`.
fn append_column(q: &ComplexMatrix, col: &[Complex64]) -> ComplexMatrix {
    let mut out = ComplexMatrix::zeros(q.rows(), q.cols() + 1);
    for i in 0..q.rows() {
        for j in 0..q.cols() {
            out[(i, j)] = q[(i, j)];
        }
        out[(i, q.cols())] = col[i];
    }
    out
}

/// Torsion of a based acyclic cochain complex given by its differentials.
///
/// In each degree k the square block M_k = [d_{k-1} columns selected by
/// S_{k-1} | identity columns selected by S_k] must be invertible; the
/// result is the alternating product of det(M_k)^((-1)^(k+1)). Subsets are
/// chosen greedily by increasing index, which is the lexicographically
/// first valid choice, and the value does not depend on the choice: any
/// other valid subset changes two adjacent determinants by the same
/// transition factor with opposite exponents.
pub(crate) fn based_torsion(dims: &[usize], d: &[ComplexMatrix]) -> Result<Complex64> {
    let n = dims.len() - 1;
    let scale = d.iter().map(ComplexMatrix::frobenius_norm).fold(0.0, f64::max);
    let mut value = Complex64::new(1.0, 0.0);
    let mut alpha_prev = 0usize;
    let mut s_prev: Vec<usize> = Vec::new();
    for k in 0..=n {
        let dim_k = dims[k];
        let alpha_k = dim_k
            .checked_sub(alpha_prev)
            .ok_or(Error::DegenerateBasis { degree: k })?;
        let a = if k == 0 {
            ComplexMatrix::zeros(dim_k, 0)
        } else {
            d[k - 1].select_columns(&s_prev)
        };
        if a.cols() > 0 && qr::rank_scaled(&a, SUBSET_TOL, scale) < a.cols() {
            return Err(Error::DegenerateBasis { degree: k });
        }

        // Orthonormal basis of the span built so far; starts at im(a).
        let mut q = if a.cols() > 0 {
            qr::qr(&a, false).q.block(0, 0, dim_k, a.cols())
        } else {
            ComplexMatrix::zeros(dim_k, 0)
        };
        let mut s_k: Vec<usize> = Vec::new();
        for i in 0..dim_k {
            if s_k.len() == alpha_k {
                break;
            }
            // Residual of e_i against the current span, Gram-Schmidt twice.
            let mut v: Vec<Complex64> = (0..dim_k)
                .map(|r| {
                    if r == i {
                        Complex64::new(1.0, 0.0)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
                .collect();
            for _ in 0..2 {
                for j in 0..q.cols() {
                    let mut dot = Complex64::new(0.0, 0.0);
                    for r in 0..dim_k {
                        dot += q[(r, j)].conj() * v[r];
                    }
                    for r in 0..dim_k {
                        v[r] -= dot * q[(r, j)];
                    }
                }
            }
            let nrm = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
            if nrm > SUBSET_TOL {
                for z in v.iter_mut() {
                    *z /= Complex64::new(nrm, 0.0);
                }
                q = append_column(&q, &v);
                s_k.push(i);
            }
        }
        if s_k.len() < alpha_k {
            return Err(Error::DegenerateBasis { degree: k });
        }

        if dim_k > 0 {
            let m_k = a.hstack(&identity_columns(dim_k, &s_k))?;
            let lu = Lu::decompose(&m_k)?;
            if lu.is_singular() {
                return Err(Error::DegenerateBasis { degree: k });
            }
            let det = lu.det();
            if (k + 1) % 2 == 0 {
                value *= det;
            } else {
                value /= det;
            }
        }
        alpha_prev = alpha_k;
        s_prev = s_k;
    }
    Ok(value)
}

/// Combinatorial torsion of the CW data twisted by `rep`, in the bases
/// given by the Euler-structure lifts, times the orientation sign.
pub fn comb_torsion(
    cw: &CWData,
    rep: &Representation,
    eu: &EulerStructure,
) -> Result<TorsionValue> {
    let tc = twist(cw, rep)?;
    if !tc.is_acyclic() {
        return Err(Error::AssumptionViolated {
            which: Assumption::Acyclicity,
            sigma_min: None,
        });
    }
    let n = cw.top_degree();
    let r = rep.dim();

    // Block-diagonal base change per degree: one rep(lift) block per cell.
    let mut l: Vec<ComplexMatrix> = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let count = cw.cell_count(k);
        let mut m = ComplexMatrix::zeros(r * count, r * count);
        for (i, id) in cw.cells(k).iter().enumerate() {
            let word = eu.lift(id).ok_or_else(|| Error::InvalidCwData {
                reason: format!("cell {id} has no lift"),
            })?;
            let img = rep.evaluate(word)?;
            m.set_block(i * r, i * r, &img);
        }
        l.push(m);
    }

    let dims: Vec<usize> = (0..=n).map(|k| tc.dim(k)).collect();
    let mut lifted: Vec<ComplexMatrix> = Vec::with_capacity(n);
    for k in 0..n {
        let inv = Lu::decompose(&l[k + 1])?.inverse()?;
        lifted.push(inv.mul(tc.differential(k))?.mul(&l[k])?);
    }

    let tau = based_torsion(&dims, &lifted)?;
    let sgn = Complex64::new(f64::from(eu.orientation_sign), 0.0);
    Ok(TorsionValue {
        value: tau * sgn,
        ambiguity: Ambiguity::Exact,
        provenance: Provenance::Combinatorial,
    })
}
