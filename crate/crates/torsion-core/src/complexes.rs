//! Twisted cochain complexes from CW data and representations: built-in
//! circle and lens models, random acyclic complexes with chirality, and the
//! acyclicity check.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;
#[allow(unused_imports)] // trait float math: used by the no_std build only
use num_traits::Float;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Error;
use crate::linalg::{qr, ComplexMatrix, Lu};
use crate::Result;

/// Tolerance for relation, involution and d*d residual checks.
pub const STRUCTURE_TOL: f64 = 1e-10;

/// Relative rank tolerance for acyclicity.
pub const RANK_TOL: f64 = 1e-8;

/// A product of generator powers, left to right.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Word {
    factors: Vec<(String, i64)>,
}

impl Word {
    pub fn identity() -> Self {
        Self::default()
    }

    pub fn generator(symbol: &str, exponent: i64) -> Self {
        if exponent == 0 {
            return Self::identity();
        }
        Self {
            factors: vec![(symbol.to_string(), exponent)],
        }
    }

    pub fn from_factors(factors: Vec<(String, i64)>) -> Self {
        Self {
            factors: factors.into_iter().filter(|(_, e)| *e != 0).collect(),
        }
    }

    pub fn factors(&self) -> &[(String, i64)] {
        &self.factors
    }

    pub fn is_identity(&self) -> bool {
        self.factors.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut factors = self.factors.clone();
        factors.extend(other.factors.iter().cloned());
        Word::from_factors(factors)
    }

    pub fn inverse(&self) -> Word {
        Word {
            factors: self
                .factors
                .iter()
                .rev()
                .map(|(s, e)| (s.clone(), -e))
                .collect(),
        }
    }

    /// Total exponent when every factor uses `symbol`; None otherwise.
    fn single_generator_exponent(&self, symbol: &str) -> Option<i64> {
        let mut total = 0i64;
        for (s, e) in &self.factors {
            if s != symbol {
                return None;
            }
            total += e;
        }
        Some(total)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GroupPresentation {
    generators: Vec<String>,
    relations: Vec<Word>,
}

impl GroupPresentation {
    pub fn new(generators: Vec<String>, relations: Vec<Word>) -> Result<Self> {
        let set: BTreeSet<&String> = generators.iter().collect();
        if set.len() != generators.len() {
            return Err(Error::GenerationFailure {
                reason: "duplicate generator symbol".to_string(),
            });
        }
        for rel in &relations {
            for (s, _) in rel.factors() {
                if !set.contains(s) {
                    return Err(Error::UnknownGenerator { symbol: s.clone() });
                }
            }
        }
        Ok(Self {
            generators,
            relations,
        })
    }

    /// Free group on one generator `t` (circle fundamental group).
    pub fn infinite_cyclic() -> Self {
        Self {
            generators: vec!["t".to_string()],
            relations: Vec::new(),
        }
    }

    /// Cyclic group of order p on one generator `t`.
    pub fn cyclic(p: i64) -> Self {
        Self {
            generators: vec!["t".to_string()],
            relations: vec![Word::generator("t", p)],
        }
    }

    pub fn generators(&self) -> &[String] {
        &self.generators
    }

    pub fn relations(&self) -> &[Word] {
        &self.relations
    }

    pub fn generator_index(&self, symbol: &str) -> Option<usize> {
        self.generators.iter().position(|g| g == symbol)
    }
}

/// A finite-dimensional complex representation of a presented group.
#[derive(Debug, Clone)]
pub struct Representation {
    presentation: GroupPresentation,
    dim: usize,
    images: Vec<ComplexMatrix>,
}

impl Representation {
    /// Validates shapes, invertibility of the images, and every relation
    /// (must evaluate to the identity within `STRUCTURE_TOL`).
    pub fn new(
        presentation: GroupPresentation,
        dim: usize,
        images: Vec<ComplexMatrix>,
    ) -> Result<Self> {
        if dim == 0 {
            return Err(Error::Dimension {
                context: "representation dimension must be positive",
            });
        }
        if images.len() != presentation.generators().len() {
            return Err(Error::Dimension {
                context: "one image per generator required",
            });
        }
        for img in &images {
            if img.rows() != dim || img.cols() != dim {
                return Err(Error::Dimension {
                    context: "representation image has the wrong shape",
                });
            }
            let lu = Lu::decompose(img)?;
            if lu.is_singular() || lu.min_pivot <= 1e-12 * lu.max_pivot {
                return Err(Error::SingularMatrix {
                    context: "representation image is not invertible",
                });
            }
        }
        let rep = Self {
            presentation,
            dim,
            images,
        };
        for (idx, rel) in rep.presentation.relations().iter().enumerate() {
            let value = rep.evaluate(rel)?;
            let residual = value.sub(&ComplexMatrix::identity(dim))?.max_abs();
            if residual > STRUCTURE_TOL {
                return Err(Error::InvalidRepresentation {
                    relation: idx,
                    residual,
                });
            }
        }
        Ok(rep)
    }

    pub fn presentation(&self) -> &GroupPresentation {
        &self.presentation
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn images(&self) -> &[ComplexMatrix] {
        &self.images
    }

    /// Evaluates a word through the representation.
    pub fn evaluate(&self, word: &Word) -> Result<ComplexMatrix> {
        let mut acc = ComplexMatrix::identity(self.dim);
        for (symbol, exponent) in word.factors() {
            let idx = self
                .presentation
                .generator_index(symbol)
                .ok_or(Error::UnknownGenerator {
                    symbol: symbol.clone(),
                })?;
            let base = if *exponent >= 0 {
                self.images[idx].clone()
            } else {
                Lu::decompose(&self.images[idx])?.inverse()?
            };
            for _ in 0..exponent.unsigned_abs() {
                acc = acc.mul(&base)?;
            }
        }
        Ok(acc)
    }
}

/// True iff every generator image U satisfies U*U = I within `STRUCTURE_TOL`.
pub fn is_unitary(rep: &Representation) -> bool {
    let id = ComplexMatrix::identity(rep.dim());
    rep.images().iter().all(|u| {
        u.adjoint()
            .mul(u)
            .and_then(|p| p.sub(&id))
            .map(|d| d.max_abs() <= STRUCTURE_TOL)
            .unwrap_or(false)
    })
}

/// One-dimensional representation of the circle group sending t to z.
pub fn circle_representation(z: Complex64) -> Result<Representation> {
    Representation::new(
        GroupPresentation::infinite_cyclic(),
        1,
        vec![ComplexMatrix::scalar(z)],
    )
}

/// Character of Z/p sending t to exp(2 pi i j / p).
pub fn lens_character(p: i64, j: i64) -> Result<Representation> {
    if p < 2 {
        return Err(Error::InvalidLensParameters { p, q: 1 });
    }
    let z = Complex64::from_polar(1.0, 2.0 * PI * (j as f64) / (p as f64));
    Representation::new(GroupPresentation::cyclic(p), 1, vec![ComplexMatrix::scalar(z)])
}

/// One term of a boundary: coefficient * (group element) * cell.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BoundaryTerm {
    pub cell: String,
    pub element: Word,
    pub coeff: i64,
}

/// CW-complex data: cell identifiers per degree and equivariant boundaries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CWData {
    /// cells[k] lists the k-cell identifiers.
    cells: Vec<Vec<String>>,
    /// boundaries[k][i] is the boundary of the i-th k-cell in (k-1)-cells.
    boundaries: Vec<Vec<Vec<BoundaryTerm>>>,
}

impl CWData {
    /// Structural validation: non-empty, unique ids, boundary references
    /// resolve one degree down, 0-cells have empty boundary. The boundary
    /// square condition is checked symbolically by the built-in constructors
    /// and numerically after twisting otherwise.
    pub fn new(cells: Vec<Vec<String>>, boundaries: Vec<Vec<Vec<BoundaryTerm>>>) -> Result<Self> {
        if cells.is_empty() {
            return Err(Error::InvalidCwData {
                reason: "no cells".to_string(),
            });
        }
        if boundaries.len() != cells.len() {
            return Err(Error::InvalidCwData {
                reason: "boundaries must cover every degree".to_string(),
            });
        }
        let mut seen: BTreeSet<&String> = BTreeSet::new();
        for per_degree in &cells {
            for id in per_degree {
                if !seen.insert(id) {
                    return Err(Error::InvalidCwData {
                        reason: format!("duplicate cell id '{id}'"),
                    });
                }
            }
        }
        for (k, per_degree) in boundaries.iter().enumerate() {
            if per_degree.len() != cells[k].len() {
                return Err(Error::InvalidCwData {
                    reason: format!("degree {k} needs one boundary per cell"),
                });
            }
            for terms in per_degree {
                if k == 0 && !terms.is_empty() {
                    return Err(Error::InvalidCwData {
                        reason: "0-cells cannot have boundary terms".to_string(),
                    });
                }
                for t in terms {
                    if k == 0 || !cells[k - 1].contains(&t.cell) {
                        return Err(Error::InvalidCwData {
                            reason: format!("boundary references unknown cell '{}'", t.cell),
                        });
                    }
                }
            }
        }
        Ok(Self { cells, boundaries })
    }

    /// Top degree.
    pub fn top_degree(&self) -> usize {
        self.cells.len() - 1
    }

    pub fn cells(&self, k: usize) -> &[String] {
        &self.cells[k]
    }

    pub fn cell_count(&self, k: usize) -> usize {
        self.cells[k].len()
    }

    pub fn boundary(&self, k: usize, i: usize) -> &[BoundaryTerm] {
        &self.boundaries[k][i]
    }

    /// (degree, index) of a cell id.
    pub fn find_cell(&self, id: &str) -> Option<(usize, usize)> {
        for (k, per_degree) in self.cells.iter().enumerate() {
            if let Some(i) = per_degree.iter().position(|c| c == id) {
                return Some((k, i));
            }
        }
        None
    }

    /// All cell ids with their degrees, in degree-then-index order.
    pub fn all_cells(&self) -> Vec<(usize, &str)> {
        let mut out = Vec::new();
        for (k, per_degree) in self.cells.iter().enumerate() {
            for id in per_degree {
                out.push((k, id.as_str()));
            }
        }
        out
    }
}

/// Checks boundary-of-boundary = 0 over the group ring of a single-generator
/// group, reducing exponents modulo `modulus` when given (cyclic case).
fn check_boundary_square_cyclic(cw: &CWData, symbol: &str, modulus: Option<i64>) -> Result<()> {
    use alloc::collections::BTreeMap;
    let reduce = |e: i64| match modulus {
        Some(p) => e.rem_euclid(p),
        None => e,
    };
    for k in 2..=cw.top_degree() {
        for i in 0..cw.cell_count(k) {
            // coefficients of (target cell, exponent) in the composite boundary
            let mut acc: BTreeMap<(usize, i64), i64> = BTreeMap::new();
            for outer in cw.boundary(k, i) {
                let (_, mid) = cw.find_cell(&outer.cell).expect("validated");
                let ge = outer
                    .element
                    .single_generator_exponent(symbol)
                    .ok_or(Error::InvalidCwData {
                        reason: "symbolic check needs single-generator words".to_string(),
                    })?;
                for inner in cw.boundary(k - 1, mid) {
                    let (_, tgt) = cw.find_cell(&inner.cell).expect("validated");
                    let he = inner
                        .element
                        .single_generator_exponent(symbol)
                        .ok_or(Error::InvalidCwData {
                            reason: "symbolic check needs single-generator words".to_string(),
                        })?;
                    *acc.entry((tgt, reduce(ge + he))).or_insert(0) +=
                        outer.coeff * inner.coeff;
                }
            }
            if acc.values().any(|&c| c != 0) {
                return Err(Error::InvalidCwData {
                    reason: format!("boundary square of degree-{k} cell {i} is nonzero"),
                });
            }
        }
    }
    Ok(())
}

/// Circle: one 0-cell, one 1-cell, boundary (t - 1).
pub fn circle_cw() -> CWData {
    let cells = vec![vec!["v".to_string()], vec!["e".to_string()]];
    let boundaries = vec![
        vec![Vec::new()],
        vec![vec![
            BoundaryTerm {
                cell: "v".to_string(),
                element: Word::generator("t", 1),
                coeff: 1,
            },
            BoundaryTerm {
                cell: "v".to_string(),
                element: Word::identity(),
                coeff: -1,
            },
        ]],
    ];
    let cw = CWData::new(cells, boundaries).expect("static data");
    check_boundary_square_cyclic(&cw, "t", None).expect("static data");
    cw
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    a
}

/// Lens space L(p, q): one cell per degree 0..3 with boundary words
/// (t - 1), (1 + t + ... + t^(p-1)), (t^q - 1).
pub fn lens_cw(p: i64, q: i64) -> Result<CWData> {
    if p < 2 || q == 0 || gcd(p, q) != 1 {
        return Err(Error::InvalidLensParameters { p, q });
    }
    let cells = vec![
        vec!["c0".to_string()],
        vec!["c1".to_string()],
        vec!["c2".to_string()],
        vec!["c3".to_string()],
    ];
    let d1 = vec![vec![
        BoundaryTerm {
            cell: "c0".to_string(),
            element: Word::generator("t", 1),
            coeff: 1,
        },
        BoundaryTerm {
            cell: "c0".to_string(),
            element: Word::identity(),
            coeff: -1,
        },
    ]];
    let d2 = vec![(0..p)
        .map(|i| BoundaryTerm {
            cell: "c1".to_string(),
            element: Word::generator("t", i),
            coeff: 1,
        })
        .collect()];
    let d3 = vec![vec![
        BoundaryTerm {
            cell: "c2".to_string(),
            element: Word::generator("t", q),
            coeff: 1,
        },
        BoundaryTerm {
            cell: "c2".to_string(),
            element: Word::identity(),
            coeff: -1,
        },
    ]];
    let cw = CWData::new(cells, vec![vec![Vec::new()], d1, d2, d3])?;
    check_boundary_square_cyclic(&cw, "t", Some(p))?;
    Ok(cw)
}

/// A cochain complex of matrices with an odd top degree.
#[derive(Debug, Clone)]
pub struct TwistedComplex {
    n: usize,
    dims: Vec<usize>,
    /// d[k]: C^k -> C^{k+1} for k in 0..n.
    d: Vec<ComplexMatrix>,
    acyclic: bool,
}

impl TwistedComplex {
    /// Validates shapes, d*d = 0 within `STRUCTURE_TOL` (relative), odd top
    /// degree, and computes the acyclicity flag by the rank criterion.
    pub fn new(dims: Vec<usize>, d: Vec<ComplexMatrix>) -> Result<Self> {
        if dims.is_empty() || dims.len() % 2 != 0 {
            return Err(Error::Dimension {
                context: "top degree must be odd (even number of degrees)",
            });
        }
        let n = dims.len() - 1;
        if d.len() != n {
            return Err(Error::Dimension {
                context: "need one differential per adjacent degree pair",
            });
        }
        for (k, dk) in d.iter().enumerate() {
            if dk.rows() != dims[k + 1] || dk.cols() != dims[k] {
                return Err(Error::Dimension {
                    context: "differential shape mismatch",
                });
            }
        }
        for k in 0..n.saturating_sub(1) {
            let prod = d[k + 1].mul(&d[k])?;
            let scale = (d[k + 1].frobenius_norm() * d[k].frobenius_norm()).max(1.0);
            if prod.max_abs() > STRUCTURE_TOL * scale {
                return Err(Error::InvalidCwData {
                    reason: format!("d composed with d is nonzero at degree {k}"),
                });
            }
        }
        let acyclic = rank_condition(&dims, &d);
        Ok(Self {
            n,
            dims,
            d,
            acyclic,
        })
    }

    /// Top degree (odd).
    pub fn top_degree(&self) -> usize {
        self.n
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self, k: usize) -> usize {
        self.dims[k]
    }

    /// d_k for 0 <= k < n.
    pub fn differential(&self, k: usize) -> &ComplexMatrix {
        &self.d[k]
    }

    pub fn is_acyclic(&self) -> bool {
        self.acyclic
    }
}

fn rank_condition(dims: &[usize], d: &[ComplexMatrix]) -> bool {
    let n = dims.len() - 1;
    // Rank cuts are measured against the largest differential in the complex,
    // not each matrix's own largest pivot: a differential whose entries
    // cancelled down to roundoff must count as zero, not as full rank.
    let scale = d.iter().map(ComplexMatrix::frobenius_norm).fold(0.0, f64::max);
    let rank_of = |k: isize| -> usize {
        if k < 0 || k as usize >= n {
            0
        } else {
            qr::rank_scaled(&d[k as usize], RANK_TOL, scale)
        }
    };
    (0..=n).all(|k| rank_of(k as isize) + rank_of(k as isize - 1) == dims[k])
}

/// True iff the rank condition rank(d_k) + rank(d_{k-1}) = dim C^k holds at
/// every degree.
pub fn check_acyclic(tc: &TwistedComplex) -> bool {
    rank_condition(&tc.dims, &tc.d)
}

/// Twists CW data by a representation: C^k gets one block per k-cell, the
/// boundary words pass through the representation, and the cochain
/// differential is the plain transpose (no conjugation) of the twisted
/// boundary.
pub fn twist(cw: &CWData, rep: &Representation) -> Result<TwistedComplex> {
    let n = cw.top_degree();
    let r = rep.dim();
    let dims: Vec<usize> = (0..=n).map(|k| r * cw.cell_count(k)).collect();
    let mut d: Vec<ComplexMatrix> = Vec::with_capacity(n);
    for k in 1..=n {
        // Twisted boundary: C_k -> C_{k-1}, block (i, j) accumulates
        // coeff * rep(element) over the boundary terms of the j-th k-cell.
        let mut bnd = ComplexMatrix::zeros(dims[k - 1], dims[k]);
        for j in 0..cw.cell_count(k) {
            for term in cw.boundary(k, j) {
                let (_, i) = cw.find_cell(&term.cell).expect("validated");
                let img = rep.evaluate(&term.element)?;
                let c = Complex64::new(term.coeff as f64, 0.0);
                for rr in 0..r {
                    for cc in 0..r {
                        bnd[(i * r + rr, j * r + cc)] += c * img[(rr, cc)];
                    }
                }
            }
        }
        d.push(bnd.transpose());
    }
    TwistedComplex::new(dims, d)
}

/// Degree-reversing involution standing in for the Hodge star.
#[derive(Debug, Clone)]
pub struct Chirality {
    /// maps[k]: C^k -> C^{n-k}.
    maps: Vec<ComplexMatrix>,
}

impl Chirality {
    /// Validates shapes against `dims` and the involution law within
    /// `STRUCTURE_TOL`.
    pub fn new(maps: Vec<ComplexMatrix>, dims: &[usize]) -> Result<Self> {
        if maps.len() != dims.len() {
            return Err(Error::Dimension {
                context: "one chirality map per degree required",
            });
        }
        let n = dims.len() - 1;
        for (k, g) in maps.iter().enumerate() {
            if g.rows() != dims[n - k] || g.cols() != dims[k] {
                return Err(Error::Dimension {
                    context: "chirality map shape mismatch",
                });
            }
        }
        for k in 0..=n {
            let comp = maps[n - k].mul(&maps[k])?;
            let err = comp.sub(&ComplexMatrix::identity(dims[k]))?.max_abs();
            if err > STRUCTURE_TOL {
                return Err(Error::InvalidCwData {
                    reason: format!("chirality is not an involution at degree {k}"),
                });
            }
        }
        Ok(Self { maps })
    }

    pub fn map(&self, k: usize) -> &ComplexMatrix {
        &self.maps[k]
    }
}

/// Identity chirality; requires dim C^k = dim C^{n-k}.
pub fn identity_chirality(dims: &[usize]) -> Result<Chirality> {
    let n = dims.len() - 1;
    for k in 0..=n {
        if dims[k] != dims[n - k] {
            return Err(Error::Dimension {
                context: "identity chirality needs symmetric dimensions",
            });
        }
    }
    let maps = dims.iter().map(|&m| ComplexMatrix::identity(m)).collect();
    Chirality::new(maps, dims)
}

/// A generated acyclic complex with chirality and the retry count spent
/// making the assembled operator comfortably invertible.
#[derive(Debug, Clone)]
pub struct RandomComplex {
    pub complex: TwistedComplex,
    pub chirality: Chirality,
    pub retries: usize,
}

fn standard_normal<R: Rng>(rng: &mut R) -> f64 {
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen();
    (-2.0 * u1.ln()).sqrt() * (2.0 * PI * u2).cos()
}

fn random_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    let mut m = ComplexMatrix::zeros(rows, cols);
    for i in 0..rows {
        for j in 0..cols {
            m[(i, j)] = Complex64::new(standard_normal(rng), standard_normal(rng));
        }
    }
    m
}

/// Random well-conditioned square matrix: unitary Q from QR of a Gaussian,
/// columns rescaled by factors in [0.7, 1.4] (condition number <= 2).
fn random_well_conditioned<R: Rng>(rng: &mut R, m: usize) -> ComplexMatrix {
    if m == 0 {
        return ComplexMatrix::zeros(0, 0);
    }
    let g = random_gaussian(rng, m, m);
    let q = qr::qr(&g, false).q;
    let mut out = q;
    for j in 0..m {
        let s = 0.7 + 0.7 * rng.gen::<f64>();
        for i in 0..m {
            let v = out[(i, j)] * s;
            out[(i, j)] = v;
        }
    }
    out
}

/// Generates an acyclic complex (exact staircase model conjugated by random
/// well-conditioned changes of basis) together with a compatible chirality.
/// Retries with fresh randomness until the assembled even operator is
/// comfortably invertible.
pub fn random_chirality_complex(
    n: usize,
    dims: &[usize],
    seed: u64,
) -> Result<RandomComplex> {
    if n % 2 == 0 {
        return Err(Error::GenerationFailure {
            reason: "top degree must be odd".to_string(),
        });
    }
    if dims.len() != n + 1 {
        return Err(Error::GenerationFailure {
            reason: format!("need {} dimensions for top degree {n}", n + 1),
        });
    }
    for k in 0..=n {
        if dims[k] != dims[n - k] {
            return Err(Error::GenerationFailure {
                reason: "chirality requires dim C^k = dim C^(n-k)".to_string(),
            });
        }
    }
    // Exactness forces rank d_k = m_k - rank d_{k-1}; infeasible dimension
    // vectors (nonzero Euler characteristic) are rejected here.
    let mut ranks: Vec<usize> = Vec::with_capacity(n + 1);
    let mut prev = 0usize;
    for (k, &m) in dims.iter().enumerate() {
        if m < prev {
            return Err(Error::GenerationFailure {
                reason: format!(
                    "no acyclic complex with these dimensions (deficit at degree {k})"
                ),
            });
        }
        let r = m - prev;
        ranks.push(r);
        prev = r;
    }
    if ranks[n] != 0 {
        return Err(Error::GenerationFailure {
            reason: "nonzero Euler characteristic forbids acyclicity".to_string(),
        });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let max_retries = 20usize;
    for retries in 0..=max_retries {
        // Staircase model: d sends the last rank coordinates of C^k to the
        // first rank coordinates of C^{k+1}; exact by construction.
        let w: Vec<ComplexMatrix> = dims
            .iter()
            .map(|&m| random_well_conditioned(&mut rng, m))
            .collect();
        let w_inv: Vec<ComplexMatrix> = w
            .iter()
            .map(|m| {
                if m.rows() == 0 {
                    Ok(ComplexMatrix::zeros(0, 0))
                } else {
                    Lu::decompose(m)?.inverse()
                }
            })
            .collect::<Result<_>>()?;
        let mut d: Vec<ComplexMatrix> = Vec::with_capacity(n);
        for k in 0..n {
            let r = ranks[k];
            let mut model = ComplexMatrix::zeros(dims[k + 1], dims[k]);
            for i in 0..r {
                model[(i, dims[k] - r + i)] = Complex64::new(1.0, 0.0);
            }
            d.push(w[k + 1].mul(&model)?.mul(&w_inv[k])?);
        }
        let half = (n + 1) / 2;
        let mut maps: Vec<Option<ComplexMatrix>> = vec![None; n + 1];
        for k in 0..half {
            let g = random_well_conditioned(&mut rng, dims[k]);
            let g_inv = if g.rows() == 0 {
                ComplexMatrix::zeros(0, 0)
            } else {
                Lu::decompose(&g)?.inverse()?
            };
            maps[k] = Some(g);
            maps[n - k] = Some(g_inv);
        }
        let maps: Vec<ComplexMatrix> = maps.into_iter().map(|m| m.expect("filled")).collect();

        let complex = TwistedComplex::new(dims.to_vec(), d)?;
        let chirality = Chirality::new(maps, dims)?;
        if !complex.is_acyclic() {
            continue;
        }
        let b = crate::oddsig::b_even_matrix(&complex, &chirality)?;
        if b.rows() == 0 {
            return Ok(RandomComplex {
                complex,
                chirality,
                retries,
            });
        }
        let lu = Lu::decompose(&b)?;
        if !lu.is_singular() && lu.min_pivot > 1e-4 * lu.max_pivot {
            return Ok(RandomComplex {
                complex,
                chirality,
                retries,
            });
        }
    }
    Err(Error::GenerationFailure {
        reason: "no invertible even operator after bounded retries".to_string(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn circle_twist_matches_hand_evaluation() {
        let cw = circle_cw();
        let rep = circle_representation(c(2.0, 0.0)).unwrap();
        let tc = twist(&cw, &rep).unwrap();
        assert_eq!(tc.dims(), &[1, 1]);
        assert!((tc.differential(0)[(0, 0)] - c(1.0, 0.0)).norm() < 1e-15);
        assert!(tc.is_acyclic());
    }

    #[test]
    fn trivial_circle_representation_is_not_acyclic() {
        let cw = circle_cw();
        let rep = circle_representation(c(1.0, 0.0)).unwrap();
        let tc = twist(&cw, &rep).unwrap();
        assert!(tc.differential(0).max_abs() < 1e-15);
        assert!(!tc.is_acyclic());
        assert!(!check_acyclic(&tc));
    }

    #[test]
    fn lens_five_primitive_character_is_acyclic() {
        let cw = lens_cw(5, 1).unwrap();
        let rep = lens_character(5, 1).unwrap();
        let tc = twist(&cw, &rep).unwrap();
        assert_eq!(tc.dims(), &[1, 1, 1, 1]);
        assert!(tc.is_acyclic());
        // Middle differential is the character sum over the group: zero.
        assert!(tc.differential(1).max_abs() < 1e-12);
    }

    #[test]
    fn lens_two_has_the_classical_boundary_words() {
        let cw = lens_cw(2, 1).unwrap();
        assert_eq!(cw.boundary(1, 0).len(), 2); // t - 1
        assert_eq!(cw.boundary(2, 0).len(), 2); // 1 + t
        assert_eq!(cw.boundary(3, 0).len(), 2); // t - 1
        assert!(cw.boundary(2, 0).iter().all(|t| t.coeff == 1));
    }

    #[test]
    fn lens_rejects_non_coprime_parameters() {
        assert!(matches!(
            lens_cw(4, 2),
            Err(Error::InvalidLensParameters { p: 4, q: 2 })
        ));
    }

    #[test]
    fn broken_boundary_square_is_rejected_numerically() {
        // 2-complex with boundary(c2) = e and boundary(e) = v: square nonzero.
        let cells = vec![
            vec!["v".to_string()],
            vec!["e".to_string()],
            vec!["f".to_string()],
            vec!["g".to_string()],
        ];
        let term = |cell: &str| BoundaryTerm {
            cell: cell.to_string(),
            element: Word::identity(),
            coeff: 1,
        };
        let boundaries = vec![
            vec![Vec::new()],
            vec![vec![term("v")]],
            vec![vec![term("e")]],
            vec![Vec::new()],
        ];
        let cw = CWData::new(cells, boundaries).unwrap();
        let rep = circle_representation(c(2.0, 0.0)).unwrap();
        assert!(matches!(twist(&cw, &rep), Err(Error::InvalidCwData { .. })));
    }

    #[test]
    fn representation_relation_violation_is_caught() {
        let pres = GroupPresentation::cyclic(3);
        let got = Representation::new(pres, 1, vec![ComplexMatrix::scalar(c(2.0, 0.0))]);
        assert!(matches!(got, Err(Error::InvalidRepresentation { .. })));
    }

    #[test]
    fn unitarity_detection() {
        let u = circle_representation(Complex64::from_polar(1.0, PI / 3.0)).unwrap();
        assert!(is_unitary(&u));
        let v = circle_representation(c(2.0, 0.0)).unwrap();
        assert!(!is_unitary(&v));
    }

    #[test]
    fn random_complex_satisfies_structural_invariants() {
        let out = random_chirality_complex(3, &[2, 4, 4, 2], 11).unwrap();
        assert!(out.complex.is_acyclic());
        for k in 0..=3usize {
            let g = out.chirality.map(k);
            let back = out.chirality.map(3 - k).mul(g).unwrap();
            let err = back
                .sub(&ComplexMatrix::identity(out.complex.dim(k)))
                .unwrap()
                .max_abs();
            assert!(err < 1e-10);
        }
    }

    #[test]
    fn random_complex_is_deterministic_per_seed() {
        let a = random_chirality_complex(3, &[1, 3, 3, 1], 5).unwrap();
        let b = random_chirality_complex(3, &[1, 3, 3, 1], 5).unwrap();
        for k in 0..3 {
            let da = a.complex.differential(k);
            let db = b.complex.differential(k);
            assert!(da.sub(db).unwrap().max_abs() == 0.0);
        }
    }

    #[test]
    fn infeasible_dimensions_are_rejected() {
        assert!(matches!(
            random_chirality_complex(3, &[1, 1, 1, 2], 1),
            Err(Error::GenerationFailure { .. })
        ));
        assert!(matches!(
            random_chirality_complex(2, &[1, 1, 1], 1),
            Err(Error::GenerationFailure { .. })
        ));
    }

    #[test]
    fn scalar_model_for_degree_one() {
        let out = random_chirality_complex(1, &[1, 1], 3).unwrap();
        assert!(out.complex.is_acyclic());
        assert!(out.complex.differential(0)[(0, 0)].norm() > 1e-6);
    }
}
