//! Error taxonomy shared by all modules.

use alloc::string::String;
use core::fmt;

/// Which analytic assumption on the model failed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Assumption {
    /// Acyclicity of the twisted complex.
    Acyclicity,
    /// Bijectivity of the even odd-signature operator.
    Bijectivity,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Assumption::Acyclicity => write!(f, "I (acyclicity)"),
            Assumption::Bijectivity => write!(f, "II (bijectivity)"),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Shape mismatch or non-square input where a square matrix is required.
    Dimension { context: &'static str },
    /// A matrix entry is NaN or infinite.
    NonFinite { context: &'static str },
    /// Eigenvalue iteration failed to converge.
    NonConvergence { size: usize, iterations: usize },
    /// The recomputed characteristic polynomial disagrees with the spectrum.
    CharPolyMismatch { residual: f64 },
    /// A zero eigenvalue makes the spectral cut impossible.
    SingularSpectrum,
    /// A linear solve hit a numerically singular matrix.
    SingularMatrix { context: &'static str },
    /// An eigenvalue lies on the branch cut ray (within 1e-12 radians).
    OnCut { theta: f64, arg: f64 },
    /// No Agmon angle request can be served (empty spectrum).
    EmptySpectrum,
    /// A relation of the group presentation does not map to the identity.
    InvalidRepresentation { relation: usize, residual: f64 },
    /// A relation or boundary word uses a symbol outside the presentation.
    UnknownGenerator { symbol: String },
    /// CW data is inconsistent (bad ids, or the boundary of a boundary is nonzero).
    InvalidCwData { reason: String },
    /// Lens space parameters must satisfy p >= 2 and gcd(p, q) = 1.
    InvalidLensParameters { p: i64, q: i64 },
    /// Random complex generation cannot satisfy the requested shape.
    GenerationFailure { reason: String },
    /// Assumption I or II fails; for II the payload is the smallest singular value.
    AssumptionViolated {
        which: Assumption,
        sigma_min: Option<f64>,
    },
    /// Numerical rank of the +/- splitting is ambiguous at the cut.
    SplittingFailure { degree: usize, detail: String },
    /// A squared-operator restriction in xi is singular.
    DegenerateSplitting { degree: usize },
    /// No index subset yields an invertible torsion block.
    DegenerateBasis { degree: usize },
    /// dim == 3 (mod 4) torsion needs the L-integral input.
    MissingLIntegral,
    /// Euler structure refers to a cell that does not exist.
    UnknownCell { id: String },
    /// Grid input to a sweep or residual test is malformed.
    InvalidGrid { reason: String },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Dimension { context } => write!(f, "dimension error: {context}"),
            Error::NonFinite { context } => write!(f, "non-finite entries: {context}"),
            Error::NonConvergence { size, iterations } => write!(
                f,
                "eigenvalue iteration did not converge for a {size}x{size} matrix after {iterations} iterations"
            ),
            Error::CharPolyMismatch { residual } => write!(
                f,
                "characteristic polynomial check failed (relative residual {residual:e})"
            ),
            Error::SingularSpectrum => write!(f, "spectrum contains a zero eigenvalue"),
            Error::SingularMatrix { context } => {
                write!(f, "singular matrix in linear solve: {context}")
            }
            Error::OnCut { theta, arg } => write!(
                f,
                "eigenvalue argument {arg} lies on the cut at angle {theta} (within 1e-12)"
            ),
            Error::EmptySpectrum => write!(f, "spectrum is empty"),
            Error::InvalidRepresentation { relation, residual } => write!(
                f,
                "relation {relation} does not evaluate to the identity (residual {residual:e})"
            ),
            Error::UnknownGenerator { symbol } => {
                write!(f, "word uses unknown generator '{symbol}'")
            }
            Error::InvalidCwData { reason } => write!(f, "invalid CW data: {reason}"),
            Error::InvalidLensParameters { p, q } => {
                write!(f, "invalid lens parameters p={p}, q={q} (need p >= 2, gcd(p,q) = 1)")
            }
            Error::GenerationFailure { reason } => write!(f, "generation failure: {reason}"),
            Error::AssumptionViolated { which, sigma_min } => {
                write!(f, "Assumption {which} violated")?;
                if let Some(s) = sigma_min {
                    write!(f, " (smallest singular value {s:e})")?;
                }
                Ok(())
            }
            Error::SplittingFailure { degree, detail } => {
                write!(f, "splitting failure in degree {degree}: {detail}")
            }
            Error::DegenerateSplitting { degree } => {
                write!(f, "degenerate squared-operator restriction in degree {degree}")
            }
            Error::DegenerateBasis { degree } => {
                write!(f, "no invertible torsion block in degree {degree}")
            }
            Error::MissingLIntegral => {
                write!(f, "dim == 3 (mod 4) refined torsion requires the L-integral input")
            }
            Error::UnknownCell { id } => write!(f, "unknown cell '{id}'"),
            Error::InvalidGrid { reason } => write!(f, "invalid grid: {reason}"),
        }
    }
}
