//! Dense complex linear algebra: matrices, LU and QR factorizations, an
//! internal eigensolver, and branch-cut logarithms over spectra.

pub mod branch;
pub mod eigen;
pub mod lu;
pub mod matrix;
pub mod qr;

pub use branch::{branch_log, choose_agmon, zeta_prime_zero, AgmonAngle, ON_CUT_TOL};
pub use eigen::{eigenvalues, Spectrum, CLUSTER_REL_TOL};
pub use lu::{det, Lu};
pub use matrix::ComplexMatrix;
pub use qr::{null_space, null_space_scaled, qr, rank, rank_scaled, NullSpace, Qr};
