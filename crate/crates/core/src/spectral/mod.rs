//! Matrix analysis of the coefficient triple: structural conditions, joint
//! diagonalization, spectral constants and exponentials.

mod assumptions;
mod constants;
mod eigen;
mod expm;
mod problem;

pub use assumptions::{check_assumptions, AssumptionReport, Verdict, Witness};
pub use constants::{
    b_constants, hermitian_part_min, spectral_abscissa_min, spectral_constants, BConstants, SpectralConstants,
};
pub use eigen::{eigenstructure, eigenvalues, EigenStructure, CLUSTER_GAP, TOL_DIAG};
pub use expm::{matrix_exp, rotation};
pub use problem::{
    c_diag, c_from_real, c_identity, norm2, planar_rotation_generator, CMat, CVec, ComplexMatrixRepr, OuProblem, RMat,
    TOL_SKEW,
};
