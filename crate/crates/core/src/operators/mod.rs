//! Concrete linear operators on sector spaces.

mod basis;
mod hamiltonian;
mod matrix;
mod rmatrix;
mod structural;
mod transfer;

pub use basis::{SectorBasis, DEFAULT_BASIS_LIMIT};
pub use hamiltonian::{build_hamiltonian, build_omega, build_phi, build_symmetry, permutation_sign, SymmetryKind};
pub use matrix::{RateMatrix, Scalar};
pub use rmatrix::{build_r_matrix, xi, ybe_residual, DenseMatrix};
pub use transfer::{build_transfer, TransferMatrix};
pub use structural::{check_structural_identities, Identity, StructuralReport};
