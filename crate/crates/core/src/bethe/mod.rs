//! Nested Bethe ansatz: weights, eigenvalue formula, equations, eigen-polynomials,
//! the one-species solver and the rapidity parameterization.

mod fixtures;
mod formula;
mod polynomial;
mod rapidity;
mod roots;
mod solver;
mod weights;

pub use formula::{
    bethe_residuals, check_reduction, energy_from_roots, is_regular, pole_residue, refine_roots, stationary_eigen_polynomial,
    transfer_eigenvalue, EquationResidual, ReductionReport, Refinement, ResidualReport, REGULARITY_THRESHOLD,
};
pub use roots::{BetheRootSet, NestingData, NestingOrder};
pub use weights::{d, f, nf, weight_functions, xi, Weights};
pub use polynomial::{
    eigen_polynomial_from_roots, extract_eigen_polynomials, EigenPolynomial, Provenance, HOLDOUT_TOLERANCE, NODE_RADIUS,
};
pub use fixtures::{
    parse_number, verify_completeness, verify_root_set, verify_table, FixtureRow, FixtureTable, CompletenessReport, RootClassification,
    RootSetCheck, BUNDLED_FIXTURES_JSON, PRINT_PRECISION, ROOT_TOLERANCE,
};
pub use solver::{
    continuation_guess, energy_from_x, second_largest_energy, second_largest_quantum_numbers, solve_one_species, GapSolution,
    OneSpeciesSolution,
};
pub use rapidity::{rapidity_transform, Direction, Rapidity};
