//! Riemann-Hilbert problems on the twelve-ray contour: jump assembly,
//! Cauchy collocation and coefficient extraction.

mod cauchy;
mod jumps;
mod solve;

pub use cauchy::PanelSet;
pub use jumps::{
    assemble_jump, composite_j4, family_phase, jump_coefficients, monodromy, principal_piece, JumpAssembly,
    JumpCoefficients, PrincipalPiece,
};
pub use solve::{extract_coefficients, solve_rhp, solve_with_jumps, RhpSolution, SolverOptions};
