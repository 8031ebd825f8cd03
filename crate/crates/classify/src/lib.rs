//! Verdicts on matrix symbols.
//!
//! Bracket convention throughout: `{f, g} = sum_j (d_xi_j f d_x_j g - d_x_j f d_xi_j g)`.

pub mod bracket;
pub mod finite_type;
pub mod principal;
pub mod projection;
pub mod quasisym;
pub mod winding;

use symbol_core::{PhasePoint, SymbolError};

pub use bracket::{lambda_pm_scan, poisson_bracket, BracketVerdict, LambdaPm, PmScanConfig, Side};
pub use finite_type::{finite_type_order, hessian_bound_check, omega_cells, omega_delta, FiniteTypeReport, HessianCheck};
pub use principal::{default_directions, principal_type_at, Method, PrincipalTypeVerdict, PtTolerances};
pub use projection::{approximation_check, spectral_projection, ApproximationVerdict, Chart};
pub use quasisym::{
    affine_family_scan, kernel_identity, quasi_symmetric_check, symmetrizer_verify, KernelIdentity, QuasiSymVerdict,
    SymmetrizerVerdict,
};
pub use winding::{winding_index, Winding};

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("contour passes through the spectrum: {0}")]
    Contour(String),
    #[error("projection rank changes across the region (rank {expected} at w0, {found} at {at})")]
    RankJump { expected: usize, found: usize, at: PhasePoint },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}
