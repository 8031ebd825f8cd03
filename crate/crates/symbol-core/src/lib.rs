//! Matrix-valued symbols on `T*R^n` and their pointwise spectral data.

pub mod catalog;
pub mod elsner;
pub mod germ;
pub mod linalg;
pub mod moebius;
pub mod phase;
pub mod spectral;
pub mod symbol;
pub mod window;

pub use faer::c64;
pub use germ::{germ_track, germ_track_ordered, EigGerm};
pub use phase::{PhaseGrid, PhasePoint};
pub use spectral::{spectral_at, SpectralPoint};
pub use symbol::{MatrixSymbol, SymbolSeries};

#[derive(Debug, thiserror::Error)]
pub enum SymbolError {
    #[error("symbol is not finite at {0}")]
    NonFinite(PhasePoint),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("{what} is ill-conditioned at {at}: sigma_min = {sigma_min:e}")]
    Conditioning { at: PhasePoint, sigma_min: f64, what: String },
    #[error("linear algebra failure: {0}")]
    Linalg(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
    #[error("eigenvalue germ is invalid near {0}")]
    InvalidGerm(String),
}
