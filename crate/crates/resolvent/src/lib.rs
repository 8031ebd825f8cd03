//! Smallest singular values of `P(h) - z`, lattice scans and `h`-scaling fits.

mod fit;
mod scan;

use faer::c64;
use quantize::{QuantizeError, QuantizedOperator};
use symbol_core::linalg;
use symbol_core::SymbolError;

pub use fit::{
    convergence_check, exponent_fit, fit_scaling, is_geometric, ConvergenceCheck, LineFit, Model, Preference,
    ScalingFit, MODEL_MARGIN, SIGMA_FLOOR,
};
pub use scan::{scan, PseudospectrumScan, ZLattice};

#[derive(Debug, thiserror::Error)]
pub enum ResolventError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("too few usable points for a fit: {kept} kept, {censored} censored below the floor")]
    InsufficientData { kept: usize, censored: usize },
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
}

impl From<SymbolError> for ResolventError {
    fn from(e: SymbolError) -> Self {
        ResolventError::Numerical(e.to_string())
    }
}

/// `sigma_min(A - z)`; equals `1 / |(A - z)^{-1}|`.
pub fn sigma_min_at(op: &QuantizedOperator, z: c64) -> Result<f64, ResolventError> {
    let a = op.shifted(z);
    linalg::sigma_min(a.as_ref())
        .map_err(|e| ResolventError::Numerical(format!("{} at z={z} (dim {}): {e}", op.symbol_id, op.dim)))
}

#[derive(Clone, Debug)]
pub struct SpectrumGap {
    /// Eigenvalues within `radius` of `z`, sorted by distance.
    pub eigs_in_disk: Vec<c64>,
    pub gap_ok: bool,
    pub nearest: Option<c64>,
}

/// Dense eigendecomposition and the eigenvalues inside the disk `|lambda - z| < radius`.
pub fn spectrum_and_gap(op: &QuantizedOperator, z: c64, radius: f64) -> Result<SpectrumGap, ResolventError> {
    if !(radius > 0.0) {
        return Err(ResolventError::Argument(format!("radius must be positive, got {radius}")));
    }
    let mut eigs = linalg::eigenvalues(op.matrix.as_ref().as_ref())
        .map_err(|e| ResolventError::Numerical(format!("{}: {e}", op.symbol_id)))?;
    eigs.sort_by(|a, b| (a - z).norm().total_cmp(&(b - z).norm()));
    let nearest = eigs.first().copied();
    let eigs_in_disk: Vec<c64> = eigs.into_iter().take_while(|e| (e - z).norm() < radius).collect();
    Ok(SpectrumGap { gap_ok: eigs_in_disk.is_empty(), eigs_in_disk, nearest })
}
