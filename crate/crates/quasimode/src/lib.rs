//! Explicit quasimodes `u` with small `|(P(h) - z) u| / |u|`.
//!
//! Any such `u` gives `sigma_min(P(h) - z) <= ratio`, hence a lower bound on the resolvent norm.

mod beam;
mod embed;
mod kernel;
mod scaling;
mod sweep;

use quantize::{GridSpec, QuantizeError, QuantizedOperator};
use symbol_core::c64;
use symbol_core::SymbolError;

pub use beam::{beam_phase, gaussian_beam, BeamPhase};
pub use embed::{system_embed, EmbedMap};
pub use kernel::kernel_quasimode_52;
pub use scaling::{mollifier, scaling_quasimode, vanishing_order_ok, BUMP_RADIUS, MIN_POINTS_ACROSS};
pub use sweep::{residual_sweep, ResidualCurve, SweepOptions, RATIO_FLOOR};

#[derive(Debug, thiserror::Error)]
pub enum QuasimodeError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("grid too coarse: {0}")]
    Resolution(String),
    #[error("bracket {bracket:e} is not negative at the anchor; build the beam for the adjoint at conj(z) instead")]
    BracketSign { bracket: f64 },
    #[error("germ unusable for a beam: {0}")]
    GermQuality(String),
    #[error("base change is singular on the support: {0}")]
    Singular(String),
    #[error("state leaks outside |x| <= L/2 (mass fraction {0:e})")]
    Support(f64),
    #[error(transparent)]
    Quantize(#[from] QuantizeError),
    #[error(transparent)]
    Symbol(#[from] SymbolError),
    #[error(transparent)]
    Resolvent(#[from] resolvent::ResolventError),
}

/// Mass allowed outside the inert window `|x| <= L/2`.
pub const WINDOW_MASS_TOL: f64 = 1e-12;

/// A state on a grid, with the spectral target it approximates.
///
/// `state` is component-major like the quantized operators.
#[derive(Clone, Debug, PartialEq)]
pub struct Quasimode {
    pub state: Vec<c64>,
    pub components: usize,
    pub grid: GridSpec,
    pub h: f64,
    pub target_z: c64,
    /// `|(P(h) - z) u| / |u|`, once measured.
    pub residual_ratio: Option<f64>,
    pub builder: String,
}

fn norm(v: &[c64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

impl Quasimode {
    /// Normalizes the state and checks the window invariant.
    pub(crate) fn new(
        mut state: Vec<c64>,
        components: usize,
        grid: GridSpec,
        target_z: c64,
        builder: String,
    ) -> Result<Self, QuasimodeError> {
        let n = norm(&state);
        if !(n > 0.0 && n.is_finite()) {
            return Err(QuasimodeError::Argument(format!("{builder}: state has norm {n}")));
        }
        for v in state.iter_mut() {
            *v /= n;
        }
        let qm = Self { state, components, grid, h: grid.h, target_z, residual_ratio: None, builder };
        let out = qm.outside_mass();
        if out > WINDOW_MASS_TOL {
            return Err(QuasimodeError::Support(out));
        }
        Ok(qm)
    }

    pub fn norm(&self) -> f64 {
        norm(&self.state)
    }

    /// Fraction of `|u|^2` carried by grid points with `|x| > L/2`.
    pub fn outside_mass(&self) -> f64 {
        let m = self.grid.m;
        let total: f64 = self.state.iter().map(|z| z.norm_sqr()).sum();
        let out: f64 = self
            .state
            .iter()
            .enumerate()
            .filter(|(i, _)| self.grid.x(i % m).abs() > 0.5 * self.grid.l)
            .map(|(_, z)| z.norm_sqr())
            .sum();
        out / total
    }

    /// `|(A - z) u| / |u|`; stored in `residual_ratio`.
    pub fn measure(&mut self, op: &QuantizedOperator) -> Result<f64, QuasimodeError> {
        let r = residual_ratio(op, &self.state, self.target_z)?;
        self.residual_ratio = Some(r);
        Ok(r)
    }
}

/// `|(A - z) u| / |u|`.
pub fn residual_ratio(op: &QuantizedOperator, u: &[c64], z: c64) -> Result<f64, QuasimodeError> {
    let au = op.apply(u)?;
    let r: Vec<c64> = au.iter().zip(u).map(|(a, b)| a - z * b).collect();
    Ok(norm(&r) / norm(u))
}
