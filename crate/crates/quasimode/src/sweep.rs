use quantize::{quantize_series, Backend, GridSpec, QuantizedOperator};
use rayon::prelude::*;
use resolvent::LineFit;
use symbol_core::{c64, SymbolSeries};

use crate::{Quasimode, QuasimodeError};

/// Ratios below this sit at the round-off floor and are dropped from the fit.
pub const RATIO_FLOOR: f64 = 1e-13;

#[derive(Clone, Debug, PartialEq)]
pub struct ResidualCurve {
    pub h_list: Vec<f64>,
    pub ratios: Vec<f64>,
    pub censored: Vec<f64>,
    /// Slope of `log ratio` against `log h`; `+inf` when fewer than two ratios survive censoring.
    pub fitted_exponent: f64,
    pub r2: f64,
    /// Per-`h` stability of the ratio under doubling `M` and `L`, when gating was requested.
    pub converged: Option<Vec<bool>>,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepOptions {
    pub backend: Backend,
    /// Relative change allowed when re-measuring at doubled `M` and at doubled `(L, M)`.
    pub gate_tol: Option<f64>,
}

impl Default for SweepOptions {
    fn default() -> Self {
        Self { backend: Backend::Poly, gate_tol: None }
    }
}

fn measure_at(
    builder: &(dyn Fn(&QuantizedOperator) -> Result<Quasimode, QuasimodeError> + Sync),
    series: &SymbolSeries,
    grid: &GridSpec,
    z: c64,
    backend: Backend,
) -> Result<f64, QuasimodeError> {
    let op = quantize_series(series, grid, backend)?;
    let mut qm = builder(&op)?;
    qm.target_z = z;
    qm.measure(&op)
}

/// Build and measure a quasimode at each `h`, then fit `ratio ~ h^e`.
pub fn residual_sweep(
    builder: &(dyn Fn(&QuantizedOperator) -> Result<Quasimode, QuasimodeError> + Sync),
    h_list: &[f64],
    series: &SymbolSeries,
    grid_template: &GridSpec,
    z: c64,
    opts: &SweepOptions,
) -> Result<ResidualCurve, QuasimodeError> {
    if h_list.len() < 2 {
        return Err(QuasimodeError::Argument("need at least two h values".into()));
    }
    let ratios = h_list
        .par_iter()
        .map(|&h| measure_at(builder, series, &grid_template.with_h(h)?, z, opts.backend))
        .collect::<Result<Vec<f64>, _>>()?;
    let converged = match opts.gate_tol {
        None => None,
        Some(tol) => Some(
            h_list
                .par_iter()
                .zip(&ratios)
                .map(|(&h, &base)| {
                    let g = grid_template.with_h(h)?;
                    let gm = GridSpec::new(g.l, 2 * g.m, h)?;
                    let gl = GridSpec::new(2.0 * g.l, 2 * g.m, h)?;
                    let mut ok = true;
                    for gg in [gm, gl] {
                        let r = measure_at(builder, series, &gg, z, opts.backend)?;
                        ok &= (r - base).abs() <= tol * base.max(RATIO_FLOOR);
                    }
                    Ok(ok)
                })
                .collect::<Result<Vec<bool>, QuasimodeError>>()?,
        ),
    };
    let mut censored = Vec::new();
    let (mut x, mut y) = (Vec::new(), Vec::new());
    for (&h, &r) in h_list.iter().zip(&ratios) {
        if r < RATIO_FLOOR {
            censored.push(h);
        } else {
            x.push(h.ln());
            y.push(r.ln());
        }
    }
    let (fitted_exponent, r2) = match LineFit::fit(&x, &y) {
        Some(f) if x.len() >= 2 => (f.slope, f.r2),
        _ => (f64::INFINITY, 1.0),
    };
    Ok(ResidualCurve { h_list: h_list.to_vec(), ratios, censored, fitted_exponent, r2, converged })
}
