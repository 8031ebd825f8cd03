use faer::c64;
use quantize::{quantize_series, Backend, GridSpec};
use rayon::prelude::*;
use symbol_core::SymbolSeries;

use crate::{sigma_min_at, ResolventError};

/// Values below this are treated as numerically zero and dropped from fits.
pub const SIGMA_FLOOR: f64 = 1e-14;

/// Margin in `r2` needed to prefer one model over the other.
pub const MODEL_MARGIN: f64 = 0.02;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Model {
    /// `-log sigma = mu log(1/h) + b`
    Power,
    /// `-log sigma = c / h + b`
    Exponential,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Preference {
    Prefer(Model),
    Inconclusive,
}

/// Least-squares line `y = slope x + intercept`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r2: f64,
}

impl LineFit {
    pub fn fit(x: &[f64], y: &[f64]) -> Option<Self> {
        let n = x.len();
        if n < 2 || y.len() != n {
            return None;
        }
        let nf = n as f64;
        let mx = x.iter().sum::<f64>() / nf;
        let my = y.iter().sum::<f64>() / nf;
        let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
        if sxx == 0.0 {
            return None;
        }
        let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
        let slope = sxy / sxx;
        let intercept = my - slope * mx;
        let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
        let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - slope * a - intercept).powi(2)).sum();
        let r2 = if ss_tot <= 1e-24 * (1.0 + my * my) * nf {
            // flat data: a flat line is a perfect fit
            1.0
        } else {
            (1.0 - ss_res / ss_tot).clamp(0.0, 1.0)
        };
        Some(Self { slope, intercept, r2 })
    }
}

#[derive(Clone, Debug)]
pub struct ScalingFit {
    pub h_list: Vec<f64>,
    pub sigma_list: Vec<f64>,
    /// `h` values whose `sigma` fell below [`SIGMA_FLOOR`].
    pub censored: Vec<f64>,
    pub power: LineFit,
    pub exponential: LineFit,
    pub preference: Preference,
}

impl ScalingFit {
    pub fn mu_hat(&self) -> f64 {
        self.power.slope
    }

    pub fn c_hat(&self) -> f64 {
        self.exponential.slope
    }

    pub fn fit_of(&self, model: Model) -> &LineFit {
        match model {
            Model::Power => &self.power,
            Model::Exponential => &self.exponential,
        }
    }
}

pub fn is_geometric(h: &[f64]) -> bool {
    if h.len() < 2 || h.iter().any(|v| !(*v > 0.0)) {
        return false;
    }
    let q = h[1] / h[0];
    q != 1.0 && h.windows(2).all(|w| ((w[1] / w[0]) - q).abs() <= 1e-9 * q)
}

/// Fit both models to `(h, sigma)` pairs, dropping `sigma < SIGMA_FLOOR`.
pub fn fit_scaling(h_list: &[f64], sigma_list: &[f64]) -> Result<ScalingFit, ResolventError> {
    if h_list.len() != sigma_list.len() {
        return Err(ResolventError::Argument("h and sigma lists differ in length".into()));
    }
    let mut kept_h = Vec::new();
    let mut y = Vec::new();
    let mut censored = Vec::new();
    for (&h, &s) in h_list.iter().zip(sigma_list) {
        if s < SIGMA_FLOOR || !s.is_finite() {
            censored.push(h);
        } else {
            kept_h.push(h);
            y.push(-s.ln());
        }
    }
    let insufficient = || ResolventError::InsufficientData { kept: kept_h.len(), censored: censored.len() };
    if kept_h.len() < 3 {
        return Err(insufficient());
    }
    let xp: Vec<f64> = kept_h.iter().map(|h| (1.0 / h).ln()).collect();
    let xe: Vec<f64> = kept_h.iter().map(|h| 1.0 / h).collect();
    let power = LineFit::fit(&xp, &y).ok_or_else(insufficient)?;
    let exponential = LineFit::fit(&xe, &y).ok_or_else(insufficient)?;
    let preference = if power.r2 >= exponential.r2 + MODEL_MARGIN {
        Preference::Prefer(Model::Power)
    } else if exponential.r2 >= power.r2 + MODEL_MARGIN {
        Preference::Prefer(Model::Exponential)
    } else {
        Preference::Inconclusive
    };
    Ok(ScalingFit {
        h_list: h_list.to_vec(),
        sigma_list: sigma_list.to_vec(),
        censored,
        power,
        exponential,
        preference,
    })
}

/// Quantize at each `h`, take `sigma_min(P(h) - z)` and fit both models.
pub fn exponent_fit(
    series: &SymbolSeries,
    grid_template: &GridSpec,
    z: c64,
    h_list: &[f64],
    backend: Backend,
) -> Result<ScalingFit, ResolventError> {
    if h_list.len() < 5 {
        return Err(ResolventError::Argument(format!("need at least 5 h values, got {}", h_list.len())));
    }
    if !is_geometric(h_list) {
        return Err(ResolventError::Argument("h values must form a geometric sequence".into()));
    }
    let sigma = h_list
        .par_iter()
        .map(|&h| {
            let op = quantize_series(series, &grid_template.with_h(h)?, backend)?;
            sigma_min_at(&op, z)
        })
        .collect::<Result<Vec<_>, _>>()?;
    fit_scaling(h_list, &sigma)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConvergenceCheck {
    pub base: f64,
    pub doubled_m: f64,
    pub doubled_l: f64,
    /// Largest relative change against `base`.
    pub rel_change: f64,
}

impl ConvergenceCheck {
    pub fn stable(&self, tol: f64) -> bool {
        self.rel_change <= tol
    }
}

/// `sigma_min(P(h) - z)` at the template grid, at doubled `M` and at doubled `L` (and `M`).
pub fn convergence_check(
    series: &SymbolSeries,
    grid: &GridSpec,
    z: c64,
    backend: Backend,
) -> Result<ConvergenceCheck, ResolventError> {
    let grids = [
        *grid,
        GridSpec::new(grid.l, 2 * grid.m, grid.h)?,
        GridSpec::new(2.0 * grid.l, 2 * grid.m, grid.h)?,
    ];
    let s = grids
        .par_iter()
        .map(|g| sigma_min_at(&quantize_series(series, g, backend)?, z))
        .collect::<Result<Vec<_>, _>>()?;
    let rel = |v: f64| (v - s[0]).abs() / s[0].abs().max(SIGMA_FLOOR);
    Ok(ConvergenceCheck { base: s[0], doubled_m: s[1], doubled_l: s[2], rel_change: rel(s[1]).max(rel(s[2])) })
}
