//! Poisson brackets of eigenvalue germs and the sets `Lambda_+-`.

use symbol_core::c64;
use symbol_core::spectral::{cluster_flags, XiStatus};
use symbol_core::{germ_track, EigGerm, MatrixSymbol, PhaseGrid, PhasePoint};

use crate::ClassifyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Plus,
    Minus,
    Zero,
}

#[derive(Clone, Debug, PartialEq)]
pub struct BracketVerdict {
    pub w: PhasePoint,
    pub lambda: c64,
    /// `{Re lambda, Im lambda}(w)`.
    pub bracket: f64,
    pub side: Side,
}

/// `{Re lambda, Im lambda}` at patch index `idx`, with the gradient scale used for the sign tolerance.
fn bracket_and_scale(germ: &EigGerm, idx: usize) -> Result<(f64, f64), ClassifyError> {
    let n = germ.patch.n();
    let mut b = 0.0;
    let mut scale = 1.0;
    for j in 0..n {
        let dx = germ.derivative(idx, j)?;
        let dxi = germ.derivative(idx, n + j)?;
        b += dxi.re * dx.im - dx.re * dxi.im;
        scale += dx.norm_sqr() + dxi.norm_sqr();
    }
    Ok((b, scale))
}

/// `{Re lambda, Im lambda}` at patch index `idx` of a valid germ.
pub fn poisson_bracket(germ: &EigGerm, idx: usize) -> Result<f64, ClassifyError> {
    Ok(bracket_and_scale(germ, idx)?.0)
}

/// Bracket at the germ's anchor with its side; zero within `1e-8` of the gradient scale.
pub fn bracket_verdict(germ: &EigGerm) -> Result<BracketVerdict, ClassifyError> {
    let (b, scale) = bracket_and_scale(germ, germ.anchor_index())?;
    let tol = 1e-8 * scale;
    let side = if b > tol {
        Side::Plus
    } else if b < -tol {
        Side::Minus
    } else {
        Side::Zero
    };
    Ok(BracketVerdict { w: germ.anchor.0.clone(), lambda: germ.anchor.1, bracket: b, side })
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PmScanConfig {
    pub tol_cluster: f64,
    /// An eigenvalue at a grid point witnesses `z` when it lies within this radius.
    pub match_radius: f64,
    /// Germ patch spacing relative to `1 + |w|`.
    pub patch_step: f64,
}

impl PmScanConfig {
    pub fn new(match_radius: f64) -> Self {
        Self { tol_cluster: 1e-6, match_radius, patch_step: 1e-3 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LambdaPm {
    pub z: c64,
    pub in_minus: bool,
    pub in_plus: bool,
    /// Every witness found sits on a flagged (Xi) cluster.
    pub ws_flag: bool,
    pub witnesses: Vec<BracketVerdict>,
    pub flagged_witnesses: usize,
    /// Candidates whose germ could not be tracked.
    pub invalid_germs: usize,
}

/// Witness search for `z in Lambda_-` / `Lambda_+` over a phase grid.
///
/// Closures are not taken: a grid cannot certify them.
pub fn lambda_pm_scan(
    sym: &MatrixSymbol,
    z_list: &[c64],
    grid: &PhaseGrid,
    cfg: &PmScanConfig,
) -> Result<Vec<LambdaPm>, ClassifyError> {
    if z_list.is_empty() || grid.is_empty() {
        return Err(ClassifyError::Argument("empty z list or phase grid".into()));
    }
    if !(cfg.match_radius > 0.0) {
        return Err(ClassifyError::Argument("match_radius must be positive".into()));
    }
    let flags = cluster_flags(sym, grid, cfg.tol_cluster)?;
    let mut out = Vec::with_capacity(z_list.len());
    for &z in z_list {
        let mut r = LambdaPm {
            z,
            in_minus: false,
            in_plus: false,
            ws_flag: false,
            witnesses: Vec::new(),
            flagged_witnesses: 0,
            invalid_germs: 0,
        };
        for (idx, row) in flags.iter().enumerate() {
            for fc in row {
                if (fc.cluster.value - z).norm() > cfg.match_radius {
                    continue;
                }
                if fc.status != XiStatus::Regular {
                    r.flagged_witnesses += 1;
                    continue;
                }
                let w = grid.point(idx);
                let patch = PhaseGrid::patch(&w, 2, cfg.patch_step * (1.0 + w.norm()));
                let germ = germ_track(sym, &w, fc.cluster.value, &patch, cfg.tol_cluster)?;
                if !germ.valid {
                    r.invalid_germs += 1;
                    continue;
                }
                let v = bracket_verdict(&germ)?;
                match v.side {
                    Side::Minus => r.in_minus = true,
                    Side::Plus => r.in_plus = true,
                    Side::Zero => {}
                }
                r.witnesses.push(v);
            }
        }
        r.ws_flag = r.witnesses.is_empty() && r.flagged_witnesses > 0;
        out.push(r);
    }
    Ok(out)
}
