use quantize::QuantizedOperator;
use symbol_core::linalg::{self, CMat};
use symbol_core::window::smooth_step;
use symbol_core::{c64, EigGerm};

use crate::{residual_ratio, Quasimode, QuasimodeError};

/// Taylor data of the beam at `(x0, xi0)`.
///
/// Phase `phi(s) = xi0 s + p2 s^2 / 2 + p3 s^3 / 6`, amplitude `1 + alpha s`, `s = x - x0`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BeamPhase {
    pub x0: f64,
    pub xi0: f64,
    pub z: c64,
    pub bracket: f64,
    pub p2: c64,
    pub p3: c64,
    pub alpha: c64,
}

impl BeamPhase {
    pub fn phi(&self, s: f64) -> c64 {
        self.p2 * (s * s / 2.0) + self.p3 * (s * s * s / 6.0) + self.xi0 * s
    }

    /// `Re phi'(s)`.
    pub fn momentum(&self, s: f64) -> f64 {
        self.xi0 + (self.p2 * s + self.p3 * (s * s / 2.0)).re
    }

    /// Plateau radius keeping `Im phi >= Im(p2) s^2 / 4` on the cutoff support `|s| <= 2 rho`.
    fn cutoff_radius(&self, half_window: f64) -> f64 {
        let mut rho = 1.0f64.min(0.5 * (half_window - self.x0.abs()));
        if self.p3.im != 0.0 {
            rho = rho.min(0.75 * self.p2.im / self.p3.im.abs());
        }
        rho
    }
}

/// Eikonal to second order and first transport coefficient from the germ's
/// derivatives at its anchor. Requires `n = 1`.
pub fn beam_phase(germ: &EigGerm) -> Result<BeamPhase, QuasimodeError> {
    if !germ.valid {
        return Err(QuasimodeError::GermQuality("germ tracking failed".into()));
    }
    if germ.patch.n() != 1 {
        return Err(QuasimodeError::Argument("beams are built for n = 1".into()));
    }
    let a = germ.anchor_index();
    let lx = germ.derivative(a, 0)?;
    let lxi = germ.derivative(a, 1)?;
    let lxx = germ.second_derivative(a, 0, 0)?;
    let lxxi = germ.second_derivative(a, 0, 1)?;
    let lxixi = germ.second_derivative(a, 1, 1)?;
    let bracket = lxi.re * lx.im - lx.re * lxi.im;
    let scale = 1.0 + lx.norm_sqr() + lxi.norm_sqr();
    if bracket >= -1e-8 * scale {
        return Err(QuasimodeError::BracketSign { bracket });
    }
    if lxi.norm() < 1e-8 * scale.sqrt() {
        return Err(QuasimodeError::GermQuality("d_xi lambda vanishes at the anchor".into()));
    }
    let p2 = -lx / lxi;
    let p3 = -(lxx + lxxi * p2 * 2.0 + lxixi * p2 * p2) / lxi;
    let alpha = -(lxxi + lxixi * p2) / (lxi * 2.0);
    let (w, z) = &germ.anchor;
    Ok(BeamPhase { x0: w.x[0], xi0: w.xi[0], z: *z, bracket, p2, p3, alpha })
}

/// `u = chi(s) e^{i phi / h} (1 + alpha s + sum_{1 <= j < J} h^j A_j)` for the scalar operator `op`
/// at `z = lambda(w0)`.
///
/// The `A_j` lie in `span{s^(2j-1), s^(2j)}`; their coefficients minimise the measured residual,
/// so the residual does not increase with `J`.
pub fn gaussian_beam(germ: &EigGerm, op: &QuantizedOperator, amp_terms: usize) -> Result<Quasimode, QuasimodeError> {
    if amp_terms == 0 {
        return Err(QuasimodeError::Argument("need at least one amplitude term".into()));
    }
    let grid = op.grid;
    if op.dim != grid.m {
        return Err(QuasimodeError::Argument("gaussian_beam needs a scalar operator".into()));
    }
    let ph = beam_phase(germ)?;
    let h = grid.h;
    let half = 0.5 * grid.l;
    if ph.x0.abs() >= half {
        return Err(QuasimodeError::Argument(format!("x0 = {} lies outside |x| < L/2", ph.x0)));
    }
    let rho = ph.cutoff_radius(half);
    let width = (h / ph.p2.im).sqrt();
    if rho < 3.0 * width {
        return Err(QuasimodeError::GermQuality(format!(
            "cutoff radius {rho:.3e} is below three beam widths ({width:.3e}) at h = {h}"
        )));
    }
    if width < 3.0 * grid.dx() {
        return Err(QuasimodeError::Resolution(format!("beam width {width:.3e} below 3 dx at h = {h}")));
    }
    // momenta carried where |u| > e^{-30}, using Im phi >= Im(p2) s^2 / 4
    let s_eff = (2.0 * rho).min((120.0 * h / ph.p2.im).sqrt());
    let p_max = [-s_eff, s_eff, 0.0].iter().map(|&s| ph.momentum(s).abs()).fold(0.0, f64::max);
    if p_max > 0.9 * grid.xi_max() {
        return Err(QuasimodeError::Resolution(format!(
            "beam momentum {p_max:.3} too close to the dual grid edge {:.3}",
            grid.xi_max()
        )));
    }

    let xs = grid.xs();
    let carrier: Vec<(f64, c64)> = xs
        .iter()
        .map(|&x| {
            let s = x - ph.x0;
            let chi = 1.0 - smooth_step((s.abs() - rho) / rho);
            let e = if chi == 0.0 { c64::new(0.0, 0.0) } else { (c64::new(0.0, 1.0) * ph.phi(s) / h).exp() * chi };
            (s, e)
        })
        .collect();
    let mut u: Vec<c64> = carrier.iter().map(|&(s, e)| e * (ph.alpha * s + 1.0)).collect();

    if amp_terms > 1 {
        let residual = |v: &[c64]| -> Result<Vec<c64>, QuasimodeError> {
            Ok(op.apply(v)?.iter().zip(v).map(|(a, b)| a - ph.z * b).collect())
        };
        let r0 = residual(&u)?;
        let mut basis = Vec::new();
        for j in 1..amp_terms {
            for m in [2 * j - 1, 2 * j] {
                let v: Vec<c64> = carrier.iter().map(|&(s, e)| e * (h.powi(j as i32) * s.powi(m as i32))).collect();
                basis.push(v);
            }
        }
        let cols: Vec<Vec<c64>> = basis.iter().map(|v| residual(v)).collect::<Result<_, _>>()?;
        let norms: Vec<f64> = cols.iter().map(|c| crate::norm(c).max(f64::MIN_POSITIVE)).collect();
        let k = cols.len();
        let rmat = CMat::from_fn(u.len(), k, |i, j| cols[j][i] / norms[j]);
        let gram = linalg::adjoint(rmat.as_ref()) * &rmat;
        let rhs: Vec<c64> = linalg::mat_vec(linalg::adjoint(rmat.as_ref()).as_ref(), &r0).iter().map(|v| -v).collect();
        let inv = linalg::inverse(gram.as_ref())
            .ok_or_else(|| QuasimodeError::GermQuality("amplitude correction basis is degenerate".into()))?;
        let coef = linalg::mat_vec(inv.as_ref(), &rhs);
        for (j, v) in basis.iter().enumerate() {
            let c = coef[j] / norms[j];
            for (ui, vi) in u.iter_mut().zip(v) {
                *ui += c * vi;
            }
        }
    }
    let mut qm = Quasimode::new(u, 1, grid, ph.z, format!("gaussian_beam(J={amp_terms})"))?;
    qm.residual_ratio = Some(residual_ratio(op, &qm.state, ph.z)?);
    Ok(qm)
}
