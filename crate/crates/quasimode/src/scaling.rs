use symbol_core::c64;
use quantize::GridSpec;

use crate::{Quasimode, QuasimodeError};

/// Support radius of the stretched bump in scaled units.
pub const BUMP_RADIUS: f64 = 3.0;

/// Grid points required across the bump support.
pub const MIN_POINTS_ACROSS: f64 = 16.0;

// 1 / int_{-1}^{1} exp(-1 / (1 - s^2)) ds
const MOLLIFIER_NORM: f64 = 1.0 / 0.443_993_816_168_079_4;

/// Standard mollifier with unit mass, supported in `[-radius, radius]`.
pub fn mollifier(s: f64, radius: f64) -> f64 {
    let r = s / radius;
    if r.abs() >= 1.0 {
        0.0
    } else {
        MOLLIFIER_NORM * (-1.0 / (1.0 - r * r)).exp() / radius
    }
}

/// `f(t0) = 0` and `f(t0 + s) = O(s^k)` on a dyadic ladder of `s`.
pub fn vanishing_order_ok(f: &dyn Fn(f64) -> f64, t0: f64, k: u32) -> bool {
    if f(t0).abs() > 1e-12 {
        return false;
    }
    let ratio = |s: f64| f(t0 + s).abs().max(f(t0 - s).abs()) / s.powi(k as i32);
    let coarse = ratio(0.1);
    let fine = ratio(0.1 / 64.0);
    fine.is_finite() && fine <= 4.0 * coarse + 1e-9
}

/// `u(t) = phi((t - t0) h^{-1/(k+1)})` for `hD_t + i f(t)` at `z = 0`.
pub fn scaling_quasimode(
    f: &dyn Fn(f64) -> f64,
    t0: f64,
    k: u32,
    grid: &GridSpec,
) -> Result<Quasimode, QuasimodeError> {
    if k == 0 || k % 2 == 1 {
        return Err(QuasimodeError::Argument(format!("k must be a positive even integer, got {k}")));
    }
    if !vanishing_order_ok(f, t0, k) {
        return Err(QuasimodeError::Argument(format!("f does not vanish to order {k} at t0 = {t0}")));
    }
    let width = grid.h.powf(1.0 / (k as f64 + 1.0));
    let across = 2.0 * BUMP_RADIUS * width / grid.dx();
    if across < MIN_POINTS_ACROSS {
        return Err(QuasimodeError::Resolution(format!(
            "{across:.1} points across the bump at h = {}, need {MIN_POINTS_ACROSS}",
            grid.h
        )));
    }
    let state = grid.xs().iter().map(|&t| c64::new(mollifier((t - t0) / width, BUMP_RADIUS), 0.0)).collect();
    Quasimode::new(state, 1, *grid, c64::new(0.0, 0.0), format!("scaling(k={k}, t0={t0})"))
}
