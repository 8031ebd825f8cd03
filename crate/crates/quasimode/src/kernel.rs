use quantize::GridSpec;
use symbol_core::c64;

use crate::scaling::mollifier;
use crate::{Quasimode, QuasimodeError};

/// `u(t) = chi(t) (t, -1)`: in the kernel of `F(t) = [[t^2, t^3], [t^3, t^4]]`,
/// so only `hD_t` acts and the residual is `O(h)`.
///
/// `chi` is the unit mollifier on `[-1, 1]`; needs `L >= 2`.
pub fn kernel_quasimode_52(grid: &GridSpec) -> Result<Quasimode, QuasimodeError> {
    if grid.l < 2.0 {
        return Err(QuasimodeError::Argument(format!("the bump needs L >= 2, got {}", grid.l)));
    }
    if 2.0 / grid.dx() < crate::MIN_POINTS_ACROSS {
        return Err(QuasimodeError::Resolution("fewer than 16 points across the bump".into()));
    }
    let xs = grid.xs();
    let mut state: Vec<c64> = xs.iter().map(|&t| c64::new(mollifier(t, 1.0) * t, 0.0)).collect();
    state.extend(xs.iter().map(|&t| c64::new(-mollifier(t, 1.0), 0.0)));
    Quasimode::new(state, 2, *grid, c64::new(0.0, 0.0), "kernel_52".into())
}
