use quantize::{quantize, Backend};
use symbol_core::linalg::{self, CMat};
use symbol_core::{c64, MatrixSymbol, PhasePoint};

use crate::{Quasimode, QuasimodeError};

/// Base change applied to a padded scalar quasimode.
#[derive(Clone)]
pub enum EmbedMap {
    /// Constant matrix: acts pointwise, no quantization needed.
    Constant(CMat),
    /// `Op^w(E)` on the quasimode's grid.
    Symbol(MatrixSymbol, Backend),
}

fn check_invertible(e: &CMat, at: &str) -> Result<(), QuasimodeError> {
    let s = linalg::singular_values(e.as_ref())?;
    let (smax, smin) = (s[0], s[s.len() - 1]);
    if smin <= 1e-10 * smax.max(1.0) {
        return Err(QuasimodeError::Singular(format!("sigma_min(E) = {smin:.3e} at {at}")));
    }
    Ok(())
}

/// Place a scalar quasimode in component `kernel_col` and map it through `E`.
///
/// If `E* P E` is block-diagonal with the scalar operator in that slot, the
/// result is a quasimode of `P` whose ratio is at most `cond(E)` times the scalar one
/// (up to `O(h)` when `E` varies).
pub fn system_embed(scalar: &Quasimode, e: &EmbedMap, kernel_col: usize) -> Result<Quasimode, QuasimodeError> {
    if scalar.components != 1 {
        return Err(QuasimodeError::Argument("system_embed takes a scalar quasimode".into()));
    }
    let grid = scalar.grid;
    let m = grid.m;
    let size = match e {
        EmbedMap::Constant(c) => c.nrows(),
        EmbedMap::Symbol(s, _) => s.size(),
    };
    if kernel_col >= size {
        return Err(QuasimodeError::Argument(format!("column {kernel_col} out of range for size {size}")));
    }
    let support: Vec<usize> = (0..m).filter(|&i| scalar.state[i].norm() > 1e-12).collect();
    let state = match e {
        EmbedMap::Constant(c) => {
            if c.ncols() != size {
                return Err(QuasimodeError::Argument("base change must be square".into()));
            }
            check_invertible(c, "all x")?;
            let mut out = vec![c64::new(0.0, 0.0); size * m];
            for a in 0..size {
                for i in 0..m {
                    out[a * m + i] = c[(a, kernel_col)] * scalar.state[i];
                }
            }
            out
        }
        EmbedMap::Symbol(sym, backend) => {
            if sym.n() != 1 {
                return Err(QuasimodeError::Argument("base change must be a symbol on T*R".into()));
            }
            for &i in &support {
                for xi in [-1.0, 0.0, 1.0] {
                    let w = PhasePoint::new1(grid.x(i), xi);
                    check_invertible(&sym.eval(&w)?, &w.to_string())?;
                }
            }
            let op = quantize(sym, &grid, *backend)?;
            let mut padded = vec![c64::new(0.0, 0.0); size * m];
            padded[kernel_col * m..(kernel_col + 1) * m].copy_from_slice(&scalar.state);
            op.apply(&padded)?
        }
    };
    Quasimode::new(state, size, grid, scalar.target_z, format!("embed({}, col {kernel_col})", scalar.builder))
}
