use std::sync::Arc;

use faer::c64;
use rustfft::FftPlanner;
use symbol_core::linalg::{self, CMat};
use symbol_core::MatrixSymbol;

use crate::{Backend, GridSpec, QuantizeError, QuantizedOperator};

pub const MAX_POLY_DEGREE: usize = 4;

/// Weyl quantization of `sum_k a_k(x) xi^k`.
///
/// `sum_j C(k,j) (hD)^j a (hD)^{k-j} / 2^k` is assembled in the Fourier basis,
/// where it reads `a_hat(p - q) ((xi_p + xi_q)/2)^k`, then transformed back.
pub fn quantize_poly(sym: &MatrixSymbol, grid: &GridSpec) -> Result<QuantizedOperator, QuantizeError> {
    let unsupported = |reason: String| QuantizeError::Unsupported {
        backend: "poly",
        symbol: sym.name().to_string(),
        reason,
    };
    let coefs = sym.xi_poly().ok_or_else(|| unsupported("no xi-polynomial form".into()))?;
    if coefs.len() > MAX_POLY_DEGREE + 1 {
        return Err(unsupported(format!("xi-degree {} exceeds {MAX_POLY_DEGREE}", coefs.len() - 1)));
    }
    let (n, m) = (sym.size(), grid.m);
    let xs = grid.xs();
    let values: Vec<Vec<CMat>> = coefs
        .iter()
        .map(|a| {
            xs.iter()
                .map(|&x| {
                    let v = a(x);
                    if v.nrows() != n || v.ncols() != n || !linalg::is_finite(v.as_ref()) {
                        Err(QuantizeError::Symbol(symbol_core::SymbolError::NonFinite(
                            symbol_core::PhasePoint::new1(x, 0.0),
                        )))
                    } else {
                        Ok(v)
                    }
                })
                .collect()
        })
        .collect::<Result<_, _>>()?;
    let xi: Vec<f64> = (0..m).map(|j| grid.xi_bin(j)).collect();
    let mut planner = FftPlanner::<f64>::new();
    let fwd = planner.plan_fft_forward(m);
    let inv = planner.plan_fft_inverse(m);

    let mut out = linalg::zeros(n * m, n * m);
    let mut fourier = vec![c64::new(0.0, 0.0); m * m];
    for a in 0..n {
        for b in 0..n {
            fourier.iter_mut().for_each(|v| *v = c64::new(0.0, 0.0));
            let mut any = false;
            for (k, vals) in values.iter().enumerate() {
                let mut ahat: Vec<c64> = vals.iter().map(|v| v[(a, b)]).collect();
                if ahat.iter().all(|v| *v == c64::new(0.0, 0.0)) {
                    continue;
                }
                any = true;
                fwd.process(&mut ahat);
                let inv_m = 1.0 / m as f64;
                for p in 0..m {
                    for q in 0..m {
                        let s = 0.5 * (xi[p] + xi[q]);
                        fourier[p * m + q] += ahat[(p + m - q) % m] * (s.powi(k as i32) * inv_m);
                    }
                }
            }
            if !any {
                continue;
            }
            let block = to_space(&fourier, m, &*fwd, &*inv);
            for j in 0..m {
                for i in 0..m {
                    out[(a * m + i, b * m + j)] = block[i * m + j];
                }
            }
        }
    }
    Ok(QuantizedOperator {
        dim: n * m,
        matrix: Arc::new(out),
        grid: *grid,
        symbol_id: sym.name().to_string(),
        backend: Backend::Poly,
        warnings: Vec::new(),
    })
}

/// `F^{-1} B F` for a row-major `m x m` buffer; returns row-major.
fn to_space(b: &[c64], m: usize, fwd: &dyn rustfft::Fft<f64>, inv: &dyn rustfft::Fft<f64>) -> Vec<c64> {
    // columns of B through the inverse transform
    let mut t = vec![c64::new(0.0, 0.0); m * m];
    let mut col = vec![c64::new(0.0, 0.0); m];
    for q in 0..m {
        for p in 0..m {
            col[p] = b[p * m + q];
        }
        inv.process(&mut col);
        for i in 0..m {
            t[i * m + q] = col[i];
        }
    }
    // rows through the forward transform
    let inv_m = 1.0 / m as f64;
    for row in t.chunks_mut(m) {
        fwd.process(row);
        row.iter_mut().for_each(|v| *v *= inv_m);
    }
    t
}
