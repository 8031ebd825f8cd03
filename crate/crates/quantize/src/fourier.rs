use std::sync::Arc;

use faer::c64;
use rustfft::FftPlanner;
use symbol_core::linalg;
use symbol_core::{MatrixSymbol, PhasePoint};

use crate::{Backend, GridSpec, QuantizeError, QuantizedOperator};

/// Kernel quadrature `K(x_i, x_j) = (1/M) sum_k P(mid_ij, xi_k) e^{2 pi i k d / M}`,
/// `d = i - j` wrapped to `[-M/2, M/2)` and `mid_ij` the periodic midpoint.
///
/// Midpoints live on the half grid, so each of the `2M` midpoints costs one
/// FFT over `k` per matrix entry. At `d = -M/2` the two candidate midpoints
/// are averaged, which keeps Hermitian symbols Hermitian.
pub fn quantize_fourier(
    sym: &MatrixSymbol,
    grid: &GridSpec,
    xi_cutoff: Option<f64>,
) -> Result<QuantizedOperator, QuantizeError> {
    if sym.n() != 1 {
        return Err(QuantizeError::Unsupported {
            backend: "fourier",
            symbol: sym.name().to_string(),
            reason: format!("only n = 1 symbols are quantized, got n = {}", sym.n()),
        });
    }
    let (n, m) = (sym.size(), grid.m);
    let mut warnings = Vec::new();
    if let Some(cut) = xi_cutoff {
        if cut < grid.xi_max() {
            warnings.push(format!(
                "xi_cutoff {cut} truncates the dual grid (|xi| <= {}); accuracy depends on the symbol decaying beyond it",
                grid.xi_max()
            ));
        }
    }
    let keep: Vec<bool> = (0..m).map(|j| xi_cutoff.map_or(true, |c| grid.xi_bin(j).abs() <= c)).collect();
    let mut planner = FftPlanner::<f64>::new();
    let inv = planner.plan_fft_inverse(m);
    let half = grid.dx() / 2.0;
    let inv_m = 1.0 / m as f64;

    // g[r][(a*n+b)*m + d]: kernel row at midpoint index r (x = -L + r dx/2)
    let mut g = vec![vec![c64::new(0.0, 0.0); n * n * m]; 2 * m];
    for (r, gr) in g.iter_mut().enumerate() {
        let x = -grid.l + r as f64 * half;
        let mut vals = Vec::with_capacity(m);
        for j in 0..m {
            vals.push(if keep[j] { Some(sym.eval(&PhasePoint::new1(x, grid.xi_bin(j)))?) } else { None });
        }
        let mut buf = vec![c64::new(0.0, 0.0); m];
        for a in 0..n {
            for b in 0..n {
                for (j, v) in vals.iter().enumerate() {
                    buf[j] = v.as_ref().map_or(c64::new(0.0, 0.0), |v| v[(a, b)] * inv_m);
                }
                inv.process(&mut buf);
                gr[(a * n + b) * m..(a * n + b + 1) * m].copy_from_slice(&buf);
            }
        }
    }

    let mut out = linalg::zeros(n * m, n * m);
    let mi = m as i64;
    for a in 0..n {
        for b in 0..n {
            let off = (a * n + b) * m;
            for j in 0..m {
                for i in 0..m {
                    let mut d = i as i64 - j as i64;
                    if d >= mi / 2 {
                        d -= mi;
                    } else if d < -mi / 2 {
                        d += mi;
                    }
                    let r = (2 * j as i64 + d).rem_euclid(2 * mi) as usize;
                    let dm = d.rem_euclid(mi) as usize;
                    let v = if d == -mi / 2 {
                        (g[r][off + dm] + g[(r + m) % (2 * m)][off + dm]) * 0.5
                    } else {
                        g[r][off + dm]
                    };
                    out[(a * m + i, b * m + j)] = v;
                }
            }
        }
    }
    Ok(QuantizedOperator {
        dim: n * m,
        matrix: Arc::new(out),
        grid: *grid,
        symbol_id: sym.name().to_string(),
        backend: Backend::Fourier { xi_cutoff },
        warnings,
    })
}
