//! Dense matrices for `P^w(x, hD)` on the torus `[-L, L)`.
//!
//! Vectors are component-major: entry `a * M + i` is component `a` at `x_i`.

mod fourier;
mod grid;
mod poly;

use std::sync::Arc;

use faer::c64;
use symbol_core::linalg::CMat;
use symbol_core::{MatrixSymbol, SymbolError, SymbolSeries};

pub use fourier::quantize_fourier;
pub use grid::GridSpec;
pub use poly::{quantize_poly, MAX_POLY_DEGREE};

#[derive(Debug, thiserror::Error)]
pub enum QuantizeError {
    #[error("invalid grid: {0}")]
    Grid(String),
    #[error("backend {backend} cannot quantize {symbol}: {reason}")]
    Unsupported { backend: &'static str, symbol: String, reason: String },
    #[error("dimension mismatch: operator has {expected}, state has {got}")]
    Dimension { expected: usize, got: usize },
    #[error(transparent)]
    Symbol(#[from] SymbolError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Backend {
    Poly,
    /// Quadrature backend; `None` keeps the whole dual grid.
    Fourier { xi_cutoff: Option<f64> },
}

impl Backend {
    pub fn name(&self) -> &'static str {
        match self {
            Backend::Poly => "poly",
            Backend::Fourier { .. } => "fourier",
        }
    }
}

#[derive(Clone, Debug)]
pub struct QuantizedOperator {
    pub dim: usize,
    pub matrix: Arc<CMat>,
    pub grid: GridSpec,
    pub symbol_id: String,
    pub backend: Backend,
    /// Accuracy notes recorded during assembly.
    pub warnings: Vec<String>,
}

impl QuantizedOperator {
    pub fn apply(&self, state: &[c64]) -> Result<Vec<c64>, QuantizeError> {
        apply(self, state)
    }

    /// `|A - A*| / |A|` in operator norm (power iteration estimate).
    pub fn hermitian_defect(&self) -> f64 {
        let a = self.matrix.as_ref();
        let d = a - a.adjoint();
        let na = op_norm_estimate(&self.matrix);
        if na == 0.0 {
            0.0
        } else {
            op_norm_estimate(&d) / na
        }
    }

    /// `A - z Id` as a fresh matrix.
    pub fn shifted(&self, z: c64) -> CMat {
        let mut m = (*self.matrix).clone();
        for i in 0..self.dim {
            m[(i, i)] -= z;
        }
        m
    }
}

pub fn apply(op: &QuantizedOperator, state: &[c64]) -> Result<Vec<c64>, QuantizeError> {
    if state.len() != op.dim {
        return Err(QuantizeError::Dimension { expected: op.dim, got: state.len() });
    }
    let a = op.matrix.as_ref();
    let mut out = vec![c64::new(0.0, 0.0); op.dim];
    for j in 0..op.dim {
        let s = state[j];
        if s == c64::new(0.0, 0.0) {
            continue;
        }
        let col = a.col(j);
        for (o, v) in out.iter_mut().zip(col.iter()) {
            *o += *v * s;
        }
    }
    Ok(out)
}

/// Quantize one symbol with the chosen backend.
pub fn quantize(sym: &MatrixSymbol, grid: &GridSpec, backend: Backend) -> Result<QuantizedOperator, QuantizeError> {
    match backend {
        Backend::Poly => quantize_poly(sym, grid),
        Backend::Fourier { xi_cutoff } => quantize_fourier(sym, grid, xi_cutoff),
    }
}

/// `sum_j h^j Op(P_j)`.
pub fn quantize_series(
    series: &SymbolSeries,
    grid: &GridSpec,
    backend: Backend,
) -> Result<QuantizedOperator, QuantizeError> {
    let mut op = quantize(series.principal(), grid, backend)?;
    let mut m = (*op.matrix).clone();
    let mut hj = 1.0;
    for term in &series.terms[1..] {
        hj *= grid.h;
        if term.size() != series.size() {
            return Err(QuantizeError::Dimension { expected: series.size(), got: term.size() });
        }
        let t = quantize(term, grid, backend)?;
        m += faer::Scale(c64::new(hj, 0.0)) * t.matrix.as_ref();
        op.warnings.extend(t.warnings);
        op.symbol_id.push_str(&format!("+h^{}*{}", series.terms.len() - 1, term.name()));
    }
    op.matrix = Arc::new(m);
    Ok(op)
}

/// Operator-norm estimate by power iteration on `A* A` (deterministic start).
pub fn op_norm_estimate(a: &CMat) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    let mut v = faer::Col::<c64>::from_fn(n, |i| c64::new(1.0 + 0.37 * ((i * 7919) % 13) as f64, 0.11 * (i % 5) as f64));
    let mut est = 0.0;
    for _ in 0..200 {
        let nv = v.norm_l2();
        if nv == 0.0 {
            return 0.0;
        }
        v *= faer::Scale(c64::new(1.0 / nv, 0.0));
        let av = a * &v;
        let next = av.norm_l2();
        v = a.adjoint() * &av;
        if (next - est).abs() <= 1e-12 * next {
            return next;
        }
        est = next;
    }
    est
}
