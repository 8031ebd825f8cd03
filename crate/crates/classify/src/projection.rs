//! Spectral projections near zero and the approximation property on `{tau = 0}` charts.

use std::f64::consts::PI;

use symbol_core::c64;
use symbol_core::linalg::{self, CMat};
use symbol_core::{MatrixSymbol, PhasePoint};

use crate::ClassifyError;

const MAX_NODES: usize = 1 << 14;

/// Riesz projection onto eigenvalues with `|z| < eps`.
///
/// Trapezoidal quadrature of `(1/2 pi i) oint (z - Q)^{-1} dz` over `|z| = eps`,
/// doubling the node count until `Pi^2 = Pi` to `1e-10`. Unlike eigenvector
/// grouping this stays exact on Jordan blocks.
pub fn spectral_projection(q: &CMat, eps: f64) -> Result<CMat, ClassifyError> {
    let n = q.nrows();
    if q.ncols() != n || !(eps > 0.0) {
        return Err(ClassifyError::Argument("square matrix and eps > 0 required".into()));
    }
    let eigs = linalg::eigenvalues(q.as_ref())?;
    let gap = eigs.iter().map(|e| (e.norm() - eps).abs()).fold(f64::INFINITY, f64::min);
    if gap <= 1e-8 * (1.0 + eps) {
        return Err(ClassifyError::Contour(format!(
            "an eigenvalue lies on |z| = {eps}; choose a different eps"
        )));
    }
    let inside = eigs.iter().filter(|e| e.norm() < eps).count();
    if inside == 0 {
        return Ok(linalg::zeros(n, n));
    }
    if inside == n {
        return Ok(linalg::identity(n));
    }
    let mut nodes = 64;
    let mut prev: Option<CMat> = None;
    loop {
        let mut pi = linalg::zeros(n, n);
        for k in 0..nodes {
            let z = c64::from_polar(eps, 2.0 * PI * k as f64 / nodes as f64);
            let r = linalg::inverse(linalg::scale(linalg::shift(q.as_ref(), z).as_ref(), c64::new(-1.0, 0.0)).as_ref())
                .ok_or_else(|| ClassifyError::Contour(format!("z - Q singular at node {z}")))?;
            pi += linalg::scale(r.as_ref(), z / nodes as f64);
        }
        let idem = linalg::max_abs((&pi * &pi - &pi).as_ref());
        let settled = prev.as_ref().map_or(false, |p| linalg::max_abs((p - &pi).as_ref()) <= 1e-10);
        if idem <= 1e-10 && settled {
            return Ok(pi);
        }
        if nodes >= MAX_NODES {
            return Err(ClassifyError::Contour(format!(
                "quadrature did not settle (idempotency defect {idem:e}); eigenvalues too close to |z| = {eps}"
            )));
        }
        prev = Some(pi);
        nodes *= 2;
    }
}

/// Hypersurface `{c_normal = 0}` in flat coordinates with tangent coordinate axes.
#[derive(Clone, Debug, PartialEq)]
pub struct Chart {
    pub normal_axis: usize,
    pub tangent_axes: Vec<usize>,
}

impl Chart {
    pub fn project(&self, w: &PhasePoint) -> PhasePoint {
        let mut c = w.coords();
        c[self.normal_axis] = 0.0;
        PhasePoint::from_coords(&c)
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ApproximationVerdict {
    pub passes: bool,
    pub rank: usize,
    /// `max |Pi* Re Q Pi|` over the projected region.
    pub max_value: f64,
    /// `max |d_T (Pi* Re Q Pi)|` over tangent coordinate directions.
    pub max_tangent_derivative: f64,
}

fn compressed_real_part(q: &MatrixSymbol, w: &PhasePoint, eps: f64) -> Result<(CMat, usize), ClassifyError> {
    let qw = q.eval(w)?;
    let pi = spectral_projection(&qw, eps)?;
    let rank = linalg::numerical_rank(pi.as_ref(), 1e-6)?;
    let re = linalg::re_part(qw.as_ref());
    Ok((linalg::adjoint(pi.as_ref()) * &re * &pi, rank))
}

/// `Pi* (Re Q) Pi` and its tangential derivatives vanish (to `tol`) on the chart near `w0`.
pub fn approximation_check(
    q: &MatrixSymbol,
    chart: &Chart,
    w0: &PhasePoint,
    eps: f64,
    region: &[PhasePoint],
    tol: f64,
) -> Result<ApproximationVerdict, ClassifyError> {
    let dim = 2 * q.n();
    if chart.normal_axis >= dim || chart.tangent_axes.iter().any(|&a| a >= dim || a == chart.normal_axis) {
        return Err(ClassifyError::Argument("chart axes out of range".into()));
    }
    let (_, rank) = compressed_real_part(q, &chart.project(w0), eps)?;
    let mut out = ApproximationVerdict { passes: true, rank, max_value: 0.0, max_tangent_derivative: 0.0 };
    for w in std::iter::once(w0).chain(region) {
        let ws = chart.project(w);
        let (g, r) = compressed_real_part(q, &ws, eps)?;
        if r != rank {
            return Err(ClassifyError::RankJump { expected: rank, found: r, at: ws });
        }
        out.max_value = out.max_value.max(linalg::op_norm(g.as_ref())?);
        let step = 1e-4 * (1.0 + ws.norm());
        for &a in &chart.tangent_axes {
            let mut e = vec![0.0; dim];
            e[a] = 1.0;
            let (gp, rp) = compressed_real_part(q, &ws.offset(&e, step), eps)?;
            let (gm, rm) = compressed_real_part(q, &ws.offset(&e, -step), eps)?;
            if rp != rank || rm != rank {
                return Err(ClassifyError::RankJump { expected: rank, found: rp.max(rm), at: ws.clone() });
            }
            let d = linalg::scale((&gp - &gm).as_ref(), c64::new(0.5 / step, 0.0));
            out.max_tangent_derivative = out.max_tangent_derivative.max(linalg::op_norm(d.as_ref())?);
        }
    }
    out.passes = out.max_value <= tol && out.max_tangent_derivative <= tol;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use symbol_core::linalg::{c, from_rows};

    #[test]
    fn diagonal_and_jordan() {
        let q = linalg::diag(&[c(0.01, 0.0), c(3.0, 0.0)]);
        let p = spectral_projection(&q, 1.0).unwrap();
        assert!(linalg::max_abs((&p - linalg::diag(&[c(1.0, 0.0), c(0.0, 0.0)])).as_ref()) < 1e-12);
        let j = from_rows(&[&[c(0.0, 0.0), c(1.0, 0.0)], &[c(0.0, 0.0), c(0.0, 0.0)]]);
        let p = spectral_projection(&j, 1.0).unwrap();
        assert!(linalg::max_abs((&p - linalg::identity(2)).as_ref()) < 1e-12);
        assert!(spectral_projection(&q, 3.0).is_err());
    }

    #[test]
    fn oblique_projection_on_non_normal_matrix() {
        let q = from_rows(&[&[c(0.1, 0.0), c(5.0, 0.0)], &[c(0.0, 0.0), c(2.0, 0.0)]]);
        let p = spectral_projection(&q, 1.0).unwrap();
        assert!(linalg::max_abs((&p * &p - &p).as_ref()) < 1e-10);
        // commutes with Q and has rank one
        assert!(linalg::max_abs((&p * &q - &q * &p).as_ref()) < 1e-9);
        assert_eq!(linalg::numerical_rank(p.as_ref(), 1e-6).unwrap(), 1);
    }
}
