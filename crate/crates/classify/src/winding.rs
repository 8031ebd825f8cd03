//! Winding number of `det(P - mu)` around a circle in the phase plane.

use std::f64::consts::PI;

use symbol_core::c64;
use symbol_core::linalg;
use symbol_core::{MatrixSymbol, PhasePoint};

use crate::ClassifyError;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Winding {
    pub index: i64,
    /// `|total / 2 pi - index|`.
    pub residue: f64,
    pub min_abs_det: f64,
}

/// Argument variation of `det(P(w) - mu)` along `|w| = radius` (counter-clockwise in `(x, xi)`), over `2 pi`.
pub fn winding_index(sym: &MatrixSymbol, mu: c64, radius: f64, samples: usize) -> Result<Winding, ClassifyError> {
    if sym.n() != 1 {
        return Err(ClassifyError::Argument("winding index needs n = 1".into()));
    }
    if !(radius > 0.0) || samples < 8 {
        return Err(ClassifyError::Argument("need radius > 0 and at least 8 samples".into()));
    }
    let dets = (0..samples)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / samples as f64;
            let p = sym.eval(&PhasePoint::new1(radius * t.cos(), radius * t.sin()))?;
            Ok(linalg::det(linalg::shift(p.as_ref(), mu).as_ref()))
        })
        .collect::<Result<Vec<c64>, ClassifyError>>()?;
    let scale = dets.iter().map(|d| d.norm()).fold(0.0, f64::max);
    let min_abs_det = dets.iter().map(|d| d.norm()).fold(f64::INFINITY, f64::min);
    if min_abs_det <= 1e-12 * scale.max(1.0) {
        return Err(ClassifyError::Contour(format!(
            "det(P - {mu}) vanishes on the circle of radius {radius}"
        )));
    }
    let mut total = 0.0;
    for k in 0..samples {
        let step = (dets[(k + 1) % samples] / dets[k]).arg();
        if step.abs() > PI / 2.0 {
            return Err(ClassifyError::Contour(format!(
                "argument jumps by {step:.3} between samples {k} and {}; increase samples",
                k + 1
            )));
        }
        total += step;
    }
    let turns = total / (2.0 * PI);
    let index = turns.round() as i64;
    let residue = (turns - index as f64).abs();
    if residue >= 0.1 {
        return Err(ClassifyError::Contour(format!("rounding residue {residue:.3} too large")));
    }
    Ok(Winding { index, residue, min_abs_det })
}

#[cfg(test)]
mod tests {
    use super::*;
    use symbol_core::catalog;
    use symbol_core::linalg::c;

    #[test]
    fn linear_scalar_winds_once() {
        let s = MatrixSymbol::scalar("w1 + i w2", 1, |w| c(w.x[0], w.xi[0]));
        assert_eq!(winding_index(&s, c(0.0, 0.0), 1.0, 64).unwrap().index, 1);
        assert_eq!(winding_index(&s, c(3.0, 0.0), 1.0, 64).unwrap().index, 0);
        assert!(winding_index(&s, c(1.0, 0.0), 1.0, 64).is_err());
    }

    #[test]
    fn symmetric_pair_has_zero_index() {
        let s = catalog::ex29_restricted();
        for mu in [0.0, 0.3, -0.7] {
            assert_eq!(winding_index(&s, c(mu, 0.0), 1.0, 128).unwrap().index, 0);
        }
    }
}
