//! Continuation of a single eigenvalue branch over a patch of phase space.

use std::collections::VecDeque;

use faer::c64;

use crate::linalg;
use crate::spectral::{cluster_eigenvalues, nearest_clusters};
use crate::{MatrixSymbol, PhaseGrid, PhasePoint, SymbolError};

/// A tracked eigenvalue branch `lambda(w)` on a patch.
#[derive(Clone, Debug)]
pub struct EigGerm {
    pub anchor: (PhasePoint, c64),
    pub patch: PhaseGrid,
    /// Tracked value per patch index (`None` where tracking did not reach).
    pub values: Vec<Option<c64>>,
    pub valid: bool,
    /// First point where continuation was ambiguous or crossed a multiplicity change.
    pub offending: Option<PhasePoint>,
    anchor_index: usize,
}

/// Nearest-eigenvalue continuation outward from `w0` in breadth-first,
/// axis-ordered adjacency.
pub fn germ_track(
    sym: &MatrixSymbol,
    w0: &PhasePoint,
    lambda0: c64,
    patch: &PhaseGrid,
    tol_cluster: f64,
) -> Result<EigGerm, SymbolError> {
    let order: Vec<usize> = (0..patch.axes().len()).collect();
    germ_track_ordered(sym, w0, lambda0, patch, tol_cluster, &order)
}

/// As [`germ_track`] with an explicit axis visiting order.
pub fn germ_track_ordered(
    sym: &MatrixSymbol,
    w0: &PhasePoint,
    lambda0: c64,
    patch: &PhaseGrid,
    tol_cluster: f64,
    axis_order: &[usize],
) -> Result<EigGerm, SymbolError> {
    let a = patch
        .locate(w0)
        .ok_or_else(|| SymbolError::Argument("anchor dimension does not match patch".into()))?;
    let pa = patch.point(a);
    let off: f64 = pa.coords().iter().zip(w0.coords()).map(|(p, q)| (p - q).abs()).fold(0.0, f64::max);
    if off > 1e-9 * (1.0 + w0.norm()) {
        return Err(SymbolError::Argument(format!("anchor {w0} is not a patch point")));
    }
    let clusters_at = |idx: usize| -> Result<_, SymbolError> {
        let e = linalg::eigenvalues(sym.eval(&patch.point(idx))?.as_ref())?;
        Ok(cluster_eigenvalues(&e, tol_cluster))
    };
    let c0 = clusters_at(a)?;
    let start = nearest_clusters(&c0, lambda0, tol_cluster);
    if start.is_empty() || (start[0].value - lambda0).norm() > tol_cluster {
        return Err(SymbolError::Argument(format!("{lambda0} is not an eigenvalue at {w0}")));
    }
    let mult0 = start[0].mult;
    let mut germ = EigGerm {
        anchor: (w0.clone(), lambda0),
        patch: patch.clone(),
        values: vec![None; patch.len()],
        valid: start.len() == 1,
        offending: if start.len() == 1 { None } else { Some(w0.clone()) },
        anchor_index: a,
    };
    germ.values[a] = Some(lambda0);
    if !germ.valid {
        return Ok(germ);
    }
    let mut queue = VecDeque::from([a]);
    while let Some(idx) = queue.pop_front() {
        let here = germ.values[idx].expect("queued points carry a value");
        for nb in patch.neighbors_ordered(idx, axis_order) {
            if germ.values[nb].is_some() {
                continue;
            }
            let cs = clusters_at(nb)?;
            let cand = nearest_clusters(&cs, here, tol_cluster);
            if cand.len() != 1 || cand[0].mult != mult0 {
                germ.valid = false;
                germ.offending = Some(patch.point(nb));
                return Ok(germ);
            }
            germ.values[nb] = Some(cand[0].value);
            queue.push_back(nb);
        }
    }
    Ok(germ)
}

impl EigGerm {
    pub fn anchor_index(&self) -> usize {
        self.anchor_index
    }

    pub fn value(&self, idx: usize) -> Option<c64> {
        self.values.get(idx).copied().flatten()
    }

    pub fn samples(&self) -> Vec<(PhasePoint, c64)> {
        self.values
            .iter()
            .enumerate()
            .filter_map(|(i, v)| v.map(|v| (self.patch.point(i), v)))
            .collect()
    }

    fn require_valid(&self) -> Result<(), SymbolError> {
        if self.valid {
            Ok(())
        } else {
            Err(SymbolError::InvalidGerm(
                self.offending.as_ref().map(|w| w.to_string()).unwrap_or_default(),
            ))
        }
    }

    fn at(&self, idx: usize, axis: usize, k: isize) -> Option<c64> {
        let mut j = idx;
        for _ in 0..k.unsigned_abs() {
            j = self.patch.step(j, axis, k.signum())?;
        }
        self.value(j)
    }

    /// First derivative along a flat coordinate axis (4th order when the stencil fits).
    pub fn derivative(&self, idx: usize, axis: usize) -> Result<c64, SymbolError> {
        self.require_valid()?;
        let h = self.patch.spacing(axis);
        let f = |k| self.at(idx, axis, k);
        match (f(-2), f(-1), f(1), f(2)) {
            (Some(m2), Some(m1), Some(p1), Some(p2)) => Ok((m2 - p2 + (p1 - m1) * 8.0) / (12.0 * h)),
            (_, Some(m1), Some(p1), _) => Ok((p1 - m1) / (2.0 * h)),
            _ => Err(SymbolError::Argument("germ stencil incomplete for derivative".into())),
        }
    }

    /// Second derivative `d^2 lambda / dc_a dc_b`.
    pub fn second_derivative(&self, idx: usize, a: usize, b: usize) -> Result<c64, SymbolError> {
        self.require_valid()?;
        let f0 = self.value(idx).ok_or_else(|| SymbolError::Argument("no germ value".into()))?;
        if a == b {
            let h = self.patch.spacing(a);
            let f = |k| self.at(idx, a, k);
            return match (f(-2), f(-1), f(1), f(2)) {
                (Some(m2), Some(m1), Some(p1), Some(p2)) => {
                    Ok(((p1 + m1) * 16.0 - p2 - m2 - f0 * 30.0) / (12.0 * h * h))
                }
                (_, Some(m1), Some(p1), _) => Ok((p1 + m1 - f0 * 2.0) / (h * h)),
                _ => Err(SymbolError::Argument("germ stencil incomplete for second derivative".into())),
            };
        }
        let (ha, hb) = (self.patch.spacing(a), self.patch.spacing(b));
        let corner = |sa: isize, sb: isize| -> Option<c64> {
            let j = self.patch.step(idx, a, sa)?;
            let j = self.patch.step(j, b, sb)?;
            self.value(j)
        };
        match (corner(1, 1), corner(1, -1), corner(-1, 1), corner(-1, -1)) {
            (Some(pp), Some(pm), Some(mp), Some(mm)) => Ok((pp - pm - mp + mm) / (4.0 * ha * hb)),
            _ => Err(SymbolError::Argument("germ stencil incomplete for mixed derivative".into())),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::linalg::c;

    #[test]
    fn ex29_germ_matches_closed_form() {
        let s = catalog::ex29();
        let w0 = PhasePoint::from_coords(&[1.0, 1.0, 0.0, 0.0]);
        let patch = PhaseGrid::patch(&w0, 2, 0.05);
        let g = germ_track(&s, &w0, c(2.0, 0.0), &patch, 1e-6).unwrap();
        assert!(g.valid);
        for (w, v) in g.samples() {
            let cw = w.coords();
            let expect = cw[0] + (cw[1] * cw[1] + cw[2] * cw[2]).sqrt();
            assert!((v - c(expect, 0.0)).norm() < 1e-10);
        }
    }

    #[test]
    fn scalar_multiple_of_identity() {
        let s = MatrixSymbol::new("q Id", 1, 2, |w| {
            linalg::scale(linalg::identity(2).as_ref(), c(w.xi[0], w.x[0] * w.x[0]))
        });
        let w0 = PhasePoint::new1(0.5, 0.0);
        let g = germ_track(&s, &w0, c(0.0, 0.25), &PhaseGrid::patch(&w0, 3, 0.1), 1e-6).unwrap();
        assert!(g.valid);
        for (w, v) in g.samples() {
            assert!((v - c(w.xi[0], w.x[0] * w.x[0])).norm() < 1e-14);
        }
    }

    #[test]
    fn branch_point_invalidates() {
        let s = catalog::ex28();
        let w0 = PhasePoint::new1(0.5, 0.0);
        let patch = PhaseGrid::uniform(&[(-0.5, 0.5, 11), (0.0, 0.0, 1)]).unwrap();
        let g = germ_track(&s, &w0, c(0.5f64.sqrt(), 0.0), &patch, 1e-6).unwrap();
        assert!(!g.valid);
        assert!(g.offending.is_some());
    }

    #[test]
    fn derivatives_of_quadratic_germ() {
        let s = MatrixSymbol::scalar("q", 1, |w| c(w.xi[0], w.x[0] * w.x[0]));
        let w0 = PhasePoint::new1(0.3, 0.0);
        let g = germ_track(&s, &w0, c(0.0, 0.09), &PhaseGrid::patch(&w0, 2, 0.01), 1e-6).unwrap();
        let a = g.anchor_index();
        assert!((g.derivative(a, 0).unwrap() - c(0.0, 0.6)).norm() < 1e-10);
        assert!((g.derivative(a, 1).unwrap() - c(1.0, 0.0)).norm() < 1e-10);
        assert!((g.second_derivative(a, 0, 0).unwrap() - c(0.0, 2.0)).norm() < 1e-6);
        assert!(g.second_derivative(a, 0, 1).unwrap().norm() < 1e-8);
    }
}
