//! Reduction of an unbounded symbol to a bounded one by a Moebius map.

use faer::c64;

use crate::linalg::{self, c};
use crate::{MatrixSymbol, PhasePoint, SymbolError};

/// `Q = (P - z1)^{-1} (P - z2)` with the spectral map back to `P`.
#[derive(Clone, Debug)]
pub struct Moebius {
    pub symbol: MatrixSymbol,
    pub z1: c64,
    pub z2: c64,
}

impl Moebius {
    /// `zeta -> (zeta z1 - z2) / (zeta - 1)`; `None` at the pole `zeta = 1`.
    pub fn map(&self, zeta: c64) -> Option<c64> {
        let d = zeta - c(1.0, 0.0);
        if d.norm() == 0.0 {
            None
        } else {
            Some((zeta * self.z1 - self.z2) / d)
        }
    }

    /// Relative defect of `(Q - zeta)^{-1} = (1 - zeta)^{-1} (P - z1)(P - map(zeta))^{-1}` at `w`.
    pub fn identity_residual(&self, p: &MatrixSymbol, w: &PhasePoint, zeta: c64) -> Result<f64, SymbolError> {
        let mu = self.map(zeta).ok_or_else(|| SymbolError::Argument("zeta = 1 is the pole".into()))?;
        let pw = p.eval(w)?;
        let q = self.symbol.eval(w)?;
        let singular = |what: &str| SymbolError::Conditioning { at: w.clone(), sigma_min: 0.0, what: what.into() };
        let lhs = linalg::inverse(linalg::shift(q.as_ref(), zeta).as_ref()).ok_or_else(|| singular("Q - zeta"))?;
        let pm = linalg::inverse(linalg::shift(pw.as_ref(), mu).as_ref()).ok_or_else(|| singular("P - map(zeta)"))?;
        let rhs = linalg::scale((linalg::shift(pw.as_ref(), self.z1) * pm).as_ref(), c(1.0, 0.0) / (c(1.0, 0.0) - zeta));
        Ok(linalg::frobenius((&lhs - &rhs).as_ref()) / linalg::frobenius(lhs.as_ref()).max(f64::MIN_POSITIVE))
    }
}

/// Build `Q` and check that `P - z1` stays invertible (`sigma_min > tol`) on `samples`.
pub fn moebius_reduce(
    p: &MatrixSymbol,
    z1: c64,
    z2: c64,
    samples: &[PhasePoint],
    tol: f64,
) -> Result<Moebius, SymbolError> {
    for w in samples {
        let s = linalg::sigma_min(linalg::shift(p.eval(w)?.as_ref(), z1).as_ref())?;
        if !(s > tol) {
            return Err(SymbolError::Conditioning { at: w.clone(), sigma_min: s, what: "P - z1".into() });
        }
    }
    let pc = p.clone();
    let size = p.size();
    let q = MatrixSymbol::new(format!("moebius({})", p.name()), p.n(), size, move |w| {
        let pw = pc.eval(w).unwrap_or_else(|_| linalg::scale(linalg::identity(size).as_ref(), c(f64::NAN, 0.0)));
        match linalg::inverse(linalg::shift(pw.as_ref(), z1).as_ref()) {
            Some(inv) => inv * linalg::shift(pw.as_ref(), z2),
            None => linalg::scale(linalg::identity(size).as_ref(), c(f64::NAN, 0.0)),
        }
    })
    .bounded(true);
    Ok(Moebius { symbol: q, z1, z2 })
}
