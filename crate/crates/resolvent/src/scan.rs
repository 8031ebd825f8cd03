use faer::c64;
use quantize::{GridSpec, QuantizedOperator};
use rayon::prelude::*;

use crate::{sigma_min_at, ResolventError};

/// Rectangular lattice of spectral parameters; index `i_im * re.len() + i_re`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZLattice {
    pub re: Vec<f64>,
    pub im: Vec<f64>,
}

impl ZLattice {
    pub fn uniform(re: (f64, f64, usize), im: (f64, f64, usize)) -> Result<Self, ResolventError> {
        if re.2 == 0 || im.2 == 0 {
            return Err(ResolventError::Argument("empty lattice".into()));
        }
        Ok(Self { re: symbol_core::phase::linspace(re.0, re.1, re.2), im: symbol_core::phase::linspace(im.0, im.1, im.2) })
    }

    pub fn len(&self) -> usize {
        self.re.len() * self.im.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn point(&self, idx: usize) -> c64 {
        let n = self.re.len();
        c64::new(self.re[idx % n], self.im[idx / n])
    }

    pub fn points(&self) -> Vec<c64> {
        (0..self.len()).map(|i| self.point(i)).collect()
    }
}

#[derive(Clone, Debug)]
pub struct PseudospectrumScan {
    pub lattice: ZLattice,
    pub sigma_min: Vec<f64>,
    pub h: f64,
    pub grid: GridSpec,
}

impl PseudospectrumScan {
    /// Neighbour pairs violating `|s(z) - s(z')| <= |z - z'|` beyond `tol`.
    pub fn lipschitz_violations(&self, tol: f64) -> Vec<(usize, usize)> {
        let n = self.lattice.re.len();
        let mut out = Vec::new();
        for i in 0..self.lattice.len() {
            let mut nbs = Vec::new();
            if i % n + 1 < n {
                nbs.push(i + 1);
            }
            if i + n < self.lattice.len() {
                nbs.push(i + n);
            }
            for j in nbs {
                let dz = (self.lattice.point(i) - self.lattice.point(j)).norm();
                if (self.sigma_min[i] - self.sigma_min[j]).abs() > dz + tol {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Lattice points with `sigma_min <= eps`.
    pub fn below(&self, eps: f64) -> Vec<c64> {
        self.sigma_min
            .iter()
            .enumerate()
            .filter(|(_, &s)| s <= eps)
            .map(|(i, _)| self.lattice.point(i))
            .collect()
    }
}

/// `sigma_min` over the lattice; points are evaluated in parallel and merged by index.
pub fn scan(op: &QuantizedOperator, lattice: &ZLattice) -> Result<PseudospectrumScan, ResolventError> {
    if lattice.is_empty() {
        return Err(ResolventError::Argument("empty lattice".into()));
    }
    let sigma_min = (0..lattice.len())
        .into_par_iter()
        .map(|i| sigma_min_at(op, lattice.point(i)))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(PseudospectrumScan { lattice: lattice.clone(), sigma_min, h: op.grid.h, grid: op.grid })
}
