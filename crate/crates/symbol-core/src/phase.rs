use std::fmt;

use crate::SymbolError;

/// A point `w = (x, xi)` of `T*R^n`, n in {1, 2}.
#[derive(Clone, Debug, PartialEq)]
pub struct PhasePoint {
    pub x: Vec<f64>,
    pub xi: Vec<f64>,
}

impl PhasePoint {
    pub fn new(x: Vec<f64>, xi: Vec<f64>) -> Result<Self, SymbolError> {
        if x.len() != xi.len() || !(1..=2).contains(&x.len()) {
            return Err(SymbolError::Argument(format!(
                "phase point needs n in {{1,2}} with matching lengths, got x:{} xi:{}",
                x.len(),
                xi.len()
            )));
        }
        if x.iter().chain(xi.iter()).any(|v| !v.is_finite()) {
            return Err(SymbolError::Argument("phase point has non-finite component".into()));
        }
        Ok(Self { x, xi })
    }

    /// 1-D point `(x, xi)`.
    pub fn new1(x: f64, xi: f64) -> Self {
        Self { x: vec![x], xi: vec![xi] }
    }

    /// Point from the flat coordinate vector `(x_1..x_n, xi_1..xi_n)`.
    pub fn from_coords(c: &[f64]) -> Self {
        let n = c.len() / 2;
        Self { x: c[..n].to_vec(), xi: c[n..].to_vec() }
    }

    pub fn n(&self) -> usize {
        self.x.len()
    }

    pub fn coords(&self) -> Vec<f64> {
        let mut v = self.x.clone();
        v.extend_from_slice(&self.xi);
        v
    }

    pub fn norm(&self) -> f64 {
        self.x.iter().chain(self.xi.iter()).map(|v| v * v).sum::<f64>().sqrt()
    }

    /// `w + s * dir` in flat coordinates.
    pub fn offset(&self, dir: &[f64], s: f64) -> Self {
        let c: Vec<f64> = self.coords().iter().zip(dir).map(|(a, d)| a + s * d).collect();
        Self::from_coords(&c)
    }
}

impl fmt::Display for PhasePoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(x={:?}, xi={:?})", self.x, self.xi)
    }
}

/// Tensor grid over the flat coordinates of `T*R^n`.
///
/// Linear indices are row-major: the first axis varies slowest.
#[derive(Clone, Debug, PartialEq)]
pub struct PhaseGrid {
    axes: Vec<Vec<f64>>,
}

impl PhaseGrid {
    pub fn new(axes: Vec<Vec<f64>>) -> Result<Self, SymbolError> {
        if axes.len() != 2 && axes.len() != 4 {
            return Err(SymbolError::Argument(format!(
                "phase grid needs 2 or 4 axes, got {}",
                axes.len()
            )));
        }
        if axes.iter().any(|a| a.is_empty()) {
            return Err(SymbolError::Argument("phase grid has an empty axis".into()));
        }
        Ok(Self { axes })
    }

    /// Uniform grid from `(lo, hi, count)` per axis.
    pub fn uniform(spec: &[(f64, f64, usize)]) -> Result<Self, SymbolError> {
        Self::new(spec.iter().map(|&(lo, hi, k)| linspace(lo, hi, k)).collect())
    }

    /// Patch of `2r+1` points per axis centred on `w` with spacing `step`.
    pub fn patch(w: &PhasePoint, r: usize, step: f64) -> Self {
        let axes = w
            .coords()
            .iter()
            .map(|&c0| (0..2 * r + 1).map(|k| c0 + (k as f64 - r as f64) * step).collect())
            .collect();
        Self { axes }
    }

    pub fn n(&self) -> usize {
        self.axes.len() / 2
    }

    pub fn axes(&self) -> &[Vec<f64>] {
        &self.axes
    }

    pub fn shape(&self) -> Vec<usize> {
        self.axes.iter().map(|a| a.len()).collect()
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn multi_index(&self, mut idx: usize) -> Vec<usize> {
        let mut out = vec![0; self.axes.len()];
        for (k, a) in self.axes.iter().enumerate().rev() {
            out[k] = idx % a.len();
            idx /= a.len();
        }
        out
    }

    pub fn linear_index(&self, mi: &[usize]) -> usize {
        let mut idx = 0;
        for (k, a) in self.axes.iter().enumerate() {
            idx = idx * a.len() + mi[k];
        }
        idx
    }

    pub fn point(&self, idx: usize) -> PhasePoint {
        let mi = self.multi_index(idx);
        let c: Vec<f64> = mi.iter().enumerate().map(|(k, &i)| self.axes[k][i]).collect();
        PhasePoint::from_coords(&c)
    }

    pub fn points(&self) -> impl Iterator<Item = PhasePoint> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    /// Neighbour of `idx` one step along `axis` in direction `dir` (+1/-1).
    pub fn step(&self, idx: usize, axis: usize, dir: isize) -> Option<usize> {
        let mut mi = self.multi_index(idx);
        let j = mi[axis] as isize + dir;
        if j < 0 || j >= self.axes[axis].len() as isize {
            return None;
        }
        mi[axis] = j as usize;
        Some(self.linear_index(&mi))
    }

    /// Axis-adjacent neighbours in axis order, minus before plus.
    pub fn neighbors(&self, idx: usize) -> Vec<usize> {
        self.neighbors_ordered(idx, &(0..self.axes.len()).collect::<Vec<_>>())
    }

    pub fn neighbors_ordered(&self, idx: usize, axis_order: &[usize]) -> Vec<usize> {
        let mut out = Vec::with_capacity(2 * axis_order.len());
        for &a in axis_order {
            for d in [-1, 1] {
                if let Some(j) = self.step(idx, a, d) {
                    out.push(j);
                }
            }
        }
        out
    }

    /// Index of the grid point nearest to `w` (per-axis nearest).
    pub fn locate(&self, w: &PhasePoint) -> Option<usize> {
        let c = w.coords();
        if c.len() != self.axes.len() {
            return None;
        }
        let mi: Vec<usize> = self
            .axes
            .iter()
            .zip(&c)
            .map(|(a, &v)| {
                (0..a.len()).min_by(|&i, &j| (a[i] - v).abs().total_cmp(&(a[j] - v).abs())).unwrap()
            })
            .collect();
        Some(self.linear_index(&mi))
    }

    /// Spacing along `axis` (assumes uniform spacing; 0 for a single point).
    pub fn spacing(&self, axis: usize) -> f64 {
        let a = &self.axes[axis];
        if a.len() < 2 {
            0.0
        } else {
            (a[a.len() - 1] - a[0]) / (a.len() - 1) as f64
        }
    }
}

pub fn linspace(lo: f64, hi: f64, k: usize) -> Vec<f64> {
    match k {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64).collect(),
    }
}
