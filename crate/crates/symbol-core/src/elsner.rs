//! Eigenvalue perturbation bound for general matrices.

use faer::c64;
use itertools::Itertools;

use crate::linalg::{self, CMat};
use crate::SymbolError;

#[derive(Clone, Debug)]
pub struct ElsnerCheck {
    /// Optimal matching distance `min_perm max_i |a_i - b_perm(i)|`.
    pub dist: f64,
    pub bound: f64,
    pub holds: bool,
}

/// Largest supported size for the exhaustive permutation matching.
pub const ELSNER_MAX_N: usize = 6;

/// Compare the optimal matching distance of the spectra of `a` and `b`
/// with `N (2 max(|A|,|B|))^{1-1/N} |A-B|^{1/N}`.
pub fn elsner_check(a: &CMat, b: &CMat) -> Result<ElsnerCheck, SymbolError> {
    let n = a.nrows();
    if a.ncols() != n || b.nrows() != n || b.ncols() != n || n == 0 {
        return Err(SymbolError::Argument("elsner_check needs square matrices of equal size".into()));
    }
    if n > ELSNER_MAX_N {
        return Err(SymbolError::Argument(format!("elsner_check supports N <= {ELSNER_MAX_N}, got {n}")));
    }
    let ea = linalg::eigenvalues(a.as_ref())?;
    let eb = linalg::eigenvalues(b.as_ref())?;
    let dist = matching_distance(&ea, &eb);
    let na = linalg::op_norm(a.as_ref())?;
    let nb = linalg::op_norm(b.as_ref())?;
    let diff = linalg::op_norm((a - b).as_ref())?;
    let nf = n as f64;
    let bound = nf * (2.0 * na.max(nb)).powf(1.0 - 1.0 / nf) * diff.powf(1.0 / nf);
    Ok(ElsnerCheck { dist, bound, holds: dist <= bound + 1e-9 })
}

pub fn matching_distance(a: &[c64], b: &[c64]) -> f64 {
    (0..b.len())
        .permutations(b.len())
        .map(|p| a.iter().zip(&p).map(|(x, &j)| (x - b[j]).norm()).fold(0.0, f64::max))
        .fold(f64::INFINITY, f64::min)
}
