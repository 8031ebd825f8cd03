//! Pointwise spectral analysis of symbols: multiplicities, eigenvalue clouds,
//! eigenvalues at infinity and the singular set Xi.

use faer::c64;

use crate::linalg::{self, CMat};
use crate::{MatrixSymbol, PhaseGrid, PhasePoint, SymbolError};

/// Default finite-difference step `1e-4 (1 + |w|)`.
pub fn default_fd_step(w: &PhasePoint) -> f64 {
    1e-4 * (1.0 + w.norm())
}

/// Default cluster radius `1e-6 |P(w)|` (floored so that P = 0 still clusters round-off).
pub fn default_tol_cluster(p: &CMat) -> f64 {
    let s = linalg::op_norm(p.as_ref()).unwrap_or(0.0);
    (1e-6 * s).max(1e-12)
}

pub const DEFAULT_TOL_RANK: f64 = 1e-8;

/// `(P(w), <dir, dP(w)>)`, from the analytic oracle when present, else a
/// fourth-order central difference with the given step.
pub fn eval_and_derive(
    sym: &MatrixSymbol,
    w: &PhasePoint,
    dir: &[f64],
    step: f64,
) -> Result<(CMat, CMat), SymbolError> {
    if !(step > 0.0) {
        return Err(SymbolError::Argument(format!("step must be positive, got {step}")));
    }
    if dir.len() != 2 * sym.n() || dir.iter().all(|&d| d == 0.0) {
        return Err(SymbolError::Argument("direction must be a non-zero 2n-vector".into()));
    }
    let p = sym.eval(w)?;
    let d = match sym.deriv_oracle(w, dir) {
        Some(d) => d,
        None => {
            let f = |s: f64| sym.eval(&w.offset(dir, s));
            let (p1, m1, p2, m2) = (f(step)?, f(-step)?, f(2.0 * step)?, f(-2.0 * step)?);
            let k = 1.0 / (12.0 * step);
            CMat::from_fn(p.nrows(), p.ncols(), |i, j| {
                (m2[(i, j)] - p2[(i, j)] + (p1[(i, j)] - m1[(i, j)]) * 8.0) * k
            })
        }
    };
    if !linalg::is_finite(d.as_ref()) {
        return Err(SymbolError::NonFinite(w.clone()));
    }
    Ok((p, d))
}

/// Eigenvalue cluster: mean value and algebraic multiplicity.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Cluster {
    pub value: c64,
    pub mult: usize,
}

/// Single-linkage clustering at radius `tol`; clusters sorted by (re, im).
pub fn cluster_eigenvalues(eigs: &[c64], tol: f64) -> Vec<Cluster> {
    let n = eigs.len();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], i: usize) -> usize {
        let mut r = i;
        while p[r] != r {
            r = p[r];
        }
        let mut k = i;
        while p[k] != r {
            let nx = p[k];
            p[k] = r;
            k = nx;
        }
        r
    }
    for i in 0..n {
        for j in i + 1..n {
            if (eigs[i] - eigs[j]).norm() <= tol {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: Vec<(usize, Vec<c64>)> = Vec::new();
    for i in 0..n {
        let r = find(&mut parent, i);
        match groups.iter_mut().find(|g| g.0 == r) {
            Some(g) => g.1.push(eigs[i]),
            None => groups.push((r, vec![eigs[i]])),
        }
    }
    let mut out: Vec<Cluster> = groups
        .into_iter()
        .map(|(_, v)| Cluster {
            value: v.iter().copied().sum::<c64>() / v.len() as f64,
            mult: v.len(),
        })
        .collect();
    out.sort_by(|a, b| cmp_complex(a.value, b.value));
    out
}

pub fn cmp_complex(a: c64, b: c64) -> std::cmp::Ordering {
    a.re.total_cmp(&b.re).then(a.im.total_cmp(&b.im))
}

/// Multiplicities of `lambda` at a phase point.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralPoint {
    pub w: PhasePoint,
    pub lambda: c64,
    /// Geometric multiplicity.
    pub kappa: usize,
    /// Algebraic multiplicity.
    pub big_k: usize,
}

pub fn spectral_at(
    sym: &MatrixSymbol,
    w: &PhasePoint,
    lambda: c64,
    tol_rank: f64,
    tol_cluster: f64,
) -> Result<SpectralPoint, SymbolError> {
    if !(tol_rank > 0.0 && tol_rank < 1.0 && tol_cluster > 0.0 && tol_cluster < 1.0) {
        return Err(SymbolError::Argument("tolerances must lie in (0, 1)".into()));
    }
    let p = sym.eval(w)?;
    spectral_of_matrix(&p, w, lambda, tol_rank, tol_cluster)
}

pub fn spectral_of_matrix(
    p: &CMat,
    w: &PhasePoint,
    lambda: c64,
    tol_rank: f64,
    tol_cluster: f64,
) -> Result<SpectralPoint, SymbolError> {
    let eigs = linalg::eigenvalues(p.as_ref())?;
    let big_k = eigs.iter().filter(|e| (**e - lambda).norm() <= tol_cluster).count();
    let kappa = if big_k == 0 {
        0
    } else {
        let scale = linalg::op_norm(p.as_ref())?.max(lambda.norm());
        let rank = linalg::numerical_rank_scaled(linalg::shift(p.as_ref(), lambda).as_ref(), tol_rank, scale)?;
        // the two thresholds are independent; kappa <= K is enforced rather than assumed
        (p.nrows() - rank).min(big_k)
    };
    Ok(SpectralPoint { w: w.clone(), lambda, kappa, big_k })
}

/// All eigenvalues over a grid: grid-major, then by (re, im) at each point.
pub fn sigma_sample(sym: &MatrixSymbol, grid: &PhaseGrid) -> Result<Vec<c64>, SymbolError> {
    if grid.is_empty() {
        return Err(SymbolError::Argument("empty grid".into()));
    }
    let mut out = Vec::with_capacity(grid.len() * sym.size());
    for w in grid.points() {
        let mut e = linalg::eigenvalues(sym.eval(&w)?.as_ref())?;
        e.sort_by(|a, b| cmp_complex(*a, *b));
        out.extend(e);
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct InfinityProbe {
    pub in_sigma_inf: bool,
    /// Minimum of `sigma_min(P(w) - lambda)` over all shell samples.
    pub min_defect: f64,
    /// Same minimum restricted to the two outermost shells.
    pub outer_defect: f64,
}

/// Shell sampling for eigenvalues at infinity: `lambda` is reported in
/// `Sigma_inf` when the defect on the two outermost shells drops below `1/bound_c`.
pub fn sigma_infinity_probe(
    sym: &MatrixSymbol,
    lambda: c64,
    radii: &[f64],
    dirs: &[Vec<f64>],
    bound_c: f64,
) -> Result<InfinityProbe, SymbolError> {
    if radii.is_empty() || dirs.is_empty() {
        return Err(SymbolError::Argument("empty shells".into()));
    }
    if radii.windows(2).any(|r| r[1] <= r[0]) {
        return Err(SymbolError::Argument("radii must be increasing".into()));
    }
    if !(bound_c > 0.0) {
        return Err(SymbolError::Argument("bound_c must be positive".into()));
    }
    let origin = vec![0.0; 2 * sym.n()];
    let mut min_defect = f64::INFINITY;
    let mut outer_defect = f64::INFINITY;
    let outer_from = radii.len().saturating_sub(2);
    for (k, &r) in radii.iter().enumerate() {
        for d in dirs {
            if d.len() != origin.len() {
                return Err(SymbolError::Argument("direction has wrong dimension".into()));
            }
            let w = PhasePoint::from_coords(&origin).offset(d, r);
            let p = sym.eval(&w)?;
            let s = linalg::sigma_min(linalg::shift(p.as_ref(), lambda).as_ref())?;
            min_defect = min_defect.min(s);
            if k >= outer_from {
                outer_defect = outer_defect.min(s);
            }
        }
    }
    Ok(InfinityProbe { in_sigma_inf: outer_defect < 1.0 / bound_c, min_defect, outer_defect })
}

/// Status of an eigenvalue cluster with respect to `Xi(P)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum XiStatus {
    Regular,
    Flagged,
    Indeterminate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FlaggedCluster {
    pub cluster: Cluster,
    pub status: XiStatus,
}

/// Clusters at every grid point with their Xi status.
///
/// A cluster is flagged when, at some axis neighbour, every nearest cluster
/// (ties within `tol_cluster`) has strictly smaller multiplicity; multiplicity
/// is upper semicontinuous, so these are the points where it is not locally
/// constant. Mixed ties make the cluster indeterminate.
pub fn cluster_flags(
    sym: &MatrixSymbol,
    grid: &PhaseGrid,
    tol_cluster: f64,
) -> Result<Vec<Vec<FlaggedCluster>>, SymbolError> {
    let mut clusters = Vec::with_capacity(grid.len());
    for w in grid.points() {
        let e = linalg::eigenvalues(sym.eval(&w)?.as_ref())?;
        clusters.push(cluster_eigenvalues(&e, tol_cluster));
    }
    let mut out = Vec::with_capacity(grid.len());
    for idx in 0..grid.len() {
        let nb = grid.neighbors(idx);
        let mut row = Vec::with_capacity(clusters[idx].len());
        for c in &clusters[idx] {
            let mut status = XiStatus::Regular;
            for &j in &nb {
                let cand = nearest_clusters(&clusters[j], c.value, tol_cluster);
                let smaller = cand.iter().filter(|d| d.mult < c.mult).count();
                if smaller == cand.len() && !cand.is_empty() {
                    status = XiStatus::Flagged;
                    break;
                } else if smaller > 0 {
                    status = XiStatus::Indeterminate;
                }
            }
            row.push(FlaggedCluster { cluster: *c, status });
        }
        out.push(row);
    }
    Ok(out)
}

/// Clusters whose distance to `target` is within `tol` of the minimum.
pub fn nearest_clusters(cs: &[Cluster], target: c64, tol: f64) -> Vec<Cluster> {
    let dmin = cs.iter().map(|c| (c.value - target).norm()).fold(f64::INFINITY, f64::min);
    cs.iter().copied().filter(|c| (c.value - target).norm() <= dmin + tol).collect()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct XiReport {
    pub xi_points: Vec<(PhasePoint, c64)>,
    pub sigma_ws: Vec<c64>,
    /// Strongly singular values as seen on this window only.
    pub sigma_ss: Vec<c64>,
    pub indeterminate: Vec<(PhasePoint, c64)>,
}

pub fn xi_classify(sym: &MatrixSymbol, grid: &PhaseGrid, tol_cluster: f64) -> Result<XiReport, SymbolError> {
    let flags = cluster_flags(sym, grid, tol_cluster)?;
    let mut rep = XiReport::default();
    for (idx, row) in flags.iter().enumerate() {
        for fc in row {
            match fc.status {
                XiStatus::Flagged => {
                    rep.xi_points.push((grid.point(idx), fc.cluster.value));
                    rep.sigma_ws.push(fc.cluster.value);
                }
                XiStatus::Indeterminate => rep.indeterminate.push((grid.point(idx), fc.cluster.value)),
                XiStatus::Regular => {}
            }
        }
    }
    let mut candidates: Vec<c64> = Vec::new();
    for &v in &rep.sigma_ws {
        if !candidates.iter().any(|c| (*c - v).norm() <= tol_cluster) {
            candidates.push(v);
        }
    }
    for lam in candidates {
        let all_flagged = flags.iter().all(|row| {
            row.iter()
                .filter(|fc| (fc.cluster.value - lam).norm() <= tol_cluster)
                .all(|fc| fc.status == XiStatus::Flagged)
        });
        if all_flagged {
            rep.sigma_ss.push(lam);
        }
    }
    Ok(rep)
}
