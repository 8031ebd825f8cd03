//! Principal type at a point of the eigenvalue variety.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symbol_core::c64;
use symbol_core::linalg::{self, CMat};
use symbol_core::spectral::{eval_and_derive, spectral_of_matrix, DEFAULT_TOL_RANK};
use symbol_core::{MatrixSymbol, PhasePoint};

use crate::ClassifyError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    DeterminantDerivative,
    BilinearForm,
}

#[derive(Clone, Debug, PartialEq)]
pub struct PrincipalTypeVerdict {
    /// Verdict of the determinant-derivative test.
    pub is_pt: bool,
    pub witness_dir: Option<Vec<f64>>,
    /// Derivative order tested (`kappa` at the point).
    pub k_used: usize,
    pub method: Method,
    /// Both methods reached the same verdict.
    pub agree: bool,
    pub is_pt_bilinear: bool,
    /// `lambda0` is not an eigenvalue: vacuously of principal type.
    pub elliptic: bool,
    pub kappa: usize,
    pub big_k: usize,
    /// Largest `|d_nu^k det(P - lambda0)|` seen, and the threshold it was compared to.
    pub max_derivative: f64,
    pub threshold: f64,
    /// Whether the lower-order directional derivatives were numerically zero.
    pub lower_orders_vanish: bool,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PtTolerances {
    pub tol_rank: f64,
    pub tol_cluster: f64,
    /// Relative threshold for "non-zero".
    pub rel_threshold: f64,
}

impl Default for PtTolerances {
    fn default() -> Self {
        Self { tol_rank: DEFAULT_TOL_RANK, tol_cluster: 1e-6, rel_threshold: 1e-6 }
    }
}

/// The `4n` signed coordinate directions followed by `n_random` seeded unit directions.
pub fn default_directions(n: usize, n_random: usize, seed: u64) -> Vec<Vec<f64>> {
    let d = 2 * n;
    let mut out = Vec::with_capacity(2 * d + n_random);
    for j in 0..d {
        for s in [1.0, -1.0] {
            let mut v = vec![0.0; d];
            v[j] = s;
            out.push(v);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    while out.len() < 2 * d + n_random {
        let v: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let nv = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if nv > 1e-3 && nv <= 1.0 {
            out.push(v.iter().map(|x| x / nv).collect());
        }
    }
    out
}

fn factorial(k: usize) -> f64 {
    (1..=k).map(|v| v as f64).product()
}

/// Taylor coefficients of `s -> det(P(w0 + s nu) - lambda0)` up to degree `k + 2`,
/// by least squares on `2k + 5` equispaced samples.
fn det_taylor(
    sym: &MatrixSymbol,
    w0: &PhasePoint,
    lambda0: c64,
    nu: &[f64],
    k: usize,
    step: f64,
) -> Result<Vec<c64>, ClassifyError> {
    let deg = k + 2;
    let half = (k + 2) as i64;
    let mut rows = Vec::new();
    let mut rhs = Vec::new();
    for j in -half..=half {
        let s = j as f64;
        let p = sym.eval(&w0.offset(nu, s * step))?;
        rhs.push(linalg::det(linalg::shift(p.as_ref(), lambda0).as_ref()));
        rows.push((0..=deg).map(|m| s.powi(m as i32)).collect::<Vec<f64>>());
    }
    // normal equations in the scaled variable s/step; small and well conditioned
    let a = CMat::from_fn(rows.len(), deg + 1, |i, j| c64::new(rows[i][j], 0.0));
    let ata = linalg::adjoint(a.as_ref()) * &a;
    let inv = linalg::inverse(ata.as_ref())
        .ok_or_else(|| ClassifyError::Argument("singular fit matrix in determinant derivative".into()))?;
    let atb = linalg::mat_vec(linalg::adjoint(a.as_ref()).as_ref(), &rhs);
    let coef = linalg::mat_vec(inv.as_ref(), &atb);
    Ok(coef.iter().enumerate().map(|(m, c)| *c / step.powi(m as i32)).collect())
}

/// Principal type of `P` at `(w0, lambda0)` along sampled directions.
///
/// Method A tests the `kappa`-th directional derivative of `det(P - lambda0)`,
/// method B the non-degeneracy of `<d_nu P u_i, v_j>` on the kernels of
/// `P - lambda0` and `P* - conj(lambda0)`.
pub fn principal_type_at(
    sym: &MatrixSymbol,
    w0: &PhasePoint,
    lambda0: c64,
    dirs: &[Vec<f64>],
    tols: &PtTolerances,
) -> Result<PrincipalTypeVerdict, ClassifyError> {
    if dirs.is_empty() {
        return Err(ClassifyError::Argument("no direction samples".into()));
    }
    let p0 = sym.eval(w0)?;
    let sp = spectral_of_matrix(&p0, w0, lambda0, tols.tol_rank, tols.tol_cluster)?;
    let n = sym.size();
    if sp.big_k == 0 {
        return Ok(PrincipalTypeVerdict {
            is_pt: true,
            witness_dir: None,
            k_used: 0,
            method: Method::DeterminantDerivative,
            agree: true,
            is_pt_bilinear: true,
            elliptic: true,
            kappa: 0,
            big_k: 0,
            max_derivative: 0.0,
            threshold: 0.0,
            lower_orders_vanish: true,
        });
    }
    let k = sp.kappa.max(1);
    let shifted = linalg::shift(p0.as_ref(), lambda0);
    let scale = linalg::op_norm(p0.as_ref())?.max(lambda0.norm());
    let u = linalg::null_space_scaled(shifted.as_ref(), tols.tol_rank, scale)?;
    let v = linalg::null_space_scaled(linalg::adjoint(shifted.as_ref()).as_ref(), tols.tol_rank, scale)?;
    let norm_shift = linalg::op_norm(shifted.as_ref())?;
    let fit_step = 1e-2 * (1.0 + w0.norm());
    let fd_step = symbol_core::spectral::default_fd_step(w0);

    let mut derivs = Vec::with_capacity(dirs.len());
    let mut max_dp: f64 = 0.0;
    let mut best_b: f64 = 0.0;
    let mut b_scale: f64 = 0.0;
    for nu in dirs {
        if nu.len() != 2 * sym.n() {
            return Err(ClassifyError::Argument("direction has wrong dimension".into()));
        }
        let (_, dp) = eval_and_derive(sym, w0, nu, fd_step)?;
        let ndp = linalg::op_norm(dp.as_ref())?;
        max_dp = max_dp.max(ndp);
        let coef = det_taylor(sym, w0, lambda0, nu, k, fit_step)?;
        derivs.push(coef);
        if u.ncols() > 0 && u.ncols() == v.ncols() {
            let g = linalg::compress_pair(dp.as_ref(), u.as_ref(), v.as_ref());
            let s = linalg::sigma_min(g.as_ref())?;
            if s / (1.0 + ndp) > best_b / (1.0 + b_scale) {
                best_b = s;
                b_scale = ndp;
            }
        }
    }
    let threshold =
        tols.rel_threshold * factorial(k) * (1.0 + max_dp).powi(k as i32) * (1.0 + norm_shift).powi((n - k) as i32);
    let mut max_derivative = 0.0;
    let mut witness = None;
    let mut lower_orders_vanish = true;
    for (nu, coef) in dirs.iter().zip(&derivs) {
        let dk = (coef[k] * factorial(k)).norm();
        if dk > max_derivative {
            max_derivative = dk;
            witness = Some(nu.clone());
        }
        for (m, c) in coef.iter().enumerate().take(k) {
            let thr_m = tols.rel_threshold * factorial(m) * (1.0 + max_dp).powi(m as i32) * (1.0 + norm_shift).powi((n - m) as i32);
            if (*c * factorial(m)).norm() > thr_m {
                lower_orders_vanish = false;
            }
        }
    }
    let is_pt = max_derivative > threshold;
    let is_pt_bilinear = best_b > tols.rel_threshold * (1.0 + b_scale);
    Ok(PrincipalTypeVerdict {
        is_pt,
        witness_dir: if is_pt { witness } else { None },
        k_used: k,
        method: Method::DeterminantDerivative,
        agree: is_pt == is_pt_bilinear,
        is_pt_bilinear,
        elliptic: false,
        kappa: sp.kappa,
        big_k: sp.big_k,
        max_derivative,
        threshold,
        lower_orders_vanish,
    })
}
