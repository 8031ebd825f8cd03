//! Quasi-symmetry and symmetrizer checks on sampled regions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use symbol_core::c64;
use symbol_core::linalg::{self, CMat};
use symbol_core::spectral::{default_fd_step, eval_and_derive};
use symbol_core::{MatrixSymbol, PhasePoint};

use crate::ClassifyError;

/// `w -> V(w)` in flat coordinates.
pub type VectorField<'a> = &'a dyn Fn(&PhasePoint) -> Vec<f64>;

#[derive(Clone, Debug, PartialEq)]
pub struct QuasiSymVerdict {
    /// Smallest eigenvalue of `Im Q` over the region.
    pub im_min: f64,
    /// Smallest eigenvalue of `Re (U* (V Q) U)` over kernel points; `+inf` when no kernel was met.
    pub kernel_c: f64,
    pub passes: bool,
    pub region: Vec<PhasePoint>,
    pub kernel_points: usize,
    pub worst_im: Option<PhasePoint>,
    pub worst_kernel: Option<PhasePoint>,
}

fn hermitian_part(a: &CMat) -> CMat {
    let s = a + linalg::adjoint(a.as_ref());
    linalg::scale(s.as_ref(), c64::new(0.5, 0.0))
}

fn kernel_of(q: &CMat, tol_rank: f64) -> Result<CMat, ClassifyError> {
    let scale = linalg::op_norm(q.as_ref())?.max(1.0);
    Ok(linalg::null_space_scaled(q.as_ref(), tol_rank, scale)?)
}

fn derivative_along(q: &MatrixSymbol, w: &PhasePoint, v: &[f64]) -> Result<(CMat, CMat), ClassifyError> {
    if v.iter().all(|x| *x == 0.0) {
        return Err(ClassifyError::Argument(format!("vector field vanishes at {w}")));
    }
    Ok(eval_and_derive(q, w, v, default_fd_step(w))?)
}

/// `Im Q >= -tol_im` on the region and `Re <(V Q) u, u> >= c_min` on unit kernel vectors.
pub fn quasi_symmetric_check(
    q: &MatrixSymbol,
    v: VectorField<'_>,
    region: &[PhasePoint],
    c_min: f64,
    tol_im: f64,
    tol_rank: f64,
) -> Result<QuasiSymVerdict, ClassifyError> {
    if region.is_empty() {
        return Err(ClassifyError::Argument("empty region".into()));
    }
    if !(c_min > 0.0) {
        return Err(ClassifyError::Argument(format!("c_min must be positive, got {c_min}")));
    }
    let mut out = QuasiSymVerdict {
        im_min: f64::INFINITY,
        kernel_c: f64::INFINITY,
        passes: false,
        region: region.to_vec(),
        kernel_points: 0,
        worst_im: None,
        worst_kernel: None,
    };
    for w in region {
        let (qw, dq) = derivative_along(q, w, &v(w))?;
        let im = linalg::im_part(qw.as_ref());
        let lm = linalg::lambda_min_hermitian(im.as_ref())?;
        if lm < out.im_min {
            out.im_min = lm;
            out.worst_im = Some(w.clone());
        }
        let u = kernel_of(&qw, tol_rank)?;
        if u.ncols() == 0 {
            continue;
        }
        out.kernel_points += 1;
        let form = hermitian_part(&linalg::compress(dq.as_ref(), u.as_ref()));
        let c = linalg::lambda_min_hermitian(form.as_ref())?;
        if c < out.kernel_c {
            out.kernel_c = c;
            out.worst_kernel = Some(w.clone());
        }
    }
    out.passes = out.im_min >= -tol_im && out.kernel_c >= c_min;
    Ok(out)
}

/// `quasi_symmetric_check` of `M P` for each `M = sum_i c_i B_i` in the sampled family.
#[allow(clippy::too_many_arguments)]
pub fn affine_family_scan(
    p: &MatrixSymbol,
    basis: &[CMat],
    coefs: &[Vec<c64>],
    v: VectorField<'_>,
    region: &[PhasePoint],
    c_min: f64,
    tol_im: f64,
    tol_rank: f64,
) -> Result<Vec<(Vec<c64>, QuasiSymVerdict)>, ClassifyError> {
    let n = p.size();
    let mut out = Vec::with_capacity(coefs.len());
    for cs in coefs {
        if cs.len() != basis.len() {
            return Err(ClassifyError::Argument("coefficient vector does not match basis".into()));
        }
        let mut m = linalg::zeros(n, n);
        for (b, c) in basis.iter().zip(cs) {
            m += linalg::scale(b.as_ref(), *c);
        }
        let ms = MatrixSymbol::new("M", p.n(), n, move |_| m.clone());
        let id = MatrixSymbol::new("Id", p.n(), n, move |_| linalg::identity(n));
        let q = MatrixSymbol::sandwich(&ms, p, &id);
        out.push((cs.clone(), quasi_symmetric_check(&q, v, region, c_min, tol_im, tol_rank)?));
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SymmetrizerVerdict {
    pub passes: bool,
    /// Minimum of `Re <M (V P) u, u> - c_min + C |P u|^2` over samples (unit `u`).
    pub min_positivity: f64,
    /// Minimum of `Im <M P u, u> + C |P u|^2` over samples.
    pub min_imaginary: f64,
    /// Exact minimum of the compressed form on `Ker P`; `+inf` when no kernel was met.
    pub kernel_c: f64,
    pub witness: Option<PhasePoint>,
}

/// Sphere-sampled check of the two symmetrizer inequalities, plus the exact kernel compression.
#[allow(clippy::too_many_arguments)]
pub fn symmetrizer_verify(
    p: &MatrixSymbol,
    m: &MatrixSymbol,
    v: VectorField<'_>,
    region: &[PhasePoint],
    c_min: f64,
    c_max: f64,
    sphere_samples: usize,
    seed: u64,
) -> Result<SymmetrizerVerdict, ClassifyError> {
    if region.is_empty() {
        return Err(ClassifyError::Argument("empty region".into()));
    }
    let n = p.size();
    let tol = 1e-9;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = SymmetrizerVerdict {
        passes: true,
        min_positivity: f64::INFINITY,
        min_imaginary: f64::INFINITY,
        kernel_c: f64::INFINITY,
        witness: None,
    };
    for w in region {
        let (pw, dp) = derivative_along(p, w, &v(w))?;
        let mw = m.eval(w)?;
        let mdp = &mw * &dp;
        let mp = &mw * &pw;
        let mut us: Vec<Vec<c64>> = (0..n)
            .map(|i| (0..n).map(|j| c64::new(if i == j { 1.0 } else { 0.0 }, 0.0)).collect())
            .collect();
        for _ in 0..sphere_samples {
            let u: Vec<c64> = (0..n).map(|_| c64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let nu = linalg::vec_norm(&u);
            if nu > 1e-6 {
                us.push(u.iter().map(|x| x / nu).collect());
            }
        }
        let ker = kernel_of(&pw, symbol_core::spectral::DEFAULT_TOL_RANK)?;
        for k in 0..ker.ncols() {
            us.push((0..n).map(|i| ker[(i, k)]).collect());
        }
        let mut bad = false;
        for u in &us {
            let pu2 = linalg::vec_norm(&linalg::mat_vec(pw.as_ref(), u)).powi(2);
            let a = linalg::form(mdp.as_ref(), u, u).re - c_min + c_max * pu2;
            let b = linalg::form(mp.as_ref(), u, u).im + c_max * pu2;
            out.min_positivity = out.min_positivity.min(a);
            out.min_imaginary = out.min_imaginary.min(b);
            bad |= a < -tol || b < -tol;
        }
        if ker.ncols() > 0 {
            let form = hermitian_part(&linalg::compress(mdp.as_ref(), ker.as_ref()));
            let c = linalg::lambda_min_hermitian(form.as_ref())?;
            out.kernel_c = out.kernel_c.min(c);
            bad |= c < c_min - tol;
        }
        if bad && out.passes {
            out.passes = false;
            out.witness = Some(w.clone());
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq)]
pub struct KernelIdentity {
    pub im_min: f64,
    pub kernel_dim: usize,
    pub adjoint_kernel_dim: usize,
    /// Largest principal angle between `Ker Q` and `Ker Q*`.
    pub angle: f64,
    /// `|Q* U| / |Q|` for an orthonormal kernel basis `U` (zero iff `Ran Q` is orthogonal to `Ker Q`).
    pub range_defect: f64,
}

/// Numerical kernels of `Q` and `Q*` and their relation.
pub fn kernel_identity(q: &CMat, tol_rank: f64) -> Result<KernelIdentity, ClassifyError> {
    let im_min = linalg::lambda_min_hermitian(linalg::im_part(q.as_ref()).as_ref())?;
    let u = kernel_of(q, tol_rank)?;
    let v = kernel_of(&linalg::adjoint(q.as_ref()), tol_rank)?;
    let angle = linalg::subspace_angle(u.as_ref(), v.as_ref())?;
    let nq = linalg::op_norm(q.as_ref())?.max(f64::MIN_POSITIVE);
    let range_defect = if u.ncols() == 0 {
        0.0
    } else {
        linalg::op_norm((linalg::adjoint(q.as_ref()) * &u).as_ref())? / nq
    };
    Ok(KernelIdentity { im_min, kernel_dim: u.ncols(), adjoint_kernel_dim: v.ncols(), angle, range_defect })
}
