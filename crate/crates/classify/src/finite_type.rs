//! Sublevel measures of `lambda_min(F(t))` and the finite-type order.

use symbol_core::linalg::{self, CMat};
use symbol_core::c64;

use crate::ClassifyError;

pub type MatrixPath<'a> = &'a dyn Fn(f64) -> CMat;

fn lambda_min_checked(f: MatrixPath<'_>, t: f64) -> Result<f64, ClassifyError> {
    let m = f(t);
    let d = linalg::max_abs((&m - linalg::adjoint(m.as_ref())).as_ref());
    if d > 1e-10 * (1.0 + linalg::max_abs(m.as_ref())) {
        return Err(ClassifyError::Argument(format!("F({t}) is not Hermitian (defect {d:e})")));
    }
    Ok(linalg::lambda_min_hermitian(m.as_ref())?)
}

fn centers(window: f64, grid_m: usize) -> impl Iterator<Item = f64> {
    let w = 2.0 * window / grid_m as f64;
    (0..grid_m).map(move |i| -window + (i as f64 + 0.5) * w)
}

/// Cell membership `lambda_min(F(t_i)) <= delta` at the cell centres of `[-T, T]`.
pub fn omega_cells(f: MatrixPath<'_>, window: f64, grid_m: usize, delta: f64) -> Result<Vec<bool>, ClassifyError> {
    if !(window > 0.0) || grid_m == 0 {
        return Err(ClassifyError::Argument("window and grid_m must be positive".into()));
    }
    centers(window, grid_m).map(|t| Ok(lambda_min_checked(f, t)? <= delta)).collect()
}

/// `|Omega_delta| ~ (2T / m) #{i : lambda_min(F(t_i)) <= delta}`.
pub fn omega_delta(f: MatrixPath<'_>, window: f64, grid_m: usize, delta: f64) -> Result<f64, ClassifyError> {
    if !(delta > 0.0 && delta <= 1.0) {
        return Err(ClassifyError::Argument(format!("delta must lie in (0, 1], got {delta}")));
    }
    let n = omega_cells(f, window, grid_m, delta)?.iter().filter(|b| **b).count();
    Ok(2.0 * window / grid_m as f64 * n as f64)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteTypeReport {
    /// Slope of `log |Omega_delta|` against `log delta`.
    pub mu_fit: f64,
    pub r2: f64,
    pub k_order: Option<u32>,
    pub delta_range: (f64, f64),
    pub elliptic: bool,
    pub measures: Vec<f64>,
    /// `(t0, fitted vanishing order)` at each zero of `lambda_min`.
    pub zero_orders: Vec<(f64, f64)>,
    pub diagnostics: Vec<String>,
}

/// Agreement needed between `mu_fit` and `1/k` before `k` is claimed.
pub const MU_TOLERANCE: f64 = 0.05;

fn line_fit(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - my - slope * (a - mx)).powi(2)).sum();
    let r2 = if syy <= 1e-24 { 1.0 } else { (1.0 - ss_res / syy).clamp(0.0, 1.0) };
    (slope, r2)
}

/// Golden-section minimisation of `lambda_min` on `[a, b]`.
fn refine_min(f: MatrixPath<'_>, mut a: f64, mut b: f64) -> Result<f64, ClassifyError> {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (lambda_min_checked(f, c)?, lambda_min_checked(f, d)?);
    for _ in 0..200 {
        if (b - a).abs() < 1e-14 * (1.0 + a.abs()) {
            break;
        }
        if fc < fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = lambda_min_checked(f, c)?;
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = lambda_min_checked(f, d)?;
        }
    }
    Ok(0.5 * (a + b))
}

/// Measure fit of `|Omega_delta|` cross-checked against the vanishing order of
/// `lambda_min` at its zeros; `k` is claimed only when both give the same even integer.
pub fn finite_type_order(
    f: MatrixPath<'_>,
    window: f64,
    deltas: &[f64],
    grid_m: usize,
) -> Result<FiniteTypeReport, ClassifyError> {
    if deltas.len() < 3 {
        return Err(ClassifyError::Argument("need at least 3 delta values".into()));
    }
    let dmin = deltas.iter().copied().fold(f64::INFINITY, f64::min);
    let dmax = deltas.iter().copied().fold(0.0, f64::max);
    let mut rep = FiniteTypeReport {
        mu_fit: 0.0,
        r2: 0.0,
        k_order: None,
        delta_range: (dmin, dmax),
        elliptic: false,
        measures: Vec::with_capacity(deltas.len()),
        zero_orders: Vec::new(),
        diagnostics: Vec::new(),
    };
    let ends_ok = lambda_min_checked(f, -window)? > dmax && lambda_min_checked(f, window)? > dmax;
    if !ends_ok {
        rep.diagnostics.push(format!(
            "lambda_min(F) <= delta_max at a window end; 0 may lie in Sigma_inf(F), order not claimed"
        ));
    }
    for &d in deltas {
        rep.measures.push(omega_delta(f, window, grid_m, d)?);
    }
    if rep.measures.iter().all(|m| *m == 0.0) {
        let lmin = centers(window, grid_m).map(|t| lambda_min_checked(f, t)).collect::<Result<Vec<_>, _>>()?;
        let floor = lmin.iter().copied().fold(f64::INFINITY, f64::min);
        rep.elliptic = true;
        rep.k_order = Some(0);
        rep.r2 = 1.0;
        rep.diagnostics.push(format!("Omega_delta empty for all delta (lambda_min >= {floor:.3e}): elliptic"));
        return Ok(rep);
    }
    let full = 2.0 * window;
    if rep.measures.iter().all(|m| (*m - full).abs() <= full * 1e-12) {
        rep.diagnostics.push("Omega_delta fills the window for every delta: not of finite type".into());
    }
    let (lx, ly): (Vec<f64>, Vec<f64>) =
        deltas.iter().zip(&rep.measures).filter(|(_, m)| **m > 0.0).map(|(d, m)| (d.ln(), m.ln())).unzip();
    if lx.len() < deltas.len() {
        rep.diagnostics.push(format!("{} delta values with empty Omega_delta dropped", deltas.len() - lx.len()));
    }
    if lx.len() >= 2 {
        let (s, r2) = line_fit(&lx, &ly);
        rep.mu_fit = s;
        rep.r2 = r2;
    }

    // zeros of lambda_min: grid-local minima below the smallest delta, refined
    let w = 2.0 * window / grid_m as f64;
    let ts: Vec<f64> = centers(window, grid_m).collect();
    let lm: Vec<f64> = ts.iter().map(|&t| lambda_min_checked(f, t)).collect::<Result<_, _>>()?;
    let mut zeros = Vec::new();
    for i in 1..grid_m.saturating_sub(1) {
        if lm[i] <= dmin && lm[i] <= lm[i - 1] && lm[i] < lm[i + 1] {
            let t0 = refine_min(f, ts[i] - w, ts[i] + w)?;
            // round-off jitter in a flat minimum yields several grid minima for one zero
            if zeros.last().map_or(true, |&z: &f64| t0 - z > 4.0 * w) {
                zeros.push(t0);
            }
        }
    }
    for &t0 in &zeros {
        let floor = lambda_min_checked(f, t0)?;
        let scale = linalg::op_norm(f(t0).as_ref())?.max(linalg::op_norm(f(t0 + 0.1).as_ref())?).max(1e-300);
        if floor > 1e-10 * scale.max(1.0) {
            rep.diagnostics.push(format!("lambda_min has a positive minimum {floor:.3e} at t = {t0:.6}"));
            continue;
        }
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for j in 0..6 {
            let s = 0.1 * 0.5f64.powi(j);
            for sign in [-1.0, 1.0] {
                let v = lambda_min_checked(f, t0 + sign * s)? - floor;
                if v > 1e-13 * scale.max(1.0) {
                    xs.push(s.ln());
                    ys.push(v.ln());
                }
            }
        }
        if xs.len() >= 4 {
            let (order, _) = line_fit(&xs, &ys);
            rep.zero_orders.push((t0, order));
        } else {
            rep.diagnostics.push(format!("vanishing order at t = {t0:.6} not resolved"));
        }
    }

    let even = |v: f64| -> u32 { (2.0 * (v / 2.0).round()).max(2.0) as u32 };
    let k_zero = rep.zero_orders.iter().map(|(_, o)| even(*o)).max();
    let k_meas = (rep.r2 >= 0.95 && rep.mu_fit > 0.0).then(|| even(1.0 / rep.mu_fit));
    match (k_meas, k_zero) {
        (Some(a), Some(b)) if a == b && ends_ok && (rep.mu_fit - 1.0 / a as f64).abs() <= MU_TOLERANCE => {
            rep.k_order = Some(a);
        }
        (a, b) => rep.diagnostics.push(format!(
            "order not claimed: measure fit gives {a:?} (mu = {:.4}, r2 = {:.4}), zero fit gives {b:?}",
            rep.mu_fit, rep.r2
        )),
    }
    Ok(rep)
}

#[derive(Clone, Debug, PartialEq)]
pub struct HessianCheck {
    pub holds: bool,
    /// `sup |F''|` estimated on the window.
    pub f2_sup: f64,
    /// Worst `(u, lhs, rhs)` seen.
    pub worst: Option<(Vec<c64>, f64, f64)>,
}

/// `|<F'(t0) u, u>|^2 <= C |F''|_inf <F(t0) u, u> |u|^2` on the sampled `u`.
pub fn hessian_bound_check(
    f: MatrixPath<'_>,
    t0: f64,
    window: (f64, f64),
    u_samples: &[Vec<c64>],
    c: f64,
) -> Result<HessianCheck, ClassifyError> {
    let (a, b) = window;
    if !(b > a) || t0 < a || t0 > b {
        return Err(ClassifyError::Argument("t0 must lie in a non-empty window".into()));
    }
    let step = 1e-3 * (1.0 + t0.abs());
    let d1 = {
        let g = |s: f64| f(t0 + s * step);
        let m = (&g(-2.0) - &g(2.0)) + linalg::scale((&g(1.0) - &g(-1.0)).as_ref(), c64::new(8.0, 0.0));
        linalg::scale(m.as_ref(), c64::new(1.0 / (12.0 * step), 0.0))
    };
    let h2 = 1e-3 * (b - a).max(1.0);
    let mut f2_sup: f64 = 0.0;
    let samples = 2001;
    for i in 0..samples {
        let t = a + (b - a) * i as f64 / (samples - 1) as f64;
        let d2 = &f(t + h2) + &f(t - h2) - linalg::scale(f(t).as_ref(), c64::new(2.0, 0.0));
        f2_sup = f2_sup.max(linalg::op_norm(d2.as_ref())? / (h2 * h2));
    }
    let f0 = f(t0);
    let mut out = HessianCheck { holds: true, f2_sup, worst: None };
    let mut worst_gap = f64::INFINITY;
    for u in u_samples {
        let nu2 = linalg::vec_norm(u).powi(2);
        let lhs = linalg::form(d1.as_ref(), u, u).norm().powi(2);
        let rhs = c * f2_sup * linalg::form(f0.as_ref(), u, u).re * nu2;
        let gap = rhs - lhs;
        if gap < worst_gap {
            worst_gap = gap;
            out.worst = Some((u.clone(), lhs, rhs));
        }
        if lhs > rhs + 1e-8 * (1.0 + rhs) {
            out.holds = false;
        }
    }
    Ok(out)
}
