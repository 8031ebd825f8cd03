//! Small dense helpers over `faer` used across the workspace.

use faer::{c64, Mat, MatRef, Side};

use crate::SymbolError;

pub type CMat = Mat<c64>;

#[inline]
pub fn c(re: f64, im: f64) -> c64 {
    c64::new(re, im)
}

pub fn zeros(n: usize, m: usize) -> CMat {
    Mat::zeros(n, m)
}

pub fn identity(n: usize) -> CMat {
    Mat::identity(n, n)
}

pub fn from_rows(rows: &[&[c64]]) -> CMat {
    let n = rows.len();
    let m = if n == 0 { 0 } else { rows[0].len() };
    Mat::from_fn(n, m, |i, j| rows[i][j])
}

pub fn from_real_rows(rows: &[&[f64]]) -> CMat {
    let n = rows.len();
    let m = if n == 0 { 0 } else { rows[0].len() };
    Mat::from_fn(n, m, |i, j| c(rows[i][j], 0.0))
}

pub fn diag(d: &[c64]) -> CMat {
    Mat::from_fn(d.len(), d.len(), |i, j| if i == j { d[i] } else { c(0.0, 0.0) })
}

pub fn scale(a: MatRef<'_, c64>, s: c64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| a[(i, j)] * s)
}

/// `a - lambda * Id`.
pub fn shift(a: MatRef<'_, c64>, lambda: c64) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        if i == j {
            a[(i, j)] - lambda
        } else {
            a[(i, j)]
        }
    })
}

pub fn adjoint(a: MatRef<'_, c64>) -> CMat {
    a.adjoint().to_owned()
}

/// Hermitian part `(A + A*)/2`.
pub fn re_part(a: MatRef<'_, c64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| (a[(i, j)] + a[(j, i)].conj()) * 0.5)
}

/// `(A - A*)/(2i)`, Hermitian.
pub fn im_part(a: MatRef<'_, c64>) -> CMat {
    Mat::from_fn(a.nrows(), a.ncols(), |i, j| {
        (a[(i, j)] - a[(j, i)].conj()) * c(0.0, -0.5)
    })
}

pub fn is_finite(a: MatRef<'_, c64>) -> bool {
    (0..a.nrows()).all(|i| (0..a.ncols()).all(|j| a[(i, j)].re.is_finite() && a[(i, j)].im.is_finite()))
}

pub fn max_abs(a: MatRef<'_, c64>) -> f64 {
    let mut m = 0.0f64;
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            m = m.max(a[(i, j)].norm());
        }
    }
    m
}

pub fn frobenius(a: MatRef<'_, c64>) -> f64 {
    a.norm_l2()
}

fn linalg_err(what: &str) -> SymbolError {
    SymbolError::Linalg(format!("{what} did not converge"))
}

/// Singular values, descending.
pub fn singular_values(a: MatRef<'_, c64>) -> Result<Vec<f64>, SymbolError> {
    if a.nrows() == 0 || a.ncols() == 0 {
        return Ok(Vec::new());
    }
    a.singular_values().map_err(|_| linalg_err("svd"))
}

pub fn sigma_min(a: MatRef<'_, c64>) -> Result<f64, SymbolError> {
    Ok(singular_values(a)?.last().copied().unwrap_or(0.0))
}

/// Spectral norm.
pub fn op_norm(a: MatRef<'_, c64>) -> Result<f64, SymbolError> {
    Ok(singular_values(a)?.first().copied().unwrap_or(0.0))
}

pub fn eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<c64>, SymbolError> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    a.eigenvalues().map_err(|_| linalg_err("eigenvalue solver"))
}

/// Eigen-decomposition of the Hermitian part of `a`; eigenvalues ascending,
/// eigenvectors as columns.
pub fn hermitian_eigen(a: MatRef<'_, c64>) -> Result<(Vec<f64>, CMat), SymbolError> {
    let h = re_part(a);
    let e = h
        .self_adjoint_eigen(Side::Lower)
        .map_err(|_| linalg_err("hermitian eigen solver"))?;
    let vals = e.S().column_vector().iter().map(|v| v.re).collect();
    Ok((vals, e.U().to_owned()))
}

pub fn hermitian_eigenvalues(a: MatRef<'_, c64>) -> Result<Vec<f64>, SymbolError> {
    if a.nrows() == 0 {
        return Ok(Vec::new());
    }
    re_part(a)
        .self_adjoint_eigenvalues(Side::Lower)
        .map_err(|_| linalg_err("hermitian eigen solver"))
}

pub fn lambda_min_hermitian(a: MatRef<'_, c64>) -> Result<f64, SymbolError> {
    Ok(hermitian_eigenvalues(a)?.first().copied().unwrap_or(f64::INFINITY))
}

/// Numerical rank with relative cutoff `tol_rank * sigma_max`.
pub fn numerical_rank(a: MatRef<'_, c64>, tol_rank: f64) -> Result<usize, SymbolError> {
    numerical_rank_scaled(a, tol_rank, 0.0)
}

/// Rank with cutoff `tol_rank * max(sigma_max, scale)`.
///
/// For `A = P - lambda` pass `scale = |P|`, otherwise a shift that nearly
/// annihilates `P` leaves only rounding noise and every direction counts.
pub fn numerical_rank_scaled(a: MatRef<'_, c64>, tol_rank: f64, scale: f64) -> Result<usize, SymbolError> {
    let s = singular_values(a)?;
    let cut = s.first().copied().unwrap_or(0.0).max(scale);
    if cut == 0.0 {
        return Ok(0);
    }
    Ok(s.iter().filter(|&&v| v > tol_rank * cut).count())
}

/// Orthonormal basis (as columns) of the numerical kernel of `a`.
pub fn null_space(a: MatRef<'_, c64>, tol_rank: f64) -> Result<CMat, SymbolError> {
    null_space_scaled(a, tol_rank, 0.0)
}

/// Kernel basis with the cutoff of [`numerical_rank_scaled`].
pub fn null_space_scaled(a: MatRef<'_, c64>, tol_rank: f64, scale: f64) -> Result<CMat, SymbolError> {
    let n = a.ncols();
    if n == 0 {
        return Ok(zeros(0, 0));
    }
    // pad to square so that V carries a full basis
    let sq = if a.nrows() < n {
        Mat::from_fn(n, n, |i, j| if i < a.nrows() { a[(i, j)] } else { c(0.0, 0.0) })
    } else {
        a.to_owned()
    };
    let svd = sq.svd().map_err(|_| linalg_err("svd"))?;
    let s: Vec<f64> = svd.S().column_vector().iter().map(|v| v.re).collect();
    let cut = s.first().copied().unwrap_or(0.0).max(scale);
    let v = svd.V();
    let keep: Vec<usize> = (0..n)
        .filter(|&k| cut == 0.0 || s.get(k).copied().unwrap_or(0.0) <= tol_rank * cut)
        .collect();
    Ok(Mat::from_fn(n, keep.len(), |i, j| v[(i, keep[j])]))
}

/// Determinant by Gaussian elimination with partial pivoting (small matrices).
pub fn det(a: MatRef<'_, c64>) -> c64 {
    let n = a.nrows();
    let mut m = a.to_owned();
    let mut d = c(1.0, 0.0);
    for k in 0..n {
        let p = (k..n)
            .max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm()))
            .unwrap();
        if m[(p, k)].norm() == 0.0 {
            return c(0.0, 0.0);
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
            }
            d = -d;
        }
        let piv = m[(k, k)];
        d *= piv;
        for i in k + 1..n {
            let f = m[(i, k)] / piv;
            if f.norm() != 0.0 {
                for j in k..n {
                    let t = m[(k, j)];
                    m[(i, j)] -= f * t;
                }
            }
        }
    }
    d
}

/// Inverse by Gauss-Jordan elimination; `None` when a pivot vanishes.
pub fn inverse(a: MatRef<'_, c64>) -> Option<CMat> {
    let n = a.nrows();
    let mut m = a.to_owned();
    let mut inv = identity(n);
    for k in 0..n {
        let p = (k..n).max_by(|&i, &j| m[(i, k)].norm().total_cmp(&m[(j, k)].norm()))?;
        if m[(p, k)].norm() == 0.0 {
            return None;
        }
        if p != k {
            for j in 0..n {
                let t = m[(k, j)];
                m[(k, j)] = m[(p, j)];
                m[(p, j)] = t;
                let t = inv[(k, j)];
                inv[(k, j)] = inv[(p, j)];
                inv[(p, j)] = t;
            }
        }
        let piv = m[(k, k)].inv();
        for j in 0..n {
            m[(k, j)] *= piv;
            inv[(k, j)] *= piv;
        }
        for i in 0..n {
            if i != k {
                let f = m[(i, k)];
                if f.norm() != 0.0 {
                    for j in 0..n {
                        let t = m[(k, j)];
                        m[(i, j)] -= f * t;
                        let t = inv[(k, j)];
                        inv[(i, j)] -= f * t;
                    }
                }
            }
        }
    }
    Some(inv)
}

/// `<a u, v>` with the inner product linear in the first slot.
pub fn form(a: MatRef<'_, c64>, u: &[c64], v: &[c64]) -> c64 {
    let mut s = c(0.0, 0.0);
    for i in 0..a.nrows() {
        let mut au = c(0.0, 0.0);
        for j in 0..a.ncols() {
            au += a[(i, j)] * u[j];
        }
        s += au * v[i].conj();
    }
    s
}

pub fn mat_vec(a: MatRef<'_, c64>, u: &[c64]) -> Vec<c64> {
    (0..a.nrows())
        .map(|i| (0..a.ncols()).map(|j| a[(i, j)] * u[j]).sum())
        .collect()
}

pub fn vec_norm(u: &[c64]) -> f64 {
    u.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Compression `B* A B` for a basis `B` given as columns.
pub fn compress(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> CMat {
    b.adjoint() * a * b
}

/// `V* A U`: entry `(j, i)` is `<A u_i, v_j>`.
pub fn compress_pair(a: MatRef<'_, c64>, u: MatRef<'_, c64>, v: MatRef<'_, c64>) -> CMat {
    v.adjoint() * a * u
}

/// Largest principal angle (radians) between the column spans of two
/// orthonormal bases of equal dimension.
pub fn subspace_angle(a: MatRef<'_, c64>, b: MatRef<'_, c64>) -> Result<f64, SymbolError> {
    if a.ncols() != b.ncols() {
        return Ok(std::f64::consts::FRAC_PI_2);
    }
    if a.ncols() == 0 {
        return Ok(0.0);
    }
    let g = a.adjoint() * b;
    let s = singular_values(g.as_ref())?;
    let smin = s.last().copied().unwrap_or(0.0).clamp(0.0, 1.0);
    Ok(smin.acos())
}
