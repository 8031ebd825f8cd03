//! Model symbols from the worked examples, shared by tests, the harness and
//! the acceptance suite.
//!
//! Phase coordinates are `(x_1..x_n, xi_1..xi_n)`. Three-parameter families
//! `w = (w1, w2, w3)` use n = 2 with the last coordinate unused.

use std::sync::Arc;

use faer::c64;

use crate::linalg::{self, c, CMat};
use crate::symbol::{const_coef, scalar_coef, CoefFn};
use crate::window;
use crate::{MatrixSymbol, PhasePoint, SymbolSeries};

fn m2(a: c64, b: c64, cc: c64, d: c64) -> CMat {
    linalg::from_rows(&[&[a, b], &[cc, d]])
}

fn r(v: f64) -> c64 {
    c(v, 0.0)
}

/// `[[0, xi], [0, 0]]`.
pub fn ex21() -> MatrixSymbol {
    MatrixSymbol::from_xi_poly(
        "ex21",
        2,
        vec![const_coef(linalg::zeros(2, 2)), const_coef(m2(r(0.0), r(1.0), r(0.0), r(0.0)))],
    )
    .bounded(false)
}

/// `[[l1(w), 1], [0, l2(w)]]`.
pub fn ex27<F, G>(l1: F, l2: G) -> MatrixSymbol
where
    F: Fn(&PhasePoint) -> f64 + Send + Sync + 'static,
    G: Fn(&PhasePoint) -> f64 + Send + Sync + 'static,
{
    MatrixSymbol::new("ex27", 1, 2, move |w| m2(r(l1(w)), r(1.0), r(0.0), r(l2(w))))
}

/// Jordan-type symbol with `l1 = x`, `l2 = xi`; eigenvalues coincide on `x = xi`.
pub fn ex33() -> MatrixSymbol {
    ex27(|w| w.x[0], |w| w.xi[0]).renamed("ex33")
}

/// `[[0, 1], [t, 0]]`, eigenvalues `+-sqrt(t)`.
pub fn ex28() -> MatrixSymbol {
    MatrixSymbol::new("ex28", 1, 2, |w| m2(r(0.0), r(1.0), r(w.x[0]), r(0.0)))
}

/// `[[w1 + w2, w3], [w3, w1 - w2]]` on `(w1, w2, w3, -)`.
pub fn ex29() -> MatrixSymbol {
    MatrixSymbol::new("ex29", 2, 2, |w| {
        let (w1, w2, w3) = (w.x[0], w.x[1], w.xi[0]);
        m2(r(w1 + w2), r(w3), r(w3), r(w1 - w2))
    })
    .with_deriv(|_, d| m2(r(d[0] + d[1]), r(d[2]), r(d[2]), r(d[0] - d[1])))
    .hermitian(true)
}

/// `ex29` restricted to `w1 = 0`, as a function of `(w2, w3)`.
pub fn ex29_restricted() -> MatrixSymbol {
    MatrixSymbol::new("ex29_restricted", 1, 2, |w| {
        let (a, b) = (w.x[0], w.xi[0]);
        m2(r(a), r(b), r(b), r(-a))
    })
    .hermitian(true)
}

/// `[[w1 - w2, w2], [w2, -w1 - w2]]`.
pub fn ex34() -> MatrixSymbol {
    MatrixSymbol::new("ex34", 1, 2, |w| {
        let (w1, w2) = (w.x[0], w.xi[0]);
        m2(r(w1 - w2), r(w2), r(w2), r(-w1 - w2))
    })
    .with_deriv(|_, d| m2(r(d[0] - d[1]), r(d[1]), r(d[1]), r(-d[0] - d[1])))
    .hermitian(true)
}

/// Smooth cut-on: 0 for `x <= 0`, `exp(-1/x)` for `x > 0`.
pub fn cut_on(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        (-1.0 / x).exp()
    }
}

/// `[[q, chi], [0, q]]` with `q = xi + i x^2`.
pub fn ex39() -> MatrixSymbol {
    MatrixSymbol::from_xi_poly(
        "ex39",
        2,
        vec![
            Arc::new(|x: f64| m2(c(0.0, x * x), r(cut_on(x)), r(0.0), c(0.0, x * x))),
            const_coef(linalg::identity(2)),
        ],
    )
}

pub type RealFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// `[[tau + a1, a2 - i a1], [a2 + i a1, -tau + a1]]` (self-adjoint).
pub fn ex41(a1: RealFn, a2: RealFn) -> MatrixSymbol {
    let a0: Arc<CoefFn> = Arc::new(move |t: f64| {
        let (p, q) = (a1(t), a2(t));
        m2(r(p), c(q, -p), c(q, p), r(p))
    });
    MatrixSymbol::from_xi_poly("ex41", 2, vec![a0, const_coef(linalg::diag(&[r(1.0), r(-1.0)]))]).hermitian(true)
}

/// Left and right factors of the rotation reducing `ex41`.
pub fn ex41_rotation() -> (CMat, CMat) {
    let left = m2(r(0.5), c(0.0, 0.5), r(0.5), c(0.0, -0.5));
    let right = m2(r(1.0), r(1.0), c(0.0, 1.0), c(0.0, -1.0));
    (left, right)
}

/// Operator `[[hD, a], [-h a, hD]]`: principal symbol `[[tau, a], [0, tau]]`.
pub fn ex42(a: RealFn) -> SymbolSeries {
    let a2 = a.clone();
    let p0 = MatrixSymbol::from_xi_poly(
        "ex42",
        2,
        vec![
            Arc::new(move |t: f64| m2(r(0.0), r(a(t)), r(0.0), r(0.0))),
            const_coef(linalg::identity(2)),
        ],
    );
    let p1 = MatrixSymbol::from_xi_poly(
        "ex42_1",
        2,
        vec![Arc::new(move |t: f64| m2(r(0.0), r(0.0), r(-a2(t)), r(0.0)))],
    );
    SymbolSeries::new(p0).with_term(p1)
}

/// Operator `[[1, hD], [h, i h a]]`: principal symbol `[[1, tau], [0, 0]]`.
pub fn ex43(a: RealFn) -> SymbolSeries {
    let p0 = MatrixSymbol::from_xi_poly(
        "ex43",
        2,
        vec![
            const_coef(m2(r(1.0), r(0.0), r(0.0), r(0.0))),
            const_coef(m2(r(0.0), r(1.0), r(0.0), r(0.0))),
        ],
    );
    let p1 = MatrixSymbol::from_xi_poly(
        "ex43_1",
        2,
        vec![Arc::new(move |t: f64| m2(r(0.0), r(0.0), r(1.0), c(0.0, a(t))))],
    );
    SymbolSeries::new(p0).with_term(p1)
}

/// `[[w2 + i w3, w1], [w1, w2 - i w3]]` on `(w1, w2, w3, -)`.
pub fn ex414() -> MatrixSymbol {
    MatrixSymbol::new("ex414", 2, 2, |w| {
        let (w1, w2, w3) = (w.x[0], w.x[1], w.xi[0]);
        m2(c(w2, w3), r(w1), r(w1), c(w2, -w3))
    })
    .with_deriv(|_, d| m2(c(d[1], d[2]), r(d[0]), r(d[0]), c(d[1], -d[2])))
}

/// Symmetrizer `[[0, 1], [1, 0]]` for `ex414`.
pub fn ex414_symmetrizer() -> CMat {
    m2(r(0.0), r(1.0), r(1.0), r(0.0))
}

pub fn kappa_rational(x: f64) -> f64 {
    x * x / (1.0 + x * x)
}

/// `xi^2 Id + i kappa(x) Id` of size `size`.
pub fn schrodinger(size: usize, kappa: fn(f64) -> f64) -> MatrixSymbol {
    MatrixSymbol::from_xi_poly(
        "schrodinger",
        size,
        vec![
            scalar_coef(size, move |x| c(0.0, kappa(x))),
            const_coef(linalg::zeros(size, size)),
            const_coef(linalg::identity(size)),
        ],
    )
}

/// Davies operator symbol `xi + i x^2`, windowed outside `|x| <= l/2`.
pub fn davies(l: f64) -> MatrixSymbol {
    scalar_davies_like(l, |t| t * t).renamed("davies")
}

/// `xi + i f(x)` with `f` windowed outside `|x| <= l/2`.
pub fn scalar_davies_like(l: f64, f: fn(f64) -> f64) -> MatrixSymbol {
    let half = 0.5 * l;
    MatrixSymbol::from_xi_poly(
        "davies_like",
        1,
        vec![scalar_coef(1, move |x| c(0.0, window::flatten(f, x, half))), const_coef(linalg::identity(1))],
    )
}

pub fn ex52_f(t: f64) -> CMat {
    let (t2, t3, t4) = (t * t, t * t * t, t * t * t * t);
    m2(r(t2), r(t3), r(t3), r(t4))
}

pub fn ex53_f(t: f64) -> CMat {
    let p = |k: i32| t.powi(k);
    m2(r(p(2) + p(8)), r(p(3) - p(7)), r(p(3) - p(7)), r(p(4) + p(6)))
}

/// `tau Id + i F(t)`, with `F` blended to its boundary value outside `|t| <= l/2`.
pub fn hd_plus_if(name: &str, l: f64, f: fn(f64) -> CMat) -> MatrixSymbol {
    let half = 0.5 * l;
    let a0: Arc<CoefFn> = Arc::new(move |t: f64| {
        let (b, anchor) = window::blend(t, half);
        let m = if b == 0.0 {
            f(t)
        } else if b == 1.0 {
            f(anchor)
        } else {
            let (u, v) = (f(t), f(anchor));
            CMat::from_fn(2, 2, |i, j| u[(i, j)] * (1.0 - b) + v[(i, j)] * b)
        };
        linalg::scale(m.as_ref(), c(0.0, 1.0))
    });
    MatrixSymbol::from_xi_poly(name, 2, vec![a0, const_coef(linalg::identity(2))])
}

pub fn ex52(l: f64) -> MatrixSymbol {
    hd_plus_if("ex52", l, ex52_f)
}

pub fn ex53(l: f64) -> MatrixSymbol {
    hd_plus_if("ex53", l, ex53_f)
}

/// `tau Id + alpha diag(xi, -xi) + i (t - beta x)^2 Id` on `(t, x, tau, xi)`.
pub fn ex59(alpha: f64, beta: f64) -> MatrixSymbol {
    MatrixSymbol::new("ex59", 2, 2, move |w| {
        let (t, x, tau, xi) = (w.x[0], w.x[1], w.xi[0], w.xi[1]);
        let q = (t - beta * x) * (t - beta * x);
        m2(c(tau + alpha * xi, q), r(0.0), r(0.0), c(tau - alpha * xi, q))
    })
}
