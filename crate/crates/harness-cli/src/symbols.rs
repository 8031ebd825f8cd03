//! Turning scenario specs into symbols, paths and phase-space functions.

use std::sync::Arc;

use symbol_core::catalog::{self, RealFn};
use symbol_core::linalg::{self, CMat};
use symbol_core::symbol::CoefFn;
use symbol_core::{window, MatrixSymbol, PhasePoint, SymbolSeries};

use crate::expr::Expr;
use crate::scenario::{Analysis, Builder, Check, PathSpec, SymbolSpec};
use crate::HarnessError;

fn expr_at(src: &str, vars: &[&str], path: &str) -> Result<Expr, HarnessError> {
    Expr::parse(src, vars).map_err(|e| HarnessError::Invalid { path: path.to_string(), message: e.to_string() })
}

fn invalid<T>(path: &str, message: impl Into<String>) -> Result<T, HarnessError> {
    Err(HarnessError::Invalid { path: path.to_string(), message: message.into() })
}

fn real_fn(src: &str, path: &str) -> Result<RealFn, HarnessError> {
    let e = expr_at(src, &["t", "x"], path)?;
    Ok(Arc::new(move |t: f64| e.eval_real(&[t, t])))
}

fn expr_table(rows: &[Vec<String>], size: usize, vars: &[&str], path: &str) -> Result<Vec<Vec<Expr>>, HarnessError> {
    if rows.len() != size || rows.iter().any(|r| r.len() != size) {
        return invalid(path, format!("expected a {size}x{size} table"));
    }
    rows.iter()
        .enumerate()
        .map(|(i, r)| r.iter().enumerate().map(|(j, s)| expr_at(s, vars, &format!("{path}[{i}][{j}]"))).collect())
        .collect()
}

fn eval_table(t: &[Vec<Expr>], vals: &[f64]) -> CMat {
    let n = t.len();
    CMat::from_fn(n, n, |i, j| t[i][j].eval(vals))
}

/// The principal symbol of `spec` (plus its own lower-order part for ex42/ex43).
fn build(spec: &SymbolSpec, path: &str) -> Result<SymbolSeries, HarnessError> {
    let single = |s: MatrixSymbol| Ok(SymbolSeries::new(s));
    match spec {
        SymbolSpec::Ex21 => single(catalog::ex21()),
        SymbolSpec::Ex28 => single(catalog::ex28()),
        SymbolSpec::Ex29 => single(catalog::ex29()),
        SymbolSpec::Ex29Restricted => single(catalog::ex29_restricted()),
        SymbolSpec::Ex33 => single(catalog::ex33()),
        SymbolSpec::Ex34 => single(catalog::ex34()),
        SymbolSpec::Ex39 => single(catalog::ex39()),
        SymbolSpec::Ex41 { a1, a2 } => {
            single(catalog::ex41(real_fn(a1, &format!("{path}.a1"))?, real_fn(a2, &format!("{path}.a2"))?))
        }
        SymbolSpec::Ex42 { a } => Ok(catalog::ex42(real_fn(a, &format!("{path}.a"))?)),
        SymbolSpec::Ex43 { a } => Ok(catalog::ex43(real_fn(a, &format!("{path}.a"))?)),
        SymbolSpec::Ex414 => single(catalog::ex414()),
        SymbolSpec::Schrodinger { size } => {
            if *size == 0 {
                return invalid(&format!("{path}.size"), "must be positive");
            }
            single(catalog::schrodinger(*size, catalog::kappa_rational))
        }
        SymbolSpec::Davies { l } => positive(*l, &format!("{path}.l")).and_then(|_| single(catalog::davies(*l))),
        SymbolSpec::Ex52 { l } => positive(*l, &format!("{path}.l")).and_then(|_| single(catalog::ex52(*l))),
        SymbolSpec::Ex53 { l } => positive(*l, &format!("{path}.l")).and_then(|_| single(catalog::ex53(*l))),
        SymbolSpec::Ex59 { alpha, beta } => single(catalog::ex59(*alpha, *beta)),
        SymbolSpec::XiPoly { size, coefs, window, hermitian } => {
            if *size == 0 || coefs.is_empty() {
                return invalid(path, "need size > 0 and at least one coefficient");
            }
            if let Some(w) = window {
                positive(*w, &format!("{path}.window"))?;
            }
            let mut out: Vec<Arc<CoefFn>> = Vec::with_capacity(coefs.len());
            for (k, rows) in coefs.iter().enumerate() {
                let t = expr_table(rows, *size, &["x", "t"], &format!("{path}.coefs[{k}]"))?;
                let half = *window;
                out.push(Arc::new(move |x: f64| match half {
                    None => eval_table(&t, &[x, x]),
                    Some(half) => {
                        let (b, anchor) = window::blend(x, half);
                        if b == 0.0 {
                            eval_table(&t, &[x, x])
                        } else {
                            let (u, v) = (eval_table(&t, &[x, x]), eval_table(&t, &[anchor, anchor]));
                            CMat::from_fn(u.nrows(), u.ncols(), |i, j| u[(i, j)] * (1.0 - b) + v[(i, j)] * b)
                        }
                    }
                }));
            }
            single(MatrixSymbol::from_xi_poly("xi_poly", *size, out).hermitian(*hermitian))
        }
    }
}

fn positive(v: f64, path: &str) -> Result<(), HarnessError> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        invalid(path, format!("must be positive, got {v}"))
    }
}

/// Validates a spec by building it.
pub fn check_spec(spec: &SymbolSpec, path: &str) -> Result<(), HarnessError> {
    build(spec, path).map(|_| ())
}

/// Principal part of `spec` followed by `lower` as `h^1, h^2, ...` terms.
pub fn series(spec: &SymbolSpec, lower: &[SymbolSpec]) -> Result<SymbolSeries, HarnessError> {
    let mut s = build(spec, "symbol")?;
    for (j, l) in lower.iter().enumerate() {
        let p = build(l, &format!("lower_order[{j}]"))?;
        s = s.with_term(p.principal().clone());
    }
    if s.terms.iter().any(|t| t.size() != s.size()) {
        return invalid("lower_order", "term sizes differ from the principal symbol");
    }
    Ok(s)
}

/// Names usable in expressions over `T*R^n`.
pub fn phase_vars(n: usize) -> Vec<String> {
    let mut v = vec!["x".to_string(), "xi".to_string()];
    v.extend((1..=n).map(|j| format!("x{j}")));
    v.extend((1..=n).map(|j| format!("xi{j}")));
    v.extend((1..=2 * n).map(|j| format!("w{j}")));
    v
}

/// Values matching [`phase_vars`].
pub fn phase_vals(w: &PhasePoint) -> Vec<f64> {
    let c = w.coords();
    let mut v = vec![w.x[0], w.xi[0]];
    v.extend(w.x.iter().copied());
    v.extend(w.xi.iter().copied());
    v.extend(c);
    v
}

pub fn phase_exprs(srcs: &[String], n: usize, path: &str) -> Result<Vec<Expr>, HarnessError> {
    let names = phase_vars(n);
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    srcs.iter().enumerate().map(|(k, s)| expr_at(s, &vars, &format!("{path}[{k}]"))).collect()
}

/// Constant-size matrix symbol from a table over phase coordinates.
pub fn phase_matrix(rows: &[Vec<String>], n: usize, size: usize, path: &str) -> Result<MatrixSymbol, HarnessError> {
    let names = phase_vars(n);
    let vars: Vec<&str> = names.iter().map(String::as_str).collect();
    let t = expr_table(rows, size, &vars, path)?;
    Ok(MatrixSymbol::new("M", n, size, move |w| eval_table(&t, &phase_vals(w))))
}

pub type Path = Box<dyn Fn(f64) -> CMat + Send + Sync>;

pub fn path_fn(spec: &PathSpec, at: &str) -> Result<Path, HarnessError> {
    match spec {
        PathSpec::Builtin(name) => match name.as_str() {
            "ex52_f" => Ok(Box::new(catalog::ex52_f)),
            "ex53_f" => Ok(Box::new(catalog::ex53_f)),
            other => invalid(&format!("{at}.builtin"), format!("unknown path `{other}` (known: ex52_f, ex53_f)")),
        },
        PathSpec::Matrix(rows) => {
            let t = expr_table(rows, rows.len(), &["t"], &format!("{at}.matrix"))?;
            if t.is_empty() {
                return invalid(&format!("{at}.matrix"), "empty table");
            }
            Ok(Box::new(move |s| eval_table(&t, &[s])))
        }
    }
}

/// Scaling-builder profile `f(t)`, real part of the expression.
pub fn profile_fn(src: &str, at: &str) -> Result<RealFn, HarnessError> {
    real_fn(src, at)
}

/// Parse every expression an analysis carries, so bad input fails before running.
pub fn check_analysis(a: &Analysis, at: &str) -> Result<(), HarnessError> {
    match a {
        Analysis::Quasimode(q) => {
            if let Builder::Scaling { f, .. } = &q.builder {
                profile_fn(f, &format!("{at}.builder.f"))?;
            }
        }
        Analysis::Classify(c) => match &c.check {
            Check::QuasiSymmetric { symmetrizer, field, .. } => {
                let n = field.len() / 2;
                if n == 0 || field.len() % 2 != 0 {
                    return invalid(&format!("{at}.check.field"), "need 2n components");
                }
                phase_exprs(field, n, &format!("{at}.check.field"))?;
                if let Some(rows) = symmetrizer {
                    phase_matrix(rows, n, rows.len(), &format!("{at}.check.symmetrizer"))?;
                }
            }
            Check::LambdaPm { grid, .. } if grid.iter().any(|ax| ax.2 == 0) => {
                return invalid(&format!("{at}.check.grid"), "axes need at least one point");
            }
            _ => {}
        },
        Analysis::Omega(o) | Analysis::FiniteType(o) => {
            let _ = path_fn(&o.path, &format!("{at}.path"))?;
        }
        _ => {}
    }
    Ok(())
}

pub fn identity(n: usize, size: usize) -> MatrixSymbol {
    MatrixSymbol::new("Id", n, size, move |_| linalg::identity(size))
}
