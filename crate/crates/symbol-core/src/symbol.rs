use std::fmt;
use std::sync::Arc;

use faer::c64;

use crate::linalg::{self, c, CMat};
use crate::{PhasePoint, SymbolError};

pub type EvalFn = dyn Fn(&PhasePoint) -> CMat + Send + Sync;
/// Directional derivative oracle: `(w, dir) -> <dir, dP(w)>`.
pub type DerivFn = dyn Fn(&PhasePoint, &[f64]) -> CMat + Send + Sync;
/// Coefficient `a_k(x)` of a xi-polynomial symbol (n = 1).
pub type CoefFn = dyn Fn(f64) -> CMat + Send + Sync;

/// Smooth N×N matrix-valued function on `T*R^n`.
#[derive(Clone)]
pub struct MatrixSymbol {
    name: String,
    n: usize,
    size: usize,
    eval: Arc<EvalFn>,
    deriv: Option<Arc<DerivFn>>,
    xi_poly: Option<Vec<Arc<CoefFn>>>,
    hermitian: bool,
    bounded: bool,
}

impl fmt::Debug for MatrixSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MatrixSymbol")
            .field("name", &self.name)
            .field("n", &self.n)
            .field("size", &self.size)
            .field("deriv", &self.deriv.is_some())
            .field("xi_degree", &self.xi_degree())
            .field("hermitian", &self.hermitian)
            .field("bounded", &self.bounded)
            .finish()
    }
}

impl MatrixSymbol {
    pub fn new<F>(name: impl Into<String>, n: usize, size: usize, f: F) -> Self
    where
        F: Fn(&PhasePoint) -> CMat + Send + Sync + 'static,
    {
        Self {
            name: name.into(),
            n,
            size,
            eval: Arc::new(f),
            deriv: None,
            xi_poly: None,
            hermitian: false,
            bounded: false,
        }
    }

    /// Scalar (1×1) symbol.
    pub fn scalar<F>(name: impl Into<String>, n: usize, f: F) -> Self
    where
        F: Fn(&PhasePoint) -> c64 + Send + Sync + 'static,
    {
        Self::new(name, n, 1, move |w| CMat::from_fn(1, 1, |_, _| f(w)))
    }

    /// n = 1 symbol `P(x, xi) = sum_k a_k(x) xi^k`; the evaluator is derived from the coefficients.
    pub fn from_xi_poly(name: impl Into<String>, size: usize, coefs: Vec<Arc<CoefFn>>) -> Self {
        let cs = coefs.clone();
        let eval = move |w: &PhasePoint| {
            let (x, xi) = (w.x[0], w.xi[0]);
            let mut acc = linalg::zeros(size, size);
            let mut p = 1.0;
            for a in &cs {
                let m = a(x);
                for j in 0..size {
                    for i in 0..size {
                        acc[(i, j)] += m[(i, j)] * p;
                    }
                }
                p *= xi;
            }
            acc
        };
        let mut s = Self::new(name, 1, size, eval);
        s.xi_poly = Some(coefs);
        s
    }

    pub fn with_deriv<D>(mut self, d: D) -> Self
    where
        D: Fn(&PhasePoint, &[f64]) -> CMat + Send + Sync + 'static,
    {
        self.deriv = Some(Arc::new(d));
        self
    }

    /// Attach a xi-polynomial description to an existing evaluator (n = 1 only).
    pub fn with_xi_poly(mut self, coefs: Vec<Arc<CoefFn>>) -> Result<Self, SymbolError> {
        if self.n != 1 {
            return Err(SymbolError::Argument("xi_poly requires n = 1".into()));
        }
        self.xi_poly = Some(coefs);
        Ok(self)
    }

    pub fn hermitian(mut self, flag: bool) -> Self {
        self.hermitian = flag;
        self
    }

    pub fn bounded(mut self, flag: bool) -> Self {
        self.bounded = flag;
        self
    }

    pub fn renamed(mut self, name: impl Into<String>) -> Self {
        self.name = name.into();
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn size(&self) -> usize {
        self.size
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian
    }

    pub fn is_bounded(&self) -> bool {
        self.bounded
    }

    pub fn has_deriv(&self) -> bool {
        self.deriv.is_some()
    }

    pub fn xi_poly(&self) -> Option<&[Arc<CoefFn>]> {
        self.xi_poly.as_deref()
    }

    pub fn xi_degree(&self) -> Option<usize> {
        self.xi_poly.as_ref().map(|c| c.len().saturating_sub(1))
    }

    /// Evaluate `P(w)`, rejecting non-finite entries and dimension mismatches.
    pub fn eval(&self, w: &PhasePoint) -> Result<CMat, SymbolError> {
        if w.n() != self.n {
            return Err(SymbolError::Argument(format!(
                "symbol {} has n={}, point has n={}",
                self.name,
                self.n,
                w.n()
            )));
        }
        let m = (self.eval)(w);
        if m.nrows() != self.size || m.ncols() != self.size {
            return Err(SymbolError::Argument(format!(
                "symbol {} returned {}x{}, declared {}",
                self.name,
                m.nrows(),
                m.ncols(),
                self.size
            )));
        }
        if !linalg::is_finite(m.as_ref()) {
            return Err(SymbolError::NonFinite(w.clone()));
        }
        Ok(m)
    }

    /// Analytic directional derivative, when an oracle is attached.
    pub fn deriv_oracle(&self, w: &PhasePoint, dir: &[f64]) -> Option<CMat> {
        self.deriv.as_ref().map(|d| d(w, dir))
    }

    /// `P(w) - lambda Id`.
    pub fn shifted(&self, lambda: c64) -> MatrixSymbol {
        let p = self.clone();
        let mut s = MatrixSymbol::new(format!("{}-({})", self.name, lambda), self.n, self.size, move |w| {
            linalg::shift((p.eval)(w).as_ref(), lambda)
        });
        s.deriv = self.deriv.clone();
        s.bounded = self.bounded;
        s.hermitian = self.hermitian && lambda.im == 0.0;
        if let Some(cs) = &self.xi_poly {
            let mut cs = cs.clone();
            if let Some(a0) = cs.first().cloned() {
                cs[0] = Arc::new(move |x| linalg::shift(a0(x).as_ref(), lambda));
            }
            s.xi_poly = Some(cs);
        }
        s
    }

    /// Pointwise adjoint `P(w)*`.
    pub fn adjoint(&self) -> MatrixSymbol {
        let p = self.clone();
        let mut s = MatrixSymbol::new(format!("{}*", self.name), self.n, self.size, move |w| {
            linalg::adjoint((p.eval)(w).as_ref())
        });
        if let Some(d) = self.deriv.clone() {
            s.deriv = Some(Arc::new(move |w: &PhasePoint, dir: &[f64]| linalg::adjoint(d(w, dir).as_ref())));
        }
        if let Some(cs) = &self.xi_poly {
            s.xi_poly = Some(
                cs.iter()
                    .map(|a| {
                        let a = a.clone();
                        Arc::new(move |x: f64| linalg::adjoint(a(x).as_ref())) as Arc<CoefFn>
                    })
                    .collect(),
            );
        }
        s.hermitian = self.hermitian;
        s.bounded = self.bounded;
        s
    }

    /// Pointwise product `A(w) P(w) B(w)`.
    pub fn sandwich(a: &MatrixSymbol, p: &MatrixSymbol, b: &MatrixSymbol) -> MatrixSymbol {
        let (a2, p2, b2) = (a.clone(), p.clone(), b.clone());
        MatrixSymbol::new(
            format!("{}*{}*{}", a.name, p.name, b.name),
            p.n,
            p.size,
            move |w| {
                let l = (a2.eval)(w);
                let m = (p2.eval)(w);
                let r = (b2.eval)(w);
                &l * &m * &r
            },
        )
    }

    /// Check the declared invariants on sample points.
    pub fn check_invariants(&self, samples: &[PhasePoint]) -> Result<(), SymbolError> {
        for w in samples {
            let m = self.eval(w)?;
            let scale = 1.0 + linalg::max_abs(m.as_ref());
            if self.hermitian {
                let d = linalg::max_abs((&m - linalg::adjoint(m.as_ref())).as_ref());
                if d > 1e-10 * scale {
                    return Err(SymbolError::Invariant(format!(
                        "hermitian flag violated at {w}: defect {d:e}"
                    )));
                }
            }
            if let Some(cs) = &self.xi_poly {
                let mut acc = linalg::zeros(self.size, self.size);
                let mut p = 1.0;
                for a in cs {
                    acc += linalg::scale(a(w.x[0]).as_ref(), c(p, 0.0));
                    p *= w.xi[0];
                }
                let d = linalg::max_abs((&acc - &m).as_ref());
                if d > 1e-10 * scale {
                    return Err(SymbolError::Invariant(format!(
                        "xi_poly disagrees with eval at {w}: {d:e}"
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Semiclassical expansion `P(h) ~ sum_j h^j P_j`; `terms[0]` is the principal symbol.
#[derive(Clone, Debug)]
pub struct SymbolSeries {
    pub terms: Vec<MatrixSymbol>,
}

impl SymbolSeries {
    pub fn new(principal: MatrixSymbol) -> Self {
        Self { terms: vec![principal] }
    }

    /// Append the next-order term.
    pub fn with_term(mut self, p: MatrixSymbol) -> Self {
        self.terms.push(p);
        self
    }

    pub fn principal(&self) -> &MatrixSymbol {
        &self.terms[0]
    }

    pub fn size(&self) -> usize {
        self.terms[0].size()
    }
}

impl From<MatrixSymbol> for SymbolSeries {
    fn from(p: MatrixSymbol) -> Self {
        Self::new(p)
    }
}

/// Constant coefficient `a(x) = m`.
pub fn const_coef(m: CMat) -> Arc<CoefFn> {
    Arc::new(move |_| m.clone())
}

/// Scalar coefficient `a(x) = f(x) Id_size`.
pub fn scalar_coef<F>(size: usize, f: F) -> Arc<CoefFn>
where
    F: Fn(f64) -> c64 + Send + Sync + 'static,
{
    Arc::new(move |x| linalg::scale(linalg::identity(size).as_ref(), f(x)))
}
