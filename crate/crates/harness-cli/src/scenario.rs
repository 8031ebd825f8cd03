//! Scenario documents, schema `psdlab-scenario/1`.
//!
//! Unknown fields are rejected everywhere. Parse errors name the field path and
//! the line/column in the source text.

use serde::{Deserialize, Serialize};

use crate::symbols;
use crate::HarnessError;

pub const SCENARIO_SCHEMA: &str = "psdlab-scenario/1";

/// `[re, im]`.
pub type Cplx = [f64; 2];

/// `[lo, hi, n]`.
pub type Axis = (f64, f64, usize);

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub schema: String,
    pub id: String,
    #[serde(default)]
    pub description: String,
    pub symbol: SymbolSpec,
    /// Addends `h^j P_j`, `j = 1, 2, ...`.
    #[serde(default)]
    pub lower_order: Vec<SymbolSpec>,
    pub grid: GridParams,
    #[serde(default)]
    pub h_list: Option<HList>,
    #[serde(default)]
    pub backend: BackendSpec,
    pub analyses: Vec<Analysis>,
    #[serde(default)]
    pub expect: Vec<Assertion>,
}

/// Torus `[-l, l)` with `m` points; coefficients are windowed to `|x| <= l/2`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridParams {
    pub l: f64,
    pub m: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum HList {
    Values(Vec<f64>),
    /// `start * ratio^k`, `k = 0..count`.
    Geometric { start: f64, ratio: f64, count: usize },
}

impl HList {
    pub fn values(&self) -> Vec<f64> {
        match self {
            HList::Values(v) => v.clone(),
            HList::Geometric { start, ratio, count } => (0..*count).map(|k| start * ratio.powi(k as i32)).collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BackendSpec {
    #[default]
    Poly,
    Fourier,
}

impl BackendSpec {
    pub fn backend(self) -> quantize::Backend {
        match self {
            BackendSpec::Poly => quantize::Backend::Poly,
            BackendSpec::Fourier => quantize::Backend::Fourier { xi_cutoff: None },
        }
    }
}

/// A built-in model symbol or a coefficient table in `xi`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum SymbolSpec {
    Ex21,
    Ex28,
    Ex29,
    Ex29Restricted,
    Ex33,
    Ex34,
    Ex39,
    /// Expressions in `t`.
    Ex41 { a1: String, a2: String },
    Ex42 { a: String },
    Ex43 { a: String },
    Ex414,
    Schrodinger { size: usize },
    Davies { l: f64 },
    Ex52 { l: f64 },
    Ex53 { l: f64 },
    Ex59 { alpha: f64, beta: f64 },
    /// `sum_k a_k(x) xi^k`; `coefs[k]` is a `size x size` table of expressions in `x`.
    XiPoly {
        size: usize,
        coefs: Vec<Vec<Vec<String>>>,
        /// Blend coefficients to their boundary values outside `|x| <= window`.
        #[serde(default)]
        window: Option<f64>,
        #[serde(default)]
        hermitian: bool,
    },
}

/// Per-analysis replacement of the scenario's operator fields.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OperatorOverride {
    #[serde(default)]
    pub symbol: Option<SymbolSpec>,
    #[serde(default)]
    pub lower_order: Option<Vec<SymbolSpec>>,
    #[serde(default)]
    pub grid: Option<GridParams>,
    #[serde(default)]
    pub h_list: Option<HList>,
    #[serde(default)]
    pub backend: Option<BackendSpec>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Analysis {
    Scan(ScanSpec),
    Fit(FitSpec),
    Gap(GapSpec),
    Quasimode(QuasimodeSpec),
    Classify(ClassifySpec),
    Omega(OmegaSpec),
    FiniteType(OmegaSpec),
}

impl Analysis {
    pub fn id(&self) -> &str {
        match self {
            Analysis::Scan(s) => &s.id,
            Analysis::Fit(s) => &s.id,
            Analysis::Gap(s) => &s.id,
            Analysis::Quasimode(s) => &s.id,
            Analysis::Classify(s) => &s.id,
            Analysis::Omega(s) | Analysis::FiniteType(s) => &s.id,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Analysis::Scan(_) => "scan",
            Analysis::Fit(_) => "fit",
            Analysis::Gap(_) => "gap",
            Analysis::Quasimode(_) => "quasimode",
            Analysis::Classify(_) => "classify",
            Analysis::Omega(_) => "omega",
            Analysis::FiniteType(_) => "finite_type",
        }
    }

    fn operator(&self) -> Option<&OperatorOverride> {
        match self {
            Analysis::Scan(s) => Some(&s.operator),
            Analysis::Fit(s) => Some(&s.operator),
            Analysis::Gap(s) => Some(&s.operator),
            Analysis::Quasimode(s) => Some(&s.operator),
            Analysis::Classify(s) => Some(&s.operator),
            Analysis::Omega(_) | Analysis::FiniteType(_) => None,
        }
    }
}

/// `sigma_min` on a lattice of `z` at one `h` (default: the first of `h_list`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScanSpec {
    pub id: String,
    #[serde(default)]
    pub h: Option<f64>,
    pub re: Axis,
    pub im: Axis,
    #[serde(default)]
    pub operator: OperatorOverride,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitSpec {
    pub id: String,
    pub z: Cplx,
    #[serde(default)]
    pub operator: OperatorOverride,
}

/// No eigenvalue within `k h log(1/h)` of `z`, at every `h`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GapSpec {
    pub id: String,
    pub z: Cplx,
    pub k: f64,
    #[serde(default)]
    pub operator: OperatorOverride,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuasimodeSpec {
    pub id: String,
    pub z: Cplx,
    pub builder: Builder,
    #[serde(default)]
    pub operator: OperatorOverride,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Builder {
    /// Bump of width `h^{1/(k+1)}` at `t0` for `hD_t + i f(t)`; `f` is an expression in `t`.
    Scaling { f: String, t0: f64, k: u32 },
    /// Gaussian beam at `(x0, xi0)` with `terms` amplitude terms.
    Beam { x0: f64, xi0: f64, terms: usize },
    /// `chi(t) (t, -1)` for the rank-one `F = v v^T`, `v = (t, t^2)`.
    Kernel52,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassifySpec {
    pub id: String,
    pub check: Check,
    #[serde(default)]
    pub operator: OperatorOverride,
}

/// Sample box `center + half * (i_1, ..., i_d) / k`, `i_j in -k..=k`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Region {
    pub center: Vec<f64>,
    pub half: f64,
    pub k: u32,
}

/// Expressions over phase coordinates may use `x`, `xi` (first pair),
/// `x1.. xn`, `xi1.. xin` and `w1.. w2n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum Check {
    PrincipalType {
        w: Vec<f64>,
        lambda: Cplx,
    },
    /// `Q = M (P - z)` against the vector field `field`.
    QuasiSymmetric {
        #[serde(default)]
        symmetrizer: Option<Vec<Vec<String>>>,
        #[serde(default)]
        z: Option<Cplx>,
        field: Vec<String>,
        region: Region,
        c_min: f64,
        #[serde(default = "default_tol_im")]
        tol_im: f64,
        #[serde(default = "default_tol_rank")]
        tol_rank: f64,
    },
    Approximation {
        normal_axis: usize,
        tangent_axes: Vec<usize>,
        w0: Vec<f64>,
        eps: f64,
        region: Region,
        tol: f64,
    },
    LambdaPm {
        z: Vec<Cplx>,
        grid: Vec<Axis>,
        match_radius: f64,
    },
    Winding {
        mu: Cplx,
        radius: f64,
        samples: usize,
    },
}

fn default_tol_im() -> f64 {
    1e-10
}

fn default_tol_rank() -> f64 {
    1e-8
}

/// `Omega_delta` of a Hermitian path on `[-window, window]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OmegaSpec {
    pub id: String,
    pub path: PathSpec,
    pub window: f64,
    pub grid_m: usize,
    pub deltas: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum PathSpec {
    /// `ex52_f` or `ex53_f`.
    Builtin(String),
    /// Square table of expressions in `t`.
    Matrix(Vec<Vec<String>>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AssertOp {
    /// `value = [lo, hi]`, inclusive.
    In,
    /// Numbers within `tol`; booleans and strings exactly.
    Eq,
    Ge,
    Le,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Assertion {
    pub analysis: String,
    /// Dot path into the analysis result; numeric segments index arrays.
    pub field: String,
    pub op: AssertOp,
    pub value: serde_json::Value,
    #[serde(default)]
    pub tol: f64,
}

/// Effective operator of one analysis after applying its override.
#[derive(Clone, Debug, PartialEq)]
pub struct Operator {
    pub symbol: SymbolSpec,
    pub lower_order: Vec<SymbolSpec>,
    pub grid: GridParams,
    pub h_list: Option<Vec<f64>>,
    pub backend: BackendSpec,
}

impl Scenario {
    pub fn operator_for(&self, a: &Analysis) -> Operator {
        let base = Operator {
            symbol: self.symbol.clone(),
            lower_order: self.lower_order.clone(),
            grid: self.grid,
            h_list: self.h_list.as_ref().map(HList::values),
            backend: self.backend,
        };
        let Some(o) = a.operator() else { return base };
        Operator {
            symbol: o.symbol.clone().unwrap_or(base.symbol),
            lower_order: o.lower_order.clone().unwrap_or(base.lower_order),
            grid: o.grid.unwrap_or(base.grid),
            h_list: o.h_list.as_ref().map(HList::values).or(base.h_list),
            backend: o.backend.unwrap_or(base.backend),
        }
    }

    /// Checks serde cannot express: schema tag, unique ids, assertion targets, expressions.
    pub fn validate(&self) -> Result<(), HarnessError> {
        let invalid = |path: String, message: String| Err(HarnessError::Invalid { path, message });
        if self.schema != SCENARIO_SCHEMA {
            return invalid("schema".into(), format!("expected `{SCENARIO_SCHEMA}`, got `{}`", self.schema));
        }
        if self.id.is_empty() {
            return invalid("id".into(), "must not be empty".into());
        }
        if !(self.grid.l > 0.0) || self.grid.m < 4 {
            return invalid("grid".into(), "need l > 0 and m >= 4".into());
        }
        symbols::check_spec(&self.symbol, "symbol")?;
        for (j, s) in self.lower_order.iter().enumerate() {
            symbols::check_spec(s, &format!("lower_order[{j}]"))?;
        }
        if let Some(h) = &self.h_list {
            check_h_list(&h.values(), "h_list")?;
        }
        for (k, a) in self.analyses.iter().enumerate() {
            let at = format!("analyses[{k}]");
            if a.id().is_empty() {
                return invalid(format!("{at}.id"), "must not be empty".into());
            }
            if self.analyses[..k].iter().any(|b| b.id() == a.id()) {
                return invalid(format!("{at}.id"), format!("duplicate analysis id `{}`", a.id()));
            }
            if let Some(o) = a.operator() {
                if let Some(s) = &o.symbol {
                    symbols::check_spec(s, &format!("{at}.operator.symbol"))?;
                }
                for (j, s) in o.lower_order.iter().flatten().enumerate() {
                    symbols::check_spec(s, &format!("{at}.operator.lower_order[{j}]"))?;
                }
                if let Some(h) = &o.h_list {
                    check_h_list(&h.values(), &format!("{at}.operator.h_list"))?;
                }
            }
            symbols::check_analysis(a, &at)?;
        }
        for (k, e) in self.expect.iter().enumerate() {
            let at = format!("expect[{k}]");
            if !self.analyses.iter().any(|a| a.id() == e.analysis) {
                return invalid(format!("{at}.analysis"), format!("no analysis with id `{}`", e.analysis));
            }
            if e.field.is_empty() {
                return invalid(format!("{at}.field"), "must not be empty".into());
            }
            let shape_ok = match e.op {
                AssertOp::In => e.value.as_array().is_some_and(|v| v.len() == 2 && v.iter().all(|x| x.is_number())),
                AssertOp::Ge | AssertOp::Le => e.value.is_number(),
                AssertOp::Eq => e.value.is_number() || e.value.is_boolean() || e.value.is_string(),
            };
            if !shape_ok {
                return invalid(format!("{at}.value"), format!("value {} does not fit op {:?}", e.value, e.op));
            }
            if !(e.tol >= 0.0) {
                return invalid(format!("{at}.tol"), "must be non-negative".into());
            }
        }
        Ok(())
    }
}

fn check_h_list(h: &[f64], path: &str) -> Result<(), HarnessError> {
    if h.is_empty() || h.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(HarnessError::Invalid { path: path.into(), message: "need a non-empty list of positive h".into() });
    }
    Ok(())
}

/// serde_json's message without its trailing position, which is reported separately.
pub(crate) fn bare_message(e: &serde_json::Error) -> String {
    let s = e.to_string();
    match s.rfind(" at line ") {
        Some(i) => s[..i].to_string(),
        None => s,
    }
}

/// Parse and validate a scenario; `origin` labels diagnostics.
pub fn parse_scenario(text: &str, origin: &str) -> Result<Scenario, HarnessError> {
    let de = &mut serde_json::Deserializer::from_str(text);
    let sc: Scenario = serde_path_to_error::deserialize(de).map_err(|e| {
        let path = e.path().to_string();
        let inner = e.into_inner();
        HarnessError::Schema {
            origin: origin.to_string(),
            path,
            line: inner.line(),
            column: inner.column(),
            message: bare_message(&inner),
        }
    })?;
    sc.validate().map_err(|e| match e {
        HarnessError::Invalid { path, message } => HarnessError::Invalid { path: format!("{origin}: {path}"), message },
        other => other,
    })?;
    Ok(sc)
}
