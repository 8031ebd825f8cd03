//! Run reports, schema `psdlab-report/1`, and assertion evaluation.

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::scenario::{AssertOp, Assertion, BackendSpec, Cplx, GridParams};

pub const REPORT_SCHEMA: &str = "psdlab-report/1";

/// Non-finite floats as the strings `inf`, `-inf`, `nan`; JSON has no literal for them.
pub mod real {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_f64(*v)
        } else {
            s.serialize_str(&v.to_string().to_lowercase())
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Num(f64),
            Str(String),
        }
        match Repr::deserialize(d)? {
            Repr::Num(v) => Ok(v),
            Repr::Str(s) => s.parse().map_err(serde::de::Error::custom),
        }
    }
}

/// Reads numbers and the non-finite string forms written by [`real`].
pub fn value_f64(v: &Value) -> Option<f64> {
    match v {
        Value::Number(n) => n.as_f64(),
        Value::String(s) if matches!(s.as_str(), "inf" | "-inf" | "nan") => s.parse().ok(),
        _ => None,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub schema: String,
    pub scenario: String,
    pub description: String,
    pub provenance: Provenance,
    pub analyses: Vec<AnalysisRecord>,
    pub assertions: Vec<AssertionResult>,
    pub passed: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub crate_version: String,
    pub grid: GridParams,
    pub h_list: Vec<f64>,
    pub backend: BackendSpec,
    pub tolerances: Tolerances,
    pub seeds: Seeds,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub sigma_floor: f64,
    pub model_margin: f64,
    pub ratio_floor: f64,
    pub window_mass: f64,
    pub pt_tol_rank: f64,
    pub pt_tol_cluster: f64,
    pub pt_rel_threshold: f64,
    pub finite_type_mu: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Seeds {
    /// Seed and count of the random directions in principal-type checks.
    pub pt_directions: u64,
    pub pt_random_directions: usize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Ok,
    Error,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnalysisRecord {
    pub id: String,
    pub kind: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub result: Option<Value>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AssertionResult {
    pub analysis: String,
    pub field: String,
    pub op: AssertOp,
    pub expected: Value,
    pub tol: f64,
    pub actual: Option<Value>,
    pub passed: bool,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScanResult {
    pub h: f64,
    pub re: Vec<f64>,
    pub im: Vec<f64>,
    /// Row-major in `im`: index `i_im * re.len() + i_re`.
    pub sigma_min: Vec<f64>,
    pub min_sigma: f64,
    pub lipschitz_violations: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub z: Cplx,
    pub h_list: Vec<f64>,
    pub sigma_min: Vec<f64>,
    pub censored: Vec<f64>,
    /// `power`, `exponential` or `inconclusive`.
    pub preference: String,
    pub mu_hat: f64,
    pub c_hat: f64,
    pub power_r2: f64,
    pub exponential_r2: f64,
}

impl FitResult {
    /// `r2` of the preferred model; the power fit when inconclusive.
    pub fn preferred_r2(&self) -> f64 {
        if self.preference == "exponential" {
            self.exponential_r2
        } else {
            self.power_r2
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapRow {
    pub h: f64,
    pub radius: f64,
    pub eigs_in_disk: usize,
    pub nearest_distance: Option<f64>,
    pub gap_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GapResult {
    pub z: Cplx,
    pub k: f64,
    pub rows: Vec<GapRow>,
    pub all_ok: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasimodeResult {
    pub z: Cplx,
    pub builder: String,
    pub h_list: Vec<f64>,
    pub ratios: Vec<f64>,
    pub censored: Vec<f64>,
    /// `+inf` when fewer than two ratios clear the round-off floor.
    #[serde(with = "real")]
    pub fitted_exponent: f64,
    pub r2: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OmegaResult {
    pub window: f64,
    pub grid_m: usize,
    pub deltas: Vec<f64>,
    pub measures: Vec<f64>,
    /// Every measure equals the full window length `2 window`.
    pub window_filling: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiniteTypeResult {
    pub deltas: Vec<f64>,
    pub measures: Vec<f64>,
    pub mu_fit: f64,
    pub r2: f64,
    pub k_order: Option<u32>,
    pub elliptic: bool,
    pub zero_orders: Vec<(f64, f64)>,
    pub diagnostics: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PrincipalTypeResult {
    pub is_pt: bool,
    pub is_pt_bilinear: bool,
    pub agree: bool,
    pub elliptic: bool,
    pub kappa: usize,
    pub big_k: usize,
    pub k_used: usize,
    pub witness_dir: Option<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct QuasiSymmetricResult {
    pub passes: bool,
    pub im_min: f64,
    #[serde(with = "real")]
    pub kernel_c: f64,
    pub kernel_points: usize,
    pub region_points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproximationResult {
    pub passes: bool,
    pub rank: usize,
    pub max_value: f64,
    pub max_tangent_derivative: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPmRow {
    pub z: Cplx,
    pub in_minus: bool,
    pub in_plus: bool,
    pub ws_flag: bool,
    pub witnesses: usize,
    pub invalid_germs: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LambdaPmResult {
    pub rows: Vec<LambdaPmRow>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WindingResult {
    pub index: i64,
    pub residue: f64,
    pub min_abs_det: f64,
}

/// Follow a dot path; numeric segments index arrays.
pub fn lookup<'a>(v: &'a Value, field: &str) -> Option<&'a Value> {
    field.split('.').try_fold(v, |cur, seg| match cur {
        Value::Object(m) => m.get(seg),
        Value::Array(a) => seg.parse::<usize>().ok().and_then(|i| a.get(i)),
        _ => None,
    })
}

fn compare(op: AssertOp, expected: &Value, tol: f64, actual: &Value) -> Result<bool, String> {
    let num = |v: &Value| value_f64(v).ok_or_else(|| format!("{v} is not a number"));
    match op {
        AssertOp::In => {
            let a = num(actual)?;
            let r = expected.as_array().ok_or("range must be [lo, hi]")?;
            Ok(a >= num(&r[0])? - tol && a <= num(&r[1])? + tol)
        }
        AssertOp::Ge => Ok(num(actual)? >= num(expected)? - tol),
        AssertOp::Le => Ok(num(actual)? <= num(expected)? + tol),
        AssertOp::Eq => match expected {
            Value::Number(_) => Ok((num(actual)? - num(expected)?).abs() <= tol),
            _ if std::mem::discriminant(expected) == std::mem::discriminant(actual) => Ok(expected == actual),
            _ => Err(format!("type mismatch: expected {expected}, found {actual}")),
        },
    }
}

/// Evaluate one assertion against the recorded analyses.
pub fn evaluate(a: &Assertion, analyses: &[AnalysisRecord]) -> AssertionResult {
    let mut out = AssertionResult {
        analysis: a.analysis.clone(),
        field: a.field.clone(),
        op: a.op,
        expected: a.value.clone(),
        tol: a.tol,
        actual: None,
        passed: false,
        note: None,
    };
    let Some(rec) = analyses.iter().find(|r| r.id == a.analysis) else {
        out.note = Some("analysis not found".into());
        return out;
    };
    let Some(result) = &rec.result else {
        out.note = Some(format!("analysis failed: {}", rec.error.as_deref().unwrap_or("no result")));
        return out;
    };
    let Some(actual) = lookup(result, &a.field) else {
        out.note = Some(format!("field `{}` not in result", a.field));
        return out;
    };
    out.actual = Some(actual.clone());
    match compare(a.op, &a.value, a.tol, actual) {
        Ok(p) => out.passed = p,
        Err(e) => out.note = Some(e),
    }
    out
}
