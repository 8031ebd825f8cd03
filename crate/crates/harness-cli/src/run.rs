//! Executing scenarios.

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value;

use classify::{Chart, PtTolerances};
use quantize::{quantize_series, GridSpec, QuantizedOperator};
use quasimode::{Quasimode, QuasimodeError, SweepOptions};
use resolvent::{Model, Preference, ZLattice};
use symbol_core::{c64, germ_track, PhaseGrid, PhasePoint};

use crate::report::*;
use crate::scenario::*;
use crate::symbols;
use crate::HarnessError;

const PT_SEED: u64 = 7;
const PT_RANDOM_DIRECTIONS: usize = 32;

type AnyResult<T> = Result<T, Box<dyn std::error::Error + Send + Sync>>;

fn cz(z: Cplx) -> c64 {
    c64::new(z[0], z[1])
}

fn to_value<T: Serialize>(v: &T) -> AnyResult<Value> {
    Ok(serde_json::to_value(v)?)
}

fn grid_of(op: &Operator, h: f64) -> AnyResult<GridSpec> {
    Ok(GridSpec::new(op.grid.l, op.grid.m, h)?)
}

fn h_list_of(op: &Operator) -> AnyResult<Vec<f64>> {
    op.h_list.clone().ok_or_else(|| "no h_list given for this analysis".into())
}

fn box_region(r: &Region) -> AnyResult<Vec<PhasePoint>> {
    let d = r.center.len();
    if d == 0 || d % 2 != 0 || r.k == 0 {
        return Err("region needs an even-dimensional center and k >= 1".into());
    }
    let k = r.k as i64;
    let ticks: Vec<f64> = (-k..=k).map(|i| r.half * i as f64 / k as f64).collect();
    let total = ticks.len().pow(d as u32);
    Ok((0..total)
        .map(|mut idx| {
            let cs: Vec<f64> = r
                .center
                .iter()
                .map(|c| {
                    let v = c + ticks[idx % ticks.len()];
                    idx /= ticks.len();
                    v
                })
                .collect();
            PhasePoint::from_coords(&cs)
        })
        .collect())
}

fn scan(s: &ScanSpec, op: &Operator) -> AnyResult<Value> {
    let h = match s.h {
        Some(h) => h,
        None => *h_list_of(op)?.first().ok_or("empty h_list")?,
    };
    let series = symbols::series(&op.symbol, &op.lower_order)?;
    let q = quantize_series(&series, &grid_of(op, h)?, op.backend.backend())?;
    let lattice = ZLattice::uniform(s.re, s.im)?;
    let r = resolvent::scan(&q, &lattice)?;
    let min_sigma = r.sigma_min.iter().copied().fold(f64::INFINITY, f64::min);
    to_value(&ScanResult {
        h,
        lipschitz_violations: r.lipschitz_violations(1e-9).len(),
        re: r.lattice.re,
        im: r.lattice.im,
        sigma_min: r.sigma_min,
        min_sigma,
    })
}

fn fit(s: &FitSpec, op: &Operator) -> AnyResult<Value> {
    let series = symbols::series(&op.symbol, &op.lower_order)?;
    let hs = h_list_of(op)?;
    let f = resolvent::exponent_fit(&series, &grid_of(op, hs[0])?, cz(s.z), &hs, op.backend.backend())?;
    let preference = match f.preference {
        Preference::Prefer(Model::Power) => "power",
        Preference::Prefer(Model::Exponential) => "exponential",
        Preference::Inconclusive => "inconclusive",
    };
    to_value(&FitResult {
        z: s.z,
        preference: preference.into(),
        mu_hat: f.mu_hat(),
        c_hat: f.c_hat(),
        power_r2: f.power.r2,
        exponential_r2: f.exponential.r2,
        h_list: f.h_list,
        sigma_min: f.sigma_list,
        censored: f.censored,
    })
}

fn gap(s: &GapSpec, op: &Operator) -> AnyResult<Value> {
    if !(s.k > 0.0) {
        return Err("k must be positive".into());
    }
    let series = symbols::series(&op.symbol, &op.lower_order)?;
    let z = cz(s.z);
    let rows = h_list_of(op)?
        .par_iter()
        .map(|&h| -> AnyResult<GapRow> {
            if !(h < 1.0) {
                return Err(format!("gap radius k h log(1/h) needs h < 1, got {h}").into());
            }
            let q = quantize_series(&series, &grid_of(op, h)?, op.backend.backend())?;
            let radius = s.k * h * (1.0 / h).ln();
            let g = resolvent::spectrum_and_gap(&q, z, radius)?;
            Ok(GapRow {
                h,
                radius,
                eigs_in_disk: g.eigs_in_disk.len(),
                nearest_distance: g.nearest.map(|e| (e - z).norm()),
                gap_ok: g.gap_ok,
            })
        })
        .collect::<AnyResult<Vec<_>>>()?;
    to_value(&GapResult { z: s.z, k: s.k, all_ok: rows.iter().all(|r| r.gap_ok), rows })
}

type BuildFn = Box<dyn Fn(&QuantizedOperator) -> Result<Quasimode, QuasimodeError> + Sync + Send>;

fn builder_fn(b: &Builder, op: &Operator) -> AnyResult<(BuildFn, String)> {
    Ok(match b {
        Builder::Scaling { f, t0, k } => {
            let prof = symbols::profile_fn(f, "builder.f")?;
            let (t0, k) = (*t0, *k);
            let build: BuildFn = Box::new(move |q| quasimode::scaling_quasimode(&|t| prof(t), t0, k, &q.grid));
            (build, format!("scaling(f = {f}, t0 = {t0}, k = {k})"))
        }
        Builder::Beam { x0, xi0, terms } => {
            let sym = symbols::series(&op.symbol, &[])?.principal().clone();
            if sym.size() != 1 {
                return Err("beam builder needs a scalar symbol".into());
            }
            let w0 = PhasePoint::new1(*x0, *xi0);
            let terms = *terms;
            let build: BuildFn = Box::new(move |q| {
                let lam = sym.eval(&w0)?[(0, 0)];
                let germ = germ_track(&sym, &w0, lam, &PhaseGrid::patch(&w0, 2, 1e-3), 1e-9)?;
                quasimode::gaussian_beam(&germ, q, terms)
            });
            (build, format!("beam(x0 = {x0}, xi0 = {xi0}, J = {terms})"))
        }
        Builder::Kernel52 => {
            let build: BuildFn = Box::new(|q| quasimode::kernel_quasimode_52(&q.grid));
            (build, "kernel52".into())
        }
    })
}

fn quasimode_sweep(s: &QuasimodeSpec, op: &Operator) -> AnyResult<Value> {
    let series = symbols::series(&op.symbol, &op.lower_order)?;
    let hs = h_list_of(op)?;
    let (build, label) = builder_fn(&s.builder, op)?;
    let opts = SweepOptions { backend: op.backend.backend(), gate_tol: None };
    let r = quasimode::residual_sweep(&*build, &hs, &series, &grid_of(op, hs[0])?, cz(s.z), &opts)?;
    to_value(&QuasimodeResult {
        z: s.z,
        builder: label,
        h_list: r.h_list,
        ratios: r.ratios,
        censored: r.censored,
        fitted_exponent: r.fitted_exponent,
        r2: r.r2,
    })
}

fn classify_check(s: &ClassifySpec, op: &Operator) -> AnyResult<Value> {
    let sym = symbols::series(&op.symbol, &[])?.principal().clone();
    let n = sym.n();
    match &s.check {
        Check::PrincipalType { w, lambda } => {
            if w.len() != 2 * n {
                return Err(format!("w needs {} coordinates", 2 * n).into());
            }
            let dirs = classify::default_directions(n, PT_RANDOM_DIRECTIONS, PT_SEED);
            let v = classify::principal_type_at(&sym, &PhasePoint::from_coords(w), cz(*lambda), &dirs, &PtTolerances::default())?;
            to_value(&PrincipalTypeResult {
                is_pt: v.is_pt,
                is_pt_bilinear: v.is_pt_bilinear,
                agree: v.agree,
                elliptic: v.elliptic,
                kappa: v.kappa,
                big_k: v.big_k,
                k_used: v.k_used,
                witness_dir: v.witness_dir,
            })
        }
        Check::QuasiSymmetric { symmetrizer, z, field, region, c_min, tol_im, tol_rank } => {
            if field.len() != 2 * n {
                return Err(format!("field needs {} components", 2 * n).into());
            }
            let p = match z {
                Some(z) => sym.shifted(cz(*z)),
                None => sym,
            };
            let m = match symmetrizer {
                Some(rows) => symbols::phase_matrix(rows, n, p.size(), "check.symmetrizer")?,
                None => symbols::identity(n, p.size()),
            };
            let q = symbol_core::MatrixSymbol::sandwich(&m, &p, &symbols::identity(n, p.size()));
            let v_exprs = symbols::phase_exprs(field, n, "check.field")?;
            let v = move |w: &PhasePoint| {
                let vals = symbols::phase_vals(w);
                v_exprs.iter().map(|e| e.eval_real(&vals)).collect::<Vec<f64>>()
            };
            let pts = box_region(region)?;
            let r = classify::quasi_symmetric_check(&q, &v, &pts, *c_min, *tol_im, *tol_rank)?;
            to_value(&QuasiSymmetricResult {
                passes: r.passes,
                im_min: r.im_min,
                kernel_c: r.kernel_c,
                kernel_points: r.kernel_points,
                region_points: pts.len(),
            })
        }
        Check::Approximation { normal_axis, tangent_axes, w0, eps, region, tol } => {
            let chart = Chart { normal_axis: *normal_axis, tangent_axes: tangent_axes.clone() };
            let pts = box_region(region)?;
            let r = classify::approximation_check(&sym, &chart, &PhasePoint::from_coords(w0), *eps, &pts, *tol)?;
            to_value(&ApproximationResult {
                passes: r.passes,
                rank: r.rank,
                max_value: r.max_value,
                max_tangent_derivative: r.max_tangent_derivative,
            })
        }
        Check::LambdaPm { z, grid, match_radius } => {
            let zs: Vec<c64> = z.iter().map(|v| cz(*v)).collect();
            let pg = PhaseGrid::uniform(grid)?;
            let r = classify::lambda_pm_scan(&sym, &zs, &pg, &classify::PmScanConfig::new(*match_radius))?;
            let rows = r
                .iter()
                .zip(z)
                .map(|(l, z)| LambdaPmRow {
                    z: *z,
                    in_minus: l.in_minus,
                    in_plus: l.in_plus,
                    ws_flag: l.ws_flag,
                    witnesses: l.witnesses.len(),
                    invalid_germs: l.invalid_germs,
                })
                .collect();
            to_value(&LambdaPmResult { rows })
        }
        Check::Winding { mu, radius, samples } => {
            let w = classify::winding_index(&sym, cz(*mu), *radius, *samples)?;
            to_value(&WindingResult { index: w.index, residue: w.residue, min_abs_det: w.min_abs_det })
        }
    }
}

fn omega(s: &OmegaSpec) -> AnyResult<Value> {
    let f = symbols::path_fn(&s.path, "path")?;
    let measures = s
        .deltas
        .iter()
        .map(|&d| classify::omega_delta(&*f, s.window, s.grid_m, d))
        .collect::<Result<Vec<f64>, _>>()?;
    let full = 2.0 * s.window;
    to_value(&OmegaResult {
        window: s.window,
        grid_m: s.grid_m,
        deltas: s.deltas.clone(),
        window_filling: measures.iter().all(|m| (m - full).abs() <= 1e-12 * full),
        measures,
    })
}

fn finite_type(s: &OmegaSpec) -> AnyResult<Value> {
    let f = symbols::path_fn(&s.path, "path")?;
    let r = classify::finite_type_order(&*f, s.window, &s.deltas, s.grid_m)?;
    to_value(&FiniteTypeResult {
        deltas: s.deltas.clone(),
        measures: r.measures,
        mu_fit: r.mu_fit,
        r2: r.r2,
        k_order: r.k_order,
        elliptic: r.elliptic,
        zero_orders: r.zero_orders,
        diagnostics: r.diagnostics,
    })
}

fn run_analysis(sc: &Scenario, a: &Analysis) -> AnalysisRecord {
    let op = sc.operator_for(a);
    let out = match a {
        Analysis::Scan(s) => scan(s, &op),
        Analysis::Fit(s) => fit(s, &op),
        Analysis::Gap(s) => gap(s, &op),
        Analysis::Quasimode(s) => quasimode_sweep(s, &op),
        Analysis::Classify(s) => classify_check(s, &op),
        Analysis::Omega(s) => omega(s),
        Analysis::FiniteType(s) => finite_type(s),
    };
    let (status, error, result) = match out {
        Ok(v) => (Status::Ok, None, Some(v)),
        Err(e) => (Status::Error, Some(e.to_string()), None),
    };
    AnalysisRecord { id: a.id().to_string(), kind: a.kind().to_string(), status, error, result }
}

pub fn provenance(sc: &Scenario) -> Provenance {
    let pt = PtTolerances::default();
    Provenance {
        crate_version: env!("CARGO_PKG_VERSION").to_string(),
        grid: sc.grid,
        h_list: sc.h_list.as_ref().map(HList::values).unwrap_or_default(),
        backend: sc.backend,
        tolerances: Tolerances {
            sigma_floor: resolvent::SIGMA_FLOOR,
            model_margin: resolvent::MODEL_MARGIN,
            ratio_floor: quasimode::RATIO_FLOOR,
            window_mass: quasimode::WINDOW_MASS_TOL,
            pt_tol_rank: pt.tol_rank,
            pt_tol_cluster: pt.tol_cluster,
            pt_rel_threshold: pt.rel_threshold,
            finite_type_mu: classify::finite_type::MU_TOLERANCE,
        },
        seeds: Seeds { pt_directions: PT_SEED, pt_random_directions: PT_RANDOM_DIRECTIONS },
    }
}

/// Run every analysis (in parallel, recorded in declared order), then the assertions.
///
/// Analysis failures are recorded per item; they fail any assertion that reads them.
pub fn run_scenario(sc: &Scenario) -> RunReport {
    let analyses: Vec<AnalysisRecord> = sc.analyses.par_iter().map(|a| run_analysis(sc, a)).collect();
    let assertions: Vec<AssertionResult> = sc.expect.iter().map(|e| evaluate(e, &analyses)).collect();
    RunReport {
        schema: REPORT_SCHEMA.to_string(),
        scenario: sc.id.clone(),
        description: sc.description.clone(),
        provenance: provenance(sc),
        passed: assertions.iter().all(|a| a.passed),
        analyses,
        assertions,
    }
}

/// Pool size from `PSDLAB_THREADS`, if set.
pub fn threads_from_env() -> Result<Option<usize>, HarnessError> {
    match std::env::var("PSDLAB_THREADS") {
        Err(_) => Ok(None),
        Ok(s) => match s.trim().parse::<usize>() {
            Ok(n) if n > 0 => Ok(Some(n)),
            _ => Err(HarnessError::Invalid { path: "PSDLAB_THREADS".into(), message: format!("expected a positive integer, got `{s}`") }),
        },
    }
}

/// [`run_scenario`] inside a pool of `threads` workers (the global pool when `None`).
pub fn run_with_threads(sc: &Scenario, threads: Option<usize>) -> Result<RunReport, HarnessError> {
    match threads {
        None => Ok(run_scenario(sc)),
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| HarnessError::Invalid { path: "PSDLAB_THREADS".into(), message: e.to_string() })?;
            Ok(pool.install(|| run_scenario(sc)))
        }
    }
}
