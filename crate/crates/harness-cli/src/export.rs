//! CSV, SVG and JSON files from a run report.
//!
//! Floats are written with Rust's shortest round-trip formatting.

use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;

use crate::report::*;
use crate::HarnessError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Svg,
    Json,
}

pub const SCAN_HEADER: [&str; 3] = ["re_z", "im_z", "sigma_min"];
pub const FIT_HEADER: [&str; 6] = ["h", "sigma_min", "model", "mu_hat", "c_hat", "r2"];
pub const OMEGA_HEADER: [&str; 2] = ["delta", "measure"];
pub const QUASIMODE_HEADER: [&str; 2] = ["h", "residual_ratio"];

/// Heatmap ramp for `log10 sigma_min`, low to high.
pub const RAMP: [&str; 8] = ["#440154", "#46327e", "#365c8d", "#277f8e", "#1fa187", "#4ac16d", "#a0da39", "#fde725"];

/// Canonical JSON text of a report (pretty, trailing newline).
pub fn report_json(r: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(r).expect("reports always serialize");
    s.push('\n');
    s
}

pub fn parse_report(text: &str, origin: &str) -> Result<RunReport, HarnessError> {
    let r: RunReport = serde_json::from_str(text).map_err(|e| HarnessError::Schema {
        origin: origin.to_string(),
        path: String::new(),
        line: e.line(),
        column: e.column(),
        message: crate::scenario::bare_message(&e),
    })?;
    if r.schema != REPORT_SCHEMA {
        return Err(HarnessError::Invalid { path: format!("{origin}: schema"), message: format!("expected `{REPORT_SCHEMA}`") });
    }
    Ok(r)
}

fn typed<T: DeserializeOwned>(rec: &AnalysisRecord) -> Result<Option<T>, HarnessError> {
    match &rec.result {
        None => Ok(None),
        Some(v) => serde_json::from_value(v.clone())
            .map(Some)
            .map_err(|e| HarnessError::Invalid { path: format!("analyses.{}.result", rec.id), message: e.to_string() }),
    }
}

fn csv_text(header: &[&str], rows: Vec<Vec<String>>) -> Result<String, HarnessError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let fail = |e: csv::Error| HarnessError::Invalid { path: "csv".into(), message: e.to_string() };
    w.write_record(header).map_err(fail)?;
    for r in rows {
        w.write_record(&r).map_err(fail)?;
    }
    let bytes = w.into_inner().map_err(|e| HarnessError::Invalid { path: "csv".into(), message: e.to_string() })?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn f(v: f64) -> String {
    v.to_string()
}

/// CSV text for one analysis, or `None` for kinds without a table (and failed analyses).
pub fn analysis_csv(rec: &AnalysisRecord) -> Result<Option<String>, HarnessError> {
    let text = match rec.kind.as_str() {
        "scan" => typed::<ScanResult>(rec)?.map(|s| {
            let n = s.re.len();
            let rows = s
                .sigma_min
                .iter()
                .enumerate()
                .map(|(i, v)| vec![f(s.re[i % n]), f(s.im[i / n]), f(*v)])
                .collect();
            csv_text(&SCAN_HEADER, rows)
        }),
        "fit" => typed::<FitResult>(rec)?.map(|r| {
            let rows = r
                .h_list
                .iter()
                .zip(&r.sigma_min)
                .map(|(h, s)| vec![f(*h), f(*s), r.preference.clone(), f(r.mu_hat), f(r.c_hat), f(r.preferred_r2())])
                .collect();
            csv_text(&FIT_HEADER, rows)
        }),
        "omega" => typed::<OmegaResult>(rec)?.map(|r| {
            csv_text(&OMEGA_HEADER, r.deltas.iter().zip(&r.measures).map(|(d, m)| vec![f(*d), f(*m)]).collect())
        }),
        "finite_type" => typed::<FiniteTypeResult>(rec)?.map(|r| {
            csv_text(&OMEGA_HEADER, r.deltas.iter().zip(&r.measures).map(|(d, m)| vec![f(*d), f(*m)]).collect())
        }),
        "quasimode" => typed::<QuasimodeResult>(rec)?.map(|r| {
            csv_text(&QUASIMODE_HEADER, r.h_list.iter().zip(&r.ratios).map(|(h, q)| vec![f(*h), f(*q)]).collect())
        }),
        _ => None,
    };
    text.transpose()
}

fn lerp_hex(a: &str, b: &str, t: f64) -> String {
    let ch = |s: &str, k: usize| u8::from_str_radix(&s[1 + 2 * k..3 + 2 * k], 16).unwrap_or(0) as f64;
    let mix = |k| (ch(a, k) * (1.0 - t) + ch(b, k) * t).round() as u8;
    format!("#{:02x}{:02x}{:02x}", mix(0), mix(1), mix(2))
}

/// Ramp colour at `t in [0, 1]`, linear between neighbouring stops.
pub fn ramp_color(t: f64) -> String {
    let t = if t.is_finite() { t.clamp(0.0, 1.0) } else { 0.0 };
    let x = t * (RAMP.len() - 1) as f64;
    let k = (x.floor() as usize).min(RAMP.len() - 2);
    lerp_hex(RAMP[k], RAMP[k + 1], x - k as f64)
}

/// Heatmap of `log10 sigma_min` over the scan lattice. Shapes and text only.
pub fn scan_svg(s: &ScanResult, title: &str) -> String {
    let (nr, ni) = (s.re.len(), s.im.len());
    let logs: Vec<f64> = s.sigma_min.iter().map(|v| v.max(1e-300).log10()).collect();
    let lo = logs.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let span = if hi > lo { hi - lo } else { 1.0 };
    let (cell, left, top) = (24.0, 70.0, 40.0);
    let (pw, ph) = (cell * nr as f64, cell * ni as f64);
    let width = left + pw + 110.0;
    let height = top + ph + 60.0;
    let mut out = format!(
        "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{width}\" height=\"{height}\" viewBox=\"0 0 {width} {height}\">\n"
    );
    out += &format!("<rect x=\"0\" y=\"0\" width=\"{width}\" height=\"{height}\" fill=\"#ffffff\"/>\n");
    out += &format!("<text x=\"{left}\" y=\"24\" font-size=\"14\">{}</text>\n", escape(title));
    for (i, v) in logs.iter().enumerate() {
        let (ir, ii) = (i % nr, i / nr);
        // im increases upwards
        let x = left + cell * ir as f64;
        let y = top + cell * (ni - 1 - ii) as f64;
        out += &format!(
            "<rect x=\"{x}\" y=\"{y}\" width=\"{cell}\" height=\"{cell}\" fill=\"{}\"/>\n",
            ramp_color((v - lo) / span)
        );
    }
    out += &format!("<rect x=\"{left}\" y=\"{top}\" width=\"{pw}\" height=\"{ph}\" fill=\"none\" stroke=\"#000000\"/>\n");
    let fmt = |v: f64| format!("{v:.3}");
    let axis_y = top + ph + 16.0;
    out += &format!("<text x=\"{left}\" y=\"{axis_y}\" font-size=\"11\">{}</text>\n", fmt(s.re[0]));
    out += &format!("<text x=\"{}\" y=\"{axis_y}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n", left + pw, fmt(s.re[nr - 1]));
    out += &format!("<text x=\"{}\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\">re(z)</text>\n", left + pw / 2.0, axis_y + 20.0);
    out += &format!("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n", left - 4.0, top + ph, fmt(s.im[0]));
    out += &format!("<text x=\"{}\" y=\"{}\" font-size=\"11\" text-anchor=\"end\">{}</text>\n", left - 4.0, top + 10.0, fmt(s.im[ni - 1]));
    out += &format!(
        "<text x=\"18\" y=\"{}\" font-size=\"13\" text-anchor=\"middle\" transform=\"rotate(-90 18 {})\">im(z)</text>\n",
        top + ph / 2.0,
        top + ph / 2.0
    );
    // colour bar: one band per stop, top = largest log10 sigma_min
    let bx = left + pw + 20.0;
    let bh = ph / RAMP.len() as f64;
    for (k, c) in RAMP.iter().rev().enumerate() {
        out += &format!("<rect x=\"{bx}\" y=\"{}\" width=\"16\" height=\"{bh}\" fill=\"{c}\"/>\n", top + bh * k as f64);
    }
    out += &format!("<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n", bx + 20.0, top + 10.0, fmt(hi));
    out += &format!("<text x=\"{}\" y=\"{}\" font-size=\"11\">{}</text>\n", bx + 20.0, top + ph, fmt(lo));
    out += &format!("<text x=\"{bx}\" y=\"{}\" font-size=\"11\">log10 sigma_min</text>\n", top + ph + 36.0);
    out += "</svg>\n";
    out
}

fn escape(s: &str) -> String {
    s.replace('&', "&amp;").replace('<', "&lt;").replace('>', "&gt;")
}

fn write(path: PathBuf, text: &str) -> Result<PathBuf, HarnessError> {
    fs::write(&path, text).map_err(|source| HarnessError::Io { path: path.clone(), source })?;
    Ok(path)
}

/// Write the files for `format` into `out_dir` (created if missing); returns the paths written.
///
/// CSV: one `<analysis>.csv` per tabular analysis. SVG: one `<analysis>.svg` per scan.
/// JSON: `<scenario>.json`.
pub fn export(r: &RunReport, format: Format, out_dir: &Path) -> Result<Vec<PathBuf>, HarnessError> {
    fs::create_dir_all(out_dir).map_err(|source| HarnessError::Io { path: out_dir.to_path_buf(), source })?;
    let mut written = Vec::new();
    match format {
        Format::Json => written.push(write(out_dir.join(format!("{}.json", r.scenario)), &report_json(r))?),
        Format::Csv => {
            for rec in &r.analyses {
                if let Some(text) = analysis_csv(rec)? {
                    written.push(write(out_dir.join(format!("{}.csv", rec.id)), &text)?);
                }
            }
        }
        Format::Svg => {
            for rec in r.analyses.iter().filter(|a| a.kind == "scan") {
                if let Some(s) = typed::<ScanResult>(rec)? {
                    let title = format!("{} / {}: log10 sigma_min at h = {}", r.scenario, rec.id, s.h);
                    written.push(write(out_dir.join(format!("{}.svg", rec.id)), &scan_svg(&s, &title))?);
                }
            }
        }
    }
    Ok(written)
}
