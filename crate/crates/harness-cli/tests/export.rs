use std::fs;

use harness_cli::export::{FIT_HEADER, OMEGA_HEADER, QUASIMODE_HEADER, SCAN_HEADER};
use harness_cli::report::FitResult;
use harness_cli::{export, parse_report, parse_scenario, report_json, run_scenario, run_with_threads, Format};

const SMALL: &str = r#"{
  "schema": "psdlab-scenario/1",
  "id": "small",
  "symbol": { "type": "davies", "l": 4 },
  "grid": { "l": 4, "m": 128 },
  "h_list": { "geometric": { "start": 0.25, "ratio": 0.5, "count": 5 } },
  "analyses": [
    { "kind": "scan", "id": "scan", "h": 0.25, "re": [-1, 1, 4], "im": [-0.5, 1, 3] },
    { "kind": "fit", "id": "fit", "z": [0, 0] },
    { "kind": "quasimode", "id": "qm", "z": [0, 0], "builder": { "type": "scaling", "f": "t^2", "t0": 0, "k": 2 } },
    { "kind": "omega", "id": "omega", "path": { "builtin": "ex52_f" }, "window": 1, "grid_m": 2000, "deltas": [0.01, 0.001] }
  ],
  "expect": [ { "analysis": "fit", "field": "mu_hat", "op": "ge", "value": 0 } ]
}"#;

fn csv_rows(path: &std::path::Path) -> (Vec<String>, Vec<Vec<String>>) {
    let mut rd = csv::Reader::from_path(path).unwrap();
    let header = rd.headers().unwrap().iter().map(String::from).collect();
    let rows = rd.records().map(|r| r.unwrap().iter().map(String::from).collect()).collect();
    (header, rows)
}

#[test]
fn reruns_are_byte_identical() {
    let sc = parse_scenario(SMALL, "small").unwrap();
    let a = report_json(&run_scenario(&sc));
    let b = report_json(&run_with_threads(&sc, Some(1)).unwrap());
    let c = report_json(&run_with_threads(&sc, Some(3)).unwrap());
    assert_eq!(a, b);
    assert_eq!(a, c);

    let r = parse_report(&a, "a").unwrap();
    assert_eq!(report_json(&r), a, "parse/serialise is not a fixed point");
    let d1 = tempfile::tempdir().unwrap();
    let d2 = tempfile::tempdir().unwrap();
    let f1 = export(&r, Format::Csv, d1.path()).unwrap();
    let f2 = export(&parse_report(&c, "c").unwrap(), Format::Csv, d2.path()).unwrap();
    assert_eq!(f1.len(), 4);
    for (p, q) in f1.iter().zip(&f2) {
        assert_eq!(fs::read(p).unwrap(), fs::read(q).unwrap(), "{}", p.display());
    }
}

#[test]
fn csv_headers_and_shapes() {
    let sc = parse_scenario(SMALL, "small").unwrap();
    let r = run_scenario(&sc);
    let dir = tempfile::tempdir().unwrap();
    export(&r, Format::Csv, dir.path()).unwrap();

    let (h, rows) = csv_rows(&dir.path().join("scan.csv"));
    assert_eq!(h, SCAN_HEADER);
    assert_eq!(rows.len(), 12);
    let (h, rows) = csv_rows(&dir.path().join("fit.csv"));
    assert_eq!(h, FIT_HEADER);
    assert_eq!(rows.len(), 5);
    let (h, rows) = csv_rows(&dir.path().join("qm.csv"));
    assert_eq!(h, QUASIMODE_HEADER);
    assert_eq!(rows.len(), 5);
    let (h, rows) = csv_rows(&dir.path().join("omega.csv"));
    assert_eq!(h, OMEGA_HEADER);
    assert_eq!(rows.len(), 2);
}

#[test]
fn fit_csv_reproduces_the_exponent() {
    let sc = parse_scenario(SMALL, "small").unwrap();
    let r = run_scenario(&sc);
    let rec = r.analyses.iter().find(|a| a.id == "fit").unwrap();
    let fit: FitResult = serde_json::from_value(rec.result.clone().unwrap()).unwrap();

    let dir = tempfile::tempdir().unwrap();
    export(&r, Format::Csv, dir.path()).unwrap();
    let (_, rows) = csv_rows(&dir.path().join("fit.csv"));
    let h: Vec<f64> = rows.iter().map(|r| r[0].parse().unwrap()).collect();
    let s: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(h, fit.h_list);
    assert_eq!(s, fit.sigma_min);
    let refit = resolvent::fit_scaling(&h, &s).unwrap();
    assert_eq!(refit.mu_hat(), fit.mu_hat);
    for row in &rows {
        assert_eq!(row[2], fit.preference);
        assert_eq!(row[3].parse::<f64>().unwrap(), fit.mu_hat);
        assert_eq!(row[4].parse::<f64>().unwrap(), fit.c_hat);
    }
}

#[test]
fn svg_has_no_fonts_and_one_cell_per_point() {
    let sc = parse_scenario(SMALL, "small").unwrap();
    let r = run_scenario(&sc);
    let dir = tempfile::tempdir().unwrap();
    let files = export(&r, Format::Svg, dir.path()).unwrap();
    assert_eq!(files.len(), 1);
    let svg = fs::read_to_string(&files[0]).unwrap();
    assert!(svg.starts_with("<svg") || svg.starts_with("<?xml"));
    for banned in ["font-family", "@font-face", "<image", "href", "<script"] {
        assert!(!svg.contains(banned), "found {banned}");
    }
    assert!(svg.matches("<rect").count() >= 12);
}

#[test]
fn json_export_round_trips() {
    let sc = parse_scenario(SMALL, "small").unwrap();
    let r = run_scenario(&sc);
    let dir = tempfile::tempdir().unwrap();
    let files = export(&r, Format::Json, dir.path()).unwrap();
    assert_eq!(files, vec![dir.path().join("small.json")]);
    let text = fs::read_to_string(&files[0]).unwrap();
    assert_eq!(text, report_json(&r));
}
