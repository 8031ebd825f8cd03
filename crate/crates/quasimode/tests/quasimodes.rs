use std::sync::Arc;

use quantize::{quantize, quantize_series, Backend, GridSpec, QuantizedOperator};
use quasimode::*;
use resolvent::sigma_min_at;
use symbol_core::linalg::{self, c};
use symbol_core::symbol::{const_coef, scalar_coef};
use symbol_core::{c64, catalog, germ_track, MatrixSymbol, PhaseGrid, PhasePoint, SymbolSeries};

fn dyadic(lo: i32, hi: i32) -> Vec<f64> {
    (lo..=hi).map(|k| 2f64.powi(-k)).collect()
}

fn series(sym: MatrixSymbol) -> SymbolSeries {
    SymbolSeries::new(sym)
}

fn scaling_builder(f: fn(f64) -> f64, k: u32) -> impl Fn(&QuantizedOperator) -> Result<Quasimode, QuasimodeError> + Sync {
    move |op| scaling_quasimode(&f, 0.0, k, &op.grid)
}

/// `xi + i a(x)` as a xi-polynomial symbol.
fn first_order(name: &str, a: fn(f64) -> c64) -> MatrixSymbol {
    MatrixSymbol::from_xi_poly(name, 1, vec![scalar_coef(1, a), const_coef(linalg::identity(1))])
}

fn beam_builder(sym: MatrixSymbol, w0: PhasePoint, j: usize) -> impl Fn(&QuantizedOperator) -> Result<Quasimode, QuasimodeError> + Sync {
    move |op| {
        let lam = sym.eval(&w0)?[(0, 0)];
        let germ = germ_track(&sym, &w0, lam, &PhaseGrid::patch(&w0, 2, 1e-3), 1e-9)?;
        gaussian_beam(&germ, op, j)
    }
}

#[test]
fn scaling_quasimode_davies_two_thirds() {
    let g = GridSpec::new(8.0, 512, 0.1).unwrap();
    let b = scaling_builder(|t| t * t, 2);
    let r = residual_sweep(&b, &dyadic(4, 10), &series(catalog::davies(8.0)), &g, c(0.0, 0.0), &SweepOptions::default())
        .unwrap();
    assert!((r.fitted_exponent - 2.0 / 3.0).abs() < 0.05, "{r:?}");
    assert!(r.r2 > 0.98);
    assert!(r.censored.is_empty());
}

#[test]
fn scaling_quasimode_sixth_order() {
    let g = GridSpec::new(8.0, 512, 0.1).unwrap();
    let b = scaling_builder(|t| t.powi(6), 6);
    let sym = catalog::scalar_davies_like(8.0, |t| t.powi(6));
    let r = residual_sweep(&b, &dyadic(4, 10), &series(sym), &g, c(0.0, 0.0), &SweepOptions::default()).unwrap();
    assert!((r.fitted_exponent - 6.0 / 7.0).abs() < 0.05, "{r:?}");
}

#[test]
fn scaling_quasimode_on_flat_part_is_pure_hd() {
    fn flat(t: f64) -> f64 {
        catalog::cut_on(t.abs() - 1.0)
    }
    let g = GridSpec::new(8.0, 512, 0.1).unwrap();
    let b = scaling_builder(flat, 2);
    let hs = dyadic(6, 10);
    let r = residual_sweep(&b, &hs, &series(catalog::scalar_davies_like(8.0, flat)), &g, c(0.0, 0.0), &SweepOptions::default())
        .unwrap();
    // only hD acts: ratio = h |phi'| / (width |phi|) exactly, width = h^{1/3}
    let normalized: Vec<f64> = r.ratios.iter().zip(&hs).map(|(q, h)| q / h.powf(2.0 / 3.0)).collect();
    for v in &normalized {
        assert!((v / normalized[0] - 1.0).abs() < 0.01, "{normalized:?}");
    }
}

#[test]
fn beam_sign_gate() {
    let sym = first_order("xi + ix", |x| c(0.0, x));
    let g = GridSpec::new(4.0, 256, 2f64.powi(-5)).unwrap();
    let op = quantize(&sym, &g, Backend::Poly).unwrap();
    let err = beam_builder(sym, PhasePoint::new1(0.0, 0.0), 1)(&op).unwrap_err();
    assert!(matches!(err, QuasimodeError::BracketSign { bracket } if (bracket - 1.0).abs() < 1e-8));
}

#[test]
fn beam_linear_model_is_sharp() {
    let sym = first_order("xi - ix", |x| c(0.0, -x));
    let g = GridSpec::new(4.0, 1024, 0.1).unwrap();
    let b = beam_builder(sym.clone(), PhasePoint::new1(0.0, 0.0), 1);
    let r = residual_sweep(&b, &dyadic(5, 9), &series(sym), &g, c(0.0, 0.0), &SweepOptions::default()).unwrap();
    assert!(r.fitted_exponent >= 1.4, "{r:?}");
}

#[test]
fn beam_davies_interior_point() {
    let sym = catalog::davies(8.0);
    let g = GridSpec::new(8.0, 1024, 0.1).unwrap();
    let w0 = PhasePoint::new1(-1.0, 0.0);
    let mut last: Option<Vec<f64>> = None;
    for j in 1..=2 {
        let b = beam_builder(sym.clone(), w0.clone(), j);
        let r = residual_sweep(&b, &dyadic(4, 7), &series(sym.clone()), &g, c(0.0, 1.0), &SweepOptions::default())
            .unwrap();
        assert!(r.fitted_exponent >= 1.4, "J={j}: {r:?}");
        if let Some(prev) = &last {
            assert!(r.ratios.iter().zip(prev).all(|(a, b)| *a <= *b * (1.0 + 1e-9)));
        }
        last = Some(r.ratios);
    }
}

#[test]
fn beam_schrodinger_germ_improves_with_j() {
    let sym = catalog::schrodinger(1, catalog::kappa_rational);
    let g = GridSpec::new(4.0, 1024, 0.1).unwrap();
    let w0 = PhasePoint::new1(0.5, -0.5);
    let z = c(0.25, catalog::kappa_rational(0.5));
    let hs = dyadic(5, 9);
    let r1 = residual_sweep(&beam_builder(sym.clone(), w0.clone(), 1), &hs, &series(sym.clone()), &g, z, &SweepOptions::default())
        .unwrap();
    let r2 = residual_sweep(&beam_builder(sym.clone(), w0, 2), &hs, &series(sym), &g, z, &SweepOptions::default())
        .unwrap();
    assert!(r1.fitted_exponent >= 1.4 && r1.fitted_exponent.is_finite(), "{r1:?}");
    assert!(r2.ratios.iter().zip(&r1.ratios).all(|(a, b)| a < b), "{r1:?} {r2:?}");
}

#[test]
fn beam_rejects_coarse_dual_grid() {
    let sym = catalog::schrodinger(1, catalog::kappa_rational);
    let g = GridSpec::new(4.0, 64, 2f64.powi(-9)).unwrap();
    let op = quantize(&sym, &g, Backend::Poly).unwrap();
    assert!(matches!(
        beam_builder(sym, PhasePoint::new1(0.5, -0.5), 1)(&op),
        Err(QuasimodeError::Resolution(_))
    ));
}

#[test]
fn kernel_quasimode_first_order() {
    let g = GridSpec::new(4.0, 512, 0.1).unwrap();
    let b = |op: &QuantizedOperator| kernel_quasimode_52(&op.grid);
    let hs = dyadic(3, 8);
    let r = residual_sweep(&b, &hs, &series(catalog::ex52(4.0)), &g, c(0.0, 0.0), &SweepOptions::default()).unwrap();
    assert!((r.fitted_exponent - 1.0).abs() < 0.05, "{r:?}");
    for w in r.ratios.windows(2) {
        assert!((w[1] / w[0] - 0.5).abs() < 0.025, "{:?}", r.ratios);
    }
    // the same state is far from the kernel of the finite-type (ex53) matrix
    let r53 = residual_sweep(&b, &hs, &series(catalog::ex53(4.0)), &g, c(0.0, 0.0), &SweepOptions::default()).unwrap();
    assert!(r53.ratios.iter().all(|q| *q > 0.02), "{:?}", r53.ratios);
    // levels off at a window constant instead of following h
    let n = hs.len();
    assert!(r53.ratios[n - 1] > 5.0 * r.ratios[n - 1]);
    assert!((r53.ratios[n - 1] / r53.ratios[n - 2] - 1.0).abs() < 0.05, "{:?}", r53.ratios);
}

#[test]
fn embed_identity_pads_with_zeros() {
    let g = GridSpec::new(8.0, 256, 2f64.powi(-4)).unwrap();
    let s = scaling_quasimode(&|t| t * t, 0.0, 2, &g).unwrap();
    let v = system_embed(&s, &EmbedMap::Constant(linalg::identity(2)), 1).unwrap();
    assert_eq!(v.components, 2);
    assert!(v.state[..256].iter().all(|z| *z == c(0.0, 0.0)));
    assert!(v.state[256..].iter().zip(&s.state).all(|(a, b)| (a - b).norm() < 1e-15));
    let sym = MatrixSymbol::new("I", 1, 2, |_| linalg::identity(2));
    let w = system_embed(&s, &EmbedMap::Symbol(sym, Backend::Fourier { xi_cutoff: None }), 1).unwrap();
    assert!(w.state.iter().zip(&v.state).all(|(a, b)| (a - b).norm() < 1e-12));
}

#[test]
fn embed_unitary_keeps_ratio() {
    let g = GridSpec::new(8.0, 256, 2f64.powi(-5)).unwrap();
    let scalar_sym = catalog::davies(8.0);
    let op1 = quantize(&scalar_sym, &g, Backend::Poly).unwrap();
    let mut s = scaling_quasimode(&|t| t * t, 0.0, 2, &g).unwrap();
    let base = s.measure(&op1).unwrap();
    // unitary from a QR-free construction: exp of a skew-Hermitian 2x2
    let (a, b) = (0.7f64, 1.3f64);
    let u = linalg::from_rows(&[
        &[c(a.cos(), 0.0), c(-a.sin() * b.cos(), -a.sin() * b.sin())],
        &[c(a.sin() * b.cos(), -a.sin() * b.sin()), c(a.cos(), 0.0)],
    ]);
    assert!(linalg::max_abs((linalg::adjoint(u.as_ref()) * &u - linalg::identity(2)).as_ref()) < 1e-14);
    let uu = u.clone();
    let sys = MatrixSymbol::from_xi_poly(
        "U diag(q, q + 1) U*",
        2,
        vec![
            Arc::new(move |x: f64| {
                let q = c(0.0, symbol_core::window::flatten(|t| t * t, x, 4.0));
                let d = linalg::diag(&[q, q + 1.0]);
                &uu * &d * &linalg::adjoint(uu.as_ref())
            }),
            const_coef(linalg::identity(2)),
        ],
    );
    let op2 = quantize(&sys, &g, Backend::Poly).unwrap();
    let mut v = system_embed(&s, &EmbedMap::Constant(u), 0).unwrap();
    let r = v.measure(&op2).unwrap();
    assert!((r - base).abs() < 1e-10, "{r} vs {base}");
}

#[test]
fn embed_into_rotated_system() {
    let (left, right) = catalog::ex41_rotation();
    let linv = linalg::inverse(left.as_ref()).unwrap();
    let cond = linalg::op_norm(linv.as_ref()).unwrap() / linalg::sigma_min(right.as_ref()).unwrap();
    let g = GridSpec::new(4.0, 512, 0.1).unwrap();
    let hs = dyadic(4, 7);
    // L P R = diag(tau + i a2, tau - i a2); the second entry has the beam
    let scalar = first_order("xi - i sin x", |x| c(0.0, -x.sin()));
    let w0 = PhasePoint::new1(0.0, 0.0);
    let rs = residual_sweep(&beam_builder(scalar.clone(), w0.clone(), 1), &hs, &series(scalar.clone()), &g, c(0.0, 0.0), &SweepOptions::default())
        .unwrap();
    let sys = catalog::ex41(Arc::new(|_| 0.0), Arc::new(f64::sin));
    let inner = beam_builder(scalar, w0, 1);
    let embedded = move |op: &QuantizedOperator| {
        let sg = op.grid;
        let sop = quantize(&first_order("xi - i sin x", |x| c(0.0, -x.sin())), &sg, Backend::Poly)?;
        system_embed(&inner(&sop)?, &EmbedMap::Constant(right.clone()), 1)
    };
    let rv = residual_sweep(&embedded, &hs, &series(sys), &g, c(0.0, 0.0), &SweepOptions::default()).unwrap();
    assert!((rv.fitted_exponent - rs.fitted_exponent).abs() < 0.05, "{rv:?} {rs:?}");
    for (a, b) in rv.ratios.iter().zip(&rs.ratios) {
        assert!(*a <= cond * b * (1.0 + 1e-9));
    }

    // exact case a2 = t: both sit near round-off
    let sys = catalog::ex41(Arc::new(|_| 0.0), Arc::new(|t| t));
    let op = quantize(&sys, &GridSpec::new(4.0, 512, 2f64.powi(-6)).unwrap(), Backend::Poly).unwrap();
    let sc = first_order("xi - ix", |x| c(0.0, -x));
    let sop = quantize(&sc, &op.grid, Backend::Poly).unwrap();
    let q = beam_builder(sc, PhasePoint::new1(0.0, 0.0), 1)(&sop).unwrap();
    let mut v = system_embed(&q, &EmbedMap::Constant(catalog::ex41_rotation().1), 1).unwrap();
    assert!(v.measure(&op).unwrap() < 1e-10);
}

#[test]
fn embed_rejects_singular_base_change() {
    let g = GridSpec::new(8.0, 256, 2f64.powi(-4)).unwrap();
    let s = scaling_quasimode(&|t| t * t, 0.0, 2, &g).unwrap();
    let e = linalg::from_rows(&[&[c(1.0, 0.0), c(1.0, 0.0)], &[c(1.0, 0.0), c(1.0, 0.0)]]);
    assert!(matches!(system_embed(&s, &EmbedMap::Constant(e), 0), Err(QuasimodeError::Singular(_))));
}

#[test]
fn quasimodes_bound_sigma_min() {
    let g = GridSpec::new(8.0, 512, 2f64.powi(-5)).unwrap();
    let op = quantize(&catalog::davies(8.0), &g, Backend::Poly).unwrap();
    let mut s = scaling_quasimode(&|t| t * t, 0.0, 2, &g).unwrap();
    let ratio = s.measure(&op).unwrap();
    assert!(sigma_min_at(&op, c(0.0, 0.0)).unwrap() <= ratio);

    let mut b = beam_builder(catalog::davies(8.0), PhasePoint::new1(-1.0, 0.5), 1)(&op).unwrap();
    let ratio = b.measure(&op).unwrap();
    assert!(sigma_min_at(&op, b.target_z).unwrap() <= ratio);

    // adjoint transfer: a quasimode of P* at conj(z) bounds sigma_min(P - z)
    let adj = quantize(&catalog::davies(8.0).adjoint(), &g, Backend::Poly).unwrap();
    let z = c(0.5, 1.0);
    let mut q = beam_builder(catalog::davies(8.0).adjoint(), PhasePoint::new1(1.0, 0.5), 1)(&adj).unwrap();
    assert!((q.target_z - z.conj()).norm() < 1e-12);
    let ratio = q.measure(&adj).unwrap();
    assert!(sigma_min_at(&op, z).unwrap() <= ratio);
}

#[test]
fn window_inertness() {
    let h = 2f64.powi(-6);
    let measure = |l: f64, m: usize| {
        let g = GridSpec::new(l, m, h).unwrap();
        let op = quantize_series(&series(catalog::davies(l)), &g, Backend::Poly).unwrap();
        let mut s = scaling_quasimode(&|t| t * t, 0.0, 2, &g).unwrap();
        s.measure(&op).unwrap()
    };
    let (a, b) = (measure(8.0, 256), measure(16.0, 512));
    assert!((a - b).abs() < 0.01 * a, "{a} {b}");
}
