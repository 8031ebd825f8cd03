use std::f64::consts::PI;

use proptest::prelude::*;
use quantize::{apply, op_norm_estimate, quantize_fourier, quantize_poly, quantize_series, Backend, GridSpec};
use symbol_core::linalg::{self, c, CMat};
use symbol_core::symbol::{const_coef, scalar_coef};
use symbol_core::{c64, catalog, MatrixSymbol};

fn rel_entrywise(a: &CMat, b: &CMat) -> f64 {
    linalg::max_abs((a - b).as_ref()) / linalg::max_abs(a.as_ref()).max(1e-300)
}

fn xi_power(k: usize) -> MatrixSymbol {
    let mut coefs = vec![const_coef(linalg::zeros(1, 1)); k];
    coefs.push(const_coef(linalg::identity(1)));
    MatrixSymbol::from_xi_poly(format!("xi^{k}"), 1, coefs)
}

#[test]
fn multiplication_is_diagonal() {
    let g = GridSpec::new(3.0, 64, 0.2).unwrap();
    let s = MatrixSymbol::from_xi_poly("x", 1, vec![scalar_coef(1, |x| c(x, 0.0))]);
    for op in [quantize_poly(&s, &g).unwrap(), quantize_fourier(&s, &g, None).unwrap()] {
        for i in 0..g.m {
            for j in 0..g.m {
                let expect = if i == j { g.x(i) } else { 0.0 };
                assert!((op.matrix[(i, j)] - c(expect, 0.0)).norm() < 1e-10, "{:?}", op.backend);
            }
        }
    }
}

#[test]
fn xi_squared_spectrum_is_exact() {
    let g = GridSpec::new(2.0, 128, 0.3).unwrap();
    let op = quantize_poly(&xi_power(2), &g).unwrap();
    let mut got = linalg::hermitian_eigenvalues(op.matrix.as_ref().as_ref()).unwrap();
    got.sort_by(f64::total_cmp);
    let mut expect: Vec<f64> = (-64i64..64).map(|k| (0.3 * PI * k as f64 / 2.0).powi(2)).collect();
    expect.sort_by(f64::total_cmp);
    for (a, b) in got.iter().zip(&expect) {
        assert!((a - b).abs() < 1e-9 * (1.0 + b), "{a} vs {b}");
    }
}

#[test]
fn x_xi_is_self_adjoint() {
    let g = GridSpec::new(4.0, 128, 0.1).unwrap();
    let s = MatrixSymbol::from_xi_poly("x xi", 1, vec![const_coef(linalg::zeros(1, 1)), scalar_coef(1, |x| c(x, 0.0))]);
    let op = quantize_poly(&s, &g).unwrap();
    assert!(op.hermitian_defect() < 1e-10);
}

#[test]
fn backends_agree_on_davies_and_xi_squared() {
    let g = GridSpec::new(4.0, 256, 0.05).unwrap();
    for s in [catalog::davies(4.0), xi_power(2), catalog::schrodinger(2, catalog::kappa_rational)] {
        let a = quantize_poly(&s, &g).unwrap();
        let b = quantize_fourier(&s, &g, None).unwrap();
        assert!(rel_entrywise(&a.matrix, &b.matrix) < 1e-8, "{}", s.name());
        let d = &*a.matrix - &*b.matrix;
        assert!(op_norm_estimate(&d) <= 1e-7 * op_norm_estimate(&a.matrix));
    }
}

#[test]
fn cutoff_is_recorded() {
    let g = GridSpec::new(4.0, 64, 0.1).unwrap();
    let op = quantize_fourier(&xi_power(1), &g, Some(0.5 * g.xi_max())).unwrap();
    assert_eq!(op.warnings.len(), 1);
    let full = quantize_fourier(&xi_power(1), &g, None).unwrap();
    assert!(full.warnings.is_empty());
}

#[test]
fn apply_identity_plane_wave_and_linearity() {
    let g = GridSpec::new(2.0, 64, 0.25).unwrap();
    let id = MatrixSymbol::from_xi_poly("id", 1, vec![const_coef(linalg::identity(1))]);
    let op = quantize_poly(&id, &g).unwrap();
    let u: Vec<c64> = (0..64).map(|i| c((i as f64).sin(), 0.1 * i as f64)).collect();
    for (a, b) in apply(&op, &u).unwrap().iter().zip(&u) {
        assert!((a - b).norm() < 1e-13);
    }

    let xi = quantize_poly(&xi_power(1), &g).unwrap();
    for k in [-32i64, -5, 0, 7, 31] {
        let xik = g.h * PI * k as f64 / g.l;
        let wave: Vec<c64> = g.xs().iter().map(|&x| c64::from_polar(1.0, xik * x / g.h)).collect();
        let out = xi.apply(&wave).unwrap();
        for (o, w) in out.iter().zip(&wave) {
            assert!((o - w * xik).norm() < 1e-10);
        }
    }

    let v: Vec<c64> = (0..64).map(|i| c(1.0 / (1.0 + i as f64), -(i as f64).cos())).collect();
    let (al, be) = (c(0.3, -1.2), c(-2.0, 0.5));
    let comb: Vec<c64> = u.iter().zip(&v).map(|(a, b)| a * al + b * be).collect();
    let lhs = xi.apply(&comb).unwrap();
    let (au, av) = (xi.apply(&u).unwrap(), xi.apply(&v).unwrap());
    for i in 0..64 {
        assert!((lhs[i] - (au[i] * al + av[i] * be)).norm() < 1e-12);
    }
    assert!(xi.apply(&u[..10]).is_err());
}

#[test]
fn multiplications_compose_and_commutator_is_derivative() {
    let g = GridSpec::new(8.0, 256, 0.1).unwrap();
    let a = |x: f64| (-x * x).exp();
    let b = |x: f64| x.cos();
    let opa = quantize_poly(&MatrixSymbol::from_xi_poly("a", 1, vec![scalar_coef(1, move |x| c(a(x), 0.0))]), &g).unwrap();
    let opb = quantize_poly(&MatrixSymbol::from_xi_poly("b", 1, vec![scalar_coef(1, move |x| c(b(x), 0.0))]), &g).unwrap();
    let opab =
        quantize_poly(&MatrixSymbol::from_xi_poly("ab", 1, vec![scalar_coef(1, move |x| c(a(x) * b(x), 0.0))]), &g).unwrap();
    let prod = &*opa.matrix * &*opb.matrix;
    assert!(linalg::max_abs((&prod - &*opab.matrix).as_ref()) < 1e-12);

    // [Op(xi), Op(a)] - (h/i) Op(a') on band-limited states
    for h in [0.1, 0.05] {
        let g = g.with_h(h).unwrap();
        let xi = quantize_poly(&xi_power(1), &g).unwrap();
        let opa =
            quantize_poly(&MatrixSymbol::from_xi_poly("a", 1, vec![scalar_coef(1, move |x| c(a(x), 0.0))]), &g).unwrap();
        let comm = &*xi.matrix * &*opa.matrix - &*opa.matrix * &*xi.matrix;
        let u: Vec<c64> = g.xs().iter().map(|&x| c64::from_polar((-(x - 1.0).powi(2)).exp(), 2.0 * x)).collect();
        let lhs = linalg::mat_vec(comm.as_ref(), &u);
        let err: f64 = g
            .xs()
            .iter()
            .zip(lhs.iter().zip(&u))
            .map(|(&x, (l, v))| (l - c(0.0, -h) * (-2.0 * x * a(x)) * v).norm_sqr())
            .sum::<f64>()
            .sqrt();
        assert!(err <= h * h * linalg::vec_norm(&u), "h={h}: {err}");
    }
}

#[test]
fn series_adds_lower_order_terms() {
    let g = GridSpec::new(4.0, 64, 0.125).unwrap();
    let s = catalog::ex42(std::sync::Arc::new(|t: f64| t));
    let op = quantize_series(&s, &g, Backend::Poly).unwrap();
    // block (1, 0) is -h a(t)
    for i in 0..g.m {
        assert!((op.matrix[(g.m + i, i)] - c(-0.125 * g.x(i), 0.0)).norm() < 1e-12);
    }
    let f = quantize_series(&s, &g, Backend::Fourier { xi_cutoff: None }).unwrap();
    assert!(rel_entrywise(&op.matrix, &f.matrix) < 1e-8);
}

#[test]
fn poly_rejects_unsupported() {
    let g = GridSpec::new(1.0, 64, 0.5).unwrap();
    assert!(quantize_poly(&catalog::ex33(), &g).is_err());
    assert!(quantize_poly(&xi_power(5), &g).is_err());
    assert!(quantize_fourier(&catalog::ex29(), &g, None).is_err());
}

fn random_hermitian_poly(seed: [f64; 6]) -> MatrixSymbol {
    let [a, b, cc, d, e, f] = seed;
    MatrixSymbol::from_xi_poly(
        "herm",
        2,
        vec![
            std::sync::Arc::new(move |x: f64| {
                linalg::from_rows(&[&[c(a * x.cos(), 0.0), c(b, cc * x.sin())], &[c(b, -cc * x.sin()), c(d * (x * x).tanh(), 0.0)]])
            }),
            std::sync::Arc::new(move |x: f64| {
                linalg::from_rows(&[&[c(e, 0.0), c(0.0, f * (-x * x).exp())], &[c(0.0, -f * (-x * x).exp()), c(-e, 0.0)]])
            }),
            const_coef(linalg::diag(&[c(f.abs(), 0.0), c(1.0, 0.0)])),
        ],
    )
    .hermitian(true)
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn weyl_quantization_of_hermitian_symbols_is_self_adjoint(seed in proptest::array::uniform6(-2.0..2.0f64), h in 0.01..1.0f64) {
        let g = GridSpec::new(3.0, 64, h).unwrap();
        let s = random_hermitian_poly(seed);
        let op = quantize_poly(&s, &g).unwrap();
        prop_assert!(op.hermitian_defect() <= 1e-8);
        let f = quantize_fourier(&s, &g, None).unwrap();
        prop_assert!(f.hermitian_defect() <= 1e-8);
    }

    #[test]
    fn backends_agree_for_x_independent_xi_coefficients(seed in proptest::array::uniform4(-2.0..2.0f64), h in 0.01..1.0f64) {
        let [a, b, cc, d] = seed;
        let s = MatrixSymbol::from_xi_poly(
            "mixed",
            2,
            vec![
                std::sync::Arc::new(move |x: f64| linalg::from_rows(&[&[c(a * x.sin(), b), c(0.0, cc * (x * x).tanh())], &[c(d, 0.0), c(0.0, x.cos())]])),
                const_coef(linalg::from_rows(&[&[c(1.0, 0.0), c(a, 0.0)], &[c(0.0, 0.0), c(b, d)]])),
                const_coef(linalg::diag(&[c(cc, 0.0), c(1.0, 0.0)])),
            ],
        );
        let g = GridSpec::new(3.0, 64, h).unwrap();
        let p = quantize_poly(&s, &g).unwrap();
        let f = quantize_fourier(&s, &g, None).unwrap();
        let d = &*p.matrix - &*f.matrix;
        prop_assert!(op_norm_estimate(&d) <= 1e-7 * op_norm_estimate(&p.matrix));
    }
}
