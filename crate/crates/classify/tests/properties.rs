use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use classify::bracket::bracket_verdict;
use classify::*;
use symbol_core::linalg::{self, c, CMat};
use symbol_core::{c64, catalog, germ_track, MatrixSymbol, PhaseGrid, PhasePoint};

fn config() -> ProptestConfig {
    ProptestConfig { cases: 200, failure_persistence: None, ..ProptestConfig::default() }
}

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMat {
    CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
}

fn near_identity(rng: &mut ChaCha8Rng, n: usize) -> CMat {
    &linalg::identity(n) + &random_matrix(rng, n, 0.3)
}

fn constant(n: usize, m: CMat) -> MatrixSymbol {
    let size = m.nrows();
    MatrixSymbol::new("const", n, size, move |_| m.clone())
}

/// `A0 + x A1` with `A0` near the identity: invertible on the sampled neighbourhood.
fn random_invertible_symbol(rng: &mut ChaCha8Rng) -> MatrixSymbol {
    let a0 = near_identity(rng, 2);
    let a1 = random_matrix(rng, 2, 0.2);
    MatrixSymbol::new("A", 1, 2, move |w| &a0 + &linalg::scale(a1.as_ref(), c(w.x[0], 0.0)))
}

/// Principal-type cases with known verdicts, shifted so that `lambda0 = 0`.
fn pt_cases() -> Vec<(MatrixSymbol, PhasePoint, bool)> {
    let w1id = MatrixSymbol::new("w1 Id", 1, 2, |w| linalg::scale(linalg::identity(2).as_ref(), c(w.x[0], 0.0)));
    vec![
        (catalog::ex34(), PhasePoint::new1(0.0, 0.0), true),
        (catalog::ex34(), PhasePoint::new1(0.0, 0.5), false),
        (catalog::ex33().shifted(c(0.7, 0.0)), PhasePoint::new1(0.7, 0.7), false),
        (w1id, PhasePoint::new1(0.0, 0.3), true),
        (catalog::ex28(), PhasePoint::new1(0.0, 0.0), true),
    ]
}

fn verdict(sym: &MatrixSymbol, w: &PhasePoint, lam: c64) -> PrincipalTypeVerdict {
    principal_type_at(sym, w, lam, &default_directions(sym.n(), 32, 5), &PtTolerances::default()).unwrap()
}

/// `E* diag(xi + i a1 x^2, b xi + i a2 x^2) E`: quasi-symmetric along `d_xi` near the origin.
fn model_quasi_symmetric(rng: &mut ChaCha8Rng) -> (MatrixSymbol, CMat) {
    let a1 = rng.gen_range(0.1..2.0);
    let a2 = rng.gen_range(0.1..2.0);
    let b = rng.gen_range(0.5..2.0);
    let d = MatrixSymbol::new("D", 1, 2, move |w| {
        let (x, xi) = (w.x[0], w.xi[0]);
        linalg::diag(&[c(xi, a1 * x * x), c(b * xi, a2 * x * x)])
    });
    (d, near_identity(rng, 2))
}

fn region() -> Vec<PhasePoint> {
    (-3..=3).flat_map(|i| (-3..=3).map(move |j| PhasePoint::new1(0.1 * i as f64, 0.1 * j as f64))).collect()
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn principal_type_invariant_under_invertible_factors(seed in any::<u64>(), case in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, w, expected) = pt_cases().swap_remove(case);
        let a = random_invertible_symbol(&mut rng);
        let b = random_invertible_symbol(&mut rng);
        let apb = MatrixSymbol::sandwich(&a, &p, &b);
        let v0 = verdict(&p, &w, c(0.0, 0.0));
        let v1 = verdict(&apb, &w, c(0.0, 0.0));
        prop_assert_eq!(v0.is_pt, expected);
        prop_assert_eq!(v1.is_pt, expected, "{:?}", v1);
        prop_assert_eq!(v1.is_pt_bilinear, expected);
    }

    #[test]
    fn principal_type_adjoint_symmetric(seed in any::<u64>(), case in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, w, _) = pt_cases().swap_remove(case);
        // a random non-real eigenvalue shift keeps the test honest about conjugation
        let mu = c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let p = p.shifted(-mu);
        let v = verdict(&p, &w, mu);
        let va = verdict(&p.adjoint(), &w, mu.conj());
        prop_assert_eq!(v.is_pt, va.is_pt);
        prop_assert_eq!(v.is_pt_bilinear, va.is_pt_bilinear);
    }

    #[test]
    fn bracket_of_adjoint_germ_flips_sign(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mats: Vec<CMat> = (0..4).map(|_| random_matrix(&mut rng, 2, 1.0)).collect();
        let p = MatrixSymbol::new("A0 + x A1 + xi A2 + x xi A3", 1, 2, move |w| {
            let (x, xi) = (w.x[0], w.xi[0]);
            let mut m = mats[0].clone();
            m += linalg::scale(mats[1].as_ref(), c(x, 0.0));
            m += linalg::scale(mats[2].as_ref(), c(xi, 0.0));
            m += linalg::scale(mats[3].as_ref(), c(x * xi, 0.0));
            m
        });
        let w = PhasePoint::new1(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let eigs = linalg::eigenvalues(p.eval(&w).unwrap().as_ref()).unwrap();
        prop_assume!((eigs[0] - eigs[1]).norm() > 0.1);
        let patch = PhaseGrid::patch(&w, 2, 1e-3);
        let g = germ_track(&p, &w, eigs[0], &patch, 1e-9).unwrap();
        let ga = germ_track(&p.adjoint(), &w, eigs[0].conj(), &patch, 1e-9).unwrap();
        prop_assume!(g.valid && ga.valid);
        let b = bracket_verdict(&g).unwrap();
        let ba = bracket_verdict(&ga).unwrap();
        prop_assert!((b.bracket + ba.bracket).abs() <= 1e-6 * (1.0 + b.bracket.abs()), "{} {}", b.bracket, ba.bracket);
        for v in [&b, &ba] {
            let consistent = match v.side {
                Side::Plus => v.bracket > 0.0,
                Side::Minus => v.bracket < 0.0,
                Side::Zero => v.bracket.abs() < 1e-6,
            };
            prop_assert!(consistent);
        }
    }

    #[test]
    fn quasi_symmetric_implies_principal_type(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, e) = model_quasi_symmetric(&mut rng);
        let ea = linalg::adjoint(e.as_ref());
        let q = MatrixSymbol::sandwich(&constant(1, ea), &d, &constant(1, e));
        let v = |_: &PhasePoint| vec![0.0, 1.0];
        let r = quasi_symmetric_check(&q, &v, &region(), 1e-3, 1e-10, 1e-8).unwrap();
        prop_assert!(r.passes, "{:?}", r);
        prop_assert!(r.kernel_points >= 1);
        for w in region() {
            let qw = q.eval(&w).unwrap();
            if linalg::sigma_min(qw.as_ref()).unwrap() < 1e-12 {
                prop_assert!(verdict(&q, &w, c(0.0, 0.0)).is_pt);
            }
        }
    }

    #[test]
    fn quasi_symmetry_survives_congruence(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (d, e0) = model_quasi_symmetric(&mut rng);
        let q = MatrixSymbol::sandwich(&constant(1, linalg::adjoint(e0.as_ref())), &d, &constant(1, e0));
        let v = |_: &PhasePoint| vec![0.0, 1.0];
        let c_min = 1e-3;
        let base = quasi_symmetric_check(&q, &v, &region(), c_min, 1e-10, 1e-8).unwrap();
        prop_assert!(base.passes);
        // w-dependent congruence, invertible on the region
        let e = random_invertible_symbol(&mut rng);
        let q2 = MatrixSymbol::sandwich(&e.adjoint(), &q, &e);
        let r = quasi_symmetric_check(&q2, &v, &region(), c_min, 1e-10, 1e-8).unwrap();
        prop_assert!(r.passes, "{:?}", r);
    }

    #[test]
    fn kernel_identity_for_nonnegative_imaginary_part(seed in any::<u64>(), n in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let e: Vec<c64> = {
            let v: Vec<c64> = (0..n).map(|_| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0))).collect();
            let nv = linalg::vec_norm(&v);
            v.iter().map(|x| x / nv).collect()
        };
        let proj = CMat::from_fn(n, n, |i, j| c(if i == j { 1.0 } else { 0.0 }, 0.0) - e[i] * e[j].conj());
        let h = random_matrix(&mut rng, n, 1.0);
        let h = &h + &linalg::adjoint(h.as_ref());
        let g = random_matrix(&mut rng, n, 1.0);
        let k = &g * &linalg::adjoint(g.as_ref());
        let q = &proj * &(&h + &linalg::scale(k.as_ref(), c(0.0, 1.0))) * &proj;
        let r = kernel_identity(&q, 1e-8).unwrap();
        prop_assert!(r.im_min >= -1e-10);
        prop_assert!(r.kernel_dim >= 1);
        prop_assert_eq!(r.kernel_dim, r.adjoint_kernel_dim);
        prop_assert!(r.angle < 1e-6, "{:?}", r);
        prop_assert!(r.range_defect < 1e-6, "{:?}", r);
    }

    #[test]
    fn omega_delta_monotone_and_congruence_inclusion(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let roots = [rng.gen_range(-0.8..0.8), rng.gen_range(-0.8..0.8)];
        let g0 = random_matrix(&mut rng, 2, 1.0);
        let g1 = random_matrix(&mut rng, 2, 1.0);
        let f = move |t: f64| {
            let a = linalg::scale(g0.as_ref(), c(t - roots[0], 0.0));
            let b = linalg::scale(g1.as_ref(), c((t - roots[1]).powi(2), 0.0));
            let m = &a + &b;
            let p = linalg::adjoint(m.as_ref()) * &m;
            linalg::scale((&p + &linalg::adjoint(p.as_ref())).as_ref(), c(0.5, 0.0))
        };
        let e = near_identity(&mut rng, 2);
        let cst = linalg::op_norm(linalg::inverse(e.as_ref()).unwrap().as_ref()).unwrap().powi(2);
        let fe = {
            let f = f.clone();
            let e = e.clone();
            move |t: f64| {
                let p = linalg::adjoint(e.as_ref()) * f(t) * &e;
                linalg::scale((&p + &linalg::adjoint(p.as_ref())).as_ref(), c(0.5, 0.0))
            }
        };
        let m = 2000;
        let mut last = 0.0;
        for k in 0..6 {
            let delta = 1e-4 * 4f64.powi(k);
            let mu = omega_delta(&f, 1.0, m, delta).unwrap();
            prop_assert!(mu >= last);
            last = mu;
            let inner = omega_cells(&fe, 1.0, m, delta).unwrap();
            let outer = omega_cells(&f, 1.0, m, (cst * delta * (1.0 + 1e-9)).min(1.0)).unwrap();
            if cst * delta <= 1.0 {
                prop_assert!(inner.iter().zip(&outer).all(|(a, b)| !a || *b));
            }
        }
    }

    #[test]
    fn hessian_bound_on_scalar_quadratics(a in 0.01f64..10.0, b in -2.0f64..2.0, c0 in 0.0f64..1.0, t0 in -1.0f64..1.0) {
        let f = move |t: f64| linalg::diag(&[c(a * (t - b) * (t - b) + c0, 0.0)]);
        let u = vec![vec![c(1.0, 0.0)], vec![c(0.3, -0.4)]];
        let r = hessian_bound_check(&f, t0, (-1.0, 1.0), &u, 2.0 + 1e-6).unwrap();
        prop_assert!(r.holds, "{:?}", r);
    }
}
