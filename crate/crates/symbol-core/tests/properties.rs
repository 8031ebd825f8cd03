use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use symbol_core::elsner::{elsner_check, matching_distance};
use symbol_core::linalg::{self, c, CMat};
use symbol_core::spectral::{sigma_infinity_probe, spectral_of_matrix};
use symbol_core::{c64, catalog, germ_track_ordered, spectral_at, MatrixSymbol, PhaseGrid, PhasePoint};

fn random_matrix(rng: &mut ChaCha8Rng, n: usize, scale: f64) -> CMat {
    CMat::from_fn(n, n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale)
}

fn config() -> ProptestConfig {
    ProptestConfig { cases: 256, failure_persistence: None, ..ProptestConfig::default() }
}

/// `S J S^{-1}` with planted eigenvalues and Jordan blocks of size <= 2.
fn planted(rng: &mut ChaCha8Rng) -> (CMat, Vec<(c64, usize, usize)>) {
    let n = 4;
    let distinct = [c(0.0, 0.0), c(1.0, 0.5), c(-1.0, 1.0), c(0.5, -1.0)];
    let mut j = linalg::zeros(n, n);
    let mut facts: Vec<(c64, usize, usize)> = Vec::new();
    let mut i = 0;
    while i < n {
        let lam = distinct[rng.gen_range(0..distinct.len())];
        let len = if i + 1 < n { rng.gen_range(1..=2) } else { 1 };
        for k in i..i + len {
            j[(k, k)] = lam;
        }
        if len == 2 {
            j[(i, i + 1)] = c(1.0, 0.0);
        }
        match facts.iter_mut().find(|f| f.0 == lam) {
            Some(f) => {
                f.1 += 1;
                f.2 += len;
            }
            None => facts.push((lam, 1, len)),
        }
        i += len;
    }
    let s = &linalg::identity(n) + &random_matrix(rng, n, 0.1);
    let sinv = linalg::inverse(s.as_ref()).unwrap();
    (&s * &j * &sinv, facts)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn kappa_at_most_algebraic_multiplicity(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let (p, facts) = planted(&mut rng);
        let w = PhasePoint::new1(0.0, 0.0);
        for (lam, geo, alg) in facts {
            let sp = spectral_of_matrix(&p, &w, lam, 1e-6, 1e-5).unwrap();
            prop_assert!(sp.kappa >= 1 && sp.kappa <= sp.big_k, "{:?} {:?} {:?}", sp, lam, linalg::eigenvalues(p.as_ref()).unwrap());
            prop_assert_eq!(sp.big_k, alg);
            prop_assert_eq!(sp.kappa, geo);
        }
    }

    #[test]
    fn hermitian_symbols_have_equal_multiplicities(a in -2.0..2.0f64, b in -2.0..2.0f64, pick in any::<bool>()) {
        let sym = if pick { catalog::ex34() } else { catalog::ex29_restricted() };
        // also hit the coincidence locus a = b = 0 now and then
        let w = if a.abs() < 0.2 { PhasePoint::new1(0.0, 0.0) } else { PhasePoint::new1(a, b) };
        for lam in linalg::eigenvalues(sym.eval(&w).unwrap().as_ref()).unwrap() {
            let sp = spectral_at(&sym, &w, lam, 1e-8, 1e-6).unwrap();
            prop_assert_eq!(sp.kappa, sp.big_k);
        }
    }

    #[test]
    fn elsner_bound_holds(seed in any::<u64>(), n in 1usize..=4, log_eps in -10.0..0.0f64) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, n, 1.0);
        let b = &a + &random_matrix(&mut rng, n, 10f64.powf(log_eps));
        let r = elsner_check(&a, &b).unwrap();
        prop_assert!(r.holds, "dist {} bound {}", r.dist, r.bound);
    }

    #[test]
    fn elsner_bound_holds_3x3(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a = random_matrix(&mut rng, 3, 1.0);
        let b = random_matrix(&mut rng, 3, 1.0);
        let r = elsner_check(&a, &b).unwrap();
        let ea = linalg::eigenvalues(a.as_ref()).unwrap();
        let eb = linalg::eigenvalues(b.as_ref()).unwrap();
        prop_assert!((r.dist - matching_distance(&ea, &eb)).abs() < 1e-14);
        prop_assert!(r.holds);
    }

    #[test]
    fn germ_tracking_is_path_independent(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let a0 = linalg::diag(&[c(0.0, 0.0), c(2.0, 1.0), c(-1.0, 2.0)]);
        let parts: Vec<CMat> = (0..4).map(|_| random_matrix(&mut rng, 3, 0.3)).collect();
        let sym = MatrixSymbol::new("affine", 2, 3, move |w| {
            let mut m = a0.clone();
            for (k, &ck) in w.coords().iter().enumerate() {
                m = &m + &linalg::scale(parts[k].as_ref(), c(ck, 0.0));
            }
            m
        });
        let w0 = PhasePoint::from_coords(&(0..4).map(|_| rng.gen_range(-0.5..0.5)).collect::<Vec<_>>());
        let lam0 = linalg::eigenvalues(sym.eval(&w0).unwrap().as_ref()).unwrap()[0];
        let patch = PhaseGrid::patch(&w0, 1, 0.05);
        let g1 = germ_track_ordered(&sym, &w0, lam0, &patch, 1e-6, &[0, 1, 2, 3]).unwrap();
        let g2 = germ_track_ordered(&sym, &w0, lam0, &patch, 1e-6, &[3, 2, 1, 0]).unwrap();
        prop_assert_eq!(g1.valid, g2.valid);
        if g1.valid {
            for i in 0..patch.len() {
                let (v1, v2) = (g1.value(i).unwrap(), g2.value(i).unwrap());
                prop_assert!((v1 - v2).norm() < 1e-8);
            }
        }
    }

    #[test]
    fn sigma_infinity_probe_restates_definition(re in -2.0..2.0f64, im in -2.0..2.0f64, bound_c in 0.5..20.0f64) {
        let sym = catalog::ex34();
        let lam = c(re, im);
        let radii = [1.0, 4.0, 16.0, 64.0];
        let dirs: Vec<Vec<f64>> = (0..8)
            .map(|k| {
                let t = k as f64 * std::f64::consts::PI / 4.0;
                vec![t.cos(), t.sin()]
            })
            .collect();
        let probe = sigma_infinity_probe(&sym, lam, &radii, &dirs, bound_c).unwrap();
        // independent oracle: smallest eigenvalue of (P - lam)^*(P - lam) on the outer shells
        let mut outer = f64::INFINITY;
        for &r in &radii[2..] {
            for d in &dirs {
                let w = PhasePoint::new1(r * d[0], r * d[1]);
                let a = linalg::shift(sym.eval(&w).unwrap().as_ref(), lam);
                let g = linalg::adjoint(a.as_ref()) * &a;
                outer = outer.min(linalg::hermitian_eigenvalues(g.as_ref()).unwrap()[0].max(0.0).sqrt());
            }
        }
        prop_assert!((probe.outer_defect - outer).abs() < 1e-6 * (1.0 + outer));
        if outer >= 1.0 / bound_c + 1e-6 {
            prop_assert!(!probe.in_sigma_inf);
        }
    }
}

#[test]
fn elsner_diagonal_example() {
    let a = linalg::diag(&[c(0.0, 0.0), c(1.0, 0.0)]);
    let b = linalg::diag(&[c(0.1, 0.0), c(1.0, 0.0)]);
    let r = elsner_check(&a, &b).unwrap();
    assert!((r.dist - 0.1).abs() < 1e-14);
    // 2 * (2 * 1)^{1/2} * 0.1^{1/2}
    assert!((r.bound - 2.0 * 2f64.sqrt() * 0.1f64.sqrt()).abs() < 1e-12);
    assert!(r.holds);
}

#[test]
fn moebius_diagonal_closed_form() {
    let p = MatrixSymbol::new("diag(0,2)", 1, 2, |_| linalg::diag(&[c(0.0, 0.0), c(2.0, 0.0)]));
    let w = PhasePoint::new1(0.0, 0.0);
    let m = symbol_core::moebius::moebius_reduce(&p, c(-1.0, 0.0), c(1.0, 0.0), &[w.clone()], 1e-8).unwrap();
    let q = m.symbol.eval(&w).unwrap();
    assert!((q[(0, 0)] - c(-1.0, 0.0)).norm() < 1e-14);
    assert!((q[(1, 1)] - c(1.0 / 3.0, 0.0)).norm() < 1e-14);
    assert!(m.identity_residual(&p, &w, c(2.0, 0.0)).unwrap() < 1e-8);
    let same = symbol_core::moebius::moebius_reduce(&p, c(-1.0, 0.0), c(-1.0, 0.0), &[w.clone()], 1e-8).unwrap();
    let id = same.symbol.eval(&w).unwrap();
    assert!(linalg::max_abs((&id - &linalg::identity(2)).as_ref()) < 1e-14);
    assert!(same.map(c(1.0, 0.0)).is_none());
}
