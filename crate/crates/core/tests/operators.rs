mod common;

use std::sync::Arc;

use common::{random_complex, random_real, rel_diff, wv};
use num_complex::Complex64;
use proptest::prelude::*;
use zonalsphere::diagnostics::sobolev_norm_sq;
use zonalsphere::operators::{
    coriolis_l, dphi, inv_dphi, inv_laplacian, laplacian, nonzonal_project, stokes, zonal_project, NonlinearPath,
    OperatorContext, PairingPath,
};
use zonalsphere::triads::{b_coeff, frequency, is_resonant};
use zonalsphere::{SpectralField, TriadTable, WaveVector};

const LEMMA_SIGN: f64 = -1.0;

fn context_with_table(k_max: usize) -> OperatorContext {
    OperatorContext::new(k_max)
        .with_triads(Arc::new(TriadTable::build(k_max)))
        .unwrap()
}

fn hs_inner(a: &SpectralField, b: &SpectralField, s: f64) -> Complex64 {
    a.modes()
        .zip(b.modes())
        .map(|((m, x), (_, y))| x * y.conj() * m.eigenvalue().powf(s))
        .sum()
}

#[test]
fn laplacian_examples() {
    let y = SpectralField::unit(4, wv(1, 1));
    assert_eq!(laplacian(&y).get(wv(1, 1)), Complex64::new(-2.0, 0.0));
    assert_eq!(laplacian(&SpectralField::unit(4, wv(0, 0))).max_abs(), 0.0);
    let w = random_real(9, 1);
    assert!((&laplacian(&inv_laplacian(&w).unwrap()) - &w).max_abs() < 1e-14);
    assert_eq!(inv_laplacian(&SpectralField::zeros(4, true)).unwrap().max_abs(), 0.0);
    assert_eq!(inv_laplacian(&w).unwrap().mean_coeff(), Complex64::new(0.0, 0.0));
    assert_eq!(stokes(&w), laplacian(&w).scale(-1.0));
}

#[test]
fn coriolis_examples() {
    let y = SpectralField::unit(3, wv(1, 1));
    assert_eq!(coriolis_l(&y).get(wv(1, 1)), Complex64::new(0.0, -1.0));
    let wbar = zonal_project(&random_real(8, 3));
    assert_eq!(coriolis_l(&wbar).max_abs(), 0.0);
    for seed in 0..10 {
        let w = random_real(8, seed);
        assert!(coriolis_l(&w).inner(&w).norm() < 1e-13 * w.norm_sq().max(1.0));
    }
}

#[test]
fn zonal_projection_examples() {
    let w = random_real(8, 7);
    let (wbar, wt) = (zonal_project(&w), nonzonal_project(&w));
    for s in [0.0, 1.0, 2.0] {
        assert_eq!(hs_inner(&wbar, &wt, s), Complex64::new(0.0, 0.0));
    }
    assert_eq!(zonal_project(&wbar), wbar);
    assert_eq!(&wbar + &wt, w);
}

#[test]
fn inverse_dphi_examples() {
    let y = SpectralField::unit(3, wv(2, 2));
    let expect = Complex64::new(1.0, 0.0) / Complex64::new(0.0, 2.0);
    assert!((inv_dphi(&y).unwrap().get(wv(2, 2)) - expect).norm() < 1e-16);
    let wt = nonzonal_project(&random_real(9, 2));
    let inv = inv_dphi(&wt).unwrap();
    assert!((&dphi(&inv) - &wt).max_abs() < 1e-14);
    assert!(inv.is_real_field() && inv.symmetry_defect() < 1e-15);
}

#[test]
fn jacobian_identities() {
    let k_max = 9;
    let ctx = OperatorContext::new(k_max);
    for seed in 0..4 {
        let f = random_real(k_max, seed);
        assert!(ctx.jacobian_grid(&f, &f).unwrap().max_abs() < 1e-12);
        let (a, b, c) = (random_real(k_max, 10 + seed), random_real(k_max, 20 + seed), random_real(k_max, 30 + seed));
        let p1 = ctx.jacobian_pairing(&a, &b, &c).unwrap();
        let p2 = ctx.jacobian_pairing(&b, &c, &a).unwrap();
        let p3 = ctx.jacobian_pairing(&c, &a, &b).unwrap();
        let scale = p1.norm().max(p2.norm()).max(p3.norm());
        assert!((p1 - p2).norm() < 1e-11 * scale && (p1 - p3).norm() < 1e-11 * scale);
    }
    let g = zonal_project(&random_real(k_max, 5));
    let y10 = SpectralField::unit(k_max, wv(1, 0));
    assert!(ctx.jacobian_grid(&y10, &g).unwrap().max_abs() < 1e-14);
}

#[test]
fn jacobian_of_complex_fields_agrees_with_pairing() {
    let k_max = 6;
    let ctx = OperatorContext::new(k_max);
    let (f, g) = (random_complex(k_max, 1), random_complex(k_max, 2));
    let jac = ctx.jacobian_grid(&f, &g).unwrap();
    for m in WaveVector::all(k_max) {
        let direct = ctx.jacobian_pairing(&f, &g, &SpectralField::unit(k_max, m)).unwrap();
        assert!((direct - jac.get(m)).norm() < 1e-12);
    }
}

#[test]
fn nonlinear_term_identities() {
    let k_max = 10;
    let ctx = OperatorContext::new(k_max);
    for seed in 0..5 {
        let w = random_real(k_max, seed);
        let b = ctx.nonlinear_b(&w, NonlinearPath::Pseudospectral).unwrap();
        assert!(b.inner(&w).norm() < 1e-11 * sobolev_norm_sq(&w, 1.0));
        assert!(b.is_real_field() && b.symmetry_defect() < 1e-13);
        let wbar = zonal_project(&w);
        assert!(ctx.nonlinear_b(&wbar, NonlinearPath::Pseudospectral).unwrap().max_abs() < 1e-13);
    }
}

#[test]
fn nonlinear_term_dual_path_at_k8() {
    let ctx = context_with_table(8);
    for seed in 0..5 {
        let w = random_real(8, seed);
        let a = ctx.nonlinear_b(&w, NonlinearPath::Pseudospectral).unwrap();
        let b = ctx.nonlinear_b(&w, NonlinearPath::TriadOracle).unwrap();
        assert!(rel_diff(&a, &b) < 1e-9);
    }
    let (u, v) = (random_complex(8, 1), random_complex(8, 2));
    let a = ctx.nonlinear_b_pair(&u, &v, NonlinearPath::Pseudospectral).unwrap();
    let b = ctx.nonlinear_b_pair(&u, &v, NonlinearPath::TriadOracle).unwrap();
    assert!(rel_diff(&a, &b) < 1e-9);
}

#[test]
fn b_omega_dual_path_at_k8() {
    let ctx = context_with_table(8);
    for seed in 0..5 {
        let wt = nonzonal_project(&random_real(8, seed));
        let wbar = zonal_project(&random_real(8, 50 + seed));
        let s = ctx.b_omega_pairing(&wt, &wbar, PairingPath::SpectralSum, LEMMA_SIGN).unwrap();
        let j = ctx.b_omega_pairing(&wt, &wbar, PairingPath::JacobianForm, LEMMA_SIGN).unwrap();
        assert!((s - j).norm() < 1e-9 * s.norm().max(j.norm()), "{s} vs {j}");
        let zero = SpectralField::zeros(8, true);
        for path in [PairingPath::SpectralSum, PairingPath::JacobianForm] {
            assert!(ctx.b_omega_pairing(&wt, &zero, path, LEMMA_SIGN).unwrap().norm() < 1e-14);
        }
    }
}

#[test]
fn b_omega_for_a_single_mode_pair() {
    // ω̃ built on j = (3,2), k = (4,-2) and their mirrors. The only
    // non-resonant pairs feeding a zonal output are (j,k), (k,j) and the
    // mirrored pair, so the defining sum has a handful of terms.
    let k_max = 8;
    let ctx = context_with_table(k_max);
    let (j, k) = (wv(3, 2), wv(4, -2));
    let mut wt = SpectralField::zeros(k_max, true);
    wt.set_symmetric(j, Complex64::new(0.7, -0.2));
    wt.set_symmetric(k.mirror(), Complex64::new(-0.4, 0.9));
    let wbar = zonal_project(&random_real(k_max, 9));

    let mut direct = Complex64::new(0.0, 0.0);
    let support = [j, j.mirror(), k, k.mirror()];
    for &a in &support {
        for &b in &support {
            if a.order() + b.order() != 0 || is_resonant(a, b) {
                continue;
            }
            for l in (1..=k_max).map(|d| wv(d, 0)) {
                let sym = b_coeff(a, b, l).unwrap() + b_coeff(b, a, l).unwrap();
                direct += Complex64::new(0.0, 0.5) * sym / (frequency(a) + frequency(b)) * wt.get(a) * wt.get(b) * wbar.get(l).conj();
            }
        }
    }
    assert!(direct.norm() > 1e-3);
    let s = ctx.b_omega_pairing(&wt, &wbar, PairingPath::SpectralSum, LEMMA_SIGN).unwrap();
    let jf = ctx.b_omega_pairing(&wt, &wbar, PairingPath::JacobianForm, LEMMA_SIGN).unwrap();
    assert!((s - direct).norm() < 1e-12 * direct.norm());
    assert!((jf - direct).norm() < 1e-9 * direct.norm());
}

#[test]
fn stokes_and_coriolis_commute() {
    for m in WaveVector::all(10) {
        let y = SpectralField::unit(10, m);
        assert_eq!(stokes(&coriolis_l(&y)), coriolis_l(&stokes(&y)));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn energy_and_zonal_identities(seed in any::<u64>(), k_max in 2usize..9) {
        let ctx = OperatorContext::new(k_max);
        let w = random_real(k_max, seed);
        let b = ctx.nonlinear_b(&w, NonlinearPath::Pseudospectral).unwrap();
        prop_assert!(b.inner(&w).norm() < 1e-11 * sobolev_norm_sq(&w, 1.0));
        // (B(ω,ω), Δ⁻¹ω) = 0 as well: enstrophy and energy are both conserved
        prop_assert!(b.inner(&inv_laplacian(&w).unwrap()).norm() < 1e-11 * w.norm_sq());
        prop_assert!(coriolis_l(&w).inner(&w).norm() < 1e-13 * w.norm_sq());
        let wbar = zonal_project(&w);
        prop_assert!(ctx.nonlinear_b(&wbar, NonlinearPath::Pseudospectral).unwrap().max_abs() < 1e-13);
    }

    #[test]
    fn diagonal_operators_keep_reality(seed in any::<u64>()) {
        let w = random_real(7, seed);
        for out in [laplacian(&w), stokes(&w), coriolis_l(&w), dphi(&w), zonal_project(&w), inv_laplacian(&w).unwrap()] {
            prop_assert!(out.is_real_field());
            prop_assert!(out.symmetry_defect() < 1e-15);
        }
    }
}
