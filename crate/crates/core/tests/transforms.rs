mod common;

use std::f64::consts::PI;

use common::{explicit, random_complex, random_real, wv};
use num_complex::Complex64;
use proptest::prelude::*;
use zonalsphere::spharm::{analyze, evaluate_harmonic, make_grid, synthesize, GridSpec, SphericalTransform};
use zonalsphere::{SpectralField, WaveVector};

#[test]
fn round_trip_and_parseval_up_to_k15() {
    for k_max in 1..=15 {
        let t = SphericalTransform::new(k_max, make_grid(k_max));
        for seed in 0..3 {
            for f in [random_real(k_max, seed), random_complex(k_max, 100 + seed)] {
                let g = t.synthesize(&f);
                let back = t.analyze(&g);
                assert!((&back - &f).max_abs() < 1e-12, "K={k_max} round trip");
                let grid_norm = g.mul(&g.conj()).integrate().re;
                assert!((grid_norm - f.norm_sq()).abs() / f.norm_sq() < 1e-12, "K={k_max} Parseval");
            }
        }
    }
}

#[test]
fn orthonormality_at_k15() {
    let k_max = 15;
    let t = SphericalTransform::new(k_max, make_grid(k_max));
    let modes: Vec<WaveVector> = WaveVector::all(k_max).collect();
    let grids: Vec<_> = modes.iter().map(|&m| t.synthesize(&SpectralField::unit(k_max, m))).collect();
    let mut worst = 0.0f64;
    for (a, ga) in modes.iter().zip(&grids) {
        for (b, gb) in modes.iter().zip(&grids) {
            let ip = ga.mul(&gb.conj()).integrate();
            let expect = if a == b { 1.0 } else { 0.0 };
            worst = worst.max((ip - expect).norm());
        }
    }
    assert!(worst < 1e-12, "orthonormality defect {worst:e}");
}

#[test]
fn library_harmonics_match_explicit_series() {
    for l in 0..=8usize {
        for m in -(l as isize)..=l as isize {
            for &(theta, phi) in &[(0.3, 1.1), (1.2, -0.4), (2.9, 4.0)] {
                let ours = evaluate_harmonic(wv(l, m), theta, phi);
                let theirs = explicit::jet(l, m, theta.cos(), theta.sin(), phi).value;
                assert!((ours - theirs).norm() < 1e-13, "Y({l},{m})");
            }
        }
    }
}

#[test]
fn explicit_gauss_rule_agrees_with_library_grid() {
    let (x, w) = explicit::gauss(16);
    let g = GridSpec::new(16, 1);
    for i in 0..16 {
        assert!((x[i] - g.nodes[i]).abs() < 1e-14);
        assert!((w[i] - g.weights[i]).abs() < 1e-14);
    }
}

#[test]
fn grid_examples() {
    let g = make_grid(10);
    assert!(g.n_theta >= 16 && g.n_phi >= 31);
    assert!((g.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
    let x2: f64 = g.nodes.iter().zip(&g.weights).map(|(x, w)| x * x * w).sum();
    assert!((x2 - 2.0 / 3.0).abs() < 1e-14);
}

#[test]
fn harmonic_examples() {
    let y00 = evaluate_harmonic(wv(0, 0), 0.7, 2.0);
    assert!((y00.re - 0.5 / PI.sqrt()).abs() < 1e-15 && y00.im == 0.0);
    assert!(evaluate_harmonic(wv(1, 0), PI / 2.0, 0.3).norm() < 1e-16);

    let k_max = 3;
    let g = synthesize(&SpectralField::unit(k_max, wv(3, 2)), &make_grid(k_max));
    assert!((g.mul(&g.conj()).integrate() - 1.0).norm() < 1e-12);
}

#[test]
fn synthesis_examples() {
    let k_max = 4;
    let grid = make_grid(k_max);
    let mut c = SpectralField::zeros(k_max, true);
    c.set(wv(0, 0), Complex64::new(2.0 * PI.sqrt(), 0.0));
    let g = synthesize(&c, &grid);
    assert!(g.values().iter().all(|v| (v - 1.0).norm() < 1e-14));

    let f = random_real(k_max, 9);
    assert!(synthesize(&f, &grid).max_imag() < 1e-13);

    let y21 = synthesize(&SpectralField::unit(k_max, wv(2, 1)), &grid);
    let a = analyze(&y21, k_max);
    for (m, c) in a.modes() {
        let expect = if m == wv(2, 1) { 1.0 } else { 0.0 };
        assert!((c - expect).norm() < 1e-12);
    }
}

#[test]
fn product_of_conjugate_orders_is_zonal() {
    let k_max = 4;
    let grid = make_grid(k_max);
    let a = synthesize(&SpectralField::unit(k_max, wv(1, 1)), &grid);
    let b = synthesize(&SpectralField::unit(k_max, wv(1, -1)), &grid);
    let p = analyze(&a.mul(&b), k_max);
    for (m, c) in p.modes() {
        if !m.is_zonal() {
            assert!(c.norm() < 1e-14, "{m:?}");
        }
    }
    assert!(p.get(wv(2, 0)).norm() > 0.1);
}

#[test]
fn zero_mean_fields_integrate_to_zero() {
    let k_max = 7;
    let t = SphericalTransform::new(k_max, make_grid(k_max));
    let f = random_real(k_max, 4);
    assert!(t.synthesize(&f).integrate().norm() < 1e-13);
}

#[test]
fn zonal_mean_on_grid_is_zonal_projection() {
    let k_max = 6;
    let t = SphericalTransform::new(k_max, make_grid(k_max));
    let f = random_real(k_max, 2);
    let zm = t.synthesize(&f).zonal_mean();
    let zp = t.synthesize(&zonalsphere::operators::zonal_project(&f));
    let n_phi = t.grid().n_phi;
    for (i, m) in zm.iter().enumerate() {
        for j in 0..n_phi {
            assert!((zp.at(i, j) - m).norm() < 1e-12);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn real_symmetry_survives_round_trip(seed in any::<u64>(), k_max in 1usize..10) {
        let t = SphericalTransform::new(k_max, make_grid(k_max));
        let f = random_real(k_max, seed);
        let g = t.synthesize(&f);
        prop_assert!(g.max_imag() < 1e-13);
        let back = t.analyze(&g);
        prop_assert!(back.symmetry_defect() < 1e-13);
    }

    #[test]
    fn analysis_is_linear(seed in any::<u64>(), a in -3.0f64..3.0) {
        let k_max = 6;
        let t = SphericalTransform::new(k_max, make_grid(k_max));
        let f = random_complex(k_max, seed);
        let g = random_complex(k_max, seed.wrapping_add(1));
        let mut h = f.clone();
        h.axpy(a, &g);
        let lhs = t.synthesize(&h);
        let (sf, sg) = (t.synthesize(&f), t.synthesize(&g));
        for n in 0..lhs.values().len() {
            prop_assert!((lhs.values()[n] - (sf.values()[n] + sg.values()[n] * a)).norm() < 1e-12);
        }
    }
}
