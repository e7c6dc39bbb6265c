//! Independent oracles for the two environment models.

mod common;

use nonlocal_memory::blp::haar_state;
use nonlocal_memory::dephasing::{apply_map, dephase_qubit, DecoherenceModel, LocalTimes};
use nonlocal_memory::multimode::{
    ohmic_decoherence_integral, ohmic_functions, DiscreteModeEnvironment, Mode,
    OhmicCorrelatedFields,
};
use nonlocal_memory::photon::{frequency_pdf, g_fourier, photon_functions, PhotonGaussianEnv};
use nonlocal_memory::qlinalg::{partial_trace, trace_distance, Subsystem};
use nonlocal_memory::quadrature::integrate;
use nonlocal_memory::C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn photon(k: f64) -> PhotonGaussianEnv {
    PhotonGaussianEnv::new(1.0, 1.0, k, 1.0).unwrap()
}

/// Trapezoid rule on a square box; spectrally accurate for Gaussians.
fn box_sum<F: Fn(f64, f64) -> C64>(centre: f64, half: f64, n: usize, f: F) -> C64 {
    let h = 2.0 * half / n as f64;
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..=n {
        for j in 0..=n {
            let w =
                if i == 0 || i == n { 0.5 } else { 1.0 } * if j == 0 || j == n { 0.5 } else { 1.0 };
            acc += w * f(centre - half + i as f64 * h, centre - half + j as f64 * h);
        }
    }
    acc * h * h
}

#[test]
fn ohmic_single_time_integral_matches_log_form() {
    let env = OhmicCorrelatedFields::new(0.7, 1.3, -1.0).unwrap();
    for tau in [0.0, 0.1, 0.5, 1.0, 2.5, 4.0] {
        let q = ohmic_decoherence_integral(&env, tau).unwrap();
        assert!(
            (q - env.decoherence_integral(tau)).abs() < 1e-10,
            "tau={tau}"
        );
    }
}

#[test]
fn discrete_modes_converge_to_the_ohmic_continuum() {
    let env = OhmicCorrelatedFields::new(1.0, 1.0, -0.5).unwrap();
    let exact = ohmic_functions(&env, 1.2, 0.4).as_array();
    let err = |n| {
        let d = DiscreteModeEnvironment::ohmic_riemann(&env, n, 20.0).unwrap();
        let f = d
            .functions(LocalTimes { t1: 1.2, t2: 0.4 })
            .unwrap()
            .as_array();
        (0..4).map(|i| (f[i] - exact[i]).norm()).fold(0.0, f64::max)
    };
    let (coarse, fine) = (err(250), err(2000));
    assert!(fine < coarse);
    assert!(fine < 1e-4, "{fine}");
}

#[test]
fn single_mode_matches_characteristic_function_by_hand() {
    // ξ = 1 − e^{it}: ln κ1 = −2|ξ|², ln κ12 = −2(|ξ1|² + |ξ2|² + 2c Re ξ1ξ2*).
    let (t1, t2, c) = (0.8, 2.1, 0.3);
    let env = DiscreteModeEnvironment::new(
        vec![Mode {
            g: C64::new(1.0, 0.0),
            omega: 1.0,
        }],
        c,
    )
    .unwrap();
    let f = env.functions(LocalTimes { t1, t2 }).unwrap();
    let x1 = C64::new(1.0, 0.0) - C64::new(0.0, t1).exp();
    let x2 = C64::new(1.0, 0.0) - C64::new(0.0, t2).exp();
    let cross = (x1 * x2.conj()).re;
    let k12 = (-2.0 * (x1.norm_sqr() + x2.norm_sqr() + 2.0 * c * cross)).exp();
    let l12 = (-2.0 * (x1.norm_sqr() + x2.norm_sqr() - 2.0 * c * cross)).exp();
    assert!((f.kappa1.re - (-2.0 * x1.norm_sqr()).exp()).abs() < 1e-14);
    assert!((f.kappa12.re - k12).abs() < 1e-14);
    assert!((f.lambda12.re - l12).abs() < 1e-14);
}

#[test]
fn photon_pdf_is_normalized_with_normal_marginal() {
    for k in [-0.9, -0.5, 0.0, 0.6] {
        let env = photon(k);
        let total = box_sum(0.5, 6.0, 240, |a, b| {
            C64::new(frequency_pdf(&env, a, b).unwrap(), 0.0)
        });
        assert!((total.re - 1.0).abs() < 1e-6, "K={k}: {total}");
        // ω1 marginal at a few points against N(ω0/2, C11).
        for w1 in [-0.5, 0.5, 1.7] {
            let m = integrate(
                |w2| frequency_pdf(&env, w1, w2).unwrap(),
                -7.5,
                8.5,
                1e-13,
                200,
            )
            .unwrap()
            .value;
            let normal = (-0.5 * (w1 - 0.5f64).powi(2)).exp() / (2.0 * std::f64::consts::PI).sqrt();
            assert!((m - normal).abs() < 1e-10, "K={k} w1={w1}");
        }
    }
}

#[test]
fn closed_form_g_is_the_fourier_transform_of_the_pdf() {
    // The closed form carries e^{+iω0(τ1+τ2)/2}, i.e. the transform with
    // kernel e^{+iω·τ}. The e^{−iω·τ} transform is its conjugate.
    for k in [-0.8, 0.0, 0.4] {
        let env = photon(k);
        for (t1, t2) in [(0.3, 0.0), (1.0, 1.0), (0.7, -1.2)] {
            let plus = box_sum(0.5, 8.0, 320, |a, b| {
                frequency_pdf(&env, a, b).unwrap() * C64::new(0.0, a * t1 + b * t2).exp()
            });
            let minus = box_sum(0.5, 8.0, 320, |a, b| {
                frequency_pdf(&env, a, b).unwrap() * C64::new(0.0, -(a * t1 + b * t2)).exp()
            });
            let g = g_fourier(&env, t1, t2);
            assert!((plus - g).norm() < 1e-6, "K={k} ({t1},{t2})");
            assert!((minus - g.conj()).norm() < 1e-6);
        }
    }
}

#[test]
fn marginals_see_only_local_dephasing() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let ohmic = OhmicCorrelatedFields::new(1.0, 1.0, -1.0).unwrap();
    for _ in 0..50 {
        let psi = haar_state(&mut rng);
        let (t1, t2) = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
        for f in [
            ohmic_functions(&ohmic, t1, t2),
            photon_functions(&photon(rng.random_range(-1.0..1.0)), t1, t2),
        ] {
            let rho = apply_map(&psi, &f).unwrap();
            let rho0 = psi.density();
            for (sub, kappa) in [(Subsystem::First, f.kappa1), (Subsystem::Second, f.kappa2)] {
                let lhs = partial_trace(&rho, sub).unwrap();
                let rhs = dephase_qubit(&partial_trace(&rho0, sub).unwrap(), kappa).unwrap();
                let d = lhs.matrix().checked_sub(rhs.matrix()).unwrap().max_abs();
                assert!(d < 1e-14, "{d}");
            }
        }
    }
}

#[test]
fn evolution_contracts_mixed_state_distance() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for _ in 0..200 {
        let (a, b) = (
            common::random_mixed(&mut rng),
            common::random_mixed(&mut rng),
        );
        let (t1, t2) = (rng.random_range(0.0..3.0), rng.random_range(0.0..3.0));
        let c = rng.random_range(-1.0..1.0);
        let ohmic = OhmicCorrelatedFields::new(1.0, 1.0, c).unwrap();
        for f in [
            ohmic_functions(&ohmic, t1, t2),
            photon_functions(&photon(c), t1, t2),
        ] {
            let phi = |x: &nonlocal_memory::qlinalg::DensityMatrix| {
                nonlocal_memory::qlinalg::DensityMatrix::new(
                    nonlocal_memory::dephasing::apply_map_to_operator(x.matrix(), &f).unwrap(),
                )
                .unwrap()
            };
            let before = trace_distance(&a, &b).unwrap();
            let after = trace_distance(&phi(&a), &phi(&b)).unwrap();
            assert!(after <= before + 1e-12);
        }
    }
}
