//! Property tests over random parameters and states.

mod common;

use nonlocal_memory::blp::haar_state;
use nonlocal_memory::dephasing::{apply_map, InteractionSchedule};
use nonlocal_memory::multimode::{ohmic_functions, OhmicCorrelatedFields};
use nonlocal_memory::photon::{photon_functions, PhotonGaussianEnv};
use nonlocal_memory::qlinalg::{hermitian_eigenvalues, trace_distance};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn eigenvalue_power_sums(seed in any::<u64>()) {
        let mut r = rng(seed);
        let u = common::haar_unitary(&mut r);
        let rho = common::random_mixed(&mut r).conjugate_by(&u).unwrap();
        let m = rho.matrix();
        let ev = hermitian_eigenvalues(m).unwrap();
        prop_assert!(ev.windows(2).all(|w| w[0] <= w[1]));
        prop_assert!((ev.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let sq: f64 = ev.iter().map(|x| x * x).sum();
        prop_assert!((sq - m.frobenius_norm().powi(2)).abs() < 1e-12);
        let cube: f64 = ev.iter().map(|x| x * x * x).sum();
        let m3 = m.checked_mul(m).unwrap().checked_mul(m).unwrap();
        prop_assert!((cube - m3.trace().re).abs() < 1e-12);
    }

    #[test]
    fn trace_distance_is_a_bounded_metric(seed in any::<u64>()) {
        let mut r = rng(seed);
        let (a, b, c) = (common::random_mixed(&mut r), common::random_mixed(&mut r), common::random_mixed(&mut r));
        let ab = trace_distance(&a, &b).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!(trace_distance(&a, &a).unwrap() < 1e-14);
        prop_assert!((ab - trace_distance(&b, &a).unwrap()).abs() < 1e-12);
        prop_assert!(ab <= trace_distance(&a, &c).unwrap() + trace_distance(&c, &b).unwrap() + 1e-12);
    }

    #[test]
    fn ohmic_identity_and_complete_positivity(
        alpha in 0.01f64..3.0, omega_c in 0.1f64..5.0, c in -1.0f64..=1.0,
        t1 in 0.0f64..5.0, t2 in 0.0f64..5.0,
    ) {
        let f = ohmic_functions(&OhmicCorrelatedFields::new(alpha, omega_c, c).unwrap(), t1, t2);
        let rhs = f.kappa1 * f.kappa1 * f.kappa2 * f.kappa2;
        prop_assert!((f.lambda12 * f.kappa12 - rhs).norm() <= 1e-12);
        prop_assert!(f.max_modulus() <= 1.0);
        prop_assert!(f.check_completely_positive().is_ok());
    }

    #[test]
    fn photon_maps_are_completely_positive(
        k in -1.0f64..=1.0, c11 in 0.1f64..3.0, t1 in 0.0f64..3.0, t2 in 0.0f64..3.0, seed in any::<u64>(),
    ) {
        let f = photon_functions(&PhotonGaussianEnv::new(1.0, c11, k, 1.0).unwrap(), t1, t2);
        prop_assert!(f.check_completely_positive().is_ok());
        let mut r = rng(seed);
        let (a, b) = (haar_state(&mut r), haar_state(&mut r));
        let before = trace_distance(&a.density(), &b.density()).unwrap();
        let after = trace_distance(&apply_map(&a, &f).unwrap(), &apply_map(&b, &f).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-12);
    }

    #[test]
    fn local_times_are_monotone_and_lipschitz(
        s1 in 0.0f64..2.0, d1 in 0.0f64..2.0, s2 in 0.0f64..2.0, d2 in 0.0f64..2.0,
        t in -1.0f64..5.0, dt in 0.0f64..1.0,
    ) {
        let s = InteractionSchedule::new(s1, s1 + d1, s2, s2 + d2).unwrap();
        let (a, b) = (s.local_times(t), s.local_times(t + dt));
        for (x, y, d) in [(a.t1, b.t1, s.t1_end - s.t1_start), (a.t2, b.t2, s.t2_end - s.t2_start)] {
            prop_assert!(x >= 0.0 && x <= d);
            prop_assert!(y >= x);
            prop_assert!(y - x <= dt + 1e-12);
        }
    }
}
