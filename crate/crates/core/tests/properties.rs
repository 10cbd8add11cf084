use std::sync::Arc;

use gibbswave_core::experiments::{
    invariance_observables, invariance_test, smoothing_lp_ratio, InitialMeasure,
};
use gibbswave_core::sampling::gaussian_draw;
use gibbswave_core::{
    free_evolve, hamiltonian, sobolev_norm, Forcing, GibbsSpec, RadialQuadrature, SeededStream,
    Sequential, SimParams, Stepper,
};
use proptest::prelude::*;

fn spec(n: usize) -> GibbsSpec {
    GibbsSpec::new(
        2.0,
        n,
        Arc::new(RadialQuadrature::with_default_order(n).unwrap()),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn flow_is_reversible(seed in 0u64..1000, dt in 1e-4f64..5e-3, steps in 1u64..400, amp in 0.5f64..4.0) {
        let s = spec(8);
        let u0 = gaussian_draw(&mut SeededStream::new(seed, 0).rng(), 8).scaled(amp);
        let mut u = u0.clone();
        Stepper::new(&s, Forcing::Smoothed, dt).advance(&mut u, steps);
        Stepper::new(&s, Forcing::Smoothed, -dt).advance(&mut u, steps);
        prop_assert!(sobolev_norm(&u.difference(&u0), 0.0) < 1e-11 * (1.0 + sobolev_norm(&u0, 0.0)));
    }

    #[test]
    fn energy_error_is_second_order(seed in 0u64..1000) {
        let s = spec(8);
        let u0 = gaussian_draw(&mut SeededStream::new(seed, 1).rng(), 8).scaled(2.0);
        let h0 = hamiltonian(&u0, &s, true);
        // The endpoint error oscillates and can vanish by accident, so take the
        // worst deviation along the path.
        let err = |dt: f64| {
            let mut u = u0.clone();
            let mut stepper = Stepper::new(&s, Forcing::Smoothed, dt);
            (0..(0.5 / dt).round() as u64).fold(0.0f64, |worst, _| {
                stepper.advance(&mut u, 1);
                worst.max((hamiltonian(&u, &s, true) - h0).abs())
            })
        };
        let (a, b) = (err(1e-2), err(5e-3));
        prop_assert!(a < 1e-3 * h0);
        // Halving dt shrinks the error roughly fourfold, unless both sit at rounding level.
        prop_assert!(b < 0.4 * a || a < 1e-12 * h0, "{a} {b}");
    }

    #[test]
    fn free_flow_is_isometric_and_periodic(seed in 0u64..1000, t in -50.0f64..50.0, s in -1.0f64..1.5) {
        let u = gaussian_draw(&mut SeededStream::new(seed, 2).rng(), 32);
        let v = free_evolve(&u, t);
        prop_assert!((sobolev_norm(&v, s) - sobolev_norm(&u, s)).abs() <= 1e-13 * sobolev_norm(&u, s));
        let w = free_evolve(&v, 2.0);
        prop_assert!(sobolev_norm(&w.difference(&v), s) <= 1e-13 * sobolev_norm(&u, s));
    }

    #[test]
    fn sobolev_norm_increases_with_s(seed in 0u64..1000, s in -1.0f64..1.0, ds in 0.0f64..1.0) {
        let u = gaussian_draw(&mut SeededStream::new(seed, 3).rng(), 16);
        // πn > 1 for every mode, so each weight (πn)^{2s} increases with s.
        prop_assert!(sobolev_norm(&u, s + ds) >= sobolev_norm(&u, s) * (1.0 - 1e-15));
    }
}

#[test]
fn smoothing_is_uniformly_bounded_on_lp() {
    // S_N stays bounded on L^p uniformly in N; the worst ratio over sampled
    // states must not grow with the cutoff.
    let ratios = smoothing_lp_ratio(&[8, 16, 32], 40, 5.0, 11).unwrap();
    let worst: Vec<f64> = ratios.iter().map(|r| r.1).collect();
    assert!(worst.iter().all(|&r| r > 0.0 && r < 2.0), "{worst:?}");
    assert!(worst[2] < 1.25 * worst[0], "{worst:?}");
}

#[test]
fn truncations_share_low_modes() {
    let big = gaussian_draw(&mut SeededStream::new(5, 9).rng(), 64);
    for n in [1, 8, 32] {
        let small = gaussian_draw(&mut SeededStream::new(5, 9).rng(), n);
        assert_eq!(big.resized(n), small);
    }
}

#[test]
fn gaussian_ensemble_keeps_its_energy_law() {
    // Started from μ_N instead of ρ_N, the energy is still conserved along
    // each path, so its KS test cannot reject. At N = 16 the two measures are
    // close (acceptance ≈ 0.98), so the other observables stay quiet as well.
    let sim = SimParams::new(spec(16), 1e-3, 5.0).unwrap();
    let obs = invariance_observables(0.4);
    let r = invariance_test(&sim, 500, &obs, InitialMeasure::Gaussian, 17, &Sequential).unwrap();
    let adj = r.adjusted_p_values();
    println!("gaussian start: adjusted p {adj:?}");
    assert!(r.results[1].statistic < 0.01, "{:?}", r.results[1]);
    assert!(adj[1] > 0.01);
}
