//! Property tests for the evolution and estimator invariants.

mod common;

use common::pseudo_random_state;
use num_complex::Complex64;
use proptest::prelude::*;
use sawfid::fractal::{estimate_dimension, modified_box_count, strip_ladder, WindowSpec};
use sawfid::gates::build_floquet_circuit;
use sawfid::map::SawtoothMap;
use sawfid::noise::{sample_imperfections, NoisyEngine};
use sawfid::params::MapParams;
use sawfid::state::{Representation, StateVector};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn evolution_is_unitary(n_q in 2u32..=6, chaos in -4.5f64..4.5, salt in 0u64..1000, steps in 1usize..300) {
        let params = MapParams::new(n_q, chaos).unwrap();
        let mut state = pseudo_random_state(&params, salt);
        SawtoothMap::new(params).evolve(&mut state, steps);
        prop_assert!((state.norm_sqr() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn evolution_is_linear(chaos in -4.0f64..4.0, salt in 0u64..1000, re in -1.0f64..1.0, im in -1.0f64..1.0) {
        let params = MapParams::new(4, chaos).unwrap();
        let psi1 = pseudo_random_state(&params, salt);
        let psi2 = pseudo_random_state(&params, salt.wrapping_add(7919));
        let alpha = Complex64::new(re, im);
        let beta = Complex64::new(0.6, -0.2);

        let combo: Vec<Complex64> = psi1
            .amps()
            .iter()
            .zip(psi2.amps())
            .map(|(a, b)| alpha * a + beta * b)
            .collect();
        // from_amplitudes normalizes; rescale so the input is the raw
        // superposition times 1/norm, which linearity tolerates.
        let norm = combo.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        prop_assume!(norm > 1e-3);
        let mut combined =
            StateVector::from_amplitudes(combo, Representation::Momentum).unwrap();

        let mut map = SawtoothMap::new(params);
        let mut a = psi1.clone();
        let mut b = psi2.clone();
        map.evolve(&mut combined, 3);
        map.evolve(&mut a, 3);
        map.evolve(&mut b, 3);
        for ((c, x), y) in combined.amps().iter().zip(a.amps()).zip(b.amps()) {
            let expected = (alpha * x + beta * y) / norm;
            prop_assert!((c - expected).norm() < 1e-10);
        }
    }

    #[test]
    fn transform_round_trip_is_identity(n_q in 1u32..=7, chaos in -4.0f64..4.0, salt in 0u64..1000) {
        let params = MapParams::new(n_q, chaos).unwrap();
        let original = pseudo_random_state(&params, salt);
        let mut state = original.clone();
        let mut map = SawtoothMap::new(params);
        map.to_angle(&mut state);
        map.to_momentum(&mut state);
        for (a, o) in state.amps().iter().zip(original.amps()) {
            prop_assert!((a - o).norm() < 1e-12);
        }
    }

    #[test]
    fn echo_overlap_is_symmetric(salt in 0u64..500, eps in 0.0f64..0.2, steps in 1usize..60) {
        let params = MapParams::new(4, 2.0_f64.sqrt()).unwrap();
        let config = sample_imperfections(4, eps, salt).unwrap();
        let circuit = build_floquet_circuit(&params);
        let engine = NoisyEngine::new(&circuit, &config).unwrap();
        let mut exact = pseudo_random_state(&params, salt);
        let mut noisy = exact.clone();
        let mut map = SawtoothMap::new(params);
        map.evolve(&mut exact, steps);
        engine.evolve(&mut noisy, steps);
        let f_ab = noisy.fidelity_with(&exact);
        let f_ba = exact.fidelity_with(&noisy);
        prop_assert!((f_ab - f_ba).abs() < 1e-14);
        prop_assert!(f_ab <= 1.0 + 1e-12);
    }

    #[test]
    fn box_counts_decrease_with_strip_width(salt in 0u64..200, rough in 0.0f64..1.0) {
        // Random-walk-flavored signal: counts must be nonincreasing in L
        // up to discretization jitter.
        let mut x = salt as f64;
        let mut value = 0.0;
        let signal: Vec<f64> = (0..4096)
            .map(|i| {
                x = (x * 6364136223846793005.0 + 1442695040888963407.0) % 1e18;
                let step = (x / 1e18) - 0.5;
                value += step + rough * ((i as f64) * 0.01).sin();
                value
            })
            .collect();
        let ladder = strip_ladder(signal.len(), false);
        let table = modified_box_count(&signal, &ladder).unwrap();
        for pair in table.windows(2) {
            prop_assert!(pair[1].1 <= pair[0].1 * 1.10,
                "M({}) = {} vs M({}) = {}", pair[1].0, pair[1].1, pair[0].0, pair[0].1);
        }
        for (_, m) in &table {
            prop_assert!(*m > 0.0);
        }
    }

    #[test]
    fn dimension_is_affine_invariant(scale in 0.1f64..50.0, shift in -20.0f64..20.0) {
        let signal: Vec<f64> = (0..4096)
            .map(|i| {
                let t = i as f64;
                (0.11 * t).sin() + 0.5 * (0.037 * t).cos() + 0.25 * (0.41 * t).sin()
            })
            .collect();
        let moved: Vec<f64> = signal.iter().map(|v| scale * v + shift).collect();
        let d0 = estimate_dimension(&signal, WindowSpec::Explicit(1.0, 512.0)).unwrap();
        let d1 = estimate_dimension(&moved, WindowSpec::Explicit(1.0, 512.0)).unwrap();
        prop_assert!((d0.dimension - d1.dimension).abs() < 1e-3);
    }
}

#[test]
fn noisy_evolution_keeps_fidelity_near_one_without_imperfections() {
    // ε = 0 channel identity across register sizes, 100 steps each.
    for n_q in 1..=8u32 {
        let params = MapParams::new(n_q, -1.0).unwrap();
        let circuit = build_floquet_circuit(&params);
        let config = sample_imperfections(n_q, 0.0, 3).unwrap();
        let engine = NoisyEngine::new(&circuit, &config).unwrap();
        let mut exact = StateVector::basis_momentum(&params, 0).unwrap();
        let mut noisy = exact.clone();
        let mut map = SawtoothMap::new(params);
        for _ in 0..100 {
            map.step(&mut exact);
            engine.step(&mut noisy);
            let f = noisy.fidelity_with(&exact);
            assert!(f >= 1.0 - 1e-9, "n_q={n_q} f={f}");
        }
    }
}

#[test]
fn series_deterministic_and_first_step_contractive() {
    use sawfid::fidelity::{compute_fidelity_series, InitialState};
    let params = MapParams::new(6, 2.0_f64.sqrt()).unwrap();
    let config = sample_imperfections(6, 1e-3, 11).unwrap();
    let initial = InitialState::Basis { momentum: 2 };
    let a = compute_fidelity_series(&params, &config, &initial, 64).unwrap();
    let b = compute_fidelity_series(&params, &config, &initial, 64).unwrap();
    assert_eq!(a.values, b.values);
    assert!(a.values[1] < 1.0 - 1e-9);
    assert!(a.values[1] <= 1.0 + 1e-12);
}
