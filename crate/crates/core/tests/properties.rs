//! Property tests: randomized chains and protocols against independent
//! oracles and structural invariants.

mod common;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use proptest::prelude::*;

use spinchain::chain::{build_couplings, build_hamiltonian, ChainSpec, CouplingVector};
use spinchain::fidelity::{
    fidelity_series, first_arrival_peak, FidelitySeries, PeakConfig, Scenario,
};
use spinchain::propagator::{
    diagonalize, propagate_static, AmplitudeState, DriveProtocol, DrivenEvolver, Evolver,
};

fn coupling_values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(0.2f64..2.0, 1..=7)
}

fn random_state(n: usize, seed: u64) -> AmplitudeState {
    // deterministic pseudo-random unit vector; avoids pulling in an RNG crate
    let mut raw = Vec::with_capacity(n);
    let mut x = seed.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
    let mut next = || {
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        (x >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    for _ in 0..n {
        raw.push(Complex64::new(next(), next()));
    }
    let norm: f64 = raw.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    let amps = DVector::from_iterator(n, raw.into_iter().map(|z| z / norm));
    AmplitudeState::new(Complex64::ZERO, amps).expect("normalized by construction")
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// propagate_static agrees with a dense Taylor matrix exponential.
    #[test]
    fn static_evolution_matches_dense_exponential(
        values in coupling_values(),
        tau in 0.0f64..10.0,
        seed in any::<u64>(),
    ) {
        let couplings = CouplingVector::new(values).unwrap();
        let h = build_hamiltonian(&couplings);
        let n = h.dimension();
        let d = diagonalize(&h).unwrap();
        let state = random_state(n, seed);
        let spectral = propagate_static(&d, &state, tau).unwrap();

        let u = common::expm_hamiltonian(h.as_matrix(), tau);
        let expected = &u * state.amplitudes();
        for k in 0..n {
            prop_assert!((spectral.amplitudes()[k] - expected[k]).norm() <= 1e-9);
        }
    }

    /// Norm conservation and evolution composition.
    #[test]
    fn unitarity_and_composition(
        values in coupling_values(),
        tau1 in 0.0f64..5.0,
        tau2 in 0.0f64..5.0,
        seed in any::<u64>(),
    ) {
        let h = build_hamiltonian(&CouplingVector::new(values).unwrap());
        let d = diagonalize(&h).unwrap();
        let state = random_state(h.dimension(), seed);

        let once = propagate_static(&d, &state, tau1 + tau2).unwrap();
        prop_assert!((once.norm_sq() - 1.0).abs() <= 1e-12);

        let twice =
            propagate_static(&d, &propagate_static(&d, &state, tau1).unwrap(), tau2).unwrap();
        for k in 0..h.dimension() {
            prop_assert!((once.amplitudes()[k] - twice.amplitudes()[k]).norm() <= 1e-10);
        }
    }

    /// Bipartite spectrum: eigenvalues pair up as (-l, +l).
    #[test]
    fn spectrum_is_symmetric_about_zero(values in coupling_values()) {
        let h = build_hamiltonian(&CouplingVector::new(values).unwrap());
        let d = diagonalize(&h).unwrap();
        let n = d.dim();
        let ev = d.eigenvalues();
        for k in 0..n {
            prop_assert!((ev[k] + ev[n - 1 - k]).abs() <= 1e-12);
        }
    }

    /// Ideal chains are mirror symmetric; the coupling profile reads the same
    /// from both ends.
    #[test]
    fn ideal_profiles_are_mirror_symmetric(
        n in 6usize..=20,
        alpha in 0.1f64..2.0,
        beta in 0.1f64..2.0,
    ) {
        let spec = ChainSpec::new(n, alpha, beta).unwrap();
        let j = build_couplings(&spec);
        let v = j.values();
        for i in 0..v.len() {
            prop_assert_eq!(v[i], v[v.len() - 1 - i]);
        }
    }

    /// Driven evolution at stroboscopic times equals powers of the one-period
    /// propagator.
    #[test]
    fn stroboscopic_consistency(
        omega in 0.5f64..3.0,
        eta in 0.0f64..=1.0,
        m in 1u32..=5,
        seed in any::<u64>(),
    ) {
        let protocol = DriveProtocol::new(
            ChainSpec::new(8, 0.55, 1.0).unwrap(),
            ChainSpec::new(8, 1.01, 1.0).unwrap(),
            omega,
            eta,
        )
        .unwrap();
        let evolver = DrivenEvolver::new(&protocol).unwrap();
        let state = random_state(8, seed);

        let mut expected = state.amplitudes().clone();
        let u = evolver.one_period_propagator();
        for _ in 0..m {
            expected = &u * expected;
        }
        let got = evolver.propagate(&state, m as f64 * evolver.period()).unwrap();
        for k in 0..8 {
            prop_assert!((got.amplitudes()[k] - expected[k]).norm() <= 1e-10);
        }
        prop_assert!((got.norm_sq() - 1.0).abs() <= 1e-12);
    }

    /// The series fast path agrees with exact jump propagation: every sampled
    /// fidelity equals the one recomputed from a fresh propagate call.
    #[test]
    fn series_sampler_matches_exact_propagation(
        omega in 0.5f64..3.0,
        eta in 0.0f64..=1.0,
        dtau in 0.02f64..0.3,
    ) {
        let n = 7;
        let protocol = DriveProtocol::new(
            ChainSpec::new(n, 0.6, 1.2).unwrap(),
            ChainSpec::new(n, 1.4, 0.8).unwrap(),
            omega,
            eta,
        )
        .unwrap();
        let evolver = Evolver::from_protocol(&protocol).unwrap();
        let scenario = Scenario::single_excitation();
        let config = PeakConfig::new(40.0 * dtau, dtau, 0.5).unwrap();
        let series = fidelity_series(&evolver, &scenario, &config).unwrap();
        let initial = scenario.initial_state(n);
        for (j, &value) in series.values().iter().enumerate() {
            let evolved = evolver.propagate(&initial, j as f64 * dtau).unwrap();
            let exact = evolved.site_amplitude(n).unwrap().norm_sqr();
            prop_assert!((value - exact).abs() <= 1e-9, "sample {}", j);
        }
    }

    /// Peak detection lands on the apex of a randomized smooth bump.
    #[test]
    fn peak_detection_finds_synthetic_bump(
        center in 4.0f64..14.0,
        width in 0.5f64..2.0,
        height in 0.2f64..1.0,
    ) {
        let dtau = 0.01;
        let count = 2001usize;
        let taus: Vec<f64> = (0..count).map(|j| j as f64 * dtau).collect();
        let values: Vec<f64> = taus
            .iter()
            .map(|&t| height * (-((t - center) / width).powi(2)).exp())
            .collect();
        let series = FidelitySeries::new(taus, values).unwrap();
        let config = PeakConfig::new(20.0, dtau, 0.5).unwrap();
        let peak = first_arrival_peak(&series, &config).unwrap();
        prop_assert!((peak.tau_star - center).abs() <= dtau);
        prop_assert!((peak.f_star - height).abs() <= 1e-6);
    }
}

/// Dense-oracle check of the one-period propagator: U2 U1 from the spectral
/// route equals the product of Taylor exponentials.
#[test]
fn one_period_propagator_matches_dense_product() {
    let spec1 = ChainSpec::new(8, 0.5, 1.0).unwrap();
    let spec2 = ChainSpec::new(8, 1.5, 1.0).unwrap();
    let protocol = DriveProtocol::new(spec1.clone(), spec2.clone(), 1.3, 0.4).unwrap();
    let evolver = DrivenEvolver::new(&protocol).unwrap();
    let u_spectral = evolver.one_period_propagator();

    let h1 = spinchain::chain::HamiltonianMatrix::from_spec(&spec1);
    let h2 = spinchain::chain::HamiltonianMatrix::from_spec(&spec2);
    let u_dense = common::expm_hamiltonian(h2.as_matrix(), protocol.t2())
        * common::expm_hamiltonian(h1.as_matrix(), protocol.t1());
    assert!(common::max_abs_diff(&u_spectral, &u_dense) <= 1e-9);
}

/// The spectral propagator matrix itself is unitary.
#[test]
fn propagator_matrix_is_unitary() {
    let h = spinchain::chain::HamiltonianMatrix::from_spec(&ChainSpec::new(10, 0.51, 1.0).unwrap());
    let d = diagonalize(&h).unwrap();
    let u = d.propagator_matrix(3.7);
    let identity = DMatrix::<Complex64>::identity(10, 10);
    let residual = common::max_abs_diff(&(&u.adjoint() * &u), &identity);
    assert!(residual <= 1e-12);
}
