//! Acceptance suite: one test per release criterion, each printing a
//! `criterion N ... PASS` line (visible with `--nocapture`) plus the
//! measured values. Tolerances are pinned in the assertions.
//!
//! Sweeps here use the coarse-plus-refine table options; every probed point
//! lies on the default 0.01 grid, so the reported optimum is a lower bound
//! of the full-grid optimum, which is what the "optimum >= published - 0.01"
//! checks need. Direct evaluations at published (omega, eta) points use the
//! default sampling.

use std::path::Path;
use std::process::Command;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use spinchain::chain::{build_hamiltonian, ChainSpec, CouplingVector, HamiltonianMatrix};
use spinchain::fidelity::{
    bell_fidelity, bell_fidelity_via_density, fidelity_series, first_arrival_peak,
    initial_state_bell, BellSign, BlochAngles, PeakConfig, Scenario,
};
use spinchain::parrondo::{
    reproduce_table, ParrondoConfig, TableId, TableOptions, TableRow,
};
use spinchain::propagator::{
    diagonalize, effective_propagate, magnus_terms, propagate_static, AmplitudeState,
    DriveProtocol, DrivenEvolver, Evolver,
};
use spinchain::{disorder_scan, DisorderAxis};

// --- independent oracle -------------------------------------------------------

/// Dense matrix exponential (scaling-and-squaring + Taylor); deliberately
/// independent of the library's spectral evolution path.
fn expm(m: &DMatrix<Complex64>) -> DMatrix<Complex64> {
    let n = m.nrows();
    let norm = (0..n)
        .map(|j| m.column(j).iter().map(|z| z.norm()).sum::<f64>())
        .fold(0.0_f64, f64::max);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as u32
    } else {
        0
    };
    let scaled = m / Complex64::new(2f64.powi(squarings as i32), 0.0);
    let mut result = DMatrix::<Complex64>::identity(n, n);
    let mut term = DMatrix::<Complex64>::identity(n, n);
    for k in 1..=30u32 {
        term = (&term * &scaled) / Complex64::new(k as f64, 0.0);
        result += &term;
        if term.iter().map(|z| z.norm()).fold(0.0_f64, f64::max) < 1e-18 {
            break;
        }
    }
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

fn max_abs(m: &DMatrix<Complex64>) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0_f64, f64::max)
}

/// Deterministic pseudo-random stream for oracle inputs.
struct XorShift(u64);

impl XorShift {
    fn next_unit(&mut self) -> f64 {
        self.0 ^= self.0 << 13;
        self.0 ^= self.0 >> 7;
        self.0 ^= self.0 << 17;
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn static_peak(spec: &ChainSpec, scenario: &Scenario, config: &PeakConfig) -> f64 {
    let series = fidelity_series(&Evolver::from_spec(spec).unwrap(), scenario, config).unwrap();
    first_arrival_peak(&series, config).unwrap().f_star
}

// --- criteria -------------------------------------------------------------------

#[test]
fn criterion_01_uniform_references() {
    let config = PeakConfig::for_chain(10);
    let uniform = ChainSpec::uniform(10).unwrap();
    let single = static_peak(&uniform, &Scenario::single_excitation(), &config);
    assert!(
        (single - 0.804).abs() <= 0.005,
        "single-qubit reference: {single}"
    );
    let bell = static_peak(&uniform, &Scenario::bell_plus(), &config);
    assert!((bell - 0.730).abs() <= 0.005, "bell reference: {bell}");
    println!("criterion 1 (uniform references): PASS — single {single:.4}, bell {bell:.4}");
}

fn check_size_scan_table(id: TableId, label: &str) -> Vec<TableRow> {
    let rows = reproduce_table(id, &TableOptions::fast()).unwrap();
    for row in &rows {
        let published = &row.published;
        let n = row.n;
        assert!(
            (row.f_0 - published.f_0.unwrap()).abs() <= 0.005,
            "{label} N={n}: f_0 {} vs {}",
            row.f_0,
            published.f_0.unwrap()
        );
        assert!(
            (row.f_h1 - published.f_h1.unwrap()).abs() <= 0.005,
            "{label} N={n}: f_h1 {} vs {}",
            row.f_h1,
            published.f_h1.unwrap()
        );
        assert!(
            (row.f_h2 - published.f_h2.unwrap()).abs() <= 0.005,
            "{label} N={n}: f_h2 {} vs {}",
            row.f_h2,
            published.f_h2.unwrap()
        );
        assert!(
            (row.f_p_at_published - published.f_p).abs() <= 0.01,
            "{label} N={n}: driven at published point {} vs {}",
            row.f_p_at_published,
            published.f_p
        );
        assert!(
            row.f_p >= published.f_p - 0.01,
            "{label} N={n}: sweep optimum {} below published {} - 0.01",
            row.f_p,
            published.f_p
        );
        assert!(
            row.f_h1 < row.f_0 && row.f_h2 < row.f_0 && row.f_p > row.f_0,
            "{label} N={n}: alternation enhancement condition violated"
        );
    }
    rows
}

#[test]
fn criterion_02_table1_reproduction() {
    let rows = check_size_scan_table(TableId::One, "table 1");
    assert_eq!(rows.len(), 13);
    println!(
        "criterion 2 (table 1, N=8..20): PASS — max |f_p - published| at quoted points = {:.4}",
        rows.iter()
            .map(|r| (r.f_p_at_published - r.published.f_p).abs())
            .fold(0.0_f64, f64::max)
    );
}

#[test]
fn criterion_03_table2_reproduction() {
    let rows = check_size_scan_table(TableId::Two, "table 2");
    assert_eq!(rows.len(), 5);
    let by_n = |n: usize| rows.iter().find(|r| r.n == n).unwrap();
    assert!((by_n(8).f_p_at_published - 0.962).abs() <= 0.01);
    assert!((by_n(12).f_p_at_published - 0.706).abs() <= 0.01);
    println!(
        "criterion 3 (table 2, bell N=8..12): PASS — N=8 f_p {:.4}, N=12 f_p {:.4}",
        by_n(8).f_p_at_published,
        by_n(12).f_p_at_published
    );
}

#[test]
fn criterion_04_table3_reproduction() {
    let rows = reproduce_table(TableId::Three, &TableOptions::fast()).unwrap();
    assert_eq!(rows.len(), 6);
    for row in &rows {
        assert!(
            (row.f_p_at_published - row.published.f_p).abs() <= 0.01,
            "pair ({}, {}): {} vs {}",
            row.coupling1,
            row.coupling2,
            row.f_p_at_published,
            row.published.f_p
        );
        assert!(row.f_p >= row.published.f_p - 0.01);
    }
    let forward = rows
        .iter()
        .find(|r| r.coupling1 == 0.57 && r.coupling2 == 0.79)
        .unwrap();
    let swapped = rows
        .iter()
        .find(|r| r.coupling1 == 0.79 && r.coupling2 == 0.57)
        .unwrap();
    assert!(
        forward.f_p_at_published > swapped.f_p_at_published,
        "order asymmetry lost: {} vs {}",
        forward.f_p_at_published,
        swapped.f_p_at_published
    );
    println!(
        "criterion 4 (table 3 order dependence): PASS — (0.57,0.79) {:.4} > (0.79,0.57) {:.4}",
        forward.f_p_at_published, swapped.f_p_at_published
    );
}

#[test]
fn criterion_05_equal_subperiod_winning_frequency() {
    // pair (0.5, 1.5) with equal sub-periods, H1 first: some omega in
    // [0.5, 3.5] must beat the uniform reference 0.804 by at least 0.05
    let n = 10;
    let spec1 = ChainSpec::new(n, 0.5, 1.0).unwrap();
    let spec2 = ChainSpec::new(n, 1.5, 1.0).unwrap();
    let config = PeakConfig::for_chain(n);
    let scenario = Scenario::single_excitation();
    let mut best = (0.0_f64, 0.0_f64);
    for i in 0..=300 {
        let omega = 0.5 + i as f64 * 0.01;
        let protocol = DriveProtocol::new(spec1.clone(), spec2.clone(), omega, 0.5).unwrap();
        let series =
            fidelity_series(&Evolver::from_protocol(&protocol).unwrap(), &scenario, &config)
                .unwrap();
        if let Ok(peak) = first_arrival_peak(&series, &config) {
            if peak.f_star > best.0 {
                best = (peak.f_star, omega);
            }
        }
    }
    assert!(
        best.0 >= 0.804 + 0.05,
        "no winning frequency found: best {} at omega {}",
        best.0,
        best.1
    );
    println!(
        "criterion 5 (equal sub-periods): PASS — first-peak {:.4} at omega = {:.2}",
        best.0, best.1
    );
}

#[test]
fn criterion_06_high_frequency_limit() {
    // uniform superposition probe state; driven vs effective at tau = 10
    let n = 10;
    let spec1 = ChainSpec::new(n, 0.5, 1.0).unwrap();
    let spec2 = ChainSpec::new(n, 1.5, 1.0).unwrap();
    let amp = Complex64::new(1.0 / (n as f64).sqrt(), 0.0);
    let state = AmplitudeState::new(
        Complex64::ZERO,
        DVector::from_element(n, amp),
    )
    .unwrap();
    let tau = 10.0;
    let mut diffs = Vec::new();
    for omega in [50.0, 100.0, 200.0] {
        let protocol = DriveProtocol::new(spec1.clone(), spec2.clone(), omega, 0.5).unwrap();
        let driven = DrivenEvolver::new(&protocol)
            .unwrap()
            .propagate(&state, tau)
            .unwrap();
        let effective = effective_propagate(&protocol, &state, tau).unwrap();
        let diff = (0..n)
            .map(|k| (driven.amplitudes()[k] - effective.amplitudes()[k]).norm())
            .fold(0.0_f64, f64::max);
        diffs.push(diff);
    }
    let r1 = diffs[0] / diffs[1];
    let r2 = diffs[1] / diffs[2];
    assert!(
        (1.5..=2.5).contains(&r1) && (1.5..=2.5).contains(&r2),
        "ratios {r1} / {r2} outside [1.5, 2.5] (diffs {diffs:?})"
    );
    println!(
        "criterion 6 (high-frequency limit): PASS — diffs {:.3e}/{:.3e}/{:.3e}, ratios {:.2}, {:.2}",
        diffs[0], diffs[1], diffs[2], r1, r2
    );
}

#[test]
fn criterion_07_magnus_order_check() {
    let h1 = HamiltonianMatrix::from_spec(&ChainSpec::new(6, 0.5, 1.0).unwrap());
    let h2 = HamiltonianMatrix::from_spec(&ChainSpec::new(6, 1.5, 1.0).unwrap());
    let d1 = diagonalize(&h1).unwrap();
    let d2 = diagonalize(&h2).unwrap();
    let eta = 0.3;

    let mut errors = Vec::new();
    let mut period = 0.2;
    for _ in 0..4 {
        let delta_t = (eta - 0.5) * period;
        let t1 = eta * period;
        let t2 = period - t1;
        let terms = magnus_terms(&h1, &h2, period, delta_t).unwrap();
        let one_period = d2.propagator_matrix(t2) * d1.propagator_matrix(t1);
        errors.push(max_abs(&(expm(&terms.sum()) - one_period)));
        period /= 2.0;
    }
    let ratios: Vec<f64> = errors.windows(2).map(|w| w[0] / w[1]).collect();
    for (i, r) in ratios.iter().enumerate() {
        assert!(
            (6.0..=10.0).contains(r),
            "halving {i}: ratio {r} outside [6, 10] (errors {errors:?})"
        );
    }

    // exact zeros of the cross term
    let same = magnus_terms(&h1, &h1, 0.4, 0.1).unwrap();
    assert_eq!(max_abs(same.omega2()), 0.0, "commuting case must vanish");
    for sign in [-1.0, 1.0] {
        let edge = magnus_terms(&h1, &h2, 0.4, sign * 0.2).unwrap();
        assert_eq!(max_abs(edge.omega2()), 0.0, "|dT| = T/2 must vanish");
    }
    println!(
        "criterion 7 (Magnus order): PASS — halving ratios {:.2}, {:.2}, {:.2}",
        ratios[0], ratios[1], ratios[2]
    );
}

#[test]
fn criterion_08_invariant_suites() {
    // (a) norm drift over 1e4 propagations, static and driven-stroboscopic
    let uniform = ChainSpec::uniform(10).unwrap();
    let d = diagonalize(&HamiltonianMatrix::from_spec(&uniform)).unwrap();
    let mut state = AmplitudeState::basis_site(10, 1).unwrap();
    for _ in 0..10_000 {
        state = propagate_static(&d, &state, 0.01).unwrap();
    }
    let static_drift = (state.norm_sq() - 1.0).abs();
    assert!(static_drift <= 1e-12, "static norm drift {static_drift}");

    let protocol = DriveProtocol::new(
        ChainSpec::new(10, 0.51, 1.0).unwrap(),
        ChainSpec::new(10, 1.01, 1.0).unwrap(),
        1.14,
        0.42,
    )
    .unwrap();
    let evolver = DrivenEvolver::new(&protocol).unwrap();
    let period = evolver.period();
    let mut state = AmplitudeState::basis_site(10, 1).unwrap();
    let mut driven_drift = 0.0_f64;
    // mixed whole- and partial-period propagations
    let taus = [0.3 * period, 0.45 * period, 0.7 * period, 1.15 * period];
    for i in 0..10_000 {
        state = evolver.propagate(&state, taus[i % taus.len()]).unwrap();
        driven_drift = driven_drift.max((state.norm_sq() - 1.0).abs());
    }
    assert!(driven_drift <= 1e-12, "driven norm drift {driven_drift}");

    // (b) phi-invariance of the single-qubit fidelity series
    let config = PeakConfig::for_chain(8);
    let evolver8 = Evolver::from_spec(&ChainSpec::uniform(8).unwrap()).unwrap();
    let theta = 2.2;
    let reference = fidelity_series(
        &evolver8,
        &Scenario::Single(BlochAngles::new(theta, 0.0).unwrap()),
        &config,
    )
    .unwrap();
    let mut phi_dev = 0.0_f64;
    for phi in [1.23, 2.9, 4.56] {
        let other = fidelity_series(
            &evolver8,
            &Scenario::Single(BlochAngles::new(theta, phi).unwrap()),
            &config,
        )
        .unwrap();
        for (a, b) in reference.values().iter().zip(other.values()) {
            phi_dev = phi_dev.max((a - b).abs());
        }
    }
    assert!(phi_dev <= 1e-12, "phi dependence {phi_dev}");

    // (c) dense-exponential oracle on random chains with N <= 8
    let mut rng = XorShift(0x5eed_cafe_f00d_1234);
    let mut oracle_dev = 0.0_f64;
    for _ in 0..25 {
        let n = 2 + (rng.next_unit() * 7.0) as usize; // 2..=8
        let values: Vec<f64> = (0..n - 1).map(|_| 0.2 + 1.8 * rng.next_unit()).collect();
        let h = build_hamiltonian(&CouplingVector::new(values).unwrap());
        let dec = diagonalize(&h).unwrap();
        let tau = 10.0 * rng.next_unit();
        let site = 1 + (rng.next_unit() * n as f64) as usize;
        let state = AmplitudeState::basis_site(n, site.min(n)).unwrap();
        let spectral = propagate_static(&dec, &state, tau).unwrap();
        let u = expm(&h.as_matrix().map(|x| Complex64::new(0.0, -x * tau)));
        let dense = &u * state.amplitudes();
        for k in 0..n {
            oracle_dev = oracle_dev.max((spectral.amplitudes()[k] - dense[k]).norm());
        }
    }
    assert!(oracle_dev <= 1e-9, "oracle deviation {oracle_dev}");

    // (d) stroboscopic vs continuous at tau = m T
    let u = evolver.one_period_propagator();
    let start = AmplitudeState::basis_site(10, 1).unwrap();
    let mut strobe_dev = 0.0_f64;
    let mut power = DVector::from_column_slice(start.amplitudes().as_slice());
    for m in 1..=20u32 {
        power = &u * power;
        let continuous = evolver.propagate(&start, m as f64 * period).unwrap();
        for k in 0..10 {
            strobe_dev = strobe_dev.max((continuous.amplitudes()[k] - power[k]).norm());
        }
    }
    assert!(strobe_dev <= 1e-10, "stroboscopic deviation {strobe_dev}");

    // (e) Bell fidelity: amplitude form vs density-matrix overlap
    let bell0 = initial_state_bell(BellSign::Plus, 10);
    let evolver10 = Evolver::from_spec(&uniform).unwrap();
    let mut bell_dev = 0.0_f64;
    for j in 0..=40 {
        let evolved = evolver10.propagate(&bell0, j as f64 * 0.5).unwrap();
        let direct = bell_fidelity(
            evolved.site_amplitude(9).unwrap(),
            evolved.site_amplitude(10).unwrap(),
            BellSign::Plus,
        )
        .unwrap();
        let via_rho = bell_fidelity_via_density(&evolved, BellSign::Plus).unwrap();
        bell_dev = bell_dev.max((direct - via_rho).abs());
    }
    assert!(bell_dev <= 1e-12, "bell route disagreement {bell_dev}");

    println!(
        "criterion 8 (invariant suites): PASS — drifts {static_drift:.1e}/{driven_drift:.1e}, \
         phi {phi_dev:.1e}, oracle {oracle_dev:.1e}, strobe {strobe_dev:.1e}, bell {bell_dev:.1e}"
    );
}

#[test]
fn criterion_09_disorder_robustness() {
    // small-deviation degradation bound fixed by the pre-registered oracle
    // run (observed max drops 0.0012 / 0.0023)
    const SMALL_DEVIATION_DROP: f64 = 0.005;

    let configs = [
        (
            "single",
            DriveProtocol::new(
                ChainSpec::new(12, 0.47, 1.0).unwrap(),
                ChainSpec::new(12, 1.01, 1.0).unwrap(),
                1.84,
                0.64,
            )
            .unwrap(),
            Scenario::single_excitation(),
            DisorderAxis::DeltaAlpha,
        ),
        (
            "bell",
            DriveProtocol::new(
                ChainSpec::new(12, 1.0, 0.80).unwrap(),
                ChainSpec::new(12, 1.0, 1.06).unwrap(),
                1.78,
                0.43,
            )
            .unwrap(),
            Scenario::bell_plus(),
            DisorderAxis::DeltaBeta,
        ),
    ];

    let mut summaries = Vec::new();
    for (label, protocol, scenario, axis) in &configs {
        let config = ParrondoConfig::for_chain(12);
        let scan =
            disorder_scan(protocol, scenario, *axis, (-0.2, 0.2), 0.01, &config).unwrap();
        assert_eq!(scan.points().len(), 41, "{label}: expected 41 simulations");
        assert!(scan.failures().is_empty());

        // delta = 0 must be bit-identical to the undisordered evaluation
        let series = fidelity_series(
            &Evolver::from_protocol(protocol).unwrap(),
            scenario,
            config.peak(),
        )
        .unwrap();
        let direct = first_arrival_peak(&series, &config.driven_peak())
            .unwrap()
            .f_star;
        assert_eq!(
            scan.baseline().to_bits(),
            direct.to_bits(),
            "{label}: disorder path perturbed the clean point"
        );

        let f_at = |delta: f64| {
            scan.points()
                .iter()
                .find(|p| (p.delta - delta).abs() < 1e-12)
                .unwrap()
                .f_peak
        };
        assert!(
            f_at(-0.2) < scan.baseline() && f_at(0.2) < scan.baseline(),
            "{label}: endpoint fidelities must sit strictly below the clean value"
        );
        let small_drop = [-0.02, -0.01, 0.01, 0.02]
            .iter()
            .map(|&d| scan.baseline() - f_at(d))
            .fold(0.0_f64, f64::max);
        assert!(
            small_drop <= SMALL_DEVIATION_DROP,
            "{label}: small deviations degrade by {small_drop}"
        );
        summaries.push(format!(
            "{label} baseline {:.4}, ends {:.4}/{:.4}, small drop {:.4}",
            scan.baseline(),
            f_at(-0.2),
            f_at(0.2),
            small_drop
        ));
    }
    println!(
        "criterion 9 (disorder robustness): PASS — {}",
        summaries.join("; ")
    );
}

#[test]
fn criterion_10_cli_determinism() {
    let tmp = tempfile::tempdir().unwrap();
    let runs: Vec<(&str, Vec<&str>)> = vec![
        (
            "scan",
            vec![
                "scan-static", "--n", "10", "--from", "0.5", "--to", "1.0", "--step", "0.1",
            ],
        ),
        (
            "evolve",
            vec![
                "evolve", "--n", "10", "--driven", "--effective", "--alpha1", "0.51", "--alpha2",
                "1.01", "--omega", "1.14", "--eta", "0.42", "--dump-state",
            ],
        ),
        (
            "sweep",
            vec![
                "sweep", "--n", "8", "--alpha1", "0.55", "--alpha2", "1.01", "--omega-from",
                "1.40", "--omega-to", "1.50", "--omega-step", "0.02", "--eta-from", "0.48",
                "--eta-to", "0.54", "--eta-step", "0.02",
            ],
        ),
        (
            "disorder",
            vec![
                "disorder", "--n", "12", "--alpha1", "0.47", "--alpha2", "1.01", "--omega",
                "1.84", "--eta", "0.64", "--from", "-0.04", "--to", "0.04", "--step", "0.02",
                "--series-pair", "0.02,0.0",
            ],
        ),
    ];
    for (label, args) in &runs {
        let mut outputs: Vec<std::collections::BTreeMap<String, Vec<u8>>> = Vec::new();
        for attempt in 0..2 {
            let dir = tmp.path().join(format!("{label}{attempt}"));
            let status = Command::new(env!("CARGO_BIN_EXE_spinchain"))
                .args(args.iter())
                .arg("--out-dir")
                .arg(&dir)
                .current_dir(tmp.path())
                .output()
                .expect("binary runs");
            assert!(
                status.status.success(),
                "{label}: {}",
                String::from_utf8_lossy(&status.stderr)
            );
            outputs.push(read_dir_bytes(&dir));
        }
        assert_eq!(
            outputs[0].keys().collect::<Vec<_>>(),
            outputs[1].keys().collect::<Vec<_>>(),
            "{label}: different artifact sets"
        );
        for (name, bytes) in &outputs[0] {
            assert_eq!(
                bytes, &outputs[1][name],
                "{label}: artifact {name} differs between identical runs"
            );
        }
    }
    println!("criterion 10 (CLI determinism): PASS — 4 commands, byte-identical reruns");
}

fn read_dir_bytes(dir: &Path) -> std::collections::BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|entry| {
            let entry = entry.unwrap();
            (
                entry.file_name().to_string_lossy().into_owned(),
                std::fs::read(entry.path()).unwrap(),
            )
        })
        .collect()
}
