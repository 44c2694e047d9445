//! Transfer fidelities, fidelity time series, and first-arrival-peak
//! detection.
//!
//! Two transfer scenarios are supported: a single qubit prepared at site 1
//! and read out at site N, and a two-qubit Bell state prepared on sites
//! (1, 2) and read out on (N-1, N). Fidelity is the overlap of Bob's reduced
//! state with the state Alice prepared.
//!
//! Peak detection scores a sampled curve by its *first arrival excursion*:
//! the earliest contiguous run of samples at or above
//! `threshold_fraction x (window maximum)`. The peak is the highest sample of
//! that run, refined by a parabola through its three neighbors. Ripples below
//! the threshold are ignored; twin humps of one arrival envelope are scored
//! as one event. With `threshold_fraction = 1` the rule degenerates to the
//! window maximum, which is how driven-protocol optima are scored (see the
//! `parrondo` module).

use nalgebra::{DVector, Matrix2, Matrix4, Vector2, Vector4};
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::format::sig6;
use crate::propagator::{AmplitudeState, Evolver};

/// Tolerance for fidelity values marginally outside [0, 1] from roundoff;
/// anything farther out signals a propagation bug and becomes an error.
pub const FIDELITY_TOLERANCE: f64 = 1e-12;

/// Bloch-sphere parametrization of Alice's input qubit.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BlochAngles {
    theta: f64,
    phi: f64,
}

impl BlochAngles {
    pub fn new(theta: f64, phi: f64) -> Result<Self> {
        if !theta.is_finite() || !(0.0..=std::f64::consts::PI).contains(&theta) {
            return Err(Error::InvalidParameter {
                name: "theta",
                value: theta,
                requirement: "in [0, pi]",
            });
        }
        if !phi.is_finite() || !(0.0..2.0 * std::f64::consts::PI).contains(&phi) {
            return Err(Error::InvalidParameter {
                name: "phi",
                value: phi,
                requirement: "in [0, 2 pi)",
            });
        }
        Ok(Self { theta, phi })
    }

    /// The pure-excitation input (theta = pi): state |1> at site 1.
    pub fn excitation() -> Self {
        Self {
            theta: std::f64::consts::PI,
            phi: 0.0,
        }
    }

    pub fn theta(&self) -> f64 {
        self.theta
    }

    pub fn phi(&self) -> f64 {
        self.phi
    }
}

/// Selects the Bell state (|01> +/- |10>) / sqrt(2).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellSign {
    Plus,
    Minus,
}

impl BellSign {
    pub fn sign(&self) -> f64 {
        match self {
            BellSign::Plus => 1.0,
            BellSign::Minus => -1.0,
        }
    }
}

/// What Alice sends: a single qubit or a Bell pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Scenario {
    Single(BlochAngles),
    Bell(BellSign),
}

impl Scenario {
    /// Single-qubit scenario with the pure-excitation input |1>.
    pub fn single_excitation() -> Self {
        Scenario::Single(BlochAngles::excitation())
    }

    pub fn bell_plus() -> Self {
        Scenario::Bell(BellSign::Plus)
    }

    /// Smallest chain this scenario fits on.
    pub fn min_sites(&self) -> usize {
        match self {
            Scenario::Single(_) => 2,
            Scenario::Bell(_) => 4,
        }
    }

    /// Alice's initial state on an N-site chain.
    pub fn initial_state(&self, n: usize) -> AmplitudeState {
        match self {
            Scenario::Single(angles) => initial_state_single(angles, n),
            Scenario::Bell(sign) => initial_state_bell(*sign, n),
        }
    }

    /// Bob's readout sites, 0-based.
    pub(crate) fn readout_sites(&self, n: usize) -> Vec<usize> {
        match self {
            Scenario::Single(_) => vec![n - 1],
            Scenario::Bell(_) => vec![n - 2, n - 1],
        }
    }

    /// Fidelity from the vacuum amplitude and the readout-site amplitudes
    /// (in `readout_sites` order).
    fn fidelity_from_readout(&self, a0: Complex64, amps: &[Complex64]) -> f64 {
        match self {
            Scenario::Single(angles) => {
                let ct = (angles.theta / 2.0).cos();
                let st = (angles.theta / 2.0).sin();
                let a_n = amps[0];
                let phase = Complex64::cis(angles.phi);
                let cross = (ct * st) * (phase * a0 * a_n.conj());
                ct * ct * (1.0 - a_n.norm_sqr()) + st * st * a_n.norm_sqr() + 2.0 * cross.re
            }
            Scenario::Bell(sign) => {
                let (a_nm1, a_n) = (amps[0], amps[1]);
                0.5 * (a_nm1 + sign.sign() * a_n).norm_sqr()
            }
        }
    }
}

/// Single-qubit transfer fidelity from the site-1 -> site-N transition
/// amplitude, independent of the azimuthal phase:
/// `F = cos^2(theta/2) + (sin^2 theta / 2) Re f - cos theta sin^2(theta/2) |f|^2`.
pub fn single_qubit_fidelity(f_n1: Complex64, theta: f64) -> Result<f64> {
    let mag = f_n1.norm();
    if !mag.is_finite() || mag > 1.0 + FIDELITY_TOLERANCE {
        return Err(Error::AmplitudeOverflow { magnitude: mag });
    }
    let half = theta / 2.0;
    let f = half.cos().powi(2) + theta.sin().powi(2) / 2.0 * f_n1.re
        - theta.cos() * half.sin().powi(2) * f_n1.norm_sqr();
    clamp_fidelity(f)
}

/// Bell transfer fidelity from the amplitudes at Bob's two sites:
/// `F = |a_{N-1} +/- a_N|^2 / 2`.
pub fn bell_fidelity(a_nm1: Complex64, a_n: Complex64, sign: BellSign) -> Result<f64> {
    let occupancy = a_nm1.norm_sqr() + a_n.norm_sqr();
    if !occupancy.is_finite() || occupancy > 1.0 + FIDELITY_TOLERANCE {
        return Err(Error::AmplitudeOverflow {
            magnitude: occupancy,
        });
    }
    clamp_fidelity(0.5 * (a_nm1 + sign.sign() * a_n).norm_sqr())
}

fn clamp_fidelity(f: f64) -> Result<f64> {
    if !(-FIDELITY_TOLERANCE..=1.0 + FIDELITY_TOLERANCE).contains(&f) {
        return Err(Error::AmplitudeOverflow { magnitude: f });
    }
    Ok(f.clamp(0.0, 1.0))
}

/// `a0 = cos(theta/2)`, `a_1 = e^{i phi} sin(theta/2)`, rest zero.
pub fn initial_state_single(angles: &BlochAngles, n: usize) -> AmplitudeState {
    assert!(n >= 1, "single-qubit scenario needs at least one site");
    let half = angles.theta / 2.0;
    let mut a = DVector::zeros(n);
    a[0] = Complex64::cis(angles.phi) * half.sin();
    AmplitudeState::new(Complex64::new(half.cos(), 0.0), a)
        .expect("Bloch parametrization is normalized")
}

/// `a_1 = 1/sqrt(2)`, `a_2 = sign/sqrt(2)`, vacuum empty.
pub fn initial_state_bell(sign: BellSign, n: usize) -> AmplitudeState {
    assert!(n >= 2, "Bell scenario needs at least two sites");
    let amp = std::f64::consts::FRAC_1_SQRT_2;
    let mut a = DVector::zeros(n);
    a[0] = Complex64::new(amp, 0.0);
    a[1] = Complex64::new(sign.sign() * amp, 0.0);
    AmplitudeState::new(Complex64::ZERO, a).expect("Bell state is normalized")
}

/// Reduced density matrix of one site (1-based), basis {|0>, |1>}.
pub fn reduced_density_site(state: &AmplitudeState, site: usize) -> Result<Matrix2<Complex64>> {
    let a_k = state.site_amplitude(site)?;
    let rho00 = Complex64::new(state.norm_sq() - a_k.norm_sqr(), 0.0);
    let coherence = state.vacuum_amplitude() * a_k.conj();
    Ok(Matrix2::new(
        rho00,
        coherence,
        coherence.conj(),
        Complex64::new(a_k.norm_sqr(), 0.0),
    ))
}

/// Reduced density matrix of an ordered site pair (1-based, distinct), basis
/// {|00>, |01>, |10>, |11>} where the first label refers to `site_a`. The
/// |11> row and column vanish identically in the single-excitation sector.
pub fn reduced_density_pair(
    state: &AmplitudeState,
    site_a: usize,
    site_b: usize,
) -> Result<Matrix4<Complex64>> {
    if site_a == site_b {
        return Err(Error::SiteOutOfRange {
            site: site_b,
            n: state.site_count(),
        });
    }
    let a_j = state.site_amplitude(site_a)?;
    let a_k = state.site_amplitude(site_b)?;
    let a0 = state.vacuum_amplitude();
    let zero = Complex64::ZERO;
    let rho00 = Complex64::new(state.norm_sq() - a_j.norm_sqr() - a_k.norm_sqr(), 0.0);
    Ok(Matrix4::new(
        rho00,
        a0 * a_k.conj(),
        a0 * a_j.conj(),
        zero,
        (a0 * a_k.conj()).conj(),
        Complex64::new(a_k.norm_sqr(), 0.0),
        a_k * a_j.conj(),
        zero,
        (a0 * a_j.conj()).conj(),
        (a_k * a_j.conj()).conj(),
        Complex64::new(a_j.norm_sqr(), 0.0),
        zero,
        zero,
        zero,
        zero,
        zero,
    ))
}

/// Single-qubit fidelity through the reduced-density-matrix route
/// `F = <psi_N| rho_N |psi_N>`; cross-validates the closed form.
pub fn single_fidelity_via_density(state: &AmplitudeState, angles: &BlochAngles) -> Result<f64> {
    let n = state.site_count();
    let rho = reduced_density_site(state, n)?;
    let half = angles.theta / 2.0;
    let target = Vector2::new(
        Complex64::new(half.cos(), 0.0),
        Complex64::cis(angles.phi) * half.sin(),
    );
    clamp_fidelity((target.adjoint() * rho * target)[(0, 0)].re)
}

/// Bell fidelity through the two-site density matrix
/// `F = <psi±| rho_{N-1,N} |psi±>`; cross-validates the amplitude form.
pub fn bell_fidelity_via_density(state: &AmplitudeState, sign: BellSign) -> Result<f64> {
    let n = state.site_count();
    if n < 2 {
        return Err(Error::SiteOutOfRange { site: 2, n });
    }
    let rho = reduced_density_pair(state, n - 1, n)?;
    let amp = Complex64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0);
    let target = Vector4::new(Complex64::ZERO, amp, sign.sign() * amp, Complex64::ZERO);
    clamp_fidelity((target.adjoint() * rho * target)[(0, 0)].re)
}

/// Sampling window and peak-detection threshold for fidelity curves.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PeakConfig {
    tau_max: f64,
    dtau: f64,
    threshold_fraction: f64,
}

impl PeakConfig {
    pub const DEFAULT_DTAU: f64 = 0.01;
    pub const DEFAULT_THRESHOLD_FRACTION: f64 = 0.5;

    pub fn new(tau_max: f64, dtau: f64, threshold_fraction: f64) -> Result<Self> {
        if !tau_max.is_finite() || tau_max <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "tau_max",
                value: tau_max,
                requirement: "finite and > 0",
            });
        }
        if !dtau.is_finite() || dtau <= 0.0 {
            return Err(Error::InvalidParameter {
                name: "dtau",
                value: dtau,
                requirement: "finite and > 0",
            });
        }
        if tau_max / dtau < 10.0 {
            return Err(Error::InvalidParameter {
                name: "tau_max/dtau",
                value: tau_max / dtau,
                requirement: ">= 10 samples per window",
            });
        }
        if !threshold_fraction.is_finite() || !(threshold_fraction > 0.0 && threshold_fraction <= 1.0)
        {
            return Err(Error::InvalidParameter {
                name: "threshold_fraction",
                value: threshold_fraction,
                requirement: "in (0, 1]",
            });
        }
        Ok(Self {
            tau_max,
            dtau,
            threshold_fraction,
        })
    }

    /// Defaults for an N-site chain: the ballistic arrival sits near
    /// `tau = N/2` (group velocity 2), so a window of `2N` safely contains
    /// the first peak.
    pub fn for_chain(n: usize) -> Self {
        Self {
            tau_max: 2.0 * n as f64,
            dtau: Self::DEFAULT_DTAU,
            threshold_fraction: Self::DEFAULT_THRESHOLD_FRACTION,
        }
    }

    pub fn with_threshold_fraction(self, threshold_fraction: f64) -> Result<Self> {
        Self::new(self.tau_max, self.dtau, threshold_fraction)
    }

    pub fn with_dtau(self, dtau: f64) -> Result<Self> {
        Self::new(self.tau_max, dtau, self.threshold_fraction)
    }

    pub fn with_tau_max(self, tau_max: f64) -> Result<Self> {
        Self::new(tau_max, self.dtau, self.threshold_fraction)
    }

    pub fn tau_max(&self) -> f64 {
        self.tau_max
    }

    pub fn dtau(&self) -> f64 {
        self.dtau
    }

    pub fn threshold_fraction(&self) -> f64 {
        self.threshold_fraction
    }

    /// Number of samples on the grid `tau_j = j dtau`, j = 0..count.
    pub fn sample_count(&self) -> usize {
        (self.tau_max / self.dtau + 1e-9).floor() as usize + 1
    }
}

/// A sampled fidelity-vs-time curve.
#[derive(Debug, Clone, PartialEq)]
pub struct FidelitySeries {
    taus: Vec<f64>,
    values: Vec<f64>,
}

impl FidelitySeries {
    /// Validates and adopts an explicit curve: equal lengths, times strictly
    /// increasing from 0, fidelities in [0, 1] up to roundoff (clamped).
    pub fn new(taus: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if taus.len() != values.len() {
            return Err(Error::DimensionMismatch {
                expected: taus.len(),
                got: values.len(),
            });
        }
        if taus.is_empty() || taus[0] != 0.0 {
            return Err(Error::Parse("series must start at tau = 0".into()));
        }
        for w in taus.windows(2) {
            if w[1].partial_cmp(&w[0]) != Some(std::cmp::Ordering::Greater) {
                return Err(Error::Parse("series times must be strictly increasing".into()));
            }
        }
        let values = values
            .into_iter()
            .map(clamp_fidelity)
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { taus, values })
    }

    pub fn taus(&self) -> &[f64] {
        &self.taus
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Two-column CSV `tau,fidelity` with a header row.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("tau,fidelity\n");
        for (t, v) in self.taus.iter().zip(&self.values) {
            out.push_str(&format!("{},{}\n", sig6(*t), sig6(*v)));
        }
        out
    }

    pub fn from_csv(csv: &str) -> Result<Self> {
        let mut taus = Vec::new();
        let mut values = Vec::new();
        for (i, line) in csv.lines().enumerate() {
            if i == 0 {
                if line.trim() != "tau,fidelity" {
                    return Err(Error::Parse(format!("unexpected header: {line}")));
                }
                continue;
            }
            if line.trim().is_empty() {
                continue;
            }
            let (t, v) = line
                .split_once(',')
                .ok_or_else(|| Error::Parse(format!("line {}: expected two columns", i + 1)))?;
            let parse = |s: &str, what| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad {what}: {s}", i + 1)))
            };
            taus.push(parse(t, "tau")?);
            values.push(parse(v, "fidelity")?);
        }
        Self::new(taus, values)
    }
}

/// Detected first-arrival maximum of a fidelity curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub tau_star: f64,
    pub f_star: f64,
}

/// Samples the transfer fidelity on `tau_j = j dtau` under the given evolver
/// and scenario. The initial state is Alice's prepared state; fidelities are
/// read from Bob's sites.
pub fn fidelity_series(
    evolver: &Evolver,
    scenario: &Scenario,
    config: &PeakConfig,
) -> Result<FidelitySeries> {
    let n = evolver.dim();
    if n < scenario.min_sites() {
        return Err(Error::InvalidParameter {
            name: "n",
            value: n as f64,
            requirement: "chain too short for scenario readout",
        });
    }
    let state = scenario.initial_state(n);
    let sites = scenario.readout_sites(n);
    let count = config.sample_count();
    let samples = evolver.sample_site_amplitudes(&state, &sites, count, config.dtau())?;
    let a0 = state.vacuum_amplitude();
    let mut taus = Vec::with_capacity(count);
    let mut values = Vec::with_capacity(count);
    for (j, window) in samples.chunks_exact(sites.len()).enumerate() {
        taus.push(j as f64 * config.dtau());
        let f = scenario.fidelity_from_readout(a0, window);
        values.push(clamp_fidelity(f)?);
    }
    Ok(FidelitySeries { taus, values })
}

/// Finds the first-arrival peak of a series under the excursion rule
/// described in the module docs. Fails with [`Error::NoArrival`] when the
/// first excursion has its maximum pinned to the window edge (curve still
/// rising at the horizon, or maximal at tau = 0).
pub fn first_arrival_peak(series: &FidelitySeries, config: &PeakConfig) -> Result<Peak> {
    let v = series.values();
    let n = v.len();
    if n < 3 {
        return Err(Error::NoArrival);
    }
    let gmax = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if gmax.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
        return Err(Error::NoArrival);
    }
    let threshold = config.threshold_fraction() * gmax;
    let start = v
        .iter()
        .position(|&x| x >= threshold)
        .expect("the maximum itself reaches any threshold fraction <= 1");
    let mut best = start;
    let mut end = start;
    while end < n && v[end] >= threshold {
        if v[end] > v[best] {
            best = end;
        }
        end += 1;
    }
    if best == 0 || best == n - 1 {
        return Err(Error::NoArrival);
    }
    let (tau_star, f_star) = parabolic_refine(
        (series.taus[best - 1], v[best - 1]),
        (series.taus[best], v[best]),
        (series.taus[best + 1], v[best + 1]),
    );
    Ok(Peak {
        tau_star: tau_star.min(*series.taus.last().expect("non-empty")),
        f_star: f_star.clamp(0.0, 1.0),
    })
}

/// Vertex of the parabola through three points around a sampled maximum;
/// falls back to the center sample when the points are not strictly concave.
fn parabolic_refine(p1: (f64, f64), p2: (f64, f64), p3: (f64, f64)) -> (f64, f64) {
    let (x1, y1) = p1;
    let (x2, y2) = p2;
    let (x3, y3) = p3;
    let d21 = (y2 - y1) / (x2 - x1);
    let d32 = (y3 - y2) / (x3 - x2);
    let curvature = (d32 - d21) / (x3 - x1);
    if curvature.partial_cmp(&0.0) != Some(std::cmp::Ordering::Less) {
        return (x2, y2);
    }
    let x_star = 0.5 * (x1 + x2) - d21 / (2.0 * curvature);
    let y_star = y1 + d21 * (x_star - x1) + curvature * (x_star - x1) * (x_star - x2);
    (x_star, y_star)
}
