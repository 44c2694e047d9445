//! Robustness of optimized protocols against asymmetric boundary-coupling
//! deviations on Bob's side.
//!
//! The deviation models a miswired physical bond, so it applies identically
//! to both driven Hamiltonians, and only one deviation parameter varies at a
//! time (the other is held at zero). The clean point delta = 0 runs through
//! exactly the same code path as an undisordered evaluation and reproduces it
//! bit for bit.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fidelity::{fidelity_series, FidelitySeries, PeakConfig, Scenario};
use crate::format::sig6;
use crate::grid::linspace_inclusive;
use crate::parrondo::{score_evolver, ParrondoConfig};
use crate::propagator::{DriveProtocol, Evolver};

/// Which Bob-side deviation a scan varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DisorderAxis {
    DeltaAlpha,
    DeltaBeta,
}

impl DisorderAxis {
    fn deviations(&self, delta: f64) -> (f64, f64) {
        match self {
            DisorderAxis::DeltaAlpha => (delta, 0.0),
            DisorderAxis::DeltaBeta => (0.0, delta),
        }
    }
}

/// Applies one deviation value to both Hamiltonians of a protocol.
fn disordered_protocol(
    protocol: &DriveProtocol,
    axis: DisorderAxis,
    delta: f64,
) -> Result<DriveProtocol> {
    let (da, db) = axis.deviations(delta);
    DriveProtocol::new(
        protocol.spec1().replacing_deviations(da, db)?,
        protocol.spec2().replacing_deviations(da, db)?,
        protocol.omega(),
        protocol.eta(),
    )
}

/// One scanned deviation value and its first-arrival fidelity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DisorderPoint {
    pub delta: f64,
    pub f_peak: f64,
}

/// Fidelity-vs-deviation scan with the clean baseline.
#[derive(Debug, Clone)]
pub struct DisorderScan {
    points: Vec<DisorderPoint>,
    failures: Vec<(f64, String)>,
    baseline: f64,
}

impl DisorderScan {
    /// Successful points in increasing-delta order.
    pub fn points(&self) -> &[DisorderPoint] {
        &self.points
    }

    /// Per-point peak-detection failures (delta, reason).
    pub fn failures(&self) -> &[(f64, String)] {
        &self.failures
    }

    /// Fidelity at delta = 0.
    pub fn baseline(&self) -> f64 {
        self.baseline
    }

    /// CSV export `delta,f_peak`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("delta,f_peak\n");
        for p in &self.points {
            out.push_str(&format!("{},{}\n", sig6(p.delta), sig6(p.f_peak)));
        }
        out
    }
}

/// Scans one deviation parameter over `[range.0, range.1]` in `step`
/// increments (the grid must contain delta = 0), re-running the driven
/// evolution at every point. Peak-detection failures are recorded per point;
/// a failure at delta = 0 is fatal since the scan is anchored to its baseline.
pub fn disorder_scan(
    protocol: &DriveProtocol,
    scenario: &Scenario,
    axis: DisorderAxis,
    range: (f64, f64),
    step: f64,
    config: &ParrondoConfig,
) -> Result<DisorderScan> {
    let (lo, hi) = range;
    if !(lo.is_finite() && hi.is_finite() && lo <= hi) {
        return Err(Error::InvalidParameter {
            name: "range",
            value: lo,
            requirement: "finite with range.0 <= range.1",
        });
    }
    if !step.is_finite() || step <= 0.0 {
        return Err(Error::InvalidParameter {
            name: "step",
            value: step,
            requirement: "finite and > 0",
        });
    }
    let deltas = linspace_inclusive(lo, hi, step);
    if !deltas.contains(&0.0) {
        return Err(Error::InvalidParameter {
            name: "range",
            value: lo,
            requirement: "must contain delta = 0",
        });
    }
    // endpoint deviations must keep every coupling positive
    disordered_protocol(protocol, axis, *deltas.first().expect("non-empty grid"))?;
    disordered_protocol(protocol, axis, *deltas.last().expect("non-empty grid"))?;

    let driven_config = config.driven_peak();
    let outcomes: Vec<std::result::Result<DisorderPoint, (f64, String)>> = deltas
        .par_iter()
        .map(|&delta| {
            let score = || -> Result<f64> {
                let disordered = disordered_protocol(protocol, axis, delta)?;
                let evolver = Evolver::from_protocol(&disordered)?;
                Ok(score_evolver(&evolver, scenario, &driven_config)?.f_star)
            };
            match score() {
                Ok(f_peak) => Ok(DisorderPoint { delta, f_peak }),
                Err(e) => Err((delta, e.to_string())),
            }
        })
        .collect();
    let mut points = Vec::with_capacity(outcomes.len());
    let mut failures = Vec::new();
    for outcome in outcomes {
        match outcome {
            Ok(p) => points.push(p),
            Err(f) => failures.push(f),
        }
    }
    let baseline = points
        .iter()
        .find(|p| p.delta == 0.0)
        .map(|p| p.f_peak)
        .ok_or_else(|| {
            Error::NoArrival.at_value(0.0) // the anchor point itself failed
        })?;
    Ok(DisorderScan {
        points,
        failures,
        baseline,
    })
}

/// Full fidelity curves for representative deviation pairs (delta_alpha,
/// delta_beta), for side-by-side export. Errors propagate; there is no
/// partial output here.
pub fn disorder_time_series(
    protocol: &DriveProtocol,
    scenario: &Scenario,
    delta_pairs: &[(f64, f64)],
    config: &PeakConfig,
) -> Result<Vec<FidelitySeries>> {
    delta_pairs
        .iter()
        .map(|&(da, db)| {
            let disordered = DriveProtocol::new(
                protocol.spec1().replacing_deviations(da, db)?,
                protocol.spec2().replacing_deviations(da, db)?,
                protocol.omega(),
                protocol.eta(),
            )?;
            fidelity_series(&Evolver::from_protocol(&disordered)?, scenario, config)
        })
        .collect()
}
