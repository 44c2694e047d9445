//! Simulation and protocol-optimization toolkit for quantum state transfer
//! through XX spin chains with periodically alternated boundary couplings.
//!
//! The chain is mirror symmetric: boundary bonds carry a coupling `alpha`,
//! the next bonds inward carry `beta`, and all bulk bonds are fixed at 1.
//! Dynamics conserve excitation number, so everything here works in the
//! vacuum + single-excitation sector: an N-site chain evolves an N-component
//! complex amplitude vector plus an inert vacuum amplitude.
//!
//! Modules:
//! - [`chain`]: coupling profiles and single-excitation Hamiltonians.
//! - [`propagator`]: exact spectral time evolution, piecewise-constant
//!   two-Hamiltonian driving, effective (high-frequency) dynamics, and the
//!   leading Magnus terms of the one-period propagator.
//! - [`fidelity`]: single-qubit and Bell transfer fidelities, fidelity time
//!   series, first-arrival-peak detection.
//! - [`parrondo`]: winning/losing classification against the uniform chain,
//!   (omega, eta) sweeps, order dependence, and reference-table reproduction.
//! - [`disorder`]: robustness scans over Bob-side coupling deviations.

pub mod chain;
pub mod disorder;
pub mod error;
pub mod fidelity;
pub mod format;
pub mod grid;
pub mod parrondo;
pub mod propagator;

pub use chain::{build_couplings, build_hamiltonian, ChainSpec, CouplingVector, HamiltonianMatrix};
pub use disorder::{disorder_scan, disorder_time_series, DisorderAxis, DisorderPoint, DisorderScan};
pub use error::{Error, Result};
pub use fidelity::{
    bell_fidelity, fidelity_series, first_arrival_peak, initial_state_bell, initial_state_single,
    single_qubit_fidelity, BellSign, BlochAngles, FidelitySeries, Peak, PeakConfig, Scenario,
};
pub use parrondo::{
    evaluate_protocol, order_dependence, reproduce_table, static_scan, sweep, CouplingAxis,
    ParrondoConfig, ParrondoOutcome, StaticScanPoint, SweepGrid, SweepRecord, SweepResult, TableId,
    TableOptions, TableRow,
};
pub use propagator::{
    diagonalize, driven_propagate, effective_couplings, effective_propagate, magnus_terms,
    propagate_static, transition_amplitude, AmplitudeState, DriveProtocol, DrivenEvolver, Evolver,
    MagnusTerms, SpectralDecomposition,
};
