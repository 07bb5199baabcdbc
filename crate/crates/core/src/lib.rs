//! Simulation toolkit for coherently driven atomic-ensemble quantum optics:
//! slow-light spectra, polariton storage, single-photon sources under the
//! dipole blockade, cross-phase modulation of photon pairs, shelving
//! detection and polarization-qubit circuits.

pub mod blockade;
pub mod circuit;
pub mod consts;
pub mod detector;
pub mod diag;
pub mod error;
pub mod medium;
pub mod qmemory;
pub mod polariton;
pub mod scalar;
pub mod spectral;
pub mod units;
pub mod xpm;

pub use error::{Error, Result};
pub use scalar::{real, Real, C};

/// Double-precision aliases for the common entry points.
pub type MediumParams = medium::MediumParams<f64>;
pub type OpticalResponse = medium::OpticalResponse<f64>;
pub type PulseEnvelope = polariton::PulseEnvelope<f64>;
pub type DriveSchedule = polariton::DriveSchedule<f64>;
pub type PolaritonState = polariton::PolaritonState<f64>;
pub type PolarizationQubit = qmemory::PolarizationQubit<f64>;
pub type StoredQubit = qmemory::StoredQubit<f64>;
pub type TrapConfig = blockade::TrapConfig<f64>;
pub type TripodParams = xpm::TripodParams<f64>;
pub type TwoPhotonState = xpm::TwoPhotonState<f64>;
pub type DetectorParams = detector::DetectorParams<f64>;
pub type CircuitState = circuit::CircuitState<f64>;
pub type GateProgram = circuit::GateProgram<f64>;
