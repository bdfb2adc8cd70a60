//! Simulation and analysis toolkit for long-distance quantum teleportation
//! over deployed fiber: qubit algebra, photonic noise, the linear-optics
//! protocol, tomography, the classical-bound test and network timing.

pub mod cli;
pub mod config;
pub mod constants;
pub mod error;
pub mod experiment;
pub mod netsim;
pub mod photonics;
pub mod protocol;
pub mod qubit;
pub mod report;
pub mod stats;
pub mod tomography;

pub use config::{ConfigError, ExperimentConfig};
pub use error::{Error, Result};
pub use experiment::{classical_baseline, run_experiment, ClassicalBaseline};
pub use protocol::{InputStateLabel, Mode};
pub use qubit::{BellState, DensityMatrix, Pauli, PureState, Unitary2, C64};
pub use report::RunReport;
