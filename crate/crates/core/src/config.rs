//! Experiment configuration: a TOML document whose keys mirror
//! [`ExperimentConfig`] exactly. Unknown keys are rejected.

use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants as k;
use crate::netsim::{ClockModel, NetworkTopology, RateInputs, BSM_SUCCESS_FACTOR};
use crate::photonics::{ChannelParams, NoiseParams, SourceParams};
use crate::protocol::Mode;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid config field `{field}`: {message}")]
    Invalid { field: String, message: String },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sources {
    pub mu_alice: f64,
    pub mu_charlie: f64,
    pub purity_alice: f64,
    pub purity_charlie: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Noise {
    pub visibility: f64,
    pub unitary_fidelity: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Topology {
    pub alice_charlie_km: f64,
    pub alice_charlie_loss_db: f64,
    pub charlie_bob_km: f64,
    pub charlie_bob_loss_db: f64,
    pub charlie_buffer_km: f64,
    pub bob_buffer_km: f64,
    pub classical_latency_ns: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Clock {
    pub repetition_period_ns: f64,
    pub jitter_rms_ps: f64,
    pub coherence_time_ps: f64,
}

/// Efficiencies that were not measured; every value here is an assumption.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Efficiency {
    pub detector: f64,
    pub herald: f64,
    pub encoding: f64,
    pub analysis: f64,
    pub photon_transmission: f64,
    pub coil_loss_db_per_km: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSettings {
    /// Successful (counted) trials per input state.
    pub trials_per_state: u64,
    pub shots_per_basis: u64,
    pub seed: u64,
    pub mode: Mode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub sources: Sources,
    pub noise: Noise,
    pub topology: Topology,
    pub clock: Clock,
    pub efficiency: Efficiency,
    pub run: RunSettings,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            sources: Sources {
                mu_alice: k::MU_ALICE,
                mu_charlie: k::MU_CHARLIE,
                purity_alice: k::PURITY_ALICE,
                purity_charlie: k::PURITY_CHARLIE,
            },
            noise: Noise {
                visibility: k::VISIBILITY_BOUND,
                unitary_fidelity: k::UNITARY_FIDELITY_BOUND,
            },
            topology: Topology {
                alice_charlie_km: k::ALICE_CHARLIE_KM,
                alice_charlie_loss_db: k::ALICE_CHARLIE_LOSS_DB,
                charlie_bob_km: k::CHARLIE_BOB_KM,
                charlie_bob_loss_db: k::CHARLIE_BOB_LOSS_DB,
                charlie_buffer_km: k::BUFFER_KM,
                bob_buffer_km: k::BUFFER_KM,
                classical_latency_ns: 0.0,
            },
            clock: Clock {
                repetition_period_ns: k::REPETITION_PERIOD_NS,
                jitter_rms_ps: k::JITTER_RMS_PS,
                coherence_time_ps: k::COHERENCE_TIME_PS,
            },
            efficiency: Efficiency {
                detector: 0.5,
                herald: 0.035,
                encoding: 0.5,
                analysis: 0.5,
                photon_transmission: 0.07,
                coil_loss_db_per_km: 0.2,
            },
            run: RunSettings {
                trials_per_state: k::TRIALS_WITH_FF,
                shots_per_basis: 5000,
                seed: 42,
                mode: Mode::WithFeedForward,
            },
        }
    }
}

fn invalid(field: &str, message: impl Into<String>) -> ConfigError {
    ConfigError::Invalid {
        field: field.to_string(),
        message: message.into(),
    }
}

fn in_range(field: &str, value: f64, lo: f64, hi: f64) -> Result<(), ConfigError> {
    if value.is_finite() && value >= lo && value <= hi {
        Ok(())
    } else {
        Err(invalid(field, format!("{value} not in [{lo}, {hi}]")))
    }
}

fn non_negative(field: &str, value: f64) -> Result<(), ConfigError> {
    in_range(field, value, 0.0, f64::MAX)
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(s).map_err(|e| ConfigError::Parse(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let s = &self.sources;
        in_range("sources.mu_alice", s.mu_alice, 0.0, 0.999_999)?;
        in_range("sources.mu_charlie", s.mu_charlie, 0.0, 0.999_999)?;
        in_range("sources.purity_alice", s.purity_alice, f64::MIN_POSITIVE, 1.0)?;
        in_range("sources.purity_charlie", s.purity_charlie, f64::MIN_POSITIVE, 1.0)?;

        in_range("noise.visibility", self.noise.visibility, 0.0, 1.0)?;
        in_range("noise.unitary_fidelity", self.noise.unitary_fidelity, 0.0, 1.0)?;

        let t = &self.topology;
        non_negative("topology.alice_charlie_km", t.alice_charlie_km)?;
        non_negative("topology.alice_charlie_loss_db", t.alice_charlie_loss_db)?;
        non_negative("topology.charlie_bob_km", t.charlie_bob_km)?;
        non_negative("topology.charlie_bob_loss_db", t.charlie_bob_loss_db)?;
        non_negative("topology.charlie_buffer_km", t.charlie_buffer_km)?;
        non_negative("topology.bob_buffer_km", t.bob_buffer_km)?;
        non_negative("topology.classical_latency_ns", t.classical_latency_ns)?;

        let c = &self.clock;
        if !(c.repetition_period_ns > 0.0 && c.repetition_period_ns.is_finite()) {
            return Err(invalid("clock.repetition_period_ns", "must be positive"));
        }
        non_negative("clock.jitter_rms_ps", c.jitter_rms_ps)?;
        if !(c.coherence_time_ps > 0.0 && c.coherence_time_ps.is_finite()) {
            return Err(invalid("clock.coherence_time_ps", "must be positive"));
        }

        let e = &self.efficiency;
        in_range("efficiency.detector", e.detector, 0.0, 1.0)?;
        in_range("efficiency.herald", e.herald, 0.0, 1.0)?;
        in_range("efficiency.encoding", e.encoding, 0.0, 1.0)?;
        in_range("efficiency.analysis", e.analysis, 0.0, 1.0)?;
        in_range("efficiency.photon_transmission", e.photon_transmission, 0.0, 1.0)?;
        non_negative("efficiency.coil_loss_db_per_km", e.coil_loss_db_per_km)?;

        if self.run.trials_per_state == 0 {
            return Err(invalid("run.trials_per_state", "must be at least 1"));
        }
        if self.run.shots_per_basis == 0 {
            return Err(invalid("run.shots_per_basis", "must be at least 1"));
        }
        Ok(())
    }

    pub fn noise_params(&self) -> NoiseParams {
        NoiseParams {
            visibility: self.noise.visibility,
            unitary_fidelity: self.noise.unitary_fidelity,
        }
    }

    pub fn alice_source(&self) -> SourceParams {
        SourceParams {
            mean_pairs_per_pulse: self.sources.mu_alice,
            heralding_efficiency: self.efficiency.herald,
            purity: self.sources.purity_alice,
        }
    }

    pub fn charlie_source(&self) -> SourceParams {
        SourceParams {
            mean_pairs_per_pulse: self.sources.mu_charlie,
            heralding_efficiency: 1.0,
            purity: self.sources.purity_charlie,
        }
    }

    pub fn topology(&self) -> NetworkTopology {
        let t = &self.topology;
        NetworkTopology {
            alice_charlie: ChannelParams::new(t.alice_charlie_km, t.alice_charlie_loss_db),
            charlie_bob: ChannelParams::new(t.charlie_bob_km, t.charlie_bob_loss_db),
            charlie_buffer_km: t.charlie_buffer_km,
            bob_buffer_km: t.bob_buffer_km,
            classical_latency_ns: t.classical_latency_ns,
        }
    }

    pub fn clock_model(&self) -> ClockModel {
        ClockModel {
            repetition_period_ns: self.clock.repetition_period_ns,
            jitter_rms_ps: self.clock.jitter_rms_ps,
            coherence_time_ps: self.clock.coherence_time_ps,
        }
    }

    pub fn rate_inputs(&self) -> RateInputs {
        let e = &self.efficiency;
        RateInputs {
            mu_alice: self.sources.mu_alice,
            mu_charlie: self.sources.mu_charlie,
            herald_efficiency: e.herald,
            encoding_efficiency: e.encoding,
            alice_charlie_loss_db: self.topology.alice_charlie_loss_db,
            charlie_bob_loss_db: self.topology.charlie_bob_loss_db,
            coil_loss_db_per_km: e.coil_loss_db_per_km,
            charlie_buffer_km: self.topology.charlie_buffer_km,
            bob_buffer_km: self.topology.bob_buffer_km,
            photon_transmission: e.photon_transmission,
            detector_efficiency: e.detector,
            bsm_success_factor: BSM_SUCCESS_FACTOR,
            analysis_efficiency: e.analysis,
        }
    }
}
