//! Command implementations behind the `qtele` binary. Each returns data plus a
//! rendered text form so the binary stays a thin argument parser.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{ConfigError, ExperimentConfig};
use crate::error::Error;
use crate::experiment::{classical_baseline, run_experiment, ClassicalBaseline};
use crate::netsim::{coincidence_rate_budget, feed_forward_feasible, FeedForwardReport, RateBudget};
use crate::protocol::InputStateLabel;
use crate::qubit::DensityMatrix;
use crate::report::{
    chi_to_repr, density_to_repr, render_rate_budget, render_timeline, repr_to_matrix, MatrixRepr, RunReport,
};
use crate::stats::{hoeffding_test, HypothesisResult};
use crate::tomography::{
    average_fidelity_from_process, process_fidelity, reconstruct_process, reconstruct_state, ChiMatrix, CountTable,
};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Sim(#[from] Error),
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("bad JSON input: {0}")]
    Json(#[from] serde_json::Error),
    #[error("feed-forward infeasible: slack {slack_ns:.1} ns")]
    InfeasibleTiming { slack_ns: f64 },
}

impl CliError {
    /// 2 for configuration problems, 3 for a strict timing failure, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::InfeasibleTiming { .. } => 3,
            _ => 1,
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;

pub fn read_text(path: &Path) -> CliResult<String> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_text(path: &Path, text: &str) -> CliResult<()> {
    std::fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Loads `path` or falls back to the default configuration, then applies a
/// seed override.
pub fn load_config(path: Option<&Path>, seed: Option<u64>) -> CliResult<ExperimentConfig> {
    let mut cfg = match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    };
    if let Some(s) = seed {
        cfg.run.seed = s;
    }
    Ok(cfg)
}

fn check_timing(timing: &FeedForwardReport, strict: bool) -> CliResult<()> {
    if strict && !timing.feasible {
        return Err(CliError::InfeasibleTiming {
            slack_ns: timing.slack_ns,
        });
    }
    Ok(())
}

pub fn cmd_run(cfg: &ExperimentConfig, workers: usize, strict_timing: bool) -> CliResult<RunReport> {
    cfg.validate()?;
    check_timing(&feed_forward_feasible(&cfg.topology())?, strict_timing)?;
    Ok(run_experiment(cfg, workers)?)
}

pub fn cmd_hoeffding(mean_fidelity: f64, trials_per_state: u64) -> CliResult<(HypothesisResult, String)> {
    let r = hoeffding_test(mean_fidelity, trials_per_state)?;
    let text = format!(
        "F = {:.4}, N = {} per state: p <= {:.4}e{} (ln p = {:.3})\n",
        r.observed_mean_fidelity, r.trials_per_state, r.p_mantissa, r.p_exponent10, r.p_ln
    );
    Ok((r, text))
}

pub fn cmd_rate_budget(cfg: &ExperimentConfig) -> CliResult<(RateBudget, String)> {
    cfg.validate()?;
    let b = coincidence_rate_budget(&cfg.rate_inputs(), cfg.clock_model().repetition_rate_hz())?;
    let text = render_rate_budget(&b);
    Ok((b, text))
}

pub fn cmd_timeline(cfg: &ExperimentConfig, strict_timing: bool) -> CliResult<(FeedForwardReport, String)> {
    cfg.validate()?;
    let r = feed_forward_feasible(&cfg.topology())?;
    let text = render_timeline(&r);
    check_timing(&r, strict_timing)?;
    Ok((r, text))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateTomographyOutput {
    pub counts: CountTable,
    pub density_matrix: MatrixRepr,
    pub bloch: [f64; 3],
    pub purity: f64,
}

/// Reconstructs a state from a JSON count table `{"z":{"plus":..,"minus":..},..}`.
pub fn cmd_tomo_state(counts_json: &str) -> CliResult<(StateTomographyOutput, String)> {
    let counts: CountTable = serde_json::from_str(counts_json)?;
    let rho = reconstruct_state(&counts)?;
    let b = rho.bloch()?;
    let out = StateTomographyOutput {
        counts,
        density_matrix: density_to_repr(&rho),
        bloch: b,
        purity: rho.purity(),
    };
    let m = rho.matrix();
    let text = format!(
        "rho = [[{:.4}{:+.4}i, {:.4}{:+.4}i],\n       [{:.4}{:+.4}i, {:.4}{:+.4}i]]\nbloch = ({:.4}, {:.4}, {:.4})  purity = {:.4}\n",
        m[(0, 0)].re,
        m[(0, 0)].im,
        m[(0, 1)].re,
        m[(0, 1)].im,
        m[(1, 0)].re,
        m[(1, 0)].im,
        m[(1, 1)].re,
        m[(1, 1)].im,
        b[0],
        b[1],
        b[2],
        out.purity
    );
    Ok((out, text))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProcessTomographyOutput {
    pub chi: MatrixRepr,
    pub process_fidelity: f64,
    pub average_fidelity: f64,
}

/// Reconstructs χ from `{"t0": ρ, "t1": ρ, "D": ρ, "R": ρ}` with each ρ a
/// nested `[re, im]` matrix.
pub fn cmd_tomo_process(states_json: &str) -> CliResult<(ProcessTomographyOutput, String)> {
    let raw: BTreeMap<String, MatrixRepr> = serde_json::from_str(states_json)?;
    let mut pairs = Vec::with_capacity(4);
    for label in InputStateLabel::ALL {
        let repr = raw.get(label.name()).ok_or(Error::MissingInput(label.name()))?;
        let m = repr_to_matrix(repr)
            .ok_or_else(|| Error::InvalidDensityMatrix(format!("{}: not a square matrix", label.name())))?;
        pairs.push((label, DensityMatrix::new(m)?));
    }
    let chi = reconstruct_process(&pairs)?;
    let fp = process_fidelity(&chi, &ChiMatrix::ideal_teleportation());
    let out = ProcessTomographyOutput {
        chi: chi_to_repr(&chi),
        process_fidelity: fp,
        average_fidelity: average_fidelity_from_process(fp)?,
    };
    let text = format!(
        "{chi}\nprocess fidelity = {:.4}\naverage fidelity = {:.4}\n",
        out.process_fidelity, out.average_fidelity
    );
    Ok((out, text))
}

pub fn cmd_classical_baseline(samples: u64, seed: u64, workers: usize) -> CliResult<(ClassicalBaseline, String)> {
    let r = classical_baseline(samples, seed, workers)?;
    let text = format!(
        "measure-and-prepare over {} Haar states: F = {:.4} ± {:.4} (bound 2/3)\n",
        r.samples, r.mean_fidelity, r.std_err
    );
    Ok((r, text))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        let cfg_err = CliError::Config(ConfigError::Parse("x".into()));
        assert_eq!(cfg_err.exit_code(), 2);
        assert_eq!(CliError::InfeasibleTiming { slack_ns: -1.0 }.exit_code(), 3);
        assert_eq!(CliError::Sim(Error::Singular).exit_code(), 1);
    }

    #[test]
    fn strict_timing_rejects_short_buffers() {
        let mut cfg = ExperimentConfig::default();
        cfg.topology.bob_buffer_km = 10.0;
        cfg.topology.charlie_buffer_km = 10.0;
        assert!(cmd_timeline(&cfg, false).is_ok());
        let err = cmd_timeline(&cfg, true).unwrap_err();
        assert_eq!(err.exit_code(), 3);
    }

    #[test]
    fn tomo_state_from_json() {
        let json = r#"{"z":{"plus":100,"minus":0},"x":{"plus":50,"minus":50},"y":{"plus":50,"minus":50}}"#;
        let (out, text) = cmd_tomo_state(json).unwrap();
        assert!((out.density_matrix[0][0][0] - 1.0).abs() < 1e-9);
        assert!(text.contains("purity"));
        assert!(cmd_tomo_state("{}").is_err());
    }
}
