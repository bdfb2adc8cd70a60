//! Stochastic physical-layer models: pair sources, fiber loss, detectors,
//! and the imperfections that degrade the teleported state.

use rand::Rng;
use rand_distr::{Distribution, Geometric};
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::qubit::{DensityMatrix, Unitary2};

/// Photon-pair source settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SourceParams {
    /// Mean number of pairs per pump pulse.
    pub mean_pairs_per_pulse: f64,
    pub heralding_efficiency: f64,
    pub purity: f64,
}

impl SourceParams {
    pub fn validate(&self) -> Result<()> {
        let mu = self.mean_pairs_per_pulse;
        if !(0.0..1.0).contains(&mu) {
            return Err(Error::OutOfRange {
                name: "mean_pairs_per_pulse",
                value: mu,
                allowed: "[0, 1)",
            });
        }
        check_probability("heralding_efficiency", self.heralding_efficiency)?;
        if !(self.purity > 0.0 && self.purity <= 1.0) {
            return Err(Error::OutOfRange {
                name: "purity",
                value: self.purity,
                allowed: "(0, 1]",
            });
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChannelParams {
    pub length_km: f64,
    pub loss_db: f64,
    pub extra_delay_ns: f64,
}

impl ChannelParams {
    pub fn new(length_km: f64, loss_db: f64) -> Self {
        Self {
            length_km,
            loss_db,
            extra_delay_ns: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, value) in [
            ("length_km", self.length_km),
            ("loss_db", self.loss_db),
            ("extra_delay_ns", self.extra_delay_ns),
        ] {
            if !(value >= 0.0 && value.is_finite()) {
                return Err(Error::OutOfRange {
                    name,
                    value,
                    allowed: "[0, ∞)",
                });
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DetectorParams {
    pub efficiency: f64,
    pub dark_count_prob_per_gate: f64,
    pub recovery_time_ns: f64,
}

impl Default for DetectorParams {
    fn default() -> Self {
        Self {
            efficiency: 0.5,
            dark_count_prob_per_gate: 0.0,
            recovery_time_ns: 40.0,
        }
    }
}

impl DetectorParams {
    pub fn validate(&self) -> Result<()> {
        check_probability("efficiency", self.efficiency)?;
        check_probability("dark_count_prob_per_gate", self.dark_count_prob_per_gate)
    }
}

/// Scalar imperfections of the teleportation link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseParams {
    /// Two-photon interference visibility `V`.
    pub visibility: f64,
    /// Probability `F_u` that the feed-forward rotation is applied cleanly.
    pub unitary_fidelity: f64,
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self {
            visibility: 0.917,
            unitary_fidelity: 0.85,
        }
    }
}

impl NoiseParams {
    pub fn ideal() -> Self {
        Self {
            visibility: 1.0,
            unitary_fidelity: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        check_probability("visibility", self.visibility)?;
        check_probability("unitary_fidelity", self.unitary_fidelity)
    }
}

/// Number of pairs emitted in one pulse, drawn from the single-mode thermal
/// distribution `P(n) = μⁿ/(1+μ)^(n+1)`.
pub fn sample_pair_count<R: Rng + ?Sized>(src: &SourceParams, rng: &mut R) -> Result<u64> {
    let mu = src.mean_pairs_per_pulse;
    if !(mu >= 0.0 && mu.is_finite()) {
        return Err(Error::OutOfRange {
            name: "mean_pairs_per_pulse",
            value: mu,
            allowed: "[0, ∞)",
        });
    }
    if mu == 0.0 {
        return Ok(0);
    }
    // failures before first success with p = 1/(1+μ)
    let geo = Geometric::new(1.0 / (1.0 + mu)).map_err(|_| Error::OutOfRange {
        name: "mean_pairs_per_pulse",
        value: mu,
        allowed: "[0, ∞)",
    })?;
    Ok(geo.sample(rng))
}

/// `P(n ≥ 2)` for the thermal distribution with mean `mu`.
pub fn multi_pair_probability(mu: f64) -> f64 {
    let q = mu / (1.0 + mu);
    q * q
}

pub fn transmission(ch: &ChannelParams) -> f64 {
    db_to_transmission(ch.loss_db)
}

pub fn db_to_transmission(loss_db: f64) -> f64 {
    10f64.powf(-loss_db / 10.0)
}

/// White-noise admixture `V·ρ + (1−V)·I/2`.
pub fn apply_visibility(rho: &DensityMatrix, visibility: f64) -> Result<DensityMatrix> {
    check_probability("visibility", visibility)?;
    rho.require_dim(2)?;
    rho.mix(&DensityMatrix::maximally_mixed(2)?, visibility)
}

/// Applies `intended`; with probability `1 − F_u` the result is additionally
/// dephased in the time-bin basis.
pub fn apply_unitary_error<R: Rng + ?Sized>(
    rho: &DensityMatrix,
    unitary_fidelity: f64,
    intended: &Unitary2,
    rng: &mut R,
) -> Result<DensityMatrix> {
    let u: f64 = rng.random();
    unitary_error_with_draw(rho, unitary_fidelity, intended, u)
}

pub(crate) fn unitary_error_with_draw(
    rho: &DensityMatrix,
    unitary_fidelity: f64,
    intended: &Unitary2,
    draw: f64,
) -> Result<DensityMatrix> {
    check_probability("unitary_fidelity", unitary_fidelity)?;
    let rotated = intended.apply_density(rho)?;
    if draw < unitary_fidelity {
        Ok(rotated)
    } else {
        Ok(rotated.dephased())
    }
}

/// Ensemble average of [`apply_unitary_error`].
pub fn unitary_error_channel(
    rho: &DensityMatrix,
    unitary_fidelity: f64,
    intended: &Unitary2,
) -> Result<DensityMatrix> {
    check_probability("unitary_fidelity", unitary_fidelity)?;
    let rotated = intended.apply_density(rho)?;
    rotated.mix(&rotated.dephased(), unitary_fidelity)
}

pub fn detector_fires<R: Rng + ?Sized>(
    signal_present: bool,
    det: &DetectorParams,
    rng: &mut R,
) -> bool {
    let p = if signal_present {
        det.efficiency
    } else {
        det.dark_count_prob_per_gate
    };
    rng.random::<f64>() < p
}
