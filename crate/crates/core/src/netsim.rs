//! Timing and rate model of the three-node network: fiber delays, coiled
//! fiber buffers, feed-forward deadline, clock jitter and the four-fold
//! coincidence budget.

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_probability, Error, Result};
use crate::photonics::{db_to_transmission, ChannelParams};

/// Group delay of standard single-mode fiber (group index 1.468).
pub const FIBER_DELAY_NS_PER_KM: f64 = 4895.0;

/// Four-fold heralding probability of the partial Bell measurement:
/// all Ψ⁻ events plus half the Ψ⁺ events.
pub const BSM_SUCCESS_FACTOR: f64 = 3.0 / 8.0;

pub fn propagation_delay(length_km: f64) -> f64 {
    length_km * FIBER_DELAY_NS_PER_KM
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NetworkTopology {
    pub alice_charlie: ChannelParams,
    pub charlie_bob: ChannelParams,
    pub charlie_buffer_km: f64,
    pub bob_buffer_km: f64,
    /// Electronics and conversion overhead on the feed-forward hop.
    pub classical_latency_ns: f64,
}

impl Default for NetworkTopology {
    fn default() -> Self {
        Self {
            alice_charlie: ChannelParams::new(15.7, 5.0),
            charlie_bob: ChannelParams::new(14.7, 6.0),
            charlie_buffer_km: 15.0,
            bob_buffer_km: 15.0,
            classical_latency_ns: 0.0,
        }
    }
}

impl NetworkTopology {
    /// Variant with 10 km coiled buffers.
    pub fn short_buffers() -> Self {
        Self {
            charlie_buffer_km: 10.0,
            bob_buffer_km: 10.0,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.alice_charlie.validate()?;
        self.charlie_bob.validate()?;
        for (name, value) in [
            ("charlie_buffer_km", self.charlie_buffer_km),
            ("bob_buffer_km", self.bob_buffer_km),
            ("classical_latency_ns", self.classical_latency_ns),
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

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum EventKind {
    PairEmitted,
    IdlerArrivesAtBob,
    AlicePhotonArrivesAtCharlie,
    BellMeasurement,
    FeedForwardArrivesAtBob,
    BobPhotonReleased,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TimelineEvent {
    pub kind: EventKind,
    pub time_ns: f64,
}

/// Feed-forward deadline check. Times in the summary fields are measured
/// from the Bell measurement, which is taken to coincide with the idler
/// entering Bob's buffer; the timeline carries emission-referenced times.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeedForwardReport {
    pub photon_release_ns: f64,
    pub signal_arrival_ns: f64,
    pub slack_ns: f64,
    pub feasible: bool,
    /// The Bell measurement happens after the idler reached Bob.
    pub prior_distribution: bool,
    /// Source-to-Charlie delay of Alice's photon (cancels in the slack).
    pub alice_to_charlie_ns: f64,
    pub timeline: Vec<TimelineEvent>,
}

pub fn feed_forward_feasible(topo: &NetworkTopology) -> Result<FeedForwardReport> {
    topo.validate()?;
    let hop = propagation_delay(topo.charlie_bob.length_km) + topo.charlie_bob.extra_delay_ns;
    let photon_release_ns = propagation_delay(topo.bob_buffer_km);
    let signal_arrival_ns = hop + topo.classical_latency_ns;
    let slack_ns = photon_release_ns - signal_arrival_ns;

    let alice_to_charlie_ns =
        propagation_delay(topo.alice_charlie.length_km) + topo.alice_charlie.extra_delay_ns;
    let idler_at_bob = hop;
    let bsm = propagation_delay(topo.charlie_buffer_km);
    let mut timeline = vec![
        TimelineEvent {
            kind: EventKind::PairEmitted,
            time_ns: 0.0,
        },
        TimelineEvent {
            kind: EventKind::IdlerArrivesAtBob,
            time_ns: idler_at_bob,
        },
        // Alice's emission is delayed so her photon meets Charlie's buffered photon
        TimelineEvent {
            kind: EventKind::AlicePhotonArrivesAtCharlie,
            time_ns: bsm,
        },
        TimelineEvent {
            kind: EventKind::BellMeasurement,
            time_ns: bsm,
        },
        TimelineEvent {
            kind: EventKind::FeedForwardArrivesAtBob,
            time_ns: bsm + signal_arrival_ns,
        },
        TimelineEvent {
            kind: EventKind::BobPhotonReleased,
            time_ns: bsm + photon_release_ns,
        },
    ];
    timeline.sort_by(|a, b| a.time_ns.total_cmp(&b.time_ns));

    Ok(FeedForwardReport {
        photon_release_ns,
        signal_arrival_ns,
        slack_ns,
        feasible: slack_ns >= 0.0,
        prior_distribution: bsm > idler_at_bob,
        alice_to_charlie_ns,
        timeline,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClockModel {
    pub repetition_period_ns: f64,
    pub jitter_rms_ps: f64,
    pub coherence_time_ps: f64,
}

impl Default for ClockModel {
    fn default() -> Self {
        Self {
            repetition_period_ns: 10.0,
            jitter_rms_ps: 2.04,
            coherence_time_ps: 110.0,
        }
    }
}

impl ClockModel {
    pub fn validate(&self) -> Result<()> {
        if self.repetition_period_ns.is_nan() || self.repetition_period_ns <= 0.0 {
            return Err(Error::OutOfRange {
                name: "repetition_period_ns",
                value: self.repetition_period_ns,
                allowed: "(0, ∞)",
            });
        }
        if self.coherence_time_ps.is_nan() || self.coherence_time_ps <= 0.0 {
            return Err(Error::OutOfRange {
                name: "coherence_time_ps",
                value: self.coherence_time_ps,
                allowed: "(0, ∞)",
            });
        }
        if self.jitter_rms_ps.is_nan() || self.jitter_rms_ps < 0.0 {
            return Err(Error::OutOfRange {
                name: "jitter_rms_ps",
                value: self.jitter_rms_ps,
                allowed: "[0, ∞)",
            });
        }
        Ok(())
    }

    pub fn repetition_rate_hz(&self) -> f64 {
        1e9 / self.repetition_period_ns
    }

    pub fn jitter_to_coherence(&self) -> f64 {
        self.jitter_rms_ps / self.coherence_time_ps
    }
}

/// Temporal-overlap factor `exp(−Δt²/(2τ²))` for one random timing offset.
pub fn sync_jitter_penalty<R: Rng + ?Sized>(clock: &ClockModel, rng: &mut R) -> Result<f64> {
    clock.validate()?;
    if clock.jitter_rms_ps == 0.0 {
        return Ok(1.0);
    }
    let dt = Normal::new(0.0, clock.jitter_rms_ps)
        .expect("finite jitter")
        .sample(rng);
    let tau = clock.coherence_time_ps;
    Ok((-(dt * dt) / (2.0 * tau * tau)).exp())
}

pub fn mean_sync_overlap<R: Rng + ?Sized>(clock: &ClockModel, samples: usize, rng: &mut R) -> Result<f64> {
    if samples == 0 {
        return Err(Error::Empty("no jitter samples".into()));
    }
    let mut acc = 0.0;
    for _ in 0..samples {
        acc += sync_jitter_penalty(clock, rng)?;
    }
    Ok(acc / samples as f64)
}

/// Inputs to the four-fold rate estimate. Fields without a measured value
/// are assumptions and are labelled as such in the default configuration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RateInputs {
    pub mu_alice: f64,
    pub mu_charlie: f64,
    /// Probability that Alice's idler produces a herald.
    pub herald_efficiency: f64,
    /// Transmission of Alice's encoding interferometer port.
    pub encoding_efficiency: f64,
    pub alice_charlie_loss_db: f64,
    pub charlie_bob_loss_db: f64,
    pub coil_loss_db_per_km: f64,
    pub charlie_buffer_km: f64,
    pub bob_buffer_km: f64,
    /// Per-photon spectral filtering and insertion transmission.
    pub photon_transmission: f64,
    pub detector_efficiency: f64,
    pub bsm_success_factor: f64,
    pub analysis_efficiency: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateFactor {
    pub name: String,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateBudget {
    pub repetition_rate_hz: f64,
    pub factors: Vec<RateFactor>,
    pub probability_per_pulse: f64,
    pub fourfold_rate_per_second: f64,
    pub fourfold_rate_per_hour: f64,
}

pub fn coincidence_rate_budget(inputs: &RateInputs, rep_rate_hz: f64) -> Result<RateBudget> {
    if !(rep_rate_hz > 0.0 && rep_rate_hz.is_finite()) {
        return Err(Error::OutOfRange {
            name: "rep_rate_hz",
            value: rep_rate_hz,
            allowed: "(0, ∞)",
        });
    }
    for (name, value) in [
        ("mu_alice", inputs.mu_alice),
        ("mu_charlie", inputs.mu_charlie),
        ("herald_efficiency", inputs.herald_efficiency),
        ("encoding_efficiency", inputs.encoding_efficiency),
        ("photon_transmission", inputs.photon_transmission),
        ("detector_efficiency", inputs.detector_efficiency),
        ("bsm_success_factor", inputs.bsm_success_factor),
        ("analysis_efficiency", inputs.analysis_efficiency),
    ] {
        check_probability(name, value)?;
    }
    for (name, value) in [
        ("alice_charlie_loss_db", inputs.alice_charlie_loss_db),
        ("charlie_bob_loss_db", inputs.charlie_bob_loss_db),
        ("coil_loss_db_per_km", inputs.coil_loss_db_per_km),
        ("charlie_buffer_km", inputs.charlie_buffer_km),
        ("bob_buffer_km", inputs.bob_buffer_km),
    ] {
        if !(value >= 0.0 && value.is_finite()) {
            return Err(Error::OutOfRange {
                name,
                value,
                allowed: "[0, ∞)",
            });
        }
    }

    let eta_t = inputs.photon_transmission;
    let eta_d = inputs.detector_efficiency;
    let charlie_coil = db_to_transmission(inputs.coil_loss_db_per_km * inputs.charlie_buffer_km);
    let bob_coil = db_to_transmission(inputs.coil_loss_db_per_km * inputs.bob_buffer_km);

    let factor = |name: &str, value: f64| RateFactor {
        name: name.to_string(),
        value,
    };
    let factors = vec![
        factor("alice pair emission", inputs.mu_alice),
        factor("alice herald", inputs.herald_efficiency),
        factor("alice encoding port", inputs.encoding_efficiency),
        factor("alice-charlie fiber", db_to_transmission(inputs.alice_charlie_loss_db)),
        factor("alice photon filter/insertion", eta_t),
        factor("alice photon BSM detection", eta_d),
        factor("charlie pair emission", inputs.mu_charlie),
        factor("charlie signal coil", charlie_coil),
        factor("charlie signal filter/insertion", eta_t),
        factor("charlie signal BSM detection", eta_d),
        factor("charlie-bob fiber", db_to_transmission(inputs.charlie_bob_loss_db)),
        factor("bob idler coil", bob_coil),
        factor("bob idler filter/insertion", eta_t),
        factor("bob analysis arm", inputs.analysis_efficiency),
        factor("bob detection", eta_d),
        factor("BSM success", inputs.bsm_success_factor),
    ];
    let probability_per_pulse: f64 = factors.iter().map(|f| f.value).product();
    let per_second = rep_rate_hz * probability_per_pulse;
    Ok(RateBudget {
        repetition_rate_hz: rep_rate_hz,
        factors,
        probability_per_pulse,
        fourfold_rate_per_second: per_second,
        fourfold_rate_per_hour: per_second * 3600.0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn delays() {
        assert_eq!(propagation_delay(0.0), 0.0);
        assert!((propagation_delay(15.0) - 73_425.0).abs() < 1e-9);
        assert!((propagation_delay(14.7) - 71_956.5).abs() < 1e-9);
    }

    #[test]
    fn default_topology_is_feasible() {
        let r = feed_forward_feasible(&NetworkTopology::default()).unwrap();
        assert!((r.slack_ns - 1_468.5).abs() < 1e-6);
        assert!(r.feasible);
        assert!(r.prior_distribution);
    }

    #[test]
    fn latency_breaks_deadline() {
        let topo = NetworkTopology {
            classical_latency_ns: 2_000.0,
            ..NetworkTopology::default()
        };
        assert!(!feed_forward_feasible(&topo).unwrap().feasible);
    }

    #[test]
    fn zero_buffer_is_infeasible() {
        for hop in [0.1, 1.0, 14.7] {
            let topo = NetworkTopology {
                bob_buffer_km: 0.0,
                charlie_bob: ChannelParams::new(hop, 0.0),
                ..NetworkTopology::default()
            };
            assert!(!feed_forward_feasible(&topo).unwrap().feasible);
        }
    }

    #[test]
    fn short_buffers_are_infeasible() {
        let r = feed_forward_feasible(&NetworkTopology::short_buffers()).unwrap();
        assert!((r.slack_ns - (48_950.0 - 71_956.5)).abs() < 1e-6);
        assert!(!r.feasible);
        assert!(!r.prior_distribution);
    }

    #[test]
    fn slack_is_linear_in_buffer() {
        let slack = |km: f64| {
            feed_forward_feasible(&NetworkTopology {
                bob_buffer_km: km,
                ..NetworkTopology::default()
            })
            .unwrap()
            .slack_ns
        };
        let (a, b, c) = (slack(5.0), slack(15.0), slack(25.0));
        assert!(((b - a) / 10.0 - FIBER_DELAY_NS_PER_KM).abs() < 1e-9);
        assert!(((c - b) / 10.0 - FIBER_DELAY_NS_PER_KM).abs() < 1e-9);
    }

    #[test]
    fn timeline_ordering() {
        let r = feed_forward_feasible(&NetworkTopology::default()).unwrap();
        let t = |k: EventKind| r.timeline.iter().find(|e| e.kind == k).unwrap().time_ns;
        assert!(t(EventKind::BellMeasurement) > t(EventKind::IdlerArrivesAtBob));
        assert!(t(EventKind::FeedForwardArrivesAtBob) <= t(EventKind::BobPhotonReleased));
        assert!(r.timeline.windows(2).all(|w| w[0].time_ns <= w[1].time_ns));
    }

    #[test]
    fn jitter_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let still = ClockModel {
            jitter_rms_ps: 0.0,
            ..ClockModel::default()
        };
        for _ in 0..100 {
            assert_eq!(sync_jitter_penalty(&still, &mut rng).unwrap(), 1.0);
        }
        let m = mean_sync_overlap(&ClockModel::default(), 100_000, &mut rng).unwrap();
        assert!(m >= 0.999);
        let equal = ClockModel {
            jitter_rms_ps: 110.0,
            ..ClockModel::default()
        };
        let n = 200_000;
        let m = mean_sync_overlap(&equal, n, &mut rng).unwrap();
        // E[exp(−Z²/2)] = 1/√2; per-sample variance 1/√3 − 1/2
        let sigma = ((1.0 / 3f64.sqrt() - 0.5) / n as f64).sqrt();
        assert!((m - std::f64::consts::FRAC_1_SQRT_2).abs() < 4.0 * sigma, "{m}");
    }

    #[test]
    fn jitter_penalty_decreases_with_jitter() {
        let mut prev = 1.0 + 1e-12;
        for j in [0.0, 5.0, 20.0, 50.0, 110.0, 300.0] {
            let clock = ClockModel {
                jitter_rms_ps: j,
                ..ClockModel::default()
            };
            let m = mean_sync_overlap(&clock, 50_000, &mut ChaCha8Rng::seed_from_u64(7)).unwrap();
            assert!(m < prev, "{j}: {m} !< {prev}");
            prev = m;
        }
    }

    fn unity() -> RateInputs {
        RateInputs {
            mu_alice: 1.0,
            mu_charlie: 1.0,
            herald_efficiency: 1.0,
            encoding_efficiency: 1.0,
            alice_charlie_loss_db: 0.0,
            charlie_bob_loss_db: 0.0,
            coil_loss_db_per_km: 0.0,
            charlie_buffer_km: 15.0,
            bob_buffer_km: 15.0,
            photon_transmission: 1.0,
            detector_efficiency: 1.0,
            bsm_success_factor: BSM_SUCCESS_FACTOR,
            analysis_efficiency: 1.0,
        }
    }

    #[test]
    fn rate_upper_bound_and_zero() {
        let b = coincidence_rate_budget(&unity(), 1e8).unwrap();
        assert!((b.fourfold_rate_per_second - 1e8 * 3.0 / 8.0).abs() < 1e-3);
        let zero = RateInputs {
            mu_alice: 0.0,
            ..unity()
        };
        assert_eq!(coincidence_rate_budget(&zero, 1e8).unwrap().fourfold_rate_per_hour, 0.0);
        let bad = RateInputs {
            detector_efficiency: 1.5,
            ..unity()
        };
        assert!(coincidence_rate_budget(&bad, 1e8).is_err());
    }
}
