//! Measured and reported figures of the 30 km field test, in one place.

/// Mean pairs per pulse, Alice's heralded source.
pub const MU_ALICE: f64 = 0.08;
/// Mean pairs per pulse, Charlie's entangled source.
pub const MU_CHARLIE: f64 = 0.03;
pub const PURITY_ALICE: f64 = 0.91;
pub const PURITY_CHARLIE: f64 = 0.84;

/// Upper bound on two-photon interference visibility from multi-pair emission.
pub const VISIBILITY_BOUND: f64 = 0.917;
/// Upper bound on the fidelity of the feed-forward rotation.
pub const UNITARY_FIDELITY_BOUND: f64 = 0.85;

pub const ALICE_CHARLIE_KM: f64 = 15.7;
pub const ALICE_CHARLIE_LOSS_DB: f64 = 5.0;
pub const CHARLIE_BOB_KM: f64 = 14.7;
pub const CHARLIE_BOB_LOSS_DB: f64 = 6.0;
pub const BUFFER_KM: f64 = 15.0;
/// Alternate buffer length quoted in the summary of the experiment.
pub const SHORT_BUFFER_KM: f64 = 10.0;

pub const JITTER_RMS_PS: f64 = 2.04;
pub const COHERENCE_TIME_PS: f64 = 110.0;
pub const REPETITION_PERIOD_NS: f64 = 10.0;
pub const DETECTOR_RECOVERY_NS: f64 = 40.0;

/// Reported average state fidelities and their uncertainties.
pub const STATE_FIDELITY_WITHOUT_FF: (f64, f64) = (0.91, 0.03);
pub const STATE_FIDELITY_WITH_FF: (f64, f64) = (0.85, 0.03);
/// Reported process fidelities and their uncertainties.
pub const PROCESS_FIDELITY_WITHOUT_FF: (f64, f64) = (0.84, 0.04);
pub const PROCESS_FIDELITY_WITH_FF: (f64, f64) = (0.77, 0.03);

/// Trials per input state behind the reported fidelities.
pub const TRIALS_WITHOUT_FF: u64 = 150;
pub const TRIALS_WITH_FF: u64 = 240;
/// Reported ceilings on the classical-process probability.
pub const P_CEILING_WITHOUT_FF: f64 = 1.5e-16;
pub const P_CEILING_WITH_FF: f64 = 2.4e-14;

pub const FOURFOLD_RATE_PER_HOUR: f64 = 2.0;
