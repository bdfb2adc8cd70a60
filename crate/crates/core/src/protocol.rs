//! The teleportation trial: Bell-state measurement with partial
//! discrimination, conditional feed-forward, and fidelity bookkeeping.

use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::photonics::{apply_visibility, unitary_error_with_draw, NoiseParams};
use crate::qubit::{bell_decompose, fidelity_pure, BellState, DensityMatrix, Pauli, PureState, Unitary2};
use crate::stats;

/// Result of the linear-optics Bell measurement.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum BsmOutcome {
    PsiMinus,
    PsiPlus,
    Fail,
}

/// The four probe states used for state and process tomography.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum InputStateLabel {
    T0,
    T1,
    D,
    R,
}

impl InputStateLabel {
    pub const ALL: [InputStateLabel; 4] = [
        InputStateLabel::T0,
        InputStateLabel::T1,
        InputStateLabel::D,
        InputStateLabel::R,
    ];

    pub fn state(self) -> PureState {
        match self {
            InputStateLabel::T0 => PureState::t0(),
            InputStateLabel::T1 => PureState::t1(),
            InputStateLabel::D => PureState::diagonal(),
            InputStateLabel::R => PureState::circular(),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            InputStateLabel::T0 => "t0",
            InputStateLabel::T1 => "t1",
            InputStateLabel::D => "D",
            InputStateLabel::R => "R",
        }
    }

    pub fn index(self) -> usize {
        self as usize
    }
}

impl fmt::Display for InputStateLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Whether Ψ⁺ heralds are corrected and kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mode {
    #[serde(rename = "with_ff")]
    WithFeedForward,
    #[serde(rename = "without_ff")]
    WithoutFeedForward,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::WithFeedForward => "with_ff",
            Mode::WithoutFeedForward => "without_ff",
        })
    }
}

#[derive(Debug, Clone)]
pub struct TrialResult {
    /// Bell state the joint measurement actually projected onto.
    pub projected: BellState,
    pub outcome: BsmOutcome,
    /// Receiver's state; present iff `outcome != Fail`.
    pub bob_state: Option<DensityMatrix>,
    pub feed_forward_applied: bool,
    /// Whether this trial counts towards the fidelity estimate in the run mode.
    pub counted: bool,
    /// `σy·input`, the state the receiver should end up with.
    pub target: PureState,
}

impl TrialResult {
    pub fn fidelity(&self) -> Option<f64> {
        self.bob_state
            .as_ref()
            .map(|rho| fidelity_pure(&self.target, rho).expect("receiver state is a qubit"))
    }
}

/// Linear-optics discrimination: Ψ⁻ always heralded, Ψ⁺ half of the time,
/// Φ± never. Always consumes exactly one uniform draw.
pub fn bsm_discriminate<R: Rng + ?Sized>(true_bell: BellState, rng: &mut R) -> BsmOutcome {
    let u: f64 = rng.random();
    discriminate_with_draw(true_bell, u)
}

fn discriminate_with_draw(true_bell: BellState, u: f64) -> BsmOutcome {
    match true_bell {
        BellState::PsiMinus => BsmOutcome::PsiMinus,
        BellState::PsiPlus if u < 0.5 => BsmOutcome::PsiPlus,
        _ => BsmOutcome::Fail,
    }
}

/// Correction applied by the receiver for a heralded outcome.
pub fn feed_forward_correction(outcome: BsmOutcome) -> Result<Unitary2> {
    match outcome {
        BsmOutcome::PsiMinus => Ok(Unitary2::identity()),
        BsmOutcome::PsiPlus => Ok(Pauli::Z.unitary()),
        BsmOutcome::Fail => Err(Error::FailedOutcome),
    }
}

/// One teleportation attempt. Every call consumes the same number of random
/// draws regardless of mode or outcome, so two modes sharing a seed see the
/// same Bell outcomes.
pub fn run_trial<R: Rng + ?Sized>(
    input: &PureState,
    noise: &NoiseParams,
    mode: Mode,
    rng: &mut R,
) -> Result<TrialResult> {
    noise.validate()?;
    let u_bell: f64 = rng.random();
    let u_disc: f64 = rng.random();
    let u_err: f64 = rng.random();

    let branches = bell_decompose(input);
    let mut acc = 0.0;
    let mut branch = branches[3];
    for b in branches {
        acc += b.probability;
        if u_bell < acc {
            branch = b;
            break;
        }
    }

    let outcome = discriminate_with_draw(branch.bell, u_disc);
    let target = Pauli::Y.unitary().apply_pure(input);
    let conditional = || apply_visibility(&branch.conditional.projector(), noise.visibility);

    let (bob_state, feed_forward_applied, counted) = match (outcome, mode) {
        (BsmOutcome::Fail, _) => (None, false, false),
        (BsmOutcome::PsiMinus, _) => (Some(conditional()?), false, true),
        (BsmOutcome::PsiPlus, Mode::WithFeedForward) => {
            let u = feed_forward_correction(outcome)?;
            let rho = unitary_error_with_draw(&conditional()?, noise.unitary_fidelity, &u, u_err)?;
            (Some(rho), true, true)
        }
        (BsmOutcome::PsiPlus, Mode::WithoutFeedForward) => (Some(conditional()?), false, false),
    };

    Ok(TrialResult {
        projected: branch.bell,
        outcome,
        bob_state,
        feed_forward_applied,
        counted,
        target,
    })
}

/// Measure-and-prepare baseline: measure in the time-bin basis and send the
/// matching eigenstate.
pub fn classical_trial<R: Rng + ?Sized>(input: &PureState, rng: &mut R) -> DensityMatrix {
    let u: f64 = rng.random();
    if u < input.alpha().norm_sqr() {
        PureState::t0().projector()
    } else {
        PureState::t1().projector()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelFidelity {
    pub label: InputStateLabel,
    pub mean: f64,
    pub std_err: f64,
    pub successes: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelitySummary {
    pub per_label: Vec<LabelFidelity>,
    /// Unweighted mean over labels.
    pub mean: f64,
    pub std_err: f64,
}

/// Mean fidelity of counted trials per input label and over labels.
pub fn average_fidelity<'a, I>(groups: I) -> Result<FidelitySummary>
where
    I: IntoIterator<Item = (InputStateLabel, &'a [TrialResult])>,
{
    let mut per_label = Vec::new();
    for (label, results) in groups {
        let fids: Vec<f64> = results
            .iter()
            .filter(|r| r.counted)
            .filter_map(TrialResult::fidelity)
            .collect();
        if fids.is_empty() {
            return Err(Error::Empty(format!("no successful trials for input {label}")));
        }
        let (mean, std_err) = stats::mean_and_std_err(&fids)?;
        per_label.push(LabelFidelity {
            label,
            mean,
            std_err,
            successes: fids.len(),
        });
    }
    if per_label.is_empty() {
        return Err(Error::Empty("no input groups".into()));
    }
    let k = per_label.len() as f64;
    let mean = per_label.iter().map(|l| l.mean).sum::<f64>() / k;
    let std_err = per_label.iter().map(|l| l.std_err.powi(2)).sum::<f64>().sqrt() / k;
    Ok(FidelitySummary {
        per_label,
        mean,
        std_err,
    })
}
