//! Run report: machine-readable (JSON) and aligned plain-text renderings.

use std::fmt::Write as _;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::netsim::{FeedForwardReport, RateBudget};
use crate::protocol::{InputStateLabel, Mode};
use crate::qubit::{DensityMatrix, C64};
use crate::stats::HypothesisResult;
use crate::tomography::{ChiMatrix, CountTable};

/// Complex matrix as nested rows of `[re, im]` pairs.
pub type MatrixRepr = Vec<Vec<[f64; 2]>>;

pub fn matrix_to_repr(m: &DMatrix<C64>) -> MatrixRepr {
    (0..m.nrows())
        .map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
        .collect()
}

/// Parses a square matrix; `None` for ragged input.
pub fn repr_to_matrix(r: &MatrixRepr) -> Option<DMatrix<C64>> {
    let n = r.len();
    if n == 0 || r.iter().any(|row| row.len() != n) {
        return None;
    }
    Some(DMatrix::from_fn(n, n, |i, j| C64::new(r[i][j][0], r[i][j][1])))
}

pub fn density_to_repr(rho: &DensityMatrix) -> MatrixRepr {
    matrix_to_repr(rho.matrix())
}

pub fn chi_to_repr(chi: &ChiMatrix) -> MatrixRepr {
    matrix_to_repr(chi.matrix())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LabelReport {
    pub label: InputStateLabel,
    pub attempted: u64,
    pub successes: u64,
    pub failures: u64,
    /// Heralded Ψ⁺ events dropped because feed-forward was off.
    pub discarded_heralds: u64,
    pub fidelity_mean: f64,
    pub fidelity_std_err: f64,
    pub counts: CountTable,
    pub reconstructed_state: MatrixRepr,
    pub tomographic_fidelity: f64,
    pub tomographic_fidelity_error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SyncReport {
    pub jitter_to_coherence: f64,
    pub mean_overlap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub seed: u64,
    pub mode: Mode,
    pub trials_per_state: u64,
    pub shots_per_basis: u64,
    pub labels: Vec<LabelReport>,
    pub average_state_fidelity: f64,
    pub average_state_fidelity_std_err: f64,
    pub tomographic_average_fidelity: f64,
    pub chi: MatrixRepr,
    pub process_fidelity: f64,
    pub haar_average_fidelity: f64,
    pub hoeffding: HypothesisResult,
    pub rate_budget: RateBudget,
    pub timing: FeedForwardReport,
    pub sync: SyncReport,
    pub config: ExperimentConfig,
}

impl RunReport {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn label(&self, label: InputStateLabel) -> Option<&LabelReport> {
        self.labels.iter().find(|l| l.label == label)
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "teleportation run  mode={}  seed={}  N={}  shots/basis={}",
            self.mode, self.seed, self.trials_per_state, self.shots_per_basis
        );
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "{:<6}{:>10}{:>10}{:>10}{:>12}{:>11}{:>12}{:>11}",
            "input", "attempts", "success", "fail", "fidelity", "± s.e.", "tomo fid", "± boot"
        );
        for l in &self.labels {
            let _ = writeln!(
                out,
                "{:<6}{:>10}{:>10}{:>10}{:>12.4}{:>11.4}{:>12.4}{:>11.4}",
                l.label.name(),
                l.attempted,
                l.successes,
                l.failures,
                l.fidelity_mean,
                l.fidelity_std_err,
                l.tomographic_fidelity,
                l.tomographic_fidelity_error
            );
        }
        let _ = writeln!(out);
        let _ = writeln!(
            out,
            "average state fidelity      {:.4} ± {:.4}",
            self.average_state_fidelity, self.average_state_fidelity_std_err
        );
        let _ = writeln!(out, "tomographic average         {:.4}", self.tomographic_average_fidelity);
        let _ = writeln!(out, "process fidelity            {:.4}", self.process_fidelity);
        let _ = writeln!(out, "(2F_p+1)/3                  {:.4}", self.haar_average_fidelity);
        let _ = writeln!(
            out,
            "classical-bound p           {:.3}e{}",
            self.hoeffding.p_mantissa, self.hoeffding.p_exponent10
        );
        let _ = writeln!(
            out,
            "four-fold rate              {:.3} /hour",
            self.rate_budget.fourfold_rate_per_hour
        );
        let _ = writeln!(
            out,
            "feed-forward slack          {:.1} ns ({})",
            self.timing.slack_ns,
            if self.timing.feasible { "feasible" } else { "INFEASIBLE" }
        );
        let _ = writeln!(
            out,
            "sync overlap                {:.6} (jitter/coherence {:.4})",
            self.sync.mean_overlap, self.sync.jitter_to_coherence
        );
        let _ = writeln!(out);
        let _ = writeln!(out, "chi matrix (I, X, Y, Z):");
        for row in &self.chi {
            let cells: Vec<String> = row
                .iter()
                .map(|c| format!("{:>8.4}{:+8.4}i", c[0], c[1]))
                .collect();
            let _ = writeln!(out, "  {}", cells.join(" "));
        }
        out
    }
}

pub fn render_rate_budget(b: &RateBudget) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{:<34}{:>14}", "factor", "value");
    let _ = writeln!(out, "{:<34}{:>14.4e}", "repetition rate (Hz)", b.repetition_rate_hz);
    for f in &b.factors {
        let _ = writeln!(out, "{:<34}{:>14.6}", f.name, f.value);
    }
    let _ = writeln!(out, "{:<34}{:>14.4e}", "probability per pulse", b.probability_per_pulse);
    let _ = writeln!(out, "{:<34}{:>14.4e}", "four-fold rate (1/s)", b.fourfold_rate_per_second);
    let _ = writeln!(out, "{:<34}{:>14.4}", "four-fold rate (1/hour)", b.fourfold_rate_per_hour);
    out
}

pub fn render_timeline(r: &FeedForwardReport) -> String {
    let mut out = String::new();
    for e in &r.timeline {
        let _ = writeln!(out, "{:>14.1} ns  {:?}", e.time_ns, e.kind);
    }
    let _ = writeln!(out);
    let _ = writeln!(out, "photon release (after BSM)   {:>12.1} ns", r.photon_release_ns);
    let _ = writeln!(out, "feed-forward arrival         {:>12.1} ns", r.signal_arrival_ns);
    let _ = writeln!(out, "slack                        {:>12.1} ns", r.slack_ns);
    let _ = writeln!(out, "feasible                     {:>12}", r.feasible);
    let _ = writeln!(out, "BSM after distribution       {:>12}", r.prior_distribution);
    out
}
