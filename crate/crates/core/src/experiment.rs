//! End-to-end runs: parallel trial generation with deterministic streams,
//! tomography, the classical-bound test and the network budget.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use rayon::ThreadPool;
use serde::{Deserialize, Serialize};

use crate::config::ExperimentConfig;
use crate::error::{Error, Result};
use crate::netsim::{coincidence_rate_budget, feed_forward_feasible, mean_sync_overlap};
use crate::photonics::NoiseParams;
use crate::protocol::{average_fidelity, classical_trial, run_trial, BsmOutcome, InputStateLabel, Mode, TrialResult};
use crate::qubit::{fidelity_pure, DensityMatrix, PureState, C64};
use crate::report::{chi_to_repr, density_to_repr, LabelReport, RunReport, SyncReport};
use crate::stats::{bootstrap_counts_error, hoeffding_test, mean_and_std_err, DEFAULT_RESAMPLES};
use crate::tomography::{
    average_fidelity_from_process, process_fidelity, reconstruct_process, reconstruct_state, simulate_counts,
    ChiMatrix,
};

/// Trials per random stream. Results depend only on the seed and this size.
pub const CHUNK_TRIALS: u64 = 256;
const SYNC_SAMPLES: usize = 10_000;

#[derive(Debug, Clone, Copy)]
enum Domain {
    Trials = 1,
    Tomography = 2,
    Bootstrap = 3,
    Sync = 4,
    Classical = 5,
}

/// Independent stream for `(seed, domain, index)`.
pub(crate) fn substream(seed: u64, domain: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((domain << 56) | (index & ((1 << 56) - 1)));
    rng
}

fn stream(seed: u64, domain: Domain, index: u64) -> ChaCha8Rng {
    substream(seed, domain as u64, index)
}

pub fn build_pool(workers: usize) -> Result<ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::Empty(format!("thread pool: {e}")))
}

/// Counted trials for one input plus bookkeeping.
#[derive(Debug, Clone)]
pub struct TrialBatch {
    pub successes: Vec<TrialResult>,
    pub attempted: u64,
    pub discarded_heralds: u64,
}

/// Runs trials in fixed-size chunks until `needed` counted successes are
/// collected. Chunks are generated a wave at a time on the pool, then scanned
/// in chunk order, so the result is independent of the worker count.
pub fn collect_successes(
    input: &PureState,
    noise: &NoiseParams,
    mode: Mode,
    needed: u64,
    seed: u64,
    stream_base: u64,
    pool: &ThreadPool,
) -> Result<TrialBatch> {
    let wave = (pool.current_num_threads() as u64 * 2).max(1);
    let mut batch = TrialBatch {
        successes: Vec::with_capacity(needed as usize),
        attempted: 0,
        discarded_heralds: 0,
    };
    let mut next_chunk = 0u64;
    while (batch.successes.len() as u64) < needed {
        let chunks: Vec<Vec<TrialResult>> = pool.install(|| {
            (next_chunk..next_chunk + wave)
                .into_par_iter()
                .map(|c| {
                    let mut rng = stream(seed, Domain::Trials, (stream_base << 32) | c);
                    (0..CHUNK_TRIALS)
                        .map(|_| run_trial(input, noise, mode, &mut rng))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<Vec<_>>>()
        })?;
        next_chunk += wave;
        'scan: for chunk in chunks {
            for r in chunk {
                batch.attempted += 1;
                if r.outcome == BsmOutcome::PsiPlus && !r.counted {
                    batch.discarded_heralds += 1;
                }
                if r.counted {
                    batch.successes.push(r);
                    if batch.successes.len() as u64 == needed {
                        break 'scan;
                    }
                }
            }
        }
    }
    Ok(batch)
}

fn mean_state(results: &[TrialResult]) -> Result<DensityMatrix> {
    let states: Vec<&DensityMatrix> = results.iter().filter_map(|r| r.bob_state.as_ref()).collect();
    let first = states.first().ok_or_else(|| Error::Empty("no receiver states".into()))?;
    let mut acc = first.matrix().clone() * C64::new(0.0, 0.0);
    for s in &states {
        acc += s.matrix();
    }
    acc /= C64::new(states.len() as f64, 0.0);
    DensityMatrix::new(crate::tomography::project_to_density(&acc))
}

pub fn run_experiment(cfg: &ExperimentConfig, workers: usize) -> Result<RunReport> {
    cfg.validate()
        .map_err(|e| Error::Empty(format!("invalid configuration: {e}")))?;
    let pool = build_pool(workers)?;
    let noise = cfg.noise_params();
    let seed = cfg.run.seed;
    let n = cfg.run.trials_per_state;

    let batches: Vec<(InputStateLabel, TrialBatch)> = InputStateLabel::ALL
        .iter()
        .map(|&label| {
            collect_successes(
                &label.state(),
                &noise,
                cfg.run.mode,
                n,
                seed,
                label.index() as u64,
                &pool,
            )
            .map(|b| (label, b))
        })
        .collect::<Result<_>>()?;

    let summary = average_fidelity(batches.iter().map(|(l, b)| (*l, b.successes.as_slice())))?;

    let mut labels = Vec::with_capacity(4);
    let mut reconstructed = Vec::with_capacity(4);
    for ((label, batch), fid) in batches.iter().zip(&summary.per_label) {
        let target = batch.successes[0].target;
        let rho_mean = mean_state(&batch.successes)?;
        let mut tomo_rng = stream(seed, Domain::Tomography, label.index() as u64);
        let counts = simulate_counts(&rho_mean, cfg.run.shots_per_basis, &mut tomo_rng)?;
        let rho_hat = reconstruct_state(&counts)?;
        let tomographic_fidelity = fidelity_pure(&target, &rho_hat)?;
        let mut boot_rng = stream(seed, Domain::Bootstrap, label.index() as u64);
        let tomographic_fidelity_error = pool.install(|| {
            bootstrap_counts_error(&counts, &target, DEFAULT_RESAMPLES, &mut boot_rng)
        })?;
        labels.push(LabelReport {
            label: *label,
            attempted: batch.attempted,
            successes: batch.successes.len() as u64,
            failures: batch.attempted - batch.successes.len() as u64,
            discarded_heralds: batch.discarded_heralds,
            fidelity_mean: fid.mean,
            fidelity_std_err: fid.std_err,
            counts,
            reconstructed_state: density_to_repr(&rho_hat),
            tomographic_fidelity,
            tomographic_fidelity_error,
        });
        reconstructed.push((*label, rho_hat));
    }

    let chi = reconstruct_process(&reconstructed)?;
    let f_process = process_fidelity(&chi, &ChiMatrix::ideal_teleportation());
    let tomographic_average_fidelity = labels.iter().map(|l| l.tomographic_fidelity).sum::<f64>() / 4.0;

    let hoeffding = hoeffding_test(summary.mean, n)?;
    let clock = cfg.clock_model();
    let rate_budget = coincidence_rate_budget(&cfg.rate_inputs(), clock.repetition_rate_hz())?;
    let timing = feed_forward_feasible(&cfg.topology())?;
    let mut sync_rng = stream(seed, Domain::Sync, 0);
    let sync = SyncReport {
        jitter_to_coherence: clock.jitter_to_coherence(),
        mean_overlap: mean_sync_overlap(&clock, SYNC_SAMPLES, &mut sync_rng)?,
    };

    Ok(RunReport {
        seed,
        mode: cfg.run.mode,
        trials_per_state: n,
        shots_per_basis: cfg.run.shots_per_basis,
        labels,
        average_state_fidelity: summary.mean,
        average_state_fidelity_std_err: summary.std_err,
        tomographic_average_fidelity,
        chi: chi_to_repr(&chi),
        process_fidelity: f_process,
        haar_average_fidelity: average_fidelity_from_process(f_process)?,
        hoeffding,
        rate_budget,
        timing,
        sync,
        config: cfg.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassicalBaseline {
    pub samples: u64,
    pub seed: u64,
    pub mean_fidelity: f64,
    pub std_err: f64,
}

/// Haar-averaged fidelity of the measure-and-prepare strategy.
pub fn classical_baseline(samples: u64, seed: u64, workers: usize) -> Result<ClassicalBaseline> {
    if samples == 0 {
        return Err(Error::Empty("no classical samples".into()));
    }
    let pool = build_pool(workers)?;
    let chunks = samples.div_ceil(CHUNK_TRIALS * 16);
    let fids: Vec<f64> = pool.install(|| {
        (0..chunks)
            .into_par_iter()
            .flat_map_iter(|c| {
                let mut rng = stream(seed, Domain::Classical, c);
                let len = (samples - c * CHUNK_TRIALS * 16).min(CHUNK_TRIALS * 16);
                (0..len)
                    .map(|_| {
                        let psi = PureState::haar_random(&mut rng);
                        let rho = classical_trial(&psi, &mut rng);
                        fidelity_pure(&psi, &rho).expect("qubit")
                    })
                    .collect::<Vec<_>>()
            })
            .collect()
    });
    let (mean_fidelity, std_err) = mean_and_std_err(&fids)?;
    Ok(ClassicalBaseline {
        samples,
        seed,
        mean_fidelity,
        std_err,
    })
}
