//! Classical-bound hypothesis test and bootstrap error bars.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::qubit::{fidelity_pure, PureState};
use crate::tomography::{reconstruct_state, BasisCounts, CountTable};

/// Best average fidelity reachable by a measure-and-prepare strategy.
pub const CLASSICAL_FIDELITY: f64 = 2.0 / 3.0;
/// Upper end of the range used by the concentration bound.
pub const FIDELITY_RANGE: f64 = 4.0 / 3.0;

pub const DEFAULT_RESAMPLES: usize = 1000;
pub const MIN_RESAMPLES: usize = 100;

/// A probability carried in log space so tiny values survive formatting.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogProb {
    pub ln: f64,
}

impl LogProb {
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }

    pub fn log10(&self) -> f64 {
        self.ln / std::f64::consts::LN_10
    }

    /// `(m, e)` with `p = m·10^e` and `1 ≤ m < 10`.
    pub fn mantissa_exponent(&self) -> (f64, i32) {
        let l = self.log10();
        let mut e = l.floor();
        let mut m = 10f64.powf(l - e);
        if m >= 10.0 {
            m /= 10.0;
            e += 1.0;
        }
        (m, e as i32)
    }
}

impl fmt::Display for LogProb {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (m, e) = self.mantissa_exponent();
        write!(f, "{m:.3}e{e}")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HypothesisResult {
    pub observed_mean_fidelity: f64,
    pub trials_per_state: u64,
    pub p_bound: f64,
    pub p_ln: f64,
    pub p_mantissa: f64,
    pub p_exponent10: i32,
}

/// Upper bound on the probability that a classical strategy reaches mean
/// fidelity `mean_fidelity` over `4·n_per_state` trials:
///
/// `p ≤ [ ((4/3−2/3)/(4/3−F))^((4/3−F)/(4/3)) · ((2/3)/F)^(F/(4/3)) ]^(4N)`
///
/// Returns `ln p`; `0` (p = 1) for `F ≤ 2/3`.
pub fn hoeffding_ln_bound(mean_fidelity: f64, n_per_state: u64) -> Result<LogProb> {
    let f = mean_fidelity;
    if n_per_state == 0 {
        return Err(Error::OutOfRange {
            name: "n_per_state",
            value: 0.0,
            allowed: "≥ 1",
        });
    }
    if f.is_nan() || f >= FIDELITY_RANGE {
        return Err(Error::OutOfRange {
            name: "mean_fidelity",
            value: f,
            allowed: "< 4/3",
        });
    }
    if f <= CLASSICAL_FIDELITY {
        return Ok(LogProb { ln: 0.0 });
    }
    let a = (FIDELITY_RANGE - f) / FIDELITY_RANGE;
    let b = (FIDELITY_RANGE - CLASSICAL_FIDELITY) / (FIDELITY_RANGE - f);
    let c = f / FIDELITY_RANGE;
    let d = CLASSICAL_FIDELITY / f;
    let per_trial = a * b.ln() + c * d.ln();
    Ok(LogProb {
        ln: (4 * n_per_state) as f64 * per_trial,
    })
}

pub fn hoeffding_bound(mean_fidelity: f64, n_per_state: u64) -> Result<f64> {
    Ok(hoeffding_ln_bound(mean_fidelity, n_per_state)?.value())
}

pub fn hoeffding_test(mean_fidelity: f64, n_per_state: u64) -> Result<HypothesisResult> {
    let p = hoeffding_ln_bound(mean_fidelity, n_per_state)?;
    let (p_mantissa, p_exponent10) = p.mantissa_exponent();
    Ok(HypothesisResult {
        observed_mean_fidelity: mean_fidelity,
        trials_per_state: n_per_state,
        p_bound: p.value(),
        p_ln: p.ln,
        p_mantissa,
        p_exponent10,
    })
}

/// Sample mean and its standard error (zero for a single sample).
pub fn mean_and_std_err(values: &[f64]) -> Result<(f64, f64)> {
    if values.is_empty() {
        return Err(Error::Empty("no samples".into()));
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() == 1 {
        return Ok((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Ok((mean, (var / n).sqrt()))
}

pub fn sample_std(values: &[f64]) -> f64 {
    if values.len() < 2 {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

fn check_resamples(resamples: usize) -> Result<()> {
    if resamples < MIN_RESAMPLES {
        return Err(Error::OutOfRange {
            name: "resamples",
            value: resamples as f64,
            allowed: "≥ 100",
        });
    }
    Ok(())
}

fn resample_streams<R: Rng + ?Sized>(resamples: usize, rng: &mut R) -> impl IndexedParallelIterator<Item = ChaCha8Rng> {
    let base: u64 = rng.random();
    (0..resamples).into_par_iter().map(move |k| {
        let mut r = ChaCha8Rng::seed_from_u64(base);
        r.set_stream(k as u64);
        r
    })
}

fn poisson<R: Rng + ?Sized>(mean: u64, rng: &mut R) -> u64 {
    if mean == 0 {
        return 0;
    }
    Poisson::new(mean as f64).expect("positive mean").sample(rng) as u64
}

/// Bootstrap standard deviation of the reconstructed-state fidelity to
/// `target`, resampling every count as Poisson around its observed value.
pub fn bootstrap_counts_error<R: Rng + ?Sized>(
    counts: &CountTable,
    target: &PureState,
    resamples: usize,
    rng: &mut R,
) -> Result<f64> {
    check_resamples(resamples)?;
    counts.check_nonzero()?;
    let fids: Vec<f64> = resample_streams(resamples, rng)
        .map(|mut r| {
            loop {
                let mut resample = |c: BasisCounts| BasisCounts {
                    plus: poisson(c.plus, &mut r),
                    minus: poisson(c.minus, &mut r),
                };
                let table = CountTable {
                    z: resample(counts.z),
                    x: resample(counts.x),
                    y: resample(counts.y),
                };
                if let Ok(rho) = reconstruct_state(&table) {
                    return fidelity_pure(target, &rho).expect("qubit");
                }
            }
        })
        .collect();
    Ok(sample_std(&fids))
}

/// Bootstrap standard deviation of the mean of per-trial values, resampled
/// with replacement.
pub fn bootstrap_mean_error<R: Rng + ?Sized>(values: &[f64], resamples: usize, rng: &mut R) -> Result<f64> {
    check_resamples(resamples)?;
    if values.is_empty() {
        return Err(Error::Empty("no samples to bootstrap".into()));
    }
    let n = values.len();
    let means: Vec<f64> = resample_streams(resamples, rng)
        .map(|mut r| (0..n).map(|_| values[r.random_range(0..n)]).sum::<f64>() / n as f64)
        .collect();
    Ok(sample_std(&means))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::photonics::apply_visibility;
    use crate::qubit::Pauli;
    use crate::tomography::simulate_counts;

    #[test]
    fn classical_mean_gives_unit_bound() {
        for n in [1, 10, 100, 1000] {
            assert_eq!(hoeffding_bound(2.0 / 3.0, n).unwrap(), 1.0);
            assert_eq!(hoeffding_bound(0.5, n).unwrap(), 1.0);
        }
        assert_eq!(hoeffding_bound(2.0 / 3.0 - 1e-5, 100).unwrap(), 1.0);
        assert!(hoeffding_bound(0.6667, 100).unwrap() < 1.0);
    }

    #[test]
    fn quoted_ceilings() {
        // independent evaluation of the bracket in linear space, then powered
        let direct = |f: f64, n: i32| {
            let br = ((4.0 / 3.0 - 2.0 / 3.0) / (4.0 / 3.0 - f)).powf((4.0 / 3.0 - f) / (4.0 / 3.0))
                * ((2.0 / 3.0) / f).powf(f / (4.0 / 3.0));
            br.powi(4 * n)
        };
        let p1 = hoeffding_bound(0.85, 240).unwrap();
        assert!((p1 / direct(0.85, 240) - 1.0).abs() < 1e-9);
        assert!((p1 / 1.071866e-16 - 1.0).abs() < 1e-3, "{p1:e}");
        assert!(p1 <= 2.4e-14);
        let p2 = hoeffding_bound(0.91, 150).unwrap();
        assert!((p2 / direct(0.91, 150) - 1.0).abs() < 1e-9);
        assert!((p2 / 1.717057e-18 - 1.0).abs() < 1e-3, "{p2:e}");
        assert!(p2 <= 1.5e-16);
    }

    #[test]
    fn domain_errors() {
        assert!(hoeffding_bound(4.0 / 3.0, 10).is_err());
        assert!(hoeffding_bound(1.5, 10).is_err());
        assert!(hoeffding_bound(0.9, 0).is_err());
        assert!(hoeffding_bound(f64::NAN, 10).is_err());
    }

    #[test]
    fn monotone_on_grid() {
        let fs: Vec<f64> = (1..60).map(|k| 2.0 / 3.0 + k as f64 * 0.01).collect();
        for n in [1u64, 5, 50, 150, 240] {
            for w in fs.windows(2) {
                let a = hoeffding_ln_bound(w[0], n).unwrap().ln;
                let b = hoeffding_ln_bound(w[1], n).unwrap().ln;
                assert!(b < a, "not decreasing in F at {w:?}, n={n}");
            }
        }
        for f in &fs {
            for n in 1..200u64 {
                assert!(hoeffding_ln_bound(*f, n + 1).unwrap().ln < hoeffding_ln_bound(*f, n).unwrap().ln);
            }
        }
    }

    #[test]
    fn log_space_does_not_underflow() {
        let p = hoeffding_ln_bound(1.0, 100_000).unwrap();
        assert_eq!(p.value(), 0.0);
        let (m, e) = p.mantissa_exponent();
        assert!((1.0..10.0).contains(&m));
        assert!(e < -300);
        let q = hoeffding_ln_bound(0.85, 240).unwrap();
        let (m, e) = q.mantissa_exponent();
        assert_eq!(e, -16);
        assert!((m - 1.071866).abs() < 1e-5);
    }

    #[test]
    fn bootstrap_zero_variance() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        assert!(bootstrap_mean_error(&[0.9; 50], 200, &mut rng).unwrap() < 1e-12);
        let extreme = CountTable {
            z: BasisCounts { plus: 500, minus: 0 },
            x: BasisCounts { plus: 500, minus: 0 },
            y: BasisCounts { plus: 0, minus: 500 },
        };
        let s = bootstrap_counts_error(&extreme, &PureState::t0(), 200, &mut rng).unwrap();
        assert!(s < 1e-12, "{s}");
    }

    #[test]
    fn bootstrap_matches_binomial_propagation() {
        let counts = CountTable {
            z: BasisCounts { plus: 900, minus: 100 },
            x: BasisCounts { plus: 500, minus: 500 },
            y: BasisCounts { plus: 500, minus: 500 },
        };
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let s = bootstrap_counts_error(&counts, &PureState::t0(), 2000, &mut rng).unwrap();
        // F = (1 + r_z)/2 = p_plus, so σ_F = √(p(1−p)/shots)
        let analytic = (0.9f64 * 0.1 / 1000.0).sqrt();
        assert!((s / analytic - 1.0).abs() < 0.2, "bootstrap {s}, analytic {analytic}");
    }

    #[test]
    fn bootstrap_at_experiment_scale() {
        // 240 heralded events split over three bases, calibrated receiver state
        let target = Pauli::Y.unitary().apply_pure(&PureState::diagonal());
        let rho = apply_visibility(&target.projector(), 0.75).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let counts = simulate_counts(&rho, 80, &mut rng).unwrap();
        let s = bootstrap_counts_error(&counts, &target, DEFAULT_RESAMPLES, &mut rng).unwrap();
        assert!(s > 0.01 && s < 0.09, "σ = {s}");
    }

    #[test]
    fn bootstrap_input_checks() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        assert!(bootstrap_mean_error(&[], 200, &mut rng).is_err());
        assert!(bootstrap_mean_error(&[1.0], 10, &mut rng).is_err());
    }

    #[test]
    fn bootstrap_is_deterministic() {
        let vals: Vec<f64> = (0..100).map(|k| (k as f64 * 0.37).sin()).collect();
        let a = bootstrap_mean_error(&vals, 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = bootstrap_mean_error(&vals, 500, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }
}
