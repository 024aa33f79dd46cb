//! Finite-shot estimation of the witness.
//!
//! Each shot draws a basis state from `|ψ|²` by inverse CDF and records
//! the parity `(−1)^(b_i+b_j)`; an experiment of `n` shots reports the
//! squared mean parity. Every `(shot_count, iteration)` experiment has its
//! own ChaCha stream, so sweeps are reproducible in any execution order.

use crate::compiler::{compile_schedule, CompileOptions};
use crate::error::{Error, Result};
use crate::par;
use crate::schedule::Schedule;
use crate::state::{zz_parity, StateVector};
use crate::witness::{make_pair_state, PairStateKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};
use std::fmt::Write;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ShotConfig {
    pub shot_counts: Vec<usize>,
    pub iterations: usize,
    pub confidence_level: f64,
    pub seed: u64,
}

impl Default for ShotConfig {
    fn default() -> Self {
        Self {
            shot_counts: (50..=20_000).step_by(50).collect(),
            iterations: 100,
            confidence_level: 0.95,
            seed: 0,
        }
    }
}

impl ShotConfig {
    pub fn validate(&self) -> Result<()> {
        if self.shot_counts.is_empty() || self.shot_counts[0] == 0 {
            return Err(Error::InvalidArgument("shot counts must be positive and nonempty".into()));
        }
        if self.shot_counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument("shot counts must be strictly increasing".into()));
        }
        if self.iterations < 2 {
            return Err(Error::InvalidArgument("need at least two iterations per shot count".into()));
        }
        if !(self.confidence_level > 0.0 && self.confidence_level < 1.0) {
            return Err(Error::InvalidArgument(format!(
                "confidence level must lie in (0, 1), got {}",
                self.confidence_level
            )));
        }
        Ok(())
    }
}

/// Independent stream for one experiment.
pub fn experiment_rng(seed: u64, shot_count: usize, iteration: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(((shot_count as u64) << 32) | iteration as u64);
    rng
}

/// Two-sided standard-normal quantile for `level`, e.g. 1.959964 at 0.95.
pub fn z_score(level: f64) -> f64 {
    Normal::standard().inverse_cdf(0.5 + level / 2.0)
}

/// Precomputed cumulative distribution over basis states with their parity.
#[derive(Clone, Debug)]
pub struct ParitySampler {
    cdf: Vec<f64>,
    parity: Vec<f64>,
}

impl ParitySampler {
    pub fn new(state: &StateVector, pair: (usize, usize)) -> Result<Self> {
        let norm = state.norm_sqr();
        if (norm - 1.0).abs() > 1e-10 {
            return Err(Error::Unnormalized(norm));
        }
        // validates the pair
        state.expectation_zz(pair.0, pair.1)?;
        let n = state.n_qubits();
        let mut acc = 0.0;
        let cdf = state
            .probabilities()
            .into_iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();
        let parity = (0..state.dim()).map(|b| zz_parity(b, pair.0, pair.1, n)).collect();
        Ok(Self { cdf, parity })
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        let u = rng.random::<f64>() * self.cdf[self.cdf.len() - 1];
        let idx = self.cdf.partition_point(|c| *c <= u).min(self.cdf.len() - 1);
        self.parity[idx]
    }

    /// Mean parity `Z̄` over `n_shots` draws.
    pub fn sample_mean<R: Rng + ?Sized>(&self, n_shots: usize, rng: &mut R) -> f64 {
        let sum: f64 = (0..n_shots).map(|_| self.draw(rng)).sum();
        sum / n_shots as f64
    }
}

/// `(Z̄)²` from `n_shots` simulated measurements.
pub fn sample_zz_witness<R: Rng + ?Sized>(
    final_state: &StateVector,
    pair: (usize, usize),
    n_shots: usize,
    rng: &mut R,
) -> Result<f64> {
    if n_shots == 0 {
        return Err(Error::InvalidArgument("need at least one shot".into()));
    }
    let m = ParitySampler::new(final_state, pair)?.sample_mean(n_shots, rng);
    Ok(m * m)
}

fn mean_and_variance(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    let var = samples.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}

/// `mean ± z(level)·s` with `s` the sample standard deviation.
pub fn confidence_interval(samples: &[f64], level: f64) -> Result<(f64, f64)> {
    if samples.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "confidence interval needs at least 2 samples, got {}",
            samples.len()
        )));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidArgument(format!("confidence level {level} outside (0, 1)")));
    }
    let (mean, var) = mean_and_variance(samples);
    let half = z_score(level) * var.sqrt();
    Ok((mean - half, mean + half))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShotRow {
    pub shot_count: usize,
    /// Mean of the squared-parity witness estimates.
    pub mean: f64,
    /// Sample variance of the witness estimates across iterations.
    pub variance: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    /// Sample standard deviation across iterations.
    pub std: f64,
    /// Standard error of `mean`.
    pub sem: f64,
    /// Mean of the unsquared estimates `Z̄`.
    pub zz_mean: f64,
    /// Sample variance of `Z̄` across iterations.
    pub zz_variance: f64,
}

impl ShotRow {
    pub fn ci_half_width(&self) -> f64 {
        (self.ci_high - self.ci_low) / 2.0
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ShotStatistics {
    pub confidence_level: f64,
    pub iterations: usize,
    pub rows: Vec<ShotRow>,
}

impl ShotStatistics {
    pub const CSV_HEADER: &'static str = "shot_count,mean,variance,ci_low,ci_high,std,sem,zz_mean,zz_variance";

    pub fn to_csv(&self) -> String {
        let mut out = String::from(Self::CSV_HEADER);
        out.push('\n');
        for r in &self.rows {
            writeln!(
                out,
                "{},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e},{:.17e}",
                r.shot_count, r.mean, r.variance, r.ci_low, r.ci_high, r.std, r.sem, r.zz_mean, r.zz_variance
            )
            .unwrap();
        }
        out
    }

    pub fn row(&self, shot_count: usize) -> Option<&ShotRow> {
        self.rows.iter().find(|r| r.shot_count == shot_count)
    }
}

/// Repeated experiments on a fixed final state.
pub fn sweep_state(final_state: &StateVector, pair: (usize, usize), config: &ShotConfig) -> Result<ShotStatistics> {
    config.validate()?;
    let sampler = ParitySampler::new(final_state, pair)?;
    let iters = config.iterations;
    let jobs = config.shot_counts.len() * iters;
    let means = par::map_indexed(jobs, |job| {
        let (ci, it) = (job / iters, job % iters);
        let shots = config.shot_counts[ci];
        sampler.sample_mean(shots, &mut experiment_rng(config.seed, shots, it))
    });
    let z = z_score(config.confidence_level);
    let rows = config
        .shot_counts
        .iter()
        .zip(means.chunks(iters))
        .map(|(&shot_count, zbar)| {
            let witness: Vec<f64> = zbar.iter().map(|m| m * m).collect();
            let (mean, variance) = mean_and_variance(&witness);
            let (zz_mean, zz_variance) = mean_and_variance(zbar);
            let std = variance.sqrt();
            ShotRow {
                shot_count,
                mean,
                variance,
                ci_low: mean - z * std,
                ci_high: mean + z * std,
                std,
                sem: std / (iters as f64).sqrt(),
                zz_mean,
                zz_variance,
            }
        })
        .collect();
    Ok(ShotStatistics {
        confidence_level: config.confidence_level,
        iterations: iters,
        rows,
    })
}

/// Prepares `kind` on `pair`, runs the compiled circuit gate by gate and
/// sweeps the shot counts.
pub fn sweep(schedule: &Schedule, kind: PairStateKind, pair: (usize, usize), config: &ShotConfig) -> Result<ShotStatistics> {
    let circuit = compile_schedule(schedule, &CompileOptions::default());
    let fin = make_pair_state(kind, pair, schedule.n_qubits())?.apply_circuit(&circuit)?;
    sweep_state(&fin, pair, config)
}
