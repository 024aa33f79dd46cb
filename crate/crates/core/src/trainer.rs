//! Finite-difference gradient descent on schedule parameters.
//!
//! Loss: `L = Σ_items (witness − target)²`. With the symmetric flag the
//! free parameters are `(K, ε, ζ)` per chunk, shared by every qubit and
//! pair; otherwise every per-qubit and per-pair value is free.

use crate::error::{Error, Result};
use crate::hamiltonian::{Evolution, Method};
use crate::par;
use crate::schedule::{pair_count, ChunkParams, Schedule};
use crate::witness::{build_training_set, TrainingSet};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::fmt::Write;

/// Total evolution time used for fresh schedules.
pub const DEFAULT_TOTAL_TIME: f64 = 1.58;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct TrainerConfig {
    pub learning_rate: f64,
    /// Heavy-ball coefficient; 0 gives plain gradient descent.
    pub momentum: f64,
    pub max_epochs: usize,
    pub target_rms: f64,
    /// Central-difference step.
    pub gradient_step: f64,
    pub symmetric: bool,
    pub chunk_count: usize,
    pub seed: u64,
    pub method: Method,
}

impl Default for TrainerConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.05,
            momentum: 0.9,
            max_epochs: 2000,
            target_rms: 1e-3,
            gradient_step: 1e-5,
            symmetric: true,
            chunk_count: 4,
            seed: 0,
            method: Method::Chunked,
        }
    }
}

impl TrainerConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("learning_rate", self.learning_rate),
            ("target_rms", self.target_rms),
            ("gradient_step", self.gradient_step),
        ];
        for (name, v) in positive {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
            }
        }
        if !(0.0..1.0).contains(&self.momentum) {
            return Err(Error::InvalidArgument(format!(
                "momentum must lie in [0, 1), got {}",
                self.momentum
            )));
        }
        if self.chunk_count == 0 {
            return Err(Error::InvalidArgument("chunk_count must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrainResult {
    pub schedule: Schedule,
    /// rms before each update, plus the final evaluation.
    pub rms_history: Vec<f64>,
    pub epochs_used: usize,
    pub converged: bool,
}

impl TrainResult {
    pub fn final_rms(&self) -> f64 {
        *self.rms_history.last().expect("history holds at least the initial evaluation")
    }

    /// `epoch,rms` rows.
    pub fn history_csv(&self) -> String {
        let mut out = String::from("epoch,rms\n");
        for (e, r) in self.rms_history.iter().enumerate() {
            writeln!(out, "{e},{r:.17e}").unwrap();
        }
        out
    }
}

/// Flattens the free parameters of `schedule`.
pub fn parameter_vector(schedule: &Schedule, symmetric: bool) -> Result<Vec<f64>> {
    if symmetric {
        if !schedule.is_symmetric() {
            return Err(Error::InvalidArgument(
                "symmetric training needs a symmetric schedule".into(),
            ));
        }
        Ok(schedule
            .shared_params()
            .into_iter()
            .flat_map(|(k, e, z)| [k, e, z])
            .collect())
    } else {
        Ok(schedule
            .chunks()
            .iter()
            .flat_map(|c| c.k.iter().chain(&c.eps).chain(&c.zeta).copied())
            .collect())
    }
}

/// Inverse of [`parameter_vector`] using `template` for shape and timing.
pub fn schedule_from_parameters(template: &Schedule, params: &[f64], symmetric: bool) -> Result<Schedule> {
    let n = template.n_qubits();
    let c = template.chunk_count();
    if symmetric {
        if params.len() != 3 * c {
            return Err(Error::DimensionMismatch {
                expected: 3 * c,
                found: params.len(),
            });
        }
        let shared: Vec<_> = params.chunks(3).map(|p| (p[0], p[1], p[2])).collect();
        Schedule::symmetric(n, template.total_time(), &shared)
    } else {
        let per = 2 * n + pair_count(n);
        if params.len() != per * c {
            return Err(Error::DimensionMismatch {
                expected: per * c,
                found: params.len(),
            });
        }
        let chunks = params
            .chunks(per)
            .map(|p| ChunkParams {
                k: p[..n].to_vec(),
                eps: p[n..2 * n].to_vec(),
                zeta: p[2 * n..].to_vec(),
            })
            .collect();
        Schedule::new(n, chunks, template.total_time(), false)
    }
}

/// Witness value of every training item, in item order.
pub fn item_witnesses(schedule: &Schedule, set: &TrainingSet, method: Method) -> Result<Vec<f64>> {
    if set.n_qubits() != schedule.n_qubits() {
        return Err(Error::DimensionMismatch {
            expected: schedule.n_qubits(),
            found: set.n_qubits(),
        });
    }
    let evolution = Evolution::prepare(schedule, method)?;
    par::map_slice(set.items(), |item| {
        let fin = evolution.apply(&item.state)?;
        let zz = fin.expectation_zz(item.pair.0, item.pair.1)?;
        Ok(zz * zz)
    })
    .into_iter()
    .collect()
}

/// `Σ (witness − target)²`.
pub fn squared_error(schedule: &Schedule, set: &TrainingSet, method: Method) -> Result<f64> {
    let w = item_witnesses(schedule, set, method)?;
    let loss: f64 = w
        .iter()
        .zip(set.items())
        .map(|(w, it)| (w - it.target).powi(2))
        .sum();
    if loss.is_finite() {
        Ok(loss)
    } else {
        Err(Error::NonFinite("loss".into()))
    }
}

/// Root-mean-square deviation from the targets.
pub fn rms_error(schedule: &Schedule, set: &TrainingSet, method: Method) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    Ok((squared_error(schedule, set, method)? / set.len() as f64).sqrt())
}

/// Central-difference gradient of `L` with respect to the free parameters.
pub fn gradient(schedule: &Schedule, set: &TrainingSet, config: &TrainerConfig) -> Result<Vec<f64>> {
    if set.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let theta = parameter_vector(schedule, config.symmetric)?;
    let h = config.gradient_step;
    let loss_at = |p: usize, delta: f64| -> Result<f64> {
        let mut shifted = theta.clone();
        shifted[p] += delta;
        squared_error(
            &schedule_from_parameters(schedule, &shifted, config.symmetric)?,
            set,
            config.method,
        )
    };
    par::map_indexed(theta.len(), |p| Ok((loss_at(p, h)? - loss_at(p, -h)?) / (2.0 * h)))
        .into_iter()
        .collect()
}

/// Random symmetric schedule: `K = 2.5 + U(−0.1, 0.1)`, `ε, ζ ~ U(−0.1, 0.1)`.
pub fn random_schedule(n_qubits: usize, config: &TrainerConfig) -> Result<Schedule> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut u = move || rng.random_range(-0.1..0.1);
    if config.symmetric {
        let shared: Vec<_> = (0..config.chunk_count)
            .map(|_| (2.5 + u(), u(), u()))
            .collect();
        Schedule::symmetric(n_qubits, DEFAULT_TOTAL_TIME, &shared)
    } else {
        let chunks = (0..config.chunk_count)
            .map(|_| ChunkParams {
                k: (0..n_qubits).map(|_| 2.5 + u()).collect(),
                eps: (0..n_qubits).map(|_| u()).collect(),
                zeta: (0..pair_count(n_qubits)).map(|_| u()).collect(),
            })
            .collect();
        Schedule::new(n_qubits, chunks, DEFAULT_TOTAL_TIME, false)
    }
}

const DIVERGENCE_FACTOR: f64 = 10.0;
const DIVERGENCE_PATIENCE: usize = 50;

/// Momentum gradient descent until `rms ≤ target_rms` or `max_epochs`.
pub fn train(init: &Schedule, set: &TrainingSet, config: &TrainerConfig) -> Result<TrainResult> {
    config.validate()?;
    if set.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut theta = parameter_vector(init, config.symmetric)?;
    let mut velocity = vec![0.0; theta.len()];
    let scale = config.learning_rate / set.len() as f64;
    let mut schedule = init.clone();
    let mut history = Vec::new();
    let mut best = (f64::INFINITY, init.clone());
    let mut strikes = 0;
    let mut epochs_used = 0;
    let initial_rms = rms_error(&schedule, set, config.method)?;
    let mut rms = initial_rms;
    loop {
        history.push(rms);
        if rms < best.0 {
            best = (rms, schedule.clone());
        }
        if rms <= config.target_rms || epochs_used == config.max_epochs {
            break;
        }
        strikes = if rms > DIVERGENCE_FACTOR * initial_rms { strikes + 1 } else { 0 };
        if strikes >= DIVERGENCE_PATIENCE {
            return Err(Error::Diverged {
                epoch: epochs_used,
                rms,
                initial_rms,
                last_good: Box::new(best.1),
            });
        }
        let g = gradient(&schedule, set, config)?;
        for ((t, v), g) in theta.iter_mut().zip(&mut velocity).zip(&g) {
            *v = config.momentum * *v - scale * g;
            *t += *v;
        }
        schedule = schedule_from_parameters(&schedule, &theta, config.symmetric)?;
        epochs_used += 1;
        rms = rms_error(&schedule, set, config.method)?;
    }
    Ok(TrainResult {
        converged: rms <= config.target_rms,
        schedule,
        rms_history: history,
        epochs_used,
    })
}

/// Trains an `n`-qubit symmetric schedule starting from `prev`'s values.
///
/// When `config.chunk_count` is a multiple of the previous chunk count,
/// each previous chunk is duplicated to fill the finer grid.
pub fn bootstrap(prev: &TrainResult, n: usize, config: &TrainerConfig) -> Result<TrainResult> {
    if !prev.schedule.is_symmetric() {
        return Err(Error::InvalidArgument(
            "bootstrapping requires a symmetric schedule".into(),
        ));
    }
    let init = fit_chunks(&prev.schedule.resized(n)?, config.chunk_count)?;
    train(&init, &build_training_set(n)?, config)
}

/// Refines `schedule` onto `chunk_count` chunks when that is a multiple of
/// its current count.
pub fn fit_chunks(schedule: &Schedule, chunk_count: usize) -> Result<Schedule> {
    let have = schedule.chunk_count();
    if chunk_count == have {
        Ok(schedule.clone())
    } else if chunk_count.is_multiple_of(have) {
        schedule.refine(chunk_count / have)
    } else {
        Err(Error::InvalidArgument(format!(
            "cannot map {have} chunks onto {chunk_count}"
        )))
    }
}

/// One row of a bootstrap chain.
#[derive(Clone, Debug, PartialEq)]
pub struct BootstrapStep {
    pub n_qubits: usize,
    pub initial_rms: f64,
    pub result: TrainResult,
}

/// Trains `init` at `from` qubits, then bootstraps one qubit at a time
/// up to `to` inclusive.
pub fn bootstrap_chain(init: &Schedule, from: usize, to: usize, config: &TrainerConfig) -> Result<Vec<BootstrapStep>> {
    if from < 2 || to < from {
        return Err(Error::InvalidArgument(format!("bad qubit range {from}..={to}")));
    }
    let start = fit_chunks(&init.resized(from)?, config.chunk_count)?;
    let first = train(&start, &build_training_set(from)?, config)?;
    let mut steps = vec![BootstrapStep {
        n_qubits: from,
        initial_rms: first.rms_history[0],
        result: first,
    }];
    for n in from + 1..=to {
        let prev = &steps.last().expect("nonempty").result;
        let result = bootstrap(prev, n, config)?;
        steps.push(BootstrapStep {
            n_qubits: n,
            initial_rms: result.rms_history[0],
            result,
        });
    }
    Ok(steps)
}

/// `n_qubits,epochs,initial_rms,final_rms,K_1..K_C,eps_1..eps_C,zeta_1..zeta_C`.
pub fn bootstrap_summary_csv(steps: &[BootstrapStep]) -> String {
    let c = steps.first().map_or(0, |s| s.result.schedule.chunk_count());
    let mut out = String::from("n_qubits,epochs,initial_rms,final_rms");
    for name in ["K", "eps", "zeta"] {
        for k in 1..=c {
            write!(out, ",{name}_{k}").unwrap();
        }
    }
    out.push('\n');
    for s in steps {
        let shared = s.result.schedule.shared_params();
        write!(
            out,
            "{},{},{:.17e},{:.17e}",
            s.n_qubits,
            s.result.epochs_used,
            s.initial_rms,
            s.result.final_rms()
        )
        .unwrap();
        for pick in [0, 1, 2] {
            for p in &shared {
                let v = [p.0, p.1, p.2][pick];
                write!(out, ",{v:.17e}").unwrap();
            }
        }
        out.push('\n');
    }
    out
}
