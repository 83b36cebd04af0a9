//! Deterministic Monte Carlo harness: sample an error, extract its syndrome,
//! decode, classify the residual, and aggregate logical-error-rate and
//! iteration statistics.
//!
//! Trial `k` of a batch always uses `RngStream(master_seed, k)`, so results
//! are bitwise identical for any worker count. Aggregation is a commutative
//! monoid over integer counters; only wall-clock timings vary between runs.

use std::time::{Duration, Instant};

use serde::Serialize;

use crate::bp::{decode_on_graph, DecoderConfig};
use crate::code::{CodeSpec, ResidualClass, TannerGraph};
use crate::noise::{sample_error, NoiseModel, PriorSet, RngStream};
use crate::QbpError;

/// Outcome classification of one Monte Carlo trial.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum TrialClass {
    /// Converged and the residual is in the stabilizer group.
    Success,
    /// Converged but the residual acts as a logical operator.
    UndetectedLogical,
    /// Hit the iteration cap.
    NotConverged,
}

#[derive(Debug, Clone)]
pub struct TrialOutcome {
    pub classification: TrialClass,
    pub iterations: usize,
    pub wall_time: Duration,
}

/// Aggregated batch statistics plus enough configuration echo to reproduce
/// the run.
#[derive(Debug, Clone, Serialize)]
pub struct RunStats {
    pub code_name: String,
    pub n_qubits: usize,
    pub n_logical: usize,
    pub noise: NoiseModel,
    pub config: DecoderConfig,
    pub master_seed: u64,
    pub trials: u64,
    pub successes: u64,
    pub undetected: u64,
    pub unconverged: u64,
    /// Mean iterations over all trials (failures contribute `iter_max`).
    pub mean_iterations: f64,
    /// Mean iterations over converged trials only (0 if none converged).
    pub mean_iterations_converged: f64,
    pub mean_wall_time_ms: f64,
}

impl RunStats {
    /// Undetected logical errors and non-convergences both count as logical
    /// errors.
    pub fn logical_error_rate(&self) -> f64 {
        if self.trials == 0 {
            return 0.0;
        }
        (self.undetected + self.unconverged) as f64 / self.trials as f64
    }

    /// Wilson 95% confidence interval for the logical error rate.
    pub fn ler_confidence(&self) -> (f64, f64) {
        wilson_interval(self.undetected + self.unconverged, self.trials)
    }
}

/// Wilson score interval at 95% confidence.
pub fn wilson_interval(hits: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.959963984540054f64;
    let n = trials as f64;
    let p = hits as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = (z / denom) * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}

/// Run one trial: sample, decode, classify. The decode is timed; a converged
/// estimate whose residual still flips a check indicates a decoder bug and
/// is surfaced as an error.
pub fn run_trial(
    code: &CodeSpec,
    model: &NoiseModel,
    config: &DecoderConfig,
    stream: RngStream,
) -> Result<TrialOutcome, QbpError> {
    let graph = TannerGraph::from_code(code);
    let priors = PriorSet::uniform(model, code.n_qubits());
    run_trial_on(code, &graph, model, &priors, config, stream)
}

fn run_trial_on(
    code: &CodeSpec,
    graph: &TannerGraph,
    model: &NoiseModel,
    priors: &PriorSet,
    config: &DecoderConfig,
    stream: RngStream,
) -> Result<TrialOutcome, QbpError> {
    let error = sample_error(model, code.n_qubits(), stream);
    let syndrome = code.syndrome_of(&error);
    let started = Instant::now();
    let outcome = decode_on_graph(graph, &syndrome, priors, config)?;
    let wall_time = started.elapsed();
    let classification = if !outcome.converged {
        TrialClass::NotConverged
    } else {
        let residual = outcome.estimate.mul(&error)?;
        match code.classify_residual(&residual)? {
            ResidualClass::InStabilizer => TrialClass::Success,
            ResidualClass::Logical => TrialClass::UndetectedLogical,
            ResidualClass::Detected => {
                return Err(QbpError::Internal(format!(
                    "converged estimate leaves a nonzero syndrome (stream {})",
                    stream.stream_index
                )))
            }
        }
    };
    Ok(TrialOutcome {
        classification,
        iterations: outcome.iterations,
        wall_time,
    })
}

#[derive(Default, Clone, Copy)]
struct Tally {
    successes: u64,
    undetected: u64,
    unconverged: u64,
    iter_sum: u64,
    iter_sum_converged: u64,
    converged: u64,
    wall_nanos: u128,
}

impl Tally {
    fn absorb(mut self, t: &TrialOutcome) -> Tally {
        match t.classification {
            TrialClass::Success => self.successes += 1,
            TrialClass::UndetectedLogical => self.undetected += 1,
            TrialClass::NotConverged => self.unconverged += 1,
        }
        self.iter_sum += t.iterations as u64;
        if t.classification != TrialClass::NotConverged {
            self.iter_sum_converged += t.iterations as u64;
            self.converged += 1;
        }
        self.wall_nanos += t.wall_time.as_nanos();
        self
    }

    fn merge(mut self, o: Tally) -> Tally {
        self.successes += o.successes;
        self.undetected += o.undetected;
        self.unconverged += o.unconverged;
        self.iter_sum += o.iter_sum;
        self.iter_sum_converged += o.iter_sum_converged;
        self.converged += o.converged;
        self.wall_nanos += o.wall_nanos;
        self
    }
}

/// Run `n_trials` independent trials. `workers` sets the thread pool size
/// (0 = rayon default); without the `parallel` feature, or with
/// `workers = 1`, trials run sequentially on the calling thread. Results are
/// identical either way.
pub fn run_batch(
    code: &CodeSpec,
    model: &NoiseModel,
    config: &DecoderConfig,
    n_trials: u64,
    master_seed: u64,
    workers: usize,
) -> Result<RunStats, QbpError> {
    if n_trials == 0 {
        return Err(QbpError::Config("n_trials must be at least 1".into()));
    }
    config.validate()?;
    let graph = TannerGraph::from_code(code);
    let priors = PriorSet::uniform(model, code.n_qubits());

    let trial = |k: u64| -> Result<Tally, QbpError> {
        let stream = RngStream::new(master_seed, k);
        let outcome = run_trial_on(code, &graph, model, &priors, config, stream)?;
        Ok(Tally::default().absorb(&outcome))
    };

    let tally = run_trials(n_trials, workers, &trial)?;

    Ok(RunStats {
        code_name: code.name().to_string(),
        n_qubits: code.n_qubits(),
        n_logical: code.n_logical(),
        noise: *model,
        config: config.clone(),
        master_seed,
        trials: n_trials,
        successes: tally.successes,
        undetected: tally.undetected,
        unconverged: tally.unconverged,
        mean_iterations: tally.iter_sum as f64 / n_trials as f64,
        mean_iterations_converged: if tally.converged > 0 {
            tally.iter_sum_converged as f64 / tally.converged as f64
        } else {
            0.0
        },
        mean_wall_time_ms: tally.wall_nanos as f64 / 1.0e6 / n_trials as f64,
    })
}

#[cfg(feature = "parallel")]
fn run_trials(
    n_trials: u64,
    workers: usize,
    trial: &(dyn Fn(u64) -> Result<Tally, QbpError> + Sync),
) -> Result<Tally, QbpError> {
    use rayon::prelude::*;
    if workers == 1 {
        return run_trials_sequential(n_trials, trial);
    }
    let run = || {
        (0..n_trials)
            .into_par_iter()
            .map(trial)
            .try_reduce(Tally::default, |a, b| Ok(a.merge(b)))
    };
    if workers == 0 {
        run()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(workers)
            .build()
            .map_err(|e| QbpError::Config(format!("thread pool: {e}")))?;
        pool.install(run)
    }
}

#[cfg(not(feature = "parallel"))]
fn run_trials(
    n_trials: u64,
    _workers: usize,
    trial: &(dyn Fn(u64) -> Result<Tally, QbpError> + Sync),
) -> Result<Tally, QbpError> {
    run_trials_sequential(n_trials, trial)
}

fn run_trials_sequential(
    n_trials: u64,
    trial: &(dyn Fn(u64) -> Result<Tally, QbpError> + Sync),
) -> Result<Tally, QbpError> {
    let mut tally = Tally::default();
    for k in 0..n_trials {
        tally = tally.merge(trial(k)?);
    }
    Ok(tally)
}

/// One row request for [`sweep`].
#[derive(Debug, Clone)]
pub struct SweepPoint<'a> {
    pub code: &'a CodeSpec,
    pub config: DecoderConfig,
    pub p: f64,
    pub bias: (f64, f64, f64),
}

/// Cartesian sweep over codes, decoder configs, and physical error rates,
/// in stable (code, decoder, p) row order. Every batch shares the master
/// seed, so rows at the same p are paired on identical error samples.
pub fn sweep(
    codes: &[&CodeSpec],
    configs: &[DecoderConfig],
    ps: &[f64],
    bias: (f64, f64, f64),
    n_trials: u64,
    master_seed: u64,
    workers: usize,
) -> Result<Vec<RunStats>, QbpError> {
    if codes.is_empty() || configs.is_empty() || ps.is_empty() {
        return Err(QbpError::Config("sweep over empty lists".into()));
    }
    let mut rows = Vec::with_capacity(codes.len() * configs.len() * ps.len());
    for code in codes {
        for config in configs {
            for &p in ps {
                let model = NoiseModel::biased(p, bias)?;
                rows.push(run_batch(code, &model, config, n_trials, master_seed, workers)?);
            }
        }
    }
    Ok(rows)
}

/// Locate the crossing of two LER curves sampled on the same p grid by
/// log-linear interpolation. Returns the first sign change; `None` when one
/// curve dominates the other on the whole grid.
pub fn estimate_crossing(ps: &[f64], ler_a: &[f64], ler_b: &[f64]) -> Option<f64> {
    assert_eq!(ps.len(), ler_a.len());
    assert_eq!(ps.len(), ler_b.len());
    let floor = 1e-12;
    let d: Vec<f64> = ler_a
        .iter()
        .zip(ler_b)
        .map(|(&a, &b)| (a.max(floor)).ln() - (b.max(floor)).ln())
        .collect();
    for i in 0..d.len().saturating_sub(1) {
        if d[i] == 0.0 {
            return Some(ps[i]);
        }
        if d[i].signum() != d[i + 1].signum() {
            let t = d[i] / (d[i] - d[i + 1]);
            return Some(ps[i] + t * (ps[i + 1] - ps[i]));
        }
    }
    None
}
