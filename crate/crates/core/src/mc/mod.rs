//! Monte Carlo check of the closed forms through the two-stage generative
//! model: the true effect is drawn from `N(b, v1)` and the replicating
//! estimate from `N(beta, v2)`.
//!
//! Normal variates come from the quantile kernel applied to Philox uniforms
//! keyed by `(seed, trial)`. Trials are counted in fixed chunks and the
//! integer counts summed, so a run is bit-identical for any thread count.

pub mod philox;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::normal::standard_normal_quantile;
use crate::power::{self, PowerSpec};
use crate::replication::{self, ReplicationQuery, SampleSize};
use crate::study::StudyDesign;

const CHUNK: u64 = 1 << 16;

/// What the replication has to achieve.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SimMode {
    /// One-sided `P <= p3` against a null with variance `v1 + v2`.
    #[default]
    PValueReplication,
    /// An estimate above zero.
    SameSign,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
    pub design: StudyDesign,
    pub query: ReplicationQuery,
    pub mode: SimMode,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SimReport {
    pub estimate: f64,
    pub std_error: f64,
    pub trials: u64,
    pub seed: u64,
    pub closed_form: f64,
    /// `|estimate - closed_form| / std_error`.
    pub z_discrepancy: f64,
}

impl SimReport {
    fn new(successes: u64, trials: u64, seed: u64, closed_form: f64) -> Self {
        let estimate = successes as f64 / trials as f64;
        let std_error = (estimate * (1.0 - estimate) / trials as f64).sqrt();
        let diff = (estimate - closed_form).abs();
        // A degenerate estimate (0 or 1) has no spread; fall back to the
        // spread implied by the closed form.
        let scale = if std_error > 0.0 {
            std_error
        } else {
            (closed_form * (1.0 - closed_form) / trials as f64).sqrt()
        };
        let z_discrepancy = if diff == 0.0 {
            0.0
        } else if scale > 0.0 {
            (diff / scale).min(f64::MAX)
        } else {
            f64::MAX
        };
        SimReport {
            estimate,
            std_error,
            trials,
            seed,
            closed_form,
            z_discrepancy,
        }
    }

    /// Whether the closed form lies within `k` standard errors.
    pub fn within(&self, k: f64) -> bool {
        self.z_discrepancy <= k
    }
}

/// Standard normal variate number `lane` (0..4) of trial `index`.
#[inline]
pub fn standard_normal(seed: u64, index: u64, lane: u32) -> f64 {
    let (a, b) = philox::uniform_pair(seed, index, lane / 2);
    standard_normal_quantile(if lane.is_multiple_of(2) { a } else { b })
}

/// Counts trial indices for which `success` holds.
fn count<F>(trials: u64, success: F) -> u64
where
    F: Fn(u64) -> bool + Sync,
{
    let chunks = trials.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(trials);
            (start..end).filter(|&i| success(i)).count() as u64
        })
        .sum()
}

fn critical_value(cfg: &SimConfig) -> f64 {
    -standard_normal_quantile(cfg.query.p3().value())
}

/// Replication with a finite second study.
pub fn simulate_replication(cfg: &SimConfig) -> Result<SimReport> {
    if cfg.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let n2 = cfg.query.n2();
    if n2.is_infinite() {
        return Err(Error::InfiniteSampleSize);
    }
    let d = &cfg.design;
    let (b, s1) = (d.effect(), d.sem());
    let s2 = n2.variance(d.sd()).sqrt();
    let seed = cfg.seed;
    let (threshold, closed_form) = match cfg.mode {
        SimMode::PValueReplication => (
            critical_value(cfg) * (s1 * s1 + s2 * s2).sqrt(),
            replication::prob_replication(d, &cfg.query).value(),
        ),
        SimMode::SameSign => (0.0, replication::prob_same_sign(d, n2).value()),
    };
    let hits = count(cfg.trials, |i| {
        let truth = b + s1 * standard_normal(seed, i, 0);
        let repl = truth + s2 * standard_normal(seed, i, 1);
        repl > threshold
    });
    Ok(SimReport::new(hits, cfg.trials, seed, closed_form))
}

/// Replication by an infinitely large study, which observes the true effect.
/// `cfg.query.n2()` is ignored.
pub fn simulate_truth(cfg: &SimConfig) -> Result<SimReport> {
    if cfg.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let d = &cfg.design;
    let (b, s1) = (d.effect(), d.sem());
    let seed = cfg.seed;
    let (threshold, closed_form) = match cfg.mode {
        SimMode::PValueReplication => {
            let q = ReplicationQuery::new(cfg.query.p3(), SampleSize::Infinite)?;
            (critical_value(cfg) * s1, replication::prob_replication(d, &q).value())
        }
        SimMode::SameSign => (0.0, replication::prob_same_sign(d, SampleSize::Infinite).value()),
    };
    let hits = count(cfg.trials, |i| b + s1 * standard_normal(seed, i, 0) > threshold);
    Ok(SimReport::new(hits, cfg.trials, seed, closed_form))
}

/// The rival criterion: success when `b_repl / sqrt(v2)` clears the critical
/// value. `cfg.mode` is ignored.
pub fn simulate_rival(cfg: &SimConfig) -> Result<SimReport> {
    if cfg.trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let closed_form = replication::prob_replication_rival_design(&cfg.design, &cfg.query)?.value();
    let d = &cfg.design;
    let (b, s1) = (d.effect(), d.sem());
    let s2 = cfg.query.n2().variance(d.sd()).sqrt();
    let threshold = critical_value(cfg) * s2;
    let seed = cfg.seed;
    let hits = count(cfg.trials, |i| {
        let truth = b + s1 * standard_normal(seed, i, 0);
        truth + s2 * standard_normal(seed, i, 1) > threshold
    });
    Ok(SimReport::new(hits, cfg.trials, seed, closed_form))
}

/// Dispatches on the replicating sample size.
pub fn simulate(cfg: &SimConfig) -> Result<SimReport> {
    if cfg.query.n2().is_infinite() {
        simulate_truth(cfg)
    } else {
        simulate_replication(cfg)
    }
}

/// Predictive power with `m` stacked variances of size `SD^2 / n`: the pilot's
/// uncertainty about the effect, then `m - 1` further studies' sampling noise.
pub fn simulate_predictive_power(spec: &PowerSpec, n: u64, trials: u64, seed: u64) -> Result<SimReport> {
    if trials == 0 {
        return Err(Error::ZeroTrials);
    }
    let closed_form = power::predictive_power(n, spec)?;
    let m = u32::from(spec.multiplicity());
    let se = spec.sd() / (n as f64).sqrt();
    let b = spec.effect().abs();
    let threshold = -standard_normal_quantile(spec.floor()) * se * f64::from(m).sqrt();
    let hits = count(trials, |i| {
        let noise: f64 = (0..m).map(|lane| standard_normal(seed, i, lane)).sum();
        b + se * noise > threshold
    });
    Ok(SimReport::new(hits, trials, seed, closed_form))
}

/// Sample mean and unbiased variance of `count` draws from the stream.
pub fn sample_moments(seed: u64, count: u64) -> (f64, f64) {
    let chunks = count.div_ceil(CHUNK);
    // Per-chunk sums are combined in chunk order to stay deterministic.
    let partial: Vec<(f64, f64)> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let start = c * CHUNK;
            let end = (start + CHUNK).min(count);
            (start..end).fold((0.0, 0.0), |(s, ss), i| {
                let x = standard_normal(seed, i, 0);
                (s + x, ss + x * x)
            })
        })
        .collect();
    let (sum, sum_sq) = partial.iter().fold((0.0, 0.0), |(s, ss), &(a, b)| (s + a, ss + b));
    let n = count as f64;
    let mean = sum / n;
    (mean, (sum_sq - n * mean * mean) / (n - 1.0))
}
