//! Edge-sparsification estimates.
//!
//! Each edge survives independently with probability `p`; a butterfly
//! survives only if all four of its edges do, so the exact count on the
//! sample divided by `p⁴` is an unbiased estimate of the full count. The
//! exact counter is a pluggable [`ExactCounter`].

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exact::{count_vpp, prepare_vpp, CountReport};
use crate::graph::BipartiteGraph;

/// Counts butterflies exactly on a sampled graph.
pub trait ExactCounter: Sync {
    fn count(&self, g: &BipartiteGraph) -> Result<CountReport>;
}

/// The cache-aware vertex-priority counter, including projection.
#[derive(Clone, Copy, Debug, Default)]
pub struct VppCounter;

impl ExactCounter for VppCounter {
    fn count(&self, g: &BipartiteGraph) -> Result<CountReport> {
        count_vpp(&prepare_vpp(g).0)
    }
}

fn check_probability(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::config(format!(
            "sampling probability {p} outside (0, 1]"
        )))
    }
}

/// Generator for trial `trial` under `seed`: one ChaCha stream per trial.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

fn sparsify_with(g: &BipartiteGraph, p: f64, rng: &mut ChaCha8Rng) -> Result<BipartiteGraph> {
    check_probability(p)?;
    let l = g.lower_count();
    let labels = g.labels();
    let kept: Vec<_> = if p == 1.0 {
        g.edges().to_vec()
    } else {
        g.edges()
            .iter()
            .copied()
            .filter(|_| rng.gen_bool(p))
            .collect()
    };
    BipartiteGraph::from_internal_edges(labels[..l].to_vec(), labels[l..].to_vec(), kept)
}

/// Keeps each edge independently with probability `p`. Vertices (and their
/// labels) are unchanged, so sampled vertices may become isolated.
pub fn sparsify(g: &BipartiteGraph, p: f64, seed: u64) -> Result<BipartiteGraph> {
    sparsify_with(g, p, &mut trial_rng(seed, 0))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Estimate {
    pub estimate: f64,
    /// Exact count on the sampled graph.
    pub sampled_butterflies: u128,
    pub sampled_edges: usize,
    pub wedges_processed: u64,
}

pub fn estimate_with(
    g: &BipartiteGraph,
    p: f64,
    seed: u64,
    counter: &dyn ExactCounter,
) -> Result<Estimate> {
    run_one(g, p, &mut trial_rng(seed, 0), counter)
}

fn run_one(
    g: &BipartiteGraph,
    p: f64,
    rng: &mut ChaCha8Rng,
    counter: &dyn ExactCounter,
) -> Result<Estimate> {
    let sample = sparsify_with(g, p, rng)?;
    let report = counter.count(&sample)?;
    Ok(Estimate {
        estimate: report.butterflies as f64 / p.powi(4),
        sampled_butterflies: report.butterflies,
        sampled_edges: sample.m(),
        wedges_processed: report.wedges_processed,
    })
}

/// Unbiased estimate of the butterfly count from one sample.
pub fn estimate_butterflies(g: &BipartiteGraph, p: f64, seed: u64) -> Result<f64> {
    Ok(estimate_with(g, p, seed, &VppCounter)?.estimate)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TrialSet {
    pub p: f64,
    pub seed: u64,
    pub trials: usize,
    pub estimates: Vec<f64>,
    /// Wedges the exact counter processed in each trial.
    pub wedges: Vec<u64>,
}

impl TrialSet {
    pub fn mean(&self) -> f64 {
        self.estimates.iter().sum::<f64>() / self.estimates.len() as f64
    }

    /// Sample variance; zero for a single trial.
    pub fn variance(&self) -> f64 {
        let n = self.estimates.len();
        if n < 2 {
            return 0.0;
        }
        let mean = self.mean();
        self.estimates
            .iter()
            .map(|x| (x - mean).powi(2))
            .sum::<f64>()
            / (n - 1) as f64
    }

    pub fn std_error(&self) -> f64 {
        (self.variance() / self.estimates.len() as f64).sqrt()
    }

    pub fn mean_wedges(&self) -> f64 {
        self.wedges.iter().sum::<u64>() as f64 / self.wedges.len() as f64
    }

    pub fn summary(&self, exact: Option<u128>) -> Summary {
        let mean = self.mean();
        Summary {
            p: self.p,
            trials: self.trials,
            mean,
            variance: self.variance(),
            exact,
            relative_error: exact
                .filter(|&e| e > 0)
                .map(|e| (mean - e as f64).abs() / e as f64),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub p: f64,
    pub trials: usize,
    pub mean: f64,
    pub variance: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub exact: Option<u128>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub relative_error: Option<f64>,
}

/// Runs `trials` independent estimates. Trial `i` draws from stream `i` of
/// the seeded generator, so results do not depend on how trials are spread
/// over threads.
pub fn run_trials_with(
    g: &BipartiteGraph,
    p: f64,
    trials: usize,
    seed: u64,
    counter: &dyn ExactCounter,
) -> Result<TrialSet> {
    check_probability(p)?;
    if trials == 0 {
        return Err(Error::config("at least one trial is required"));
    }
    let results: Vec<Estimate> = (0..trials as u64)
        .into_par_iter()
        .map(|i| run_one(g, p, &mut trial_rng(seed, i), counter))
        .collect::<Result<_>>()?;
    Ok(TrialSet {
        p,
        seed,
        trials,
        estimates: results.iter().map(|e| e.estimate).collect(),
        wedges: results.iter().map(|e| e.wedges_processed).collect(),
    })
}

pub fn run_trials(g: &BipartiteGraph, p: f64, trials: usize, seed: u64) -> Result<TrialSet> {
    run_trials_with(g, p, trials, seed, &VppCounter)
}
