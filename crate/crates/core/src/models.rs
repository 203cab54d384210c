//! The two random set models and a Monte Carlo driver for `psi`.
//!
//! Every trial draws from its own ChaCha stream selected by
//! `(seed, trial_index)`, so results do not depend on how trials are
//! distributed over worker threads.

use std::collections::HashMap;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::set::{psi_of_set, IntegerSet};
use crate::sieve::PrimeTable;

pub const DEFAULT_QUANTILES: [f64; 3] = [0.05, 0.5, 0.95];

/// Below this inclusion probability the sampler skips geometric gaps
/// instead of flipping one coin per integer.
const GAP_SKIP_BELOW: f64 = 0.1;

/// `S(n; delta)`: each `a` in `[1, n]` is included independently with
/// probability `delta`.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BernoulliModel {
    n: u64,
    delta: f64,
}

impl BernoulliModel {
    pub fn new(n: u64, delta: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("model needs n >= 1".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(Error::Domain(format!("delta must lie in (0, 1), got {delta}")));
        }
        Ok(BernoulliModel { n, delta })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }
}

/// Uniform measure on the `k`-subsets of `[1, n]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
pub struct UniformKModel {
    n: u64,
    k: u64,
}

impl UniformKModel {
    pub fn new(n: u64, k: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("model needs n >= 1".into()));
        }
        if k > n {
            return Err(Error::Domain(format!("k = {k} exceeds n = {n}")));
        }
        Ok(UniformKModel { n, k })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> u64 {
        self.k
    }
}

#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub enum Model {
    Bernoulli(BernoulliModel),
    UniformK(UniformKModel),
}

impl Model {
    pub fn n(&self) -> u64 {
        match self {
            Model::Bernoulli(m) => m.n,
            Model::UniformK(m) => m.n,
        }
    }

    pub fn sample(&self, seed: u64, trial_index: u64) -> IntegerSet {
        match self {
            Model::Bernoulli(m) => sample_bernoulli(m, seed, trial_index),
            Model::UniformK(m) => sample_uniform_k(m, seed, trial_index),
        }
    }
}

fn trial_rng(seed: u64, trial_index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial_index);
    rng
}

pub fn sample_bernoulli(model: &BernoulliModel, seed: u64, trial_index: u64) -> IntegerSet {
    let mut rng = trial_rng(seed, trial_index);
    let n = model.n;
    let mut out = Vec::new();
    if model.delta >= GAP_SKIP_BELOW {
        out.extend((1..=n).filter(|_| rng.gen::<f64>() < model.delta));
    } else {
        // gaps between successes are geometric: P(gap = g) = (1-delta)^g delta
        let log_keep = (-model.delta).ln_1p();
        let mut pos = 0u64;
        loop {
            let u: f64 = 1.0 - rng.gen::<f64>();
            let gap = (u.ln() / log_keep).floor();
            if gap >= (n - pos) as f64 {
                break;
            }
            pos += gap as u64 + 1;
            out.push(pos);
        }
    }
    IntegerSet::from_sorted(n, out)
}

/// Uniform `k`-subset by partial Fisher-Yates over a sparse swap map.
pub fn sample_uniform_k(model: &UniformKModel, seed: u64, trial_index: u64) -> IntegerSet {
    let mut rng = trial_rng(seed, trial_index);
    let (n, k) = (model.n, model.k);
    let mut swapped: HashMap<u64, u64> = HashMap::with_capacity(2 * k as usize);
    let mut out = Vec::with_capacity(k as usize);
    for i in 0..k {
        let j = rng.gen_range(i..n);
        let at_j = *swapped.get(&j).unwrap_or(&j);
        let at_i = *swapped.get(&i).unwrap_or(&i);
        swapped.insert(j, at_i);
        out.push(at_j + 1);
    }
    out.sort_unstable();
    IntegerSet::from_sorted(n, out)
}

#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct SampleStats {
    pub trials: u64,
    pub mean_psi: f64,
    /// Unbiased; reported as 0 when `trials == 1`.
    pub var_psi: f64,
    pub mean_size: f64,
    pub quantiles: Vec<(f64, f64)>,
    /// Set when a single trial makes the variance undefined.
    pub degenerate: bool,
}

#[derive(Debug, Clone)]
pub struct MonteCarloRun {
    pub stats: SampleStats,
    /// `psi` of each trial, in trial order.
    pub psis: Vec<f64>,
    pub sizes: Vec<u64>,
}

/// Type-7 (linear interpolation) sample quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], level: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * level;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(sorted.len() - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

pub fn summarize(psis: &[f64], sizes: &[u64], levels: &[f64]) -> SampleStats {
    let trials = psis.len() as u64;
    let count = psis.len() as f64;
    let mean_psi = psis.iter().sum::<f64>() / count;
    let degenerate = trials < 2;
    let var_psi =
        if degenerate { 0.0 } else { psis.iter().map(|x| (x - mean_psi).powi(2)).sum::<f64>() / (count - 1.0) };
    let mut sorted = psis.to_vec();
    sorted.sort_by(f64::total_cmp);
    SampleStats {
        trials,
        mean_psi,
        var_psi,
        mean_size: sizes.iter().sum::<u64>() as f64 / count,
        quantiles: levels.iter().map(|&q| (q, quantile_sorted(&sorted, q))).collect(),
        degenerate,
    }
}

/// Runs `trials` independent samples of `psi` on up to `threads` workers
/// (0 = available parallelism). Output is identical for every thread count.
pub fn montecarlo_psi<R: Real>(
    model: &Model,
    trials: u64,
    seed: u64,
    table: &PrimeTable<R>,
    threads: usize,
) -> Result<MonteCarloRun> {
    if trials == 0 {
        return Err(Error::Domain("trials must be at least 1".into()));
    }
    if model.n() > table.limit() {
        return Err(Error::ResourceLimit {
            what: "model n",
            requested: model.n(),
            cap: table.limit(),
            flag: "--limit",
        });
    }
    let threads = match threads {
        0 => std::thread::available_parallelism().map_or(1, |n| n.get()),
        t => t,
    }
    .min(trials as usize);

    let run_one = |i: u64| -> Result<(f64, u64)> {
        let set = model.sample(seed, i);
        Ok((psi_of_set(&set, table)?.as_f64(), set.len() as u64))
    };

    let mut results: Vec<(f64, u64)> = Vec::with_capacity(trials as usize);
    if threads <= 1 {
        for i in 0..trials {
            results.push(run_one(i)?);
        }
    } else {
        let chunk = trials.div_ceil(threads as u64);
        let parts: Vec<Result<Vec<(f64, u64)>>> = std::thread::scope(|s| {
            let handles: Vec<_> = (0..threads as u64)
                .map(|w| {
                    let run_one = &run_one;
                    s.spawn(move || {
                        let lo = w * chunk;
                        let hi = ((w + 1) * chunk).min(trials);
                        (lo..hi).map(run_one).collect::<Result<Vec<_>>>()
                    })
                })
                .collect();
            handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
        });
        for part in parts {
            results.extend(part?);
        }
    }
    let (psis, sizes): (Vec<f64>, Vec<u64>) = results.into_iter().unzip();
    Ok(MonteCarloRun { stats: summarize(&psis, &sizes, &DEFAULT_QUANTILES), psis, sizes })
}
