//! Threshold-rejection sampling from computed probabilities.
//!
//! Proposals are uniform outcomes; outcome `i` is accepted with probability
//! `min(p(i) / p_th, 1)`. Proposals and acceptance draws come from two
//! independent ChaCha streams, one draw of each per proposal, so the run is
//! fully determined by the seeds regardless of batching or threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::analytics::{ThresholdConfig, EULER_GAMMA};
use crate::circuit::{Circuit, Outcome};
use crate::error::{invalid, Error, Result};
use crate::rewrite::{renormalize, RewriteConfig};
use crate::statevector::{amplitude_direct, amplitude_transversal, simulate, MemoryCap, Method};

/// Outcome probabilities on request. Requests may be served concurrently.
pub trait ProbabilitySource: Sync {
    fn num_qubits(&self) -> usize;
    fn probability(&self, outcome: u64) -> Result<f64>;
}

/// Fully enumerated distribution.
#[derive(Clone, Debug)]
pub struct TableSource {
    n: usize,
    probs: Vec<f64>,
}

impl TableSource {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if !probs.len().is_power_of_two() || probs.len() < 2 {
            return invalid(format!("{} probabilities is not a power of two", probs.len()));
        }
        Ok(Self {
            n: probs.len().trailing_zeros() as usize,
            probs,
        })
    }

    /// Every output probability of `c`, by direct simulation.
    pub fn from_circuit(c: &Circuit, cap: MemoryCap) -> Result<Self> {
        Self::new(simulate(c, cap)?.probabilities())
    }

    /// Normalized Exp(1) draws: a synthetic Porter-Thomas distribution.
    pub fn porter_thomas(n: usize, seed: u64) -> Result<Self> {
        if n == 0 || n > 30 {
            return invalid(format!("synthetic table size 2^{n} not supported"));
        }
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let mut probs: Vec<f64> = (0..1usize << n).map(|_| Exp1.sample(&mut rng)).collect();
        let total: f64 = probs.iter().sum();
        probs.iter_mut().for_each(|p| *p /= total);
        Self::new(probs)
    }

    pub fn probabilities(&self) -> &[f64] {
        &self.probs
    }
}

impl ProbabilitySource for TableSource {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn probability(&self, outcome: u64) -> Result<f64> {
        self.probs
            .get(outcome as usize)
            .copied()
            .ok_or_else(|| Error::InvalidArgument(format!("outcome {outcome} out of range")))
    }
}

/// `p(i) = 2^-n` for every outcome.
#[derive(Clone, Copy, Debug)]
pub struct UniformSource {
    pub n: usize,
}

impl ProbabilitySource for UniformSource {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn probability(&self, _outcome: u64) -> Result<f64> {
        Ok(0.5f64.powi(self.n as i32))
    }
}

/// All probability on one outcome.
#[derive(Clone, Copy, Debug)]
pub struct PointMassSource {
    pub n: usize,
    pub outcome: u64,
}

impl ProbabilitySource for PointMassSource {
    fn num_qubits(&self) -> usize {
        self.n
    }

    fn probability(&self, outcome: u64) -> Result<f64> {
        Ok(if outcome == self.outcome { 1.0 } else { 0.0 })
    }
}

/// Probabilities computed per request from a circuit.
#[derive(Clone, Debug)]
pub struct CircuitSource {
    pub circuit: Circuit,
    pub method: Method,
    pub config: RewriteConfig,
}

impl ProbabilitySource for CircuitSource {
    fn num_qubits(&self) -> usize {
        self.circuit.num_qubits()
    }

    fn probability(&self, outcome: u64) -> Result<f64> {
        let o = Outcome::from_index(outcome, self.num_qubits());
        let amp = match self.method {
            Method::Direct => amplitude_direct(&self.circuit, &o, self.config.memory_cap)?,
            Method::Transversal => {
                let lc = renormalize(&self.circuit, &o, &self.config)?;
                amplitude_transversal(&lc, self.config.memory_cap)?
            }
        };
        Ok(amp.value.norm_sqr())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SamplerOptions {
    pub proposal_seed: u64,
    pub accept_seed: u64,
    /// Proposals whose probabilities are requested together.
    pub batch_size: usize,
    pub max_proposals: u64,
}

impl Default for SamplerOptions {
    fn default() -> Self {
        Self {
            proposal_seed: 1,
            accept_seed: 2,
            batch_size: 256,
            max_proposals: 1 << 40,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StopRule {
    /// Stop at this many accepted samples.
    Accepted(usize),
    /// Stop after exactly this many proposals.
    Proposals(u64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct SampleRun {
    /// Accepted outcomes in proposal order.
    pub samples: Vec<u64>,
    /// True probability of each accepted outcome.
    pub probabilities: Vec<f64>,
    pub proposals: u64,
}

impl SampleRun {
    pub fn acceptance_ratio(&self) -> f64 {
        if self.proposals == 0 {
            return 0.0;
        }
        self.samples.len() as f64 / self.proposals as f64
    }
}

/// Draws until `count` samples are accepted.
pub fn threshold_reject_sample(
    source: &dyn ProbabilitySource,
    cfg: &ThresholdConfig,
    opts: &SamplerOptions,
    count: usize,
) -> Result<SampleRun> {
    if count == 0 {
        return invalid("sample count must be at least 1");
    }
    threshold_reject_run(source, cfg, opts, StopRule::Accepted(count))
}

pub fn threshold_reject_run(
    source: &dyn ProbabilitySource,
    cfg: &ThresholdConfig,
    opts: &SamplerOptions,
    stop: StopRule,
) -> Result<SampleRun> {
    let n = source.num_qubits();
    if n != cfg.n as usize {
        return invalid(format!("threshold is for {} qubits, source has {n}", cfg.n));
    }
    if opts.batch_size == 0 {
        return invalid("batch size must be at least 1");
    }
    let dim = cfg.dim();
    let p_th = cfg.p_th();
    let mut proposal_rng = ChaCha20Rng::seed_from_u64(opts.proposal_seed);
    let mut accept_rng = ChaCha20Rng::seed_from_u64(opts.accept_seed);
    let mut run = SampleRun {
        samples: Vec::new(),
        probabilities: Vec::new(),
        proposals: 0,
    };
    let limit = match stop {
        StopRule::Accepted(_) => opts.max_proposals,
        StopRule::Proposals(p) => p.min(opts.max_proposals),
    };
    loop {
        let done = match stop {
            StopRule::Accepted(c) => run.samples.len() >= c,
            StopRule::Proposals(p) => run.proposals >= p,
        };
        if done {
            return Ok(run);
        }
        if run.proposals >= limit {
            return Err(Error::BudgetExceeded {
                requested: match stop {
                    StopRule::Accepted(c) => c,
                    StopRule::Proposals(p) => p as usize,
                },
                accepted: run.samples.len(),
                proposals: run.proposals,
            });
        }
        let batch = (opts.batch_size as u64).min(limit - run.proposals) as usize;
        let draws: Vec<(u64, f64)> = (0..batch)
            .map(|_| (proposal_rng.gen_range(0..dim), accept_rng.gen::<f64>()))
            .collect();
        let probs: Vec<f64> = draws
            .par_iter()
            .map(|&(i, _)| source.probability(i))
            .collect::<Result<_>>()?;
        for (&(i, u), &p) in draws.iter().zip(&probs) {
            run.proposals += 1;
            if u < (p / p_th).min(1.0) {
                run.samples.push(i);
                run.probabilities.push(p);
            }
            if matches!(stop, StopRule::Accepted(c) if run.samples.len() >= c) {
                break;
            }
        }
    }
}

/// `(ln 2^n + gamma) - mean ln(1/p(i))` over the samples.
pub fn empirical_cross_entropy(
    samples: &[u64],
    source: &dyn ProbabilitySource,
    n: usize,
) -> Result<f64> {
    let probs = samples
        .iter()
        .map(|&i| source.probability(i))
        .collect::<Result<Vec<_>>>()?;
    cross_entropy_of_probabilities(samples, &probs, n)
}

/// [`empirical_cross_entropy`] from the samples' known probabilities.
pub fn cross_entropy_of_probabilities(samples: &[u64], probs: &[f64], n: usize) -> Result<f64> {
    if samples.is_empty() || samples.len() != probs.len() {
        return invalid("need one probability per sample and at least one sample");
    }
    let mut acc = 0.0;
    for (&i, &p) in samples.iter().zip(probs) {
        if p <= 0.0 {
            return Err(Error::UndefinedLogarithm { outcome: i });
        }
        acc += -p.ln();
    }
    Ok(n as f64 * std::f64::consts::LN_2 + EULER_GAMMA - acc / samples.len() as f64)
}
