//! Agent-based Monte Carlo of imitation with exploration.
//!
//! Each update event picks a focal agent. With probability `mutation` it
//! switches to a uniformly random strategy; otherwise it compares itself
//! with a random other agent and copies it with the Fermi probability.
//! Fitness is the expected payoff against everyone else in the population.
//! The long-run time average of strategy frequencies approaches the
//! small-mutation stationary distribution as `mutation` goes to zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::evolution::fermi;
use crate::params::{EvoParams, RaceParams};
use crate::payoff::{build_payoff_matrix, PayoffMatrix};
use crate::strategy::Scenario;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbmConfig {
    pub scenario: Scenario,
    pub race: RaceParams,
    pub evo: EvoParams,
    /// Exploration probability per update event.
    pub mutation: f64,
    pub steps: u64,
    pub burn_in: u64,
    pub seed: u64,
    /// Number of evenly spaced running-average snapshots to keep.
    pub trace_points: usize,
}

impl AbmConfig {
    pub fn validate(&self) -> Result<()> {
        self.race.validate()?;
        self.evo.validate()?;
        if !(self.mutation > 0.0 && self.mutation <= 1.0) {
            return Err(Error::param(
                "mu",
                format!("mu must lie in (0, 1] (got {})", self.mutation),
            ));
        }
        if self.steps <= self.burn_in {
            return Err(Error::param(
                "steps",
                format!(
                    "steps ({}) must exceed burn_in ({})",
                    self.steps, self.burn_in
                ),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TracePoint {
    pub event: u64,
    pub frequencies: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AbmResult {
    pub labels: Vec<String>,
    /// Time-averaged strategy frequencies after burn-in.
    pub frequencies: Vec<f64>,
    pub trace: Vec<TracePoint>,
}

struct Population<'a> {
    agents: Vec<usize>,
    counts: Vec<u64>,
    payoffs: &'a PayoffMatrix,
}

impl Population<'_> {
    fn fitness(&self, strategy: usize) -> f64 {
        let row = self.payoffs.row(strategy);
        let total: f64 = self
            .counts
            .iter()
            .zip(row)
            .map(|(&count, &payoff)| count as f64 * payoff)
            .sum();
        (total - row[strategy]) / (self.agents.len() - 1) as f64
    }

    fn set(&mut self, agent: usize, strategy: usize) {
        let old = self.agents[agent];
        self.counts[old] -= 1;
        self.counts[strategy] += 1;
        self.agents[agent] = strategy;
    }
}

pub fn abm_run(config: &AbmConfig) -> Result<AbmResult> {
    config.validate()?;
    let payoffs = build_payoff_matrix(&config.scenario, &config.race)?;
    let n = payoffs.len();
    let z = config.evo.population as usize;
    let beta = config.evo.selection;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);

    let agents: Vec<usize> = (0..z).map(|_| rng.random_range(0..n)).collect();
    let mut counts = vec![0u64; n];
    for &a in &agents {
        counts[a] += 1;
    }
    let mut population = Population {
        agents,
        counts,
        payoffs: &payoffs,
    };

    let recorded = config.steps - config.burn_in;
    let trace_every = if config.trace_points == 0 {
        u64::MAX
    } else {
        (recorded / config.trace_points as u64).max(1)
    };
    let mut accumulated = vec![0u128; n];
    let mut trace = Vec::new();
    let average = |acc: &[u128], events: u64| -> Vec<f64> {
        let denom = events as f64 * z as f64;
        acc.iter().map(|&a| a as f64 / denom).collect()
    };

    for event in 0..config.steps {
        let focal = rng.random_range(0..z);
        if rng.random::<f64>() < config.mutation {
            let strategy = rng.random_range(0..n);
            population.set(focal, strategy);
        } else {
            let mut model = rng.random_range(0..z - 1);
            if model >= focal {
                model += 1;
            }
            let (mine, theirs) = (population.agents[focal], population.agents[model]);
            if mine != theirs {
                let p = fermi(beta, population.fitness(mine), population.fitness(theirs));
                if rng.random::<f64>() < p {
                    population.set(focal, theirs);
                }
            }
        }
        if event >= config.burn_in {
            for (acc, &count) in accumulated.iter_mut().zip(&population.counts) {
                *acc += u128::from(count);
            }
            let seen = event - config.burn_in + 1;
            if seen.is_multiple_of(trace_every) {
                trace.push(TracePoint {
                    event: event + 1,
                    frequencies: average(&accumulated, seen),
                });
            }
        }
    }

    Ok(AbmResult {
        labels: payoffs.labels().to_vec(),
        frequencies: average(&accumulated, recorded),
        trace,
    })
}

/// L1 distance between two distributions of equal length.
pub fn l1_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum()
}
