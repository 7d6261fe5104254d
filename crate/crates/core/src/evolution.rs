//! Pairwise-comparison dynamics in a finite, well-mixed population and the
//! small-mutation Markov chain over monomorphic states.

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::EvoParams;
use crate::payoff::PayoffMatrix;
use crate::strategy::Scenario;

/// Smallest fixation probability reported; keeps the chain irreducible.
pub const PROBABILITY_FLOOR: f64 = 1e-300;

/// Residual above which the direct stationary solve is rejected.
pub const SOLVE_RESIDUAL_LIMIT: f64 = 1e-8;

/// Fermi imitation probability: a player with fitness `focal` copies one with fitness `model`.
pub fn fermi(selection: f64, focal: f64, model: f64) -> f64 {
    1.0 / (1.0 + (-selection * (model - focal)).exp())
}

/// Average payoffs of A- and B-strategists when `k` of `population` play A.
/// Players do not interact with themselves.
pub fn avg_payoffs(
    k: u32,
    pi_aa: f64,
    pi_ab: f64,
    pi_ba: f64,
    pi_bb: f64,
    population: u32,
) -> (f64, f64) {
    debug_assert!(k >= 1 && k < population);
    let (k, z) = (f64::from(k), f64::from(population));
    let a = ((k - 1.0) * pi_aa + (z - k) * pi_ab) / (z - 1.0);
    let b = (k * pi_ba + (z - k - 1.0) * pi_bb) / (z - 1.0);
    (a, b)
}

/// Probability that a single `mutant` fixates in a population of `resident`s.
///
/// Evaluates `1 / (1 + sum_i prod_{j<=i} T-(j)/T+(j))` with the ratio
/// reduced to `exp(-beta (Pi_A(j) - Pi_B(j)))` and the outer sum taken in
/// log space, so extreme selection neither overflows nor underflows.
pub fn fixation_probability(
    resident: usize,
    mutant: usize,
    payoffs: &PayoffMatrix,
    evo: &EvoParams,
) -> f64 {
    debug_assert_ne!(resident, mutant);
    fixation_2x2(
        payoffs.get(mutant, mutant),
        payoffs.get(mutant, resident),
        payoffs.get(resident, mutant),
        payoffs.get(resident, resident),
        evo,
    )
}

/// Fixation probability of a single A mutant among B residents, given the
/// four payoff entries of the A/B subgame.
pub fn fixation_2x2(pi_aa: f64, pi_ab: f64, pi_ba: f64, pi_bb: f64, evo: &EvoParams) -> f64 {
    let z = evo.population;
    let mut exponents = Vec::with_capacity(z as usize);
    exponents.push(0.0);
    let mut cumulative = 0.0;
    for j in 1..z {
        let (a, b) = avg_payoffs(j, pi_aa, pi_ab, pi_ba, pi_bb, z);
        cumulative -= evo.selection * (a - b);
        exponents.push(cumulative);
    }
    let rho = (-log_sum_exp(&exponents)).exp();
    rho.clamp(PROBABILITY_FLOOR, 1.0)
}

fn log_sum_exp(values: &[f64]) -> f64 {
    let max = values.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        return max;
    }
    max + values.iter().map(|v| (v - max).exp()).sum::<f64>().ln()
}

/// Row-stochastic transition matrix of the small-mutation chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarkovChain {
    size: usize,
    values: Vec<f64>,
}

impl MarkovChain {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let size = rows.len();
        if size == 0 || rows.iter().any(|r| r.len() != size) {
            return Err(Error::InvalidScenario(
                "transition matrix must be square".into(),
            ));
        }
        Ok(MarkovChain {
            size,
            values: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn get(&self, from: usize, to: usize) -> f64 {
        self.values[from * self.size + to]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.values.chunks(self.size).map(<[f64]>::to_vec).collect()
    }

    fn to_matrix(&self) -> DMatrix<f64> {
        DMatrix::from_row_slice(self.size, self.size, &self.values)
    }

    /// `max_j |(x^T M)_j - x_j|`.
    pub fn residual(&self, x: &[f64]) -> f64 {
        (0..self.size)
            .map(|j| {
                let flow: f64 = (0..self.size).map(|i| x[i] * self.get(i, j)).sum();
                (flow - x[j]).abs()
            })
            .fold(0.0, f64::max)
    }
}

/// Fixation matrix, chain and stationary distribution for one payoff matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvoResult {
    pub labels: Vec<String>,
    /// `fixation[i][j]`: probability that one `j` mutant takes over an all-`i`
    /// population. Diagonal entries are zero.
    pub fixation: Vec<Vec<f64>>,
    pub markov: MarkovChain,
    pub stationary: Vec<f64>,
}

fn fixation_matrix(payoffs: &PayoffMatrix, evo: &EvoParams) -> Vec<Vec<f64>> {
    let n = payoffs.len();
    (0..n * n)
        .into_par_iter()
        .map(|idx| {
            let (i, j) = (idx / n, idx % n);
            if i == j {
                0.0
            } else {
                fixation_probability(i, j, payoffs, evo)
            }
        })
        .collect::<Vec<_>>()
        .chunks(n)
        .map(<[f64]>::to_vec)
        .collect()
}

fn chain_from_fixation(fixation: &[Vec<f64>]) -> MarkovChain {
    let n = fixation.len();
    let mut values = vec![0.0; n * n];
    let spread = (n - 1) as f64;
    for i in 0..n {
        let mut off = 0.0;
        for j in (0..n).filter(|&j| j != i) {
            let t = fixation[i][j] / spread;
            values[i * n + j] = t;
            off += t;
        }
        values[i * n + i] = 1.0 - off;
    }
    MarkovChain { size: n, values }
}

/// Transition `i -> j` is a `j` mutant arising in an all-`i` population
/// (uniform over the other `n - 1` strategies) and fixating.
pub fn build_small_mutation_chain(payoffs: &PayoffMatrix, evo: &EvoParams) -> Result<MarkovChain> {
    evo.validate()?;
    Ok(chain_from_fixation(&fixation_matrix(payoffs, evo)))
}

/// Unique left eigenvector of `markov` for eigenvalue 1, normalised to sum 1.
///
/// Solves `(M^T - I) x = 0` with the last equation replaced by `sum x = 1`.
/// Fails with [`Error::IllConditioned`] when the residual exceeds
/// [`SOLVE_RESIDUAL_LIMIT`]; [`analyse`] then falls back to
/// [`stationary_by_state_reduction`] and finally [`stationary_by_power_iteration`].
pub fn stationary_distribution(markov: &MarkovChain) -> Result<Vec<f64>> {
    let n = markov.len();
    let mut system = markov.to_matrix().transpose() - DMatrix::identity(n, n);
    for j in 0..n {
        system[(n - 1, j)] = 1.0;
    }
    let mut rhs = DVector::zeros(n);
    rhs[n - 1] = 1.0;
    let solution = system.lu().solve(&rhs).ok_or(Error::IllConditioned {
        residual: f64::INFINITY,
    })?;
    let mut x: Vec<f64> = solution.iter().map(|v| v.max(0.0)).collect();
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    let residual = markov.residual(&x);
    if !residual.is_finite() || residual > SOLVE_RESIDUAL_LIMIT {
        return Err(Error::IllConditioned { residual });
    }
    Ok(x)
}

/// Grassmann-Taksar-Heyman state reduction. Uses only off-diagonal
/// entries and never subtracts, so chains whose exit probabilities are far
/// below machine epsilon keep their relative accuracy.
pub fn stationary_by_state_reduction(markov: &MarkovChain) -> Result<Vec<f64>> {
    let n = markov.len();
    let mut p = markov.rows();
    for k in (1..n).rev() {
        let exit: f64 = p[k][..k].iter().sum();
        if exit <= 0.0 || !exit.is_finite() {
            return Err(Error::IllConditioned {
                residual: f64::INFINITY,
            });
        }
        let (upper, rest) = p.split_at_mut(k);
        let pivot = &rest[0];
        for row in upper.iter_mut() {
            row[k] /= exit;
            let into = row[k];
            for (dst, &src) in row[..k].iter_mut().zip(&pivot[..k]) {
                *dst += into * src;
            }
        }
    }
    let mut x = vec![0.0; n];
    x[0] = 1.0;
    for k in 1..n {
        x[k] = (0..k).map(|i| x[i] * p[i][k]).sum();
    }
    let total: f64 = x.iter().sum();
    x.iter_mut().for_each(|v| *v /= total);
    let residual = markov.residual(&x);
    if !residual.is_finite() || residual > SOLVE_RESIDUAL_LIMIT {
        return Err(Error::IllConditioned { residual });
    }
    Ok(x)
}

pub fn stationary_by_power_iteration(
    markov: &MarkovChain,
    tolerance: f64,
    max_iterations: usize,
) -> Result<Vec<f64>> {
    let n = markov.len();
    let mut x = vec![1.0 / n as f64; n];
    for _ in 0..max_iterations {
        let mut next = vec![0.0; n];
        for (i, xi) in x.iter().enumerate() {
            for (j, nj) in next.iter_mut().enumerate() {
                *nj += xi * markov.get(i, j);
            }
        }
        let total: f64 = next.iter().sum();
        next.iter_mut().for_each(|v| *v /= total);
        let delta = x
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        x = next;
        if delta < tolerance {
            return Ok(x);
        }
    }
    Err(Error::NoConvergence {
        iterations: max_iterations,
    })
}

/// Full small-mutation analysis of a payoff matrix.
pub fn analyse(payoffs: &PayoffMatrix, evo: &EvoParams) -> Result<EvoResult> {
    evo.validate()?;
    let fixation = fixation_matrix(payoffs, evo);
    let markov = chain_from_fixation(&fixation);
    let stationary = match stationary_distribution(&markov) {
        Ok(x) => x,
        Err(Error::IllConditioned { .. }) => match stationary_by_state_reduction(&markov) {
            Ok(x) => x,
            Err(_) => stationary_by_power_iteration(&markov, 1e-12, 1_000_000)?,
        },
        Err(e) => return Err(e),
    };
    Ok(EvoResult {
        labels: payoffs.labels().to_vec(),
        fixation,
        markov,
        stationary,
    })
}

/// Stationary mass on strategies that act UNSAFE in self-play.
pub fn unsafe_frequency(stationary: &[f64], scenario: &Scenario) -> f64 {
    stationary
        .iter()
        .zip(scenario.unsafe_mask())
        .filter(|(_, is_unsafe)| *is_unsafe)
        .map(|(mass, _)| mass)
        .sum::<f64>()
        .clamp(0.0, 1.0)
}
