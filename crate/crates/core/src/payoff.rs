//! Averaged per-round race payoffs between strategy descriptors.
//!
//! A pairing is resolved in a fixed order: agreement formation, action
//! selection, punishment, effective speeds, benefit shares, prize, costs and
//! finally the disaster discount on UNSAFE players. With two strategies that
//! never commit this reduces to the classic SAFE/UNSAFE race matrix
//!
//! ```text
//!          AS                     AU
//! AS   B/(2W) + b/2 - c        b/(s+1) - c
//! AU   p (sB/W + sb/(s+1))     p (sB/(2W) + b/2)
//! ```

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::params::RaceParams;
use crate::strategy::{Action, PunishScope, Regime, Scenario, StrategyDescriptor};

/// Relative tolerance under which two effective speeds count as a tie.
pub const SPEED_TIE_TOLERANCE: f64 = 1e-9;

/// Everything that happened in one pairing, seen from both sides.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PairOutcome {
    pub agreement_formed: bool,
    pub action_row: Action,
    pub action_col: Action,
    pub speed_row: f64,
    pub speed_col: f64,
    pub payoff_row: f64,
    pub payoff_col: f64,
}

fn base_speed(action: Action, params: &RaceParams) -> f64 {
    match action {
        Action::Safe => 1.0,
        Action::Unsafe => params.unsafe_speed,
    }
}

fn speeds_tie(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= SPEED_TIE_TOLERANCE * scale
}

/// Peer punishment: does `punisher` sanction a co-player acting `other`?
fn peer_punishes(punisher: &StrategyDescriptor, other: Action, agreement: bool) -> bool {
    other == Action::Unsafe
        && match punisher.punish_scope {
            PunishScope::None => false,
            PunishScope::CommittedOnly => agreement,
            PunishScope::AnyUnsafe => true,
        }
}

/// Per-round payoff of a player with speed `own` racing a player with speed `other`.
fn side_payoff(
    own: f64,
    other: f64,
    action: Action,
    pays_commitment: bool,
    params: &RaceParams,
) -> f64 {
    let total = own + other;
    let share = if total > 0.0 {
        params.benefit * own / total
    } else {
        0.0
    };
    let per_round_prize = params.prize / f64::from(params.rounds);
    let prize = if own == 0.0 && other == 0.0 {
        0.0
    } else if speeds_tie(own, other) {
        own * per_round_prize / 2.0
    } else if own > other {
        own * per_round_prize
    } else {
        0.0
    };
    let mut payoff = share + prize;
    if action == Action::Safe {
        payoff -= params.safety_cost;
    }
    if pays_commitment {
        payoff -= params.commitment_cost;
    }
    if action == Action::Unsafe {
        payoff *= params.survival();
    }
    payoff
}

/// Resolves one pairing of `row` against `col`.
pub fn resolve_pair(
    row: &StrategyDescriptor,
    col: &StrategyDescriptor,
    scenario: &Scenario,
    params: &RaceParams,
) -> Result<PairOutcome> {
    for descriptor in [row, col] {
        if scenario.regime != Regime::Peer && descriptor.punish_scope != PunishScope::None {
            return Err(Error::InvalidStrategy {
                name: descriptor.name.clone(),
                message: format!(
                    "peer punishment is not available under the {} regime",
                    scenario.regime
                ),
            });
        }
    }

    let agreement = scenario.commitments_enabled && row.commits && col.commits;
    let choose = |d: &StrategyDescriptor| {
        if agreement {
            d.action_with_agreement
        } else {
            d.action_without_agreement
        }
    };
    let action_row = choose(row);
    let action_col = choose(col);

    let mut speed_row = base_speed(action_row, params);
    let mut speed_col = base_speed(action_col, params);

    match scenario.regime {
        Regime::None => {}
        Regime::Peer => {
            if peer_punishes(row, action_col, agreement) {
                speed_row -= params.sanction_cost;
                speed_col -= params.sanction_effect;
            }
            if peer_punishes(col, action_row, agreement) {
                speed_col -= params.sanction_cost;
                speed_row -= params.sanction_effect;
            }
        }
        Regime::Institutional => {
            // Without commitments every UNSAFE act is sanctioned; with them
            // only violations of a formed agreement are.
            let enforced = !scenario.commitments_enabled || agreement;
            if enforced && action_row == Action::Unsafe {
                speed_row -= params.sanction_effect;
            }
            if enforced && action_col == Action::Unsafe {
                speed_col -= params.sanction_effect;
            }
        }
    }
    let speed_row = speed_row.max(0.0);
    let speed_col = speed_col.max(0.0);

    let pays_row = agreement && row.commits;
    let pays_col = agreement && col.commits;
    Ok(PairOutcome {
        agreement_formed: agreement,
        action_row,
        action_col,
        speed_row,
        speed_col,
        payoff_row: side_payoff(speed_row, speed_col, action_row, pays_row, params),
        payoff_col: side_payoff(speed_col, speed_row, action_col, pays_col, params),
    })
}

/// Square matrix of row-player payoffs, indexed in scenario strategy order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PayoffMatrix {
    labels: Vec<String>,
    values: Vec<f64>,
}

impl PayoffMatrix {
    /// Builds a matrix from row-major rows. Rows must be square and match `labels`.
    pub fn from_rows(labels: Vec<String>, rows: &[Vec<f64>]) -> Result<Self> {
        let n = labels.len();
        if n < 2 || rows.len() != n || rows.iter().any(|r| r.len() != n) {
            return Err(Error::InvalidScenario(format!(
                "payoff matrix must be square with {n} >= 2 labelled rows"
            )));
        }
        Ok(PayoffMatrix {
            labels,
            values: rows.iter().flatten().copied().collect(),
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    /// Payoff of strategy `row` against strategy `col`.
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.len() + col]
    }

    pub fn row(&self, row: usize) -> &[f64] {
        let n = self.len();
        &self.values[row * n..(row + 1) * n]
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len()).map(|i| self.row(i).to_vec()).collect()
    }
}

pub fn build_payoff_matrix(scenario: &Scenario, params: &RaceParams) -> Result<PayoffMatrix> {
    params.validate()?;
    let strategies = scenario.strategies();
    let n = strategies.len();
    let mut values = vec![0.0; n * n];
    for (i, row) in strategies.iter().enumerate() {
        for (j, col) in strategies.iter().enumerate() {
            values[i * n + j] = resolve_pair(row, col, scenario, params)?.payoff_row;
        }
    }
    Ok(PayoffMatrix {
        labels: scenario.names().iter().map(|s| s.to_string()).collect(),
        values,
    })
}
